//! Randomized invariants over the exact linear algebra and the differential
//! machinery, checked with proptest (100 cases per property).

use std::sync::Arc;

use proptest::prelude::*;

use kaehler::algebra::{make_hom_on_generators, truncation_algebra, AlgRef, Hom};
use kaehler::field::{Field, Scalar};
use kaehler::hochschild::bar_complex;
use kaehler::matrix::Matrix;
use kaehler::omega::{induced_map, kaehler, OmegaModule};
use kaehler::subspace::{kernel_basis, Subspace};

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rationals),
        Just(Field::prime(2).expect("prime")),
        Just(Field::prime(3).expect("prime")),
        Just(Field::prime(5).expect("prime")),
    ]
}

fn matrix_strategy() -> impl Strategy<Value = Matrix> {
    (field_strategy(), 1usize..5, 1usize..5).prop_flat_map(|(f, rows, cols)| {
        proptest::collection::vec(-5i64..=5, rows * cols).prop_map(move |entries| {
            let mut m = Matrix::zero(f, rows, cols);
            for (k, &e) in entries.iter().enumerate() {
                m.set(k / cols, k % cols, f.from_int(e));
            }
            m
        })
    })
}

fn subspace_pair_strategy() -> impl Strategy<Value = (Subspace, Subspace)> {
    (field_strategy(), 2usize..6).prop_flat_map(|(f, n)| {
        let span = proptest::collection::vec(
            proptest::collection::vec(-3i64..=3, n),
            0..=n,
        )
        .prop_map(move |rows| {
            let vs = rows
                .iter()
                .map(|r| r.iter().map(|&e| f.from_int(e)).collect())
                .collect();
            Subspace::from_span(f, n, vs)
        });
        (span.clone(), span)
    })
}

fn trunc(f: Field, n: u32) -> AlgRef {
    Arc::new(truncation_algebra(f, &["s".to_string()], n).expect("truncation"))
}

/// A valid power map trunc(n) -> trunc(m): s -> t^k needs k*n >= m.
fn power_map(f: Field, n: u32, k: u32, m: u32, src_var: &str, dst_var: &str) -> (AlgRef, AlgRef, Hom) {
    let a = Arc::new(truncation_algebra(f, &[src_var.to_string()], n).expect("truncation"));
    let b = Arc::new(truncation_algebra(f, &[dst_var.to_string()], m).expect("truncation"));
    let t = b.named_elem(dst_var).expect("var");
    let mut img = b.one_elem();
    for _ in 0..k {
        img = b.mul_elems(&img, &t);
    }
    let h = make_hom_on_generators(&a, &b, &[(src_var.to_string(), img)]).expect("hom");
    (a, b, h)
}

fn omega_of(a: &AlgRef) -> Arc<OmegaModule> {
    Arc::new(kaehler(a))
}

fn add_vecs(f: Field, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().zip(y).map(|(a, b)| f.add(a, b)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rref_is_idempotent(m in matrix_strategy()) {
        let (r, pivots, rank) = m.rref();
        let (r2, pivots2, rank2) = r.rref();
        prop_assert_eq!(r, r2);
        prop_assert_eq!(pivots, pivots2);
        prop_assert_eq!(rank, rank2);
    }

    #[test]
    fn rank_plus_nullity_is_the_column_count(m in matrix_strategy()) {
        prop_assert_eq!(m.rank() + kernel_basis(&m).dim(), m.cols);
    }

    #[test]
    fn kernel_matches_exhaustive_search_over_f2(
        rows in 1usize..4,
        cols in 1usize..4,
        entries in proptest::collection::vec(0i64..=1, 9),
    ) {
        let f = Field::prime(2).expect("prime");
        let mut m = Matrix::zero(f, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f.from_int(entries[i * 3 + j]));
            }
        }
        let ker = kernel_basis(&m);
        let mut solutions = 0usize;
        for mask in 0..(1u32 << cols) {
            let v: Vec<Scalar> = (0..cols).map(|j| f.from_int(((mask >> j) & 1) as i64)).collect();
            let img = m.mul_vec(&v);
            let is_zero = img.iter().all(|c| f.is_zero(c));
            prop_assert_eq!(is_zero, ker.contains(&v));
            if is_zero {
                solutions += 1;
            }
        }
        prop_assert_eq!(solutions, 1usize << ker.dim());
    }

    #[test]
    fn modular_dimension_formula((u, v) in subspace_pair_strategy()) {
        let s = u.sum(&v).expect("sum");
        let i = u.intersect(&v).expect("intersect");
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
        prop_assert!(s.contains_subspace(&u) && s.contains_subspace(&v));
        prop_assert!(u.contains_subspace(&i) && v.contains_subspace(&i));
    }

    #[test]
    fn bar_boundary_squares_to_zero(f in field_strategy(), n in 2u32..6) {
        let r = trunc(f, n);
        let c = bar_complex(&r, 3).expect("bar complex");
        for d in 2..c.boundaries.len() {
            prop_assert!(c.boundaries[d - 1].mul(&c.boundaries[d]).is_zero());
        }
    }

    #[test]
    fn leibniz_rule_holds(
        f in field_strategy(),
        n in 2u32..6,
        xs in proptest::collection::vec(-2i64..=2, 6),
        ys in proptest::collection::vec(-2i64..=2, 6),
    ) {
        let a = trunc(f, n);
        let o = omega_of(&a);
        let x: Vec<Scalar> = (0..a.dim).map(|i| f.from_int(xs[i])).collect();
        let y: Vec<Scalar> = (0..a.dim).map(|i| f.from_int(ys[i])).collect();
        let lhs = o.d_of(&a.mul_elems(&x, &y));
        let rhs = add_vecs(f, &o.x_dy(&x, &y), &o.x_dy(&y, &x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn induced_maps_respect_composition(
        f in field_strategy(),
        n in 2u32..4,
        k in 1u32..3,
        j in 1u32..3,
    ) {
        // trunc(n) -s->t^k-> trunc(kn) -t->u^j-> trunc(j*k*n)
        let (a, b, h1) = power_map(f, n, k, k * n, "s", "t");
        let (_, c, h2) = power_map(f, k * n, j, j * k * n, "t", "u");
        let composed = Hom::compose(&h1, &h2);
        let oa = omega_of(&a);
        let ob = omega_of(&b);
        let oc = omega_of(&c);
        let m1 = induced_map(&h1, &oa, &ob).matrix;
        let m2 = induced_map(&h2, &ob, &oc).matrix;
        let mc = induced_map(&composed, &oa, &oc).matrix;
        prop_assert_eq!(m2.mul(&m1), mc);
    }
}
