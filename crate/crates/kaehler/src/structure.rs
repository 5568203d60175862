//! Structural analysis of finite commutative algebras: radical, local
//! decomposition via idempotent lifting, principal-ideal classification,
//! socle and embedding dimension.

use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};

use crate::algebra::{
    quotient_by_ideal, AlgRef, Algebra, AlgebraError, Hom, Ideal, Result,
};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::subspace::{kernel_basis, Subspace};

/// Largest element count for the exhaustive nilpotency fallback over F_p.
const EXHAUSTIVE_CAP: u64 = 20_000;

/// The nilradical, as a validated ideal.
///
/// Char 0 uses the trace-form kernel. Char p prefers the tracked maximal
/// ideal; without it the fallback enumerates all elements when the algebra
/// is small enough, otherwise the radical is reported undecided.
pub fn radical(a: &AlgRef) -> Result<Ideal> {
    let f = a.field;
    let n = a.dim;
    let space = match f {
        Field::Rationals => {
            // G_{ij} = Tr(L_{e_i e_j}); the kernel of G is the radical.
            let mut g = Matrix::zero(f, n, n);
            for i in 0..n {
                for j in 0..n {
                    let prod = a.mul_elems(&a.basis_elem(i), &a.basis_elem(j));
                    g.set(i, j, trace_left_mul(a, &prod));
                }
            }
            kernel_basis(&g)
        }
        Field::Prime(p) => {
            if let Some(m) = &a.local_info {
                m.clone()
            } else {
                let count = (p as u128).checked_pow(n as u32);
                match count {
                    Some(c) if n <= 6 && c <= EXHAUSTIVE_CAP as u128 => {
                        let mut nilpotents = Vec::new();
                        for v in enumerate_elements(f, p, n) {
                            if a.is_nilpotent_elem(&v) {
                                nilpotents.push(v);
                            }
                        }
                        Subspace::from_span(f, n, nilpotents)
                    }
                    _ => return Err(AlgebraError::RadicalUndecided),
                }
            }
        }
    };
    Ideal::new(a.clone(), space)
}

fn trace_left_mul(a: &Algebra, x: &[Scalar]) -> Scalar {
    let f = a.field;
    let mut acc = f.zero();
    for l in 0..a.dim {
        for (i, xi) in x.iter().enumerate() {
            if !f.is_zero(xi) {
                acc = f.add(&acc, &f.mul(xi, a.c(i, l, l)));
            }
        }
    }
    acc
}

pub fn enumerate_elements(f: Field, p: u64, n: usize) -> Vec<Vec<Scalar>> {
    let total = (p as u128).pow(n as u32) as u64;
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let r = k % p;
                    k /= p;
                    f.from_int(r as i64)
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Local decomposition
// ---------------------------------------------------------------------------

/// Monic minimal polynomial of a square matrix, as coefficients c_0..c_d.
fn minimal_polynomial(m: &Matrix) -> Vec<Scalar> {
    let f = m.field;
    let n = m.rows;
    let mut powers: Vec<Matrix> = vec![Matrix::identity(f, n)];
    loop {
        let k = powers.len();
        let next = powers[k - 1].mul(m);
        // Is `next` in the span of the previous powers?
        let mut rows = Vec::with_capacity(k);
        for p in &powers {
            rows.push(flatten(p));
        }
        let span = Matrix::from_rows(f, rows).transpose();
        if let Some(coeffs) = span.solve(&flatten(&next)) {
            // m^k = sum coeffs_i m^i  =>  min poly t^k - sum coeffs_i t^i.
            let mut poly: Vec<Scalar> = coeffs.iter().map(|c| f.neg(c)).collect();
            poly.push(f.one());
            return poly;
        }
        powers.push(next);
    }
}

fn flatten(m: &Matrix) -> Vec<Scalar> {
    let mut v = Vec::with_capacity(m.rows * m.cols);
    for r in 0..m.rows {
        v.extend(m.row_vec(r));
    }
    v
}

fn eval_poly(f: Field, poly: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = f.zero();
    for c in poly.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n: u64 = n.abs().try_into().ok()?;
    if n == 0 {
        return Some(vec![]);
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            out.push(n / d);
        }
        d += 1;
    }
    Some(out)
}

/// Roots of a monic polynomial lying in the base field.
/// `None` means the root search itself was infeasible.
fn field_roots(f: Field, poly: &[Scalar]) -> Option<Vec<Scalar>> {
    match f {
        Field::Prime(p) => {
            let mut roots = Vec::new();
            for r in 0..p {
                let x = f.from_int(r as i64);
                if f.is_zero(&eval_poly(f, poly, &x)) {
                    roots.push(x);
                }
            }
            Some(roots)
        }
        Field::Rationals => {
            // Clear denominators to an integer polynomial; rational roots
            // are +-(divisor of constant)/(divisor of leading).
            let rats: Vec<_> = poly.iter().map(|c| c.as_rat().unwrap().clone()).collect();
            let mut lcm = BigInt::one();
            for r in &rats {
                let d = r.denom();
                let g = num::integer::gcd(lcm.clone(), d.clone());
                lcm = lcm / g * d;
            }
            let ints: Vec<BigInt> = rats.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
            // Strip zero roots.
            let mut work = ints.clone();
            let mut roots = Vec::new();
            while !work.is_empty() && work[0].is_zero() {
                if roots.is_empty() {
                    roots.push(f.zero());
                }
                work.remove(0);
            }
            if work.len() <= 1 {
                return Some(roots);
            }
            let lead = work.last().unwrap();
            let cons = &work[0];
            let num_divs = divisors(cons)?;
            let den_divs = divisors(lead)?;
            for &p in &num_divs {
                for &q in &den_divs {
                    for sign in [1i64, -1] {
                        let cand = Scalar::Rat(num::rational::BigRational::new(
                            BigInt::from(sign) * BigInt::from(p),
                            BigInt::from(q),
                        ));
                        if f.is_zero(&eval_poly(f, poly, &cand)) && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
            Some(roots)
        }
    }
}

/// A local factor eA of an algebra: the factor with its projection
/// x -> ex and the linear inclusion eA -> A (multiplicative but not
/// unit-preserving, hence a plain matrix).
#[derive(Clone, Debug)]
pub struct LocalFactor {
    pub algebra: AlgRef,
    pub projection: Hom,
    pub inclusion: Matrix,
}

/// Decomposes `a` into local factors with projections, via idempotents
/// lifted from the semisimple quotient with the iteration e <- 3e^2 - 2e^3.
///
/// Errors with `NotSplit` when the semisimple quotient has a character not
/// defined over the base field.
pub fn local_decomposition(a: &AlgRef) -> Result<Vec<LocalFactor>> {
    if a.local_info.is_some() {
        return Ok(vec![LocalFactor {
            algebra: a.clone(),
            projection: Hom::identity(a),
            inclusion: Matrix::identity(a.field, a.dim),
        }]);
    }
    let f = a.field;
    let rad = radical(a)?;
    let (abar, proj) = if rad.space.is_zero() {
        (a.clone(), Hom::identity(a))
    } else {
        let (q, s, _) = quotient_by_ideal(a, &rad.space.basis_vectors())?;
        (Arc::new(q), s)
    };
    // Refine the full space into simultaneous eigenspaces of the left
    // multiplications on the semisimple quotient.
    let nbar = abar.dim;
    let mut blocks = vec![Subspace::full(f, nbar)];
    for t in 1..nbar {
        if blocks.iter().all(|b| b.dim() == 1) {
            break;
        }
        let l = abar.left_mul_matrix(&abar.basis_elem(t));
        let poly = minimal_polynomial(&l);
        let roots = field_roots(f, &poly).ok_or(AlgebraError::NotSplit)?;
        let eigenspaces: Vec<Subspace> = roots
            .iter()
            .map(|lam| {
                let shifted = l.add(&Matrix::identity(f, nbar).scale(&f.neg(lam)));
                kernel_basis(&shifted)
            })
            .collect();
        let mut refined = Vec::new();
        for block in &blocks {
            if block.dim() == 1 {
                refined.push(block.clone());
                continue;
            }
            let mut pieces = Vec::new();
            for e in &eigenspaces {
                let piece = block.intersect(e).map_err(|_| AlgebraError::NotSplit)?;
                if !piece.is_zero() {
                    pieces.push(piece);
                }
            }
            if pieces.iter().map(|p| p.dim()).sum::<usize>() != block.dim() {
                return Err(AlgebraError::NotSplit);
            }
            refined.extend(pieces);
        }
        blocks = refined;
    }
    if blocks.iter().any(|b| b.dim() != 1) {
        return Err(AlgebraError::NotSplit);
    }
    // One primitive idempotent per block.
    let mut idempotents = Vec::new();
    for block in &blocks {
        let v = block.basis.row_vec(0);
        let vv = abar.mul_elems(&v, &v);
        let j = (0..nbar).find(|&j| !f.is_zero(&v[j])).expect("block is nonzero");
        let alpha = f.div(&vv[j], &v[j]).map_err(|_| AlgebraError::NotSplit)?;
        if f.is_zero(&alpha) {
            return Err(AlgebraError::NotSplit);
        }
        let inv = f.inv(&alpha).unwrap();
        let ebar: Vec<Scalar> = v.iter().map(|c| f.mul(c, &inv)).collect();
        // Lift to a; the iteration converges because the defect is nilpotent.
        let mut e = lift_through(&proj.matrix, &ebar)?;
        let mut converged = false;
        for _ in 0..64 {
            let e2 = a.mul_elems(&e, &e);
            if e2 == e {
                converged = true;
                break;
            }
            let e3 = a.mul_elems(&e2, &e);
            let three = f.from_int(3);
            let two = f.from_int(2);
            e = (0..a.dim)
                .map(|i| f.sub(&f.mul(&three, &e2[i]), &f.mul(&two, &e3[i])))
                .collect();
        }
        if !converged {
            return Err(AlgebraError::IdempotentLiftDiverged);
        }
        idempotents.push(e);
    }
    // Sort idempotents by their coordinate vectors rendered canonically so
    // the factor order is deterministic.
    idempotents.sort_by_key(|e| e.iter().map(|c| f.render(c)).collect::<Vec<_>>());
    let mut factors = Vec::new();
    for e in &idempotents {
        factors.push(factor_algebra(a, e, &rad.space)?);
    }
    Ok(factors)
}

fn lift_through(proj: &Matrix, target: &[Scalar]) -> Result<Vec<Scalar>> {
    proj.solve(target).ok_or(AlgebraError::NotSplit)
}

/// The subalgebra eA with unit e, plus the projection x -> ex.
fn factor_algebra(a: &AlgRef, e: &[Scalar], rad: &Subspace) -> Result<LocalFactor> {
    let f = a.field;
    let n = a.dim;
    let le = a.left_mul_matrix(e);
    let image = Subspace::from_matrix_cols(&le);
    let d = image.dim();
    // Basis with e first.
    let mut cols: Vec<Vec<Scalar>> = vec![e.to_vec()];
    for v in image.basis_vectors() {
        let span = Subspace::from_span(f, n, cols.clone());
        if !span.contains(&v) {
            cols.push(v);
        }
        if cols.len() == d {
            break;
        }
    }
    let mut basis = Matrix::zero(f, n, d);
    for (j, v) in cols.iter().enumerate() {
        for r in 0..n {
            basis.set(r, j, v[r].clone());
        }
    }
    let mut table = vec![f.zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            let prod = a.mul_elems(&basis.col_vec(i), &basis.col_vec(j));
            let coeffs = basis.solve(&prod).ok_or(AlgebraError::NotInAlgebra)?;
            for l in 0..d {
                table[(i * d + j) * d + l] = coeffs[l].clone();
            }
        }
    }
    // Maximal ideal of the factor: e * radical(a), in factor coordinates.
    let mut mvecs = Vec::new();
    for r in rad.basis_vectors() {
        let er = a.mul_elems(e, &r);
        if let Some(c) = basis.solve(&er) {
            mvecs.push(c);
        }
    }
    let local = Subspace::from_span(f, d, mvecs);
    let labels = (0..d)
        .map(|j| if j == 0 { "1".to_string() } else { format!("f{j}") })
        .collect();
    let factor = Algebra::from_table(f, labels, table, Some(local))?;
    let factor = Arc::new(factor);
    // Projection hom: x -> coordinates of e*x.
    let mut pm = Matrix::zero(f, d, n);
    for j in 0..n {
        let ex = a.mul_elems(e, &a.basis_elem(j));
        let c = basis.solve(&ex).ok_or(AlgebraError::NotInAlgebra)?;
        for r in 0..d {
            pm.set(r, j, c[r].clone());
        }
    }
    let proj = Hom::new(a.clone(), factor.clone(), pm)?;
    Ok(LocalFactor {
        algebra: factor,
        projection: proj,
        inclusion: basis,
    })
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Powers of the tracked maximal ideal: M, M^2, ... until zero.
pub fn maximal_ideal_powers(a: &Algebra) -> Result<Vec<Subspace>> {
    let m = a.maximal_ideal()?;
    let mut powers = vec![m.clone()];
    while !powers.last().unwrap().is_zero() {
        powers.push(a.subspace_product(powers.last().unwrap(), m));
    }
    Ok(powers)
}

/// Nilpotency index: the least t with M^t = 0 (t = 1 for a field).
pub fn nilpotency_index(a: &Algebra) -> Result<usize> {
    Ok(maximal_ideal_powers(a)?.len())
}

pub fn embedding_dim(a: &Algebra) -> Result<usize> {
    let powers = maximal_ideal_powers(a)?;
    let m2 = if powers.len() > 1 { powers[1].dim() } else { 0 };
    Ok(powers[0].dim() - m2)
}

/// Whether `a` is a principal ideal algebra, with the nilpotency index of
/// each local factor.
pub fn is_pia(a: &AlgRef) -> Result<(bool, Vec<usize>)> {
    let factors = local_decomposition(a)?;
    let mut indices = Vec::new();
    let mut pia = true;
    for lf in &factors {
        if embedding_dim(&lf.algebra)? > 1 {
            pia = false;
        }
        indices.push(nilpotency_index(&lf.algebra)?);
    }
    Ok((pia, indices))
}

/// PIA with every factor tame: char 0, or p not dividing the factor's
/// nilpotency index.
pub fn is_tame_pia(a: &AlgRef) -> Result<bool> {
    let (pia, indices) = is_pia(a)?;
    if !pia {
        return Ok(false);
    }
    Ok(match a.field {
        Field::Rationals => true,
        Field::Prime(p) => indices.iter().all(|&n| (n as u64) % p != 0),
    })
}

/// The annihilator of the maximal ideal.
pub fn socle(a: &AlgRef) -> Result<Ideal> {
    let m = a.maximal_ideal()?;
    if m.is_zero() {
        return Ideal::new(a.clone(), Subspace::zero(a.field, a.dim));
    }
    let mut inter = Subspace::full(a.field, a.dim);
    for v in m.basis_vectors() {
        let l = a.left_mul_matrix(&v);
        inter = inter
            .intersect(&kernel_basis(&l))
            .map_err(|_| AlgebraError::FieldMismatch)?;
    }
    Ideal::new(a.clone(), inter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        product, quotient_presentation, subalgebra_generated, truncated_poly, truncation_algebra,
    };

    fn q() -> Field {
        Field::Rationals
    }

    fn arc(a: Algebra) -> AlgRef {
        Arc::new(a)
    }

    /// k[x]/(x^2 - c) by hand; not local, exercises the generic paths.
    fn quadratic_extension(f: Field, c: i64) -> AlgRef {
        let mut table = vec![f.zero(); 8];
        // 1*1=1, 1*x=x, x*1=x, x*x=c.
        table[0] = f.one();
        table[(0 * 2 + 1) * 2 + 1] = f.one();
        table[(1 * 2 + 0) * 2 + 1] = f.one();
        table[(1 * 2 + 1) * 2 + 0] = f.from_int(c);
        arc(Algebra::from_table(f, vec!["1".into(), "x".into()], table, None).unwrap())
    }

    #[test]
    fn radical_of_trunc() {
        let a = arc(truncated_poly(q(), "s", 3).unwrap());
        let r = radical(&a).unwrap();
        assert_eq!(r.dim(), 2);
    }

    #[test]
    fn radical_of_split_quadratic_is_zero() {
        let a = quadratic_extension(q(), 1);
        assert_eq!(radical(&a).unwrap().dim(), 0);
    }

    #[test]
    fn radical_wild_02a() {
        let f = Field::prime(5).unwrap();
        let vars = vec!["x".to_string(), "y".to_string()];
        let t = arc(truncation_algebra(f, &vars, 3).unwrap());
        let x = t.named_elem("x").unwrap();
        let y = t.named_elem("y").unwrap();
        let a = arc(
            quotient_presentation(f, &vars, 3, &[t.mul_elems(&x, &y), t.pow_elem(&y, 2)]).unwrap(),
        );
        let r = radical(&a).unwrap();
        assert_eq!(r.dim(), 3); // span{x, y, x^2}
    }

    #[test]
    fn decompose_split_quadratic() {
        let a = quadratic_extension(q(), 1);
        let factors = local_decomposition(&a).unwrap();
        assert_eq!(factors.len(), 2);
        assert!(factors.iter().all(|lf| lf.algebra.dim == 1));
    }

    #[test]
    fn decompose_nonsplit_quadratic() {
        let a = quadratic_extension(q(), -1);
        assert_eq!(local_decomposition(&a).unwrap_err(), AlgebraError::NotSplit);
    }

    #[test]
    fn decompose_local_is_singleton() {
        let a = arc(truncated_poly(q(), "s", 4).unwrap());
        assert_eq!(local_decomposition(&a).unwrap().len(), 1);
    }

    #[test]
    fn decompose_product_of_truncs() {
        let a = arc(truncated_poly(q(), "s", 2).unwrap());
        let b = arc(truncated_poly(q(), "t", 3).unwrap());
        let (p, _, _) = product(&a, &b).unwrap();
        let factors = local_decomposition(&arc(p)).unwrap();
        let mut dims: Vec<usize> = factors.iter().map(|lf| lf.algebra.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![2, 3]);
    }

    #[test]
    fn pia_classification_of_truncs() {
        for n in 1..=8 {
            for field in [q(), Field::prime(2).unwrap(), Field::prime(5).unwrap()] {
                let a = arc(truncated_poly(field, "s", n).unwrap());
                let (pia, indices) = is_pia(&a).unwrap();
                assert!(pia, "k[s]/(s^{n}) is a PIA");
                assert_eq!(indices, vec![n]);
                let tame = is_tame_pia(&a).unwrap();
                let expect = match field {
                    Field::Rationals => true,
                    Field::Prime(p) => (n as u64) % p != 0,
                };
                assert_eq!(tame, expect, "tameness of k[s]/(s^{n}) over {field}");
            }
        }
    }

    #[test]
    fn square_zero_not_pia() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let a = arc(quotient_presentation(q(), &vars, 2, &[]).unwrap());
        let (pia, _) = is_pia(&a).unwrap();
        assert!(!pia);
        assert_eq!(embedding_dim(&a).unwrap(), 2);
    }

    #[test]
    fn socle_of_trunc() {
        let a = arc(truncated_poly(q(), "s", 5).unwrap());
        let soc = socle(&a).unwrap();
        assert_eq!(soc.dim(), 1);
        assert!(soc.space.contains(&a.basis_elem(4)));
    }

    #[test]
    fn socle_of_field_is_zero() {
        let a = arc(truncated_poly(q(), "s", 1).unwrap());
        assert_eq!(socle(&a).unwrap().dim(), 0);
    }

    #[test]
    fn socle_of_a3() {
        // A_3: socle = span{x^2, xy}.
        let vars = vec!["x".to_string(), "y".to_string()];
        let t = arc(truncation_algebra(q(), &vars, 4).unwrap());
        let x = t.named_elem("x").unwrap();
        let y = t.named_elem("y").unwrap();
        let a = arc(
            quotient_presentation(
                q(),
                &vars,
                4,
                &[t.pow_elem(&x, 3), t.mul_elems(&t.pow_elem(&x, 2), &y), t.pow_elem(&y, 2)],
            )
            .unwrap(),
        );
        let soc = socle(&a).unwrap();
        assert_eq!(soc.dim(), 2);
        assert_eq!(embedding_dim(&a).unwrap(), 2);
    }

    #[test]
    fn embedding_dims() {
        let a = arc(truncated_poly(q(), "s", 5).unwrap());
        assert_eq!(embedding_dim(&a).unwrap(), 1);
        let vars = vec!["x".to_string(), "y".to_string()];
        let b = arc(quotient_presentation(q(), &vars, 3, &[]).unwrap());
        assert_eq!(embedding_dim(&b).unwrap(), 2);
    }

    #[test]
    fn subalgebra_closure_respects_multiplication() {
        let b = arc(truncated_poly(q(), "s", 7).unwrap());
        let s = b.named_elem("s").unwrap();
        let (sub, inc) =
            subalgebra_generated(&b, &[b.pow_elem(&s, 2), b.pow_elem(&s, 3)], &[None, None])
                .unwrap();
        let sub = arc(sub);
        for i in 0..sub.dim {
            for j in 0..sub.dim {
                let prod = sub.mul_elems(&sub.basis_elem(i), &sub.basis_elem(j));
                let lhs = inc.apply(&prod);
                let rhs = b.mul_elems(&inc.apply(&sub.basis_elem(i)), &inc.apply(&sub.basis_elem(j)));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
