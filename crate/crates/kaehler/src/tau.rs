//! Certified bounds for the torsion submodule of the Kähler differentials.
//!
//! The torsion invariant is a minimum over an infinite family of maps into
//! tame principal ideal algebras, so it is not directly computable. This
//! module brackets it: annihilating pairs x y = 0 give certified elements
//! x dy from below, kernels of induced maps give upper bounds, and an
//! equality certificate is issued when the two meet.

use std::sync::Arc;

use crate::algebra::{AlgRef, AlgebraError, Hom, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::omega::{induced_map, kaehler, OmegaModule};
use crate::structure::{embedding_dim, enumerate_elements, is_tame_pia, maximal_ideal_powers, socle};
use crate::subspace::{kernel_basis, Subspace};

/// Largest element count for exhaustive pair search over F_p.
const PAIR_SEARCH_CAP: u64 = 10_000;

/// A certified torsion element: x dy with x y = 0.
#[derive(Clone, Debug)]
pub struct PairWitness {
    pub kind: String,
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
}

#[derive(Clone, Debug)]
pub struct TauBracket {
    pub omega: Arc<OmegaModule>,
    pub lower: Subspace,
    pub upper: Subspace,
    pub certified_equal: bool,
    pub witnesses: Vec<PairWitness>,
    pub upper_maps: Vec<Hom>,
}

/// A-submodule of the differential module generated by `gens`.
fn submodule(omega: &OmegaModule, gens: &[Vec<Scalar>]) -> Subspace {
    let mut vectors = Vec::new();
    for g in gens {
        for t in 0..omega.algebra.dim {
            vectors.push(omega.action[t].mul_vec(g));
        }
    }
    Subspace::from_span(omega.algebra.field, omega.kdim, vectors)
}

/// The socle submodule: the span of x dy over socle elements x and maximal
/// ideal basis elements y. Fully linear, no search.
pub fn tau_lower_socle(omega: &Arc<OmegaModule>) -> Result<Subspace> {
    let a = &omega.algebra;
    let soc = socle(a)?;
    let m = a.maximal_ideal()?;
    let mut gens = Vec::new();
    for x in soc.space.basis_vectors() {
        for y in m.basis_vectors() {
            gens.push(omega.x_dy(&x, &y));
        }
    }
    Ok(submodule(omega, &gens))
}

/// Lower bound from annihilating pairs: every x, y in the maximal ideal with
/// x y = 0 contributes the certified torsion element x dy.
///
/// Discovery is complete for pairs whose second member is a basis element of
/// M (x ranges over all of ker(L_y) ∩ M), is exhaustive over small prime
/// fields, and accepts extra caller-supplied pairs; it remains a lower bound
/// only.
pub fn tau_lower_pairs(
    omega: &Arc<OmegaModule>,
    extra_pairs: &[(Vec<Scalar>, Vec<Scalar>)],
) -> Result<(Subspace, Vec<PairWitness>)> {
    let a = &omega.algebra;
    let f = a.field;
    let m = a.maximal_ideal()?;
    let mut witnesses = Vec::new();
    let mut gens = Vec::new();
    let mut push = |kind: &str, x: Vec<Scalar>, y: Vec<Scalar>, gens: &mut Vec<Vec<Scalar>>| {
        let w = omega.x_dy(&x, &y);
        if !w.iter().all(|c| f.is_zero(c)) {
            gens.push(w);
            witnesses.push(PairWitness {
                kind: kind.to_string(),
                x,
                y,
            });
        }
    };
    for (x, y) in extra_pairs {
        if !a.is_zero_elem(&a.mul_elems(x, y)) {
            return Err(AlgebraError::Unsupported(
                "supplied pair does not satisfy x*y = 0".to_string(),
            ));
        }
        push("supplied", x.clone(), y.clone(), &mut gens);
    }
    let annihilators_in_m = |y: &[Scalar]| -> Subspace {
        let ker = kernel_basis(&a.left_mul_matrix(y));
        ker.intersect(&m).expect("same ambient space")
    };
    for y in m.basis_vectors() {
        for x in annihilators_in_m(&y).basis_vectors() {
            push("basis", x, y.clone(), &mut gens);
        }
    }
    if let Field::Prime(p) = f {
        let mdim = m.dim();
        if let Some(count) = (p as u128).checked_pow(mdim as u32) {
            if count <= PAIR_SEARCH_CAP as u128 {
                let basis_t = m.basis.transpose();
                for coords in enumerate_elements(f, p, mdim) {
                    let y = basis_t.mul_vec(&coords);
                    if a.is_zero_elem(&y) {
                        continue;
                    }
                    for x in annihilators_in_m(&y).basis_vectors() {
                        push("exhaustive", x, y.clone(), &mut gens);
                    }
                }
            }
        }
    }
    // The socle submodule is subsumed: socle elements annihilate all of M.
    let socle_part = tau_lower_socle(omega)?;
    let span = submodule(omega, &gens)
        .sum(&socle_part)
        .expect("same ambient space");
    debug_assert!(span.contains_subspace(&socle_part));
    Ok((span, witnesses))
}

/// Upper bound: intersection of the kernels of the induced maps. Every
/// target must be a tame principal ideal algebra.
pub fn tau_upper(omega: &Arc<OmegaModule>, maps: &[Hom]) -> Result<Subspace> {
    let mut upper = Subspace::full(omega.algebra.field, omega.kdim);
    for h in maps {
        if !is_tame_pia(&h.target)? {
            return Err(AlgebraError::Unsupported(
                "upper-bound target is not a tame principal ideal algebra".to_string(),
            ));
        }
        let omega_b = Arc::new(kaehler(&h.target));
        let ker = induced_map(h, omega, &omega_b).kernel();
        upper = upper.intersect(&ker).expect("same ambient space");
    }
    Ok(upper)
}

/// Builds the full bracket and certifies equality when the bounds meet.
pub fn tau_bracket(
    omega: &Arc<OmegaModule>,
    maps: &[Hom],
    extra_pairs: &[(Vec<Scalar>, Vec<Scalar>)],
) -> Result<TauBracket> {
    let (lower, witnesses) = tau_lower_pairs(omega, extra_pairs)?;
    let upper = tau_upper(omega, maps)?;
    if !upper.contains_subspace(&lower) {
        return Err(AlgebraError::Unsupported(
            "lower bound escapes the upper bound; a supplied map is not an embedding into a tame target".to_string(),
        ));
    }
    let certified_equal = lower == upper;
    Ok(TauBracket {
        omega: omega.clone(),
        lower,
        upper,
        certified_equal,
        witnesses,
        upper_maps: maps.to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Seminormal subalgebras of products of truncated lines
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SeminormalReport {
    pub m: usize,
    pub kernel_dim: usize,
    pub expected_dim: usize,
    pub basis_confirmed: bool,
}

/// A = k + span of the coordinate parameters inside ∏ k[s_i]/(s_i^{n_i}):
/// the kernel of its differentials mapping into the product has basis
/// {s_i d(s_j) : i < j}.
pub fn seminormal_kernel(field: Field, exponents: &[usize]) -> Result<SeminormalReport> {
    use crate::algebra::{product, subalgebra_generated, truncated_poly};
    let m = exponents.len();
    if m == 0 {
        return Err(AlgebraError::ZeroDimensional);
    }
    let mut b = Arc::new(truncated_poly(field, "s1", exponents[0])?);
    for (i, &n) in exponents.iter().enumerate().skip(1) {
        let next = Arc::new(truncated_poly(field, &format!("s{}", i + 1), n)?);
        let (p, _, _) = product(&b, &next)?;
        b = Arc::new(p);
    }
    let names: Vec<String> = (1..=m).map(|i| format!("s{i}")).collect();
    let gens: Vec<Vec<Scalar>> = names
        .iter()
        .map(|n| b.named_elem(n))
        .collect::<Result<_>>()?;
    let opt_names: Vec<Option<String>> = names.iter().map(|n| Some(n.clone())).collect();
    let (a, inc) = subalgebra_generated(&b, &gens, &opt_names)?;
    let a = Arc::new(a);
    let omega_a = Arc::new(kaehler(&a));
    let omega_b = Arc::new(kaehler(&b));
    let ker = induced_map(&inc, &omega_a, &omega_b).kernel();
    let expected_dim = m * (m - 1) / 2;
    // The claimed basis: s_i d(s_j) for i < j.
    let mut claimed = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let si = a.named_elem(&names[i])?;
            let sj = a.named_elem(&names[j])?;
            claimed.push(omega_a.x_dy(&si, &sj));
        }
    }
    let claimed_span = Subspace::from_span(field, omega_a.kdim, claimed);
    let basis_confirmed = claimed_span.dim() == expected_dim
        && ker.dim() == expected_dim
        && ker.contains_subspace(&claimed_span);
    Ok(SeminormalReport {
        m,
        kernel_dim: ker.dim(),
        expected_dim,
        basis_confirmed,
    })
}

// ---------------------------------------------------------------------------
// Embeddability obstruction
// ---------------------------------------------------------------------------

/// Searches for x, y with x² = y² = 0 but x y ≠ 0: such a pair certifies
/// that the algebra embeds in no tame principal ideal algebra. Absence of a
/// witness proves nothing.
pub fn nonembeddable_witness(a: &AlgRef) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
    let f = a.field;
    let mut pool: Vec<Vec<Scalar>> = (1..a.dim).map(|i| a.basis_elem(i)).collect();
    let singles = pool.clone();
    for (i, u) in singles.iter().enumerate() {
        for v in singles.iter().skip(i + 1) {
            let sum: Vec<Scalar> = (0..a.dim).map(|r| f.add(&u[r], &v[r])).collect();
            let diff: Vec<Scalar> = (0..a.dim).map(|r| f.sub(&u[r], &v[r])).collect();
            pool.push(sum);
            pool.push(diff);
        }
    }
    if let Field::Prime(p) = f {
        if let Some(count) = (p as u128).checked_pow(a.dim as u32) {
            if count <= PAIR_SEARCH_CAP as u128 {
                pool = enumerate_elements(f, p, a.dim);
            }
        }
    }
    let square_zero: Vec<&Vec<Scalar>> = pool
        .iter()
        .filter(|x| a.is_zero_elem(&a.mul_elems(x, x)))
        .collect();
    for x in &square_zero {
        for y in &square_zero {
            if !a.is_zero_elem(&a.mul_elems(x, y)) {
                return Some(((*x).clone(), (*y).clone()));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Euler differentials and valuations
// ---------------------------------------------------------------------------

/// Weighted degree of a basis monomial under a grading of the variables.
fn basis_degree(a: &AlgRef, grading: &[u32], idx: usize) -> Result<u64> {
    let md = a.monomials.as_ref().ok_or(AlgebraError::MissingMonomials)?;
    if grading.len() != md.vars.len() {
        return Err(AlgebraError::Unsupported(
            "grading length does not match the variable count".to_string(),
        ));
    }
    Ok(md.exps[idx]
        .iter()
        .zip(grading)
        .map(|(&e, &g)| e as u64 * g as u64)
        .sum())
}

/// Degree of a homogeneous element; errors on inhomogeneous input.
pub fn homogeneous_degree(a: &AlgRef, grading: &[u32], x: &[Scalar]) -> Result<u64> {
    let f = a.field;
    let mut deg = None;
    for (i, c) in x.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        let d = basis_degree(a, grading, i)?;
        match deg {
            None => deg = Some(d),
            Some(prev) if prev == d => {}
            _ => {
                return Err(AlgebraError::Unsupported(
                    "element is not homogeneous for the given grading".to_string(),
                ))
            }
        }
    }
    deg.ok_or(AlgebraError::Unsupported(
        "the zero element has no degree".to_string(),
    ))
}

/// Checks that multiplication is graded: every product of basis monomials is
/// homogeneous of the expected total degree or zero.
fn check_grading(a: &AlgRef, grading: &[u32]) -> Result<()> {
    let f = a.field;
    for i in 0..a.dim {
        for j in 0..a.dim {
            let prod = a.mul_elems(&a.basis_elem(i), &a.basis_elem(j));
            if a.is_zero_elem(&prod) {
                continue;
            }
            let expect = basis_degree(a, grading, i)? + basis_degree(a, grading, j)?;
            for (l, c) in prod.iter().enumerate() {
                if !f.is_zero(c) && basis_degree(a, grading, l)? != expect {
                    return Err(AlgebraError::Unsupported(
                        "grading is inconsistent with the multiplication".to_string(),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// ω = e x dy − f y dx for homogeneous x, y of degrees e, f. A torsion
/// element whenever the grading embeds the algebra in a graded complete
/// intersection setting; always lies in the kernel of graded maps to
/// truncated lines.
pub fn euler_differential(
    omega: &Arc<OmegaModule>,
    grading: &[u32],
    x: &[Scalar],
    y: &[Scalar],
) -> Result<Vec<Scalar>> {
    let a = &omega.algebra;
    let fld = a.field;
    check_grading(a, grading)?;
    let e = homogeneous_degree(a, grading, x)?;
    let f = homogeneous_degree(a, grading, y)?;
    let xdy = omega.x_dy(x, y);
    let ydx = omega.x_dy(y, x);
    let es = fld.from_int(e as i64);
    let fs = fld.from_int(f as i64);
    Ok((0..omega.kdim)
        .map(|r| fld.sub(&fld.mul(&es, &xdy[r]), &fld.mul(&fs, &ydx[r])))
        .collect())
}

/// Requires the target of `pi` to carry a one-variable power basis, i.e. to
/// be a truncated line with basis 1, s, s², ...
fn check_power_basis(b: &AlgRef) -> Result<()> {
    let md = b.monomials.as_ref().ok_or(AlgebraError::MissingMonomials)?;
    if md.vars.len() != 1 || md.exps.iter().enumerate().any(|(j, e)| e != &vec![j as u32]) {
        return Err(AlgebraError::Unsupported(
            "valuations require a truncated line target".to_string(),
        ));
    }
    Ok(())
}

/// s-adic order of the image of `x` under a map into k[s]/(sⁿ); `None`
/// encodes ∞ (the image is zero).
pub fn valuation(pi: &Hom, x: &[Scalar]) -> Result<Option<usize>> {
    check_power_basis(&pi.target)?;
    let f = pi.target.field;
    let img = pi.apply(x);
    Ok(img.iter().position(|c| !f.is_zero(c)))
}

// ---------------------------------------------------------------------------
// The valuation gap bound
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct GapReport {
    /// Maximal e with M ⊆ s^e B.
    pub e: usize,
    /// Minimal generator count of M.
    pub m: usize,
    /// m(m−1)/2; a kernel is guaranteed when e is below it.
    pub threshold: usize,
    pub predicts_nonzero: bool,
    pub kernel_dim: usize,
}

/// For a local subalgebra A of a truncated line B: when the maximal ideal
/// sits no deeper than s^e with e < C(m,2), the induced map on differentials
/// must have a kernel. Verifies the prediction against the computed kernel.
pub fn guettes_check(inclusion: &Hom) -> Result<GapReport> {
    if !inclusion.is_injective() {
        return Err(AlgebraError::HomNotInjective);
    }
    check_power_basis(&inclusion.target)?;
    let a = &inclusion.source;
    let max_ideal = a.maximal_ideal()?;
    let mut e = None;
    for v in max_ideal.basis_vectors() {
        if let Some(val) = valuation(inclusion, &v)? {
            e = Some(match e {
                None => val,
                Some(prev) if val < prev => val,
                Some(prev) => prev,
            });
        }
    }
    let e = e.unwrap_or(0);
    let m = embedding_dim(a)?;
    let threshold = m * (m - 1) / 2;
    let predicts_nonzero = e < threshold;
    let omega_a = Arc::new(kaehler(a));
    let omega_b = Arc::new(kaehler(&inclusion.target));
    let kernel_dim = induced_map(inclusion, &omega_a, &omega_b).kernel().dim();
    if predicts_nonzero && kernel_dim == 0 {
        return Err(AlgebraError::Unsupported(
            "valuation gap predicted a kernel that did not appear".to_string(),
        ));
    }
    Ok(GapReport {
        e,
        m,
        threshold,
        predicts_nonzero,
        kernel_dim,
    })
}

// ---------------------------------------------------------------------------
// Witnesses for algebras with M³ = 0
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessStatus {
    /// Justified by an exhibited annihilating pair.
    Certified,
    /// Relies on a hypothesis quantifying over all maps; not decided here.
    Conditional,
}

#[derive(Clone, Debug)]
pub struct M3Witness {
    pub element: Vec<Scalar>,
    pub rendered: String,
    pub status: WitnessStatus,
}

/// A nonzero torsion candidate for a local algebra with M³ = 0 and M not
/// principal: a certified annihilating-pair witness when one exists,
/// otherwise the conditional element x dy − y dx for a minimal generating
/// pair of M.
pub fn m3_witness(omega: &Arc<OmegaModule>) -> Result<M3Witness> {
    let a = &omega.algebra;
    let f = a.field;
    let powers = maximal_ideal_powers(a)?;
    if powers.len() > 2 && !powers[2].is_zero() {
        return Err(AlgebraError::Unsupported("M^3 is not zero".to_string()));
    }
    if embedding_dim(a)? < 2 {
        return Err(AlgebraError::Unsupported(
            "the maximal ideal is principal; torsion may be zero".to_string(),
        ));
    }
    let (lower, _) = tau_lower_pairs(omega, &[])?;
    if !lower.is_zero() {
        let element = lower.basis.row_vec(0);
        let rendered = omega.render(&element);
        return Ok(M3Witness {
            element,
            rendered,
            status: WitnessStatus::Certified,
        });
    }
    // Minimal generating pair of M: first two basis vectors independent
    // modulo M².
    let m = &powers[0];
    let m2 = if powers.len() > 1 {
        powers[1].clone()
    } else {
        Subspace::zero(f, a.dim)
    };
    let (proj, _) = m2.quotient();
    let mut picked: Vec<Vec<Scalar>> = Vec::new();
    let mut images: Vec<Vec<Scalar>> = Vec::new();
    for v in m.basis_vectors() {
        let img = proj.mul_vec(&v);
        let mut rows = images.clone();
        rows.push(img.clone());
        let rank = Matrix::from_rows(f, rows).rank();
        if rank > images.len() {
            picked.push(v);
            images.push(img);
        }
        if picked.len() == 2 {
            break;
        }
    }
    let (x, y) = (&picked[0], &picked[1]);
    let xdy = omega.x_dy(x, y);
    let ydx = omega.x_dy(y, x);
    let element: Vec<Scalar> = (0..omega.kdim)
        .map(|r| f.sub(&xdy[r], &ydx[r]))
        .collect();
    let rendered = omega.render(&element);
    Ok(M3Witness {
        element,
        rendered,
        status: WitnessStatus::Conditional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        make_hom_on_generators, quotient_presentation, subalgebra_generated, truncated_poly,
        truncation_algebra, Algebra,
    };

    fn q() -> Field {
        Field::Rationals
    }

    fn arc(a: Algebra) -> AlgRef {
        Arc::new(a)
    }

    fn trunc(f: Field, var: &str, n: usize) -> AlgRef {
        arc(truncated_poly(f, var, n).unwrap())
    }

    fn square_zero(f: Field, m: usize) -> AlgRef {
        let vars: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        arc(quotient_presentation(f, &vars, 2, &[]).unwrap())
    }

    fn full_power_quotient(f: Field, m: usize, n: u32) -> AlgRef {
        let vars: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        arc(quotient_presentation(f, &vars, n, &[]).unwrap())
    }

    /// k[x,y]/(x^3, x^2 y, y^2), dimension 5.
    fn a3(f: Field) -> AlgRef {
        let vars = vec!["x".to_string(), "y".to_string()];
        let t = arc(truncation_algebra(f, &vars, 4).unwrap());
        let x = t.named_elem("x").unwrap();
        let y = t.named_elem("y").unwrap();
        arc(
            quotient_presentation(
                f,
                &vars,
                4,
                &[
                    t.pow_elem(&x, 3),
                    t.mul_elems(&t.pow_elem(&x, 2), &y),
                    t.pow_elem(&y, 2),
                ],
            )
            .unwrap(),
        )
    }

    fn a3_embedding(a: &AlgRef, b: &AlgRef, ex: u32, ey: u32) -> Hom {
        let s = b.named_elem("s").unwrap();
        make_hom_on_generators(
            a,
            b,
            &[
                ("x".to_string(), b.pow_elem(&s, ex)),
                ("y".to_string(), b.pow_elem(&s, ey)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn socle_submodule_dims() {
        // Full power quotients k[x_1..x_m]/(x)^3: dim 2*C(m+1, 3).
        let a = full_power_quotient(q(), 2, 3);
        let omega = Arc::new(kaehler(&a));
        assert_eq!(tau_lower_socle(&omega).unwrap().dim(), 2);
        let b = full_power_quotient(q(), 3, 3);
        let omega = Arc::new(kaehler(&b));
        assert_eq!(tau_lower_socle(&omega).unwrap().dim(), 8);
        // A field has zero socle submodule.
        let k = trunc(q(), "s", 1);
        let omega = Arc::new(kaehler(&k));
        assert!(tau_lower_socle(&omega).unwrap().is_zero());
    }

    #[test]
    fn pair_bound_square_zero() {
        // Char 0: dimension C(m, 2); char 2 exhaustive: C(m+1, 2).
        for m in 2..=4 {
            let a = square_zero(q(), m);
            let omega = Arc::new(kaehler(&a));
            let (lower, witnesses) = tau_lower_pairs(&omega, &[]).unwrap();
            assert_eq!(lower.dim(), m * (m - 1) / 2, "char 0, m = {m}");
            assert!(!witnesses.is_empty());
            let f2 = Field::prime(2).unwrap();
            let b = square_zero(f2, m);
            let omega2 = Arc::new(kaehler(&b));
            let (lower2, _) = tau_lower_pairs(&omega2, &[]).unwrap();
            assert_eq!(lower2.dim(), (m + 1) * m / 2, "char 2, m = {m}");
        }
    }

    #[test]
    fn pair_bound_contains_x1_dx2() {
        let a = square_zero(q(), 2);
        let omega = Arc::new(kaehler(&a));
        let (lower, _) = tau_lower_pairs(&omega, &[]).unwrap();
        let x1 = a.named_elem("x1").unwrap();
        let x2 = a.named_elem("x2").unwrap();
        assert!(lower.contains(&omega.x_dy(&x1, &x2)));
    }

    #[test]
    fn pair_bound_rejects_bad_pair() {
        let a = trunc(q(), "s", 4);
        let omega = Arc::new(kaehler(&a));
        let s = a.named_elem("s").unwrap();
        assert!(tau_lower_pairs(&omega, &[(s.clone(), s.clone())]).is_err());
    }

    #[test]
    fn upper_bound_for_a3() {
        let a = a3(q());
        let omega = Arc::new(kaehler(&a));
        // No maps: the bound is all of the module.
        assert_eq!(tau_upper(&omega, &[]).unwrap().dim(), omega.kdim);
        let b1 = trunc(q(), "s", 6);
        let f1 = a3_embedding(&a, &b1, 2, 3);
        let one_map = tau_upper(&omega, &[f1.clone()]).unwrap();
        assert_eq!(one_map.dim(), 2);
        let b2 = trunc(q(), "s", 9);
        let f2 = a3_embedding(&a, &b2, 3, 5);
        let both = tau_upper(&omega, &[f1, f2]).unwrap();
        assert_eq!(both.dim(), 1);
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        let xy = a.mul_elems(&x, &y);
        assert!(both.contains(&omega.x_dy(&xy, &x)));
    }

    #[test]
    fn upper_bound_rejects_wild_target() {
        let f2 = Field::prime(2).unwrap();
        let a = trunc(f2, "s", 2);
        let omega = Arc::new(kaehler(&a));
        let id = Hom::identity(&a);
        assert!(tau_upper(&omega, &[id]).is_err());
    }

    #[test]
    fn bracket_closes_for_a3() {
        let a = a3(q());
        let omega = Arc::new(kaehler(&a));
        let b1 = trunc(q(), "s", 6);
        let b2 = trunc(q(), "s", 9);
        let maps = vec![a3_embedding(&a, &b1, 2, 3), a3_embedding(&a, &b2, 3, 5)];
        let bracket = tau_bracket(&omega, &maps, &[]).unwrap();
        assert!(bracket.certified_equal);
        assert_eq!(bracket.lower.dim(), 1);
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        let xy = a.mul_elems(&x, &y);
        assert!(bracket.lower.contains(&omega.x_dy(&xy, &x)));
    }

    #[test]
    fn bracket_closes_for_wild_line() {
        // F5[x]/(x^5) embedded by x -> s^6 in F5[s]/(s^29): the torsion is
        // spanned by x^4 dx.
        let f5 = Field::prime(5).unwrap();
        let a = trunc(f5, "x", 5);
        let b = trunc(f5, "s", 29);
        let s = b.named_elem("s").unwrap();
        let h = make_hom_on_generators(&a, &b, &[("x".to_string(), b.pow_elem(&s, 6))]).unwrap();
        assert!(h.is_injective());
        let omega = Arc::new(kaehler(&a));
        let bracket = tau_bracket(&omega, &[h], &[]).unwrap();
        assert!(bracket.certified_equal);
        assert_eq!(bracket.lower.dim(), 1);
        let x = a.named_elem("x").unwrap();
        let x4 = a.pow_elem(&x, 4);
        assert!(bracket.lower.contains(&omega.x_dy(&x4, &x)));
    }

    #[test]
    fn bracket_is_zero_for_tame_line() {
        let a = trunc(q(), "s", 4);
        let omega = Arc::new(kaehler(&a));
        let bracket = tau_bracket(&omega, &[Hom::identity(&a)], &[]).unwrap();
        assert!(bracket.certified_equal);
        assert!(bracket.lower.is_zero());
        assert!(bracket.upper.is_zero());
    }

    #[test]
    fn seminormal_kernels() {
        let r = seminormal_kernel(q(), &[3, 3]).unwrap();
        assert_eq!(r.kernel_dim, 1);
        assert!(r.basis_confirmed);
        let r = seminormal_kernel(q(), &[2, 2, 2]).unwrap();
        assert_eq!(r.kernel_dim, 3);
        assert!(r.basis_confirmed);
        let r = seminormal_kernel(q(), &[4]).unwrap();
        assert_eq!(r.kernel_dim, 0);
        assert!(r.basis_confirmed);
    }

    #[test]
    fn square_pair_witnesses() {
        // k[x,y]/(x^2, y^2): (x, y) squares to zero but x y does not.
        let vars = vec!["x".to_string(), "y".to_string()];
        let t = arc(truncation_algebra(q(), &vars, 3).unwrap());
        let x = t.named_elem("x").unwrap();
        let y = t.named_elem("y").unwrap();
        let a = arc(
            quotient_presentation(q(), &vars, 3, &[t.pow_elem(&x, 2), t.pow_elem(&y, 2)]).unwrap(),
        );
        let w = nonembeddable_witness(&a);
        assert!(w.is_some());
        let (wx, wy) = w.unwrap();
        assert!(a.is_zero_elem(&a.mul_elems(&wx, &wx)));
        assert!(a.is_zero_elem(&a.mul_elems(&wy, &wy)));
        assert!(!a.is_zero_elem(&a.mul_elems(&wx, &wy)));
        // A truncated line has no such pair.
        assert!(nonembeddable_witness(&trunc(q(), "s", 4)).is_none());
    }

    #[test]
    fn euler_differentials_of_a3() {
        let a = a3(q());
        let omega = Arc::new(kaehler(&a));
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        let f = a.field;
        let comb = |c1: i64, v1: &[Scalar], c2: i64, v2: &[Scalar]| -> Vec<Scalar> {
            (0..v1.len())
                .map(|i| {
                    f.add(
                        &f.mul(&f.from_int(c1), &v1[i]),
                        &f.mul(&f.from_int(c2), &v2[i]),
                    )
                })
                .collect()
        };
        let xdy = omega.x_dy(&x, &y);
        let ydx = omega.x_dy(&y, &x);
        let w1 = euler_differential(&omega, &[2, 3], &x, &y).unwrap();
        assert_eq!(w1, comb(2, &xdy, -3, &ydx));
        let w2 = euler_differential(&omega, &[3, 5], &x, &y).unwrap();
        assert_eq!(w2, comb(3, &xdy, -5, &ydx));
        // Each lies in the kernel of its graded embedding.
        let b1 = trunc(q(), "s", 6);
        let k1 = crate::omega::induced_map(
            &a3_embedding(&a, &b1, 2, 3),
            &omega,
            &Arc::new(kaehler(&b1)),
        )
        .kernel();
        assert!(k1.contains(&w1));
        let b2 = trunc(q(), "s", 9);
        let k2 = crate::omega::induced_map(
            &a3_embedding(&a, &b2, 3, 5),
            &omega,
            &Arc::new(kaehler(&b2)),
        )
        .kernel();
        assert!(k2.contains(&w2));
        // x paired with itself cancels.
        let w = euler_differential(&omega, &[2, 3], &x, &x).unwrap();
        assert!(w.iter().all(|c| f.is_zero(c)));
        // x + y is inhomogeneous under the (2, 3) grading.
        let sum: Vec<Scalar> = (0..a.dim).map(|i| f.add(&x[i], &y[i])).collect();
        assert!(euler_differential(&omega, &[2, 3], &sum, &y).is_err());
    }

    #[test]
    fn valuations() {
        let a = a3(q());
        let b = trunc(q(), "s", 6);
        let pi = a3_embedding(&a, &b, 2, 3);
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        assert_eq!(valuation(&pi, &x).unwrap(), Some(2));
        assert_eq!(valuation(&pi, &y).unwrap(), Some(3));
        assert_eq!(valuation(&pi, &a.one_elem()).unwrap(), Some(0));
        assert_eq!(valuation(&pi, &a.zero_elem()).unwrap(), None);
    }

    #[test]
    fn valuation_rejects_non_line_target() {
        let a = trunc(q(), "s", 3);
        let b = square_zero(q(), 2);
        let s = a.named_elem("s").unwrap();
        let _ = s;
        let h = make_hom_on_generators(
            &a,
            &b,
            &[("s".to_string(), b.named_elem("x1").unwrap())],
        )
        .unwrap();
        assert!(valuation(&h, &a.named_elem("s").unwrap()).is_err());
    }

    #[test]
    fn valuation_gap_prediction() {
        // A generated by s^4..s^7 inside Q[s]/(s^12): e = 4 < C(4,2) = 6,
        // so the kernel must be nonzero.
        let b = trunc(q(), "s", 12);
        let s = b.named_elem("s").unwrap();
        let gens: Vec<Vec<Scalar>> = (4..=7).map(|k| b.pow_elem(&s, k)).collect();
        let (a, inc) = subalgebra_generated(&b, &gens, &[None, None, None, None]).unwrap();
        let _ = arc(a);
        let r = guettes_check(&inc).unwrap();
        assert_eq!(r.e, 4);
        assert_eq!(r.m, 4);
        assert_eq!(r.threshold, 6);
        assert!(r.predicts_nonzero);
        assert!(r.kernel_dim > 0);
    }

    #[test]
    fn valuation_gap_no_prediction() {
        let b = trunc(q(), "s", 5);
        let s = b.named_elem("s").unwrap();
        let gens = vec![b.pow_elem(&s, 2), b.pow_elem(&s, 3)];
        let (a, inc) = subalgebra_generated(&b, &gens, &[None, None]).unwrap();
        let _ = arc(a);
        let r = guettes_check(&inc).unwrap();
        assert_eq!(r.e, 2);
        assert_eq!(r.m, 2);
        assert_eq!(r.threshold, 1);
        assert!(!r.predicts_nonzero);
        // The identity inclusion has no kernel and makes no prediction.
        let b2 = trunc(q(), "s", 5);
        let r2 = guettes_check(&Hom::identity(&b2)).unwrap();
        assert_eq!(r2.e, 1);
        assert_eq!(r2.m, 1);
        assert_eq!(r2.kernel_dim, 0);
    }

    #[test]
    fn m3_witnesses() {
        // Square-zero plane: a certified witness exists.
        let a = square_zero(q(), 2);
        let omega = Arc::new(kaehler(&a));
        let w = m3_witness(&omega).unwrap();
        assert_eq!(w.status, WitnessStatus::Certified);
        assert!(!w.element.iter().all(|c| a.field.is_zero(c)));
        // A_3: certified via the socle, and the witness is a multiple of
        // xy dx.
        let a = a3(q());
        let omega = Arc::new(kaehler(&a));
        let w = m3_witness(&omega).unwrap();
        assert_eq!(w.status, WitnessStatus::Certified);
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        let xy = a.mul_elems(&x, &y);
        let span = Subspace::from_span(q(), omega.kdim, vec![omega.x_dy(&xy, &x)]);
        assert!(span.contains(&w.element));
        // A principal maximal ideal is rejected.
        let line = trunc(q(), "s", 3);
        let omega = Arc::new(kaehler(&line));
        assert!(m3_witness(&omega).is_err());
        // M^3 != 0 is rejected.
        let deep = a3(q());
        let _ = deep;
        let vars = vec!["x".to_string(), "y".to_string()];
        let big = arc(quotient_presentation(q(), &vars, 4, &[]).unwrap());
        let omega = Arc::new(kaehler(&big));
        assert!(m3_witness(&omega).is_err());
    }
}
