//! Kähler differentials of a structure-constant algebra.
//!
//! Ω is presented on generators de_1..de_{n-1} (one per non-unit basis
//! element) inside the free module A^{n-1}, modulo the A-submodule generated
//! by the differentials of the quadratic structure relations
//! e_i e_j - sum c_{ij}^l e_l. The quadratic relations are a complete
//! presentation; the bar-complex HH_1 oracle cross-checks this.

use std::sync::Arc;

use crate::algebra::{AlgRef, AlgebraError, Hom, Ideal, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::subspace::{image_of, kernel_basis, unit, Subspace};

#[derive(Clone, Debug)]
pub struct OmegaModule {
    pub algebra: AlgRef,
    pub kdim: usize,
    /// Relation submodule inside the free coordinate space A^{n-1}.
    pub relations: Subspace,
    /// Free coordinates -> quotient coordinates.
    pub projection: Matrix,
    /// Section picking the non-pivot free coordinates.
    pub section: Matrix,
    /// Action of each algebra basis element on quotient coordinates.
    pub action: Vec<Matrix>,
    /// d: algebra coordinates -> quotient coordinates.
    pub d_matrix: Matrix,
    /// Quotient coordinates of each generator de_i, i = 1..n-1.
    pub gen_images: Vec<Vec<Scalar>>,
}

/// f_*: Omega_A -> Omega_B induced by an algebra map.
#[derive(Clone, Debug)]
pub struct OmegaMap {
    pub source: Arc<OmegaModule>,
    pub target: Arc<OmegaModule>,
    pub matrix: Matrix,
}

impl OmegaModule {
    /// Block index of free coordinate: generator l >= 1, coefficient t.
    fn free_index(n: usize, l: usize, t: usize) -> usize {
        (l - 1) * n + t
    }

    /// Action of an arbitrary algebra element on quotient coordinates.
    pub fn action_of(&self, x: &[Scalar]) -> Matrix {
        let f = self.algebra.field;
        let mut m = Matrix::zero(f, self.kdim, self.kdim);
        for (t, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                m = m.add(&self.action[t].scale(c));
            }
        }
        m
    }

    pub fn d_of(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.d_matrix.mul_vec(x)
    }

    /// x * d(y) on quotient coordinates.
    pub fn x_dy(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.action_of(x).mul_vec(&self.d_of(y))
    }

    /// Renders a quotient-coordinate element as a sum of
    /// `coeff*label*d(label)` terms in construction order.
    pub fn render(&self, v: &[Scalar]) -> String {
        let f = self.algebra.field;
        let n = self.algebra.dim;
        let free = self.section.mul_vec(v);
        let mut parts = Vec::new();
        for l in 1..n {
            for t in 0..n {
                let c = &free[Self::free_index(n, l, t)];
                if f.is_zero(c) {
                    continue;
                }
                let dgen = format!("d({})", self.algebra.basis_labels[l]);
                let mut term = String::new();
                let coeff = f.render(c);
                let body = if t == 0 {
                    dgen
                } else {
                    format!("{}*{}", self.algebra.basis_labels[t], dgen)
                };
                if c.is_one() {
                    term.push_str(&body);
                } else if f == Field::Rationals && coeff == "-1" {
                    term.push('-');
                    term.push_str(&body);
                } else {
                    term.push_str(&format!("{coeff}*{body}"));
                }
                parts.push(term);
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            let mut out = parts[0].clone();
            for p in &parts[1..] {
                if p.starts_with('-') {
                    out.push_str(" - ");
                    out.push_str(&p[1..]);
                } else {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
            out
        }
    }
}

/// Builds Omega_{A/k} with its full A-module structure.
pub fn kaehler(a: &AlgRef) -> OmegaModule {
    let f = a.field;
    let n = a.dim;
    let free_dim = n * (n - 1);
    // Multiplication by e_t on the free module is block diagonal.
    let block_mult = |t: usize, v: &[Scalar]| -> Vec<Scalar> {
        let mut out = vec![f.zero(); free_dim];
        for l in 1..n {
            let start = (l - 1) * n;
            let block = &v[start..start + n];
            let prod = a.mul_elems(&a.basis_elem(t), block);
            out[start..start + n].clone_from_slice(&prod);
        }
        out
    };
    // Differentials of the quadratic structure relations.
    let mut base_relations = Vec::new();
    for i in 1..n {
        for j in i..n {
            let mut rel = vec![f.zero(); free_dim];
            // e_i de_j + e_j de_i
            rel[OmegaModule::free_index(n, j, i)] =
                f.add(&rel[OmegaModule::free_index(n, j, i)], &f.one());
            rel[OmegaModule::free_index(n, i, j)] =
                f.add(&rel[OmegaModule::free_index(n, i, j)], &f.one());
            // - sum_{l>=1} c_{ij}^l de_l
            for l in 1..n {
                let c = a.c(i, j, l);
                if !f.is_zero(c) {
                    let idx = OmegaModule::free_index(n, l, 0);
                    rel[idx] = f.sub(&rel[idx], c);
                }
            }
            base_relations.push(rel);
        }
    }
    // Close to an A-submodule.
    let mut vectors = Vec::new();
    for r in &base_relations {
        for t in 0..n {
            vectors.push(block_mult(t, r));
        }
    }
    let relations = Subspace::from_span(f, free_dim, vectors);
    let (projection, kdim) = relations.quotient();
    let section = relations.quotient_section();
    // Action matrices on quotient coordinates.
    let action: Vec<Matrix> = (0..n)
        .map(|t| {
            let mut m = Matrix::zero(f, kdim, kdim);
            for q in 0..kdim {
                let freev = section.col_vec(q);
                let img = projection.mul_vec(&block_mult(t, &freev));
                for r in 0..kdim {
                    m.set(r, q, img[r].clone());
                }
            }
            m
        })
        .collect();
    // d on basis elements.
    let mut d_matrix = Matrix::zero(f, kdim, n);
    let mut gen_images = Vec::new();
    for i in 1..n {
        let mut freev = vec![f.zero(); free_dim];
        freev[OmegaModule::free_index(n, i, 0)] = f.one();
        let img = projection.mul_vec(&freev);
        for r in 0..kdim {
            d_matrix.set(r, i, img[r].clone());
        }
        gen_images.push(img);
    }
    let omega = OmegaModule {
        algebra: a.clone(),
        kdim,
        relations,
        projection,
        section,
        action,
        d_matrix,
        gen_images,
    };
    debug_checks(&omega);
    omega
}

/// Leibniz, d(1) = 0 and the module axioms, asserted on all basis pairs.
fn debug_checks(omega: &OmegaModule) {
    let a = &omega.algebra;
    let f = a.field;
    let n = a.dim;
    assert!(
        omega.d_of(&a.one_elem()).iter().all(|c| f.is_zero(c)),
        "d(1) must vanish"
    );
    for i in 0..n {
        for j in 0..n {
            let ei = a.basis_elem(i);
            let ej = a.basis_elem(j);
            let prod = a.mul_elems(&ei, &ej);
            let lhs = omega.d_of(&prod);
            let mut rhs = omega.x_dy(&ei, &ej);
            let other = omega.x_dy(&ej, &ei);
            for r in 0..omega.kdim {
                rhs[r] = f.add(&rhs[r], &other[r]);
            }
            assert_eq!(lhs, rhs, "Leibniz fails on basis pair ({i},{j})");
            // Representation: action(e_i) action(e_j) = action(e_i e_j).
            let lhs_m = omega.action[i].mul(&omega.action[j]);
            let rhs_m = omega.action_of(&prod);
            assert_eq!(lhs_m, rhs_m, "action is not a representation at ({i},{j})");
        }
    }
}

/// The induced map f_*: de_i -> d(f(e_i)), extended A-linearly.
pub fn induced_map(f: &Hom, source: &Arc<OmegaModule>, target: &Arc<OmegaModule>) -> OmegaMap {
    let field = f.source.field;
    let n = f.source.dim;
    // Per source basis element: d_B(f(e_l)) and action_B(f(e_t)).
    let d_of_images: Vec<Vec<Scalar>> = (0..n).map(|l| target.d_of(&f.matrix.col_vec(l))).collect();
    let act_of_images: Vec<Matrix> = (0..n)
        .map(|t| target.action_of(&f.matrix.col_vec(t)))
        .collect();
    let mut m = Matrix::zero(field, target.kdim, source.kdim);
    for q in 0..source.kdim {
        let freev = source.section.col_vec(q);
        let mut img = vec![field.zero(); target.kdim];
        for l in 1..n {
            for t in 0..n {
                let c = &freev[OmegaModule::free_index(n, l, t)];
                if field.is_zero(c) {
                    continue;
                }
                let term = act_of_images[t].mul_vec(&d_of_images[l]);
                for r in 0..target.kdim {
                    img[r] = field.add(&img[r], &field.mul(c, &term[r]));
                }
            }
        }
        for r in 0..target.kdim {
            m.set(r, q, img[r].clone());
        }
    }
    // Naturality: m . d_source = d_target . f.
    assert_eq!(
        m.mul(&source.d_matrix),
        target.d_matrix.mul(&f.matrix),
        "naturality square broken"
    );
    OmegaMap {
        source: source.clone(),
        target: target.clone(),
        matrix: m,
    }
}

impl OmegaMap {
    pub fn kernel(&self) -> Subspace {
        kernel_basis(&self.matrix)
    }

    pub fn image(&self) -> Subspace {
        Subspace::from_matrix_cols(&self.matrix)
    }
}

/// A quotient of an Omega module by a submodule, with the inherited action.
#[derive(Clone, Debug)]
pub struct QuotientModule {
    pub ambient: Arc<OmegaModule>,
    pub sub: Subspace,
    pub projection: Matrix,
    pub section: Matrix,
    pub dim: usize,
}

impl QuotientModule {
    fn new(ambient: &Arc<OmegaModule>, sub: Subspace) -> QuotientModule {
        let (projection, dim) = sub.quotient();
        let section = sub.quotient_section();
        QuotientModule {
            ambient: ambient.clone(),
            sub,
            projection,
            section,
            dim,
        }
    }

    /// Action of an algebra element on the quotient coordinates.
    pub fn action_of(&self, x: &[Scalar]) -> Matrix {
        self.projection.mul(&self.ambient.action_of(x)).mul(&self.section)
    }
}

/// Ω_{S/R} = Ω_{S/k} modulo the S-submodule generated by d(f(R)),
/// for f: R -> S.
pub fn relative_omega(f: &Hom, omega_s: &Arc<OmegaModule>) -> QuotientModule {
    let field = f.source.field;
    let s = &f.target;
    let mut gens = Vec::new();
    for j in 0..f.source.dim {
        gens.push(omega_s.d_of(&f.matrix.col_vec(j)));
    }
    // Close under the S-action.
    let mut vectors = Vec::new();
    for g in &gens {
        for t in 0..s.dim {
            vectors.push(omega_s.action[t].mul_vec(g));
        }
    }
    let sub = Subspace::from_span(field, omega_s.kdim, vectors);
    QuotientModule::new(omega_s, sub)
}

/// HC_1(A) = Omega_A / dA.
pub fn hc1(omega: &Arc<OmegaModule>) -> QuotientModule {
    let im_d = Subspace::from_matrix_cols(&omega.d_matrix);
    QuotientModule::new(omega, im_d)
}

/// H^0_dR(A) = ker(d) as a subspace of A.
pub fn h0_dr(omega: &OmegaModule) -> Subspace {
    kernel_basis(&omega.d_matrix)
}

// ---------------------------------------------------------------------------
// Exactness checks
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MayerVietorisReport {
    pub dim_omega_r: usize,
    pub dim_omega_s: usize,
    pub dim_omega_r_mod_i: usize,
    pub dim_omega_s_mod_i: usize,
    pub exact_at_middle: bool,
    pub onto: bool,
    pub composite_zero: bool,
}

impl MayerVietorisReport {
    pub fn exact(&self) -> bool {
        self.exact_at_middle && self.onto && self.composite_zero
    }
}

/// Verifies exactness of Ω_R -> Ω_S ⊕ Ω_{R/I} -> Ω_{S/I} -> 0 for an
/// inclusion f: R -> S and an ideal I of S contained in R.
pub fn mayer_vietoris_check(f: &Hom, i: &Ideal) -> Result<MayerVietorisReport> {
    use crate::algebra::quotient_by_ideal;
    if !Arc::ptr_eq(&i.algebra, &f.target) && i.algebra.dim != f.target.dim {
        return Err(AlgebraError::NotAnIdeal);
    }
    if !f.is_injective() {
        return Err(AlgebraError::HomNotInjective);
    }
    // Pull I back along f and check it is a common ideal.
    let mut i_r_vectors = Vec::new();
    for v in i.space.basis_vectors() {
        let x = f.matrix.solve(&v).ok_or(AlgebraError::NotAnIdeal)?;
        i_r_vectors.push(x);
    }
    let i_r_space = Subspace::from_span(f.source.field, f.source.dim, i_r_vectors.clone());
    if i_r_space.dim() != i.space.dim() {
        return Err(AlgebraError::NotAnIdeal);
    }
    f.source.check_ideal(&i_r_space)?;
    let (s_mod, ps, _) = quotient_by_ideal(&f.target, &i.space.basis_vectors())?;
    let (r_mod, pr, _) = quotient_by_ideal(&f.source, &i_r_vectors)?;
    let s_mod = Arc::new(s_mod);
    let r_mod = Arc::new(r_mod);
    // Induced map R/I -> S/I.
    let mut rbar_matrix = Matrix::zero(f.source.field, s_mod.dim, r_mod.dim);
    // Section of pr: solve pr x = e_j.
    for j in 0..r_mod.dim {
        let target = unit(f.source.field, r_mod.dim, j);
        let lift = pr.matrix.solve(&target).expect("surjection");
        let img = ps.matrix.mul_vec(&f.matrix.mul_vec(&lift));
        for r in 0..s_mod.dim {
            rbar_matrix.set(r, j, img[r].clone());
        }
    }
    let rbar = Hom::new(r_mod.clone(), s_mod.clone(), rbar_matrix)?;
    let omega_r = Arc::new(kaehler(&f.source));
    let omega_s = Arc::new(kaehler(&f.target));
    let omega_rmod = Arc::new(kaehler(&r_mod));
    let omega_smod = Arc::new(kaehler(&s_mod));
    let fstar = induced_map(f, &omega_r, &omega_s);
    let prstar = induced_map(&pr, &omega_r, &omega_rmod);
    let psstar = induced_map(&ps, &omega_s, &omega_smod);
    let rbarstar = induced_map(&rbar, &omega_rmod, &omega_smod);
    let alpha = fstar.matrix.vstack(&prstar.matrix);
    let beta = psstar.matrix.hstack(&rbarstar.matrix.neg());
    let composite_zero = beta.mul(&alpha).is_zero();
    let rank_alpha = alpha.rank();
    let rank_beta = beta.rank();
    let middle_dim = omega_s.kdim + omega_rmod.kdim;
    let exact_at_middle = composite_zero && rank_alpha == middle_dim - rank_beta;
    let onto = rank_beta == omega_smod.kdim;
    Ok(MayerVietorisReport {
        dim_omega_r: omega_r.kdim,
        dim_omega_s: omega_s.kdim,
        dim_omega_r_mod_i: omega_rmod.kdim,
        dim_omega_s_mod_i: omega_smod.kdim,
        exact_at_middle,
        onto,
        composite_zero,
    })
}

#[derive(Clone, Debug)]
pub struct IntegrationReport {
    pub dim_kernel: usize,
    pub dim_hc1: usize,
    pub dim_b_mod_a: usize,
    pub dim_omega_b_mod_a: usize,
    pub alternating_sum_zero: bool,
    pub exact: bool,
}

/// Builds the integration matrix Ω_B -> B for a principal ideal algebra B
/// over a characteristic-zero field, integrating with respect to a chosen
/// parameter of each local factor.
pub fn integration_matrix(b: &AlgRef, omega_b: &Arc<OmegaModule>) -> Result<Matrix> {
    use crate::structure::{local_decomposition, maximal_ideal_powers};
    let f = b.field;
    if f != Field::Rationals {
        return Err(AlgebraError::Unsupported(
            "integration requires characteristic 0".to_string(),
        ));
    }
    let factors = local_decomposition(b)?;
    let mut integ = Matrix::zero(f, b.dim, omega_b.kdim);
    for lf in &factors {
        let (bi, proj) = (&lf.algebra, &lf.projection);
        let omega_bi = Arc::new(kaehler(bi));
        let pstar = induced_map(proj, omega_b, &omega_bi);
        let ni = bi.dim;
        if ni == 1 {
            continue; // field factor: Omega = 0
        }
        // Parameter: a maximal-ideal basis vector outside M^2.
        let powers = maximal_ideal_powers(bi)?;
        let m2 = if powers.len() > 1 {
            powers[1].clone()
        } else {
            Subspace::zero(f, ni)
        };
        let t = powers[0]
            .basis_vectors()
            .into_iter()
            .find(|v| !m2.contains(v))
            .ok_or(AlgebraError::Unsupported("factor is a field".to_string()))?;
        // Columns t^j dt span Omega_{B_i}; solve for coordinates.
        let dt = omega_bi.d_of(&t);
        let mut cols = Matrix::zero(f, omega_bi.kdim, ni - 1);
        let mut tpowers = vec![bi.one_elem()];
        for j in 1..ni {
            tpowers.push(bi.mul_elems(&tpowers[j - 1], &t));
        }
        for j in 0..(ni - 1) {
            let v = omega_bi.action_of(&tpowers[j]).mul_vec(&dt);
            for r in 0..omega_bi.kdim {
                cols.set(r, j, v[r].clone());
            }
        }
        for q in 0..omega_b.kdim {
            let w = pstar.matrix.col_vec(q);
            let coeffs = cols.solve(&w).ok_or(AlgebraError::Unsupported(
                "powers of the parameter do not span the factor module".to_string(),
            ))?;
            // integral of sum a_j t^j dt = sum a_j t^{j+1}/(j+1), back in B.
            let mut anti = b.zero_elem();
            for (j, c) in coeffs.iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                let scaled = f.div(c, &f.from_int((j + 1) as i64)).unwrap();
                let lifted = lf.inclusion.mul_vec(&tpowers[j + 1]);
                for r in 0..b.dim {
                    anti[r] = f.add(&anti[r], &f.mul(&scaled, &lifted[r]));
                }
            }
            for r in 0..b.dim {
                integ.set(r, q, f.add(integ.get(r, q), &anti[r]));
            }
        }
    }
    Ok(integ)
}

/// Verifies exactness of
/// 0 -> ker(Ω_A -> Ω_B) -> HC_1(A) -> B/A -> Ω_B/Ω_A -> 0
/// for an inclusion A ⊂ B with B a principal ideal algebra, char 0.
pub fn hc1_integration_check(f: &Hom) -> Result<IntegrationReport> {
    use crate::structure::is_pia;
    let field = f.source.field;
    if field != Field::Rationals {
        return Err(AlgebraError::Unsupported(
            "sequence check requires characteristic 0".to_string(),
        ));
    }
    if !f.is_injective() {
        return Err(AlgebraError::HomNotInjective);
    }
    let (pia, _) = is_pia(&f.target)?;
    if !pia {
        return Err(AlgebraError::Unsupported(
            "target must be a principal ideal algebra".to_string(),
        ));
    }
    let a = &f.source;
    let b = &f.target;
    let omega_a = Arc::new(kaehler(a));
    let omega_b = Arc::new(kaehler(b));
    let fstar = induced_map(f, &omega_a, &omega_b);
    let kernel = fstar.kernel();
    let hc1_a = hc1(&omega_a);
    // B/A.
    let im_f = Subspace::from_matrix_cols(&f.matrix);
    let (proj_ba, dim_ba) = im_f.quotient();
    // Omega_B / f_* Omega_A.
    let im_fstar = fstar.image();
    let (proj_ob, dim_ob) = im_fstar.quotient();
    // Integration.
    let integ = integration_matrix(b, &omega_b)?;
    // HC1(A) -> B/A on quotient coordinates.
    let int_hat = proj_ba.mul(&integ).mul(&fstar.matrix).mul(&hc1_a.section);
    // Well-definedness on dA: the composite must kill the image of d.
    let on_da = proj_ba.mul(&integ).mul(&fstar.matrix).mul(&omega_a.d_matrix);
    if !on_da.is_zero() {
        return Err(AlgebraError::Unsupported(
            "integration does not descend to HC_1".to_string(),
        ));
    }
    // B/A -> Omega_B/Omega_A: b -> class of d(b).
    let sec_ba = im_f.quotient_section();
    let d_hat = proj_ob.mul(&omega_b.d_matrix).mul(&sec_ba);
    // Kernel -> HC1(A).
    let iota = hc1_a.projection.mul(&kernel.basis.transpose());
    let exact_start = iota.rank() == kernel.dim();
    let ker_int = kernel_basis(&int_hat);
    let im_iota = Subspace::from_matrix_cols(&iota);
    let exact_hc1 = im_iota == ker_int;
    let im_int = Subspace::from_matrix_cols(&int_hat);
    let ker_d = kernel_basis(&d_hat);
    let exact_ba = im_int == ker_d;
    let onto = d_hat.rank() == dim_ob;
    let alternating = kernel.dim() as i64 - hc1_a.dim as i64 + dim_ba as i64 - dim_ob as i64;
    Ok(IntegrationReport {
        dim_kernel: kernel.dim(),
        dim_hc1: hc1_a.dim,
        dim_b_mod_a: dim_ba,
        dim_omega_b_mod_a: dim_ob,
        alternating_sum_zero: alternating == 0,
        exact: exact_start && exact_hc1 && exact_ba && onto,
    })
}

/// dim Omega decomposes over a product: used as a named helper by tests.
pub fn omega_dim(a: &AlgRef) -> usize {
    kaehler(a).kdim
}

/// Image of a subspace of Omega_A under an induced map.
pub fn push_subspace(map: &OmegaMap, s: &Subspace) -> Subspace {
    image_of(&map.matrix, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        make_hom_on_generators, quotient_presentation, subalgebra_generated, truncated_poly, truncation_algebra,
        Algebra,
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

    /// k[x,y]/(x^3, xy, y^2) with basis {1, x, y, x^2}.
    fn monomial_quotient(f: Field) -> AlgRef {
        let vars = vec!["x".to_string(), "y".to_string()];
        let t = arc(truncation_algebra(f, &vars, 3).unwrap());
        let x = t.named_elem("x").unwrap();
        let y = t.named_elem("y").unwrap();
        arc(quotient_presentation(f, &vars, 3, &[t.mul_elems(&x, &y), t.pow_elem(&y, 2)]).unwrap())
    }

    /// k[x,y]/(x^3, x^2 y, y^2) with basis {1, x, y, x^2, xy}.
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

    #[test]
    fn omega_of_truncated_line() {
        // dim over k[s]/(s^n) is n-1 in char 0: s^{n-1} ds dies.
        for n in 1..=6 {
            let a = trunc(q(), "s", n);
            assert_eq!(kaehler(&a).kdim, n.saturating_sub(1));
        }
    }

    #[test]
    fn omega_of_truncated_line_wild() {
        // When p | n the top relation n s^{n-1} ds vanishes, so dim = n.
        let f2 = Field::prime(2).unwrap();
        assert_eq!(kaehler(&trunc(f2, "s", 2)).kdim, 2);
        assert_eq!(kaehler(&trunc(f2, "s", 4)).kdim, 4);
        assert_eq!(kaehler(&trunc(f2, "s", 3)).kdim, 2);
        let f5 = Field::prime(5).unwrap();
        assert_eq!(kaehler(&trunc(f5, "s", 5)).kdim, 5);
        assert_eq!(kaehler(&trunc(f5, "s", 6)).kdim, 5);
    }

    #[test]
    fn omega_of_square_zero_plane() {
        // k[x,y]/(x,y)^2: basis {dx, dy, x dy} with y dx = -x dy.
        let vars = vec!["x".to_string(), "y".to_string()];
        let a = arc(quotient_presentation(q(), &vars, 2, &[]).unwrap());
        let omega = Arc::new(kaehler(&a));
        assert_eq!(omega.kdim, 3);
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        let xdy = omega.x_dy(&x, &y);
        let ydx = omega.x_dy(&y, &x);
        let f = a.field;
        let sum: Vec<Scalar> = (0..3).map(|i| f.add(&xdy[i], &ydx[i])).collect();
        assert!(sum.iter().all(|c| f.is_zero(c)));
        // HC_1 is one-dimensional, generated by the class of x dy.
        let h = hc1(&omega);
        assert_eq!(h.dim, 1);
        let class = h.projection.mul_vec(&xdy);
        assert!(class.iter().any(|c| !f.is_zero(c)));
    }

    #[test]
    fn hc1_of_truncated_line_vanishes() {
        for n in 2..=5 {
            let a = trunc(q(), "s", n);
            let omega = Arc::new(kaehler(&a));
            assert_eq!(hc1(&omega).dim, 0);
        }
    }

    #[test]
    fn h0_de_rham() {
        // Char 0: only constants are closed.
        let a = trunc(q(), "s", 4);
        let ker = h0_dr(&kaehler(&a));
        assert_eq!(ker.dim(), 1);
        assert!(ker.contains(&a.one_elem()));
        // Char 2: s^2 is closed too.
        let f2 = Field::prime(2).unwrap();
        let b = trunc(f2, "s", 4);
        let ker = h0_dr(&kaehler(&b));
        assert_eq!(ker.dim(), 2);
        assert!(ker.contains(&b.basis_elem(2)));
    }

    #[test]
    fn monomial_quotient_omega_dims() {
        assert_eq!(kaehler(&monomial_quotient(q())).kdim, 4);
        let f5 = Field::prime(5).unwrap();
        assert_eq!(kaehler(&monomial_quotient(f5)).kdim, 4);
    }

    #[test]
    fn torsion_detected_only_in_char_zero() {
        // A = k[x,y]/(x^3, xy, y^2) embeds in k[s]/(s^5) by x -> s^2,
        // y -> s^3. Over Q the induced map kills y dx; over F_5 it is
        // injective because s^4 ds survives.
        for field in [q(), Field::prime(5).unwrap()] {
            let a = monomial_quotient(field);
            let b = trunc(field, "s", 5);
            let s = b.named_elem("s").unwrap();
            let f = make_hom_on_generators(
                &a,
                &b,
                &[("x".to_string(), b.pow_elem(&s, 2)), ("y".to_string(), b.pow_elem(&s, 3))],
            )
            .unwrap();
            let omega_a = Arc::new(kaehler(&a));
            let omega_b = Arc::new(kaehler(&b));
            let map = induced_map(&f, &omega_a, &omega_b);
            let ker = map.kernel();
            match field {
                Field::Rationals => {
                    assert_eq!(ker.dim(), 1);
                    let y = a.named_elem("y").unwrap();
                    let x = a.named_elem("x").unwrap();
                    assert!(ker.contains(&omega_a.x_dy(&y, &x)));
                }
                Field::Prime(_) => assert!(ker.is_zero()),
            }
        }
    }

    #[test]
    fn a3_kernels_and_their_intersection() {
        let a = a3(q());
        let omega_a = Arc::new(kaehler(&a));
        assert_eq!(omega_a.kdim, 6);
        let x = a.named_elem("x").unwrap();
        let y = a.named_elem("y").unwrap();
        let xy = a.mul_elems(&x, &y);
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
        let xdy = omega_a.x_dy(&x, &y);
        let ydx = omega_a.x_dy(&y, &x);
        let xydx = omega_a.x_dy(&xy, &x);

        // x -> s^2, y -> s^3 into k[s]/(s^6).
        let b1 = trunc(q(), "s", 6);
        let s1 = b1.named_elem("s").unwrap();
        let f1 = make_hom_on_generators(
            &a,
            &b1,
            &[("x".to_string(), b1.pow_elem(&s1, 2)), ("y".to_string(), b1.pow_elem(&s1, 3))],
        )
        .unwrap();
        let omega_b1 = Arc::new(kaehler(&b1));
        let k1 = induced_map(&f1, &omega_a, &omega_b1).kernel();
        assert_eq!(k1.dim(), 2);
        assert!(k1.contains(&comb(2, &xdy, -3, &ydx)));
        assert!(k1.contains(&xydx));

        // x -> s^3, y -> s^5 into k[s]/(s^9).
        let b2 = trunc(q(), "s", 9);
        let s2 = b2.named_elem("s").unwrap();
        let f2 = make_hom_on_generators(
            &a,
            &b2,
            &[("x".to_string(), b2.pow_elem(&s2, 3)), ("y".to_string(), b2.pow_elem(&s2, 5))],
        )
        .unwrap();
        let omega_b2 = Arc::new(kaehler(&b2));
        let k2 = induced_map(&f2, &omega_a, &omega_b2).kernel();
        assert_eq!(k2.dim(), 2);
        assert!(k2.contains(&comb(3, &xdy, -5, &ydx)));
        assert!(k2.contains(&xydx));

        let both = k1.intersect(&k2).unwrap();
        assert_eq!(both.dim(), 1);
        assert!(both.contains(&xydx));
    }

    #[test]
    fn relative_omega_of_numerical_subalgebra() {
        // R generated by s^3, s^5 inside S = Q[s]/(s^9): Omega_{S/R} has
        // basis {ds, s ds}.
        let s_alg = trunc(q(), "s", 9);
        let s = s_alg.named_elem("s").unwrap();
        let (r, inc) = subalgebra_generated(
            &s_alg,
            &[s_alg.pow_elem(&s, 3), s_alg.pow_elem(&s, 5)],
            &[None, None],
        )
        .unwrap();
        let _ = arc(r);
        let omega_s = Arc::new(kaehler(&s_alg));
        let rel = relative_omega(&inc, &omega_s);
        assert_eq!(rel.dim, 2);
    }

    #[test]
    fn relative_omega_of_surjection_is_target_module() {
        // S -> S/I: Omega_{S/R} = 0 when R = S.
        let a = trunc(q(), "s", 4);
        let omega = Arc::new(kaehler(&a));
        let rel = relative_omega(&crate::algebra::Hom::identity(&a), &omega);
        assert_eq!(rel.dim, 0);
    }

    #[test]
    fn rendering_differentials() {
        let a = trunc(q(), "s", 3);
        let omega = Arc::new(kaehler(&a));
        let s = a.named_elem("s").unwrap();
        let ds = omega.d_of(&s);
        assert_eq!(omega.render(&ds), "d(s)");
        // s ds is reduced against the relation 2 s ds = d(s^2), whose pivot
        // eliminates the s ds coordinate.
        let sds = omega.x_dy(&s, &s);
        assert_eq!(omega.render(&sds), "1/2*d(s^2)");
        assert_eq!(omega.render(&vec![a.field.zero(); omega.kdim]), "0");
    }

    #[test]
    fn mayer_vietoris_on_conductor_square() {
        // R = <s^3, s^5> in S = Q[s]/(s^9), I = (s^8) the conductor power.
        let s_alg = trunc(q(), "s", 9);
        let s = s_alg.named_elem("s").unwrap();
        let (_, inc) = subalgebra_generated(
            &s_alg,
            &[s_alg.pow_elem(&s, 3), s_alg.pow_elem(&s, 5)],
            &[None, None],
        )
        .unwrap();
        let i = crate::algebra::Ideal::from_gens(&s_alg, &[s_alg.pow_elem(&s, 8)]);
        let report = mayer_vietoris_check(&inc, &i).unwrap();
        assert!(report.composite_zero);
        assert!(report.exact());
    }

    #[test]
    fn mayer_vietoris_smaller_square() {
        // R = <s^2, s^3> in S = Q[s]/(s^4), I = (s^2).
        let s_alg = trunc(q(), "s", 4);
        let s = s_alg.named_elem("s").unwrap();
        let (_, inc) = subalgebra_generated(
            &s_alg,
            &[s_alg.pow_elem(&s, 2), s_alg.pow_elem(&s, 3)],
            &[None, None],
        )
        .unwrap();
        let i = crate::algebra::Ideal::from_gens(&s_alg, &[s_alg.pow_elem(&s, 2)]);
        let report = mayer_vietoris_check(&inc, &i).unwrap();
        assert!(report.exact());
    }

    #[test]
    fn integration_sequence_for_a3() {
        let a = a3(q());
        let b = trunc(q(), "s", 6);
        let s = b.named_elem("s").unwrap();
        let f = make_hom_on_generators(
            &a,
            &b,
            &[("x".to_string(), b.pow_elem(&s, 2)), ("y".to_string(), b.pow_elem(&s, 3))],
        )
        .unwrap();
        let report = hc1_integration_check(&f).unwrap();
        assert_eq!(report.dim_kernel, 2);
        assert_eq!(report.dim_hc1, 2);
        assert_eq!(report.dim_b_mod_a, 1);
        assert_eq!(report.dim_omega_b_mod_a, 1);
        assert!(report.alternating_sum_zero);
        assert!(report.exact);
    }

    #[test]
    fn integration_sequence_for_numerical_subalgebra() {
        let b = trunc(q(), "s", 5);
        let s = b.named_elem("s").unwrap();
        let (a, inc) = subalgebra_generated(
            &b,
            &[b.pow_elem(&s, 2), b.pow_elem(&s, 3)],
            &[None, None],
        )
        .unwrap();
        let _ = arc(a);
        let report = hc1_integration_check(&inc).unwrap();
        assert!(report.alternating_sum_zero);
        assert!(report.exact);
    }

    #[test]
    fn integration_rejects_positive_characteristic() {
        let f5 = Field::prime(5).unwrap();
        let a = trunc(f5, "s", 3);
        let id = crate::algebra::Hom::identity(&a);
        assert!(hc1_integration_check(&id).is_err());
    }
}
