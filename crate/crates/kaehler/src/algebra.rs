//! Finite-dimensional commutative algebras given by structure constants.
//!
//! Basis index 0 is always the multiplicative unit. Every constructor
//! validates commutativity and associativity of the multiplication table,
//! and tracks the maximal ideal through quotients and subalgebras when the
//! input is local.

use std::fmt;
use std::sync::Arc;

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::subspace::{image_of, kernel_basis, unit, Subspace};

pub type AlgRef = Arc<Algebra>;

/// Exponent data for algebras built from a polynomial presentation:
/// the generator names and, per basis element, the exponent vector of the
/// monomial coset it represents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialData {
    pub vars: Vec<String>,
    pub exps: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct Algebra {
    pub field: Field,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    /// c[i][j][l] = coefficient of e_l in e_i e_j, flattened as (i*n+j)*n+l.
    table: Vec<Scalar>,
    /// Known maximal ideal, tracked through constructors from local inputs.
    pub local_info: Option<Subspace>,
    /// Elements addressable by name in the expression language.
    pub named: Vec<(String, Vec<Scalar>)>,
    pub monomials: Option<MonomialData>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    ZeroDimensional,
    UnitBroken,
    NotCommutative(usize, usize),
    NotAssociative(usize, usize, usize),
    FieldMismatch,
    NotAnIdeal,
    NotNilpotent,
    ImproperIdeal,
    ConstantTerm,
    NotCofinite,
    NotInAlgebra,
    HomNotLinearMap,
    HomUnitBroken,
    HomNotMultiplicative(usize, usize),
    HomNotInjective,
    MissingLocalInfo,
    MissingMonomials,
    RadicalUndecided,
    NotSplit,
    IdempotentLiftDiverged,
    UnknownName(String),
    Unsupported(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AlgebraError::*;
        match self {
            ZeroDimensional => write!(f, "algebra must have dimension at least 1"),
            UnitBroken => write!(f, "basis element 0 is not the multiplicative unit"),
            NotCommutative(i, j) => write!(f, "multiplication table not commutative at ({i},{j})"),
            NotAssociative(i, j, l) => {
                write!(f, "multiplication table not associative at ({i},{j},{l})")
            }
            FieldMismatch => write!(f, "operands live over different fields"),
            NotAnIdeal => write!(f, "subspace is not closed under multiplication"),
            NotNilpotent => write!(f, "tracked maximal ideal is not nilpotent"),
            ImproperIdeal => write!(f, "ideal is the whole algebra"),
            ConstantTerm => write!(f, "relation has a nonzero constant term"),
            NotCofinite => write!(f, "presentation ideal does not contain the degree-N monomials"),
            NotInAlgebra => write!(f, "element does not lie in the algebra"),
            HomNotLinearMap => write!(f, "images do not determine a linear map"),
            HomUnitBroken => write!(f, "map does not send 1 to 1"),
            HomNotMultiplicative(i, j) => {
                write!(f, "map is not multiplicative on basis pair ({i},{j})")
            }
            HomNotInjective => write!(f, "map is not injective"),
            MissingLocalInfo => write!(f, "operation requires a tracked maximal ideal"),
            MissingMonomials => write!(f, "operation requires a polynomial presentation"),
            RadicalUndecided => write!(f, "radical-undecided: no tracked maximal ideal and the exhaustive fallback is out of range"),
            NotSplit => write!(f, "semisimple quotient has a non-rational character"),
            IdempotentLiftDiverged => write!(f, "idempotent lifting did not converge"),
            UnknownName(n) => write!(f, "unknown name `{n}`"),
            Unsupported(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for AlgebraError {}

pub type Result<T> = std::result::Result<T, AlgebraError>;

impl Algebra {
    pub fn from_table(
        field: Field,
        basis_labels: Vec<String>,
        table: Vec<Scalar>,
        local_info: Option<Subspace>,
    ) -> Result<Algebra> {
        let n = basis_labels.len();
        if n == 0 {
            return Err(AlgebraError::ZeroDimensional);
        }
        assert_eq!(table.len(), n * n * n, "structure constant table size");
        let a = Algebra {
            field,
            dim: n,
            basis_labels,
            table,
            local_info,
            named: Vec::new(),
            monomials: None,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let f = self.field;
        let n = self.dim;
        // e_0 is the unit.
        for j in 0..n {
            for l in 0..n {
                let expect = if j == l { f.one() } else { f.zero() };
                if *self.c(0, j, l) != expect || *self.c(j, 0, l) != expect {
                    return Err(AlgebraError::UnitBroken);
                }
            }
        }
        // Commutativity.
        for i in 0..n {
            for j in (i + 1)..n {
                for l in 0..n {
                    if self.c(i, j, l) != self.c(j, i, l) {
                        return Err(AlgebraError::NotCommutative(i, j));
                    }
                }
            }
        }
        // Associativity on all basis triples.
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul_basis(i, j);
                for l in 0..n {
                    let left = self.mul_elems(&ij, &unit(f, n, l));
                    let jl = self.mul_basis(j, l);
                    let right = self.mul_elems(&unit(f, n, i), &jl);
                    if left != right {
                        return Err(AlgebraError::NotAssociative(i, j, l));
                    }
                }
            }
        }
        if let Some(m) = &self.local_info {
            self.validate_local_info(m)?;
        }
        Ok(())
    }

    fn validate_local_info(&self, m: &Subspace) -> Result<()> {
        if m.ambient_dim != self.dim || m.dim() + 1 != self.dim {
            return Err(AlgebraError::NotAnIdeal);
        }
        if m.contains(&self.one_elem()) {
            return Err(AlgebraError::NotAnIdeal);
        }
        self.check_ideal(m)?;
        // Nilpotency: M^dim = 0.
        let mut cur = m.clone();
        for _ in 0..self.dim {
            if cur.is_zero() {
                return Ok(());
            }
            cur = self.subspace_product(&cur, m);
        }
        if cur.is_zero() {
            Ok(())
        } else {
            Err(AlgebraError::NotNilpotent)
        }
    }

    pub fn check_ideal(&self, s: &Subspace) -> Result<()> {
        for i in 0..self.dim {
            for v in s.basis_vectors() {
                let prod = self.mul_elems(&unit(self.field, self.dim, i), &v);
                if !s.contains(&prod) {
                    return Err(AlgebraError::NotAnIdeal);
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, l: usize) -> &Scalar {
        &self.table[(i * self.dim + j) * self.dim + l]
    }

    pub fn one_elem(&self) -> Vec<Scalar> {
        unit(self.field, self.dim, 0)
    }

    pub fn basis_elem(&self, i: usize) -> Vec<Scalar> {
        unit(self.field, self.dim, i)
    }

    pub fn zero_elem(&self) -> Vec<Scalar> {
        vec![self.field.zero(); self.dim]
    }

    fn mul_basis(&self, i: usize, j: usize) -> Vec<Scalar> {
        (0..self.dim).map(|l| self.c(i, j, l).clone()).collect()
    }

    pub fn mul_elems(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let n = self.dim;
        let mut out = vec![f.zero(); n];
        for i in 0..n {
            if f.is_zero(&x[i]) {
                continue;
            }
            for j in 0..n {
                if f.is_zero(&y[j]) {
                    continue;
                }
                let xy = f.mul(&x[i], &y[j]);
                for l in 0..n {
                    let c = self.c(i, j, l);
                    if !f.is_zero(c) {
                        out[l] = f.add(&out[l], &f.mul(&xy, c));
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x` on basis coordinates.
    pub fn left_mul_matrix(&self, x: &[Scalar]) -> Matrix {
        let f = self.field;
        let n = self.dim;
        let mut m = Matrix::zero(f, n, n);
        for j in 0..n {
            let col = self.mul_elems(x, &self.basis_elem(j));
            for l in 0..n {
                m.set(l, j, col[l].clone());
            }
        }
        m
    }

    pub fn pow_elem(&self, x: &[Scalar], k: u32) -> Vec<Scalar> {
        let mut acc = self.one_elem();
        for _ in 0..k {
            acc = self.mul_elems(&acc, x);
        }
        acc
    }

    pub fn is_zero_elem(&self, x: &[Scalar]) -> bool {
        x.iter().all(|v| self.field.is_zero(v))
    }

    pub fn is_nilpotent_elem(&self, x: &[Scalar]) -> bool {
        let mut cur = x.to_vec();
        for _ in 0..self.dim {
            if self.is_zero_elem(&cur) {
                return true;
            }
            cur = self.mul_elems(&cur, x);
        }
        self.is_zero_elem(&cur)
    }

    /// Span of all pairwise products of the two subspaces' basis vectors.
    pub fn subspace_product(&self, s: &Subspace, t: &Subspace) -> Subspace {
        let mut products = Vec::new();
        for x in s.basis_vectors() {
            for y in t.basis_vectors() {
                products.push(self.mul_elems(&x, &y));
            }
        }
        Subspace::from_span(self.field, self.dim, products)
    }

    /// Smallest ideal containing the span of `gens`.
    pub fn ideal_closure(&self, gens: &[Vec<Scalar>]) -> Subspace {
        let mut span = Subspace::from_span(self.field, self.dim, gens.to_vec());
        loop {
            let mut vectors = span.basis_vectors();
            let before = span.dim();
            for i in 0..self.dim {
                for v in span.basis_vectors() {
                    vectors.push(self.mul_elems(&self.basis_elem(i), &v));
                }
            }
            span = Subspace::from_span(self.field, self.dim, vectors);
            if span.dim() == before {
                return span;
            }
        }
    }

    pub fn maximal_ideal(&self) -> Result<&Subspace> {
        self.local_info.as_ref().ok_or(AlgebraError::MissingLocalInfo)
    }

    pub fn named_elem(&self, name: &str) -> Result<Vec<Scalar>> {
        self.named
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| AlgebraError::UnknownName(name.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Homomorphisms and ideals
// ---------------------------------------------------------------------------

/// A validated k-algebra homomorphism, stored as a matrix on basis
/// coordinates (column j = target coordinates of the image of e_j).
#[derive(Clone, Debug)]
pub struct Hom {
    pub source: AlgRef,
    pub target: AlgRef,
    pub matrix: Matrix,
}

impl Hom {
    pub fn new(source: AlgRef, target: AlgRef, matrix: Matrix) -> Result<Hom> {
        if source.field != target.field {
            return Err(AlgebraError::FieldMismatch);
        }
        assert_eq!(matrix.rows, target.dim);
        assert_eq!(matrix.cols, source.dim);
        if matrix.col_vec(0) != target.one_elem() {
            return Err(AlgebraError::HomUnitBroken);
        }
        for i in 0..source.dim {
            for j in i..source.dim {
                let fi = matrix.col_vec(i);
                let fj = matrix.col_vec(j);
                let lhs = target.mul_elems(&fi, &fj);
                let prod = source.mul_elems(&source.basis_elem(i), &source.basis_elem(j));
                let rhs = matrix.mul_vec(&prod);
                if lhs != rhs {
                    return Err(AlgebraError::HomNotMultiplicative(i, j));
                }
            }
        }
        Ok(Hom {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(a: &AlgRef) -> Hom {
        Hom {
            source: a.clone(),
            target: a.clone(),
            matrix: Matrix::identity(a.field, a.dim),
        }
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.matrix.mul_vec(x)
    }

    pub fn is_injective(&self) -> bool {
        kernel_basis(&self.matrix).is_zero()
    }

    pub fn compose(first: &Hom, then: &Hom) -> Hom {
        assert_eq!(first.target.dim, then.source.dim);
        Hom {
            source: first.source.clone(),
            target: then.target.clone(),
            matrix: then.matrix.mul(&first.matrix),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Ideal {
    pub algebra: AlgRef,
    pub space: Subspace,
}

impl Ideal {
    pub fn new(algebra: AlgRef, space: Subspace) -> Result<Ideal> {
        algebra.check_ideal(&space)?;
        Ok(Ideal { algebra, space })
    }

    pub fn from_gens(algebra: &AlgRef, gens: &[Vec<Scalar>]) -> Ideal {
        let space = algebra.ideal_closure(gens);
        Ideal {
            algebra: algebra.clone(),
            space,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// `k[var]/(var^n)` with basis `1, var, ..., var^{n-1}`.
pub fn truncated_poly(field: Field, var: &str, n: usize) -> Result<Algebra> {
    if n == 0 {
        return Err(AlgebraError::ZeroDimensional);
    }
    let f = field;
    let labels: Vec<String> = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        })
        .collect();
    let mut table = vec![f.zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                table[(i * n + j) * n + (i + j)] = f.one();
            }
        }
    }
    let local = Subspace::from_span(f, n, (1..n).map(|i| unit(f, n, i)).collect());
    let mut a = Algebra::from_table(f, labels, table, Some(local))?;
    a.named = vec![(
        var.to_string(),
        if n > 1 { a.basis_elem(1) } else { a.zero_elem() },
    )];
    a.monomials = Some(MonomialData {
        vars: vec![var.to_string()],
        exps: (0..n as u32).map(|i| vec![i]).collect(),
    });
    Ok(a)
}

fn uniquify(labels: &mut Vec<String>, candidate: &str) -> String {
    let mut name = candidate.to_string();
    while labels.contains(&name) {
        name.push('\'');
    }
    labels.push(name.clone());
    name
}

/// Direct product with componentwise multiplication. The chosen basis is
/// `(1,1)`, then the non-unit basis of `a` embedded in the first factor,
/// then `(0,1_b)`, then the non-unit basis of `b`.
pub fn product(a: &AlgRef, b: &AlgRef) -> Result<(Algebra, Hom, Hom)> {
    if a.field != b.field {
        return Err(AlgebraError::FieldMismatch);
    }
    let f = a.field;
    let (na, nb) = (a.dim, b.dim);
    let n = na + nb;
    // Basis columns in direct-sum coordinates (a-block then b-block).
    let mut cols = Matrix::zero(f, n, n);
    cols.set(0, 0, f.one());
    cols.set(na, 0, f.one());
    for i in 1..na {
        cols.set(i, i, f.one());
    }
    cols.set(na, na, f.one());
    for j in 1..nb {
        cols.set(na + j, na + j, f.one());
    }
    let mult = |x: &[Scalar], y: &[Scalar]| -> Vec<Scalar> {
        let mut out = a.mul_elems(&x[..na], &y[..na]);
        out.extend(b.mul_elems(&x[na..], &y[na..]));
        out
    };
    let table = table_from_basis(f, &mult, &cols)?;
    let mut labels: Vec<String> = Vec::new();
    uniquify(&mut labels, "1");
    for i in 1..na {
        uniquify(&mut labels, &a.basis_labels[i]);
    }
    uniquify(&mut labels, "u");
    for j in 1..nb {
        uniquify(&mut labels, &b.basis_labels[j]);
    }
    let mut prod = Algebra::from_table(f, labels, table, None)?;
    // Named elements from both factors, embedded and re-expressed in the
    // product basis.
    let coords = |v_direct: &[Scalar]| -> Vec<Scalar> {
        cols.solve(v_direct).expect("basis spans the product")
    };
    let mut named = Vec::new();
    for (name, v) in &a.named {
        let mut direct = v.clone();
        direct.extend(vec![f.zero(); nb]);
        if !named.iter().any(|(n, _): &(String, _)| n == name) {
            named.push((name.clone(), coords(&direct)));
        }
    }
    for (name, v) in &b.named {
        let mut direct = vec![f.zero(); na];
        direct.extend(v.iter().cloned());
        if !named.iter().any(|(n, _): &(String, _)| n == name) {
            named.push((name.clone(), coords(&direct)));
        }
    }
    prod.named = named;
    let prod = Arc::new(prod);
    // Projections: read off the factor component of each product basis elem.
    let mut pa = Matrix::zero(f, na, n);
    let mut pb = Matrix::zero(f, nb, n);
    for j in 0..n {
        let direct = cols.col_vec(j);
        for r in 0..na {
            pa.set(r, j, direct[r].clone());
        }
        for r in 0..nb {
            pb.set(r, j, direct[na + r].clone());
        }
    }
    let proj_a = Hom::new(prod.clone(), a.clone(), pa)?;
    let proj_b = Hom::new(prod.clone(), b.clone(), pb)?;
    let prod = Arc::try_unwrap(prod).unwrap_or_else(|rc| (*rc).clone());
    Ok((prod, proj_a, proj_b))
}

/// Structure constants of an algebra whose basis is given by the columns of
/// `basis` inside an ambient space with multiplication `mult`.
fn table_from_basis(
    field: Field,
    mult: &dyn Fn(&[Scalar], &[Scalar]) -> Vec<Scalar>,
    basis: &Matrix,
) -> Result<Vec<Scalar>> {
    let n = basis.cols;
    let mut table = vec![field.zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let prod = mult(&basis.col_vec(i), &basis.col_vec(j));
            let coeffs = basis.solve(&prod).ok_or(AlgebraError::NotInAlgebra)?;
            for l in 0..n {
                table[(i * n + j) * n + l] = coeffs[l].clone();
            }
        }
    }
    Ok(table)
}

/// Degree-lex monomials in `m` variables of total degree `< n`, ascending.
pub fn monomials_below(m: usize, n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..n {
        let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
        // Lexicographic within a degree: earlier variables take higher powers first.
        fn emit(m: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == m - 1 {
                let mut v = cur.clone();
                v.push(left);
                out.push(v);
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e);
                emit(m, left - e, cur, out);
                cur.pop();
            }
        }
        if m == 0 {
            if deg == 0 {
                out.push(Vec::new());
            }
            continue;
        }
        let mut cur = Vec::new();
        emit(m, deg, &mut cur, &mut out);
        stack.clear();
    }
    out
}

pub fn monomial_label(vars: &[String], exps: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// The truncation `k[x_1..x_m]/(x_1..x_m)^N` on the degree-lex monomial basis.
pub fn truncation_algebra(field: Field, vars: &[String], n_trunc: u32) -> Result<Algebra> {
    if n_trunc == 0 {
        return Err(AlgebraError::ZeroDimensional);
    }
    let f = field;
    let monos = monomials_below(vars.len(), n_trunc);
    let n = monos.len();
    let index_of = |exps: &[u32]| monos.iter().position(|m| m == exps);
    let mut table = vec![f.zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let sum: Vec<u32> = monos[i].iter().zip(&monos[j]).map(|(a, b)| a + b).collect();
            if sum.iter().sum::<u32>() < n_trunc {
                let l = index_of(&sum).expect("closed under truncated multiplication");
                table[(i * n + j) * n + l] = f.one();
            }
        }
    }
    let labels = monos.iter().map(|e| monomial_label(vars, e)).collect();
    let local = Subspace::from_span(f, n, (1..n).map(|i| unit(f, n, i)).collect());
    let mut a = Algebra::from_table(f, labels, table, Some(local))?;
    a.named = vars
        .iter()
        .enumerate()
        .map(|(vi, v)| {
            let mut e = vec![0u32; vars.len()];
            e[vi] = 1;
            let elem = match index_of(&e) {
                Some(idx) => unit(f, n, idx),
                None => vec![f.zero(); n], // N = 1 truncation kills the variables
            };
            (v.clone(), elem)
        })
        .collect();
    a.monomials = Some(MonomialData {
        vars: vars.to_vec(),
        exps: monos,
    });
    Ok(a)
}

/// `k[x_1..x_m]/((x_1..x_m)^N + (extra_polys))`, computed inside the
/// finite-dimensional truncation. Every extra polynomial must be an element
/// of the truncation with zero constant term.
pub fn quotient_presentation(
    field: Field,
    vars: &[String],
    n_trunc: u32,
    extras: &[Vec<Scalar>],
) -> Result<Algebra> {
    let t = Arc::new(truncation_algebra(field, vars, n_trunc)?);
    for e in extras {
        if !field.is_zero(&e[0]) {
            return Err(AlgebraError::ConstantTerm);
        }
    }
    let (q, _, _) = quotient_by_ideal(&t, extras)?;
    // Cofiniteness: the maximal ideal of the result must be nilpotent, which
    // `from_table` has already verified through local_info; report the
    // presentation-specific error if that check ever regresses.
    match &q.local_info {
        Some(m) => {
            let mut cur = m.clone();
            for _ in 0..q.dim {
                cur = q.subspace_product(&cur, m);
            }
            if !cur.is_zero() {
                return Err(AlgebraError::NotCofinite);
            }
        }
        None => return Err(AlgebraError::NotCofinite),
    }
    Ok(q)
}

/// Subalgebra of `b` generated by `gens`, together with the inclusion.
/// `names` optionally names the generators inside the subalgebra.
pub fn subalgebra_generated(
    b: &AlgRef,
    gens: &[Vec<Scalar>],
    names: &[Option<String>],
) -> Result<(Algebra, Hom)> {
    let f = b.field;
    let n = b.dim;
    let mut span_vecs: Vec<Vec<Scalar>> = vec![b.one_elem()];
    span_vecs.extend(gens.iter().cloned());
    let mut span = Subspace::from_span(f, n, span_vecs);
    // Close under pairwise multiplication until the dimension stabilizes.
    loop {
        let before = span.dim();
        let basis = span.basis_vectors();
        let mut vecs = basis.clone();
        for x in &basis {
            for y in &basis {
                vecs.push(b.mul_elems(x, y));
            }
        }
        span = Subspace::from_span(f, n, vecs);
        if span.dim() == before {
            break;
        }
    }
    let d = span.dim();
    // Basis columns: the unit first, then the echelon basis rows that are
    // independent of it, in order.
    let mut cols: Vec<Vec<Scalar>> = vec![b.one_elem()];
    for v in span.basis_vectors() {
        let current = Subspace::from_span(f, n, cols.clone());
        if !current.contains(&v) {
            cols.push(v);
        }
        if cols.len() == d {
            break;
        }
    }
    let mut basis_matrix = Matrix::zero(f, n, d);
    for (j, v) in cols.iter().enumerate() {
        for r in 0..n {
            basis_matrix.set(r, j, v[r].clone());
        }
    }
    let mult = |x: &[Scalar], y: &[Scalar]| b.mul_elems(x, y);
    let table = table_from_basis(f, &mult, &basis_matrix)?;
    // Labels: reuse the ambient label when a basis column is an ambient
    // basis vector, else synthesize.
    let mut labels: Vec<String> = Vec::new();
    for (j, v) in cols.iter().enumerate() {
        let ambient_unit = (0..n).find(|&i| *v == unit(f, n, i));
        let candidate = match ambient_unit {
            Some(i) => b.basis_labels[i].clone(),
            None => format!("b{j}"),
        };
        uniquify(&mut labels, &candidate);
    }
    let local = if let Some(mb) = &b.local_info {
        // The subalgebra of a local algebra is local: M_sub = span cap M_b.
        let coords_of = |v: &Vec<Scalar>| basis_matrix.solve(v);
        let mut mvecs = Vec::new();
        let inter = span.intersect(mb).map_err(|_| AlgebraError::FieldMismatch)?;
        for v in inter.basis_vectors() {
            if let Some(c) = coords_of(&v) {
                mvecs.push(c);
            }
        }
        Some(Subspace::from_span(f, d, mvecs))
    } else {
        None
    };
    let mut sub = Algebra::from_table(f, labels, table, local)?;
    // Generator names, plus ambient named elements that land in the span.
    let mut named = Vec::new();
    for (g, name) in gens.iter().zip(names) {
        if let Some(name) = name {
            if let Some(c) = basis_matrix.solve(g) {
                named.push((name.clone(), c));
            }
        }
    }
    for (name, v) in &b.named {
        if named.iter().any(|(n, _): &(String, _)| n == name) {
            continue;
        }
        if span.contains(v) {
            if let Some(c) = basis_matrix.solve(v) {
                named.push((name.clone(), c));
            }
        }
    }
    sub.named = named;
    let sub = Arc::new(sub);
    let inclusion = Hom::new(sub.clone(), b.clone(), basis_matrix)?;
    if !inclusion.is_injective() {
        return Err(AlgebraError::HomNotInjective);
    }
    let sub = Arc::try_unwrap(sub).unwrap_or_else(|rc| (*rc).clone());
    Ok((sub, inclusion))
}

/// Quotient of `a` by the ideal generated by `gens`.
pub fn quotient_by_ideal(a: &AlgRef, gens: &[Vec<Scalar>]) -> Result<(Algebra, Hom, Ideal)> {
    let f = a.field;
    let ideal = Ideal::from_gens(a, gens);
    if ideal.dim() == a.dim {
        return Err(AlgebraError::ImproperIdeal);
    }
    let (proj, qdim) = ideal.space.quotient();
    let sec = ideal.space.quotient_section();
    let mult = |x: &[Scalar], y: &[Scalar]| a.mul_elems(x, y);
    let mut table = vec![f.zero(); qdim * qdim * qdim];
    for i in 0..qdim {
        for j in 0..qdim {
            let prod = mult(&sec.col_vec(i), &sec.col_vec(j));
            let coeffs = proj.mul_vec(&prod);
            for l in 0..qdim {
                table[(i * qdim + j) * qdim + l] = coeffs[l].clone();
            }
        }
    }
    let nonpivots: Vec<usize> = (0..a.dim).filter(|c| !ideal.space.pivots.contains(c)).collect();
    let mut labels = Vec::new();
    for &c in &nonpivots {
        uniquify(&mut labels, &a.basis_labels[c]);
    }
    let local = a
        .local_info
        .as_ref()
        .map(|m| image_of(&proj, m))
        .filter(|m| m.dim() + 1 == qdim);
    let mut q = Algebra::from_table(f, labels, table, local)?;
    q.named = a
        .named
        .iter()
        .map(|(n, v)| (n.clone(), proj.mul_vec(v)))
        .collect();
    q.monomials = a.monomials.as_ref().map(|md| MonomialData {
        vars: md.vars.clone(),
        exps: nonpivots.iter().map(|&c| md.exps[c].clone()).collect(),
    });
    let q = Arc::new(q);
    let surjection = Hom::new(a.clone(), q.clone(), proj)?;
    let q = Arc::try_unwrap(q).unwrap_or_else(|rc| (*rc).clone());
    Ok((q, surjection, ideal))
}

/// Builds a homomorphism from per-basis-element images.
pub fn make_hom(source: &AlgRef, target: &AlgRef, images: &[Vec<Scalar>]) -> Result<Hom> {
    if images.len() != source.dim {
        return Err(AlgebraError::HomNotLinearMap);
    }
    let mut m = Matrix::zero(source.field, target.dim, source.dim);
    for (j, img) in images.iter().enumerate() {
        if img.len() != target.dim {
            return Err(AlgebraError::HomNotLinearMap);
        }
        for r in 0..target.dim {
            m.set(r, j, img[r].clone());
        }
    }
    Hom::new(source.clone(), target.clone(), m)
}

/// Builds a homomorphism from images of the presentation generators,
/// extended multiplicatively to the monomial basis.
pub fn make_hom_on_generators(
    source: &AlgRef,
    target: &AlgRef,
    gen_images: &[(String, Vec<Scalar>)],
) -> Result<Hom> {
    let md = source
        .monomials
        .as_ref()
        .ok_or(AlgebraError::MissingMonomials)?;
    let mut per_var = Vec::with_capacity(md.vars.len());
    for v in &md.vars {
        let img = gen_images
            .iter()
            .find(|(n, _)| n == v)
            .map(|(_, e)| e.clone())
            .ok_or_else(|| AlgebraError::UnknownName(v.clone()))?;
        per_var.push(img);
    }
    let images: Vec<Vec<Scalar>> = md
        .exps
        .iter()
        .map(|exps| {
            let mut acc = target.one_elem();
            for (vi, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    acc = target.mul_elems(&acc, &per_var[vi]);
                }
            }
            acc
        })
        .collect();
    make_hom(source, target, &images)
}
