//! Sparse multivariate polynomials with double precision complex coefficients.
//!
//! Terms carry dense exponent vectors over the variable list of their
//! polynomial. Every [`Polynomial`] is kept in canonical form: like terms are
//! combined, negligible coefficients dropped and the terms sorted in
//! graded-lexicographic descending order, so printing is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Coefficients below this magnitude after combining like terms are dropped.
pub const ZERO_COEFFICIENT: f64 = 1e-300;

/// Shared, ordered list of variable names.
pub type Variables = Arc<[String]>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("exponent vector has length {got}, expected {expected}")]
    ExponentLength { expected: usize, got: usize },
    #[error("coefficient {0} is not finite")]
    NonFinite(Complex64),
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("polynomials do not share the system's variable list")]
    VariableMismatch,
    #[error("a system needs at least one polynomial")]
    EmptySystem,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Builds a shared variable list, rejecting duplicate names.
pub fn variables<S: AsRef<str>>(names: &[S]) -> Result<Variables, PolyError> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name.as_ref()) {
            return Err(PolyError::DuplicateVariable(name.as_ref().to_string()));
        }
    }
    Ok(names.iter().map(|s| s.as_ref().to_string()).collect())
}

/// Returns an error unless the value is finite in both parts.
pub fn check_finite(c: Complex64) -> Result<Complex64, PolyError> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(PolyError::NonFinite(c))
    }
}

/// Max-norm of a complex vector.
pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Complex64,
    pub exponents: Vec<u32>,
}

impl Term {
    pub fn new(coefficient: Complex64, exponents: Vec<u32>) -> Result<Self, PolyError> {
        check_finite(coefficient)?;
        Ok(Term { coefficient, exponents })
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Graded-lexicographic order: total degree first, then exponents from the
/// first variable on.
pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    variables: Variables,
    terms: Vec<Term>,
}

impl Polynomial {
    /// Creates a canonical polynomial from `(coefficient, exponents)` pairs.
    pub fn new(
        variables: Variables,
        terms: impl IntoIterator<Item = (Complex64, Vec<u32>)>,
    ) -> Result<Self, PolyError> {
        let n = variables.len();
        let mut collected = Vec::new();
        for (c, e) in terms {
            if e.len() != n {
                return Err(PolyError::ExponentLength { expected: n, got: e.len() });
            }
            collected.push(Term::new(c, e)?);
        }
        Ok(Self::from_terms_unchecked(variables, collected))
    }

    fn from_terms_unchecked(variables: Variables, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| grlex(&b.exponents, &a.exponents));
        let mut combined: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match combined.last_mut() {
                Some(last) if last.exponents == t.exponents => last.coefficient += t.coefficient,
                _ => combined.push(t),
            }
        }
        combined.retain(|t| t.coefficient.norm() >= ZERO_COEFFICIENT);
        Polynomial { variables, terms: combined }
    }

    pub fn zero(variables: Variables) -> Self {
        Polynomial { variables, terms: Vec::new() }
    }

    pub fn constant(variables: Variables, c: Complex64) -> Result<Self, PolyError> {
        let n = variables.len();
        Self::new(variables, [(c, vec![0; n])])
    }

    /// The polynomial `x_index`.
    pub fn variable(variables: Variables, index: usize) -> Self {
        let mut e = vec![0; variables.len()];
        e[index] = 1;
        Self::from_terms_unchecked(variables, vec![Term { coefficient: Complex64::new(1.0, 0.0), exponents: e }])
    }

    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-sorts and recombines; the identity on canonical input.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms_unchecked(self.variables.clone(), self.terms.clone())
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<Complex64, PolyError> {
        self.check_dim(x.len())?;
        let powers = PowerTable::new(x, self.max_exponents());
        Ok(self.terms.iter().map(|t| t.coefficient * powers.monomial(&t.exponents)).sum())
    }

    /// Total degree; the zero polynomial has none.
    pub fn degree(&self) -> Result<u32, PolyError> {
        self.terms.iter().map(Term::degree).max().ok_or(PolyError::ZeroPolynomial)
    }

    /// Exponent vectors of the terms with nonzero coefficient.
    pub fn support(&self) -> BTreeSet<Vec<u32>> {
        self.terms.iter().map(|t| t.exponents.clone()).collect()
    }

    /// Partial derivative with respect to variable `j`, formed term by term.
    pub fn diff(&self, j: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[j] > 0)
            .map(|t| {
                let mut e = t.exponents.clone();
                let a = e[j];
                e[j] -= 1;
                Term { coefficient: t.coefficient * a as f64, exponents: e }
            })
            .collect();
        Self::from_terms_unchecked(self.variables.clone(), terms)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coefficient: t.coefficient * c, exponents: t.exponents.clone() })
            .collect();
        Self::from_terms_unchecked(self.variables.clone(), terms)
    }

    /// `Σ c_k · p_k` over polynomials sharing one variable list.
    pub fn linear_combination<'a>(
        variables: Variables,
        parts: impl IntoIterator<Item = (Complex64, &'a Polynomial)>,
    ) -> Result<Polynomial, PolyError> {
        let mut terms = Vec::new();
        for (c, p) in parts {
            if p.variables != variables {
                return Err(PolyError::VariableMismatch);
            }
            check_finite(c)?;
            terms.extend(
                p.terms.iter().map(|t| Term { coefficient: t.coefficient * c, exponents: t.exponents.clone() }),
            );
        }
        Ok(Self::from_terms_unchecked(variables, terms))
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        let one = Complex64::new(1.0, 0.0);
        Self::linear_combination(self.variables.clone(), [(one, self), (one, other)])
    }

    /// Re-expresses the polynomial over `target`, whose names must include all
    /// of this polynomial's variables that actually occur.
    pub fn relabel(&self, target: &Variables) -> Result<Polynomial, PolyError> {
        let mut map = Vec::with_capacity(self.nvars());
        for name in self.variables.iter() {
            map.push(target.iter().position(|v| v == name));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &a) in t.exponents.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                match map[i] {
                    Some(k) => e[k] = a,
                    None => return Err(PolyError::UnknownVariable(self.variables[i].clone())),
                }
            }
            terms.push(Term { coefficient: t.coefficient, exponents: e });
        }
        Ok(Self::from_terms_unchecked(target.clone(), terms))
    }

    /// Substitutes values for some variables; the result lives over the
    /// remaining variables, in their original order.
    pub fn substitute(&self, values: &[(usize, Complex64)]) -> Result<Polynomial, PolyError> {
        let n = self.nvars();
        let mut fixed: Vec<Option<Complex64>> = vec![None; n];
        for &(i, v) in values {
            if i >= n {
                return Err(PolyError::Dimension { expected: n, got: i + 1 });
            }
            fixed[i] = Some(check_finite(v)?);
        }
        let keep: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let remaining: Variables = keep.iter().map(|&i| self.variables[i].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut c = t.coefficient;
                for (i, v) in fixed.iter().enumerate() {
                    if let Some(v) = v {
                        c *= v.powu(t.exponents[i]);
                    }
                }
                Term { coefficient: c, exponents: keep.iter().map(|&i| t.exponents[i]).collect() }
            })
            .collect();
        Ok(Self::from_terms_unchecked(remaining, terms))
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0; self.nvars()];
        for t in &self.terms {
            for (mi, &e) in m.iter_mut().zip(&t.exponents) {
                *mi = (*mi).max(e);
            }
        }
        m
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != self.nvars() {
            return Err(PolyError::Dimension { expected: self.nvars(), got });
        }
        Ok(())
    }
}

/// Cached powers `x_j^k` for `k ≤ max_j`.
struct PowerTable {
    powers: Vec<Vec<Complex64>>,
}

impl PowerTable {
    fn new(x: &[Complex64], max: Vec<u32>) -> Self {
        let powers = x
            .iter()
            .zip(max)
            .map(|(&xi, m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..m {
                    acc *= xi;
                    row.push(acc);
                }
                row
            })
            .collect();
        PowerTable { powers }
    }

    fn monomial(&self, e: &[u32]) -> Complex64 {
        e.iter().enumerate().map(|(j, &a)| self.powers[j][a as usize]).product()
    }

    fn get(&self, j: usize, a: u32) -> Complex64 {
        self.powers[j][a as usize]
    }
}

/// A list of polynomials over one shared variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    variables: Variables,
    polys: Vec<Polynomial>,
}

impl PolySystem {
    pub fn new(variables: Variables, polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        if polys.is_empty() {
            return Err(PolyError::EmptySystem);
        }
        if polys.iter().any(|p| p.variables != variables) {
            return Err(PolyError::VariableMismatch);
        }
        Ok(PolySystem { variables, polys })
    }

    /// Builds a system whose variables are taken from the first polynomial.
    pub fn from_polys(polys: Vec<Polynomial>) -> Result<Self, PolyError> {
        let variables = polys.first().ok_or(PolyError::EmptySystem)?.variables.clone();
        Self::new(variables, polys)
    }

    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn into_polys(self) -> Vec<Polynomial> {
        self.polys
    }

    /// Number of equations.
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn is_square(&self) -> bool {
        self.len() == self.nvars()
    }

    pub fn degrees(&self) -> Result<Vec<u32>, PolyError> {
        self.polys.iter().map(Polynomial::degree).collect()
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<DVector<Complex64>, PolyError> {
        Ok(self.evaluate_with_jacobian(x, false)?.0)
    }

    /// Matrix of partial derivatives, entry `(i, j) = ∂f_i/∂x_j`.
    pub fn jacobian(&self, x: &[Complex64]) -> Result<DMatrix<Complex64>, PolyError> {
        Ok(self.evaluate_with_jacobian(x, true)?.1)
    }

    /// Max-norm of the system evaluated at `x`.
    pub fn residual(&self, x: &[Complex64]) -> Result<f64, PolyError> {
        Ok(self.evaluate(x)?.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// Values and Jacobian in one pass over the terms.
    pub fn eval_and_jacobian(&self, x: &[Complex64]) -> Result<(DVector<Complex64>, DMatrix<Complex64>), PolyError> {
        self.evaluate_with_jacobian(x, true)
    }

    fn evaluate_with_jacobian(
        &self,
        x: &[Complex64],
        with_jacobian: bool,
    ) -> Result<(DVector<Complex64>, DMatrix<Complex64>), PolyError> {
        let n = self.nvars();
        if x.len() != n {
            return Err(PolyError::Dimension { expected: n, got: x.len() });
        }
        let mut max = vec![0; n];
        for p in &self.polys {
            for (m, e) in max.iter_mut().zip(p.max_exponents()) {
                *m = (*m).max(e);
            }
        }
        let powers = PowerTable::new(x, max);
        let zero = Complex64::new(0.0, 0.0);
        let mut values = DVector::from_element(self.len(), zero);
        let mut jac = DMatrix::from_element(if with_jacobian { self.len() } else { 0 }, n, zero);
        for (i, p) in self.polys.iter().enumerate() {
            for t in &p.terms {
                values[i] += t.coefficient * powers.monomial(&t.exponents);
                if !with_jacobian {
                    continue;
                }
                for j in 0..n {
                    let a = t.exponents[j];
                    if a == 0 {
                        continue;
                    }
                    let mut d = t.coefficient * a as f64 * powers.get(j, a - 1);
                    for (l, &b) in t.exponents.iter().enumerate() {
                        if l != j && b > 0 {
                            d *= powers.get(l, b);
                        }
                    }
                    jac[(i, j)] += d;
                }
            }
        }
        Ok((values, jac))
    }
}
