//! Benchmark families defined for any number of variables.

use num_complex::Complex64;
use thiserror::Error;

use crate::poly::{variables, PolyError, PolySystem, Polynomial, Variables};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}`; expected cyclic or noon")]
    UnknownName(String),
    #[error("family size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cyclic,
    Noon,
}

impl std::str::FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cyclic" => Ok(Family::Cyclic),
            "noon" => Ok(Family::Noon),
            other => Err(FamilyError::UnknownName(other.to_string())),
        }
    }
}

pub fn family(kind: Family, n: usize) -> Result<PolySystem, FamilyError> {
    match kind {
        Family::Cyclic => cyclic(n),
        Family::Noon => noon(n),
    }
}

fn names(n: usize) -> Result<Variables, FamilyError> {
    if n < 2 {
        return Err(FamilyError::TooSmall(n));
    }
    Ok(variables(&(1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>())?)
}

/// Cyclic n-roots: `Σ_i Π_{j=i}^{i+k−1} x_{j mod n}` for `k < n`, and `Π x_i − 1`.
pub fn cyclic(n: usize) -> Result<PolySystem, FamilyError> {
    let vars = names(n)?;
    let one = Complex64::new(1.0, 0.0);
    let mut polys = Vec::with_capacity(n);
    for k in 1..n {
        let terms = (0..n).map(|i| {
            let mut e = vec![0; n];
            (i..i + k).for_each(|j| e[j % n] += 1);
            (one, e)
        });
        polys.push(Polynomial::new(vars.clone(), terms)?);
    }
    polys.push(Polynomial::new(vars.clone(), [(one, vec![1; n]), (-one, vec![0; n])])?);
    Ok(PolySystem::new(vars, polys)?)
}

/// Noonburg's network: `x_i·Σ_{j≠i} x_j² − 1.1·x_i + 1`.
pub fn noon(n: usize) -> Result<PolySystem, FamilyError> {
    let vars = names(n)?;
    let one = Complex64::new(1.0, 0.0);
    let mut polys = Vec::with_capacity(n);
    for i in 0..n {
        let mut terms = Vec::with_capacity(n + 1);
        for j in (0..n).filter(|&j| j != i) {
            let mut e = vec![0; n];
            e[i] = 1;
            e[j] = 2;
            terms.push((one, e));
        }
        let mut e = vec![0; n];
        e[i] = 1;
        terms.push((Complex64::new(-1.1, 0.0), e));
        terms.push((one, vec![0; n]));
        polys.push(Polynomial::new(vars.clone(), terms)?);
    }
    Ok(PolySystem::new(vars, polys)?)
}
