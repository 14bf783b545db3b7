//! Root counts: the Bézout number and the mixed volume of Newton polytopes.
//!
//! The mixed volume is evaluated by inclusion-exclusion over the volumes of
//! all partial Minkowski sums,
//! `MV(P₁,…,Pₙ) = Σ_S (−1)^(n−|S|) vol(Σ_{i∈S} P_i)`, in exact integer
//! arithmetic. It counts isolated solutions with all coordinates nonzero;
//! solutions with zero coordinates are not predicted.

mod hull;

use num_rational::Ratio;
use thiserror::Error;

use crate::poly::{PolyError, PolySystem, Polynomial};

pub use hull::{hull, Hull, Point};

/// Largest dimension accepted by [`volume`] and [`mixed_volume`].
pub const MAX_DIMENSION: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountError {
    #[error("system is not square: {equations} equations in {variables} variables")]
    NonSquare { equations: usize, variables: usize },
    #[error("dimension {0} exceeds the supported maximum of {MAX_DIMENSION}")]
    DimensionCap(usize),
    #[error("polytope needs at least one point of a common dimension")]
    BadPolytope,
    #[error("mixed volume {0} is not an integer")]
    NotIntegral(Ratio<i128>),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Convex hull of a finite lattice point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    points: Vec<Point>,
}

impl Polytope {
    pub fn new(points: Vec<Point>) -> Result<Self, CountError> {
        let dim = points.first().ok_or(CountError::BadPolytope)?.len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(CountError::BadPolytope);
        }
        Ok(Polytope { points })
    }

    /// Newton polytope: the hull of the exponent vectors.
    pub fn newton(p: &Polynomial) -> Result<Self, CountError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial.into());
        }
        Self::new(p.support().into_iter().map(|e| e.into_iter().map(i64::from).collect()).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Minkowski sum of the point sets, without duplicates.
    pub fn minkowski_sum(&self, other: &Polytope) -> Polytope {
        let mut points: Vec<Point> = self
            .points
            .iter()
            .flat_map(|a| other.points.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
            .collect();
        points.sort();
        points.dedup();
        Polytope { points }
    }

    /// The same polytope described by its boundary points only.
    pub fn pruned(&self) -> Polytope {
        Polytope { points: hull(&self.points).boundary }
    }
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Euclidean volume of the hull; zero when the hull is not full dimensional.
pub fn volume(p: &Polytope) -> Result<Ratio<i128>, CountError> {
    let n = p.dim();
    if n > MAX_DIMENSION {
        return Err(CountError::DimensionCap(n));
    }
    let h = hull(p.points());
    if h.dim < n {
        return Ok(Ratio::from_integer(0));
    }
    Ok(Ratio::new(h.scaled_volume, factorial(n)))
}

fn check_square(s: &PolySystem) -> Result<(), CountError> {
    if !s.is_square() {
        return Err(CountError::NonSquare { equations: s.len(), variables: s.nvars() });
    }
    Ok(())
}

/// Product of the equation degrees.
pub fn total_degree(s: &PolySystem) -> Result<u64, CountError> {
    check_square(s)?;
    Ok(s.degrees()?.into_iter().map(u64::from).product())
}

/// Mixed volume of the Newton polytopes of a square system.
pub fn mixed_volume(s: &PolySystem) -> Result<u64, CountError> {
    check_square(s)?;
    let n = s.nvars();
    if n > MAX_DIMENSION {
        return Err(CountError::DimensionCap(n));
    }
    let polytopes: Vec<Polytope> =
        s.polys().iter().map(|p| Polytope::newton(p).map(|q| q.pruned())).collect::<Result<_, _>>()?;
    mixed_volume_of(&polytopes)
}

/// Mixed volume of `n` polytopes in dimension `n`.
pub fn mixed_volume_of(polytopes: &[Polytope]) -> Result<u64, CountError> {
    let n = polytopes.len();
    if n == 0 || polytopes.iter().any(|p| p.dim() != n) {
        return Err(CountError::BadPolytope);
    }
    if n > MAX_DIMENSION {
        return Err(CountError::DimensionCap(n));
    }
    // Boundary points of each partial sum, reused as the subset grows.
    let mut sums: Vec<Option<Polytope>> = vec![None; 1 << n];
    let mut total: i128 = 0;
    for mask in 1usize..(1 << n) {
        let top = usize::BITS - 1 - mask.leading_zeros();
        let rest = mask & !(1 << top);
        let sum = match &sums[rest] {
            Some(prev) => prev.minkowski_sum(&polytopes[top as usize]),
            None => polytopes[top as usize].clone(),
        };
        let h = hull(sum.points());
        if h.dim == n {
            let sign = if (n - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
            total += sign * h.scaled_volume;
        }
        sums[mask] = Some(Polytope { points: h.boundary });
    }
    let mv = Ratio::new(total, factorial(n));
    if !mv.is_integer() || mv < Ratio::from_integer(0) {
        return Err(CountError::NotIntegral(mv));
    }
    Ok(mv.to_integer() as u64)
}
