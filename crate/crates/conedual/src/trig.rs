//! Fourier transforms of symmetric sequences on the torus, uniform grids,
//! and certified global minima.
//!
//! The semi-infinite constraint "f̂ ≥ 0 on T^d" is replaced by evaluation on
//! a uniform grid plus a rigorous margin: a global bound on the gradient of
//! f̂ times the mesh radius converts a grid minimum into a certified lower
//! bound for the true minimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ConeDualError;
use crate::seqcore::{pairing, MultiIndex, SymmetricSequence};

/// Default tolerance below which a touching-zero polynomial is still
/// accepted as nonnegative. Trigonometric polynomials at optima routinely
/// attain 0, which no positive-margin grid check can certify at tolerance 0.
pub const DEFAULT_EPS_PD: f64 = 1e-9;

#[doc(hidden)]
pub fn default_eps_pd() -> f64 {
    DEFAULT_EPS_PD
}

/// Uniform product grid `x_j = 2πj/G` per axis on `T^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    points_per_axis: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self, ConeDualError> {
        if dim == 0 {
            return Err(ConeDualError::InvalidArgument("grid dimension must be ≥ 1".into()));
        }
        if points_per_axis < 4 {
            return Err(ConeDualError::InvalidArgument(
                "grid must have at least 4 points per axis".into(),
            ));
        }
        Ok(TorusGrid { dim, points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Half-diagonal of one grid cell, `(π/G)·√d`.
    pub fn mesh_radius(&self) -> f64 {
        std::f64::consts::PI / self.points_per_axis as f64 * (self.dim as f64).sqrt()
    }

    /// A grid on the same torus with `factor`-times more points per axis.
    pub fn refined(&self, factor: usize) -> TorusGrid {
        TorusGrid {
            dim: self.dim,
            points_per_axis: self.points_per_axis * factor.max(1),
        }
    }

    fn point_of(&self, mut flat: usize) -> Vec<f64> {
        let g = self.points_per_axis;
        let step = 2.0 * std::f64::consts::PI / g as f64;
        let mut coords = vec![0.0; self.dim];
        for c in coords.iter_mut().rev() {
            *c = (flat % g) as f64 * step;
            flat /= g;
        }
        coords
    }

    fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Flat indices of canonical representatives of `{x, -x}` pairs.
    ///
    /// Symmetric polynomials take equal values at `x` and `-x`, so minima and
    /// linear constraints only need one point per pair.
    fn half_indices(&self) -> Vec<usize> {
        let g = self.points_per_axis;
        let total = self.total_points();
        (0..total)
            .filter(|&flat| {
                // Compare the index tuple with its negation (G - j mod G).
                let mut f = flat;
                let mut digits = vec![0usize; self.dim];
                for d in digits.iter_mut().rev() {
                    *d = f % g;
                    f /= g;
                }
                let neg: Vec<usize> = digits.iter().map(|&j| (g - j) % g).collect();
                digits <= neg
            })
            .collect()
    }

    /// Canonical grid points, one per `{x, -x}` pair.
    pub fn half_points(&self) -> Vec<Vec<f64>> {
        self.half_indices().iter().map(|&i| self.point_of(i)).collect()
    }
}

/// Outcome of certifying the minimum of a cosine polynomial on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    /// Minimum of f̂ over the grid points.
    pub grid_min: f64,
    /// Rigor margin: the true global minimum lies in `[grid_min - margin, grid_min]`.
    pub margin: f64,
    /// Grid point attaining `grid_min`.
    pub argmin: Vec<f64>,
    pub status: CertStatus,
    /// The tolerance the status was assigned against.
    pub eps_pd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    CertifiedNonneg,
    Refuted,
    Inconclusive,
}

impl CertifiedValue {
    /// Certified lower bound for the true global minimum.
    pub fn lower_bound(&self) -> f64 {
        self.grid_min - self.margin
    }
}

/// `f̂(x) = f(0) + 2 Σ_{n∈Z₊^d} f(n) cos(n·x)`.
pub fn fourier_eval(f: &SymmetricSequence, x: &[f64]) -> f64 {
    let mut value = f.value_at_origin();
    for (n, v) in f.positive_entries() {
        value += 2.0 * v * n.dot(x).cos();
    }
    value
}

/// Global bound on `‖∇f̂‖₂`: `2 Σ |f(n)| ‖n‖₂`.
pub fn gradient_bound(f: &SymmetricSequence) -> f64 {
    2.0 * f
        .positive_entries()
        .map(|(n, v)| v.abs() * n.norm2())
        .sum::<f64>()
}

/// Global bound on `‖∇²f̂‖₂`: `2 Σ |f(n)| ‖n‖₂²`.
pub fn hessian_bound(f: &SymmetricSequence) -> f64 {
    2.0 * f
        .positive_entries()
        .map(|(n, v)| {
            let r = n.norm2();
            v.abs() * r * r
        })
        .sum::<f64>()
}

/// `f(0) - 2 Σ |f(n)|`, a global lower bound for f̂ that needs no grid.
pub fn l1_lower_bound(f: &SymmetricSequence) -> f64 {
    f.value_at_origin() - 2.0 * f.positive_entries().map(|(_, v)| v.abs()).sum::<f64>()
}

/// Grid minimum of f̂ plus the gradient-bound margin.
///
/// The reduction over grid points is an order-independent `min` keyed by
/// `(value, flat index)`, so the result and the reported argmin do not
/// depend on the parallel evaluation order.
pub fn certified_min(f: &SymmetricSequence, grid: &TorusGrid, eps_pd: f64) -> CertifiedValue {
    assert_eq!(f.dim(), grid.dim(), "sequence/grid dimension mismatch");
    let indices = grid.half_indices();
    let (grid_min, best_flat) = indices
        .par_iter()
        .map(|&flat| (fourier_eval(f, &grid.point_of(flat)), flat))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    // Two rigor margins, both valid: Lipschitz (B₁·r) and second-order
    // (½B₂r², using ∇f̂ = 0 at the global minimum of a periodic function).
    let r = grid.mesh_radius();
    let margin = (gradient_bound(f) * r).min(0.5 * hessian_bound(f) * r * r);
    let status = if grid_min - margin >= -eps_pd {
        CertStatus::CertifiedNonneg
    } else if grid_min < -eps_pd {
        CertStatus::Refuted
    } else {
        CertStatus::Inconclusive
    };
    CertifiedValue {
        grid_min,
        margin,
        argmin: grid.point_of(best_flat),
        status,
        eps_pd,
    }
}

/// A finite nonnegative symmetric measure on `T^d` given by its atoms.
///
/// Each atom `x` with `x ≠ -x` stands for the symmetric pair `{x, -x}` with
/// half the weight on each, which is what makes the synthesized sequences
/// real and symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<(Vec<f64>, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self, ConeDualError> {
        for (_, w) in &atoms {
            if *w < 0.0 {
                return Err(ConeDualError::InvalidArgument(
                    "atomic measure weights must be nonnegative".into(),
                ));
            }
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn empty() -> Self {
        AtomicMeasure { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

/// `h(n) = Σ_j w_j cos(n·x_j)` on the requested support; positive definite
/// by construction (atomic Bochner synthesis).
pub fn synthesize_from_measure(
    measure: &AtomicMeasure,
    support: impl IntoIterator<Item = MultiIndex>,
    dim: usize,
) -> SymmetricSequence {
    let mut h = SymmetricSequence::zero(dim);
    for n in support {
        let value: f64 = measure
            .atoms
            .iter()
            .map(|(x, w)| w * n.dot(x).cos())
            .sum();
        h.set(n, value);
    }
    h
}

/// Evaluates both sides of the Parseval identity
/// `Σ_n f(n) h(n) = Σ_j w_j f̂(x_j)` where `h` is synthesized from the atoms.
pub fn parseval_check(
    f: &SymmetricSequence,
    measure: &AtomicMeasure,
) -> Result<(f64, f64), ConeDualError> {
    let support: Vec<MultiIndex> = f.entries().map(|(n, _)| n.clone()).collect();
    let h = synthesize_from_measure(measure, support, f.dim());
    let lhs = pairing(f, &h)?;
    let rhs = measure
        .atoms
        .iter()
        .map(|(x, w)| w * fourier_eval(f, x))
        .sum();
    Ok((lhs, rhs))
}
