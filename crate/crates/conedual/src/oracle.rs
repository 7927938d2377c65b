//! Independent brute-force verifiers: exhaustive parameter sweeps and the
//! Toeplitz finite-section check. These deliberately avoid the LP path so
//! they can cross-check it.

use crate::error::ConeDualError;
use crate::seqcore::{MultiIndex, SymmetricSequence};

/// Exhaustive sweep specification: inclusive ranges with fixed steps.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Per parameter: (start, end, step).
    pub ranges: Vec<(f64, f64, f64)>,
    /// Evaluation cap; exceeded sweeps are rejected up front.
    pub cap: usize,
}

impl SweepSpec {
    pub fn new(ranges: Vec<(f64, f64, f64)>) -> Self {
        SweepSpec {
            ranges,
            cap: 100_000_000,
        }
    }

    fn steps(&self) -> Vec<usize> {
        self.ranges
            .iter()
            .map(|&(a, b, s)| ((b - a) / s).floor() as usize + 1)
            .collect()
    }

    fn total(&self) -> usize {
        self.steps().iter().product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepOutcome {
    Best { value: f64, point: Vec<f64> },
    NoneFeasible,
}

/// Deterministic exhaustive grid sweep minimizing `objective` over feasible
/// points. Ties resolve to the first point in lexicographic sweep order.
pub fn sweep_optimize(
    spec: &SweepSpec,
    feasible: impl Fn(&[f64]) -> bool,
    objective: impl Fn(&[f64]) -> f64,
) -> Result<SweepOutcome, ConeDualError> {
    let total = spec.total();
    if total > spec.cap {
        return Err(ConeDualError::InvalidArgument(format!(
            "sweep size {total} exceeds cap {}",
            spec.cap
        )));
    }
    let steps = spec.steps();
    let dims = spec.ranges.len();
    let mut idx = vec![0usize; dims];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut point = vec![0.0; dims];
    loop {
        for (d, &i) in idx.iter().enumerate() {
            let (a, _, s) = spec.ranges[d];
            point[d] = a + i as f64 * s;
        }
        if feasible(&point) {
            let v = objective(&point);
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, point.clone()));
            }
        }
        // Odometer increment.
        let mut d = dims;
        loop {
            if d == 0 {
                return Ok(match best {
                    Some((value, point)) => SweepOutcome::Best { value, point },
                    None => SweepOutcome::NoneFeasible,
                });
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < steps[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Builds the (m+1)×(m+1) Toeplitz section `T_ij = h(|i-j|)` and tests
/// positive semidefiniteness by symmetric elimination with diagonal
/// pivoting. `false` proves h is not positive definite; `true` is only a
/// necessary condition.
pub fn toeplitz_necessary_check(h: &SymmetricSequence, order: usize) -> bool {
    assert_eq!(h.dim(), 1, "Toeplitz sections are a d = 1 check");
    let tol = 1e-10;
    let n = order + 1;
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = h.value_at(&MultiIndex::new(vec![(i as i64 - j as i64).abs()]));
        }
    }
    let scale = a.iter().fold(1.0f64, |acc, &v| acc.max(v.abs()));
    let mut active: Vec<usize> = (0..n).collect();
    while let Some((pos, &piv_row)) = {
        // Largest remaining diagonal entry.
        active
            .iter()
            .enumerate()
            .max_by(|(_, &i), (_, &j)| {
                a[i * n + i]
                    .partial_cmp(&a[j * n + j])
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    } {
        let p = piv_row;
        let diag = a[p * n + p];
        if diag < -tol * scale {
            return false;
        }
        if diag <= tol * scale {
            // All remaining diagonals are ≤ tol; PSD requires the remaining
            // off-diagonal block to vanish too.
            for &i in &active {
                for &j in &active {
                    if a[i * n + j].abs() > 1e-8 * scale.max(1.0) {
                        return false;
                    }
                }
            }
            return true;
        }
        active.remove(pos);
        // Schur complement update on the remaining block.
        for &i in &active {
            let f = a[i * n + p] / diag;
            for &j in &active {
                a[i * n + j] -= f * a[p * n + j];
            }
        }
        for &i in &active {
            a[i * n + p] = 0.0;
            a[p * n + i] = 0.0;
        }
    }
    true
}
