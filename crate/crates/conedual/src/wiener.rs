//! Certified brackets for the constants C(L,N) = K(L,N): upper bounds from
//! the dual positive-definite program, lower bounds from explicit elements
//! of C ∩ P built as autocorrelations.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{is_positive_definite, PdMethod};
use crate::error::ConeDualError;
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::seqcore::{MultiIndex, SymmetricSequence};
use crate::trig::{fourier_eval, TorusGrid};

/// One instance of the dual program for K(L,N).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WienerProblem {
    pub l: usize,
    pub n: usize,
    /// Dual support half-width; any R ≥ L·N yields a valid upper bound.
    pub r: usize,
    pub grid: TorusGrid,
    #[serde(default = "crate::trig::default_eps_pd")]
    pub eps_pd: f64,
}

impl WienerProblem {
    pub fn new(l: usize, n: usize, r: usize, grid: TorusGrid) -> Result<Self, ConeDualError> {
        if l < 2 || n < 1 {
            return Err(ConeDualError::InvalidArgument(
                "Wiener problem requires L ≥ 2 and N ≥ 1".into(),
            ));
        }
        if r < l * n {
            return Err(ConeDualError::InvalidArgument(format!(
                "dual support half-width R = {r} must be at least L·N = {}",
                l * n
            )));
        }
        if grid.dim() != 1 {
            return Err(ConeDualError::InvalidArgument(
                "Wiener problems live on Z, use a 1-dimensional grid".into(),
            ));
        }
        Ok(WienerProblem {
            l,
            n,
            r,
            grid,
            eps_pd: crate::trig::DEFAULT_EPS_PD,
        })
    }
}

/// The explicit dual witness: `w(0) = 2(L-1)N`, `w(k) = -1` for
/// `N < |k| ≤ LN`, zero otherwise. Its l1 lower bound is exactly 0, which is
/// the positive-definiteness proof.
pub fn witness_w(l: usize, n: usize) -> SymmetricSequence {
    assert!(l >= 2 && n >= 1);
    let mut w = SymmetricSequence::zero(1);
    w.set(MultiIndex::new(vec![0]), 2.0 * ((l - 1) * n) as f64);
    for k in (n + 1)..=(l * n) {
        w.set(MultiIndex::new(vec![k as i64]), -1.0);
    }
    w
}

/// Certified upper bound on K(L,N) with its witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KUpper {
    pub value: f64,
    pub h_star: SymmetricSequence,
    /// How the witness was certified positive definite.
    pub method: PdMethod,
}

/// Solves the truncated dual LP
/// `min h(0)` s.t. `h(k) ≤ -1` on `N < k ≤ LN`, `h(k) ≤ 0` on `LN < k ≤ R`,
/// `ĥ ≥ 0` on the grid, then converts the grid-relaxed optimum into a true
/// upper bound by bumping `h(0)` with the certified deficit of ĥ.
///
/// The result is capped at the explicit witness `w_{L,N}`: both are feasible
/// elements of `P⁺ ∩ S_{L,N}`, so the smaller origin value wins.
pub fn solve_k_upper(p: &WienerProblem) -> Result<KUpper, ConeDualError> {
    let nv = p.r + 1;
    let mut objective = vec![0.0; nv];
    objective[0] = 1.0;
    let mut prog = LinearProgram::minimize(objective);
    for k in (p.n + 1)..=(p.l * p.n) {
        prog.set_bounds(k, f64::NEG_INFINITY, -1.0);
    }
    for k in (p.l * p.n + 1)..=p.r {
        prog.set_bounds(k, f64::NEG_INFINITY, 0.0);
    }
    for x in p.grid.half_points() {
        let mut coeffs = vec![0.0; nv];
        coeffs[0] = 1.0;
        for k in 1..=p.r {
            coeffs[k] = 2.0 * ((k as f64) * x[0]).cos();
        }
        prog.add_row(coeffs, Relation::Ge, 0.0);
    }

    let out = lp::solve(&prog)?;
    if out.status != LpStatus::Optimal {
        return Err(ConeDualError::Soundness(format!(
            "K-dual LP must be feasible and bounded (w_{{L,N}} is feasible), got {:?}",
            out.status
        )));
    }
    let mut h = SymmetricSequence::zero(1);
    for k in 0..=p.r {
        h.set(MultiIndex::new(vec![k as i64]), out.x[k]);
    }

    // Certify on a refined grid; bump h(0) by the deficit, which preserves
    // every feasibility constraint and keeps the bound valid.
    let cert = is_positive_definite(&h, &p.grid.refined(16), p.eps_pd);
    let deficit = (-cert.lower_bound()).max(0.0);
    let mut value = out.objective + deficit;
    let mut method = cert.method;
    let mut h_star = h;
    if deficit > 0.0 {
        h_star.set(MultiIndex::new(vec![0]), h_star.value_at_origin() + deficit);
    }

    let witness_value = (2 * (p.l - 1) * p.n) as f64;
    if value > witness_value {
        value = witness_value;
        h_star = witness_w(p.l, p.n);
        method = PdMethod::L1Bound;
    }
    Ok(KUpper {
        value,
        h_star,
        method,
    })
}

/// `f = u ⋆ ũ` for entrywise-nonnegative `u`: exactly in C ∩ P, no
/// certification needed (f ≥ 0 entrywise and f̂ = |û|² ≥ 0).
pub fn autocorrelation_candidate(u: &[f64]) -> Result<SymmetricSequence, ConeDualError> {
    if u.iter().any(|&v| v < 0.0) {
        return Err(ConeDualError::InvalidArgument(
            "autocorrelation input must be entrywise nonnegative".into(),
        ));
    }
    if u.iter().all(|&v| v == 0.0) {
        return Err(ConeDualError::InvalidArgument(
            "autocorrelation input must not be identically zero".into(),
        ));
    }
    let m = u.len();
    let mut f = SymmetricSequence::zero(1);
    for k in 0..m {
        let v: f64 = (0..m - k).map(|i| u[i] * u[i + k]).sum();
        f.set(MultiIndex::new(vec![k as i64]), v);
    }
    Ok(f)
}

/// `Σ_{|k|≤LN} f / Σ_{|k|≤N} f − 1`; a valid lower bound on C(L,N) for any
/// f ∈ C ∩ P.
pub fn ratio(f: &SymmetricSequence, l: usize, n: usize) -> Result<f64, ConeDualError> {
    let window_sum = |half: usize| -> f64 {
        let mut s = f.value_at_origin();
        for k in 1..=half {
            s += 2.0 * f.value_at(&MultiIndex::new(vec![k as i64]));
        }
        s
    };
    let denom = window_sum(n);
    if denom <= 0.0 {
        return Err(ConeDualError::InvalidArgument(
            "ratio denominator must be positive (nonzero f ∈ C∩P has f(0) > 0)".into(),
        ));
    }
    Ok(window_sum(l * n) / denom - 1.0)
}

/// Certified lower bound on C(L,N) with the best input found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CLower {
    pub value: f64,
    pub u_star: Vec<f64>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_section_max(mut eval: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = eval(d);
        }
    }
    if fc > fd {
        c
    } else {
        d
    }
}

fn ratio_of_u(u: &[f64], l: usize, n: usize) -> f64 {
    match autocorrelation_candidate(u) {
        Ok(f) => ratio(&f, l, n).unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Deterministic start set: delta, Fejér blocks, and combs with every
/// spacing up to N+1. The comb with spacing N+1 and L teeth realizes the
/// classic lower-bound construction (for (2,1) it is u = (1, 0, 1)).
fn start_set(l: usize, n: usize, max_len: usize) -> Vec<Vec<f64>> {
    let mut starts = vec![vec![1.0]];
    for len in [n + 1, l * n + 1, max_len] {
        let len = len.clamp(1, max_len);
        starts.push(vec![1.0; len]);
    }
    for spacing in 1..=(n + 1) {
        for teeth in 2..=l.max(2) {
            let len = (teeth - 1) * spacing + 1;
            if len > max_len {
                continue;
            }
            let mut u = vec![0.0; len];
            for t in 0..teeth {
                u[t * spacing] = 1.0;
            }
            starts.push(u);
        }
    }
    starts
}

/// Multi-start coordinate ascent over nonnegative inputs, maximizing the
/// window-sum ratio. Every evaluated point is exactly feasible, so the
/// returned value is a certified lower bound on C(L,N) regardless of how
/// well the search did.
pub fn search_c_lower(
    p: &WienerProblem,
    budget: usize,
    seed: u64,
) -> Result<CLower, ConeDualError> {
    let max_len = 8 * p.l * p.n;
    let restarts = 16usize;

    let mut best_u = vec![1.0];
    let mut best = ratio_of_u(&best_u, p.l, p.n);
    let consider = |u: &[f64], best: &mut f64, best_u: &mut Vec<f64>| {
        let v = ratio_of_u(u, p.l, p.n);
        if v > *best {
            *best = v;
            *best_u = u.to_vec();
        }
    };

    for u in start_set(p.l, p.n, max_len) {
        consider(&u, &mut best, &mut best_u);
    }

    if budget > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let per_restart = (budget / restarts).max(1);
        for restart in 0..restarts {
            // Half the restarts polish the best start-set point, half start
            // from random nonnegative vectors.
            let mut u: Vec<f64> = if restart % 2 == 0 {
                let mut u = best_u.clone();
                u.resize(max_len, 0.0);
                u
            } else {
                (0..max_len).map(|_| rng.gen::<f64>()).collect()
            };
            let mut steps = 0usize;
            'ascent: loop {
                for i in 0..u.len() {
                    let ui = golden_section_max(
                        |v| {
                            let mut cand = u.clone();
                            cand[i] = v;
                            ratio_of_u(&cand, p.l, p.n)
                        },
                        0.0,
                        1.0,
                        24,
                    );
                    let mut cand = u.clone();
                    cand[i] = ui;
                    if ratio_of_u(&cand, p.l, p.n) > ratio_of_u(&u, p.l, p.n) {
                        u = cand;
                    }
                    steps += 1;
                    if steps >= per_restart {
                        break 'ascent;
                    }
                }
            }
            // Normalize: the ratio is scale-invariant and max entry 1 keeps
            // the line-search interval meaningful.
            let peak = u.iter().cloned().fold(0.0f64, f64::max);
            if peak > 0.0 {
                for v in u.iter_mut() {
                    *v /= peak;
                }
            }
            consider(&u, &mut best, &mut best_u);
        }
    }

    Ok(CLower {
        value: best,
        u_star: best_u,
    })
}

/// One refinement level of a Wiener bracket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WienerLevel {
    pub r: usize,
    pub grid_points: usize,
    pub upper: f64,
}

/// Certified two-sided bracket `lower ≤ C(L,N) = K(L,N) ≤ upper`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WienerBracket {
    pub l: usize,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub u_star: Vec<f64>,
    pub h_star: SymmetricSequence,
    pub witness_baseline: f64,
    pub trace: Vec<WienerLevel>,
}

/// Runs the dual LP over a schedule of (R, G) pairs and the primal search
/// once, then asserts the Theorem-2 sandwich.
pub fn run_wiener_bracket(
    l: usize,
    n: usize,
    schedule: &[(usize, usize)],
    budget: usize,
    seed: u64,
    eps_pd: f64,
) -> Result<WienerBracket, ConeDualError> {
    if schedule.is_empty() {
        return Err(ConeDualError::InvalidArgument("empty (R, G) schedule".into()));
    }
    let mut trace = Vec::new();
    let mut upper = f64::INFINITY;
    let mut h_star = witness_w(l, n);
    for &(r, g) in schedule {
        let mut p = WienerProblem::new(l, n, r, TorusGrid::new(1, g)?)?;
        p.eps_pd = eps_pd;
        let k = solve_k_upper(&p)?;
        if k.value < upper {
            upper = k.value;
            h_star = k.h_star.clone();
        }
        trace.push(WienerLevel {
            r,
            grid_points: g,
            upper: k.value,
        });
    }

    let &(r_last, g_last) = schedule.last().unwrap();
    let mut p = WienerProblem::new(l, n, r_last, TorusGrid::new(1, g_last)?)?;
    p.eps_pd = eps_pd;
    let lower = search_c_lower(&p, budget, seed)?;

    let tol = eps_pd + 1e-7;
    if lower.value > upper + tol {
        return Err(ConeDualError::Soundness(format!(
            "sandwich violated: certified lower {} exceeds certified upper {}",
            lower.value, upper
        )));
    }
    Ok(WienerBracket {
        l,
        n,
        lower: lower.value,
        upper,
        u_star: lower.u_star,
        h_star,
        witness_baseline: (2 * (l - 1) * n) as f64,
        trace,
    })
}

/// Independent recheck that a dual witness is feasible for `S_{L,N}` and
/// its transform is nonnegative on the given grid.
pub fn recheck_k_witness(h: &SymmetricSequence, p: &WienerProblem) -> bool {
    for k in (p.n + 1)..=(p.l * p.n) {
        if h.value_at(&MultiIndex::new(vec![k as i64])) > -1.0 + 1e-9 {
            return false;
        }
    }
    for k in (p.l * p.n + 1)..=p.r {
        if h.value_at(&MultiIndex::new(vec![k as i64])) > 1e-9 {
            return false;
        }
    }
    is_positive_definite(h, &p.grid.refined(16), p.eps_pd).is_certified()
        || p.grid
            .refined(16)
            .half_points()
            .iter()
            .all(|x| fourier_eval(h, x) >= -p.eps_pd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig::{l1_lower_bound, DEFAULT_EPS_PD};

    fn problem(l: usize, n: usize, r: usize, g: usize) -> WienerProblem {
        WienerProblem::new(l, n, r, TorusGrid::new(1, g).unwrap()).unwrap()
    }

    #[test]
    fn witness_shapes() {
        let w = witness_w(2, 1);
        assert_eq!(w.value_at_origin(), 2.0);
        assert_eq!(w.value_at(&MultiIndex::new(vec![1])), 0.0);
        assert_eq!(w.value_at(&MultiIndex::new(vec![2])), -1.0);

        let w = witness_w(2, 3);
        assert_eq!(w.value_at_origin(), 6.0);
        for k in 4..=6 {
            assert_eq!(w.value_at(&MultiIndex::new(vec![k])), -1.0);
        }
        assert_eq!(w.value_at(&MultiIndex::new(vec![3])), 0.0);
        assert_eq!(w.value_at(&MultiIndex::new(vec![7])), 0.0);

        let w = witness_w(3, 2);
        assert_eq!(w.value_at_origin(), 8.0);
        for k in 3..=6 {
            assert_eq!(w.value_at(&MultiIndex::new(vec![k])), -1.0);
        }
        assert_eq!(l1_lower_bound(&w), 0.0);
    }

    #[test]
    fn k_upper_21_closed_form() {
        let p = problem(2, 1, 2, 256);
        let k = solve_k_upper(&p).unwrap();
        assert!((k.value - 2.0).abs() < 1e-9);
        assert!((k.h_star.value_at_origin() - 2.0).abs() < 1e-9);
        assert!(k.h_star.value_at(&MultiIndex::new(vec![1])).abs() < 1e-9);
        assert!((k.h_star.value_at(&MultiIndex::new(vec![2])) + 1.0).abs() < 1e-9);
        assert!(recheck_k_witness(&k.h_star, &p));
    }

    #[test]
    fn k_upper_dominated_by_witness() {
        for (l, n) in [(2usize, 1usize), (3, 1), (2, 2), (3, 2)] {
            let p = problem(l, n, l * n, 128);
            let k = solve_k_upper(&p).unwrap();
            assert!(k.value <= (2 * (l - 1) * n) as f64 + 1e-9);
            assert!(recheck_k_witness(&k.h_star, &p));
        }
    }

    #[test]
    fn k_upper_monotone_in_r() {
        let coarse = solve_k_upper(&problem(2, 1, 2, 512)).unwrap();
        let fine = solve_k_upper(&problem(2, 1, 8, 512)).unwrap();
        assert!(fine.value <= coarse.value + 1e-9);
    }

    #[test]
    fn autocorrelation_examples() {
        let f = autocorrelation_candidate(&[1.0]).unwrap();
        assert_eq!(f, SymmetricSequence::delta(1));

        let f = autocorrelation_candidate(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.value_at_origin(), 2.0);
        assert_eq!(f.value_at(&MultiIndex::new(vec![1])), 0.0);
        assert_eq!(f.value_at(&MultiIndex::new(vec![2])), 1.0);

        let f = autocorrelation_candidate(&[1.0, 1.0]).unwrap();
        assert_eq!(f.value_at_origin(), 2.0);
        assert_eq!(f.value_at(&MultiIndex::new(vec![1])), 1.0);

        assert!(autocorrelation_candidate(&[0.0, 0.0]).is_err());
        assert!(autocorrelation_candidate(&[1.0, -0.1]).is_err());
    }

    #[test]
    fn ratio_examples() {
        let delta = SymmetricSequence::delta(1);
        assert_eq!(ratio(&delta, 2, 1).unwrap(), 0.0);

        let f = autocorrelation_candidate(&[1.0, 0.0, 1.0]).unwrap();
        assert!((ratio(&f, 2, 1).unwrap() - 1.0).abs() < 1e-15);

        let f = autocorrelation_candidate(&[1.0, 1.0]).unwrap();
        assert!(ratio(&f, 2, 1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn search_start_set_guarantee() {
        let p = problem(2, 1, 2, 64);
        let s = search_c_lower(&p, 0, 0).unwrap();
        assert!(s.value >= 1.0 - 1e-12);
    }

    #[test]
    fn search_is_deterministic() {
        let p = problem(2, 1, 4, 64);
        let a = search_c_lower(&p, 200, 7).unwrap();
        let b = search_c_lower(&p, 200, 7).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.u_star, b.u_star);
    }

    #[test]
    fn bracket_21() {
        let bracket =
            run_wiener_bracket(2, 1, &[(2, 64), (4, 256)], 200, 0, DEFAULT_EPS_PD).unwrap();
        assert!(bracket.lower >= 1.0 - 1e-12);
        assert!(bracket.upper <= 2.0 + 1e-9);
        assert!(bracket.lower <= bracket.upper + 1e-7);
        // Bracket width nonincreasing along the trace on the upper side.
        for w in bracket.trace.windows(2) {
            assert!(w[1].upper <= w[0].upper + 1e-9);
        }
    }
}
