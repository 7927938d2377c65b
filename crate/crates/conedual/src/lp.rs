//! Deterministic dense linear-program solver.
//!
//! Two-phase revised simplex with an explicitly maintained basis inverse,
//! Dantzig pricing, and a Bland's-rule fallback that engages after a run of
//! degenerate pivots. Instances produced by the problem builders are small
//! and dense; determinism and auditability matter more than speed here, so
//! there is no presolve and no sparse machinery.

use std::fmt;

use thiserror::Error;

pub const DEFAULT_EPS_FEAS: f64 = 1e-9;
pub const DEFAULT_PIVOT_TOL: f64 = 1e-10;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERACY_TRIP: usize = 50;
/// Pivots between refactorizations of the basis inverse. Rank-one updates
/// drift on ill-conditioned bases; rebuilding B⁻¹ from the basis resets it.
const REFACTOR_PERIOD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable `(lower, upper)`; infinities allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense: Sense::Minimize,
            objective,
            rows: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        let mut lp = Self::minimize(objective);
        lp.sense = Sense::Maximize;
        lp
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.rows.push(Row { coeffs, relation, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::Shape(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Shape(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() {
                return Err(LpError::Shape(format!("row {i} has non-finite rhs")));
            }
        }
        for (i, (l, u)) in self.bounds.iter().enumerate() {
            if l > u {
                return Err(LpError::Shape(format!("variable {i} has empty bound interval")));
            }
        }
        Ok(())
    }

    /// Plain-text fixed-layout dump for external cross-checking.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "MIN",
            Sense::Maximize => "MAX",
        };
        out.push_str(&format!("{sense} vars={} rows={}\n", self.num_vars(), self.rows.len()));
        out.push_str("OBJ ");
        for c in &self.objective {
            out.push_str(&format!("{c:+.17e} "));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str("ROW ");
            for a in &row.coeffs {
                out.push_str(&format!("{a:+.17e} "));
            }
            out.push_str(&format!("{} {:+.17e}\n", row.relation, row.rhs));
        }
        for (i, (l, u)) in self.bounds.iter().enumerate() {
            out.push_str(&format!("BND {i} {l:+.17e} {u:+.17e}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Primal solution in the original variables (empty unless OPTIMAL).
    pub x: Vec<f64>,
    /// Objective value in the original sense (meaningful only when OPTIMAL).
    pub objective: f64,
    /// Dual multipliers for the original rows (sign convention: the dual of
    /// a `>=` row in a minimization is nonnegative).
    pub duals: Vec<f64>,
    /// Max primal constraint/bound violation of the returned solution.
    pub feasibility_residual: f64,
    /// |primal objective - dual objective| at the final basis.
    pub duality_residual: f64,
    pub eps_feas: f64,
    pub pivot_tol: f64,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Shape(String),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

/// Solves with default tolerances.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_with(lp, DEFAULT_EPS_FEAS, DEFAULT_PIVOT_TOL)
}

pub fn solve_with(lp: &LinearProgram, eps_feas: f64, pivot_tol: f64) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let std = Standardized::build(lp)?;
    let mut simplex = Simplex::new(&std, pivot_tol);

    if !simplex.phase_one(eps_feas)? {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: f64::NAN,
            duals: Vec::new(),
            feasibility_residual: f64::NAN,
            duality_residual: f64::NAN,
            eps_feas,
            pivot_tol,
        });
    }
    match simplex.phase_two()? {
        PhaseTwo::Unbounded => Ok(LpOutcome {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: f64::NAN,
            duals: Vec::new(),
            feasibility_residual: f64::NAN,
            duality_residual: f64::NAN,
            eps_feas,
            pivot_tol,
        }),
        PhaseTwo::Optimal => {
            // A fresh inverse for the reported solution, unless so few
            // pivots happened since the last rebuild that drift is nil.
            if simplex.pivots_since_refactor > 8 {
                simplex.refactorize()?;
            }
            // Read the solution off the true rhs; the anti-degeneracy
            // perturbation only steers the pivot path.
            simplex.perturb = vec![0.0; simplex.m];
            let (x, objective, duals, duality_residual) = std.recover(&simplex);
            let feasibility_residual = feasibility_residual(lp, &x);
            let scale = 1.0
                + lp.rows
                    .iter()
                    .map(|r| r.rhs.abs())
                    .fold(0.0f64, f64::max);
            if feasibility_residual > eps_feas * scale {
                return Err(LpError::Numerical(format!(
                    "optimal basis violates primal feasibility: residual {feasibility_residual:.3e}"
                )));
            }
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                x,
                objective,
                duals,
                feasibility_residual,
                duality_residual,
                eps_feas,
                pivot_tol,
            })
        }
    }
}

fn feasibility_residual(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for row in &lp.rows {
        let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, xi)| a * xi).sum();
        let viol = match row.relation {
            Relation::Le => (lhs - row.rhs).max(0.0),
            Relation::Ge => (row.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - row.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    for (&xi, &(l, u)) in x.iter().zip(&lp.bounds) {
        if l.is_finite() {
            worst = worst.max(l - xi);
        }
        if u.is_finite() {
            worst = worst.max(xi - u);
        }
    }
    worst
}

/// How an original variable maps onto standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = shift + x'[col]`.
    Shifted { col: usize, shift: f64 },
    /// `x = shift - x'[col]` (finite upper bound only).
    Negated { col: usize, shift: f64 },
    /// `x = x'[pos] - x'[neg]` (free variable).
    Split { pos: usize, neg: usize },
}

/// min c'x', A x' = b, x' >= 0, with slack and artificial columns appended.
struct Standardized {
    m: usize,
    /// Structural columns, dense, length m each.
    cols: Vec<Vec<f64>>,
    cost: Vec<f64>,
    b: Vec<f64>,
    /// Per standard row: +1 slack, -1 surplus, 0 none (before b-sign fix).
    slack_sign: Vec<f64>,
    /// Per standard row: whether the whole row was negated to make b >= 0.
    row_negated: Vec<bool>,
    /// Original row index for each standard row (None for bound rows).
    orig_row: Vec<Option<usize>>,
    var_map: Vec<VarMap>,
    obj_const: f64,
    sense_sign: f64,
    num_orig_rows: usize,
}

impl Standardized {
    fn build(lp: &LinearProgram) -> Result<Self, LpError> {
        let sense_sign = match lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut var_map = Vec::with_capacity(lp.num_vars());
        let mut cost: Vec<f64> = Vec::new();
        // (column of original var, sign) pairs per standard column.
        let mut col_sources: Vec<(usize, f64)> = Vec::new();
        let mut obj_const = 0.0;
        // Extra rows x' <= u - l for doubly bounded variables.
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();

        for (i, &(l, u)) in lp.bounds.iter().enumerate() {
            let c = sense_sign * lp.objective[i];
            match (l.is_finite(), u.is_finite()) {
                (true, true) => {
                    let col = col_sources.len();
                    col_sources.push((i, 1.0));
                    cost.push(c);
                    obj_const += c * l;
                    var_map.push(VarMap::Shifted { col, shift: l });
                    bound_rows.push((col, u - l));
                }
                (true, false) => {
                    let col = col_sources.len();
                    col_sources.push((i, 1.0));
                    cost.push(c);
                    obj_const += c * l;
                    var_map.push(VarMap::Shifted { col, shift: l });
                }
                (false, true) => {
                    let col = col_sources.len();
                    col_sources.push((i, -1.0));
                    cost.push(-c);
                    obj_const += c * u;
                    var_map.push(VarMap::Negated { col, shift: u });
                }
                (false, false) => {
                    let pos = col_sources.len();
                    col_sources.push((i, 1.0));
                    cost.push(c);
                    let neg = col_sources.len();
                    col_sources.push((i, -1.0));
                    cost.push(-c);
                    var_map.push(VarMap::Split { pos, neg });
                }
            }
        }

        let ns = col_sources.len();
        let m = lp.rows.len() + bound_rows.len();
        let mut cols = vec![vec![0.0; m]; ns];
        let mut b = vec![0.0; m];
        let mut slack_sign = vec![0.0; m];
        let mut row_negated = vec![false; m];
        let mut orig_row = vec![None; m];

        for (r, row) in lp.rows.iter().enumerate() {
            let mut rhs = row.rhs;
            // Substitute shifted/negated variables into the row.
            for (j, &(src, sign)) in col_sources.iter().enumerate() {
                cols[j][r] = sign * row.coeffs[src];
            }
            for (i, vm) in var_map.iter().enumerate() {
                let shift = match vm {
                    VarMap::Shifted { shift, .. } | VarMap::Negated { shift, .. } => *shift,
                    VarMap::Split { .. } => 0.0,
                };
                rhs -= row.coeffs[i] * shift;
            }
            slack_sign[r] = match row.relation {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => 0.0,
            };
            b[r] = rhs;
            orig_row[r] = Some(r);
        }
        for (k, &(col, ub)) in bound_rows.iter().enumerate() {
            let r = lp.rows.len() + k;
            cols[col][r] = 1.0;
            b[r] = ub;
            slack_sign[r] = 1.0;
        }

        // Make b nonnegative by negating rows.
        for r in 0..m {
            if b[r] < 0.0 {
                for col in cols.iter_mut() {
                    col[r] = -col[r];
                }
                b[r] = -b[r];
                slack_sign[r] = -slack_sign[r];
                row_negated[r] = true;
            }
        }

        Ok(Standardized {
            m,
            cols,
            cost,
            b,
            slack_sign,
            row_negated,
            orig_row,
            var_map,
            obj_const,
            sense_sign,
            num_orig_rows: lp.rows.len(),
        })
    }

    fn recover(&self, simplex: &Simplex) -> (Vec<f64>, f64, Vec<f64>, f64) {
        let xs = simplex.standard_solution();
        let x: Vec<f64> = self
            .var_map
            .iter()
            .map(|vm| match *vm {
                VarMap::Shifted { col, shift } => shift + xs[col],
                VarMap::Negated { col, shift } => shift - xs[col],
                VarMap::Split { pos, neg } => xs[pos] - xs[neg],
            })
            .collect();
        let obj_std: f64 = self.cost.iter().zip(&xs).map(|(c, v)| c * v).sum();
        let objective = self.sense_sign * (obj_std + self.obj_const);

        // Duals of the standard rows, mapped back to original rows.
        let y = simplex.duals();
        let mut duals = vec![0.0; self.num_orig_rows];
        let mut dual_obj = 0.0;
        for r in 0..self.m {
            dual_obj += y[r] * self.b[r];
            if let Some(orig) = self.orig_row[r] {
                let sign = if self.row_negated[r] { -1.0 } else { 1.0 };
                duals[orig] = self.sense_sign * sign * y[r];
            }
        }
        let duality_residual = (obj_std - dual_obj).abs();
        (x, objective, duals, duality_residual)
    }
}

enum PhaseTwo {
    Optimal,
    Unbounded,
}

/// Column identifier in the working problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    Structural(usize),
    /// Slack/surplus of a row; coefficient is `slack_sign` after b-fix.
    Slack(usize),
    Artificial(usize),
}

struct Simplex<'a> {
    std: &'a Standardized,
    m: usize,
    pivot_tol: f64,
    /// Row-major m×m basis inverse.
    binv: Vec<f64>,
    basis: Vec<Col>,
    /// Columns eligible for pricing, fixed order for determinism.
    columns: Vec<Col>,
    in_phase_one: bool,
    /// Rows found dependent in phase one keep their artificial pinned.
    blocked_rows: Vec<bool>,
    pivots_since_refactor: usize,
    /// Tiny deterministic right-hand-side offsets used while pivoting so
    /// that ratio tests make strict progress on degenerate bases (many
    /// equality rows with zero rhs otherwise stall for thousands of
    /// pivots). Cleared before the final solution is read off.
    perturb: Vec<f64>,
}

impl<'a> Simplex<'a> {
    fn new(std: &'a Standardized, pivot_tol: f64) -> Self {
        let m = std.m;
        let mut binv = vec![0.0; m * m];
        let mut basis = Vec::with_capacity(m);
        for r in 0..m {
            // Slack with +1 coefficient can start basic; otherwise artificial.
            if std.slack_sign[r] > 0.0 {
                basis.push(Col::Slack(r));
            } else {
                basis.push(Col::Artificial(r));
            }
            binv[r * m + r] = 1.0;
        }
        let mut columns = Vec::new();
        for j in 0..std.cols.len() {
            columns.push(Col::Structural(j));
        }
        for r in 0..m {
            if std.slack_sign[r] != 0.0 {
                columns.push(Col::Slack(r));
            }
        }
        let bscale = 1.0 + std.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let eps = 1e-11 * bscale / m as f64;
        let perturb = (0..m).map(|k| eps * (k + 1) as f64).collect();
        Simplex {
            std,
            m,
            pivot_tol,
            binv,
            basis,
            columns,
            in_phase_one: true,
            blocked_rows: vec![false; m],
            pivots_since_refactor: 0,
            perturb,
        }
    }

    /// Rebuilds the basis inverse from scratch by Gauss-Jordan with partial
    /// pivoting, discarding accumulated rank-one-update error.
    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (i, &col) in self.basis.iter().enumerate() {
            match col {
                Col::Structural(j) => {
                    for r in 0..m {
                        a[r * m + i] = self.std.cols[j][r];
                    }
                }
                Col::Slack(r) => a[r * m + i] = self.std.slack_sign[r],
                Col::Artificial(r) => a[r * m + i] = 1.0,
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        // Only (numerically) exact singularity is fatal; an ill-conditioned
        // basis still inverts usefully here and the primal feasibility check
        // at the end is the actual gatekeeper.
        let scale = a.iter().fold(1.0f64, |acc, &v| acc.max(v.abs()));
        let singular_tol = 64.0 * f64::EPSILON * scale;
        for k in 0..m {
            let mut p = k;
            let mut best = a[k * m + k].abs();
            for r in (k + 1)..m {
                let v = a[r * m + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= singular_tol {
                let mut twins = 0usize;
                for (i, &ci) in self.basis.iter().enumerate() {
                    for &cj in &self.basis[i + 1..] {
                        if ci == cj {
                            twins += 1;
                        }
                    }
                }
                return Err(LpError::Numerical(format!(
                    "singular basis at refactorization (m = {m}, elim col {k}, pivot {best:.3e}, duplicate basis cols: {twins})"
                )));
            }
            if p != k {
                for c in 0..m {
                    a.swap(k * m + c, p * m + c);
                    inv.swap(k * m + c, p * m + c);
                }
            }
            let d = 1.0 / a[k * m + k];
            for c in 0..m {
                a[k * m + c] *= d;
                inv[k * m + c] *= d;
            }
            for r in 0..m {
                if r == k {
                    continue;
                }
                let f = a[r * m + k];
                if f != 0.0 {
                    for c in 0..m {
                        a[r * m + c] -= f * a[k * m + c];
                        inv[r * m + c] -= f * inv[k * m + c];
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn cost_of(&self, col: Col) -> f64 {
        if self.in_phase_one {
            match col {
                Col::Artificial(_) => 1.0,
                _ => 0.0,
            }
        } else {
            match col {
                Col::Structural(j) => self.std.cost[j],
                _ => 0.0,
            }
        }
    }

    fn x_basic(&self) -> Vec<f64> {
        let m = self.m;
        let mut xb = vec![0.0; m];
        for i in 0..m {
            let mut v = 0.0;
            for k in 0..m {
                v += self.binv[i * m + k] * (self.std.b[k] + self.perturb[k]);
            }
            xb[i] = v;
        }
        xb
    }

    /// y = c_B' B⁻¹ for the current phase costs.
    fn dual_vector(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let cb = self.cost_of(self.basis[i]);
            if cb != 0.0 {
                for k in 0..m {
                    y[k] += cb * self.binv[i * m + k];
                }
            }
        }
        y
    }

    /// u = B⁻¹ a_q.
    fn transformed_column(&self, col: Col) -> Vec<f64> {
        let m = self.m;
        match col {
            Col::Slack(r) => {
                let s = self.std.slack_sign[r];
                (0..m).map(|i| s * self.binv[i * m + r]).collect()
            }
            Col::Artificial(r) => (0..m).map(|i| self.binv[i * m + r]).collect(),
            Col::Structural(j) => {
                let a = &self.std.cols[j];
                (0..m)
                    .map(|i| {
                        let mut v = 0.0;
                        for k in 0..m {
                            v += self.binv[i * m + k] * a[k];
                        }
                        v
                    })
                    .collect()
            }
        }
    }

    fn reduced_cost(&self, col: Col, y: &[f64]) -> f64 {
        let c = self.cost_of(col);
        match col {
            Col::Slack(r) => c - y[r] * self.std.slack_sign[r],
            Col::Artificial(r) => c - y[r],
            Col::Structural(j) => {
                let a = &self.std.cols[j];
                c - y.iter().zip(a).map(|(yi, ai)| yi * ai).sum::<f64>()
            }
        }
    }

    fn is_basic(&self, col: Col) -> bool {
        self.basis.contains(&col)
    }

    /// Core loop for the current phase. Returns false iff unbounded.
    fn iterate(&mut self) -> Result<bool, LpError> {
        let dual_tol = 1e-9;
        let iter_cap = 50 * (self.m + self.columns.len()) + 1000;
        let mut degenerate_run = 0usize;
        let mut use_bland = false;

        // Columns that produced no usable pivot at the current basis (in
        // practice the mirror of a basic split half entering on noise-level
        // reduced cost); cleared after every successful pivot.
        let mut banned: Vec<Col> = Vec::new();
        for _ in 0..iter_cap {
            let y = self.dual_vector();
            // Entering column: Dantzig (most negative reduced cost), or the
            // first negative one in fixed column order under Bland's rule.
            let mut entering: Option<(Col, f64)> = None;
            for &col in &self.columns {
                if self.is_basic(col) || banned.contains(&col) {
                    continue;
                }
                let d = self.reduced_cost(col, &y);
                if d < -dual_tol {
                    if use_bland {
                        entering = Some((col, d));
                        break;
                    }
                    match entering {
                        Some((_, best)) if d >= best => {}
                        _ => entering = Some((col, d)),
                    }
                }
            }
            let Some((q, d_q)) = entering else {
                return Ok(true);
            };

            let u = self.transformed_column(q);
            let umax_abs = u.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            // Pivoting on entries at the basis inverse's noise level turns
            // an exactly dependent column into a "new" basis member.
            let pivot_floor = self.pivot_tol.max(1e-8 * umax_abs);
            let xb = self.x_basic();
            // Minimum-ratio test with a lexicographic tie-break on the rows
            // of [x_B | B⁻¹]: deterministic and non-cycling regardless of
            // the entering rule, which matters on the heavily degenerate
            // phase-1 bases (many equality rows with zero right-hand side).
            let mut ratio_min = f64::INFINITY;
            for i in 0..self.m {
                if u[i] > pivot_floor {
                    ratio_min = ratio_min.min(xb[i].max(0.0) / u[i]);
                }
            }
            let leave = if ratio_min.is_finite() {
                let mut tied: Vec<usize> = (0..self.m)
                    .filter(|&i| {
                        u[i] > pivot_floor && xb[i].max(0.0) / u[i] <= ratio_min + 1e-12
                    })
                    .collect();
                let mut k = 0;
                while tied.len() > 1 && k < self.m {
                    let vals: Vec<f64> =
                        tied.iter().map(|&i| self.binv[i * self.m + k] / u[i]).collect();
                    let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                    let keep: Vec<usize> = tied
                        .iter()
                        .zip(&vals)
                        .filter(|(_, &v)| v == vmin)
                        .map(|(&i, _)| i)
                        .collect();
                    tied = keep;
                    k += 1;
                }
                Some((tied[0], ratio_min))
            } else {
                None
            };
            let Some((r, ratio)) = leave else {
                if d_q > -1e-6 {
                    // No usable pivot and a noise-level reduced cost: the
                    // column is dependent on the basis, not a real ray.
                    banned.push(q);
                    continue;
                }
                return Ok(false);
            };

            // Near-zero steps count as degenerate: runs of them mean the
            // vertex is not actually improving and Bland must take over.
            if ratio <= 1e-7 {
                degenerate_run += 1;
                if degenerate_run > DEGENERACY_TRIP {
                    use_bland = true;
                }
            } else {
                degenerate_run = 0;
                use_bland = false;
            }

            self.pivot(r, q, &u)?;
            banned.clear();
            self.pivots_since_refactor += 1;
            if self.pivots_since_refactor >= REFACTOR_PERIOD {
                self.refactorize()?;
            }
        }
        Err(LpError::Numerical(format!(
            "simplex iteration limit {iter_cap} exceeded (phase {}, m = {}, {} columns, {} banned, degenerate run {degenerate_run}, bland {use_bland})",
            if self.in_phase_one { 1 } else { 2 },
            self.m,
            self.columns.len(),
            banned.len(),
        )))
    }

    fn pivot(&mut self, r: usize, q: Col, u: &[f64]) -> Result<(), LpError> {
        let m = self.m;
        let piv = u[r];
        if piv.abs() <= self.pivot_tol {
            return Err(LpError::Numerical("pivot element below tolerance".into()));
        }
        let inv = 1.0 / piv;
        for k in 0..m {
            self.binv[r * m + k] *= inv;
        }
        for i in 0..m {
            if i != r && u[i] != 0.0 {
                let factor = u[i];
                for k in 0..m {
                    self.binv[i * m + k] -= factor * self.binv[r * m + k];
                }
            }
        }
        self.basis[r] = q;
        Ok(())
    }

    /// Returns false iff the problem is infeasible.
    fn phase_one(&mut self, eps_feas: f64) -> Result<bool, LpError> {
        self.in_phase_one = true;
        let needs_phase_one = self.basis.iter().any(|c| matches!(c, Col::Artificial(_)));
        if needs_phase_one {
            if !self.iterate()? {
                return Err(LpError::Numerical(
                    "phase-one objective unbounded below".into(),
                ));
            }
            // Measure infeasibility against the true rhs, not the perturbed
            // one, so the perturbation can never flip a feasible problem to
            // Infeasible.
            let saved = std::mem::replace(&mut self.perturb, vec![0.0; self.m]);
            let xb = self.x_basic();
            self.perturb = saved;
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&xb)
                .filter(|(c, _)| matches!(c, Col::Artificial(_)))
                .map(|(_, v)| v.max(0.0))
                .sum();
            let scale = 1.0 + self.std.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            if infeas > eps_feas * scale {
                return Ok(false);
            }
            self.drive_out_artificials()?;
        }
        Ok(true)
    }

    /// Pivots basic artificials (at value 0) out of the basis where possible;
    /// rows where no replacement column exists are linearly dependent and
    /// keep their artificial pinned at zero.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        // A fresh inverse matters here: with a drifted B⁻¹ a dependent row
        // shows a tiny nonzero u[r] and the pivot corrupts the basis.
        self.refactorize()?;
        for r in 0..self.m {
            if !matches!(self.basis[r], Col::Artificial(_)) {
                continue;
            }
            let mut best: Option<(Col, Vec<f64>, f64)> = None;
            for &col in &self.columns.clone() {
                if self.is_basic(col) {
                    continue;
                }
                let u = self.transformed_column(col);
                let mag = u[r].abs();
                if mag > 1e-7 && best.as_ref().is_none_or(|(_, _, b)| mag > *b) {
                    best = Some((col, u, mag));
                }
            }
            if let Some((col, u, _)) = best {
                self.pivot(r, col, &u)?;
            } else {
                self.blocked_rows[r] = true;
            }
        }
        Ok(())
    }

    fn phase_two(&mut self) -> Result<PhaseTwo, LpError> {
        self.in_phase_one = false;
        if self.iterate()? {
            Ok(PhaseTwo::Optimal)
        } else {
            Ok(PhaseTwo::Unbounded)
        }
    }

    /// Values of the structural standard columns at the current basis.
    fn standard_solution(&self) -> Vec<f64> {
        let xb = self.x_basic();
        let mut xs = vec![0.0; self.std.cols.len()];
        for (i, &col) in self.basis.iter().enumerate() {
            if let Col::Structural(j) = col {
                xs[j] = xb[i].max(0.0);
            }
        }
        xs
    }

    fn duals(&self) -> Vec<f64> {
        self.dual_vector()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_x_subject_to_lower_row() {
        // min x s.t. x >= 1 (as a row, variable free)
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add_row(vec![1.0], Relation::Ge, 1.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.x[0] - 1.0).abs() < 1e-12);
        assert!((out.objective - 1.0).abs() < 1e-12);
        assert!(out.duality_residual < 1e-7);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::minimize(vec![0.0]);
        lp.add_row(vec![1.0], Relation::Ge, 1.0);
        lp.add_row(vec![1.0], Relation::Le, 0.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::minimize(vec![-1.0]);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn maximization_and_upper_bounds() {
        // max 3x + 2y s.t. x + y <= 4, x <= 2, y <= 3, x,y >= 0
        let mut lp = LinearProgram::maximize(vec![3.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Le, 4.0);
        lp.set_bounds(0, 0.0, 2.0);
        lp.set_bounds(1, 0.0, 3.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 10.0).abs() < 1e-10);
        assert!((out.x[0] - 2.0).abs() < 1e-10);
        assert!((out.x[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn equality_rows_and_free_vars() {
        // min x + y s.t. x + 2y = 3, x - y = 0 → x = y = 1
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 2.0], Relation::Eq, 3.0);
        lp.add_row(vec![1.0, -1.0], Relation::Eq, 0.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.x[0] - 1.0).abs() < 1e-10);
        assert!((out.x[1] - 1.0).abs() < 1e-10);
        assert!((out.objective - 2.0).abs() < 1e-10);
    }

    #[test]
    fn negative_upper_bound_variable() {
        // min h0 s.t. h0 + h1 >= 0, h1 <= -1 → h1 = -1, h0 = 1
        let mut lp = LinearProgram::minimize(vec![1.0, 0.0]);
        lp.add_row(vec![1.0, 1.0], Relation::Ge, 0.0);
        lp.set_bounds(1, f64::NEG_INFINITY, -1.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 1.0).abs() < 1e-10);
        assert!((out.x[1] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn duals_price_a_tight_row() {
        // min x s.t. x >= 2: dual of the row must be 1.
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add_row(vec![1.0], Relation::Ge, 2.0);
        let out = solve(&lp).unwrap();
        assert!((out.duals[0] - 1.0).abs() < 1e-9);
        assert!(out.duality_residual < 1e-7);
    }

    #[test]
    fn deterministic_repeat() {
        let mut lp = LinearProgram::minimize(vec![1.0, -2.0, 0.5]);
        lp.add_row(vec![1.0, 1.0, 1.0], Relation::Le, 10.0);
        lp.add_row(vec![-1.0, 2.0, 0.0], Relation::Le, 4.0);
        lp.add_row(vec![0.0, 1.0, -1.0], Relation::Ge, -3.0);
        for v in 0..3 {
            lp.set_bounds(v, 0.0, f64::INFINITY);
        }
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(
            a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn shape_errors_rejected() {
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.add_row(vec![1.0], Relation::Ge, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::Shape(_))));
    }

    #[test]
    fn dump_is_fixed_layout() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add_row(vec![1.0], Relation::Ge, 1.0);
        let d = lp.dump();
        assert!(d.starts_with("MIN vars=1 rows=1"));
        assert!(d.contains(">="));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Many redundant rows through the origin; exercises the Bland fallback path.
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        for k in 0..40 {
            let t = k as f64 * 0.1;
            lp.add_row(vec![1.0 + t, 1.0], Relation::Ge, 0.0);
        }
        lp.add_row(vec![1.0, 1.0], Relation::Ge, 1.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 1.0).abs() < 1e-9);
    }
}
