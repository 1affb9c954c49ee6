//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves `max c·x  s.t.  A x = b,  x ≥ l` where a lower bound of
//! `-∞` marks a free variable. Dual values are read off the reduced costs of
//! the artificial columns, which are kept (but barred from entering) in
//! phase two.

use crate::error::{Error, Result};

/// Primal feasibility tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const OPTIMALITY_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower_bounds: Vec<f64>,
}

impl LinearProgram {
    /// All variables default to `x ≥ 0`.
    pub fn new(objective: Vec<f64>, constraints: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        if constraints.len() != rhs.len() {
            return Err(Error::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                constraints.len(),
                rhs.len()
            )));
        }
        if let Some((i, row)) = constraints.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "constraint row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&objective) || !finite(&rhs) || !constraints.iter().all(|r| finite(r)) {
            return Err(Error::Domain("linear program data must be finite".into()));
        }
        Ok(Self {
            lower_bounds: vec![0.0; n],
            objective,
            constraints,
            rhs,
        })
    }

    /// Per-variable lower bounds; `f64::NEG_INFINITY` makes a variable free.
    pub fn with_lower_bounds(mut self, lower: Vec<f64>) -> Result<Self> {
        if lower.len() != self.objective.len() {
            return Err(Error::Dimension("lower bound vector length".into()));
        }
        if lower.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::Domain("lower bounds must be finite or -inf".into()));
        }
        self.lower_bounds = lower;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `primal` (meaningful when optimal).
    pub value: f64,
    pub primal: Vec<f64>,
    /// Multipliers for the equality rows: `c − Aᵀy ≤ 0` on free-to-grow columns.
    pub dual: Vec<f64>,
    /// For infeasible problems: `y` with `yᵀA ≥ 0` and `yᵀb' < 0`, where `b'` is the
    /// right-hand side after shifting finite lower bounds to zero.
    pub farkas: Option<Vec<f64>>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Borrow the solution if optimal, else a solver diagnostic.
    pub fn optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            s => Err(Error::Solver(format!(
                "linear program ended with status {s:?} after {} pivots",
                self.iterations
            ))),
        }
    }
}

struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    removed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for (x, &pv) in row.iter_mut().zip(prow.iter()) {
                *x -= f * pv;
                if x.abs() < 1e-15 {
                    *x = 0.0;
                }
            }
            row[c] = 0.0;
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (x, &pv) in self.obj.iter_mut().zip(prow.iter()) {
                *x -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs Bland's rule with entering candidates `0..allowed`.
    fn optimize(&mut self, allowed: usize) -> LpStatus {
        let rc = self.rhs_col();
        loop {
            if self.pivots >= MAX_PIVOTS {
                return LpStatus::IterationLimit;
            }
            let Some(col) = (0..allowed).find(|&j| self.obj[j] > OPTIMALITY_TOL) else {
                return LpStatus::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if self.removed[i] {
                    continue;
                }
                let a = self.at(i, col);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.at(i, rc).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12 * br.abs().max(1.0)
                            || (ratio <= br + 1e-12 * br.abs().max(1.0)
                                && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return LpStatus::Unbounded,
                Some((r, _)) => self.pivot(r, col),
            }
        }
    }
}

/// Solves the linear program; never panics on well-formed input.
pub fn lp_solve(p: &LinearProgram) -> LpSolution {
    let m = p.num_constraints();
    let n = p.num_vars();

    // Map user variables onto nonnegative internal columns.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut ncols = 0;
    for &l in &p.lower_bounds {
        if l == f64::NEG_INFINITY {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        } else {
            col_of.push((ncols, None));
            ncols += 1;
        }
    }
    let mut shifted_rhs = p.rhs.clone();
    for (j, &l) in p.lower_bounds.iter().enumerate() {
        if l.is_finite() && l != 0.0 {
            for (i, row) in p.constraints.iter().enumerate() {
                shifted_rhs[i] -= row[j] * l;
            }
        }
    }
    let mut cost = vec![0.0; ncols];
    for (j, &(pos, neg)) in col_of.iter().enumerate() {
        cost[pos] = p.objective[j];
        if let Some(k) = neg {
            cost[k] = -p.objective[j];
        }
    }

    let width = ncols + m + 1;
    let mut data = vec![0.0; m * width];
    let mut sign = vec![1.0; m];
    for i in 0..m {
        if shifted_rhs[i] < 0.0 {
            sign[i] = -1.0;
        }
        let row = &mut data[i * width..(i + 1) * width];
        for (j, &(pos, neg)) in col_of.iter().enumerate() {
            let a = sign[i] * p.constraints[i][j];
            row[pos] = a;
            if let Some(k) = neg {
                row[k] = -a;
            }
        }
        row[ncols + i] = 1.0;
        row[width - 1] = sign[i] * shifted_rhs[i];
    }

    // Phase one: maximize −Σ artificials.
    let mut obj = vec![0.0; width];
    for i in 0..m {
        for j in 0..ncols {
            obj[j] += data[i * width + j];
        }
        obj[width - 1] += data[i * width + width - 1];
    }
    let mut t = Tableau {
        m,
        width,
        data,
        obj,
        basis: (ncols..ncols + m).collect(),
        removed: vec![false; m],
        pivots: 0,
    };
    let status = t.optimize(ncols + m);
    let bscale = shifted_rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    if status == LpStatus::IterationLimit {
        return failed(LpStatus::IterationLimit, n, m, t.pivots);
    }
    // The phase-one objective row carries Σ artificials in its rhs slot.
    let infeasibility = t.obj[width - 1];
    if infeasibility > FEASIBILITY_TOL * bscale {
        // Phase-one reduced costs satisfy d_art = −1 − y.
        let farkas = (0..m)
            .map(|i| sign[i] * (-1.0 - t.obj[ncols + i]))
            .collect();
        let mut sol = failed(LpStatus::Infeasible, n, m, t.pivots);
        sol.farkas = Some(farkas);
        return sol;
    }

    // Drive zero-level artificials out of the basis or drop redundant rows.
    for i in 0..m {
        if t.basis[i] < ncols {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..ncols {
            let a = t.at(i, j).abs();
            if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                best = Some((j, a));
            }
        }
        match best {
            Some((j, _)) => t.pivot(i, j),
            None => {
                t.removed[i] = true;
                t.data[i * width + width - 1] = 0.0;
            }
        }
    }

    // Phase two with the true objective; artificial columns may not enter.
    let mut obj = vec![0.0; width];
    obj[..ncols].copy_from_slice(&cost);
    for i in 0..m {
        let b = t.basis[i];
        let cb = if b < ncols { cost[b] } else { 0.0 };
        if cb == 0.0 {
            continue;
        }
        for j in 0..width {
            obj[j] -= cb * t.at(i, j);
        }
    }
    t.obj = obj;
    let status = t.optimize(ncols);
    if status != LpStatus::Optimal {
        return failed(status, n, m, t.pivots);
    }

    let mut internal = vec![0.0; ncols];
    for i in 0..m {
        if !t.removed[i] && t.basis[i] < ncols {
            internal[t.basis[i]] = t.at(i, width - 1).max(0.0);
        }
    }
    let primal: Vec<f64> = col_of
        .iter()
        .zip(&p.lower_bounds)
        .map(|(&(pos, neg), &l)| {
            let base = if l.is_finite() { l } else { 0.0 };
            base + internal[pos] - neg.map_or(0.0, |k| internal[k])
        })
        .collect();
    let dual = (0..m).map(|i| -sign[i] * t.obj[ncols + i]).collect();
    let value = primal.iter().zip(&p.objective).map(|(x, c)| x * c).sum();
    LpSolution {
        status: LpStatus::Optimal,
        value,
        primal,
        dual,
        farkas: None,
        iterations: t.pivots,
    }
}

fn failed(status: LpStatus, n: usize, m: usize, iterations: usize) -> LpSolution {
    LpSolution {
        status,
        value: f64::NAN,
        primal: vec![f64::NAN; n],
        dual: vec![f64::NAN; m],
        farkas: None,
        iterations,
    }
}

/// Max |Ax − b| over rows.
pub fn primal_residual(p: &LinearProgram, x: &[f64]) -> f64 {
    p.constraints
        .iter()
        .zip(&p.rhs)
        .map(|(row, b)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b).abs())
        .fold(0.0, f64::max)
}

/// Largest violation of dual feasibility `Aᵀy ≥ c` (for `x ≥ l` columns; free
/// columns need equality).
pub fn dual_infeasibility(p: &LinearProgram, y: &[f64]) -> f64 {
    (0..p.num_vars())
        .map(|j| {
            let aty: f64 = p.constraints.iter().zip(y).map(|(r, yi)| r[j] * yi).sum();
            let slack = aty - p.objective[j];
            if p.lower_bounds[j] == f64::NEG_INFINITY {
                slack.abs()
            } else {
                (-slack).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// |c·x − (yᵀb + reduced-cost contribution of finite lower bounds)|.
pub fn duality_gap(p: &LinearProgram, sol: &LpSolution) -> f64 {
    let mut dual_value: f64 = sol.dual.iter().zip(&p.rhs).map(|(y, b)| y * b).sum();
    for j in 0..p.num_vars() {
        let l = p.lower_bounds[j];
        if l.is_finite() && l != 0.0 {
            let aty: f64 = p.constraints.iter().zip(&sol.dual).map(|(r, yi)| r[j] * yi).sum();
            dual_value += (p.objective[j] - aty) * l;
        }
    }
    (sol.value - dual_value).abs()
}
