//! Operator-splitting (ADMM) solver for small dense SDPs in "moment form":
//! maximize a linear functional of scalar variables that fill the cells of a
//! symmetric matrix, subject to the matrix being positive semidefinite and
//! optional linear relations among the variables.
//!
//! Iteration (scaled form, relaxation α, penalty ρ):
//!   X ← Π_A(Z − U + C/ρ)
//!   X̂ ← αX + (1−α)Z
//!   Z ← Π_PSD(X̂ + U)
//!   U ← U + X̂ − Z

use crate::error::{Error, Result};
use crate::linalg::SymmetricEigen;

/// Largest accepted matrix side.
pub const MAX_SDP_SIZE: usize = 512;

/// Contents of one upper-triangular cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Fixed(f64),
    /// `coef · y[index]`.
    Var { index: usize, coef: f64 },
}

/// `Σ coef·y[index] = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelation {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemidefiniteProgram {
    size: usize,
    num_vars: usize,
    cells: Vec<Cell>,
    objective: Vec<f64>,
    offset: f64,
    relations: Vec<LinearRelation>,
}

#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SemidefiniteProgram {
    /// `cells` lists the upper triangle row by row: (0,0), (0,1), …, (n−1,n−1).
    pub fn new(
        size: usize,
        num_vars: usize,
        cells: Vec<Cell>,
        objective: Vec<f64>,
        offset: f64,
        relations: Vec<LinearRelation>,
    ) -> Result<Self> {
        if size == 0 || size > MAX_SDP_SIZE {
            return Err(Error::Dimension(format!(
                "SDP side {size} outside 1..={MAX_SDP_SIZE}"
            )));
        }
        if cells.len() != size * (size + 1) / 2 {
            return Err(Error::Dimension(format!(
                "{} cells for side {size}",
                cells.len()
            )));
        }
        if objective.len() != num_vars {
            return Err(Error::Dimension("objective length != variable count".into()));
        }
        let mut seen = vec![false; num_vars];
        for c in &cells {
            match *c {
                Cell::Var { index, coef } => {
                    if index >= num_vars {
                        return Err(Error::Dimension(format!("cell references variable {index}")));
                    }
                    if coef == 0.0 || !coef.is_finite() {
                        return Err(Error::Domain("cell coefficient must be nonzero".into()));
                    }
                    seen[index] = true;
                }
                Cell::Fixed(v) if !v.is_finite() => {
                    return Err(Error::Domain("fixed cell must be finite".into()));
                }
                Cell::Fixed(_) => {}
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::Dimension(format!("variable {k} owns no cell")));
        }
        for r in &relations {
            if r.terms.iter().any(|&(k, _)| k >= num_vars) {
                return Err(Error::Dimension("relation references unknown variable".into()));
            }
        }
        Ok(Self {
            size,
            num_vars,
            cells,
            objective,
            offset,
            relations,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[tri_index(self.size, i, j)]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn relations(&self) -> &[LinearRelation] {
        &self.relations
    }

    /// Objective at variable values `y` (including the constant offset).
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(y).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Dense symmetric matrix for variable values `y`.
    pub fn matrix(&self, y: &[f64]) -> Vec<f64> {
        let n = self.size;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = match self.cells[tri_index(n, i, j)] {
                    Cell::Fixed(v) => v,
                    Cell::Var { index, coef } => coef * y[index],
                };
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    /// Largest violation of the linear relations at `y`.
    pub fn relation_residual(&self, y: &[f64]) -> f64 {
        self.relations
            .iter()
            .map(|r| (r.terms.iter().map(|&(k, c)| c * y[k]).sum::<f64>() - r.rhs).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub rho: f64,
    pub relaxation: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 100_000,
            rho: 0.3,
            relaxation: 1.6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Objective (with offset) at the affine-feasible iterate.
    pub value: f64,
    pub vars: Vec<f64>,
    /// Affine-feasible moment matrix, row-major.
    pub gamma: Vec<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// (primal, dual) residual per iteration.
    pub history: Vec<(f64, f64)>,
}

/// Weighted least-squares projector onto the structured affine set.
struct AffineProjector {
    n: usize,
    weights: Vec<f64>,
    // W⁻¹Rᵀ(RW⁻¹Rᵀ)⁺, num_vars × num_relations, row-major.
    correction: Vec<f64>,
    rel_rows: Vec<Vec<(usize, f64)>>,
    rel_rhs: Vec<f64>,
}

impl AffineProjector {
    fn new(p: &SemidefiniteProgram) -> Self {
        let n = p.size;
        let mut weights = vec![0.0; p.num_vars];
        for i in 0..n {
            for j in i..n {
                if let Cell::Var { index, coef } = p.cells[tri_index(n, i, j)] {
                    let mult = if i == j { 1.0 } else { 2.0 };
                    weights[index] += mult * coef * coef;
                }
            }
        }
        let r = p.relations.len();
        let mut correction = vec![0.0; p.num_vars * r];
        if r > 0 {
            // M = R W⁻¹ Rᵀ
            let mut m = vec![0.0; r * r];
            let dense: Vec<Vec<f64>> = p
                .relations
                .iter()
                .map(|rel| {
                    let mut row = vec![0.0; p.num_vars];
                    for &(k, c) in &rel.terms {
                        row[k] += c;
                    }
                    row
                })
                .collect();
            for a in 0..r {
                for b in a..r {
                    let s: f64 = (0..p.num_vars)
                        .map(|k| dense[a][k] * dense[b][k] / weights[k])
                        .sum();
                    m[a * r + b] = s;
                    m[b * r + a] = s;
                }
            }
            let eig = SymmetricEigen::new(&m, r);
            let top = eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let pinv = eig.reconstruct_with(|l| if l.abs() > 1e-11 * top.max(1e-300) { 1.0 / l } else { 0.0 });
            for k in 0..p.num_vars {
                for b in 0..r {
                    let s: f64 = (0..r).map(|a| dense[a][k] * pinv[a * r + b]).sum();
                    correction[k * r + b] = s / weights[k];
                }
            }
        }
        Self {
            n,
            weights,
            correction,
            rel_rows: p.relations.iter().map(|r| r.terms.clone()).collect(),
            rel_rhs: p.relations.iter().map(|r| r.rhs).collect(),
        }
    }

    fn project_vars(&self, p: &SemidefiniteProgram, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; p.num_vars];
        for i in 0..n {
            for j in i..n {
                if let Cell::Var { index, coef } = p.cells[tri_index(n, i, j)] {
                    let mult = if i == j { 1.0 } else { 2.0 };
                    let sym = 0.5 * (v[i * n + j] + v[j * n + i]);
                    y[index] += mult * coef * sym;
                }
            }
        }
        for (yk, w) in y.iter_mut().zip(&self.weights) {
            *yk /= w;
        }
        let r = self.rel_rows.len();
        if r > 0 {
            let defect: Vec<f64> = self
                .rel_rows
                .iter()
                .zip(&self.rel_rhs)
                .map(|(terms, rhs)| terms.iter().map(|&(k, c)| c * y[k]).sum::<f64>() - rhs)
                .collect();
            let snapshot = y.clone();
            for (k, yk) in y.iter_mut().enumerate() {
                let row = &self.correction[k * r..(k + 1) * r];
                *yk = snapshot[k] - row.iter().zip(&defect).map(|(a, d)| a * d).sum::<f64>();
            }
        }
        y
    }
}

/// Projects a symmetric matrix onto the PSD cone (nearest in Frobenius norm).
pub fn psd_project(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::Dimension(format!("{} entries for side {n}", a.len())));
    }
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a[i * n + j] - a[j * n + i]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-10 {
        return Err(Error::Domain(format!("matrix is not symmetric (defect {asym:e})")));
    }
    Ok(SymmetricEigen::new(a, n).reconstruct_with(|l| l.max(0.0)))
}

fn frob(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn frob_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Runs ADMM until both residuals fall below `tol · max(1, ‖X‖_F)` or the
/// iteration budget is spent; a non-converged run returns its last iterate
/// with `converged = false`.
pub fn sdp_solve(p: &SemidefiniteProgram, opts: &SdpOptions) -> SdpSolution {
    let n = p.size;
    let proj = AffineProjector::new(p);
    let rho = opts.rho;
    let alpha = opts.relaxation;

    // C/ρ as a matrix: cell (i,j) of variable k carries c_k·coef/w_k.
    let mut c_over_rho = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            if let Cell::Var { index, coef } = p.cells[tri_index(n, i, j)] {
                let v = p.objective[index] * coef / proj.weights[index] / rho;
                c_over_rho[i * n + j] = v;
                c_over_rho[j * n + i] = v;
            }
        }
    }

    let mut z = vec![0.0; n * n];
    let mut u = vec![0.0; n * n];
    let mut work = vec![0.0; n * n];
    let mut y = vec![0.0; p.num_vars];
    let mut x = p.matrix(&y);
    let mut history = Vec::new();
    let mut converged = false;
    let mut rp = f64::INFINITY;
    let mut rd = f64::INFINITY;
    let mut iterations = 0;

    for it in 0..opts.max_iters {
        iterations = it + 1;
        for k in 0..n * n {
            work[k] = z[k] - u[k] + c_over_rho[k];
        }
        y = proj.project_vars(p, &work);
        x = p.matrix(&y);
        for k in 0..n * n {
            work[k] = alpha * x[k] + (1.0 - alpha) * z[k];
        }
        let xhat = work.clone();
        for k in 0..n * n {
            work[k] = xhat[k] + u[k];
        }
        let z_new = SymmetricEigen::new(&work, n).reconstruct_with(|l| l.max(0.0));
        for k in 0..n * n {
            u[k] += xhat[k] - z_new[k];
        }
        rp = frob_diff(&x, &z_new);
        rd = rho * frob_diff(&z_new, &z);
        z = z_new;
        history.push((rp, rd));
        let scale = frob(&x).max(1.0);
        if rp <= opts.tol * scale && rd <= opts.tol * scale {
            converged = true;
            break;
        }
    }

    let min_eigenvalue = SymmetricEigen::new(&x, n).values.first().copied().unwrap_or(0.0);
    SdpSolution {
        value: p.evaluate(&y),
        vars: y,
        gamma: x,
        primal_residual: rp,
        dual_residual: rd,
        min_eigenvalue,
        iterations,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(obj: f64) -> SemidefiniteProgram {
        SemidefiniteProgram::new(
            2,
            1,
            vec![Cell::Fixed(1.0), Cell::Var { index: 0, coef: 1.0 }, Cell::Fixed(1.0)],
            vec![obj],
            0.0,
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn off_diagonal_capped_by_psd() {
        let s = sdp_solve(&two_by_two(1.0), &SdpOptions::default());
        assert!(s.converged);
        assert!((s.value - 1.0).abs() < 1e-7, "value {}", s.value);
        for g in &s.gamma {
            assert!((g - 1.0).abs() < 1e-6);
        }
        let s = sdp_solve(&two_by_two(2.0), &SdpOptions::default());
        assert!((s.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn linear_relation_respected() {
        // 3x3 with unit diagonal, maximize y0 + y1 subject to y0 - y1 = 0.5.
        let cells = vec![
            Cell::Fixed(1.0),
            Cell::Var { index: 0, coef: 1.0 },
            Cell::Var { index: 1, coef: 1.0 },
            Cell::Fixed(1.0),
            Cell::Var { index: 2, coef: 1.0 },
            Cell::Fixed(1.0),
        ];
        let rel = LinearRelation {
            terms: vec![(0, 1.0), (1, -1.0)],
            rhs: 0.5,
        };
        let p = SemidefiniteProgram::new(3, 3, cells, vec![1.0, 1.0, 0.0], 0.0, vec![rel]).unwrap();
        let s = sdp_solve(&p, &SdpOptions::default());
        assert!(s.converged);
        assert!(p.relation_residual(&s.vars) < 1e-9);
        // Optimum: y0 = 1, y1 = 0.5 with y2 = 0.5 keeps the matrix PSD.
        assert!((s.value - 1.5).abs() < 1e-6, "value {}", s.value);
        assert!(s.min_eigenvalue > -1e-7);
    }

    #[test]
    fn psd_project_behaviour() {
        let id = vec![2.0, 0.5, 0.5, 1.0];
        let out = psd_project(&id, 2).unwrap();
        assert!(out.iter().zip(&id).all(|(a, b)| (a - b).abs() < 1e-12));
        let out = psd_project(&[1.0, 0.0, 0.0, -1.0], 2).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15 && out[3].abs() < 1e-15);
        assert!(psd_project(&[1.0, 2.0, 0.0, 1.0], 2).is_err());
    }

    #[test]
    fn rejects_bad_layout() {
        assert!(SemidefiniteProgram::new(2, 1, vec![Cell::Fixed(1.0)], vec![1.0], 0.0, vec![]).is_err());
        // Variable 1 owns no cell.
        assert!(SemidefiniteProgram::new(
            1,
            2,
            vec![Cell::Var { index: 0, coef: 1.0 }],
            vec![1.0, 0.0],
            0.0,
            vec![]
        )
        .is_err());
    }
}
