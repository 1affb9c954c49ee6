//! Hardy's constraint problem on two qubits.
//!
//! Settings 0 and 1 per party, outcomes 0 and 1. The three zero constraints
//! are P(1,1|0,1), P(1,1|1,0) and P(0,0|1,1); the target is P(1,1|0,0).
//! Under local realism the constraints force the target to vanish.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, StateVector, C64};
use crate::quantum::Measurement;

/// Largest target probability compatible with the constraints, (5√5 − 11)/2.
pub const HARDY_CEILING: f64 = 0.090_169_943_749_474_24;

const ACCEPT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyCheck {
    /// P(1,1|0,1), P(1,1|1,0), P(0,0|1,1).
    pub constraints: [f64; 3],
    /// P(1,1|0,0).
    pub target: f64,
}

impl HardyCheck {
    pub fn max_violation(&self) -> f64 {
        self.constraints.iter().fold(0.0, |m, &c| m.max(c))
    }
}

/// Pure two-qubit state with two binary measurements per party.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyStrategy {
    pub state: StateVector,
    /// `[party][setting]`.
    pub measurements: [[Measurement; 2]; 2],
}

impl HardyStrategy {
    pub fn check(&self) -> Result<HardyCheck> {
        hardy_check(&self.state, &self.measurements)
    }
}

fn joint(state: &StateVector, e: &ComplexMatrix, f: &ComplexMatrix) -> Result<f64> {
    Ok(state.expectation(&kron(e, f)?)?.re)
}

/// Born-rule constraint probabilities and target probability.
pub fn hardy_check(state: &StateVector, measurements: &[[Measurement; 2]; 2]) -> Result<HardyCheck> {
    if state.party_dims() != [2, 2] {
        return Err(Error::Dimension(format!(
            "Hardy check needs two qubits, state has dims {:?}",
            state.party_dims()
        )));
    }
    for fam in measurements {
        for m in fam {
            if m.dim() != 2 || m.num_outcomes() != 2 {
                return Err(Error::Dimension("Hardy measurements are binary qubit measurements".into()));
            }
            if !m.is_projective(1e-9) {
                return Err(Error::InvalidStrategy("Hardy measurements must be projective".into()));
            }
        }
    }
    let [a, b] = measurements;
    let p = |x: usize, oa: usize, y: usize, ob: usize| joint(state, a[x].effect(oa), b[y].effect(ob));
    Ok(HardyCheck {
        constraints: [p(0, 1, 1, 1)?, p(1, 1, 0, 1)?, p(1, 0, 1, 0)?],
        target: p(0, 1, 0, 1)?,
    })
}

fn qubit_measurement(one: [f64; 2]) -> Measurement {
    let n = (one[0] * one[0] + one[1] * one[1]).sqrt();
    let u = [one[0] / n, one[1] / n];
    let zero = [-u[1], u[0]];
    let v = |w: [f64; 2]| vec![C64::new(w[0], 0.0), C64::new(w[1], 0.0)];
    Measurement::from_basis(&[v(zero), v(u)]).expect("orthonormal basis")
}

/// ψ = a|11⟩ + b|10⟩ + c|01⟩ with setting 1 computational and setting 0
/// given by (c|1⟩ − a|0⟩) for Alice and (b|1⟩ − a|0⟩) for Bob as outcome 1.
/// The target is a²b²c² / ((a²+c²)(a²+b²)).
fn family_strategy(a: f64, b: f64, c: f64) -> HardyStrategy {
    let state = StateVector::normalized(
        vec![2, 2],
        [0.0, c, b, a].iter().map(|&x| C64::new(x, 0.0)).collect(),
    )
    .expect("nonzero");
    HardyStrategy {
        state,
        measurements: [
            [qubit_measurement([-a, c]), Measurement::computational(2)],
            [qubit_measurement([-a, b]), Measurement::computational(2)],
        ],
    }
}

/// A configuration with target exactly 1/16: b = c = √t and a² = 1 − 2t,
/// where t ∈ (1/4, 3/10) solves 32t³ − 15t² − 2t + 1 = 0.
pub fn hardy_sixteenth() -> HardyStrategy {
    let f = |t: f64| ((32.0 * t - 15.0) * t - 2.0) * t + 1.0;
    let (mut lo, mut hi) = (0.25, 0.3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    family_strategy((1.0 - 2.0 * t).sqrt(), t.sqrt(), t.sqrt())
}

/// Target probability for the state a|11⟩ + b|10⟩ + c|01⟩ (normalized) with
/// its optimal Hardy measurements.
pub fn hardy_state_probability(a: f64, b: f64, c: f64) -> f64 {
    let n = a * a + b * b + c * c;
    let (a2, b2, c2) = (a * a / n, b * b / n, c * c / n);
    a2 * b2 * c2 / ((a2 + c2) * (a2 + b2))
}

// Parameters: Schmidt angle θ and the outcome-1 angle of each setting
// (Alice 0, Alice 1, Bob 0, Bob 1); ψ = cos θ|00⟩ + sin θ|11⟩.
type Params = [f64; 5];

fn amp(theta: f64, ua: [f64; 2], vb: [f64; 2]) -> f64 {
    theta.cos() * ua[0] * vb[0] + theta.sin() * ua[1] * vb[1]
}

fn one(phi: f64) -> [f64; 2] {
    [phi.cos(), phi.sin()]
}

fn zero(phi: f64) -> [f64; 2] {
    [-phi.sin(), phi.cos()]
}

/// Signed amplitudes of the three constraint events.
fn constraint_amps(x: &Params) -> [f64; 3] {
    let [t, a0, a1, b0, b1] = *x;
    [
        amp(t, one(a0), one(b1)),
        amp(t, one(a1), one(b0)),
        amp(t, zero(a1), zero(b1)),
    ]
}

fn target(x: &Params) -> f64 {
    let [t, a0, _, b0, _] = *x;
    amp(t, one(a0), one(b0)).powi(2)
}

fn penalized(x: &Params, mu: f64) -> f64 {
    -target(x) + mu * constraint_amps(x).iter().map(|g| g * g).sum::<f64>()
}

fn nelder_mead(f: impl Fn(&Params) -> f64, x0: Params, scale: f64, iters: usize) -> Params {
    let mut simplex: Vec<(Params, f64)> = Vec::with_capacity(6);
    simplex.push((x0, f(&x0)));
    for k in 0..5 {
        let mut x = x0;
        x[k] += scale;
        simplex.push((x, f(&x)));
    }
    let lerp = |a: &Params, b: &Params, t: f64| -> Params {
        let mut o = [0.0; 5];
        for i in 0..5 {
            o[i] = a[i] + t * (b[i] - a[i]);
        }
        o
    };
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[5].1 - simplex[0].1).abs() < 1e-16 {
            break;
        }
        let mut centroid = [0.0; 5];
        for (x, _) in &simplex[..5] {
            for i in 0..5 {
                centroid[i] += x[i] / 5.0;
            }
        }
        let worst = simplex[5].0;
        let xr = lerp(&centroid, &worst, -1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = lerp(&centroid, &worst, -2.0);
            let fe = f(&xe);
            simplex[5] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[4].1 {
            simplex[5] = (xr, fr);
        } else {
            let xc = if fr < simplex[5].1 {
                lerp(&centroid, &worst, -0.5)
            } else {
                lerp(&centroid, &worst, 0.5)
            };
            let fc = f(&xc);
            if fc < fr.min(simplex[5].1) {
                simplex[5] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = lerp(&best, &s.0, 0.5);
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].0
}

fn jacobian(x: &Params) -> [[f64; 5]; 3] {
    let h = 1e-7;
    let mut j = [[0.0; 5]; 3];
    for k in 0..5 {
        let (mut xp, mut xm) = (*x, *x);
        xp[k] += h;
        xm[k] -= h;
        let (gp, gm) = (constraint_amps(&xp), constraint_amps(&xm));
        for i in 0..3 {
            j[i][k] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    j
}

/// Solves the 3×3 system `m z = r` by Gaussian elimination with pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-14 {
            return None;
        }
        m.swap(c, p);
        r.swap(c, p);
        for row in c + 1..3 {
            let f = m[row][c] / m[c][c];
            for k in c..3 {
                m[row][k] -= f * m[c][k];
            }
            r[row] -= f * r[c];
        }
    }
    let mut z = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| m[c][k] * z[k]).sum();
        z[c] = (r[c] - s) / m[c][c];
    }
    Some(z)
}

/// Jᵀ (J Jᵀ)⁻¹ v.
fn min_norm(j: &[[f64; 5]; 3], v: [f64; 3]) -> Option<Params> {
    let mut jjt = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            jjt[a][b] = (0..5).map(|k| j[a][k] * j[b][k]).sum();
        }
    }
    let z = solve3(jjt, v)?;
    let mut out = [0.0; 5];
    for k in 0..5 {
        out[k] = (0..3).map(|i| j[i][k] * z[i]).sum();
    }
    Some(out)
}

/// Newton steps onto {constraint amplitudes = 0}.
fn project(mut x: Params) -> Option<Params> {
    for _ in 0..60 {
        let g = constraint_amps(&x);
        if g.iter().all(|v| v.abs() < 1e-14) {
            return Some(x);
        }
        let step = min_norm(&jacobian(&x), g)?;
        for k in 0..5 {
            x[k] -= step[k];
        }
    }
    let g = constraint_amps(&x);
    g.iter().all(|v| v.abs() < 1e-12).then_some(x)
}

/// Gradient ascent of the target along the constraint manifold.
fn tangent_ascent(mut x: Params) -> Params {
    let mut eta = 0.1;
    let mut fx = target(&x);
    for _ in 0..2000 {
        let h = 1e-7;
        let mut grad = [0.0; 5];
        for k in 0..5 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            grad[k] = (target(&xp) - target(&xm)) / (2.0 * h);
        }
        let j = jacobian(&x);
        let jg = [0, 1, 2].map(|i| (0..5).map(|k| j[i][k] * grad[k]).sum::<f64>());
        let Some(corr) = min_norm(&j, jg) else { break };
        let mut dir = [0.0; 5];
        for k in 0..5 {
            dir[k] = grad[k] - corr[k];
        }
        if dir.iter().map(|d| d * d).sum::<f64>().sqrt() < 1e-13 {
            break;
        }
        let mut moved = false;
        while eta > 1e-12 {
            let mut y = x;
            for k in 0..5 {
                y[k] += eta * dir[k];
            }
            if let Some(y) = project(y) {
                let fy = target(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    eta *= 2.0;
                    moved = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

fn params_strategy(x: &Params) -> HardyStrategy {
    let [t, a0, a1, b0, b1] = *x;
    let (c, s) = (t.cos(), t.sin());
    let state = StateVector::normalized(
        vec![2, 2],
        [c, 0.0, 0.0, s].iter().map(|&v| C64::new(v, 0.0)).collect(),
    )
    .expect("unit vector");
    HardyStrategy {
        state,
        measurements: [
            [qubit_measurement(one(a0)), qubit_measurement(one(a1))],
            [qubit_measurement(one(b0)), qubit_measurement(one(b1))],
        ],
    }
}

#[derive(Debug, Clone)]
pub struct HardyOptimum {
    pub probability: f64,
    pub strategy: HardyStrategy,
    pub check: HardyCheck,
    /// Restarts whose refined point satisfied the constraints.
    pub accepted: usize,
}

/// Best target probability over `restarts` seeded random starts, each
/// refined by penalized Nelder–Mead (μ = 10 … 10⁴), Newton projection onto
/// the constraint set and projected gradient ascent. A point is accepted
/// only if all three constraints are ≤ 1e-9. The incumbent starts at the
/// 1/16 configuration.
pub fn hardy_optimize(seed: u64, restarts: usize) -> Result<HardyOptimum> {
    let start = hardy_sixteenth();
    let check = start.check()?;
    let mut best = HardyOptimum {
        probability: check.target,
        strategy: start,
        check,
        accepted: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let mut x: Params = [
            rng.random_range(0.0..FRAC_PI_2),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..PI),
        ];
        for mu in [10.0, 100.0, 1e3, 1e4] {
            x = nelder_mead(|p| penalized(p, mu), x, 0.2, 4000);
        }
        let Some(x) = project(x) else { continue };
        let x = tangent_ascent(x);
        let strategy = params_strategy(&x);
        let check = strategy.check()?;
        if check.max_violation() > ACCEPT_TOL {
            continue;
        }
        best.accepted += 1;
        if check.target > best.probability {
            best.probability = check.target;
            best.strategy = strategy;
            best.check = check;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteenth_configuration() {
        let c = hardy_sixteenth().check().unwrap();
        assert!(c.max_violation() < 1e-12);
        assert!((c.target - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn ceiling_constant() {
        assert!((HARDY_CEILING - (5.0 * 5f64.sqrt() - 11.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_restarts_returns_sixteenth() {
        let r = hardy_optimize(0, 0).unwrap();
        assert!((r.probability - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn family_formula_matches_born_rule() {
        let (a, b, c) = (0.6, 0.5, 0.4);
        let n = (a * a + b * b + c * c) as f64;
        let s = family_strategy(a / n.sqrt(), b / n.sqrt(), c / n.sqrt());
        let chk = s.check().unwrap();
        assert!(chk.max_violation() < 1e-15);
        assert!((chk.target - hardy_state_probability(a, b, c)).abs() < 1e-14);
    }
}
