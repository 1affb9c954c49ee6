//! Explicit quantum strategies: Born-rule behaviors, winning probabilities,
//! game operators and see-saw refinement.
//!
//! Outcome index 0 of a dichotomic observable is its +1 eigenspace.

mod canonical;
mod seesaw;

pub use canonical::{
    chsh_strategy, ghz_strategy, magic_square_identities, magic_square_observables,
    magic_square_strategy, MagicSquareIdentities,
};
pub use seesaw::{random_strategy, seesaw_refine, SeesawOptions, SeesawResult};

use crate::error::{Error, Result};
use crate::game::{Behavior, Game, Scenario};
use crate::linalg::{hermitian_eig, kron_all, ComplexMatrix, StateVector, C64};

/// Tolerance for POVM and observable checks.
pub const MEASUREMENT_TOL: f64 = 1e-9;

/// A POVM on one party's space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    effects: Vec<ComplexMatrix>,
}

impl Measurement {
    /// Effects must be PSD and sum to the identity (both within 1e-9).
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidStrategy("measurement without outcomes".into()));
        }
        let d = effects[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in effects.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::Dimension(format!(
                    "effect {k} is {}x{}, expected {d}x{d}",
                    e.rows(),
                    e.cols()
                )));
            }
            let (vals, _) = hermitian_eig(e).map_err(|_| {
                Error::InvalidStrategy(format!("effect {k} is not Hermitian"))
            })?;
            if vals[0] < -MEASUREMENT_TOL {
                return Err(Error::InvalidStrategy(format!(
                    "effect {k} has negative eigenvalue {}",
                    vals[0]
                )));
            }
            sum = &sum + e;
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if defect > MEASUREMENT_TOL {
            return Err(Error::InvalidStrategy(format!(
                "effects sum to identity only within {defect:e}"
            )));
        }
        Ok(Self { effects })
    }

    /// As [`Measurement::new`], additionally requiring orthogonal projectors.
    pub fn projective(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let m = Self::new(effects)?;
        if !m.is_projective(MEASUREMENT_TOL) {
            return Err(Error::InvalidStrategy("effects are not orthogonal projectors".into()));
        }
        Ok(m)
    }

    /// Projectors onto the ±1 eigenspaces; outcome 0 is +1.
    pub fn from_observable(obs: &DichotomicObservable) -> Self {
        let d = obs.matrix.rows();
        let id = ComplexMatrix::identity(d);
        let plus = (&id + &obs.matrix).scale_real(0.5);
        let minus = (&id - &obs.matrix).scale_real(0.5);
        Self {
            effects: vec![plus, minus],
        }
    }

    /// Projectors onto the computational basis states.
    pub fn computational(d: usize) -> Self {
        let effects = (0..d)
            .map(|k| {
                let mut v = vec![0.0; d];
                v[k] = 1.0;
                ComplexMatrix::diagonal(&v)
            })
            .collect();
        Self { effects }
    }

    /// Rank-one projective measurement onto an orthonormal basis.
    pub fn from_basis(basis: &[Vec<C64>]) -> Result<Self> {
        Self::projective(basis.iter().map(|v| ComplexMatrix::outer(v, v)).collect())
    }

    pub(crate) fn from_effects_unchecked(effects: Vec<ComplexMatrix>) -> Self {
        Self { effects }
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, k: usize) -> &ComplexMatrix {
        &self.effects[k]
    }

    pub fn is_projective(&self, tol: f64) -> bool {
        for (i, a) in self.effects.iter().enumerate() {
            if (a * a).max_abs_diff(a) > tol {
                return false;
            }
            for b in &self.effects[i + 1..] {
                if (a * b).max_abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Hermitian operator with A² = I.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomicObservable {
    matrix: ComplexMatrix,
}

impl DichotomicObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || !matrix.is_hermitian(MEASUREMENT_TOL) {
            return Err(Error::InvalidStrategy("observable must be Hermitian".into()));
        }
        let sq = &matrix * &matrix;
        let defect = sq.max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if defect > MEASUREMENT_TOL {
            return Err(Error::InvalidStrategy(format!(
                "observable squares to identity only within {defect:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn measurement(&self) -> Measurement {
        Measurement::from_observable(self)
    }
}

/// Shared pure state plus one measurement per (party, question).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    state: StateVector,
    measurements: Vec<Vec<Measurement>>,
}

impl QuantumStrategy {
    pub fn new(state: StateVector, measurements: Vec<Vec<Measurement>>) -> Result<Self> {
        let dims = state.party_dims();
        if measurements.len() != dims.len() {
            return Err(Error::InvalidStrategy(format!(
                "{} measurement families for {} parties",
                measurements.len(),
                dims.len()
            )));
        }
        for (p, fam) in measurements.iter().enumerate() {
            if fam.is_empty() {
                return Err(Error::InvalidStrategy(format!("party {p} has no measurements")));
            }
            for (x, m) in fam.iter().enumerate() {
                if m.dim() != dims[p] {
                    return Err(Error::Dimension(format!(
                        "party {p} question {x}: measurement on dimension {}, party space has {}",
                        m.dim(),
                        dims[p]
                    )));
                }
            }
        }
        Ok(Self {
            state,
            measurements,
        })
    }

    /// Observables per (party, question), each turned into its ±1 projectors.
    pub fn from_observables(state: StateVector, obs: Vec<Vec<DichotomicObservable>>) -> Result<Self> {
        let ms = obs
            .iter()
            .map(|fam| fam.iter().map(Measurement::from_observable).collect())
            .collect();
        Self::new(state, ms)
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn measurements(&self) -> &[Vec<Measurement>] {
        &self.measurements
    }

    pub fn measurement(&self, party: usize, question: usize) -> &Measurement {
        &self.measurements[party][question]
    }

    pub(crate) fn with_state(&self, state: StateVector) -> Self {
        Self {
            state,
            measurements: self.measurements.clone(),
        }
    }

    pub(crate) fn set_measurement(&mut self, party: usize, question: usize, m: Measurement) {
        self.measurements[party][question] = m;
    }

    /// Checks question and outcome counts against the scenario.
    pub fn check_scenario(&self, scenario: &Scenario) -> Result<()> {
        if scenario.num_parties() != self.measurements.len() {
            return Err(Error::ScenarioMismatch {
                party: scenario.num_parties().min(self.measurements.len()),
                detail: format!(
                    "strategy has {} parties, scenario {}",
                    self.measurements.len(),
                    scenario.num_parties()
                ),
            });
        }
        for (p, (fam, party)) in self.measurements.iter().zip(scenario.parties()).enumerate() {
            if fam.len() != party.num_questions() {
                return Err(Error::ScenarioMismatch {
                    party: p,
                    detail: format!(
                        "{} measurements for {} questions",
                        fam.len(),
                        party.num_questions()
                    ),
                });
            }
            for (x, m) in fam.iter().enumerate() {
                if m.num_outcomes() != party.num_answers() {
                    return Err(Error::ScenarioMismatch {
                        party: p,
                        detail: format!(
                            "question {x}: {} outcomes for {} answers",
                            m.num_outcomes(),
                            party.num_answers()
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Applies `op` to factor `party` of a vector on the tensor product `dims`.
pub(crate) fn apply_local(op: &ComplexMatrix, party: usize, dims: &[usize], psi: &[C64]) -> Vec<C64> {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for o in 0..outer {
        for i in 0..d {
            for j in 0..d {
                let c = op.get(i, j);
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let src = (o * d + j) * inner;
                let dst = (o * d + i) * inner;
                for t in 0..inner {
                    out[dst + t] += c * psi[src + t];
                }
            }
        }
    }
    out
}

/// Tr over all parties but `party` of |φ⟩⟨ψ|.
pub(crate) fn partial_trace_outer(
    phi: &[C64],
    psi: &[C64],
    party: usize,
    dims: &[usize],
) -> ComplexMatrix {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut k = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for o in 0..outer {
                let ri = (o * d + i) * inner;
                let rj = (o * d + j) * inner;
                for t in 0..inner {
                    s += phi[ri + t] * psi[rj + t].conj();
                }
            }
            k.set(i, j, s);
        }
    }
    k
}

/// P(a|q) = ⟨ψ| ⊗_p E^{q_p}_{a_p} |ψ⟩.
pub fn strategy_behavior(s: &QuantumStrategy, scenario: &Scenario) -> Result<Behavior> {
    s.check_scenario(scenario)?;
    let dims = s.state.party_dims().to_vec();
    let psi = s.state.amplitudes();
    let n = dims.len();
    let nq = scenario.num_joint_questions();
    let na = scenario.num_joint_answers();
    let mut probs = vec![0.0; nq * na];
    for q in 0..nq {
        let qt = scenario.question_tuple(q);
        // Depth-first over parties so partial products are shared.
        let mut stack: Vec<(usize, usize, Vec<C64>)> = vec![(0, 0, psi.to_vec())];
        while let Some((p, acc, v)) = stack.pop() {
            if p == n {
                let amp: C64 = psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                probs[q * na + acc] = amp.re;
                continue;
            }
            let m = &s.measurements[p][qt[p]];
            for (a, e) in m.effects.iter().enumerate() {
                let w = apply_local(e, p, &dims, &v);
                stack.push((p + 1, acc * scenario.party(p).num_answers() + a, w));
            }
        }
    }
    Behavior::renormalized(scenario.clone(), probs, 1e-9)
}

/// ω(G; strategy).
pub fn winning_probability(g: &Game, s: &QuantumStrategy) -> Result<f64> {
    g.value(&strategy_behavior(s, g.scenario())?)
}

/// Σ_q π(q) Σ_a V(a,q) ⊗_p E^{q_p}_{a_p}.
pub fn game_operator(g: &Game, s: &QuantumStrategy) -> Result<ComplexMatrix> {
    let sc = g.scenario();
    s.check_scenario(sc)?;
    let dim = s.state.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for q in g.promise() {
        let qt = sc.question_tuple(q);
        let w = g.weight_f64(q);
        for a in 0..sc.num_joint_answers() {
            if !g.wins(q, a) {
                continue;
            }
            let at = sc.answer_tuple(a);
            let factors: Vec<&ComplexMatrix> = at
                .iter()
                .enumerate()
                .map(|(p, &ap)| s.measurements[p][qt[p]].effect(ap))
                .collect();
            let term = kron_all(factors)?;
            out = &out + &term.scale_real(w);
        }
    }
    Ok(out)
}

/// Correlator ⟨ψ| ⊗_p A_p |ψ⟩ for one observable per party.
pub fn observable_correlator(state: &StateVector, obs: &[&ComplexMatrix]) -> Result<f64> {
    let dims = state.party_dims();
    if obs.len() != dims.len() {
        return Err(Error::Dimension("one observable per party required".into()));
    }
    let mut v = state.amplitudes().to_vec();
    for (p, o) in obs.iter().enumerate() {
        if o.rows() != dims[p] || o.cols() != dims[p] {
            return Err(Error::Dimension(format!("observable for party {p} has wrong size")));
        }
        v = apply_local(o, p, dims, &v);
    }
    Ok(state
        .amplitudes()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.conj() * b)
        .sum::<C64>()
        .re)
}
