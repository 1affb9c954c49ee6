//! See-saw local ascent on explicit strategies.
//!
//! Each round replaces the state by a top eigenvector of the game operator,
//! then updates every projective measurement with everything else fixed.
//! A measurement is improved pairwise: for outcomes k, l with P = E_k + E_l,
//! E_k becomes the projector onto the positive eigenspace of P(K_k − K_l)P
//! and E_l = P − E_k, where K_k is the operator whose trace against E_k gives
//! outcome k's contribution to the value. Every step is non-decreasing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{apply_local, game_operator, partial_trace_outer, winning_probability, Measurement, QuantumStrategy};
use crate::error::{Error, Result};
use crate::game::{Game, Scenario};
use crate::linalg::{hermitian_eig, top_eigenpair, ComplexMatrix, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub iters: usize,
    /// Stop once a full round improves the value by less than this.
    pub tol: f64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            iters: 200,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub strategy: QuantumStrategy,
    pub value: f64,
    pub initial_value: f64,
    /// Value after each round.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const PAIR_SWEEPS: usize = 3;

/// Runs see-saw rounds from `s0`; never returns a worse strategy than `s0`.
pub fn seesaw_refine(g: &Game, s0: &QuantumStrategy, opts: &SeesawOptions) -> Result<SeesawResult> {
    let initial_value = winning_probability(g, s0)?;
    let mut best = s0.clone();
    let mut best_value = initial_value;
    let mut current = s0.clone();
    let mut value = initial_value;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..opts.iters {
        iterations += 1;
        let op = game_operator(g, &current)?;
        let (_, v) = top_eigenpair(&op)?;
        let state = StateVector::normalized(current.state().party_dims().to_vec(), v)?;
        current = current.with_state(state);
        update_measurements(g, &mut current)?;
        let next = winning_probability(g, &current)?;
        history.push(next);
        if next > best_value {
            best = current.clone();
            best_value = next;
        }
        let gain = next - value;
        value = next;
        if gain < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(SeesawResult {
        strategy: best,
        value: best_value,
        initial_value,
        history,
        iterations,
        converged,
    })
}

fn update_measurements(g: &Game, s: &mut QuantumStrategy) -> Result<()> {
    let sc = g.scenario();
    let dims = s.state().party_dims().to_vec();
    for p in 0..dims.len() {
        for x in 0..sc.party(p).num_questions() {
            if !s.measurement(p, x).is_projective(1e-9) {
                continue;
            }
            let ks = local_operators(g, s, p, x);
            let mut effects = s.measurement(p, x).effects().to_vec();
            for _ in 0..PAIR_SWEEPS {
                for k in 0..effects.len() {
                    for l in k + 1..effects.len() {
                        let (ek, el) = resplit(&effects[k], &effects[l], &ks[k], &ks[l])?;
                        effects[k] = ek;
                        effects[l] = el;
                    }
                }
            }
            s.set_measurement(p, x, Measurement::from_effects_unchecked(effects));
        }
    }
    Ok(())
}

/// K_k = Σ π(q) V(a,q) Tr_{−p}[(I_p ⊗ ⊗_{r≠p} E_r) |ψ⟩⟨ψ|] over (q, a) with
/// q_p = x and a_p = k.
fn local_operators(g: &Game, s: &QuantumStrategy, p: usize, x: usize) -> Vec<ComplexMatrix> {
    let sc = g.scenario();
    let dims = s.state().party_dims();
    let psi = s.state().amplitudes();
    let d = dims[p];
    let nk = sc.party(p).num_answers();
    let mut ks = vec![ComplexMatrix::zeros(d, d); nk];
    for q in g.promise() {
        let qt = sc.question_tuple(q);
        if qt[p] != x {
            continue;
        }
        let w = g.weight_f64(q);
        for a in 0..sc.num_joint_answers() {
            if !g.wins(q, a) {
                continue;
            }
            let at = sc.answer_tuple(a);
            let mut phi = psi.to_vec();
            for r in 0..dims.len() {
                if r != p {
                    phi = apply_local(s.measurement(r, qt[r]).effect(at[r]), r, dims, &phi);
                }
            }
            let k = partial_trace_outer(&phi, psi, p, dims);
            ks[at[p]] = &ks[at[p]] + &k.scale_real(w);
        }
    }
    ks.into_iter()
        .map(|k| {
            let h = (&k + &k.adjoint()).scale_real(0.5);
            h
        })
        .collect()
}

fn resplit(
    ek: &ComplexMatrix,
    el: &ComplexMatrix,
    kk: &ComplexMatrix,
    kl: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let p = ek + el;
    let diff = kk - kl;
    let m = &(&p * &diff) * &p;
    let m = (&m + &m.adjoint()).scale_real(0.5);
    let (vals, vecs) = hermitian_eig(&m)?;
    let d = p.rows();
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut new_k = ComplexMatrix::zeros(d, d);
    for (j, &l) in vals.iter().enumerate() {
        if l > 1e-13 * scale.max(1e-300) {
            let v: Vec<C64> = (0..d).map(|r| vecs.get(r, j)).collect();
            new_k = &new_k + &ComplexMatrix::outer(&v, &v);
        }
    }
    // Keep the old split when it already scores at least as well.
    let old = (ek * &diff).trace().re;
    let new = (&new_k * &diff).trace().re;
    if new <= old {
        return Ok((ek.clone(), el.clone()));
    }
    let new_l = &p - &new_k;
    Ok((new_k, new_l))
}

fn random_unitary_columns(d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<C64>>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<C64> = (0..d)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for e in &basis {
                let dot: C64 = e.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            v.iter_mut().for_each(|z| *z /= n);
            basis.push(v);
        }
    }
    Ok(basis)
}

/// Haar-like random pure state and random projective measurements; basis
/// vector i goes to outcome i mod k. Deterministic given `seed`.
pub fn random_strategy(scenario: &Scenario, party_dims: &[usize], seed: u64) -> Result<QuantumStrategy> {
    if party_dims.len() != scenario.num_parties() {
        return Err(Error::Dimension("one dimension per party required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = party_dims.iter().product();
    let amps: Vec<C64> = (0..total)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let state = StateVector::normalized(party_dims.to_vec(), amps)?;
    let mut ms = Vec::with_capacity(party_dims.len());
    for (p, &d) in party_dims.iter().enumerate() {
        let k = scenario.party(p).num_answers();
        let mut fam = Vec::new();
        for _ in 0..scenario.party(p).num_questions() {
            let basis = random_unitary_columns(d, &mut rng)?;
            let mut effects = vec![ComplexMatrix::zeros(d, d); k];
            for (i, v) in basis.iter().enumerate() {
                effects[i % k] = &effects[i % k] + &ComplexMatrix::outer(v, v);
            }
            fam.push(Measurement::from_effects_unchecked(effects));
        }
        ms.push(fam);
    }
    QuantumStrategy::new(state, ms)
}
