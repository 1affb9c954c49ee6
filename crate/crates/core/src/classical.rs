//! Classical value by exhaustive enumeration, no-signaling value by LP, and
//! local-polytope membership with a separating functional.
//!
//! Enumeration runs over response maps of every party but the last, which
//! plays a best response question by question. Strategies are visited in
//! lexicographic order and only strict improvements replace the incumbent,
//! so the witness is the lexicographically first maximizer.

use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bell::BellFunctional;
use crate::error::{Error, Result};
use crate::game::{Behavior, DeterministicStrategy, Game, LocalModel, Scenario};
use crate::solvers::{lp_solve, LinearProgram, LpSolution, LpStatus};

/// Default cap on the number of deterministic strategy tuples.
pub const DEFAULT_CAP: u128 = 100_000_000;
/// Cap on the vertex count for membership LPs.
pub const MEMBERSHIP_CAP: u128 = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalValue {
    pub value: BigRational,
    pub witness: DeterministicStrategy,
}

impl ClassicalValue {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

fn total_count(scenario: &Scenario) -> u128 {
    scenario
        .deterministic_counts()
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(c))
}

fn check_cap(scenario: &Scenario, cap: u128) -> Result<u128> {
    let count = total_count(scenario);
    if count > cap {
        return Err(Error::TooLarge { count, cap });
    }
    Ok(count)
}

/// Mixed-radix odometer over the response maps of parties `0..upto`.
struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let done = radices.contains(&0);
        Self {
            digits: vec![0; radices.len()],
            radices,
            done,
        }
    }

    fn advance(&mut self) {
        for k in (0..self.digits.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.radices[k] {
                return;
            }
            self.digits[k] = 0;
        }
        self.done = true;
    }
}

fn search<T>(scenario: &Scenario, coeff: &[T], cap: u128) -> Result<(T, DeterministicStrategy)>
where
    T: Clone + PartialOrd + Zero + for<'a> Add<&'a T, Output = T>,
{
    check_cap(scenario, cap)?;
    let n = scenario.num_parties();
    let na = scenario.num_joint_answers();
    let last = scenario.party(n - 1);
    let (ny, nb) = (last.num_questions(), last.num_answers());

    // Slot (p, x) for p < n−1, in party-major order.
    let mut slot_of = Vec::new();
    let mut radices = Vec::new();
    for p in 0..n - 1 {
        let party = scenario.party(p);
        slot_of.push(radices.len());
        radices.extend(std::iter::repeat(party.num_answers()).take(party.num_questions()));
    }
    // Joint-answer stride of each party; the last party has stride 1.
    let mut stride = vec![1usize; n];
    for p in (0..n - 1).rev() {
        stride[p] = stride[p + 1] * scenario.party(p + 1).num_answers();
    }

    let nq = scenario.num_joint_questions();
    let mut odo = Odometer::new(radices);
    let mut best: Option<(T, Vec<usize>, Vec<usize>)> = None;
    let mut scores: Vec<T> = vec![T::zero(); ny * nb];
    while !odo.done {
        scores.iter_mut().for_each(|s| *s = T::zero());
        for q in 0..nq {
            let qt = scenario.question_tuple(q);
            let base: usize = (0..n - 1)
                .map(|p| odo.digits[slot_of[p] + qt[p]] * stride[p])
                .sum();
            let y = qt[n - 1];
            let row = &coeff[q * na + base..q * na + base + nb];
            for (b, c) in row.iter().enumerate() {
                let s = std::mem::replace(&mut scores[y * nb + b], T::zero());
                scores[y * nb + b] = s + c;
            }
        }
        let mut total = T::zero();
        let mut response = Vec::with_capacity(ny);
        for y in 0..ny {
            let row = &scores[y * nb..(y + 1) * nb];
            let mut arg = 0;
            for b in 1..nb {
                if row[b] > row[arg] {
                    arg = b;
                }
            }
            total = total + &row[arg];
            response.push(arg);
        }
        if best.as_ref().is_none_or(|(v, _, _)| total > *v) {
            best = Some((total, odo.digits.clone(), response));
        }
        odo.advance();
    }
    let (value, digits, last_map) =
        best.ok_or_else(|| Error::InvalidScenario("no deterministic strategies".into()))?;
    let mut responses = Vec::with_capacity(n);
    for p in 0..n - 1 {
        let k = scenario.party(p).num_questions();
        responses.push(digits[slot_of[p]..slot_of[p] + k].to_vec());
    }
    responses.push(last_map);
    Ok((value, DeterministicStrategy::from_raw(responses)))
}

/// max over deterministic behaviors D of Σ coeff·D, with the lexicographically
/// first maximizer. `coeff` is indexed `[q * num_joint_answers + a]`.
pub fn maximize_deterministic(
    scenario: &Scenario,
    coeff: &[f64],
    cap: u128,
) -> Result<(f64, DeterministicStrategy)> {
    let len = scenario.num_joint_questions() * scenario.num_joint_answers();
    if coeff.len() != len {
        return Err(Error::Dimension(format!(
            "{} coefficients for a scenario with {len} entries",
            coeff.len()
        )));
    }
    search(scenario, coeff, cap)
}

/// Exact classical value with the default enumeration cap.
pub fn classical_value(game: &Game) -> Result<ClassicalValue> {
    classical_value_with_cap(game, DEFAULT_CAP)
}

pub fn classical_value_with_cap(game: &Game, cap: u128) -> Result<ClassicalValue> {
    let sc = game.scenario();
    check_cap(sc, cap)?;
    let na = sc.num_joint_answers();
    // Scale π to integers by the lcm of its denominators.
    let lcm = game
        .weights()
        .iter()
        .fold(BigInt::one(), |l, w| l.lcm(w.denom()));
    let ints: Vec<BigInt> = game
        .weights()
        .iter()
        .map(|w| w.numer() * (&lcm / w.denom()))
        .collect();
    let coeff_big = |q: usize, a: usize| {
        if game.wins(q, a) {
            ints[q].clone()
        } else {
            BigInt::zero()
        }
    };
    let (num, witness) = if let Some(_fits) = lcm.to_i64() {
        let coeff: Vec<i128> = (0..sc.num_joint_questions() * na)
            .map(|k| coeff_big(k / na, k % na).to_i128().unwrap_or(0))
            .collect();
        let (v, w) = search(sc, &coeff, cap)?;
        (BigInt::from(v), w)
    } else {
        let coeff: Vec<BigInt> = (0..sc.num_joint_questions() * na)
            .map(|k| coeff_big(k / na, k % na))
            .collect();
        search(sc, &coeff, cap)?
    };
    Ok(ClassicalValue {
        value: BigRational::new(num, lcm),
        witness,
    })
}

/// Optimal no-signaling behavior and value.
#[derive(Debug, Clone)]
pub struct NsSolution {
    pub value: f64,
    pub behavior: Behavior,
    pub lp: LpSolution,
    pub program: LinearProgram,
}

/// Normalization plus, for each party p, marginals of the other parties at
/// question x_p equal to those at x_p = 0.
pub fn no_signaling_constraints(scenario: &Scenario) -> (Vec<Vec<f64>>, Vec<f64>) {
    let nq = scenario.num_joint_questions();
    let na = scenario.num_joint_answers();
    let n = scenario.num_parties();
    let width = nq * na;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for q in 0..nq {
        let mut row = vec![0.0; width];
        row[q * na..(q + 1) * na].fill(1.0);
        rows.push(row);
        rhs.push(1.0);
    }
    for p in 0..n {
        let p_answers = scenario.party(p).num_answers();
        for q in 0..nq {
            let qt = scenario.question_tuple(q);
            if qt[p] == 0 {
                continue;
            }
            let mut ref_t = qt.to_vec();
            ref_t[p] = 0;
            let r = scenario.joint_question_index(&ref_t);
            // One row per answer tuple of the other parties (a_p = 0 representative).
            for a0 in 0..na {
                if scenario.answer_tuple(a0)[p] != 0 {
                    continue;
                }
                let mut row = vec![0.0; width];
                let mut at = scenario.answer_tuple(a0).to_vec();
                for ap in 0..p_answers {
                    at[p] = ap;
                    let a = scenario.joint_answer_index(&at);
                    row[q * na + a] += 1.0;
                    row[r * na + a] -= 1.0;
                }
                rows.push(row);
                rhs.push(0.0);
            }
        }
    }
    (rows, rhs)
}

pub fn ns_solve(game: &Game) -> Result<NsSolution> {
    let sc = game.scenario();
    let na = sc.num_joint_answers();
    let objective: Vec<f64> = (0..sc.num_joint_questions() * na)
        .map(|k| {
            let (q, a) = (k / na, k % na);
            if game.wins(q, a) {
                game.weight_f64(q)
            } else {
                0.0
            }
        })
        .collect();
    let (rows, rhs) = no_signaling_constraints(sc);
    let program = LinearProgram::new(objective, rows, rhs)?;
    let lp = lp_solve(&program).optimal()?;
    let behavior = Behavior::renormalized(sc.clone(), lp.primal.clone(), 1e-7)?;
    Ok(NsSolution {
        value: lp.value,
        behavior,
        lp,
        program,
    })
}

/// Maximum winning probability over no-signaling behaviors.
pub fn ns_value(game: &Game) -> Result<f64> {
    Ok(ns_solve(game)?.value)
}

#[derive(Debug, Clone)]
pub enum MembershipResult {
    InLocal(LocalModel),
    Separated {
        functional: BellFunctional,
        local_bound: f64,
        behavior_value: f64,
    },
}

impl MembershipResult {
    pub fn is_local(&self) -> bool {
        matches!(self, MembershipResult::InLocal(_))
    }
}

/// Every deterministic strategy of the scenario, in lexicographic order.
pub fn deterministic_strategies(scenario: &Scenario, cap: u128) -> Result<Vec<DeterministicStrategy>> {
    check_cap(scenario, cap)?;
    let n = scenario.num_parties();
    let mut radices = Vec::new();
    for p in 0..n {
        let party = scenario.party(p);
        radices.extend(std::iter::repeat(party.num_answers()).take(party.num_questions()));
    }
    let mut odo = Odometer::new(radices);
    let mut out = Vec::new();
    while !odo.done {
        let mut responses = Vec::with_capacity(n);
        let mut k = 0;
        for p in 0..n {
            let m = scenario.party(p).num_questions();
            responses.push(odo.digits[k..k + m].to_vec());
            k += m;
        }
        out.push(DeterministicStrategy::from_raw(responses));
        odo.advance();
    }
    Ok(out)
}

fn deterministic_vector(scenario: &Scenario, s: &DeterministicStrategy) -> Vec<f64> {
    let na = scenario.num_joint_answers();
    let mut v = vec![0.0; scenario.num_joint_questions() * na];
    for q in 0..scenario.num_joint_questions() {
        v[q * na + s.joint_answer(scenario, q)] = 1.0;
    }
    v
}

const MEMBERSHIP_TOL: f64 = 1e-7;

/// Decides whether `behavior` is a mixture of deterministic behaviors.
///
/// When it is not, the white-noise visibility LP
/// `max v  s.t.  Σ λ_i D_i − v (P − U) = U,  λ, v ≥ 0`
/// supplies through its dual a functional α with α·D_i ≤ α·U − … < α·P. The
/// functional is projected onto the span of {D_i − U} (which fixes it up to
/// scale), scaled to max |α| = 1, and bounded by enumeration.
pub fn local_membership(behavior: &Behavior, scenario: &Scenario) -> Result<MembershipResult> {
    scenario.ensure_same(behavior.scenario())?;
    let vertices = deterministic_strategies(scenario, MEMBERSHIP_CAP)?;
    let dvecs: Vec<Vec<f64>> = vertices
        .iter()
        .map(|s| deterministic_vector(scenario, s))
        .collect();
    let p = behavior.probs();
    let rows = p.len();
    let nv = vertices.len();

    // Primal: Σ λ_i D_i = P.
    let a: Vec<Vec<f64>> = (0..rows)
        .map(|r| dvecs.iter().map(|d| d[r]).collect())
        .collect();
    let primal = lp_solve(&LinearProgram::new(vec![0.0; nv], a.clone(), p.to_vec())?);
    match primal.status {
        LpStatus::Optimal => {
            let comps: Vec<(f64, DeterministicStrategy)> = primal
                .primal
                .iter()
                .zip(&vertices)
                .filter(|(w, _)| **w > 1e-12)
                .map(|(w, s)| (*w, s.clone()))
                .collect();
            let total: f64 = comps.iter().map(|(w, _)| w).sum();
            let comps = comps.into_iter().map(|(w, s)| (w / total, s)).collect();
            let model = LocalModel::new(comps)?;
            let diff = model.behavior(scenario)?.max_abs_diff(behavior);
            if diff > MEMBERSHIP_TOL {
                return Err(Error::Solver(format!(
                    "local decomposition reproduces the behavior only to {diff:e}"
                )));
            }
            return Ok(MembershipResult::InLocal(model));
        }
        LpStatus::Infeasible => {}
        s => {
            return Err(Error::Solver(format!("membership LP ended with status {s:?}")));
        }
    }

    let u = Behavior::uniform(scenario.clone());
    let uvec = u.probs();
    let mut rows_v = a;
    for (r, row) in rows_v.iter_mut().enumerate() {
        row.push(-(p[r] - uvec[r]));
    }
    let mut c = vec![0.0; nv];
    c.push(1.0);
    let vis = lp_solve(&LinearProgram::new(c, rows_v, uvec.to_vec())?).optimal()?;
    let raw: Vec<f64> = vis.dual.iter().map(|y| -y).collect();

    let alpha = project_onto_span(&raw, &dvecs, uvec);
    let scale = alpha.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(scale > 1e-12) {
        return Err(Error::Solver("separating functional vanished after projection".into()));
    }
    let alpha: Vec<f64> = alpha.iter().map(|x| clean(x / scale)).collect();
    let functional = BellFunctional::new(scenario.clone(), alpha)?;
    let (local_bound, _) = functional.local_bound()?;
    let behavior_value = functional.eval(behavior)?;
    if behavior_value <= local_bound + 1e-9 {
        return Err(Error::Solver(format!(
            "separating functional not strict: behavior {behavior_value} vs bound {local_bound}"
        )));
    }
    Ok(MembershipResult::Separated {
        functional,
        local_bound,
        behavior_value,
    })
}

// Rounds values within 1e-12 of a multiple of 1e-9 onto it, so that exact
// coefficients such as ±1 come out exact.
fn clean(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if (x - r).abs() < 1e-12 {
        r
    } else {
        x
    }
}

/// Orthogonal projection of `v` onto span{d − u : d ∈ dvecs}.
fn project_onto_span(v: &[f64], dvecs: &[Vec<f64>], u: &[f64]) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for d in dvecs {
        let mut w: Vec<f64> = d.iter().zip(u).map(|(a, b)| a - b).collect();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for e in &basis {
                let dot: f64 = w.iter().zip(e).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            w.iter_mut().for_each(|x| *x /= norm);
            basis.push(w);
        }
    }
    let mut out = vec![0.0; v.len()];
    for e in &basis {
        let dot: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
        out.iter_mut().zip(e).for_each(|(o, b)| *o += dot * b);
    }
    out
}
