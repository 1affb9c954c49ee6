//! Scenarios, games, behaviors and the value functional.
//!
//! Labels are strings at the edges; everything inside works on dense
//! indices. Joint questions and joint answers are mixed-radix encoded with
//! party 0 as the most significant digit.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows of a behavior must sum to one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Entries down to `-NEGATIVITY_TOL` are accepted and clamped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-12;
/// Default tolerance for the no-signaling check.
pub const NO_SIGNALING_TOL: f64 = 1e-9;

const MAX_JOINT: usize = 1 << 24;

/// Structural restriction on a party's answer labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerConstraint {
    EvenParity,
    OddParity,
}

impl AnswerConstraint {
    fn admits(self, label: &str) -> Result<bool> {
        let mut parity = 0u8;
        for ch in label.chars() {
            match ch {
                '0' => {}
                '1' => parity ^= 1,
                _ => {
                    return Err(Error::InvalidScenario(format!(
                        "answer label {label:?} is not a bit string but a parity constraint is declared"
                    )))
                }
            }
        }
        Ok(match self {
            AnswerConstraint::EvenParity => parity == 0,
            AnswerConstraint::OddParity => parity == 1,
        })
    }
}

/// One player's question and answer alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Party {
    questions: Vec<String>,
    answers: Vec<String>,
    constraint: Option<AnswerConstraint>,
}

impl Party {
    /// Builds a party. With a constraint, `answers` is the raw bit-string
    /// alphabet and only the admissible labels are kept, in input order.
    pub fn new(
        questions: Vec<String>,
        answers: Vec<String>,
        constraint: Option<AnswerConstraint>,
    ) -> Result<Self> {
        check_labels("question", &questions)?;
        check_labels("answer", &answers)?;
        let answers = match constraint {
            None => answers,
            Some(c) => {
                let mut kept = Vec::new();
                for a in answers {
                    if c.admits(&a)? {
                        kept.push(a);
                    }
                }
                if kept.is_empty() {
                    return Err(Error::InvalidScenario(
                        "answer constraint leaves no admissible answers".into(),
                    ));
                }
                kept
            }
        };
        Ok(Self {
            questions,
            answers,
            constraint,
        })
    }

    /// Party with questions `0..nq` and answers `0..na`, labelled by their index.
    pub fn indexed(num_questions: usize, num_answers: usize) -> Result<Self> {
        Self::new(
            (0..num_questions).map(|i| i.to_string()).collect(),
            (0..num_answers).map(|i| i.to_string()).collect(),
            None,
        )
    }

    pub fn questions(&self) -> &[String] {
        &self.questions
    }

    pub fn answers(&self) -> &[String] {
        &self.answers
    }

    pub fn constraint(&self) -> Option<AnswerConstraint> {
        self.constraint
    }

    pub fn num_questions(&self) -> usize {
        self.questions.len()
    }

    pub fn num_answers(&self) -> usize {
        self.answers.len()
    }

    pub fn question_index(&self, label: &str) -> Option<usize> {
        self.questions.iter().position(|q| q == label)
    }

    pub fn answer_index(&self, label: &str) -> Option<usize> {
        self.answers.iter().position(|a| a == label)
    }
}

fn check_labels(kind: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidScenario(format!("empty {kind} alphabet")));
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::InvalidScenario(format!("duplicate {kind} label {l:?}")));
        }
    }
    Ok(())
}

/// Per-party alphabets plus precomputed joint index tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    parties: Vec<Party>,
    question_tuples: Vec<Vec<usize>>,
    answer_tuples: Vec<Vec<usize>>,
}

fn mixed_radix_tuples(radices: &[usize]) -> Result<Vec<Vec<usize>>> {
    let mut total: usize = 1;
    for &r in radices {
        total = total
            .checked_mul(r)
            .filter(|&t| t <= MAX_JOINT)
            .ok_or_else(|| Error::InvalidScenario("joint alphabet too large".into()))?;
    }
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; radices.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for p in (0..radices.len()).rev() {
            cur[p] += 1;
            if cur[p] < radices[p] {
                break;
            }
            cur[p] = 0;
        }
    }
    Ok(out)
}

impl Scenario {
    pub fn new(parties: Vec<Party>) -> Result<Self> {
        if parties.len() < 2 {
            return Err(Error::InvalidScenario(format!(
                "need at least 2 parties, got {}",
                parties.len()
            )));
        }
        let qr: Vec<usize> = parties.iter().map(Party::num_questions).collect();
        let ar: Vec<usize> = parties.iter().map(Party::num_answers).collect();
        Ok(Self {
            question_tuples: mixed_radix_tuples(&qr)?,
            answer_tuples: mixed_radix_tuples(&ar)?,
            parties,
        })
    }

    /// `n` parties with identical index-labelled alphabets.
    pub fn uniform(num_parties: usize, num_questions: usize, num_answers: usize) -> Result<Self> {
        let parties = (0..num_parties)
            .map(|_| Party::indexed(num_questions, num_answers))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parties)
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn party(&self, p: usize) -> &Party {
        &self.parties[p]
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn num_joint_questions(&self) -> usize {
        self.question_tuples.len()
    }

    pub fn num_joint_answers(&self) -> usize {
        self.answer_tuples.len()
    }

    pub fn question_tuple(&self, q: usize) -> &[usize] {
        &self.question_tuples[q]
    }

    pub fn answer_tuple(&self, a: usize) -> &[usize] {
        &self.answer_tuples[a]
    }

    pub fn joint_question_index(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.parties)
            .fold(0, |acc, (&x, p)| acc * p.num_questions() + x)
    }

    pub fn joint_answer_index(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.parties)
            .fold(0, |acc, (&a, p)| acc * p.num_answers() + a)
    }

    /// True when every party has exactly two answers (bits 0 and 1 by index).
    pub fn is_binary(&self) -> bool {
        self.parties.iter().all(|p| p.num_answers() == 2)
    }

    /// Parity of a joint answer's index bits; only meaningful for binary scenarios.
    pub fn answer_parity(&self, a: usize) -> usize {
        self.answer_tuples[a].iter().sum::<usize>() & 1
    }

    /// Errors with the first party whose alphabets differ.
    pub fn ensure_same(&self, other: &Scenario) -> Result<()> {
        if self.parties.len() != other.parties.len() {
            return Err(Error::ScenarioMismatch {
                party: self.parties.len().min(other.parties.len()),
                detail: format!(
                    "party count {} vs {}",
                    self.parties.len(),
                    other.parties.len()
                ),
            });
        }
        for (i, (a, b)) in self.parties.iter().zip(&other.parties).enumerate() {
            if a.questions != b.questions {
                return Err(Error::ScenarioMismatch {
                    party: i,
                    detail: format!("question alphabet {:?} vs {:?}", a.questions, b.questions),
                });
            }
            if a.answers != b.answers {
                return Err(Error::ScenarioMismatch {
                    party: i,
                    detail: format!("answer alphabet {:?} vs {:?}", a.answers, b.answers),
                });
            }
        }
        Ok(())
    }

    /// Product over parties of the number of deterministic response maps.
    pub fn deterministic_counts(&self) -> Vec<u128> {
        self.parties
            .iter()
            .map(|p| {
                (0..p.num_questions()).fold(1u128, |acc, _| {
                    acc.saturating_mul(p.num_answers() as u128)
                })
            })
            .collect()
    }
}

/// A nonlocal game: scenario, exact input distribution and winning predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    name: String,
    scenario: Scenario,
    pi: Vec<BigRational>,
    pi_f64: Vec<f64>,
    wins: Vec<bool>,
}

impl Game {
    /// Builds a game from a predicate over (joint question tuple, joint answer tuple).
    /// The predicate is only consulted on the promise set.
    pub fn new(
        name: impl Into<String>,
        scenario: Scenario,
        pi: Vec<BigRational>,
        mut predicate: impl FnMut(&[usize], &[usize]) -> bool,
    ) -> Result<Self> {
        let nq = scenario.num_joint_questions();
        let na = scenario.num_joint_answers();
        if pi.len() != nq {
            return Err(Error::InvalidDistribution(format!(
                "expected {nq} weights, got {}",
                pi.len()
            )));
        }
        let mut wins = vec![false; nq * na];
        for q in 0..nq {
            if pi[q].is_zero() {
                continue;
            }
            let qt = scenario.question_tuple(q).to_vec();
            for a in 0..na {
                wins[q * na + a] = predicate(&qt, scenario.answer_tuple(a));
            }
        }
        Self::from_table(name, scenario, pi, wins)
    }

    /// Builds a game from a dense winning table indexed `[q * num_joint_answers + a]`.
    pub fn from_table(
        name: impl Into<String>,
        scenario: Scenario,
        pi: Vec<BigRational>,
        mut wins: Vec<bool>,
    ) -> Result<Self> {
        let nq = scenario.num_joint_questions();
        let na = scenario.num_joint_answers();
        if pi.len() != nq {
            return Err(Error::InvalidDistribution(format!(
                "expected {nq} weights, got {}",
                pi.len()
            )));
        }
        if wins.len() != nq * na {
            return Err(Error::InvalidGame(format!(
                "predicate table has {} entries, expected {}",
                wins.len(),
                nq * na
            )));
        }
        let mut total = BigRational::zero();
        for (q, w) in pi.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative weight {w} at joint question {q}"
                )));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        for (q, w) in pi.iter().enumerate() {
            if w.is_zero() {
                wins[q * na..(q + 1) * na].fill(false);
            }
        }
        let pi_f64 = pi.iter().map(|w| w.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(Self {
            name: name.into(),
            scenario,
            pi,
            pi_f64,
            wins,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn weight(&self, q: usize) -> &BigRational {
        &self.pi[q]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.pi
    }

    pub fn weight_f64(&self, q: usize) -> f64 {
        self.pi_f64[q]
    }

    pub fn wins(&self, q: usize, a: usize) -> bool {
        self.wins[q * self.scenario.num_joint_answers() + a]
    }

    pub fn win_table(&self) -> &[bool] {
        &self.wins
    }

    pub fn in_promise(&self, q: usize) -> bool {
        !self.pi[q].is_zero()
    }

    /// Joint questions with positive weight, ascending.
    pub fn promise(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.pi.len()).filter(move |&q| self.in_promise(q))
    }

    /// Ω(G;P) = Σ_q π(q) Σ_a V(a,q) P(a|q).
    pub fn value(&self, behavior: &Behavior) -> Result<f64> {
        game_value(self, behavior)
    }
}

/// Winning probability of `behavior` in `game`.
pub fn game_value(game: &Game, behavior: &Behavior) -> Result<f64> {
    game.scenario.ensure_same(&behavior.scenario)?;
    let na = game.scenario.num_joint_answers();
    let mut total = 0.0;
    for q in game.promise() {
        let row = behavior.row(q);
        let wins = &game.wins[q * na..(q + 1) * na];
        let s: f64 = row
            .iter()
            .zip(wins)
            .filter(|(_, &w)| w)
            .map(|(p, _)| *p)
            .sum();
        total += game.pi_f64[q] * s;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Conditional distribution P(answers | questions) over a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    probs: Vec<f64>,
}

impl Behavior {
    /// Validates normalization (1e-12) and nonnegativity; small negatives are clamped.
    pub fn new(scenario: Scenario, probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(scenario, probs, NORMALIZATION_TOL, false)
    }

    /// Accepts rows within `tol` of normalized and rescales them exactly.
    /// Used for numerically produced behaviors (Born rule, LP solutions).
    pub fn renormalized(scenario: Scenario, probs: Vec<f64>, tol: f64) -> Result<Self> {
        Self::with_tolerance(scenario, probs, tol, true)
    }

    fn with_tolerance(
        scenario: Scenario,
        mut probs: Vec<f64>,
        tol: f64,
        rescale: bool,
    ) -> Result<Self> {
        let nq = scenario.num_joint_questions();
        let na = scenario.num_joint_answers();
        if probs.len() != nq * na {
            return Err(Error::InvalidBehavior(format!(
                "expected {} entries, got {}",
                nq * na,
                probs.len()
            )));
        }
        let neg_tol = if rescale { tol.max(NEGATIVITY_TOL) } else { NEGATIVITY_TOL };
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -neg_tol {
                return Err(Error::InvalidBehavior(format!(
                    "entry {p} at (q={}, a={}) is not a probability",
                    i / na,
                    i % na
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        for q in 0..nq {
            let row = &mut probs[q * na..(q + 1) * na];
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::InvalidBehavior(format!(
                    "row for joint question {q} sums to {s}"
                )));
            }
            if rescale {
                row.iter_mut().for_each(|p| *p /= s);
            }
        }
        Ok(Self { scenario, probs })
    }

    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let nq = scenario.num_joint_questions();
        let na = scenario.num_joint_answers();
        let mut probs = Vec::with_capacity(nq * na);
        for q in 0..nq {
            for a in 0..na {
                probs.push(f(q, a));
            }
        }
        Self::new(scenario, probs)
    }

    /// Every answer equally likely for every question.
    pub fn uniform(scenario: Scenario) -> Self {
        let n = scenario.num_joint_questions() * scenario.num_joint_answers();
        let p = 1.0 / scenario.num_joint_answers() as f64;
        Self {
            scenario,
            probs: vec![p; n],
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn prob(&self, q: usize, a: usize) -> f64 {
        self.probs[q * self.scenario.num_joint_answers() + a]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row(&self, q: usize) -> &[f64] {
        let na = self.scenario.num_joint_answers();
        &self.probs[q * na..(q + 1) * na]
    }

    /// `t·self + (1−t)·other`.
    pub fn mix(&self, other: &Behavior, t: f64) -> Result<Behavior> {
        self.scenario.ensure_same(&other.scenario)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("mixing weight {t} outside [0,1]")));
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| t * p + (1.0 - t) * q)
            .collect();
        Behavior::renormalized(self.scenario.clone(), probs, 1e-10)
    }

    pub fn max_abs_diff(&self, other: &Behavior) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of any party-removed marginal from its value at that
    /// party's reference question 0.
    pub fn signaling_violation(&self) -> f64 {
        let sc = &self.scenario;
        let nq = sc.num_joint_questions();
        let na = sc.num_joint_answers();
        let mut worst: f64 = 0.0;
        let mut marg = vec![0.0; nq * na];
        for p in 0..sc.num_parties() {
            marg.fill(0.0);
            for q in 0..nq {
                for a in 0..na {
                    let mut at = sc.answer_tuple(a).to_vec();
                    at[p] = 0;
                    let key = sc.joint_answer_index(&at);
                    marg[q * na + key] += self.probs[q * na + a];
                }
            }
            for q in 0..nq {
                let qt = sc.question_tuple(q);
                if qt[p] == 0 {
                    continue;
                }
                let mut rt = qt.to_vec();
                rt[p] = 0;
                let r = sc.joint_question_index(&rt);
                for key in 0..na {
                    if sc.answer_tuple(key)[p] != 0 {
                        continue;
                    }
                    worst = worst.max((marg[q * na + key] - marg[r * na + key]).abs());
                }
            }
        }
        worst
    }

    pub fn is_no_signaling(&self, tol: f64) -> bool {
        self.signaling_violation() <= tol
    }
}

/// One fixed answer per (party, question).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    responses: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(scenario: &Scenario, responses: Vec<Vec<usize>>) -> Result<Self> {
        if responses.len() != scenario.num_parties() {
            return Err(Error::InvalidStrategy(format!(
                "{} response maps for {} parties",
                responses.len(),
                scenario.num_parties()
            )));
        }
        for (p, (map, party)) in responses.iter().zip(scenario.parties()).enumerate() {
            if map.len() != party.num_questions() {
                return Err(Error::InvalidStrategy(format!(
                    "party {p}: response map covers {} of {} questions",
                    map.len(),
                    party.num_questions()
                )));
            }
            if let Some(&bad) = map.iter().find(|&&a| a >= party.num_answers()) {
                return Err(Error::InvalidStrategy(format!(
                    "party {p}: answer index {bad} outside alphabet of size {}",
                    party.num_answers()
                )));
            }
        }
        Ok(Self { responses })
    }

    pub(crate) fn from_raw(responses: Vec<Vec<usize>>) -> Self {
        Self { responses }
    }

    pub fn responses(&self) -> &[Vec<usize>] {
        &self.responses
    }

    pub fn answer(&self, party: usize, question: usize) -> usize {
        self.responses[party][question]
    }

    /// Joint answer index produced on joint question `q`.
    pub fn joint_answer(&self, scenario: &Scenario, q: usize) -> usize {
        let qt = scenario.question_tuple(q);
        let at: Vec<usize> = qt
            .iter()
            .enumerate()
            .map(|(p, &x)| self.responses[p][x])
            .collect();
        scenario.joint_answer_index(&at)
    }

    pub fn behavior(&self, scenario: &Scenario) -> Result<Behavior> {
        behavior_of_deterministic(self, scenario)
    }
}

/// The 0/1 behavior a deterministic strategy induces.
pub fn behavior_of_deterministic(
    s: &DeterministicStrategy,
    scenario: &Scenario,
) -> Result<Behavior> {
    let s = DeterministicStrategy::new(scenario, s.responses.clone())?;
    let nq = scenario.num_joint_questions();
    let na = scenario.num_joint_answers();
    let mut probs = vec![0.0; nq * na];
    for q in 0..nq {
        probs[q * na + s.joint_answer(scenario, q)] = 1.0;
    }
    Behavior::new(scenario.clone(), probs)
}

/// Finite mixture of deterministic strategies (shared randomness).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    components: Vec<(f64, DeterministicStrategy)>,
}

impl LocalModel {
    pub fn new(components: Vec<(f64, DeterministicStrategy)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("local model needs at least one component".into()));
        }
        if let Some((w, _)) = components.iter().find(|(w, _)| !(*w >= 0.0)) {
            return Err(Error::Domain(format!("negative mixture weight {w}")));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("mixture weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, DeterministicStrategy)] {
        &self.components
    }

    pub fn behavior(&self, scenario: &Scenario) -> Result<Behavior> {
        let nq = scenario.num_joint_questions();
        let na = scenario.num_joint_answers();
        let mut probs = vec![0.0; nq * na];
        for (w, s) in &self.components {
            let s = DeterministicStrategy::new(scenario, s.responses.clone())?;
            for q in 0..nq {
                probs[q * na + s.joint_answer(scenario, q)] += w;
            }
        }
        Behavior::renormalized(scenario.clone(), probs, 1e-9)
    }
}

/// Full correlators E_q = Σ_a (−1)^{Σ a_i} P(a|q) for binary scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    scenario: Scenario,
    entries: Vec<f64>,
}

impl CorrelatorTable {
    pub fn new(scenario: Scenario, entries: Vec<f64>) -> Result<Self> {
        if !scenario.is_binary() {
            return Err(Error::Unsupported(
                "correlators need binary answer alphabets".into(),
            ));
        }
        if entries.len() != scenario.num_joint_questions() {
            return Err(Error::Dimension(format!(
                "{} correlators for {} joint questions",
                entries.len(),
                scenario.num_joint_questions()
            )));
        }
        if let Some((q, e)) = entries
            .iter()
            .enumerate()
            .find(|(_, e)| !(e.abs() <= 1.0 + 1e-12))
        {
            return Err(Error::Domain(format!(
                "correlator {e} at joint question {q} outside [-1,1]"
            )));
        }
        Ok(Self { scenario, entries })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, q: usize) -> f64 {
        self.entries[q]
    }
}

pub fn correlators(behavior: &Behavior) -> Result<CorrelatorTable> {
    let sc = behavior.scenario();
    if !sc.is_binary() {
        return Err(Error::Unsupported(
            "correlators need binary answer alphabets".into(),
        ));
    }
    let entries = (0..sc.num_joint_questions())
        .map(|q| {
            behavior
                .row(q)
                .iter()
                .enumerate()
                .map(|(a, p)| if sc.answer_parity(a) == 0 { *p } else { -*p })
                .sum::<f64>()
                .clamp(-1.0, 1.0)
        })
        .collect();
    CorrelatorTable::new(sc.clone(), entries)
}

/// Uniform-marginal reconstruction P(a|q) = (1 + (−1)^{Σa} E_q) / 2^n.
pub fn behavior_from_correlators(table: &CorrelatorTable) -> Result<Behavior> {
    let sc = table.scenario();
    let na = sc.num_joint_answers();
    let norm = na as f64;
    Behavior::from_fn(sc.clone(), |q, a| {
        let sign = if sc.answer_parity(a) == 0 { 1.0 } else { -1.0 };
        (1.0 + sign * table.get(q)).max(0.0) / norm
    })
}

/// Parses `"p/q"`, an integer, or a finite decimal (`"0.25"`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    use num_bigint::BigInt;
    let t = s.trim();
    let bad = || Error::Parse(format!("weight {s:?} is not a rational number"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("weight {s:?} has zero denominator")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Uniform rational distribution over the marked joint questions.
pub fn uniform_over(mask: &[bool]) -> Result<Vec<BigRational>> {
    let k = mask.iter().filter(|&&m| m).count();
    if k == 0 {
        return Err(Error::InvalidDistribution("empty support".into()));
    }
    let w = BigRational::new(1.into(), (k as i64).into());
    Ok(mask
        .iter()
        .map(|&m| if m { w.clone() } else { BigRational::zero() })
        .collect())
}
