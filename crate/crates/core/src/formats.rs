//! JSON file formats for games, behaviors, functionals and strategies.
//!
//! Labels are strings in files and dense indices in memory; every loader
//! resolves labels against the scenario and reports the offending entry.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bell::BellFunctional;
use crate::catalog::{chsh_game, coloring_game, ghz_game, magic_square_game, GraphSpec};
use crate::error::{Error, Result};
use crate::game::{parse_rational, AnswerConstraint, Behavior, Game, Party, Scenario};
use crate::linalg::{ComplexMatrix, StateVector, C64};
use crate::quantum::{DichotomicObservable, Measurement, QuantumStrategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartySpec {
    pub questions: Vec<String>,
    pub answers: Vec<String>,
    #[serde(default)]
    pub answer_constraint: Option<AnswerConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub q: Vec<String>,
    pub w: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpec {
    pub q: Vec<String>,
    pub a: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PredicateSpec {
    Table { wins: Vec<OutcomeSpec> },
    /// Win iff the parity of the answers equals `f` at the joint question.
    Xor { f: Vec<u8> },
    Builtin { name: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parties: Vec<PartySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pi: Vec<WeightSpec>,
    pub predicate: PredicateSpec,
    /// Builtin coloring only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<usize>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn question_index(sc: &Scenario, labels: &[String], what: &str) -> Result<usize> {
    if labels.len() != sc.num_parties() {
        return Err(Error::Parse(format!(
            "{what}: {} question labels for {} parties",
            labels.len(),
            sc.num_parties()
        )));
    }
    let mut t = Vec::with_capacity(labels.len());
    for (p, l) in labels.iter().enumerate() {
        t.push(sc.party(p).question_index(l).ok_or_else(|| {
            Error::Parse(format!("{what}: party {p} has no question {l:?}"))
        })?);
    }
    Ok(sc.joint_question_index(&t))
}

fn answer_index(sc: &Scenario, labels: &[String], what: &str) -> Result<usize> {
    if labels.len() != sc.num_parties() {
        return Err(Error::Parse(format!(
            "{what}: {} answer labels for {} parties",
            labels.len(),
            sc.num_parties()
        )));
    }
    let mut t = Vec::with_capacity(labels.len());
    for (p, l) in labels.iter().enumerate() {
        t.push(sc.party(p).answer_index(l).ok_or_else(|| {
            Error::Parse(format!("{what}: party {p} has no admissible answer {l:?}"))
        })?);
    }
    Ok(sc.joint_answer_index(&t))
}

fn labels_of(sc: &Scenario, q: usize) -> Vec<String> {
    sc.question_tuple(q)
        .iter()
        .enumerate()
        .map(|(p, &x)| sc.party(p).questions()[x].clone())
        .collect()
}

fn answer_labels_of(sc: &Scenario, a: usize) -> Vec<String> {
    sc.answer_tuple(a)
        .iter()
        .enumerate()
        .map(|(p, &x)| sc.party(p).answers()[x].clone())
        .collect()
}

fn parse_weights(sc: &Scenario, entries: &[WeightSpec]) -> Result<Vec<BigRational>> {
    let mut pi = vec![BigRational::zero(); sc.num_joint_questions()];
    let mut set = vec![false; pi.len()];
    for (k, e) in entries.iter().enumerate() {
        let what = format!("pi entry {k} (q={:?})", e.q);
        let q = question_index(sc, &e.q, &what)?;
        if set[q] {
            return Err(Error::Parse(format!("{what}: duplicate joint question")));
        }
        let w = parse_rational(&e.w).map_err(|err| Error::Parse(format!("{what}: {err}")))?;
        if w < BigRational::zero() {
            return Err(Error::InvalidDistribution(format!("{what}: negative weight {:?}", e.w)));
        }
        pi[q] = w;
        set[q] = true;
    }
    Ok(pi)
}

fn builtin(spec: &GameSpec, name: &str) -> Result<Game> {
    match name {
        "chsh" => Ok(chsh_game()),
        "ghz" => Ok(ghz_game()),
        "magic_square" => Ok(magic_square_game()),
        "coloring" => {
            let graph = spec
                .graph
                .as_ref()
                .ok_or_else(|| Error::Parse("builtin coloring needs a \"graph\"".into()))?;
            let colors = spec
                .colors
                .ok_or_else(|| Error::Parse("builtin coloring needs \"colors\"".into()))?;
            coloring_game(graph, colors, None)
        }
        other => Err(Error::Parse(format!("unknown builtin game {other:?}"))),
    }
}

impl GameSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        parse_json("game file", s)
    }

    fn scenario(&self) -> Result<Scenario> {
        let parties = self
            .parties
            .iter()
            .map(|p| Party::new(p.questions.clone(), p.answers.clone(), p.answer_constraint))
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(parties)
    }

    pub fn build(&self) -> Result<Game> {
        let name = self.name.clone().unwrap_or_else(|| "game".into());
        match &self.predicate {
            PredicateSpec::Builtin { name: b } => {
                let base = builtin(self, b)?;
                let sc = base.scenario().clone();
                if !self.parties.is_empty() {
                    sc.ensure_same(&self.scenario()?)?;
                }
                if self.pi.is_empty() {
                    return Ok(base);
                }
                let pi = parse_weights(&sc, &self.pi)?;
                let na = sc.num_joint_answers();
                let mut wins = base.win_table().to_vec();
                // Restore the predicate on questions outside the builtin promise.
                let fresh = builtin(self, b)?;
                for q in 0..sc.num_joint_questions() {
                    if !fresh.in_promise(q) && !pi[q].is_zero() {
                        return Err(Error::InvalidGame(format!(
                            "builtin {b} defines no predicate at joint question {:?}",
                            labels_of(&sc, q)
                        )));
                    }
                    wins[q * na..(q + 1) * na].copy_from_slice(&fresh.win_table()[q * na..(q + 1) * na]);
                }
                Game::from_table(self.name.clone().unwrap_or_else(|| b.clone()), sc, pi, wins)
            }
            PredicateSpec::Table { wins } => {
                let sc = self.scenario()?;
                let pi = parse_weights(&sc, &self.pi)?;
                let na = sc.num_joint_answers();
                let mut table = vec![false; sc.num_joint_questions() * na];
                for (k, o) in wins.iter().enumerate() {
                    let what = format!("wins entry {k}");
                    let q = question_index(&sc, &o.q, &what)?;
                    let a = answer_index(&sc, &o.a, &what)?;
                    table[q * na + a] = true;
                }
                Game::from_table(name, sc, pi, table)
            }
            PredicateSpec::Xor { f } => {
                let sc = self.scenario()?;
                if !sc.is_binary() {
                    return Err(Error::InvalidGame("xor predicate needs binary answers".into()));
                }
                if f.len() != sc.num_joint_questions() {
                    return Err(Error::InvalidGame(format!(
                        "xor table has {} entries, expected {}",
                        f.len(),
                        sc.num_joint_questions()
                    )));
                }
                if let Some(bad) = f.iter().find(|&&v| v > 1) {
                    return Err(Error::InvalidGame(format!("xor table entry {bad} is not 0 or 1")));
                }
                let pi = parse_weights(&sc, &self.pi)?;
                let idx = sc.clone();
                let f = f.clone();
                Game::new(name, sc, pi, move |q, a| {
                    (a.iter().sum::<usize>() & 1) as u8 == f[idx.joint_question_index(q)]
                })
            }
        }
    }
}

/// Game as a self-contained table-predicate spec.
pub fn game_to_spec(g: &Game) -> GameSpec {
    let sc = g.scenario();
    let parties = sc
        .parties()
        .iter()
        .map(|p| PartySpec {
            questions: p.questions().to_vec(),
            answers: p.answers().to_vec(),
            answer_constraint: None,
        })
        .collect();
    let pi = g
        .promise()
        .map(|q| WeightSpec {
            q: labels_of(sc, q),
            w: g.weight(q).to_string(),
        })
        .collect();
    let mut wins = Vec::new();
    for q in g.promise() {
        for a in 0..sc.num_joint_answers() {
            if g.wins(q, a) {
                wins.push(OutcomeSpec {
                    q: labels_of(sc, q),
                    a: answer_labels_of(sc, a),
                });
            }
        }
    }
    GameSpec {
        name: Some(g.name().to_string()),
        parties,
        pi,
        predicate: PredicateSpec::Table { wins },
        graph: None,
        colors: None,
    }
}

pub fn load_game(s: &str) -> Result<Game> {
    GameSpec::from_json(s)?.build()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRecord {
    pub q: Vec<String>,
    pub a: Vec<String>,
    pub p: f64,
}

pub fn behavior_to_json(b: &Behavior) -> String {
    let sc = b.scenario();
    let mut recs = Vec::new();
    for q in 0..sc.num_joint_questions() {
        for a in 0..sc.num_joint_answers() {
            recs.push(ProbabilityRecord {
                q: labels_of(sc, q),
                a: answer_labels_of(sc, a),
                p: b.prob(q, a),
            });
        }
    }
    serde_json::to_string_pretty(&recs).expect("plain data")
}

/// Missing records are zero; rows must then satisfy the behavior invariants.
pub fn load_behavior(s: &str, scenario: &Scenario) -> Result<Behavior> {
    let recs: Vec<ProbabilityRecord> = parse_json("behavior file", s)?;
    let na = scenario.num_joint_answers();
    let mut probs = vec![0.0; scenario.num_joint_questions() * na];
    for (k, r) in recs.iter().enumerate() {
        let what = format!("behavior record {k}");
        let q = question_index(scenario, &r.q, &what)?;
        let a = answer_index(scenario, &r.a, &what)?;
        probs[q * na + a] = r.p;
    }
    Behavior::new(scenario.clone(), probs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub q: Vec<String>,
    pub a: Vec<String>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRecord {
    pub q: Vec<String>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    #[serde(default)]
    pub alpha: Vec<CoefficientRecord>,
    /// Adds constant + Σ β_q E_q on top of `alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<BetaRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

pub fn load_functional(s: &str, scenario: &Scenario) -> Result<BellFunctional> {
    let spec: FunctionalSpec = parse_json("functional file", s)?;
    let na = scenario.num_joint_answers();
    let nq = scenario.num_joint_questions();
    let mut alpha = vec![0.0; nq * na];
    for (k, r) in spec.alpha.iter().enumerate() {
        let what = format!("alpha record {k}");
        let q = question_index(scenario, &r.q, &what)?;
        let a = answer_index(scenario, &r.a, &what)?;
        alpha[q * na + a] += r.c;
    }
    if spec.beta.is_some() || spec.constant.is_some() {
        let mut beta = vec![0.0; nq];
        for (k, r) in spec.beta.iter().flatten().enumerate() {
            let q = question_index(scenario, &r.q, &format!("beta record {k}"))?;
            beta[q] += r.c;
        }
        let corr = BellFunctional::from_correlators(scenario.clone(), beta, spec.constant.unwrap_or(0.0))?;
        alpha.iter_mut().zip(corr.alpha()).for_each(|(x, y)| *x += y);
    }
    BellFunctional::new(scenario.clone(), alpha)
}

pub fn functional_to_json(f: &BellFunctional) -> String {
    let sc = f.scenario();
    let mut alpha = Vec::new();
    for q in 0..sc.num_joint_questions() {
        for a in 0..sc.num_joint_answers() {
            let c = f.coefficient(q, a);
            if c != 0.0 {
                alpha.push(CoefficientRecord {
                    q: labels_of(sc, q),
                    a: answer_labels_of(sc, a),
                    c,
                });
            }
        }
    }
    let spec = FunctionalSpec {
        alpha,
        beta: None,
        constant: None,
    };
    serde_json::to_string_pretty(&spec).expect("plain data")
}

/// Rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementSpec {
    Effects { effects: Vec<MatrixSpec> },
    Observable { observable: MatrixSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub party_dims: Vec<usize>,
    pub state: Vec<[f64; 2]>,
    /// `[party][question]`.
    pub measurements: Vec<Vec<MeasurementSpec>>,
}

fn matrix_of(spec: &MatrixSpec, what: &str) -> Result<ComplexMatrix> {
    let rows = spec.len();
    if rows == 0 || spec.iter().any(|r| r.len() != rows) {
        return Err(Error::Parse(format!("{what}: matrix must be square and nonempty")));
    }
    let data = spec.iter().flatten().map(|z| C64::new(z[0], z[1])).collect();
    ComplexMatrix::new(rows, rows, data)
}

fn spec_of(m: &ComplexMatrix) -> MatrixSpec {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

impl StrategySpec {
    pub fn build(&self) -> Result<QuantumStrategy> {
        let state = StateVector::new(
            self.party_dims.clone(),
            self.state.iter().map(|z| C64::new(z[0], z[1])).collect(),
        )?;
        let mut fams = Vec::with_capacity(self.measurements.len());
        for (p, fam) in self.measurements.iter().enumerate() {
            let mut ms = Vec::with_capacity(fam.len());
            for (x, m) in fam.iter().enumerate() {
                let what = format!("party {p} question {x}");
                let meas = match m {
                    MeasurementSpec::Effects { effects } => Measurement::new(
                        effects
                            .iter()
                            .map(|e| matrix_of(e, &what))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    MeasurementSpec::Observable { observable } => {
                        DichotomicObservable::new(matrix_of(observable, &what)?).map(|o| o.measurement())
                    }
                }
                .map_err(|e| Error::InvalidStrategy(format!("{what}: {e}")))?;
                ms.push(meas);
            }
            fams.push(ms);
        }
        QuantumStrategy::new(state, fams)
    }

    pub fn of(s: &QuantumStrategy) -> Self {
        Self {
            party_dims: s.state().party_dims().to_vec(),
            state: s.state().amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            measurements: s
                .measurements()
                .iter()
                .map(|fam| {
                    fam.iter()
                        .map(|m| MeasurementSpec::Effects {
                            effects: m.effects().iter().map(spec_of).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn load_strategy(s: &str) -> Result<QuantumStrategy> {
    parse_json::<StrategySpec>("strategy file", s)?.build()
}

pub fn strategy_to_json(s: &QuantumStrategy) -> String {
    serde_json::to_string_pretty(&StrategySpec::of(s)).expect("plain data")
}

pub fn load_graph(s: &str) -> Result<GraphSpec> {
    let g: GraphSpec = parse_json("graph file", s)?;
    g.validate()?;
    Ok(g)
}
