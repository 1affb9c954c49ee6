//! Bell functionals B(P) = Σ α(a,q) P(a|q), their correlator form, and the
//! affine relation to a game's winning probability.

use crate::classical::{maximize_deterministic, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::game::{Behavior, DeterministicStrategy, Game, Scenario};

/// `Σ_q c_q + Σ_q β_q E_q`, valid for every normalized behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorForm {
    pub constant: f64,
    /// Indexed by joint question.
    pub beta: Vec<f64>,
}

/// ω(G;P) = offset + scale·B(P) for every normalized behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub offset: f64,
    pub scale: f64,
}

impl AffineMap {
    pub fn apply(&self, b: f64) -> f64 {
        self.offset + self.scale * b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    alpha: Vec<f64>,
    correlator: Option<CorrelatorForm>,
    affine_to_game: Option<AffineMap>,
}

const EXPANSION_TOL: f64 = 1e-12;

impl BellFunctional {
    /// `alpha` is indexed `[q * num_joint_answers + a]`.
    pub fn new(scenario: Scenario, alpha: Vec<f64>) -> Result<Self> {
        let len = scenario.num_joint_questions() * scenario.num_joint_answers();
        if alpha.len() != len {
            return Err(Error::Dimension(format!(
                "functional has {} coefficients, scenario needs {len}",
                alpha.len()
            )));
        }
        if let Some(bad) = alpha.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coefficient {bad}")));
        }
        let mut f = Self {
            scenario,
            alpha,
            correlator: None,
            affine_to_game: None,
        };
        f.correlator = f.derive_correlator_form().ok();
        Ok(f)
    }

    /// Expands `constant + Σ β_q E_q` into full coefficients. The constant is
    /// spread over the first joint question's row.
    pub fn from_correlators(scenario: Scenario, beta: Vec<f64>, constant: f64) -> Result<Self> {
        if !scenario.is_binary() {
            return Err(Error::Unsupported(
                "correlator form needs binary answer alphabets".into(),
            ));
        }
        let nq = scenario.num_joint_questions();
        let na = scenario.num_joint_answers();
        if beta.len() != nq {
            return Err(Error::Dimension(format!(
                "beta has {} entries, expected {nq}",
                beta.len()
            )));
        }
        let mut alpha = vec![0.0; nq * na];
        for q in 0..nq {
            for a in 0..na {
                let sign = if scenario.answer_parity(a) == 0 { 1.0 } else { -1.0 };
                alpha[q * na + a] = sign * beta[q] + if q == 0 { constant } else { 0.0 };
            }
        }
        let mut f = Self::new(scenario, alpha)?;
        f.correlator = Some(CorrelatorForm { constant, beta });
        Ok(f)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn coefficient(&self, q: usize, a: usize) -> f64 {
        self.alpha[q * self.scenario.num_joint_answers() + a]
    }

    pub fn correlator(&self) -> Option<&CorrelatorForm> {
        self.correlator.as_ref()
    }

    pub fn affine_to_game(&self) -> Option<AffineMap> {
        self.affine_to_game
    }

    pub fn eval(&self, p: &Behavior) -> Result<f64> {
        eval_functional(self, p)
    }

    /// Fits ω = offset + scale·B on deterministic points and records it after
    /// checking that the relation holds for every normalized behavior.
    pub fn with_game_relation(mut self, game: &Game) -> Result<Self> {
        self.affine_to_game = Some(fit_affine(&self, game)?);
        Ok(self)
    }

    /// Maximum over deterministic behaviors, with a maximizing strategy.
    pub fn local_bound(&self) -> Result<(f64, DeterministicStrategy)> {
        maximize_deterministic(&self.scenario, &self.alpha, DEFAULT_CAP)
    }

    fn derive_correlator_form(&self) -> Result<CorrelatorForm> {
        let sc = &self.scenario;
        if !sc.is_binary() {
            return Err(Error::Unsupported(
                "correlator form needs binary answer alphabets".into(),
            ));
        }
        let na = sc.num_joint_answers();
        let scale = self.alpha.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let mut constant = 0.0;
        let mut beta = Vec::with_capacity(sc.num_joint_questions());
        for q in 0..sc.num_joint_questions() {
            let row = &self.alpha[q * na..(q + 1) * na];
            let even = (0..na).find(|&a| sc.answer_parity(a) == 0).map(|a| row[a]);
            let odd = (0..na).find(|&a| sc.answer_parity(a) == 1).map(|a| row[a]);
            let (even, odd) = (even.unwrap_or(0.0), odd.unwrap_or(0.0));
            for (a, &c) in row.iter().enumerate() {
                let expect = if sc.answer_parity(a) == 0 { even } else { odd };
                if (c - expect).abs() > EXPANSION_TOL * scale {
                    return Err(Error::Unsupported(format!(
                        "joint question {q}: coefficients depend on more than the answer parity"
                    )));
                }
            }
            constant += 0.5 * (even + odd);
            beta.push(0.5 * (even - odd));
        }
        Ok(CorrelatorForm { constant, beta })
    }
}

/// B(P) = Σ_{q,a} α(a,q) P(a|q).
pub fn eval_functional(f: &BellFunctional, p: &Behavior) -> Result<f64> {
    f.scenario.ensure_same(p.scenario())?;
    Ok(f.alpha.iter().zip(p.probs()).map(|(c, x)| c * x).sum())
}

/// α(a,q) = π(q)·V(a,q), so that B(P) = ω(G;P).
pub fn functional_of_game(g: &Game) -> BellFunctional {
    let sc = g.scenario();
    let na = sc.num_joint_answers();
    let mut alpha = vec![0.0; sc.num_joint_questions() * na];
    for q in g.promise() {
        let w = g.weight_f64(q);
        for a in 0..na {
            if g.wins(q, a) {
                alpha[q * na + a] = w;
            }
        }
    }
    let mut f = BellFunctional::new(sc.clone(), alpha).expect("game scenario is consistent");
    f.affine_to_game = Some(AffineMap {
        offset: 0.0,
        scale: 1.0,
    });
    f
}

/// Constant and β of the correlator expansion, or unsupported when the
/// coefficients depend on anything beyond the answer parity.
pub fn correlator_form(f: &BellFunctional) -> Result<CorrelatorForm> {
    match &f.correlator {
        Some(c) => Ok(c.clone()),
        None => f.derive_correlator_form(),
    }
}

/// S = E₀₀ + E₀₁ + E₁₀ − E₁₁ on the two-party binary scenario.
pub fn chsh_functional() -> BellFunctional {
    let sc = Scenario::uniform(2, 2, 2).expect("static scenario");
    BellFunctional::from_correlators(sc, vec![1.0, 1.0, 1.0, -1.0], 0.0)
        .expect("static functional")
}

/// M = XXX − XYY − YXY − YYX with question 0 ↔ X and 1 ↔ Y.
pub fn mermin_functional() -> BellFunctional {
    let sc = Scenario::uniform(3, 2, 2).expect("static scenario");
    let mut beta = vec![0.0; 8];
    beta[0b000] = 1.0;
    beta[0b011] = -1.0;
    beta[0b101] = -1.0;
    beta[0b110] = -1.0;
    BellFunctional::from_correlators(sc, beta, 0.0).expect("static functional")
}

fn fit_affine(f: &BellFunctional, game: &Game) -> Result<AffineMap> {
    let sc = game.scenario();
    sc.ensure_same(&f.scenario)?;
    let omega = functional_of_game(game);
    // Two deterministic points with distinct B fix the affine map.
    let (b_max, s_max) = f.local_bound()?;
    let neg: Vec<f64> = f.alpha.iter().map(|c| -c).collect();
    let (b_min_neg, s_min) = maximize_deterministic(sc, &neg, DEFAULT_CAP)?;
    let b_min = -b_min_neg;
    if (b_max - b_min).abs() <= 1e-12 * b_max.abs().max(1.0) {
        return Err(Error::Unsupported(
            "functional is constant on deterministic points".into(),
        ));
    }
    let w_max = omega.eval(&s_max.behavior(sc)?)?;
    let w_min = omega.eval(&s_min.behavior(sc)?)?;
    let scale = (w_max - w_min) / (b_max - b_min);
    let offset = w_max - scale * b_max;

    // Exact check: per row, π·V − scale·α must be constant in the answer, and
    // those constants must add up to the offset.
    let na = sc.num_joint_answers();
    let mut constants = 0.0;
    for q in 0..sc.num_joint_questions() {
        let d: Vec<f64> = (0..na)
            .map(|a| omega.alpha[q * na + a] - scale * f.alpha[q * na + a])
            .collect();
        if d.iter().any(|x| (x - d[0]).abs() > 1e-12) {
            return Err(Error::Unsupported(format!(
                "game value is not an affine function of the functional (joint question {q})"
            )));
        }
        constants += d[0];
    }
    if (constants - offset).abs() > 1e-12 {
        return Err(Error::Unsupported(
            "game value is not an affine function of the functional".into(),
        ));
    }
    Ok(AffineMap { offset, scale })
}
