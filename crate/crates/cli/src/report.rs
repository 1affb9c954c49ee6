//! Report documents and their JSON / table renderings.
//!
//! Floats are rounded to 12 decimals before serialization and maps are
//! key-sorted, so identical inputs give byte-identical output.

use std::collections::BTreeMap;

use nonlocal_games::formats::game_to_spec;
use nonlocal_games::Game;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FLOAT_DECIMALS: i32 = 12;

pub fn fixed(x: f64) -> f64 {
    let s = 10f64.powi(FLOAT_DECIMALS);
    let r = (x * s).round() / s;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameId {
    pub name: String,
    /// sha256 of the compact table-predicate game JSON.
    pub sha256: String,
}

impl GameId {
    pub fn of(g: &Game) -> Self {
        let spec = serde_json::to_string(&game_to_spec(g)).expect("plain data");
        Self {
            name: g.name().to_string(),
            sha256: hex::encode(Sha256::digest(spec.as_bytes())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Computation {
    pub kind: String,
    pub method: String,
    /// Exact rational value, when the method is exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub value_float: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Computation {
    pub fn new(kind: &str, method: &str, value_float: f64, tolerance: f64) -> Self {
        Self {
            kind: kind.into(),
            method: method.into(),
            value: None,
            value_float: fixed(value_float),
            tolerance,
            residuals: BTreeMap::new(),
            witness: None,
            details: None,
        }
    }

    pub fn exact(mut self, v: String) -> Self {
        self.value = Some(v);
        self
    }

    pub fn residual(mut self, name: &str, v: f64) -> Self {
        self.residuals.insert(name.into(), fixed(v));
        self
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn details(mut self, d: Value) -> Self {
        self.details = Some(d);
        self
    }
}

/// Output of a single-computation command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameId>,
    #[serde(flatten)]
    pub computation: Computation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub game: GameId,
    pub computations: Vec<Computation>,
    #[serde(default)]
    pub flags: BTreeMap<String, bool>,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    // Round-trip through Value for sorted keys in nested maps.
    let v = serde_json::to_value(v).expect("plain data");
    let mut s = serde_json::to_string_pretty(&v).expect("plain data");
    s.push('\n');
    s
}

/// Six decimals, trailing zeros trimmed down to one.
pub fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// Six decimals rounded upward, for upper bounds.
pub fn short_up(x: f64) -> String {
    short((x * 1e6).ceil() / 1e6)
}

pub fn render_table(rows: &[(String, String, String)]) -> String {
    let header = ("quantity".to_string(), "method".to_string(), "value".to_string());
    let all: Vec<&(String, String, String)> = std::iter::once(&header).chain(rows).collect();
    let w0 = all.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let w1 = all.iter().map(|r| r.1.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (i, r) in all.iter().enumerate() {
        out.push_str(&format!("{:<w0$} | {:<w1$} | {}\n", r.0, r.1, r.2));
        if i == 0 {
            out.push_str(&format!("{}-+-{}-+-{}\n", "-".repeat(w0), "-".repeat(w1), "-".repeat(12)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_precision() {
        assert_eq!(fixed(0.1234567890123456), 0.123456789012);
        assert_eq!(fixed(-1e-15).to_string(), "0");
    }

    #[test]
    fn short_forms() {
        assert_eq!(short(0.75), "0.75");
        assert_eq!(short(1.0), "1.0");
        assert_eq!(short(0.8535533905932737), "0.853553");
        assert_eq!(short_up(0.8535534905), "0.853554");
    }

    #[test]
    fn report_round_trip() {
        let g = nonlocal_games::catalog::chsh_game();
        let r = Report {
            game: GameId::of(&g),
            computations: vec![Computation::new("classical", "enumeration", 0.75, 0.0)
                .exact("3/4".into())
                .residual("gap", 1e-13)],
            flags: BTreeMap::new(),
        };
        let s = to_json(&r);
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(to_json(&back), s);
    }
}
