//! NPA moment-matrix relaxation.
//!
//! Operator words are built from one symbol per (party, question, answer).
//! Symbols of different parties commute; within a party the projector basis
//! uses idempotence and orthogonality, the dichotomic basis uses A² = I. In
//! the projector basis the last answer of every question is eliminated
//! through Σ_a E_a = I, so normalization is implicit.
//!
//! Level k uses all canonical words of length ≤ k + ⌈n/2⌉ − 1 for n
//! parties, which is k for two parties and is the smallest length at which
//! every n-party correlator of the objective appears as a moment.
//!
//! Γ_ij = ⟨S_i† S_j⟩. In the real formulation the entries of w and w† share
//! one real variable. The Hermitian formulation keeps real and imaginary
//! parts and imposes PSD on the real embedding [[Re, −Im], [Im, Re]].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::linalg::{ComplexMatrix, C64};
use crate::quantum::{apply_local, QuantumStrategy};
use crate::solvers::{sdp_solve, Cell, LinearRelation, SdpOptions, SdpSolution, SemidefiniteProgram, MAX_SDP_SIZE};

/// Projector E^{party}_{question, answer}, or the observable A^{party}_{question}
/// in the dichotomic basis (answer is then 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub party: usize,
    pub question: usize,
    pub answer: usize,
}

impl Symbol {
    pub fn new(party: usize, question: usize, answer: usize) -> Self {
        Self {
            party,
            question,
            answer,
        }
    }
}

fn party_name(p: usize) -> String {
    if p < 26 {
        ((b'A' + p as u8) as char).to_string()
    } else {
        format!("P{p}_")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    #[default]
    Projector,
    Dichotomic,
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projector" => Ok(Basis::Projector),
            "dichotomic" => Ok(Basis::Dichotomic),
            other => Err(Error::Parse(format!("unknown basis {other:?}"))),
        }
    }
}

/// A canonical operator word, or the zero operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monomial {
    Zero,
    Word(Vec<Symbol>),
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial::Word(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Monomial::Word(w) if w.is_empty())
    }

    pub fn symbols(&self) -> Option<&[Symbol]> {
        match self {
            Monomial::Zero => None,
            Monomial::Word(w) => Some(w),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols().map_or(0, <[Symbol]>::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Canonical form of the reversed word.
    pub fn adjoint(&self, basis: Basis) -> Monomial {
        match self {
            Monomial::Zero => Monomial::Zero,
            Monomial::Word(w) => {
                let r: Vec<Symbol> = w.iter().rev().copied().collect();
                canonicalize(&r, basis)
            }
        }
    }

    pub fn label(&self, basis: Basis) -> String {
        match self {
            Monomial::Zero => "0".into(),
            Monomial::Word(w) if w.is_empty() => "I".into(),
            Monomial::Word(w) => w
                .iter()
                .map(|s| match basis {
                    Basis::Projector => format!("{}{}_{}", party_name(s.party), s.question, s.answer),
                    Basis::Dichotomic => format!("{}{}", party_name(s.party), s.question),
                })
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(Basis::Projector))
    }
}

/// Stable sort by party, then per party: E E → E and E_a E_a' → 0 for the
/// same question (projector), A A → I (dichotomic).
pub fn canonicalize(word: &[Symbol], basis: Basis) -> Monomial {
    let mut w = word.to_vec();
    w.sort_by_key(|s| s.party);
    let mut out: Vec<Symbol> = Vec::with_capacity(w.len());
    for s in w {
        match out.last() {
            Some(t) if t.party == s.party && t.question == s.question => match basis {
                Basis::Projector => {
                    if t.answer != s.answer {
                        return Monomial::Zero;
                    }
                }
                Basis::Dichotomic => {
                    out.pop();
                }
            },
            _ => out.push(s),
        }
    }
    Monomial::Word(out)
}

/// How Σ_a E_a = I enters the projector-basis relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Drop the last answer's projector and substitute I − Σ others.
    #[default]
    Eliminated,
    /// Keep every projector and add Σ_a Γ(i, T E_a) = Γ(i, T) relations.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpaOptions {
    pub basis: Basis,
    pub normalization: Normalization,
    /// Force the complex (Hermitian) formulation.
    pub hermitian: bool,
    pub sdp: SdpOptions,
}

impl Default for NpaOptions {
    fn default() -> Self {
        Self {
            basis: Basis::Projector,
            normalization: Normalization::Eliminated,
            hermitian: false,
            sdp: SdpOptions::default(),
        }
    }
}

/// Word length used at `level` for `parties` parties.
pub fn word_length(level: usize, parties: usize) -> usize {
    level + parties.div_ceil(2) - 1
}

/// Serializable cell: a fixed value or `coef · y[var]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellSpec {
    Var { var: usize, coef: f64 },
    Fixed { fixed: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    /// Representative word (lexicographically least of w, w†).
    pub word: String,
    /// "re" or "im".
    pub part: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// One NPA level as an SDP over moment variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProblem {
    pub game: String,
    pub level: usize,
    pub basis: Basis,
    pub normalization: Normalization,
    pub hermitian: bool,
    pub monomials: Vec<String>,
    pub classes: Vec<ClassSpec>,
    /// SDP side (monomial count, doubled in the Hermitian formulation).
    pub size: usize,
    /// Upper triangle, row by row.
    pub cells: Vec<CellSpec>,
    pub objective: Vec<(usize, f64)>,
    pub offset: f64,
    pub relations: Vec<RelationSpec>,
    #[serde(skip)]
    words: Vec<Vec<Symbol>>,
    #[serde(skip)]
    class_words: Vec<Vec<Symbol>>,
}

impl MomentProblem {
    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }

    pub fn num_vars(&self) -> usize {
        self.classes.len()
    }

    /// Canonical words indexing the moment matrix (empty after loading a dump).
    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    pub fn to_sdp(&self) -> Result<SemidefiniteProgram> {
        let cells = self
            .cells
            .iter()
            .map(|c| match *c {
                CellSpec::Var { var, coef } => Cell::Var { index: var, coef },
                CellSpec::Fixed { fixed } => Cell::Fixed(fixed),
            })
            .collect();
        let mut obj = vec![0.0; self.num_vars()];
        for &(k, c) in &self.objective {
            obj[k] += c;
        }
        let rels = self
            .relations
            .iter()
            .map(|r| LinearRelation {
                terms: r.terms.clone(),
                rhs: r.rhs,
            })
            .collect();
        SemidefiniteProgram::new(self.size, self.num_vars(), cells, obj, self.offset, rels)
    }

    /// Deterministic JSON dump.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("moment problem: {e}")))
    }

    /// Moment variables realized by an explicit strategy: y = Re⟨ψ|w|ψ⟩ or
    /// Im⟨ψ|w|ψ⟩ for each class representative w. Needs a freshly built problem.
    pub fn strategy_moments(&self, s: &QuantumStrategy) -> Result<Vec<f64>> {
        if self.class_words.len() != self.classes.len() {
            return Err(Error::Unsupported("problem was loaded without its word index".into()));
        }
        let dims = s.state().party_dims().to_vec();
        let psi = s.state().amplitudes();
        let mut out = Vec::with_capacity(self.classes.len());
        for (spec, w) in self.classes.iter().zip(&self.class_words) {
            let mut v = psi.to_vec();
            for sym in w.iter().rev() {
                let op = self.symbol_operator(s, sym)?;
                v = apply_local(&op, sym.party, &dims, &v);
            }
            let z: C64 = psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            out.push(if spec.part == "im" { z.im } else { z.re });
        }
        Ok(out)
    }

    fn symbol_operator(&self, s: &QuantumStrategy, sym: &Symbol) -> Result<ComplexMatrix> {
        let fam = s
            .measurements()
            .get(sym.party)
            .ok_or_else(|| Error::Dimension("strategy has too few parties".into()))?;
        let m = fam
            .get(sym.question)
            .ok_or_else(|| Error::Dimension("strategy has too few questions".into()))?;
        match self.basis {
            Basis::Projector => Ok(m.effect(sym.answer).clone()),
            Basis::Dichotomic => Ok(m.effect(0) - m.effect(1)),
        }
    }
}

fn generators(game: &Game, basis: Basis, normalization: Normalization) -> Result<Vec<Symbol>> {
    let sc = game.scenario();
    let mut out = Vec::new();
    for p in 0..sc.num_parties() {
        let party = sc.party(p);
        for x in 0..party.num_questions() {
            match basis {
                Basis::Dichotomic => out.push(Symbol::new(p, x, 0)),
                Basis::Projector => {
                    let kept = match normalization {
                        Normalization::Eliminated => party.num_answers() - 1,
                        Normalization::Explicit => party.num_answers(),
                    };
                    out.extend((0..kept).map(|a| Symbol::new(p, x, a)));
                }
            }
        }
    }
    Ok(out)
}

/// All canonical nonzero words of length ≤ `max_len`, sorted by (length, lex).
pub fn enumerate_words(gens: &[Symbol], max_len: usize, basis: Basis) -> Vec<Vec<Symbol>> {
    let mut all: Vec<Vec<Symbol>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<Symbol>> = vec![Vec::new()];
    for len in 1..=max_len {
        let mut next: Vec<Vec<Symbol>> = Vec::new();
        for w in &frontier {
            for g in gens {
                let mut cand = w.clone();
                cand.push(*g);
                if let Monomial::Word(c) = canonicalize(&cand, basis) {
                    if c.len() == len {
                        next.push(c);
                    }
                }
            }
        }
        next.sort();
        next.dedup();
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

#[derive(Clone, Copy)]
enum Term {
    Fixed(f64),
    Var(usize, f64),
}

struct Builder {
    basis: Basis,
    hermitian: bool,
    vars: HashMap<(Vec<Symbol>, bool), usize>,
    classes: Vec<ClassSpec>,
    class_words: Vec<Vec<Symbol>>,
}

impl Builder {
    fn var(&mut self, w: &[Symbol], imag: bool) -> usize {
        let key = (w.to_vec(), imag);
        if let Some(&k) = self.vars.get(&key) {
            return k;
        }
        let k = self.classes.len();
        self.vars.insert(key, k);
        self.classes.push(ClassSpec {
            word: Monomial::Word(w.to_vec()).label(self.basis),
            part: if imag { "im" } else { "re" }.into(),
        });
        self.class_words.push(w.to_vec());
        k
    }

    /// Real and imaginary part of ⟨w⟩ for a canonical monomial.
    fn moment(&mut self, m: &Monomial) -> (Term, Term) {
        match m {
            Monomial::Zero => (Term::Fixed(0.0), Term::Fixed(0.0)),
            Monomial::Word(w) if w.is_empty() => (Term::Fixed(1.0), Term::Fixed(0.0)),
            Monomial::Word(w) => {
                let adj = m.adjoint(self.basis);
                let adj_w = adj.symbols().expect("adjoint of a word is a word").to_vec();
                let (rep, sign) = if *w <= adj_w { (w.clone(), 1.0) } else { (adj_w.clone(), -1.0) };
                let re = Term::Var(self.var(&rep, false), 1.0);
                let im = if !self.hermitian || *w == adj_w {
                    Term::Fixed(0.0)
                } else {
                    Term::Var(self.var(&rep, true), sign)
                };
                (re, im)
            }
        }
    }
}

fn entry(words: &[Vec<Symbol>], i: usize, j: usize, basis: Basis) -> Monomial {
    let mut w: Vec<Symbol> = words[i].iter().rev().copied().collect();
    w.extend_from_slice(&words[j]);
    canonicalize(&w, basis)
}

fn to_cell(t: Term, negate: bool) -> CellSpec {
    let s = if negate { -1.0 } else { 1.0 };
    match t {
        Term::Fixed(v) => CellSpec::Fixed { fixed: s * v + 0.0 },
        Term::Var(k, c) => CellSpec::Var { var: k, coef: s * c },
    }
}

/// Builds the NPA SDP for `game` at `level`.
pub fn build_problem(game: &Game, level: usize, opts: &NpaOptions) -> Result<MomentProblem> {
    if level < 1 {
        return Err(Error::Domain("NPA level must be at least 1".into()));
    }
    let sc = game.scenario();
    if opts.basis == Basis::Dichotomic && !sc.is_binary() {
        return Err(Error::Unsupported(
            "dichotomic basis needs binary answer alphabets".into(),
        ));
    }
    let normalization = match opts.basis {
        Basis::Projector => opts.normalization,
        Basis::Dichotomic => Normalization::Eliminated,
    };
    let gens = generators(game, opts.basis, normalization)?;
    let max_len = word_length(level, sc.num_parties());
    let words = enumerate_words(&gens, max_len, opts.basis);
    let n = words.len();
    let size = if opts.hermitian { 2 * n } else { n };
    if size > MAX_SDP_SIZE {
        return Err(Error::TooLarge {
            count: size as u128,
            cap: MAX_SDP_SIZE as u128,
        });
    }

    let mut b = Builder {
        basis: opts.basis,
        hermitian: opts.hermitian,
        vars: HashMap::new(),
        classes: Vec::new(),
        class_words: Vec::new(),
    };
    let mut grid: Vec<(Term, Term)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let m = entry(&words, i, j, opts.basis);
            grid.push(b.moment(&m));
        }
    }

    let mut cells = Vec::with_capacity(size * (size + 1) / 2);
    for r in 0..size {
        for c in r..size {
            let cell = if r < n && c < n {
                to_cell(grid[r * n + c].0, false)
            } else if r < n {
                // −Im Γ_{r, c−n}
                to_cell(grid[r * n + (c - n)].1, true)
            } else {
                to_cell(grid[(r - n) * n + (c - n)].0, false)
            };
            cells.push(cell);
        }
    }

    // Objective Σ_q π(q) Σ_a V(a,q) ⟨Π_p E^{p}_{q_p a_p}⟩ expanded over words.
    let mut poly: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
    for q in game.promise() {
        let qt = sc.question_tuple(q);
        let w = game.weight_f64(q);
        for a in 0..sc.num_joint_answers() {
            if !game.wins(q, a) {
                continue;
            }
            let at = sc.answer_tuple(a);
            let mut terms: Vec<(Vec<Symbol>, f64)> = vec![(Vec::new(), w)];
            for (p, (&x, &ap)) in qt.iter().zip(at).enumerate() {
                let local = local_expansion(p, x, ap, sc.party(p).num_answers(), opts.basis, normalization);
                let mut next = Vec::with_capacity(terms.len() * local.len());
                for (word, c) in &terms {
                    for (sym, d) in &local {
                        let mut nw = word.clone();
                        if let Some(s) = sym {
                            nw.push(*s);
                        }
                        next.push((nw, c * d));
                    }
                }
                terms = next;
            }
            for (word, c) in terms {
                *poly.entry(word).or_insert(0.0) += c;
            }
        }
    }
    let index: HashMap<&[Symbol], usize> = words.iter().enumerate().map(|(k, w)| (w.as_slice(), k)).collect();
    let mut offset = 0.0;
    let mut objective: BTreeMap<usize, f64> = BTreeMap::new();
    for (word, c) in poly {
        if c == 0.0 {
            continue;
        }
        if word.is_empty() {
            offset += c;
            continue;
        }
        // The word must occur as some Γ entry: split it into S_i† S_j.
        let found = (0..=word.len()).find_map(|cut| {
            let left: Vec<Symbol> = word[..cut].iter().rev().copied().collect();
            let right = &word[cut..];
            let li = index.get(canonical_slice(&left, opts.basis)?.as_slice()).copied()?;
            let rj = index.get(right).copied()?;
            Some((li, rj))
        });
        let Some((i, j)) = found else {
            return Err(Error::Unsupported(format!(
                "level {level} is too low to express the moment {}",
                Monomial::Word(word).label(opts.basis)
            )));
        };
        match grid[i * n + j].0 {
            Term::Fixed(v) => offset += c * v,
            Term::Var(k, coef) => *objective.entry(k).or_insert(0.0) += c * coef,
        }
    }

    let relations = if normalization == Normalization::Explicit {
        explicit_relations(game, &words, &index, &grid, opts.hermitian)
    } else {
        Vec::new()
    };

    Ok(MomentProblem {
        game: game.name().to_string(),
        level,
        basis: opts.basis,
        normalization,
        hermitian: opts.hermitian,
        monomials: words.iter().map(|w| Monomial::Word(w.clone()).label(opts.basis)).collect(),
        classes: b.classes,
        size,
        cells,
        objective: objective.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        offset,
        relations,
        words,
        class_words: b.class_words,
    })
}

fn canonical_slice(w: &[Symbol], basis: Basis) -> Option<Vec<Symbol>> {
    match canonicalize(w, basis) {
        Monomial::Word(c) if c.len() == w.len() => Some(c),
        _ => None,
    }
}

/// The operator E^{p}_{x,a} as a combination of generators (None = identity).
fn local_expansion(
    p: usize,
    x: usize,
    a: usize,
    answers: usize,
    basis: Basis,
    normalization: Normalization,
) -> Vec<(Option<Symbol>, f64)> {
    match basis {
        Basis::Dichotomic => {
            let sign = if a == 0 { 0.5 } else { -0.5 };
            vec![(None, 0.5), (Some(Symbol::new(p, x, 0)), sign)]
        }
        Basis::Projector => {
            if normalization == Normalization::Explicit || a + 1 < answers {
                vec![(Some(Symbol::new(p, x, a)), 1.0)]
            } else {
                let mut v = vec![(None, 1.0)];
                v.extend((0..answers - 1).map(|b| (Some(Symbol::new(p, x, b)), -1.0)));
                v
            }
        }
    }
}

/// Σ_{a'} Γ(i, T E_{a'}) = Γ(i, T) for every column word T·E_a ending in E_a.
fn explicit_relations(
    game: &Game,
    words: &[Vec<Symbol>],
    index: &HashMap<&[Symbol], usize>,
    grid: &[(Term, Term)],
    hermitian: bool,
) -> Vec<RelationSpec> {
    let sc = game.scenario();
    let n = words.len();
    let mut seen: BTreeMap<Vec<(usize, i64)>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for w in words.iter().filter(|w| !w.is_empty()) {
        let (t, last) = w.split_at(w.len() - 1);
        let s = last[0];
        if s.answer != 0 {
            continue;
        }
        let Some(&tj) = index.get(t) else { continue };
        let mut cols = Vec::new();
        for a in 0..sc.party(s.party).num_answers() {
            let mut cand = t.to_vec();
            cand.push(Symbol::new(s.party, s.question, a));
            match index.get(cand.as_slice()) {
                Some(&j) => cols.push(j),
                None => {
                    cols.clear();
                    break;
                }
            }
        }
        if cols.is_empty() {
            continue;
        }
        for i in 0..n {
            for part in 0..if hermitian { 2 } else { 1 } {
                let pick = |j: usize| if part == 0 { grid[i * n + j].0 } else { grid[i * n + j].1 };
                let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                let mut rhs = 0.0;
                let mut add = |t: Term, c: f64| match t {
                    Term::Fixed(v) => rhs -= c * v,
                    Term::Var(k, coef) => *acc.entry(k).or_insert(0.0) += c * coef,
                };
                for &j in &cols {
                    add(pick(j), 1.0);
                }
                add(pick(tj), -1.0);
                let terms: Vec<(usize, f64)> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
                if terms.is_empty() {
                    continue;
                }
                let key: Vec<(usize, i64)> = terms
                    .iter()
                    .map(|&(k, c)| (k, (c * 1e6).round() as i64))
                    .chain(std::iter::once((usize::MAX, (rhs * 1e6).round() as i64)))
                    .collect();
                if seen.insert(key, ()).is_none() {
                    out.push(RelationSpec { terms, rhs });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct NpaResult {
    /// Upper bound on the game value: SDP value plus `margin`.
    pub bound: f64,
    pub value: f64,
    pub margin: f64,
    pub problem: MomentProblem,
    pub solution: SdpSolution,
}

impl NpaResult {
    pub fn converged(&self) -> bool {
        self.solution.converged
    }

    /// Errors with the final residuals if the solver did not converge.
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged() {
            Ok(self)
        } else {
            Err(Error::Solver(format!(
                "SDP did not converge in {} iterations (primal residual {:e}, dual residual {:e})",
                self.solution.iterations, self.solution.primal_residual, self.solution.dual_residual
            )))
        }
    }
}

/// Solves the level-`level` relaxation. A non-converged solve is returned
/// with `converged() == false` rather than as an error.
pub fn npa_bound(game: &Game, level: usize, opts: &NpaOptions) -> Result<NpaResult> {
    let problem = build_problem(game, level, opts)?;
    solve_problem(problem, &opts.sdp)
}

pub fn solve_problem(problem: MomentProblem, sdp_opts: &SdpOptions) -> Result<NpaResult> {
    let sdp = problem.to_sdp()?;
    let solution = sdp_solve(&sdp, sdp_opts);
    let margin = 10.0 * sdp_opts.tol;
    Ok(NpaResult {
        bound: solution.value + margin,
        value: solution.value,
        margin,
        problem,
        solution,
    })
}
