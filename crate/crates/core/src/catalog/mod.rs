//! Constructors for the standard games, graph coloring and the Hardy problem.

mod hardy;

pub use hardy::{
    hardy_check, hardy_optimize, hardy_sixteenth, hardy_state_probability, HardyCheck,
    HardyOptimum, HardyStrategy, HARDY_CEILING,
};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::classical::classical_value;
use crate::error::{Error, Result};
use crate::game::{uniform_over, AnswerConstraint, Game, Party, Scenario};
use crate::npa::{npa_bound, NpaOptions};

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Win iff a₀ ⊕ a₁ = x·y, π uniform.
pub fn chsh_game() -> Game {
    let f = [false, false, false, true];
    xor_game("chsh", &[2, 2], &f, None).expect("static game")
}

/// Binary-answer game over parties with the given question counts, won iff
/// the parity of all answers equals `f` at the joint question (`f` is listed
/// in joint-question order, party 0 most significant). `pi` defaults to
/// uniform.
pub fn xor_game(
    name: &str,
    questions: &[usize],
    f: &[bool],
    pi: Option<Vec<BigRational>>,
) -> Result<Game> {
    let parties = questions
        .iter()
        .map(|&nq| Party::indexed(nq, 2))
        .collect::<Result<Vec<_>>>()?;
    let sc = Scenario::new(parties)?;
    if f.len() != sc.num_joint_questions() {
        return Err(Error::InvalidGame(format!(
            "XOR table has {} entries, expected {}",
            f.len(),
            sc.num_joint_questions()
        )));
    }
    let pi = match pi {
        Some(p) => p,
        None => uniform_over(&vec![true; sc.num_joint_questions()])?,
    };
    let table: Vec<bool> = f.to_vec();
    let index = sc.clone();
    Game::new(name, sc, pi, move |q, a| {
        let parity = a.iter().sum::<usize>() & 1 == 1;
        parity == table[index.joint_question_index(q)]
    })
}

/// Three parties, π uniform on {000, 011, 101, 110}; win iff
/// a₁ ⊕ a₂ ⊕ a₃ = x₁ ∨ x₂ ∨ x₃.
pub fn ghz_game() -> Game {
    let sc = Scenario::uniform(3, 2, 2).expect("static scenario");
    let mask: Vec<bool> = (0..8)
        .map(|q| sc.question_tuple(q).iter().sum::<usize>() % 2 == 0)
        .collect();
    let pi = uniform_over(&mask).expect("nonempty");
    // Truth table on the promise: even parity on 000, odd on the rest.
    let table = |q: &[usize]| -> usize {
        match q {
            [0, 0, 0] => 0,
            _ => 1,
        }
    };
    let g = Game::new("ghz", sc.clone(), pi, |q, a| {
        a.iter().sum::<usize>() % 2 == table(q)
    })
    .expect("static game");
    for q in g.promise() {
        let qt = sc.question_tuple(q);
        let or = qt.iter().any(|&x| x == 1) as usize;
        assert_eq!(or, table(qt), "GHZ truth table disagrees with x1 ∨ x2 ∨ x3");
    }
    g
}

/// Alice gets a row and answers an even-parity 3-bit string, Bob gets a
/// column and answers an odd-parity one; they win iff the shared cell's bits
/// agree. π uniform over the 9 cells.
pub fn magic_square_game() -> Game {
    let bits: Vec<String> = (0..8).map(|k| format!("{:03b}", k)).collect();
    let alice = Party::new(labels(3), bits.clone(), Some(AnswerConstraint::EvenParity))
        .expect("static party");
    let bob = Party::new(labels(3), bits, Some(AnswerConstraint::OddParity)).expect("static party");
    let bit = |p: &Party, a: usize, k: usize| p.answers()[a].as_bytes()[k];
    let sc = Scenario::new(vec![alice.clone(), bob.clone()]).expect("static scenario");
    let pi = uniform_over(&[true; 9]).expect("nonempty");
    Game::new("magic_square", sc, pi, |q, a| {
        let (x, y) = (q[0], q[1]);
        bit(&alice, a[0], y) == bit(&bob, a[1], x)
    })
    .expect("static game")
}

/// Full 0/1 fillings of the 3×3 grid (bit 3r + c is cell (r, c)) whose rows
/// all have even parity and whose columns all have odd parity. Always empty:
/// the row parities and the column parities both multiply out to the grid's
/// total parity.
pub fn magic_square_perfect_grids() -> Vec<u16> {
    let cell = |g: u16, r: u16, c: u16| (g >> (3 * r + c)) & 1;
    (0u16..512)
        .filter(|&g| {
            (0..3).all(|r| (0..3).map(|c| cell(g, r, c)).sum::<u16>() % 2 == 0)
                && (0..3).all(|c| (0..3).map(|r| cell(g, r, c)).sum::<u16>() % 2 == 1)
        })
        .collect()
}

/// Undirected simple graph with labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl GraphSpec {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String)>) -> Result<Self> {
        let g = Self { vertices, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidGame("graph has no vertices".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                return Err(Error::InvalidGame(format!("duplicate vertex {v:?}")));
            }
        }
        let mut seen = Vec::new();
        for (u, v) in &self.edges {
            if u == v {
                return Err(Error::InvalidGame(format!("self-loop at {u:?}")));
            }
            for w in [u, v] {
                if !self.vertices.contains(w) {
                    return Err(Error::InvalidGame(format!("edge references unknown vertex {w:?}")));
                }
            }
            let key = if u < v { (u, v) } else { (v, u) };
            if seen.contains(&key) {
                return Err(Error::InvalidGame(format!("duplicate edge {u:?}-{v:?}")));
            }
            seen.push(key);
        }
        Ok(())
    }

    pub fn complete(n: usize) -> Self {
        let vertices = labels(n);
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i.to_string(), j.to_string())))
            .collect();
        Self { vertices, edges }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
        Self {
            vertices: labels(n),
            edges,
        }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.edges.push(((n - 1).to_string(), "0".to_string()));
        }
        g
    }

    fn index(&self, v: &str) -> usize {
        self.vertices.iter().position(|w| w == v).expect("validated")
    }

    /// Adjacency as an n×n boolean table.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in &self.edges {
            let (i, j) = (self.index(u), self.index(v));
            adj[i][j] = true;
            adj[j][i] = true;
        }
        adj
    }
}

/// Both players receive vertices and answer colors; they must agree when
/// the vertices coincide and differ on an edge. The default π is uniform over
/// self-pairs and ordered edge pairs; a custom π is indexed like the joint
/// questions (u·n + v).
pub fn coloring_game(graph: &GraphSpec, colors: usize, pi: Option<Vec<BigRational>>) -> Result<Game> {
    graph.validate()?;
    if colors == 0 {
        return Err(Error::InvalidGame("need at least one color".into()));
    }
    let n = graph.vertices.len();
    let party = || Party::new(graph.vertices.clone(), labels(colors), None);
    let sc = Scenario::new(vec![party()?, party()?])?;
    let adj = graph.adjacency();
    let pi = match pi {
        Some(p) => p,
        None => {
            let mask: Vec<bool> = (0..n * n).map(|k| k / n == k % n || adj[k / n][k % n]).collect();
            uniform_over(&mask)?
        }
    };
    Game::new(format!("coloring_{colors}"), sc, pi, |q, a| {
        let (u, v) = (q[0], q[1]);
        if u == v {
            a[0] == a[1]
        } else if adj[u][v] {
            a[0] != a[1]
        } else {
            true
        }
    })
}

/// True when every self-pair and every ordered edge has positive weight, the
/// condition under which ω_c = 1 ⇔ colors ≥ χ.
pub fn coloring_proviso(graph: &GraphSpec, game: &Game) -> bool {
    let n = graph.vertices.len();
    let adj = graph.adjacency();
    (0..n * n).all(|k| {
        let (u, v) = (k / n, k % n);
        !(u == v || adj[u][v]) || !game.weight(k).is_zero()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChromaticNumbers {
    /// Smallest c ≤ c_max with classical value 1.
    pub chi: Option<usize>,
    /// Smallest c whose NPA bound at `npa_level` is ≥ 1 − 1e-6. Only a
    /// relaxation-level candidate, never a certified quantum chromatic number.
    pub npa_candidate: Option<usize>,
    pub npa_level: usize,
}

/// χ by exact enumeration, and the smallest color count not excluded by the
/// NPA relaxation (searched below χ, since c = χ always passes).
pub fn chromatic_numbers(graph: &GraphSpec, c_max: usize, npa_level: usize) -> Result<ChromaticNumbers> {
    let mut chi = None;
    for c in 1..=c_max {
        let g = coloring_game(graph, c, None)?;
        if classical_value(&g)?.value == BigRational::from_integer(1.into()) {
            chi = Some(c);
            break;
        }
    }
    let mut npa_candidate = chi;
    let upper = chi.map_or(c_max, |c| c - 1);
    for c in 1..=upper {
        let g = coloring_game(graph, c, None)?;
        let r = npa_bound(&g, npa_level, &NpaOptions::default())?;
        if r.bound >= 1.0 - 1e-6 {
            npa_candidate = Some(c);
            break;
        }
    }
    Ok(ChromaticNumbers {
        chi,
        npa_candidate,
        npa_level,
    })
}
