use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use nonlocal_games::catalog::*;
use nonlocal_games::classical::{classical_value, ns_value};
use nonlocal_games::npa::{build_problem, canonicalize, npa_bound, Basis, Monomial, Normalization, NpaOptions, Symbol};
use nonlocal_games::quantum::*;
use nonlocal_games::solvers::{duality_gap, lp_solve, LinearProgram, LpStatus};
use nonlocal_games::{behavior_from_correlators, correlators, CorrelatorTable, Game, Party, Scenario};

fn symbol() -> impl Strategy<Value = Symbol> {
    (0usize..3, 0usize..2, 0usize..2).prop_map(|(p, q, a)| Symbol::new(p, q, a))
}

fn weights(raw: &[u8]) -> Vec<BigRational> {
    let raw: Vec<i64> = raw.iter().map(|&w| w as i64 + 1).collect();
    let total: i64 = raw.iter().sum();
    raw.iter().map(|&w| BigRational::new(w.into(), total.into())).collect()
}

/// Two-player game with the given alphabet sizes, win table and weights.
fn table_game(nq: [usize; 2], na: [usize; 2], wins: &[bool], raw_pi: &[u8]) -> Game {
    let sc = Scenario::new(vec![
        Party::indexed(nq[0], na[0]).unwrap(),
        Party::indexed(nq[1], na[1]).unwrap(),
    ])
    .unwrap();
    let table = wins[..sc.num_joint_questions() * sc.num_joint_answers()].to_vec();
    let pi = weights(&raw_pi[..sc.num_joint_questions()]);
    Game::from_table("random", sc, pi, table).unwrap()
}

fn xor_from(f: &[bool], raw_pi: &[u8]) -> Game {
    xor_game("random_xor", &[2, 2], f, Some(weights(raw_pi))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent(word in proptest::collection::vec(symbol(), 0..=6), dich in any::<bool>()) {
        let basis = if dich { Basis::Dichotomic } else { Basis::Projector };
        let once = canonicalize(&word, basis);
        if let Monomial::Word(w) = &once {
            prop_assert_eq!(canonicalize(w, basis), once.clone());
        }
    }

    #[test]
    fn classical_value_invariant_under_relabeling(
        wins in proptest::collection::vec(any::<bool>(), 81),
        raw_pi in proptest::collection::vec(any::<u8>(), 9),
        qa in 0usize..6, qb in 0usize..6, aa in 0usize..6, ab in 0usize..6,
    ) {
        let g = table_game([3, 3], [3, 3], &wins, &raw_pi);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let (px, py, pa, pb) = (perms[qa], perms[qb], perms[aa], perms[ab]);
        let sc = g.scenario().clone();
        let mut table = vec![false; 81];
        let mut pi = vec![BigRational::zero(); 9];
        for x in 0..3 { for y in 0..3 {
            let q = sc.joint_question_index(&[x, y]);
            let q2 = sc.joint_question_index(&[px[x], py[y]]);
            pi[q2] = g.weight(q).clone();
            for a in 0..3 { for b in 0..3 {
                let j = sc.joint_answer_index(&[a, b]);
                let j2 = sc.joint_answer_index(&[pa[a], pb[b]]);
                table[q2 * 9 + j2] = g.wins(q, j);
            }}
        }}
        let h = Game::from_table("relabeled", sc, pi, table).unwrap();
        prop_assert_eq!(classical_value(&g).unwrap().value, classical_value(&h).unwrap().value);
    }

    #[test]
    fn correlator_round_trip(e in proptest::collection::vec(-1.0f64..=1.0, 8)) {
        let sc = Scenario::uniform(3, 2, 2).unwrap();
        let t = CorrelatorTable::new(sc, e.clone()).unwrap();
        let back = correlators(&behavior_from_correlators(&t).unwrap()).unwrap();
        for (a, b) in back.entries().iter().zip(&e) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn random_strategies_are_valid_behaviors(seed in any::<u64>(), three in any::<bool>()) {
        let (sc, dims) = if three {
            (Scenario::uniform(3, 2, 2).unwrap(), vec![2, 2, 2])
        } else {
            (Scenario::uniform(2, 3, 3).unwrap(), vec![3, 3])
        };
        let b = strategy_behavior(&random_strategy(&sc, &dims, seed).unwrap(), &sc).unwrap();
        for q in 0..sc.num_joint_questions() {
            prop_assert!((b.row(q).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        prop_assert!(b.signaling_violation() <= 1e-9);
    }

    #[test]
    fn lp_duality_on_random_programs(
        a in proptest::collection::vec(-3i32..=3, 12),
        x0 in proptest::collection::vec(0u8..4, 4),
        c in proptest::collection::vec(-5i32..=5, 4),
    ) {
        // A x = A x0 plus Σx = Σx0 keeps the program feasible and bounded.
        let mut rows: Vec<Vec<f64>> = a.chunks(4).map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        rows.push(vec![1.0; 4]);
        let x0: Vec<f64> = x0.iter().map(|&v| v as f64).collect();
        let b: Vec<f64> = rows.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
        let c: Vec<f64> = c.iter().map(|&v| v as f64).collect();
        let lp = LinearProgram::new(c.clone(), rows, b).unwrap();
        let sol = lp_solve(&lp);
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(duality_gap(&lp, &sol).abs() <= 1e-9);
        let base: f64 = c.iter().zip(&x0).map(|(p, q)| p * q).sum();
        prop_assert!(sol.value >= base - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn value_ladder_on_xor_games(f in proptest::collection::vec(any::<bool>(), 4), raw_pi in proptest::collection::vec(any::<u8>(), 4), seed in any::<u64>()) {
        let g = xor_from(&f, &raw_pi);
        let c = classical_value(&g).unwrap().value_f64();
        let s0 = random_strategy(g.scenario(), &[2, 2], seed).unwrap();
        let q = seesaw_refine(&g, &s0, &SeesawOptions::default()).unwrap().value;
        let ns = ns_value(&g).unwrap();
        let n1 = npa_bound(&g, 1, &NpaOptions::default()).unwrap();
        let n2 = npa_bound(&g, 2, &NpaOptions::default()).unwrap();
        prop_assert!(n1.converged() && n2.converged());
        prop_assert!(q <= n2.bound + 1e-6);
        prop_assert!(n2.bound <= n1.bound + 1e-6);
        prop_assert!(n1.bound <= ns + 1e-5);
        prop_assert!(ns <= 1.0 + 1e-9);
        prop_assert!(c <= n2.bound + 1e-6);
    }

    #[test]
    fn sdp_value_dominates_strategy_moments(seed in any::<u64>(), dich in any::<bool>()) {
        let g = chsh_game();
        let basis = if dich { Basis::Dichotomic } else { Basis::Projector };
        let opts = NpaOptions { basis, ..Default::default() };
        let problem = build_problem(&g, 2, &opts).unwrap();
        let s = random_strategy(g.scenario(), &[2, 2], seed).unwrap();
        let y = problem.strategy_moments(&s).unwrap();
        let sdp = problem.to_sdp().unwrap();
        prop_assert!((sdp.evaluate(&y) - winning_probability(&g, &s).unwrap()).abs() <= 1e-12);
        prop_assert!(sdp.relation_residual(&y) <= 1e-12);
        let r = npa_bound(&g, 2, &opts).unwrap();
        prop_assert!(r.value >= sdp.evaluate(&y) - 1e-6);
    }
}

#[test]
fn explicit_normalization_matches_eliminated() {
    let g = magic_square_game();
    let a = npa_bound(&g, 1, &NpaOptions::default()).unwrap();
    let b = npa_bound(
        &g,
        1,
        &NpaOptions {
            normalization: Normalization::Explicit,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(a.converged() && b.converged());
    assert!((a.value - b.value).abs() < 1e-6, "{} vs {}", a.value, b.value);
}

#[test]
fn hermitian_formulation_agrees_on_chsh() {
    let g = chsh_game();
    for level in [1, 2] {
        let real = npa_bound(&g, level, &NpaOptions::default()).unwrap();
        let herm = npa_bound(
            &g,
            level,
            &NpaOptions {
                hermitian: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((real.value - herm.value).abs() < 1e-6, "level {level}: {} vs {}", real.value, herm.value);
        assert_eq!(herm.problem.size, 2 * real.problem.size);
    }
}

#[test]
fn coloring_threshold_at_chromatic_number() {
    for (g, chi) in [
        (GraphSpec::complete(3), 3),
        (GraphSpec::complete(4), 4),
        (GraphSpec::path(3), 2),
        (GraphSpec::cycle(5), 3),
    ] {
        for c in 1..=chi + 1 {
            let game = coloring_game(&g, c, None).unwrap();
            assert!(coloring_proviso(&g, &game));
            let v = classical_value(&game).unwrap().value;
            assert_eq!(v.is_one(), c >= chi, "{} vertices, {c} colors: {v}", g.vertices.len());
        }
    }
}

#[test]
fn single_edge_one_color() {
    let g = GraphSpec::path(2);
    let v = classical_value(&coloring_game(&g, 1, None).unwrap()).unwrap().value;
    // Two self-pairs won, two ordered edge pairs lost.
    assert_eq!(v, BigRational::new(1.into(), 2.into()));
}

#[test]
fn catalog_weights_are_exact_distributions() {
    let games = [
        chsh_game(),
        ghz_game(),
        magic_square_game(),
        coloring_game(&GraphSpec::cycle(5), 3, None).unwrap(),
    ];
    for g in games {
        let total: BigRational = g.weights().iter().sum();
        assert!(total.is_one(), "{}", g.name());
    }
}

#[test]
fn pseudo_telepathy_flags() {
    for (g, s) in [(magic_square_game(), magic_square_strategy()), (ghz_game(), ghz_strategy())] {
        assert!(classical_value(&g).unwrap().value < BigRational::one());
        assert!((winning_probability(&g, &s).unwrap() - 1.0).abs() <= 1e-9);
    }
    let g = chsh_game();
    let c = classical_value(&g).unwrap().value_f64();
    let q = winning_probability(&g, &chsh_strategy()).unwrap();
    assert!(c < q && q < 1.0);
}

#[test]
fn xor_game_examples() {
    let zero = xor_game("zero", &[2, 2], &[false; 4], None).unwrap();
    assert!(classical_value(&zero).unwrap().value.is_one());
    let xor = xor_game("xor", &[2, 2], &[false, true, true, false], None).unwrap();
    assert!(classical_value(&xor).unwrap().value.is_one());
}

#[test]
fn hardy_pattern_breaks_at_maximal_entanglement() {
    let s = hardy_sixteenth();
    let bell = nonlocal_games::linalg::StateVector::maximally_entangled(2);
    let c = hardy_check(&bell, &s.measurements).unwrap();
    assert!(c.max_violation() > 1e-3, "{c:?}");
}

#[test]
fn hardy_product_state_has_no_paradox() {
    let s = hardy_sixteenth();
    let product = nonlocal_games::linalg::StateVector::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let c = hardy_check(&product, &s.measurements).unwrap();
    // A product state admits a local model, so the pattern cannot be complete.
    assert!(!(c.max_violation() < 1e-9 && c.target > 1e-9), "{c:?}");
}
