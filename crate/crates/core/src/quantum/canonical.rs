use std::f64::consts::FRAC_1_SQRT_2;

use super::{DichotomicObservable, Measurement, QuantumStrategy};
use crate::linalg::{kron, pauli_x, pauli_y, pauli_z, ComplexMatrix, StateVector};

/// |Φ⁺⟩ with A₀ = Z, A₁ = X, B₀ = (Z+X)/√2, B₁ = (Z−X)/√2.
pub fn chsh_strategy() -> QuantumStrategy {
    let z = pauli_z();
    let x = pauli_x();
    let b0 = (&z + &x).scale_real(FRAC_1_SQRT_2);
    let b1 = (&z - &x).scale_real(FRAC_1_SQRT_2);
    let obs = |m: ComplexMatrix| DichotomicObservable::new(m).expect("Pauli combination");
    QuantumStrategy::from_observables(
        StateVector::maximally_entangled(2),
        vec![vec![obs(z), obs(x)], vec![obs(b0), obs(b1)]],
    )
    .expect("static strategy")
}

/// GHZ state; every party measures X on input 0 and Y on input 1.
pub fn ghz_strategy() -> QuantumStrategy {
    let fam = || {
        vec![
            DichotomicObservable::new(pauli_x()).expect("Pauli"),
            DichotomicObservable::new(pauli_y()).expect("Pauli"),
        ]
    };
    QuantumStrategy::from_observables(StateVector::ghz(3), vec![fam(), fam(), fam()])
        .expect("static strategy")
}

/// Two-qubit observables; cell (r, c) is shared by row r and column c.
///
/// ```text
///  Z⊗I    I⊗Z    Z⊗Z
///  I⊗X    X⊗I    X⊗X
/// −Z⊗X   −X⊗Z    Y⊗Y
/// ```
pub fn magic_square_observables() -> [[ComplexMatrix; 3]; 3] {
    let i = ComplexMatrix::identity(2);
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let k = |a: &ComplexMatrix, b: &ComplexMatrix| kron(a, b).expect("4x4");
    [
        [k(&z, &i), k(&i, &z), k(&z, &z)],
        [k(&i, &x), k(&x, &i), k(&x, &x)],
        [k(&z, &x).scale_real(-1.0), k(&x, &z).scale_real(-1.0), k(&y, &y)],
    ]
}

/// Max-entry defects of the table's algebraic identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicSquareIdentities {
    /// ‖O_r0 O_r1 O_r2 − I‖ per row.
    pub rows: [f64; 3],
    /// ‖O_0c O_1c O_2c + I‖ per column.
    pub columns: [f64; 3],
    /// Largest commutator norm within any row or column.
    pub commutators: f64,
}

pub fn magic_square_identities() -> MagicSquareIdentities {
    let o = magic_square_observables();
    let id = ComplexMatrix::identity(4);
    let neg = id.scale_real(-1.0);
    let mut rows = [0.0; 3];
    let mut columns = [0.0; 3];
    let mut commutators: f64 = 0.0;
    for r in 0..3 {
        rows[r] = (&(&o[r][0] * &o[r][1]) * &o[r][2]).max_abs_diff(&id);
        columns[r] = (&(&o[0][r] * &o[1][r]) * &o[2][r]).max_abs_diff(&neg);
        for a in 0..3 {
            for b in a + 1..3 {
                let cr = o[r][a].commutator(&o[r][b]).expect("4x4").max_abs();
                let cc = o[a][r].commutator(&o[b][r]).expect("4x4").max_abs();
                commutators = commutators.max(cr).max(cc);
            }
        }
    }
    MagicSquareIdentities {
        rows,
        columns,
        commutators,
    }
}

// Joint projector Π_k (I + (−1)^{bit_k} O_k)/2 for the bits of `label`.
fn joint_projector(obs: [&ComplexMatrix; 3], label: &str) -> ComplexMatrix {
    let id = ComplexMatrix::identity(4);
    let mut acc = id.clone();
    for (o, ch) in obs.iter().zip(label.chars()) {
        let sign = if ch == '0' { 1.0 } else { -1.0 };
        let proj = (&id + &o.scale_real(sign)).scale_real(0.5);
        acc = &acc * &proj;
    }
    acc
}

/// Two EPR pairs with Alice holding qubits (1,3) and Bob (2,4), which on
/// each side's pair reads ½ Σ_{ij} |ij⟩_A |ij⟩_B. Row x (Alice) and column
/// y (Bob) are measured jointly through the spectral projectors of the
/// three commuting table observables; answers are their bits with
/// 0 ↔ +1 and 1 ↔ −1.
///
/// Panics if the table fails its row/column product identities.
pub fn magic_square_strategy() -> QuantumStrategy {
    let ids = magic_square_identities();
    assert!(
        ids.rows.iter().chain(&ids.columns).all(|d| *d < 1e-12) && ids.commutators < 1e-12,
        "magic square table violates its identities: {ids:?}"
    );
    let o = magic_square_observables();
    const EVEN: [&str; 4] = ["000", "011", "101", "110"];
    const ODD: [&str; 4] = ["001", "010", "100", "111"];
    let alice = (0..3)
        .map(|r| {
            let row = [&o[r][0], &o[r][1], &o[r][2]];
            Measurement::projective(EVEN.iter().map(|l| joint_projector(row, l)).collect())
                .expect("row observables commute")
        })
        .collect();
    let bob = (0..3)
        .map(|c| {
            let col = [&o[0][c], &o[1][c], &o[2][c]];
            Measurement::projective(ODD.iter().map(|l| joint_projector(col, l)).collect())
                .expect("column observables commute")
        })
        .collect();
    QuantumStrategy::new(StateVector::maximally_entangled(4), vec![alice, bob])
        .expect("static strategy")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chsh_game, ghz_game, magic_square_game};
    use crate::quantum::{game_operator, winning_probability};
    use crate::linalg::top_eigenpair;

    #[test]
    fn canonical_values() {
        let v = winning_probability(&chsh_game(), &chsh_strategy()).unwrap();
        assert!((v - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!((winning_probability(&ghz_game(), &ghz_strategy()).unwrap() - 1.0).abs() < 1e-12);
        let ms = winning_probability(&magic_square_game(), &magic_square_strategy()).unwrap();
        assert!((ms - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_operator_top_eigenvalue() {
        let op = game_operator(&chsh_game(), &chsh_strategy()).unwrap();
        let (l, _) = top_eigenpair(&op).unwrap();
        assert!((l - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-12);
    }
}
