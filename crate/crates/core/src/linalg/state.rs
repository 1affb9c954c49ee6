use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Pure state on a tensor product of party spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    party_dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Requires ‖ψ‖ = 1 within 1e-10; the stored vector is renormalized exactly.
    pub fn new(party_dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = Self::unnormalized(party_dims, amplitudes)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("state has norm {norm}, expected 1")));
        }
        s.amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(s)
    }

    /// Scales any nonzero vector to unit norm.
    pub fn normalized(party_dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = Self::unnormalized(party_dims, amplitudes)?;
        let norm = s.norm();
        if !(norm > 1e-300) {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        s.amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(s)
    }

    fn unnormalized(party_dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        if party_dims.is_empty() || party_dims.contains(&0) {
            return Err(Error::Dimension("party dimensions must be positive".into()));
        }
        let total = party_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Dimension("state dimension overflow".into()))?;
        if amplitudes.len() != total {
            return Err(Error::Dimension(format!(
                "state of dims {party_dims:?} needs {total} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        Ok(Self {
            party_dims,
            amplitudes,
        })
    }

    pub fn from_real(party_dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(party_dims, amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// (|0…0⟩ + |1…1⟩)/√2 over `n` qubits.
    pub fn ghz(n: usize) -> Self {
        let dim = 1usize << n;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(r, 0.0);
        amps[dim - 1] = C64::new(r, 0.0);
        Self {
            party_dims: vec![2; n],
            amplitudes: amps,
        }
    }

    /// Σ_k |k⟩|k⟩/√d on two parties of dimension `d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        let r = 1.0 / (d as f64).sqrt();
        for k in 0..d {
            amps[k * d + k] = C64::new(r, 0.0);
        }
        Self {
            party_dims: vec![d, d],
            amplitudes: amps,
        }
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        expectation(self, op)
    }
}

/// ⟨ψ|op|ψ⟩.
pub fn expectation(state: &StateVector, op: &ComplexMatrix) -> Result<C64> {
    if op.rows() != state.dim() || op.cols() != state.dim() {
        return Err(Error::Dimension(format!(
            "operator {}x{} on state of dimension {}",
            op.rows(),
            op.cols(),
            state.dim()
        )));
    }
    let v = op.apply(state.amplitudes())?;
    Ok(state
        .amplitudes()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Inner product ⟨a|b⟩.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{kron, pauli_x, pauli_y, pauli_z};

    #[test]
    fn phi_plus_zz_stabilized() {
        let phi = StateVector::maximally_entangled(2);
        let zz = kron(&pauli_z(), &pauli_z()).unwrap();
        let e = phi.expectation(&zz).unwrap();
        assert!((e.re - 1.0).abs() < 1e-15 && e.im.abs() < 1e-15);
        // Eigenvector check as well.
        let v = zz.apply(phi.amplitudes()).unwrap();
        for (a, b) in v.iter().zip(phi.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_xyy() {
        let g = StateVector::ghz(3);
        let op = kron(&kron(&pauli_x(), &pauli_y()).unwrap(), &pauli_y()).unwrap();
        let e = g.expectation(&op).unwrap();
        assert!((e.re + 1.0).abs() < 1e-15 && e.im.abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(StateVector::from_real(vec![2], &[1.0, 1.0]).is_err());
        assert!(StateVector::from_real(vec![2, 2], &[1.0, 0.0]).is_err());
        let s = StateVector::normalized(vec![2], vec![C64::new(3.0, 0.0), C64::new(4.0, 0.0)])
            .unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let s = StateVector::maximally_entangled(2);
        assert!(s.expectation(&pauli_x()).is_err());
    }
}
