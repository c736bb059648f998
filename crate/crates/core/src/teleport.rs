//! Standard teleportation with a mixed resource, seen as a Pauli channel.
//!
//! Measuring in the Bell basis and correcting locally turns the resource ρ
//! into the channel Λ(ρ_in) = Σᵢ pᵢ σᵢ ρ_in σᵢ with pᵢ = ⟨Ψⁱ|ρ|Ψⁱ⟩. The
//! pairing Ψⁱ ↔ σᵢ follows the index order below, so the singlet teleports
//! perfectly. Two independent copies of the resource teleport a two-qubit
//! state through Σᵢⱼ pᵢpⱼ (σᵢ⊗σⱼ) ρ (σᵢ⊗σⱼ).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{pauli, tensor, validate_density, ComplexMatrix, ZERO};

/// Bell states in the order Ψ⁰ = (|01⟩−|10⟩)/√2, Ψ¹ = (|00⟩−|11⟩)/√2,
/// Ψ² = (|00⟩+|11⟩)/√2, Ψ³ = (|01⟩+|10⟩)/√2.
pub fn bell_basis() -> [[Complex64; 4]; 4] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [
        [ZERO, h, -h, ZERO],
        [h, ZERO, ZERO, -h],
        [h, ZERO, ZERO, h],
        [ZERO, h, h, ZERO],
    ]
}

pub fn bell_state(i: usize) -> [Complex64; 4] {
    bell_basis()[i]
}

/// Weights of the four Bell components of a resource.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellProbabilities(pub [f64; 4]);

impl BellProbabilities {
    /// Clamps negatives to zero and renormalizes when the sum drifts by
    /// more than 1e-12.
    pub fn from_raw(mut p: [f64; 4]) -> Self {
        for x in p.iter_mut() {
            *x = x.clamp(0.0, 1.0);
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 && sum > 0.0 {
            for x in p.iter_mut() {
                *x /= sum;
            }
        }
        Self(p)
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    /// Λ(ρ) = Σᵢ pᵢ σᵢ ρ σᵢ on a single qubit.
    pub fn teleport_single(&self, probe: &ComplexMatrix) -> ComplexMatrix {
        (0..4).fold(ComplexMatrix::zeros(2, 2), |acc, i| {
            if self.0[i] == 0.0 {
                return acc;
            }
            &acc + &pauli(i).conjugate(probe).scale_real(self.0[i])
        })
    }

    /// Σᵢⱼ pᵢpⱼ (σᵢ⊗σⱼ) ρ (σᵢ⊗σⱼ) on a qubit pair.
    pub fn teleport_double(&self, probe: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let w = self.0[i] * self.0[j];
                if w == 0.0 {
                    continue;
                }
                let k = tensor(&pauli(i), &pauli(j));
                acc = &acc + &k.conjugate(probe).scale_real(w);
            }
        }
        acc
    }
}

fn require_density(m: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if (m.rows(), m.cols()) != (dim, dim) {
        return Err(Error::InvalidState(format!(
            "{what}: expected {dim}x{dim}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let diag = validate_density(m);
    if !diag.passed {
        return Err(Error::InvalidState(format!("{what}: {diag:?}")));
    }
    Ok(())
}

/// pᵢ = ⟨Ψⁱ|ρ|Ψⁱ⟩ for a valid two-qubit state.
pub fn bell_probabilities(rho_res: &ComplexMatrix) -> Result<BellProbabilities> {
    require_density(rho_res, 4, "resource")?;
    Ok(bell_probabilities_unchecked(rho_res))
}

pub(crate) fn bell_probabilities_unchecked(rho_res: &ComplexMatrix) -> BellProbabilities {
    let basis = bell_basis();
    let mut p = [0.0; 4];
    for (pi, psi) in p.iter_mut().zip(basis.iter()) {
        *pi = rho_res.sandwich(psi, psi).re;
    }
    BellProbabilities::from_raw(p)
}

pub fn teleport_single(rho_res: &ComplexMatrix, probe: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_density(probe, 2, "probe")?;
    Ok(bell_probabilities(rho_res)?.teleport_single(probe))
}

pub fn teleport_double(rho_res: &ComplexMatrix, probe2: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_density(probe2, 4, "probe")?;
    Ok(bell_probabilities(rho_res)?.teleport_double(probe2))
}
