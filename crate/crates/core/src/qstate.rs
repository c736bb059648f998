//! Resource and probe states, plus single-qubit Bloch vectors.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{pauli, tensor, validate_density, ComplexMatrix, DensityDiagnostics, ZERO};

/// Correlation coefficients (c₁, c₂, c₃) of the X-state resource
/// ¼(I⊗I + Σ cᵢ σᵢ⊗σᵢ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ResourceParams {
    /// Checks |cᵢ| ≤ 1 only. Physicality is checked by [`x_state`].
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for (name, v) in [("c1", c1), ("c2", c2), ("c3", c3)] {
            if !(v.is_finite() && v.abs() <= 1.0) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "[-1, 1]",
                });
            }
        }
        Ok(Self { c1, c2, c3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Whether every |cᵢ| = 1.
    pub fn is_bell(&self) -> bool {
        self.as_array()
            .iter()
            .all(|c| (c.abs() - 1.0).abs() < 1e-15)
    }
}

/// Weight θ ∈ [0, π] and phase φ ∈ [0, 2π) of a probe state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub theta: f64,
    pub phi: f64,
}

impl ProbeParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        Ok(Self { theta, phi })
    }

    /// Like [`ProbeParams::new`] but reduces φ modulo 2π first.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        let mut p = phi.rem_euclid(TAU);
        if p >= TAU {
            p = 0.0;
        }
        Self::new(theta, p)
    }
}

/// Real Bloch vector of a single-qubit state, ρ = ½(I + r·σ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.rx * o.rx + self.ry * o.ry + self.rz * o.rz
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.rx - o.rx, self.ry - o.ry, self.rz - o.rz)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.rx * s, self.ry * s, self.rz * s)
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let d = self.sub(o);
        d.rx.abs().max(d.ry.abs()).max(d.rz.abs())
    }

    /// ½(I + r·σ)
    pub fn to_density(&self) -> ComplexMatrix {
        let mut m = pauli(0);
        for (k, r) in [(1, self.rx), (2, self.ry), (3, self.rz)] {
            m = &m + &pauli(k).scale_real(r);
        }
        m.scale_real(0.5)
    }
}

/// ¼(σ₀⊗σ₀ + Σᵢ cᵢ σᵢ⊗σᵢ) together with its density diagnostics; no
/// physicality check.
pub fn x_state_unchecked(c: &ResourceParams) -> (ComplexMatrix, DensityDiagnostics) {
    let mut m = tensor(&pauli(0), &pauli(0));
    for (k, ck) in [(1, c.c1), (2, c.c2), (3, c.c3)] {
        m = &m + &tensor(&pauli(k), &pauli(k)).scale_real(ck);
    }
    let m = m.scale_real(0.25);
    let diag = validate_density(&m);
    (m, diag)
}

/// The X-state resource; fails with [`Error::Unphysical`] when it is not PSD.
pub fn x_state(c: &ResourceParams) -> Result<ComplexMatrix> {
    let (m, diag) = x_state_unchecked(c);
    if !diag.passed {
        return Err(Error::Unphysical {
            c1: c.c1,
            c2: c.c2,
            c3: c.c3,
            min_eigenvalue: diag.min_eigenvalue,
        });
    }
    Ok(m)
}

fn amplitudes(p: &ProbeParams) -> (Complex64, Complex64) {
    let a = Complex64::new((p.theta / 2.0).cos(), 0.0);
    let b = Complex64::from_polar((p.theta / 2.0).sin(), p.phi);
    (a, b)
}

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩ as a density matrix.
pub fn probe_single(p: &ProbeParams) -> ComplexMatrix {
    let (a, b) = amplitudes(p);
    ComplexMatrix::outer(&[a, b])
}

/// cos(θ/2)|00⟩ + e^{iφ} sin(θ/2)|11⟩ as a density matrix.
pub fn probe_double(p: &ProbeParams) -> ComplexMatrix {
    let (a, b) = amplitudes(p);
    ComplexMatrix::outer(&[a, ZERO, ZERO, b])
}

/// rₖ = tr(ρ σₖ). Expects a 2×2 matrix.
pub fn bloch_from_density(rho: &ComplexMatrix) -> BlochVector {
    debug_assert_eq!((rho.rows(), rho.cols()), (2, 2));
    let r = |k| (rho * &pauli(k)).trace().re;
    BlochVector::new(r(1), r(2), r(3))
}
