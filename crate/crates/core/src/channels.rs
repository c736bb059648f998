//! Two-use noisy channels with partial memory.
//!
//! With probability 1−μ the two qubits see independent noise (product Kraus
//! operators), with probability μ the same operation hits both:
//!
//! ε(ρ) = (1−μ) Σ Eᵘ ρ Eᵘ† + μ Σ Eᶜ ρ Eᶜ†
//!
//! Pauli probabilities are folded into the operators at construction; the
//! branch weights are applied when the two sets are combined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{pauli, tensor, validate_density, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "ad")]
    AmplitudeDamping,
    #[serde(rename = "pd")]
    PhaseDamping,
    #[serde(rename = "de")]
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
        ChannelKind::Depolarizing,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::Depolarizing => "de",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ChannelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ad" | "amplitude-damping" => Ok(ChannelKind::AmplitudeDamping),
            "pd" | "phase-damping" => Ok(ChannelKind::PhaseDamping),
            "de" | "depolarizing" => Ok(ChannelKind::Depolarizing),
            other => Err(format!("unknown channel '{other}' (expected ad, pd or de)")),
        }
    }
}

/// Channel kind, decoherence strength D and memory coefficient μ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub d: f64,
    pub mu: f64,
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: v,
            range: "[0, 1]",
        })
    }
}

impl ChannelConfig {
    pub fn new(kind: ChannelKind, d: f64, mu: f64) -> Result<Self> {
        check_unit("D", d)?;
        check_unit("mu", mu)?;
        Ok(Self { kind, d, mu })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Uncorrelated,
    Correlated,
}

/// Kraus operators of one branch, probabilities already folded in.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
    pub branch: Branch,
}

impl KrausSet {
    /// Σ E ρ E†
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = rho.rows();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, e| {
                &acc + &e.conjugate(rho)
            })
    }

    /// Σ E†E
    pub fn completeness(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(4, 4), |acc, e| {
                &acc + &(&e.adjoint() * e)
            })
    }
}

/// Single-qubit Pauli probabilities (index, Pₖ) for the Pauli-type channels.
///
/// Phase damping uses P₀ = 1 − D/2, P₃ = D/2 so that a single use scales
/// transverse Bloch components by 1 − D and D = 1 is complete dephasing.
/// Depolarizing uses P₀ = 1 − D, P₁ = P₂ = P₃ = D/3.
pub fn pauli_probabilities(kind: ChannelKind, d: f64) -> Option<Vec<(usize, f64)>> {
    match kind {
        ChannelKind::AmplitudeDamping => None,
        ChannelKind::PhaseDamping => Some(vec![(0, 1.0 - d / 2.0), (3, d / 2.0)]),
        ChannelKind::Depolarizing => {
            Some(vec![(0, 1.0 - d), (1, d / 3.0), (2, d / 3.0), (3, d / 3.0)])
        }
    }
}

fn damping_pair(d: f64) -> [ComplexMatrix; 2] {
    let a0 = ComplexMatrix::diag(&[(1.0 - d).sqrt(), 1.0]);
    let a1 = ComplexMatrix::from_real_rows(&[[0.0, 0.0], [d.sqrt(), 0.0]]);
    [a0, a1]
}

/// Independent-noise Kraus operators for two uses.
pub fn kraus_uncorrelated(kind: ChannelKind, d: f64) -> Result<KrausSet> {
    check_unit("D", d)?;
    let operators = match pauli_probabilities(kind, d) {
        None => {
            let a = damping_pair(d);
            a.iter()
                .flat_map(|ai| a.iter().map(move |aj| tensor(ai, aj)))
                .collect()
        }
        Some(probs) => probs
            .iter()
            .flat_map(|&(i, pi)| {
                probs
                    .iter()
                    .map(move |&(j, pj)| tensor(&pauli(i), &pauli(j)).scale_real((pi * pj).sqrt()))
            })
            .collect(),
    };
    Ok(KrausSet {
        operators,
        branch: Branch::Uncorrelated,
    })
}

/// Fully correlated Kraus operators for two uses.
pub fn kraus_correlated(kind: ChannelKind, d: f64) -> Result<KrausSet> {
    check_unit("D", d)?;
    let operators = match pauli_probabilities(kind, d) {
        None => {
            let e00 = ComplexMatrix::diag(&[(1.0 - d).sqrt(), 1.0, 1.0, 1.0]);
            let mut e11 = ComplexMatrix::zeros(4, 4);
            e11.set(3, 0, d.sqrt().into());
            vec![e00, e11]
        }
        Some(probs) => probs
            .iter()
            .map(|&(k, pk)| tensor(&pauli(k), &pauli(k)).scale_real(pk.sqrt()))
            .collect(),
    };
    Ok(KrausSet {
        operators,
        branch: Branch::Correlated,
    })
}

/// Both branches of a configured memory channel.
#[derive(Clone, Debug)]
pub struct MemoryChannel {
    pub config: ChannelConfig,
    pub uncorrelated: KrausSet,
    pub correlated: KrausSet,
}

impl MemoryChannel {
    pub fn new(config: ChannelConfig) -> Result<Self> {
        check_unit("mu", config.mu)?;
        Ok(Self {
            uncorrelated: kraus_uncorrelated(config.kind, config.d)?,
            correlated: kraus_correlated(config.kind, config.d)?,
            config,
        })
    }

    /// Applies the channel without validating the input.
    pub fn apply_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mu = self.config.mu;
        let u = self.uncorrelated.apply(rho).scale_real(1.0 - mu);
        let c = self.correlated.apply(rho).scale_real(mu);
        &u + &c
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if (rho.rows(), rho.cols()) != (4, 4) {
            return Err(Error::InvalidState(format!(
                "expected a 4x4 two-qubit state, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let diag = validate_density(rho);
        if !diag.passed {
            return Err(Error::InvalidState(format!("{diag:?}")));
        }
        Ok(self.apply_unchecked(rho))
    }

    /// ‖(1−μ)ΣEᵘ†Eᵘ + μΣEᶜ†Eᶜ − I₄‖_F
    pub fn completeness_residual(&self) -> f64 {
        let mu = self.config.mu;
        let sum = &self.uncorrelated.completeness().scale_real(1.0 - mu)
            + &self.correlated.completeness().scale_real(mu);
        sum.distance(&ComplexMatrix::identity(4))
    }
}

pub fn apply_memory_channel(rho: &ComplexMatrix, cfg: &ChannelConfig) -> Result<ComplexMatrix> {
    MemoryChannel::new(*cfg)?.apply(rho)
}

/// Completeness residual of the combined channel; ≤ 1e-12 means CPTP.
pub fn verify_cptp(cfg: &ChannelConfig) -> Result<f64> {
    Ok(MemoryChannel::new(*cfg)?.completeness_residual())
}
