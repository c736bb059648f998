//! Numeric quantum Fisher information.
//!
//! Two estimators:
//!
//! * spectral: F = Σ_{λᵢ+λⱼ>ε} 2|⟨ψᵢ|∂ρ|ψⱼ⟩|² / (λᵢ+λⱼ), with ∂ρ from finite
//!   differences of ρ itself (never of eigenvectors, which are ill-defined
//!   at degeneracies);
//! * Bloch: F = |∂r|² + (r·∂r)² / (1 − |r|²) for a single qubit, reducing to
//!   |∂r|² on pure states.
//!
//! The teleported families compose resource → memory channel → Bell-basis
//! teleportation → probe, and are the "brute force" side that the closed
//! forms in [`crate::analytic`] are checked against.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelConfig, MemoryChannel};
use crate::error::{Error, Result};
use crate::qmath::{eigh, ComplexMatrix};
use crate::qstate::{
    bloch_from_density, probe_double, probe_single, x_state, BlochVector, ProbeParams,
    ResourceParams,
};
use crate::teleport::{bell_probabilities_unchecked, BellProbabilities};

pub const DEFAULT_STEP: f64 = 1e-5;
/// Pairs with λᵢ + λⱼ at or below this are dropped from the spectral sum.
pub const MODE_CUTOFF: f64 = 1e-10;
/// 1 − |r|² at or below this routes the Bloch formula to its pure branch.
pub const PURE_CUTOFF: f64 = 1e-9;
const NEGATIVE_CLAMP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Theta,
    Phi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Qubits {
    One,
    Two,
}

impl TryFrom<u8> for Qubits {
    type Error = String;
    fn try_from(n: u8) -> std::result::Result<Self, String> {
        match n {
            1 => Ok(Qubits::One),
            2 => Ok(Qubits::Two),
            other => Err(format!("qubits must be 1 or 2, got {other}")),
        }
    }
}

impl From<Qubits> for u8 {
    fn from(q: Qubits) -> u8 {
        q.count()
    }
}

impl Qubits {
    pub fn count(&self) -> u8 {
        match self {
            Qubits::One => 1,
            Qubits::Two => 2,
        }
    }
}

impl FromStr for Qubits {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let n: u8 = s
            .trim()
            .parse()
            .map_err(|_| format!("qubits must be 1 or 2, got '{}'", s.trim()))?;
        Qubits::try_from(n)
    }
}

/// Order matters: CSV rows sort by this within a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QfiMethod {
    Analytic,
    Spectral,
    Bloch,
}

impl QfiMethod {
    pub fn name(&self) -> &'static str {
        match self {
            QfiMethod::Analytic => "analytic",
            QfiMethod::Spectral => "spectral",
            QfiMethod::Bloch => "bloch",
        }
    }
}

impl fmt::Display for QfiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QfiMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(QfiMethod::Analytic),
            "spectral" => Ok(QfiMethod::Spectral),
            "bloch" => Ok(QfiMethod::Bloch),
            other => Err(format!(
                "unknown method '{other}' (expected analytic, spectral or bloch)"
            )),
        }
    }
}

type Evaluator = dyn Fn(&ProbeParams) -> ComplexMatrix + Send + Sync;

/// A deterministic map (θ, φ) → density matrix of fixed dimension.
#[derive(Clone)]
pub struct ParamFamily {
    evaluator: Arc<Evaluator>,
    dimension: usize,
    description: String,
}

impl ParamFamily {
    pub fn new<F>(dimension: usize, description: impl Into<String>, f: F) -> Self
    where
        F: Fn(&ProbeParams) -> ComplexMatrix + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(f),
            dimension,
            description: description.into(),
        }
    }

    pub fn eval(&self, at: &ProbeParams) -> ComplexMatrix {
        (self.evaluator)(at)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamFamily")
            .field("dimension", &self.dimension)
            .field("description", &self.description)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    Central,
    /// One-sided second order, used at θ = 0.
    Forward,
    /// One-sided second order, used at θ = π.
    Backward,
}

#[derive(Clone, Debug)]
pub struct Derivative {
    pub rho: ComplexMatrix,
    pub drho: ComplexMatrix,
    pub stencil: Stencil,
}

fn check_step(h: f64) -> Result<()> {
    if (1e-7..=1e-3).contains(&h) {
        Ok(())
    } else {
        Err(Error::InvalidStep(h))
    }
}

/// ρ and ∂ρ at `at`. φ wraps modulo 2π; θ switches to a one-sided stencil
/// when θ ± h leaves [0, π].
pub fn derivative(
    family: &ParamFamily,
    which: Param,
    at: &ProbeParams,
    h: f64,
) -> Result<Derivative> {
    check_step(h)?;
    let rho = family.eval(at);
    let shifted = |k: f64| -> Result<ComplexMatrix> {
        let p = match which {
            Param::Theta => ProbeParams::new(at.theta + k * h, at.phi)?,
            Param::Phi => ProbeParams::wrapped(at.theta, at.phi + k * h)?,
        };
        Ok(family.eval(&p))
    };
    let (drho, stencil) = match which {
        Param::Theta if at.theta - h < 0.0 => {
            let f1 = shifted(1.0)?;
            let f2 = shifted(2.0)?;
            let d = &(&f1.scale_real(4.0) - &rho.scale_real(3.0)) - &f2;
            (d.scale_real(0.5 / h), Stencil::Forward)
        }
        Param::Theta if at.theta + h > PI => {
            let b1 = shifted(-1.0)?;
            let b2 = shifted(-2.0)?;
            let d = &(&rho.scale_real(3.0) - &b1.scale_real(4.0)) + &b2;
            (d.scale_real(0.5 / h), Stencil::Backward)
        }
        _ => {
            let fwd = shifted(1.0)?;
            let bwd = shifted(-1.0)?;
            ((&fwd - &bwd).scale_real(0.5 / h), Stencil::Central)
        }
    };
    Ok(Derivative { rho, drho, stencil })
}

/// Spectral QFI of a state and its derivative; also returns the number of
/// (i, j) pairs dropped by the mode cutoff.
pub fn spectral_qfi_from(rho: &ComplexMatrix, drho: &ComplexMatrix) -> Result<(f64, usize)> {
    let spec = eigh(rho)?;
    let lambdas = spec.clamped_eigenvalues();
    let vecs = &spec.eigenvectors;
    let n = lambdas.len();
    let mut f = 0.0;
    let mut dropped = 0;
    for i in 0..n {
        for j in 0..n {
            let s = lambdas[i] + lambdas[j];
            if s <= MODE_CUTOFF {
                dropped += 1;
                continue;
            }
            f += 2.0 * drho.sandwich(&vecs[i], &vecs[j]).norm_sqr() / s;
        }
    }
    Ok((clamp_qfi(f), dropped))
}

fn clamp_qfi(f: f64) -> f64 {
    if (-NEGATIVE_CLAMP..0.0).contains(&f) {
        0.0
    } else {
        f
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub dropped_modes: usize,
    pub stencil: Stencil,
}

pub fn qfi_spectral_detailed(
    family: &ParamFamily,
    which: Param,
    at: &ProbeParams,
    h: f64,
) -> Result<SpectralEstimate> {
    let d = derivative(family, which, at, h)?;
    let (value, dropped_modes) = spectral_qfi_from(&d.rho, &d.drho)?;
    Ok(SpectralEstimate {
        value,
        dropped_modes,
        stencil: d.stencil,
    })
}

pub fn qfi_spectral(family: &ParamFamily, which: Param, at: &ProbeParams, h: f64) -> Result<f64> {
    Ok(qfi_spectral_detailed(family, which, at, h)?.value)
}

/// Bloch-vector QFI of a single qubit.
pub fn qfi_bloch(r: &BlochVector, dr: &BlochVector) -> Result<f64> {
    let norm = r.norm();
    if norm > 1.0 + 1e-8 {
        return Err(Error::BlochOutOfBall { norm });
    }
    let mixedness = 1.0 - r.norm_sqr();
    let f = if mixedness > PURE_CUTOFF {
        dr.norm_sqr() + r.dot(dr).powi(2) / mixedness
    } else {
        dr.norm_sqr()
    };
    Ok(clamp_qfi(f))
}

fn noisy_resource_probabilities(
    cfg: &ChannelConfig,
    c: &ResourceParams,
) -> Result<BellProbabilities> {
    let rho = x_state(c)?;
    let noisy = MemoryChannel::new(*cfg)?.apply(&rho)?;
    Ok(bell_probabilities_unchecked(&noisy))
}

/// (θ, φ) ↦ teleport_single(ε(x_state(c)), probe_single(θ, φ)).
pub fn teleported_family_single(cfg: &ChannelConfig, c: &ResourceParams) -> Result<ParamFamily> {
    let p = noisy_resource_probabilities(cfg, c)?;
    let desc = format!(
        "single-qubit probe via {} D={} mu={} c=({}, {}, {})",
        cfg.kind, cfg.d, cfg.mu, c.c1, c.c2, c.c3
    );
    Ok(ParamFamily::new(2, desc, move |at| {
        p.teleport_single(&probe_single(at))
    }))
}

/// (θ, φ) ↦ teleport_double(ε(x_state(c)), probe_double(θ, φ)).
pub fn teleported_family_double(cfg: &ChannelConfig, c: &ResourceParams) -> Result<ParamFamily> {
    let p = noisy_resource_probabilities(cfg, c)?;
    let desc = format!(
        "two-qubit probe via two copies of {} D={} mu={} c=({}, {}, {})",
        cfg.kind, cfg.d, cfg.mu, c.c1, c.c2, c.c3
    );
    Ok(ParamFamily::new(4, desc, move |at| {
        p.teleport_double(&probe_double(at))
    }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QfiDiagnostics {
    /// Finite-difference step (numeric methods only).
    pub step: Option<f64>,
    pub dropped_modes: usize,
    /// θ derivative taken with a one-sided stencil.
    pub one_sided: bool,
    /// max(|F_θ spectral − F_θ Bloch|, |F_φ spectral − F_φ Bloch|), single-qubit only.
    pub bloch_residual: Option<f64>,
    /// A closed form fell back to its pure-state branch.
    pub pure_branch: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub f_theta: f64,
    pub f_phi: f64,
    pub method: QfiMethod,
    pub diagnostics: QfiDiagnostics,
}

/// Spectral (and, for one qubit, Bloch) QFI of the numeric pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineQfi {
    pub spectral: QfiResult,
    pub bloch: Option<QfiResult>,
}

/// Evaluates F_θ and F_φ of a family with both estimators where possible.
pub fn family_qfi(family: &ParamFamily, at: &ProbeParams, h: f64) -> Result<PipelineQfi> {
    let dt = derivative(family, Param::Theta, at, h)?;
    let dp = derivative(family, Param::Phi, at, h)?;
    let (ft, drop_t) = spectral_qfi_from(&dt.rho, &dt.drho)?;
    let (fp, drop_p) = spectral_qfi_from(&dp.rho, &dp.drho)?;
    let one_sided = dt.stencil != Stencil::Central;

    let bloch = if family.dimension() == 2 {
        let r = bloch_from_density(&dt.rho);
        let bt = qfi_bloch(&r, &bloch_from_density(&dt.drho))?;
        let bp = qfi_bloch(&r, &bloch_from_density(&dp.drho))?;
        Some((bt, bp))
    } else {
        None
    };
    let residual = bloch.map(|(bt, bp)| (ft - bt).abs().max((fp - bp).abs()));
    let diagnostics = QfiDiagnostics {
        step: Some(h),
        dropped_modes: drop_t + drop_p,
        one_sided,
        bloch_residual: residual,
        pure_branch: false,
    };
    Ok(PipelineQfi {
        spectral: QfiResult {
            f_theta: ft,
            f_phi: fp,
            method: QfiMethod::Spectral,
            diagnostics,
        },
        bloch: bloch.map(|(bt, bp)| QfiResult {
            f_theta: bt,
            f_phi: bp,
            method: QfiMethod::Bloch,
            diagnostics,
        }),
    })
}

pub fn teleported_family(
    cfg: &ChannelConfig,
    c: &ResourceParams,
    qubits: Qubits,
) -> Result<ParamFamily> {
    match qubits {
        Qubits::One => teleported_family_single(cfg, c),
        Qubits::Two => teleported_family_double(cfg, c),
    }
}

/// Spectral QFI of the teleported probe; single-qubit results carry the
/// Bloch cross-check residual in their diagnostics.
pub fn qfi_teleported(
    cfg: &ChannelConfig,
    c: &ResourceParams,
    at: &ProbeParams,
    qubits: Qubits,
) -> Result<QfiResult> {
    qfi_teleported_with_step(cfg, c, at, qubits, DEFAULT_STEP)
}

pub fn qfi_teleported_with_step(
    cfg: &ChannelConfig,
    c: &ResourceParams,
    at: &ProbeParams,
    qubits: Qubits,
    h: f64,
) -> Result<QfiResult> {
    let family = teleported_family(cfg, c, qubits)?;
    Ok(family_qfi(&family, at, h)?.spectral)
}
