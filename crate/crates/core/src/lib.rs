//! Quantum Fisher information of states teleported through noisy channels
//! with memory.
//!
//! A two-qubit X-state resource passes through an amplitude-damping,
//! phase-damping or depolarizing channel whose two uses are correlated with
//! probability μ. The noisy resource then teleports a one- or two-qubit
//! probe, and the QFI of the probe's weight θ and phase φ is evaluated both
//! numerically and in closed form.
//!
//! ```
//! use memqfi::channels::{ChannelConfig, ChannelKind};
//! use memqfi::qfi::{qfi_teleported, Qubits};
//! use memqfi::qstate::{ProbeParams, ResourceParams};
//!
//! let cfg = ChannelConfig::new(ChannelKind::PhaseDamping, 0.4, 0.2).unwrap();
//! let c = ResourceParams::new(1.0, 1.0, -1.0).unwrap();
//! let at = ProbeParams::new(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
//! let r = qfi_teleported(&cfg, &c, &at, Qubits::One).unwrap();
//! assert!((r.f_theta - 1.0).abs() < 1e-6);
//! ```

pub mod analytic;
pub mod channels;
pub mod cli;
pub mod error;
pub mod qfi;
pub mod qmath;
pub mod qstate;
pub mod teleport;

pub use error::{Error, Result};
