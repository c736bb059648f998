//! Parameter sweeps and figure surfaces.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::CliError;
use crate::analytic::closed_form_qfi;
use crate::channels::{ChannelConfig, ChannelKind};
use crate::qfi::{family_qfi, teleported_family, QfiMethod, QfiResult, Qubits, DEFAULT_STEP};
use crate::qstate::{x_state, ProbeParams, ResourceParams};

pub const CSV_HEADER: &str = "kind,D,mu,theta,phi,qubits,f_theta,f_phi,method,residual";
pub const FIGURE_HEADER: &str = "D,mu,f_single,f_double";
/// A sweep fails when any |analytic − numeric| exceeds this.
pub const RESIDUAL_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub channels: Vec<ChannelKind>,
    pub d_grid: Grid,
    pub mu_grid: Grid,
    pub theta_grid: Grid,
    pub phi_grid: Grid,
    pub c: [f64; 3],
    pub qubits: Qubits,
    pub methods: Vec<QfiMethod>,
    pub step: f64,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            channels: vec![ChannelKind::Depolarizing],
            d_grid: Grid::new(0.0, 1.0, 11).expect("valid grid"),
            mu_grid: Grid::new(0.0, 1.0, 11).expect("valid grid"),
            theta_grid: Grid::point(FRAC_PI_2),
            phi_grid: Grid::point(0.0),
            c: [1.0, 1.0, -1.0],
            qubits: Qubits::One,
            methods: vec![QfiMethod::Analytic],
            step: DEFAULT_STEP,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sweep config serializes to TOML")
    }

    pub fn resource(&self) -> Result<ResourceParams, CliError> {
        ResourceParams::new(self.c[0], self.c[1], self.c[2]).map_err(|e| field_error("c", e))
    }

    /// Range checks plus a physicality check of the resource. Channel and
    /// method lists are sorted and deduplicated.
    pub fn validate(&mut self) -> Result<(), CliError> {
        if self.channels.is_empty() {
            return Err(field_error("channels", "at least one channel is required"));
        }
        if self.methods.is_empty() {
            return Err(field_error("methods", "at least one method is required"));
        }
        self.channels.sort();
        self.channels.dedup();
        self.methods.sort();
        self.methods.dedup();
        let checks = [
            ("d_grid", &self.d_grid, 0.0, 1.0, false),
            ("mu_grid", &self.mu_grid, 0.0, 1.0, false),
            ("theta_grid", &self.theta_grid, 0.0, PI, false),
            ("phi_grid", &self.phi_grid, 0.0, TAU, true),
        ];
        for (name, grid, lo, hi, open) in checks {
            grid.check_within(lo, hi, open)
                .map_err(|e| field_error(name, e))?;
        }
        if !(1e-7..=1e-3).contains(&self.step) {
            return Err(field_error(
                "step",
                format!("{} outside [1e-7, 1e-3]", self.step),
            ));
        }
        if self.qubits == Qubits::Two {
            for m in [QfiMethod::Analytic, QfiMethod::Bloch] {
                if self.methods.contains(&m) {
                    return Err(field_error(
                        "methods",
                        format!("{m} is only available for a single-qubit probe"),
                    ));
                }
            }
        }
        let c = self.resource()?;
        x_state(&c).map_err(|e| field_error("c", e))?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub kind: ChannelKind,
    #[serde(rename = "D")]
    pub d: f64,
    pub mu: f64,
    pub theta: f64,
    pub phi: f64,
    pub qubits: Qubits,
    pub f_theta: f64,
    pub f_phi: f64,
    pub method: QfiMethod,
    /// max(|ΔF_θ|, |ΔF_φ|) against the analytic row of the same point.
    pub residual: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

fn residual(a: &QfiResult, b: &QfiResult) -> f64 {
    (a.f_theta - b.f_theta).abs().max((a.f_phi - b.f_phi).abs())
}

fn sweep_block(
    cfg: &SweepConfig,
    c: &ResourceParams,
    kind: ChannelKind,
    d: f64,
    mu: f64,
) -> Result<Vec<SweepRecord>, CliError> {
    let channel = ChannelConfig::new(kind, d, mu)?;
    let numeric = cfg.methods.iter().any(|m| *m != QfiMethod::Analytic);
    let family = if numeric {
        Some(teleported_family(&channel, c, cfg.qubits)?)
    } else {
        None
    };
    let want = |m| cfg.methods.contains(&m);
    let mut out = Vec::new();
    for theta in cfg.theta_grid.values() {
        for phi in cfg.phi_grid.values() {
            let at = ProbeParams::new(theta, phi)?;
            let analytic = want(QfiMethod::Analytic).then(|| closed_form_qfi(kind, d, mu, c, &at));
            let pipeline = match &family {
                Some(f) => Some(family_qfi(f, &at, cfg.step)?),
                None => None,
            };
            let mut rows = Vec::with_capacity(3);
            if let Some(a) = analytic {
                rows.push((a, None));
            }
            if let Some(p) = pipeline {
                if want(QfiMethod::Spectral) {
                    rows.push((p.spectral, analytic.map(|a| residual(&p.spectral, &a))));
                }
                if want(QfiMethod::Bloch) {
                    if let Some(b) = p.bloch {
                        rows.push((b, analytic.map(|a| residual(&b, &a))));
                    }
                }
            }
            out.extend(rows.into_iter().map(|(r, res)| SweepRecord {
                kind,
                d,
                mu,
                theta,
                phi,
                qubits: cfg.qubits,
                f_theta: r.f_theta,
                f_phi: r.f_phi,
                method: r.method,
                residual: res,
            }));
        }
    }
    Ok(out)
}

/// Evaluates every grid point. Work is spread over the current rayon pool;
/// records come back in (kind, D, μ, θ, φ, method) index order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput, CliError> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let c = cfg.resource()?;
    let mut blocks = Vec::new();
    for &kind in &cfg.channels {
        for d in cfg.d_grid.values() {
            for mu in cfg.mu_grid.values() {
                blocks.push((kind, d, mu));
            }
        }
    }
    let results: Vec<Result<Vec<SweepRecord>, CliError>> = blocks
        .par_iter()
        .map(|&(kind, d, mu)| sweep_block(&cfg, &c, kind, d, mu))
        .collect();
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    let max_residual = records
        .iter()
        .filter_map(|r| r.residual)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        });
    let summary = SweepSummary {
        rows: records.len(),
        max_residual,
        tolerance: RESIDUAL_TOLERANCE,
        passed: max_residual.is_none_or(|m| m <= RESIDUAL_TOLERANCE),
    };
    Ok(SweepOutput { records, summary })
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[SweepRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.kind,
            fmt_num(r.d),
            fmt_num(r.mu),
            fmt_num(r.theta),
            fmt_num(r.phi),
            r.qubits.count(),
            fmt_num(r.f_theta),
            fmt_num(r.f_phi),
            r.method,
            r.residual.map(fmt_num).unwrap_or_default()
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(output: &SweepOutput, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, output)?;
    writeln!(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureId {
    /// F_θ surfaces.
    Theta,
    /// F_φ surfaces.
    Phi,
}

impl FigureId {
    pub fn from_number(n: u8) -> Result<Self, CliError> {
        match n {
            1 => Ok(FigureId::Theta),
            2 => Ok(FigureId::Phi),
            other => Err(CliError::Config(format!(
                "figure id must be 1 or 2, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FigureRow {
    #[serde(rename = "D")]
    pub d: f64,
    pub mu: f64,
    pub f_single: f64,
    pub f_double: f64,
}

pub const DEFAULT_FIGURE_POINTS: usize = 41;

/// Single- and two-qubit QFI over D, μ ∈ [0, 1] at θ = π/2, φ = 0 with
/// c = (s, s, −1), s = ±1.
pub fn figure_data(
    id: FigureId,
    kind: ChannelKind,
    positive: bool,
    points: usize,
) -> Result<Vec<FigureRow>, CliError> {
    let grid = Grid::new(0.0, 1.0, points).map_err(CliError::Config)?;
    if points < 2 {
        return Err(CliError::Config(
            "figure grid needs at least 2 points".into(),
        ));
    }
    let s = if positive { 1.0 } else { -1.0 };
    let c = ResourceParams::new(s, s, -1.0)?;
    let at = ProbeParams::new(FRAC_PI_2, 0.0)?;
    let pick = |r: QfiResult| match id {
        FigureId::Theta => r.f_theta,
        FigureId::Phi => r.f_phi,
    };
    let cells: Vec<(f64, f64)> = grid
        .values()
        .into_iter()
        .flat_map(|d| grid.values().into_iter().map(move |mu| (d, mu)))
        .collect();
    cells
        .par_iter()
        .map(|&(d, mu)| {
            let cfg = ChannelConfig::new(kind, d, mu)?;
            let single = family_qfi(
                &teleported_family(&cfg, &c, Qubits::One)?,
                &at,
                DEFAULT_STEP,
            )?;
            let double = family_qfi(
                &teleported_family(&cfg, &c, Qubits::Two)?,
                &at,
                DEFAULT_STEP,
            )?;
            Ok(FigureRow {
                d,
                mu,
                f_single: pick(single.spectral),
                f_double: pick(double.spectral),
            })
        })
        .collect()
}

pub fn write_figure_csv<W: Write>(rows: &[FigureRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{FIGURE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_num(r.d),
            fmt_num(r.mu),
            fmt_num(r.f_single),
            fmt_num(r.f_double)
        )?;
    }
    Ok(())
}
