//! Self-check suite behind `memqfi verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::analytic::{
    ad_equator_qfi, ad_min_location, closed_form_qfi, golden_section_min, pd_threshold,
};
use crate::channels::{ChannelConfig, ChannelKind, MemoryChannel};
use crate::error::Result;
use crate::qfi::{
    family_qfi, teleported_family, teleported_family_single, PipelineQfi, Qubits, DEFAULT_STEP,
};
use crate::qmath::validate_density;
use crate::qstate::{probe_double, probe_single, x_state, ProbeParams, ResourceParams};
use crate::teleport::{teleport_double, teleport_single};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    /// Coarse grids.
    Quick,
    /// Full acceptance grids.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation from the expected value.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub passed: bool,
    pub failed: usize,
    pub checks: Vec<CheckOutcome>,
    pub elapsed_seconds: f64,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!(
                "{status} {:<28} max deviation {:.3e} (tol {:.1e}) {}\n",
                c.name, c.max_deviation, c.tolerance, c.detail
            ));
        }
        s.push_str(&format!(
            "{} of {} checks passed in {:.2} s\n",
            self.checks.len() - self.failed,
            self.checks.len(),
            self.elapsed_seconds
        ));
        s
    }
}

/// Fault injected into the suite to show that failures surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Scales one Kraus operator of the memoryless branch by 1.01.
    KrausWeight,
}

struct Sizes {
    dm: usize,
    theta: usize,
    phi: usize,
    ordering: usize,
}

impl VerifyLevel {
    fn sizes(&self) -> Sizes {
        match self {
            VerifyLevel::Quick => Sizes {
                dm: 5,
                theta: 5,
                phi: 4,
                ordering: 6,
            },
            VerifyLevel::Full => Sizes {
                dm: 11,
                theta: 9,
                phi: 8,
                ordering: 21,
            },
        }
    }
}

fn unit(n: usize) -> Vec<f64> {
    Grid::new(0.0, 1.0, n).expect("n >= 2").values()
}

fn thetas(n: usize) -> Vec<f64> {
    Grid::new(0.0, PI, n).expect("n >= 2").values()
}

fn phis(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

fn bell_resources() -> Vec<ResourceParams> {
    [1.0, -1.0]
        .iter()
        .map(|&s| ResourceParams {
            c1: s,
            c2: s,
            c3: -1.0,
        })
        .collect()
}

fn test_resources() -> Vec<ResourceParams> {
    let mut r = bell_resources();
    r.push(ResourceParams {
        c1: 0.8,
        c2: 0.6,
        c3: -0.7,
    });
    r
}

/// Physical X-state coefficients on a coarse lattice.
fn physical_resources() -> Vec<ResourceParams> {
    let vals = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut out = Vec::new();
    for &c1 in &vals {
        for &c2 in &vals {
            for &c3 in &vals {
                let c = ResourceParams { c1, c2, c3 };
                if x_state(&c).is_ok() {
                    out.push(c);
                }
            }
        }
    }
    out
}

struct Tally {
    max: f64,
    tol: f64,
    failures: usize,
    detail: String,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Self {
            max: 0.0,
            tol,
            failures: 0,
            detail: String::new(),
        }
    }

    fn record(&mut self, dev: f64, ctx: impl FnOnce() -> String) {
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev > self.max {
            self.max = dev;
        }
        if dev > self.tol {
            if self.failures == 0 {
                self.detail = ctx();
            }
            self.failures += 1;
        }
    }

    fn finish(self, name: &'static str) -> CheckOutcome {
        let detail = if self.failures == 0 {
            String::new()
        } else {
            format!("{} violations, first at {}", self.failures, self.detail)
        };
        CheckOutcome {
            name,
            passed: self.failures == 0,
            max_deviation: self.max,
            tolerance: self.tol,
            detail,
        }
    }
}

fn error_outcome(name: &'static str, e: crate::Error) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: false,
        max_deviation: f64::INFINITY,
        tolerance: 0.0,
        detail: e.to_string(),
    }
}

fn at(theta: f64, phi: f64) -> ProbeParams {
    ProbeParams { theta, phi }
}

fn cptp(level: VerifyLevel, fault: Option<Fault>) -> Result<Tally> {
    let n = if level == VerifyLevel::Full { 21 } else { 5 };
    let mut t = Tally::new(1e-12);
    for kind in ChannelKind::ALL {
        for d in unit(n) {
            for mu in unit(n) {
                let mut ch = MemoryChannel::new(ChannelConfig::new(kind, d, mu)?)?;
                if fault == Some(Fault::KrausWeight) {
                    let op = &mut ch.uncorrelated.operators[0];
                    *op = op.scale_real(1.01);
                }
                t.record(ch.completeness_residual(), || {
                    format!("{kind} D={d} mu={mu}")
                });
            }
        }
    }
    Ok(t)
}

fn x_form_preserved(level: VerifyLevel) -> Result<Tally> {
    let n = level.sizes().dm.min(5);
    let mut t = Tally::new(1e-12);
    for c in physical_resources() {
        let rho = x_state(&c)?;
        for kind in ChannelKind::ALL {
            for d in unit(n) {
                for mu in unit(n) {
                    let out = MemoryChannel::new(ChannelConfig::new(kind, d, mu)?)?.apply(&rho)?;
                    let diag = validate_density(&out);
                    let mut off_x: f64 = 0.0;
                    for i in 0..4 {
                        for j in 0..4 {
                            if i != j && i + j != 3 {
                                off_x = off_x.max(out.get(i, j).norm());
                            }
                        }
                    }
                    let dev = diag
                        .trace_residual
                        .max(-diag.min_eigenvalue.min(0.0))
                        .max(off_x);
                    t.record(dev, || format!("{kind} D={d} mu={mu} c={:?}", c.as_array()));
                }
            }
        }
    }
    Ok(t)
}

fn perfect_teleportation(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let singlet = x_state(&ResourceParams {
        c1: -1.0,
        c2: -1.0,
        c3: -1.0,
    })?;
    let mut t = Tally::new(1e-12);
    for kind in ChannelKind::ALL {
        let clean = MemoryChannel::new(ChannelConfig::new(kind, 0.0, 0.5)?)?.apply(&singlet)?;
        for theta in thetas(s.theta) {
            for phi in phis(s.phi) {
                let p = at(theta, phi);
                let one = probe_single(&p);
                let two = probe_double(&p);
                t.record(teleport_single(&clean, &one)?.distance(&one), || {
                    format!("single {p:?}")
                });
                t.record(teleport_double(&clean, &two)?.distance(&two), || {
                    format!("double {p:?}")
                });
            }
        }
    }
    Ok(t)
}

fn analytic_vs_spectral(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let mut t = Tally::new(1e-6);
    for kind in ChannelKind::ALL {
        for c in test_resources() {
            for d in unit(s.dm) {
                for mu in unit(s.dm) {
                    let fam = teleported_family_single(&ChannelConfig::new(kind, d, mu)?, &c)?;
                    for theta in thetas(s.theta) {
                        for phi in phis(s.phi) {
                            let p = at(theta, phi);
                            let num = family_qfi(&fam, &p, DEFAULT_STEP)?.spectral;
                            let cf = closed_form_qfi(kind, d, mu, &c, &p);
                            let dev = (num.f_theta - cf.f_theta)
                                .abs()
                                .max((num.f_phi - cf.f_phi).abs());
                            t.record(dev, || {
                                format!(
                                    "{kind} D={d} mu={mu} theta={theta} phi={phi} c={:?}",
                                    c.as_array()
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(t)
}

fn spectral_vs_bloch(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let n = s.dm.min(5);
    let mut t = Tally::new(1e-6);
    let c = ResourceParams {
        c1: 0.8,
        c2: 0.6,
        c3: -0.7,
    };
    for kind in ChannelKind::ALL {
        for d in unit(n) {
            for mu in unit(n) {
                let fam = teleported_family_single(&ChannelConfig::new(kind, d, mu)?, &c)?;
                for theta in thetas(n) {
                    for phi in phis(s.phi) {
                        let r = family_qfi(&fam, &at(theta, phi), DEFAULT_STEP)?;
                        let dev = r
                            .spectral
                            .diagnostics
                            .bloch_residual
                            .unwrap_or(f64::INFINITY);
                        t.record(dev, || {
                            format!("{kind} D={d} mu={mu} theta={theta} phi={phi}")
                        });
                    }
                }
            }
        }
    }
    Ok(t)
}

fn memory_recovery(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let mut t = Tally::new(1e-6);
    for kind in ChannelKind::ALL {
        for c in bell_resources() {
            for d in unit(s.dm.min(5)) {
                let fam = teleported_family_single(&ChannelConfig::new(kind, d, 1.0)?, &c)?;
                for theta in thetas(s.theta) {
                    for phi in phis(s.phi) {
                        let r = family_qfi(&fam, &at(theta, phi), DEFAULT_STEP)?.spectral;
                        let dev = (r.f_theta - 1.0)
                            .abs()
                            .max((r.f_phi - theta.sin().powi(2)).abs());
                        t.record(dev, || format!("{kind} D={d} theta={theta} phi={phi}"));
                    }
                }
            }
        }
    }
    Ok(t)
}

fn pd_immunity(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let mut t = Tally::new(1e-9);
    for c in test_resources() {
        for d in unit(s.dm) {
            for mu in unit(s.dm) {
                let r = closed_form_qfi(ChannelKind::PhaseDamping, d, mu, &c, &at(FRAC_PI_2, 0.0));
                t.record((r.f_theta - c.c3 * c.c3).abs(), || format!("D={d} mu={mu}"));
            }
        }
    }
    Ok(t)
}

fn pd_threshold_check(_: VerifyLevel) -> Result<Tally> {
    let c = ResourceParams {
        c1: 1.0,
        c2: 1.0,
        c3: 0.5,
    };
    let d = 0.5;
    let mut t = Tally::new(1e-9);
    let r = pd_threshold(&c, d, 0.0)?;
    let Some(m) = r.mu_star else {
        t.record(f64::INFINITY, || "no threshold".into());
        return Ok(t);
    };
    t.record((m - 1.0 / 3.0).abs(), || format!("mu*={m}"));
    let gap = |mu: f64| {
        let f =
            |theta| closed_form_qfi(ChannelKind::PhaseDamping, d, mu, &c, &at(theta, 0.0)).f_theta;
        f(0.0) - f(FRAC_PI_2)
    };
    t.record(gap(m).abs(), || format!("gap at mu*={m}"));
    let (lo, hi) = (gap(m - 0.01), gap(m + 0.01));
    if lo * hi >= 0.0 {
        t.record(f64::INFINITY, || format!("no sign flip: {lo} {hi}"));
    }
    Ok(t)
}

fn ad_minimum(_: VerifyLevel) -> Result<Tally> {
    let mut t = Tally::new(1e-6);
    for c3 in [0.25, 0.5, 0.75] {
        for mu in [0.0, 0.3, 0.7] {
            let numeric = golden_section_min(|d| ad_equator_qfi(c3, d, mu), 0.0, 1.0, 1e-12);
            let formula = ad_min_location(c3, mu)?;
            t.record((numeric - formula).abs(), || format!("c3={c3} mu={mu}"));
        }
    }
    t.record((ad_min_location(-1.0, 0.0)? - 0.5).abs(), || {
        "c3=-1 mu=0".into()
    });
    Ok(t)
}

fn de_closed_form(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let mut t = Tally::new(1e-9);
    let kind = ChannelKind::Depolarizing;
    let eq =
        |d, mu, c: &ResourceParams| closed_form_qfi(kind, d, mu, c, &at(FRAC_PI_2, 0.0)).f_theta;
    for c in test_resources() {
        for d in unit(s.dm) {
            for mu in unit(s.dm) {
                let l = 9.0 - 8.0 * (3.0 - 2.0 * d) * d * (1.0 - mu);
                let want = l * l * c.c3 * c.c3 / 81.0;
                t.record((eq(d, mu, &c) - want).abs(), || format!("D={d} mu={mu}"));
            }
        }
    }
    for c in bell_resources() {
        let ds: Vec<f64> = (0..=30).map(|k| 0.75 * k as f64 / 30.0).collect();
        for mu in unit(s.dm).into_iter().filter(|m| *m < 1.0) {
            for w in ds.windows(2) {
                if eq(w[1], mu, &c) >= eq(w[0], mu, &c) {
                    t.record(f64::INFINITY, || {
                        format!("not decreasing in D at mu={mu} D={}", w[1])
                    });
                }
            }
        }
        for d in unit(s.dm) {
            let mus = unit(21);
            for w in mus.windows(2) {
                let drop = eq(d, w[0], &c) - eq(d, w[1], &c);
                t.record(drop.max(0.0), || {
                    format!("decreasing in mu at D={d} mu={}", w[1])
                });
            }
        }
    }
    Ok(t)
}

fn pipeline(
    kind: ChannelKind,
    d: f64,
    mu: f64,
    c: &ResourceParams,
    q: Qubits,
) -> Result<PipelineQfi> {
    let fam = teleported_family(&ChannelConfig::new(kind, d, mu)?, c, q)?;
    family_qfi(&fam, &at(FRAC_PI_2, 0.0), DEFAULT_STEP)
}

/// Observed ordering of single- against two-qubit QFI at θ = π/2:
/// F_θ(double) ≥ F_θ(single) and F_φ(double) ≤ F_φ(single).
fn single_vs_double(level: VerifyLevel) -> Result<Tally> {
    let n = level.sizes().ordering;
    let mut t = Tally::new(1e-8);
    for kind in ChannelKind::ALL {
        for c in bell_resources() {
            for d in unit(n) {
                for mu in unit(n) {
                    let one = pipeline(kind, d, mu, &c, Qubits::One)?.spectral;
                    let two = pipeline(kind, d, mu, &c, Qubits::Two)?.spectral;
                    let dev = (one.f_theta - two.f_theta)
                        .max(two.f_phi - one.f_phi)
                        .max(0.0);
                    t.record(dev, || format!("{kind} D={d} mu={mu} c={:?}", c.as_array()));
                }
            }
        }
    }
    Ok(t)
}

fn phi_vanishes_at_poles(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let mut t = Tally::new(1e-8);
    for kind in ChannelKind::ALL {
        for c in test_resources() {
            for q in [Qubits::One, Qubits::Two] {
                for d in unit(s.dm.min(5)) {
                    for mu in unit(s.dm.min(5)) {
                        let fam = teleported_family(&ChannelConfig::new(kind, d, mu)?, &c, q)?;
                        for theta in [0.0, PI] {
                            for phi in phis(s.phi) {
                                let r = family_qfi(&fam, &at(theta, phi), DEFAULT_STEP)?.spectral;
                                t.record(r.f_phi, || format!("{kind} D={d} mu={mu} theta={theta}"));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(t)
}

fn theta_symmetry(level: VerifyLevel) -> Result<Tally> {
    let s = level.sizes();
    let mut t = Tally::new(1e-8);
    for kind in ChannelKind::ALL {
        for c in test_resources() {
            for d in unit(s.dm.min(5)) {
                for mu in unit(s.dm.min(5)) {
                    for theta in thetas(s.theta) {
                        for phi in phis(s.phi) {
                            let a = closed_form_qfi(kind, d, mu, &c, &at(theta, phi)).f_theta;
                            let b = closed_form_qfi(kind, d, mu, &c, &at(PI - theta, phi)).f_theta;
                            t.record((a - b).abs(), || {
                                format!("{kind} D={d} mu={mu} theta={theta}")
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(t)
}

type CheckFn = fn(VerifyLevel) -> Result<Tally>;

const CHECKS: [(&str, CheckFn); 12] = [
    ("x_form_preserved", x_form_preserved),
    ("perfect_teleportation", perfect_teleportation),
    ("analytic_vs_spectral", analytic_vs_spectral),
    ("spectral_vs_bloch", spectral_vs_bloch),
    ("memory_recovery", memory_recovery),
    ("pd_immunity", pd_immunity),
    ("pd_threshold", pd_threshold_check),
    ("ad_minimum", ad_minimum),
    ("de_closed_form", de_closed_form),
    ("single_vs_double_ordering", single_vs_double),
    ("phi_vanishes_at_poles", phi_vanishes_at_poles),
    ("theta_symmetry", theta_symmetry),
];

/// Runs every check on the current rayon pool; the report lists checks in a
/// fixed order.
pub fn run_verify(level: VerifyLevel, fault: Option<Fault>) -> VerifyReport {
    let start = Instant::now();
    let cptp_check = || match cptp(level, fault) {
        Ok(t) => t.finish("cptp_completeness"),
        Err(e) => error_outcome("cptp_completeness", e),
    };
    let (first, rest) = rayon::join(cptp_check, || {
        CHECKS
            .par_iter()
            .map(|(name, f)| match f(level) {
                Ok(t) => t.finish(name),
                Err(e) => error_outcome(name, e),
            })
            .collect::<Vec<_>>()
    });
    let mut checks = vec![first];
    checks.extend(rest);
    let failed = checks.iter().filter(|c| !c.passed).count();
    VerifyReport {
        level,
        passed: failed == 0,
        failed,
        checks,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injection_fails_cptp() {
        let t = cptp(VerifyLevel::Quick, Some(Fault::KrausWeight)).unwrap();
        let o = t.finish("cptp_completeness");
        assert!(!o.passed);
        assert!(o.max_deviation > 1e-3);
        assert!(cptp(VerifyLevel::Quick, None).unwrap().finish("x").passed);
    }
}
