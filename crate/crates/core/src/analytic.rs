//! Closed-form teleported QFI for a single-qubit probe, thresholds and
//! extremum locations.
//!
//! Every closed form is F = |∂r|² + (r·∂r)²/(1 − |r|²) written out for the
//! teleported Bloch vector of the corresponding channel. When the state is
//! pure the rational term's denominator vanishes and only the leading term
//! |∂r|² is kept.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::ChannelKind;
use crate::error::{Error, Result};
use crate::qfi::{QfiDiagnostics, QfiMethod, QfiResult};
use crate::qstate::{BlochVector, ProbeParams, ResourceParams};

/// Rational terms with a denominator below this are dropped.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// Coefficients that fold (D, μ) and, for amplitude damping, c₃.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelCoefficients {
    /// A = (1−√(1−D))μ, B = A − 2[1−D(1−μ)], M = 2c₃[(2−D)D(1−μ)−1] − 2D²(1−μ)
    #[serde(rename = "ad")]
    AmplitudeDamping { a: f64, b: f64, m: f64 },
    /// Δ = 1 − (2−D)D(1−μ)
    #[serde(rename = "pd")]
    PhaseDamping { delta: f64 },
    /// Λ = 9 − 8(3−2D)D(1−μ)
    #[serde(rename = "de")]
    Depolarizing { lambda: f64 },
}

pub fn channel_coefficients(kind: ChannelKind, d: f64, mu: f64, c3: f64) -> ChannelCoefficients {
    let nu = 1.0 - mu;
    match kind {
        ChannelKind::AmplitudeDamping => {
            let a = (1.0 - (1.0 - d).sqrt()) * mu;
            let b = a - 2.0 * (1.0 - d * nu);
            let m = 2.0 * c3 * ((2.0 - d) * d * nu - 1.0) - 2.0 * d * d * nu;
            ChannelCoefficients::AmplitudeDamping { a, b, m }
        }
        ChannelKind::PhaseDamping => ChannelCoefficients::PhaseDamping {
            delta: 1.0 - (2.0 - d) * d * nu,
        },
        ChannelKind::Depolarizing => ChannelCoefficients::Depolarizing {
            lambda: 9.0 - 8.0 * (3.0 - 2.0 * d) * d * nu,
        },
    }
}

/// Diagonal scaling (sx, sy, sz) with r_out = (sx r̂x, sy r̂y, sz r̂z), where r̂
/// is the Bloch vector of the clean probe.
fn bloch_scaling(coeffs: &ChannelCoefficients, c: &ResourceParams) -> [f64; 3] {
    match *coeffs {
        ChannelCoefficients::AmplitudeDamping { a, b, m } => [
            0.5 * (b * c.c1 - a * c.c2),
            0.5 * (b * c.c2 - a * c.c1),
            0.5 * m,
        ],
        ChannelCoefficients::PhaseDamping { delta } => [-delta * c.c1, -delta * c.c2, -c.c3],
        ChannelCoefficients::Depolarizing { lambda } => {
            let s = -lambda / 9.0;
            [s * c.c1, s * c.c2, s * c.c3]
        }
    }
}

/// Bloch vector of the teleported single-qubit probe.
pub fn closed_form_bloch(
    kind: ChannelKind,
    d: f64,
    mu: f64,
    c: &ResourceParams,
    at: &ProbeParams,
) -> BlochVector {
    let [sx, sy, sz] = bloch_scaling(&channel_coefficients(kind, d, mu, c.c3), c);
    let (st, ct) = at.theta.sin_cos();
    let (sp, cp) = at.phi.sin_cos();
    BlochVector::new(sx * st * cp, sy * st * sp, sz * ct)
}

/// F_θ and F_φ of the teleported single-qubit probe.
pub fn closed_form_qfi(
    kind: ChannelKind,
    d: f64,
    mu: f64,
    c: &ResourceParams,
    at: &ProbeParams,
) -> QfiResult {
    let coeffs = channel_coefficients(kind, d, mu, c.c3);
    let (st, ct) = at.theta.sin_cos();
    let (sp, cp) = at.phi.sin_cos();
    let (st2, ct2, sp2, cp2) = (st * st, ct * ct, sp * sp, cp * cp);
    let (c1s, c2s, c3s) = (c.c1 * c.c1, c.c2 * c.c2, c.c3 * c.c3);

    let (lead_t, corr_t, lead_p, corr_p, den) = match coeffs {
        ChannelCoefficients::AmplitudeDamping { a, b, m } => {
            let x = (b * c.c1 - a * c.c2).powi(2);
            let y = (b * c.c2 - a * c.c1).powi(2);
            let m2 = m * m;
            let den = 4.0 - x * cp2 * st2 - y * st2 * sp2 - m2 * ct2;
            let lead_t = 0.25 * (x * ct2 * cp2 + y * ct2 * sp2 + m2 * st2);
            let lead_p = 0.25 * (y * st2 * cp2 + x * st2 * sp2);
            let corr_t = ct2 * st2 * (x * cp2 + y * sp2 - m2).powi(2) / 4.0;
            let corr_p = cp2 * sp2 * st2 * st2 * ((a * a - b * b) * (c1s - c2s)).powi(2) / 4.0;
            (lead_t, corr_t, lead_p, corr_p, den)
        }
        ChannelCoefficients::PhaseDamping { delta } => {
            let d2 = delta * delta;
            let transverse = c1s * cp2 + c2s * sp2;
            let den = 1.0 - c3s * ct2 - d2 * st2 * transverse;
            let lead_t = d2 * ct2 * transverse + c3s * st2;
            let lead_p = d2 * st2 * (c1s * sp2 + c2s * cp2);
            let corr_t = ct2 * st2 * (d2 * transverse - c3s).powi(2);
            let corr_p = (d2 * (c1s - c2s) * st2 * cp * sp).powi(2);
            (lead_t, corr_t, lead_p, corr_p, den)
        }
        ChannelCoefficients::Depolarizing { lambda } => {
            let l2 = lambda * lambda;
            let l4 = l2 * l2;
            // Written with den = 81 − Λ²(…) > 0, the negative of the usual form.
            let den = 81.0 - l2 * (c1s * st2 * cp2 + c2s * st2 * sp2 + c3s * ct2);
            let lead_t = l2 * (c1s * ct2 * cp2 + c2s * ct2 * sp2 + c3s * st2) / 81.0;
            let lead_p = l2 * st2 * (c1s * sp2 + c2s * cp2) / 81.0;
            let corr_t = st2 * ct2 * l4 * ((c1s - c3s) - sp2 * (c1s - c2s)).powi(2) / 81.0;
            let corr_p = (c1s - c2s).powi(2) * l4 * st2 * st2 * sp2 * cp2 / 81.0;
            (lead_t, corr_t, lead_p, corr_p, den)
        }
    };

    let pure = den.abs() < DENOMINATOR_GUARD;
    let (f_theta, f_phi) = if pure {
        (lead_t, lead_p)
    } else {
        (lead_t + corr_t / den, lead_p + corr_p / den)
    };
    QfiResult {
        f_theta: f_theta.max(0.0),
        f_phi: f_phi.max(0.0),
        method: QfiMethod::Analytic,
        diagnostics: QfiDiagnostics {
            pure_branch: pure,
            ..QfiDiagnostics::default()
        },
    }
}

fn f_theta_at(kind: ChannelKind, d: f64, mu: f64, c: &ResourceParams, theta: f64, phi: f64) -> f64 {
    let at = ProbeParams { theta, phi };
    closed_form_qfi(kind, d, mu, c, &at).f_theta
}

/// Candidate maxima of F_θ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaLocation {
    /// θ = π/2
    Equator,
    /// θ ∈ {0, π}
    Poles,
}

impl ThetaLocation {
    /// Ties go to the equator.
    fn compare(f_poles: f64, f_equator: f64) -> Self {
        if f_equator >= f_poles {
            ThetaLocation::Equator
        } else {
            ThetaLocation::Poles
        }
    }

    pub fn angles(&self) -> &'static [f64] {
        match self {
            ThetaLocation::Equator => &[FRAC_PI_2],
            ThetaLocation::Poles => &[0.0, std::f64::consts::PI],
        }
    }
}

impl fmt::Display for ThetaLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaLocation::Equator => "pi/2",
            ThetaLocation::Poles => "0,pi",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clip {
    Below,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Crossing point in [0, 1]; None when no crossing exists in range.
    pub mu_star: Option<f64>,
    /// Unclipped formula value (phase damping only).
    pub raw: Option<f64>,
    pub clipped: Option<Clip>,
    /// Where F_θ peaks for μ ≥ μ*; the single regime when there is no crossing.
    pub location_above: ThetaLocation,
    /// Where F_θ peaks for μ < μ*; the single regime when there is no crossing.
    pub location_below: ThetaLocation,
    /// F_θ(0) = F_θ(π/2) everywhere sampled.
    pub degenerate: bool,
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

fn location_at(kind: ChannelKind, d: f64, mu: f64, c: &ResourceParams, phi: f64) -> ThetaLocation {
    ThetaLocation::compare(
        f_theta_at(kind, d, mu, c, 0.0, phi),
        f_theta_at(kind, d, mu, c, FRAC_PI_2, phi),
    )
}

fn regimes(
    kind: ChannelKind,
    d: f64,
    c: &ResourceParams,
    phi: f64,
    mu_star: Option<f64>,
) -> (ThetaLocation, ThetaLocation) {
    match mu_star {
        Some(m) => {
            let above = location_at(kind, d, 0.5 * (m + 1.0), c, phi);
            let below = location_at(kind, d, 0.5 * m, c, phi);
            (above, below)
        }
        None => {
            let only = location_at(kind, d, 0.5, c, phi);
            (only, only)
        }
    }
}

/// μ* = [√2|c₃| − (1−D)²√R] / [(2−D)D√R], R = c₁²+c₂²+(c₁²−c₂²)cos2φ.
pub fn pd_threshold(c: &ResourceParams, d: f64, phi: f64) -> Result<ThresholdResult> {
    check_unit("D", d)?;
    if d == 0.0 {
        return Err(Error::DZero);
    }
    let (c1s, c2s) = (c.c1 * c.c1, c.c2 * c.c2);
    let radicand = c1s + c2s + (c1s - c2s) * (2.0 * phi).cos();
    if radicand <= DENOMINATOR_GUARD {
        return Err(Error::DegenerateDenominator);
    }
    let root = radicand.sqrt();
    let raw = (2f64.sqrt() * c.c3.abs() - (1.0 - d).powi(2) * root) / ((2.0 - d) * d * root);
    let (mu_star, clipped) = if raw < -1e-12 {
        (None, Some(Clip::Below))
    } else if raw > 1.0 + 1e-12 {
        (None, Some(Clip::Above))
    } else {
        (Some(raw.clamp(0.0, 1.0)), None)
    };
    let kind = ChannelKind::PhaseDamping;
    let (location_above, location_below) = regimes(kind, d, c, phi, mu_star);
    Ok(ThresholdResult {
        mu_star,
        raw: Some(raw),
        clipped,
        location_above,
        location_below,
        degenerate: false,
    })
}

const AD_SAMPLES: usize = 1000;
const AD_FLAT: f64 = 1e-12;

/// Root of g(μ) = F_θ(0) − F_θ(π/2) on [0, 1] by sampling and bisection.
pub fn ad_threshold(c: &ResourceParams, d: f64, phi: f64) -> Result<ThresholdResult> {
    check_unit("D", d)?;
    let kind = ChannelKind::AmplitudeDamping;
    let g =
        |mu: f64| f_theta_at(kind, d, mu, c, 0.0, phi) - f_theta_at(kind, d, mu, c, FRAC_PI_2, phi);

    let samples: Vec<(f64, f64)> = (0..=AD_SAMPLES)
        .map(|k| {
            let mu = k as f64 / AD_SAMPLES as f64;
            (mu, g(mu))
        })
        .collect();
    if samples.iter().all(|(_, v)| v.abs() <= AD_FLAT) {
        return Ok(ThresholdResult {
            mu_star: None,
            raw: None,
            clipped: None,
            location_above: ThetaLocation::Equator,
            location_below: ThetaLocation::Equator,
            degenerate: true,
        });
    }

    let bracket = samples.windows(2).find_map(|w| {
        let ((m0, g0), (m1, g1)) = (w[0], w[1]);
        if g0 == 0.0 {
            Some((m0, m0))
        } else if g0.signum() != g1.signum() || g1 == 0.0 {
            Some((m0, m1))
        } else {
            None
        }
    });
    let mu_star = bracket.map(|(mut lo, mut hi)| {
        let g_lo = g(lo);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            let gm = g(mid);
            if gm == 0.0 {
                return mid;
            }
            if gm.signum() == g_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    });
    let (location_above, location_below) = regimes(kind, d, c, phi, mu_star);
    Ok(ThresholdResult {
        mu_star,
        raw: None,
        clipped: None,
        location_above,
        location_below,
        degenerate: false,
    })
}

/// π/2 when c₃² ≥ c₁²cos²φ + c₂²sin²φ, else the poles.
pub fn de_optimal_location(c: &ResourceParams, phi: f64) -> ThetaLocation {
    let (sp, cp) = phi.sin_cos();
    let transverse = c.c1 * c.c1 * cp * cp + c.c2 * c.c2 * sp * sp;
    ThetaLocation::compare(transverse, c.c3 * c.c3)
}

/// Minimizer of a unimodal function on [a, b] by golden-section search.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// F_θ(θ = π/2) for amplitude damping: [c₃((2−D)D(1−μ)−1) − D²(1−μ)]².
pub fn ad_equator_qfi(c3: f64, d: f64, mu: f64) -> f64 {
    let nu = 1.0 - mu;
    (c3 * ((2.0 - d) * d * nu - 1.0) - d * d * nu).powi(2)
}

/// D in [0, 1] minimizing the amplitude-damping F_θ(θ = π/2).
pub fn ad_min_location(c3: f64, mu: f64) -> Result<f64> {
    if !(c3.is_finite() && c3.abs() <= 1.0) {
        return Err(Error::OutOfRange {
            name: "c3",
            value: c3,
            range: "[-1, 1]",
        });
    }
    check_unit("mu", mu)?;
    if c3 >= 0.0 {
        return Ok(c3 / (1.0 + c3));
    }
    let radicand = (c3 + c3 * c3 * mu) * (mu - 1.0);
    if radicand >= -1e-14 {
        let den = c3 * (1.0 - mu) - radicand.max(0.0).sqrt();
        if den.abs() > DENOMINATOR_GUARD {
            let d = c3 / den;
            if (0.0..=1.0).contains(&d) {
                return Ok(d);
            }
        }
    }
    let f = |d: f64| ad_equator_qfi(c3, d, mu);
    let inner = golden_section_min(f, 0.0, 1.0, 1e-10);
    Ok([0.0, inner, 1.0]
        .into_iter()
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap_or(inner))
}
