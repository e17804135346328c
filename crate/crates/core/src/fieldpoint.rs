//! Residual fine-structure Zeeman term and field-independent operating points.
//!
//! With the hyperfine structure averaged away, a scheme's mean frequency is
//! `δν(B) = gI Δm (μB/h) B - c B²` with `c = (μB/h)² (gL - gS)² / (2 f_FS)`,
//! where `f_FS = ω_FS / 2π`. It is stationary at `B* = gI Δm (μB/h) / (2c)`.

use serde::Serialize;

use crate::averaging::{PreparedScheme, ResolvedScheme};
use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::numdiff::second_derivative;
use crate::roots::{bisect_secant, RootError, RootOptions};
use crate::species::LevelSpec;
use crate::zeeman::{default_step, field_derivative};

/// `c` in `δν = -c B²` for a level with fine-structure data, Hz/G². Positive.
pub fn residual_quadratic_magnitude(level: &LevelSpec) -> Result<f64> {
    let fs = level
        .fs_partner
        .ok_or_else(|| Error::MissingFsPartner(level.label.clone()))?;
    let mu = CONSTANTS.mu_b_over_h;
    let f_fs = fs.omega_fs / (2.0 * std::f64::consts::PI);
    Ok((mu * (fs.g_l - fs.g_s)).powi(2) / (2.0 * f_fs))
}

/// Signed coefficient `-c` of the residual quadratic shift, Hz/G².
pub fn residual_quadratic_coefficient(level: &LevelSpec) -> Result<f64> {
    residual_quadratic_magnitude(level).map(|c| -c)
}

/// `δν = -[μB B (gL - gS)]² / (2 h f_FS)` at `field` gauss, Hz.
pub fn residual_quadratic(level: &LevelSpec, field: f64) -> Result<f64> {
    Ok(residual_quadratic_coefficient(level)? * field * field)
}

/// Closed-form averaged shift `gI Δm μB B - c B²` for a complete scheme, Hz.
pub fn fie_model(resolved: &ResolvedScheme<'_>, level: &LevelSpec, field: f64) -> Result<f64> {
    Ok(resolved.expected_slope() * field + residual_quadratic(level, field)?)
}

/// Stationary point of [`fie_model`], G. Zero when `Δm = 0`.
pub fn analytic_b_star(resolved: &ResolvedScheme<'_>, level: &LevelSpec) -> Result<f64> {
    let slope = resolved.expected_slope();
    let c = residual_quadratic_magnitude(level)?;
    if slope == 0.0 {
        return Ok(0.0);
    }
    let b_star = slope / (2.0 * c);
    if b_star.is_nan() || b_star <= 0.0 || !b_star.is_finite() {
        return Err(Error::NoFieldIndependentPoint { b_star });
    }
    Ok(b_star)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FipMethod {
    Analytic,
    Numeric,
}

/// A field where the averaged frequency is stationary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldIndependentPoint {
    pub b_star: f64,
    /// `d²(avg)/dB²` at `b_star`, Hz/G².
    pub curvature: f64,
    /// `(id, dν_k/dB)` at `b_star`, Hz/G, fine-structure term included.
    pub component_slopes: Vec<(String, f64)>,
    /// `d(avg)/dB` at `b_star`, Hz/G.
    pub residual_slope: f64,
    pub method: FipMethod,
    /// Final bracket of the search; `(b_star, b_star)` for the closed form.
    pub bracket: (f64, f64),
}

/// Tuning of [`find_fip`].
#[derive(Clone, Copy, Debug)]
pub struct FipOptions {
    /// Points of the coarse sign-change scan.
    pub scan_points: usize,
    /// Hz/G.
    pub slope_tol: f64,
    /// G.
    pub field_tol: f64,
    pub max_iter: usize,
    /// Largest finite-difference step tried before giving up, G.
    pub max_step: f64,
}

impl Default for FipOptions {
    fn default() -> Self {
        Self {
            scan_points: 33,
            slope_tol: 1e-3,
            field_tol: 1e-2,
            max_iter: 200,
            max_step: 8.0,
        }
    }
}

/// `d/dB` of the fine-structure-corrected average, from finite differences.
/// The step doubles while the Richardson disagreement exceeds 10% of the
/// derivative (and the slope tolerance).
fn noisy_slope(p: &PreparedScheme<'_, f64>, b: f64, opts: &FipOptions) -> Result<f64> {
    let mut h = default_step(b).min(b);
    loop {
        let d = field_derivative(|x| p.shift_with_fs(x), b, Some(h))?;
        let noisy = d.error > 0.1 * d.richardson.abs() && d.error > 0.1 * opts.slope_tol;
        if !noisy {
            return Ok(d.richardson);
        }
        let next = 2.0 * h;
        if next > opts.max_step || next > b {
            return Err(Error::NoiseFloor { lo: b - h, hi: b + h });
        }
        h = next;
    }
}

fn describe(
    resolved: &ResolvedScheme<'_>,
    p: &PreparedScheme<'_, f64>,
    b_star: f64,
    method: FipMethod,
    bracket: (f64, f64),
    opts: &FipOptions,
) -> Result<FieldIndependentPoint> {
    let h = (1e-3 * b_star).max(0.5).min(b_star / 2.0);
    let curvature = if h > 0.0 {
        second_derivative(|x| p.shift_with_fs(x), b_star, h)?
    } else {
        2.0 * resolved.fs_coefficient()
    };
    let step = default_step(b_star).min(b_star);
    let mut component_slopes = Vec::with_capacity(p.components.len());
    for (c, rc) in p.components.iter().zip(&resolved.components) {
        let k = c.fs_coefficient;
        let slope = if step > 0.0 {
            field_derivative(|x| Ok(c.transition.shift(x)? + k * x * x), b_star, Some(step))?.richardson
        } else {
            c.transition.slope(b_star)? + 2.0 * k * b_star
        };
        component_slopes.push((rc.id.clone(), slope));
    }
    let residual_slope = if b_star > 0.0 {
        noisy_slope(p, b_star, opts)?
    } else {
        p.slope(0.0)?
    };
    Ok(FieldIndependentPoint {
        b_star,
        curvature,
        component_slopes,
        residual_slope,
        method,
        bracket,
    })
}

/// [`analytic_b_star`] with curvature and component slopes from the full
/// diagonalization evaluated there.
pub fn analytic_fip(resolved: &ResolvedScheme<'_>, level: &LevelSpec) -> Result<FieldIndependentPoint> {
    let b_star = analytic_b_star(resolved, level)?;
    let p = resolved.prepare::<f64>()?;
    describe(resolved, &p, b_star, FipMethod::Analytic, (b_star, b_star), &FipOptions::default())
}

/// Locates a stationary point of the fine-structure-corrected average on
/// `[b_lo, b_hi]` by a coarse scan followed by bracketed refinement.
pub fn find_fip(
    resolved: &ResolvedScheme<'_>,
    b_lo: f64,
    b_hi: f64,
    opts: FipOptions,
) -> Result<FieldIndependentPoint> {
    if !(b_lo > 0.0 && b_hi > b_lo && b_hi.is_finite()) {
        return Err(Error::Precondition(format!(
            "search interval must satisfy 0 < lo < hi, got [{b_lo}, {b_hi}]"
        )));
    }
    let p = resolved.prepare::<f64>()?;
    let slope = |b: f64| noisy_slope(&p, b, &opts);

    let n = opts.scan_points.max(2);
    let mut bracket = None;
    let mut prev = (b_lo, slope(b_lo)?);
    for k in 1..n {
        let b = b_lo + (b_hi - b_lo) * k as f64 / (n - 1) as f64;
        let s = slope(b)?;
        if prev.1 == 0.0 || prev.1.signum() != s.signum() {
            bracket = Some((prev.0, b));
            break;
        }
        prev = (b, s);
    }
    let (lo, hi) = bracket.ok_or(Error::NoSignChange { lo: b_lo, hi: b_hi })?;

    let root = bisect_secant(
        slope,
        lo,
        hi,
        RootOptions {
            f_tol: opts.slope_tol,
            x_tol: opts.field_tol,
            max_iter: opts.max_iter,
        },
    )
    .map_err(|e| match e {
        RootError::NoSignChange { lo, hi } => Error::NoSignChange { lo, hi },
        RootError::NotConverged { bracket, .. } => Error::NoiseFloor {
            lo: bracket.0,
            hi: bracket.1,
        },
        RootError::Eval(e) => e,
    })?;
    describe(resolved, &p, root.x, FipMethod::Numeric, root.bracket, &opts)
}
