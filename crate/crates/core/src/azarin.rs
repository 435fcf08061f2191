//! Scaling limits: the rescaled measures `mu_t(E) = mu(tE) / t`, the growth
//! indicators `sigma_+-` along the imaginary axis, and the shape of the limit
//! function `sigma_+ y^+ + sigma_- y^-`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::almostperiod::TestFunction;
use crate::criteria::ConditionEstimate;
use crate::divisor::{ComplexPoint, DivisorSource, LineDensity};
use crate::error::{Error, Result};
use crate::evaluate::eval_v;
use crate::numeric::CompensatedSum;

/// `mu_t(E) = t^-1 mu(t E)`.
#[derive(Clone, Copy)]
pub struct ScaledMeasure<'a> {
    source: &'a dyn DivisorSource,
    t: f64,
}

impl<'a> ScaledMeasure<'a> {
    pub fn new(source: &'a dyn DivisorSource, t: f64) -> Result<Self> {
        if !(t > 1.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale t = {t} must be finite and > 1")));
        }
        Ok(Self { source, t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `sum_{|a| <= radius} m f(a)`.
pub fn pair(source: &dyn DivisorSource, f: impl Fn(ComplexPoint) -> f64, radius: f64) -> f64 {
    source.enumerate(radius).iter().map(|a| a.mass() * f(a.point)).collect::<CompensatedSum>().value()
}

/// `<mu_t, phi> = t^-1 sum_{|a| <= t r} m phi(a / t)`.
pub fn weak_pairing(m: &ScaledMeasure<'_>, phi: &TestFunction) -> f64 {
    let t = m.t;
    pair(m.source, |a| phi.eval(a / t), t * phi.radius()) / t
}

/// `sigma_+`, `sigma_-` and the line density `(sigma_+ + sigma_-) / (2 pi)` of the limit measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndicators {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub density: f64,
}

impl GrowthIndicators {
    pub fn new(sigma_plus: f64, sigma_minus: f64) -> Self {
        Self { sigma_plus, sigma_minus, density: (sigma_plus + sigma_minus) / (2.0 * std::f64::consts::PI) }
    }

    pub fn line_density(&self) -> Result<LineDensity> {
        LineDensity::new(self.density)
    }

    /// Limit of `v(t z) / t`.
    pub fn predicted(&self, z: ComplexPoint) -> f64 {
        if z.im >= 0.0 {
            self.sigma_plus * z.im
        } else {
            self.sigma_minus * -z.im
        }
    }
}

/// Indicators together with the curves they were read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub indicators: GrowthIndicators,
    pub y: Vec<f64>,
    /// `V(iy) / y`
    pub raw_plus: Vec<f64>,
    /// `V(-iy) / y`
    pub raw_minus: Vec<f64>,
    /// `4 (V(iy) - 2 V(iy/2) + V(iy/4)) / y`
    pub extrapolated_plus: Vec<f64>,
    pub extrapolated_minus: Vec<f64>,
}

/// Default `y` grid: ten points from 5 to 50.
pub fn default_y_list() -> Vec<f64> {
    crate::numeric::linspace(5.0, 50.0, 10)
}

/// Default truncation radius for an evaluation at height `y`.
pub fn default_r_rule(y: f64) -> f64 {
    200.0 * y
}

fn v_at(source: &dyn DivisorSource, z: ComplexPoint, r_rule: &(dyn Fn(f64) -> f64 + Sync)) -> Result<f64> {
    let radius = r_rule(z.norm()).max(z.norm() + 2.0);
    eval_v(source, z, radius)?
        .finite()
        .ok_or_else(|| Error::InvalidArgument(format!("evaluation point {z} is a zero of the divisor")))
}

/// Growth indicators `sigma_+- = limsup v(+-iy) / y`.
///
/// The ratio `v(iy) / y` approaches its limit only like `log(y) / y`. Each
/// entry therefore combines three heights, `4 (v(y) - 2 v(y/2) + v(y/4)) / y`,
/// which has the same limit but cancels the constant and logarithmic terms.
/// The limsup is read as the maximum over the upper half of `y_list`; the
/// plain ratios are kept in the result for inspection. Heights of 50 and more
/// are needed for two-digit accuracy.
pub fn estimate_sigma(
    source: &dyn DivisorSource,
    y_list: &[f64],
    r_rule: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<SigmaEstimate> {
    if y_list.is_empty() {
        return Err(Error::InvalidArgument("empty y list".into()));
    }
    if y_list.iter().any(|&y| !(y > 0.0 && y.is_finite())) || y_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("y list must be positive and strictly increasing".into()));
    }
    let side = |sign: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let rows: Vec<(f64, f64)> = y_list
            .par_iter()
            .map(|&y| {
                let v = |h: f64| v_at(source, Complex64::new(0.0, sign * h), r_rule);
                let (v1, v2, v4) = (v(y)?, v(y / 2.0)?, v(y / 4.0)?);
                Ok((v1 / y, 4.0 * (v1 - 2.0 * v2 + v4) / y))
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().unzip())
    };
    let (raw_plus, extrapolated_plus) = side(1.0)?;
    let (raw_minus, extrapolated_minus) = side(-1.0)?;
    let top = y_list.len() / 2;
    let sup = |v: &[f64]| v[top..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SigmaEstimate {
        indicators: GrowthIndicators::new(sup(&extrapolated_plus), sup(&extrapolated_minus)),
        y: y_list.to_vec(),
        raw_plus,
        raw_minus,
        extrapolated_plus,
        extrapolated_minus,
    })
}

pub const DEFAULT_DENSITY_TOL: f64 = 1e-2;

/// `<mu_t, phi>` against `rho * (integral of phi along the real axis)`, judged at the largest `t`.
pub fn check_limit_density(
    source: &dyn DivisorSource,
    phi: &TestFunction,
    t_list: &[f64],
    expected: LineDensity,
    tolerance: f64,
) -> Result<ConditionEstimate> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("t list must be nonempty and strictly increasing".into()));
    }
    let values =
        t_list.iter().map(|&t| Ok(weak_pairing(&ScaledMeasure::new(source, t)?, phi))).collect::<Result<Vec<f64>>>()?;
    let target = expected.rho * phi.line_integral();
    let statistic = (values[values.len() - 1] - target).abs();
    Ok(ConditionEstimate::new(t_list.to_vec(), values, statistic, statistic <= tolerance, tolerance))
}

/// Default scales for [`check_vinf_shape`].
pub fn default_vinf_t_list() -> Vec<f64> {
    vec![25.0, 50.0, 100.0, 200.0, 400.0]
}

pub const DEFAULT_VINF_TOL: f64 = 0.05;

/// `max_z |v(t z) / t - (sigma_+ y^+ + sigma_- y^-)|` for each `t`.
///
/// The verdict asks for a curve that does not increase (up to `1e-3`) and
/// ends at or below `tolerance`. Evaluations at `t z` are truncated at `200 t |z|`.
pub fn check_vinf_shape(
    source: &dyn DivisorSource,
    z_list: &[ComplexPoint],
    t_list: &[f64],
    sigmas: GrowthIndicators,
    tolerance: f64,
) -> Result<ConditionEstimate> {
    if z_list.is_empty() {
        return Err(Error::InvalidArgument("empty z list".into()));
    }
    if let Some(z) = z_list.iter().find(|z| z.im.abs() < 0.2) {
        return Err(Error::InvalidArgument(format!("point {z} is within 0.2 of the real axis")));
    }
    if t_list.is_empty() || t_list.windows(2).any(|w| w[1] <= w[0]) || t_list[0] <= 0.0 {
        return Err(Error::InvalidArgument("t list must be positive and strictly increasing".into()));
    }
    let values = t_list
        .par_iter()
        .map(|&t| {
            z_list.iter().try_fold(0.0f64, |worst, &z| {
                let v = v_at(source, z * t, &default_r_rule)? / t;
                Ok(worst.max((v - sigmas.predicted(z)).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let last = values[values.len() - 1];
    let decreasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-3);
    Ok(ConditionEstimate::new(t_list.to_vec(), values, last, decreasing && last <= tolerance, tolerance))
}
