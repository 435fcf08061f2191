//! Sampling test for almost periodicity.
//!
//! A divisor is almost periodic when every convolution
//! `g(t) = sum_k m_k phi(a_k + t)` with a compactly supported test function is
//! a Bohr almost periodic function of the real shift `t`. We sample `g` on a
//! finite window and list the shifts `tau` with `sup |g(t + tau) - g(t)| <= eps`.
//! The verdict compares the largest gap between such shifts with a density
//! bound. This is evidence, not proof: any finite window and finite family of
//! test functions can be fooled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{ComplexPoint, DivisorSource};
use crate::error::{Error, Result};

/// Radial, compactly supported test function with peak value 1 at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `max(0, 1 - |z| / radius)`
    Hat { radius: f64 },
    /// `exp(1 - 1 / (1 - s^2))` with `s = |z| / radius`, zero for `s >= 1`.
    SmoothBump { radius: f64 },
}

fn check_radius(radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("test function radius {radius} must be finite and > 0")));
    }
    Ok(radius)
}

impl TestFunction {
    pub fn hat(radius: f64) -> Result<Self> {
        Ok(TestFunction::Hat { radius: check_radius(radius)? })
    }

    pub fn bump(radius: f64) -> Result<Self> {
        Ok(TestFunction::SmoothBump { radius: check_radius(radius)? })
    }

    pub fn radius(&self) -> f64 {
        match *self {
            TestFunction::Hat { radius } | TestFunction::SmoothBump { radius } => radius,
        }
    }

    /// Value as a function of `|z|`.
    pub fn radial(&self, s: f64) -> f64 {
        match *self {
            TestFunction::Hat { radius } => (1.0 - s / radius).max(0.0),
            TestFunction::SmoothBump { radius } => {
                let u = s / radius;
                if u >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
        }
    }

    pub fn eval(&self, z: ComplexPoint) -> f64 {
        self.radial(z.norm())
    }

    /// Integral of the function along the real axis.
    pub fn line_integral(&self) -> f64 {
        match *self {
            TestFunction::Hat { radius } => radius,
            TestFunction::SmoothBump { radius } => {
                // The integrand is flat to all orders at s = 1, so composite Simpson converges fast.
                let n = 4000;
                let h = 1.0 / n as f64;
                let f = |s: f64| TestFunction::SmoothBump { radius: 1.0 }.radial(s);
                let inner: f64 = (1..n).map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h)).sum();
                2.0 * radius * h / 3.0 * (f(0.0) + inner + f(1.0))
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TestFunction::Hat { radius } => format!("hat({radius})"),
            TestFunction::SmoothBump { radius } => format!("smooth-bump({radius})"),
        }
    }
}

/// Samples `g(t0 + i dt)`, `i = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("sample spacing {dt} must be finite and > 0")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("samples must be finite".into()));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn from_fn(t0: f64, dt: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(t0, dt, (0..len).map(|i| f(t0 + i as f64 * dt)).collect())
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len().saturating_sub(1))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Equispaced real shifts `t0 + i dt`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    fn max_abs(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        self.t0.abs().max(self.time(self.len - 1).abs())
    }
}

/// `g(t) = sum_k m_k phi(a_k + t)` on `grid`. `radius` must cover every
/// contributing atom: `radius >= max|t| + phi.radius()`.
pub fn convolve(
    source: &dyn DivisorSource,
    phi: &TestFunction,
    grid: TimeGrid,
    radius: f64,
) -> Result<SampledFunction> {
    if !(grid.dt > 0.0 && grid.dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("sample spacing {} must be finite and > 0", grid.dt)));
    }
    let required = grid.max_abs() + phi.radius();
    if !(radius >= required) {
        return Err(Error::InsufficientRadius { given: radius, required });
    }
    let atoms = source.enumerate(radius);
    let r = phi.radius();
    let mut samples = vec![0.0; grid.len];
    if grid.len == 0 {
        return SampledFunction::new(grid.t0, grid.dt, samples);
    }
    let last = (grid.len - 1) as f64;
    for a in atoms.iter().filter(|a| a.point.im.abs() < r) {
        // phi(a + t) != 0 only for t in (-Re a - r, -Re a + r)
        let lo = ((-a.point.re - r - grid.t0) / grid.dt).floor().max(0.0);
        let hi = ((-a.point.re + r - grid.t0) / grid.dt).ceil().min(last);
        if lo > hi {
            continue;
        }
        for (i, slot) in samples.iter_mut().enumerate().take(hi as usize + 1).skip(lo as usize) {
            let w = a.point + grid.time(i);
            *slot += a.mass() * phi.eval(w);
        }
    }
    SampledFunction::new(grid.t0, grid.dt, samples)
}

/// Outcome of an epsilon-period scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APReport {
    pub epsilon: f64,
    /// Accepted shifts, sorted, both signs.
    pub periods: Vec<f64>,
    /// Largest gap between consecutive accepted shifts in `[0, tau_max]`, counting the gap up to `tau_max`.
    pub max_gap: f64,
    /// Sampled range of `t`.
    pub window: (f64, f64),
    pub tau_max: f64,
    pub density_bound: f64,
    pub verdict: bool,
    /// Labels of the test functions that were intersected.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<String>,
}

fn shift_accepted(samples: &[f64], shift: usize, epsilon: f64) -> bool {
    samples[shift..].iter().zip(samples).all(|(b, a)| (b - a).abs() <= epsilon)
}

/// Index shifts of `g` corresponding to `tau_grid`; each tau must be a multiple of `g.dt`.
fn tau_shifts(g: &SampledFunction, tau_grid: &[f64]) -> Result<Vec<i64>> {
    let half = (g.t_end() - g.t0) / 2.0;
    tau_grid
        .iter()
        .map(|&tau| {
            if !tau.is_finite() {
                return Err(Error::InvalidArgument(format!("shift {tau} is not finite")));
            }
            if tau.abs() > half + 1e-9 * half.max(1.0) {
                return Err(Error::WindowTooShort(format!("shift {tau} exceeds half the sample window ({half})")));
            }
            let s = (tau / g.dt).round();
            if (s * g.dt - tau).abs() > 1e-9 * tau.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!("shift {tau} is not a multiple of dt = {}", g.dt)));
            }
            Ok(s as i64)
        })
        .collect()
}

fn accepted_mask(g: &SampledFunction, shifts: &[i64], epsilon: f64) -> Vec<bool> {
    shifts.par_iter().map(|&s| shift_accepted(&g.samples, s.unsigned_abs() as usize, epsilon)).collect()
}

fn max_gap(periods: &[f64], tau_max: f64) -> f64 {
    let mut nonneg: Vec<f64> = periods.iter().copied().filter(|&t| t >= 0.0).collect();
    nonneg.sort_by(f64::total_cmp);
    let mut gap = 0.0f64;
    let mut prev = 0.0;
    for &t in &nonneg {
        gap = gap.max(t - prev);
        prev = t;
    }
    gap.max(tau_max - prev)
}

fn build_report(
    g: &SampledFunction,
    tau_grid: &[f64],
    mask: &[bool],
    epsilon: f64,
    density_bound: f64,
    functions: Vec<String>,
) -> APReport {
    let mut periods: Vec<f64> = tau_grid.iter().zip(mask).filter(|(_, &ok)| ok).map(|(&t, _)| t).collect();
    periods.sort_by(f64::total_cmp);
    periods.dedup();
    let tau_max = tau_grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let gap = max_gap(&periods, tau_max);
    APReport {
        epsilon,
        periods,
        max_gap: gap,
        window: (g.t0, g.t_end()),
        tau_max,
        density_bound,
        verdict: gap <= density_bound,
        functions,
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be finite and >= 0")));
    }
    Ok(())
}

/// Shifts in `tau_grid` that are epsilon-periods of `g` on its window.
///
/// For `tau`, the supremum runs over the samples where both `g(t)` and
/// `g(t + tau)` are known, so `tau` and `-tau` give the same answer.
pub fn find_epsilon_periods(
    g: &SampledFunction,
    epsilon: f64,
    tau_grid: &[f64],
    density_bound: f64,
) -> Result<APReport> {
    check_epsilon(epsilon)?;
    let shifts = tau_shifts(g, tau_grid)?;
    let mask = accepted_mask(g, &shifts, epsilon);
    Ok(build_report(g, tau_grid, &mask, epsilon, density_bound, Vec::new()))
}

/// `-tau_max, ..., tau_max` in steps of `step`.
pub fn symmetric_taus(step: f64, tau_max: f64) -> Vec<f64> {
    let n = (tau_max / step + 1e-9).floor() as i64;
    (-n..=n).map(|i| i as f64 * step).collect()
}

/// Sampling window and thresholds for [`ap_divisor_test`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APConfig {
    /// Sampling window `[t_start, t_end]`; kept away from `t = 0` so that a
    /// single missing atom near the origin does not reject every shift.
    pub t_start: f64,
    pub t_end: f64,
    pub tau_max: f64,
    /// Sample spacing; default is the largest `1/n` not exceeding `min radius / 8`.
    pub dt: Option<f64>,
    /// Spacing of candidate shifts; default every sample shift.
    pub tau_step: Option<f64>,
    /// Default: ten times the mean spacing of the divisor on `[-t_end, t_end]`.
    pub density_bound: Option<f64>,
}

impl Default for APConfig {
    fn default() -> Self {
        Self { t_start: 10.0, t_end: 410.0, tau_max: 200.0, dt: None, tau_step: None, density_bound: None }
    }
}

/// `{hat(0.4), smooth-bump(0.4), smooth-bump(0.8)}`
pub fn default_family() -> Vec<TestFunction> {
    vec![
        TestFunction::Hat { radius: 0.4 },
        TestFunction::SmoothBump { radius: 0.4 },
        TestFunction::SmoothBump { radius: 0.8 },
    ]
}

pub const DEFAULT_EPSILON: f64 = 0.1;

/// Largest `1/n` that does not exceed `min_radius / 8`, so integer shifts fall on the sample lattice.
pub fn default_dt(family: &[TestFunction]) -> f64 {
    let min_r = family.iter().map(TestFunction::radius).fold(f64::INFINITY, f64::min);
    1.0 / (8.0 / min_r).ceil()
}

/// Ten times the mean spacing `2 R / n(0, R)`; with no atoms the window `2 R` itself.
pub fn default_density_bound(source: &dyn DivisorSource, radius: f64) -> f64 {
    let n = crate::divisor::total_multiplicity(&source.enumerate(radius));
    10.0 * 2.0 * radius / n.max(1) as f64
}

/// Convolutions of `source` with each member of `family` over the configured window.
pub fn sample_family(
    source: &dyn DivisorSource,
    family: &[TestFunction],
    config: &APConfig,
) -> Result<Vec<SampledFunction>> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("test function family is empty".into()));
    }
    if !(config.t_end > config.t_start) {
        return Err(Error::WindowTooShort(format!("[{}, {}]", config.t_start, config.t_end)));
    }
    let dt = config.dt.unwrap_or_else(|| default_dt(family));
    let len = ((config.t_end - config.t_start) / dt).round() as usize + 1;
    let grid = TimeGrid { t0: config.t_start, dt, len };
    let max_r = family.iter().map(TestFunction::radius).fold(0.0, f64::max);
    let radius = grid.max_abs() + max_r + 1.0;
    family.par_iter().map(|phi| convolve(source, phi, grid, radius)).collect()
}

/// Joint epsilon-periods of the convolutions of `source` with every member of `family`.
pub fn ap_divisor_test(
    source: &dyn DivisorSource,
    family: &[TestFunction],
    epsilon: f64,
    config: &APConfig,
) -> Result<APReport> {
    check_epsilon(epsilon)?;
    let sampled = sample_family(source, family, config)?;
    let g0 = &sampled[0];
    let taus = symmetric_taus(config.tau_step.unwrap_or(g0.dt), config.tau_max);
    let shifts = tau_shifts(g0, &taus)?;
    let mut mask = vec![true; shifts.len()];
    for g in &sampled {
        for (m, ok) in mask.iter_mut().zip(accepted_mask(g, &shifts, epsilon)) {
            *m &= ok;
        }
    }
    let bound = config
        .density_bound
        .unwrap_or_else(|| default_density_bound(source, config.t_end.abs().max(config.t_start.abs())));
    Ok(build_report(g0, &taus, &mask, epsilon, bound, family.iter().map(TestFunction::label).collect()))
}
