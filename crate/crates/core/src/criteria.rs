//! Finite-scale checks of the zero-set conditions.
//!
//! The conditions are statements about limits (`O(r)`, `o(R)`, "the limit
//! exists"). Each check evaluates the relevant quantity on an increasing list
//! of radii and turns the curve into a verdict with an explicit tolerance.
//! The curve is always returned so the verdict can be overruled by a reader.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::almostperiod::{ap_divisor_test, default_family, APConfig, APReport, TestFunction, DEFAULT_EPSILON};
use crate::counting::{profile, tilde_v};
use crate::divisor::{ComplexPoint, DivisorSource};
use crate::error::{Error, Result};
use crate::evaluate::{distance_to_atoms, ATOM_CLEARANCE};
use crate::numeric::{geomspace, linspace, CompensatedSum};

/// A sampled condition and the verdict drawn from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    /// Abscissae of the curve: radii, scales or grid points depending on the check.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Imaginary parts when the tracked quantity is complex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values_im: Option<Vec<f64>>,
    pub statistic: f64,
    pub verdict: bool,
    pub tolerance: f64,
    /// Largest change between the two truncation radii, for checks that compare them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cauchy_defect: Option<f64>,
}

impl ConditionEstimate {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, statistic: f64, verdict: bool, tolerance: f64) -> Self {
        Self { radii, values, values_im: None, statistic, verdict, tolerance, cauchy_defect: None }
    }
}

/// Default radii: fifteen log-spaced points from 10 to 1000.
pub fn default_radii() -> Vec<f64> {
    geomspace(10.0, 1000.0, 15)
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("radius list is empty".into()));
    }
    if radii[0] < 1.0 || radii.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidArgument("radii must be finite and >= 1".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Index of the first radius in the top decade `[r_max / 10, r_max]`.
fn top_decade(radii: &[f64]) -> usize {
    let r_max = radii[radii.len() - 1];
    radii.partition_point(|&r| r < r_max / 10.0)
}

pub const DEFAULT_GROWTH_TOL: f64 = 0.10;
pub const DEFAULT_ANNULUS_TOL: f64 = 0.05;
pub const DEFAULT_RESIDUE_TOL: f64 = 1e-2;
pub const DEFAULT_J_TOL: f64 = 1e-2;

/// `n(0, r) / r`. Passes when no value in the top decade exceeds the first
/// one there by more than the relative `tolerance`.
pub fn check_linear_growth(source: &dyn DivisorSource, radii: &[f64], tolerance: f64) -> Result<ConditionEstimate> {
    check_radii(radii)?;
    let p = profile(source, Complex64::new(0.0, 0.0), radii[radii.len() - 1])?;
    let values = radii.iter().map(|&r| Ok(p.count(r)? as f64 / r)).collect::<Result<Vec<f64>>>()?;
    let top = &values[top_decade(radii)..];
    let peak = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let verdict = peak <= (1.0 + tolerance) * top[0] + 1e-12;
    let statistic = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ConditionEstimate::new(radii.to_vec(), values, statistic, verdict, tolerance))
}

/// `(n(0, R + 1) - n(0, R)) / R`. Passes when every top-decade value is at most `tolerance`.
pub fn check_annulus_regularity(
    source: &dyn DivisorSource,
    radii: &[f64],
    tolerance: f64,
) -> Result<ConditionEstimate> {
    check_radii(radii)?;
    let p = profile(source, Complex64::new(0.0, 0.0), radii[radii.len() - 1] + 1.0)?;
    let values =
        radii.iter().map(|&r| Ok((p.count(r + 1.0)? - p.count(r)?) as f64 / r)).collect::<Result<Vec<f64>>>()?;
    let statistic = values[top_decade(radii)..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ConditionEstimate::new(radii.to_vec(), values, statistic, statistic <= tolerance, tolerance))
}

/// Partial sums of `sum_{min_modulus <= |a| <= R} m / a` at each radius.
///
/// The condition itself uses `min_modulus = 1`; `0` gives the full symmetric
/// sum, which requires that 0 is not an atom.
pub fn residue_partial_sums(source: &dyn DivisorSource, radii: &[f64], min_modulus: f64) -> Result<Vec<Complex64>> {
    let Some(&r_max) = radii.last() else { return Ok(Vec::new()) };
    let atoms = source.enumerate(r_max);
    if atoms.iter().any(|a| a.point.norm() >= min_modulus && a.point == Complex64::new(0.0, 0.0)) {
        return Err(Error::ZeroInSupport);
    }
    let mut terms: Vec<(f64, Complex64)> =
        atoms.iter().filter(|a| a.point.norm() >= min_modulus).map(|a| (a.point.norm(), a.mass() / a.point)).collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    let mut next = 0;
    Ok(radii
        .iter()
        .map(|&r| {
            while next < terms.len() && terms[next].0 <= r {
                re.add(terms[next].1.re);
                im.add(terms[next].1.im);
                next += 1;
            }
            Complex64::new(re.value(), im.value())
        })
        .collect())
}

/// Existence of `lim sum_{1 <= |a| <= R} m / a`: the largest change between
/// consecutive top-decade partial sums must not exceed `tolerance`.
pub fn check_residue_sum(source: &dyn DivisorSource, radii: &[f64], tolerance: f64) -> Result<ConditionEstimate> {
    check_radii(radii)?;
    let sums = residue_partial_sums(source, radii, 1.0)?;
    let top = &sums[top_decade(radii)..];
    let statistic = top.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
    Ok(ConditionEstimate {
        radii: radii.to_vec(),
        values: sums.iter().map(|s| s.re).collect(),
        values_im: Some(sums.iter().map(|s| s.im).collect()),
        statistic,
        verdict: statistic <= tolerance,
        tolerance,
        cauchy_defect: None,
    })
}

/// Default abscissae for the `tilde V` checks: `0, 0.05, ..., 1` minus points near atoms.
pub fn default_x_grid(source: &dyn DivisorSource) -> Vec<f64> {
    let near = source.enumerate(2.5);
    linspace(0.0, 1.0, 21)
        .into_iter()
        .filter(|&x| distance_to_atoms(&near, Complex64::new(x, 0.0)) >= ATOM_CLEARANCE)
        .collect()
}

pub const DEFAULT_J_RADIUS: f64 = 1000.0;

/// `tilde V(x)` over `x_grid` at truncation `radius`.
///
/// The statistic is `sup tilde V` (one-sided) or `sup |tilde V|` (two-sided).
/// Each value is recomputed at `2 radius`; the verdict requires that change to
/// stay within `tolerance` and, when given, the statistic to stay within `bound`.
pub fn check_j_bounded(
    source: &dyn DivisorSource,
    x_grid: &[f64],
    radius: f64,
    two_sided: bool,
    bound: Option<f64>,
    tolerance: f64,
) -> Result<ConditionEstimate> {
    if x_grid.is_empty() {
        return Err(Error::DegenerateGrid("empty x grid".into()));
    }
    let max_x = x_grid.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if !(radius >= max_x + 2.0) {
        return Err(Error::InsufficientRadius { given: radius, required: max_x + 2.0 });
    }
    let near = source.enumerate(max_x + 1.0);
    for &x in x_grid {
        let d = distance_to_atoms(&near, Complex64::new(x, 0.0));
        if d < ATOM_CLEARANCE {
            return Err(Error::NearAtom { re: x, im: 0.0, min_dist: d });
        }
    }
    let pairs = x_grid
        .par_iter()
        .map(|&x| {
            let z = Complex64::new(x, 0.0);
            Ok((tilde_v(source, z, radius)?, tilde_v(source, z, 2.0 * radius)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let defect = pairs.iter().map(|(a, b)| (b - a).abs()).fold(0.0, f64::max);
    let statistic = if two_sided {
        values.iter().map(|v| v.abs()).fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let verdict = defect <= tolerance && statistic.is_finite() && bound.is_none_or(|b| statistic <= b);
    Ok(ConditionEstimate {
        radii: x_grid.to_vec(),
        values,
        values_im: None,
        statistic,
        verdict,
        tolerance,
        cauchy_defect: Some(defect),
    })
}

/// `a_k = d k + psi(k)` over the index window `-K..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KreinLevinFit {
    pub d: f64,
    /// Window half-width `K`.
    pub k_max: i64,
    /// `psi(k)` for `k = -K..=K`.
    pub psi: Vec<ComplexPoint>,
    pub psi_sup: f64,
}

impl KreinLevinFit {
    pub fn psi_at(&self, k: i64) -> Option<ComplexPoint> {
        if k.abs() > self.k_max {
            return None;
        }
        Some(self.psi[(k + self.k_max) as usize])
    }
}

/// Indexes a strip-confined divisor by increasing real part (ties by
/// imaginary part, multiplicities repeated), puts index 0 at the atom of least
/// modulus, and fits the mean spacing `d` by least squares over `-K..=K`.
pub fn fit_krein_levin(source: &dyn DivisorSource, k_max: usize, strip_height: f64) -> Result<KreinLevinFit> {
    if !(strip_height >= 0.0) {
        return Err(Error::InvalidArgument(format!("strip height {strip_height} must be >= 0")));
    }
    const MAX_RADIUS: f64 = 1e8;
    let needed = 2 * k_max + 1;
    let mut radius = (2.0 * k_max as f64).max(16.0) + strip_height;
    loop {
        let atoms = source.enumerate(radius);
        if let Some(a) = atoms.iter().find(|a| a.point.im.abs() > strip_height) {
            return Err(Error::NotStripConfined { re: a.point.re, im: a.point.im, height: strip_height });
        }
        // Every atom with |Re a| <= x_safe is inside the enumerated disc.
        let x_safe = (radius * radius - strip_height * strip_height).max(0.0).sqrt();
        let mut points: Vec<Complex64> = atoms
            .iter()
            .filter(|a| a.point.re.abs() <= x_safe)
            .flat_map(|a| std::iter::repeat_n(a.point, a.multiplicity as usize))
            .collect();
        points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let found = points.len();
        if found >= needed.max(5) {
            let origin = (0..found).min_by(|&i, &j| points[i].norm().total_cmp(&points[j].norm())).expect("nonempty");
            if origin >= k_max && found - 1 - origin >= k_max {
                let window = &points[origin - k_max..=origin + k_max];
                return Ok(fit_window(window, k_max));
            }
        }
        if radius >= MAX_RADIUS {
            return Err(Error::TooFewAtoms { found, needed: needed.max(5) });
        }
        radius = (radius * 2.0).min(MAX_RADIUS);
    }
}

fn fit_window(window: &[Complex64], k_max: usize) -> KreinLevinFit {
    let k_of = |i: usize| i as f64 - k_max as f64;
    let n = window.len() as f64;
    let mean_k = window.iter().enumerate().map(|(i, _)| k_of(i)).sum::<f64>() / n;
    let mean_x = window.iter().map(|a| a.re).collect::<CompensatedSum>().value() / n;
    let (mut sxy, mut sxx) = (CompensatedSum::new(), CompensatedSum::new());
    for (i, a) in window.iter().enumerate() {
        let dk = k_of(i) - mean_k;
        sxy.add(dk * (a.re - mean_x));
        sxx.add(dk * dk);
    }
    let d = if sxx.value() > 0.0 { sxy.value() / sxx.value() } else { 0.0 };
    let psi: Vec<Complex64> = window.iter().enumerate().map(|(i, &a)| a - d * k_of(i)).collect();
    let psi_sup = psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
    KreinLevinFit { d, k_max: k_max as i64, psi, psi_sup }
}

/// Partial sums `sum_{|k| < r} (psi(k + n) - psi(k)) k / (k^2 + 1)` at each `r`.
///
/// With `real_only` the imaginary parts are dropped. The verdict asks the
/// last two partial sums to agree within `tolerance`.
pub fn compute_sn(
    fit: &KreinLevinFit,
    n: i64,
    r_list: &[f64],
    real_only: bool,
    tolerance: f64,
) -> Result<ConditionEstimate> {
    if r_list.is_empty() || r_list.windows(2).any(|w| w[1] <= w[0]) || r_list[0] <= 0.0 {
        return Err(Error::InvalidArgument("r list must be positive and strictly increasing".into()));
    }
    let k_top = |r: f64| r.ceil() as i64 - 1;
    let needed = k_top(r_list[r_list.len() - 1]) + n.abs();
    if needed > fit.k_max {
        return Err(Error::WindowExceeded { needed, available: fit.k_max });
    }
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    let mut sums = Vec::with_capacity(r_list.len());
    let mut k_done = 0i64;
    for &r in r_list {
        let top = k_top(r);
        // k = 0 carries weight 0
        for k in (k_done + 1)..=top {
            for kk in [k, -k] {
                let term = (fit.psi_at(kk + n).expect("in window") - fit.psi_at(kk).expect("in window")) * kk as f64
                    / (kk as f64 * kk as f64 + 1.0);
                re.add(term.re);
                im.add(term.im);
            }
        }
        k_done = k_done.max(top);
        sums.push(Complex64::new(re.value(), if real_only { 0.0 } else { im.value() }));
    }
    let defect = match sums.len() {
        0 | 1 => 0.0,
        len => (sums[len - 1] - sums[len - 2]).norm(),
    };
    let last = sums[sums.len() - 1];
    Ok(ConditionEstimate {
        radii: r_list.to_vec(),
        values: sums.iter().map(|s| s.re).collect(),
        values_im: (!real_only).then(|| sums.iter().map(|s| s.im).collect()),
        statistic: if real_only { last.re.abs() } else { last.norm() },
        verdict: defect <= tolerance,
        tolerance,
        cauchy_defect: Some(defect),
    })
}

/// `S_n` over a window of shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnReport {
    pub n_values: Vec<i64>,
    /// `|S_n|` (or `|Re S_n|`) at the largest `r`, per `n`.
    pub magnitudes: Vec<f64>,
    /// Change between the two largest `r`, per `n`.
    pub defects: Vec<f64>,
    pub sup: f64,
    pub re_sup: f64,
    pub max_defect: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub curves: BTreeMap<i64, ConditionEstimate>,
}

pub const DEFAULT_SN_WINDOW: i64 = 20;

/// `S_n` for every `|n| <= n_window`; bounded and settled when every defect is within `tolerance`.
pub fn check_sn_bounded(
    fit: &KreinLevinFit,
    n_window: i64,
    r_list: &[f64],
    real_only: bool,
    tolerance: f64,
) -> Result<SnReport> {
    let n_values: Vec<i64> = (-n_window..=n_window).collect();
    let curves = n_values
        .par_iter()
        .map(|&n| Ok((n, compute_sn(fit, n, r_list, real_only, tolerance)?)))
        .collect::<Result<BTreeMap<i64, ConditionEstimate>>>()?;
    let magnitudes: Vec<f64> = curves.values().map(|c| c.statistic).collect();
    let defects: Vec<f64> = curves.values().map(|c| c.cauchy_defect.unwrap_or(0.0)).collect();
    let sup = magnitudes.iter().copied().fold(0.0, f64::max);
    let re_sup = curves.values().map(|c| c.values[c.values.len() - 1].abs()).fold(0.0, f64::max);
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    Ok(SnReport {
        n_values,
        magnitudes,
        defects,
        sup,
        re_sup,
        max_defect,
        tolerance,
        verdict: sup.is_finite() && max_defect <= tolerance,
        curves,
    })
}

/// Which group of conditions to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionSet {
    /// Residue sum, linear growth, annulus regularity, one-sided `tilde V` bound.
    BoundedOnLine,
    /// As above with the two-sided `tilde V` bound.
    CompactTranslates,
    /// Two-sided bound plus the almost-periodicity test, for measures.
    AlmostPeriodicMeasure,
    /// The same conditions stated for divisors.
    AlmostPeriodicDivisor,
}

impl ConditionSet {
    /// Maps the CLI selector `3..=6` to a set.
    pub fn from_selector(n: u8) -> Option<Self> {
        match n {
            3 => Some(ConditionSet::BoundedOnLine),
            4 => Some(ConditionSet::CompactTranslates),
            5 => Some(ConditionSet::AlmostPeriodicMeasure),
            6 => Some(ConditionSet::AlmostPeriodicDivisor),
            _ => None,
        }
    }

    fn two_sided(self) -> bool {
        self != ConditionSet::BoundedOnLine
    }

    fn needs_ap(self) -> bool {
        matches!(self, ConditionSet::AlmostPeriodicMeasure | ConditionSet::AlmostPeriodicDivisor)
    }
}

/// Tolerances and sampling parameters for [`check_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaConfig {
    pub radii: Vec<f64>,
    /// Default: [`default_x_grid`].
    pub x_grid: Option<Vec<f64>>,
    pub j_radius: f64,
    pub j_bound: Option<f64>,
    pub growth_tol: f64,
    pub annulus_tol: f64,
    pub residue_tol: f64,
    pub j_tol: f64,
    pub ap_family: Vec<TestFunction>,
    pub ap_epsilon: f64,
    pub ap: APConfig,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            x_grid: None,
            j_radius: DEFAULT_J_RADIUS,
            j_bound: None,
            growth_tol: DEFAULT_GROWTH_TOL,
            annulus_tol: DEFAULT_ANNULUS_TOL,
            residue_tol: DEFAULT_RESIDUE_TOL,
            j_tol: DEFAULT_J_TOL,
            ap_family: default_family(),
            ap_epsilon: DEFAULT_EPSILON,
            ap: APConfig::default(),
        }
    }
}

pub const RESIDUE_SUM: &str = "residue_sum";
pub const LINEAR_GROWTH: &str = "linear_growth";
pub const ANNULUS_REGULARITY: &str = "annulus_regularity";
pub const J_UPPER_BOUND: &str = "j_upper_bound";
pub const J_TWO_SIDED_BOUND: &str = "j_two_sided_bound";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub condition_set: ConditionSet,
    pub conditions: BTreeMap<String, ConditionEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap: Option<APReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap_verdict: Option<bool>,
    /// Conjunction of every verdict in the report.
    pub verdict: bool,
}

/// Runs every check in `set` and combines the verdicts.
pub fn check_conditions(
    source: &dyn DivisorSource,
    set: ConditionSet,
    config: &CriteriaConfig,
) -> Result<CriteriaReport> {
    let mut conditions = BTreeMap::new();
    conditions.insert(RESIDUE_SUM.to_string(), check_residue_sum(source, &config.radii, config.residue_tol)?);
    conditions.insert(LINEAR_GROWTH.to_string(), check_linear_growth(source, &config.radii, config.growth_tol)?);
    conditions
        .insert(ANNULUS_REGULARITY.to_string(), check_annulus_regularity(source, &config.radii, config.annulus_tol)?);
    let x_grid = config.x_grid.clone().unwrap_or_else(|| default_x_grid(source));
    let key = if set.two_sided() { J_TWO_SIDED_BOUND } else { J_UPPER_BOUND };
    conditions.insert(
        key.to_string(),
        check_j_bounded(source, &x_grid, config.j_radius, set.two_sided(), config.j_bound, config.j_tol)?,
    );
    let ap = if set.needs_ap() {
        Some(ap_divisor_test(source, &config.ap_family, config.ap_epsilon, &config.ap)?)
    } else {
        None
    };
    let ap_verdict = ap.as_ref().map(|r| r.verdict);
    let verdict = conditions.values().all(|c| c.verdict) && ap_verdict.unwrap_or(true);
    Ok(CriteriaReport { condition_set: set, conditions, ap, ap_verdict, verdict })
}
