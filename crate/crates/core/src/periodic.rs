//! Period-one entire functions built from finitely many zeros per period.
//!
//! A divisor stable under `z -> z + 1` with finite mass in the strip
//! `0 <= Re z < 1` is the zero set of
//! `C e^{i nu z} prod_k (1 - cos 2 pi (z - gamma_k))^{m_k / 2}`.
//! Only the modulus is evaluated, via `1 - cos w = 2 sin^2(w / 2)`, so no
//! branch of the square root is ever chosen.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::ConditionEstimate;
use crate::divisor::{Atom, AtomRecord, ComplexPoint, DivisorSource, ExplicitList};
use crate::error::{Error, Result};
use crate::evaluate::LogModulus;

/// Beyond this `|Im(z - gamma)|` the factor is evaluated in its asymptotic form.
pub const ASYMPTOTIC_HEIGHT: f64 = 20.0;

/// Zeros in one period strip, plus the normalization `C e^{i nu z}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicDivisorSpec {
    gammas: Vec<Atom>,
    pub nu: f64,
    pub log_c: f64,
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    gammas: Vec<AtomRecord>,
    #[serde(default)]
    nu: f64,
    #[serde(default, rename = "logC")]
    log_c: f64,
}

impl PeriodicDivisorSpec {
    /// Coincident `gamma`s are merged. Every `gamma` must satisfy `0 <= Re gamma < 1`.
    pub fn new(gammas: Vec<Atom>, nu: f64, log_c: f64) -> Result<Self> {
        if let Some(g) = gammas.iter().find(|g| !(0.0..1.0).contains(&g.point.re)) {
            return Err(Error::InvalidArgument(format!("gamma {} has real part outside [0, 1)", g.point)));
        }
        if !nu.is_finite() || !log_c.is_finite() {
            return Err(Error::InvalidArgument("nu and logC must be finite".into()));
        }
        Ok(Self { gammas: ExplicitList::new(gammas).atoms().to_vec(), nu, log_c })
    }

    pub fn gammas(&self) -> &[Atom] {
        &self.gammas
    }

    pub fn total_multiplicity(&self) -> u64 {
        crate::divisor::total_multiplicity(&self.gammas)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)?;
        let gammas = file.gammas.iter().map(AtomRecord::to_atom).collect::<Result<Vec<_>>>()?;
        Self::new(gammas, file.nu, file.log_c)
    }

    pub fn to_json(&self) -> String {
        let file =
            SpecFile { gammas: self.gammas.iter().map(AtomRecord::from).collect(), nu: self.nu, log_c: self.log_c };
        serde_json::to_string_pretty(&file).expect("periodic spec serializes")
    }
}

/// The orbit `{gamma_k + n : n in Z}`.
#[derive(Debug, Clone)]
pub struct PeriodicSource {
    gammas: Vec<Atom>,
}

pub fn periodic_source(spec: &PeriodicDivisorSpec) -> PeriodicSource {
    PeriodicSource { gammas: spec.gammas.clone() }
}

impl DivisorSource for PeriodicSource {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        let mut out = Vec::new();
        if !(radius >= 0.0) {
            return out;
        }
        for g in &self.gammas {
            if g.point.im.abs() > radius {
                continue;
            }
            let lo = (-radius - g.point.re).ceil() as i64;
            let hi = (radius - g.point.re).floor() as i64;
            for n in lo..=hi {
                let point = g.point + n as f64;
                if point.norm() <= radius {
                    out.push(Atom { point, multiplicity: g.multiplicity });
                }
            }
        }
        out
    }

    fn label(&self) -> String {
        format!("periodic({} gammas)", self.gammas.len())
    }
}

/// `log|1 - q|` for small `|q|`.
fn log_abs_one_minus_small(q: Complex64) -> f64 {
    0.5 * (q.norm_sqr() - 2.0 * q.re).ln_1p()
}

/// `log |sqrt(1 - cos 2 pi (z - gamma))|`, i.e. `log 2 / 2 + log|sin pi (z - gamma)|`.
pub fn factor_log(z: ComplexPoint, gamma: ComplexPoint) -> LogModulus {
    let w = z - gamma;
    // reduce to u in [-1/2, 1/2] so that values at z and z + 1 agree
    let u = w.re - w.re.round();
    let v = w.im;
    if v.abs() > ASYMPTOTIC_HEIGHT {
        let sign = v.signum();
        let q = Complex64::from_polar((-2.0 * PI * v.abs()).exp(), sign * 2.0 * PI * u);
        return LogModulus::Finite(PI * v.abs() - LN_2 + 0.5 * LN_2 + log_abs_one_minus_small(q));
    }
    let s = (PI * u).sin();
    let sh = (PI * v).sinh();
    let m2 = s * s + sh * sh;
    if m2 == 0.0 {
        return LogModulus::MinusInfinity;
    }
    LogModulus::Finite(0.5 * LN_2 + 0.5 * m2.ln())
}

/// `logC - nu y + sum_k m_k factor_log(z, gamma_k)`.
pub fn periodic_function_log(z: ComplexPoint, spec: &PeriodicDivisorSpec) -> LogModulus {
    let mut total = spec.log_c - spec.nu * z.im;
    for g in &spec.gammas {
        match factor_log(z, g.point) {
            LogModulus::Finite(v) => total += g.mass() * v,
            LogModulus::MinusInfinity => return LogModulus::MinusInfinity,
        }
    }
    LogModulus::Finite(total)
}

/// Largest `|log F(z + 1) - log F(z)|` over `grid`, skipping zeros.
pub fn periodicity_residual(spec: &PeriodicDivisorSpec, grid: &[ComplexPoint]) -> f64 {
    grid.iter()
        .filter_map(|&z| {
            let a = periodic_function_log(z, spec).finite()?;
            let b = periodic_function_log(z + 1.0, spec).finite()?;
            Some((b - a).abs())
        })
        .fold(0.0, f64::max)
}

/// Outcome of [`check_periodic_divisor`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCheck {
    pub radius: f64,
    /// Atoms `a` with `|a| <= R - 1` for which `a + 1` or `a - 1` is not an atom of equal multiplicity.
    pub translation_defects: Vec<ComplexPoint>,
    pub allow_defects: usize,
    pub strip_heights: Vec<f64>,
    /// Mass in `{0 <= x < 1, |y| <= h}` for each height.
    pub strip_masses: Vec<u64>,
    pub strip_stable: bool,
    pub identity_n: Vec<u32>,
    /// `2n * mass{0 <= x < 1, |y| < n}`
    pub identity_strip: Vec<u64>,
    /// `mass{-n <= x < n, |y| < n}`
    pub identity_box: Vec<u64>,
    pub identity_holds: bool,
    pub verdict: bool,
}

impl PeriodicCheck {
    /// Strip-mass curve with the combined verdict; the statistic is the number of translation defects.
    pub fn as_condition(&self) -> ConditionEstimate {
        ConditionEstimate::new(
            self.strip_heights.clone(),
            self.strip_masses.iter().map(|&m| m as f64).collect(),
            self.translation_defects.len() as f64,
            self.verdict,
            self.allow_defects as f64,
        )
    }
}

const MATCH_TOL: f64 = 1e-9;

fn has_partner(sorted: &[Atom], target: ComplexPoint, multiplicity: u32) -> bool {
    let start = sorted.partition_point(|a| a.point.re < target.re - MATCH_TOL);
    sorted[start..]
        .iter()
        .take_while(|a| a.point.re <= target.re + MATCH_TOL)
        .any(|a| (a.point - target).norm() <= MATCH_TOL && a.multiplicity == multiplicity)
}

fn mass_where(atoms: &[Atom], pred: impl Fn(ComplexPoint) -> bool) -> u64 {
    atoms.iter().filter(|a| pred(a.point)).map(|a| u64::from(a.multiplicity)).sum()
}

/// Checks stability under `z -> z + 1`, finiteness of the mass per period
/// strip, and the counting identity
/// `2n * mass{0 <= x < 1, |y| < n} = mass{-n <= x < n, |y| < n}`.
pub fn check_periodic_divisor(
    source: &dyn DivisorSource,
    radius: f64,
    n_list: &[u32],
    allow_defects: usize,
) -> Result<PeriodicCheck> {
    if !(radius >= 2.0) || !radius.is_finite() {
        return Err(Error::InsufficientRadius { given: radius, required: 2.0 });
    }
    let n_max = n_list.iter().copied().max().unwrap_or(0) as f64;
    let enum_radius = radius.max(n_max * std::f64::consts::SQRT_2 + 1.0);
    let mut atoms = source.enumerate(enum_radius);
    atoms.sort_by(|a, b| a.point.re.total_cmp(&b.point.re).then(a.point.im.total_cmp(&b.point.im)));

    let translation_defects: Vec<ComplexPoint> = atoms
        .iter()
        .filter(|a| a.point.norm() <= radius - 1.0)
        .filter(|a| {
            !has_partner(&atoms, a.point + 1.0, a.multiplicity) || !has_partner(&atoms, a.point - 1.0, a.multiplicity)
        })
        .map(|a| a.point)
        .collect();

    let in_strip = |p: ComplexPoint| (0.0..1.0).contains(&p.re);
    let strip_heights: Vec<f64> = [0.25, 0.5, 1.0].iter().map(|f| f * (radius - 1.0)).collect();
    let strip_masses: Vec<u64> =
        strip_heights.iter().map(|&h| mass_where(&atoms, |p| in_strip(p) && p.im.abs() <= h)).collect();
    let strip_stable = strip_masses[1] == strip_masses[2];

    let mut identity_strip = Vec::new();
    let mut identity_box = Vec::new();
    for &n in n_list {
        let nf = f64::from(n);
        identity_strip.push(2 * u64::from(n) * mass_where(&atoms, |p| in_strip(p) && p.im.abs() < nf));
        identity_box.push(mass_where(&atoms, |p| p.re >= -nf && p.re < nf && p.im.abs() < nf));
    }
    let identity_holds = identity_strip == identity_box;
    let verdict = translation_defects.len() <= allow_defects && strip_stable && identity_holds;
    Ok(PeriodicCheck {
        radius,
        translation_defects,
        allow_defects,
        strip_heights,
        strip_masses,
        strip_stable,
        identity_n: n_list.to_vec(),
        identity_strip,
        identity_box,
        identity_holds,
        verdict,
    })
}
