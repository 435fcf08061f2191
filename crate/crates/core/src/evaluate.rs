//! Three evaluators of the log-modulus built from a divisor, and the affine
//! fit that relates them.
//!
//! * [`eval_v`]: counting-integral form, `tilde_v` plus the local logarithms
//!   of atoms within distance 1 of `z`.
//! * [`eval_product_log`]: symmetric partial product `prod_{|a| <= R} (1 - z/a)`
//!   with a factor `C e^{i nu z}`.
//! * [`eval_genus1`]: the absolutely convergent genus-one product.
//!
//! For bounded-on-the-line functions these differ by `A1 y + A2` only, which
//! [`consistency_fit`] recovers by least squares.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{check_tilde_radius, tilde_v_atoms};
use crate::divisor::{Atom, ComplexPoint, DivisorSource};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Grid points closer than this to an atom are rejected by [`consistency_fit`].
pub const ATOM_CLEARANCE: f64 = 0.05;

/// A log-modulus value, which is `-inf` exactly at the zeros.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogModulus {
    Finite(f64),
    MinusInfinity,
}

impl LogModulus {
    pub fn finite(self) -> Option<f64> {
        match self {
            LogModulus::Finite(v) => Some(v),
            LogModulus::MinusInfinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, LogModulus::Finite(_))
    }

    /// The value as a float, with `f64::NEG_INFINITY` for a zero.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::NEG_INFINITY)
    }
}

/// Free constants of the representations: `A0 x + A1 y + A2` and `C e^{i nu z}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RepresentationParams {
    #[serde(rename = "A0")]
    pub a0: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    pub nu: f64,
    #[serde(rename = "logC")]
    pub log_c: f64,
}

impl RepresentationParams {
    /// Product normalization `C e^{i nu z}` with all affine slots zero.
    pub fn product(nu: f64, log_c: f64) -> Self {
        Self { nu, log_c, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub grid: Vec<ComplexPoint>,
    pub values_v: Vec<f64>,
    pub values_product: Vec<f64>,
    pub values_genus1: Vec<f64>,
    /// `A0, A1, A2` from the fit of `product - V`; `nu`, `logC` echo the product parameters.
    pub fitted: RepresentationParams,
    pub residual_max: f64,
}

fn check_eval_radius(z: ComplexPoint, radius: f64) -> Result<()> {
    let required = z.norm() + 2.0;
    if !(radius >= required) || !radius.is_finite() {
        return Err(Error::InsufficientRadius { given: radius, required });
    }
    Ok(())
}

/// `log|1 - w|`, accurate when `w` is small.
fn log_abs_one_minus(w: Complex64) -> f64 {
    if w.norm_sqr() < 0.25 {
        0.5 * (w.norm_sqr() - 2.0 * w.re).ln_1p()
    } else {
        (Complex64::new(1.0, 0.0) - w).norm().ln()
    }
}

fn hits_atom(atoms: &[Atom], z: ComplexPoint) -> bool {
    atoms.iter().any(|a| a.point == z)
}

pub(crate) fn v_from_atoms(atoms: &[Atom], z: ComplexPoint, radius: f64) -> LogModulus {
    if hits_atom(atoms, z) {
        return LogModulus::MinusInfinity;
    }
    let mut acc = CompensatedSum::new();
    acc.add(tilde_v_atoms(atoms, z, radius));
    for a in atoms {
        let d = (a.point - z).norm();
        if d < 1.0 {
            acc.add(a.mass() * d.ln());
        }
    }
    LogModulus::Finite(acc.value())
}

fn product_from_atoms(atoms: &[Atom], z: ComplexPoint, radius: f64, params: RepresentationParams) -> LogModulus {
    if hits_atom(atoms, z) {
        return LogModulus::MinusInfinity;
    }
    let mut acc = CompensatedSum::new();
    acc.add(params.log_c);
    acc.add(-params.nu * z.im);
    for a in atoms.iter().filter(|a| a.point.norm() <= radius) {
        acc.add(a.mass() * log_abs_one_minus(z / a.point));
    }
    LogModulus::Finite(acc.value())
}

fn genus1_from_atoms(atoms: &[Atom], z: ComplexPoint, radius: f64) -> LogModulus {
    if hits_atom(atoms, z) {
        return LogModulus::MinusInfinity;
    }
    let mut acc = CompensatedSum::new();
    for a in atoms {
        let r = a.point.norm();
        if r < 1.0 {
            acc.add(a.mass() * (z - a.point).norm().ln());
        } else if r <= radius {
            let w = z / a.point;
            acc.add(a.mass() * log_abs_one_minus(w));
            acc.add(a.mass() * w.re);
        }
    }
    LogModulus::Finite(acc.value())
}

fn ensure_no_zero_atom(atoms: &[Atom]) -> Result<()> {
    if atoms.iter().any(|a| a.point == Complex64::new(0.0, 0.0)) {
        return Err(Error::ZeroInSupport);
    }
    Ok(())
}

/// Counting-integral representative at truncation radius `radius`.
pub fn eval_v(source: &dyn DivisorSource, z: ComplexPoint, radius: f64) -> Result<LogModulus> {
    check_eval_radius(z, radius)?;
    check_tilde_radius(z, radius)?;
    let atoms = source.enumerate(radius + z.norm());
    Ok(v_from_atoms(&atoms, z, radius))
}

/// `log|C e^{i nu z} prod_{|a| <= R} (1 - z/a)|`. The divisor must not contain 0.
pub fn eval_product_log(
    source: &dyn DivisorSource,
    z: ComplexPoint,
    radius: f64,
    params: RepresentationParams,
) -> Result<LogModulus> {
    check_eval_radius(z, radius)?;
    let atoms = source.enumerate(radius);
    ensure_no_zero_atom(&atoms)?;
    Ok(product_from_atoms(&atoms, z, radius, params))
}

/// Genus-one partial sum over `|a| <= R`, with exact logarithms for `|a| < 1`.
pub fn eval_genus1(source: &dyn DivisorSource, z: ComplexPoint, radius: f64) -> Result<LogModulus> {
    check_eval_radius(z, radius)?;
    let atoms = source.enumerate(radius);
    Ok(genus1_from_atoms(&atoms, z, radius))
}

/// Mean of `f(R)` and `f(R * sqrt 2)`, which damps the oscillation of
/// conditionally convergent partial sums.
pub fn averaged<F>(radius: f64, mut f: F) -> Result<LogModulus>
where
    F: FnMut(f64) -> Result<LogModulus>,
{
    let a = f(radius)?;
    let b = f(radius * std::f64::consts::SQRT_2)?;
    Ok(match (a, b) {
        (LogModulus::Finite(x), LogModulus::Finite(y)) => LogModulus::Finite(0.5 * (x + y)),
        _ => LogModulus::MinusInfinity,
    })
}

/// All three evaluators at each grid point from a single enumeration.
///
/// Grid points are not checked for atom proximity; exact hits come back as
/// [`LogModulus::MinusInfinity`].
pub fn eval_grid(
    source: &dyn DivisorSource,
    grid: &[ComplexPoint],
    radius: f64,
    params: RepresentationParams,
) -> Result<Vec<[LogModulus; 3]>> {
    let max_abs = grid.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in grid {
        check_eval_radius(*z, radius)?;
    }
    let atoms = source.enumerate(radius + max_abs);
    let inner: Vec<Atom> = atoms.iter().filter(|a| a.point.norm() <= radius).copied().collect();
    ensure_no_zero_atom(&inner)?;
    Ok(grid
        .par_iter()
        .map(|&z| {
            [
                v_from_atoms(&atoms, z, radius),
                product_from_atoms(&inner, z, radius, params),
                genus1_from_atoms(&inner, z, radius),
            ]
        })
        .collect())
}

/// Smallest distance from `z` to an atom of `atoms`, `inf` if there are none.
pub fn distance_to_atoms(atoms: &[Atom], z: ComplexPoint) -> f64 {
    atoms.iter().map(|a| (a.point - z).norm()).fold(f64::INFINITY, f64::min)
}

/// `nx * ny` grid over `[x0, x1] x [y0, y1]`, row-major in `y`.
pub fn rect_grid(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Vec<ComplexPoint> {
    let xs = crate::numeric::linspace(x0, x1, nx);
    let ys = crate::numeric::linspace(y0, y1, ny);
    ys.iter().flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y))).collect()
}

/// Least-squares fit of `target` by `A0 x + A1 y + A2` over `grid`.
///
/// Returns `[A0, A1, A2]` and the largest absolute residual. Needs at least
/// four points that are not collinear.
pub fn fit_affine(grid: &[ComplexPoint], target: &[f64]) -> Result<([f64; 3], f64)> {
    if grid.len() != target.len() {
        return Err(Error::InvalidArgument(format!("{} grid points but {} values", grid.len(), target.len())));
    }
    if grid.len() < 4 {
        return Err(Error::DegenerateGrid(format!("{} points, need at least 4", grid.len())));
    }
    let design = DMatrix::from_fn(grid.len(), 3, |i, j| match j {
        0 => grid[i].re,
        1 => grid[i].im,
        _ => 1.0,
    });
    let rhs = DVector::from_column_slice(target);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.rank(smax * 1e-10) < 3 {
        return Err(Error::DegenerateGrid("grid points are collinear".into()));
    }
    let coef = svd.solve(&rhs, smax * 1e-12).map_err(|e| Error::DegenerateGrid(e.to_string()))?;
    let residual = (&design * &coef - &rhs).amax();
    Ok(([coef[0], coef[1], coef[2]], residual))
}

/// Least-squares fit of `product - V` by `A0 x + A1 y + A2` with `nu = logC = 0`.
pub fn consistency_fit(source: &dyn DivisorSource, grid: &[ComplexPoint], radius: f64) -> Result<EvalReport> {
    consistency_fit_with(source, grid, radius, RepresentationParams::default())
}

/// As [`consistency_fit`], with the product evaluated under `params`.
pub fn consistency_fit_with(
    source: &dyn DivisorSource,
    grid: &[ComplexPoint],
    radius: f64,
    params: RepresentationParams,
) -> Result<EvalReport> {
    if grid.len() < 4 {
        return Err(Error::DegenerateGrid(format!("{} points, need at least 4", grid.len())));
    }
    let max_abs = grid.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nearby = source.enumerate(max_abs + 1.0);
    for z in grid {
        let d = distance_to_atoms(&nearby, *z);
        if d < ATOM_CLEARANCE {
            return Err(Error::NearAtom { re: z.re, im: z.im, min_dist: d });
        }
    }
    let values = eval_grid(source, grid, radius, params)?;
    let finite = |v: LogModulus| v.finite().expect("grid points avoid atoms");
    let values_v: Vec<f64> = values.iter().map(|v| finite(v[0])).collect();
    let values_product: Vec<f64> = values.iter().map(|v| finite(v[1])).collect();
    let values_genus1: Vec<f64> = values.iter().map(|v| finite(v[2])).collect();

    let diffs: Vec<f64> = values_product.iter().zip(&values_v).map(|(p, v)| p - v).collect();
    let ([a0, a1, a2], residual_max) = fit_affine(grid, &diffs)?;

    Ok(EvalReport {
        grid: grid.to_vec(),
        values_v,
        values_product,
        values_genus1,
        fitted: RepresentationParams { a0, a1, a2, nu: params.nu, log_c: params.log_c },
        residual_max,
    })
}
