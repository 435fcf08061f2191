//! Counting function `n(c, t)` of a divisor and its logarithmic integrals.
//!
//! All discs are closed: an atom at distance exactly `t` from the center is
//! counted in `n(c, t)`. Because `n(c, t)` is a step function of `t`, the
//! integral of `n(c, t) / t` has the closed form
//! `sum_k m_k * log(R / max(lower, |a_k - c|))` over atoms with `|a_k - c| < R`,
//! which is what [`RadialProfile::log_integral`] evaluates.

use crate::divisor::{Atom, ComplexPoint, DivisorSource, LineDensity};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Sorted distances of the atoms of a divisor from a fixed center.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    center: ComplexPoint,
    distances: Vec<(f64, u32)>,
    cumulative: Vec<u64>,
    valid_radius: f64,
}

impl RadialProfile {
    /// Builds a profile from atoms that are known to include every atom within
    /// `valid_radius` of `center`; farther atoms are dropped.
    pub fn from_atoms(atoms: &[Atom], center: ComplexPoint, valid_radius: f64) -> Self {
        let mut distances: Vec<(f64, u32)> = atoms
            .iter()
            .map(|a| ((a.point - center).norm(), a.multiplicity))
            .filter(|&(d, _)| d <= valid_radius)
            .collect();
        distances.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cumulative = distances
            .iter()
            .scan(0u64, |acc, &(_, m)| {
                *acc += u64::from(m);
                Some(*acc)
            })
            .collect();
        Self { center, distances, cumulative, valid_radius }
    }

    pub fn center(&self) -> ComplexPoint {
        self.center
    }

    pub fn valid_radius(&self) -> f64 {
        self.valid_radius
    }

    /// `(distance, multiplicity)` pairs in ascending distance order.
    pub fn distances(&self) -> &[(f64, u32)] {
        &self.distances
    }

    /// `n(center, t)`: total multiplicity in the closed disc of radius `t`.
    pub fn count(&self, t: f64) -> Result<u64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("count radius {t} must be >= 0")));
        }
        if t > self.valid_radius {
            return Err(Error::OutOfRange { t, valid: self.valid_radius });
        }
        let idx = self.distances.partition_point(|&(d, _)| d <= t);
        Ok(if idx == 0 { 0 } else { self.cumulative[idx - 1] })
    }

    /// Exact value of the integral of `n(center, t) / t` over `[lower, upper]`.
    pub fn log_integral(&self, lower: f64, upper: f64) -> Result<f64> {
        if !(lower > 0.0) {
            return Err(Error::InvalidArgument(format!("lower limit {lower} must be > 0")));
        }
        if upper < lower {
            return Err(Error::InvalidArgument(format!("upper limit {upper} below lower limit {lower}")));
        }
        if upper > self.valid_radius {
            return Err(Error::OutOfRange { t: upper, valid: self.valid_radius });
        }
        let sum: CompensatedSum = self
            .distances
            .iter()
            .take_while(|&&(d, _)| d < upper)
            .map(|&(d, m)| f64::from(m) * (upper / d.max(lower)).ln())
            .collect();
        Ok(sum.value())
    }
}

/// Profile of `source` about `center`, exact for every `t <= radius`.
///
/// Atoms are enumerated out to `radius + |center|`, which covers the whole
/// disc of radius `radius` about `center`.
pub fn profile(source: &dyn DivisorSource, center: ComplexPoint, radius: f64) -> Result<RadialProfile> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("profile radius {radius} must be finite and >= 0")));
    }
    let atoms = source.enumerate(radius + center.norm());
    Ok(RadialProfile::from_atoms(&atoms, center, radius))
}

/// Finite-radius value of the integral over `[1, R]` of
/// `(n(0, t) - n(z, t)) / t`.
pub fn tilde_v(source: &dyn DivisorSource, z: ComplexPoint, radius: f64) -> Result<f64> {
    check_tilde_radius(z, radius)?;
    let atoms = source.enumerate(radius + z.norm());
    Ok(tilde_v_atoms(&atoms, z, radius))
}

pub(crate) fn check_tilde_radius(z: ComplexPoint, radius: f64) -> Result<()> {
    let required = (z.norm() + 1.0).max(1.0);
    if !(radius >= required) || !radius.is_finite() {
        return Err(Error::InsufficientRadius { given: radius, required });
    }
    Ok(())
}

/// Same value as the difference of the two profile log-integrals, accumulated
/// atom by atom so that the common `log R` parts cancel before summation.
pub(crate) fn tilde_v_atoms(atoms: &[Atom], z: ComplexPoint, radius: f64) -> f64 {
    let ln_r = radius.ln();
    let mut acc = CompensatedSum::new();
    for a in atoms {
        let d0 = a.point.norm();
        let dz = (a.point - z).norm();
        let term = match (d0 < radius, dz < radius) {
            (true, true) => dz.max(1.0).ln() - d0.max(1.0).ln(),
            (true, false) => ln_r - d0.max(1.0).ln(),
            (false, true) => dz.max(1.0).ln() - ln_r,
            (false, false) => 0.0,
        };
        acc.add(a.mass() * term);
    }
    acc.value()
}

/// Mass that `rho * (Lebesgue measure on the real axis)` puts in the closed disc `B(center, r)`.
pub fn ball_mass_line(density: LineDensity, center: ComplexPoint, r: f64) -> f64 {
    density.rho * 2.0 * (r * r - center.im * center.im).max(0.0).sqrt()
}
