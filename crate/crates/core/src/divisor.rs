//! Divisors: zero sets with multiplicities, produced on demand inside any
//! requested radius.
//!
//! A divisor is never stored as a fixed list of zeros. Every quantity this
//! crate computes is a truncation of a limit as the radius grows, so a source
//! is a rule that lists all atoms in the closed disc `|z| <= R` for whatever
//! `R` the caller picks.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

/// A zero of prescribed multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: ComplexPoint,
    pub multiplicity: u32,
}

impl Atom {
    pub fn new(point: ComplexPoint, multiplicity: u32) -> Result<Self> {
        if !point.re.is_finite() || !point.im.is_finite() {
            return Err(Error::InvalidArgument(format!("atom at non-finite point {point}")));
        }
        if multiplicity == 0 {
            return Err(Error::InvalidArgument("atom multiplicity must be at least 1".into()));
        }
        Ok(Self { point, multiplicity })
    }

    /// Simple zero on the real axis.
    pub fn real(x: f64) -> Self {
        Self { point: Complex64::new(x, 0.0), multiplicity: 1 }
    }

    pub fn mass(&self) -> f64 {
        f64::from(self.multiplicity)
    }
}

/// A rule enumerating every atom of a divisor inside a closed disc about the origin.
///
/// `enumerate(r)` returns each atom with `|point| <= r` exactly once; the
/// result for a smaller radius is always a sub-multiset of the result for a
/// larger one, and it is finite for every finite radius.
pub trait DivisorSource: Send + Sync {
    fn enumerate(&self, radius: f64) -> Vec<Atom>;

    fn label(&self) -> String;
}

/// Sum of multiplicities.
pub fn total_multiplicity(atoms: &[Atom]) -> u64 {
    atoms.iter().map(|a| u64::from(a.multiplicity)).sum()
}

/// Perturbation profile of a [`GeneratorSpec::PerturbedLattice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseRule {
    /// `k + amplitude * sin(2 pi frequency k)`
    Sine,
    /// `k + amplitude * (-1)^k`
    Alternating,
    /// `k + amplitude * log(1 + |k|)`
    LogDrift,
    /// `k + i * amplitude * sign(k) * log(1 + |k|)`
    LogImaginary,
}

impl PhaseRule {
    fn displacement(self, k: i64, amplitude: f64, frequency: f64) -> Complex64 {
        let kf = k as f64;
        match self {
            PhaseRule::Sine => Complex64::new(amplitude * (2.0 * PI * frequency * kf).sin(), 0.0),
            PhaseRule::Alternating => {
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                Complex64::new(amplitude * sign, 0.0)
            }
            PhaseRule::LogDrift => Complex64::new(amplitude * kf.abs().ln_1p(), 0.0),
            PhaseRule::LogImaginary => Complex64::new(0.0, amplitude * kf.signum() * kf.abs().ln_1p()),
        }
    }

    /// Upper bound of `|displacement(k)|` for `|k| = n`.
    fn displacement_bound(self, n: u64, amplitude: f64) -> f64 {
        match self {
            PhaseRule::Sine | PhaseRule::Alternating => amplitude,
            PhaseRule::LogDrift | PhaseRule::LogImaginary => amplitude * (n as f64).ln_1p(),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            PhaseRule::Sine => "sine",
            PhaseRule::Alternating => "alternating",
            PhaseRule::LogDrift => "log-drift",
            PhaseRule::LogImaginary => "log-imaginary",
        }
    }
}

/// Declarative description of a divisor, mirrored one-to-one by the JSON
/// divisor file format.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    ExplicitList(Vec<Atom>),
    /// Nonzero integers, each with the given multiplicity.
    PuncturedLattice {
        multiplicity: u32,
    },
    /// `k + offset`, `k` over all integers.
    ShiftedLattice {
        offset: f64,
    },
    /// `k + perturbation(k)` over nonzero `k` (or all `k` with `include_zero`).
    PerturbedLattice {
        amplitude: f64,
        frequency: f64,
        rule: PhaseRule,
        include_zero: bool,
    },
    /// `k^exponent`, `k = 1, 2, ...`
    PowerSequence {
        exponent: f64,
    },
    PositiveIntegers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub re: f64,
    pub im: f64,
    #[serde(default = "one")]
    pub mult: u32,
}

fn one() -> u32 {
    1
}

impl From<&Atom> for AtomRecord {
    fn from(a: &Atom) -> Self {
        Self { re: a.point.re, im: a.point.im, mult: a.multiplicity }
    }
}

impl AtomRecord {
    pub fn to_atom(&self) -> Result<Atom> {
        Atom::new(Complex64::new(self.re, self.im), self.mult)
    }
}

/// On-disk form: `{"kind": "...", "params": [...]}` or
/// `{"kind": "explicit-list", "atoms": [{"re":..,"im":..,"mult":..}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DivisorFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    atoms: Vec<AtomRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase_rule: Option<PhaseRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    include_zero: Option<bool>,
}

fn malformed(kind: &str, reason: impl Into<String>) -> Error {
    Error::MalformedParams { kind: kind.to_string(), reason: reason.into() }
}

fn expect_params(kind: &str, params: &[f64], min: usize, max: usize) -> Result<()> {
    if params.len() < min || params.len() > max {
        return Err(malformed(kind, format!("expected {min}..={max} params, got {}", params.len())));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(malformed(kind, "params must be finite"));
    }
    Ok(())
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::ExplicitList(_) => "explicit-list",
            GeneratorSpec::PuncturedLattice { .. } => "integer-lattice-punctured",
            GeneratorSpec::ShiftedLattice { .. } => "shifted-lattice",
            GeneratorSpec::PerturbedLattice { .. } => "perturbed-lattice",
            GeneratorSpec::PowerSequence { .. } => "power-sequence",
            GeneratorSpec::PositiveIntegers => "positive-integers",
        }
    }

    /// Golden-ratio perturbed lattice `k + amplitude * sin(2 pi beta k)`, `beta = (sqrt 5 - 1)/2`.
    pub fn golden(amplitude: f64) -> Self {
        GeneratorSpec::PerturbedLattice {
            amplitude,
            frequency: (5f64.sqrt() - 1.0) / 2.0,
            rule: PhaseRule::Sine,
            include_zero: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DivisorFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        let file = self.to_file();
        serde_json::to_string_pretty(&file).expect("divisor spec serializes")
    }

    fn from_file(file: DivisorFile) -> Result<Self> {
        let kind = file.kind.as_str();
        let p = &file.params;
        let spec = match kind {
            "explicit-list" => {
                if !p.is_empty() {
                    return Err(malformed(kind, "explicit lists take `atoms`, not `params`"));
                }
                let atoms = file
                    .atoms
                    .iter()
                    .map(AtomRecord::to_atom)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| malformed(kind, e.to_string()))?;
                GeneratorSpec::ExplicitList(atoms)
            }
            "integer-lattice-punctured" => {
                expect_params(kind, p, 0, 1)?;
                let multiplicity = match p.first() {
                    None => 1,
                    Some(&m) if m >= 1.0 && m.fract() == 0.0 && m <= f64::from(u32::MAX) => m as u32,
                    Some(&m) => return Err(malformed(kind, format!("multiplicity {m} is not a positive integer"))),
                };
                GeneratorSpec::PuncturedLattice { multiplicity }
            }
            "shifted-lattice" => {
                expect_params(kind, p, 1, 1)?;
                GeneratorSpec::ShiftedLattice { offset: p[0] }
            }
            "perturbed-lattice" => {
                expect_params(kind, p, 1, 2)?;
                let rule = file.phase_rule.unwrap_or(PhaseRule::Sine);
                if rule == PhaseRule::Sine && p.len() < 2 {
                    return Err(malformed(kind, "sine rule needs [amplitude, frequency]"));
                }
                if p[0] < 0.0 {
                    return Err(malformed(kind, "amplitude must be >= 0"));
                }
                GeneratorSpec::PerturbedLattice {
                    amplitude: p[0],
                    frequency: p.get(1).copied().unwrap_or(0.0),
                    rule,
                    include_zero: file.include_zero.unwrap_or(false),
                }
            }
            "power-sequence" => {
                expect_params(kind, p, 1, 1)?;
                if p[0] <= 0.0 {
                    return Err(malformed(kind, "exponent must be > 0"));
                }
                GeneratorSpec::PowerSequence { exponent: p[0] }
            }
            "positive-integers" => {
                expect_params(kind, p, 0, 0)?;
                GeneratorSpec::PositiveIntegers
            }
            other => return Err(Error::UnknownKind(other.to_string())),
        };
        Ok(spec)
    }

    fn to_file(&self) -> DivisorFile {
        let mut file = DivisorFile {
            kind: self.kind().to_string(),
            params: Vec::new(),
            atoms: Vec::new(),
            phase_rule: None,
            include_zero: None,
        };
        match self {
            GeneratorSpec::ExplicitList(atoms) => file.atoms = atoms.iter().map(AtomRecord::from).collect(),
            GeneratorSpec::PuncturedLattice { multiplicity } => {
                if *multiplicity != 1 {
                    file.params = vec![f64::from(*multiplicity)];
                }
            }
            GeneratorSpec::ShiftedLattice { offset } => file.params = vec![*offset],
            GeneratorSpec::PerturbedLattice { amplitude, frequency, rule, include_zero } => {
                file.params = vec![*amplitude, *frequency];
                file.phase_rule = Some(*rule);
                file.include_zero = Some(*include_zero);
            }
            GeneratorSpec::PowerSequence { exponent } => file.params = vec![*exponent],
            GeneratorSpec::PositiveIntegers => {}
        }
        file
    }
}

/// Builds the source described by `spec`.
pub fn build_source(spec: &GeneratorSpec) -> Result<Box<dyn DivisorSource>> {
    Ok(match *spec {
        GeneratorSpec::ExplicitList(ref atoms) => Box::new(ExplicitList::new(atoms.clone())),
        GeneratorSpec::PuncturedLattice { multiplicity } => {
            if multiplicity == 0 {
                return Err(malformed(spec.kind(), "multiplicity must be >= 1"));
            }
            Box::new(PuncturedLattice { multiplicity })
        }
        GeneratorSpec::ShiftedLattice { offset } => {
            if !offset.is_finite() {
                return Err(malformed(spec.kind(), "offset must be finite"));
            }
            Box::new(ShiftedLattice { offset })
        }
        GeneratorSpec::PerturbedLattice { amplitude, frequency, rule, include_zero } => {
            if !(amplitude >= 0.0 && amplitude.is_finite()) || !frequency.is_finite() {
                return Err(malformed(spec.kind(), "amplitude must be finite and >= 0"));
            }
            Box::new(PerturbedLattice { amplitude, frequency, rule, include_zero })
        }
        GeneratorSpec::PowerSequence { exponent } => {
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(malformed(spec.kind(), "exponent must be > 0"));
            }
            Box::new(PowerSequence { exponent })
        }
        GeneratorSpec::PositiveIntegers => Box::new(PositiveIntegers),
    })
}

/// Finite divisor given by its atoms. Coincident atoms are merged.
#[derive(Debug, Clone)]
pub struct ExplicitList {
    atoms: Vec<Atom>,
}

impl ExplicitList {
    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.sort_by(|a, b| a.point.re.total_cmp(&b.point.re).then(a.point.im.total_cmp(&b.point.im)));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.point == atom.point => last.multiplicity += atom.multiplicity,
                _ => merged.push(atom),
            }
        }
        Self { atoms: merged }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl DivisorSource for ExplicitList {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        self.atoms.iter().filter(|a| a.point.norm() <= radius).copied().collect()
    }

    fn label(&self) -> String {
        format!("explicit-list({} atoms)", self.atoms.len())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PuncturedLattice {
    pub multiplicity: u32,
}

impl DivisorSource for PuncturedLattice {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        if !(radius >= 1.0) {
            return Vec::new();
        }
        let n = radius.floor() as i64;
        (-n..=n)
            .filter(|&k| k != 0)
            .map(|k| Atom { point: Complex64::new(k as f64, 0.0), multiplicity: self.multiplicity })
            .collect()
    }

    fn label(&self) -> String {
        if self.multiplicity == 1 {
            "integer-lattice-punctured".into()
        } else {
            format!("integer-lattice-punctured(mult {})", self.multiplicity)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShiftedLattice {
    pub offset: f64,
}

impl DivisorSource for ShiftedLattice {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        if !(radius >= 0.0) {
            return Vec::new();
        }
        let lo = (-radius - self.offset).floor() as i64;
        let hi = (radius - self.offset).ceil() as i64;
        (lo..=hi).map(|k| k as f64 + self.offset).filter(|x| x.abs() <= radius).map(Atom::real).collect()
    }

    fn label(&self) -> String {
        format!("shifted-lattice({})", self.offset)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbedLattice {
    pub amplitude: f64,
    pub frequency: f64,
    pub rule: PhaseRule,
    pub include_zero: bool,
}

impl PerturbedLattice {
    pub fn atom_at(&self, k: i64) -> Complex64 {
        Complex64::new(k as f64, 0.0) + self.rule.displacement(k, self.amplitude, self.frequency)
    }
}

impl DivisorSource for PerturbedLattice {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        let mut out = Vec::new();
        if !(radius >= 0.0) {
            return out;
        }
        let mut push = |k: i64| {
            let a = self.atom_at(k);
            if a.norm() <= radius {
                out.push(Atom { point: a, multiplicity: 1 });
            }
        };
        if self.include_zero {
            push(0);
        }
        // |a_k| >= |k| - bound(|k|), and that lower bound increases once |k| > amplitude.
        let mut n: u64 = 1;
        loop {
            let lower = n as f64 - self.rule.displacement_bound(n, self.amplitude);
            if lower > radius && n as f64 > self.amplitude {
                break;
            }
            push(-(n as i64));
            push(n as i64);
            n += 1;
        }
        let may_collide = match self.rule {
            PhaseRule::Sine | PhaseRule::Alternating => self.amplitude >= 0.5,
            PhaseRule::LogDrift | PhaseRule::LogImaginary => self.amplitude > 0.0,
        };
        if may_collide {
            out = ExplicitList::new(out).atoms;
        }
        out
    }

    fn label(&self) -> String {
        format!(
            "perturbed-lattice({}, {}, {}{})",
            self.amplitude,
            self.frequency,
            self.rule.as_str(),
            if self.include_zero { ", with 0" } else { "" }
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PowerSequence {
    pub exponent: f64,
}

impl DivisorSource for PowerSequence {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        (1u64..).map(|k| (k as f64).powf(self.exponent)).take_while(|&x| x <= radius).map(Atom::real).collect()
    }

    fn label(&self) -> String {
        format!("power-sequence({})", self.exponent)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PositiveIntegers;

impl DivisorSource for PositiveIntegers {
    fn enumerate(&self, radius: f64) -> Vec<Atom> {
        if !(radius >= 1.0) {
            return Vec::new();
        }
        (1..=radius.floor() as i64).map(|k| Atom::real(k as f64)).collect()
    }

    fn label(&self) -> String {
        "positive-integers".into()
    }
}

impl fmt::Debug for dyn DivisorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DivisorSource({})", self.label())
    }
}

/// Mass per unit length of a measure carried by the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineDensity {
    pub rho: f64,
}

impl LineDensity {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("line density {rho} must be finite and >= 0")));
        }
        Ok(Self { rho })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reals(atoms: &[Atom]) -> Vec<f64> {
        let mut xs: Vec<f64> = atoms.iter().map(|a| a.point.re).collect();
        xs.sort_by(f64::total_cmp);
        xs
    }

    #[test]
    fn punctured_lattice_small_disc() {
        let src = build_source(&GeneratorSpec::PuncturedLattice { multiplicity: 1 }).unwrap();
        let atoms = src.enumerate(3.5);
        assert_eq!(atoms.len(), 6);
        assert_eq!(reals(&atoms), vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
        assert!(atoms.iter().all(|a| a.point != Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn shifted_lattice_quarter() {
        let src = build_source(&GeneratorSpec::ShiftedLattice { offset: 0.25 }).unwrap();
        assert_eq!(reals(&src.enumerate(2.0)), vec![-1.75, -0.75, 0.25, 1.25]);
    }

    #[test]
    fn explicit_list_with_multiplicity() {
        let spec = GeneratorSpec::ExplicitList(vec![Atom::new(Complex64::new(0.0, 1.0), 2).unwrap()]);
        let atoms = build_source(&spec).unwrap().enumerate(1.0);
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0].multiplicity, 2);
        assert_eq!(atoms[0].point, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn explicit_list_merges_duplicates() {
        let list = ExplicitList::new(vec![Atom::real(1.0), Atom::real(2.0), Atom::real(1.0)]);
        assert_eq!(list.atoms().len(), 2);
        assert_eq!(total_multiplicity(list.atoms()), 3);
    }

    #[test]
    fn multiplicity_totals() {
        assert_eq!(total_multiplicity(&[]), 0);
        assert_eq!(total_multiplicity(&[Atom::real(1.0), Atom::real(-1.0)]), 2);
        assert_eq!(total_multiplicity(&[Atom::new(Complex64::i(), 3).unwrap()]), 3);
    }

    #[test]
    fn boundary_atoms_are_included() {
        let src = PositiveIntegers;
        assert_eq!(src.enumerate(3.0).len(), 3);
        let src = PowerSequence { exponent: 0.5 };
        // sqrt(k) <= 3 iff k <= 9
        assert_eq!(src.enumerate(3.0).len(), 9);
    }

    #[test]
    fn perturbed_rules() {
        let alt = PerturbedLattice { amplitude: 0.1, frequency: 0.0, rule: PhaseRule::Alternating, include_zero: true };
        assert_eq!(alt.atom_at(0), Complex64::new(0.1, 0.0));
        assert_eq!(alt.atom_at(3), Complex64::new(2.9, 0.0));
        let logi =
            PerturbedLattice { amplitude: 1.0, frequency: 0.0, rule: PhaseRule::LogImaginary, include_zero: false };
        let a = logi.atom_at(-2);
        assert_eq!(a.re, -2.0);
        assert!((a.im + 3f64.ln()).abs() < 1e-15);
        let drift = PerturbedLattice { amplitude: 1.0, frequency: 0.0, rule: PhaseRule::LogDrift, include_zero: false };
        // every atom of modulus <= 30 is found
        let got = drift.enumerate(30.0).len();
        let brute = (-100i64..=100).filter(|&k| k != 0 && drift.atom_at(k).norm() <= 30.0).count();
        assert_eq!(got, brute);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let spec = GeneratorSpec::golden(0.3);
        assert_eq!(GeneratorSpec::from_json(&spec.to_json()).unwrap(), spec);

        let parsed =
            GeneratorSpec::from_json(r#"{"kind":"explicit-list","atoms":[{"re":0,"im":1,"mult":2}]}"#).unwrap();
        assert_eq!(parsed, GeneratorSpec::ExplicitList(vec![Atom::new(Complex64::i(), 2).unwrap()]));

        assert!(matches!(GeneratorSpec::from_json(r#"{"kind":"spiral"}"#), Err(Error::UnknownKind(_))));
        assert!(matches!(
            GeneratorSpec::from_json(r#"{"kind":"power-sequence","params":[-1]}"#),
            Err(Error::MalformedParams { .. })
        ));
        assert!(matches!(
            GeneratorSpec::from_json(r#"{"kind":"shifted-lattice","params":[]}"#),
            Err(Error::MalformedParams { .. })
        ));
        assert!(matches!(
            GeneratorSpec::from_json(r#"{"kind":"explicit-list","atoms":[{"re":0,"im":1,"mult":0}]}"#),
            Err(Error::MalformedParams { .. })
        ));
        assert!(GeneratorSpec::from_json("{not json").is_err());
    }

    fn any_spec() -> impl Strategy<Value = GeneratorSpec> {
        prop_oneof![
            (1u32..4).prop_map(|multiplicity| GeneratorSpec::PuncturedLattice { multiplicity }),
            (-2.0f64..2.0).prop_map(|offset| GeneratorSpec::ShiftedLattice { offset }),
            (0.0f64..1.5, 0.0f64..1.0, 0usize..4, any::<bool>()).prop_map(|(amplitude, frequency, r, include_zero)| {
                let rule = [PhaseRule::Sine, PhaseRule::Alternating, PhaseRule::LogDrift, PhaseRule::LogImaginary][r];
                GeneratorSpec::PerturbedLattice { amplitude, frequency, rule, include_zero }
            }),
            (0.7f64..2.0).prop_map(|exponent| GeneratorSpec::PowerSequence { exponent }),
            Just(GeneratorSpec::PositiveIntegers),
            prop::collection::vec((-20.0f64..20.0, -20.0f64..20.0, 1u32..3), 0..30).prop_map(|v| {
                GeneratorSpec::ExplicitList(
                    v.into_iter().map(|(re, im, m)| Atom::new(Complex64::new(re, im), m).unwrap()).collect(),
                )
            }),
        ]
    }

    proptest! {
        #[test]
        fn enumeration_is_nested_exact_and_deterministic(spec in any_spec(), r1 in 0.0f64..40.0, dr in 0.0f64..40.0) {
            let src = build_source(&spec).unwrap();
            let small = src.enumerate(r1);
            let big = src.enumerate(r1 + dr);
            prop_assert!(small.iter().all(|a| a.point.norm() <= r1));
            for a in &small {
                prop_assert!(big.iter().any(|b| b.point == a.point && b.multiplicity == a.multiplicity));
            }
            // the atoms of `big` inside r1 are exactly `small`
            let inner = big.iter().filter(|b| b.point.norm() <= r1).count();
            prop_assert_eq!(inner, small.len());
            prop_assert_eq!(src.enumerate(r1), small);
        }
    }
}
