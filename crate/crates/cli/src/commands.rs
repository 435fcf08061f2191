use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use apdivisor::almostperiod::{default_family, sample_family, DEFAULT_EPSILON};
use apdivisor::azarin::{default_r_rule, default_vinf_t_list, default_y_list, DEFAULT_DENSITY_TOL, DEFAULT_VINF_TOL};
use apdivisor::criteria::{
    DEFAULT_ANNULUS_TOL, DEFAULT_GROWTH_TOL, DEFAULT_J_RADIUS, DEFAULT_J_TOL, DEFAULT_RESIDUE_TOL,
};
use apdivisor::evaluate::{averaged, distance_to_atoms, eval_grid, rect_grid, ATOM_CLEARANCE};
use apdivisor::periodic::periodicity_residual;
use apdivisor::*;
use num_complex::Complex64;
use serde::Serialize;

use crate::args::{Common, GridSpec, Tolerances};

/// Result of a command that renders a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Commands without a verdict.
    Done,
}

impl Outcome {
    fn from_verdict(v: bool) -> Self {
        if v {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

const DEFAULT_GRID: GridSpec = GridSpec { x: (-2.0, 2.0, 10), y: (-2.0, 2.0, 10) };

fn load_source(common: &Common) -> Result<Box<dyn DivisorSource>> {
    let path = common.divisor.as_ref().context("--divisor is required")?;
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let spec = GeneratorSpec::from_json(&text).with_context(|| format!("invalid divisor file {}", path.display()))?;
    Ok(build_source(&spec)?)
}

fn grid_points(spec: GridSpec) -> Vec<ComplexPoint> {
    rect_grid(spec.x.0, spec.x.1, spec.x.2, spec.y.0, spec.y.1, spec.y.2)
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if !(value > 0.0) {
        bail!("{name} must be positive, got {value}");
    }
    Ok(value)
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn write_json(common: &Common, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_output(common.out.as_ref(), text.as_bytes())
}

fn summary(common: &Common, line: &str) {
    if !common.quiet {
        eprintln!("{line}");
    }
}

fn verdict_word(v: bool) -> &'static str {
    if v {
        "pass"
    } else {
        "fail"
    }
}

pub fn check(common: &Common, theorem: u8) -> Result<Outcome> {
    let source = load_source(common)?;
    let set = ConditionSet::from_selector(theorem).context("--theorem must be 3, 4, 5 or 6")?;
    let mut tol = Tolerances::new(&common.tol);
    let mut config = CriteriaConfig {
        growth_tol: tol.take("growth", DEFAULT_GROWTH_TOL),
        annulus_tol: tol.take("annulus", DEFAULT_ANNULUS_TOL),
        residue_tol: tol.take("residue", DEFAULT_RESIDUE_TOL),
        j_tol: tol.take("j", DEFAULT_J_TOL),
        j_bound: tol.take_opt("j-bound"),
        j_radius: positive("--radius", common.radius.unwrap_or(DEFAULT_J_RADIUS))?,
        ap_epsilon: common.epsilon.unwrap_or(DEFAULT_EPSILON),
        ..CriteriaConfig::default()
    };
    tol.finish(&["growth", "annulus", "residue", "j", "j-bound"])?;
    if let Some(g) = common.grid {
        config.x_grid = Some(apdivisor::numeric::linspace(g.x.0, g.x.1, g.x.2));
    }
    let report = check_conditions(source.as_ref(), set, &config)?;
    write_json(common, &report)?;
    let failed: Vec<&str> = report.conditions.iter().filter(|(_, c)| !c.verdict).map(|(k, _)| k.as_str()).collect();
    let mut line = format!("{}: verdict {}", source.label(), verdict_word(report.verdict));
    if !failed.is_empty() {
        line += &format!(" (failed: {})", failed.join(", "));
    }
    if report.ap_verdict == Some(false) {
        line += " (almost-periodicity test failed)";
    }
    summary(common, &line);
    Ok(Outcome::from_verdict(report.verdict))
}

fn fmt_value(v: LogModulus) -> String {
    match v {
        LogModulus::Finite(x) => format!("{x}"),
        LogModulus::MinusInfinity => "-inf".into(),
    }
}

pub fn eval(common: &Common, nu: f64, log_c: f64, use_average: bool) -> Result<Outcome> {
    let source = load_source(common)?;
    let radius = positive("--radius", common.radius.unwrap_or(1e4))?;
    let mut tol = Tolerances::new(&common.tol);
    let clearance = tol.take("clearance", ATOM_CLEARANCE);
    tol.finish(&["clearance"])?;
    let params = RepresentationParams::product(nu, log_c);
    let grid = grid_points(common.grid.unwrap_or(DEFAULT_GRID));
    let max_abs = grid.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let near = source.enumerate(max_abs + clearance + 1.0);
    let has_zero_atom = near.iter().any(|a| a.point == Complex64::new(0.0, 0.0));
    let keep: Vec<bool> = grid.iter().map(|z| distance_to_atoms(&near, *z) >= clearance).collect();
    let kept: Vec<ComplexPoint> = grid.iter().zip(&keep).filter(|(_, k)| **k).map(|(z, _)| *z).collect();

    // V needs no condition on the divisor; the products are undefined when 0 is an atom.
    let values: Vec<[Option<LogModulus>; 3]> = if use_average {
        kept.iter()
            .map(|&z| {
                let v = averaged(radius, |r| eval_v(source.as_ref(), z, r))?;
                if has_zero_atom {
                    return Ok([Some(v), None, None]);
                }
                let p = averaged(radius, |r| eval_product_log(source.as_ref(), z, r, params))?;
                let g = averaged(radius, |r| eval_genus1(source.as_ref(), z, r))?;
                Ok([Some(v), Some(p), Some(g)])
            })
            .collect::<apdivisor::Result<_>>()?
    } else if has_zero_atom {
        kept.iter()
            .map(|&z| Ok([Some(eval_v(source.as_ref(), z, radius)?), None, None]))
            .collect::<apdivisor::Result<_>>()?
    } else {
        eval_grid(source.as_ref(), &kept, radius, params)?.into_iter().map(|r| r.map(Some)).collect()
    };

    let mut buf = format!("# R={radius}, nu={nu}, logC={log_c}, averaged={use_average}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["re", "im", "V", "product", "genus1", "flag"])?;
        let mut values = values.into_iter();
        for (z, is_kept) in grid.iter().zip(&keep) {
            let (cells, flag) = if *is_kept {
                let v = values.next().expect("one value per kept point");
                let cell = |x: Option<LogModulus>| x.map(fmt_value).unwrap_or_default();
                let flag = if has_zero_atom { "zero-in-support" } else { "" };
                ([cell(v[0]), cell(v[1]), cell(v[2])], flag)
            } else {
                (Default::default(), "near-atom")
            };
            let [v, p, g] = cells;
            w.write_record([z.re.to_string(), z.im.to_string(), v, p, g, flag.to_string()])?;
        }
        w.flush()?;
    }
    write_output(common.out.as_ref(), &buf)?;
    summary(
        common,
        &format!(
            "{}: {} points evaluated, {} flagged near an atom",
            source.label(),
            kept.len(),
            grid.len() - kept.len()
        ),
    );
    Ok(Outcome::Done)
}

fn parse_family(text: &str) -> Result<Vec<TestFunction>> {
    text.split(',')
        .map(|item| {
            let (kind, r) =
                item.split_once(':').with_context(|| format!("test function '{item}' is not kind:radius"))?;
            let r: f64 = r.trim().parse().with_context(|| format!("bad radius in '{item}'"))?;
            Ok(match kind.trim() {
                "hat" => TestFunction::hat(r)?,
                "bump" | "smooth-bump" => TestFunction::bump(r)?,
                other => bail!("unknown test function '{other}' (hat, bump)"),
            })
        })
        .collect()
}

fn write_samples(path: &Path, family: &[TestFunction], sampled: &[SampledFunction]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut header = vec!["t".to_string()];
    header.extend(family.iter().map(TestFunction::label));
    w.write_record(&header)?;
    for i in 0..sampled[0].len() {
        let mut row = vec![format!("{}", sampled[0].time(i))];
        row.extend(sampled.iter().map(|g| format!("{}", g.samples[i])));
        w.write_record(&row)?;
    }
    Ok(w.flush()?)
}

pub fn ap(common: &Common, family: Option<&str>, samples: Option<&Path>) -> Result<Outcome> {
    let source = load_source(common)?;
    let family = match family {
        Some(text) => parse_family(text)?,
        None => default_family(),
    };
    let mut tol = Tolerances::new(&common.tol);
    let defaults = APConfig::default();
    let config = APConfig {
        t_start: tol.take("t-start", defaults.t_start),
        t_end: tol.take("t-end", defaults.t_end),
        tau_max: tol.take("tau-max", defaults.tau_max),
        dt: tol.take_opt("dt"),
        tau_step: tol.take_opt("tau-step"),
        density_bound: tol.take_opt("density-bound"),
    };
    tol.finish(&["t-start", "t-end", "tau-max", "dt", "tau-step", "density-bound"])?;
    let epsilon = common.epsilon.unwrap_or(DEFAULT_EPSILON);
    let report = ap_divisor_test(source.as_ref(), &family, epsilon, &config)?;
    if let Some(path) = samples {
        write_samples(path, &family, &sample_family(source.as_ref(), &family, &config)?)?;
    }
    write_json(common, &report)?;
    let shown: Vec<String> = report.periods.iter().filter(|&&p| p > 0.0).take(12).map(|p| format!("{p}")).collect();
    summary(
        common,
        &format!(
            "{}: verdict {}, max gap {} (bound {}), positive periods {}{}",
            source.label(),
            verdict_word(report.verdict),
            report.max_gap,
            report.density_bound,
            shown.join(" "),
            if report.periods.iter().filter(|&&p| p > 0.0).count() > 12 { " ..." } else { "" }
        ),
    );
    Ok(Outcome::from_verdict(report.verdict))
}

#[derive(Serialize)]
struct AzarinReport {
    sigma: apdivisor::azarin::SigmaEstimate,
    limit_density: ConditionEstimate,
    vinf_shape: ConditionEstimate,
    verdict: bool,
}

pub fn azarin(common: &Common) -> Result<Outcome> {
    let source = load_source(common)?;
    let mut tol = Tolerances::new(&common.tol);
    let density_tol = tol.take("density", DEFAULT_DENSITY_TOL);
    let vinf_tol = tol.take("vinf", DEFAULT_VINF_TOL);
    let t_max = positive("--radius", common.radius.unwrap_or(1e3))?;
    tol.finish(&["density", "vinf"])?;
    let sigma = estimate_sigma(source.as_ref(), &default_y_list(), &default_r_rule)?;
    let hat = TestFunction::hat(1.0)?;
    let t_list: Vec<f64> = [1e-2, 1e-1, 1.0].iter().map(|f| f * t_max).filter(|&t| t > 1.0).collect();
    let limit_density =
        check_limit_density(source.as_ref(), &hat, &t_list, sigma.indicators.line_density()?, density_tol)?;
    let z_list =
        [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(1.0, 1.0), Complex64::new(-1.0, -0.5)];
    let vinf_shape = check_vinf_shape(source.as_ref(), &z_list, &default_vinf_t_list(), sigma.indicators, vinf_tol)?;
    let verdict = limit_density.verdict && vinf_shape.verdict;
    let g = sigma.indicators;
    let report = AzarinReport { sigma, limit_density, vinf_shape, verdict };
    write_json(common, &report)?;
    summary(
        common,
        &format!(
            "{}: sigma+ {:.6}, sigma- {:.6}, density {:.6}, verdict {}",
            source.label(),
            g.sigma_plus,
            g.sigma_minus,
            g.density,
            verdict_word(verdict)
        ),
    );
    Ok(Outcome::from_verdict(verdict))
}

#[derive(Serialize)]
struct KlReport {
    d: f64,
    k_max: i64,
    psi_sup: f64,
    r_list: Vec<f64>,
    sn: apdivisor::criteria::SnReport,
}

pub fn kl(common: &Common, window: i64, real_only: bool) -> Result<Outcome> {
    let source = load_source(common)?;
    if window < 0 {
        bail!("--window must be >= 0");
    }
    let radius = positive("--radius", common.radius.unwrap_or(1e4))?;
    let mut tol = Tolerances::new(&common.tol);
    let sn_tol = tol.take("sn", 1e-2);
    let strip = tol.take("strip-height", 1.0);
    tol.finish(&["sn", "strip-height"])?;
    let k_max = radius.ceil() as usize + window as usize + 1;
    let fit = fit_krein_levin(source.as_ref(), k_max, strip)?;
    let r_list = vec![radius / 2.0, radius];
    let sn = check_sn_bounded(&fit, window, &r_list, real_only, sn_tol)?;
    let verdict = sn.verdict;
    let report = KlReport { d: fit.d, k_max: fit.k_max, psi_sup: fit.psi_sup, r_list, sn };
    write_json(common, &report)?;
    summary(
        common,
        &format!(
            "{}: d {:.6}, sup|psi| {:.4}, sup|S_n| {:.6}, max defect {:.2e}, verdict {}",
            source.label(),
            report.d,
            report.psi_sup,
            report.sn.sup,
            report.sn.max_defect,
            verdict_word(verdict)
        ),
    );
    Ok(Outcome::from_verdict(verdict))
}

#[derive(Serialize)]
struct ScanRow {
    re: f64,
    im: f64,
    log_modulus: Option<f64>,
}

#[derive(Serialize)]
struct Scan {
    residual: f64,
    tolerance: f64,
    rows: Vec<ScanRow>,
}

#[derive(Serialize)]
struct PeriodicReport {
    check: PeriodicCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    scan: Option<Scan>,
    verdict: bool,
}

pub fn periodic(common: &Common, spec_path: Option<&Path>, scan: bool) -> Result<Outcome> {
    let mut tol = Tolerances::new(&common.tol);
    let allow = tol.take("defects", 0.0);
    let scan_tol = tol.take("periodicity", 1e-12);
    tol.finish(&["defects", "periodicity"])?;
    if !(allow >= 0.0 && allow.fract() == 0.0) {
        bail!("defects must be a non-negative integer");
    }
    let radius = common.radius.unwrap_or(30.0);
    let n_list: Vec<u32> = (1..=10).collect();

    let (check, scan_out, label) = match (spec_path, &common.divisor) {
        (Some(_), Some(_)) => bail!("give either --spec or --divisor, not both"),
        (None, None) => bail!("--spec or --divisor is required"),
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let spec = PeriodicDivisorSpec::from_json(&text)
                .with_context(|| format!("invalid spec file {}", path.display()))?;
            let source = periodic_source(&spec);
            let check = check_periodic_divisor(&source, radius, &n_list, allow as usize)?;
            let scan_out = scan.then(|| {
                let grid = grid_points(common.grid.unwrap_or(DEFAULT_GRID));
                let rows = grid
                    .iter()
                    .map(|&z| ScanRow { re: z.re, im: z.im, log_modulus: periodic_function_log(z, &spec).finite() })
                    .collect();
                Scan { residual: periodicity_residual(&spec, &grid), tolerance: scan_tol, rows }
            });
            (check, scan_out, source.label())
        }
        (None, Some(_)) => {
            if scan {
                bail!("--scan needs a --spec file");
            }
            let source = load_source(common)?;
            (check_periodic_divisor(source.as_ref(), radius, &n_list, allow as usize)?, None, source.label())
        }
    };
    let verdict = check.verdict && scan_out.as_ref().is_none_or(|s| s.residual <= s.tolerance);
    let mut line = format!(
        "{label}: {} translation defects, strip mass {:?}, identity {}, verdict {}",
        check.translation_defects.len(),
        check.strip_masses,
        check.identity_holds,
        verdict_word(verdict)
    );
    if let Some(s) = &scan_out {
        line += &format!(", periodicity residual {:.1e}", s.residual);
    }
    write_json(common, &PeriodicReport { check, scan: scan_out, verdict })?;
    summary(common, &line);
    Ok(Outcome::from_verdict(verdict))
}
