//! Reference computations that share no code with the library.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 60)
}

/// Integral of `n(c, t) / t` over `[lower, upper]`, with `n` counted by brute
/// force and the interval split at every jump so each piece has a smooth integrand.
pub fn counting_integral_by_quadrature(points: &[(Complex64, u32)], c: Complex64, lower: f64, upper: f64) -> f64 {
    let dists: Vec<(f64, u32)> = points.iter().map(|&(p, m)| ((p - c).norm(), m)).collect();
    let count = |t: f64| -> f64 { dists.iter().filter(|&&(d, _)| d <= t).map(|&(_, m)| f64::from(m)).sum() };
    let mut cuts: Vec<f64> = dists.iter().map(|&(d, _)| d).filter(|&d| d > lower && d < upper).collect();
    cuts.push(lower);
    cuts.push(upper);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let n = count(0.5 * (w[0] + w[1]));
            adaptive_simpson(&|t| n / t, w[0], w[1], 1e-14)
        })
        .sum()
}

/// `log|sin(pi z) / (pi z)|`.
pub fn sinc_log(z: Complex64) -> f64 {
    if z.norm() < 1e-12 {
        return 0.0;
    }
    ((z * PI).sin() / (z * PI)).norm().ln()
}

pub fn golden_beta() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `k + 0.3 sin(2 pi beta k)` written out directly.
pub fn golden_atom(k: i64, amplitude: f64) -> f64 {
    k as f64 + amplitude * (2.0 * PI * golden_beta() * k as f64).sin()
}

pub fn grid_10x10() -> Vec<Complex64> {
    let xs: Vec<f64> = (0..10).map(|i| -2.0 + 4.0 * i as f64 / 9.0).collect();
    xs.iter().flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y))).collect()
}

/// Symmetric partial sum of `1 / (k + offset)` over `|k + offset| <= r`, taking
/// terms in order of increasing modulus with Kahan summation.
pub fn shifted_reciprocal_sum(offset: f64, r: f64) -> f64 {
    let mut terms: Vec<f64> = Vec::new();
    let lo = (-r - offset).ceil() as i64;
    let hi = (r - offset).floor() as i64;
    for k in lo..=hi {
        let a = k as f64 + offset;
        if a.abs() <= r && a != 0.0 {
            terms.push(a);
        }
    }
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut sum = 0.0;
    let mut comp = 0.0;
    for a in terms {
        let y = 1.0 / a - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id:>2} {} | {name} | {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
