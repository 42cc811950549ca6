//! Real roots of polynomials of degree at most four.
//!
//! Closed-form seeds (quadratic formula, Cardano / trigonometric cubic,
//! Ferrari quartic) are polished by Newton iteration on the original
//! polynomial and kept only if their residual is small. Critical points are
//! added as extra seeds so that (near-)double roots, which the closed forms
//! tend to push off the real axis, are not lost.

use crate::error::{usage, Error, Result};

const MAX_DEGREE: usize = 4;
const MERGE_TOL: f64 = 1e-8;

/// Evaluates `p(t)` and `p'(t)` with coefficients in descending order.
pub fn eval_poly(coeffs: &[f64], t: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// Residual bound a polished root must satisfy:
/// `1e-10 · (1 + max|c| · (1 + |t|)^deg)`.
pub fn residual_bound(coeffs: &[f64], t: f64) -> f64 {
    let deg = coeffs.len().saturating_sub(1) as i32;
    let cmax = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    1e-10 * (1.0 + cmax * (1.0 + t.abs()).powi(deg))
}

/// All real roots of `coeffs[0]·t^k + … + coeffs[k]`, ascending, `k ≤ 4`.
///
/// Leading zeros reduce the degree. The zero polynomial is a degenerate input.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() > MAX_DEGREE + 1 {
        return usage(format!("degree {} exceeds 4", coeffs.len() - 1));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return usage("non-finite polynomial coefficient");
    }
    let first = match coeffs.iter().position(|&c| c != 0.0) {
        Some(k) => k,
        None => return Err(Error::Degenerate("zero polynomial has no isolated roots".into())),
    };
    let poly = &coeffs[first..];
    Ok(roots_of(poly))
}

fn roots_of(poly: &[f64]) -> Vec<f64> {
    if poly.len() <= 1 {
        return Vec::new();
    }
    // Seeds come from the polynomial with negligible leading terms dropped;
    // the polish step always uses the full polynomial.
    let scale = poly.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let lead = poly
        .iter()
        .position(|c| c.abs() > 1e-15 * scale)
        .unwrap_or(poly.len() - 1);
    let reduced = &poly[lead..];

    let mut seeds = closed_form_seeds(reduced);
    if reduced.len() >= 3 {
        let deriv: Vec<f64> = reduced
            .iter()
            .enumerate()
            .take(reduced.len() - 1)
            .map(|(k, &c)| c * (reduced.len() - 1 - k) as f64)
            .collect();
        seeds.extend(roots_of(&deriv));
    }

    let mut roots: Vec<f64> = seeds
        .into_iter()
        .filter(|t| t.is_finite())
        .map(|t| polish(poly, t))
        .filter(|&t| eval_poly(poly, t).0.abs() <= residual_bound(poly, t))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= MERGE_TOL * a.abs().max(1.0));
    roots
}

fn polish(poly: &[f64], mut t: f64) -> f64 {
    let mut best = eval_poly(poly, t).0.abs();
    for _ in 0..100 {
        let (p, dp) = eval_poly(poly, t);
        if p == 0.0 || dp == 0.0 {
            break;
        }
        let next = t - p / dp;
        let val = eval_poly(poly, next).0.abs();
        if !(val < best) {
            break;
        }
        best = val;
        t = next;
    }
    t
}

fn closed_form_seeds(poly: &[f64]) -> Vec<f64> {
    match poly.len() {
        0 | 1 => Vec::new(),
        2 => vec![-poly[1] / poly[0]],
        3 => quadratic(poly[1] / poly[0], poly[2] / poly[0]),
        4 => cubic(poly[1] / poly[0], poly[2] / poly[0], poly[3] / poly[0]),
        5 => quartic(
            poly[1] / poly[0],
            poly[2] / poly[0],
            poly[3] / poly[0],
            poly[4] / poly[0],
        ),
        _ => unreachable!("degree checked by caller"),
    }
}

/// `t² + b t + c`; a negative discriminant yields the vertex as a seed.
fn quadratic(b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return vec![-0.5 * b];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q, c / q]
}

/// `t³ + a t² + b t + c`.
fn cubic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    let ys = if disc > 0.0 {
        let u = (-0.5 * q - q.signum() * disc.sqrt()).cbrt();
        if u == 0.0 {
            vec![0.0]
        } else {
            vec![u - p / (3.0 * u)]
        }
    } else if p == 0.0 {
        vec![(-q).cbrt()]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    ys.into_iter().map(|y| y - shift).collect()
}

/// `t⁴ + a t³ + b t² + c t + d` via Ferrari's resolvent cubic.
fn quartic(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let scale = p.abs().max(q.abs()).max(r.abs()).max(1.0);
    let mut ys = Vec::new();
    if q.abs() <= 1e-14 * scale {
        for z in quadratic(p, r) {
            let z = z.max(0.0);
            ys.push(z.sqrt());
            ys.push(-z.sqrt());
        }
    } else {
        // 8m³ + 8p m² + (2p² − 8r) m − q² = 0 has a positive root.
        let resolvent = [8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q];
        let m = roots_of(&resolvent)
            .into_iter()
            .filter(|&m| m > 0.0)
            .fold(f64::NAN, f64::max);
        if m.is_finite() {
            let s2 = (2.0 * m).sqrt();
            let h = 0.5 * p + m;
            let k = q / (2.0 * s2);
            ys.extend(quadratic(-s2, h + k));
            ys.extend(quadratic(s2, h - k));
        }
    }
    ys.into_iter().map(|y| y - shift).collect()
}
