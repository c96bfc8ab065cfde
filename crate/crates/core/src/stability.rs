//! Stability of the feedback-forced model equation under BDF1 and BDF2.
//!
//! Gains enter scaled as `a = C alpha dt^2`, `b = C beta dt`, `g = C gamma`.
//! For fixed `g` every Jury condition is affine in `(a, b)`, so stability
//! regions in the `(-alpha dt^2, -beta dt)` quadrant are convex polygons.

use rayon::prelude::*;
use serde::Serialize;

use crate::ns::SchemeKind;

/// Kernel constant of the 2D four-point configuration.
pub const C_MAX_2D: f64 = 0.5;
/// Band around the unit circle treated as marginal.
pub const MARGINAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledGains {
    pub alpha_star: f64,
    pub beta_star: f64,
    pub gamma_star: f64,
}

impl ScaledGains {
    pub fn new(alpha_star: f64, beta_star: f64, gamma_star: f64) -> Self {
        ScaledGains { alpha_star, beta_star, gamma_star }
    }

    pub fn from_physical(alpha: f64, beta: f64, gamma: f64, dt: f64, c_max: f64) -> Self {
        ScaledGains { alpha_star: c_max * alpha * dt * dt, beta_star: c_max * beta * dt, gamma_star: c_max * gamma }
    }

    /// Scaled gains at the point `(x, y) = (-alpha dt^2, -beta dt)` with physical `gamma`.
    pub fn from_plane(x: f64, y: f64, gamma: f64, c_max: f64) -> Self {
        ScaledGains { alpha_star: -c_max * x, beta_star: -c_max * y, gamma_star: c_max * gamma }
    }
}

/// Real polynomial in the amplification ratio, coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilityError {
    #[error("Jury test implemented for degree 1 to 3, got degree {0}")]
    UnsupportedDegree(usize),
    #[error("leading coefficient is zero")]
    ZeroLeading,
}

impl CharPoly {
    /// From ascending coefficients; trailing zeros are not trimmed.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, StabilityError> {
        match coeffs.last() {
            Some(&c) if c != 0.0 => Ok(CharPoly { coeffs }),
            _ => Err(StabilityError::ZeroLeading),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }
}

/// `r^3 - (2 + a + b + g) r^2 + (1 + b + 2g) r - g`.
pub fn char_poly_bdf1(g: ScaledGains) -> CharPoly {
    let ScaledGains { alpha_star: a, beta_star: b, gamma_star: c } = g;
    CharPoly { coeffs: vec![-c, 1.0 + b + 2.0 * c, -(2.0 + a + b + c), 1.0] }
}

/// `3 r^3 - (7 + 2a + 2b + 2g) r^2 + (5 + 2b + 4g) r - (1 + 2g)`.
pub fn char_poly_bdf2(g: ScaledGains) -> CharPoly {
    let ScaledGains { alpha_star: a, beta_star: b, gamma_star: c } = g;
    CharPoly { coeffs: vec![-(1.0 + 2.0 * c), 5.0 + 2.0 * b + 4.0 * c, -(7.0 + 2.0 * a + 2.0 * b + 2.0 * c), 3.0] }
}

pub fn char_poly(scheme: SchemeKind, g: ScaledGains) -> CharPoly {
    match scheme {
        SchemeKind::Bdf1 => char_poly_bdf1(g),
        SchemeKind::Bdf2 => char_poly_bdf2(g),
    }
}

/// Jury conditions of the monic-normalized polynomial; all must be positive
/// for every root to lie strictly inside the unit circle.
fn jury_conditions(p: &CharPoly) -> Result<Vec<f64>, StabilityError> {
    let lead = *p.coeffs.last().unwrap();
    let c: Vec<f64> = p.coeffs.iter().map(|v| v / lead).collect();
    let monic = CharPoly { coeffs: c.clone() };
    match p.degree() {
        1 => Ok(vec![1.0 - c[0].abs()]),
        2 => Ok(vec![monic.eval(1.0), monic.eval(-1.0), 1.0 - c[0].abs()]),
        3 => {
            let b0 = c[0] * c[0] - 1.0;
            let b2 = c[0] * c[2] - c[1];
            Ok(vec![monic.eval(1.0), -monic.eval(-1.0), 1.0 - c[0].abs(), b0.abs() - b2.abs()])
        }
        d => Err(StabilityError::UnsupportedDegree(d)),
    }
}

pub fn jury_stable(p: &CharPoly) -> Result<Verdict, StabilityError> {
    let conds = jury_conditions(p)?;
    Ok(if conds.iter().any(|&v| v < -MARGINAL_TOL) {
        Verdict::Unstable
    } else if conds.iter().any(|&v| v.abs() <= MARGINAL_TOL) {
        Verdict::Marginal
    } else {
        Verdict::Stable
    })
}

pub fn verdict(scheme: SchemeKind, g: ScaledGains) -> Verdict {
    jury_stable(&char_poly(scheme, g)).expect("model polynomials are cubic")
}

/// `x (-alpha dt^2) + y (-beta dt) <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfPlane {
    pub x: f64,
    pub y: f64,
    pub rhs: f64,
}

impl HalfPlane {
    /// Unit leading coefficient, with rounding residue flushed to zero.
    fn normalized(self) -> Self {
        let big = self.x.abs().max(self.y.abs()).max(self.rhs.abs());
        let flush = |v: f64| if v.abs() <= 1e-12 * big { 0.0 } else { v };
        let (x, y, rhs) = (flush(self.x), flush(self.y), flush(self.rhs));
        let s = if x != 0.0 { x.abs() } else { y.abs() };
        HalfPlane { x: x / s, y: y / s, rhs: rhs / s }
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        self.x * p[0] + self.y * p[1] <= self.rhs + tol
    }

    /// Human-readable inequality in `(-alpha dt^2, -beta dt)`.
    pub fn describe(&self) -> String {
        let term = |c: f64, name: &str| -> String {
            if c == 1.0 {
                name.to_string()
            } else if c == -1.0 {
                format!("-{name}")
            } else {
                format!("{c}*{name}")
            }
        };
        let mut s = String::new();
        if self.x != 0.0 {
            s += &term(self.x, "(-alpha dt^2)");
        }
        if self.y != 0.0 {
            if !s.is_empty() {
                s += if self.y > 0.0 { " + " } else { " - " };
                s += &term(self.y.abs(), "(-beta dt)");
            } else {
                s += &term(self.y, "(-beta dt)");
            }
        }
        format!("{s} <= {}", self.rhs)
    }
}

/// Analytic stability region in the `(-alpha dt^2, -beta dt)` quadrant.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// Bounded by the listed non-redundant lines and the quadrant axes.
    Polygon { constraints: Vec<HalfPlane>, vertices: Vec<[f64; 2]> },
    /// Only zero gains are (marginally) stable.
    Origin,
    /// No gains give a stable scheme for this `gamma`.
    Unstable,
}

/// Jury conditions as affine functions `f0 + fa a + fb b > 0` of the scaled gains.
fn affine_conditions(scheme: SchemeKind, gamma_star: f64) -> Vec<[f64; 3]> {
    let at = |a: f64, b: f64| jury_raw(&char_poly(scheme, ScaledGains::new(a, b, gamma_star)));
    let base = at(0.0, 0.0);
    let da = at(1.0, 0.0);
    let db = at(0.0, 1.0);
    // raw entries: P(1), -P(-1), a3 - |a0|, b0 (constant), b2 (affine)
    let lin = |k: usize| [base[k], da[k] - base[k], db[k] - base[k]];
    let b0 = base[3].abs();
    let b2 = lin(4);
    vec![lin(0), lin(1), lin(2), [b0 - b2[0], -b2[1], -b2[2]], [b0 + b2[0], b2[1], b2[2]]]
}

/// Unnormalized Jury quantities of a cubic: `P(1)`, `-P(-1)`, `a3 - |a0|`, `b0`, `b2`.
fn jury_raw(p: &CharPoly) -> [f64; 5] {
    let c = &p.coeffs;
    let (a0, a1, a2, a3) = (c[0], c[1], c[2], c[3]);
    [p.eval(1.0), -p.eval(-1.0), a3 - a0.abs(), a0 * a0 - a3 * a3, a0 * a2 - a3 * a1]
}

/// Closed-form stability region for physical `gamma` (<= 0).
pub fn analytic_region(scheme: SchemeKind, gamma: f64, c_max: f64) -> Region {
    let g = c_max * gamma;
    let mut planes = Vec::new();
    for [f0, fa, fb] in affine_conditions(scheme, g) {
        // f0 + fa a + fb b > 0 with a = -C x, b = -C y
        let hp = HalfPlane { x: c_max * fa, y: c_max * fb, rhs: f0 };
        let scale = hp.x.abs().max(hp.y.abs());
        if scale <= 1e-14 * hp.rhs.abs().max(1.0) {
            if hp.rhs < -MARGINAL_TOL {
                return Region::Unstable;
            }
            if hp.rhs.abs() <= MARGINAL_TOL {
                return Region::Origin;
            }
            continue;
        }
        planes.push(hp.normalized());
    }

    let span = 1e3;
    let mut poly = vec![[0.0, 0.0], [span, 0.0], [span, span], [0.0, span]];
    for hp in &planes {
        poly = clip(&poly, hp);
        if poly.is_empty() {
            return Region::Unstable;
        }
    }
    let extent = poly.iter().map(|p| p[0].max(p[1])).fold(0.0, f64::max);
    if extent <= 1e-9 {
        return Region::Origin;
    }
    let on_line = |hp: &HalfPlane, p: [f64; 2]| (hp.x * p[0] + hp.y * p[1] - hp.rhs).abs() <= 1e-9 * extent;
    let n = poly.len();
    let mut constraints: Vec<HalfPlane> = Vec::new();
    for hp in &planes {
        let supports_edge = (0..n).any(|k| {
            let (p, q) = (poly[k], poly[(k + 1) % n]);
            let len = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            len > 1e-9 * extent && on_line(hp, p) && on_line(hp, q)
        });
        let quadrant_axis = hp.rhs == 0.0 && ((hp.x < 0.0 && hp.y == 0.0) || (hp.x == 0.0 && hp.y < 0.0));
        if supports_edge && !quadrant_axis && !constraints.iter().any(|c| c == hp) {
            constraints.push(*hp);
        }
    }
    Region::Polygon { constraints, vertices: poly }
}

/// Sutherland-Hodgman clip of a convex polygon by one half-plane.
fn clip(poly: &[[f64; 2]], hp: &HalfPlane) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| hp.x * p[0] + hp.y * p[1] - hp.rhs;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Verdicts on an `n x n` grid over `[0, x_max] x [0, y_max]` of the
/// `(-alpha dt^2, -beta dt)` plane.
pub fn numeric_region(
    scheme: SchemeKind,
    gamma: f64,
    c_max: f64,
    x_max: f64,
    y_max: f64,
    n: usize,
) -> Vec<(f64, f64, Verdict)> {
    let step = |m: f64, k: usize| if n > 1 { m * k as f64 / (n - 1) as f64 } else { 0.0 };
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (x, y) = (step(x_max, k % n), step(y_max, k / n));
            (x, y, verdict(scheme, ScaledGains::from_plane(x, y, gamma, c_max)))
        })
        .collect()
}

/// Largest `-alpha dt^2` at `beta = 0` that is not unstable, per `-gamma`.
pub fn max_alpha_curve(scheme: SchemeKind, neg_gammas: &[f64], c_max: f64) -> Vec<(f64, f64)> {
    neg_gammas
        .iter()
        .map(|&ng| {
            let ok = |x: f64| verdict(scheme, ScaledGains::from_plane(x, 0.0, -ng, c_max)) != Verdict::Unstable;
            if !ok(0.0) {
                return (ng, f64::NAN);
            }
            let mut hi = 1.0;
            while ok(hi) && hi < 1e6 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (ng, lo)
        })
        .collect()
}

/// Ratio of the largest stable time steps of BDF2 and BDF1 at a fixed
/// `alpha` and `beta = 0`, from the observed marginal intercepts 14 and 11.
pub fn timestep_ratio_bdf2_vs_bdf1() -> f64 {
    (14.0f64 / 11.0).sqrt()
}

/// The same ratio from any pair of marginal `-alpha dt^2` intercepts.
pub fn timestep_ratio(intercept_bdf2: f64, intercept_bdf1: f64) -> f64 {
    (intercept_bdf2 / intercept_bdf1).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unforced_polynomials() {
        let p = char_poly_bdf1(ScaledGains::new(0.0, 0.0, 0.0));
        assert_eq!(p.coeffs(), &[0.0, 1.0, -2.0, 1.0]);
        assert_eq!(jury_stable(&p).unwrap(), Verdict::Marginal);
        let q = char_poly_bdf2(ScaledGains::new(0.0, 0.0, 0.0));
        assert_eq!(q.coeffs(), &[-1.0, 5.0, -7.0, 3.0]);
        for r in [1.0, 1.0 / 3.0] {
            assert!(q.eval(r).abs() < 1e-15);
        }
    }

    #[test]
    fn bdf1_integral_gain_bound() {
        let v = |a: f64| verdict(SchemeKind::Bdf1, ScaledGains::new(a, -0.5, 0.0));
        assert_eq!(v(-2.0), Verdict::Stable);
        assert_eq!(v(-3.0), Verdict::Marginal);
        assert_eq!(v(-3.5), Verdict::Unstable);
        let no_beta = |a: f64| verdict(SchemeKind::Bdf1, ScaledGains::new(a, 0.0, 0.0));
        assert_ne!(no_beta(-3.0), Verdict::Unstable);
        assert_eq!(no_beta(-5.0), Verdict::Unstable);
    }

    #[test]
    fn unsupported_degree() {
        let p = CharPoly::new(vec![1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(jury_stable(&p), Err(StabilityError::UnsupportedDegree(4)));
        assert_eq!(CharPoly::new(vec![1.0, 0.0]), Err(StabilityError::ZeroLeading));
    }

    #[test]
    fn ratio() {
        let r = timestep_ratio_bdf2_vs_bdf1();
        assert!((r * r - 14.0 / 11.0).abs() < 1e-15);
        assert!((r - 1.1282).abs() < 1e-4);
    }

    #[test]
    fn regions_outside_admissible_gamma() {
        assert_eq!(analytic_region(SchemeKind::Bdf1, -2.0, C_MAX_2D), Region::Origin);
        assert_eq!(analytic_region(SchemeKind::Bdf1, -2.5, C_MAX_2D), Region::Unstable);
        assert_eq!(analytic_region(SchemeKind::Bdf2, -4.0, C_MAX_2D), Region::Origin);
        assert_eq!(analytic_region(SchemeKind::Bdf2, -5.0, C_MAX_2D), Region::Unstable);
    }
}
