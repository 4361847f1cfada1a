//! Reciprocal gamma function: Hankel-loop quadrature, its `λ`-scaled form,
//! and a Stirling-series oracle that shares no code with the contour routes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{
    build_gamma_path, build_lambda_path, GammaContourSpec, LambdaSpec, RaySegment,
};
use crate::error::{Error, Result};
use crate::polar::PolarComplex;
use crate::quadrature::{integrate_path, scale_result, DecayModel, QuadratureConfig, QuadratureResult};
use crate::sum::two_sum;

/// `ln √(2π)`
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_SQRT_2PI_LO: f64 = -3.878_294_158_067_241_4e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum GammaMethod {
    Contour,
    ContourLambda,
    Oracle,
}

impl GammaMethod {
    pub fn name(&self) -> &'static str {
        match self {
            GammaMethod::Contour => "contour",
            GammaMethod::ContourLambda => "contourLambda",
            GammaMethod::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEvaluation {
    pub s: Complex64,
    pub value: Complex64,
    pub method: GammaMethod,
    /// Absent for the oracle.
    pub quadrature: Option<QuadratureResult>,
}

impl GammaEvaluation {
    pub fn usable(&self) -> bool {
        self.quadrature.map_or(true, |q| q.usable())
    }
}

/// `(sin πx, cos πx)` with exact zeros at integers and half-integers.
fn sin_cos_pi(x: f64) -> (f64, f64) {
    // reduce to r in [-1, 1]; sin and cos have period 2 in x
    let r = x - 2.0 * (0.5 * x).round();
    let (flip, r) = if r > 0.5 {
        (true, 1.0 - r)
    } else if r < -0.5 {
        (true, -1.0 - r)
    } else {
        (false, r)
    };
    let (s, c) = (PI * r).sin_cos();
    let c = if r.abs() == 0.5 { 0.0 } else { c };
    if flip {
        (s, -c)
    } else {
        (s, c)
    }
}

/// `sin(πs)` for complex `s`.
pub fn sin_pi(s: Complex64) -> Complex64 {
    let (sx, cx) = sin_cos_pi(s.re);
    let y = PI * s.im;
    Complex64::new(sx * y.cosh(), cx * y.sinh())
}

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// `ln x` for `x = hi + lo > 0` as `(value, correction)`; one Newton step
/// against `exp` recovers the digits lost to rounding the logarithm.
pub(crate) fn ln_split(hi: f64, lo: f64) -> (f64, f64) {
    let l = hi.ln();
    let e = l.exp();
    (l, ((hi - e) + lo) / e)
}

/// `ln|t + lo|` as `(value, correction)`, for a real offset `lo` well below
/// `ulp(t)`.
fn ln_abs_split(t: Complex64, lo: f64) -> (f64, f64) {
    // |t|² as hi + lo, then ln|t| = ½ ln|t|²
    let (re2, re2_err) = (t.re * t.re, t.re.mul_add(t.re, -(t.re * t.re)));
    let (im2, im2_err) = (t.im * t.im, t.im.mul_add(t.im, -(t.im * t.im)));
    let (q, q_err) = two_sum(re2, im2);
    let (l, l_corr) = ln_split(q, q_err + re2_err + im2_err + 2.0 * t.re * lo);
    (0.5 * l, 0.5 * l_corr)
}

/// `ln √(2π) + (s − ½) ln t − t` with the real part carried as `value.re + lo`.
/// For large `|s|` the real part is a difference of terms of size
/// `|s| ln |s|`, whose plain rounding would cost two or three digits.
fn stirling_main_split(s: Complex64, t: Complex64) -> (Complex64, f64) {
    let ln_t = t.ln();
    let (ln_abs, ln_abs_lo) = ln_abs_split(t, 0.0);
    // Re[(s − ½) ln t] = (Re s − ½) ln|t| − Im s · arg t
    let a = s.re - 0.5;
    let p = a * ln_abs;
    let p_err = a.mul_add(ln_abs, -p) + a * ln_abs_lo;
    let m = s.im * ln_t.im;
    let m_err = s.im.mul_add(ln_t.im, -m);
    let (acc, e1) = two_sum(LN_SQRT_2PI, p);
    let (acc, e2) = two_sum(acc, -m);
    let (acc, e3) = two_sum(acc, -t.re);
    let lo = LN_SQRT_2PI_LO + p_err - m_err + e1 + e2 + e3;
    let im = (s.im * ln_abs + a * ln_t.im) - t.im;
    (Complex64::new(acc, im), lo)
}

/// Adds a small correction to a split logarithm.
fn add_split((v, lo): (Complex64, f64), c: Complex64) -> (Complex64, f64) {
    let (re, err) = two_sum(v.re, c.re);
    (Complex64::new(re, v.im + c.im), lo + err)
}

/// Below this modulus the Stirling series is applied to `s + k`.
const STIRLING_MIN: f64 = 10.0;

/// `B₂ₖ / (2k(2k−1))` for `k = 1..8`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Stirling series for `|s| ≥ 10`, `Re s ≥ ½`; truncation error below 1e-17.
fn ln_gamma_stirling_split(s: Complex64) -> (Complex64, f64) {
    let inv = 1.0 / s;
    let inv2 = inv * inv;
    let mut correction = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        correction = correction * inv2 + *c;
    }
    add_split(stirling_main_split(s, s), correction * inv)
}

/// `ln Γ(s)` for `Re s ≥ ½`, real part carried as `value.re + lo`.
///
/// Small `|s|` goes through `Γ(s) = Γ(s + k) / (s (s+1) ⋯ (s+k−1))`. The
/// shifted argument is tracked exactly as `w + drift`, and for real `s` the
/// product is kept in double-double, so no approximation bias enters; a
/// Lanczos sum would add a smooth error of about 2e-15 that every term of a
/// series shares.
fn ln_gamma_split(s: Complex64) -> (Complex64, f64) {
    if s.norm() >= STIRLING_MIN {
        return ln_gamma_stirling_split(s);
    }
    let real = s.im == 0.0;
    let mut w = s;
    let mut drift = 0.0;
    let mut product = Complex64::new(1.0, 0.0);
    let mut product_lo = 0.0;
    // Σ drift_j / w_j, the first-order effect of the drift on ln ∏
    let mut product_shift = Complex64::new(0.0, 0.0);
    while w.norm() < STIRLING_MIN {
        if real {
            let hi = product.re * w.re;
            product_lo = product.re.mul_add(w.re, -hi) + product_lo * w.re;
            product = Complex64::new(hi, 0.0);
        } else {
            product *= w;
        }
        product_shift += drift / w;
        let (next, err) = two_sum(w.re, 1.0);
        w = Complex64::new(next, w.im);
        drift += err;
    }
    let (ln_p, ln_p_lo) = if real {
        ln_split(product.re, product_lo)
    } else {
        ln_abs_split(product, 0.0)
    };
    let ln_product = Complex64::new(ln_p, product.arg()) + product_shift;
    // ψ(w) ≈ ln w − 1/(2w) is ample for an offset of order ulp(w)
    let psi_drift = (w.ln() - 0.5 / w) * drift;
    let (v, lo) = add_split(ln_gamma_stirling_split(w), psi_drift);
    let (v, lo) = add_split((v, lo), -ln_product);
    (v, lo - ln_p_lo)
}

/// `ln(1/Γ(s))` with the real part carried as `value.re + lo`.
pub(crate) fn ln_recip_gamma_split(s: Complex64) -> (Complex64, f64) {
    if is_nonpositive_integer(s) {
        return (Complex64::new(f64::NEG_INFINITY, 0.0), 0.0);
    }
    if s.re >= 0.5 {
        let (v, lo) = ln_gamma_split(s);
        (-v, -lo)
    } else {
        // Γ(s)Γ(1-s) = π / sin(πs)
        let (v, lo) = ln_gamma_split(1.0 - s);
        let rest = sin_pi(s).ln() - PI.ln();
        let (re, err) = two_sum(v.re, rest.re);
        (Complex64::new(re, v.im + rest.im), lo + err)
    }
}

/// `ln(1/Γ(s))` on some branch (only its exponential is meaningful).
/// Equals `-∞` at the poles of `Γ`.
pub fn ln_recip_gamma(s: Complex64) -> Complex64 {
    let (v, lo) = ln_recip_gamma_split(s);
    Complex64::new(v.re + lo, v.im)
}

/// `1/Γ(s)` and whether the true value underflowed to zero.
pub fn gamma_oracle_flagged(s: Complex64) -> (Complex64, bool) {
    if is_nonpositive_integer(s) {
        return (Complex64::new(0.0, 0.0), false);
    }
    let l = ln_recip_gamma(s);
    if l.re < -745.0 {
        return (Complex64::new(0.0, 0.0), true);
    }
    (l.exp(), false)
}

/// Reference value of `1/Γ(s)`; exactly 0 at non-positive integers.
pub fn gamma_oracle(s: Complex64) -> Complex64 {
    gamma_oracle_flagged(s).0
}

pub fn recip_gamma_oracle(s: Complex64) -> GammaEvaluation {
    GammaEvaluation {
        s,
        value: gamma_oracle(s),
        method: GammaMethod::Oracle,
        quadrature: None,
    }
}

fn check_s(s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("s = {s} is not finite")))
    }
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// `1/Γ(s) = (1/2πi) ∫ e^t t^{-s} dt` over the rotated Hankel loop.
pub fn recip_gamma_contour(
    s: Complex64,
    spec: &GammaContourSpec,
    cfg: &QuadratureConfig,
) -> Result<GammaEvaluation> {
    check_s(s)?;
    let path = build_gamma_path(spec)?;
    let scale = 1.0 / two_pi_i();
    let f = |t: PolarComplex| (t.to_cartesian() - s * t.ln()).exp() * scale;
    // |e^t t^{-s}| = e^{r cos θ} r^{-Re s} e^{θ Im s}
    let decay = |ray: &RaySegment| {
        Ok(DecayModel::dominating(
            (s.im * ray.angle).exp() / (2.0 * PI),
            -s.re,
            -ray.angle.cos(),
            1.0,
            ray.start_radius,
        ))
    };
    let q = integrate_path(&f, &path, decay, cfg)?;
    Ok(GammaEvaluation {
        s,
        value: q.value,
        method: GammaMethod::Contour,
        quadrature: Some(q),
    })
}

/// `1/Γ(s) = λ^{1-s}/(2πi) ∫ e^{λτ} τ^{-s} dτ` over the loop scaled by `1/λ`.
///
/// `λ^{1-s}` is taken on the sheet of `lam.lambda.argument()`, the same angle
/// that shifts the `ψ_λ` window.
pub fn recip_gamma_lambda(
    s: Complex64,
    lam: &LambdaSpec,
    spec: &GammaContourSpec,
    cfg: &QuadratureConfig,
) -> Result<GammaEvaluation> {
    check_s(s)?;
    let path = build_lambda_path(lam, spec)?;
    let lambda = lam.lambda;
    let lambda_c = lambda.to_cartesian();
    let scale = 1.0 / two_pi_i();
    let f = |tau: PolarComplex| (lambda_c * tau.to_cartesian() - s * tau.ln()).exp() * scale;
    let decay = |ray: &RaySegment| {
        Ok(DecayModel::dominating(
            (s.im * ray.angle).exp() / (2.0 * PI),
            -s.re,
            -lambda.modulus() * (ray.angle + lambda.argument()).cos(),
            1.0,
            ray.start_radius,
        ))
    };
    let q = integrate_path(&f, &path, decay, cfg)?;
    let q = scale_result(q, lambda.powc(1.0 - s));
    Ok(GammaEvaluation {
        s,
        value: q.value,
        method: GammaMethod::ContourLambda,
        quadrature: Some(q),
    })
}

/// `|1/Γ(s) · 1/Γ(1-s) - sin(πs)/π|` with both factors from the default loop.
pub fn reflection_residual(s: Complex64) -> Result<f64> {
    let spec = GammaContourSpec::default();
    let cfg = QuadratureConfig::default();
    let a = recip_gamma_contour(s, &spec, &cfg)?;
    let b = recip_gamma_contour(1.0 - s, &spec, &cfg)?;
    Ok((a.value * b.value - sin_pi(s) / PI).norm())
}
