//! Two-parameter Mittag-Leffler function `E_{ρ,μ}(z) = Σ zⁿ/Γ(μ + n/ρ)`.
//!
//! Four routes: the power series, the ζ-loop integral (pole pinned at
//! `ζ = 1`, loop anchored to `arg z`), and the Bateman and Dzhrbashyan loop
//! integrals. The series serves as the oracle for the other three.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{
    build_zeta_path, default_ml_deltas, ml_arg_window, ArcSegment, IntegrationPath, MLContourSpec,
    RaySegment,
};
use crate::error::{Error, Result};
use crate::gamma::{ln_recip_gamma, ln_recip_gamma_split, ln_split};
use crate::gamma::gamma_oracle;
use crate::polar::PolarComplex;
use crate::quadrature::{integrate_path, DecayModel, QuadratureConfig, QuadratureResult};
use crate::sum::{two_sum, CompensatedSum};

/// Series results losing more digits than this are flagged unreliable.
pub const CANCELLATION_LIMIT: f64 = 9.0;

/// Margin below `ln(f64::MAX)` for the ζ-loop overflow guard.
const OVERFLOW_MARGIN: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub rho: f64,
    pub mu: Complex64,
}

impl MLParams {
    pub fn new(rho: f64, mu: Complex64) -> Self {
        Self { rho, mu }
    }

    pub fn real(rho: f64, mu: f64) -> Self {
        Self::new(rho, Complex64::new(mu, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.mu.re.is_finite() && self.mu.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu = {} is not finite", self.mu)));
        }
        Ok(())
    }

    /// `ρ(1 − μ)`, the exponent of `(zζ)` in the ζ-loop integrand.
    fn loop_exponent(&self) -> Complex64 {
        self.rho * (1.0 - self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-17,
            abs_tol: 1e-300,
            max_terms: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub terms_used: usize,
    pub max_term_modulus: f64,
    /// `log10(max term / |sum|)`.
    pub cancellation_digits: f64,
    pub converged: bool,
}

impl SeriesDiagnostics {
    pub fn unreliable(&self) -> bool {
        !(self.cancellation_digits <= CANCELLATION_LIMIT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MLMethod {
    Series,
    ZetaContour,
    Bateman,
    Dzhrbashyan,
    ClosedForm,
}

impl MLMethod {
    pub const ALL: [MLMethod; 5] = [
        MLMethod::Series,
        MLMethod::ZetaContour,
        MLMethod::Bateman,
        MLMethod::Dzhrbashyan,
        MLMethod::ClosedForm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MLMethod::Series => "series",
            MLMethod::ZetaContour => "zetaContour",
            MLMethod::Bateman => "bateman",
            MLMethod::Dzhrbashyan => "dzhrbashyan",
            MLMethod::ClosedForm => "closedForm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Diagnostics {
    Series(SeriesDiagnostics),
    Quadrature(QuadratureResult),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLEvaluation {
    pub params: MLParams,
    pub z: PolarComplex,
    pub value: Complex64,
    pub method: MLMethod,
    pub diagnostics: Diagnostics,
}

impl MLEvaluation {
    /// Converged (or rounding-limited) and, for the series, not dominated by
    /// cancellation.
    pub fn usable(&self) -> bool {
        match &self.diagnostics {
            Diagnostics::Series(d) => d.converged && !d.unreliable(),
            Diagnostics::Quadrature(q) => q.usable(),
            Diagnostics::None => true,
        }
    }

    pub fn converged(&self) -> bool {
        match &self.diagnostics {
            Diagnostics::Series(d) => d.converged,
            Diagnostics::Quadrature(q) => q.usable(),
            Diagnostics::None => true,
        }
    }

    pub fn error_estimate(&self) -> f64 {
        match &self.diagnostics {
            Diagnostics::Series(d) => {
                f64::EPSILON * d.max_term_modulus.max(self.value.norm()) * (d.terms_used as f64).sqrt()
            }
            Diagnostics::Quadrature(q) => q.error_estimate,
            Diagnostics::None => 0.0,
        }
    }
}

/// Power series with compensated summation. Terms are formed as
/// `exp(n ln z + ln(1/Γ(μ + n/ρ)))`, so huge `zⁿ` and tiny `1/Γ` never
/// overflow separately.
pub fn ml_series(params: &MLParams, z: PolarComplex, cfg: &SeriesConfig) -> Result<MLEvaluation> {
    params.validate()?;
    let mu = params.mu;
    let first = gamma_oracle(mu);
    let done = |value: Complex64, diagnostics: SeriesDiagnostics| MLEvaluation {
        params: *params,
        z,
        value,
        method: MLMethod::Series,
        diagnostics: Diagnostics::Series(diagnostics),
    };
    if z.modulus() == 0.0 {
        return Ok(done(
            first,
            SeriesDiagnostics {
                terms_used: 1,
                max_term_modulus: first.norm(),
                cancellation_digits: 0.0,
                converged: true,
            },
        ));
    }
    let (ln_modulus, ln_modulus_lo) = ln_split(z.modulus(), 0.0);
    // last index with Re(μ + n/ρ) ≤ 0, where 1/Γ may vanish or be tiny by accident
    let past_poles = if mu.re > 0.0 { 0.0 } else { (-mu.re * params.rho).floor() + 1.0 };
    let mut sum = CompensatedSum::new();
    sum.add(first);
    let mut max_term = first.norm();
    let mut max_index = 0usize;
    let mut small_run = 0;
    let mut converged = false;
    let mut n = 0usize;
    while n + 1 < cfg.max_terms {
        n += 1;
        let nf = n as f64;
        // μ + n/ρ as hi + lo; near the peak of a cancelling series the
        // rounding of n/ρ alone would shift ln Γ by ψ(a)·ulp(a)
        let q = nf / params.rho;
        let q_err = (-q).mul_add(params.rho, nf) / params.rho;
        let (a_re, a_err) = two_sum(mu.re, q);
        let a = Complex64::new(a_re, mu.im);
        let (lg, mut lg_lo) = ln_recip_gamma_split(a);
        let mut phase = reduced_multiple(nf, z.argument()) + lg.im;
        if a.norm() >= 1.0 {
            // d ln(1/Γ)/da = −ψ(a) ≈ −(ln a − 1/(2a))
            let shift = -(a.ln() - 0.5 / a) * (a_err + q_err);
            lg_lo += shift.re;
            phase += shift.im;
        }
        let term = Complex64::from_polar(term_modulus(nf, ln_modulus, ln_modulus_lo, lg.re, lg_lo), phase);
        let term = if term.re.is_finite() && term.im.is_finite() {
            term
        } else if ln_recip_gamma(mu + nf / params.rho).re == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            return Err(Error::InvalidParameter(format!(
                "series term {n} overflows for |z| = {}",
                z.modulus()
            )));
        };
        sum.add(term);
        let size = term.norm();
        if size > max_term {
            max_term = size;
            max_index = n;
        }
        let partial = sum.value().norm();
        if size < cfg.abs_tol + cfg.rel_tol * partial {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && n > max_index && nf > past_poles {
            converged = true;
            break;
        }
    }
    let value = sum.value();
    let cancellation_digits = if max_term == 0.0 {
        0.0
    } else if value.norm() == 0.0 {
        f64::INFINITY
    } else {
        (max_term / value.norm()).log10().max(0.0)
    };
    Ok(done(
        value,
        SeriesDiagnostics {
            terms_used: n + 1,
            max_term_modulus: max_term,
            cancellation_digits,
            converged,
        },
    ))
}

/// `exp(n (l + l_lo) + g + g_lo)` with the exponent kept to about twice
/// working precision; terms near the peak of a strongly cancelling series
/// have exponents in the hundreds.
fn term_modulus(n: f64, l: f64, l_lo: f64, g: f64, g_lo: f64) -> f64 {
    let p = n * l;
    let p_err = n.mul_add(l, -p) + n * l_lo;
    let hi = p + g;
    let bb = hi - p;
    let err = (p - (hi - bb)) + (g - bb);
    let lo = p_err + g_lo + err;
    if !lo.is_finite() {
        return hi.exp();
    }
    hi.exp() * (1.0 + lo)
}

/// `n·θ` reduced to about `[-π, π]` with an absolute error near `ε_mach`
/// rather than `ε_mach·|nθ|`. Series terms at large `n` cancel to many
/// digits, so their phases must not drift.
fn reduced_multiple(n: f64, theta: f64) -> f64 {
    // 2π as an unevaluated sum hi + lo
    const TWO_PI_HI: f64 = 6.283_185_307_179_586;
    const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;
    let p = n * theta;
    let p_err = n.mul_add(theta, -p);
    let k = (p / TWO_PI_HI).round();
    let hi = (-k).mul_add(TWO_PI_HI, p);
    hi - k * TWO_PI_LO + p_err
}

/// Arc offset `ϵ` for the default ζ-loop. The arc crosses `arg(zζ) = 0`,
/// where the integrand reaches `exp((|z|(1+ϵ))^ρ)`; choosing
/// `(|z|(1+ϵ))^ρ = |z|^ρ + 1` caps that excess at a factor `e`.
pub fn default_zeta_epsilon(rho: f64, z_modulus: f64) -> f64 {
    if z_modulus == 0.0 {
        return 1.0;
    }
    let eps = (1.0 + z_modulus.powf(-rho)).powf(1.0 / rho) - 1.0;
    eps.clamp(1e-3, 1.0)
}

/// Maximal deltas, adaptive `ϵ`, `arg z` taken from `z`.
pub fn default_ml_spec(rho: f64, z: PolarComplex) -> Result<MLContourSpec> {
    let (d1, d2) = default_ml_deltas(rho)?;
    Ok(MLContourSpec::new(
        rho,
        default_zeta_epsilon(rho, z.modulus()),
        z.argument(),
        d1,
        d2,
    ))
}

/// `z` with its argument moved by a multiple of 2π into the ζ-loop window,
/// if one exists.
pub fn shift_into_window(rho: f64, z: PolarComplex) -> Option<PolarComplex> {
    let (d1, d2) = default_ml_deltas(rho).ok()?;
    let (low, high) = ml_arg_window(rho, d1, d2).ok()?;
    let mid = 0.5 * (low + high);
    let k = ((mid - z.argument()) / (2.0 * PI)).round();
    let shifted = z.rotated(2.0 * PI * k);
    let probe = MLContourSpec::new(rho, 1.0, shifted.argument(), d1, d2);
    crate::contour::validate_ml_contour(&probe).ok.then_some(shifted)
}

/// `E_{ρ,μ}(z) = (ρ/2πi) ∫ exp((zζ)^ρ) (zζ)^{ρ(1−μ)} / (ζ − 1) dζ` over the
/// ζ-loop, with `arg(zζ) = arg z + arg ζ` accumulated along the path.
pub fn ml_contour(
    params: &MLParams,
    z: PolarComplex,
    spec: &MLContourSpec,
    cfg: &QuadratureConfig,
) -> Result<MLEvaluation> {
    params.validate()?;
    if spec.rho != params.rho {
        return Err(Error::InvalidParameter(format!(
            "contour spec rho {} differs from params rho {}",
            spec.rho, params.rho
        )));
    }
    if spec.arg_z != z.argument() {
        return Err(Error::InvalidParameter(format!(
            "contour spec arg z {} differs from arg z {}",
            spec.arg_z,
            z.argument()
        )));
    }
    let path = build_zeta_path(spec)?;
    if z.modulus() == 0.0 {
        return Err(Error::InvalidParameter(
            "contour route needs z ≠ 0 (the integrand has no decay); use the series".into(),
        ));
    }
    let rho = params.rho;
    let exponent = (z.modulus() * spec.radius()).powf(rho);
    let limit = f64::MAX.ln() - OVERFLOW_MARGIN;
    if !(exponent < limit) {
        return Err(Error::Overflow { exponent, limit });
    }
    let a = params.loop_exponent();
    let prefactor = rho / Complex64::new(0.0, 2.0 * PI);
    let f = |zeta: PolarComplex| {
        let w = z * zeta;
        let log = w.powf(rho).to_cartesian() + a * w.ln();
        prefactor * log.exp() / (zeta.to_cartesian() - 1.0)
    };
    let decay = |ray: &RaySegment| {
        let phi = z.argument() + ray.angle;
        let (sin, cos) = ray.angle.sin_cos();
        let distance = if cos > ray.start_radius {
            sin.abs()
        } else {
            (Complex64::from_polar(ray.start_radius, ray.angle) - 1.0).norm()
        };
        let k = rho / (2.0 * PI) * z.modulus().powf(a.re) * (-a.im * phi).exp() / distance;
        Ok(DecayModel::dominating(
            k,
            a.re,
            -z.modulus().powf(rho) * (rho * phi).cos(),
            rho,
            ray.start_radius,
        ))
    };
    let q = integrate_path(&f, &path, decay, cfg)?;
    Ok(MLEvaluation {
        params: *params,
        z,
        value: q.value,
        method: MLMethod::ZetaContour,
        diagnostics: Diagnostics::Quadrature(q),
    })
}

/// `(1/2πi) ∫ t^{α−β} e^t / (t^α − z) dt` over the classical loop of radius
/// `epsilon`, with `α = 1/ρ`, `β = μ`. The loop must enclose every root of
/// `t^α = z`: `epsilon > |z|^{1/α}`. `β` must be real and positive.
pub fn ml_bateman(
    params: &MLParams,
    z: Complex64,
    epsilon: f64,
    cfg: &QuadratureConfig,
) -> Result<MLEvaluation> {
    params.validate()?;
    if params.mu.im != 0.0 || !(params.mu.re > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Bateman route needs real beta > 0, got mu = {}",
            params.mu
        )));
    }
    let alpha = 1.0 / params.rho;
    let beta = params.mu.re;
    let threshold = z.norm().powf(params.rho);
    if !(epsilon > threshold) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Bateman radius epsilon = {epsilon} must exceed |z|^rho = {threshold}"
        )));
    }
    let path = IntegrationPath::hankel_loop(epsilon, -PI, PI)?;
    let scale = 1.0 / Complex64::new(0.0, 2.0 * PI);
    let f = |t: PolarComplex| {
        let numerator = (t.to_cartesian() + (alpha - beta) * t.ln()).exp();
        numerator / (t.powf(alpha).to_cartesian() - z) * scale
    };
    let gap = epsilon.powf(alpha) - z.norm();
    let decay = |ray: &RaySegment| {
        Ok(DecayModel::dominating(
            1.0 / (2.0 * PI * gap),
            alpha - beta,
            -ray.angle.cos(),
            1.0,
            ray.start_radius,
        ))
    };
    let q = integrate_path(&f, &path, decay, cfg)?;
    Ok(MLEvaluation {
        params: *params,
        z: PolarComplex::from_cartesian(z),
        value: q.value,
        method: MLMethod::Bateman,
        diagnostics: Diagnostics::Quadrature(q),
    })
}

/// Open window for the Dzhrbashyan ray angle `θ`.
pub fn dzhrbashyan_theta_window(rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.5) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Dzhrbashyan route needs rho > 1/2, got {rho}"
        )));
    }
    Ok((FRAC_PI_2 / rho, if rho <= 1.0 { PI } else { PI / rho }))
}

/// `(ρ/2πi) ∫ τ^{ρ(1−μ)} exp(τ^ρ) / (τ − z) dτ` over rays at `∓θ` joined by
/// an arc of radius `epsilon > |z|`.
pub fn ml_dzhrbashyan(
    params: &MLParams,
    z: Complex64,
    epsilon: f64,
    theta: f64,
    cfg: &QuadratureConfig,
) -> Result<MLEvaluation> {
    params.validate()?;
    let (low, high) = dzhrbashyan_theta_window(params.rho)?;
    if !(theta > low && theta < high) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside the open window ({low}, {high})"
        )));
    }
    if !(epsilon > z.norm()) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Dzhrbashyan radius epsilon = {epsilon} must exceed |z| = {}",
            z.norm()
        )));
    }
    let rho = params.rho;
    let a = params.loop_exponent();
    let path = IntegrationPath::hankel_loop(epsilon, -theta, theta)?;
    let prefactor = rho / Complex64::new(0.0, 2.0 * PI);
    let f = |tau: PolarComplex| {
        let log = tau.powf(rho).to_cartesian() + a * tau.ln();
        prefactor * log.exp() / (tau.to_cartesian() - z)
    };
    let gap = epsilon - z.norm();
    let decay = |ray: &RaySegment| {
        Ok(DecayModel::dominating(
            rho / (2.0 * PI) * (-a.im * ray.angle).exp() / gap,
            a.re,
            -(rho * ray.angle).cos(),
            rho,
            ray.start_radius,
        ))
    };
    let q = integrate_path(&f, &path, decay, cfg)?;
    Ok(MLEvaluation {
        params: *params,
        z: PolarComplex::from_cartesian(z),
        value: q.value,
        method: MLMethod::Dzhrbashyan,
        diagnostics: Diagnostics::Quadrature(q),
    })
}

/// Default Dzhrbashyan radius: the ζ-loop radius scaled by `|z|`, at least 1/2.
pub fn default_dzhrbashyan_epsilon(rho: f64, z_modulus: f64) -> f64 {
    (z_modulus * (1.0 + default_zeta_epsilon(rho, z_modulus))).max(0.5)
}

/// Default Bateman radius, the image of the Dzhrbashyan one under `t = τ^ρ`.
pub fn default_bateman_epsilon(rho: f64, z_modulus: f64) -> f64 {
    default_dzhrbashyan_epsilon(rho, z_modulus).powf(rho)
}

pub fn default_dzhrbashyan_theta(rho: f64) -> Result<f64> {
    let (low, high) = dzhrbashyan_theta_window(rho)?;
    Ok(0.5 * (low + high))
}

/// Known closed forms: `E_{1,1} = e^z`, `E_{1,2} = (e^z − 1)/z`,
/// `E_{1/2,1} = cosh √z`.
pub fn ml_closed_form(params: &MLParams, z: Complex64) -> Option<Complex64> {
    let (rho, mu) = (params.rho, params.mu);
    if mu.im != 0.0 {
        return None;
    }
    if rho == 1.0 && mu.re == 1.0 {
        Some(z.exp())
    } else if rho == 1.0 && mu.re == 2.0 {
        if z.norm() < 1e-4 {
            Some(1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
        } else {
            Some((z.exp() - 1.0) / z)
        }
    } else if rho == 0.5 && mu.re == 1.0 {
        Some(z.sqrt().cosh())
    } else {
        None
    }
}

pub fn ml_closed_form_eval(params: &MLParams, z: PolarComplex) -> Option<MLEvaluation> {
    ml_closed_form(params, z.to_cartesian()).map(|value| MLEvaluation {
        params: *params,
        z,
        value,
        method: MLMethod::ClosedForm,
        diagnostics: Diagnostics::None,
    })
}

/// Overrides for [`compare_methods`]; `None` picks the defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CompareSpecs {
    pub contour: Option<MLContourSpec>,
    pub bateman_epsilon: Option<f64>,
    pub dzhrbashyan_epsilon: Option<f64>,
    pub dzhrbashyan_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Evaluated; `usable` says whether it entered the deviation table.
    Evaluated { usable: bool },
    /// A precondition failed; not attempted.
    Skipped { reason: String },
    /// Preconditions held but evaluation failed.
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: MLMethod,
    pub outcome: Outcome,
    pub evaluation: Option<MLEvaluation>,
}

impl MethodReport {
    pub fn usable_value(&self) -> Option<Complex64> {
        match (&self.outcome, &self.evaluation) {
            (Outcome::Evaluated { usable: true }, Some(e)) => Some(e.value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub a: MLMethod,
    pub b: MLMethod,
    pub absolute: f64,
    /// `|a − b| / max(|a|, |b|)`.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub params: MLParams,
    pub z: PolarComplex,
    pub methods: Vec<MethodReport>,
    pub deviations: Vec<Deviation>,
}

impl ComparisonReport {
    pub fn method(&self, m: MLMethod) -> Option<&MethodReport> {
        self.methods.iter().find(|r| r.method == m)
    }

    pub fn deviation(&self, a: MLMethod, b: MLMethod) -> Option<&Deviation> {
        self.deviations
            .iter()
            .find(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
    }

    pub fn max_relative_deviation(&self) -> f64 {
        self.deviations.iter().map(|d| d.relative).fold(0.0, f64::max)
    }
}

fn report(method: MLMethod, result: Result<MLEvaluation>) -> MethodReport {
    match result {
        Ok(e) => MethodReport {
            method,
            outcome: Outcome::Evaluated { usable: e.usable() },
            evaluation: Some(e),
        },
        Err(err) if err.is_precondition() => MethodReport {
            method,
            outcome: Outcome::Skipped {
                reason: err.to_string(),
            },
            evaluation: None,
        },
        Err(err) => MethodReport {
            method,
            outcome: Outcome::Failed {
                reason: err.to_string(),
            },
            evaluation: None,
        },
    }
}

/// Runs every route whose preconditions hold and tabulates pairwise
/// deviations among the usable results. The ζ-loop uses `arg z` shifted by
/// 2πk into its window when no explicit spec is given.
pub fn compare_methods(
    params: &MLParams,
    z: PolarComplex,
    specs: &CompareSpecs,
    cfg: &QuadratureConfig,
) -> ComparisonReport {
    let rho = params.rho;
    let zc = z.to_cartesian();
    let mut methods = vec![report(MLMethod::Series, ml_series(params, z, &SeriesConfig::default()))];

    let contour = match specs.contour {
        Some(spec) => ml_contour(params, z.rotated(spec.arg_z - z.argument()), &spec, cfg),
        None => match shift_into_window(rho, z) {
            Some(shifted) => default_ml_spec(rho, shifted)
                .and_then(|spec| ml_contour(params, shifted, &spec, cfg)),
            None => Err(Error::InvalidParameter(format!(
                "arg z = {} is outside the ζ-loop window for rho = {rho}",
                z.argument()
            ))),
        },
    };
    methods.push(report(MLMethod::ZetaContour, contour));

    let bateman_eps = specs
        .bateman_epsilon
        .unwrap_or_else(|| default_bateman_epsilon(rho, z.modulus()));
    methods.push(report(MLMethod::Bateman, ml_bateman(params, zc, bateman_eps, cfg)));

    let dzh = default_dzhrbashyan_theta(rho).and_then(|default_theta| {
        let eps = specs
            .dzhrbashyan_epsilon
            .unwrap_or_else(|| default_dzhrbashyan_epsilon(rho, z.modulus()));
        ml_dzhrbashyan(params, zc, eps, specs.dzhrbashyan_theta.unwrap_or(default_theta), cfg)
    });
    methods.push(report(MLMethod::Dzhrbashyan, dzh));

    if let Some(e) = ml_closed_form_eval(params, z) {
        methods.push(report(MLMethod::ClosedForm, Ok(e)));
    }

    let mut deviations = Vec::new();
    for (i, a) in methods.iter().enumerate() {
        for b in &methods[i + 1..] {
            if let (Some(va), Some(vb)) = (a.usable_value(), b.usable_value()) {
                let absolute = (va - vb).norm();
                let scale = va.norm().max(vb.norm());
                deviations.push(Deviation {
                    a: a.method,
                    b: b.method,
                    absolute,
                    relative: if scale == 0.0 { 0.0 } else { absolute / scale },
                });
            }
        }
    }
    ComparisonReport {
        params: *params,
        z,
        methods,
        deviations,
    }
}

/// Standalone small-circle integral of the ζ-loop integrand around its pole
/// at `ζ = 1`; equals `ρ z^{ρ(1−μ)} exp(z^ρ)`.
pub fn zeta_pole_residue(
    params: &MLParams,
    z: PolarComplex,
    radius: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    params.validate()?;
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParameter(format!("circle radius {radius} must lie in (0, 1)")));
    }
    let rho = params.rho;
    let a = params.loop_exponent();
    let prefactor = rho / Complex64::new(0.0, 2.0 * PI);
    let f = |u: PolarComplex| {
        // ζ = 1 + u, with arg ζ continued from 0 inside the small disk
        let zeta = PolarComplex::from_cartesian(1.0 + u.to_cartesian());
        let w = z * zeta;
        prefactor * (w.powf(rho).to_cartesian() + a * w.ln()).exp() / u.to_cartesian()
    };
    let path = IntegrationPath::new(vec![crate::contour::Segment::Arc(ArcSegment {
        radius,
        start_angle: -PI,
        end_angle: PI,
    })])?;
    integrate_path(&f, &path, |_| unreachable!("closed arc has no rays"), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn polar(m: f64, a: f64) -> PolarComplex {
        PolarComplex::new(m, a).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn series(rho: f64, mu: Complex64, z: PolarComplex) -> MLEvaluation {
        ml_series(&MLParams::new(rho, mu), z, &SeriesConfig::default()).unwrap()
    }

    fn contour(rho: f64, mu: Complex64, z: PolarComplex) -> MLEvaluation {
        let spec = default_ml_spec(rho, z).unwrap();
        ml_contour(&MLParams::new(rho, mu), z, &spec, &Default::default()).unwrap()
    }

    const E: f64 = std::f64::consts::E;

    #[test]
    fn reduced_phase_is_accurate() {
        let r = reduced_multiple(301.0, PI);
        // 301 · fl(π) - 150 · 2π, with fl(π) = π - 1.2246467991473532e-16
        let d = (r - (PI - 301.0 * 1.2246467991473532e-16)).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < 1e-15, "{r}");
        assert_eq!(reduced_multiple(0.0, 1.0), 0.0);
    }

    #[test]
    fn series_trivial_values() {
        assert!((series(1.0, c(1.0, 0.0), polar(1.0, 0.0)).value - E).norm() < 1e-14);
        assert!((series(1.0, c(2.0, 0.0), polar(1.0, 0.0)).value - (E - 1.0)).norm() < 1e-14);
        let v = series(2.0, c(1.0, 0.0), polar(1.0, 0.0)).value;
        assert!((v - 5.0089800807622834663).norm() < 1e-13);
    }

    #[test]
    fn series_at_zero_is_single_term() {
        let mu = c(0.3, -1.2);
        let e = series(0.7, mu, polar(0.0, 0.0));
        assert_eq!(e.value, gamma_oracle(mu));
        match e.diagnostics {
            Diagnostics::Series(d) => assert_eq!(d.terms_used, 1),
            _ => panic!(),
        }
    }

    #[test]
    fn series_pole_terms_vanish() {
        // μ = 0, ρ = 1: E_{1,0}(z) = z e^z
        let z = polar(0.7, 0.4);
        let v = series(1.0, c(0.0, 0.0), z).value;
        let zc = z.to_cartesian();
        assert!(rel(v, zc * zc.exp()) < 1e-14);
    }

    #[test]
    fn series_flags_cancellation() {
        let e = series(2.0, c(1.0, 0.0), polar(6.0, PI));
        match e.diagnostics {
            Diagnostics::Series(d) => {
                assert!(d.cancellation_digits > 9.0);
                assert!(d.unreliable());
            }
            _ => panic!(),
        }
        assert!(!e.usable());
    }

    #[test]
    fn series_budget_exhaustion() {
        let cfg = SeriesConfig {
            max_terms: 5,
            ..Default::default()
        };
        let e = ml_series(&MLParams::real(1.0, 1.0), polar(3.0, 0.0), &cfg).unwrap();
        assert!(!e.converged());
    }

    #[test]
    fn contour_closed_forms() {
        let v = contour(1.0, c(1.0, 0.0), polar(1.0, PI)).value;
        assert!(rel(v, c((-1.0f64).exp(), 0.0)) < 1e-10, "{v}");
        let v = contour(1.0, c(2.0, 0.0), polar(2.0, PI)).value;
        assert!(rel(v, c(0.43233235838169365405, 0.0)) < 1e-10, "{v}");
    }

    #[test]
    fn contour_matches_oracle_values() {
        let v = contour(2.0, c(1.0, 0.0), polar(1.0, PI)).value;
        assert!(rel(v, c(0.42758357615580700441, 0.0)) < 1e-10, "{v}");
        let v = contour(0.75, c(0.5, 0.0), polar(0.8, 2.5)).value;
        assert!(rel(v, c(-0.027964888807444631395, 0.2860961692747984251)) < 1e-8, "{v}");
        let v = contour(1.0, c(1.0, 0.5), polar(2.0, PI)).value;
        assert!(rel(v, c(0.18561010927548633165, 0.31714849233629450637)) < 1e-9, "{v}");
        let v = contour(0.75, c(1.0, 0.5), polar(5.0, PI)).value;
        assert!(rel(v, c(-0.20599560332536875328, 0.24118624981971714507)) < 1e-8, "{v}");
    }

    #[test]
    fn contour_independent_of_epsilon_and_deltas() {
        let params = MLParams::new(1.5, c(0.8, 0.3));
        let z = polar(1.3, PI + 0.1);
        let mut values = Vec::new();
        for eps in [0.5, 1.0, 2.0] {
            let spec = MLContourSpec::new(1.5, eps, z.argument(), PI / 1.5, PI / 1.5);
            values.push(ml_contour(&params, z, &spec, &Default::default()).unwrap().value);
        }
        for (d1, d2) in [(1.9, 2.0), (1.3, 1.6)] {
            let spec = MLContourSpec::new(1.5, 1.0, z.argument(), d1, d2);
            values.push(ml_contour(&params, z, &spec, &Default::default()).unwrap().value);
        }
        let reference = series(1.5, c(0.8, 0.3), z).value;
        for v in values {
            assert!(rel(v, reference) < 1e-9, "{v} vs {reference}");
        }
    }

    #[test]
    fn contour_preconditions() {
        let params = MLParams::real(2.0, 1.0);
        let z = polar(1.0, 0.0);
        let spec = MLContourSpec::new(2.0, 1.0, 0.0, FRAC_PI_2, FRAC_PI_2);
        let err = ml_contour(&params, z, &spec, &Default::default()).unwrap_err();
        assert!(err.to_string().contains("arg-z-window"), "{err}");

        let z = polar(40.0, PI);
        let spec = MLContourSpec::new(2.0, 1.0, PI, FRAC_PI_2, FRAC_PI_2);
        let err = ml_contour(&params, z, &spec, &Default::default()).unwrap_err();
        assert!(err.to_string().contains("modulus too large for contour route"));

        let z = polar(1.0, PI);
        let spec = MLContourSpec::new(2.0, 1.0, PI + 0.1, FRAC_PI_2, FRAC_PI_2);
        assert!(ml_contour(&params, z, &spec, &Default::default()).is_err());
    }

    #[test]
    fn bateman_examples() {
        let cfg = QuadratureConfig::default();
        let v = ml_bateman(&MLParams::real(1.0, 1.0), c(-1.0, 0.0), 2.0, &cfg).unwrap().value;
        assert!(rel(v, c(1.0 / E, 0.0)) < 1e-10);
        let v = ml_bateman(&MLParams::real(1.0, 2.0), c(1.0, 0.0), 2.0, &cfg).unwrap().value;
        assert!(rel(v, c(E - 1.0, 0.0)) < 1e-10);
        let v = ml_bateman(&MLParams::real(2.0, 1.0), c(-0.5, 0.0), 1.5, &cfg).unwrap().value;
        assert!(rel(v, c(0.61569034419292587487, 0.0)) < 1e-8);
        assert!(ml_bateman(&MLParams::real(1.0, 1.0), c(-3.0, 0.0), 2.0, &cfg).is_err());
        assert!(ml_bateman(&MLParams::new(1.0, c(1.0, 0.5)), c(-1.0, 0.0), 2.0, &cfg).is_err());
    }

    #[test]
    fn dzhrbashyan_examples() {
        let cfg = QuadratureConfig::default();
        let v = ml_dzhrbashyan(&MLParams::real(1.0, 1.0), c(-1.0, 0.0), 2.0, 0.75 * PI, &cfg)
            .unwrap()
            .value;
        assert!(rel(v, c(1.0 / E, 0.0)) < 1e-10);
        let v = ml_dzhrbashyan(&MLParams::real(2.0, 1.0), c(0.0, 0.5), 1.2, 0.4 * PI, &cfg)
            .unwrap()
            .value;
        assert!(rel(v, c(0.77880078307140486825, 0.47892517290104347254)) < 1e-8);
        let v = ml_dzhrbashyan(&MLParams::real(1.0, 2.0), c(1.0, 0.0), 2.0, 0.9 * PI, &cfg)
            .unwrap()
            .value;
        assert!(rel(v, c(E - 1.0, 0.0)) < 1e-10);
        // θ at the window edge, ε not above |z|
        assert!(ml_dzhrbashyan(&MLParams::real(2.0, 1.0), c(0.5, 0.0), 1.2, FRAC_PI_2, &cfg).is_err());
        assert!(ml_dzhrbashyan(&MLParams::real(1.0, 1.0), c(2.0, 0.0), 2.0, 2.0, &cfg).is_err());
    }

    #[test]
    fn dzhrbashyan_valid_for_any_arg_inside_radius() {
        let params = MLParams::new(1.3, c(0.7, -0.4));
        for arg in [0.0, 1.0, 2.5, PI, -2.0] {
            let z = polar(1.7, arg);
            let v = ml_dzhrbashyan(&params, z.to_cartesian(), 2.5, 2.0, &Default::default())
                .unwrap()
                .value;
            let s = series(1.3, params.mu, z).value;
            assert!(rel(v, s) < 1e-9, "arg {arg}: {v} vs {s}");
        }
    }

    #[test]
    fn closed_forms() {
        let z = c(2.0, 1.0);
        assert_eq!(ml_closed_form(&MLParams::real(1.0, 1.0), z), Some(z.exp()));
        let v = ml_closed_form(&MLParams::real(0.5, 1.0), c(1.0, 0.0)).unwrap();
        assert!((v - 1.5430806348152437785).norm() < 1e-15);
        assert_eq!(ml_closed_form(&MLParams::real(1.0, 2.0), c(0.0, 0.0)), Some(c(1.0, 0.0)));
        assert_eq!(ml_closed_form(&MLParams::real(2.0, 1.0), z), None);
    }

    #[test]
    fn compare_all_agree_at_minus_one() {
        let r = compare_methods(&MLParams::real(1.0, 1.0), polar(1.0, PI), &Default::default(), &Default::default());
        for m in [MLMethod::Series, MLMethod::ZetaContour, MLMethod::Bateman, MLMethod::Dzhrbashyan] {
            let v = r.method(m).unwrap().usable_value().unwrap();
            assert!(rel(v, c(1.0 / E, 0.0)) < 1e-8, "{m:?}");
        }
        assert!(r.max_relative_deviation() < 1e-8);
    }

    #[test]
    fn compare_skips_contour_outside_window() {
        let r = compare_methods(&MLParams::real(2.0, 1.0), polar(1.0, PI / 4.0), &Default::default(), &Default::default());
        assert!(matches!(r.method(MLMethod::ZetaContour).unwrap().outcome, Outcome::Skipped { .. }));
        let expected = c(0.66501651582843077355, 1.913261757170703653);
        for m in [MLMethod::Series, MLMethod::Bateman, MLMethod::Dzhrbashyan] {
            assert!(rel(r.method(m).unwrap().usable_value().unwrap(), expected) < 1e-8);
        }
        assert!(r.deviation(MLMethod::Series, MLMethod::ZetaContour).is_none());
    }

    #[test]
    fn compare_complex_mu() {
        let r = compare_methods(&MLParams::new(1.0, c(1.0, 0.5)), polar(2.0, PI), &Default::default(), &Default::default());
        assert!(r.deviation(MLMethod::Series, MLMethod::ZetaContour).unwrap().absolute < 1e-7);
        assert!(matches!(r.method(MLMethod::Bateman).unwrap().outcome, Outcome::Skipped { .. }));
    }

    #[test]
    fn shifting_arg_into_window() {
        let z = polar(1.0, -PI + 0.2);
        let shifted = shift_into_window(1.0, z).unwrap();
        assert!((shifted.argument() - (PI + 0.2)).abs() < 1e-15);
        assert!(shift_into_window(2.0, polar(1.0, PI / 4.0)).is_none());
    }

    #[test]
    fn pole_residue_matches_closed_form() {
        // ρ = μ = 1: residue e^z; the ζ-loop value equals it too, since
        // E_{1,1}(z) = e^z
        let z = polar(0.8, PI - 0.3);
        let params = MLParams::real(1.0, 1.0);
        let r = zeta_pole_residue(&params, z, 0.25, &Default::default()).unwrap();
        let ez = z.to_cartesian().exp();
        assert!(rel(r.value, ez) < 1e-12);
        assert!(rel(contour(1.0, c(1.0, 0.0), z).value, ez) < 1e-10);
        // general ρ, μ: ρ z^{ρ(1−μ)} exp(z^ρ)
        let params = MLParams::new(1.7, c(0.4, 0.2));
        let r = zeta_pole_residue(&params, z, 0.25, &Default::default()).unwrap();
        let expected = 1.7 * (z.powf(1.7).to_cartesian() + params.loop_exponent() * z.ln()).exp();
        assert!(rel(r.value, expected) < 1e-12);
    }
}
