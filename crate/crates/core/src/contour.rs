//! Contour families, their admissibility windows, and the piecewise paths
//! handed to the quadrature engine.
//!
//! Three loop families are supported:
//!
//! * the rotated Hankel loop for `1/Γ(s)`: rays at `-δ₁+ψ` and `δ₂+ψ`, arc of
//!   radius `ε` between them;
//! * its `λ`-scaled image: radius `ε/|λ|`, angles shifted to `ψ_λ = ψ - arg λ`;
//! * the ζ-loop for `E_{ρ,μ}(z)`: rays at `-δ₁ρ-π` and `δ₂ρ-π`, arc of radius
//!   `1+ϵ`, placed so the simple pole sits at `ζ = 1` for every `z`.
//!
//! Every open bound is checked strictly and, additionally, with a safety
//! margin ([`DEFAULT_MARGIN`]): at the open bounds one of the rays lies on
//! the imaginary axis of the exponent and the integral diverges.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::PolarComplex;

/// Distance (radians) from an open bound inside which a spec is rejected.
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// Endpoint-matching tolerance for consecutive path segments.
pub const CONTINUITY_TOL: f64 = 1e-12;

/// Relative slack on the inclusive δ upper bounds, so `π/ρ` computed two
/// different ways still counts as the maximum.
const INCLUSIVE_SLACK: f64 = 4.0 * f64::EPSILON;

/// Stable tags for the admissibility conditions; used in reports and in CLI
/// error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    NonFinite,
    EpsilonPositive,
    Delta1Range,
    Delta2Range,
    PsiWindow,
    LambdaNonzero,
    PsiLambdaWindow,
    RhoAboveHalf,
    ArgZWindow,
}

impl Condition {
    pub fn tag(&self) -> &'static str {
        match self {
            Condition::NonFinite => "finite-input",
            Condition::EpsilonPositive => "epsilon-positive",
            Condition::Delta1Range => "delta1-range",
            Condition::Delta2Range => "delta2-range",
            Condition::PsiWindow => "psi-window",
            Condition::LambdaNonzero => "lambda-nonzero",
            Condition::PsiLambdaWindow => "psi-lambda-window",
            Condition::RhoAboveHalf => "rho-above-half",
            Condition::ArgZWindow => "arg-z-window",
        }
    }

    /// The inequality the condition stands for.
    pub fn statement(&self) -> &'static str {
        match self {
            Condition::NonFinite => "all parameters finite",
            Condition::EpsilonPositive => "epsilon > 0",
            Condition::Delta1Range => "π/2 < δ₁ ≤ π (ζ-loop: π/(2ρ) < δ₁ρ ≤ min(π, π/ρ))",
            Condition::Delta2Range => "π/2 < δ₂ ≤ π (ζ-loop: π/(2ρ) < δ₂ρ ≤ min(π, π/ρ))",
            Condition::PsiWindow => "π/2 − δ₂ < ψ < −π/2 + δ₁",
            Condition::LambdaNonzero => "λ ≠ 0",
            Condition::PsiLambdaWindow => "π/2 − δ₂ − arg λ < ψ_λ < −π/2 + δ₁ − arg λ",
            Condition::RhoAboveHalf => "ρ > 1/2",
            Condition::ArgZWindow => "π/(2ρ) − δ₂ρ + π < arg z < −π/(2ρ) + δ₁ρ + π",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.tag(), self.statement())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub message: String,
    /// How far the offending value must move to become admissible
    /// (including the safety margin).
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidityReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Diagnostics that do not invalidate the spec.
    pub notes: Vec<String>,
}

impl ValidityReport {
    fn new() -> Self {
        Self {
            ok: true,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, condition: Condition, message: String, distance: f64) {
        self.ok = false;
        self.violations.push(Violation {
            condition,
            message,
            distance,
        });
    }

    pub fn violates(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(Error::InvalidContour(self))
        }
    }

    /// Checks `low < value < high` with the margin applied on both sides.
    fn open_interval(
        &mut self,
        condition: Condition,
        name: &str,
        value: f64,
        (low, high): (f64, f64),
        margin: f64,
    ) {
        if value <= low + margin {
            let what = if (value - low).abs() <= margin {
                "at lower boundary"
            } else {
                "below lower bound"
            };
            self.push(
                condition,
                format!("{name} {what}: {value} vs open bound {low}"),
                low + margin - value,
            );
        } else if value >= high - margin {
            let what = if (value - high).abs() <= margin {
                "at upper boundary"
            } else {
                "above upper bound"
            };
            self.push(
                condition,
                format!("{name} {what}: {value} vs open bound {high}"),
                value - (high - margin),
            );
        }
    }

    /// Checks `low < value ≤ high` (upper bound inclusive).
    fn half_open(
        &mut self,
        condition: Condition,
        name: &str,
        value: f64,
        low: f64,
        high: f64,
        margin: f64,
    ) {
        if value <= low + margin {
            self.push(
                condition,
                format!("{name} ≤ {low:.6} (must exceed it)"),
                low + margin - value,
            );
        } else if value > high * (1.0 + INCLUSIVE_SLACK) {
            self.push(
                condition,
                format!("{name} > {high:.6} (maximum)"),
                value - high,
            );
        }
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("condition {} violated: {}", v.condition, v.message))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Rotated Hankel loop `γ(ε, ψ, δ₁, δ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaContourSpec {
    pub epsilon: f64,
    pub psi: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl GammaContourSpec {
    pub fn new(epsilon: f64, psi: f64, delta1: f64, delta2: f64) -> Self {
        Self {
            epsilon,
            psi,
            delta1,
            delta2,
        }
    }

    /// The classical loop: `ε = 1`, `ψ = 0`, rays along `arg t = ±π`.
    pub fn classical() -> Self {
        Self::new(1.0, 0.0, PI, PI)
    }

    /// Open window of admissible rotations for these deltas.
    pub fn psi_window(&self) -> (f64, f64) {
        gamma_psi_window(self.delta1, self.delta2)
    }
}

impl Default for GammaContourSpec {
    fn default() -> Self {
        Self::classical()
    }
}

/// `(π/2 − δ₂, −π/2 + δ₁)`.
pub fn gamma_psi_window(delta1: f64, delta2: f64) -> (f64, f64) {
    (FRAC_PI_2 - delta2, -FRAC_PI_2 + delta1)
}

/// Scaling parameter of the `λ`-form: `t = λτ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSpec {
    pub lambda: PolarComplex,
    pub psi_lambda: f64,
}

impl LambdaSpec {
    pub fn new(lambda: PolarComplex, psi_lambda: f64) -> Self {
        Self { lambda, psi_lambda }
    }

    /// `ψ_λ` at the centre of its window for the given deltas.
    pub fn centered(lambda: PolarComplex, delta1: f64, delta2: f64) -> Self {
        let (low, high) = lambda_psi_window(lambda, delta1, delta2);
        Self::new(lambda, 0.5 * (low + high))
    }

    /// Rotation of the underlying `t`-plane loop: `ψ = ψ_λ + arg λ`.
    pub fn equivalent_psi(&self) -> f64 {
        self.psi_lambda + self.lambda.argument()
    }
}

pub fn lambda_psi_window(lambda: PolarComplex, delta1: f64, delta2: f64) -> (f64, f64) {
    let (low, high) = gamma_psi_window(delta1, delta2);
    (low - lambda.argument(), high - lambda.argument())
}

/// ζ-loop `γ_ζ(ϵ, arg z, δ₁ρ, δ₂ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLContourSpec {
    pub rho: f64,
    /// Arc radius is `1 + epsilon_hat`.
    pub epsilon_hat: f64,
    /// Unwrapped argument of `z`.
    pub arg_z: f64,
    pub delta1rho: f64,
    pub delta2rho: f64,
}

impl MLContourSpec {
    pub fn new(rho: f64, epsilon_hat: f64, arg_z: f64, delta1rho: f64, delta2rho: f64) -> Self {
        Self {
            rho,
            epsilon_hat,
            arg_z,
            delta1rho,
            delta2rho,
        }
    }

    pub fn radius(&self) -> f64 {
        1.0 + self.epsilon_hat
    }
}

/// Largest admissible ζ-loop delta, `min(π, π/ρ)`.
pub fn max_ml_delta(rho: f64) -> f64 {
    PI.min(PI / rho)
}

/// Smallest (excluded) ζ-loop delta, `π/(2ρ)`.
pub fn min_ml_delta(rho: f64) -> f64 {
    FRAC_PI_2 / rho
}

pub fn validate_gamma_contour(spec: &GammaContourSpec) -> ValidityReport {
    validate_gamma_contour_with_margin(spec, DEFAULT_MARGIN)
}

pub fn validate_gamma_contour_with_margin(spec: &GammaContourSpec, margin: f64) -> ValidityReport {
    let mut report = ValidityReport::new();
    let fields = [spec.epsilon, spec.psi, spec.delta1, spec.delta2];
    if fields.iter().any(|x| !x.is_finite()) {
        report.push(Condition::NonFinite, format!("non-finite field in {spec:?}"), f64::INFINITY);
        return report;
    }
    if spec.epsilon <= 0.0 {
        report.push(
            Condition::EpsilonPositive,
            format!("epsilon = {} must be positive", spec.epsilon),
            -spec.epsilon,
        );
    }
    report.half_open(Condition::Delta1Range, "delta1", spec.delta1, FRAC_PI_2, PI, margin);
    report.half_open(Condition::Delta2Range, "delta2", spec.delta2, FRAC_PI_2, PI, margin);
    report.open_interval(
        Condition::PsiWindow,
        "psi",
        spec.psi,
        spec.psi_window(),
        margin,
    );
    report
}

/// Joint check of a `λ`-form: the `t`-plane deltas plus the shifted `ψ_λ` window.
pub fn validate_lambda_contour(lam: &LambdaSpec, spec: &GammaContourSpec) -> ValidityReport {
    let mut report = ValidityReport::new();
    if !lam.psi_lambda.is_finite() {
        report.push(Condition::NonFinite, "psi_lambda is not finite".into(), f64::INFINITY);
        return report;
    }
    if lam.lambda.modulus() == 0.0 {
        report.push(Condition::LambdaNonzero, "lambda = 0".into(), f64::INFINITY);
    }
    let base = validate_gamma_contour(&GammaContourSpec {
        psi: 0.5 * (spec.psi_window().0 + spec.psi_window().1),
        ..*spec
    });
    for v in base.violations {
        report.push(v.condition, v.message, v.distance);
    }
    report.open_interval(
        Condition::PsiLambdaWindow,
        "psi_lambda",
        lam.psi_lambda,
        lambda_psi_window(lam.lambda, spec.delta1, spec.delta2),
        DEFAULT_MARGIN,
    );
    report
}

pub fn validate_ml_contour(spec: &MLContourSpec) -> ValidityReport {
    validate_ml_contour_with_margin(spec, DEFAULT_MARGIN)
}

pub fn validate_ml_contour_with_margin(spec: &MLContourSpec, margin: f64) -> ValidityReport {
    let mut report = ValidityReport::new();
    let fields = [
        spec.rho,
        spec.epsilon_hat,
        spec.arg_z,
        spec.delta1rho,
        spec.delta2rho,
    ];
    if fields.iter().any(|x| !x.is_finite()) {
        report.push(Condition::NonFinite, format!("non-finite field in {spec:?}"), f64::INFINITY);
        return report;
    }
    if spec.rho <= 0.5 {
        report.push(
            Condition::RhoAboveHalf,
            format!("rho must exceed 1/2, got {}", spec.rho),
            0.5 - spec.rho,
        );
        // the delta ranges and the arg z window are undefined for rho <= 1/2
        return report;
    }
    if spec.epsilon_hat <= 0.0 {
        report.push(
            Condition::EpsilonPositive,
            format!("epsilon = {} must be positive", spec.epsilon_hat),
            -spec.epsilon_hat,
        );
    }
    let (low, high) = (min_ml_delta(spec.rho), max_ml_delta(spec.rho));
    report.half_open(Condition::Delta1Range, "delta1rho", spec.delta1rho, low, high, margin);
    report.half_open(Condition::Delta2Range, "delta2rho", spec.delta2rho, low, high, margin);
    let window = arg_window_unchecked(spec.rho, spec.delta1rho, spec.delta2rho);
    report.open_interval(Condition::ArgZWindow, "arg z", spec.arg_z, window, margin);
    if spec.arg_z <= FRAC_PI_2 || spec.arg_z >= 3.0 * FRAC_PI_2 {
        report
            .notes
            .push(format!("arg z = {} lies outside (π/2, 3π/2)", spec.arg_z));
    }
    report
}

fn arg_window_unchecked(rho: f64, delta1rho: f64, delta2rho: f64) -> (f64, f64) {
    let half = FRAC_PI_2 / rho;
    (half - delta2rho + PI, -half + delta1rho + PI)
}

/// Open interval of admissible `arg z` for the ζ-loop.
pub fn ml_arg_window(rho: f64, delta1rho: f64, delta2rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.5) || !rho.is_finite() {
        return Err(Error::DeltaOutOfRange(format!(
            "delta range undefined for rho = {rho} (rho must exceed 1/2)"
        )));
    }
    let (low, high) = (min_ml_delta(rho), max_ml_delta(rho));
    for (name, d) in [("delta1rho", delta1rho), ("delta2rho", delta2rho)] {
        if !(d > low) || d > high * (1.0 + INCLUSIVE_SLACK) {
            return Err(Error::DeltaOutOfRange(format!(
                "{name} = {d} outside ({low}, {high}] for rho = {rho}"
            )));
        }
    }
    Ok(arg_window_unchecked(rho, delta1rho, delta2rho))
}

/// Both deltas at their inclusive maximum `min(π, π/ρ)`, which gives the
/// widest `arg z` window.
pub fn default_ml_deltas(rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.5) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rho must exceed 1/2, got {rho}"
        )));
    }
    let d = max_ml_delta(rho);
    Ok((d, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From infinity toward the start radius.
    Inbound,
    /// From the start radius out to infinity.
    Outbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySegment {
    pub angle: f64,
    pub start_radius: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSegment {
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
}

/// Finite piece of a ray, traversed from `from_radius` to `to_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSegment {
    pub angle: f64,
    pub from_radius: f64,
    pub to_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Ray(RaySegment),
    Arc(ArcSegment),
    Radial(RadialSegment),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Finite(PolarComplex),
    Infinite { angle: f64 },
}

impl Endpoint {
    fn matches(&self, other: &Endpoint) -> bool {
        match (self, other) {
            (Endpoint::Finite(a), Endpoint::Finite(b)) => {
                let scale = a.modulus().max(1.0);
                (a.modulus() - b.modulus()).abs() <= CONTINUITY_TOL * scale
                    && (a.argument() - b.argument()).abs() <= CONTINUITY_TOL
            }
            (Endpoint::Infinite { angle: a }, Endpoint::Infinite { angle: b }) => {
                (a - b).abs() <= CONTINUITY_TOL
            }
            _ => false,
        }
    }
}

fn finite(modulus: f64, argument: f64) -> Endpoint {
    Endpoint::Finite(PolarComplex::new(modulus, argument).expect("segment radii are positive"))
}

impl Segment {
    pub fn start(&self) -> Endpoint {
        match *self {
            Segment::Ray(r) => match r.direction {
                Direction::Inbound => Endpoint::Infinite { angle: r.angle },
                Direction::Outbound => finite(r.start_radius, r.angle),
            },
            Segment::Arc(a) => finite(a.radius, a.start_angle),
            Segment::Radial(r) => finite(r.from_radius, r.angle),
        }
    }

    pub fn end(&self) -> Endpoint {
        match *self {
            Segment::Ray(r) => match r.direction {
                Direction::Inbound => finite(r.start_radius, r.angle),
                Direction::Outbound => Endpoint::Infinite { angle: r.angle },
            },
            Segment::Arc(a) => finite(a.radius, a.end_angle),
            Segment::Radial(r) => finite(r.to_radius, r.angle),
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Ray(r) => Segment::Ray(RaySegment {
                direction: match r.direction {
                    Direction::Inbound => Direction::Outbound,
                    Direction::Outbound => Direction::Inbound,
                },
                ..r
            }),
            Segment::Arc(a) => Segment::Arc(ArcSegment {
                radius: a.radius,
                start_angle: a.end_angle,
                end_angle: a.start_angle,
            }),
            Segment::Radial(r) => Segment::Radial(RadialSegment {
                angle: r.angle,
                from_radius: r.to_radius,
                to_radius: r.from_radius,
            }),
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            Segment::Ray(r) => r.angle.is_finite() && r.start_radius > 0.0 && r.start_radius.is_finite(),
            Segment::Arc(a) => {
                a.radius > 0.0
                    && a.radius.is_finite()
                    && a.start_angle.is_finite()
                    && a.end_angle.is_finite()
            }
            Segment::Radial(r) => {
                r.angle.is_finite()
                    && r.from_radius > 0.0
                    && r.to_radius > 0.0
                    && r.from_radius.is_finite()
                    && r.to_radius.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("malformed segment {self:?}")))
        }
    }
}

/// Ordered, endpoint-continuous sequence of segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPath {
    segments: Vec<Segment>,
}

impl IntegrationPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("path has no segments".into()));
        }
        for s in &segments {
            s.check()?;
        }
        for (i, pair) in segments.windows(2).enumerate() {
            if !pair[0].end().matches(&pair[1].start()) {
                return Err(Error::InvalidParameter(format!(
                    "segments {i} and {} do not share an endpoint: {:?} vs {:?}",
                    i + 1,
                    pair[0].end(),
                    pair[1].start()
                )));
            }
        }
        Ok(Self { segments })
    }

    /// Inbound ray at `lower_angle`, counterclockwise arc, outbound ray at
    /// `upper_angle`.
    pub fn hankel_loop(radius: f64, lower_angle: f64, upper_angle: f64) -> Result<Self> {
        Self::new(vec![
            Segment::Ray(RaySegment {
                angle: lower_angle,
                start_radius: radius,
                direction: Direction::Inbound,
            }),
            Segment::Arc(ArcSegment {
                radius,
                start_angle: lower_angle,
                end_angle: upper_angle,
            }),
            Segment::Ray(RaySegment {
                angle: upper_angle,
                start_radius: radius,
                direction: Direction::Outbound,
            }),
        ])
    }

    /// Closed boundary of the annular sector `inner ≤ |t| ≤ outer`,
    /// `arg t` between `from_angle` and `to_angle`: out along `from_angle`,
    /// along the outer arc, back in along `to_angle`, and home along the
    /// inner arc.
    pub fn annular_sector(inner: f64, outer: f64, from_angle: f64, to_angle: f64) -> Result<Self> {
        Self::new(vec![
            Segment::Radial(RadialSegment {
                angle: from_angle,
                from_radius: inner,
                to_radius: outer,
            }),
            Segment::Arc(ArcSegment {
                radius: outer,
                start_angle: from_angle,
                end_angle: to_angle,
            }),
            Segment::Radial(RadialSegment {
                angle: to_angle,
                from_radius: outer,
                to_radius: inner,
            }),
            Segment::Arc(ArcSegment {
                radius: inner,
                start_angle: to_angle,
                end_angle: from_angle,
            }),
        ])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Same path traversed backwards.
    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    pub fn is_closed(&self) -> bool {
        let first = self.segments[0].start();
        let last = self.segments[self.segments.len() - 1].end();
        matches!(first, Endpoint::Finite(_)) && first.matches(&last)
    }
}

pub fn build_gamma_path(spec: &GammaContourSpec) -> Result<IntegrationPath> {
    validate_gamma_contour(spec).into_result()?;
    IntegrationPath::hankel_loop(
        spec.epsilon,
        -spec.delta1 + spec.psi,
        spec.delta2 + spec.psi,
    )
}

/// Image of the rotated Hankel loop under `τ = t/λ`.
pub fn build_lambda_path(lam: &LambdaSpec, spec: &GammaContourSpec) -> Result<IntegrationPath> {
    validate_lambda_contour(lam, spec).into_result()?;
    IntegrationPath::hankel_loop(
        spec.epsilon / lam.lambda.modulus(),
        -spec.delta1 + lam.psi_lambda,
        spec.delta2 + lam.psi_lambda,
    )
}

pub fn build_zeta_path(spec: &MLContourSpec) -> Result<IntegrationPath> {
    validate_ml_contour(spec).into_result()?;
    IntegrationPath::hankel_loop(spec.radius(), -spec.delta1rho - PI, spec.delta2rho - PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_gamma_contour_is_ok() {
        let report = validate_gamma_contour(&GammaContourSpec::classical());
        assert!(report.ok, "{report}");
    }

    #[test]
    fn psi_on_lower_boundary_rejected() {
        let spec = GammaContourSpec::new(1.0, FRAC_PI_2 - PI, PI, PI);
        let report = validate_gamma_contour(&spec);
        assert!(!report.ok);
        assert!(report.violates(Condition::PsiWindow));
        assert!(report.violations[0].message.contains("psi at lower boundary"));
    }

    #[test]
    fn psi_on_upper_boundary_rejected() {
        let spec = GammaContourSpec::new(1.0, -FRAC_PI_2 + 0.8 * PI, 0.8 * PI, PI);
        let report = validate_gamma_contour(&spec);
        assert!(report.violates(Condition::PsiWindow));
        assert!(report.violations[0].message.contains("upper boundary"));
    }

    #[test]
    fn delta1_at_half_pi_rejected() {
        let spec = GammaContourSpec::new(1.0, 0.0, FRAC_PI_2, PI);
        let report = validate_gamma_contour(&spec);
        assert!(report.violates(Condition::Delta1Range));
        assert!(report.violations[0].message.contains("delta1 ≤"));
    }

    #[test]
    fn margin_rejects_near_boundary() {
        let (low, _) = gamma_psi_window(PI, PI);
        let spec = GammaContourSpec::new(1.0, low + 1e-10, PI, PI);
        assert!(!validate_gamma_contour(&spec).ok);
        assert!(validate_gamma_contour_with_margin(&spec, 0.0).ok);
    }

    #[test]
    fn non_finite_and_epsilon() {
        let spec = GammaContourSpec::new(f64::NAN, 0.0, PI, PI);
        assert!(validate_gamma_contour(&spec).violates(Condition::NonFinite));
        let spec = GammaContourSpec::new(0.0, 0.0, PI, PI);
        assert!(validate_gamma_contour(&spec).violates(Condition::EpsilonPositive));
    }

    #[test]
    fn ml_contour_examples() {
        assert!(validate_ml_contour(&MLContourSpec::new(1.0, 1.0, PI, PI, PI)).ok);
        assert!(validate_ml_contour(&MLContourSpec::new(2.0, 1.0, PI, FRAC_PI_2, FRAC_PI_2)).ok);
        let report = validate_ml_contour(&MLContourSpec::new(0.5, 1.0, PI, PI, PI));
        assert!(report.violates(Condition::RhoAboveHalf));
        assert!(report.violations[0].message.contains("rho must exceed 1/2"));
    }

    #[test]
    fn ml_window_endpoints_rejected() {
        let (low, high) = ml_arg_window(2.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        for arg in [low, high] {
            let spec = MLContourSpec::new(2.0, 1.0, arg, FRAC_PI_2, FRAC_PI_2);
            assert!(validate_ml_contour(&spec).violates(Condition::ArgZWindow));
        }
    }

    #[test]
    fn ml_delta_above_maximum_rejected() {
        let spec = MLContourSpec::new(2.0, 1.0, PI, PI, FRAC_PI_2);
        assert!(validate_ml_contour(&spec).violates(Condition::Delta1Range));
    }

    #[test]
    fn arg_window_examples() {
        let (l, h) = ml_arg_window(1.0, PI, PI).unwrap();
        assert!((l - FRAC_PI_2).abs() < 1e-15 && (h - 1.5 * PI).abs() < 1e-15);
        let (l, h) = ml_arg_window(2.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((l - 0.75 * PI).abs() < 1e-15 && (h - 1.25 * PI).abs() < 1e-15);
        // π/(2·0.75) = 2π/3
        let (l, h) = ml_arg_window(0.75, PI, PI).unwrap();
        assert!((l - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((h - (2.0 * PI - 2.0 * PI / 3.0)).abs() < 1e-15);
        assert!((l - 2.0943951023931953).abs() < 1e-15);
        assert!((h - 4.1887902047863905).abs() < 1e-15);
    }

    #[test]
    fn arg_window_rejects_bad_deltas() {
        assert!(matches!(
            ml_arg_window(2.0, PI, FRAC_PI_2),
            Err(Error::DeltaOutOfRange(_))
        ));
        assert!(ml_arg_window(0.5, PI, PI).is_err());
        assert!(ml_arg_window(1.0, FRAC_PI_2, PI).is_err());
    }

    #[test]
    fn default_deltas() {
        assert_eq!(default_ml_deltas(1.0).unwrap(), (PI, PI));
        assert_eq!(default_ml_deltas(2.0).unwrap(), (FRAC_PI_2, FRAC_PI_2));
        assert_eq!(default_ml_deltas(0.6).unwrap(), (PI, PI));
        assert!(default_ml_deltas(0.5).is_err());
    }

    fn ray(seg: &Segment) -> RaySegment {
        match seg {
            Segment::Ray(r) => *r,
            other => panic!("expected ray, got {other:?}"),
        }
    }

    fn arc(seg: &Segment) -> ArcSegment {
        match seg {
            Segment::Arc(a) => *a,
            other => panic!("expected arc, got {other:?}"),
        }
    }

    #[test]
    fn classical_gamma_path() {
        let path = build_gamma_path(&GammaContourSpec::classical()).unwrap();
        let s = path.segments();
        assert_eq!(s.len(), 3);
        assert_eq!(ray(&s[0]).angle, -PI);
        assert_eq!(ray(&s[0]).direction, Direction::Inbound);
        assert_eq!(arc(&s[1]).start_angle, -PI);
        assert_eq!(arc(&s[1]).end_angle, PI);
        assert_eq!(ray(&s[2]).angle, PI);
        assert_eq!(ray(&s[2]).direction, Direction::Outbound);
    }

    #[test]
    fn rotated_gamma_path() {
        let path = build_gamma_path(&GammaContourSpec::new(2.0, 0.3, 2.0, 2.5)).unwrap();
        let s = path.segments();
        assert!((ray(&s[0]).angle + 1.7).abs() < 1e-15);
        assert!((ray(&s[2]).angle - 2.8).abs() < 1e-15);
        let a = arc(&s[1]);
        assert_eq!(a.radius, 2.0);
        assert!((a.start_angle + 1.7).abs() < 1e-15 && (a.end_angle - 2.8).abs() < 1e-15);
    }

    #[test]
    fn invalid_spec_carries_report() {
        let err = build_gamma_path(&GammaContourSpec::new(1.0, 2.0, PI, PI)).unwrap_err();
        match err {
            Error::InvalidContour(report) => assert!(report.violates(Condition::PsiWindow)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zeta_paths() {
        let path = build_zeta_path(&MLContourSpec::new(1.0, 1.0, PI, PI, PI)).unwrap();
        let s = path.segments();
        assert!((ray(&s[0]).angle + 2.0 * PI).abs() < 1e-15);
        assert!(ray(&s[2]).angle.abs() < 1e-15);
        assert_eq!(arc(&s[1]).radius, 2.0);

        let path =
            build_zeta_path(&MLContourSpec::new(2.0, 0.5, PI, FRAC_PI_2, FRAC_PI_2)).unwrap();
        let s = path.segments();
        assert!((ray(&s[0]).angle + 1.5 * PI).abs() < 1e-15);
        assert!((ray(&s[2]).angle + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(arc(&s[1]).radius, 1.5);
    }

    #[test]
    fn lambda_path_scales_and_shifts() {
        let lam = LambdaSpec::centered(PolarComplex::new(2.0, 0.4).unwrap(), PI, PI);
        assert!((lam.psi_lambda + 0.4).abs() < 1e-15);
        let path = build_lambda_path(&lam, &GammaContourSpec::classical()).unwrap();
        let a = arc(&path.segments()[1]);
        assert_eq!(a.radius, 0.5);
        assert!((a.start_angle - (-PI - 0.4)).abs() < 1e-15);
        let bad = LambdaSpec::new(PolarComplex::new(1.0, 0.4).unwrap(), 0.0 + FRAC_PI_2);
        assert!(build_lambda_path(&bad, &GammaContourSpec::classical()).is_err());
    }

    #[test]
    fn discontinuous_path_rejected() {
        let segs = vec![
            Segment::Arc(ArcSegment {
                radius: 1.0,
                start_angle: 0.0,
                end_angle: 1.0,
            }),
            Segment::Arc(ArcSegment {
                radius: 1.0,
                start_angle: 1.0 + 1e-9,
                end_angle: 2.0,
            }),
        ];
        assert!(IntegrationPath::new(segs).is_err());
    }

    #[test]
    fn annular_sector_is_closed() {
        let path = IntegrationPath::annular_sector(0.5, 10.0, 2.5, PI).unwrap();
        assert!(path.is_closed());
        assert!(!build_gamma_path(&GammaContourSpec::classical()).unwrap().is_closed());
        assert!(path.reversed().is_closed());
    }
}
