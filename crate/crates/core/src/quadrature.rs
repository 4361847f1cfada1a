//! Composite Gauss-Legendre quadrature along rays, arcs and radial segments.
//!
//! Each segment is split into panels carrying a fixed 15-point rule. The
//! panel set is refined by bisecting every panel, and the difference between
//! two successive levels is the error estimate. Infinite rays are cut at a
//! radius where an analytic bound on the integrand ([`DecayModel`]) makes the
//! discarded tail negligible; ray panels are graded geometrically (ratio 2)
//! toward the ray start, where contour integrands are largest.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{ArcSegment, Direction, IntegrationPath, RadialSegment, RaySegment, Segment};
use crate::error::{Error, Result};
use crate::polar::PolarComplex;

const RULE_ORDER: usize = 15;

/// Successive-level differences below this multiple of `ε_mach · ∫|f|` are
/// floating-point noise; refining further cannot reduce them.
const ROUNDOFF_FACTOR: f64 = 100.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: u32,
    pub initial_panels_per_segment: usize,
    pub tail_safety_factor: f64,
    /// Hard cap on panels per segment; refinement stops before exceeding it.
    pub max_panels_per_segment: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_refinements: 30,
            initial_panels_per_segment: 8,
            tail_safety_factor: 10.0,
            max_panels_per_segment: 1 << 17,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_refinements >= 1
            && self.initial_panels_per_segment >= 1
            && self.tail_safety_factor >= 1.0
            && self.max_panels_per_segment >= self.initial_panels_per_segment;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad quadrature config {self:?}")))
        }
    }

    fn tolerance(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Envelope `|f(r e^{iθ})| ≤ A·exp(-c·r^p)` valid beyond the ray start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub amplitude_bound: f64,
    pub rate: f64,
    pub exponent: f64,
}

impl DecayModel {
    pub fn new(amplitude_bound: f64, rate: f64, exponent: f64) -> Self {
        Self {
            amplitude_bound,
            rate,
            exponent,
        }
    }

    /// Envelope for integrands bounded by `K·r^m·exp(-c·r^p)` on `r ≥ r0`.
    ///
    /// Half of the rate absorbs the power factor:
    /// `K r^m e^{-c r^p} ≤ (K sup_{r≥r0} r^m e^{-c r^p/2}) e^{-c r^p/2}`.
    /// The amplitude carries an extra safety factor of 2.
    pub fn dominating(prefactor: f64, power: f64, rate: f64, exponent: f64, start: f64) -> Self {
        let half = 0.5 * rate;
        let peak = if power > 0.0 && half > 0.0 {
            (power / (half * exponent)).powf(1.0 / exponent).max(start)
        } else {
            start
        };
        let log_sup = power * peak.ln() - half * peak.powf(exponent);
        let amplitude = 2.0 * prefactor * log_sup.exp();
        Self::new(amplitude, half, exponent)
    }

    fn check(&self, angle: f64) -> Result<()> {
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::NoDecay { angle });
        }
        if !(self.exponent > 0.0)
            || !self.exponent.is_finite()
            || !(self.amplitude_bound >= 0.0)
            || !self.amplitude_bound.is_finite()
        {
            return Err(Error::InvalidParameter(format!("bad decay model {self:?}")));
        }
        Ok(())
    }

    /// Upper bound on `∫_R^∞ A e^{-c r^p} dr`.
    ///
    /// For `p ≥ 1` this is `A e^{-cR^p} / (c p R^{p-1})`; for `p < 1` the same
    /// expression is divided by `1 - (1/p - 1)/(cR^p)` and is infinite until
    /// that factor is at least 1/2.
    pub fn tail_bound(&self, radius: f64) -> f64 {
        let DecayModel {
            amplitude_bound: a,
            rate: c,
            exponent: p,
        } = *self;
        if a == 0.0 {
            return 0.0;
        }
        let x = c * radius.powf(p);
        let mut bound = a * (-x).exp() * radius.powf(1.0 - p) / (c * p);
        if p < 1.0 {
            let shortfall = (1.0 / p - 1.0) / x;
            if shortfall > 0.5 {
                return f64::INFINITY;
            }
            bound /= 1.0 - shortfall;
        }
        bound
    }

    /// Smallest radius `≥ start` whose tail bound drops below `target`.
    pub fn truncation_radius(&self, start: f64, target: f64) -> Result<f64> {
        if self.tail_bound(start) < target {
            return Ok(start);
        }
        let mut high = start.max(1e-3) * 2.0;
        while !(self.tail_bound(high) < target) {
            high *= 2.0;
            if !high.is_finite() || high > 1e200 {
                return Err(Error::InvalidParameter(format!(
                    "tail bound of {self:?} never drops below {target}"
                )));
            }
        }
        let mut low = (0.5 * high).max(start);
        for _ in 0..200 {
            let mid = 0.5 * (low + high);
            if self.tail_bound(mid) < target {
                high = mid;
            } else {
                low = mid;
            }
            if high - low <= 1e-12 * high {
                break;
            }
        }
        Ok(high)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Where infinite rays were cut (largest over the rays of a path); 0 when
    /// no ray is involved.
    pub truncation_radius: f64,
    pub panels_used: usize,
    pub converged: bool,
    /// Refinement stalled at the floating-point noise floor before reaching
    /// the tolerance; the value is as good as double precision allows here.
    pub roundoff_limited: bool,
    /// Quadrature of `|f|·|dt|`, the scale of rounding errors.
    pub abs_integral: f64,
}

impl QuadratureResult {
    fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            truncation_radius: 0.0,
            panels_used: 0,
            converged: true,
            roundoff_limited: false,
            abs_integral: 0.0,
        }
    }

    /// Converged, or stalled at the rounding floor with the leading two
    /// digits intact.
    pub fn usable(&self) -> bool {
        self.converged || (self.roundoff_limited && self.error_estimate < 0.01 * self.value.norm())
    }

    /// `log10(∫|f| / |∫f|)`, the digits lost to cancellation.
    pub fn cancellation_digits(&self) -> f64 {
        if self.abs_integral == 0.0 {
            return 0.0;
        }
        (self.abs_integral / self.value.norm()).log10().max(0.0)
    }

    fn negated(mut self) -> Self {
        self.value = -self.value;
        self
    }

    fn scaled(mut self, factor: Complex64) -> Self {
        self.value *= factor;
        self.error_estimate *= factor.norm();
        self.abs_integral *= factor.norm();
        self
    }
}

struct Rule {
    nodes: [f64; RULE_ORDER],
    weights: [f64; RULE_ORDER],
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = RULE_ORDER;
        let mut nodes = [0.0; RULE_ORDER];
        let mut weights = [0.0; RULE_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

struct Level {
    value: Complex64,
    abs: f64,
}

fn apply_rule<G>(g: &G, panels: &[(f64, f64)], what: &str) -> Result<Level>
where
    G: Fn(f64) -> Complex64,
{
    let rule = rule();
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for &(a, b) in panels {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut panel = Complex64::new(0.0, 0.0);
        let mut panel_abs = 0.0;
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let u = mid + half * x;
            let fx = g(u);
            if !(fx.re.is_finite() && fx.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand {
                    location: format!("{what}, parameter {u}"),
                });
            }
            panel += fx * *w;
            panel_abs += fx.norm() * w;
        }
        value += panel * half;
        abs += panel_abs * half.abs();
    }
    Ok(Level { value, abs })
}

fn bisect(panels: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels.len() * 2);
    for &(a, b) in panels {
        let m = 0.5 * (a + b);
        out.push((a, m));
        out.push((m, b));
    }
    out
}

/// Refines `panels` until two successive levels agree. `tail` is an
/// additional, already-known error contribution (ray truncation).
fn refine<G>(
    g: G,
    mut panels: Vec<(f64, f64)>,
    cfg: &QuadratureConfig,
    tail: f64,
    what: &str,
) -> Result<QuadratureResult>
where
    G: Fn(f64) -> Complex64,
{
    let mut previous = apply_rule(&g, &panels, what)?;
    let mut result = QuadratureResult {
        value: previous.value,
        error_estimate: f64::INFINITY,
        truncation_radius: 0.0,
        panels_used: panels.len(),
        converged: false,
        roundoff_limited: false,
        abs_integral: previous.abs,
    };
    for _ in 0..cfg.max_refinements {
        if panels.len() * 2 > cfg.max_panels_per_segment {
            break;
        }
        panels = bisect(&panels);
        let current = apply_rule(&g, &panels, what)?;
        let diff = (current.value - previous.value).norm();
        result.value = current.value;
        result.abs_integral = current.abs;
        result.panels_used = panels.len();
        result.error_estimate = diff + tail;
        if result.error_estimate <= cfg.tolerance(current.value) {
            result.converged = true;
            return Ok(result);
        }
        if diff <= ROUNDOFF_FACTOR * current.abs {
            result.roundoff_limited = true;
            return Ok(result);
        }
        previous = current;
    }
    Ok(result)
}

fn uniform_panels(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let width = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == n { b } else { a + width * (k + 1) as f64 };
            (lo, hi)
        })
        .collect()
}

/// Panels on `[start, start + length]` whose widths double outward; the first
/// is at most half the start radius.
fn graded_panels(start: f64, length: f64, min_panels: usize) -> Vec<(f64, f64)> {
    let min_panels = min_panels.max(1);
    let coarse = length / ((2f64).powi(min_panels as i32) - 1.0);
    let first = coarse.min(0.5 * start);
    let n = ((length / first + 1.0).log2().ceil() as usize).max(min_panels);
    let width = length / ((2f64).powi(n as i32) - 1.0);
    let end = start + length;
    (0..n)
        .map(|k| {
            let lo = start + width * ((2f64).powi(k as i32) - 1.0);
            let hi = if k + 1 == n {
                end
            } else {
                start + width * ((2f64).powi(k as i32 + 1) - 1.0)
            };
            (lo, hi)
        })
        .collect()
}

/// `∫ f(ζ) dζ` over an arc, `dζ = i·R·e^{iφ} dφ`.
pub fn integrate_arc<F>(f: &F, arc: &ArcSegment, cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(PolarComplex) -> Complex64,
{
    cfg.validate()?;
    if !(arc.radius > 0.0) {
        return Err(Error::InvalidParameter(format!("arc radius {} not positive", arc.radius)));
    }
    if arc.start_angle == arc.end_angle {
        return Ok(QuadratureResult::zero());
    }
    let radius = arc.radius;
    let g = |phi: f64| {
        let point = PolarComplex::unit(phi).scaled(radius);
        f(point) * Complex64::new(0.0, radius) * Complex64::from_polar(1.0, phi)
    };
    let panels = uniform_panels(arc.start_angle, arc.end_angle, cfg.initial_panels_per_segment);
    refine(g, panels, cfg, 0.0, &format!("arc radius {radius}"))
}

/// `∫ f(t) dt` along an infinite ray, truncated where `decay` certifies the
/// tail is below `abs_tol / tail_safety_factor`.
pub fn integrate_ray<F>(
    f: &F,
    ray: &RaySegment,
    decay: &DecayModel,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult>
where
    F: Fn(PolarComplex) -> Complex64,
{
    cfg.validate()?;
    decay.check(ray.angle)?;
    if !(ray.start_radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ray start radius {} not positive",
            ray.start_radius
        )));
    }
    let target = cfg.abs_tol / cfg.tail_safety_factor;
    let cut = decay.truncation_radius(ray.start_radius, target)?;
    let tail = decay.tail_bound(cut);
    let length = cut - ray.start_radius;
    let mut result = if length > 0.0 {
        let direction = Complex64::from_polar(1.0, ray.angle);
        let angle = ray.angle;
        let g = |r: f64| f(PolarComplex::unit(angle).scaled(r)) * direction;
        let panels = graded_panels(ray.start_radius, length, cfg.initial_panels_per_segment);
        refine(g, panels, cfg, tail, &format!("ray at angle {angle}"))?
    } else {
        let mut r = QuadratureResult::zero();
        r.error_estimate = tail;
        r
    };
    result.truncation_radius = cut;
    Ok(match ray.direction {
        Direction::Outbound => result,
        Direction::Inbound => result.negated(),
    })
}

/// Finite radial segment, oriented from `from_radius` to `to_radius`.
pub fn integrate_radial<F>(
    f: &F,
    seg: &RadialSegment,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult>
where
    F: Fn(PolarComplex) -> Complex64,
{
    cfg.validate()?;
    if seg.from_radius == seg.to_radius {
        return Ok(QuadratureResult::zero());
    }
    let direction = Complex64::from_polar(1.0, seg.angle);
    let angle = seg.angle;
    let g = |r: f64| f(PolarComplex::unit(angle).scaled(r)) * direction;
    let panels = uniform_panels(seg.from_radius, seg.to_radius, cfg.initial_panels_per_segment);
    refine(g, panels, cfg, 0.0, &format!("radial segment at angle {angle}"))
}

/// Error floor per unit of `∫|f|`, in units of machine epsilon.
const ROUNDOFF_FLOOR: f64 = 8.0;

/// Sum of the segment integrals, in segment order. `decay` supplies the
/// envelope for each infinite ray.
pub fn integrate_path<F, D>(
    f: &F,
    path: &IntegrationPath,
    decay: D,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult>
where
    F: Fn(PolarComplex) -> Complex64,
    D: Fn(&RaySegment) -> Result<DecayModel>,
{
    let mut total = QuadratureResult::zero();
    for segment in path.segments() {
        let part = match segment {
            Segment::Ray(ray) => integrate_ray(f, ray, &decay(ray)?, cfg)?,
            Segment::Arc(arc) => integrate_arc(f, arc, cfg)?,
            Segment::Radial(seg) => integrate_radial(f, seg, cfg)?,
        };
        total.value += part.value;
        total.error_estimate += part.error_estimate;
        total.truncation_radius = total.truncation_radius.max(part.truncation_radius);
        total.panels_used += part.panels_used;
        total.converged &= part.converged;
        total.roundoff_limited |= part.roundoff_limited;
        total.abs_integral += part.abs_integral;
    }
    if total.converged {
        total.roundoff_limited = false;
    }
    // rounding in f and in the panel sums, which refinement differences miss
    total.error_estimate = total.error_estimate.max(ROUNDOFF_FLOOR * f64::EPSILON * total.abs_integral);
    Ok(total)
}

/// Multiplies value and error scales by a constant prefactor.
pub(crate) fn scale_result(result: QuadratureResult, factor: Complex64) -> QuadratureResult {
    result.scaled(factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_rule_is_exact_to_degree_29() {
        let r = rule();
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for degree in [2, 10, 28] {
            let q: f64 = r
                .nodes
                .iter()
                .zip(r.weights.iter())
                .map(|(x, w)| w * x.powi(degree))
                .sum();
            let exact = 2.0 / (degree as f64 + 1.0);
            assert!((q - exact).abs() < 1e-14, "degree {degree}: {q} vs {exact}");
        }
    }

    #[test]
    fn full_circle_of_reciprocal() {
        let arc = ArcSegment {
            radius: 1.0,
            start_angle: -PI,
            end_angle: PI,
        };
        let r = integrate_arc(&|w: PolarComplex| 1.0 / w.to_cartesian(), &arc, &Default::default())
            .unwrap();
        assert!((r.value - c(0.0, 2.0 * PI)).norm() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn quarter_arc_of_constant() {
        let arc = ArcSegment {
            radius: 2.0,
            start_angle: 0.0,
            end_angle: PI / 2.0,
        };
        let r = integrate_arc(&|_| c(1.0, 0.0), &arc, &Default::default()).unwrap();
        assert!((r.value - c(-2.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn exponential_around_closed_circle_vanishes() {
        let arc = ArcSegment {
            radius: 1.0,
            start_angle: -PI,
            end_angle: PI,
        };
        let r = integrate_arc(&|w: PolarComplex| w.to_cartesian().exp(), &arc, &Default::default())
            .unwrap();
        assert!(r.value.norm() < 1e-13);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let arc = ArcSegment {
            radius: 1.0,
            start_angle: 0.0,
            end_angle: 1.0,
        };
        let err = integrate_arc(&|_| c(f64::NAN, 0.0), &arc, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
        assert!(err.to_string().contains("integrand not finite"));
    }

    fn real_ray(start: f64, direction: Direction) -> RaySegment {
        RaySegment {
            angle: 0.0,
            start_radius: start,
            direction,
        }
    }

    #[test]
    fn exponential_ray() {
        let f = |w: PolarComplex| (-w.to_cartesian()).exp();
        let decay = DecayModel::new(1.0, 1.0, 1.0);
        let r = integrate_ray(&f, &real_ray(0.001, Direction::Outbound), &decay, &Default::default())
            .unwrap();
        let exact = (-0.001f64).exp();
        assert!(((r.value.re - exact) / exact).abs() < 1e-10);
        assert!(r.value.im.abs() < 1e-15);
        assert!(r.truncation_radius > 30.0);
    }

    #[test]
    fn gaussian_ray_both_directions() {
        let f = |w: PolarComplex| {
            let t = w.to_cartesian();
            (-t * t).exp()
        };
        let decay = DecayModel::new(1.0, 1.0, 2.0);
        // ∫_0.01^∞ e^{-t²} dt = √π/2 - (0.01 - 0.01³/3 + 0.01⁵/10)
        let exact = 0.886_226_925_452_758 - (0.01 - 1e-6 / 3.0 + 1e-10 / 10.0);
        let out = integrate_ray(&f, &real_ray(0.01, Direction::Outbound), &decay, &Default::default())
            .unwrap();
        assert!((out.value.re - exact).abs() < 1e-10, "{}", out.value);
        let inb = integrate_ray(&f, &real_ray(0.01, Direction::Inbound), &decay, &Default::default())
            .unwrap();
        assert!((inb.value.re + exact).abs() < 1e-10);
    }

    #[test]
    fn zero_rate_is_no_decay() {
        let err = integrate_ray(
            &|_| c(1.0, 0.0),
            &real_ray(1.0, Direction::Outbound),
            &DecayModel::new(1.0, 0.0, 1.0),
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoDecay { .. }));
        assert!(err.to_string().contains("no decay on ray"));
    }

    #[test]
    fn tail_bound_is_an_upper_bound() {
        // ∫_R^∞ e^{-r} dr = e^{-R}; ∫_R^∞ e^{-r^2} dr ≤ e^{-R^2}/(2R)
        let exp = DecayModel::new(1.0, 1.0, 1.0);
        assert!((exp.tail_bound(3.0) - (-3.0f64).exp()).abs() < 1e-15);
        // p < 1: compare against a brute-force tail integral
        let slow = DecayModel::new(1.0, 2.0, 0.5);
        let radius = 100.0;
        let bound = slow.tail_bound(radius);
        let mut brute = 0.0;
        let h = 0.05;
        let mut r = radius;
        while r < 5000.0 {
            let m = r + 0.5 * h;
            brute += (-2.0 * m.sqrt()).exp() * h;
            r += h;
        }
        assert!(brute <= bound && bound < 2.0 * brute, "{brute} vs {bound}");
    }

    #[test]
    fn truncation_radius_meets_target() {
        let model = DecayModel::new(5.0, 0.3, 1.5);
        let target = 1e-15;
        let r = model.truncation_radius(0.5, target).unwrap();
        assert!(model.tail_bound(r) < target);
        assert!(model.tail_bound(r * (1.0 - 1e-9)) >= target * 0.999);
    }

    #[test]
    fn dominating_envelope_bounds_power_factor() {
        // r^3 e^{-r} on r >= 0.5
        let d = DecayModel::dominating(1.0, 3.0, 1.0, 1.0, 0.5);
        for k in 0..400 {
            let r = 0.5 + 0.25 * k as f64;
            let exact = r.powi(3) * (-r).exp();
            assert!(exact <= d.amplitude_bound * (-d.rate * r).exp() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn cauchy_closed_sector_is_null() {
        let s = c(0.7, 0.0);
        let f = move |t: PolarComplex| t.to_cartesian().exp() * t.powc(s - 1.0);
        let path = IntegrationPath::annular_sector(0.5, 10.0, 2.5, PI).unwrap();
        let r = integrate_path(&f, &path, |_| unreachable!(), &Default::default()).unwrap();
        assert!(r.value.norm() < 1e-8, "{}", r.value);
    }

    #[test]
    fn hankel_loop_of_exp_over_t() {
        // 1/Γ(1) = 1, so the loop integral is 2πi
        let f = |t: PolarComplex| t.to_cartesian().exp() / t.to_cartesian();
        let path = IntegrationPath::hankel_loop(1.0, -PI, PI).unwrap();
        let decay = |ray: &RaySegment| {
            Ok(DecayModel::dominating(1.0, -1.0, -ray.angle.cos(), 1.0, ray.start_radius))
        };
        let r = integrate_path(&f, &path, decay, &Default::default()).unwrap();
        assert!((r.value - c(0.0, 2.0 * PI)).norm() < 1e-10, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn degenerate_full_circle_path() {
        let path = IntegrationPath::new(vec![Segment::Arc(ArcSegment {
            radius: 0.7,
            start_angle: -PI,
            end_angle: PI,
        })])
        .unwrap();
        let r = integrate_path(&|w: PolarComplex| 1.0 / w.to_cartesian(), &path, |_| unreachable!(), &Default::default())
            .unwrap();
        assert!((r.value - c(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn refinement_error_shrinks() {
        let arc = ArcSegment {
            radius: 3.0,
            start_angle: -PI,
            end_angle: 2.0,
        };
        let f = |w: PolarComplex| (2.0 * w.to_cartesian()).exp();
        let cfg = |levels| QuadratureConfig {
            rel_tol: 1e-300,
            abs_tol: 1e-300,
            max_refinements: levels,
            initial_panels_per_segment: 1,
            ..Default::default()
        };
        let e1 = integrate_arc(&f, &arc, &cfg(1)).unwrap().error_estimate;
        let e2 = integrate_arc(&f, &arc, &cfg(2)).unwrap().error_estimate;
        assert!(e2 <= e1, "{e2} > {e1}");
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            tail_safety_factor: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = graded_panels(1.0, 1000.0, 8);
        assert_eq!(p[0].0, 1.0);
        assert_eq!(p.last().unwrap().1, 1001.0);
        assert!(p[0].1 - p[0].0 <= 0.5 + 1e-12);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
            let ratio = (w[1].1 - w[1].0) / (w[0].1 - w[0].0);
            assert!((ratio - 2.0).abs() < 1e-6);
        }
    }
}
