//! The acceptance suite behind `mlc selftest` and the `acceptance` test
//! target. Each criterion reports PASS or FAIL with the measured figure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::contour::{
    default_ml_deltas, gamma_psi_window, ml_arg_window, validate_gamma_contour,
    validate_ml_contour, Condition, GammaContourSpec, IntegrationPath, LambdaSpec, MLContourSpec,
};
use crate::gamma::{gamma_oracle, recip_gamma_contour, recip_gamma_lambda, reflection_residual};
use crate::ml::{
    default_bateman_epsilon, default_dzhrbashyan_epsilon, default_dzhrbashyan_theta,
    default_ml_spec, ml_bateman, ml_contour, ml_dzhrbashyan, ml_series, MLParams, SeriesConfig,
};
use crate::polar::PolarComplex;
use crate::quadrature::{integrate_path, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Gamma,
    Ml,
    Quadrature,
    Validation,
    Cli,
}

impl Group {
    pub fn name(&self) -> &'static str {
        match self {
            Group::Gamma => "gamma",
            Group::Ml => "ml",
            Group::Quadrature => "quadrature",
            Group::Validation => "validation",
            Group::Cli => "cli",
        }
    }

    fn parse(s: &str) -> Option<Group> {
        [Group::Gamma, Group::Ml, Group::Quadrature, Group::Validation, Group::Cli]
            .into_iter()
            .find(|g| g.name() == s)
    }
}

struct Criterion {
    id: u32,
    group: Group,
    title: &'static str,
    check: fn() -> (bool, String),
}

const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, group: Group::Gamma, title: "Hankel loop vs oracle on the s grid", check: gamma_grid },
    Criterion { id: 2, group: Group::Gamma, title: "invariance in psi, epsilon and deltas", check: gamma_invariance },
    Criterion { id: 3, group: Group::Gamma, title: "invariance of the lambda form in arg lambda", check: lambda_invariance },
    Criterion { id: 4, group: Group::Gamma, title: "zeros at the poles of gamma", check: pole_zeros },
    Criterion { id: 5, group: Group::Gamma, title: "reflection residual", check: reflection },
    Criterion { id: 6, group: Group::Ml, title: "zeta loop vs series", check: zeta_vs_series },
    Criterion { id: 7, group: Group::Ml, title: "closed forms through the zeta loop", check: closed_forms },
    Criterion { id: 8, group: Group::Ml, title: "Bateman, Dzhrbashyan and zeta loop agree", check: representations },
    Criterion { id: 9, group: Group::Quadrature, title: "closed sector integral vanishes", check: cauchy_nullity },
    Criterion { id: 10, group: Group::Validation, title: "strict boundaries rejected", check: strict_boundaries },
    Criterion { id: 11, group: Group::Cli, title: "grid output deterministic with 8 threads", check: determinism },
];

/// Criteria to run: all when empty.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    groups: Vec<Group>,
    ids: Vec<u32>,
}

impl Selection {
    pub fn all() -> Self {
        Self::default()
    }

    /// Group names or criterion numbers.
    pub fn parse(items: &[String]) -> Result<Self, String> {
        let mut sel = Self::default();
        for item in items {
            let item = item.trim();
            if let Some(g) = Group::parse(item) {
                sel.groups.push(g);
            } else if let Ok(id) = item.parse::<u32>() {
                if !(1..=CRITERIA.len() as u32).contains(&id) {
                    return Err(format!("no criterion {id}"));
                }
                sel.ids.push(id);
            } else {
                return Err(format!(
                    "unknown selection `{item}` (groups: gamma, ml, quadrature, validation, cli)"
                ));
            }
        }
        Ok(sel)
    }

    fn includes(&self, c: &Criterion) -> bool {
        (self.groups.is_empty() && self.ids.is_empty())
            || self.groups.contains(&c.group)
            || self.ids.contains(&c.id)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub group: Group,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub results: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} [{}] {}: {}: {} ({:.2} s)",
            self.id,
            self.group.name(),
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        writeln!(f, "{passed}/{} criteria passed", self.results.len())
    }
}

pub fn run_criterion(id: u32) -> Option<CriterionResult> {
    CRITERIA.iter().find(|c| c.id == id).map(run_one)
}

fn run_one(c: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = (c.check)();
    CriterionResult {
        id: c.id,
        group: c.group,
        title: c.title.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_suite(selection: &Selection) -> SuiteReport {
    SuiteReport {
        results: CRITERIA.iter().filter(|c| selection.includes(c)).map(run_one).collect(),
    }
}

/// Maximum pairwise distance divided by the largest modulus; plain distance
/// when every value is below 1e-3 in modulus.
pub fn spread(values: &[Complex64]) -> f64 {
    let mut diff: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            diff = diff.max((a - b).norm());
        }
    }
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale < 1e-3 {
        diff
    } else {
        diff / scale
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// `a + bi`, `a ∈ {−3.5, …, 4.5}`, `b ∈ {−3, 0, 3}`.
pub fn gamma_grid_points() -> Vec<Complex64> {
    let mut pts = Vec::new();
    for i in 0..9 {
        for b in [-3.0, 0.0, 3.0] {
            pts.push(c(-3.5 + i as f64, b));
        }
    }
    pts
}

fn gamma_grid() -> (bool, String) {
    let start = Instant::now();
    let spec = GammaContourSpec::default();
    let cfg = QuadratureConfig::default();
    let (mut worst_rel, mut worst_abs, mut ok) = (0.0f64, 0.0f64, true);
    let points = gamma_grid_points();
    for &s in &points {
        let oracle = gamma_oracle(s);
        match recip_gamma_contour(s, &spec, &cfg) {
            Ok(e) if e.usable() => {
                if oracle.norm() < 1e-3 {
                    let d = (e.value - oracle).norm();
                    worst_abs = worst_abs.max(d);
                    ok &= d < 1e-9;
                } else {
                    let r = rel(e.value, oracle);
                    worst_rel = worst_rel.max(r);
                    ok &= r < 1e-8;
                }
            }
            _ => ok = false,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    (
        ok,
        format!(
            "{} points, max rel err {worst_rel:.2e} (< 1e-8), max abs err near zeros {worst_abs:.2e} (< 1e-9), {secs:.2} s (< 10 s)",
            points.len()
        ),
    )
}

fn gamma_values(s: Complex64, specs: &[GammaContourSpec]) -> Option<Vec<Complex64>> {
    let cfg = QuadratureConfig::default();
    specs
        .iter()
        .map(|spec| {
            recip_gamma_contour(s, spec, &cfg)
                .ok()
                .filter(|e| e.usable())
                .map(|e| e.value)
        })
        .collect()
}

/// Five rotations across the open ψ window, three radii and three delta
/// pairs.
pub fn invariance_specs() -> Vec<GammaContourSpec> {
    let mut specs = Vec::new();
    let (low, high) = gamma_psi_window(PI, PI);
    for k in 1..=5 {
        specs.push(GammaContourSpec::new(1.0, low + (high - low) * k as f64 / 6.0, PI, PI));
    }
    for eps in [0.5, 2.0, 4.0] {
        specs.push(GammaContourSpec::new(eps, 0.0, PI, PI));
    }
    for (d1, d2) in [(0.6 * PI, 0.6 * PI), (0.75 * PI, 0.9 * PI), (PI, 0.7 * PI)] {
        specs.push(GammaContourSpec::new(1.0, 0.0, d1, d2));
    }
    specs
}

fn gamma_invariance() -> (bool, String) {
    let specs = invariance_specs();
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in [c(0.5, 0.0), c(2.0, 1.0), c(-1.3, 0.4)] {
        match gamma_values(s, &specs) {
            Some(v) => worst = worst.max(spread(&v)),
            None => ok = false,
        }
    }
    ok &= worst < 1e-9;
    (ok, format!("{} contours per s, max relative spread {worst:.2e} (< 1e-9)", specs.len()))
}

fn lambda_invariance() -> (bool, String) {
    let spec = GammaContourSpec::default();
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in [c(0.5, 0.0), c(2.0, 1.0)] {
        let mut values = Vec::new();
        for theta in [-PI / 3.0, 0.0, PI / 3.0] {
            let lam = LambdaSpec::centered(PolarComplex::unit(theta), spec.delta1, spec.delta2);
            match recip_gamma_lambda(s, &lam, &spec, &cfg) {
                Ok(e) if e.usable() => values.push(e.value),
                _ => ok = false,
            }
        }
        worst = worst.max(spread(&values));
    }
    ok &= worst < 1e-9;
    (ok, format!("arg lambda in {{-pi/3, 0, pi/3}}, max relative spread {worst:.2e} (< 1e-9)"))
}

fn pole_zeros() -> (bool, String) {
    let spec = GammaContourSpec::default();
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut ok = true;
    for k in 0..4 {
        match recip_gamma_contour(c(-(k as f64), 0.0), &spec, &cfg) {
            Ok(e) if e.usable() => worst = worst.max(e.value.norm()),
            _ => ok = false,
        }
    }
    ok &= worst < 1e-9;
    (ok, format!("s in {{0, -1, -2, -3}}, max |value| {worst:.2e} (< 1e-9)"))
}

fn reflection() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in [c(0.3, 0.0), c(0.5, 0.0), c(0.3, 0.7), c(1.2, -0.5)] {
        match reflection_residual(s) {
            Ok(r) => worst = worst.max(r),
            Err(_) => ok = false,
        }
    }
    ok &= worst < 1e-8;
    (ok, format!("4 points, max residual {worst:.2e} (< 1e-8)"))
}

/// The 60 `(ρ, μ, |z|)` combinations, `arg z` at the window midpoint.
pub fn series_grid() -> Vec<(MLParams, PolarComplex)> {
    let mut pts = Vec::new();
    for rho in [0.6, 0.75, 1.0, 2.0, 4.0] {
        let (d1, d2) = default_ml_deltas(rho).expect("rho > 1/2");
        let (low, high) = ml_arg_window(rho, d1, d2).expect("maximal deltas");
        let arg = 0.5 * (low + high);
        for mu in [c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.5)] {
            for m in [0.5, 2.0, 5.0] {
                pts.push((MLParams::new(rho, mu), PolarComplex::new(m, arg).expect("valid z")));
            }
        }
    }
    pts
}

fn zeta_vs_series() -> (bool, String) {
    let start = Instant::now();
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let (mut compared, mut skipped, mut failures) = (0, 0, Vec::new());
    for (params, z) in series_grid() {
        let series = match ml_series(&params, z, &SeriesConfig::default()) {
            Ok(e) if e.usable() => e.value,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let label = format!("(rho {}, mu {}, |z| {})", params.rho, params.mu, z.modulus());
        let spec = default_ml_spec(params.rho, z).expect("rho > 1/2");
        match ml_contour(&params, z, &spec, &cfg) {
            Ok(e) if e.usable() => {
                let r = rel(e.value, series);
                worst = worst.max(r);
                compared += 1;
                if !(r < 1e-6) {
                    failures.push(format!("{label}: {r:.1e}"));
                }
            }
            Ok(_) => failures.push(format!("{label}: no convergence")),
            Err(err) => failures.push(format!("{label}: {err}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && secs < 60.0;
    let mut detail = format!(
        "{compared} compared, {skipped} skipped (series cancellation > 9 digits), max rel dev {worst:.2e} (< 1e-6), {secs:.2} s (< 60 s)"
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; failing: {}", failures.join(", ")));
    }
    (ok, detail)
}

fn closed_forms() -> (bool, String) {
    let cfg = QuadratureConfig::default();
    let cases = [
        (MLParams::real(1.0, 1.0), 1.0, c((-1.0f64).exp(), 0.0)),
        (MLParams::real(1.0, 2.0), 2.0, c(((-2.0f64).exp() - 1.0) / -2.0, 0.0)),
    ];
    let mut worst = 0.0f64;
    let mut ok = true;
    for (params, m, expected) in cases {
        let z = PolarComplex::new(m, PI).expect("valid z");
        let spec = default_ml_spec(params.rho, z).expect("rho > 1/2");
        match ml_contour(&params, z, &spec, &cfg) {
            Ok(e) if e.usable() => worst = worst.max(rel(e.value, expected)),
            _ => ok = false,
        }
    }
    ok &= worst < 1e-8;
    (ok, format!("E_{{1,1}}(-1), E_{{1,2}}(-2): max rel err {worst:.2e} (< 1e-8)"))
}

/// Ten `(ρ, μ, |z|, arg z)` points with real `μ > 0` and `arg z` inside the
/// ζ-loop window, so all three loop representations apply.
pub fn representation_points() -> Vec<(MLParams, PolarComplex)> {
    [
        (1.0, 1.0, 1.0, PI),
        (1.0, 2.0, 2.0, PI),
        (2.0, 1.0, 1.0, PI),
        (2.0, 0.5, 0.7, PI + 0.3),
        (0.75, 0.5, 0.8, 2.5),
        (0.6, 2.0, 2.0, PI),
        (1.5, 1.0, 1.3, PI - 0.2),
        (3.0, 1.5, 1.5, PI),
        (1.2, 0.8, 3.0, PI + 0.5),
        (0.9, 1.3, 2.5, 2.2),
    ]
    .into_iter()
    .map(|(rho, mu, m, a)| (MLParams::real(rho, mu), PolarComplex::new(m, a).expect("valid z")))
    .collect()
}

fn representations() -> (bool, String) {
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let points = representation_points();
    for (params, z) in &points {
        let rho = params.rho;
        let zc = z.to_cartesian();
        let values = (|| {
            let spec = default_ml_spec(rho, *z)?;
            let a = ml_contour(params, *z, &spec, &cfg)?;
            let b = ml_bateman(params, zc, default_bateman_epsilon(rho, z.modulus()), &cfg)?;
            let d = ml_dzhrbashyan(
                params,
                zc,
                default_dzhrbashyan_epsilon(rho, z.modulus()),
                default_dzhrbashyan_theta(rho)?,
                &cfg,
            )?;
            Ok::<_, crate::Error>([a, b, d])
        })();
        let label = format!("(rho {rho}, mu {}, z {} e^{}i)", params.mu.re, z.modulus(), z.argument());
        match values {
            Ok(evals) if evals.iter().all(|e| e.usable()) => {
                let v: Vec<Complex64> = evals.iter().map(|e| e.value).collect();
                let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
                let mut dev = 0.0f64;
                for i in 0..3 {
                    for j in i + 1..3 {
                        dev = dev.max((v[i] - v[j]).norm() / scale);
                    }
                }
                worst = worst.max(dev);
                if !(dev < 1e-6) {
                    failures.push(format!("{label}: {dev:.1e}"));
                }
            }
            Ok(_) => failures.push(format!("{label}: no convergence")),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    let mut detail = format!("{} points, max pairwise rel dev {worst:.2e} (< 1e-6)", points.len());
    if !failures.is_empty() {
        detail.push_str(&format!("; failing: {}", failures.join(", ")));
    }
    (failures.is_empty(), detail)
}

fn cauchy_nullity() -> (bool, String) {
    let s = c(0.7, 0.0);
    let path = match IntegrationPath::annular_sector(0.5, 10.0, 2.5, PI) {
        Ok(p) => p,
        Err(e) => return (false, e.to_string()),
    };
    let f = |t: PolarComplex| (t.to_cartesian() + (s - 1.0) * t.ln()).exp();
    match integrate_path(&f, &path, |_| unreachable!("closed path has no rays"), &QuadratureConfig::default()) {
        Ok(q) => {
            let m = q.value.norm();
            (m < 1e-8, format!("s = 0.7, R = 10, eps = 0.5: |integral| {m:.2e} (< 1e-8)"))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn strict_boundaries() -> (bool, String) {
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut expect = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            failures.push(what);
        }
    };

    for (d1, d2) in [(PI, PI), (0.75 * PI, 0.9 * PI)] {
        let (low, high) = gamma_psi_window(d1, d2);
        let at_low = validate_gamma_contour(&GammaContourSpec::new(1.0, FRAC_PI_2 - d2, d1, d2));
        expect(at_low.violates(Condition::PsiWindow), format!("psi = pi/2 - delta2 accepted for ({d1}, {d2})"));
        let at_high = validate_gamma_contour(&GammaContourSpec::new(1.0, high, d1, d2));
        expect(at_high.violates(Condition::PsiWindow), format!("psi at upper end accepted for ({d1}, {d2})"));
        let inside = validate_gamma_contour(&GammaContourSpec::new(1.0, low + 1e-6, d1, d2));
        expect(inside.ok, format!("psi just inside rejected for ({d1}, {d2})"));
    }
    for rho in [0.75, 1.0, 2.0, 4.0] {
        let (d1, d2) = default_ml_deltas(rho).expect("rho > 1/2");
        let (low, high) = ml_arg_window(rho, d1, d2).expect("maximal deltas");
        for arg in [low, high] {
            let r = validate_ml_contour(&MLContourSpec::new(rho, 1.0, arg, d1, d2));
            expect(r.violates(Condition::ArgZWindow), format!("arg z = {arg} accepted for rho {rho}"));
        }
        let mid = validate_ml_contour(&MLContourSpec::new(rho, 1.0, 0.5 * (low + high), d1, d2));
        expect(mid.ok, format!("window midpoint rejected for rho {rho}"));
    }
    let half = validate_ml_contour(&MLContourSpec::new(0.5, 1.0, PI, PI, PI));
    expect(half.violates(Condition::RhoAboveHalf), "rho = 1/2 accepted".into());

    // the same cases through the CLI must exit with code 2
    let (_, high) = ml_arg_window(2.0, FRAC_PI_2, FRAC_PI_2).expect("valid");
    let cli_cases: Vec<Vec<String>> = vec![
        ["eval", "--target", "gamma", "--s-re", "0.5", "--psi", &(FRAC_PI_2 - PI).to_string(), "--method", "contour"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        ["eval", "--rho", "2", "--mu-re", "1", "--z-mod", "1", "--z-arg", &high.to_string(), "--method", "contour"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        ["eval", "--rho", "0.5", "--mu-re", "1", "--z-mod", "1", "--z-arg", &PI.to_string(), "--method", "contour"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        ["window", "--rho", "2", "--delta1rho", "3"].iter().map(|s| s.to_string()).collect(),
    ];
    for case in cli_cases {
        let refs: Vec<&str> = case.iter().map(String::as_str).collect();
        let (code, _, _) = crate::cli::run_captured_with_threads(&refs, 1);
        expect(code == 2, format!("`mlc {}` exited {code}, not 2", case.join(" ")));
    }
    let ok = failures.is_empty();
    let mut detail = format!("{checks} boundary checks (predicates and CLI exit code 2)");
    if !ok {
        detail.push_str(&format!("; failing: {}", failures.join(", ")));
    }
    (ok, detail)
}

/// Arguments of the grid run used for the determinism check.
pub const DETERMINISM_GRID: [&str; 18] = [
    "grid", "--rho", "0.75", "--mu-re", "0.5", "--mu-im", "0.25", "--z-mod-min", "0.5", "--z-mod-max",
    "3", "--z-mod-step", "0.5", "--z-arg-min", "0", "--z-arg-max", "6.2", "--z-arg-step=0.4",
];

fn determinism() -> (bool, String) {
    let first = crate::cli::run_captured_with_threads(&DETERMINISM_GRID, 8);
    let second = crate::cli::run_captured_with_threads(&DETERMINISM_GRID, 8);
    let rows = first.1.lines().count().saturating_sub(1);
    let ok = first.0 == 0 && rows > 0 && first.1 == second.1;
    (
        ok,
        format!(
            "{rows} rows, exit codes {} and {}, outputs {}",
            first.0,
            second.0,
            if first.1 == second.1 { "byte-identical" } else { "differ" }
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        let s = Selection::parse(&["gamma".into(), "9".into()]).unwrap();
        let ids: Vec<u32> = CRITERIA.iter().filter(|c| s.includes(c)).map(|c| c.id).collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5, 9]);
        assert!(Selection::parse(&["bogus".into()]).is_err());
        assert!(Selection::parse(&["12".into()]).is_err());
        assert!(CRITERIA.iter().all(|c| Selection::all().includes(c)));
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(gamma_grid_points().len(), 27);
        assert_eq!(series_grid().len(), 60);
        assert_eq!(representation_points().len(), 10);
        assert_eq!(invariance_specs().len(), 11);
    }

    #[test]
    fn representation_points_inside_window() {
        for (p, z) in representation_points() {
            let spec = default_ml_spec(p.rho, z).unwrap();
            assert!(validate_ml_contour(&spec).ok, "{p:?} {z:?}");
        }
    }

    #[test]
    fn spread_is_relative_or_absolute() {
        assert_eq!(spread(&[c(1.0, 0.0), c(2.0, 0.0)]), 0.5);
        assert_eq!(spread(&[c(1e-5, 0.0), c(2e-5, 0.0)]), 1e-5);
    }
}
