use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::quadrature::QuadratureConfig;

/// Reciprocal gamma and Mittag-Leffler evaluation through Hankel-type
/// contour integrals.
///
/// Every command also accepts `--config FILE` with `key = value` lines;
/// explicit flags override the file.
#[derive(Parser, Debug)]
#[command(name = "mlc", version, args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate E_{ρ,μ}(z) or 1/Γ(s) at one point.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Evaluate over a rectangular grid in (|z|, arg z) or in s.
    #[command(args_override_self = true)]
    Grid(GridArgs),
    /// Sweep a contour parameter and report the spread of the values.
    #[command(args_override_self = true)]
    Invariance(InvarianceArgs),
    /// Print the admissible arg z window and the ψ window.
    #[command(args_override_self = true)]
    Window(WindowArgs),
    /// Evaluate E_{ρ,μ}(z) by every route and tabulate deviations.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
    /// Run the acceptance suite.
    #[command(args_override_self = true)]
    Selftest(SelftestArgs),
}

pub const COMMANDS: [&str; 6] = ["eval", "grid", "invariance", "window", "compare", "selftest"];

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Target {
    #[default]
    Ml,
    Gamma,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    /// ML: ζ-loop when arg z (shifted by 2πk) fits its window, else series.
    /// Gamma: Hankel loop.
    #[default]
    Auto,
    Series,
    Contour,
    Bateman,
    Dzhrbashyan,
    Closed,
    /// Gamma only: λ-scaled loop.
    Lambda,
    /// Gamma only: Stirling-series reference.
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    Psi,
    Epsilon,
    Delta,
    Lambda,
}

#[derive(Args, Debug, Clone)]
pub struct OutputOpts {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct QuadOpts {
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_refinements: Option<u32>,
    #[arg(long)]
    pub initial_panels: Option<usize>,
    #[arg(long)]
    pub tail_safety: Option<f64>,
    #[arg(long)]
    pub max_panels: Option<usize>,
}

impl QuadOpts {
    pub fn config(&self) -> crate::Result<QuadratureConfig> {
        let d = QuadratureConfig::default();
        let cfg = QuadratureConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_refinements: self.max_refinements.unwrap_or(d.max_refinements),
            initial_panels_per_segment: self.initial_panels.unwrap_or(d.initial_panels_per_segment),
            tail_safety_factor: self.tail_safety.unwrap_or(d.tail_safety_factor),
            max_panels_per_segment: self.max_panels.unwrap_or(d.max_panels_per_segment),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Clone)]
pub struct MlOpts {
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu_im: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ZOpts {
    #[arg(long)]
    pub z_mod: Option<f64>,
    /// arg z in radians, unwrapped (values beyond ±π select other sheets).
    #[arg(long, allow_negative_numbers = true)]
    pub z_arg: Option<f64>,
    /// arg z as a multiple of π.
    #[arg(long, allow_negative_numbers = true)]
    pub z_arg_pi: Option<f64>,
}

impl ZOpts {
    pub fn arg(&self) -> Option<f64> {
        self.z_arg_pi.map(|x| x * PI).or(self.z_arg)
    }
}

#[derive(Args, Debug, Clone)]
pub struct GammaOpts {
    #[arg(long, allow_negative_numbers = true)]
    pub s_re: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s_im: f64,
}

/// Contour geometry overrides shared by the commands.
#[derive(Args, Debug, Clone)]
pub struct ContourOpts {
    /// Loop radius: ε for the Hankel loop, ϵ for the ζ-loop (radius 1+ϵ),
    /// ε for the Bateman and Dzhrbashyan loops.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long)]
    pub lambda_mod: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_arg: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub psi_lambda: Option<f64>,
    #[arg(long)]
    pub delta1rho: Option<f64>,
    #[arg(long)]
    pub delta2rho: Option<f64>,
    /// Dzhrbashyan ray angle.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub bateman_epsilon: Option<f64>,
    #[arg(long)]
    pub dzh_epsilon: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    #[command(flatten)]
    pub ml: MlOpts,
    #[command(flatten)]
    pub z: ZOpts,
    #[command(flatten)]
    pub gamma: GammaOpts,
    #[command(flatten)]
    pub contour: ContourOpts,
    #[command(flatten)]
    pub quad: QuadOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, value_enum, default_value_t)]
    pub target: Target,
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    #[command(flatten)]
    pub ml: MlOpts,
    #[arg(long)]
    pub z_mod_min: Option<f64>,
    #[arg(long)]
    pub z_mod_max: Option<f64>,
    #[arg(long)]
    pub z_mod_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z_arg_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z_arg_max: Option<f64>,
    #[arg(long)]
    pub z_arg_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_re_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_re_max: Option<f64>,
    #[arg(long)]
    pub s_re_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_im_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_im_max: Option<f64>,
    #[arg(long)]
    pub s_im_step: Option<f64>,
    #[command(flatten)]
    pub contour: ContourOpts,
    #[command(flatten)]
    pub quad: QuadOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct InvarianceArgs {
    #[arg(long, value_enum, default_value_t)]
    pub target: Target,
    /// Parameter to sweep (gamma: psi, epsilon, delta, lambda; ML: epsilon,
    /// delta). Defaults to psi for gamma and epsilon for ML.
    #[arg(long, value_enum)]
    pub sweep: Option<Sweep>,
    /// Number of generated sweep values.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Explicit sweep values (comma separated) instead of generated ones.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
    #[command(flatten)]
    pub ml: MlOpts,
    #[command(flatten)]
    pub z: ZOpts,
    #[command(flatten)]
    pub gamma: GammaOpts,
    #[command(flatten)]
    pub contour: ContourOpts,
    #[command(flatten)]
    pub quad: QuadOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long)]
    pub delta1rho: Option<f64>,
    #[arg(long)]
    pub delta2rho: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    /// Emit this many points along the boundary arc of the admissible sector.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Radius of the sampled sector boundary.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub ml: MlOpts,
    #[command(flatten)]
    pub z: ZOpts,
    #[command(flatten)]
    pub contour: ContourOpts,
    #[command(flatten)]
    pub quad: QuadOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct SelftestArgs {
    /// Restrict to groups (gamma, ml, quadrature, validation, cli) or
    /// criterion numbers; comma separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long)]
    pub json: bool,
}
