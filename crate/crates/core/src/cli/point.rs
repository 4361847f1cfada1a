//! Single-point evaluation shared by `eval` and `grid`, and its record
//! formatting.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::args::{ContourOpts, Method};
use super::format::{csv_line, g17, opt_g17};
use crate::contour::{
    default_ml_deltas, validate_ml_contour, Condition, GammaContourSpec, LambdaSpec, MLContourSpec,
};
use crate::error::Error;
use crate::gamma::{gamma_oracle_flagged, recip_gamma_contour, recip_gamma_lambda, GammaEvaluation};
use crate::ml::{
    default_bateman_epsilon, default_dzhrbashyan_epsilon, default_dzhrbashyan_theta,
    default_zeta_epsilon, ml_bateman, ml_closed_form_eval, ml_contour, ml_dzhrbashyan, ml_series,
    Diagnostics, MLEvaluation, MLParams, SeriesConfig,
};
use crate::polar::PolarComplex;
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    WindowViolation,
    PreconditionFailed,
    Overflow,
    NotConverged,
    NumericalError,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::WindowViolation => "window_violation",
            Status::PreconditionFailed => "precondition_failed",
            Status::Overflow => "overflow",
            Status::NotConverged => "not_converged",
            Status::NumericalError => "numerical_error",
        }
    }

    /// 0 ok, 2 rejected input, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::WindowViolation | Status::PreconditionFailed | Status::Overflow => 2,
            Status::NotConverged | Status::NumericalError => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub method: String,
    pub value: Option<Complex64>,
    pub err_estimate: Option<f64>,
    pub flags: Vec<String>,
    pub status: Status,
    pub message: Option<String>,
}

pub fn classify(err: &Error) -> Status {
    match err {
        Error::InvalidContour(report)
            if report.violates(Condition::ArgZWindow)
                || report.violates(Condition::PsiWindow)
                || report.violates(Condition::PsiLambdaWindow) =>
        {
            Status::WindowViolation
        }
        Error::Overflow { .. } => Status::Overflow,
        Error::NonFiniteIntegrand { .. } => Status::NumericalError,
        _ => Status::PreconditionFailed,
    }
}

impl Outcome {
    fn failed(method: &str, err: &Error) -> Self {
        Self {
            method: method.to_string(),
            value: None,
            err_estimate: None,
            flags: Vec::new(),
            status: classify(err),
            message: Some(err.to_string()),
        }
    }

    fn from_ml(e: &MLEvaluation, mut flags: Vec<String>) -> Self {
        match &e.diagnostics {
            Diagnostics::Series(d) => {
                flags.push(format!("terms={}", d.terms_used));
                flags.push(format!("cancel_digits={:.2}", d.cancellation_digits));
                if d.unreliable() {
                    flags.push("unreliable".into());
                }
            }
            Diagnostics::Quadrature(q) => {
                flags.push(format!("panels={}", q.panels_used));
                if q.roundoff_limited {
                    flags.push("roundoff_limited".into());
                }
            }
            Diagnostics::None => {}
        }
        let converged = e.converged();
        if !converged {
            flags.push("not_converged".into());
        }
        Self {
            method: e.method.name().to_string(),
            value: Some(e.value),
            err_estimate: Some(e.error_estimate()),
            flags,
            status: if converged { Status::Ok } else { Status::NotConverged },
            message: None,
        }
    }

    fn from_gamma(e: &GammaEvaluation, mut flags: Vec<String>) -> Self {
        let err_estimate = e.quadrature.map_or(0.0, |q| q.error_estimate);
        if let Some(q) = e.quadrature {
            flags.push(format!("panels={}", q.panels_used));
            if q.roundoff_limited {
                flags.push("roundoff_limited".into());
            }
        }
        let usable = e.usable();
        if !usable {
            flags.push("not_converged".into());
        }
        Self {
            method: e.method.name().to_string(),
            value: Some(e.value),
            err_estimate: Some(err_estimate),
            flags,
            status: if usable { Status::Ok } else { Status::NotConverged },
            message: None,
        }
    }
}

/// ζ-loop spec from the flags: maximal deltas and adaptive ϵ unless given.
pub fn zeta_spec(opts: &ContourOpts, rho: f64, z: PolarComplex) -> MLContourSpec {
    // for rho <= 1/2 the defaults are undefined; validation reports it
    let (d1, d2) = default_ml_deltas(rho).unwrap_or((PI, PI));
    MLContourSpec::new(
        rho,
        opts.epsilon.unwrap_or_else(|| default_zeta_epsilon(rho, z.modulus())),
        z.argument(),
        opts.delta1rho.unwrap_or(d1),
        opts.delta2rho.unwrap_or(d2),
    )
}

/// `z` moved by 2πk so that the ζ-loop built from `opts` admits it.
fn fit_window(opts: &ContourOpts, rho: f64, z: PolarComplex) -> Option<PolarComplex> {
    if validate_ml_contour(&zeta_spec(opts, rho, z)).ok {
        return Some(z);
    }
    let spec = zeta_spec(opts, rho, z);
    let (low, high) = crate::contour::ml_arg_window(rho, spec.delta1rho, spec.delta2rho).ok()?;
    let k = ((0.5 * (low + high) - z.argument()) / (2.0 * PI)).round();
    let shifted = z.rotated(2.0 * PI * k);
    validate_ml_contour(&zeta_spec(opts, rho, shifted)).ok.then_some(shifted)
}

pub fn eval_ml(
    params: &MLParams,
    z: PolarComplex,
    method: Method,
    opts: &ContourOpts,
    cfg: &QuadratureConfig,
) -> Outcome {
    let rho = params.rho;
    let zc = z.to_cartesian();
    let result = |name: &str, r: crate::Result<MLEvaluation>, flags: Vec<String>| match r {
        Ok(e) => Outcome::from_ml(&e, flags),
        Err(err) => Outcome::failed(name, &err),
    };
    match method {
        Method::Series => result("series", ml_series(params, z, &SeriesConfig::default()), vec![]),
        Method::Contour => {
            let spec = zeta_spec(opts, rho, z);
            result("zetaContour", ml_contour(params, z, &spec, cfg), vec![])
        }
        Method::Bateman => {
            let eps = opts
                .epsilon
                .or(opts.bateman_epsilon)
                .unwrap_or_else(|| default_bateman_epsilon(rho, z.modulus()));
            result("bateman", ml_bateman(params, zc, eps, cfg), vec![])
        }
        Method::Dzhrbashyan => {
            let eps = opts
                .epsilon
                .or(opts.dzh_epsilon)
                .unwrap_or_else(|| default_dzhrbashyan_epsilon(rho, z.modulus()));
            let r = match opts.theta {
                Some(theta) => ml_dzhrbashyan(params, zc, eps, theta, cfg),
                None => default_dzhrbashyan_theta(rho)
                    .and_then(|theta| ml_dzhrbashyan(params, zc, eps, theta, cfg)),
            };
            result("dzhrbashyan", r, vec![])
        }
        Method::Closed => match ml_closed_form_eval(params, z) {
            Some(e) => Outcome::from_ml(&e, vec![]),
            None => Outcome::failed(
                "closedForm",
                &Error::InvalidParameter(format!(
                    "no closed form for rho = {}, mu = {}",
                    params.rho, params.mu
                )),
            ),
        },
        Method::Auto => {
            let fitted = if z.modulus() > 0.0 && rho > 0.5 {
                fit_window(opts, rho, z)
            } else {
                None
            };
            match fitted {
                Some(w) => {
                    let spec = zeta_spec(opts, rho, w);
                    let flags = if w.argument() != z.argument() {
                        vec![format!("arg_shifted={}", g17(w.argument()))]
                    } else {
                        vec![]
                    };
                    match ml_contour(params, w, &spec, cfg) {
                        Err(Error::Overflow { .. }) => result(
                            "series",
                            ml_series(params, z, &SeriesConfig::default()),
                            vec!["contour_overflow".into()],
                        ),
                        r => result("zetaContour", r, flags),
                    }
                }
                None => result(
                    "series",
                    ml_series(params, z, &SeriesConfig::default()),
                    vec!["outside_window".into()],
                ),
            }
        }
        Method::Lambda | Method::Oracle => Outcome::failed(
            "none",
            &Error::InvalidParameter("methods lambda and oracle apply to --target gamma".into()),
        ),
    }
}

pub fn gamma_spec(opts: &ContourOpts) -> GammaContourSpec {
    GammaContourSpec::new(
        opts.epsilon.unwrap_or(1.0),
        opts.psi.unwrap_or(0.0),
        opts.delta1.unwrap_or(PI),
        opts.delta2.unwrap_or(PI),
    )
}

pub fn lambda_spec(opts: &ContourOpts, spec: &GammaContourSpec) -> crate::Result<LambdaSpec> {
    let lambda = PolarComplex::new(opts.lambda_mod.unwrap_or(1.0), opts.lambda_arg.unwrap_or(0.0))?;
    Ok(match opts.psi_lambda {
        Some(p) => LambdaSpec::new(lambda, p),
        None => LambdaSpec::centered(lambda, spec.delta1, spec.delta2),
    })
}

pub fn eval_gamma(s: Complex64, method: Method, opts: &ContourOpts, cfg: &QuadratureConfig) -> Outcome {
    let spec = gamma_spec(opts);
    match method {
        Method::Auto | Method::Contour => match recip_gamma_contour(s, &spec, cfg) {
            Ok(e) => Outcome::from_gamma(&e, vec![]),
            Err(err) => Outcome::failed("contour", &err),
        },
        Method::Lambda => match lambda_spec(opts, &spec).and_then(|l| recip_gamma_lambda(s, &l, &spec, cfg)) {
            Ok(e) => Outcome::from_gamma(&e, vec![]),
            Err(err) => Outcome::failed("contourLambda", &err),
        },
        Method::Oracle => {
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Outcome::failed("oracle", &Error::InvalidParameter(format!("s = {s} is not finite")));
            }
            let (value, underflow) = gamma_oracle_flagged(s);
            let flags = if underflow { vec!["underflow".to_string()] } else { vec![] };
            Outcome {
                method: "oracle".into(),
                value: Some(value),
                err_estimate: Some(0.0),
                flags,
                status: Status::Ok,
                message: None,
            }
        }
        _ => Outcome::failed(
            "none",
            &Error::InvalidParameter(format!("method {method:?} does not apply to --target gamma")),
        ),
    }
}

/// A formatted result row.
#[derive(Debug, Clone)]
pub enum Record {
    Ml {
        params: MLParams,
        z_mod: f64,
        z_arg: f64,
        outcome: Outcome,
    },
    Gamma {
        s: Complex64,
        outcome: Outcome,
    },
}

pub const ML_HEADER: &str = "rho,mu_re,mu_im,z_mod,z_arg,value_re,value_im,err_estimate,method,flags,status\n";
pub const GAMMA_HEADER: &str = "s_re,s_im,value_re,value_im,err_estimate,method,flags,status\n";

impl Record {
    pub fn outcome(&self) -> &Outcome {
        match self {
            Record::Ml { outcome, .. } | Record::Gamma { outcome, .. } => outcome,
        }
    }

    pub fn header(&self) -> &'static str {
        match self {
            Record::Ml { .. } => ML_HEADER,
            Record::Gamma { .. } => GAMMA_HEADER,
        }
    }

    pub fn csv(&self) -> String {
        let o = self.outcome();
        let tail = [
            opt_g17(o.value.map(|v| v.re)),
            opt_g17(o.value.map(|v| v.im)),
            opt_g17(o.err_estimate),
            o.method.clone(),
            o.flags.join(";"),
            o.status.name().to_string(),
        ];
        let mut fields = match self {
            Record::Ml {
                params,
                z_mod,
                z_arg,
                ..
            } => vec![
                g17(params.rho),
                g17(params.mu.re),
                g17(params.mu.im),
                g17(*z_mod),
                g17(*z_arg),
            ],
            Record::Gamma { s, .. } => vec![g17(s.re), g17(s.im)],
        };
        fields.extend(tail);
        csv_line(&fields)
    }

    pub fn json(&self) -> Value {
        let o = self.outcome();
        let mut v = match self {
            Record::Ml {
                params,
                z_mod,
                z_arg,
                ..
            } => json!({
                "rho": params.rho,
                "mu_re": params.mu.re,
                "mu_im": params.mu.im,
                "z_mod": z_mod,
                "z_arg": z_arg,
            }),
            Record::Gamma { s, .. } => json!({ "s_re": s.re, "s_im": s.im }),
        };
        let fields = v.as_object_mut().expect("object");
        fields.insert("value_re".into(), json!(o.value.map(|x| x.re)));
        fields.insert("value_im".into(), json!(o.value.map(|x| x.im)));
        fields.insert("err_estimate".into(), json!(o.err_estimate));
        fields.insert("method".into(), json!(o.method));
        fields.insert("flags".into(), json!(o.flags));
        fields.insert("status".into(), json!(o.status.name()));
        if let Some(m) = &o.message {
            fields.insert("message".into(), json!(m));
        }
        v
    }
}
