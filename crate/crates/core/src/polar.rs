//! Complex numbers carried as modulus and unwrapped argument.
//!
//! Multivalued powers `w^a` depend on which sheet of the Riemann surface `w`
//! sits on. Reducing the argument to `(-π, π]` would silently move points on
//! contours whose angles run past `±π`, so every branch-sensitive value in the
//! crate goes through [`PolarComplex`], whose argument is never reduced.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarComplex {
    modulus: f64,
    argument: f64,
}

impl PolarComplex {
    pub fn new(modulus: f64, argument: f64) -> Result<Self> {
        if !(modulus >= 0.0) || !modulus.is_finite() || !argument.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "polar value needs finite modulus >= 0 and finite argument, got ({modulus}, {argument})"
            )));
        }
        Ok(Self { modulus, argument })
    }

    /// Unit-modulus value `e^{i·argument}`.
    pub fn unit(argument: f64) -> Self {
        Self {
            modulus: 1.0,
            argument,
        }
    }

    /// Principal-argument conversion; the argument lands in `(-π, π]`.
    pub fn from_cartesian(z: Complex64) -> Self {
        let mut argument = z.im.atan2(z.re);
        // atan2 returns -π for (-x, -0.0)
        if argument == -PI {
            argument = PI;
        }
        Self {
            modulus: z.norm(),
            argument,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn to_cartesian(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.argument)
    }

    /// `ln modulus + i·argument`, on the sheet selected by the stored argument.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.modulus.ln(), self.argument)
    }

    /// `w^a = exp(a·(ln|w| + i·arg w))` with the unwrapped argument.
    pub fn powc(&self, a: Complex64) -> Complex64 {
        if self.modulus == 0.0 {
            return zero_power(a);
        }
        (a * self.ln()).exp()
    }

    /// Real power, returned in polar form so the result keeps its sheet.
    pub fn powf(&self, a: f64) -> PolarComplex {
        PolarComplex {
            modulus: self.modulus.powf(a),
            argument: self.argument * a,
        }
    }

    /// Same point, argument shifted by `delta` radians (changes the sheet only
    /// when `delta` is a multiple of 2π).
    pub fn rotated(&self, delta: f64) -> PolarComplex {
        PolarComplex {
            modulus: self.modulus,
            argument: self.argument + delta,
        }
    }

    pub fn scaled(&self, factor: f64) -> PolarComplex {
        PolarComplex {
            modulus: self.modulus * factor,
            argument: self.argument,
        }
    }
}

fn zero_power(a: Complex64) -> Complex64 {
    if a == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else if a.re > 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(f64::INFINITY, 0.0)
    }
}

/// Moduli multiply and arguments add without reduction.
impl Mul for PolarComplex {
    type Output = PolarComplex;

    fn mul(self, rhs: PolarComplex) -> PolarComplex {
        PolarComplex {
            modulus: self.modulus * rhs.modulus,
            argument: self.argument + rhs.argument,
        }
    }
}
