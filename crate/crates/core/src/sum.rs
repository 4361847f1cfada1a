use num_complex::Complex64;

/// Neumaier-compensated running sum, applied to real and imaginary parts
/// independently.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: Lane,
    im: Lane,
}

#[derive(Debug, Clone, Copy, Default)]
struct Lane {
    sum: f64,
    carry: f64,
}

impl Lane {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Complex64) {
        self.re.add(x.re);
        self.im.add(x.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `a + b` as `(sum, rounding error)`.
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}
