//! Truncated Taylor arithmetic through fourth order.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest derivative order carried by a [`Jet4`].
pub const JET_ORDER: usize = 4;

const FACTORIAL: [f64; JET_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Value and first four derivatives of a scalar function at a point.
///
/// Stored internally as normalized Taylor coefficients `f^(k)(s0) / k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet4 {
    taylor: [f64; JET_ORDER + 1],
}

impl Jet4 {
    pub fn constant(value: f64) -> Self {
        Self {
            taylor: [value, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// The identity function seeded at `s0`.
    pub fn variable(s0: f64) -> Self {
        Self {
            taylor: [s0, 1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Builds a jet from `(f, f', f'', f''', f'''')`.
    pub fn from_derivatives(d: [f64; JET_ORDER + 1]) -> Self {
        let mut taylor = d;
        for (t, f) in taylor.iter_mut().zip(FACTORIAL) {
            *t /= f;
        }
        Self { taylor }
    }

    pub fn value(&self) -> f64 {
        self.taylor[0]
    }

    pub fn derivative(&self, order: usize) -> f64 {
        self.taylor[order] * FACTORIAL[order]
    }

    /// `(f, f', f'', f''', f'''')`.
    pub fn derivatives(&self) -> [f64; JET_ORDER + 1] {
        let mut d = self.taylor;
        for (x, f) in d.iter_mut().zip(FACTORIAL) {
            *x *= f;
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.taylor.iter().all(|x| x.is_finite())
    }

    /// `g ∘ self`, given `g^(k)(f(s0))` for `k = 0..=4`.
    pub fn compose(&self, outer: [f64; JET_ORDER + 1]) -> Self {
        let mut h = *self;
        h.taylor[0] = 0.0;
        let mut out = [0.0; JET_ORDER + 1];
        out[0] = outer[0];
        let mut power = Jet4::constant(1.0);
        for k in 1..=JET_ORDER {
            power = power * h;
            let c = outer[k] / FACTORIAL[k];
            for (o, p) in out.iter_mut().zip(power.taylor) {
                *o += c * p;
            }
        }
        Self { taylor: out }
    }

    /// `1 / self`. Caller guarantees a nonzero value.
    pub fn recip(&self) -> Self {
        let a = self.value();
        let r = 1.0 / a;
        self.compose([r, -r * r, 2.0 * r.powi(3), -6.0 * r.powi(4), 24.0 * r.powi(5)])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s, c])
    }

    pub fn sinh(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose([s, c, s, c, s])
    }

    pub fn cosh(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose([c, s, c, s, c])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e; JET_ORDER + 1])
    }

    /// Square root. Caller guarantees a positive value.
    pub fn sqrt(&self) -> Self {
        let a = self.value();
        let r = a.sqrt();
        let inv = 1.0 / a;
        self.compose([
            r,
            0.5 * r * inv,
            -0.25 * r * inv * inv,
            0.375 * r * inv.powi(3),
            -0.9375 * r * inv.powi(4),
        ])
    }

    /// Integer power. Negative exponents require a nonzero value.
    pub fn powi(&self, n: i32) -> Self {
        let a = self.value();
        let mut outer = [0.0; JET_ORDER + 1];
        let mut falling = 1.0;
        for (k, slot) in outer.iter_mut().enumerate() {
            let e = n - k as i32;
            *slot = if falling == 0.0 { 0.0 } else { falling * a.powi(e) };
            falling *= f64::from(e);
        }
        self.compose(outer)
    }
}

impl Add for Jet4 {
    type Output = Jet4;
    fn add(mut self, rhs: Jet4) -> Jet4 {
        for (a, b) in self.taylor.iter_mut().zip(rhs.taylor) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet4 {
    type Output = Jet4;
    fn sub(mut self, rhs: Jet4) -> Jet4 {
        for (a, b) in self.taylor.iter_mut().zip(rhs.taylor) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(mut self) -> Jet4 {
        for a in self.taylor.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: Jet4) -> Jet4 {
        let mut out = [0.0; JET_ORDER + 1];
        for (i, a) in self.taylor.iter().enumerate() {
            for (j, b) in rhs.taylor.iter().enumerate().take(JET_ORDER + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Jet4 { taylor: out }
    }
}

impl Mul<f64> for Jet4 {
    type Output = Jet4;
    fn mul(mut self, rhs: f64) -> Jet4 {
        for a in self.taylor.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Div for Jet4 {
    type Output = Jet4;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet4) -> Jet4 {
        self * rhs.recip()
    }
}
