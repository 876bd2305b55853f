//! Double-double arithmetic (about 32 significant digits).

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: 6.931471805599452862e-01,
    lo: 2.319046813846299558e-17,
};
const HALF_PI: Dd = Dd {
    hi: 1.570796326794896558e+00,
    lo: 6.123233995736766036e-17,
};

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        quick_two_sum(p, e + (self.hi * y.lo + self.lo * y.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from(q2);
        let q3 = r.hi / y.hi;
        quick_two_sum(q1, q2) + Dd::from(q3)
    }
}

impl Dd {
    fn scale(self, factor: f64) -> Dd {
        Dd {
            hi: self.hi * factor,
            lo: self.lo * factor,
        }
    }

    pub fn powi(self, n: i32) -> Dd {
        let mut out = Dd::from(1.0);
        for _ in 0..n.unsigned_abs() {
            out = out * self;
        }
        if n < 0 {
            Dd::from(1.0) / out
        } else {
            out
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from(0.0);
        }
        let y = Dd::from(self.hi.sqrt());
        y + (self - y * y) / y.scale(2.0)
    }

    /// `sum (+-1)^i x^(start + step i) / (start + step i)!` until the terms
    /// vanish, with alternating signs when `alternating`.
    fn series(self, start: u32, step: u32, alternating: bool) -> Dd {
        let mut term = Dd::from(1.0);
        for k in 1..=start {
            term = term * self / Dd::from(k as f64);
        }
        let mut sum = term;
        let mut k = start;
        for i in 0..60 {
            for _ in 0..step {
                k += 1;
                term = term * self / Dd::from(k as f64);
            }
            sum = if alternating && i % 2 == 0 { sum - term } else { sum + term };
            if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    pub fn exp(self) -> Dd {
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Dd::from(k)).scale(1.0 / 1024.0);
        let mut e = r.series(0, 1, false);
        for _ in 0..10 {
            e = e * e;
        }
        e.scale(2f64.powi(k as i32))
    }

    fn reduce(self) -> (Dd, i64) {
        let k = (self.hi / HALF_PI.hi).round();
        (self - HALF_PI * Dd::from(k), k as i64)
    }

    pub fn sin(self) -> Dd {
        let (r, k) = self.reduce();
        let (s, c) = (r.series(1, 2, true), r.series(0, 2, true));
        match k.rem_euclid(4) {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        }
    }

    pub fn cos(self) -> Dd {
        let (r, k) = self.reduce();
        let (s, c) = (r.series(1, 2, true), r.series(0, 2, true));
        match k.rem_euclid(4) {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        }
    }

    pub fn sinh(self) -> Dd {
        if self.hi.abs() < 0.5 {
            return self.series(1, 2, false);
        }
        let e = self.exp();
        (e - Dd::from(1.0) / e).scale(0.5)
    }

    pub fn cosh(self) -> Dd {
        let e = self.exp();
        (e + Dd::from(1.0) / e).scale(0.5)
    }
}
