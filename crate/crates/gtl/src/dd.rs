//! Double-double arithmetic.
//!
//! The regularized reconstruction error sits around 1e-17 for the default
//! schedule, below what a plain `f64` evaluation of `f - Rf` can resolve.
//! A value here is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 32 significant digits.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const PI: Dd = Dd {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

pub const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Dd {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sqr(self) -> Dd {
        self * self
    }

    /// Multiplication by a power of two, exact.
    #[inline]
    pub fn ldexp(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    /// Nearest integer, as a double-double.
    pub fn round(self) -> Dd {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (hi, lo) = quick_two_sum(hi, lo);
            Dd { hi, lo }
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // Tie on the high word, the low word breaks it.
            let hi = if self.lo > 0.0 {
                self.hi.ceil()
            } else {
                self.hi.floor()
            };
            Dd { hi, lo: 0.0 }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn exp(self) -> Dd {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        // exp(r) = (1 + t)^(2^s), t = expm1(r / 2^s)
        const S: i32 = 10;
        let x = r.ldexp(-S);
        let mut term = x;
        let mut t = x;
        let mut i = 2.0;
        loop {
            term = term * x / Dd::new(i);
            t = t + term;
            if term.hi.abs() <= 1e-34 * t.hi.abs() {
                break;
            }
            i += 1.0;
        }
        for _ in 0..S {
            // (1 + t)^2 - 1 = 2t + t^2
            t = t.ldexp(1) + t.sqr();
        }
        (t + Dd::ONE).ldexp(k as i32)
    }

    /// `(sin(pi x), cos(pi x))`.
    pub fn sin_cos_pi(self) -> (Dd, Dd) {
        let q = self.ldexp(1).round();
        let y = self - q.ldexp(-1);
        let quadrant = (q.hi.rem_euclid(4.0) + q.lo.rem_euclid(4.0)).rem_euclid(4.0) as i64;
        let theta = PI * y;
        let t2 = theta.sqr();
        let mut s = theta;
        let mut c = Dd::ONE;
        let mut ts = theta;
        let mut tc = Dd::ONE;
        let mut n = 1.0;
        loop {
            tc = -(tc * t2) / Dd::new(n * (n + 1.0));
            ts = -(ts * t2) / Dd::new((n + 1.0) * (n + 2.0));
            c = c + tc;
            s = s + ts;
            if tc.hi.abs() < 1e-34 && ts.hi.abs() < 1e-34 {
                break;
            }
            n += 2.0;
        }
        match quadrant {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number over double-doubles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> DdComplex {
        DdComplex { re, im }
    }

    /// `exp(i pi x)`.
    pub fn cis_pi(x: Dd) -> DdComplex {
        let (s, c) = x.sin_cos_pi();
        DdComplex { re: c, im: s }
    }

    pub fn scale(self, s: Dd) -> DdComplex {
        DdComplex {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, b: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Dd, b: Dd) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn arithmetic_round_trips() {
        let a = Dd::new(1.0) / Dd::new(3.0);
        let b = a * Dd::new(3.0);
        assert!((b - Dd::ONE).to_f64().abs() < 1e-31);
        let x = Dd::new(2.0);
        let y = Dd::new(1.0) / x;
        assert_eq!(y.to_f64(), 0.5);
    }

    #[test]
    fn exp_identities() {
        // exp(a) * exp(-a) = 1
        for &a in &[0.3, -1.7, 12.5, -40.25, 0.0] {
            let x = Dd::new(a) + Dd::new(a * 1e-17);
            let p = x.exp() * (-x).exp();
            assert!((p - Dd::ONE).to_f64().abs() < 1e-30, "{a}");
        }
        // exp(1) to 32 digits: 2.71828182845904523536028747135266
        let e = Dd::ONE.exp();
        let e_ref = Dd {
            hi: std::f64::consts::E,
            lo: 1.445_646_891_729_250_2e-16,
        };
        assert!(rel(e, e_ref) < 1e-31);
    }

    #[test]
    fn sin_cos_identities() {
        for &a in &[0.1, 0.25, 0.3333, -0.77, 1.5, 7.123, -13.9] {
            let x = Dd::new(a);
            let (s, c) = x.sin_cos_pi();
            assert!((s.sqr() + c.sqr() - Dd::ONE).to_f64().abs() < 1e-30);
            assert!((s.to_f64() - (std::f64::consts::PI * a).sin()).abs() < 1e-14);
            // double angle
            let (s2, _) = x.ldexp(1).sin_cos_pi();
            assert!((s2 - (s * c).ldexp(1)).to_f64().abs() < 1e-30);
        }
        let (s, c) = Dd::new(1.0 / 6.0).sin_cos_pi();
        assert!((s.to_f64() - 0.5).abs() < 1e-16);
        assert!(c.hi > 0.86);
        let (s, _) = Dd::new(1.0).sin_cos_pi();
        assert!(s.to_f64().abs() < 1e-32);
    }
}
