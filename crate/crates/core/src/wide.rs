//! Double-double complex numbers: an unevaluated sum `hi + lo` per component,
//! about 32 significant digits.
//!
//! Symbolic weights of the Newton coefficients can be many orders of magnitude
//! larger than the weights of the final response; they cancel only after the
//! Horner chain. Carrying them in double-double keeps that cancellation from
//! eating the answer.

use crate::linalg::Complex;

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

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct WideReal {
    hi: f64,
    lo: f64,
}

impl WideReal {
    pub(crate) fn new(x: f64) -> Self {
        WideReal { hi: x, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn neg(self) -> Self {
        WideReal {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        WideReal { hi, lo }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        WideReal { hi, lo }
    }

    fn mul_f64(self, x: f64) -> Self {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        WideReal { hi, lo }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        WideReal { hi, lo }.add(WideReal::new(q3))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct WideComplex {
    re: WideReal,
    im: WideReal,
}

impl WideComplex {
    pub(crate) fn from_complex(z: Complex) -> Self {
        WideComplex {
            re: WideReal::new(z.re),
            im: WideReal::new(z.im),
        }
    }

    /// Exact `a − b` of two doubles.
    pub(crate) fn difference(a: Complex, b: Complex) -> Self {
        let (rh, rl) = two_sum(a.re, -b.re);
        let (ih, il) = two_sum(a.im, -b.im);
        WideComplex {
            re: WideReal { hi: rh, lo: rl },
            im: WideReal { hi: ih, lo: il },
        }
    }

    pub(crate) fn to_complex(self) -> Complex {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }

    pub(crate) fn is_zero(self) -> bool {
        self.re.hi == 0.0 && self.im.hi == 0.0
    }

    pub(crate) fn norm(self) -> f64 {
        self.to_complex().norm()
    }

    pub(crate) fn add(self, o: Self) -> Self {
        WideComplex {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub(crate) fn mul(self, o: Self) -> Self {
        WideComplex {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub(crate) fn mul_complex(self, c: Complex) -> Self {
        WideComplex {
            re: self.re.mul_f64(c.re).sub(self.im.mul_f64(c.im)),
            im: self.re.mul_f64(c.im).add(self.im.mul_f64(c.re)),
        }
    }

    pub(crate) fn div(self, o: Self) -> Self {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let conj = WideComplex {
            re: o.re,
            im: o.im.neg(),
        };
        let num = self.mul(conj);
        WideComplex {
            re: num.re.div(den),
            im: num.im.div(den),
        }
    }
}
