//! Complex dual numbers, used to take exact first derivatives of the
//! hyperbolic matrix entries.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

/// Scalar type over which the model matrices are assembled.
pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(c: C64) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;

    fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    fn scale(self, c: C64) -> Self {
        self * Self::constant(c)
    }
}

impl Scalar for C64 {
    fn constant(c: C64) -> Self {
        c
    }
    fn sinh(self) -> Self {
        C64::sinh(self)
    }
    fn cosh(self) -> Self {
        C64::cosh(self)
    }
    fn exp(self) -> Self {
        C64::exp(self)
    }
}

/// `value + slope·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Jet {
    pub value: C64,
    pub slope: C64,
}

impl Jet {
    /// The independent variable at `u0`.
    pub fn variable(u0: C64) -> Self {
        Self { value: u0, slope: C64::new(1.0, 0.0) }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { value: self.value + o.value, slope: self.slope + o.slope }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { value: self.value - o.value, slope: self.slope - o.slope }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet { value: self.value * o.value, slope: self.slope * o.value + self.value * o.slope }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let v = self.value / o.value;
        Jet { value: v, slope: (self.slope - v * o.slope) / o.value }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { value: -self.value, slope: -self.slope }
    }
}

impl Scalar for Jet {
    fn constant(c: C64) -> Self {
        Jet { value: c, slope: C64::new(0.0, 0.0) }
    }
    fn sinh(self) -> Self {
        Jet { value: self.value.sinh(), slope: self.slope * self.value.cosh() }
    }
    fn cosh(self) -> Self {
        Jet { value: self.value.cosh(), slope: self.slope * self.value.sinh() }
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Jet { value: e, slope: self.slope * e }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let u0 = C64::new(0.3, -0.7);
        let f = |x: Jet| (x.sinh() * x.exp() - Jet::real(2.0)) / (x.cosh() + x * x);
        let g = |x: C64| (x.sinh() * x.exp() - 2.0) / (x.cosh() + x * x);
        let j = f(Jet::variable(u0));
        let h = 1e-6;
        let fd = (g(u0 + h) - g(u0 - h)) / (2.0 * h);
        assert!((j.value - g(u0)).norm() < 1e-14);
        assert!((j.slope - fd).norm() < 1e-8);
    }
}
