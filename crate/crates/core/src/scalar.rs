//! Scalar backends shared by the geometric code.
//!
//! `f64` compares against a global tolerance; [`MultiQuad`] is exact.

use std::fmt::Debug;
use std::sync::OnceLock;

use num::{BigRational, ToPrimitive};

use crate::arith::MultiQuad;

const DEFAULT_EPS: f64 = 1e-9;

/// Classification tolerance for the binary64 backend.
///
/// Read once from `HYPERCOX_EPS`; falls back to `1e-9`.
pub fn eps() -> f64 {
    static EPS: OnceLock<f64> = OnceLock::new();
    *EPS.get_or_init(|| {
        std::env::var("HYPERCOX_EPS")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e > 0.0)
            .unwrap_or(DEFAULT_EPS)
    })
}

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Square root of a nonnegative rational.
    fn sqrt_rational(r: &BigRational) -> Self;
    /// Binary64 input; the exact backend accepts integers only.
    fn from_f64(x: f64) -> Option<Self>;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` when `o` is zero.
    fn div(&self, o: &Self) -> Option<Self>;
    /// Square root when it exists in the backend (`f64`: any `x >= 0`;
    /// exact: nonnegative rationals only).
    fn sqrt(&self) -> Option<Self>;

    /// Sign in {-1, 0, 1}; `f64` treats `|x| < eps()` as zero.
    fn signum(&self) -> i8;
    fn to_f64(&self) -> f64;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
    fn sqrt_int(n: i64) -> Self {
        Self::sqrt_rational(&BigRational::from_integer(n.into()))
    }
    fn is_zero(&self) -> bool {
        self.signum() == 0
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn sqrt_rational(r: &BigRational) -> Self {
        Self::from_rational(r).sqrt()
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if *o == 0.0 {
            None
        } else {
            Some(self / o)
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if *self < -eps() {
            None
        } else {
            Some(self.max(0.0).sqrt())
        }
    }
    fn signum(&self) -> i8 {
        if self.abs() < eps() {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for MultiQuad {
    const EXACT: bool = true;

    fn zero() -> Self {
        MultiQuad::zero()
    }
    fn one() -> Self {
        MultiQuad::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        MultiQuad::from_rational(BigRational::new(num.into(), den.into()))
    }
    fn from_rational(r: &BigRational) -> Self {
        MultiQuad::from_rational(r.clone())
    }
    fn sqrt_rational(r: &BigRational) -> Self {
        MultiQuad::sqrt_rational(r).expect("square root of a negative or oversized rational")
    }
    fn from_f64(x: f64) -> Option<Self> {
        (x.fract() == 0.0 && x.abs() < 9e15).then(|| MultiQuad::from_int(x as i64))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().ok().map(|i| self * &i)
    }
    fn sqrt(&self) -> Option<Self> {
        let r = self.as_rational()?;
        MultiQuad::sqrt_rational(&r).ok()
    }
    fn signum(&self) -> i8 {
        self.sign()
    }
    fn to_f64(&self) -> f64 {
        MultiQuad::to_f64(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_tolerance() {
        assert_eq!(1e-12f64.signum_tol(), 0);
        assert_eq!((-0.5f64).signum_tol(), -1);
    }

    trait SignTol {
        fn signum_tol(&self) -> i8;
    }
    impl SignTol for f64 {
        fn signum_tol(&self) -> i8 {
            Scalar::signum(self)
        }
    }

    #[test]
    fn exact_sqrt_only_for_rationals() {
        let two = MultiQuad::from_ratio(2, 1);
        let r2 = Scalar::sqrt(&two).unwrap();
        assert_eq!(r2.mul(&r2), two);
        assert!(Scalar::sqrt(&r2).is_none());
    }
}
