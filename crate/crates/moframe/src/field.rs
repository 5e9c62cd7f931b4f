//! Scalars the Taylor engine can run over: exact rationals for pointwise
//! work, rational functions for symbolic work.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::expr::{Expr, Q};

pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_q(&Q::from_integer(BigInt::from(n)))
    }

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    /// Exact comparison with 1.
    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
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
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
}

impl Field for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn from_q(q: &Q) -> Self {
        Expr::constant(q.clone())
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
    fn inv(&self) -> Option<Self> {
        Expr::inv(self).ok()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn is_one(&self) -> bool {
        Expr::is_one(self)
    }
}
