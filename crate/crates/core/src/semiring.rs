//! Semirings parameterizing every multiply.
//!
//! Kernels only ever combine stored nonzeros, so a semiring does not need an
//! annihilating zero: `multiply` is never called with a structural zero.

use std::fmt::Debug;
use std::marker::PhantomData;

use num_traits::{One, Zero};

/// Element types that can be stored in a matrix.
pub trait Scalar: Copy + Default + PartialEq + Debug + Send + Sync + 'static {}

impl<T: Copy + Default + PartialEq + Debug + Send + Sync + 'static> Scalar for T {}

/// An additive commutative monoid paired with a multiplicative operation.
pub trait Semiring: Copy + Send + Sync + Debug {
    type Elem: Scalar;

    fn zero(&self) -> Self::Elem;
    fn add(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem;
    fn multiply(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem;
}

/// The ordinary `(+, ×, 0)` semiring.
#[derive(Debug)]
pub struct Arithmetic<T>(PhantomData<T>);

impl<T> Clone for Arithmetic<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Arithmetic<T> {}

impl<T> Default for Arithmetic<T> {
    fn default() -> Self {
        Arithmetic(PhantomData)
    }
}

impl<T> Semiring for Arithmetic<T>
where
    T: Scalar + Zero + std::ops::Mul<Output = T>,
{
    type Elem = T;

    #[inline]
    fn zero(&self) -> T {
        T::zero()
    }

    #[inline]
    fn add(&self, x: T, y: T) -> T {
        x + y
    }

    #[inline]
    fn multiply(&self, x: T, y: T) -> T {
        x * y
    }
}

/// `(+, pair, 0)`: the product of two stored entries is always one, so a
/// masked product counts structural overlap.
#[derive(Debug)]
pub struct PlusPair<T>(PhantomData<T>);

impl<T> Clone for PlusPair<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for PlusPair<T> {}

impl<T> Default for PlusPair<T> {
    fn default() -> Self {
        PlusPair(PhantomData)
    }
}

impl<T> Semiring for PlusPair<T>
where
    T: Scalar + Zero + One,
{
    type Elem = T;

    #[inline]
    fn zero(&self) -> T {
        T::zero()
    }

    #[inline]
    fn add(&self, x: T, y: T) -> T {
        x + y
    }

    #[inline]
    fn multiply(&self, _x: T, _y: T) -> T {
        T::one()
    }
}

pub fn arithmetic_semiring<T>() -> Arithmetic<T> {
    Arithmetic::default()
}

pub fn plus_pair_semiring<T>() -> PlusPair<T> {
    PlusPair::default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_basics() {
        let s = arithmetic_semiring::<i64>();
        assert_eq!(s.add(2, 3), 5);
        assert_eq!(s.multiply(2, 3), 6);
        for x in [-7, 0, 1, 42] {
            assert_eq!(s.add(x, s.zero()), x);
        }
    }

    #[test]
    fn plus_pair_basics() {
        let s = plus_pair_semiring::<i64>();
        assert_eq!(s.multiply(7, 9), 1);
        // dot product of two patterns overlapping in k positions
        let k = 5;
        let dot = (0..k).map(|_| s.multiply(3, 11)).fold(s.zero(), |a, b| s.add(a, b));
        assert_eq!(dot, k);
    }

    proptest! {
        #[test]
        fn additive_monoid_laws(x in -1000i64..1000, y in -1000i64..1000, z in -1000i64..1000) {
            for s in [arithmetic_semiring::<i64>()] {
                prop_assert_eq!(s.add(x, s.add(y, z)), s.add(s.add(x, y), z));
                prop_assert_eq!(s.add(x, y), s.add(y, x));
                prop_assert_eq!(s.add(x, s.zero()), x);
            }
            let p = plus_pair_semiring::<i64>();
            prop_assert_eq!(p.add(x, p.add(y, z)), p.add(p.add(x, y), z));
            prop_assert_eq!(p.add(x, p.zero()), x);
        }
    }
}
