//! Integer unit systems for the hot loops.
//!
//! Gluing and the tuple dynamic program only add, compare and floor-divide
//! profits and sizes. Multiplying every profit by a common denominator `M`
//! (chosen so that `T` and `K` also become integers) and every size by the
//! lcm `L` of the size denominators turns all of that into integer
//! arithmetic without changing a single comparison or floor. [`Units`] is
//! implemented for `i128`, used whenever the scaled magnitudes fit, and for
//! `BigInt` otherwise.

use std::fmt::Debug;

use num::bigint::BigInt;
use num::integer::Integer;
use num::traits::{One, ToPrimitive};

use crate::model::{EpsParams, IntervalIndex};
use crate::rational::Rational;

/// Integer type that can carry scaled profits and sizes.
pub trait Units: Clone + Ord + Debug + Integer + Send + Sync + 'static {
    const LABEL: &'static str;
    fn from_big(value: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Units for i128 {
    const LABEL: &'static str = "i128";

    fn from_big(value: &BigInt) -> Option<Self> {
        value.to_i128()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Units for BigInt {
    const LABEL: &'static str = "bigint";

    fn from_big(value: &BigInt) -> Option<Self> {
        Some(value.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Scaled copy of the interval geometry of [`EpsParams`].
#[derive(Clone, Debug)]
pub struct UnitSystem<N> {
    profit_den: BigInt,
    size_den: BigInt,
    pub capacity: N,
    pub p0: N,
    pub t: N,
    pub k_const: N,
    pub kappa: usize,
    pub gamma_max: usize,
    pub xi0: usize,
    xi_base: N,
    xi_width: N,
    two_p0: N,
}

/// Smallest profit scale that makes every listed profit, `T` and `K` integral.
pub fn profit_scale<'a>(params: &EpsParams, profits: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut lcm = params.p0.denom().clone();
    for p in profits {
        lcm = lcm.lcm(p.denom());
    }
    // K = p0 / (2^(2 kappa + 1) (kappa + 1)) and T = p0 / 2^kappa.
    lcm * (BigInt::one() << (2 * params.kappa + 1)) * BigInt::from(params.kappa + 1)
}

pub fn size_scale<'a>(sizes: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    sizes
        .into_iter()
        .fold(BigInt::one(), |acc, s| acc.lcm(s.denom()))
}

impl<N: Units> UnitSystem<N> {
    /// Returns `None` when the scaled magnitudes could overflow `N`.
    ///
    /// The bound checked is `8 * 2 p0 * M` for profits and `4 L` for sizes,
    /// which covers every sum the algorithms form before a capacity test.
    pub fn new(params: &EpsParams, profit_den: BigInt, size_den: BigInt) -> Option<Self> {
        let scaled = |r: &Rational| -> Option<N> {
            let v = r.mul_int(profit_den.clone());
            debug_assert!(v.is_integer(), "profit scale does not clear {r}");
            N::from_big(&v.floor())
        };
        let headroom = params.p0.mul_int(profit_den.clone() * 16u32).floor();
        N::from_big(&headroom)?;
        N::from_big(&(size_den.clone() * 4u32))?;

        let kappa = params.kappa();
        let p0 = scaled(&params.p0)?;
        let t = scaled(&params.t)?;
        let k_const = scaled(&params.k_const)?;
        let xi_base = scaled(&params.xi_base())?;
        let xi_width = scaled(&params.xi_width())?;
        let two_p0 = scaled(&params.p0.mul_int(2))?;
        Some(UnitSystem {
            capacity: N::from_big(&size_den)?,
            profit_den,
            size_den,
            p0,
            t,
            k_const,
            kappa,
            gamma_max: params.gamma_max,
            xi0: params.xi0,
            xi_base,
            xi_width,
            two_p0,
        })
    }

    pub fn profit_denominator(&self) -> &BigInt {
        &self.profit_den
    }

    pub fn size_denominator(&self) -> &BigInt {
        &self.size_den
    }

    /// Scales a profit; the value must be representable.
    pub fn profit_units(&self, profit: &Rational) -> N {
        let v = profit.mul_int(self.profit_den.clone());
        assert!(v.is_integer(), "profit {profit} not on the unit grid");
        N::from_big(&v.floor()).expect("profit within unit range")
    }

    pub fn size_units(&self, size: &Rational) -> N {
        let v = size.mul_int(self.size_den.clone());
        assert!(v.is_integer(), "size {size} not on the unit grid");
        N::from_big(&v.floor()).expect("size within unit range")
    }

    pub fn profit_value(&self, units: &N) -> Rational {
        Rational::new(units.to_big(), self.profit_den.clone()).expect("nonnegative units")
    }

    pub fn size_value(&self, units: &N) -> Rational {
        Rational::new(units.to_big(), self.size_den.clone()).expect("nonnegative units")
    }

    pub fn two_p0(&self) -> &N {
        &self.two_p0
    }

    /// Scaled version of [`EpsParams::interval_index`]; `None` outside `[T, 2 p0)`.
    pub fn interval_index(&self, p: &N) -> Option<IntervalIndex> {
        if *p < self.t || *p >= self.two_p0 {
            return None;
        }
        let mut k = 0;
        let mut lo = self.t.clone();
        let mut width = self.k_const.clone();
        while k < self.kappa {
            let next = lo.clone() + lo.clone();
            if *p < next {
                break;
            }
            lo = next;
            width = width.clone() + width.clone();
            k += 1;
        }
        let gamma = (p.clone() - lo) / width;
        let gamma = gamma.to_big().to_usize()?;
        Some(IntervalIndex { k, gamma })
    }

    /// Scaled version of [`EpsParams::xi_index`]; `None` outside `[p0/4, 2 p0]`.
    pub fn xi_index(&self, p: &N) -> Option<usize> {
        if *p < self.xi_base || *p > self.two_p0 {
            return None;
        }
        let xi = (p.clone() - self.xi_base.clone()) / self.xi_width.clone();
        xi.to_big().to_usize()
    }

    /// `floor(volume / size)` as a copy count.
    pub fn copies_within(&self, volume: &N, size: &N) -> N {
        if size.is_zero() {
            return N::zero();
        }
        volume.div_floor(size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn scaled_geometry_matches_rational() {
        let params = EpsParams::normalize(&r(1, 8), &r(6, 5)).unwrap();
        let profits = [r(3, 10), r(7, 11), r(1, 2)];
        let m = profit_scale(&params, profits.iter());
        let l = size_scale([r(1, 3), r(2, 7)].iter());
        let small: UnitSystem<i128> = UnitSystem::new(&params, m.clone(), l.clone()).unwrap();
        let big: UnitSystem<BigInt> = UnitSystem::new(&params, m, l).unwrap();
        for p in profits.iter() {
            let want = params.interval_index(p).ok();
            assert_eq!(small.interval_index(&small.profit_units(p)), want);
            assert_eq!(big.interval_index(&big.profit_units(p)), want);
            let xi = params.xi_index(p).ok();
            assert_eq!(small.xi_index(&small.profit_units(p)), xi);
        }
        assert_eq!(small.profit_value(&small.t), params.t);
        assert_eq!(small.profit_value(&small.k_const), params.k_const);
        assert_eq!(small.size_value(&small.capacity), Rational::one());
    }

    #[test]
    fn i128_refuses_huge_scales() {
        let params = EpsParams::normalize(&r(1, 4), &r(1, 1)).unwrap();
        let huge: BigInt = BigInt::one() << 200u32;
        assert!(UnitSystem::<i128>::new(&params, huge.clone(), BigInt::one()).is_none());
        assert!(UnitSystem::<BigInt>::new(&params, huge, BigInt::one()).is_some());
    }
}
