use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{FromPrimitive, PrimInt, ToPrimitive, Unsigned};

/// Integer edge weight. Cut values are summed in the same type, so pick a
/// width that holds `m * max_weight`.
pub trait Weight:
    PrimInt + Unsigned + FromPrimitive + Sum + Hash + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    fn to_u128(self) -> u128 {
        ToPrimitive::to_u128(&self).expect("weight fits u128")
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("weight fits f64")
    }

    fn from_u64(x: u64) -> Option<Self> {
        FromPrimitive::from_u64(x)
    }
}

impl<T> Weight for T where
    T: PrimInt + Unsigned + FromPrimitive + Sum + Hash + Debug + Display + FromStr + Default + Send + Sync + 'static
{
}

/// `n^c`, saturating at `u64::MAX`.
pub fn pow_saturating(n: u64, c: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..c {
        acc = acc.saturating_mul(n);
    }
    acc
}

/// Ceiling of `log2(x)` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}
