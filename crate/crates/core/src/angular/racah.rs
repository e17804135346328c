//! Racah sums over exact big-integer rationals.
//!
//! Every 3j and 6j symbol is `±sqrt(q)` with `q` rational. The sums are
//! carried exactly and only the final square root is taken in floating point.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A real number of the form `±sqrt(square)`, `square ≥ 0` rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    negative: bool,
    square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        Self {
            negative: false,
            square: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.negative && !self.is_zero()
    }

    /// The exact square of the value.
    pub fn square(&self) -> &BigRational {
        &self.square
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.square.to_f64().unwrap_or(f64::NAN).sqrt();
        if self.is_negative() {
            -s
        } else {
            s
        }
    }

    fn from_parts(phase_negative: bool, prefactor: BigRational, sum: BigRational) -> Self {
        if sum.is_zero() {
            return Self::zero();
        }
        let negative = phase_negative ^ sum.is_negative();
        let square = prefactor * &sum * &sum;
        Self { negative, square }
    }
}

const TABLE_LEN: usize = 192;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(TABLE_LEN);
        let mut acc = BigInt::one();
        v.push(acc.clone());
        for n in 1..TABLE_LEN {
            acc *= n;
            v.push(acc.clone());
        }
        v
    })
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0, "negative factorial argument {n}");
    let n = n as usize;
    let table = factorial_table();
    if n < table.len() {
        return table[n].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for k in table.len()..=n {
        acc *= k;
    }
    acc
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Half of a twice-value that is known to be even.
fn half(x: i64) -> i64 {
    debug_assert!(x % 2 == 0, "odd twice-value {x} where an integer was expected");
    x / 2
}

/// Triangle coefficient `(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!`, twice-value inputs.
fn delta(a: i64, b: i64, c: i64) -> BigRational {
    let num = factorial(half(a + b - c)) * factorial(half(a - b + c)) * factorial(half(-a + b + c));
    ratio(num, factorial(half(a + b + c) + 1))
}

/// 3j symbol for twice-value arguments that already satisfy every selection
/// rule (parity, range, triangle, `m1+m2+m3 = 0`).
pub(crate) fn three_j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> SignedSqrt {
    let mut prefactor = delta(j1, j2, j3);
    let prod = factorial(half(j1 + m1))
        * factorial(half(j1 - m1))
        * factorial(half(j2 + m2))
        * factorial(half(j2 - m2))
        * factorial(half(j3 + m3))
        * factorial(half(j3 - m3));
    prefactor *= ratio(prod, BigInt::one());

    let k_min = 0.max(half(j2 - j3 - m1)).max(half(j1 - j3 + m2));
    let k_max = half(j1 + j2 - j3).min(half(j1 - m1)).min(half(j2 + m2));

    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(half(j3 - j2 + m1) + k)
            * factorial(half(j3 - j1 - m2) + k)
            * factorial(half(j1 + j2 - j3) - k)
            * factorial(half(j1 - m1) - k)
            * factorial(half(j2 + m2) - k);
        let num = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        sum += ratio(num, den);
    }

    let phase_negative = half(j1 - j2 - m3).rem_euclid(2) == 1;
    SignedSqrt::from_parts(phase_negative, prefactor, sum)
}

/// 6j symbol `{j1 j2 j3; j4 j5 j6}` for twice-value arguments whose four
/// triads are all triangular.
pub(crate) fn six_j(j1: i64, j2: i64, j3: i64, j4: i64, j5: i64, j6: i64) -> SignedSqrt {
    let prefactor = delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3);

    let alphas = [
        half(j1 + j2 + j3),
        half(j1 + j5 + j6),
        half(j4 + j2 + j6),
        half(j4 + j5 + j3),
    ];
    let betas = [
        half(j1 + j2 + j4 + j5),
        half(j2 + j3 + j5 + j6),
        half(j3 + j1 + j6 + j4),
    ];
    let t_min = *alphas.iter().max().expect("four triads");
    let t_max = *betas.iter().min().expect("three sums");

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let mut den = BigInt::one();
        for a in alphas {
            den *= factorial(t - a);
        }
        for b in betas {
            den *= factorial(b - t);
        }
        let mut num = factorial(t + 1);
        if t % 2 == 1 {
            num = -num;
        }
        sum += ratio(num, den);
    }

    SignedSqrt::from_parts(false, prefactor, sum)
}
