//! Independent reference implementations and shared fixtures.
#![allow(dead_code)]

use hfavg_core::quadrupole::TrapGeometry;
use hfavg_core::{AngularMomentum, Projection};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn am(twice: u32) -> AngularMomentum {
    AngularMomentum::from_twice(twice)
}

pub fn pr(twice: i32) -> Projection {
    Projection::from_twice(twice)
}

fn fact(n: i64) -> BigInt {
    assert!(n >= 0, "negative factorial argument {n}");
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// `±sqrt(square)` with the sign carried separately.
#[derive(Clone, Debug)]
pub struct Exact {
    pub negative: bool,
    pub square: BigRational,
}

impl Exact {
    fn zero() -> Self {
        Self {
            negative: false,
            square: BigRational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.square.to_f64().unwrap().sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }
}

fn half(x: i64) -> i64 {
    assert!(x % 2 == 0, "odd twice-sum {x}");
    x / 2
}

fn tri(a: i64, b: i64, c: i64) -> bool {
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

/// Clebsch-Gordan `⟨j1 m1 j2 m2|j m⟩` from Racah's closed form for the
/// coupling coefficient itself, arguments as twice-values.
pub fn cg(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> Exact {
    if tm1 + tm2 != tm || !tri(tj1, tj2, tj) {
        return Exact::zero();
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
        return Exact::zero();
    }
    let pre = ratio(
        BigInt::from(tj + 1)
            * fact(half(tj + tj1 - tj2))
            * fact(half(tj - tj1 + tj2))
            * fact(half(tj1 + tj2 - tj)),
        fact(half(tj1 + tj2 + tj) + 1),
    ) * ratio(
        fact(half(tj + tm))
            * fact(half(tj - tm))
            * fact(half(tj1 - tm1))
            * fact(half(tj1 + tm1))
            * fact(half(tj2 - tm2))
            * fact(half(tj2 + tm2)),
        BigInt::one(),
    );
    let mut sum = BigRational::zero();
    for k in 0..=half(tj1 + tj2 - tj) {
        let args = [
            k,
            half(tj1 + tj2 - tj) - k,
            half(tj1 - tm1) - k,
            half(tj2 + tm2) - k,
            half(tj - tj2 + tm1) + k,
            half(tj - tj1 - tm2) + k,
        ];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let den = args.iter().fold(BigInt::one(), |acc, &a| acc * fact(a));
        let term = ratio(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Exact::zero();
    }
    Exact {
        negative: sum.is_negative(),
        square: pre * &sum * &sum,
    }
}

/// 3j symbol through its relation to the Clebsch-Gordan coefficient.
pub fn three_j(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64, tm3: i64) -> Exact {
    let c = cg(tj1, tm1, tj2, tm2, tj3, -tm3);
    if c.is_zero() {
        return c;
    }
    let phase_odd = half(tj1 - tj2 - tm3).rem_euclid(2) == 1;
    Exact {
        negative: c.negative ^ phase_odd,
        square: c.square / BigRational::from_integer(BigInt::from(tj3 + 1)),
    }
}

fn delta(a: i64, b: i64, c: i64) -> BigRational {
    ratio(
        fact(half(a + b - c)) * fact(half(a - b + c)) * fact(half(-a + b + c)),
        fact(half(a + b + c) + 1),
    )
}

/// 6j symbol from the Racah single-sum formula, twice-values.
pub fn six_j(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> Exact {
    if !(tri(a, b, c) && tri(a, e, f) && tri(d, b, f) && tri(d, e, c)) {
        return Exact::zero();
    }
    let pre = delta(a, b, c) * delta(a, e, f) * delta(d, b, f) * delta(d, e, c);
    let lo = [a + b + c, a + e + f, d + b + f, d + e + c].into_iter().max().unwrap() / 2;
    let hi = [a + b + d + e, a + c + d + f, b + c + e + f].into_iter().min().unwrap() / 2;
    let mut sum = BigRational::zero();
    for t in lo..=hi {
        let den = [
            t - half(a + b + c),
            t - half(a + e + f),
            t - half(d + b + f),
            t - half(d + e + c),
            half(a + b + d + e) - t,
            half(a + c + d + f) - t,
            half(b + c + e + f) - t,
        ]
        .iter()
        .fold(BigInt::one(), |acc, &x| acc * fact(x));
        let term = ratio(fact(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Exact::zero();
    }
    Exact {
        negative: sum.is_negative(),
        square: pre * &sum * &sum,
    }
}

/// 6j symbol as the contraction of four 3j symbols over all projections.
pub fn six_j_by_contraction(j: [i64; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = j;
    let ms = |tj: i64| (-tj..=tj).step_by(2);
    let mut total = 0.0;
    for m1 in ms(j1) {
        for m2 in ms(j2) {
            let m3 = -m1 - m2;
            if m3.abs() > j3 {
                continue;
            }
            for m5 in ms(j5) {
                let m6 = m5 - m1;
                if m6.abs() > j6 {
                    continue;
                }
                let m4 = m6 - m2;
                if m4.abs() > j4 || -m4 + m5 + m3 != 0 {
                    continue;
                }
                let phase_twice = (j1 - m1) + (j2 - m2) + (j3 - m3) + (j4 - m4) + (j5 - m5) + (j6 - m6);
                let phase = if half(phase_twice).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let a = three_j(j1, j2, j3, -m1, -m2, -m3).to_f64();
                let b = three_j(j1, j5, j6, m1, -m5, m6).to_f64();
                let c = three_j(j4, j2, j6, m4, m2, -m6).to_f64();
                let d = three_j(j4, j5, j3, -m4, m5, m3).to_f64();
                total += phase * a * b * c * d;
            }
        }
    }
    total
}

/// `|a - b| ≤ tol · max(|a|, |b|)`, with exact zeros compared exactly.
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    if a == 0.0 || b == 0.0 {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Geometries with `A` in `[1e5, 1e8]` V/m², `|ε| ≤ 1` and angles in `[0, π]`.
pub fn random_geometries(n: usize, seed: u64) -> Vec<TrapGeometry<f64>> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let a = 10f64.powf(r.gen_range(5.0..8.0)) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            TrapGeometry::new(
                a,
                r.gen_range(-1.0..=1.0),
                r.gen_range(0.0..std::f64::consts::PI),
                r.gen_range(0.0..std::f64::consts::PI),
            )
            .unwrap()
        })
        .collect()
}

/// `n` log-spaced values in `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}
