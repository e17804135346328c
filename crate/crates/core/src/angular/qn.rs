use std::fmt;

use crate::error::{Error, Result};

/// Non-negative angular momentum quantum number, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AngularMomentum(u32);

/// Signed magnetic projection `m`, stored as `2m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Projection(i32);

impl AngularMomentum {
    pub const ZERO: Self = Self(0);

    pub const fn from_twice(twice: u32) -> Self {
        Self(twice)
    }

    pub const fn integer(j: u32) -> Self {
        Self(2 * j)
    }

    /// Checked conversion from a signed twice-value (file input).
    pub fn try_from_twice(twice: i64) -> Result<Self> {
        u32::try_from(twice)
            .map(Self)
            .map_err(|_| Error::InvalidQuantumNumber(format!("2j = {twice} must be non-negative")))
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    pub const fn multiplicity(self) -> u32 {
        self.0 + 1
    }

    /// True when `m` is a legal projection of this `j`.
    pub fn admits(self, m: Projection) -> bool {
        m.0.unsigned_abs() <= self.0 && (self.0 as i32 - m.0) % 2 == 0
    }

    /// Projections `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = Projection> + Clone {
        let t = self.0 as i32;
        (-t..t + 1).step_by(2).map(Projection)
    }

    /// Stretched projection `m = j`.
    pub fn stretched(self) -> Projection {
        Projection(self.0 as i32)
    }

    pub fn checked_sub(self, other: Self) -> Option<Self> {
        self.0.checked_sub(other.0).map(Self)
    }
}

impl Projection {
    pub const ZERO: Self = Self(0);

    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn integer(m: i32) -> Self {
        Self(2 * m)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn abs(self) -> AngularMomentum {
        AngularMomentum(self.0.unsigned_abs())
    }
}

impl std::ops::Neg for Projection {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl std::ops::Add for Projection {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Projection {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

fn fmt_half(twice: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if twice % 2 == 0 {
        write!(f, "{}", twice / 2)
    } else {
        write!(f, "{twice}/2")
    }
}

impl fmt::Display for AngularMomentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_half(self.0 as i64, f)
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_half(self.0 as i64, f)
    }
}

/// True when `(a, b, c)` can couple: triangle inequality plus integer perimeter.
pub fn triangle(a: AngularMomentum, b: AngularMomentum, c: AngularMomentum) -> bool {
    let (a, b, c) = (a.0, b.0, c.0);
    (a + b + c) % 2 == 0 && c <= a + b && a <= b + c && b <= a + c
}

/// All `j` obtained by coupling `a` and `b`: `|a-b|, ..., a+b`.
pub fn coupled_range(
    a: AngularMomentum,
    b: AngularMomentum,
) -> impl DoubleEndedIterator<Item = AngularMomentum> + Clone {
    let lo = a.0.abs_diff(b.0);
    (lo..a.0 + b.0 + 1).step_by(2).map(AngularMomentum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projections_cover_multiplet() {
        let j = AngularMomentum::from_twice(7);
        let ms: Vec<i32> = j.projections().map(Projection::twice).collect();
        assert_eq!(ms, vec![-7, -5, -3, -1, 1, 3, 5, 7]);
        assert!(j.admits(Projection::from_twice(-3)));
        assert!(!j.admits(Projection::from_twice(2)));
        assert!(!j.admits(Projection::from_twice(9)));
    }

    #[test]
    fn coupling_range_and_triangle() {
        let i = AngularMomentum::integer(7);
        let j = AngularMomentum::integer(1);
        let fs: Vec<u32> = coupled_range(i, j).map(AngularMomentum::twice).collect();
        assert_eq!(fs, vec![12, 14, 16]);
        assert!(triangle(i, j, AngularMomentum::integer(8)));
        assert!(!triangle(i, j, AngularMomentum::integer(9)));
        assert!(!triangle(i, j, AngularMomentum::from_twice(13)));
    }

    #[test]
    fn display_uses_fractions() {
        assert_eq!(AngularMomentum::from_twice(7).to_string(), "7/2");
        assert_eq!(Projection::from_twice(-4).to_string(), "-2");
        assert_eq!(Projection::from_twice(-3).to_string(), "-3/2");
    }

    #[test]
    fn negative_twice_rejected() {
        assert!(AngularMomentum::try_from_twice(-1).is_err());
        assert_eq!(AngularMomentum::try_from_twice(5).unwrap().twice(), 5);
    }
}
