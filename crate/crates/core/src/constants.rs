//! Physical constants used for unit conversion.
//!
//! All energies in this crate are carried as frequencies (E/h, in Hz) and all
//! magnetic fields in gauss.

use std::f64::consts::PI;

/// One record holding every physical constant the crate needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    /// Bohr magneton over Planck's constant, Hz/G.
    pub mu_b_over_h: f64,
    /// Planck constant, J s.
    pub h: f64,
    /// Elementary charge, C.
    pub e: f64,
    /// Bohr radius, m.
    pub a0: f64,
}

/// μB/h = 1.399624604 MHz/G; h, e and a₀ at CODATA 2018 values.
pub const CONSTANTS: Constants = Constants {
    mu_b_over_h: 1.399_624_604e6,
    h: 6.626_070_15e-34,
    e: 1.602_176_634e-19,
    a0: 5.291_772_109_03e-11,
};

impl Constants {
    pub fn hbar(&self) -> f64 {
        self.h / (2.0 * PI)
    }

    /// Frequency equivalent of an `e·a₀²` quadrupole moment in a potential
    /// curvature of 1 V/m², in Hz.
    pub fn quadrupole_hz_per_v_m2(&self) -> f64 {
        self.e * self.a0 * self.a0 / self.h
    }
}

/// Gauss per tesla.
pub const GAUSS_PER_TESLA: f64 = 1.0e4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrupole_unit_matches_hand_value() {
        // e a0^2 / h = 1.602176634e-19 * (5.29177210903e-11)^2 / 6.62607015e-34
        let v = CONSTANTS.quadrupole_hz_per_v_m2();
        assert!((v - 6.771_059_5e-7).abs() < 1e-14, "{v}");
    }

    #[test]
    fn hbar_is_h_over_two_pi() {
        assert!((CONSTANTS.hbar() - 1.054_571_817e-34).abs() < 1e-42);
    }
}
