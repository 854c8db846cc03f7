//! Unit conversions. All physics runs in Hartree atomic units.

/// 1 Hartree in eV.
pub const HARTREE_EV: f64 = 27.211386;

/// 1 Bohr in Ångström.
pub const BOHR_ANGSTROM: f64 = 0.529177;

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT_AU: f64 = 137.036;

#[inline]
pub fn ev_to_au(ev: f64) -> f64 {
    ev / HARTREE_EV
}

#[inline]
pub fn au_to_ev(au: f64) -> f64 {
    au * HARTREE_EV
}

#[inline]
pub fn bohr_to_milliangstrom(bohr: f64) -> f64 {
    bohr * BOHR_ANGSTROM * 1.0e3
}

#[inline]
pub fn milliangstrom_to_bohr(ma: f64) -> f64 {
    ma / (BOHR_ANGSTROM * 1.0e3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((au_to_ev(ev_to_au(2.3)) - 2.3).abs() < 1e-14);
        assert!((milliangstrom_to_bohr(bohr_to_milliangstrom(0.0016)) - 0.0016).abs() < 1e-16);
    }

    #[test]
    fn bond_shift_headline_in_bohr() {
        // 0.84 mÅ is about 1.59e-3 bohr
        let b = milliangstrom_to_bohr(0.84);
        assert!((b - 1.5874e-3).abs() < 1e-6);
    }
}
