//! Order-of-magnitude SI estimates for laboratory implementations: a bare
//! electron deep in the relativistic regime, and a cold-atom simulator with
//! an effective light speed.

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34; // J·s
pub const EV: f64 = 1.602_176_634e-19; // J

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Platform {
    Electron,
    ColdAtom,
}

/// Inputs for a scale estimate (SI units except the dimensionless ε, n).
#[derive(Clone, Copy, Debug)]
pub struct ScaleInputs {
    pub mass_kg: f64,
    pub c_eff_m_per_s: f64,
    pub epsilon: f64,
    pub n_excitation: f64,
}

/// Resulting orders of magnitude.
#[derive(Clone, Copy, Debug)]
pub struct ScaleEstimate {
    pub inputs: ScaleInputs,
    pub omega_hz: f64,
    pub delta_x1_m: f64,
    pub energy_ev: f64,
}

/// Platform presets at the relativistic operating point ε ~ 10³, n ~ 10⁴.
pub fn preset(platform: Platform) -> ScaleInputs {
    match platform {
        Platform::Electron => ScaleInputs {
            mass_kg: 1e-31,
            c_eff_m_per_s: 3e8,
            epsilon: 1e3,
            n_excitation: 1e4,
        },
        Platform::ColdAtom => ScaleInputs {
            mass_kg: 1e-27,
            c_eff_m_per_s: 1e-2,
            epsilon: 1e3,
            n_excitation: 1e4,
        },
    }
}

/// ω = ε·mc²/ħ, ΔX₁ = √(ħ/2mω), E ~ ⟨Ĥ_r⟩ = mc²√(2nε).
pub fn estimate(inputs: ScaleInputs) -> Result<ScaleEstimate> {
    if inputs.mass_kg <= 0.0
        || inputs.c_eff_m_per_s <= 0.0
        || inputs.epsilon <= 0.0
        || inputs.n_excitation <= 0.0
    {
        return Err(Error::Domain("scale inputs must be positive".into()));
    }
    let mc2 = inputs.mass_kg * inputs.c_eff_m_per_s * inputs.c_eff_m_per_s;
    let omega = inputs.epsilon * mc2 / HBAR;
    let delta_x1 = (HBAR / (2.0 * inputs.mass_kg * omega)).sqrt();
    let energy_j = mc2 * (2.0 * inputs.n_excitation * inputs.epsilon).sqrt();
    Ok(ScaleEstimate {
        inputs,
        omega_hz: omega,
        delta_x1_m: delta_x1,
        energy_ev: energy_j / EV,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decades_apart(a: f64, b: f64) -> f64 {
        (a / b).log10().abs()
    }

    #[test]
    fn electron_preset_orders_of_magnitude() {
        let e = estimate(preset(Platform::Electron)).unwrap();
        assert!(decades_apart(e.omega_hz, 1e23) <= 1.0, "ω = {:.3e}", e.omega_hz);
        assert!(decades_apart(e.delta_x1_m, 1e-13) <= 1.0, "ΔX₁ = {:.3e}", e.delta_x1_m);
    }

    #[test]
    fn cold_atom_preset_orders_of_magnitude() {
        let e = estimate(preset(Platform::ColdAtom)).unwrap();
        assert!(decades_apart(e.omega_hz, 1e6) <= 1.0, "ω = {:.3e}", e.omega_hz);
        assert!(decades_apart(e.delta_x1_m, 1e-7) <= 1.0, "ΔX₁ = {:.3e}", e.delta_x1_m);
        assert!(decades_apart(e.energy_ev, 1e-9) <= 1.5, "E = {:.3e}", e.energy_ev);
    }

    #[test]
    fn formula_scaling() {
        let base = estimate(preset(Platform::ColdAtom)).unwrap();
        let mut scaled_eps = preset(Platform::ColdAtom);
        scaled_eps.epsilon *= 100.0;
        let e = estimate(scaled_eps).unwrap();
        // ω scales linearly in ε, energy as √(nε)
        assert!((e.omega_hz / base.omega_hz - 100.0).abs() < 1e-9);
        assert!((e.energy_ev / base.energy_ev - 10.0).abs() < 1e-9);

        let mut scaled_n = preset(Platform::ColdAtom);
        scaled_n.n_excitation *= 100.0;
        let e = estimate(scaled_n).unwrap();
        assert!((e.energy_ev / base.energy_ev - 10.0).abs() < 1e-9);

        assert!(estimate(ScaleInputs {
            mass_kg: -1.0,
            ..preset(Platform::Electron)
        })
        .is_err());
    }
}
