//! The (1+1)-dimensional Dirac oscillator in its anti-Jaynes-Cummings form:
//! model parameters, the Hamiltonian, the analytic spectrum, and the dressed
//! eigenstates. This module is the analytic oracle the rest of the crate
//! tests against.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{
    self, Factor, Operator, PauliAxis, SpaceDescriptor, StateVector, P_ZPT, X_ZPT,
};

/// Relativistic parameter ε = ħω/mc² and the constants derived from it in
/// natural units ħ = m = ω = 1 (so mc² = 1/ε and η = −i·mc²·√(2ε)).
#[derive(Clone, Copy, Debug)]
pub struct DiracParams {
    pub epsilon: f64,
    pub mc2: f64,
    pub eta: C64,
    pub x_zpt: f64,
    pub p_zpt: f64,
}

impl DiracParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "relativistic parameter must be finite and positive, got {epsilon}"
            )));
        }
        let mc2 = 1.0 / epsilon;
        Ok(DiracParams {
            epsilon,
            mc2,
            eta: C64::new(0.0, -mc2 * (2.0 * epsilon).sqrt()),
            x_zpt: X_ZPT,
            p_zpt: P_ZPT,
        })
    }
}

/// Energy branch selector: positive (spin-up tower) or negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Dressed-state superposition coefficients A_n, B_n (n ≥ 1).
#[derive(Clone, Copy, Debug)]
pub struct DressedCoeffs {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

/// Ĥ_D = η σ̂₋ â + η* σ̂₊ â† + mc² σ̂_z.
pub fn build_h_dirac(params: &DiracParams, space: &SpaceDescriptor) -> Result<Operator> {
    if !space.has_dirac_spin() {
        return Err(Error::Config(
            "Dirac Hamiltonian needs the Dirac spin factor".into(),
        ));
    }
    let (a, adag) = hilbert::ladder(space, Factor::Oscillator)?;
    let sm = hilbert::pauli(space, PauliAxis::Minus, Factor::DiracSpin)?;
    let sp = hilbert::pauli(space, PauliAxis::Plus, Factor::DiracSpin)?;
    let sz = hilbert::pauli(space, PauliAxis::Z, Factor::DiracSpin)?;
    let h = &(&(&sm * &a).scale(params.eta) + &(&sp * &adag).scale(params.eta.conj()))
        + &sz.scale_re(params.mc2);
    h.assert_hermitian("build_h_dirac")?;
    Ok(h)
}

/// Analytic eigenenergies: E_n⁺ = mc²√(1+2nε), E_n⁻ = −mc²√(1+2(n+1)ε).
pub fn analytic_energy(n: usize, branch: Branch, params: &DiracParams) -> f64 {
    let e = params.epsilon;
    match branch {
        Branch::Plus => params.mc2 * (1.0 + 2.0 * n as f64 * e).sqrt(),
        Branch::Minus => -params.mc2 * (1.0 + 2.0 * (n as f64 + 1.0) * e).sqrt(),
    }
}

/// A_n = √((E_n⁺+mc²)/2E_n⁺), B_n = √((E_n⁺−mc²)/2E_n⁺); defined for n ≥ 1.
pub fn dressed_coeffs(n: usize, params: &DiracParams) -> Result<DressedCoeffs> {
    if n == 0 {
        return Err(Error::Domain(
            "dressed coefficients are undefined at n = 0; |E₀⁺⟩ = |0,↑⟩".into(),
        ));
    }
    let e = analytic_energy(n, Branch::Plus, params);
    let a = ((e + params.mc2) / (2.0 * e)).sqrt();
    let b = ((e - params.mc2) / (2.0 * e)).sqrt();
    Ok(DressedCoeffs { n, a, b })
}

/// A_n and B_n extended to n = 0 (A₀ = 1, B₀ = 0), as scalars.
pub(crate) fn coeff_a(n: usize, params: &DiracParams) -> f64 {
    if n == 0 {
        1.0
    } else {
        dressed_coeffs(n, params).expect("n >= 1").a
    }
}

pub(crate) fn coeff_b(n: usize, params: &DiracParams) -> f64 {
    if n == 0 {
        0.0
    } else {
        dressed_coeffs(n, params).expect("n >= 1").b
    }
}

/// Dressed eigenstate |E_n^±⟩ of Ĥ_D.
///
/// |E_n⁺⟩ = A_n|n,↑⟩ − iB_n|n−1,↓⟩ (with |E₀⁺⟩ = |0,↑⟩) and
/// |E_n⁻⟩ = B_{n+1}|n+1,↑⟩ + iA_{n+1}|n,↓⟩.
pub fn dressed_state(
    n: usize,
    branch: Branch,
    params: &DiracParams,
    space: &SpaceDescriptor,
) -> Result<StateVector> {
    if !space.has_dirac_spin() {
        return Err(Error::Config(
            "dressed states need the Dirac spin factor".into(),
        ));
    }
    let nmax = space.osc_dim();
    let mut amps = Array1::<C64>::zeros(space.dim());
    match branch {
        Branch::Plus => {
            if n >= nmax {
                return Err(Error::Truncation {
                    msg: format!("|E_{n}⁺⟩ exceeds the Fock cutoff"),
                    suggested_dim: n + 2,
                });
            }
            if n == 0 {
                amps[space.flat_index(&[(Factor::Oscillator, 0), (Factor::DiracSpin, 0)])] =
                    C64::new(1.0, 0.0);
            } else {
                let c = dressed_coeffs(n, params)?;
                amps[space.flat_index(&[(Factor::Oscillator, n), (Factor::DiracSpin, 0)])] =
                    C64::new(c.a, 0.0);
                amps[space.flat_index(&[(Factor::Oscillator, n - 1), (Factor::DiracSpin, 1)])] =
                    C64::new(0.0, -c.b);
            }
        }
        Branch::Minus => {
            if n + 1 >= nmax {
                return Err(Error::Truncation {
                    msg: format!("|E_{n}⁻⟩ exceeds the Fock cutoff"),
                    suggested_dim: n + 3,
                });
            }
            let c = dressed_coeffs(n + 1, params)?;
            amps[space.flat_index(&[(Factor::Oscillator, n + 1), (Factor::DiracSpin, 0)])] =
                C64::new(c.b, 0.0);
            amps[space.flat_index(&[(Factor::Oscillator, n), (Factor::DiracSpin, 1)])] =
                C64::new(0.0, c.a);
        }
    }
    StateVector::from_amplitudes(space.clone(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{expectation, make_space, pauli, ProductParts};
    use crate::linalg;

    #[test]
    fn params_invariants() {
        for &eps in &[1e-6, 1e-3, 0.1, 1.0, 10.0, 1e3] {
            let p = DiracParams::new(eps).unwrap();
            assert!((p.mc2 * p.epsilon - 1.0).abs() < 1e-14);
            // |η|² = 2ħω·mc²
            assert!((p.eta.norm_sqr() - 2.0 * p.mc2).abs() < 1e-9 * p.mc2);
        }
        assert!(DiracParams::new(0.0).is_err());
        assert!(DiracParams::new(-1.0).is_err());
    }

    #[test]
    fn energies_and_branch_relation() {
        let p = DiracParams::new(0.1).unwrap();
        // E₀⁺ = mc²
        assert!((analytic_energy(0, Branch::Plus, &p) - p.mc2).abs() < 1e-12);
        // E_n⁻ = −E_{n+1}⁺
        for n in 0..=10 {
            let lhs = analytic_energy(n, Branch::Minus, &p);
            let rhs = -analytic_energy(n + 1, Branch::Plus, &p);
            assert!((lhs - rhs).abs() < 1e-12);
        }
        // extreme limit: E_n⁺/mc² → √(2nε) within 0.01%
        let p = DiracParams::new(1e3).unwrap();
        let n = 10_000;
        let full = analytic_energy(n, Branch::Plus, &p) / p.mc2;
        let approx = (2.0 * n as f64 * p.epsilon).sqrt();
        assert!((full - approx).abs() / approx < 1e-4);
    }

    #[test]
    fn spectrum_matches_diagonalization() {
        let space = make_space(60, true, 0, false).unwrap();
        let p = DiracParams::new(0.1).unwrap();
        let h = build_h_dirac(&p, &space).unwrap();
        assert!(h.hermiticity_deviation() < 1e-12);
        let (w, _) = linalg::eigh(&h.matrix().view()).unwrap();
        // sorted positive eigenvalues match E_n⁺ for n = 0..30
        let pos: Vec<f64> = w.iter().cloned().filter(|&x| x > 0.0).collect();
        for n in 0..=30 {
            let expect = analytic_energy(n, Branch::Plus, &p);
            assert!(
                (pos[n] - expect).abs() < 1e-10,
                "n={n}: {} vs {expect}",
                pos[n]
            );
        }
    }

    #[test]
    fn uncoupled_limit_is_pure_rest_energy() {
        // with the coupling removed, H = mc²σ̂_z: eigenvalues ±mc², osc_dim-fold
        let space = make_space(60, true, 0, false).unwrap();
        let p = DiracParams::new(0.1).unwrap();
        let sz = pauli(&space, PauliAxis::Z, Factor::DiracSpin).unwrap();
        let h0 = sz.scale_re(p.mc2);
        let (w, _) = linalg::eigh(&h0.matrix().view()).unwrap();
        assert_eq!(w.iter().filter(|&&x| (x - p.mc2).abs() < 1e-10).count(), 60);
        assert_eq!(w.iter().filter(|&&x| (x + p.mc2).abs() < 1e-10).count(), 60);
        // ⟨0,↑|Ĥ_D|0,↑⟩ = mc² (n = 0 is uncoupled)
        let h = build_h_dirac(&p, &space).unwrap();
        let up = crate::hilbert::product_state(&space, &ProductParts::default()).unwrap();
        assert!((expectation(&up, &h).unwrap().re - p.mc2).abs() < 1e-12);
    }

    #[test]
    fn dressed_coefficients_limits() {
        // weak limit: A_n → 1, B_n → 0
        let p = DiracParams::new(1e-8).unwrap();
        let c1 = dressed_coeffs(1, &p).unwrap();
        assert!((c1.a - 1.0).abs() < 1e-4);
        assert!(c1.b < 1e-4);
        // and B_n tracks its leading form √(nε/2)
        for n in 1..=6 {
            let c = dressed_coeffs(n, &p).unwrap();
            let lead = (n as f64 * p.epsilon / 2.0).sqrt();
            assert!((c.b - lead).abs() < 0.1 * lead);
        }
        // extreme limit: A_n ≈ B_n ≈ 1/√2
        let p = DiracParams::new(1e6).unwrap();
        for n in 1..=6 {
            let c = dressed_coeffs(n, &p).unwrap();
            assert!((c.a - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
            assert!((c.b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
        }
        // normalization
        let p = DiracParams::new(0.1).unwrap();
        let c = dressed_coeffs(1, &p).unwrap();
        assert!((c.a * c.a + c.b * c.b - 1.0).abs() < 1e-12);
        // n = 0 is out of domain
        assert!(dressed_coeffs(0, &p).is_err());
    }

    #[test]
    fn dressed_states_are_eigenstates() {
        let space = make_space(40, true, 0, false).unwrap();
        let p = DiracParams::new(0.1).unwrap();
        let h = build_h_dirac(&p, &space).unwrap();

        // (0, +) is exactly |0,↑⟩
        let g = dressed_state(0, Branch::Plus, &p, &space).unwrap();
        let idx = space.flat_index(&[(Factor::Oscillator, 0), (Factor::DiracSpin, 0)]);
        assert!((g.amplitudes()[idx] - C64::new(1.0, 0.0)).norm() < 1e-15);

        // eigenstate residual ‖(H − E)ψ‖ ≤ 1e-9
        for (n, branch) in [(3, Branch::Plus), (3, Branch::Minus), (7, Branch::Plus)] {
            let psi = dressed_state(n, branch, &p, &space).unwrap();
            let e = analytic_energy(n, branch, &p);
            let hpsi = h.apply(&psi).unwrap();
            let resid: f64 = hpsi
                .amplitudes()
                .iter()
                .zip(psi.amplitudes().iter())
                .map(|(hp, pp)| (hp - pp * e).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-9, "residual {resid} for n={n} {branch:?}");
        }

        // cross-branch orthogonality for n, m ≤ 10
        for n in 0..=10usize {
            let plus = dressed_state(n, Branch::Plus, &p, &space).unwrap();
            for m in 0..=10usize {
                let minus = dressed_state(m, Branch::Minus, &p, &space).unwrap();
                assert!(plus.inner(&minus).unwrap().norm() < 1e-12);
            }
        }

        // beyond the cutoff margin is a truncation error
        assert!(dressed_state(40, Branch::Plus, &p, &space).is_err());
        assert!(dressed_state(39, Branch::Minus, &p, &space).is_err());
    }

    #[test]
    fn level_spacing_decreases() {
        let p = DiracParams::new(0.3).unwrap();
        let mut prev = f64::INFINITY;
        for n in 0..40 {
            let gap = analytic_energy(n + 1, Branch::Plus, &p) - analytic_energy(n, Branch::Plus, &p);
            assert!(gap < prev, "anharmonic spacing must shrink with n");
            prev = gap;
        }
    }
}
