//! QND quadrature observables of the Dirac oscillator in every regime —
//! weak (spin-dependent frequency ωσ̂_z), extreme (motional σ̂_y frequency
//! operator), and general FW — as explicit time-parameterized operators,
//! plus the matching effective Hamiltonians and minimum-uncertainty states.
//!
//! Time enters analytically: operators are rebuilt per t, never propagated,
//! so the QND matrix identities stay exact.

use num_complex::Complex64 as C64;

use crate::dirac::DiracParams;
use crate::error::{Error, Result};
use crate::fw::{to_dirac, FrequencyOperator, FrequencyRegime, FwUnitary};
use crate::hilbert::{
    self, commutator, interior_mask, masked_frobenius, osc_diagonal, osc_spin_diagonal,
    Factor, Operator, PauliAxis, ProductParts, SpaceDescriptor, Spin, StateVector, X_ZPT,
};

/// Which quadrature of the conjugate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadIndex {
    One,
    Two,
}

/// Regime a quadrature is constructed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Weak,
    WeakNextOrder,
    Strong,
    FwGeneral,
    DiracGeneral,
}

/// A fully specified quadrature observable X̂_ℓ(t).
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub index: QuadIndex,
    pub regime: Regime,
    pub time: f64,
    pub params: DiracParams,
}

/// Which representation a state is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Fw,
    Dirac,
}

/// e^{iω̂_ε t} as a diagonal in the FW basis.
fn omega_eps_phase(params: &DiracParams, space: &SpaceDescriptor, t: f64) -> Result<Operator> {
    osc_spin_diagonal(space, &|n, s| {
        C64::new(0.0, crate::fw::omega_eps_eigenvalue(n, s, params) * t).exp()
    })
}

/// X̂_{ℓ,F}(t): X̂₁ = x_zpt(â e^{iω̂_εt} + h.c.), X̂₂ = i·x_zpt(e^{−iω̂_εt}â† − h.c.).
pub fn quadrature_fw(spec: &QuadratureSpec, space: &SpaceDescriptor) -> Result<Operator> {
    let (a, _) = hilbert::ladder(space, Factor::Oscillator)?;
    let e = omega_eps_phase(&spec.params, space, spec.time)?;
    let ae = &a * &e;
    let out = match spec.index {
        QuadIndex::One => (&ae + &ae.dagger()).scale_re(X_ZPT),
        QuadIndex::Two => (&ae.dagger() - &ae).scale(C64::new(0.0, X_ZPT)),
    };
    out.assert_hermitian("quadrature_fw")?;
    Ok(out)
}

/// Analytic ∂ₜ of [`quadrature_fw`].
pub fn quadrature_fw_dt(spec: &QuadratureSpec, space: &SpaceDescriptor) -> Result<Operator> {
    let (a, _) = hilbert::ladder(space, Factor::Oscillator)?;
    let e = omega_eps_phase(&spec.params, space, spec.time)?;
    let iw = osc_spin_diagonal(space, &|n, s| {
        C64::new(0.0, crate::fw::omega_eps_eigenvalue(n, s, &spec.params))
    })?;
    let d_ae = &a * &(&iw * &e); // d/dt (â e^{iω̂t}) = â (iω̂) e^{iω̂t}
    Ok(match spec.index {
        QuadIndex::One => (&d_ae + &d_ae.dagger()).scale_re(X_ZPT),
        QuadIndex::Two => (&d_ae.dagger() - &d_ae).scale(C64::new(0.0, X_ZPT)),
    })
}

/// X̂_{ℓ,nr}(t): X̂₁ = x̂cos ωt − (p̂σ̂_z/mω)sin ωt, X̂₂ = x̂σ̂_z sin ωt + (p̂/mω)cos ωt.
pub fn quadrature_weak(spec: &QuadratureSpec, space: &SpaceDescriptor) -> Result<Operator> {
    let x = hilbert::position(space, Factor::Oscillator)?;
    let p = hilbert::momentum(space, Factor::Oscillator)?;
    let sz = hilbert::pauli(space, PauliAxis::Z, Factor::DiracSpin)?;
    let (c, s) = (spec.time.cos(), spec.time.sin());
    let out = match spec.index {
        QuadIndex::One => &x.scale_re(c) - &(&p * &sz).scale_re(s),
        QuadIndex::Two => &(&x * &sz).scale_re(s) + &p.scale_re(c),
    };
    out.assert_hermitian("quadrature_weak")?;
    Ok(out)
}

/// Analytic ∂ₜ of [`quadrature_weak`].
pub fn quadrature_weak_dt(spec: &QuadratureSpec, space: &SpaceDescriptor) -> Result<Operator> {
    let x = hilbert::position(space, Factor::Oscillator)?;
    let p = hilbert::momentum(space, Factor::Oscillator)?;
    let sz = hilbert::pauli(space, PauliAxis::Z, Factor::DiracSpin)?;
    let (c, s) = (spec.time.cos(), spec.time.sin());
    Ok(match spec.index {
        QuadIndex::One => &x.scale_re(-s) - &(&p * &sz).scale_re(c),
        QuadIndex::Two => &(&x * &sz).scale_re(c) - &p.scale_re(s),
    })
}

/// e^{iωσ̂_z t} (the substituted spin-dependent frequency).
fn weak_phase(space: &SpaceDescriptor, t: f64) -> Result<Operator> {
    osc_spin_diagonal(space, &|_, s| match s {
        Spin::Up => C64::new(0.0, t).exp(),
        Spin::Down => C64::new(0.0, -t).exp(),
    })
}

/// Weak-regime quadratures with the next-order √ε corrections retained.
pub fn quadrature_weak_next_order(
    spec: &QuadratureSpec,
    space: &SpaceDescriptor,
) -> Result<Operator> {
    let eps = spec.params.epsilon;
    let (a, adag) = hilbert::ladder(space, Factor::Oscillator)?;
    let sp = hilbert::pauli(space, PauliAxis::Plus, Factor::DiracSpin)?;
    let sm = hilbert::pauli(space, PauliAxis::Minus, Factor::DiracSpin)?;
    let e = weak_phase(space, spec.time)?;

    // (â + i√(ε/2)σ̂₊) e^{iωσ̂_z t}
    let core = &(&a + &sp.scale(C64::new(0.0, (eps / 2.0).sqrt()))) * &e;
    // (â†σ̂₊ − âσ̂₋)â†, the spin-orbit correction band
    let corr = &(&(&adag * &sp) - &(&a * &sm)) * &adag;
    let s2e = (2.0 * eps).sqrt() * spec.time.sin();

    let out = match spec.index {
        QuadIndex::One => {
            let lead = (&core + &core.dagger()).scale_re(X_ZPT);
            &lead + &(&corr + &corr.dagger()).scale_re(X_ZPT * s2e)
        }
        QuadIndex::Two => {
            let lead = (&core - &core.dagger()).scale(C64::new(0.0, -X_ZPT));
            &lead + &(&corr - &corr.dagger()).scale(C64::new(0.0, -X_ZPT * s2e))
        }
    };
    out.assert_hermitian("quadrature_weak_next_order")?;
    Ok(out)
}

/// ω̂_r = ω√(2/ε)(√(n̂−1) − √n̂)σ̂_y, with √(n̂−1) clamped to 0 at n = 0.
pub fn frequency_operator_strong(
    params: &DiracParams,
    space: &SpaceDescriptor,
) -> Result<FrequencyOperator> {
    let scale = (2.0 / params.epsilon).sqrt();
    let f = osc_diagonal(space, &|n| {
        let nm1 = if n == 0 { 0.0 } else { (n as f64 - 1.0).sqrt() };
        C64::new(scale * (nm1 - (n as f64).sqrt()), 0.0)
    })?;
    let sy = hilbert::pauli(space, PauliAxis::Y, Factor::DiracSpin)?;
    let op = &f * &sy;
    op.assert_hermitian("frequency_operator_strong")?;
    Ok(FrequencyOperator {
        op,
        regime: FrequencyRegime::Strong,
    })
}

/// e^{iω̂_r t} built in closed form: cos(f(n̂)t) + i·sin(f(n̂)t)σ̂_y.
fn omega_r_phase(params: &DiracParams, space: &SpaceDescriptor, t: f64) -> Result<Operator> {
    let scale = (2.0 / params.epsilon).sqrt();
    let f = |n: usize| {
        let nm1 = if n == 0 { 0.0 } else { (n as f64 - 1.0).sqrt() };
        scale * (nm1 - (n as f64).sqrt())
    };
    let cospart = osc_diagonal(space, &|n| C64::new((f(n) * t).cos(), 0.0))?;
    let sinpart = osc_diagonal(space, &|n| C64::new(0.0, (f(n) * t).sin()))?;
    let sy = hilbert::pauli(space, PauliAxis::Y, Factor::DiracSpin)?;
    Ok(&cospart + &(&sinpart * &sy))
}

/// X̂_{ℓ,r}(t): X̂₁ = ½(x̂+ip̂/mω)e^{iω̂_r t} + h.c. — the annihilation-like
/// combination stays LEFT of the exponential; the ordering is not free.
pub fn quadrature_strong(spec: &QuadratureSpec, space: &SpaceDescriptor) -> Result<Operator> {
    let x = hilbert::position(space, Factor::Oscillator)?;
    let p = hilbert::momentum(space, Factor::Oscillator)?;
    let l = &x.scale_re(0.5) + &p.scale(C64::new(0.0, 0.5));
    let e = omega_r_phase(&spec.params, space, spec.time)?;
    let le = &l * &e;
    let out = match spec.index {
        QuadIndex::One => &le + &le.dagger(),
        QuadIndex::Two => (&le - &le.dagger()).scale(C64::new(0.0, -1.0)),
    };
    out.assert_hermitian("quadrature_strong")?;
    Ok(out)
}

/// Analytic ∂ₜ of [`quadrature_strong`].
pub fn quadrature_strong_dt(spec: &QuadratureSpec, space: &SpaceDescriptor) -> Result<Operator> {
    let x = hilbert::position(space, Factor::Oscillator)?;
    let p = hilbert::momentum(space, Factor::Oscillator)?;
    let l = &x.scale_re(0.5) + &p.scale(C64::new(0.0, 0.5));
    let e = omega_r_phase(&spec.params, space, spec.time)?;
    let iw = frequency_operator_strong(&spec.params, space)?
        .op
        .scale(C64::new(0.0, 1.0));
    let d_le = &l * &(&iw * &e);
    Ok(match spec.index {
        QuadIndex::One => &d_le + &d_le.dagger(),
        QuadIndex::Two => (&d_le - &d_le.dagger()).scale(C64::new(0.0, -1.0)),
    })
}

/// X̂_{ℓ,D}(t) = Û† X̂_{ℓ,F}(t) Û.
pub fn quadrature_dirac(
    spec: &QuadratureSpec,
    fwu: &FwUnitary,
    space: &SpaceDescriptor,
) -> Result<Operator> {
    let xf = quadrature_fw(spec, space)?;
    to_dirac(&xf, fwu)
}

/// Analytic ∂ₜ of [`quadrature_dirac`].
pub fn quadrature_dirac_dt(
    spec: &QuadratureSpec,
    fwu: &FwUnitary,
    space: &SpaceDescriptor,
) -> Result<Operator> {
    let d = quadrature_fw_dt(spec, space)?;
    to_dirac(&d, fwu)
}

/// Dispatch on regime; `fwu` is only needed for `Regime::DiracGeneral`.
pub fn quadrature(
    spec: &QuadratureSpec,
    space: &SpaceDescriptor,
    fwu: Option<&FwUnitary>,
) -> Result<Operator> {
    match spec.regime {
        Regime::Weak => quadrature_weak(spec, space),
        Regime::WeakNextOrder => quadrature_weak_next_order(spec, space),
        Regime::Strong => quadrature_strong(spec, space),
        Regime::FwGeneral => quadrature_fw(spec, space),
        Regime::DiracGeneral => {
            let fwu = fwu.ok_or_else(|| {
                Error::Config("dirac_general quadratures need an FW unitary".into())
            })?;
            quadrature_dirac(spec, fwu, space)
        }
    }
}

/// Ĥ_nr = mc²σ̂_z + ħω(n̂ + ½)σ̂_z − ħω/2 (weakly relativistic effective form).
pub fn h_weak_effective(params: &DiracParams, space: &SpaceDescriptor) -> Result<Operator> {
    let mc2 = params.mc2;
    osc_spin_diagonal(space, &|n, s| {
        let sign = match s {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        };
        C64::new(sign * (mc2 + n as f64 + 0.5) - 0.5, 0.0)
    })
}

/// Ĥ_r = −σ̂_y √(2mc²ħωn̂) (extreme relativistic effective form).
pub fn h_strong_effective(params: &DiracParams, space: &SpaceDescriptor) -> Result<Operator> {
    let g = osc_diagonal(space, &|n| {
        C64::new(-(2.0 * params.mc2 * n as f64).sqrt(), 0.0)
    })?;
    let sy = hilbert::pauli(space, PauliAxis::Y, Factor::DiracSpin)?;
    Ok(&g * &sy)
}

/// Minimum-uncertainty state |φ⟩ = |α⟩ ⊗ (c₁|↑⟩ + c₂|↓⟩), in the FW
/// representation or pulled back to the Dirac representation with Û†.
pub fn min_uncertainty_state(
    alpha: C64,
    c1: C64,
    c2: C64,
    representation: Representation,
    fwu: Option<&FwUnitary>,
    space: &SpaceDescriptor,
) -> Result<StateVector> {
    let spin_norm = c1.norm_sqr() + c2.norm_sqr();
    if (spin_norm - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "spin amplitudes not normalized: |c1|²+|c2|² = {spin_norm}"
        )));
    }
    let osc_dim = space.osc_dim();
    let asq = alpha.norm_sqr();
    if asq > osc_dim as f64 / 4.0 {
        return Err(Error::Truncation {
            msg: format!("coherent amplitude |α|²={asq:.3} exceeds osc_dim/4"),
            suggested_dim: (4.0 * asq).ceil() as usize + 1,
        });
    }
    let parts = ProductParts {
        osc: Some(hilbert::coherent_amplitudes(osc_dim, alpha)),
        dirac: Some([c1, c2]),
        ..Default::default()
    };
    let fw_state = hilbert::product_state(space, &parts)?;
    match representation {
        Representation::Fw => Ok(fw_state),
        Representation::Dirac => {
            let fwu = fwu.ok_or_else(|| {
                Error::Config("Dirac-representation state needs an FW unitary".into())
            })?;
            let mut pulled = fwu.operator_dagger().apply(&fw_state)?;
            pulled.renormalize();
            Ok(pulled)
        }
    }
}

/// Interior Frobenius norm of the QND defect (i/ħ)[Ĥ, X̂(t)] + ∂ₜX̂(t).
///
/// The interior projector keeps Fock indices 2 ≤ n ≤ 0.9·osc_dim on both
/// spins (which also excludes the |0,↑⟩ convention corner).
pub fn qnd_residual(h: &Operator, x_t: &Operator, x_dot: &Operator) -> Result<f64> {
    let comm = commutator(h, x_t)?;
    let defect = &comm.scale(C64::new(0.0, 1.0)) + x_dot;
    let mask = interior_mask(h.space(), 2, 0.9);
    Ok(masked_frobenius(&defect, &mask))
}
