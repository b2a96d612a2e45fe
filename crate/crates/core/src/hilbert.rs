//! Truncated Fock ⊗ spin Hilbert spaces: descriptors, dense operators,
//! state vectors, expectations, and spectral operator functions.
//!
//! The composite space is always ordered oscillator ⊗ Dirac spin ⊗ probe
//! boson ⊗ probe spin (present factors only), and that ordering is baked
//! into every embedding.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Natural units ħ = m = ω = 1 throughout the crate.
pub const X_ZPT: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const P_ZPT: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Max |M − M†| entry accepted when an operator is asserted Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Tensor factors in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    Oscillator,
    DiracSpin,
    ProbeBoson,
    ProbeSpin,
}

/// Spin basis labels; `Up` is index 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Pauli operator selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Layout of the truncated composite Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceDescriptor {
    osc_dim: usize,
    dirac_spin: bool,
    probe_boson_dim: usize,
    probe_spin: bool,
}

impl SpaceDescriptor {
    pub fn osc_dim(&self) -> usize {
        self.osc_dim
    }

    pub fn has_dirac_spin(&self) -> bool {
        self.dirac_spin
    }

    pub fn probe_boson_dim(&self) -> usize {
        self.probe_boson_dim
    }

    pub fn has_probe_spin(&self) -> bool {
        self.probe_spin
    }

    /// Present factors with their dimensions, canonical order.
    pub fn factor_dims(&self) -> Vec<(Factor, usize)> {
        let mut v = vec![(Factor::Oscillator, self.osc_dim)];
        if self.dirac_spin {
            v.push((Factor::DiracSpin, 2));
        }
        if self.probe_boson_dim > 0 {
            v.push((Factor::ProbeBoson, self.probe_boson_dim));
        }
        if self.probe_spin {
            v.push((Factor::ProbeSpin, 2));
        }
        v
    }

    pub fn factor_dim(&self, f: Factor) -> Option<usize> {
        match f {
            Factor::Oscillator => Some(self.osc_dim),
            Factor::DiracSpin => self.dirac_spin.then_some(2),
            Factor::ProbeBoson => (self.probe_boson_dim > 0).then_some(self.probe_boson_dim),
            Factor::ProbeSpin => self.probe_spin.then_some(2),
        }
    }

    pub fn dim(&self) -> usize {
        self.factor_dims().iter().map(|&(_, d)| d).product()
    }

    /// Stride of `factor` in the flattened index (product of trailing dims).
    fn stride(&self, factor: Factor) -> Option<usize> {
        let dims = self.factor_dims();
        let pos = dims.iter().position(|&(f, _)| f == factor)?;
        Some(dims[pos + 1..].iter().map(|&(_, d)| d).product())
    }

    /// Oscillator index of a flattened basis index.
    pub fn osc_index(&self, flat: usize) -> usize {
        let rest: usize = self
            .factor_dims()
            .iter()
            .skip(1)
            .map(|&(_, d)| d)
            .product();
        flat / rest
    }

    /// Dirac-spin index (0 = up) of a flattened basis index.
    pub fn dirac_spin_index(&self, flat: usize) -> usize {
        let stride = self
            .stride(Factor::DiracSpin)
            .expect("Dirac spin factor present");
        (flat / stride) % 2
    }

    /// Flattened index of a basis state given per-factor indices; factors not
    /// listed sit at index 0.
    pub fn flat_index(&self, assignments: &[(Factor, usize)]) -> usize {
        let mut idx = 0;
        for (factor, dim) in self.factor_dims() {
            let i = assignments
                .iter()
                .find(|&&(f, _)| f == factor)
                .map(|&(_, i)| i)
                .unwrap_or(0);
            debug_assert!(i < dim);
            idx = idx * dim + i;
        }
        idx
    }
}

/// Build a space descriptor with the canonical factor order.
pub fn make_space(
    osc_dim: usize,
    dirac_spin: bool,
    probe_boson_dim: usize,
    probe_spin: bool,
) -> Result<SpaceDescriptor> {
    if osc_dim < 2 {
        return Err(Error::Config(format!(
            "oscillator cutoff must be >= 2, got {osc_dim}"
        )));
    }
    if probe_boson_dim == 1 {
        return Err(Error::Config(
            "probe boson dimension must be 0 (absent) or >= 2".into(),
        ));
    }
    Ok(SpaceDescriptor {
        osc_dim,
        dirac_spin,
        probe_boson_dim,
        probe_spin,
    })
}

/// Dense complex operator tagged with its space.
#[derive(Clone, Debug)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn from_matrix(space: SpaceDescriptor, matrix: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, space dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { space, matrix })
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        let d = space.dim();
        Operator {
            space: space.clone(),
            matrix: Array2::zeros((d, d)),
        }
    }

    pub fn identity(space: &SpaceDescriptor) -> Self {
        let d = space.dim();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        Operator {
            space: space.clone(),
            matrix: m,
        }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: linalg::adjoint(&self.matrix.view()),
        }
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.mapv(|z| z * c),
        }
    }

    pub fn scale_re(&self, c: f64) -> Operator {
        self.scale(C64::new(c, 0.0))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.matrix.view())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Verify the Hermiticity contract at the standard tolerance.
    pub fn assert_hermitian(&self, context: &str) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::Contract(format!(
                "{context}: hermiticity deviation {dev:.3e} > {HERMITICITY_TOL:.0e}"
            )));
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_same_space(&self.space, &state.space)?;
        Ok(StateVector {
            space: state.space.clone(),
            amplitudes: linalg::mat_vec(&self.matrix.view(), &state.amplitudes.view()),
        })
    }

    pub fn frobenius(&self) -> f64 {
        linalg::frobenius(&self.matrix.view())
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix.view())
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        Operator {
            space: self.space.clone(),
            matrix: linalg::mat_mul(&self.matrix.view(), &rhs.matrix.view()),
        }
    }
}

/// Normalized state over a space.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: SpaceDescriptor,
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn from_amplitudes(space: SpaceDescriptor, amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "amplitude vector length {} != space dimension {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        let mut s = StateVector { space, amplitudes };
        let n = s.norm();
        if n == 0.0 {
            return Err(Error::Contract("state vector has zero norm".into()));
        }
        if (n - 1.0).abs() > 1e-12 {
            s.amplitudes.mapv_inplace(|z| z / n);
        }
        Ok(s)
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn renormalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.mapv_inplace(|z| z / n);
        }
        n
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_same_space(&self.space, &other.space)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        check_same_space(&self.space, &other.space)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Probability mass on basis states with oscillator index >= `n0`.
    pub fn osc_mass_at_or_above(&self, n0: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.osc_index(*i) >= n0)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

fn check_same_space(a: &SpaceDescriptor, b: &SpaceDescriptor) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!(
            "space mismatch: {a:?} vs {b:?}"
        )));
    }
    Ok(())
}

/// Embed a single-factor matrix over the full space (identity elsewhere).
pub fn embed(space: &SpaceDescriptor, factor: Factor, small: &Array2<C64>) -> Result<Operator> {
    let fd = space.factor_dim(factor).ok_or_else(|| {
        Error::Config(format!("factor {factor:?} is not present in the space"))
    })?;
    if small.nrows() != fd || small.ncols() != fd {
        return Err(Error::Dimension(format!(
            "factor matrix is {}x{}, factor dimension is {fd}",
            small.nrows(),
            small.ncols()
        )));
    }
    let stride = space.stride(factor).unwrap();
    let d = space.dim();
    let block = fd * stride;
    let mut out = Array2::<C64>::zeros((d, d));
    // flat = major * (fd*stride) + i * stride + minor
    for major in 0..d / block {
        for i in 0..fd {
            for j in 0..fd {
                let sij = small[(i, j)];
                if sij == C64::new(0.0, 0.0) {
                    continue;
                }
                for minor in 0..stride {
                    let row = major * block + i * stride + minor;
                    let col = major * block + j * stride + minor;
                    out[(row, col)] = sij;
                }
            }
        }
    }
    Operator::from_matrix(space.clone(), out)
}

fn ladder_matrix(dim: usize) -> Array2<C64> {
    let mut a = Array2::<C64>::zeros((dim, dim));
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Annihilation and creation operators of a bosonic factor, embedded over the
/// full space. ⟨n−1|â|n⟩ = √n.
pub fn ladder(space: &SpaceDescriptor, which: Factor) -> Result<(Operator, Operator)> {
    match which {
        Factor::Oscillator | Factor::ProbeBoson => {}
        _ => {
            return Err(Error::Config(format!(
                "ladder operators need a bosonic factor, got {which:?}"
            )))
        }
    }
    let fd = space
        .factor_dim(which)
        .ok_or_else(|| Error::Config(format!("factor {which:?} is not present in the space")))?;
    let a = embed(space, which, &ladder_matrix(fd))?;
    let adag = a.dagger();
    Ok((a, adag))
}

/// Number operator of a bosonic factor, built directly as an exact diagonal.
pub fn number_operator(space: &SpaceDescriptor, which: Factor) -> Result<Operator> {
    let fd = space
        .factor_dim(which)
        .ok_or_else(|| Error::Config(format!("factor {which:?} is not present in the space")))?;
    let mut m = Array2::<C64>::zeros((fd, fd));
    for n in 0..fd {
        m[(n, n)] = C64::new(n as f64, 0.0);
    }
    embed(space, which, &m)
}

fn pauli_matrix(axis: PauliAxis) -> Array2<C64> {
    let z = |re: f64, im: f64| C64::new(re, im);
    let mut m = Array2::<C64>::zeros((2, 2));
    match axis {
        PauliAxis::X => {
            m[(0, 1)] = z(1.0, 0.0);
            m[(1, 0)] = z(1.0, 0.0);
        }
        PauliAxis::Y => {
            m[(0, 1)] = z(0.0, -1.0);
            m[(1, 0)] = z(0.0, 1.0);
        }
        PauliAxis::Z => {
            m[(0, 0)] = z(1.0, 0.0);
            m[(1, 1)] = z(-1.0, 0.0);
        }
        PauliAxis::Plus => {
            m[(0, 1)] = z(1.0, 0.0);
        }
        PauliAxis::Minus => {
            m[(1, 0)] = z(1.0, 0.0);
        }
    }
    m
}

/// Pauli / raising / lowering operator of a spin factor, embedded over the
/// full space. σ̂₊ maps |↓⟩ → |↑⟩.
pub fn pauli(space: &SpaceDescriptor, axis: PauliAxis, which: Factor) -> Result<Operator> {
    match which {
        Factor::DiracSpin | Factor::ProbeSpin => {}
        _ => {
            return Err(Error::Config(format!(
                "pauli operators need a spin factor, got {which:?}"
            )))
        }
    }
    if space.factor_dim(which).is_none() {
        return Err(Error::Config(format!(
            "factor {which:?} is not present in the space"
        )));
    }
    embed(space, which, &pauli_matrix(axis))
}

/// Coherent-state amplitudes αⁿ/√n! on a truncated factor, renormalized.
pub fn coherent_amplitudes(dim: usize, alpha: C64) -> Array1<C64> {
    let mut v = Array1::<C64>::zeros(dim);
    let mut c = C64::new(1.0, 0.0);
    v[0] = c;
    for n in 1..dim {
        c = c * alpha / C64::new((n as f64).sqrt(), 0.0);
        v[n] = c;
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / norm);
    v
}

/// Coherent state on one bosonic factor, ground state on every other factor.
///
/// Enforces the truncation-safety heuristic |α|² ≤ dim/4 so the Poisson tail
/// past the cutoff stays below ~1e-12.
pub fn coherent_state(space: &SpaceDescriptor, which: Factor, alpha: C64) -> Result<StateVector> {
    let fd = space
        .factor_dim(which)
        .ok_or_else(|| Error::Config(format!("factor {which:?} is not present in the space")))?;
    let asq = alpha.norm_sqr();
    if asq > fd as f64 / 4.0 {
        return Err(Error::Truncation {
            msg: format!("coherent amplitude |α|²={asq:.3} exceeds dim/4={}", fd as f64 / 4.0),
            suggested_dim: (4.0 * asq).ceil() as usize + 1,
        });
    }
    let mut parts = ProductParts::default();
    match which {
        Factor::Oscillator => parts.osc = Some(coherent_amplitudes(fd, alpha)),
        Factor::ProbeBoson => parts.probe_boson = Some(coherent_amplitudes(fd, alpha)),
        _ => {
            return Err(Error::Config(format!(
                "coherent states need a bosonic factor, got {which:?}"
            )))
        }
    }
    product_state(space, &parts)
}

/// Per-factor state vectors for a product state; `None` means ground state.
#[derive(Default, Clone)]
pub struct ProductParts {
    pub osc: Option<Array1<C64>>,
    pub dirac: Option<[C64; 2]>,
    pub probe_boson: Option<Array1<C64>>,
    pub probe_spin: Option<[C64; 2]>,
}

/// Assemble a product state over the present factors.
pub fn product_state(space: &SpaceDescriptor, parts: &ProductParts) -> Result<StateVector> {
    let mut amps = Array1::from(vec![C64::new(1.0, 0.0)]);
    for (factor, fd) in space.factor_dims() {
        let part: Array1<C64> = match factor {
            Factor::Oscillator => match &parts.osc {
                Some(v) => v.clone(),
                None => ground(fd),
            },
            Factor::DiracSpin => match &parts.dirac {
                Some([u, d]) => Array1::from(vec![*u, *d]),
                None => ground(2),
            },
            Factor::ProbeBoson => match &parts.probe_boson {
                Some(v) => v.clone(),
                None => ground(fd),
            },
            Factor::ProbeSpin => match &parts.probe_spin {
                Some([u, d]) => Array1::from(vec![*u, *d]),
                None => ground(2),
            },
        };
        if part.len() != fd {
            return Err(Error::Dimension(format!(
                "factor {factor:?} state has length {}, factor dimension is {fd}",
                part.len()
            )));
        }
        let mut next = Array1::<C64>::zeros(amps.len() * fd);
        for (i, a) in amps.iter().enumerate() {
            for (j, b) in part.iter().enumerate() {
                next[i * fd + j] = a * b;
            }
        }
        amps = next;
    }
    StateVector::from_amplitudes(space.clone(), amps)
}

fn ground(dim: usize) -> Array1<C64> {
    let mut v = Array1::<C64>::zeros(dim);
    v[0] = C64::new(1.0, 0.0);
    v
}

/// ⟨ψ|Ô|ψ⟩.
pub fn expectation(state: &StateVector, op: &Operator) -> Result<C64> {
    check_same_space(state.space(), op.space())?;
    let ops = op.apply(state)?;
    state.inner(&ops)
}

/// ⟨Ô²⟩ − ⟨Ô⟩² for Hermitian Ô, clamped at zero within −1e-12.
pub fn variance(state: &StateVector, op: &Operator) -> Result<f64> {
    op.assert_hermitian("variance")?;
    let ops = op.apply(state)?;
    let mean = state.inner(&ops)?.re;
    let second: f64 = ops.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let v = second - mean * mean;
    if v < -1e-12 {
        return Err(Error::Contract(format!(
            "variance {v:.3e} below the clamping window"
        )));
    }
    Ok(v.max(0.0))
}

/// Mean and variance of a Hermitian observable in one application of Ô.
pub fn mean_and_variance(state: &StateVector, op: &Operator) -> Result<(f64, f64)> {
    op.assert_hermitian("mean_and_variance")?;
    let ops = op.apply(state)?;
    let mean = state.inner(&ops)?.re;
    let second: f64 = ops.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    let v = second - mean * mean;
    if v < -1e-12 {
        return Err(Error::Contract(format!(
            "variance {v:.3e} below the clamping window"
        )));
    }
    Ok((mean, v.max(0.0)))
}

/// Spectral operator function: Ô = V D V† ↦ V f(D) V†.
///
/// The input must be Hermitian to 1e-10; eigenvalues outside f's domain are
/// the closure's business (clamp or extend per the caller's edge convention).
pub fn apply_function(op: &Operator, f: &dyn Fn(f64) -> C64) -> Result<Operator> {
    let dev = op.hermiticity_deviation();
    if dev > 1e-10 {
        return Err(Error::Contract(format!(
            "apply_function input not hermitian: deviation {dev:.3e}"
        )));
    }
    let (w, v) = linalg::eigh(&op.matrix().view())?;
    let d = op.dim();
    // V f(D) V†  ==  (V f(D)) V†
    let mut vf = v.clone();
    for k in 0..d {
        let fk = f(w[k]);
        for i in 0..d {
            vf[(i, k)] *= fk;
        }
    }
    let vdag = linalg::adjoint(&v.view());
    Operator::from_matrix(
        op.space().clone(),
        linalg::mat_mul(&vf.view(), &vdag.view()),
    )
}

/// AB − BA.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_same_space(a.space(), b.space())?;
    Ok(&(a * b) - &(b * a))
}

/// Position operator x̂ = x_zpt(â + â†) of a bosonic factor.
pub fn position(space: &SpaceDescriptor, which: Factor) -> Result<Operator> {
    let (a, adag) = ladder(space, which)?;
    Ok((&a + &adag).scale_re(X_ZPT))
}

/// Momentum operator p̂ = −i p_zpt(â − â†) of a bosonic factor.
pub fn momentum(space: &SpaceDescriptor, which: Factor) -> Result<Operator> {
    let (a, adag) = ladder(space, which)?;
    Ok((&a - &adag).scale(C64::new(0.0, -P_ZPT)))
}

/// Diagonal operator g(n) over the oscillator factor (identity elsewhere).
pub fn osc_diagonal(space: &SpaceDescriptor, g: &dyn Fn(usize) -> C64) -> Result<Operator> {
    let fd = space
        .factor_dim(Factor::Oscillator)
        .expect("oscillator factor always present");
    let mut m = Array2::<C64>::zeros((fd, fd));
    for n in 0..fd {
        m[(n, n)] = g(n);
    }
    embed(space, Factor::Oscillator, &m)
}

/// Diagonal operator g(n, spin) over oscillator ⊗ Dirac spin, filled directly.
pub fn osc_spin_diagonal(
    space: &SpaceDescriptor,
    g: &dyn Fn(usize, Spin) -> C64,
) -> Result<Operator> {
    if !space.has_dirac_spin() {
        return Err(Error::Config("space has no Dirac spin factor".into()));
    }
    let d = space.dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for i in 0..d {
        let n = space.osc_index(i);
        let s = if space.dirac_spin_index(i) == 0 {
            Spin::Up
        } else {
            Spin::Down
        };
        m[(i, i)] = g(n, s);
    }
    Operator::from_matrix(space.clone(), m)
}

/// Assemble Σ_{s,s'} O^{ss'} ⊗ |s⟩⟨s'| ⊗ 1 from four oscillator-factor
/// blocks indexed [row-spin][col-spin] with Up = 0.
pub fn osc_spin_operator(
    space: &SpaceDescriptor,
    blocks: [[&Array2<C64>; 2]; 2],
) -> Result<Operator> {
    if !space.has_dirac_spin() {
        return Err(Error::Config("space has no Dirac spin factor".into()));
    }
    let n = space.osc_dim();
    for row in &blocks {
        for b in row {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Dimension(format!(
                    "oscillator block is {}x{}, expected {n}x{n}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
    }
    let mut joint = Array2::<C64>::zeros((2 * n, 2 * n));
    for (si, row) in blocks.iter().enumerate() {
        for (sj, b) in row.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    joint[(2 * i + si, 2 * j + sj)] = b[(i, j)];
                }
            }
        }
    }
    // remaining factors (probe boson/spin) are trailing: kron with identity
    let rest: usize = space.dim() / (2 * n);
    let full = if rest == 1 {
        joint
    } else {
        let mut id = Array2::<C64>::zeros((rest, rest));
        for i in 0..rest {
            id[(i, i)] = C64::new(1.0, 0.0);
        }
        linalg::kron(&joint.view(), &id.view())
    };
    Operator::from_matrix(space.clone(), full)
}

/// Projector onto one Dirac-spin component.
pub fn spin_projector(space: &SpaceDescriptor, spin: Spin) -> Result<Operator> {
    let mut m = Array2::<C64>::zeros((2, 2));
    match spin {
        Spin::Up => m[(0, 0)] = C64::new(1.0, 0.0),
        Spin::Down => m[(1, 1)] = C64::new(1.0, 0.0),
    }
    embed(space, Factor::DiracSpin, &m)
}

/// Keep-mask over the full space selecting oscillator indices in
/// `[n_lo, floor(hi_frac * osc_dim)]`. All other factors are kept whole.
pub fn interior_mask(space: &SpaceDescriptor, n_lo: usize, hi_frac: f64) -> Vec<bool> {
    let n_hi = ((space.osc_dim() as f64 * hi_frac).floor() as usize).min(space.osc_dim() - 1);
    (0..space.dim())
        .map(|i| {
            let n = space.osc_index(i);
            n >= n_lo && n <= n_hi
        })
        .collect()
}

/// Diagonal 0/1 projector from a keep-mask.
pub fn mask_projector(space: &SpaceDescriptor, mask: &[bool]) -> Operator {
    let d = space.dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for (i, &keep) in mask.iter().enumerate() {
        if keep {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
    }
    Operator {
        space: space.clone(),
        matrix: m,
    }
}

/// Frobenius norm of P M P for a diagonal keep-mask P.
pub fn masked_frobenius(op: &Operator, mask: &[bool]) -> f64 {
    let m = op.matrix();
    let d = op.dim();
    let mut acc = 0.0;
    for i in 0..d {
        if !mask[i] {
            continue;
        }
        for j in 0..d {
            if mask[j] {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Max |entry| of P M P for a diagonal keep-mask P.
pub fn masked_max_abs(op: &Operator, mask: &[bool]) -> f64 {
    let m = op.matrix();
    let d = op.dim();
    let mut acc: f64 = 0.0;
    for i in 0..d {
        if !mask[i] {
            continue;
        }
        for j in 0..d {
            if mask[j] {
                acc = acc.max(m[(i, j)].norm());
            }
        }
    }
    acc
}
