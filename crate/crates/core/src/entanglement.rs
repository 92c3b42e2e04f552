//! Concurrence and entanglement of formation.
//!
//! Two routes are provided. The closed form exploits the X structure of
//! [`TwoAtomDensityMatrix`]: the spectrum of `ρρ̃` is `{αη, αη, (√(γδ)+|ε|)²,
//! (√(γδ)-|ε|)²}`. The generic route accepts any two-qubit density matrix and
//! follows the spin-flip construction directly; it is the reference the closed
//! form is checked against.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::two_atom::TwoAtomDensityMatrix;

/// Slack below which negative eigenvalues and imaginary parts are treated as
/// rounding and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-10;

/// Hermiticity and positivity tolerance for generic inputs.
pub const GENERIC_INPUT_TOL: f64 = 1e-10;

/// Allowed trace error for generic inputs under [`TracePolicy::RequireUnit`].
pub const GENERIC_TRACE_TOL: f64 = 1e-8;

/// Slack on `C ∈ [0, 1]` accepted by [`eof`].
pub const CONCURRENCE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub concurrence: f64,
    pub eof: f64,
    /// Eigenvalues of `ρρ̃`, descending.
    pub spectrum: [f64; 4],
}

/// `x log₂ x` with its continuous extension `0` at `x = 0`.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary entropy `h(x) = -x log₂x - (1-x) log₂(1-x)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    -xlog2x(x) - xlog2x(1.0 - x)
}

/// Entanglement of formation `h((1 + √(1 - C²))/2)`.
pub fn eof(concurrence: f64) -> Result<f64> {
    if !(-CONCURRENCE_SLACK..=1.0 + CONCURRENCE_SLACK).contains(&concurrence) {
        return Err(Error::param(
            "concurrence",
            format!("must lie in [0, 1], got {concurrence}"),
        ));
    }
    let c = concurrence.clamp(0.0, 1.0);
    // 1 - C² written as (1-C)(1+C) keeps precision near C = 1
    let x = 0.5 * (1.0 + ((1.0 - c) * (1.0 + c)).sqrt());
    Ok(binary_entropy(x))
}

fn clamp_small(v: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

fn sort_descending(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Closed-form spectrum of `ρρ̃` for the X-structured state, descending.
pub fn xstate_spectrum(rho: &TwoAtomDensityMatrix) -> [f64; 4] {
    let outer = clamp_small(rho.alpha * rho.eta);
    let root = clamp_small(rho.gamma * rho.delta).max(0.0).sqrt();
    let coh = rho.epsilon.norm();
    sort_descending([
        outer,
        outer,
        (root + coh) * (root + coh),
        (root - coh) * (root - coh),
    ])
}

/// `C = max(0, √λ₁ - √λ₂ - √λ₃ - √λ₄)`, evaluated for the X structure as
/// `2·max(0, min(|ε|, √(γδ)) - √(αη))`.
pub fn concurrence(rho: &TwoAtomDensityMatrix) -> f64 {
    let outer = clamp_small(rho.alpha * rho.eta).max(0.0).sqrt();
    let inner = rho
        .epsilon
        .norm()
        .min(clamp_small(rho.gamma * rho.delta).max(0.0).sqrt());
    (2.0 * (inner - outer)).max(0.0)
}

/// Concurrence, entanglement of formation and spectrum of an X state.
pub fn entanglement(rho: &TwoAtomDensityMatrix) -> EntanglementResult {
    let c = concurrence(rho).min(1.0);
    EntanglementResult {
        concurrence: c,
        eof: eof(c).expect("concurrence clamped to [0, 1]"),
        spectrum: xstate_spectrum(rho),
    }
}

/// Whether the generic route insists on unit trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TracePolicy {
    #[default]
    RequireUnit,
    /// Accept any positive trace, e.g. a truncated thermal state.
    AcceptAny,
}

/// `σ_y ⊗ σ_y` in the `ee, eg, ge, gg` basis. It is real and symmetric.
fn sigma_yy() -> Matrix4<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut y = Matrix4::zeros();
    y[(0, 3)] = -one;
    y[(3, 0)] = -one;
    y[(1, 2)] = one;
    y[(2, 1)] = one;
    y
}

/// Spin-flipped state `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let y = sigma_yy();
    y * rho.conjugate() * y
}

fn validate_generic(rho: &Matrix4<Complex64>, policy: TracePolicy) -> Result<()> {
    let asym = (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if asym > GENERIC_INPUT_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (max |ρ - ρ†| = {asym:.3e})"
        )));
    }
    let min_eig = rho
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -GENERIC_INPUT_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "not positive semidefinite (smallest eigenvalue {min_eig:.3e})"
        )));
    }
    let tr = rho.trace().re;
    match policy {
        TracePolicy::RequireUnit if (tr - 1.0).abs() > GENERIC_TRACE_TOL => {
            Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")))
        }
        _ => Ok(()),
    }
}

/// Eigenvalues of the non-Hermitian product `ρρ̃` from a complex Schur
/// decomposition, descending.
///
/// Imaginary parts and negative values within [`CLAMP_TOL`] are dropped. The
/// small eigenvalues carry an absolute error of order machine epsilon, so
/// their square roots are only good to about `1e-8`; use
/// [`concurrence_generic`] when the concurrence itself is needed.
pub fn product_spectrum(rho: &Matrix4<Complex64>, policy: TracePolicy) -> Result<[f64; 4]> {
    validate_generic(rho, policy)?;
    let product = rho * spin_flip(rho);
    let eig = product.schur().eigenvalues().ok_or_else(|| {
        Error::InvalidDensityMatrix("Schur decomposition did not converge".into())
    })?;
    let mut out = [0.0; 4];
    for (slot, z) in out.iter_mut().zip(eig.iter()) {
        if z.im.abs() > CLAMP_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalue of ρρ̃ has imaginary part {:.3e}",
                z.im
            )));
        }
        *slot = clamp_small(z.re);
    }
    Ok(sort_descending(out))
}

/// Concurrence of an arbitrary two-qubit density matrix.
///
/// With any factorisation `ρ = W W†`, the square roots of the eigenvalues of
/// `ρρ̃` are the singular values of the symmetric matrix `τ = Wᵀ (σ_y⊗σ_y) W`.
/// `W` is taken from the Hermitian eigen-decomposition of `ρ`, and the
/// singular values are read off directly rather than as square roots of
/// computed eigenvalues, which keeps vanishing branches exact to rounding.
pub fn concurrence_generic(rho: &Matrix4<Complex64>, policy: TracePolicy) -> Result<f64> {
    validate_generic(rho, policy)?;
    let eig = rho.symmetric_eigen();
    let mut w = eig.eigenvectors;
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        let scale = mu.max(0.0).sqrt();
        w.column_mut(k).scale_mut(scale);
    }
    let tau = w.transpose() * sigma_yy() * w;
    let mut sv: [f64; 4] = tau.singular_values().into();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).max(0.0))
}
