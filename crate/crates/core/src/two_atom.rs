//! Two atoms crossing the cavity one after the other.
//!
//! Both atoms enter in `|e⟩` and spend the same time `t` in the cavity. After
//! tracing out the field the two-atom state is X-shaped in the basis
//! `|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩`: four populations plus a single coherence
//! between `|e₁g₂⟩` and `|g₁e₂⟩`.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::effective::{sector_passage, ModelParams};
use crate::error::{Error, Result};

/// Default tail mass left out of a truncated thermal distribution.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// X-structured reduced state of the two atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAtomDensityMatrix {
    /// `|e₁e₂⟩` population.
    pub alpha: f64,
    /// `|e₁g₂⟩` population.
    pub gamma: f64,
    /// `|g₁e₂⟩` population.
    pub delta: f64,
    /// `|g₁g₂⟩` population.
    pub eta: f64,
    /// `⟨e₁g₂|ρ|g₁e₂⟩`.
    pub epsilon: Complex64,
}

impl TwoAtomDensityMatrix {
    pub fn trace(&self) -> f64 {
        self.alpha + self.gamma + self.delta + self.eta
    }

    /// Dense 4×4 form in the `ee, eg, ge, gg` basis.
    pub fn to_matrix(&self) -> Matrix4<Complex64> {
        let re = |v: f64| Complex64::new(v, 0.0);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = re(self.alpha);
        m[(1, 1)] = re(self.gamma);
        m[(2, 2)] = re(self.delta);
        m[(3, 3)] = re(self.eta);
        m[(1, 2)] = self.epsilon;
        m[(2, 1)] = self.epsilon.conj();
        m
    }

    /// Smallest eigenvalue of the 4×4 matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let inner_max = 0.5 * (self.gamma + self.delta)
            + (0.5 * (self.gamma - self.delta)).hypot(self.epsilon.norm());
        let det = self.gamma * self.delta - self.epsilon.norm_sqr();
        let inner_min = if inner_max > 0.0 {
            det / inner_max
        } else {
            0.0
        };
        self.alpha.min(self.eta).min(inner_min)
    }

    /// The same state scaled to unit trace.
    pub fn renormalized(&self) -> Self {
        let tr = self.trace();
        Self {
            alpha: self.alpha / tr,
            gamma: self.gamma / tr,
            delta: self.delta / tr,
            eta: self.eta / tr,
            epsilon: self.epsilon / tr,
        }
    }

    fn scaled_add(&mut self, w: f64, other: &Self) {
        self.alpha += w * other.alpha;
        self.gamma += w * other.gamma;
        self.delta += w * other.delta;
        self.eta += w * other.eta;
        self.epsilon += other.epsilon * w;
    }

    fn zero() -> Self {
        Self {
            alpha: 0.0,
            gamma: 0.0,
            delta: 0.0,
            eta: 0.0,
            epsilon: Complex64::new(0.0, 0.0),
        }
    }
}

/// Reduced two-atom state when the cavity starts in the Fock state `|n0⟩`.
///
/// The first atom acts in sector `n0`; if it emits, the second atom sees
/// `n0 + 2` photons, so its amplitudes come from that sector.
pub fn joint_density_fock(params: &ModelParams, t: f64, n0: u32) -> TwoAtomDensityMatrix {
    let first = sector_passage(params, n0, t);
    let shifted = sector_passage(params, n0 + 2, t);

    let stay = first.stay_probability();
    let emit = first.transfer_probability();
    TwoAtomDensityMatrix {
        alpha: stay * stay,
        gamma: stay * emit,
        delta: emit * shifted.stay_probability(),
        eta: emit * shifted.transfer_probability(),
        epsilon: first.stay() * shifted.stay().conj() * emit,
    }
}

/// Mean thermal photon number for `x = ħω/kT`.
pub fn nbar_from_ratio(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::param(
            "hbar_omega_over_kt",
            format!("must be positive and finite, got {x}"),
        ));
    }
    Ok(1.0 / x.exp_m1())
}

/// Bose-Einstein photon statistics truncated where the remaining tail mass
/// drops below a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalField {
    nbar: f64,
    tail_tol: f64,
    weights: Vec<f64>,
}

impl ThermalField {
    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Largest retained Fock index.
    pub fn cutoff(&self) -> u32 {
        (self.weights.len() - 1) as u32
    }

    /// `P_n` for `n = 0..=cutoff`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability mass beyond the cutoff, `(nbar/(1+nbar))^(cutoff+1)`.
    pub fn tail_deficit(&self) -> f64 {
        ratio(self.nbar).powi(self.weights.len() as i32)
    }
}

fn ratio(nbar: f64) -> f64 {
    nbar / (1.0 + nbar)
}

/// `P_n = nbarⁿ / (1 + nbar)ⁿ⁺¹`, kept up to the smallest cutoff whose tail
/// mass is at most `tail_tol`. Weights are not renormalized.
pub fn thermal_weights(nbar: f64, tail_tol: f64) -> Result<ThermalField> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::param(
            "nbar",
            format!("must be finite and non-negative, got {nbar}"),
        ));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::param(
            "tail_tol",
            format!("must lie in (0, 1), got {tail_tol}"),
        ));
    }

    let q = ratio(nbar);
    let p0 = 1.0 / (1.0 + nbar);
    let mut weights = Vec::new();
    let mut n: i32 = 0;
    loop {
        weights.push(q.powi(n) * p0);
        if q.powi(n + 1) <= tail_tol {
            break;
        }
        n += 1;
    }
    Ok(ThermalField {
        nbar,
        tail_tol,
        weights,
    })
}

/// `P_n`-weighted mixture of the Fock-input states over the retained indices.
///
/// The sum runs in ascending `n`, so results do not depend on scheduling.
pub fn joint_density_thermal(
    params: &ModelParams,
    t: f64,
    field: &ThermalField,
) -> TwoAtomDensityMatrix {
    let mut acc = TwoAtomDensityMatrix::zero();
    for (n, &w) in field.weights.iter().enumerate() {
        acc.scaled_add(w, &joint_density_fock(params, t, n as u32));
    }
    acc
}
