//! Effective two-photon Hamiltonian with dynamic Stark shifts.
//!
//! In the photon-number sector spanned by `|e,n⟩` and `|g,n+2⟩` the
//! effective Hamiltonian is a real symmetric 2×2 matrix. Its eigen-system has
//! a closed form, and the single-atom passage amplitudes follow from it as
//! sums of two phase factors.
//!
//! All quantities are in frequency units of the caller's choosing; the CLI
//! works with `g = 1`, so detunings are `Δ/g`, Stark shifts `β/g` and times the
//! Rabi angle `gt`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Inputs of the effective model: two-photon coupling, two-photon detuning and
/// the Stark shifts of the upper and lower levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    g: f64,
    delta: f64,
    beta_e: f64,
    beta_g: f64,
}

impl ModelParams {
    /// General model with independent Stark shifts `beta_e` and `beta_g`.
    pub fn new(g: f64, delta: f64, beta_e: f64, beta_g: f64) -> Result<Self> {
        for (name, v) in [
            ("g", g),
            ("delta", delta),
            ("beta_e", beta_e),
            ("beta_g", beta_g),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if g < 0.0 {
            return Err(Error::param(
                "g",
                format!("coupling must be non-negative, got {g}"),
            ));
        }
        Ok(Self {
            g,
            delta,
            beta_e,
            beta_g,
        })
    }

    /// Equal Stark shifts on both levels (`beta_e = beta_g = beta`).
    pub fn simplified(g: f64, delta: f64, beta: f64) -> Result<Self> {
        Self::new(g, delta, beta, beta)
    }

    /// Unit coupling with detuning and Stark shift given in units of `g`.
    pub fn dimensionless(delta_over_g: f64, beta_over_g: f64) -> Result<Self> {
        Self::simplified(1.0, delta_over_g, beta_over_g)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta_e(&self) -> f64 {
        self.beta_e
    }

    pub fn beta_g(&self) -> f64 {
        self.beta_g
    }

    /// Both level shifts negated along with the detuning. The sector matrix
    /// changes sign, so every amplitude is complex conjugated.
    pub fn sign_flipped(&self) -> Self {
        Self {
            g: self.g,
            delta: -self.delta,
            beta_e: -self.beta_e,
            beta_g: -self.beta_g,
        }
    }
}

/// Effective Hamiltonian restricted to the `(|e,n⟩, |g,n+2⟩)` sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorMatrix {
    n: u32,
    entries: [[f64; 2]; 2],
}

impl SectorMatrix {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Builds the sector matrix for photon index `n`.
///
/// The diagonal holds the expectations of the detuning and Stark terms on
/// `|e,n⟩` and `|g,n+2⟩`; with `beta_e = beta_g = β` these reduce to
/// `Δ/2 + βn` and `-(Δ/2 + βn + 2β)`. The off-diagonal coupling is
/// `g·√((n+1)(n+2))`.
pub fn sector_matrix(params: &ModelParams, n: u32) -> SectorMatrix {
    let nf = f64::from(n);
    let sum = params.beta_e + params.beta_g;
    let diff = params.beta_e - params.beta_g;
    let upper = params.delta / 2.0 + sum * nf / 2.0 + diff * nf / 2.0;
    let lower = -params.delta / 2.0 - sum * (nf + 2.0) / 2.0 + diff * (nf + 2.0) / 2.0;
    let coupling = params.g * ((nf + 1.0) * (nf + 2.0)).sqrt();
    SectorMatrix {
        n,
        entries: [[upper, coupling], [coupling, lower]],
    }
}

/// Eigenvalues and the `λ₁` eigenvector `(c₁, c₂)` of a sector matrix.
///
/// The `λ₂` eigenvector is `(c₂, -c₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub lambda1: f64,
    pub lambda2: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Closed-form eigen-system of a sector matrix, with `λ₁ ≥ λ₂`.
///
/// Writing the diagonal as `m ± h` and the coupling as `b`, the eigenvalues are
/// `m ± √(h² + b²)` and the `λ₁` eigenvector is proportional to
/// `(h + √(h² + b²), b)`. For `h < 0` the equivalent `(b, √(h² + b²) - h)` is
/// used so the leading component never suffers cancellation. A fully
/// degenerate matrix (`h = b = 0`) returns `c₁ = 1, c₂ = 0`.
pub fn eigensystem(m: &SectorMatrix) -> EigenSystem {
    let [[d1, b], [_, d2]] = m.entries;
    let mean = 0.5 * (d1 + d2);
    let half = 0.5 * (d1 - d2);
    let radius = half.hypot(b);
    let (lambda1, lambda2) = (mean + radius, mean - radius);

    if radius == 0.0 {
        return EigenSystem {
            lambda1,
            lambda2,
            c1: 1.0,
            c2: 0.0,
        };
    }

    let (x, y) = if half >= 0.0 {
        (half + radius, b)
    } else {
        (b, radius - half)
    };
    let norm = x.hypot(y);
    EigenSystem {
        lambda1,
        lambda2,
        c1: x / norm,
        c2: y / norm,
    }
}

/// Real quadratures of one atom's passage amplitudes within a sector:
/// `⟨e,n|U(t)|e,n⟩ = r₁ - i s₁` and `⟨g,n+2|U(t)|e,n⟩ = r₂ - i s₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageAmplitudes {
    pub r1: f64,
    pub s1: f64,
    pub r2: f64,
    pub s2: f64,
}

impl PassageAmplitudes {
    /// Amplitude to remain in `|e,n⟩`.
    pub fn stay(&self) -> Complex64 {
        Complex64::new(self.r1, -self.s1)
    }

    /// Amplitude to emit two photons into `|g,n+2⟩`.
    pub fn transfer(&self) -> Complex64 {
        Complex64::new(self.r2, -self.s2)
    }

    pub fn stay_probability(&self) -> f64 {
        self.r1 * self.r1 + self.s1 * self.s1
    }

    pub fn transfer_probability(&self) -> f64 {
        self.r2 * self.r2 + self.s2 * self.s2
    }
}

pub fn passage_amplitudes(es: &EigenSystem, t: f64) -> PassageAmplitudes {
    let (sin1, cos1) = (es.lambda1 * t).sin_cos();
    let (sin2, cos2) = (es.lambda2 * t).sin_cos();
    let (w1, w2) = (es.c1 * es.c1, es.c2 * es.c2);
    let cross = es.c1 * es.c2;
    PassageAmplitudes {
        r1: w1 * cos1 + w2 * cos2,
        s1: w1 * sin1 + w2 * sin2,
        r2: cross * (cos1 - cos2),
        s2: cross * (sin1 - sin2),
    }
}

/// Sector matrix, eigen-system and amplitudes in one call.
pub fn sector_passage(params: &ModelParams, n: u32, t: f64) -> PassageAmplitudes {
    passage_amplitudes(&eigensystem(&sector_matrix(params, n)), t)
}
