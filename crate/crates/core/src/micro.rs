//! Microscopic three-level ladder model used as an oracle for the effective
//! two-photon Hamiltonian.
//!
//! Within the rotating-wave approximation the atom-field Hamiltonian is block
//! diagonal in sectors spanned by `|e,n⟩, |i,n+1⟩, |g,n+2⟩`. Each 3×3 block is
//! diagonalized exactly, so the evolution carries no integrator error.
//!
//! Blocks are evolved in the frame rotating at the cavity frequency: each
//! block is shifted by `ω_g + (n+2)ω`. The shift is proportional to the
//! conserved excitation number, so on the two-atom state it amounts to a
//! global phase per initial Fock state and a local phase on the first atom.
//! Populations and concurrence are unaffected.

use nalgebra::{Matrix3, Matrix4, SMatrix, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::effective::ModelParams;
use crate::entanglement::{concurrence_generic, eof, TracePolicy};
use crate::error::{Error, Result};
use crate::two_atom::{joint_density_fock, joint_density_thermal, ThermalField};

/// Ratio of one-photon detuning to coupling below which a warning is raised.
pub const ADIABATIC_RATIO: f64 = 10.0;

/// Default bound on population left outside the qubit subspace.
pub const DEFAULT_LEAKAGE_BOUND: f64 = 0.1;

pub type Reduced9 = SMatrix<Complex64, 9, 9>;

/// Level energies, cavity frequency and one-photon couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MicroParams {
    pub omega_e: f64,
    pub omega_i: f64,
    pub omega_g: f64,
    pub omega: f64,
    /// Coupling on the `g ↔ i` transition.
    pub g1: f64,
    /// Coupling on the `e ↔ i` transition.
    pub g2: f64,
}

impl MicroParams {
    pub fn new(
        omega_e: f64,
        omega_i: f64,
        omega_g: f64,
        omega: f64,
        g1: f64,
        g2: f64,
    ) -> Result<Self> {
        let p = Self {
            omega_e,
            omega_i,
            omega_g,
            omega,
            g1,
            g2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Two-photon resonant ladder with `ω_ei - ω = -D`, `ω_ig - ω = D` and
    /// equal couplings.
    pub fn symmetric(omega: f64, detuning: f64, coupling: f64) -> Result<Self> {
        Self::new(
            2.0 * omega,
            omega + detuning,
            0.0,
            omega,
            coupling,
            coupling,
        )
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_e", self.omega_e),
            ("omega_i", self.omega_i),
            ("omega_g", self.omega_g),
            ("omega", self.omega),
            ("g1", self.g1),
            ("g2", self.g2),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if self.g1 < 0.0 || self.g2 < 0.0 {
            return Err(Error::param("g1/g2", "couplings must be non-negative"));
        }
        if !(self.omega_e > self.omega_i && self.omega_i > self.omega_g) {
            return Err(Error::param(
                "omega_e/omega_i/omega_g",
                "levels must satisfy omega_e > omega_i > omega_g",
            ));
        }
        if self.upper_detuning() == 0.0 {
            return Err(Error::param("omega_i", "omega_e - omega_i - omega is zero"));
        }
        if self.lower_detuning() == 0.0 {
            return Err(Error::param("omega_i", "omega_i - omega_g - omega is zero"));
        }
        Ok(())
    }

    /// `ω_ei - ω`.
    pub fn upper_detuning(&self) -> f64 {
        self.omega_e - self.omega_i - self.omega
    }

    /// `ω_ig - ω`.
    pub fn lower_detuning(&self) -> f64 {
        self.omega_i - self.omega_g - self.omega
    }

    /// `Δ = ω_e - ω_g - 2ω`.
    pub fn two_photon_detuning(&self) -> f64 {
        self.omega_e - self.omega_g - 2.0 * self.omega
    }

    /// Human-readable notes for one-photon detunings that are not large
    /// compared with the couplings.
    pub fn adiabaticity_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let checks = [
            ("omega_ei - omega", self.upper_detuning(), "g2", self.g2),
            ("omega_ig - omega", self.lower_detuning(), "g1", self.g1),
        ];
        for (dname, d, gname, g) in checks {
            if d.abs() < ADIABATIC_RATIO * g {
                out.push(format!(
                    "|{dname}| = {:.4} is below {ADIABATIC_RATIO}·{gname} = {:.4}; \
                     the intermediate level is not adiabatically eliminated",
                    d.abs(),
                    ADIABATIC_RATIO * g
                ));
            }
        }
        out
    }

    /// Moves the intermediate level so that `ω_ig - ω` is multiplied by
    /// `factor`, keeping `ω_e`, `ω_g`, `ω` and hence `Δ` fixed.
    pub fn with_intermediate_detuning_scaled(&self, factor: f64) -> Result<Self> {
        let omega_i = self.omega_g + self.omega + factor * self.lower_detuning();
        Self::new(
            self.omega_e,
            omega_i,
            self.omega_g,
            self.omega,
            self.g1,
            self.g2,
        )
    }
}

/// Hamiltonian block for sector `n` in the basis `|e,n⟩, |i,n+1⟩, |g,n+2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroBlock {
    pub n: u32,
    pub entries: Matrix3<f64>,
}

pub fn micro_block(p: &MicroParams, n: u32) -> MicroBlock {
    let nf = f64::from(n);
    let upper = p.g2 * (nf + 1.0).sqrt();
    let lower = p.g1 * (nf + 2.0).sqrt();
    #[rustfmt::skip]
    let entries = Matrix3::new(
        p.omega_e + nf * p.omega, upper, 0.0,
        upper, p.omega_i + (nf + 1.0) * p.omega, lower,
        0.0, lower, p.omega_g + (nf + 2.0) * p.omega,
    );
    MicroBlock { n, entries }
}

/// Effective-model parameters implied by a microscopic ladder with a single
/// intermediate level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveParams {
    /// n-independent two-photon coupling prefactor; may be negative.
    pub g_eff: f64,
    pub beta_e: f64,
    pub beta_g: f64,
    pub delta: f64,
}

pub fn effective_params(p: &MicroParams) -> Result<EffectiveParams> {
    let de = p.upper_detuning();
    let dg = p.lower_detuning();
    if de == 0.0 || dg == 0.0 {
        return Err(Error::param(
            "omega_i",
            "one-photon detunings must be nonzero",
        ));
    }
    Ok(EffectiveParams {
        g_eff: 0.5 * p.g1 * p.g2 * (1.0 / de - 1.0 / dg),
        beta_e: p.g2 * p.g2 / de,
        beta_g: p.g1 * p.g1 / dg,
        delta: p.two_photon_detuning(),
    })
}

/// Initial cavity field for the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldInput {
    Fock(u32),
    Thermal(ThermalField),
}

impl FieldInput {
    fn components(&self) -> Vec<(u32, f64)> {
        match self {
            FieldInput::Fock(n) => vec![(*n, 1.0)],
            FieldInput::Thermal(field) => field
                .weights()
                .iter()
                .enumerate()
                .map(|(n, &w)| (n as u32, w))
                .collect(),
        }
    }

    fn max_index(&self) -> u32 {
        match self {
            FieldInput::Fock(n) => *n,
            FieldInput::Thermal(field) => field.cutoff(),
        }
    }
}

/// Exactly diagonalized blocks for all sectors up to a field cutoff.
#[derive(Debug, Clone)]
pub struct FullModel {
    params: MicroParams,
    field_cutoff: u32,
    blocks: Vec<SymmetricEigen<f64, nalgebra::U3>>,
}

impl FullModel {
    /// Prepares every block whose states stay within `field_cutoff` photons.
    pub fn new(params: MicroParams, field_cutoff: u32) -> Result<Self> {
        if field_cutoff < 2 {
            return Err(Error::Truncation {
                needed: 2,
                cutoff: field_cutoff,
            });
        }
        let blocks = (0..=field_cutoff - 2)
            .map(|n| rotating_block(&params, n).symmetric_eigen())
            .collect();
        Ok(Self {
            params,
            field_cutoff,
            blocks,
        })
    }

    pub fn params(&self) -> &MicroParams {
        &self.params
    }

    pub fn field_cutoff(&self) -> u32 {
        self.field_cutoff
    }

    /// Column of `exp(-iH_n t)` for an atom entering sector `n` in `|e⟩`.
    pub fn passage(&self, n: u32, t: f64) -> Result<Vector3<Complex64>> {
        let eig = self.blocks.get(n as usize).ok_or(Error::Truncation {
            needed: n + 2,
            cutoff: self.field_cutoff,
        })?;
        let v = &eig.eigenvectors;
        let mut out = Vector3::zeros();
        for j in 0..3 {
            let phase = Complex64::from_polar(v[(0, j)], -eig.eigenvalues[j] * t);
            for k in 0..3 {
                out[k] += phase * v[(k, j)];
            }
        }
        Ok(out)
    }

    /// Sequential passage of two atoms, both entering in `|e⟩`.
    pub fn evolve_two_atoms(&self, t: f64, input: &FieldInput) -> Result<FullEvolution> {
        let needed = input.max_index() + 4;
        if needed > self.field_cutoff {
            return Err(Error::Truncation {
                needed,
                cutoff: self.field_cutoff,
            });
        }

        let mut reduced = Reduced9::zeros();
        for (n, weight) in input.components() {
            let first = self.passage(n, t)?;
            // two-atom amplitudes grouped by final photon number n + k
            let mut by_field = [[Complex64::new(0.0, 0.0); 9]; 5];
            for a1 in 0..3 {
                let second = self.passage(n + a1 as u32, t)?;
                for a2 in 0..3 {
                    by_field[a1 + a2][3 * a1 + a2] = first[a1] * second[a2];
                }
            }
            for psi in &by_field {
                for r in 0..9 {
                    if psi[r] == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..9 {
                        reduced[(r, c)] += psi[r] * psi[c].conj() * weight;
                    }
                }
            }
        }

        let trace = reduced.trace().re;
        let kept: f64 = QUBIT_INDICES.iter().map(|&k| reduced[(k, k)].re).sum();
        Ok(FullEvolution {
            reduced,
            trace,
            leakage: trace - kept,
        })
    }
}

fn rotating_block(p: &MicroParams, n: u32) -> Matrix3<f64> {
    let shift = p.omega_g + (f64::from(n) + 2.0) * p.omega;
    micro_block(p, n).entries - Matrix3::identity() * shift
}

/// Reduced two-atom state over `{e,i,g}⊗{e,i,g}` (index `3·a₁ + a₂`, with
/// `e = 0, i = 1, g = 2`) and the population outside `{e,g}⊗{e,g}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullEvolution {
    pub reduced: Reduced9,
    pub trace: f64,
    pub leakage: f64,
}

/// Positions of `ee, eg, ge, gg` in the nine-level basis.
const QUBIT_INDICES: [usize; 4] = [0, 2, 6, 8];

/// Runs the full model for one interaction time.
pub fn evolve_two_atoms_full(
    p: &MicroParams,
    t: f64,
    input: &FieldInput,
    field_cutoff: u32,
) -> Result<FullEvolution> {
    FullModel::new(*p, field_cutoff)?.evolve_two_atoms(t, input)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitProjection {
    /// Unit-trace state on `ee, eg, ge, gg`.
    pub matrix: Matrix4<Complex64>,
    /// Trace removed by the projection.
    pub discarded: f64,
}

/// Restricts a nine-level reduced state to `{e,g}⊗{e,g}` and renormalizes.
pub fn project_to_qubits(reduced: &Reduced9, leakage_bound: f64) -> Result<QubitProjection> {
    let mut m = Matrix4::zeros();
    for (r, &i) in QUBIT_INDICES.iter().enumerate() {
        for (c, &j) in QUBIT_INDICES.iter().enumerate() {
            m[(r, c)] = reduced[(i, j)];
        }
    }
    let kept = m.trace().re;
    let discarded = reduced.trace().re - kept;
    if discarded > leakage_bound {
        return Err(Error::LeakageExceeded {
            leakage: discarded,
            bound: leakage_bound,
        });
    }
    if !(kept > 0.0) {
        return Err(Error::Validation(
            "no population left in the qubit subspace".into(),
        ));
    }
    Ok(QubitProjection {
        matrix: m / Complex64::new(kept, 0.0),
        discarded,
    })
}

/// Settings for [`compare_effective_vs_full`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub input: FieldInput,
    pub field_cutoff: u32,
    pub leakage_bound: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            input: FieldInput::Fock(0),
            field_cutoff: 40,
            leakage_bound: DEFAULT_LEAKAGE_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonPoint {
    pub gt: f64,
    pub eof_full: f64,
    pub eof_effective: f64,
    /// Effective model with the diagonal taken literally (`β_e·n` on `|e,n⟩`).
    pub eof_literal: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub micro: MicroParams,
    pub effective: EffectiveParams,
    /// Rate converting the `gt` axis to time: `t = gt / time_unit`.
    pub time_unit: f64,
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    pub literal_max_abs_diff: f64,
    pub peak_leakage: f64,
    pub points: Vec<ComparisonPoint>,
}

/// Effective-model parameters used against the full model.
///
/// Eliminating `|i,n+1⟩` shifts `|e,n⟩` by `β_e(n+1)`, one `β_e` more than the
/// `β_e·n` diagonal of the effective Hamiltonian; that constant is absorbed
/// into the detuning. The coupling is taken by magnitude since its sign is a
/// phase convention for `|g⟩`.
pub fn comparison_model(eff: &EffectiveParams) -> Result<ModelParams> {
    ModelParams::new(
        eff.g_eff.abs(),
        eff.delta + eff.beta_e,
        eff.beta_e,
        eff.beta_g,
    )
}

fn literal_model(eff: &EffectiveParams) -> Result<ModelParams> {
    ModelParams::new(eff.g_eff.abs(), eff.delta, eff.beta_e, eff.beta_g)
}

fn effective_eof(model: &ModelParams, t: f64, input: &FieldInput) -> f64 {
    let rho = match input {
        FieldInput::Fock(n) => joint_density_fock(model, t, *n),
        FieldInput::Thermal(field) => joint_density_thermal(model, t, field).renormalized(),
    };
    crate::entanglement::entanglement(&rho).eof
}

/// Runs the effective and full pipelines on a grid of Rabi angles `g_eff·t`
/// and reports how far their entanglement of formation drifts apart.
///
/// When both couplings vanish the grid is read as plain time.
pub fn compare_effective_vs_full(
    p: &MicroParams,
    gt_grid: &[f64],
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    let eff = effective_params(p)?;
    let model = comparison_model(&eff)?;
    let literal = literal_model(&eff)?;
    let time_unit = if eff.g_eff != 0.0 {
        eff.g_eff.abs()
    } else {
        1.0
    };
    let full = FullModel::new(*p, opts.field_cutoff)?;

    let mut points = Vec::with_capacity(gt_grid.len());
    for &gt in gt_grid {
        let t = gt / time_unit;
        let evo = full.evolve_two_atoms(t, &opts.input)?;
        let proj = project_to_qubits(&evo.reduced, opts.leakage_bound)?;
        let c = concurrence_generic(&proj.matrix, TracePolicy::RequireUnit)?;
        points.push(ComparisonPoint {
            gt,
            eof_full: eof(c.min(1.0))?,
            eof_effective: effective_eof(&model, t, &opts.input),
            eof_literal: effective_eof(&literal, t, &opts.input),
            leakage: evo.leakage,
        });
    }

    let diffs: Vec<f64> = points
        .iter()
        .map(|pt| (pt.eof_full - pt.eof_effective).abs())
        .collect();
    let max_abs_diff = diffs.iter().copied().fold(0.0, f64::max);
    let mean_abs_diff = if diffs.is_empty() {
        0.0
    } else {
        diffs.iter().sum::<f64>() / diffs.len() as f64
    };
    let literal_max_abs_diff = points
        .iter()
        .map(|pt| (pt.eof_full - pt.eof_literal).abs())
        .fold(0.0, f64::max);
    let peak_leakage = points.iter().map(|pt| pt.leakage).fold(0.0, f64::max);

    Ok(ComparisonReport {
        micro: *p,
        effective: eff,
        time_unit,
        max_abs_diff,
        mean_abs_diff,
        literal_max_abs_diff,
        peak_leakage,
        points,
    })
}

/// One row of a detuning-convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderRow {
    pub factor: f64,
    pub lower_detuning: f64,
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    pub peak_leakage: f64,
}

/// Repeats the comparison with the intermediate detuning scaled by each
/// factor in turn.
pub fn detuning_ladder(
    p: &MicroParams,
    factors: &[f64],
    gt_grid: &[f64],
    opts: &CompareOptions,
) -> Result<Vec<LadderRow>> {
    factors
        .iter()
        .map(|&factor| {
            let scaled = p.with_intermediate_detuning_scaled(factor)?;
            let report = compare_effective_vs_full(&scaled, gt_grid, opts)?;
            Ok(LadderRow {
                factor,
                lower_detuning: scaled.lower_detuning(),
                max_abs_diff: report.max_abs_diff,
                mean_abs_diff: report.mean_abs_diff,
                peak_leakage: report.peak_leakage,
            })
        })
        .collect()
}
