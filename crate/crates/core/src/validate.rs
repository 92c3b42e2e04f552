//! Driver for checking the effective model against the microscopic oracle.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::micro::{
    compare_effective_vs_full, detuning_ladder, CompareOptions, ComparisonReport, FieldInput,
    LadderRow, MicroParams, DEFAULT_LEAKAGE_BOUND,
};
use crate::two_atom::{thermal_weights, DEFAULT_TAIL_TOL};

/// Default bound on the maximum E_F deviation.
pub const DEFAULT_TOLERANCE: f64 = 0.05;

const VALIDATE_KEYS: &[&str] = &[
    "omega_e",
    "omega_i",
    "omega_g",
    "omega",
    "g1",
    "g2",
    "detuning",
    "coupling",
    "n0",
    "nbar",
    "tail_tol",
    "field_cutoff",
    "leakage_bound",
    "gt_min",
    "gt_max",
    "gt_step",
    "tolerance",
    "detuning_ladder",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateConfig {
    pub micro: MicroParams,
    pub n0: u32,
    pub nbar: f64,
    pub tail_tol: f64,
    pub field_cutoff: u32,
    pub leakage_bound: f64,
    pub gt_min: f64,
    pub gt_max: f64,
    pub gt_step: f64,
    pub tolerance: f64,
    /// Multipliers applied to the intermediate detuning, ascending.
    pub detuning_ladder: Vec<f64>,
}

impl ValidateConfig {
    pub fn new(micro: MicroParams) -> Self {
        Self {
            micro,
            n0: 0,
            nbar: 0.0,
            tail_tol: DEFAULT_TAIL_TOL,
            field_cutoff: 40,
            leakage_bound: DEFAULT_LEAKAGE_BOUND,
            gt_min: 0.0,
            gt_max: 3.0,
            gt_step: 0.01,
            tolerance: DEFAULT_TOLERANCE,
            detuning_ladder: vec![1.0, 2.0],
        }
    }

    /// Either all six of `omega_e, omega_i, omega_g, omega, g1, g2`, or the
    /// symmetric two-photon-resonant form `omega, detuning, coupling`.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.reject_unknown(VALIDATE_KEYS)?;
        let need = |key: &str| -> Result<f64> {
            kv.f64(key)?
                .ok_or_else(|| Error::config(key, "missing required key"))
        };
        let micro = if kv.f64("detuning")?.is_some() {
            for key in ["omega_e", "omega_i", "omega_g", "g1", "g2"] {
                if kv.f64(key)?.is_some() {
                    return Err(Error::config(
                        key,
                        "cannot be combined with the symmetric `detuning` form",
                    ));
                }
            }
            MicroParams::symmetric(need("omega")?, need("detuning")?, need("coupling")?)
        } else {
            MicroParams::new(
                need("omega_e")?,
                need("omega_i")?,
                need("omega_g")?,
                need("omega")?,
                need("g1")?,
                need("g2")?,
            )
        }
        .map_err(|e| Error::config("micro parameters", e.to_string()))?;

        let mut cfg = Self::new(micro);
        if let Some(v) = kv.u32("n0")? {
            cfg.n0 = v;
        }
        if let Some(v) = kv.f64("nbar")? {
            cfg.nbar = v;
        }
        if let Some(v) = kv.f64("tail_tol")? {
            cfg.tail_tol = v;
        }
        if let Some(v) = kv.u32("field_cutoff")? {
            cfg.field_cutoff = v;
        }
        if let Some(v) = kv.f64("leakage_bound")? {
            cfg.leakage_bound = v;
        }
        if let Some(v) = kv.f64("gt_min")? {
            cfg.gt_min = v;
        }
        if let Some(v) = kv.f64("gt_max")? {
            cfg.gt_max = v;
        }
        if let Some(v) = kv.f64("gt_step")? {
            cfg.gt_step = v;
        }
        if let Some(v) = kv.f64("tolerance")? {
            cfg.tolerance = v;
        }
        if let Some(v) = kv.f64_list("detuning_ladder")? {
            cfg.detuning_ladder = v;
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::read(path)?)
    }

    fn check(&self) -> Result<()> {
        if !(self.gt_step > 0.0) {
            return Err(Error::config("gt_step", "must be positive"));
        }
        if !(self.gt_min >= 0.0 && self.gt_max > self.gt_min) {
            return Err(Error::config("gt_max", "must exceed gt_min >= 0"));
        }
        if !(self.nbar >= 0.0) {
            return Err(Error::config("nbar", "must be non-negative"));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::config("tail_tol", "must lie in (0, 1)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance", "must be positive"));
        }
        if !(self.leakage_bound >= 0.0) {
            return Err(Error::config("leakage_bound", "must be non-negative"));
        }
        if self.detuning_ladder.iter().any(|&f| !(f > 0.0)) {
            return Err(Error::config("detuning_ladder", "factors must be positive"));
        }
        if self.detuning_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "detuning_ladder",
                "factors must be strictly ascending",
            ));
        }
        Ok(())
    }

    pub fn gt_grid(&self) -> Vec<f64> {
        let count = ((self.gt_max - self.gt_min) / self.gt_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.gt_min + k as f64 * self.gt_step)
            .collect()
    }

    fn compare_options(&self) -> Result<CompareOptions> {
        let input = if self.nbar > 0.0 {
            FieldInput::Thermal(thermal_weights(self.nbar, self.tail_tol)?)
        } else {
            FieldInput::Fock(self.n0)
        };
        Ok(CompareOptions {
            input,
            field_cutoff: self.field_cutoff,
            leakage_bound: self.leakage_bound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationOutcome {
    pub report: ComparisonReport,
    pub ladder: Vec<LadderRow>,
    pub tolerance: f64,
    pub warnings: Vec<String>,
    pub within_tolerance: bool,
    /// Deviation does not grow along the detuning ladder.
    pub monotone: bool,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.within_tolerance && self.monotone
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let r = &self.report;
        let m = &r.micro;
        let e = &r.effective;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "microscopic: omega_e={} omega_i={} omega_g={} omega={} g1={} g2={}",
            m.omega_e, m.omega_i, m.omega_g, m.omega, m.g1, m.g2
        );
        let _ = writeln!(
            s,
            "effective:   g_eff={:.6e} beta_e={:.6e} beta_g={:.6e} delta={:.6e}",
            e.g_eff, e.beta_e, e.beta_g, e.delta
        );
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        let _ = writeln!(s, "points:               {}", r.points.len());
        let _ = writeln!(s, "max |dE_F|:           {:.6e}", r.max_abs_diff);
        let _ = writeln!(s, "mean |dE_F|:          {:.6e}", r.mean_abs_diff);
        let _ = writeln!(s, "max |dE_F| (literal): {:.6e}", r.literal_max_abs_diff);
        let _ = writeln!(s, "peak leakage:         {:.6e}", r.peak_leakage);
        let _ = writeln!(s, "tolerance:            {:.6e}", self.tolerance);
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>8} {:>14} {:>14} {:>14} {:>14}",
            "factor", "omega_ig-omega", "max|dE_F|", "mean|dE_F|", "peak leakage"
        );
        for row in &self.ladder {
            let _ = writeln!(
                s,
                "{:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
                row.factor,
                row.lower_detuning,
                row.max_abs_diff,
                row.mean_abs_diff,
                row.peak_leakage
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "result: {} (within tolerance: {}, monotone: {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.within_tolerance,
            self.monotone
        );
        s
    }
}

/// Runs the comparison at the configured parameters and along the detuning
/// ladder.
pub fn run_validate(cfg: &ValidateConfig) -> Result<ValidationOutcome> {
    cfg.check()?;
    let opts = cfg.compare_options()?;
    let grid = cfg.gt_grid();
    let report = compare_effective_vs_full(&cfg.micro, &grid, &opts)?;
    let ladder = detuning_ladder(&cfg.micro, &cfg.detuning_ladder, &grid, &opts)?;
    let monotone = ladder
        .windows(2)
        .all(|w| w[1].max_abs_diff <= w[0].max_abs_diff);
    Ok(ValidationOutcome {
        within_tolerance: report.max_abs_diff <= cfg.tolerance,
        monotone,
        tolerance: cfg.tolerance,
        warnings: cfg.micro.adiabaticity_warnings(),
        report,
        ladder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_form() {
        let kv = KeyValues::parse("omega = 1000\ndetuning = 100\ncoupling = 1\ngt_step = 0.05\n")
            .unwrap();
        let cfg = ValidateConfig::from_key_values(&kv).unwrap();
        assert_eq!(cfg.micro.lower_detuning(), 100.0);
        assert_eq!(cfg.gt_grid().len(), 61);
    }

    #[test]
    fn missing_and_conflicting_keys() {
        let kv = KeyValues::parse("omega = 1000\ng1 = 1\n").unwrap();
        let err = ValidateConfig::from_key_values(&kv).unwrap_err();
        assert!(err.to_string().contains("omega_e"), "{err}");

        let kv = KeyValues::parse("omega = 1000\ndetuning = 100\ncoupling = 1\ng1 = 2\n").unwrap();
        assert!(ValidateConfig::from_key_values(&kv).is_err());

        let kv = KeyValues::parse(
            "omega = 1000\ndetuning = 100\ncoupling = 1\ndetuning_ladder = 2, 1\n",
        )
        .unwrap();
        assert!(ValidateConfig::from_key_values(&kv).is_err());
    }

    #[test]
    fn zero_coupling_passes_trivially() {
        let mut cfg = ValidateConfig::new(MicroParams::symmetric(1000.0, 100.0, 0.0).unwrap());
        cfg.gt_step = 0.1;
        let out = run_validate(&cfg).unwrap();
        assert_eq!(out.report.max_abs_diff, 0.0);
        assert!(out.passed());
        assert!(out.to_text().contains("result: PASS"));
    }
}
