//! Rabi-angle sweeps, figure presets and deterministic CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::KeyValues;
use crate::effective::ModelParams;
use crate::entanglement::entanglement;
use crate::error::{Error, Result};
use crate::two_atom::{
    joint_density_fock, joint_density_thermal, thermal_weights, DEFAULT_TAIL_TOL,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Mean photon number assumed for the fig6 preset.
pub const DEFAULT_FIG6_NBAR: f64 = 0.1;

/// Largest tail tolerance a sweep accepts.
pub const MAX_SWEEP_TAIL_TOL: f64 = 1e-4;

const SWEEP_KEYS: &[&str] = &[
    "delta_over_g",
    "beta_over_g",
    "nbar",
    "n0",
    "gt_min",
    "gt_max",
    "gt_step",
    "tail_tol",
    "renormalize_thermal",
    "output",
    "workers",
    "fig6_nbar",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub delta_over_g: Vec<f64>,
    pub beta_over_g: Vec<f64>,
    /// `0` selects a Fock-state field with index `n0`.
    pub nbar: Vec<f64>,
    pub n0: u32,
    pub gt_min: f64,
    pub gt_max: f64,
    pub gt_step: f64,
    pub tail_tol: f64,
    pub renormalize_thermal: bool,
    pub output_path: PathBuf,
    /// Worker threads; `0` lets the pool decide.
    pub workers: usize,
    pub fig6_nbar: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            delta_over_g: vec![0.0],
            beta_over_g: vec![0.0],
            nbar: vec![0.0],
            n0: 0,
            gt_min: 0.0,
            gt_max: 4.0,
            gt_step: 0.005,
            tail_tol: DEFAULT_TAIL_TOL,
            renormalize_thermal: false,
            output_path: PathBuf::from("."),
            workers: 0,
            fig6_nbar: DEFAULT_FIG6_NBAR,
        }
    }
}

impl SweepConfig {
    /// Overlays the keys present in `kv` onto `self`.
    pub fn apply(mut self, kv: &KeyValues) -> Result<Self> {
        kv.reject_unknown(SWEEP_KEYS)?;
        if let Some(v) = kv.f64_list("delta_over_g")? {
            self.delta_over_g = v;
        }
        if let Some(v) = kv.f64_list("beta_over_g")? {
            self.beta_over_g = v;
        }
        if let Some(v) = kv.f64_list("nbar")? {
            self.nbar = v;
        }
        if let Some(v) = kv.u32("n0")? {
            self.n0 = v;
        }
        if let Some(v) = kv.f64("gt_min")? {
            self.gt_min = v;
        }
        if let Some(v) = kv.f64("gt_max")? {
            self.gt_max = v;
        }
        if let Some(v) = kv.f64("gt_step")? {
            self.gt_step = v;
        }
        if let Some(v) = kv.f64("tail_tol")? {
            self.tail_tol = v;
        }
        if let Some(v) = kv.bool("renormalize_thermal")? {
            self.renormalize_thermal = v;
        }
        if let Some(v) = kv.path("output") {
            self.output_path = v;
        }
        if let Some(v) = kv.usize("workers")? {
            self.workers = v;
        }
        if let Some(v) = kv.f64("fig6_nbar")? {
            self.fig6_nbar = v;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, list) in [
            ("delta_over_g", &self.delta_over_g),
            ("beta_over_g", &self.beta_over_g),
            ("nbar", &self.nbar),
        ] {
            if list.is_empty() {
                return Err(Error::config(name, "list is empty"));
            }
            if let Some(v) = list.iter().find(|v| !v.is_finite()) {
                return Err(Error::config(name, format!("must be finite, got {v}")));
            }
        }
        if let Some(v) = self.nbar.iter().find(|&&v| v < 0.0) {
            return Err(Error::config(
                "nbar",
                format!("must be non-negative, got {v}"),
            ));
        }
        if !(self.fig6_nbar >= 0.0 && self.fig6_nbar.is_finite()) {
            return Err(Error::config(
                "fig6_nbar",
                "must be finite and non-negative",
            ));
        }
        if !(self.gt_step > 0.0 && self.gt_step.is_finite()) {
            return Err(Error::config(
                "gt_step",
                format!("must be positive, got {}", self.gt_step),
            ));
        }
        if !(self.gt_min >= 0.0 && self.gt_min.is_finite()) {
            return Err(Error::config(
                "gt_min",
                format!("must be non-negative, got {}", self.gt_min),
            ));
        }
        if !(self.gt_max > self.gt_min && self.gt_max.is_finite()) {
            return Err(Error::config(
                "gt_max",
                format!("must exceed gt_min = {}, got {}", self.gt_min, self.gt_max),
            ));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol <= MAX_SWEEP_TAIL_TOL) {
            return Err(Error::config(
                "tail_tol",
                format!(
                    "must lie in (0, {MAX_SWEEP_TAIL_TOL:e}], got {}",
                    self.tail_tol
                ),
            ));
        }
        Ok(())
    }

    /// Rabi angles `gt_min + k·gt_step` up to `gt_max`, ascending.
    pub fn gt_grid(&self) -> Vec<f64> {
        let span = (self.gt_max - self.gt_min) / self.gt_step;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.gt_min + k as f64 * self.gt_step)
            .collect()
    }

    /// Every `(Δ/g, β/g, nbar)` combination, in list order.
    pub fn series(&self) -> Vec<SeriesSpec> {
        let mut out = Vec::new();
        for &delta_over_g in &self.delta_over_g {
            for &beta_over_g in &self.beta_over_g {
                for &nbar in &self.nbar {
                    out.push(SeriesSpec {
                        delta_over_g,
                        beta_over_g,
                        nbar,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub delta_over_g: f64,
    pub beta_over_g: f64,
    /// `0` for a Fock-state field.
    pub nbar: f64,
}

impl SeriesSpec {
    fn file_stem(&self) -> String {
        format!(
            "d{}_b{}_nbar{}",
            self.delta_over_g, self.beta_over_g, self.nbar
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gt: f64,
    pub concurrence: f64,
    pub eof: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub spec: SeriesSpec,
    pub rows: Vec<SweepRow>,
    /// Thermal cutoff, `None` for Fock input.
    pub cutoff: Option<u32>,
    pub tail_deficit: f64,
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))
}

/// Evaluates one series on the configured grid. Rows are computed in
/// parallel and collected in grid order.
pub fn compute_series(spec: &SeriesSpec, cfg: &SweepConfig) -> Result<SeriesResult> {
    let pool = build_pool(cfg.workers)?;
    compute_series_in(&pool, spec, cfg)
}

fn compute_series_in(
    pool: &rayon::ThreadPool,
    spec: &SeriesSpec,
    cfg: &SweepConfig,
) -> Result<SeriesResult> {
    let params = ModelParams::dimensionless(spec.delta_over_g, spec.beta_over_g)?;
    let field = if spec.nbar > 0.0 {
        Some(thermal_weights(spec.nbar, cfg.tail_tol)?)
    } else {
        None
    };
    let grid = cfg.gt_grid();

    let rows = pool.install(|| {
        grid.par_iter()
            .map(|&gt| {
                let rho = match &field {
                    None => joint_density_fock(&params, gt, cfg.n0),
                    Some(f) => {
                        let rho = joint_density_thermal(&params, gt, f);
                        if cfg.renormalize_thermal {
                            rho.renormalized()
                        } else {
                            rho
                        }
                    }
                };
                let e = entanglement(&rho);
                SweepRow {
                    gt,
                    concurrence: e.concurrence,
                    eof: e.eof,
                }
            })
            .collect()
    });

    Ok(SeriesResult {
        spec: *spec,
        rows,
        cutoff: field.as_ref().map(|f| f.cutoff()),
        tail_deficit: field.as_ref().map_or(0.0, |f| f.tail_deficit()),
    })
}

/// CSV number format: exact zero as `0`, everything else with 17
/// significant digits in lowercase scientific notation.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Full CSV text for one series: `#` metadata header, column line, rows.
pub fn render_csv(result: &SeriesResult, cfg: &SweepConfig) -> String {
    let spec = &result.spec;
    let mut s = String::new();
    let _ = writeln!(s, "# starkqed {TOOL_VERSION}");
    let _ = writeln!(s, "# two-atom entanglement vs Rabi angle gt (g = 1)");
    let _ = writeln!(s, "# delta_over_g = {}", spec.delta_over_g);
    let _ = writeln!(s, "# beta_over_g = {}", spec.beta_over_g);
    let _ = writeln!(s, "# nbar = {}", spec.nbar);
    match result.cutoff {
        None => {
            let _ = writeln!(s, "# field = fock");
            let _ = writeln!(s, "# n0 = {}", cfg.n0);
        }
        Some(cutoff) => {
            let _ = writeln!(s, "# field = thermal");
            let _ = writeln!(s, "# tail_tol = {:e}", cfg.tail_tol);
            let _ = writeln!(s, "# cutoff = {cutoff}");
            let _ = writeln!(s, "# renormalize_thermal = {}", cfg.renormalize_thermal);
        }
    }
    let _ = writeln!(s, "# tail_deficit = {:e}", result.tail_deficit);
    let _ = writeln!(
        s,
        "# gt_min = {}, gt_max = {}, gt_step = {}",
        cfg.gt_min, cfg.gt_max, cfg.gt_step
    );
    let _ = writeln!(s, "gt,concurrence,eof");
    for row in &result.rows {
        let _ = writeln!(
            s,
            "{},{},{}",
            format_number(row.gt),
            format_number(row.concurrence),
            format_number(row.eof)
        );
    }
    s
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrittenSeries {
    pub path: PathBuf,
    pub result: SeriesResult,
}

/// Writes one CSV per `(Δ/g, β/g, nbar)` combination into the output
/// directory, named `d{Δ}_b{β}_nbar{nbar}.csv`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<WrittenSeries>> {
    cfg.validate()?;
    ensure_dir(&cfg.output_path)?;
    let pool = build_pool(cfg.workers)?;
    cfg.series()
        .iter()
        .map(|spec| {
            let result = compute_series_in(&pool, spec, cfg)?;
            let path = cfg.output_path.join(format!("{}.csv", spec.file_stem()));
            write_file(&path, &render_csv(&result, cfg))?;
            Ok(WrittenSeries { path, result })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineStyle {
    Solid,
    Dotted,
}

impl LineStyle {
    pub fn as_str(&self) -> &'static str {
        match self {
            LineStyle::Solid => "solid",
            LineStyle::Dotted => "dotted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetSeries {
    pub spec: SeriesSpec,
    pub style: LineStyle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub name: String,
    pub series: Vec<PresetSeries>,
    pub assumptions: Vec<String>,
}

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// Series for a figure: resonant reference (solid) against a detuned,
/// Stark-shifted case (dotted), in vacuum or at `nbar = 0.1`.
pub fn figure_preset(name: &str, fig6_nbar: f64) -> Result<FigurePreset> {
    let pair = |delta: f64, beta: f64, nbar: f64| {
        vec![
            PresetSeries {
                spec: SeriesSpec {
                    delta_over_g: 0.0,
                    beta_over_g: 0.0,
                    nbar,
                },
                style: LineStyle::Solid,
            },
            PresetSeries {
                spec: SeriesSpec {
                    delta_over_g: delta,
                    beta_over_g: beta,
                    nbar,
                },
                style: LineStyle::Dotted,
            },
        ]
    };
    let (series, assumptions) = match name {
        "fig2" => (pair(2.0, 2.0, 0.0), vec![]),
        "fig3" => (pair(-1.0, 1.0, 0.0), vec![]),
        "fig4" => (pair(2.0, 2.0, 0.1), vec![]),
        "fig5" => (pair(-1.0, 1.0, 0.1), vec![]),
        "fig6" => (
            vec![PresetSeries {
                spec: SeriesSpec {
                    delta_over_g: -2.0,
                    beta_over_g: 2.0,
                    nbar: fig6_nbar,
                },
                style: LineStyle::Solid,
            }],
            vec![format!(
                "mean thermal photon number not given for this figure; using nbar = {fig6_nbar}"
            )],
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(FigurePreset {
        name: name.to_string(),
        series,
        assumptions,
    })
}

/// Manifest consumed by the plotting tool. CSV paths are relative to the
/// manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotManifest {
    pub figure: String,
    pub tool_version: String,
    pub x_label: String,
    pub y_label: String,
    pub image: String,
    pub series: Vec<ManifestSeries>,
    pub assumptions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSeries {
    pub csv: String,
    pub label: String,
    pub line_style: LineStyle,
    pub delta_over_g: f64,
    pub beta_over_g: f64,
    pub nbar: f64,
}

impl PlotManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("manifest", e.to_string()))
    }
}

fn series_label(spec: &SeriesSpec) -> String {
    let mut label = format!("Δ/g={}, β/g={}", spec.delta_over_g, spec.beta_over_g);
    if spec.nbar > 0.0 {
        let _ = write!(label, ", <n>={}", spec.nbar);
    }
    label
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetOutput {
    pub manifest_path: PathBuf,
    pub manifest: PlotManifest,
    pub series: Vec<WrittenSeries>,
}

/// Runs a figure preset with the grid, tolerance and worker settings of
/// `cfg`, writing `{name}_{style}.csv` files and `{name}_manifest.json`.
pub fn run_preset(name: &str, cfg: &SweepConfig) -> Result<PresetOutput> {
    cfg.validate()?;
    let preset = figure_preset(name, cfg.fig6_nbar)?;
    ensure_dir(&cfg.output_path)?;
    let pool = build_pool(cfg.workers)?;

    let mut written = Vec::new();
    let mut entries = Vec::new();
    for s in &preset.series {
        let result = compute_series_in(&pool, &s.spec, cfg)?;
        let file = format!("{}_{}.csv", preset.name, s.style.as_str());
        let path = cfg.output_path.join(&file);
        write_file(&path, &render_csv(&result, cfg))?;
        entries.push(ManifestSeries {
            csv: file,
            label: series_label(&s.spec),
            line_style: s.style,
            delta_over_g: s.spec.delta_over_g,
            beta_over_g: s.spec.beta_over_g,
            nbar: s.spec.nbar,
        });
        written.push(WrittenSeries { path, result });
    }

    let manifest = PlotManifest {
        figure: preset.name.clone(),
        tool_version: TOOL_VERSION.to_string(),
        x_label: "gt".to_string(),
        y_label: "E_F".to_string(),
        image: format!("{}.png", preset.name),
        series: entries,
        assumptions: preset.assumptions,
    };
    let manifest_path = cfg
        .output_path
        .join(format!("{}_manifest.json", preset.name));
    write_file(&manifest_path, &manifest.to_json())?;
    Ok(PresetOutput {
        manifest_path,
        manifest,
        series: written,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(delta: f64, beta: f64, nbar: f64) -> SweepConfig {
        SweepConfig {
            delta_over_g: vec![delta],
            beta_over_g: vec![beta],
            nbar: vec![nbar],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn default_grid() {
        let g = SweepConfig::default().gt_grid();
        assert_eq!(g.len(), 801);
        assert_eq!(g[0], 0.0);
        assert!((g[800] - 4.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn single_point_row() {
        let cfg = SweepConfig {
            gt_max: 0.001,
            gt_step: 0.01,
            ..single(0.0, 0.0, 0.0)
        };
        let res = compute_series(&cfg.series()[0], &cfg).unwrap();
        let csv = render_csv(&res, &cfg);
        let last = csv.lines().last().unwrap();
        assert_eq!(last, "0,0,0");
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(0.005), "5.0000000000000001e-3");
        let x = 0.136_061_231_280_898_3_f64;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn validation_names_fields() {
        let bad = [
            (
                SweepConfig {
                    gt_step: 0.0,
                    ..SweepConfig::default()
                },
                "gt_step",
            ),
            (
                SweepConfig {
                    gt_max: 0.0,
                    ..SweepConfig::default()
                },
                "gt_max",
            ),
            (
                SweepConfig {
                    gt_min: -1.0,
                    ..SweepConfig::default()
                },
                "gt_min",
            ),
            (
                SweepConfig {
                    tail_tol: 1e-3,
                    ..SweepConfig::default()
                },
                "tail_tol",
            ),
            (
                SweepConfig {
                    nbar: vec![-0.1],
                    ..SweepConfig::default()
                },
                "nbar",
            ),
            (
                SweepConfig {
                    delta_over_g: vec![],
                    ..SweepConfig::default()
                },
                "delta_over_g",
            ),
        ];
        for (cfg, field) in bad {
            let err = cfg.validate().unwrap_err();
            assert!(
                matches!(&err, Error::Config { field: f, .. } if f == field),
                "{err}"
            );
        }
        SweepConfig::default().validate().unwrap();
    }

    #[test]
    fn config_overlay() {
        let kv = KeyValues::parse("delta_over_g = -1, 1\nnbar = [0.1]\ngt_max = 3\n").unwrap();
        let cfg = SweepConfig::default().apply(&kv).unwrap();
        assert_eq!(cfg.delta_over_g, vec![-1.0, 1.0]);
        assert_eq!(cfg.nbar, vec![0.1]);
        assert_eq!(cfg.gt_max, 3.0);
        assert_eq!(cfg.series().len(), 2);

        let kv = KeyValues::parse("colour = blue\n").unwrap();
        assert!(SweepConfig::default().apply(&kv).is_err());
    }

    #[test]
    fn resonant_vacuum_at_unit_angle() {
        let cfg = SweepConfig {
            gt_max: 1.0,
            gt_step: 0.5,
            ..single(0.0, 0.0, 0.0)
        };
        let res = compute_series(&cfg.series()[0], &cfg).unwrap();
        let row = res.rows[2];
        assert_eq!(row.gt, 1.0);
        assert!((row.eof - 0.136_061_231_280_898_3).abs() < 1e-14);
        assert_eq!(res.cutoff, None);
    }

    #[test]
    fn thermal_series_records_cutoff() {
        let cfg = SweepConfig {
            gt_max: 1.0,
            gt_step: 0.25,
            ..single(0.0, 0.0, 0.1)
        };
        let res = compute_series(&cfg.series()[0], &cfg).unwrap();
        assert_eq!(res.cutoff, Some(9));
        assert!(res.tail_deficit > 0.0 && res.tail_deficit <= 1e-10);
        let csv = render_csv(&res, &cfg);
        assert!(csv.contains("# cutoff = 9"));
        assert!(csv.contains("# field = thermal"));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let base = SweepConfig {
            gt_max: 4.0,
            gt_step: 0.01,
            ..single(-1.0, 1.0, 0.5)
        };
        let spec = base.series()[0];
        let one = render_csv(
            &compute_series(
                &spec,
                &SweepConfig {
                    workers: 1,
                    ..base.clone()
                },
            )
            .unwrap(),
            &base,
        );
        let four = render_csv(
            &compute_series(
                &spec,
                &SweepConfig {
                    workers: 4,
                    ..base.clone()
                },
            )
            .unwrap(),
            &base,
        );
        assert_eq!(one, four);
    }

    #[test]
    fn presets_match_captions() {
        let f2 = figure_preset("fig2", 0.1).unwrap();
        assert_eq!(f2.series.len(), 2);
        assert_eq!(
            f2.series[1].spec,
            SeriesSpec {
                delta_over_g: 2.0,
                beta_over_g: 2.0,
                nbar: 0.0
            }
        );
        assert_eq!(f2.series[1].style, LineStyle::Dotted);
        let f5 = figure_preset("fig5", 0.1).unwrap();
        assert_eq!(f5.series[0].spec.nbar, 0.1);
        assert_eq!(f5.series[1].spec.delta_over_g, -1.0);
        let f6 = figure_preset("fig6", 0.3).unwrap();
        assert_eq!(f6.series.len(), 1);
        assert_eq!(f6.series[0].spec.nbar, 0.3);
        assert_eq!(f6.assumptions.len(), 1);
        assert!(matches!(
            figure_preset("fig7", 0.1),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn manifest_round_trips() {
        let m = PlotManifest {
            figure: "fig3".into(),
            tool_version: TOOL_VERSION.into(),
            x_label: "gt".into(),
            y_label: "E_F".into(),
            image: "fig3.png".into(),
            series: vec![ManifestSeries {
                csv: "fig3_solid.csv".into(),
                label: "Δ/g=0, β/g=0".into(),
                line_style: LineStyle::Solid,
                delta_over_g: 0.0,
                beta_over_g: 0.0,
                nbar: 0.0,
            }],
            assumptions: vec![],
        };
        let text = m.to_json();
        assert!(text.contains("\"line_style\": \"solid\""));
        assert_eq!(PlotManifest::from_json(&text).unwrap(), m);
    }
}
