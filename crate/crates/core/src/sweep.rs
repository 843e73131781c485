//! Multi-curve detuning sweeps with deterministic CSV formatting.
//!
//! A sweep evaluates the susceptibility pipeline over a Δ-grid for every
//! combination in a (λ, κ, N) list grid. Points are independent, so the
//! evaluation parallelizes trivially; rows are always emitted in
//! (curve_id, Δ ascending) order regardless of evaluation order, and all
//! numbers are formatted with 17 significant digits so identical inputs
//! produce byte-identical output.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::chi::{Pipeline, PipelineFlags, SusceptibilityPoint};
use crate::params::{AtomSpec, DeformationSpec, DriveSpec, LambdaMode};
use crate::{Error, Result};

/// Output toggles of a sweep configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFlags {
    #[serde(default = "default_true")]
    pub include_free_term: bool,
    /// Optional override of the parameter file's lambda mode.
    #[serde(default)]
    pub lambda_mode: Option<LambdaMode>,
}

fn default_true() -> bool {
    true
}

impl Default for SweepFlags {
    fn default() -> Self {
        Self {
            include_free_term: true,
            lambda_mode: None,
        }
    }
}

/// Sweep configuration (JSON). Frequencies in Hz.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Path of the flat parameter file; relative paths are resolved by the
    /// caller (the CLI resolves them against the config file's directory).
    pub params_file: String,
    pub delta_min_hz: f64,
    pub delta_max_hz: f64,
    /// Number of Δ grid points, endpoints included.
    pub steps: usize,
    pub lambda_list: Vec<f64>,
    pub kappa_list: Vec<f64>,
    /// Atom-number list (sets η = 1/N per curve).
    pub n_list: Vec<f64>,
    #[serde(default)]
    pub flags: SweepFlags,
    /// Finite-difference step for the group index (Hz); defaults to
    /// 1e-3 of the ground-coherence linewidth.
    #[serde(default)]
    pub fd_step_hz: Option<f64>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter {
            name: "sweep_config",
            reason: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: format!("need at least 2 grid points, got {}", self.steps),
            });
        }
        for (name, v) in [
            ("delta_min_hz", self.delta_min_hz),
            ("delta_max_hz", self.delta_max_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if !(self.delta_min_hz < self.delta_max_hz) {
            return Err(Error::InvalidParameter {
                name: "delta_max_hz",
                reason: format!(
                    "must exceed delta_min_hz, got [{}, {}]",
                    self.delta_min_hz, self.delta_max_hz
                ),
            });
        }
        for (name, list) in [
            ("lambda_list", &self.lambda_list),
            ("kappa_list", &self.kappa_list),
            ("n_list", &self.n_list),
        ] {
            if list.is_empty() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must contain at least one value".into(),
                });
            }
        }
        if let Some(h) = self.fd_step_hz {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "fd_step_hz",
                    reason: format!("must be positive and finite, got {h}"),
                });
            }
        }
        Ok(())
    }

    /// Δ grid in Hz, ascending, endpoints included.
    pub fn delta_grid_hz(&self) -> Vec<f64> {
        let span = self.delta_max_hz - self.delta_min_hz;
        let denom = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.delta_min_hz + span * (i as f64 / denom))
            .collect()
    }
}

/// One curve of the (λ, κ, N) grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec {
    pub curve_id: usize,
    pub lambda: f64,
    pub kappa: f64,
    pub big_n: f64,
}

/// Curves in λ-major, then κ, then N order; ids are sequential from 0.
pub fn curve_grid(config: &SweepConfig) -> Vec<CurveSpec> {
    let mut curves = Vec::new();
    for &lambda in &config.lambda_list {
        for &kappa in &config.kappa_list {
            for &big_n in &config.n_list {
                curves.push(CurveSpec {
                    curve_id: curves.len(),
                    lambda,
                    kappa,
                    big_n,
                });
            }
        }
    }
    curves
}

/// One evaluated output row.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub curve: CurveSpec,
    pub delta_hz: f64,
    pub point: SusceptibilityPoint,
}

fn build_pipelines(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
    config: &SweepConfig,
    curves: &[CurveSpec],
) -> Result<Vec<Pipeline>> {
    curves
        .iter()
        .map(|c| {
            let mut d = deform.clone();
            d.lambda = c.lambda;
            d.kappa = c.kappa;
            d.big_n = c.big_n;
            if let Some(mode) = config.flags.lambda_mode {
                d.lambda_mode = mode;
            }
            Pipeline::new(
                atom.clone(),
                drive.clone(),
                d,
                PipelineFlags {
                    include_free_term: config.flags.include_free_term,
                },
            )
        })
        .collect()
}

fn evaluate_task(
    pipelines: &[Pipeline],
    curves: &[CurveSpec],
    fd_step: Option<f64>,
    curve_idx: usize,
    delta_hz: f64,
) -> Result<SweepRow> {
    let point = pipelines[curve_idx].point(TAU * delta_hz, fd_step)?;
    Ok(SweepRow {
        curve: curves[curve_idx],
        delta_hz,
        point,
    })
}

/// Evaluates the full sweep sequentially. Output order: (curve_id, Δ asc).
pub fn run_sweep_sequential(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let curves = curve_grid(config);
    let pipelines = build_pipelines(atom, drive, deform, config, &curves)?;
    let deltas = config.delta_grid_hz();
    let fd_step = config.fd_step_hz.map(|h| TAU * h);
    let mut rows = Vec::with_capacity(curves.len() * deltas.len());
    for ci in 0..curves.len() {
        for &dh in &deltas {
            rows.push(evaluate_task(&pipelines, &curves, fd_step, ci, dh)?);
        }
    }
    Ok(rows)
}

/// Evaluates the full sweep, in parallel when the `parallel` feature is on.
/// Row order is identical to the sequential path.
#[cfg(feature = "parallel")]
pub fn run_sweep(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;

    config.validate()?;
    let curves = curve_grid(config);
    let pipelines = build_pipelines(atom, drive, deform, config, &curves)?;
    let deltas = config.delta_grid_hz();
    let fd_step = config.fd_step_hz.map(|h| TAU * h);
    let tasks: Vec<(usize, f64)> = (0..curves.len())
        .flat_map(|ci| deltas.iter().map(move |&dh| (ci, dh)))
        .collect();
    let results: Vec<Result<SweepRow>> = tasks
        .par_iter()
        .map(|&(ci, dh)| evaluate_task(&pipelines, &curves, fd_step, ci, dh))
        .collect();
    results.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_sweep(
    atom: &AtomSpec,
    drive: &DriveSpec,
    deform: &DeformationSpec,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    run_sweep_sequential(atom, drive, deform, config)
}

/// Fixed CSV column set.
pub const CSV_COLUMNS: [&str; 19] = [
    "curve_id",
    "lambda",
    "kappa",
    "big_n",
    "delta_hz",
    "re_chi1",
    "im_chi1",
    "re_chi3s",
    "im_chi3s",
    "re_chi5s",
    "im_chi5s",
    "re_chi_nl",
    "im_chi_nl",
    "re_chi",
    "im_chi",
    "re_n",
    "im_n",
    "n_group",
    "vg_over_c",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

/// Formats one row; floats carry 17 significant digits so equal inputs give
/// byte-equal output.
pub fn format_row(row: &SweepRow) -> String {
    let p = &row.point;
    let fields: [f64; 18] = [
        row.curve.lambda,
        row.curve.kappa,
        row.curve.big_n,
        row.delta_hz,
        p.chi1.re,
        p.chi1.im,
        p.chi3_scaled.re,
        p.chi3_scaled.im,
        p.chi5_scaled.re,
        p.chi5_scaled.im,
        p.chi_nl.re,
        p.chi_nl.im,
        p.chi_total.re,
        p.chi_total.im,
        p.n_index.re,
        p.n_index.im,
        p.n_group,
        p.vg_over_c,
    ];
    let mut out = row.curve.curve_id.to_string();
    for v in fields {
        out.push(',');
        out.push_str(&format!("{v:.16e}"));
    }
    out
}

/// Full CSV document (header + rows + trailing newline).
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{sodium_atom, sodium_deformation, sodium_drive};

    fn small_config() -> SweepConfig {
        SweepConfig {
            params_file: "unused".into(),
            delta_min_hz: -2.0e7,
            delta_max_hz: 2.0e7,
            steps: 5,
            lambda_list: vec![0.0, 0.3],
            kappa_list: vec![0.0],
            n_list: vec![1e20],
            flags: SweepFlags {
                include_free_term: false,
                lambda_mode: None,
            },
            fd_step_hz: None,
        }
    }

    #[test]
    fn grid_is_lambda_major_with_sequential_ids() {
        let mut config = small_config();
        config.kappa_list = vec![0.0, 0.005];
        let curves = curve_grid(&config);
        assert_eq!(curves.len(), 4);
        assert_eq!(
            curves.iter().map(|c| c.curve_id).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(curves[0].lambda, 0.0);
        assert_eq!(curves[0].kappa, 0.0);
        assert_eq!(curves[1].kappa, 0.005);
        assert_eq!(curves[2].lambda, 0.3);
    }

    #[test]
    fn delta_grid_hits_both_endpoints() {
        let mut config = small_config();
        config.steps = 2;
        assert_eq!(config.delta_grid_hz(), vec![-2.0e7, 2.0e7]);
        config.steps = 5;
        let grid = config.delta_grid_hz();
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], -2.0e7);
        assert_eq!(grid[4], 2.0e7);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_validation_names_offending_key() {
        let mut config = small_config();
        config.steps = 1;
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("steps"), "{err}");
        let mut config = small_config();
        config.lambda_list.clear();
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("lambda_list"), "{err}");
        let mut config = small_config();
        config.delta_max_hz = config.delta_min_hz;
        let err = config.validate().unwrap_err().to_string();
        assert!(err.contains("delta_max_hz"), "{err}");
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let err = SweepConfig::from_json(r#"{"params_file": "x", "bogus": 1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn parallel_and_sequential_agree_byte_for_byte() {
        let atom = sodium_atom();
        let drive = sodium_drive();
        let deform = sodium_deformation();
        let config = small_config();
        let par = run_sweep(&atom, &drive, &deform, &config).unwrap();
        let seq = run_sweep_sequential(&atom, &drive, &deform, &config).unwrap();
        assert_eq!(to_csv(&par), to_csv(&seq));
    }

    #[test]
    fn repeat_runs_are_byte_identical() {
        let atom = sodium_atom();
        let drive = sodium_drive();
        let deform = sodium_deformation();
        let config = small_config();
        let a = to_csv(&run_sweep(&atom, &drive, &deform, &config).unwrap());
        let b = to_csv(&run_sweep(&atom, &drive, &deform, &config).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rows_ordered_by_curve_then_delta_and_reparse_consistently() {
        let atom = sodium_atom();
        let drive = sodium_drive();
        let deform = sodium_deformation();
        let config = small_config();
        let rows = run_sweep(&atom, &drive, &deform, &config).unwrap();
        assert_eq!(rows.len(), 2 * 5);
        for pair in rows.windows(2) {
            let key0 = (pair[0].curve.curve_id, pair[0].delta_hz);
            let key1 = (pair[1].curve.curve_id, pair[1].delta_hz);
            assert!(key0 < key1, "{key0:?} !< {key1:?}");
        }
        // chi_total must re-parse as chi1 + chi_nl from the formatted text.
        for row in &rows {
            let text = format_row(row);
            let cols: Vec<f64> = text
                .split(',')
                .skip(1)
                .map(|s| s.parse::<f64>().unwrap())
                .collect();
            let (re_chi1, re_nl, re_chi) = (cols[4], cols[10], cols[12]);
            let scale = re_chi.abs().max(1.0);
            assert!((re_chi1 + re_nl - re_chi).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn header_has_nineteen_columns() {
        assert_eq!(csv_header().split(',').count(), 19);
        let atom = sodium_atom();
        let config = small_config();
        let rows =
            run_sweep(&atom, &sodium_drive(), &sodium_deformation(), &config).unwrap();
        assert_eq!(format_row(&rows[0]).split(',').count(), 19);
    }
}
