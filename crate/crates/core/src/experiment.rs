//! The four-level photonic `2^(4) -> 1` experiment: state preparation model,
//! the measured data table and its statistical summary.
//!
//! Logical levels live in polarization and path modes:
//! `|1⟩ = |H,a⟩`, `|2⟩ = |V,a⟩`, `|3⟩ = |H,b⟩`, `|0⟩ = |V,b⟩`. Optical vectors
//! are ordered `H,a / V,a / H,b / V,b`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classical::classical_success;
use crate::error::{QracError, Result};
use crate::linalg::{Ket, C64};
use crate::qrac2::{encode2, Qrac2Code};

/// Dimension of the experiment.
pub const DIM: usize = 4;
/// Rows in the data table, one per encoding `(x0, x1)`.
pub const RECORD_COUNT: usize = 16;
/// The shipped data table.
pub const TABLE2_CSV: &str = include_str!("../data/table2.csv");

const PHI_TOL: f64 = 1e-6;

/// Wave-plate angles in degrees and the phase shift in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OpticsSetting {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub phi: f64,
}

/// One row of the data table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub label: String,
    pub x0: usize,
    pub x1: usize,
    pub setting: OpticsSetting,
    /// Measured success for `x0` (computational basis).
    pub pz: f64,
    pub pz_err: f64,
    /// Measured success for `x1` (Fourier basis).
    pub px: f64,
    pub px_err: f64,
}

/// Which symbol Bob asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Question {
    /// `x0`, computational basis.
    Z,
    /// `x1`, Fourier basis.
    X,
}

impl Question {
    pub fn index(self) -> usize {
        match self {
            Question::Z => 0,
            Question::X => 1,
        }
    }
}

/// Fixed correspondence between logical levels and optical modes.
#[derive(Clone, Copy, Debug, Default)]
pub struct LogicalMap;

impl LogicalMap {
    const OPTICAL: [usize; DIM] = [3, 0, 1, 2];
    pub const MODES: [&'static str; DIM] = ["H,a", "V,a", "H,b", "V,b"];

    pub fn optical_index(self, logical: usize) -> usize {
        Self::OPTICAL[logical]
    }

    pub fn logical_index(self, optical: usize) -> usize {
        (optical + 1) % DIM
    }

    pub fn mode(self, logical: usize) -> &'static str {
        Self::MODES[self.optical_index(logical)]
    }

    /// Reorders a logical-basis state into optical-mode order.
    pub fn to_optical(self, logical: &Ket) -> Result<Ket> {
        if logical.dim() != DIM {
            return Err(QracError::DimensionMismatch {
                expected: DIM,
                got: logical.dim(),
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); DIM];
        for (k, a) in logical.amps().iter().enumerate() {
            amps[self.optical_index(k)] = *a;
        }
        Ket::new(amps)
    }
}

/// Amplitudes produced by the wave plates and phase shifter, in optical order.
pub fn prepare_optics_state(s: &OpticsSetting) -> Ket {
    let (t1, t2, t3) = (
        (2.0 * s.theta1).to_radians(),
        (2.0 * s.theta2).to_radians(),
        (2.0 * s.theta3).to_radians(),
    );
    let phase = C64::from_polar(1.0, s.phi);
    let amps = vec![
        C64::new(t1.cos() * t2.cos(), 0.0),
        C64::new(t1.cos() * t2.sin(), 0.0),
        phase * (t1.sin() * t3.sin()),
        -phase * (t1.sin() * t3.cos()),
    ];
    Ket::new(amps).expect("unit norm by construction")
}

/// Success probability of the ideal `d = 4` code on `(x0, x1)`.
pub fn ideal_success(x0: usize, x1: usize, question: Question) -> Result<f64> {
    let code = Qrac2Code::new(DIM)?;
    for x in [x0, x1] {
        if x >= DIM {
            return Err(QracError::OutOfRange { symbol: x, d: DIM });
        }
    }
    code.correct_prob(x0, x1, question.index())
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    label: String,
    x0: usize,
    x1: usize,
    theta1_deg: f64,
    theta2_deg: f64,
    theta3_deg: f64,
    phi_rad: f64,
    pz: f64,
    pz_err: f64,
    px: f64,
    px_err: f64,
}

fn parse_error(line: u64, message: impl Into<String>) -> QracError {
    QracError::Parse {
        line,
        message: message.into(),
    }
}

fn check_row(row: &Row, line: u64) -> Result<()> {
    if row.x0 >= DIM || row.x1 >= DIM {
        return Err(parse_error(line, "symbols must lie in 0..4"));
    }
    let angles = [row.theta1_deg, row.theta2_deg, row.theta3_deg, row.phi_rad];
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(parse_error(line, "angles must be finite"));
    }
    if row.phi_rad.abs() > PHI_TOL && (row.phi_rad - std::f64::consts::PI).abs() > PHI_TOL {
        return Err(parse_error(line, "phi must be 0 or pi"));
    }
    for (name, p) in [("pz", row.pz), ("px", row.px)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(parse_error(line, format!("{name} = {p} outside [0, 1]")));
        }
    }
    for (name, e) in [("pz_err", row.pz_err), ("px_err", row.px_err)] {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(parse_error(
                line,
                format!("{name} = {e} must be non-negative"),
            ));
        }
    }
    Ok(())
}

/// Parses the CSV table; `#` lines are comments.
pub fn parse_table2(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::with_capacity(RECORD_COUNT);
    let mut seen = [[false; DIM]; DIM];
    let headers = reader
        .headers()
        .map_err(|e| parse_error(1, e.to_string()))?
        .clone();
    let mut raw = csv::StringRecord::new();
    loop {
        let more = reader.read_record(&mut raw).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        if !more {
            break;
        }
        let line = raw.position().map_or(0, |p| p.line());
        let row: Row = raw
            .deserialize(Some(&headers))
            .map_err(|e| parse_error(line, e.to_string()))?;
        check_row(&row, line)?;
        if std::mem::replace(&mut seen[row.x0][row.x1], true) {
            return Err(parse_error(
                line,
                format!("duplicate encoding ({}, {})", row.x0, row.x1),
            ));
        }
        records.push(ExperimentRecord {
            label: row.label,
            x0: row.x0,
            x1: row.x1,
            setting: OpticsSetting {
                theta1: row.theta1_deg,
                theta2: row.theta2_deg,
                theta3: row.theta3_deg,
                phi: row.phi_rad,
            },
            pz: row.pz,
            pz_err: row.pz_err,
            px: row.px,
            px_err: row.px_err,
        });
    }
    if records.len() != RECORD_COUNT {
        return Err(QracError::RecordCount {
            expected: RECORD_COUNT,
            found: records.len(),
        });
    }
    Ok(records)
}

/// Reads a table from `path`, or the shipped one when `path` is `None`.
pub fn load_table2(path: Option<&Path>) -> Result<Vec<ExperimentRecord>> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| QracError::Io(format!("{}: {e}", p.display())))?;
            parse_table2(&text)
        }
        None => parse_table2(TABLE2_CSV),
    }
}

/// Writes records in the table's CSV schema (no comments).
pub fn write_table2(records: &[ExperimentRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer
            .serialize(Row {
                label: r.label.clone(),
                x0: r.x0,
                x1: r.x1,
                theta1_deg: r.setting.theta1,
                theta2_deg: r.setting.theta2,
                theta3_deg: r.setting.theta3,
                phi_rad: r.setting.phi,
                pz: r.pz,
                pz_err: r.pz_err,
                px: r.px,
                px_err: r.px_err,
            })
            .map_err(|e| QracError::Io(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| QracError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| QracError::Io(e.to_string()))
}

/// Per-encoding part of the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub label: String,
    pub x0: usize,
    pub x1: usize,
    pub pz: f64,
    pub px: f64,
    pub deviation_z: f64,
    pub deviation_x: f64,
    /// `|⟨prepared|ideal⟩|²` with the ideal state mapped to optical order.
    pub fidelity: f64,
}

/// Summary statistics of the data table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub records: usize,
    /// Mean of all 32 measured probabilities.
    pub mean: f64,
    /// Mean of the per-row averages `(pz + px)/2`.
    pub row_mean: f64,
    pub mean_z: f64,
    pub mean_x: f64,
    /// Mean of the 32 quoted uncertainties.
    pub mean_uncertainty: f64,
    pub classical_bound: f64,
    pub ideal: f64,
    /// `(mean - classical_bound) / mean_uncertainty`.
    pub sigmas_above_classical: f64,
    /// Set when the mean exceeds the classical bound by more than three mean uncertainties.
    pub classical_bound_violated: bool,
    /// Set when `|mean - ideal|` is within one mean uncertainty.
    pub consistent_with_ideal: bool,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub rows: Vec<RowReport>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    sum / count as f64
}

/// Pure summary of a complete table.
pub fn analyze(records: &[ExperimentRecord]) -> Result<ExperimentReport> {
    if records.len() != RECORD_COUNT {
        return Err(QracError::RecordCount {
            expected: RECORD_COUNT,
            found: records.len(),
        });
    }
    let classical_bound = classical_success(2, DIM)?.value;
    let ideal = ideal_success(0, 0, Question::Z)?;
    let map = LogicalMap;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let target = map.to_optical(&encode2(DIM, r.x0, r.x1)?)?;
        rows.push(RowReport {
            label: r.label.clone(),
            x0: r.x0,
            x1: r.x1,
            pz: r.pz,
            px: r.px,
            deviation_z: r.pz - ideal_success(r.x0, r.x1, Question::Z)?,
            deviation_x: r.px - ideal_success(r.x0, r.x1, Question::X)?,
            fidelity: prepare_optics_state(&r.setting).fidelity(&target),
        });
    }
    let mean_all = mean(records.iter().flat_map(|r| [r.pz, r.px]));
    let mean_uncertainty = mean(records.iter().flat_map(|r| [r.pz_err, r.px_err]));
    let sigmas = (mean_all - classical_bound) / mean_uncertainty;
    Ok(ExperimentReport {
        records: records.len(),
        mean: mean_all,
        row_mean: mean(records.iter().map(|r| 0.5 * (r.pz + r.px))),
        mean_z: mean(records.iter().map(|r| r.pz)),
        mean_x: mean(records.iter().map(|r| r.px)),
        mean_uncertainty,
        classical_bound,
        ideal,
        sigmas_above_classical: sigmas,
        classical_bound_violated: sigmas > 3.0,
        consistent_with_ideal: (mean_all - ideal).abs() <= mean_uncertainty,
        min_fidelity: rows
            .iter()
            .map(|r| r.fidelity)
            .fold(f64::INFINITY, f64::min),
        mean_fidelity: mean(rows.iter().map(|r| r.fidelity)),
        rows,
    })
}
