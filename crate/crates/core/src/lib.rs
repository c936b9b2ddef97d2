pub mod classical;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod qrac2;
pub mod qrac3;
pub mod seesaw;

/// Average and worst-case success over a family of encodings and questions.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SuccessSummary {
    pub average: f64,
    pub worst: f64,
}

impl SuccessSummary {
    pub fn from_values(values: &[f64]) -> Self {
        let average = values.iter().sum::<f64>() / values.len() as f64;
        let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
        SuccessSummary { average, worst }
    }
}
