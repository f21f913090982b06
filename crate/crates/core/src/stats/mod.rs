//! Study-data analysis: normality screening, correlation and regression.
//!
//! [`analyze`] runs the whole pipeline over a set of [`StudyRecord`]s. Each
//! of the five variables is screened with a K-S test; engagement is then
//! correlated with the other four, using Spearman whenever either side of a
//! pair fails the screen at [`ALPHA`] and Pearson otherwise.

mod correlation;
mod normality;
mod regression;
mod synth;

pub use correlation::{
    average_ranks, pearson, pearson_named, spearman, spearman_named, CorrelationMethod, CorrelationResult,
};
pub use normality::{ks_normality, ks_statistic, LillieforsNull, NormalityResult, DEFAULT_REPLICATES, P_DISPLAY_CAP};
pub use regression::{linear_fit_with_band, RegressionFit};
pub use synth::synthesize_study;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Significance level of the normality screen.
pub const ALPHA: f64 = 0.05;

/// Confidence level of the regression bands in the report.
pub const BAND_CONFIDENCE: f64 = 0.95;

pub const STUDY_HEADER: [&str; 6] = ["participant", "enjoyment", "engagement", "time_s", "collisions", "accuracy"];

/// Questionnaire sums: five items scored 1 to 5.
pub const SCORE_RANGE: std::ops::RangeInclusive<u8> = 5..=25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub participant: String,
    pub enjoyment: u8,
    pub engagement: u8,
    pub time_s: f64,
    pub collisions: u32,
    pub accuracy: f64,
}

impl StudyRecord {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("enjoyment", self.enjoyment), ("engagement", self.engagement)] {
            if !SCORE_RANGE.contains(&v) {
                return Err(Error::invalid(format!("{name} score {v} outside 5..=25")));
            }
        }
        if !(self.time_s.is_finite() && self.time_s >= 0.0) {
            return Err(Error::invalid(format!("time_s must be finite and non-negative, got {}", self.time_s)));
        }
        if !(0.0..=1.0).contains(&self.accuracy) {
            return Err(Error::invalid(format!("accuracy {} outside [0, 1]", self.accuracy)));
        }
        Ok(())
    }

    pub fn value(&self, variable: Variable) -> f64 {
        match variable {
            Variable::Enjoyment => f64::from(self.enjoyment),
            Variable::Engagement => f64::from(self.engagement),
            Variable::TimeS => self.time_s,
            Variable::Collisions => f64::from(self.collisions),
            Variable::Accuracy => self.accuracy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Enjoyment,
    Engagement,
    TimeS,
    Collisions,
    Accuracy,
}

impl Variable {
    pub const ALL: [Variable; 5] =
        [Variable::Enjoyment, Variable::Engagement, Variable::TimeS, Variable::Collisions, Variable::Accuracy];

    /// Variables correlated against engagement, in report order.
    pub const OUTCOMES: [Variable; 4] =
        [Variable::Enjoyment, Variable::TimeS, Variable::Collisions, Variable::Accuracy];

    pub fn as_str(self) -> &'static str {
        match self {
            Variable::Enjoyment => "enjoyment",
            Variable::Engagement => "engagement",
            Variable::TimeS => "time_s",
            Variable::Collisions => "collisions",
            Variable::Accuracy => "accuracy",
        }
    }

    pub fn column(self, records: &[StudyRecord]) -> Vec<f64> {
        records.iter().map(|r| r.value(self)).collect()
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn load_study(source: &str) -> Result<Vec<StudyRecord>> {
    let mut reader =
        csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).has_headers(false).from_reader(source.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(Error::InsufficientSample { needed: 4, got: 0 }),
        Some(rec) => rec.map_err(|e| parse_error(0, "", e.to_string()))?,
    };
    if header.iter().ne(STUDY_HEADER) {
        return Err(parse_error(
            0,
            "",
            format!(
                "expected header '{}', got '{}'",
                STUDY_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut out = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse_error(row, "", e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != STUDY_HEADER.len() {
            return Err(parse_error(row, "", format!("expected 6 fields, found {}", rec.len())));
        }
        let score = |col: usize| -> Result<u8> {
            let raw = &rec[col];
            match raw.parse::<u8>() {
                Ok(v) if SCORE_RANGE.contains(&v) => Ok(v),
                _ => Err(parse_error(row, STUDY_HEADER[col], format!("'{raw}' is not an integer in 5..=25"))),
            }
        };
        let real = |col: usize| -> Result<f64> {
            let raw = &rec[col];
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(row, STUDY_HEADER[col], format!("'{raw}' is not a finite number")))
        };
        let participant = rec[0].to_string();
        if participant.is_empty() {
            return Err(parse_error(row, "participant", "empty participant id".into()));
        }
        let collisions = rec[4]
            .parse::<u32>()
            .map_err(|_| parse_error(row, "collisions", format!("'{}' is not a non-negative integer", &rec[4])))?;
        let record = StudyRecord {
            participant,
            enjoyment: score(1)?,
            engagement: score(2)?,
            time_s: real(3)?,
            collisions,
            accuracy: real(5)?,
        };
        if record.time_s < 0.0 {
            return Err(parse_error(row, "time_s", "must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&record.accuracy) {
            return Err(parse_error(row, "accuracy", format!("{} outside [0, 1]", record.accuracy)));
        }
        out.push(record);
    }
    Ok(out)
}

fn parse_error(row: usize, column: &str, message: String) -> Error {
    Error::Parse { row, column: column.to_string(), message }
}

pub fn serialize_study(records: &[StudyRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(STUDY_HEADER).map_err(csv_error)?;
    for r in records {
        r.validate()?;
        writer
            .write_record([
                r.participant.clone(),
                r.enjoyment.to_string(),
                r.engagement.to_string(),
                r.time_s.to_string(),
                r.collisions.to_string(),
                r.accuracy.to_string(),
            ])
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::invalid(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableNormality {
    pub variable: Variable,
    #[serde(flatten)]
    pub result: NormalityResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAnalysis {
    pub x: Variable,
    pub y: Variable,
    pub correlation: CorrelationResult,
    /// Least-squares fit of `y` on `x`, drawn in the scatter figures.
    pub fit: RegressionFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
    pub normality: Vec<VariableNormality>,
    pub correlations: Vec<PairAnalysis>,
}

impl StatsReport {
    pub fn normality_of(&self, variable: Variable) -> Option<&NormalityResult> {
        self.normality.iter().find(|v| v.variable == variable).map(|v| &v.result)
    }

    pub fn pair(&self, y: Variable) -> Option<&PairAnalysis> {
        self.correlations.iter().find(|p| p.y == y)
    }
}

/// Runs the screening, correlation and regression steps over `records`.
///
/// Zero-variance columns are reported before any test runs, so a constant
/// column always yields [`Error::UndefinedCorrelation`] naming it.
pub fn analyze(records: &[StudyRecord], seed: u64) -> Result<StatsReport> {
    let n = records.len();
    if n < 4 {
        return Err(Error::InsufficientSample { needed: 4, got: n });
    }
    let columns: Vec<(Variable, Vec<f64>)> = Variable::ALL.iter().map(|&v| (v, v.column(records))).collect();
    for (variable, values) in &columns {
        if values.iter().all(|&v| v == values[0]) {
            return Err(Error::UndefinedCorrelation { column: variable.to_string() });
        }
    }

    let null = LillieforsNull::simulate(n, DEFAULT_REPLICATES, seed)?;
    let normality = columns
        .iter()
        .map(|(variable, values)| Ok(VariableNormality { variable: *variable, result: null.test(values)? }))
        .collect::<Result<Vec<_>>>()?;
    let is_normal = |v: Variable| normality.iter().any(|r| r.variable == v && !r.result.rejects(ALPHA));

    let column = |v: Variable| &columns.iter().find(|(c, _)| *c == v).expect("all variables present").1;
    let x_var = Variable::Engagement;
    let correlations = Variable::OUTCOMES
        .iter()
        .map(|&y_var| {
            let (x, y) = (column(x_var), column(y_var));
            let correlation = if is_normal(x_var) && is_normal(y_var) {
                pearson_named(x, y, x_var.as_str(), y_var.as_str())?
            } else {
                spearman_named(x, y, x_var.as_str(), y_var.as_str())?
            };
            let fit = linear_fit_with_band(x, y, BAND_CONFIDENCE)?;
            Ok(PairAnalysis { x: x_var, y: y_var, correlation, fit })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(StatsReport { n, seed, alpha: ALPHA, normality, correlations })
}
