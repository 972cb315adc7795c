//! Prediction CSVs and the JSON weights envelope.
//!
//! Prediction files carry a header `p_0,...,p_{m-1},label` and one sample per
//! row. Weights files are a single JSON object tagged by `kind`.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use reweigh_core::baselines::{ScalerConfig, VectorScaler};
use reweigh_core::{LabeledSample, ProbabilityVector, SampleSet, SearchMode, WeightVector};
use serde::{Deserialize, Serialize};

/// A malformed or unreadable input, with the 1-based line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    /// File the error refers to, when known.
    pub path: Option<String>,
    pub line: Option<u64>,
    pub message: String,
}

impl FormatError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            path: None,
            line: None,
            message: message.into(),
        }
    }

    fn at(line: u64, message: impl Into<String>) -> Self {
        Self {
            path: None,
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(path) = &self.path {
            write!(f, "{path}: ")?;
        }
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for FormatError {}

pub type Result<T> = std::result::Result<T, FormatError>;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| FormatError::new(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| FormatError::new(format!("cannot create {}: {e}", path.display())))
}

fn write_err(e: impl fmt::Display) -> FormatError {
    FormatError::new(format!("write failed: {e}"))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Number of probability columns named by a header, and whether a trailing
/// `label` column is present.
fn parse_header(header: &csv::StringRecord, require_label: bool) -> Result<(usize, bool)> {
    let fields: Vec<&str> = header.iter().collect();
    if fields.is_empty() || fields.iter().all(|f| f.is_empty()) {
        return Err(FormatError::new("empty prediction file"));
    }
    let labeled = fields.last() == Some(&"label");
    if require_label && !labeled {
        return Err(FormatError::at(1, "last header column must be `label`"));
    }
    let m = fields.len() - usize::from(labeled);
    if m < 2 {
        return Err(FormatError::at(1, "header must name at least 2 probability columns"));
    }
    for (k, name) in fields[..m].iter().enumerate() {
        if *name != format!("p_{k}") {
            return Err(FormatError::at(1, format!("column {} must be `p_{k}`, found `{name}`", k + 1)));
        }
    }
    Ok((m, labeled))
}

struct Row {
    line: u64,
    prediction: ProbabilityVector,
    label: Option<usize>,
}

fn parse_rows(reader: impl Read, require_label: bool) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| FormatError::new(e.to_string()))?.clone();
    let (m, labeled) = parse_header(&header, require_label)?;
    let width = m + usize::from(labeled);

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            FormatError::at(line, e.to_string())
        })?;
        let line = line_of(&record);
        if record.len() != width {
            return Err(FormatError::at(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let probs = record
            .iter()
            .take(m)
            .enumerate()
            .map(|(k, field)| {
                field
                    .parse::<f64>()
                    .map_err(|_| FormatError::at(line, format!("p_{k} is not a number: `{field}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let label = if labeled {
            let field = &record[m];
            let y: usize = field
                .parse()
                .map_err(|_| FormatError::at(line, format!("label is not a class index: `{field}`")))?;
            if y >= m {
                return Err(FormatError::at(line, format!("label {y} out of range for {m} classes")));
            }
            Some(y)
        } else {
            None
        };
        let prediction = ProbabilityVector::new(probs).map_err(|e| FormatError::at(line, e.to_string()))?;
        rows.push(Row {
            line,
            prediction,
            label,
        });
    }
    if rows.is_empty() {
        return Err(FormatError::new("prediction file has a header but no rows"));
    }
    Ok(rows)
}

/// Parses a labeled prediction CSV. Sample ids are the 0-based row indices.
pub fn parse_predictions(reader: impl Read) -> Result<SampleSet> {
    let samples = parse_rows(reader, true)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            LabeledSample::new(i as u64, row.prediction, row.label.unwrap_or_default())
                .map_err(|e| FormatError::at(row.line, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(samples).map_err(|e| FormatError::new(e.to_string()))
}

/// Parses prediction rows, with or without a `label` column.
pub fn parse_probabilities(reader: impl Read) -> Result<Vec<ProbabilityVector>> {
    Ok(parse_rows(reader, false)?.into_iter().map(|r| r.prediction).collect())
}

fn with_path(path: &Path) -> impl FnOnce(FormatError) -> FormatError + '_ {
    move |e| FormatError {
        path: Some(path.display().to_string()),
        ..e
    }
}

pub fn read_probabilities(path: &Path) -> Result<Vec<ProbabilityVector>> {
    parse_probabilities(open(path)?).map_err(with_path(path))
}

pub fn read_predictions(path: &Path) -> Result<SampleSet> {
    parse_predictions(open(path)?).map_err(with_path(path))
}

/// Writes `set` with shortest round-trip decimal formatting.
pub fn format_predictions(set: &SampleSet, out: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let m = set.num_classes();
    let mut header: Vec<String> = (0..m).map(|k| format!("p_{k}")).collect();
    header.push("label".to_string());
    wtr.write_record(&header).map_err(write_err)?;
    for s in set.samples() {
        let mut row: Vec<String> = s.prediction.iter().map(|p| p.to_string()).collect();
        row.push(s.label.to_string());
        wtr.write_record(&row).map_err(write_err)?;
    }
    wtr.flush().map_err(write_err)
}

pub fn write_predictions(set: &SampleSet, path: &Path) -> Result<()> {
    format_predictions(set, create(path)?)
}

/// One predicted label per line under a `label` header.
pub fn format_labels(labels: &[usize], mut out: impl Write) -> Result<()> {
    writeln!(out, "label").map_err(write_err)?;
    for y in labels {
        writeln!(out, "{y}").map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}

/// Reads a `label` column file as written by [`format_labels`].
pub fn parse_labels(reader: impl Read) -> Result<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| FormatError::new(e.to_string()))?.clone();
    if header.len() != 1 || &header[0] != "label" {
        return Err(FormatError::at(1, "label file header must be `label`"));
    }
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| FormatError::new(e.to_string()))?;
            r[0].parse()
                .map_err(|_| FormatError::at(line_of(&r), format!("not a class index: `{}`", &r[0])))
        })
        .collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    parse_labels(open(path)?).map_err(with_path(path))
}

/// Provenance recorded alongside fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMetadata {
    /// Size of the fitting set.
    pub n: usize,
    /// Metric evaluations (plugin) or gradient steps (vector scaler).
    pub evaluations: u64,
    pub version: String,
}

impl FitMetadata {
    pub fn new(n: usize, evaluations: u64) -> Self {
        Self {
            n,
            evaluations,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluginParams {
    pub m: usize,
    pub weights: Vec<f64>,
    pub metric_name: String,
    pub epsilon: f64,
    pub rho: f64,
    pub reference_class: usize,
    pub search_mode: String,
    pub metadata: FitMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub m: usize,
    pub diag_weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub metadata: FitMetadata,
}

/// Serialized fitted parameters. Unknown fields are ignored on read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightsEnvelope {
    Cwplugin(PluginParams),
    VectorScaler(ScalerParams),
}

impl WeightsEnvelope {
    pub fn from_weights(w: &WeightVector, metadata: FitMetadata) -> Self {
        WeightsEnvelope::Cwplugin(PluginParams {
            m: w.num_classes(),
            weights: w.weights().to_vec(),
            metric_name: w.metric_name().to_string(),
            epsilon: w.epsilon(),
            rho: w.rho(),
            reference_class: w.reference_class(),
            search_mode: w.search_mode().as_str().to_string(),
            metadata,
        })
    }

    pub fn from_scaler(s: &VectorScaler, metadata: FitMetadata) -> Self {
        WeightsEnvelope::VectorScaler(ScalerParams {
            m: s.num_classes(),
            diag_weights: s.diag_weights.clone(),
            bias: s.bias.clone(),
            learning_rate: s.config.learning_rate,
            max_iterations: s.config.max_iterations,
            tolerance: s.config.tolerance,
            metadata,
        })
    }

    pub fn num_classes(&self) -> usize {
        match self {
            WeightsEnvelope::Cwplugin(p) => p.m,
            WeightsEnvelope::VectorScaler(s) => s.m,
        }
    }

    pub fn metadata(&self) -> &FitMetadata {
        match self {
            WeightsEnvelope::Cwplugin(p) => &p.metadata,
            WeightsEnvelope::VectorScaler(s) => &s.metadata,
        }
    }

    /// Checks that every vector has length `m`.
    pub fn validate(&self) -> Result<()> {
        let check = |what: &str, m: usize, len: usize| {
            if len == m {
                Ok(())
            } else {
                Err(FormatError::new(format!("envelope declares m = {m} but {what} has {len} entries")))
            }
        };
        match self {
            WeightsEnvelope::Cwplugin(p) => check("weights", p.m, p.weights.len()),
            WeightsEnvelope::VectorScaler(s) => {
                check("diag_weights", s.m, s.diag_weights.len())?;
                check("bias", s.m, s.bias.len())
            }
        }
    }

    pub fn to_weight_vector(&self) -> Result<Option<WeightVector>> {
        let WeightsEnvelope::Cwplugin(p) = self else {
            return Ok(None);
        };
        let mode: SearchMode = p
            .search_mode
            .parse()
            .map_err(|e: reweigh_core::Error| FormatError::new(e.to_string()))?;
        WeightVector::new(
            p.weights.clone(),
            p.reference_class,
            p.metric_name.clone(),
            p.epsilon,
            p.rho,
            mode,
        )
        .map(Some)
        .map_err(|e| FormatError::new(e.to_string()))
    }

    pub fn to_scaler(&self) -> Result<Option<VectorScaler>> {
        let WeightsEnvelope::VectorScaler(s) = self else {
            return Ok(None);
        };
        let config = ScalerConfig {
            learning_rate: s.learning_rate,
            max_iterations: s.max_iterations,
            tolerance: s.tolerance,
        };
        VectorScaler::new(s.diag_weights.clone(), s.bias.clone(), config)
            .map(Some)
            .map_err(|e| FormatError::new(e.to_string()))
    }
}

/// Pretty JSON with a trailing newline; floats use the shortest decimal
/// form that parses back to the same bits.
pub fn format_weights(envelope: &WeightsEnvelope) -> Result<String> {
    let mut text = serde_json::to_string_pretty(envelope).map_err(write_err)?;
    text.push('\n');
    Ok(text)
}

pub fn parse_weights(text: &str) -> Result<WeightsEnvelope> {
    if text.trim().is_empty() {
        return Err(FormatError::new("empty weights file"));
    }
    let envelope: WeightsEnvelope = serde_json::from_str(text).map_err(|e| {
        FormatError::at(e.line() as u64, format!("invalid weights JSON: {e}"))
    })?;
    envelope.validate()?;
    Ok(envelope)
}

pub fn write_weights(envelope: &WeightsEnvelope, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(format_weights(envelope)?.as_bytes()).map_err(write_err)?;
    out.flush().map_err(write_err)
}

pub fn read_weights(path: &Path) -> Result<WeightsEnvelope> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| FormatError::new(format!("cannot read {}: {e}", path.display())))?;
    parse_weights(&text).map_err(with_path(path))
}
