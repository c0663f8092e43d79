//! Run configuration: a TOML file of dotted keys (`geometry.a = 1.0`) with
//! command-line overrides applied on top.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

use crate::error::CasimirError;
use crate::polarizability::{BallGeometry, Oscillator, PolarizabilityModel};
use crate::quadrature::QuadratureConfig;
use crate::validation::logspace;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Field { field: String, reason: String },
}

impl ConfigError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Field {
            field: field.into(),
            reason: reason.into(),
        }
    }

    fn model(e: CasimirError) -> Self {
        ConfigError::field("model", e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub a: f64,
    pub lambda: f64,
    pub rho: f64,
}

/// Polarizability model tagged by `kind`. Oscillators are `[strength,
/// resonance]` pairs, spectral samples `[x, g]` pairs in ascending `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Static { alpha0: f64 },
    Oscillators { oscillators: Vec<(f64, f64)> },
    Tabulated { spectral: Vec<(f64, f64)> },
}

impl ModelSpec {
    pub fn build(&self) -> Result<PolarizabilityModel, ConfigError> {
        match self {
            ModelSpec::Static { alpha0 } => PolarizabilityModel::constant(*alpha0),
            ModelSpec::Oscillators { oscillators } => PolarizabilityModel::oscillators(
                oscillators
                    .iter()
                    .map(|&(strength, resonance)| Oscillator::new(strength, resonance))
                    .collect(),
            ),
            ModelSpec::Tabulated { spectral } => PolarizabilityModel::tabulated(spectral),
        }
        .map_err(ConfigError::model)
    }
}

/// Either an explicit list or a `[start, stop, count]` logarithmic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logspace: Option<(f64, f64, usize)>,
}

impl GridSpec {
    pub fn list(values: Vec<f64>) -> Self {
        GridSpec {
            values: Some(values),
            logspace: None,
        }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        GridSpec {
            values: None,
            logspace: Some((start, stop, count)),
        }
    }

    pub fn points(&self, field: &str) -> Result<Vec<f64>, ConfigError> {
        let points = match (&self.values, &self.logspace) {
            (Some(v), None) => v.clone(),
            (None, Some(spec)) => {
                let (start, stop, count) = *spec;
                if !(start > 0.0 && stop > 0.0) || count == 0 {
                    return Err(ConfigError::field(
                        format!("{field}.logspace"),
                        "needs positive start and stop and a count >= 1",
                    ));
                }
                logspace(start, stop, count)
            }
            _ => {
                return Err(ConfigError::field(
                    field,
                    "give exactly one of `values` or `logspace`",
                ))
            }
        };
        if points.is_empty() {
            return Err(ConfigError::field(field, "grid is empty"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(ConfigError::field(field, "grid values must be finite"));
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSpec {
    pub r: GridSpec,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            r: GridSpec::log(0.1, 10.0, 25),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSpec {
    pub n: GridSpec,
    pub p: GridSpec,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            n: GridSpec::list(vec![0.5, 0.51, 1.0, 2.0, 5.0, 10.0]),
            p: GridSpec::log(1e-4, 50.0, 40),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySpec {
    pub brute_force: bool,
}

impl Default for EnergySpec {
    fn default() -> Self {
        EnergySpec { brute_force: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForceSpec {
    pub step: f64,
}

impl Default for ForceSpec {
    fn default() -> Self {
        ForceSpec {
            step: crate::force::DEFAULT_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepTarget {
    Potential,
    Energy,
    Force,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path of a numeric config field, e.g. `geometry.a`.
    pub parameter: String,
    pub grid: GridSpec,
    pub target: SweepTarget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Significant digits of every emitted number.
    pub precision: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            format: Format::Json,
            path: None,
            precision: 12,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Free text echoed into outputs, e.g. the physical length unit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units_note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    /// Tolerances for the nested brute-force integral.
    #[serde(default = "QuadratureConfig::nested")]
    pub quadrature_nested: QuadratureConfig,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default)]
    pub energy: EnergySpec,
    #[serde(default)]
    pub force: ForceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub run: RunSpec,
}

impl RunConfig {
    pub fn from_table(table: &Table) -> Result<Self, ConfigError> {
        let cfg = Self::deserialize_table(table).map_err(|message| {
            // Reparse each top-level key alone to name the offending section.
            let section = table.iter().find_map(|(key, value)| {
                let mut single = Table::new();
                single.insert(key.clone(), value.clone());
                Self::deserialize_table(&single).err().map(|_| key.clone())
            });
            match section {
                Some(section) => ConfigError::field(section, message),
                None => ConfigError::Parse(message),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn deserialize_table(table: &Table) -> Result<Self, String> {
        let text = toml::to_string(table).map_err(|e| e.to_string())?;
        toml::from_str(&text).map_err(|e| e.message().to_string())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::from_table(&parse_table(text)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.quadrature
            .validate()
            .map_err(|e| ConfigError::field("quadrature", e.to_string()))?;
        self.quadrature_nested
            .validate()
            .map_err(|e| ConfigError::field("quadrature_nested", e.to_string()))?;
        if let Some(model) = &self.model {
            model.build()?;
        }
        if let Some(g) = &self.geometry {
            BallGeometry::new(g.a, g.lambda, g.rho)
                .map_err(|e| ConfigError::field("geometry", e.to_string()))?;
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(ConfigError::field("output.precision", "must be within 1..=17"));
        }
        if let Some(w) = self.run.workers {
            if w == 0 {
                return Err(ConfigError::field("run.workers", "must be at least 1"));
            }
        }
        if let Some(s) = &self.sweep {
            s.grid.points("sweep.grid")?;
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<BallGeometry, ConfigError> {
        let g = self
            .geometry
            .ok_or_else(|| ConfigError::field("geometry", "section is required"))?;
        BallGeometry::new(g.a, g.lambda, g.rho).map_err(|e| ConfigError::field("geometry", e.to_string()))
    }

    pub fn model(&self) -> Result<PolarizabilityModel, ConfigError> {
        self.model
            .as_ref()
            .ok_or_else(|| ConfigError::field("model", "section is required"))?
            .build()
    }

    /// The configuration with every default spelled out, as a TOML table.
    pub fn to_table(&self) -> Result<Table, ConfigError> {
        Table::try_from(self).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

pub fn parse_table(text: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>()
        .map_err(|e| ConfigError::Parse(e.to_string()))
}

pub fn load_table(path: Option<&Path>) -> Result<Table, ConfigError> {
    match path {
        None => Ok(Table::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_table(&text)
        }
    }
}

/// Parses the right-hand side of `--set key=value` as a TOML value, falling
/// back to a bare string.
pub fn parse_value(text: &str) -> Value {
    format!("v = {text}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(text.to_string()))
}

/// Sets `value` at a dotted path, creating intermediate tables. Numeric
/// segments index into arrays.
pub fn set_path(table: &mut Table, path: &str, value: Value) -> Result<(), ConfigError> {
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ConfigError::field(path, "empty path segment"));
    }
    let (last, parents) = segments.split_last().expect("non-empty");
    let mut current: &mut Value = table
        .entry(parents.first().copied().unwrap_or(last).to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    if parents.is_empty() {
        *current = value;
        return Ok(());
    }
    for seg in parents.iter().skip(1).chain(std::iter::once(last)) {
        current = match current {
            Value::Table(t) => t
                .entry(seg.to_string())
                .or_insert_with(|| Value::Table(Table::new())),
            Value::Array(arr) => {
                let idx: usize = seg
                    .parse()
                    .map_err(|_| ConfigError::field(path, format!("`{seg}` is not an array index")))?;
                arr.get_mut(idx)
                    .ok_or_else(|| ConfigError::field(path, format!("index {idx} out of range")))?
            }
            _ => return Err(ConfigError::field(path, format!("`{seg}` is not inside a table"))),
        };
    }
    *current = value;
    Ok(())
}

pub fn get_path<'a>(table: &'a Table, path: &str) -> Option<&'a Value> {
    let mut segments = path.split('.');
    let mut current = table.get(segments.next()?)?;
    for seg in segments {
        current = match current {
            Value::Table(t) => t.get(seg)?,
            Value::Array(a) => a.get(seg.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(current)
}

/// Applies `key=value` overrides in order.
pub fn apply_overrides(table: &mut Table, overrides: &[String]) -> Result<(), ConfigError> {
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| ConfigError::field(item, "override must look like key=value"))?;
        set_path(table, key.trim(), parse_value(value.trim()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
units_note = "lengths in nm"
geometry.a = 1.0
geometry.lambda = 0.5
geometry.rho = 1
model.kind = "oscillators"
model.oscillators = [[1.0, 2.0], [0.5, 7.0]]
"#;

    #[test]
    fn parses_dotted_keys_and_defaults() {
        let cfg = RunConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(cfg.geometry.unwrap().rho, 1.0);
        assert_eq!(cfg.output.precision, 12);
        assert_eq!(cfg.quadrature, QuadratureConfig::default());
        assert_eq!(cfg.quadrature_nested, QuadratureConfig::nested());
        assert!(matches!(cfg.model().unwrap(), PolarizabilityModel::Oscillators(v) if v.len() == 2));
    }

    #[test]
    fn rejects_two_model_kinds() {
        let text = "model.kind = \"static\"\nmodel.alpha0 = 1.0\nmodel.oscillators = [[1.0, 1.0]]\n";
        let err = RunConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("oscillators"), "{err}");
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::from_toml_str("geometry.a = 1.0\ngeometry.lambda = 0.1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("`geometry`") && err.contains("rho"), "{err}");
        let err = RunConfig::from_toml_str("geometry.a = 1.0\ngeometry.lambda = 0.1\ngeometry.rho = -2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("geometry") && err.contains("rho"), "{err}");
        let err = RunConfig::from_toml_str("output.precision = 40\n").unwrap_err().to_string();
        assert!(err.contains("output.precision"), "{err}");
        let err = RunConfig::from_toml_str("bogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn overrides_and_paths() {
        let mut t = parse_table(BASIC).unwrap();
        apply_overrides(
            &mut t,
            &[
                "geometry.a=2.5".into(),
                "model.oscillators.1.0=3.0".into(),
                "units_note=bare words".into(),
            ],
        )
        .unwrap();
        let cfg = RunConfig::from_table(&t).unwrap();
        assert_eq!(cfg.geometry.unwrap().a, 2.5);
        assert_eq!(cfg.units_note.as_deref(), Some("bare words"));
        assert_eq!(get_path(&t, "model.oscillators.1.0"), Some(&Value::Float(3.0)));
        assert!(apply_overrides(&mut t, &["noequals".into()]).is_err());
        assert!(apply_overrides(&mut t, &["model.oscillators.9.0=1".into()]).is_err());
    }

    #[test]
    fn grid_specs() {
        assert_eq!(GridSpec::list(vec![1.0, 2.0]).points("g").unwrap(), vec![1.0, 2.0]);
        assert_eq!(GridSpec::log(1.0, 100.0, 3).points("g").unwrap().len(), 3);
        assert!(GridSpec::list(vec![]).points("g").is_err());
        assert!(GridSpec::log(0.0, 1.0, 3).points("g").is_err());
        let both = GridSpec {
            values: Some(vec![1.0]),
            logspace: Some((1.0, 2.0, 2)),
        };
        assert!(both.points("g").is_err());
    }
}
