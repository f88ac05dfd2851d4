//! Experiment configuration: flat INI-style file with one section per
//! pipeline stage, every key overridable by a CLI flag of the same name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use supemb::dataset::Surface;
use supemb::embedding::EmbeddingMethod;
use supemb::graph::HeatScale;

/// Configuration problems exit with code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Synthetic { surface: Surface, per_class: usize, noise: f64 },
    Csv { path: PathBuf, label_column: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierRule {
    Linear,
    Nn,
}

impl fmt::Display for ClassifierRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierRule::Linear => "linear",
            ClassifierRule::Nn => "nn",
        })
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub k_within: usize,
    pub k_between: usize,
    pub heat: HeatScale,
    pub method: EmbeddingMethod,
    pub dim: usize,
    pub mu: f64,
    pub sigma: f64,
    pub ridge: f64,
    pub rule: ClassifierRule,
    pub per_class_axis: Vec<usize>,
    pub dim_axis: Vec<usize>,
    pub mu_axis: Vec<f64>,
    pub sigma_axis: Vec<f64>,
    /// None means derive from the graph heat scale.
    pub delta: Option<f64>,
    /// None means delta / 2.
    pub epsilon: Option<f64>,
    /// None means the per-class preset floor(N_m * eta / 2).
    pub q: Option<usize>,
    pub alpha: f64,
    pub beta: f64,
    /// None means the ambient data diameter.
    pub theta: Option<f64>,
    /// Category of class m at position m-1; empty disables the category bound.
    pub categories: Vec<usize>,
    /// Embedding dimension per category, ascending category id order.
    pub category_dims: Vec<usize>,
    pub outdir: PathBuf,
}

/// All recognized (section, key) pairs.
const KNOWN_KEYS: &[(&str, &str)] = &[
    ("dataset", "kind"),
    ("dataset", "per_class"),
    ("dataset", "noise"),
    ("dataset", "csv_path"),
    ("dataset", "label_column"),
    ("split", "train_fraction"),
    ("split", "seeds"),
    ("graph", "k_within"),
    ("graph", "k_between"),
    ("graph", "heat_t"),
    ("embedding", "method"),
    ("embedding", "dim"),
    ("embedding", "mu"),
    ("interpolator", "sigma"),
    ("interpolator", "ridge"),
    ("classifier", "rule"),
    ("sweep", "per_class_axis"),
    ("sweep", "dim_axis"),
    ("sweep", "mu_axis"),
    ("sweep", "sigma_axis"),
    ("bounds", "delta"),
    ("bounds", "epsilon"),
    ("bounds", "q"),
    ("bounds", "alpha"),
    ("bounds", "beta"),
    ("bounds", "theta"),
    ("bounds", "categories"),
    ("bounds", "category_dims"),
    ("output", "outdir"),
];

fn section_of(key: &str) -> Option<&'static str> {
    KNOWN_KEYS.iter().find(|(_, k)| *k == key).map(|(s, _)| *s)
}

/// Raw key-value view of a config file plus overrides.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<(String, String), String>,
}

impl RawConfig {
    /// Parses INI-style text: `[section]` headers, `key = value` lines,
    /// `#` or `;` comments. Unknown sections or keys are rejected by name.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        let mut bad: Vec<String> = Vec::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) => section = name.trim().to_string(),
                    None => return Err(ConfigError(format!("line {}: malformed section header", lineno + 1))),
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!("line {}: expected key = value", lineno + 1)));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if section.is_empty() {
                return Err(ConfigError(format!("line {}: key '{key}' appears before any section", lineno + 1)));
            }
            if !KNOWN_KEYS.iter().any(|(s, k)| *s == section && *k == key) {
                bad.push(format!("[{section}] {key}"));
                continue;
            }
            values.insert((section.clone(), key), value);
        }
        if !bad.is_empty() {
            return Err(ConfigError(format!("unknown config fields: {}", bad.join(", "))));
        }
        Ok(RawConfig { values })
    }

    /// Applies a CLI override by bare key name.
    pub fn set_override(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let section = section_of(key).ok_or_else(|| ConfigError(format!("unknown config field '{key}'")))?;
        self.values.insert((section.to_string(), key.to_string()), value.to_string());
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    fn parse_field<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, ConfigError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| ConfigError(format!("field [{section}] {key}: cannot parse '{raw}'"))),
        }
    }

    fn parse_list<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>, ConfigError> {
        match self.get(section, key) {
            None => Ok(Vec::new()),
            Some(raw) if raw.trim().is_empty() => Ok(Vec::new()),
            Some(raw) => raw
                .split(',')
                .map(|piece| {
                    piece
                        .trim()
                        .parse()
                        .map_err(|_| ConfigError(format!("field [{section}] {key}: cannot parse '{}'", piece.trim())))
                })
                .collect(),
        }
    }

    fn parse_optional(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some("auto") | Some("") => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| ConfigError(format!("field [{section}] {key}: cannot parse '{raw}'"))),
        }
    }

    /// Resolves the raw map into a validated configuration.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let kind = self.get("dataset", "kind").unwrap_or("spheres").to_string();
        let per_class: usize = self.parse_field("dataset", "per_class", 50)?;
        let noise: f64 = self.parse_field("dataset", "noise", 0.0)?;
        let dataset = if kind == "csv" {
            let path = self
                .get("dataset", "csv_path")
                .filter(|p| !p.is_empty())
                .ok_or_else(|| ConfigError("field [dataset] csv_path: required when kind = csv".into()))?;
            let label_column = self.get("dataset", "label_column").unwrap_or("label").to_string();
            DatasetSpec::Csv { path: PathBuf::from(path), label_column }
        } else {
            let surface: Surface = kind
                .parse()
                .map_err(|_| ConfigError(format!("field [dataset] kind: '{kind}' is not quadratic|swissroll|spheres|csv")))?;
            DatasetSpec::Synthetic { surface, per_class, noise }
        };

        let train_fraction: f64 = self.parse_field("split", "train_fraction", 0.5)?;
        if train_fraction.is_nan() || train_fraction <= 0.0 || train_fraction >= 1.0 {
            return Err(ConfigError(format!(
                "field [split] train_fraction: must lie strictly inside (0, 1), got {train_fraction}"
            )));
        }
        let mut seeds: Vec<u64> = self.parse_list("split", "seeds")?;
        if seeds.is_empty() {
            seeds = vec![1, 2, 3, 4, 5];
        }

        let k_within: usize = self.parse_field("graph", "k_within", 10)?;
        let k_between: usize = self.parse_field("graph", "k_between", 2)?;
        if k_within == 0 || k_between == 0 {
            return Err(ConfigError("fields [graph] k_within/k_between: must be >= 1".into()));
        }
        let heat = match self.get("graph", "heat_t") {
            None | Some("auto") | Some("") => HeatScale::Auto,
            Some(raw) => {
                let t: f64 = raw
                    .parse()
                    .map_err(|_| ConfigError(format!("field [graph] heat_t: cannot parse '{raw}'")))?;
                if t.is_nan() || t <= 0.0 {
                    return Err(ConfigError(format!("field [graph] heat_t: must be > 0, got {t}")));
                }
                HeatScale::Fixed(t)
            }
        };

        let method = match self.get("embedding", "method").unwrap_or("sup_laplacian") {
            "sup_laplacian" => EmbeddingMethod::SupLaplacian,
            "fisher" => EmbeddingMethod::Fisher,
            "label_encoding" => EmbeddingMethod::LabelEncoding,
            other => {
                return Err(ConfigError(format!(
                    "field [embedding] method: '{other}' is not sup_laplacian|fisher|label_encoding"
                )))
            }
        };
        let dim: usize = self.parse_field("embedding", "dim", 2)?;
        if dim == 0 {
            return Err(ConfigError("field [embedding] dim: must be >= 1".into()));
        }
        let mu: f64 = self.parse_field("embedding", "mu", 0.01)?;
        if mu.is_nan() || mu <= 0.0 {
            return Err(ConfigError(format!("field [embedding] mu: must be > 0, got {mu}")));
        }

        let sigma: f64 = self.parse_field("interpolator", "sigma", 0.7)?;
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(ConfigError(format!("field [interpolator] sigma: must be > 0, got {sigma}")));
        }
        let ridge: f64 = self.parse_field("interpolator", "ridge", 0.0)?;
        if ridge.is_nan() || ridge < 0.0 {
            return Err(ConfigError(format!("field [interpolator] ridge: must be >= 0, got {ridge}")));
        }

        let rule = match self.get("classifier", "rule").unwrap_or("nn") {
            "nn" => ClassifierRule::Nn,
            "linear" => ClassifierRule::Linear,
            other => return Err(ConfigError(format!("field [classifier] rule: '{other}' is not linear|nn"))),
        };

        let mut per_class_axis: Vec<usize> = self.parse_list("sweep", "per_class_axis")?;
        if per_class_axis.is_empty() {
            per_class_axis = vec![per_class];
        }
        let mut dim_axis: Vec<usize> = self.parse_list("sweep", "dim_axis")?;
        if dim_axis.is_empty() {
            dim_axis = vec![dim];
        }
        let mut mu_axis: Vec<f64> = self.parse_list("sweep", "mu_axis")?;
        if mu_axis.is_empty() {
            mu_axis = vec![mu];
        }
        let mut sigma_axis: Vec<f64> = self.parse_list("sweep", "sigma_axis")?;
        if sigma_axis.is_empty() {
            sigma_axis = vec![sigma];
        }

        let delta = self.parse_optional("bounds", "delta")?;
        let epsilon = self.parse_optional("bounds", "epsilon")?;
        let q = match self.get("bounds", "q") {
            None | Some("auto") | Some("") => None,
            Some(raw) => Some(
                raw.parse::<usize>()
                    .map_err(|_| ConfigError(format!("field [bounds] q: cannot parse '{raw}'")))?,
            ),
        };
        let alpha: f64 = self.parse_field("bounds", "alpha", 1.0)?;
        let beta: f64 = self.parse_field("bounds", "beta", 1.0)?;
        let theta = self.parse_optional("bounds", "theta")?;
        let categories: Vec<usize> = self.parse_list("bounds", "categories")?;
        let category_dims: Vec<usize> = self.parse_list("bounds", "category_dims")?;

        let outdir = PathBuf::from(self.get("output", "outdir").unwrap_or("out"));

        Ok(ExperimentConfig {
            dataset,
            train_fraction,
            seeds,
            k_within,
            k_between,
            heat,
            method,
            dim,
            mu,
            sigma,
            ridge,
            rule,
            per_class_axis,
            dim_axis,
            mu_axis,
            sigma_axis,
            delta,
            epsilon,
            q,
            alpha,
            beta,
            theta,
            categories,
            category_dims,
            outdir,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = RawConfig::default().resolve().unwrap();
        assert_eq!(cfg.seeds, vec![1, 2, 3, 4, 5]);
        assert_eq!(cfg.per_class_axis, vec![50]);
        assert!(matches!(cfg.dataset, DatasetSpec::Synthetic { surface: Surface::Spheres, .. }));
    }

    #[test]
    fn parse_and_override() {
        let text = "\n[dataset]\nkind = quadratic\nper_class = 25\n\n[embedding]\nmu = 0.57\n";
        let mut raw = RawConfig::parse(text).unwrap();
        raw.set_override("mu", "0.1").unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.mu, 0.1);
        match cfg.dataset {
            DatasetSpec::Synthetic { surface, per_class, .. } => {
                assert_eq!(surface, Surface::Quadratic);
                assert_eq!(per_class, 25);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = RawConfig::parse("[dataset]\nbogus = 1\nalso_bad = 2\n").unwrap_err();
        assert!(err.0.contains("bogus"));
        assert!(err.0.contains("also_bad"));
        let err = RawConfig::default().set_override("nope", "1").unwrap_err();
        assert!(err.0.contains("nope"));
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut raw = RawConfig::default();
        raw.set_override("train_fraction", "1.0").unwrap();
        assert!(raw.resolve().is_err());
        let mut raw = RawConfig::default();
        raw.set_override("mu", "-0.5").unwrap();
        assert!(raw.resolve().is_err());
        let mut raw = RawConfig::default();
        raw.set_override("kind", "csv").unwrap();
        assert!(raw.resolve().is_err(), "csv kind requires csv_path");
    }
}
