use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::curve_dsl::{parse_expr, Expr};
use crate::curve_synth::CurvaturePrescription;
use crate::frenet_engine::{CurveSpec, FrenetSpace, Interval, SampleTable};
use crate::pseudo_linalg::Vector;

use super::CliError;

/// A DSL string or a plain number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ExprField {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub space: String,
    pub components: Option<Vec<ExprField>>,
    pub domain: Option<[f64; 2]>,
    /// CSV file of `param, x0, x1, ...` rows, relative to the input file.
    pub samples: Option<String>,
    #[serde(default)]
    pub unit_speed: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSection {
    pub space: String,
    pub k1: ExprField,
    pub k2: Option<ExprField>,
    pub k3: Option<ExprField>,
    pub interval: [f64; 2],
    pub initial_point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BertrandSection {
    pub gamma_hint: Option<f64>,
    pub alpha_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub alphas: Option<Vec<f64>>,
}

/// Parsed job input file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub curve: Option<CurveSection>,
    pub curvatures: Option<CurvatureSection>,
    #[serde(default)]
    pub bertrand: BertrandSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl InputFile {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut file: InputFile = toml::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        file.base_dir = base_dir.to_path_buf();
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &dir).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn curve_spec(&self) -> Result<Option<CurveSpec>, CliError> {
        let Some(sec) = &self.curve else { return Ok(None) };
        let space = space_tag(&sec.space, "[curve] space")?;
        let metric = space.metric();
        let curve = match (&sec.components, &sec.samples) {
            (Some(components), None) => {
                let exprs = components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| expr_field(c, &format!("[curve] components[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let [a, b] = sec
                    .domain
                    .ok_or_else(|| CliError::Input("[curve] needs `domain` with `components`".into()))?;
                let domain = Interval::new(a, b).map_err(|e| CliError::Input(format!("[curve] domain: {e}")))?;
                CurveSpec::analytic(metric, exprs, domain).map_err(|e| CliError::Input(format!("[curve]: {e}")))?
            }
            (None, Some(samples)) => {
                let path = self.base_dir.join(samples);
                let table = read_samples(&path)?;
                CurveSpec::sampled(metric, table).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            }
            _ => {
                return Err(CliError::Input(
                    "[curve] needs exactly one of `components` or `samples`".into(),
                ))
            }
        };
        Ok(Some(curve.with_unit_speed(sec.unit_speed)))
    }

    pub fn prescription(&self) -> Result<Option<CurvaturePrescription>, CliError> {
        let Some(sec) = &self.curvatures else { return Ok(None) };
        let space = space_tag(&sec.space, "[curvatures] space")?;
        let fields = [Some(&sec.k1), sec.k2.as_ref(), sec.k3.as_ref()];
        let count = space.curvature_count();
        let mut exprs = Vec::with_capacity(count);
        for (i, field) in fields.iter().enumerate() {
            match (field, i < count) {
                (Some(f), true) => exprs.push(expr_field(f, &format!("[curvatures] k{}", i + 1))?),
                (None, true) => return Err(CliError::Input(format!("[curvatures] k{} is required in {space}", i + 1))),
                (Some(_), false) => {
                    return Err(CliError::Input(format!("[curvatures] k{} is not used in {space}", i + 1)))
                }
                (None, false) => {}
            }
        }
        let [a, b] = sec.interval;
        let interval = Interval::new(a, b).map_err(|e| CliError::Input(format!("[curvatures] interval: {e}")))?;
        let mut p =
            CurvaturePrescription::new(space, exprs, interval).map_err(|e| CliError::Input(format!("[curvatures]: {e}")))?;
        if let Some(x) = &sec.initial_point {
            p = p
                .with_initial_point(Vector::from_vec(x.clone()))
                .map_err(|e| CliError::Input(format!("[curvatures] initial_point: {e}")))?;
        }
        Ok(Some(p))
    }
}

fn space_tag(tag: &str, what: &str) -> Result<FrenetSpace, CliError> {
    FrenetSpace::from_tag(tag)
        .ok_or_else(|| CliError::Input(format!("{what}: unknown space tag `{tag}` (expected E1_2, E1_3 or E2_4)")))
}

fn expr_field(field: &ExprField, what: &str) -> Result<Expr, CliError> {
    match field {
        ExprField::Number(x) => Ok(Expr::num(*x)),
        ExprField::Text(text) => parse_expr(text).map_err(|e| CliError::Input(format!("{what} `{text}`: {e}"))),
    }
}

/// Reads `param, x0, x1, ...` rows with a header line.
pub fn read_samples(path: &Path) -> Result<SampleTable, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut params = Vec::new();
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let values = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Input(format!("{}: line {}: {e}", path.display(), row + 2)))?;
        if values.len() < 2 {
            return Err(CliError::Input(format!(
                "{}: line {}: expected a parameter and coordinates",
                path.display(),
                row + 2
            )));
        }
        params.push(values[0]);
        points.push(Vector::from_column_slice(&values[1..]));
    }
    SampleTable::new(params, points).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
