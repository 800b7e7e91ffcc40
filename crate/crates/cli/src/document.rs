use serde::{Deserialize, Serialize};
use sjg_core::metric::Chart;
use sjg_core::{Error, JacobiPoint, MetricParams, SiegelPoint, SymMat};

use crate::CliError;

/// Which metric a document describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricModel {
    /// The invariant metric of the (extended) Siegel–Jacobi space.
    #[default]
    Invariant,
    /// The identity matrix on the same chart; a flat test fixture.
    Euclidean,
}

/// A point of X^J_n (with `kappa`, of the extended space) plus metric weights.
///
/// Symmetric matrices are row-major upper triangles, as in the chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDocument {
    pub n: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    pub params: MetricParams,
    /// Chart components of a tangent vector, for `geodesic` (and `metric`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<Vec<f64>>,
    #[serde(default)]
    pub metric_model: MetricModel,
}

/// A validated document.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub point: JacobiPoint,
    pub params: MetricParams,
    pub chart: Chart,
    pub velocity: Option<Vec<f64>>,
    pub model: MetricModel,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

impl PointDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed point document: {e}")))
    }

    pub fn validate(&self) -> Result<Loaded, CliError> {
        let n = self.n;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let tri = n * (n + 1) / 2;
        for (name, len, want) in [
            ("x", self.x.len(), tri),
            ("y", self.y.len(), tri),
            ("p", self.p.len(), n),
            ("q", self.q.len(), n),
        ] {
            if len != want {
                return Err(invalid(format!(
                    "{name} has {len} entries, expected {want} for n = {n}"
                )));
            }
        }
        let finite = self
            .x
            .iter()
            .chain(&self.y)
            .chain(&self.p)
            .chain(&self.q)
            .chain(&self.kappa)
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("coordinates must be finite"));
        }
        self.params.validate().map_err(CliError::Core)?;

        let x = SymMat::from_upper(n, self.x.clone()).map_err(CliError::Core)?;
        let y = SymMat::from_upper(n, self.y.clone()).map_err(CliError::Core)?;
        let base = SiegelPoint::new(x, y).map_err(|e| match e {
            Error::NotPositiveDefinite => invalid("y must be positive definite"),
            other => CliError::Core(other),
        })?;
        let point = JacobiPoint::new(base, self.p.clone(), self.q.clone(), self.kappa)
            .map_err(CliError::Core)?;
        let chart = Chart::for_point(&point);
        if let Some(v) = &self.velocity {
            if v.len() != chart.dim() {
                return Err(invalid(format!(
                    "velocity has {} components, the chart has {}",
                    v.len(),
                    chart.dim()
                )));
            }
            if !v.iter().all(|c| c.is_finite()) {
                return Err(invalid("velocity must be finite"));
            }
        }
        Ok(Loaded {
            point,
            params: self.params,
            chart,
            velocity: self.velocity.clone(),
            model: self.metric_model,
        })
    }
}
