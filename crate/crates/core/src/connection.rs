//! Levi-Civita connection of a chart metric and geodesics.
//!
//! Metric derivatives are central differences of the chart matrix, optionally
//! Richardson-extrapolated. Christoffel symbols of the second kind come from
//! an LU solve against the chart metric at the point.

use crate::error::{Error, Result};
use crate::group::JacobiPoint;
use crate::matlib::{LuFactors, Mat};
use crate::metric::{metric_matrix, Chart, MetricParams};

/// A metric given on a coordinate chart.
pub trait MetricField {
    fn dim(&self) -> usize;

    /// The `dim × dim` metric at `coords`. Must fail with
    /// [`Error::PositivityLoss`] when `coords` is off the chart.
    fn matrix_at(&self, coords: &[f64]) -> Result<Mat>;
}

/// The invariant metric of X^J_n or its extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiField {
    pub params: MetricParams,
    pub chart: Chart,
}

impl JacobiField {
    pub fn new(params: MetricParams, chart: Chart) -> Result<Self> {
        params.validate()?;
        Ok(JacobiField { params, chart })
    }
}

impl MetricField for JacobiField {
    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn matrix_at(&self, coords: &[f64]) -> Result<Mat> {
        let pt = self.chart.point(coords).map_err(|e| match e {
            Error::NotPositiveDefinite => Error::PositivityLoss,
            other => other,
        })?;
        Ok(metric_matrix(self.params, &pt, &self.chart)?.to_mat())
    }
}

/// A constant metric; every Christoffel symbol vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatField {
    matrix: Mat,
}

impl FlatField {
    pub fn new(matrix: Mat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        Ok(FlatField { matrix })
    }
}

impl MetricField for FlatField {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn matrix_at(&self, coords: &[f64]) -> Result<Mat> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a {}-dimensional metric",
                coords.len(),
                self.dim()
            )));
        }
        Ok(self.matrix.clone())
    }
}

/// How `∂g/∂x^k` is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Difference {
    /// `(g(x + h) − g(x − h)) / 2h`.
    #[default]
    Central,
    /// `(4 D(h/2) − D(h)) / 3` with `D` the central difference.
    Richardson,
}

pub const DEFAULT_STEP: f64 = 1e-4;

/// Christoffel symbols at one point, with the data they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTable {
    dim: usize,
    metric: Mat,
    /// `∂_k g_ij` at `[(k * d + i) * d + j]`.
    dg: Vec<f64>,
    /// `[ij,k]` at `[(i * d + j) * d + k]`.
    first: Vec<f64>,
    /// `Γ^m_ij` at `[(m * d + i) * d + j]`.
    second: Vec<f64>,
}

impl ChristoffelTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Mat {
        &self.metric
    }

    /// `∂g_ij / ∂x^k`.
    pub fn metric_derivative(&self, k: usize, i: usize, j: usize) -> f64 {
        self.dg[(k * self.dim + i) * self.dim + j]
    }

    /// `[ij,k] = ½(∂_j g_ki + ∂_i g_jk − ∂_k g_ji)`.
    pub fn first(&self, i: usize, j: usize, k: usize) -> f64 {
        self.first[(i * self.dim + j) * self.dim + k]
    }

    /// `Γ^m_ij`.
    pub fn second(&self, m: usize, i: usize, j: usize) -> f64 {
        self.second[(m * self.dim + i) * self.dim + j]
    }

    /// `max |∂_k g_ij − Γ^l_ki g_lj − Γ^l_kj g_il|`.
    pub fn compatibility_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut r = self.metric_derivative(k, i, j);
                    for l in 0..d {
                        r -= self.second(l, k, i) * self.metric[(l, j)]
                            + self.second(l, k, j) * self.metric[(i, l)];
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// `max |g_mk Γ^m_ij − [ij,k]|`.
    pub fn lowering_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let lowered: f64 = (0..d)
                        .map(|m| self.metric[(m, k)] * self.second(m, i, j))
                        .sum();
                    worst = worst.max((lowered - self.first(i, j, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest `|Γ^m_ij − Γ^m_ji|`; zero by construction.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    worst = worst.max((self.second(m, i, j) - self.second(m, j, i)).abs());
                }
            }
        }
        worst
    }

    /// `(m, i, j, Γ^m_ij)` for `i ≤ j` and `|Γ| > threshold`.
    pub fn nonzero(&self, threshold: f64) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for m in 0..d {
            for i in 0..d {
                for j in i..d {
                    let v = self.second(m, i, j);
                    if v.abs() > threshold {
                        out.push((m, i, j, v));
                    }
                }
            }
        }
        out
    }

    /// `a^m = −Γ^m_ij v^i v^j`.
    pub fn acceleration(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|m| {
                let mut s = 0.0;
                for i in 0..d {
                    if v[i] == 0.0 {
                        continue;
                    }
                    for j in 0..d {
                        s += self.second(m, i, j) * v[i] * v[j];
                    }
                }
                -s
            })
            .collect()
    }
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h:e} outside [1e-6, 1e-3]"
        )));
    }
    Ok(())
}

fn central<F: MetricField + ?Sized>(field: &F, coords: &[f64], k: usize, h: f64) -> Result<Mat> {
    let mut shifted = coords.to_vec();
    shifted[k] = coords[k] + h;
    let plus = field.matrix_at(&shifted)?;
    shifted[k] = coords[k] - h;
    let minus = field.matrix_at(&shifted)?;
    Ok((&plus - &minus).scale(0.5 / h))
}

/// Christoffel symbols of any metric field at `coords`.
pub fn christoffels_of<F: MetricField + ?Sized>(
    field: &F,
    coords: &[f64],
    h: f64,
    scheme: Difference,
) -> Result<ChristoffelTable> {
    check_step(h)?;
    let d = field.dim();
    if coords.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for a {d}-dimensional metric",
            coords.len()
        )));
    }
    let metric = field.matrix_at(coords)?;
    let mut dg = vec![0.0; d * d * d];
    for k in 0..d {
        let dk = match scheme {
            Difference::Central => central(field, coords, k, h)?,
            Difference::Richardson => {
                let coarse = central(field, coords, k, h)?;
                let fine = central(field, coords, k, 0.5 * h)?;
                (&fine.scale(4.0) - &coarse).scale(1.0 / 3.0)
            }
        };
        for i in 0..d {
            for j in 0..d {
                // symmetrize away rounding in the difference quotient
                dg[(k * d + i) * d + j] = 0.5 * (dk[(i, j)] + dk[(j, i)]);
            }
        }
    }
    let at = |k: usize, i: usize, j: usize| dg[(k * d + i) * d + j];

    let mut first = vec![0.0; d * d * d];
    for i in 0..d {
        for j in i..d {
            for k in 0..d {
                let v = 0.5 * (at(j, k, i) + at(i, j, k) - at(k, j, i));
                first[(i * d + j) * d + k] = v;
                first[(j * d + i) * d + k] = v;
            }
        }
    }

    let lu = LuFactors::new(&metric)?;
    let mut second = vec![0.0; d * d * d];
    for i in 0..d {
        for j in i..d {
            let rhs = &first[(i * d + j) * d..(i * d + j + 1) * d];
            let gamma = lu.solve(rhs)?;
            for (m, v) in gamma.into_iter().enumerate() {
                second[(m * d + i) * d + j] = v;
                second[(m * d + j) * d + i] = v;
            }
        }
    }
    Ok(ChristoffelTable {
        dim: d,
        metric,
        dg,
        first,
        second,
    })
}

/// Christoffel symbols of the invariant metric at `pt`, central differences.
pub fn christoffels(
    params: MetricParams,
    pt: &JacobiPoint,
    chart: &Chart,
    h: f64,
) -> Result<ChristoffelTable> {
    let field = JacobiField::new(params, *chart)?;
    christoffels_of(&field, &chart.coordinates(pt)?, h, Difference::Central)
}

/// Position and velocity in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub time: f64,
}

impl GeodesicState {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>) -> Result<Self> {
        if position.len() != velocity.len() {
            return Err(Error::DimensionMismatch(format!(
                "position has {} components, velocity {}",
                position.len(),
                velocity.len()
            )));
        }
        Ok(GeodesicState {
            position,
            velocity,
            time: 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Every state, starting with the initial one.
    pub states: Vec<GeodesicState>,
    /// `g(v, v)` at each state.
    pub speeds: Vec<f64>,
}

impl Trajectory {
    /// `max_t |s(t)/s(0) − 1|`, or the largest `|s(t)|` when `s(0) = 0`.
    pub fn max_drift(&self) -> f64 {
        let s0 = self.speeds[0];
        self.speeds
            .iter()
            .map(|s| {
                if s0 == 0.0 {
                    s.abs()
                } else {
                    (s / s0 - 1.0).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn last(&self) -> &GeodesicState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicOptions {
    pub dt: f64,
    pub steps: usize,
    pub h: f64,
    pub scheme: Difference,
    /// Largest accepted `|s_{k+1}/s_k − 1|` in a single step.
    pub max_step_drift: f64,
}

impl GeodesicOptions {
    pub fn new(dt: f64, steps: usize) -> Self {
        GeodesicOptions {
            dt,
            steps,
            h: 2.5e-4,
            scheme: Difference::Richardson,
            max_step_drift: 1e-3,
        }
    }
}

fn speed(g: &Mat, v: &[f64]) -> f64 {
    let d = v.len();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += g[(i, j)] * v[i] * v[j];
        }
    }
    s
}

fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

/// Classic RK4 on `x' = v`, `v'^m = −Γ^m_ij v^i v^j`, recomputing `Γ` at
/// every stage.
pub fn geodesic_rk4_field<F: MetricField + ?Sized>(
    field: &F,
    start: GeodesicState,
    opts: GeodesicOptions,
) -> Result<Trajectory> {
    if !(opts.dt.is_finite() && (opts.dt * opts.steps as f64).is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite dt {}", opts.dt)));
    }
    if start.position.len() != field.dim() || start.velocity.len() != field.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a {}-dimensional metric",
            start.position.len(),
            field.dim()
        )));
    }
    let accel = |x: &[f64], v: &[f64]| -> Result<(Vec<f64>, Mat)> {
        let table = christoffels_of(field, x, opts.h, opts.scheme)?;
        Ok((table.acceleration(v), table.metric))
    };
    let dt = opts.dt;
    let mut states = Vec::with_capacity(opts.steps + 1);
    let mut speeds = Vec::with_capacity(opts.steps + 1);
    let (mut a1, g0) = accel(&start.position, &start.velocity)?;
    speeds.push(speed(&g0, &start.velocity));
    states.push(start);

    for step in 1..=opts.steps {
        let cur = states.last().expect("non-empty");
        let (x, v) = (&cur.position, &cur.velocity);
        let k1x = v.clone();
        let k1v = a1;

        let x2 = axpy(x, 0.5 * dt, &k1x);
        let k2x = axpy(v, 0.5 * dt, &k1v);
        let (k2v, _) = accel(&x2, &k2x)?;

        let x3 = axpy(x, 0.5 * dt, &k2x);
        let k3x = axpy(v, 0.5 * dt, &k2v);
        let (k3v, _) = accel(&x3, &k3x)?;

        let x4 = axpy(x, dt, &k3x);
        let k4x = axpy(v, dt, &k3v);
        let (k4v, _) = accel(&x4, &k4x)?;

        let combine = |base: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64]| -> Vec<f64> {
            (0..base.len())
                .map(|i| base[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect::<Vec<f64>>()
        };
        let position = combine(x, &k1x, &k2x, &k3x, &k4x);
        let velocity = combine(v, &k1v, &k2v, &k3v, &k4v);

        let (next_a, g) = accel(&position, &velocity)?;
        let s = speed(&g, &velocity);
        let prev = *speeds.last().expect("non-empty");
        let drift = if prev == 0.0 {
            s.abs()
        } else {
            (s / prev - 1.0).abs()
        };
        if !(drift <= opts.max_step_drift) {
            return Err(Error::StepRejected { step, drift });
        }
        let time = cur.time + dt;
        states.push(GeodesicState {
            position,
            velocity,
            time,
        });
        speeds.push(s);
        a1 = next_a;
    }
    Ok(Trajectory { states, speeds })
}

/// Geodesic of the invariant metric with the default integrator settings.
pub fn geodesic_rk4(
    params: MetricParams,
    start: GeodesicState,
    chart: &Chart,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    let field = JacobiField::new(params, *chart)?;
    geodesic_rk4_field(&field, start, GeodesicOptions::new(dt, steps))
}
