//! Sample tables and finite-difference derivatives on them.

use crate::pseudo_linalg::Vector;

use super::FrenetError;

/// Base finite-difference spacing, in parameter units, used on sampled curves.
pub const DEFAULT_FD_SPACING: f64 = 0.03;

/// Highest derivative order available from a table.
const MAX_ORDER: usize = 4;

/// Richardson levels for uniform tables; spacings `H, 2H, 4H`.
const LEVELS: usize = 3;

/// Stencil width for non-uniform tables.
const FALLBACK_POINTS: usize = 9;

/// Rows of `(parameter, point)` with optional carried frames and curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    params: Vec<f64>,
    points: Vec<Vector>,
    frames: Option<Vec<Vec<Vector>>>,
    curvatures: Option<Vec<Vec<f64>>>,
    spacing: Option<f64>,
    stride: usize,
}

impl SampleTable {
    pub fn new(params: Vec<f64>, points: Vec<Vector>) -> Result<Self, FrenetError> {
        if params.len() != points.len() {
            return Err(FrenetError::InvalidTable(format!(
                "{} parameters but {} points",
                params.len(),
                points.len()
            )));
        }
        if params.len() < FALLBACK_POINTS {
            return Err(FrenetError::InvalidTable(format!(
                "need at least {FALLBACK_POINTS} rows, found {}",
                params.len()
            )));
        }
        let dim = points[0].len();
        if let Some(bad) = points.iter().position(|p| p.len() != dim) {
            return Err(FrenetError::InvalidTable(format!("row {bad} has {} coordinates, expected {dim}", points[bad].len())));
        }
        if let Some(bad) = params.iter().chain(points.iter().flat_map(|p| p.iter())).position(|x| !x.is_finite()) {
            return Err(FrenetError::InvalidTable(format!("non-finite entry (item {bad})")));
        }
        if let Some(i) = params.windows(2).position(|w| w[1] <= w[0]) {
            return Err(FrenetError::InvalidTable(format!(
                "parameters must be strictly increasing (rows {i} and {})",
                i + 1
            )));
        }
        let n = params.len();
        let mean = (params[n - 1] - params[0]) / (n - 1) as f64;
        let uniform = params.windows(2).all(|w| ((w[1] - w[0]) - mean).abs() <= 1e-9 * mean);
        let mut table = Self {
            params,
            points,
            frames: None,
            curvatures: None,
            spacing: uniform.then_some(mean),
            stride: 1,
        };
        table.set_fd_spacing(DEFAULT_FD_SPACING);
        Ok(table)
    }

    /// Attaches a frame and curvature list to every row.
    pub fn with_annotations(mut self, frames: Vec<Vec<Vector>>, curvatures: Vec<Vec<f64>>) -> Result<Self, FrenetError> {
        if frames.len() != self.len() || curvatures.len() != self.len() {
            return Err(FrenetError::InvalidTable("annotation count differs from row count".into()));
        }
        self.frames = Some(frames);
        self.curvatures = Some(curvatures);
        Ok(self)
    }

    /// Sets the base finite-difference spacing; it is rounded to a whole number of rows.
    pub fn with_fd_spacing(mut self, target: f64) -> Self {
        self.set_fd_spacing(target);
        self
    }

    fn set_fd_spacing(&mut self, target: f64) {
        let h = self.mean_spacing();
        self.stride = ((target / h).round() as usize).max(1);
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn frames(&self) -> Option<&[Vec<Vector>]> {
        self.frames.as_deref()
    }

    pub fn curvatures(&self) -> Option<&[Vec<f64>]> {
        self.curvatures.as_deref()
    }

    pub fn is_uniform(&self) -> bool {
        self.spacing.is_some()
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn mean_spacing(&self) -> f64 {
        (self.params[self.len() - 1] - self.params[0]) / (self.len() - 1) as f64
    }

    pub fn first(&self) -> f64 {
        self.params[0]
    }

    pub fn last(&self) -> f64 {
        self.params[self.len() - 1]
    }

    /// Parameter range on which derivatives through order four are available.
    pub fn resolvable_interval(&self) -> (f64, f64) {
        let n = self.len();
        let m = self.stride;
        let (lo, hi) = if self.is_uniform() {
            let reach = 2 * m * (1 << (LEVELS - 1));
            (reach + 1, (n - 1).saturating_sub(reach + 2))
        } else {
            let reach = (FALLBACK_POINTS / 2) * m;
            (reach, (n - 1).saturating_sub(reach))
        };
        if lo >= hi {
            return (f64::NAN, f64::NAN);
        }
        (self.params[lo], self.params[hi])
    }

    /// Index of the row whose segment `[t_i, t_{i+1})` contains `t`, clamped.
    fn segment(&self, t: f64) -> usize {
        let i = self.params.partition_point(|&p| p <= t);
        i.saturating_sub(1).min(self.len() - 2)
    }

    /// `c(t), c'(t), ..., c^(order)(t)`.
    pub fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector>, FrenetError> {
        assert!(order <= MAX_ORDER);
        let (lo, hi) = self.resolvable_interval();
        if !(t >= lo && t <= hi) {
            return Err(FrenetError::OutOfRange { param: t, lo, hi });
        }
        let mut out = if let Some(h) = self.spacing {
            let x = (t - self.params[0]) / h;
            let i = x.floor() as usize;
            let frac = x - i as f64;
            if frac.abs() < 1e-9 {
                self.node_derivatives(i)
            } else if (1.0 - frac).abs() < 1e-9 {
                self.node_derivatives(i + 1)
            } else {
                let w = cubic_weights(frac);
                let mut acc = vec![Vector::zeros(self.dimension()); MAX_ORDER + 1];
                for (k, wk) in w.iter().enumerate() {
                    let node = self.node_derivatives(i + k - 1);
                    for (a, d) in acc.iter_mut().zip(node) {
                        a.axpy(*wk, &d, 1.0);
                    }
                }
                acc
            }
        } else {
            self.fallback_derivatives(t)
        };
        out[0] = self.point_at(t);
        out.truncate(order + 1);
        Ok(out)
    }

    /// Richardson-extrapolated central differences at a node of a uniform table.
    fn node_derivatives(&self, i: usize) -> Vec<Vector> {
        let h = self.spacing.expect("uniform table");
        let dim = self.dimension();
        let m = self.stride;
        let mut out = vec![self.points[i].clone()];
        for (k, weights) in CENTRAL.iter().enumerate() {
            let order = k + 1;
            let p0 = if order <= 2 { 4 } else { 2 };
            let mut level: Vec<Vector> = (0..LEVELS)
                .map(|l| {
                    let step = m << l;
                    let hh = h * step as f64;
                    let mut d = Vector::zeros(dim);
                    for (j, w) in weights.0.iter().enumerate() {
                        if *w != 0.0 {
                            let idx = i + j * step - 2 * step;
                            d.axpy(*w, &self.points[idx], 1.0);
                        }
                    }
                    d / (weights.1 * hh.powi(order as i32))
                })
                .collect();
            let mut p = p0;
            while level.len() > 1 {
                let f = 2f64.powi(p);
                level = level.windows(2).map(|w| (&w[0] * f - &w[1]) / (f - 1.0)).collect();
                p += 2;
            }
            out.push(level.pop().expect("one level"));
        }
        out
    }

    fn fallback_derivatives(&self, t: f64) -> Vec<Vector> {
        let m = self.stride;
        let j = self.nearest(t);
        let half = FALLBACK_POINTS / 2;
        let idx: Vec<usize> = (0..FALLBACK_POINTS).map(|k| j + k * m - half * m).collect();
        let xs: Vec<f64> = idx.iter().map(|&k| self.params[k]).collect();
        let w = fornberg(t, &xs, MAX_ORDER);
        (0..=MAX_ORDER)
            .map(|order| {
                let mut d = Vector::zeros(self.dimension());
                for (k, &row) in idx.iter().enumerate() {
                    d.axpy(w[order][k], &self.points[row], 1.0);
                }
                d
            })
            .collect()
    }

    fn nearest(&self, t: f64) -> usize {
        let i = self.segment(t);
        if (t - self.params[i]).abs() <= (self.params[i + 1] - t).abs() {
            i
        } else {
            i + 1
        }
    }

    /// Cubic Lagrange interpolation of the stored points.
    pub fn point_at(&self, t: f64) -> Vector {
        self.interpolate(t, |i| self.points[i].clone())
    }

    /// Cubic interpolation of the carried frame at `t`, if present.
    pub fn frame_at(&self, t: f64) -> Option<Vec<Vector>> {
        let frames = self.frames.as_ref()?;
        let count = frames[0].len();
        Some(
            (0..count)
                .map(|v| self.interpolate(t, |i| frames[i][v].clone()))
                .collect(),
        )
    }

    /// Cubic interpolation of the carried curvatures at `t`, if present.
    pub fn curvatures_at(&self, t: f64) -> Option<Vec<f64>> {
        let ks = self.curvatures.as_ref()?;
        let v = self.interpolate(t, |i| Vector::from_vec(ks[i].clone()));
        Some(v.iter().copied().collect())
    }

    pub(crate) fn interpolate(&self, t: f64, value: impl Fn(usize) -> Vector) -> Vector {
        let n = self.len();
        let i = self.segment(t);
        if t == self.params[i] {
            return value(i);
        }
        let start = i.saturating_sub(1).min(n - 4);
        let xs = &self.params[start..start + 4];
        let w = lagrange_weights(t, xs);
        let mut acc = value(start) * w[0];
        for (k, wk) in w.iter().enumerate().skip(1) {
            acc.axpy(*wk, &value(start + k), 1.0);
        }
        acc
    }

    /// First derivative at every row from short one-sided or central stencils.
    pub(crate) fn node_velocities(&self) -> Vec<Vector> {
        const WIDTH: usize = 7;
        let n = self.len();
        (0..n)
            .map(|i| {
                let start = i.saturating_sub(WIDTH / 2).min(n - WIDTH);
                let xs = &self.params[start..start + WIDTH];
                let w = fornberg(self.params[i], xs, 1);
                let mut d = Vector::zeros(self.dimension());
                for (k, wk) in w[1].iter().enumerate() {
                    d.axpy(*wk, &self.points[start + k], 1.0);
                }
                d
            })
            .collect()
    }
}

/// Five-point central stencils at offsets `-2..=2`: `(weights, denominator)`.
const CENTRAL: [([f64; 5], f64); 4] = [
    ([1.0, -8.0, 0.0, 8.0, -1.0], 12.0),
    ([-1.0, 16.0, -30.0, 16.0, -1.0], 12.0),
    ([-1.0, 2.0, 0.0, -2.0, 1.0], 2.0),
    ([1.0, -4.0, 6.0, -4.0, 1.0], 1.0),
];

/// Lagrange weights at `x` for nodes `-1, 0, 1, 2`.
fn cubic_weights(x: f64) -> [f64; 4] {
    [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ]
}

pub(crate) fn lagrange_weights(t: f64, xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|j| {
            xs.iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, xk)| (t - xk) / (xs[j] - xk))
                .product()
        })
        .collect()
}

/// Finite-difference weights for derivatives `0..=max_order` at `z` on nodes `xs`.
///
/// `w[k][j]` multiplies `f(xs[j])` in the approximation of `f^(k)(z)`.
pub(crate) fn fornberg(z: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}
