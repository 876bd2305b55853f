use std::fmt;

use nalgebra::DMatrix;

use crate::pseudo_linalg::{
    determinant, gram_schmidt_with, orthogonal_complement, GramSchmidtTolerances, LinalgError, PseudoFrame,
    SemiMetric, Vector,
};

use super::arclength::ArcLength;
use super::curve::{linspace, CurveRepr, CurveSpec};
use super::FrenetError;

/// Default number of arc-length grid points.
pub const DEFAULT_GRID: usize = 512;

/// The three spaces with a Frenet theory for timelike curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrenetSpace {
    E12,
    E13,
    E24,
}

impl FrenetSpace {
    pub fn metric(&self) -> SemiMetric {
        match self {
            FrenetSpace::E12 => SemiMetric::minkowski_plane(),
            FrenetSpace::E13 => SemiMetric::minkowski_space(),
            FrenetSpace::E24 => SemiMetric::neutral4(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.metric().dimension()
    }

    /// Tag used in input files: `E1_2`, `E1_3` or `E2_4`.
    pub fn tag(&self) -> &'static str {
        match self {
            FrenetSpace::E12 => "E1_2",
            FrenetSpace::E13 => "E1_3",
            FrenetSpace::E24 => "E2_4",
        }
    }

    pub fn from_tag(tag: &str) -> Option<FrenetSpace> {
        [FrenetSpace::E12, FrenetSpace::E13, FrenetSpace::E24]
            .into_iter()
            .find(|s| s.tag() == tag)
    }

    /// `g(e_i, e_i)` of the Frenet frame vectors.
    pub fn frame_signs(&self) -> Vec<f64> {
        match self {
            FrenetSpace::E12 => vec![-1.0, 1.0],
            FrenetSpace::E13 => vec![-1.0, 1.0, 1.0],
            FrenetSpace::E24 => vec![-1.0, -1.0, 1.0, 1.0],
        }
    }

    /// Number of curvature functions.
    pub fn curvature_count(&self) -> usize {
        self.dimension() - 1
    }
}

impl fmt::Display for FrenetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

pub fn frenet_space(m: SemiMetric) -> Result<FrenetSpace, FrenetError> {
    match (m.dimension(), m.index()) {
        (2, 1) => Ok(FrenetSpace::E12),
        (3, 1) => Ok(FrenetSpace::E13),
        (4, 2) => Ok(FrenetSpace::E24),
        (dimension, index) => Err(FrenetError::UnsupportedSpace { dimension, index }),
    }
}

/// Coefficient matrix `K` with `frame' = K frame` (frame vectors as rows).
pub fn curvature_matrix(space: FrenetSpace, k: &[f64]) -> DMatrix<f64> {
    match space {
        FrenetSpace::E12 => DMatrix::from_row_slice(2, 2, &[0.0, k[0], k[0], 0.0]),
        FrenetSpace::E13 => DMatrix::from_row_slice(3, 3, &[0.0, k[0], 0.0, k[0], 0.0, k[1], 0.0, -k[1], 0.0]),
        FrenetSpace::E24 => DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -k[0], 0.0, 0.0, //
                k[0], 0.0, k[1], 0.0, //
                0.0, k[1], 0.0, k[2], //
                0.0, 0.0, -k[2], 0.0,
            ],
        ),
    }
}

/// Relative thresholds below which the derivative flag counts as degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetTolerances {
    /// `|g(w, w)| < null * |w|²` for a Gram–Schmidt residual `w`.
    pub null: f64,
    /// `|w| < rank * |c^(k)|` for the residual of derivative `k`.
    pub rank: f64,
}

impl FrenetTolerances {
    pub const fn analytic() -> Self {
        Self { null: 1e-10, rank: 1e-10 }
    }

    /// Looser rank test for finite-difference derivatives.
    pub const fn sampled() -> Self {
        Self { null: 1e-10, rank: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrenetSample {
    /// Arc length from the start of the curve's domain.
    pub s: f64,
    pub param: f64,
    pub point: Vector,
    /// `t, n1, n2, n3` (truncated to the dimension).
    pub frame: PseudoFrame,
    /// `k1, k2, k3` (truncated to the dimension minus one).
    pub curvatures: Vec<f64>,
    pub determinant: f64,
    /// `ds/dparam`.
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrenetApparatus {
    space: FrenetSpace,
    samples: Vec<FrenetSample>,
}

impl FrenetApparatus {
    pub fn new(space: FrenetSpace, samples: Vec<FrenetSample>) -> Self {
        Self { space, samples }
    }

    pub fn space(&self) -> FrenetSpace {
        self.space
    }

    pub fn metric(&self) -> SemiMetric {
        self.space.metric()
    }

    pub fn samples(&self) -> &[FrenetSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn s_values(&self) -> Vec<f64> {
        self.samples.iter().map(|x| x.s).collect()
    }

    /// Samples of `k_{index+1}`.
    pub fn curvature(&self, index: usize) -> Vec<f64> {
        self.samples.iter().map(|x| x.curvatures[index]).collect()
    }

    pub fn max_gram_residual(&self) -> f64 {
        self.samples.iter().map(|x| x.frame.gram_residual()).fold(0.0, f64::max)
    }

    /// Largest entry of `d(frame)/ds - K frame` using five-point differences
    /// along the grid. `None` when the grid is not uniform or too short.
    pub fn frenet_equation_residual(&self) -> Option<f64> {
        let n = self.samples.len();
        if n < 5 {
            return None;
        }
        let h = (self.samples[n - 1].s - self.samples[0].s) / (n - 1) as f64;
        let uniform = self
            .samples
            .windows(2)
            .all(|w| ((w[1].s - w[0].s) - h).abs() <= 1e-9 * h.abs());
        if !uniform || h <= 0.0 {
            return None;
        }
        let dim = self.space.dimension();
        let mut worst: f64 = 0.0;
        for i in 2..n - 2 {
            let k = curvature_matrix(self.space, &self.samples[i].curvatures);
            for r in 0..dim {
                let e = |j: usize| self.samples[j].frame.vector(r);
                let fd = (e(i - 2) - e(i - 1) * 8.0 + e(i + 1) * 8.0 - e(i + 2)) / (12.0 * h);
                let mut rhs = Vector::zeros(dim);
                for c in 0..dim {
                    rhs.axpy(k[(r, c)], self.samples[i].frame.vector(c), 1.0);
                }
                worst = worst.max((fd - rhs).amax());
            }
        }
        Some(worst)
    }
}

/// Prepared Frenet computation for one curve.
#[derive(Debug, Clone)]
pub struct FrenetEngine<'a> {
    curve: &'a CurveSpec,
    space: FrenetSpace,
    arc: ArcLength,
    tol: FrenetTolerances,
}

impl<'a> FrenetEngine<'a> {
    pub fn new(curve: &'a CurveSpec) -> Result<Self, FrenetError> {
        let space = frenet_space(curve.metric())?;
        let arc = ArcLength::new(curve)?;
        let tol = match curve.repr() {
            CurveRepr::Analytic(_) => FrenetTolerances::analytic(),
            CurveRepr::Sampled(_) => FrenetTolerances::sampled(),
        };
        Ok(Self { curve, space, arc, tol })
    }

    pub fn with_tolerances(mut self, tol: FrenetTolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn curve(&self) -> &CurveSpec {
        self.curve
    }

    pub fn space(&self) -> FrenetSpace {
        self.space
    }

    pub fn arclength(&self) -> &ArcLength {
        &self.arc
    }

    /// Arc-length range on which the apparatus can be evaluated.
    pub fn resolvable_arclength(&self) -> Result<(f64, f64), FrenetError> {
        let (lo, hi) = self.curve.resolvable_interval();
        if !(lo < hi) {
            return Err(FrenetError::InvalidTable("too few rows for fourth-order differences".into()));
        }
        Ok((self.arc.s_of(lo)?, self.arc.s_of(hi)?))
    }

    /// `n` evenly spaced arc-length values spanning the resolvable range.
    pub fn default_grid(&self, n: usize) -> Result<Vec<f64>, FrenetError> {
        let (a, b) = self.resolvable_arclength()?;
        Ok(linspace(a, b, n))
    }

    pub fn sample_at_arclength(&self, s: f64) -> Result<FrenetSample, FrenetError> {
        let t = self.arc.t_of(s)?;
        let mut sample = self.sample_at_param(t)?;
        sample.s = s;
        Ok(sample)
    }

    pub fn sample_at_param(&self, t: f64) -> Result<FrenetSample, FrenetError> {
        let d = self.curve.derivatives(t, self.space.dimension())?;
        let (vectors, curvatures, det, speed) = frame_from_derivatives(self.space, &d, t, self.tol)?;
        Ok(FrenetSample {
            s: self.arc.s_of(t)?,
            param: t,
            point: d[0].clone(),
            frame: PseudoFrame::from_parts(self.space.metric(), vectors, self.space.frame_signs()),
            curvatures,
            determinant: det,
            speed,
        })
    }

    /// Apparatus at the given arc-length values.
    pub fn apparatus(&self, grid: &[f64]) -> Result<FrenetApparatus, FrenetError> {
        let samples = grid
            .iter()
            .map(|&s| self.sample_at_arclength(s))
            .collect::<Result<Vec<_>, _>>()?;
        self.finish(samples)
    }

    /// Apparatus at the given curve parameters.
    pub fn apparatus_at_params(&self, params: &[f64]) -> Result<FrenetApparatus, FrenetError> {
        let samples = params
            .iter()
            .map(|&t| self.sample_at_param(t))
            .collect::<Result<Vec<_>, _>>()?;
        self.finish(samples)
    }

    fn finish(&self, samples: Vec<FrenetSample>) -> Result<FrenetApparatus, FrenetError> {
        for w in samples.windows(2) {
            for index in 1..self.space.curvature_count() {
                if w[0].curvatures[index].signum() != w[1].curvatures[index].signum() {
                    return Err(FrenetError::CurvatureSignChange {
                        index: index + 1,
                        s: w[1].s,
                    });
                }
            }
        }
        Ok(FrenetApparatus::new(self.space, samples))
    }
}

/// Frenet apparatus of `c` at the arc-length values in `grid`.
pub fn frenet_apparatus(c: &CurveSpec, grid: &[f64]) -> Result<FrenetApparatus, FrenetError> {
    FrenetEngine::new(c)?.apparatus(grid)
}

type FrameParts = (Vec<Vector>, Vec<f64>, f64, f64);

/// Frame, curvatures, determinant and speed from `c, c', ..., c^(d)`.
///
/// The formulas hold for any regular parametrization.
pub(crate) fn frame_from_derivatives(
    space: FrenetSpace,
    d: &[Vector],
    param: f64,
    tol: FrenetTolerances,
) -> Result<FrameParts, FrenetError> {
    let m = space.metric();
    let c1 = &d[1];
    let g11 = m.g(c1, c1);
    let character = m.causal_character(c1);
    if character != crate::pseudo_linalg::CausalCharacter::Timelike {
        return Err(FrenetError::NotTimelike { param, character });
    }
    let v = (-g11).sqrt();
    let gs_tol = GramSchmidtTolerances {
        null: tol.null,
        rank: tol.rank,
    };
    let degenerate = |e: LinalgError| match e {
        LinalgError::RankDeficient { index } | LinalgError::DegenerateFlag { index } => FrenetError::DegenerateFlag {
            order: index + 1,
            param,
        },
        other => FrenetError::Linalg(other),
    };
    let unit_complement = |vs: &[Vector], order: usize| -> Result<Vector, FrenetError> {
        let w = orthogonal_complement(vs, m)?;
        let gww = m.g(&w, &w);
        if gww.abs() <= tol.null * w.norm_squared() {
            return Err(FrenetError::DegenerateFlag { order, param });
        }
        Ok(w / gww.abs().sqrt())
    };
    let flat = |x: f64, scale: &Vector| x.abs() <= tol.rank * scale.norm();

    match space {
        FrenetSpace::E12 => {
            let t = c1 / v;
            let mut n = unit_complement(std::slice::from_ref(&t), 2)?;
            let gn = m.g(&d[2], &n);
            if flat(gn, &d[2]) {
                return Err(FrenetError::DegenerateFlag { order: 2, param });
            }
            if gn < 0.0 {
                n = -n;
            }
            let k1 = gn.abs() / (v * v);
            let det = determinant(&[t.clone(), n.clone()]);
            Ok((vec![t, n], vec![k1], det, v))
        }
        FrenetSpace::E13 => {
            let f = gram_schmidt_with(&d[1..3], m, gs_tol).map_err(degenerate)?;
            if f.signs()[1] < 0.0 {
                return Err(FrenetError::ConventionViolation {
                    param,
                    message: "principal normal is timelike".into(),
                });
            }
            let mut vs = f.into_vectors();
            let n = vs.pop().expect("two vectors");
            let t = vs.pop().expect("two vectors");
            let k1 = m.g(&d[2], &n) / (v * v);
            let mut b = unit_complement(&[t.clone(), n.clone()], 3)?;
            let mut det = determinant(&[t.clone(), n.clone(), b.clone()]);
            if det < 0.0 {
                b = -b;
                det = -det;
            }
            let gb = m.g(&d[3], &b);
            if flat(gb, &d[3]) {
                return Err(FrenetError::DegenerateFlag { order: 3, param });
            }
            let k2 = gb / (v.powi(3) * k1);
            Ok((vec![t, n, b], vec![k1, k2], det, v))
        }
        FrenetSpace::E24 => {
            let f = gram_schmidt_with(&d[1..4], m, gs_tol).map_err(degenerate)?;
            if f.signs()[1] > 0.0 {
                return Err(FrenetError::ConventionViolation {
                    param,
                    message: "principal normal n1 is spacelike".into(),
                });
            }
            if f.signs()[2] < 0.0 {
                return Err(FrenetError::ConventionViolation {
                    param,
                    message: "second normal n2 is timelike".into(),
                });
            }
            let mut vs = f.into_vectors();
            let n2 = -vs.pop().expect("three vectors");
            let n1 = -vs.pop().expect("three vectors");
            let t = vs.pop().expect("three vectors");
            let k1 = m.g(&d[2], &n1) / (v * v);
            let k2 = -m.g(&d[3], &n2) / (v.powi(3) * k1);
            let mut n3 = unit_complement(&[t.clone(), n1.clone(), n2.clone()], 4)?;
            let mut det = determinant(&[t.clone(), n1.clone(), n2.clone(), n3.clone()]);
            if det < 0.0 {
                n3 = -n3;
                det = -det;
            }
            let g3 = m.g(&d[4], &n3);
            if flat(g3, &d[4]) {
                return Err(FrenetError::DegenerateFlag { order: 4, param });
            }
            let k3 = -g3 / (v.powi(4) * k1 * k2);
            Ok((vec![t, n1, n2, n3], vec![k1, k2, k3], det, v))
        }
    }
}
