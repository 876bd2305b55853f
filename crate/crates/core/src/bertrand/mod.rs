//! Bertrand-type mates: classical parallel offsets in `E^2_1` and `E^3_1`,
//! the obstruction to classical Bertrand mates in `E^4_2`, and
//! (1,3)-Bertrand mates in `E^4_2` with their certificates, closed-form
//! apparatus and numeric verification.

mod certificate;
mod classical;
mod mate;
mod verify;

use std::fmt;

use thiserror::Error;

use crate::frenet_engine::{CurveSpec, FrenetEngine, FrenetError, FrenetSpace};
use crate::pseudo_linalg::Vector;

pub use certificate::{
    estimate_13_constants, relation_derivative_residual, speed_identity_residual, BertrandCertificate,
    CertificateOptions, CertificateStatus, Condition,
};
pub use classical::{
    classical_obstruction_scan, fit_classical_relation, fit_linear_relation, parallel_mate, planar_parallel_mate,
    ClassicalFit, ObstructionEntry, DEFAULT_FIT_THRESHOLD,
};
pub use mate::{
    construct_mate, mate_apparatus_closed_form, offset_mate, DerivationTrace, HyperbolicAngles, MateApparatus,
};
pub use verify::{verify_mate, Correspondence, VerificationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BertrandError {
    #[error(transparent)]
    Frenet(#[from] FrenetError),
    #[error("expected a curve in {expected}, found {found}")]
    WrongSpace { expected: FrenetSpace, found: FrenetSpace },
    #[error("offset {alpha} is singular: mate speed vanishes or mate is not timelike near s = {s}")]
    SingularOffset { alpha: f64, s: f64 },
    #[error("k{index} vanishes near s = {s}")]
    VanishingCurvature { index: usize, s: f64 },
    #[error("certificate rejected: {0}")]
    RejectedCertificate(String),
    #[error("alpha = beta = 0: the mate would coincide with the curve")]
    TrivialMate,
    #[error("certificate inconsistent with the curvatures: {0}")]
    InconsistentCertificate(String),
    #[error("not enough points to compare ({0})")]
    TooFewPoints(usize),
}

/// Raw components `(cosh, sinh)` of a hyperbolic angle, on either branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPair {
    pub c: f64,
    pub s: f64,
}

impl HyperbolicPair {
    pub fn new(c: f64, s: f64) -> Self {
        Self { c, s }
    }

    /// `|c^2 - s^2 - 1|`.
    pub fn hyperbola_residual(&self) -> f64 {
        (self.c * self.c - self.s * self.s - 1.0).abs()
    }
}

impl fmt::Display for HyperbolicPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c, self.s)
    }
}

/// Spacing of the arc-length grid on which mates are tabulated.
const MATE_SPACING: f64 = 1e-3;

/// Frames and curvatures along a curve at uniformly spaced arc length.
#[derive(Debug, Clone)]
struct FrameTrack {
    s: Vec<f64>,
    params: Vec<f64>,
    points: Vec<Vector>,
    frames: Vec<Vec<Vector>>,
    curvatures: Vec<Vec<f64>>,
}

/// Carried frames when the curve is a unit-speed table that has them,
/// otherwise the Frenet engine over the resolvable arc-length range.
fn frame_track(c: &CurveSpec) -> Result<FrameTrack, BertrandError> {
    if let Some(table) = c.table() {
        if let (Some(frames), Some(curvatures), true) = (table.frames(), table.curvatures(), c.is_unit_speed()) {
            let start = table.first();
            return Ok(FrameTrack {
                s: table.params().iter().map(|t| t - start).collect(),
                params: table.params().to_vec(),
                points: table.points().to_vec(),
                frames: frames.to_vec(),
                curvatures: curvatures.to_vec(),
            });
        }
    }
    let engine = FrenetEngine::new(c)?;
    let (a, b) = engine.resolvable_arclength()?;
    let n = (((b - a) / MATE_SPACING).ceil() as usize + 1).max(2001);
    let mut track = FrameTrack {
        s: Vec::with_capacity(n),
        params: Vec::with_capacity(n),
        points: Vec::with_capacity(n),
        frames: Vec::with_capacity(n),
        curvatures: Vec::with_capacity(n),
    };
    for i in 0..n {
        let s = a + (b - a) * i as f64 / (n - 1) as f64;
        let sample = engine.sample_at_arclength(s)?;
        track.s.push(s);
        track.params.push(sample.param);
        track.points.push(sample.point);
        track.frames.push(sample.frame.into_vectors());
        track.curvatures.push(sample.curvatures);
    }
    Ok(track)
}

/// Frame and curvatures of a curve at a parameter: interpolated carried
/// data when present, the Frenet engine otherwise.
enum FrameSource<'a> {
    Carried(&'a CurveSpec),
    Engine(FrenetEngine<'a>),
}

impl<'a> FrameSource<'a> {
    fn new(c: &'a CurveSpec) -> Result<Self, BertrandError> {
        if let Some(table) = c.table() {
            if table.frames().is_some() && table.curvatures().is_some() && c.is_unit_speed() {
                return Ok(FrameSource::Carried(c));
            }
        }
        Ok(FrameSource::Engine(FrenetEngine::new(c)?))
    }

    /// Parameter range on which frames are available.
    fn range(&self) -> (f64, f64) {
        match self {
            FrameSource::Carried(c) => (c.domain().start, c.domain().end),
            FrameSource::Engine(e) => e.curve().resolvable_interval(),
        }
    }

    fn at(&self, t: f64) -> Result<(Vec<Vector>, Vec<f64>), BertrandError> {
        match self {
            FrameSource::Carried(c) => {
                let table = c.table().expect("carried frames");
                Ok((
                    table.frame_at(t).expect("carried frames"),
                    table.curvatures_at(t).expect("carried curvatures"),
                ))
            }
            FrameSource::Engine(e) => {
                let sample = e.sample_at_param(t)?;
                Ok((sample.frame.into_vectors(), sample.curvatures))
            }
        }
    }
}

fn require_space(found: FrenetSpace, expected: FrenetSpace) -> Result<(), BertrandError> {
    if found != expected {
        return Err(BertrandError::WrongSpace { expected, found });
    }
    Ok(())
}

/// Minimum-norm least squares for `x0 a + x1 b = rhs`. The flag is false
/// when the singular-value ratio of `[a b]` is at most `cutoff`, in which
/// case the weaker direction is dropped.
fn lstsq2(a: &[f64], b: &[f64], rhs: &[f64], cutoff: f64) -> ([f64; 2], bool) {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let (p, q, r) = (dot(a, a), dot(a, b), dot(b, b));
    let y = [dot(a, rhs), dot(b, rhs)];
    let mean = 0.5 * (p + r);
    let lambda1 = mean + (0.25 * (p - r).powi(2) + q * q).sqrt();
    if !(lambda1 > 0.0) {
        return ([0.0, 0.0], false);
    }
    let lambda2 = (p * r - q * q) / lambda1;
    let v1 = if q == 0.0 {
        if p >= r {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    } else {
        let (x1, x2) = ([lambda1 - r, q], [q, lambda1 - p]);
        let pick = if x1[0].hypot(x1[1]) >= x2[0].hypot(x2[1]) { x1 } else { x2 };
        let norm = pick[0].hypot(pick[1]);
        [pick[0] / norm, pick[1] / norm]
    };
    let v2 = [-v1[1], v1[0]];
    let c1 = (v1[0] * y[0] + v1[1] * y[1]) / lambda1;
    let mut x = [v1[0] * c1, v1[1] * c1];
    let full_rank = lambda2 > cutoff * cutoff * lambda1;
    if full_rank {
        let c2 = (v2[0] * y[0] + v2[1] * y[1]) / lambda2;
        x[0] += v2[0] * c2;
        x[1] += v2[1] * c2;
    }
    (x, full_rank)
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}
