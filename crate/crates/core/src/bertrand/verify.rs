use crate::frenet_engine::{frenet_space, ArcLength, CurveSpec, FrenetSpace};
use crate::pseudo_linalg::Vector;

use super::mate::predict;
use super::{frame_track, require_space, std_dev, BertrandCertificate, BertrandError, FrameSource};

/// Points of the curve at which the mate is examined.
const MAX_COMPARED: usize = 400;

/// How points of the curve are matched with points of the mate.
///
/// Mates are expected to be tabulated against the arc length of the curve,
/// as [`construct_mate`](super::construct_mate) does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correspondence {
    /// Integrates the predicted mate speed from the first compared point.
    FromCertificate,
    /// The mate parameter equals the arc length of the curve.
    Identity,
}

/// Deviations of the numerically recomputed mate apparatus from the
/// (1,3)-Bertrand predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Largest sine of the principal angles between `span{n1bar, n3bar}` and
    /// `span{n1, n3}` (Euclidean).
    pub plane_residual: f64,
    pub kbar1_dev: f64,
    pub kbar2_dev: f64,
    pub kbar3_dev: f64,
    pub tangent_dev: f64,
    pub n2_dev: f64,
    pub n3_dev: f64,
    /// Larger standard deviation of the measured rotation components.
    pub rot_constancy: f64,
    /// `max |c^2 - s^2 - 1|` of the measured rotation components.
    pub rot_hyperbola_dev: f64,
    /// Largest deviation of the measured rotation components from the predicted ones.
    pub rot_closed_dev: f64,
    pub rot_c_mean: f64,
    pub rot_s_mean: f64,
    pub compared_points: usize,
}

impl VerificationReport {
    pub const PLANE_TOLERANCE: f64 = 1e-5;
    pub const CURVATURE_TOLERANCE: f64 = 1e-4;
    pub const FRAME_TOLERANCE: f64 = 1e-5;
    pub const CONSTANCY_TOLERANCE: f64 = 1e-7;
    pub const HYPERBOLA_TOLERANCE: f64 = 1e-9;

    pub fn passes(&self) -> bool {
        self.plane_residual < Self::PLANE_TOLERANCE
            && [self.kbar1_dev, self.kbar2_dev, self.kbar3_dev]
                .iter()
                .all(|&d| d < Self::CURVATURE_TOLERANCE)
            && [self.tangent_dev, self.n2_dev, self.n3_dev]
                .iter()
                .all(|&d| d < Self::FRAME_TOLERANCE)
            && self.rot_constancy < Self::CONSTANCY_TOLERANCE
            && self.rot_hyperbola_dev < Self::HYPERBOLA_TOLERANCE
    }

    /// Named values in a stable order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("compared_points", self.compared_points as f64),
            ("kbar1_dev", self.kbar1_dev),
            ("kbar2_dev", self.kbar2_dev),
            ("kbar3_dev", self.kbar3_dev),
            ("n2_dev", self.n2_dev),
            ("n3_dev", self.n3_dev),
            ("plane_residual", self.plane_residual),
            ("rot_c_mean", self.rot_c_mean),
            ("rot_closed_dev", self.rot_closed_dev),
            ("rot_constancy", self.rot_constancy),
            ("rot_hyperbola_dev", self.rot_hyperbola_dev),
            ("rot_s_mean", self.rot_s_mean),
            ("tangent_dev", self.tangent_dev),
        ]
    }
}

/// Euclidean orthonormal basis of the span of two vectors.
fn plane_basis(a: &Vector, b: &Vector) -> (Vector, Vector) {
    let e1 = a.normalize();
    let e2 = (b - &e1 * e1.dot(b)).normalize();
    (e1, e2)
}

/// Largest principal-angle sine between two planes.
fn plane_distance(p: (&Vector, &Vector), q: (&Vector, &Vector)) -> f64 {
    let (a1, a2) = plane_basis(p.0, p.1);
    let (b1, b2) = plane_basis(q.0, q.1);
    let reject = |v: &Vector| v - &a1 * a1.dot(v) - &a2 * a2.dot(v);
    let (r1, r2) = (reject(&b1), reject(&b2));
    let (x, y, z) = (r1.dot(&r1), r1.dot(&r2), r2.dot(&r2));
    let lambda = 0.5 * (x + z + ((x - z).powi(2) + 4.0 * y * y).sqrt());
    lambda.max(0.0).sqrt()
}

/// Cumulative integral of uniformly spaced samples, fourth order inside.
fn cumulative(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let piece = if i >= 1 && i + 2 < n {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        } else {
            0.5 * h * (f[i] + f[i + 1])
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

/// Recomputes the apparatus of `mate` numerically and compares it with the
/// predictions of `cert` along `c`.
pub fn verify_mate(
    c: &CurveSpec,
    mate: &CurveSpec,
    cert: &BertrandCertificate,
    correspondence: Correspondence,
) -> Result<VerificationReport, BertrandError> {
    require_space(frenet_space(c.metric())?, FrenetSpace::E24)?;
    require_space(frenet_space(mate.metric())?, FrenetSpace::E24)?;
    let track = frame_track(c)?;
    let source = FrameSource::new(mate)?;
    let (lo, hi) = source.range();
    let inside: Vec<usize> = (0..track.s.len())
        .filter(|&i| track.s[i] >= lo && track.s[i] <= hi)
        .collect();
    if inside.len() < 2 {
        return Err(BertrandError::TooFewPoints(inside.len()));
    }
    let stride = inside.len().div_ceil(MAX_COMPARED);
    let chosen: Vec<usize> = inside.iter().copied().step_by(stride).collect();

    let params: Vec<Option<f64>> = match correspondence {
        Correspondence::Identity => chosen.iter().map(|&i| Some(track.s[i])).collect(),
        Correspondence::FromCertificate => {
            let phi_prime = track
                .s
                .iter()
                .zip(&track.curvatures)
                .map(|(&s, k)| predict(cert, k, s).map(|p| p.phi_prime))
                .collect::<Result<Vec<_>, _>>()?;
            let h = if track.s.len() > 1 { track.s[1] - track.s[0] } else { 0.0 };
            let phi = cumulative(h, &phi_prime);
            let arc = ArcLength::new(mate)?;
            let anchor = chosen[0];
            let base = arc.s_of(track.s[anchor])?;
            chosen
                .iter()
                .map(|&i| {
                    let target = base + phi[i] - phi[anchor];
                    if !(0.0..=arc.total()).contains(&target) {
                        return Ok(None);
                    }
                    let u = arc.t_of(target)?;
                    Ok((lo..=hi).contains(&u).then_some(u))
                })
                .collect::<Result<Vec<_>, BertrandError>>()?
        }
    };

    let mut report = VerificationReport {
        plane_residual: 0.0,
        kbar1_dev: 0.0,
        kbar2_dev: 0.0,
        kbar3_dev: 0.0,
        tangent_dev: 0.0,
        n2_dev: 0.0,
        n3_dev: 0.0,
        rot_constancy: 0.0,
        rot_hyperbola_dev: 0.0,
        rot_closed_dev: 0.0,
        rot_c_mean: 0.0,
        rot_s_mean: 0.0,
        compared_points: 0,
    };
    let m = c.metric();
    let g1 = cert.gamma * cert.gamma - 1.0;
    let mut rot_c = Vec::with_capacity(chosen.len());
    let mut rot_s = Vec::with_capacity(chosen.len());
    for (&i, u) in chosen.iter().zip(params) {
        let Some(u) = u else { continue };
        let (fbar, kbar) = source.at(u)?;
        let f = &track.frames[i];
        let k = &track.curvatures[i];
        let pred = predict(cert, k, track.s[i])?;
        report.plane_residual = report.plane_residual.max(plane_distance((&f[1], &f[3]), (&fbar[1], &fbar[3])));
        report.kbar1_dev = report.kbar1_dev.max((kbar[0] - pred.kbar[0]).abs());
        report.kbar2_dev = report.kbar2_dev.max((kbar[1] - pred.kbar[1]).abs());
        report.kbar3_dev = report.kbar3_dev.max((kbar[2] - pred.kbar[2]).abs());
        let scale = cert.epsilon / g1.sqrt();
        let t_pred = (&f[0] * cert.gamma + &f[2]) * scale;
        let flip = if pred.p < 0.0 { -1.0 } else { 1.0 };
        let n2_pred = (&f[0] + &f[2] * cert.gamma) * (scale * flip);
        let n3_pred = (&f[1] * pred.rot.s + &f[3] * pred.rot.c) * flip;
        report.tangent_dev = report.tangent_dev.max((&fbar[0] - t_pred).amax());
        report.n2_dev = report.n2_dev.max((&fbar[2] - n2_pred).amax());
        report.n3_dev = report.n3_dev.max((&fbar[3] - n3_pred).amax());
        let c_num = -m.g(&fbar[1], &f[1]);
        let s_num = m.g(&fbar[1], &f[3]);
        report.rot_hyperbola_dev = report.rot_hyperbola_dev.max((c_num * c_num - s_num * s_num - 1.0).abs());
        report.rot_closed_dev = report
            .rot_closed_dev
            .max((c_num - pred.rot.c).abs().max((s_num - pred.rot.s).abs()));
        rot_c.push(c_num);
        rot_s.push(s_num);
    }
    report.compared_points = rot_c.len();
    if report.compared_points < 2 {
        return Err(BertrandError::TooFewPoints(report.compared_points));
    }
    report.rot_constancy = std_dev(&rot_c).max(std_dev(&rot_s));
    report.rot_c_mean = rot_c.iter().sum::<f64>() / rot_c.len() as f64;
    report.rot_s_mean = rot_s.iter().sum::<f64>() / rot_s.len() as f64;
    Ok(report)
}
