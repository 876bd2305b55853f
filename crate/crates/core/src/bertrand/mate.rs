use crate::frenet_engine::{frenet_space, CurveSpec, FrenetApparatus, FrenetSpace, SampleTable};

use super::{
    frame_track, require_space, std_dev, BertrandCertificate, BertrandError, CertificateStatus, HyperbolicPair,
};

/// Intermediate scalars of the mate computation, per grid point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivationTrace {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

impl DerivationTrace {
    /// `max |Q - gamma P|`.
    pub fn q_gamma_p_residual(&self, gamma: f64) -> f64 {
        self.q
            .iter()
            .zip(&self.p)
            .map(|(q, p)| (q - gamma * p).abs())
            .fold(0.0, f64::max)
    }

    /// `max |B - gamma A|`.
    pub fn b_gamma_a_residual(&self, gamma: f64) -> f64 {
        self.b
            .iter()
            .zip(&self.a)
            .map(|(b, a)| (b - gamma * a).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_abs_r(&self) -> f64 {
        self.r.iter().map(|r| r.abs()).fold(f64::INFINITY, f64::min)
    }
}

/// Constant hyperbolic angles arising for a mate, as component pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperbolicAngles {
    pub theta: Option<HyperbolicPair>,
    pub tau: Option<HyperbolicPair>,
    pub eta: Option<HyperbolicPair>,
    pub xi: Option<HyperbolicPair>,
}

impl HyperbolicAngles {
    pub fn max_hyperbola_residual(&self) -> f64 {
        [self.theta, self.tau, self.eta, self.xi]
            .iter()
            .flatten()
            .map(|p| p.hyperbola_residual())
            .fold(0.0, f64::max)
    }
}

/// Predicted apparatus of the (1,3)-mate, sampled on the grid of the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MateApparatus {
    pub s: Vec<f64>,
    pub phi_prime: Vec<f64>,
    pub kbar1: Vec<f64>,
    pub kbar2: Vec<f64>,
    pub kbar3: Vec<f64>,
    /// `n1bar = rot_c n1 + rot_s n3`.
    pub rot_c: Vec<f64>,
    pub rot_s: Vec<f64>,
    pub trace: DerivationTrace,
    pub angles: HyperbolicAngles,
}

impl MateApparatus {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `max |rot_c^2 - rot_s^2 - 1|`.
    pub fn rot_hyperbola_residual(&self) -> f64 {
        self.rot_c
            .iter()
            .zip(&self.rot_s)
            .map(|(&c, &s)| HyperbolicPair::new(c, s).hyperbola_residual())
            .fold(0.0, f64::max)
    }

    /// Larger standard deviation of the two rotation components.
    pub fn rot_constancy(&self) -> f64 {
        std_dev(&self.rot_c).max(std_dev(&self.rot_s))
    }
}

/// Closed-form mate quantities at one point from `k = (k1, k2, k3)`.
pub(super) struct PointPrediction {
    pub phi_prime: f64,
    pub kbar: [f64; 3],
    pub rot: HyperbolicPair,
    pub p: f64,
    pub sqrt_d: f64,
}

pub(super) fn predict(cert: &BertrandCertificate, k: &[f64], s: f64) -> Result<PointPrediction, BertrandError> {
    let (alpha, beta, gamma, eps) = (cert.alpha, cert.beta, cert.gamma, cert.epsilon);
    let g1 = gamma * gamma - 1.0;
    let w = alpha * k[1] - beta * k[2];
    let u = gamma * k[0] - k[1];
    let d = u * u - k[2] * k[2];
    if !(d > 0.0) || !(g1 > 0.0) {
        return Err(BertrandError::InconsistentCertificate(format!(
            "(gamma k1 - k2)^2 - k3^2 = {d} at s = {s}"
        )));
    }
    let phi_prime = eps * g1.sqrt() * w;
    if !(phi_prime > 0.0) {
        return Err(BertrandError::InconsistentCertificate(format!(
            "mate speed {phi_prime} is not positive at s = {s}"
        )));
    }
    let sqrt_d = d.sqrt();
    let p = (gamma * gamma + 1.0) * k[0] * k[1] - gamma * (k[0] * k[0] + k[1] * k[1] - k[2] * k[2]);
    Ok(PointPrediction {
        phi_prime,
        kbar: [
            (d / g1).sqrt() / phi_prime,
            p.abs() / (phi_prime * (g1 * d).sqrt()),
            g1.sqrt() * k[0] * k[2] / (phi_prime * sqrt_d),
        ],
        rot: HyperbolicPair::new(u / (eps * sqrt_d), -k[2] / (eps * sqrt_d)),
        p,
        sqrt_d,
    })
}

fn require_accepted(cert: &BertrandCertificate) -> Result<(), BertrandError> {
    if let CertificateStatus::Rejected { condition, detail } = &cert.status {
        return Err(BertrandError::RejectedCertificate(format!("condition {condition}: {detail}")));
    }
    Ok(())
}

/// `c + alpha n1 + beta n3` for a curve in `E^4_2`, tabulated against the arc
/// length of `c`. No Bertrand condition is checked.
pub fn offset_mate(c: &CurveSpec, alpha: f64, beta: f64) -> Result<CurveSpec, BertrandError> {
    require_space(frenet_space(c.metric())?, FrenetSpace::E24)?;
    if alpha == 0.0 && beta == 0.0 {
        return Err(BertrandError::TrivialMate);
    }
    let track = frame_track(c)?;
    let mut points = Vec::with_capacity(track.s.len());
    for i in 0..track.s.len() {
        let k = &track.curvatures[i];
        let along = 1.0 + alpha * k[0];
        let across = alpha * k[1] - beta * k[2];
        if along * along - across * across <= 1e-20 {
            return Err(BertrandError::SingularOffset { alpha, s: track.s[i] });
        }
        let f = &track.frames[i];
        points.push(&track.points[i] + &f[1] * alpha + &f[3] * beta);
    }
    Ok(CurveSpec::sampled(c.metric(), SampleTable::new(track.s, points)?)?)
}

/// The (1,3)-mate `c + alpha n1 + beta n3` of an accepted certificate.
pub fn construct_mate(c: &CurveSpec, cert: &BertrandCertificate) -> Result<CurveSpec, BertrandError> {
    require_accepted(cert)?;
    offset_mate(c, cert.alpha, cert.beta)
}

/// Mate speed, curvatures, frame rotation and intermediate scalars predicted
/// from the curvatures of `app` and the certificate.
pub fn mate_apparatus_closed_form(
    app: &FrenetApparatus,
    cert: &BertrandCertificate,
) -> Result<MateApparatus, BertrandError> {
    require_space(app.space(), FrenetSpace::E24)?;
    require_accepted(cert)?;
    let (alpha, beta, gamma, eps) = (cert.alpha, cert.beta, cert.gamma, cert.epsilon);
    let g1 = gamma * gamma - 1.0;
    let n = app.len();
    let mut out = MateApparatus {
        s: Vec::with_capacity(n),
        phi_prime: Vec::with_capacity(n),
        kbar1: Vec::with_capacity(n),
        kbar2: Vec::with_capacity(n),
        kbar3: Vec::with_capacity(n),
        rot_c: Vec::with_capacity(n),
        rot_s: Vec::with_capacity(n),
        trace: DerivationTrace::default(),
        angles: HyperbolicAngles::default(),
    };
    for sample in app.samples() {
        let k = &sample.curvatures;
        let pred = predict(cert, k, sample.s)?;
        let w = alpha * k[1] - beta * k[2];
        let u = gamma * k[0] - k[1];
        let along = 1.0 + alpha * k[0];
        let pk1 = pred.phi_prime * pred.kbar[0];
        let pk1_sq = pk1 * pk1;
        if out.s.is_empty() {
            let phi_sq = pred.phi_prime * pred.phi_prime;
            let eta_den = pred.kbar[0] * phi_sq;
            out.angles = HyperbolicAngles {
                theta: None,
                tau: Some(HyperbolicPair::new(along / pred.phi_prime, w / pred.phi_prime)),
                eta: Some(HyperbolicPair::new(w * u / eta_den, -w * k[2] / eta_den)),
                xi: Some(pred.rot),
            };
        }
        out.s.push(sample.s);
        out.phi_prime.push(pred.phi_prime);
        out.kbar1.push(pred.kbar[0]);
        out.kbar2.push(pred.kbar[1]);
        out.kbar3.push(pred.kbar[2]);
        out.rot_c.push(pred.rot.c);
        out.rot_s.push(pred.rot.s);
        out.trace.a.push(-pk1_sq * along + k[0] * w * u);
        out.trace.b.push(-pk1_sq * w + w * u * k[1] + w * k[2] * k[2]);
        out.trace.p.push(pred.p);
        out.trace.q.push(gamma * pred.p);
        out.trace.r.push(eps * pred.phi_prime * g1 * pred.sqrt_d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bertrand::{estimate_13_constants, CertificateOptions};
    use crate::curve_synth::{synthesize, CurvaturePrescription};
    use crate::frenet_engine::{linspace, Interval};

    fn example() -> (CurveSpec, FrenetApparatus, BertrandCertificate) {
        let p = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 1.0], Interval::new(0.0, 2.0).unwrap())
            .unwrap();
        let synth = synthesize(&p, 1e-3).unwrap();
        let app = synth.design_apparatus(&linspace(0.0, 2.0, 33)).unwrap();
        let opts = CertificateOptions {
            gamma_hint: Some(1.5),
            ..Default::default()
        };
        let cert = estimate_13_constants(&app, &opts).unwrap();
        (synth.into_curve(), app, cert)
    }

    #[test]
    fn closed_form_constant_example() {
        let (_, app, cert) = example();
        let m = mate_apparatus_closed_form(&app, &cert).unwrap();
        let close = |v: &[f64], x: f64, tol: f64| v.iter().all(|y| (y - x).abs() < tol);
        assert!(close(&m.phi_prime, 1.25f64.sqrt() * 4.0 / 3.0, 1e-12));
        assert!(close(&m.phi_prime, 1.49071, 1e-5));
        assert!(close(&m.kbar1, 0.67082, 1e-5));
        assert!(close(&m.kbar2, 2.01246, 1e-5));
        assert!(close(&m.kbar3, 0.67082, 1e-5));
        assert!(close(&m.rot_c, -1.34164, 1e-5));
        assert!(close(&m.rot_s, -0.89443, 1e-5));
        assert!(m.rot_hyperbola_residual() < 1e-9);
        assert!(m.rot_constancy() < 1e-12);
        assert!(m.trace.q_gamma_p_residual(1.5) < 1e-12);
        assert!(m.trace.b_gamma_a_residual(1.5) < 1e-12);
        assert!(close(&m.trace.a, -4.0, 1e-12));
        assert!(m.trace.min_abs_r() > 0.0);
        assert!(m.angles.max_hyperbola_residual() < 1e-9);
    }

    #[test]
    fn mate_offset_and_length() {
        let (c, _, cert) = example();
        let mate = construct_mate(&c, &cert).unwrap();
        let t = c.table().unwrap();
        let mt = mate.table().unwrap();
        for i in [0, 500, 2000] {
            let d = &mt.points()[i] - &t.points()[i];
            assert!((c.metric().g(&d, &d) - 16.0 / 9.0).abs() < 1e-9);
        }
        let arc = crate::frenet_engine::ArcLength::new(&mate).unwrap();
        assert!((arc.total() - 2.98142).abs() < 1e-5, "{}", arc.total());
    }

    #[test]
    fn refusals() {
        let (c, app, mut cert) = example();
        assert_eq!(offset_mate(&c, 0.0, 0.0), Err(BertrandError::TrivialMate));
        cert.status = CertificateStatus::Rejected {
            condition: crate::bertrand::Condition::I,
            detail: String::new(),
        };
        assert!(matches!(construct_mate(&c, &cert), Err(BertrandError::RejectedCertificate(_))));
        assert!(matches!(
            mate_apparatus_closed_form(&app, &cert),
            Err(BertrandError::RejectedCertificate(_))
        ));
    }
}
