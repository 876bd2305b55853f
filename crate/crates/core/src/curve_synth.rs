//! Curves realizing prescribed curvature functions, obtained by integrating
//! the Frenet equations together with `c' = t`.

use thiserror::Error;

use crate::curve_dsl::{EvalError, Expr};
use crate::frenet_engine::{
    curvature_matrix, linspace, CurveSpec, FrenetApparatus, FrenetError, FrenetSample, FrenetSpace, Interval,
    SampleTable,
};
use crate::pseudo_linalg::{determinant, indefinite_gram_schmidt, LinalgError, PseudoFrame, Vector};

/// Steps between re-orthonormalizations of the frame.
pub const PROJECTION_INTERVAL: usize = 16;

/// Gram drift that aborts a synthesis.
pub const MAX_DRIFT: f64 = 1e-6;

/// Points at which a prescription is validated.
const CHECK_POINTS: usize = 2049;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Frenet(#[from] FrenetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid prescription: {0}")]
    InvalidPrescription(String),
    #[error("k1 must be positive, found {value} at s = {s}")]
    NonPositiveK1 { s: f64, value: f64 },
    #[error("k{index} vanishes or changes sign near s = {s}")]
    VanishingCurvature { index: usize, s: f64 },
    #[error("step must be positive and finite, found {0}")]
    InvalidStep(f64),
    #[error("frame drift {drift:.3e} at s = {s} exceeds {MAX_DRIFT:e}; use a step smaller than {step}")]
    StepTooLarge { drift: f64, s: f64, step: f64 },
}

/// Curvature functions on an arc-length interval with initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePrescription {
    space: FrenetSpace,
    curvatures: Vec<Expr>,
    interval: Interval,
    initial_frame: PseudoFrame,
    initial_point: Vector,
}

impl CurvaturePrescription {
    /// Starts from the origin with the standard basis as frame.
    pub fn new(space: FrenetSpace, curvatures: Vec<Expr>, interval: Interval) -> Result<Self, SynthError> {
        if curvatures.len() != space.curvature_count() {
            return Err(SynthError::InvalidPrescription(format!(
                "{space} needs {} curvature functions, found {}",
                space.curvature_count(),
                curvatures.len()
            )));
        }
        let m = space.metric();
        Ok(Self {
            space,
            curvatures,
            interval,
            initial_frame: PseudoFrame::standard(m),
            initial_point: Vector::zeros(m.dimension()),
        })
    }

    /// Constant curvatures.
    pub fn constant(space: FrenetSpace, k: &[f64], interval: Interval) -> Result<Self, SynthError> {
        Self::new(space, k.iter().map(|&x| Expr::num(x)).collect(), interval)
    }

    pub fn with_initial_point(mut self, p: Vector) -> Result<Self, SynthError> {
        if p.len() != self.space.dimension() {
            return Err(SynthError::InvalidPrescription("initial point has the wrong dimension".into()));
        }
        self.initial_point = p;
        Ok(self)
    }

    /// The frame must be pseudo-orthonormal with the Frenet signs and determinant `+1`.
    pub fn with_initial_frame(mut self, frame: PseudoFrame) -> Result<Self, SynthError> {
        let ok = frame.metric() == self.space.metric()
            && frame.is_complete()
            && frame.signs() == self.space.frame_signs().as_slice()
            && frame.gram_residual() < 1e-9
            && frame.determinant().is_some_and(|d| (d - 1.0).abs() < 1e-9);
        if !ok {
            return Err(SynthError::InvalidPrescription(
                "initial frame must be pseudo-orthonormal with Frenet signs and determinant +1".into(),
            ));
        }
        self.initial_frame = frame;
        Ok(self)
    }

    pub fn space(&self) -> FrenetSpace {
        self.space
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn curvature_exprs(&self) -> &[Expr] {
        &self.curvatures
    }

    pub fn curvatures_at(&self, s: f64) -> Result<Vec<f64>, EvalError> {
        self.curvatures.iter().map(|k| k.eval(s)).collect()
    }

    /// Checks `k1 > 0` and that the other curvatures keep a strict sign on a dense grid.
    pub fn validate(&self) -> Result<(), SynthError> {
        let mut signs: Vec<f64> = Vec::new();
        for s in self.interval.linspace(CHECK_POINTS) {
            let k = self.curvatures_at(s)?;
            if k[0] <= 0.0 {
                return Err(SynthError::NonPositiveK1 { s, value: k[0] });
            }
            if signs.is_empty() {
                signs = k.iter().map(|x| x.signum()).collect();
            }
            for (i, (x, sign)) in k.iter().zip(&signs).enumerate().skip(1) {
                if *x == 0.0 || x.signum() != *sign {
                    return Err(SynthError::VanishingCurvature { index: i + 1, s });
                }
            }
        }
        Ok(())
    }
}

/// Output of [`synthesize`]: a unit-speed sampled curve carrying its integrated frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedCurve {
    space: FrenetSpace,
    curve: CurveSpec,
    step: f64,
    gram_residuals: Vec<f64>,
}

impl SynthesizedCurve {
    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn into_curve(self) -> CurveSpec {
        self.curve
    }

    pub fn space(&self) -> FrenetSpace {
        self.space
    }

    /// Effective step (the interval divided into equal steps).
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Gram residual of the integrated frame after every step, before any projection.
    pub fn gram_residuals(&self) -> &[f64] {
        &self.gram_residuals
    }

    pub fn max_gram_residual(&self) -> f64 {
        self.gram_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Integrated frames and prescribed curvatures, interpolated to the arc-length values in `grid`.
    pub fn design_apparatus(&self, grid: &[f64]) -> Result<FrenetApparatus, SynthError> {
        let table = self.curve.table().expect("synthesized curves are sampled");
        let start = table.first();
        let m = self.space.metric();
        let mut samples = Vec::with_capacity(grid.len());
        for &s in grid {
            let t = start + s;
            if !(t >= table.first() && t <= table.last()) {
                return Err(FrenetError::ArcLengthOutOfRange {
                    s,
                    length: table.last() - start,
                }
                .into());
            }
            let vectors = table.frame_at(t).expect("frames attached");
            let curvatures = table.curvatures_at(t).expect("curvatures attached");
            let det = determinant(&vectors);
            samples.push(FrenetSample {
                s,
                param: t,
                point: table.point_at(t),
                frame: PseudoFrame::from_parts(m, vectors, self.space.frame_signs()),
                curvatures,
                determinant: det,
                speed: 1.0,
            });
        }
        Ok(FrenetApparatus::new(self.space, samples))
    }
}

/// Integrates the Frenet system with the classical fourth-order Runge–Kutta
/// scheme, re-orthonormalizing every [`PROJECTION_INTERVAL`] steps.
pub fn synthesize(p: &CurvaturePrescription, step: f64) -> Result<SynthesizedCurve, SynthError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(SynthError::InvalidStep(step));
    }
    p.validate()?;
    let space = p.space;
    let m = space.metric();
    let dim = m.dimension();
    let signs = space.frame_signs();
    let iv = p.interval;
    let steps = ((iv.length() / step).round() as usize).max(1);
    let h = iv.length() / steps as f64;
    let params = linspace(iv.start, iv.end, steps + 1);

    let mut x = p.initial_point.clone();
    let mut e: Vec<Vector> = p.initial_frame.vectors().to_vec();
    let mut x_carry = Vector::zeros(dim);
    let mut e_carry = vec![Vector::zeros(dim); dim];
    let mut points = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    let mut curvatures = Vec::with_capacity(steps + 1);
    let mut gram_residuals = Vec::with_capacity(steps);
    points.push(x.clone());
    frames.push(e.clone());
    curvatures.push(p.curvatures_at(params[0])?);

    let rhs = |s: f64, e: &[Vector]| -> Result<Vec<Vector>, SynthError> {
        let k = curvature_matrix(space, &p.curvatures_at(s)?);
        Ok((0..dim)
            .map(|r| {
                let mut d = Vector::zeros(dim);
                for (c, ec) in e.iter().enumerate() {
                    if k[(r, c)] != 0.0 {
                        d.axpy(k[(r, c)], ec, 1.0);
                    }
                }
                d
            })
            .collect())
    };
    let shifted = |e: &[Vector], d: &[Vector], a: f64| -> Vec<Vector> {
        e.iter().zip(d).map(|(ei, di)| ei + di * a).collect()
    };

    for i in 0..steps {
        let s = params[i];
        let d1 = rhs(s, &e)?;
        let e2 = shifted(&e, &d1, 0.5 * h);
        let d2 = rhs(s + 0.5 * h, &e2)?;
        let e3 = shifted(&e, &d2, 0.5 * h);
        let d3 = rhs(s + 0.5 * h, &e3)?;
        let e4 = shifted(&e, &d3, h);
        let d4 = rhs(s + h, &e4)?;
        // c' = t is the first frame row, so the stage values of t are already at hand.
        let dx = (&e[0] + &e2[0] * 2.0 + &e3[0] * 2.0 + &e4[0]) * (h / 6.0);
        compensated_add(&mut x, &mut x_carry, &dx);
        for r in 0..dim {
            let de = (&d1[r] + &d2[r] * 2.0 + &d3[r] * 2.0 + &d4[r]) * (h / 6.0);
            compensated_add(&mut e[r], &mut e_carry[r], &de);
        }
        let drift = PseudoFrame::from_parts(m, e.clone(), signs.clone()).gram_residual();
        gram_residuals.push(drift);
        let scale = e.iter().map(|v| v.norm_squared()).fold(1.0, f64::max);
        if drift > MAX_DRIFT * scale {
            return Err(SynthError::StepTooLarge {
                drift,
                s: params[i + 1],
                step: h,
            });
        }
        if (i + 1) % PROJECTION_INTERVAL == 0 {
            e = indefinite_gram_schmidt(&e, m)?.into_vectors();
            e_carry.iter_mut().for_each(|c| c.fill(0.0));
        }
        points.push(x.clone());
        frames.push(e.clone());
        curvatures.push(p.curvatures_at(params[i + 1])?);
    }

    let table = SampleTable::new(params, points)?.with_annotations(frames, curvatures)?;
    let curve = CurveSpec::sampled(m, table)?.with_unit_speed(true);
    Ok(SynthesizedCurve {
        space,
        curve,
        step: h,
        gram_residuals,
    })
}

/// Kahan summation `sum += delta`, keeping the lost low-order bits in `carry`.
fn compensated_add(sum: &mut Vector, carry: &mut Vector, delta: &Vector) {
    for i in 0..sum.len() {
        let y = delta[i] - carry[i];
        let t = sum[i] + y;
        carry[i] = (t - sum[i]) - y;
        sum[i] = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_dsl::parse_expr;
    use crate::frenet_engine::FrenetEngine;

    fn interval(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn constant_neutral_curve_round_trip() {
        let p = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 1.0], interval(0.0, 2.0)).unwrap();
        let syn = synthesize(&p, 1e-3).unwrap();
        assert!(syn.max_gram_residual() < 1e-9);
        let eng = FrenetEngine::new(syn.curve()).unwrap();
        let app = eng.apparatus(&eng.default_grid(64).unwrap()).unwrap();
        for x in app.samples() {
            for (k, want) in x.curvatures.iter().zip([1.0, 3.0, 1.0]) {
                assert!((k - want).abs() < 1e-6, "{k} vs {want}");
            }
        }
    }

    #[test]
    fn helix_prescription_in_minkowski_space() {
        let p = CurvaturePrescription::constant(FrenetSpace::E13, &[2.0, 3f64.sqrt()], interval(0.0, 1.5)).unwrap();
        let syn = synthesize(&p, 1e-3).unwrap();
        let eng = FrenetEngine::new(syn.curve()).unwrap();
        let app = eng.apparatus(&eng.default_grid(32).unwrap()).unwrap();
        for x in app.samples() {
            assert!((x.curvatures[0] - 2.0).abs() < 1e-6);
            assert!((x.curvatures[1] - 3f64.sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn design_apparatus_interpolates_carried_frames() {
        let p = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 1.0], interval(0.0, 1.0)).unwrap();
        let syn = synthesize(&p, 1e-3).unwrap();
        let app = syn.design_apparatus(&[0.0, 0.2345, 1.0]).unwrap();
        assert!(app.max_gram_residual() < 1e-9);
        assert_eq!(app.samples()[1].curvatures, vec![1.0, 3.0, 1.0]);
        assert!(syn.design_apparatus(&[1.5]).is_err());
    }

    #[test]
    fn prescription_checks() {
        let bad_k1 = CurvaturePrescription::new(
            FrenetSpace::E24,
            vec![parse_expr("s - 0.5").unwrap(), Expr::num(1.0), Expr::num(1.0)],
            interval(0.0, 1.0),
        )
        .unwrap();
        assert!(matches!(synthesize(&bad_k1, 1e-2), Err(SynthError::NonPositiveK1 { .. })));
        let vanishing = CurvaturePrescription::new(
            FrenetSpace::E24,
            vec![Expr::num(1.0), Expr::num(1.0), parse_expr("s - 0.5").unwrap()],
            interval(0.0, 1.0),
        )
        .unwrap();
        assert!(matches!(
            synthesize(&vanishing, 1e-2),
            Err(SynthError::VanishingCurvature { index: 3, .. })
        ));
        let zero = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 0.0], interval(0.0, 1.0)).unwrap();
        assert!(matches!(synthesize(&zero, 1e-2), Err(SynthError::VanishingCurvature { .. })));
        assert!(CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0], interval(0.0, 1.0)).is_err());
        assert!(matches!(synthesize(&zero, 0.0), Err(SynthError::InvalidStep(_))));
    }

    #[test]
    fn coarse_step_is_reported() {
        let p = CurvaturePrescription::constant(FrenetSpace::E24, &[5.0, 20.0, 5.0], interval(0.0, 1.0)).unwrap();
        assert!(matches!(synthesize(&p, 0.1), Err(SynthError::StepTooLarge { .. })));
    }

    #[test]
    fn initial_frame_is_checked() {
        let p = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 1.0], interval(0.0, 1.0)).unwrap();
        let mut vs = PseudoFrame::standard(FrenetSpace::E24.metric()).into_vectors();
        vs.swap(2, 3);
        let flipped = PseudoFrame::from_parts(FrenetSpace::E24.metric(), vs, FrenetSpace::E24.frame_signs());
        assert!(p.with_initial_frame(flipped).is_err());
    }
}
