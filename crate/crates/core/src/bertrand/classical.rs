use crate::frenet_engine::{frenet_space, CurveSpec, FrenetApparatus, FrenetEngine, FrenetSpace, SampleTable};

use super::{frame_track, lstsq2, require_space, BertrandError, HyperbolicPair};

/// Largest accepted `max |a k1 + b k2 - 1|`.
pub const DEFAULT_FIT_THRESHOLD: f64 = 1e-6;

/// Points at which normal lines are compared.
const MAX_COMPARED: usize = 512;

/// Constants of a relation `a k1 + b k2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalFit {
    pub a: f64,
    pub b: f64,
    /// `max |a k1 + b k2 - 1|` over the samples.
    pub residual: f64,
}

/// One entry of an obstruction scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionEntry {
    pub alpha: f64,
    /// `min_s |k3 sinh(theta)|`; infinite where the candidate tangent is null.
    pub obstruction: f64,
    /// Whether `(1 + alpha k1)^2 - (alpha k2)^2 > 0` on the whole grid.
    pub feasible: bool,
    pub min_phi_prime: f64,
    /// `(cosh theta, sinh theta)` at the first grid point, when feasible.
    pub theta: Option<HyperbolicPair>,
}

/// Parallel offset `c + alpha n` of a curve in `E^2_1`, with the
/// normal-line coincidence residual.
pub fn planar_parallel_mate(c: &CurveSpec, alpha: f64) -> Result<(CurveSpec, f64), BertrandError> {
    require_space(frenet_space(c.metric())?, FrenetSpace::E12)?;
    parallel_mate(c, alpha)
}

/// Offset `c + alpha n` along the principal normal of a curve in `E^2_1` or
/// `E^3_1`, tabulated against the arc length of `c`.
///
/// The residual is the largest distance between the unit principal normals of
/// the two curves, up to sign, at corresponding points.
pub fn parallel_mate(c: &CurveSpec, alpha: f64) -> Result<(CurveSpec, f64), BertrandError> {
    let space = frenet_space(c.metric())?;
    if space == FrenetSpace::E24 {
        return Err(BertrandError::WrongSpace {
            expected: FrenetSpace::E13,
            found: space,
        });
    }
    if alpha == 0.0 {
        return Ok((c.clone(), 0.0));
    }
    let track = frame_track(c)?;
    let mut points = Vec::with_capacity(track.s.len());
    for i in 0..track.s.len() {
        let k = &track.curvatures[i];
        let along = 1.0 + alpha * k[0];
        let across = if space == FrenetSpace::E13 { alpha * k[1] } else { 0.0 };
        if along * along - across * across <= 1e-20 {
            return Err(BertrandError::SingularOffset { alpha, s: track.s[i] });
        }
        points.push(&track.points[i] + &track.frames[i][1] * alpha);
    }
    let mate = CurveSpec::sampled(c.metric(), SampleTable::new(track.s.clone(), points)?)?;
    let engine = FrenetEngine::new(&mate)?;
    let (lo, hi) = mate.resolvable_interval();
    let inside: Vec<usize> = (0..track.s.len())
        .filter(|&i| track.s[i] >= lo && track.s[i] <= hi)
        .collect();
    if inside.is_empty() {
        return Err(BertrandError::TooFewPoints(0));
    }
    let stride = inside.len().div_ceil(MAX_COMPARED);
    let mut residual: f64 = 0.0;
    for &i in inside.iter().step_by(stride) {
        let sample = engine.sample_at_param(track.s[i])?;
        let nbar = sample.frame.vector(1);
        let n = &track.frames[i][1];
        residual = residual.max((nbar - n).norm().min((nbar + n).norm()));
    }
    Ok((mate, residual))
}

/// Least-squares constants of `a k1 + b k2 = 1`, minimum-norm when the
/// columns are dependent. `None` when the residual exceeds `threshold` or
/// either constant vanishes.
pub fn fit_linear_relation(k1: &[f64], k2: &[f64], threshold: f64) -> Option<ClassicalFit> {
    let n = k1.len();
    if n == 0 || k2.len() != n {
        return None;
    }
    let ([a, b], _) = lstsq2(k1, k2, &vec![1.0; n], 1e-6);
    let residual = k1
        .iter()
        .zip(k2)
        .map(|(p, q)| (a * p + b * q - 1.0).abs())
        .fold(0.0, f64::max);
    let scale = a.hypot(b);
    if !(residual <= threshold) || a.abs() <= 1e-9 * scale || b.abs() <= 1e-9 * scale {
        return None;
    }
    Some(ClassicalFit { a, b, residual })
}

/// Linear relation between the curvatures of a curve in `E^3_1`.
pub fn fit_classical_relation(app: &FrenetApparatus, threshold: f64) -> Result<Option<ClassicalFit>, BertrandError> {
    require_space(app.space(), FrenetSpace::E13)?;
    let k2 = app.curvature(1);
    if let Some(i) = k2.iter().position(|&v| v == 0.0) {
        return Err(BertrandError::VanishingCurvature {
            index: 2,
            s: app.samples()[i].s,
        });
    }
    Ok(fit_linear_relation(&app.curvature(0), &k2, threshold))
}

/// For each `alpha`, how far the offset `c + alpha n1` is from having its
/// principal normal in the span of `n1`.
pub fn classical_obstruction_scan(app: &FrenetApparatus, alphas: &[f64]) -> Result<Vec<ObstructionEntry>, BertrandError> {
    require_space(app.space(), FrenetSpace::E24)?;
    for sample in app.samples() {
        for index in [1, 2] {
            if sample.curvatures[index] == 0.0 {
                return Err(BertrandError::VanishingCurvature {
                    index: index + 1,
                    s: sample.s,
                });
            }
        }
    }
    let entries = alphas
        .iter()
        .map(|&alpha| {
            let mut obstruction = f64::INFINITY;
            let mut feasible = true;
            let mut min_phi_prime = f64::INFINITY;
            let mut theta = None;
            for (i, sample) in app.samples().iter().enumerate() {
                let k = &sample.curvatures;
                let along = 1.0 + alpha * k[0];
                let across = alpha * k[1];
                let q = along * along - across * across;
                feasible &= q > 0.0;
                let phi_prime = q.abs().sqrt();
                min_phi_prime = min_phi_prime.min(phi_prime);
                if phi_prime > 0.0 {
                    obstruction = obstruction.min((k[2] * across / phi_prime).abs());
                    if i == 0 && q > 0.0 {
                        theta = Some(HyperbolicPair::new(along / phi_prime, across / phi_prime));
                    }
                }
            }
            ObstructionEntry {
                alpha,
                obstruction,
                feasible,
                min_phi_prime,
                theta: if feasible { theta } else { None },
            }
        })
        .collect();
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_dsl::parse_expr;
    use crate::curve_synth::{synthesize, CurvaturePrescription};
    use crate::frenet_engine::{frenet_apparatus, Interval};

    fn analytic(space: FrenetSpace, components: &[&str], a: f64, b: f64) -> CurveSpec {
        let exprs = components.iter().map(|s| parse_expr(s).unwrap()).collect();
        CurveSpec::analytic(space.metric(), exprs, Interval::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn hyperbola_offsets() {
        let c = analytic(FrenetSpace::E12, &["sinh(s)", "cosh(s)"], 0.0, 2.0);
        let (_, r) = planar_parallel_mate(&c, 0.5).unwrap();
        assert!(r < 1e-6, "{r}");
        let (same, r) = planar_parallel_mate(&c, 0.0).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(same, c);
        assert!(matches!(
            planar_parallel_mate(&c, -1.0),
            Err(BertrandError::SingularOffset { .. })
        ));
    }

    #[test]
    fn singular_offset_located_by_bisection() {
        let c = analytic(FrenetSpace::E12, &["sinh(s)", "cosh(s)"], 0.0, 2.0);
        // speed of the offset, |1 + alpha k1|, with k1 = 1
        let speed = |alpha: f64| (1.0 + alpha).abs();
        let (mut lo, mut hi) = (-2.0_f64, 0.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (1.0 + mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(speed(hi) < 1e-12);
        assert!(matches!(
            planar_parallel_mate(&c, hi),
            Err(BertrandError::SingularOffset { .. })
        ));
    }

    #[test]
    fn helix_relation_and_mate() {
        let c = analytic(FrenetSpace::E13, &["2*sinh(s)", "2*cosh(s)", "sqrt(3)*s"], 0.0, 2.0);
        let app = frenet_apparatus(&c, &crate::frenet_engine::linspace(0.0, 2.0, 64)).unwrap();
        let fit = fit_classical_relation(&app, DEFAULT_FIT_THRESHOLD).unwrap().unwrap();
        let k2 = app.curvature(1)[0];
        assert!((fit.a - 2.0 / 7.0).abs() < 1e-12);
        assert!((fit.b - k2 / 7.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let (_, r) = parallel_mate(&c, fit.a).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn linear_relation_fits() {
        let s: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let k1: Vec<f64> = s.iter().map(|s| 1.0 + s * s).collect();
        let ones = vec![1.0; s.len()];
        assert_eq!(fit_linear_relation(&k1, &ones, DEFAULT_FIT_THRESHOLD), None);
        let k2: Vec<f64> = s.iter().map(|s| 1.0 + s).collect();
        assert_eq!(fit_linear_relation(&k1, &k2, DEFAULT_FIT_THRESHOLD), None);
        let (a0, b0) = (0.3, -0.7);
        let k2: Vec<f64> = k1.iter().map(|k| (1.0 - a0 * k) / b0).collect();
        let fit = fit_linear_relation(&k1, &k2, DEFAULT_FIT_THRESHOLD).unwrap();
        assert!((fit.a - a0).abs() < 1e-8 && (fit.b - b0).abs() < 1e-8);
    }

    #[test]
    fn obstruction_on_constant_neutral_curve() {
        let p = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 1.0], Interval::new(0.0, 2.0).unwrap())
            .unwrap();
        let synth = synthesize(&p, 1e-3).unwrap();
        let app = synth.design_apparatus(&crate::frenet_engine::linspace(0.0, 2.0, 33)).unwrap();
        let alphas: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
        let scan = classical_obstruction_scan(&app, &alphas).unwrap();
        for e in &scan {
            if e.alpha == 0.0 {
                assert_eq!(e.obstruction, 0.0);
                assert!(e.feasible);
            } else {
                assert!(e.obstruction > 0.1, "{e:?}");
            }
        }
        let at = |a: f64| scan.iter().find(|e| e.alpha == a).unwrap();
        assert!((at(1.0).obstruction - 3.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!(!at(1.0).feasible);
        assert!((at(0.25).obstruction - 0.75).abs() < 1e-12);
        assert!(at(0.25).theta.unwrap().hyperbola_residual() < 1e-12);
        assert!(at(0.5).obstruction > 1e6);
        assert!(at(0.5).min_phi_prime < 1e-6);
    }
}
