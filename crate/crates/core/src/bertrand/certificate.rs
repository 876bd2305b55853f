use std::fmt;

use crate::frenet_engine::{FrenetApparatus, FrenetSpace};

use super::{lstsq2, require_space, rms, BertrandError};

/// Relative singular-value cutoff below which a regression is treated as
/// underdetermined.
const RANK_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    /// Pins `gamma` when the curvatures do not determine it.
    pub gamma_hint: Option<f64>,
    /// Pins `alpha` when the curvatures do not determine it.
    pub alpha_hint: f64,
    /// Relative tolerance for the equality conditions ii and iii.
    pub tol_eq: f64,
    /// Relative margin for the strict inequalities.
    pub tol_margin: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            gamma_hint: None,
            alpha_hint: 1.0,
            tol_eq: 1e-8,
            tol_margin: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    I,
    II,
    III,
    IV,
    GammaRange,
    DeltaRange,
    SquareRoot,
    Underdetermined,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::I => "i",
            Condition::II => "ii",
            Condition::III => "iii",
            Condition::IV => "iv",
            Condition::GammaRange => "gamma_range",
            Condition::DeltaRange => "delta_range",
            Condition::SquareRoot => "sqrt_domain",
            Condition::Underdetermined => "gamma_hint",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateStatus {
    Accepted,
    Rejected { condition: Condition, detail: String },
}

/// Constants `(alpha, beta, gamma, delta)` of a (1,3)-Bertrand relation
/// with the measured condition values.
#[derive(Debug, Clone, PartialEq)]
pub struct BertrandCertificate {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// `min |alpha k2 - beta k3|`.
    pub residual_i: f64,
    /// Relative `max |gamma (alpha k2 - beta k3) - alpha k1 - 1|`.
    pub residual_ii: f64,
    /// Relative `max |delta k3 + gamma k1 - k2|`.
    pub residual_iii: f64,
    /// `min |P|` with `P = (gamma^2 + 1) k1 k2 - gamma (k1^2 + k2^2 - k3^2)`.
    pub residual_iv: f64,
    /// `P` where `|P|` is smallest.
    pub iv_value: f64,
    /// `min ((gamma k1 - k2)^2 - k3^2)`.
    pub sqrt_min: f64,
    /// Sign of `alpha k2 - beta k3`.
    pub epsilon: f64,
    pub family_flag: bool,
    pub status: CertificateStatus,
}

impl BertrandCertificate {
    /// Measures the conditions for given constants on the curvatures of `app`.
    pub fn evaluate(
        app: &FrenetApparatus,
        constants: [f64; 4],
        family_flag: bool,
        options: &CertificateOptions,
    ) -> Result<Self, BertrandError> {
        require_space(app.space(), FrenetSpace::E24)?;
        let k: Vec<[f64; 3]> = app
            .samples()
            .iter()
            .map(|s| [s.curvatures[0], s.curvatures[1], s.curvatures[2]])
            .collect();
        Ok(evaluate(&k, constants, family_flag, options))
    }

    pub fn is_accepted(&self) -> bool {
        self.status == CertificateStatus::Accepted
    }

    /// Failed condition, if any.
    pub fn rejected_condition(&self) -> Option<Condition> {
        match &self.status {
            CertificateStatus::Accepted => None,
            CertificateStatus::Rejected { condition, .. } => Some(*condition),
        }
    }
}

fn evaluate(k: &[[f64; 3]], constants: [f64; 4], family_flag: bool, options: &CertificateOptions) -> BertrandCertificate {
    let [alpha, beta, gamma, delta] = constants;
    let rel_max = |num: &dyn Fn(&[f64; 3]) -> f64, scale: &dyn Fn(&[f64; 3]) -> f64| {
        let worst = k.iter().map(|v| num(v).abs()).fold(0.0, f64::max);
        let s = rms(k.iter().map(|v| scale(v)));
        if s > 0.0 {
            worst / s
        } else {
            worst
        }
    };
    let residual_iii = rel_max(&|v| delta * v[2] + gamma * v[0] - v[1], &|v| {
        (delta * v[2]).abs() + (gamma * v[0]).abs() + v[1].abs()
    });
    let residual_ii = rel_max(&|v| gamma * (alpha * v[1] - beta * v[2]) - alpha * v[0] - 1.0, &|v| {
        (gamma * alpha * v[1]).abs() + (gamma * beta * v[2]).abs() + (alpha * v[0]).abs() + 1.0
    });
    let w: Vec<f64> = k.iter().map(|v| alpha * v[1] - beta * v[2]).collect();
    let residual_i = w.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let w_scale = rms(k.iter().map(|v| (alpha * v[1]).abs() + (beta * v[2]).abs()));
    let epsilon = if w.first().copied().unwrap_or(0.0) < 0.0 { -1.0 } else { 1.0 };
    let sign_constant = w.iter().all(|x| x.signum() == epsilon);
    let p: Vec<f64> = k
        .iter()
        .map(|v| (gamma * gamma + 1.0) * v[0] * v[1] - gamma * (v[0] * v[0] + v[1] * v[1] - v[2] * v[2]))
        .collect();
    let (iv_value, residual_iv) = p
        .iter()
        .map(|&x| (x, x.abs()))
        .fold((f64::NAN, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    let p_scale = rms(k.iter().map(|v| {
        (gamma * gamma + 1.0) * (v[0] * v[1]).abs() + gamma.abs() * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    }));
    let d: Vec<f64> = k.iter().map(|v| (gamma * v[0] - v[1]).powi(2) - v[2] * v[2]).collect();
    let sqrt_min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let d_scale = rms(k.iter().map(|v| (gamma * v[0] - v[1]).powi(2) + v[2] * v[2]));

    let tol = options.tol_eq;
    let margin = options.tol_margin;
    let reject = |condition: Condition, detail: String| CertificateStatus::Rejected { condition, detail };
    let status = if !(residual_iii < tol) {
        reject(
            Condition::III,
            format!("no constants satisfy delta k3 = -gamma k1 + k2 (relative residual {residual_iii:.3e})"),
        )
    } else if !(residual_ii < tol) {
        reject(
            Condition::II,
            format!("no constants satisfy gamma (alpha k2 - beta k3) - alpha k1 = 1 (relative residual {residual_ii:.3e})"),
        )
    } else if !(gamma.abs() > 1.0 + margin) {
        reject(Condition::GammaRange, format!("|gamma| = {} is not greater than 1", gamma.abs()))
    } else if !(delta.abs() > 1.0 + margin) {
        reject(Condition::DeltaRange, format!("|delta| = {} is not greater than 1", delta.abs()))
    } else if !(residual_i > margin * w_scale) || !sign_constant {
        reject(
            Condition::I,
            format!("alpha k2 - beta k3 vanishes or changes sign (min |.| = {residual_i:.3e})"),
        )
    } else if !(residual_iv > margin * p_scale) {
        reject(
            Condition::IV,
            format!("(gamma^2 + 1) k1 k2 - gamma (k1^2 + k2^2 - k3^2) vanishes (min |.| = {residual_iv:.3e})"),
        )
    } else if !(sqrt_min > margin * d_scale) {
        reject(
            Condition::SquareRoot,
            format!("(gamma k1 - k2)^2 - k3^2 is not positive (min = {sqrt_min:.3e})"),
        )
    } else {
        CertificateStatus::Accepted
    };
    BertrandCertificate {
        alpha,
        beta,
        gamma,
        delta,
        residual_i,
        residual_ii,
        residual_iii,
        residual_iv,
        iv_value,
        sqrt_min,
        epsilon,
        family_flag,
        status,
    }
}

/// Largest relative mismatch between the squared mate speed obtained from
/// the offset derivative, `(1 + alpha k1)^2 - (alpha k2 - beta k3)^2`, and
/// `(gamma^2 - 1)(alpha k2 - beta k3)^2`.
pub fn speed_identity_residual(app: &FrenetApparatus, cert: &BertrandCertificate) -> f64 {
    let g1 = cert.gamma * cert.gamma - 1.0;
    app.samples()
        .iter()
        .map(|smp| {
            let k = &smp.curvatures;
            let along = 1.0 + cert.alpha * k[0];
            let w = cert.alpha * k[1] - cert.beta * k[2];
            let lhs = along * along - w * w;
            let rhs = g1 * w * w;
            (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `max |(gamma k1' - k2') k3 - (gamma k1 - k2) k3'|` with five-point
/// differences along a uniform grid. `None` for short or non-uniform grids.
pub fn relation_derivative_residual(app: &FrenetApparatus, cert: &BertrandCertificate) -> Option<f64> {
    let n = app.len();
    if n < 5 {
        return None;
    }
    let s = app.s_values();
    let h = (s[n - 1] - s[0]) / (n - 1) as f64;
    if !(h > 0.0) || s.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return None;
    }
    let k: Vec<Vec<f64>> = (0..3).map(|i| app.curvature(i)).collect();
    let d = |v: &[f64], i: usize| (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    let g = cert.gamma;
    Some(
        (2..n - 2)
            .map(|i| ((g * d(&k[0], i) - d(&k[1], i)) * k[2][i] - (g * k[0][i] - k[1][i]) * d(&k[2], i)).abs())
            .fold(0.0, f64::max),
    )
}

/// Projection coefficient of `target` onto `column`.
fn project(column: &[f64], target: &[f64]) -> f64 {
    let num: f64 = column.iter().zip(target).map(|(c, t)| c * t).sum();
    let den: f64 = column.iter().map(|c| c * c).sum();
    num / den
}

/// Estimates `(alpha, beta, gamma, delta)` from the curvatures of a curve in
/// `E^4_2` and validates the (1,3)-Bertrand conditions.
///
/// Rejection is reported in the certificate status, not as an error.
pub fn estimate_13_constants(
    app: &FrenetApparatus,
    options: &CertificateOptions,
) -> Result<BertrandCertificate, BertrandError> {
    require_space(app.space(), FrenetSpace::E24)?;
    if app.is_empty() {
        return Err(BertrandError::TooFewPoints(0));
    }
    for sample in app.samples() {
        for (index, &v) in sample.curvatures.iter().enumerate() {
            if v == 0.0 {
                return Err(BertrandError::VanishingCurvature { index: index + 1, s: sample.s });
            }
        }
    }
    let k: Vec<[f64; 3]> = app
        .samples()
        .iter()
        .map(|s| [s.curvatures[0], s.curvatures[1], s.curvatures[2]])
        .collect();
    let k1: Vec<f64> = k.iter().map(|v| v[0]).collect();
    let k2: Vec<f64> = k.iter().map(|v| v[1]).collect();
    let k3: Vec<f64> = k.iter().map(|v| v[2]).collect();

    let ([mut gamma, mut delta], full_iii) = lstsq2(&k1, &k3, &k2, RANK_CUTOFF);
    let mut family_flag = false;
    if !full_iii {
        family_flag = true;
        let probe = evaluate(&k, [f64::NAN, f64::NAN, gamma, delta], true, options);
        if probe.rejected_condition() == Some(Condition::III) {
            return Ok(probe);
        }
        match options.gamma_hint {
            Some(g) => {
                gamma = g;
                let rest: Vec<f64> = k.iter().map(|v| v[1] - g * v[0]).collect();
                delta = project(&k3, &rest);
            }
            None => {
                return Ok(BertrandCertificate {
                    alpha: f64::NAN,
                    beta: f64::NAN,
                    status: CertificateStatus::Rejected {
                        condition: Condition::Underdetermined,
                        detail: "curvature ratios are constant; a gamma hint is required".into(),
                    },
                    ..probe
                });
            }
        }
    }

    let u: Vec<f64> = k.iter().map(|v| gamma * v[1] - v[0]).collect();
    let w: Vec<f64> = k.iter().map(|v| -gamma * v[2]).collect();
    let ones = vec![1.0; k.len()];
    let ([mut alpha, mut beta], full_ii) = lstsq2(&u, &w, &ones, RANK_CUTOFF);
    if !full_ii {
        family_flag = true;
        alpha = options.alpha_hint;
        let rest: Vec<f64> = u.iter().map(|x| 1.0 - alpha * x).collect();
        beta = project(&w, &rest);
    }
    Ok(evaluate(&k, [alpha, beta, gamma, delta], family_flag, options))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_dsl::parse_expr;
    use crate::curve_synth::{synthesize, CurvaturePrescription};
    use crate::frenet_engine::{linspace, Interval};

    fn design(k: &[&str]) -> FrenetApparatus {
        let exprs = k.iter().map(|s| parse_expr(s).unwrap()).collect();
        let p = CurvaturePrescription::new(FrenetSpace::E24, exprs, Interval::new(0.0, 2.0).unwrap()).unwrap();
        synthesize(&p, 1e-3).unwrap().design_apparatus(&linspace(0.0, 2.0, 65)).unwrap()
    }

    fn hint(g: f64) -> CertificateOptions {
        CertificateOptions {
            gamma_hint: Some(g),
            ..Default::default()
        }
    }

    #[test]
    fn constant_example_with_hint() {
        let app = design(&["1", "3", "1"]);
        let cert = estimate_13_constants(&app, &hint(1.5)).unwrap();
        assert!(cert.is_accepted(), "{cert:?}");
        assert!(cert.family_flag);
        assert!((cert.alpha - 1.0).abs() < 1e-12);
        assert!((cert.beta - 5.0 / 3.0).abs() < 1e-12);
        assert!((cert.gamma - 1.5).abs() < 1e-12 && (cert.delta - 1.5).abs() < 1e-12);
        assert!(cert.residual_ii < 1e-12 && cert.residual_iii < 1e-12);
        assert!((cert.iv_value + 3.75).abs() < 1e-12);
        assert_eq!(cert.epsilon, 1.0);
    }

    #[test]
    fn boundary_delta_is_rejected() {
        let app = design(&["1", "3", "1"]);
        let cert = estimate_13_constants(&app, &hint(2.0)).unwrap();
        assert!((cert.delta - 1.0).abs() < 1e-12);
        assert_eq!(cert.rejected_condition(), Some(Condition::DeltaRange));
    }

    #[test]
    fn missing_hint_is_reported() {
        let app = design(&["1", "3", "1"]);
        let cert = estimate_13_constants(&app, &CertificateOptions::default()).unwrap();
        assert_eq!(cert.rejected_condition(), Some(Condition::Underdetermined));
    }

    #[test]
    fn linear_second_curvature_fails_condition_iii() {
        let app = design(&["1", "s + 0.5", "1"]);
        for opts in [hint(1.5), CertificateOptions::default()] {
            let cert = estimate_13_constants(&app, &opts).unwrap();
            assert_eq!(cert.rejected_condition(), Some(Condition::III));
        }
    }

    #[test]
    fn varying_curvatures_determine_the_constants() {
        // a k1 + b k3 = 1 with a = alpha (gamma^2 - 1), b = gamma (alpha delta - beta)
        let (alpha, beta, gamma, delta) = (1.0, 5.0 / 3.0, 1.5, 1.5);
        let a = alpha * (gamma * gamma - 1.0);
        let b = gamma * (alpha * delta - beta);
        let k3 = "1 + 0.2*sin(s)";
        let k1 = format!("(1 - {b}*({k3}))/{a}");
        let k2 = format!("{gamma}*({k1}) + {delta}*({k3})");
        let app = design(&[&k1, &k2, k3]);
        let cert = estimate_13_constants(&app, &CertificateOptions::default()).unwrap();
        assert!(cert.is_accepted(), "{cert:?}");
        assert!(!cert.family_flag);
        let r = speed_identity_residual(&app, &cert);
        assert!(r < 1e-9, "{r}");
        let r = relation_derivative_residual(&app, &cert).unwrap();
        assert!(r < 1e-6, "{r}");
        for (x, y) in [(cert.alpha, alpha), (cert.beta, beta), (cert.gamma, gamma), (cert.delta, delta)] {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}
