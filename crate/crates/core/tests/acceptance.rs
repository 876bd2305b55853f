mod common;

use std::process::ExitCode;

use bertrand_core::bertrand::{
    classical_obstruction_scan, construct_mate, estimate_13_constants, fit_classical_relation, offset_mate,
    parallel_mate, relation_derivative_residual, speed_identity_residual, verify_mate, BertrandCertificate,
    CertificateOptions, Correspondence,
};
use bertrand_core::curve_dsl::{parse_expr, Expr};
use bertrand_core::curve_synth::{synthesize, CurvaturePrescription, SynthesizedCurve};
use bertrand_core::frenet_engine::{frenet_apparatus, CurveSpec, FrenetApparatus, FrenetEngine, FrenetSpace, Interval};
use bertrand_core::pseudo_linalg::SemiMetric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRAM_TOL: f64 = 1e-9;
const ROUNDTRIP_TOL: f64 = 1e-6;
const FIT_TOL: f64 = 1e-10;
const NORMAL_LINE_TOL: f64 = 1e-6;
const OBSTRUCTION_FLOOR: f64 = 0.1;
const KBAR_TOL: f64 = 1e-4;
const PLANE_TOL: f64 = 1e-5;
const ROT_STD_TOL: f64 = 1e-7;
const HYPERBOLA_TOL: f64 = 1e-9;
const CONDITION_TOL: f64 = 1e-12;
const PERTURBED_FLOOR: f64 = 1e-2;
const SPEED_IDENTITY_TOL: f64 = 1e-9;
const FD_TOL: f64 = 1e-6;
const JET_TOL: f64 = 1e-6;

/// Mate curvatures of the constant (1, 3, 1) curve for (1, 5/3, 1.5, 1.5).
const KBAR: [f64; 3] = [0.67082, 2.01246, 0.67082];

struct Outcome {
    pass: bool,
    detail: String,
}

fn interval(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn constant_131() -> SynthesizedCurve {
    let p = CurvaturePrescription::constant(FrenetSpace::E24, &[1.0, 3.0, 1.0], interval(0.0, 2.0)).unwrap();
    synthesize(&p, 1e-3).unwrap()
}

fn example_certificate(app: &FrenetApparatus) -> BertrandCertificate {
    BertrandCertificate::evaluate(app, [1.0, 5.0 / 3.0, 1.5, 1.5], true, &CertificateOptions::default()).unwrap()
}

fn frame_fidelity() -> Outcome {
    let synth = constant_131();
    let gram = synth.max_gram_residual();
    let engine = FrenetEngine::new(synth.curve()).unwrap();
    let app = engine.apparatus(&engine.default_grid(512).unwrap()).unwrap();
    let roundtrip = app
        .samples()
        .iter()
        .flat_map(|s| s.curvatures.iter().zip([1.0, 3.0, 1.0]).map(|(k, want)| (k - want).abs()))
        .fold(0.0, f64::max);
    Outcome {
        pass: gram < GRAM_TOL && roundtrip < ROUNDTRIP_TOL,
        detail: format!(
            "max Gram residual {gram:.2e} over {} steps; curvature round trip {roundtrip:.2e}",
            synth.gram_residuals().len()
        ),
    }
}

fn classical_helix() -> Outcome {
    let comps = ["2*sinh(s)", "2*cosh(s)", "sqrt(3)*s"].map(|c| parse_expr(c).unwrap()).to_vec();
    let c = CurveSpec::analytic(SemiMetric::minkowski_space(), comps, interval(0.0, 2.0)).unwrap();
    let app = frenet_apparatus(&c, &grid(0.0, 2.0, 129)).unwrap();
    let Some(fit) = fit_classical_relation(&app, 1e-6).unwrap() else {
        return Outcome {
            pass: false,
            detail: "no relation found".into(),
        };
    };
    let (_, normal) = parallel_mate(&c, fit.a).unwrap();
    Outcome {
        pass: fit.residual < FIT_TOL && normal < NORMAL_LINE_TOL,
        detail: format!(
            "a = {:.6}, b = {:.6}, fit residual {:.2e}, normal-line residual {normal:.2e}",
            fit.a, fit.b, fit.residual
        ),
    }
}

fn obstruction() -> Outcome {
    let synth = constant_131();
    let app = frenet_apparatus(synth.curve(), &grid(0.3, 1.7, 65)).unwrap();
    let alphas: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
    let scan = classical_obstruction_scan(&app, &alphas).unwrap();
    let zero = scan.iter().find(|e| e.alpha == 0.0).unwrap().obstruction;
    let (worst_alpha, worst) = scan
        .iter()
        .filter(|e| e.alpha != 0.0)
        .map(|e| (e.alpha, e.obstruction))
        .fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    Outcome {
        pass: zero == 0.0 && worst > OBSTRUCTION_FLOOR,
        detail: format!("min over alpha != 0 is {worst:.6} at alpha = {worst_alpha}; at alpha = 0: {zero}"),
    }
}

fn sufficiency() -> Outcome {
    let synth = constant_131();
    let app = synth.design_apparatus(&grid(0.0, 2.0, 65)).unwrap();
    let cert = example_certificate(&app);
    if !cert.is_accepted() {
        return Outcome {
            pass: false,
            detail: format!("certificate rejected: {:?}", cert.status),
        };
    }
    let mate = construct_mate(synth.curve(), &cert).unwrap();
    let engine = FrenetEngine::new(&mate).unwrap();
    let mate_app = engine.apparatus(&engine.default_grid(128).unwrap()).unwrap();
    let kbar_dev = mate_app
        .samples()
        .iter()
        .flat_map(|s| s.curvatures.iter().zip(KBAR).map(|(k, want)| (k - want).abs()))
        .fold(0.0, f64::max);
    let report = verify_mate(synth.curve(), &mate, &cert, Correspondence::FromCertificate).unwrap();
    Outcome {
        pass: kbar_dev < KBAR_TOL
            && report.plane_residual < PLANE_TOL
            && report.rot_constancy < ROT_STD_TOL
            && report.rot_hyperbola_dev < HYPERBOLA_TOL,
        detail: format!(
            "kbar deviation {kbar_dev:.2e}; plane residual {:.2e}; rotation ({:.6}, {:.6}) std {:.2e}, c^2 - s^2 - 1 {:.2e}",
            report.plane_residual, report.rot_c_mean, report.rot_s_mean, report.rot_constancy, report.rot_hyperbola_dev
        ),
    }
}

fn certificate_validation() -> Outcome {
    let synth = constant_131();
    let app = synth.design_apparatus(&grid(0.0, 2.0, 65)).unwrap();
    let cert = example_certificate(&app);
    let margin = CertificateOptions::default().tol_margin;
    Outcome {
        pass: cert.is_accepted()
            && cert.residual_ii < CONDITION_TOL
            && cert.residual_iii < CONDITION_TOL
            && (cert.iv_value + 3.75).abs() < CONDITION_TOL
            && cert.iv_value.abs() > margin
            && cert.gamma.abs() > 1.0
            && cert.delta.abs() > 1.0,
        detail: format!(
            "ii {:.2e}, iii {:.2e}, iv = {}, gamma = {}, delta = {}",
            cert.residual_ii, cert.residual_iii, cert.iv_value, cert.gamma, cert.delta
        ),
    }
}

fn perturbation() -> Outcome {
    let synth = constant_131();
    let app = synth.design_apparatus(&grid(0.0, 2.0, 65)).unwrap();
    let cert = example_certificate(&app);
    let mate = offset_mate(synth.curve(), cert.alpha, cert.beta + 0.1).unwrap();
    let report = verify_mate(synth.curve(), &mate, &cert, Correspondence::FromCertificate).unwrap();
    Outcome {
        pass: report.plane_residual > PERTURBED_FLOOR,
        detail: format!("plane residual with beta + 0.1: {:.4}", report.plane_residual),
    }
}

/// Curvatures satisfying `a k1 + b k3 = 1` and `k2 = gamma k1 + delta k3`
/// around a random k3 level, with an oscillation of the given amplitude.
fn prescription<R: Rng>(rng: &mut R, amplitude: f64) -> Option<(CurvaturePrescription, CertificateOptions)> {
    let alpha = rng.gen_range(0.5..1.5);
    let gamma = rng.gen_range(1.2..2.5) * if rng.gen_bool(0.2) { -1.0 } else { 1.0 };
    let delta = rng.gen_range(1.2..2.5);
    let k3_level = rng.gen_range(0.5..1.5);
    let k1_level = rng.gen_range(0.3..1.5);
    let a = alpha * (gamma * gamma - 1.0);
    let b = (1.0 - a * k1_level) / k3_level;
    let omega = rng.gen_range(0.5..2.0);
    let phase = rng.gen_range(0.0..6.0);
    let k3 = format!("{k3_level} + {amplitude}*sin({omega}*s + {phase})");
    let k1 = format!("(1 - ({b})*({k3}))/{a}");
    let k2 = format!("({gamma})*({k1}) + {delta}*({k3})");
    let exprs: Vec<Expr> = [&k1, &k2, &k3].iter().map(|c| parse_expr(c).unwrap()).collect();
    let p = CurvaturePrescription::new(FrenetSpace::E24, exprs, interval(0.0, 2.0)).ok()?;
    p.validate().ok()?;
    let opts = CertificateOptions {
        gamma_hint: Some(gamma),
        alpha_hint: alpha,
        ..Default::default()
    };
    Some((p, opts))
}

/// `max |(gamma k1' - k2') k3 + (gamma k1 - k2) k3'|`, the identity with a plus sign.
fn literal_form(app: &FrenetApparatus, gamma: f64) -> f64 {
    let s = app.s_values();
    let h = s[1] - s[0];
    let k: Vec<Vec<f64>> = (0..3).map(|i| app.curvature(i)).collect();
    let d = |v: &[f64], i: usize| (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    (2..s.len() - 2)
        .map(|i| ((gamma * d(&k[0], i) - d(&k[1], i)) * k[2][i] + (gamma * k[0][i] - k[1][i]) * d(&k[2], i)).abs())
        .fold(0.0, f64::max)
}

fn identity_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut accepted, mut tried, mut failures) = (0usize, 0usize, Vec::new());
    let (mut speed_worst, mut fd_worst, mut literal_worst) = (0.0f64, 0.0f64, 0.0f64);
    let mut constant = 0usize;
    while accepted < 24 && tried < 400 {
        tried += 1;
        let amplitude = if accepted % 2 == 0 { 0.0 } else { rng.gen_range(0.02..0.2) };
        let Some((p, opts)) = prescription(&mut rng, amplitude) else { continue };
        let Ok(synth) = synthesize(&p, 1e-3) else { continue };
        let app = synth.design_apparatus(&grid(0.0, 2.0, 257)).unwrap();
        let cert = estimate_13_constants(&app, &opts).unwrap();
        if !cert.is_accepted() {
            continue;
        }
        accepted += 1;
        if amplitude == 0.0 {
            constant += 1;
        }
        let speed = speed_identity_residual(&app, &cert);
        let fd = relation_derivative_residual(&app, &cert).unwrap();
        speed_worst = speed_worst.max(speed);
        fd_worst = fd_worst.max(fd);
        literal_worst = literal_worst.max(literal_form(&app, cert.gamma));
        if speed >= SPEED_IDENTITY_TOL || fd >= FD_TOL {
            failures.push(format!("case {accepted}: speed {speed:.2e}, derivative {fd:.2e}"));
        }
    }
    Outcome {
        pass: accepted >= 20 && failures.is_empty(),
        detail: format!(
            "{accepted} accepted ({constant} constant) of {tried}; speed identity {speed_worst:.2e}; \
             relation derivative {fd_worst:.2e} (printed plus-sign form: {literal_worst:.2e}){}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    }
}

fn dsl_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst, mut print_failures, mut jet_failures) = (0.0f64, 0usize, 0usize);
    let mut nonconstant = 0usize;
    for _ in 0..1000 {
        let (e, s0) = common::random_case(&mut rng);
        if parse_expr(&e.to_string()).ok().as_ref() != Some(&e) {
            print_failures += 1;
        }
        let jet = e.eval_jet(s0).unwrap();
        let fd = common::richardson_derivatives(&e, s0);
        let mut case_worst = 0.0f64;
        for k in 1..=4 {
            case_worst = case_worst.max(common::rel_err(jet.derivative(k), fd[k - 1]));
        }
        if jet.derivative(1) != 0.0 {
            nonconstant += 1;
        }
        if case_worst >= JET_TOL {
            jet_failures += 1;
        }
        worst = worst.max(case_worst);
    }
    Outcome {
        pass: print_failures == 0 && jet_failures == 0,
        detail: format!(
            "1000 expressions ({nonconstant} non-constant): worst error {worst:.2e}, {jet_failures} jet mismatches, \
             {print_failures} print/parse mismatches"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("frame fidelity", frame_fidelity),
        ("classical Bertrand helix", classical_helix),
        ("classical obstruction", obstruction),
        ("(1,3) mate construction", sufficiency),
        ("certificate validation", certificate_validation),
        ("perturbation sensitivity", perturbation),
        ("identity chain", identity_chain),
        ("DSL correctness", dsl_correctness),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        all &= outcome.pass;
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {name}: {}", i + 1, outcome.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
