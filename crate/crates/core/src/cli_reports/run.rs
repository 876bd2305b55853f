use crate::bertrand::{
    classical_obstruction_scan, construct_mate, estimate_13_constants, fit_classical_relation,
    mate_apparatus_closed_form, parallel_mate, verify_mate, BertrandCertificate, BertrandError, CertificateOptions,
    CertificateStatus, Correspondence, DEFAULT_FIT_THRESHOLD,
};
use crate::curve_synth::{synthesize, SynthError, SynthesizedCurve};
use crate::frenet_engine::{
    frenet_space, linspace, speed_and_character, CurveSpec, FrenetApparatus, FrenetEngine, FrenetError,
};
use crate::pseudo_linalg::{CausalCharacter, LinalgError};

use super::report::{apparatus_table, emit_report, CsvTable, JobStatus, Report};
use super::{CliError, Command, InputFile, JobConfig};

/// Offsets scanned when the input has no `[scan] alphas`.
fn default_alphas() -> Vec<f64> {
    (-8..=8).map(|i| i as f64 * 0.25).collect()
}

enum JobError {
    Reject(String),
    Cli(CliError),
}

impl From<CliError> for JobError {
    fn from(e: CliError) -> Self {
        JobError::Cli(e)
    }
}

impl From<LinalgError> for JobError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::DegenerateFlag { .. } | LinalgError::RankDeficient { .. } => JobError::Reject(e.to_string()),
            _ => JobError::Cli(CliError::Input(e.to_string())),
        }
    }
}

impl From<FrenetError> for JobError {
    fn from(e: FrenetError) -> Self {
        match e {
            FrenetError::NotTimelike { .. }
            | FrenetError::DegenerateFlag { .. }
            | FrenetError::ConventionViolation { .. }
            | FrenetError::CurvatureSignChange { .. } => JobError::Reject(e.to_string()),
            FrenetError::Linalg(e) => e.into(),
            _ => JobError::Cli(CliError::Input(e.to_string())),
        }
    }
}

impl From<SynthError> for JobError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Frenet(e) => e.into(),
            SynthError::Linalg(e) => e.into(),
            _ => JobError::Cli(CliError::Input(e.to_string())),
        }
    }
}

impl From<BertrandError> for JobError {
    fn from(e: BertrandError) -> Self {
        match e {
            BertrandError::Frenet(e) => e.into(),
            BertrandError::WrongSpace { .. } | BertrandError::TooFewPoints(_) => {
                JobError::Cli(CliError::Input(e.to_string()))
            }
            _ => JobError::Reject(e.to_string()),
        }
    }
}

/// The curve a job works on, with its apparatus on the job grid.
struct Subject {
    curve: CurveSpec,
    synthesized: Option<SynthesizedCurve>,
}

impl Subject {
    fn load(input: &InputFile, config: &JobConfig) -> Result<Self, JobError> {
        match (input.curve_spec()?, input.prescription()?) {
            (Some(curve), None) => Ok(Subject { curve, synthesized: None }),
            (None, Some(p)) => {
                let synth = synthesize(&p, config.step)?;
                Ok(Subject {
                    curve: synth.curve().clone(),
                    synthesized: Some(synth),
                })
            }
            (Some(_), Some(_)) => Err(CliError::Input("give either [curve] or [curvatures], not both".into()).into()),
            (None, None) => Err(CliError::Input("input needs a [curve] or [curvatures] section".into()).into()),
        }
    }

    /// Prescribed apparatus for synthesized curves, numeric otherwise.
    fn apparatus(&self, grid: usize) -> Result<FrenetApparatus, JobError> {
        match &self.synthesized {
            Some(synth) => {
                let length = synth.curve().domain().length();
                Ok(synth.design_apparatus(&linspace(0.0, length, grid))?)
            }
            None => Ok(numeric_apparatus(&self.curve, grid)?),
        }
    }
}

fn numeric_apparatus(c: &CurveSpec, grid: usize) -> Result<FrenetApparatus, FrenetError> {
    let engine = FrenetEngine::new(c)?;
    engine.apparatus(&engine.default_grid(grid)?)
}

/// Runs the job and returns its report. Mathematical rejections give a
/// report with [`JobStatus::Rejected`]; input problems give an error.
pub fn execute(config: &JobConfig) -> Result<Report, CliError> {
    config.validate()?;
    let input = InputFile::load(&config.input)?;
    match dispatch(config, &input) {
        Ok(report) => Ok(report),
        Err(JobError::Reject(reason)) => Ok(Report::rejected(config.command, reason)),
        Err(JobError::Cli(e)) => Err(e),
    }
}

/// Runs the job, writes the report files and returns the exit code.
pub fn run(config: &JobConfig) -> i32 {
    let report = match execute(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = emit_report(&report, &config.output) {
        eprintln!("error: {e}");
        return 1;
    }
    match report.status {
        JobStatus::Success => 0,
        JobStatus::Rejected => {
            if let Some(reason) = report.values.get("reason").and_then(|v| v.as_str()) {
                eprintln!("rejected: {reason}");
            }
            2
        }
    }
}

fn dispatch(config: &JobConfig, input: &InputFile) -> Result<Report, JobError> {
    let subject = Subject::load(input, config)?;
    let mut report = Report::new(config.command);
    report.set("space", frenet_space(subject.curve.metric())?.tag());
    match config.command {
        Command::Classify => classify(&subject, config, &mut report)?,
        Command::Frenet => frenet(&subject, config, &mut report)?,
        Command::Synth => synth(&subject, config, &mut report)?,
        Command::FitClassical => fit(&subject, config, &mut report)?,
        Command::ScanClassical => scan(&subject, config, input, &mut report)?,
        Command::BertrandCheck | Command::BertrandMate | Command::BertrandVerify => {
            let app = subject.apparatus(config.grid)?;
            let options = certificate_options(config, input);
            let cert = estimate_13_constants(&app, &options)?;
            certificate_values(&cert, &mut report);
            if let CertificateStatus::Rejected { condition, detail } = &cert.status {
                report.reject(format!("condition {condition} fails: {detail}"));
                return Ok(report);
            }
            match config.command {
                Command::BertrandMate => mate(&subject, &app, &cert, &mut report)?,
                Command::BertrandVerify => verify(&subject, &cert, &mut report)?,
                _ => {}
            }
        }
    }
    Ok(report)
}

fn certificate_options(config: &JobConfig, input: &InputFile) -> CertificateOptions {
    let defaults = CertificateOptions::default();
    CertificateOptions {
        gamma_hint: config.gamma_hint.or(input.bertrand.gamma_hint),
        alpha_hint: config.alpha_hint.or(input.bertrand.alpha_hint).unwrap_or(defaults.alpha_hint),
        tol_eq: config.tol_eq,
        tol_margin: config.tol_margin,
    }
}

fn classify(subject: &Subject, config: &JobConfig, report: &mut Report) -> Result<(), JobError> {
    let (lo, hi) = subject.curve.resolvable_interval();
    let mut character = CausalCharacter::Timelike;
    let (mut min_speed, mut max_speed) = (f64::INFINITY, 0.0_f64);
    for t in linspace(lo, hi, config.grid) {
        let (speed, ch) = speed_and_character(&subject.curve, t)?;
        min_speed = min_speed.min(speed);
        max_speed = max_speed.max(speed);
        if ch != CausalCharacter::Timelike && character == CausalCharacter::Timelike {
            character = ch;
            report.set("first_non_timelike_param", t);
        }
    }
    report.set("character", character.as_str());
    report.set("min_speed", min_speed);
    report.set("max_speed", max_speed);
    report.set("samples", config.grid);
    Ok(())
}

fn curvature_summary(app: &FrenetApparatus, report: &mut Report) {
    for i in 0..app.space().curvature_count() {
        let k = app.curvature(i);
        let min = k.iter().copied().fold(f64::INFINITY, f64::min);
        let max = k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        report.set(&format!("k{}_min", i + 1), min);
        report.set(&format!("k{}_max", i + 1), max);
    }
}

fn frenet(subject: &Subject, config: &JobConfig, report: &mut Report) -> Result<(), JobError> {
    let app = numeric_apparatus(&subject.curve, config.grid)?;
    report.set("samples", app.len());
    report.set("s_start", app.samples()[0].s);
    report.set("s_end", app.samples()[app.len() - 1].s);
    report.set("max_gram_residual", app.max_gram_residual());
    if let Some(r) = app.frenet_equation_residual() {
        report.set("frenet_equation_residual", r);
    }
    curvature_summary(&app, report);
    report.table("frenet", apparatus_table(&app));
    Ok(())
}

fn synth(subject: &Subject, config: &JobConfig, report: &mut Report) -> Result<(), JobError> {
    let Some(synth) = &subject.synthesized else {
        return Err(CliError::Input("synth needs a [curvatures] section".into()).into());
    };
    let table = synth.curve().table().expect("synthesized curves are sampled");
    report.table("curve", point_table(synth.curve()));
    let design = subject.apparatus(config.grid)?;
    report.table("design", apparatus_table(&design));
    report.set("step", synth.step());
    report.set("steps", table.len() - 1);
    report.set("max_gram_residual", synth.max_gram_residual());

    // round trip through the numeric apparatus of the tabulated curve
    let numeric = numeric_apparatus(synth.curve(), config.grid)?;
    let start = table.first();
    let mut worst: f64 = 0.0;
    for sample in numeric.samples() {
        let prescribed = design_curvatures(synth, sample.param - start)?;
        for (k, p) in sample.curvatures.iter().zip(&prescribed) {
            worst = worst.max((k - p).abs());
        }
    }
    report.set("roundtrip_curvature_dev", worst);
    curvature_summary(&design, report);
    Ok(())
}

fn design_curvatures(synth: &SynthesizedCurve, s: f64) -> Result<Vec<f64>, JobError> {
    let app = synth.design_apparatus(&[s])?;
    Ok(app.samples()[0].curvatures.clone())
}

fn fit(subject: &Subject, config: &JobConfig, report: &mut Report) -> Result<(), JobError> {
    let app = subject.apparatus(config.grid)?;
    let Some(fit) = fit_classical_relation(&app, DEFAULT_FIT_THRESHOLD)? else {
        report.reject(format!(
            "no relation a k1 + b k2 = 1 with nonzero constants fits within {DEFAULT_FIT_THRESHOLD:e}"
        ));
        return Ok(());
    };
    report.set("a", fit.a);
    report.set("b", fit.b);
    report.set("fit_residual", fit.residual);
    let (mate, normal_residual) = parallel_mate(&subject.curve, fit.a)?;
    report.set("normal_line_residual", normal_residual);
    report.table("mate", point_table(&mate));
    Ok(())
}

fn point_table(c: &CurveSpec) -> CsvTable {
    let table = c.table().expect("sampled curve");
    let mut header = vec!["s".to_string()];
    header.extend((0..table.dimension()).map(|i| format!("x{i}")));
    let mut out = CsvTable::new(header);
    for (t, x) in table.params().iter().zip(table.points()) {
        let mut row = vec![*t];
        row.extend(x.iter().copied());
        out.push(row);
    }
    out
}

fn scan(subject: &Subject, config: &JobConfig, input: &InputFile, report: &mut Report) -> Result<(), JobError> {
    let app = subject.apparatus(config.grid)?;
    let alphas = input.scan.alphas.clone().unwrap_or_else(default_alphas);
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(CliError::Input("[scan] alphas must be finite".into()).into());
    }
    let entries = classical_obstruction_scan(&app, &alphas)?;
    let mut table = CsvTable::new(
        ["alpha", "obstruction", "feasible", "min_phi_prime", "cosh_theta", "sinh_theta"]
            .map(String::from)
            .to_vec(),
    );
    let mut min_nonzero = f64::INFINITY;
    for e in &entries {
        let (c, s) = e.theta.map_or((f64::NAN, f64::NAN), |t| (t.c, t.s));
        table.push(vec![e.alpha, e.obstruction, f64::from(u8::from(e.feasible)), e.min_phi_prime, c, s]);
        if e.alpha == 0.0 {
            report.set("obstruction_at_zero", e.obstruction);
        } else {
            min_nonzero = min_nonzero.min(e.obstruction);
        }
    }
    report.set("alphas", entries.len());
    report.set("min_obstruction_nonzero_alpha", min_nonzero);
    report.table("scan", table);
    Ok(())
}

fn certificate_values(cert: &BertrandCertificate, report: &mut Report) {
    report.set("alpha", cert.alpha);
    report.set("beta", cert.beta);
    report.set("gamma", cert.gamma);
    report.set("delta", cert.delta);
    report.set("epsilon", cert.epsilon);
    report.set("family_flag", cert.family_flag);
    report.set("residual_i", cert.residual_i);
    report.set("residual_ii", cert.residual_ii);
    report.set("residual_iii", cert.residual_iii);
    report.set("residual_iv", cert.residual_iv);
    report.set("iv_value", cert.iv_value);
    report.set("sqrt_min", cert.sqrt_min);
    report.set("accepted", cert.is_accepted());
    if let Some(condition) = cert.rejected_condition() {
        report.set("rejected_condition", condition.as_str());
    }
}

fn mate(subject: &Subject, app: &FrenetApparatus, cert: &BertrandCertificate, report: &mut Report) -> Result<(), JobError> {
    let mate = construct_mate(&subject.curve, cert)?;
    let closed = mate_apparatus_closed_form(app, cert)?;
    let mut table = CsvTable::new(
        ["s", "phi_prime", "kbar1", "kbar2", "kbar3", "rot_c", "rot_s"]
            .map(String::from)
            .to_vec(),
    );
    for i in 0..closed.len() {
        table.push(vec![
            closed.s[i],
            closed.phi_prime[i],
            closed.kbar1[i],
            closed.kbar2[i],
            closed.kbar3[i],
            closed.rot_c[i],
            closed.rot_s[i],
        ]);
    }
    let mate_length = FrenetEngine::new(&mate)?.arclength().total();
    report.set("mate_arc_length", mate_length);
    report.set("rot_constancy", closed.rot_constancy());
    report.set("rot_hyperbola_residual", closed.rot_hyperbola_residual());
    report.set("q_gamma_p_residual", closed.trace.q_gamma_p_residual(cert.gamma));
    report.set("b_gamma_a_residual", closed.trace.b_gamma_a_residual(cert.gamma));
    report.table("mate", point_table(&mate));
    report.table("mate_apparatus", table);
    Ok(())
}

fn verify(subject: &Subject, cert: &BertrandCertificate, report: &mut Report) -> Result<(), JobError> {
    let mate = construct_mate(&subject.curve, cert)?;
    let v = verify_mate(&subject.curve, &mate, cert, Correspondence::FromCertificate)?;
    for (name, value) in v.entries() {
        report.set(name, value);
    }
    report.set("compared_points", v.compared_points);
    report.set("passes", v.passes());
    if !v.passes() {
        report.reject("mate apparatus deviates from the predictions beyond tolerance".into());
    }
    Ok(())
}
