use crate::curve_dsl::Expr;
use crate::pseudo_linalg::{CausalCharacter, SemiMetric, Vector};

use super::curve::{linspace, CurveRepr, CurveSpec};
use super::sampled::{lagrange_weights, SampleTable};
use super::FrenetError;

/// Points at which an analytic curve is checked to be timelike.
const CAUSAL_CHECK_POINTS: usize = 2049;

const PANELS: usize = 64;

/// Arc-length target spacing of [`arclength_reparam`] output.
const REPARAM_SPACING: f64 = 1e-3;

const REPARAM_MIN_SAMPLES: usize = 2001;

/// Monotone map between the curve parameter and arc length measured from the
/// start of the domain.
#[derive(Debug, Clone)]
pub struct ArcLength {
    start: f64,
    end: f64,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Identity,
    Quadrature {
        metric: SemiMetric,
        components: Vec<Expr>,
        knots: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Nodes {
        params: Vec<f64>,
        speeds: Vec<f64>,
        cumulative: Vec<f64>,
    },
}

impl ArcLength {
    /// Checks that `c` is timelike and builds the map.
    pub fn new(c: &CurveSpec) -> Result<Self, FrenetError> {
        let dom = c.domain();
        let metric = c.metric();
        let kind = match c.repr() {
            CurveRepr::Analytic(components) => {
                for t in dom.linspace(CAUSAL_CHECK_POINTS) {
                    let v = c.velocity(t)?;
                    check_timelike(metric, &v, t)?;
                }
                if c.is_unit_speed() {
                    Kind::Identity
                } else {
                    let knots = dom.linspace(PANELS + 1);
                    let mut cumulative = vec![0.0];
                    for w in knots.windows(2) {
                        let piece = integrate(|t| analytic_speed(metric, components, t), w[0], w[1])?;
                        cumulative.push(cumulative.last().copied().unwrap_or(0.0) + piece);
                    }
                    Kind::Quadrature {
                        metric,
                        components: components.clone(),
                        knots,
                        cumulative,
                    }
                }
            }
            CurveRepr::Sampled(table) => {
                let velocities = table.node_velocities();
                for (t, v) in table.params().iter().zip(&velocities) {
                    check_timelike(metric, v, *t)?;
                }
                if c.is_unit_speed() {
                    Kind::Identity
                } else {
                    let speeds: Vec<f64> = velocities.iter().map(|v| metric.g(v, v).abs().sqrt()).collect();
                    let cumulative = node_cumulative(table, &speeds);
                    Kind::Nodes {
                        params: table.params().to_vec(),
                        speeds,
                        cumulative,
                    }
                }
            }
        };
        Ok(Self {
            start: dom.start,
            end: dom.end,
            kind,
        })
    }

    /// Total arc length of the domain.
    pub fn total(&self) -> f64 {
        match &self.kind {
            Kind::Identity => self.end - self.start,
            Kind::Quadrature { cumulative, .. } | Kind::Nodes { cumulative, .. } => {
                *cumulative.last().expect("non-empty")
            }
        }
    }

    /// Arc length from the domain start to parameter `t`.
    pub fn s_of(&self, t: f64) -> Result<f64, FrenetError> {
        if !(t >= self.start && t <= self.end) {
            return Err(FrenetError::OutOfRange {
                param: t,
                lo: self.start,
                hi: self.end,
            });
        }
        match &self.kind {
            Kind::Identity => Ok(t - self.start),
            Kind::Quadrature {
                metric,
                components,
                knots,
                cumulative,
            } => {
                let i = segment(knots, t);
                let piece = integrate(|x| analytic_speed(*metric, components, x), knots[i], t)?;
                Ok(cumulative[i] + piece)
            }
            Kind::Nodes {
                params,
                speeds,
                cumulative,
            } => {
                let i = segment(params, t);
                Ok(cumulative[i] + cubic_integral(params, speeds, i, params[i], t))
            }
        }
    }

    /// Speed `ds/dt` at parameter `t`.
    pub fn speed(&self, t: f64) -> Result<f64, FrenetError> {
        match &self.kind {
            Kind::Identity => Ok(1.0),
            Kind::Quadrature { metric, components, .. } => analytic_speed(*metric, components, t),
            Kind::Nodes { params, speeds, .. } => {
                let i = segment(params, t);
                let start = local_start(params.len(), i);
                let w = lagrange_weights(t, &params[start..start + 4]);
                Ok(w.iter().zip(&speeds[start..start + 4]).map(|(a, b)| a * b).sum())
            }
        }
    }

    /// Parameter at which the arc length equals `s`.
    pub fn t_of(&self, s: f64) -> Result<f64, FrenetError> {
        let total = self.total();
        let slack = 1e-12 * total.max(1.0);
        if !(s >= -slack && s <= total + slack) {
            return Err(FrenetError::ArcLengthOutOfRange { s, length: total });
        }
        let s = s.clamp(0.0, total);
        let (knots, cumulative): (&[f64], &[f64]) = match &self.kind {
            Kind::Identity => return Ok((self.start + s).min(self.end)),
            Kind::Quadrature { knots, cumulative, .. } => (knots, cumulative),
            Kind::Nodes { params, cumulative, .. } => (params, cumulative),
        };
        let i = cumulative.partition_point(|&c| c <= s).saturating_sub(1).min(knots.len() - 2);
        let (mut lo, mut hi) = (knots[i], knots[i + 1]);
        let span = cumulative[i + 1] - cumulative[i];
        let mut t = if span > 0.0 {
            lo + (hi - lo) * (s - cumulative[i]) / span
        } else {
            lo
        };
        for _ in 0..100 {
            let f = self.s_of(t)? - s;
            if f.abs() <= 1e-15 * s.abs().max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let v = self.speed(t)?;
            let newton = t - f / v;
            t = if v > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
                break;
            }
        }
        Ok(t)
    }
}

fn check_timelike(metric: SemiMetric, v: &Vector, t: f64) -> Result<(), FrenetError> {
    match metric.causal_character(v) {
        CausalCharacter::Timelike => Ok(()),
        character => Err(FrenetError::NotTimelike { param: t, character }),
    }
}

fn analytic_speed(metric: SemiMetric, components: &[Expr], t: f64) -> Result<f64, FrenetError> {
    let mut v = Vector::zeros(components.len());
    for (i, e) in components.iter().enumerate() {
        v[i] = e.eval_jet(t)?.derivative(1);
    }
    Ok(metric.g(&v, &v).abs().sqrt())
}

fn segment(knots: &[f64], t: f64) -> usize {
    knots.partition_point(|&k| k <= t).saturating_sub(1).min(knots.len() - 2)
}

fn local_start(n: usize, i: usize) -> usize {
    i.saturating_sub(1).min(n - 4)
}

/// Integral from `a` to `b` (both in segment `i`) of the local cubic through the speeds.
fn cubic_integral(params: &[f64], speeds: &[f64], i: usize, a: f64, b: f64) -> f64 {
    let start = local_start(params.len(), i);
    let xs = &params[start..start + 4];
    let ys = &speeds[start..start + 4];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let g = 1.0 / 3f64.sqrt();
    [mid - half * g, mid + half * g]
        .iter()
        .map(|&x| {
            let w = lagrange_weights(x, xs);
            w.iter().zip(ys).map(|(p, q)| p * q).sum::<f64>()
        })
        .sum::<f64>()
        * half
}

fn node_cumulative(table: &SampleTable, speeds: &[f64]) -> Vec<f64> {
    let params = table.params();
    let mut cumulative = Vec::with_capacity(params.len());
    cumulative.push(0.0);
    for i in 0..params.len() - 1 {
        let piece = cubic_integral(params, speeds, i, params[i], params[i + 1]);
        cumulative.push(cumulative[i] + piece);
    }
    cumulative
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel: `(kronrod, gauss)`.
fn gk15(f: &impl Fn(f64) -> Result<f64, FrenetError>, a: f64, b: f64) -> Result<(f64, f64), FrenetError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x)? + f(c + x)?;
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    Ok((k * h, g * h))
}

/// Adaptive Gauss–Kronrod quadrature.
pub(crate) fn integrate(f: impl Fn(f64) -> Result<f64, FrenetError>, a: f64, b: f64) -> Result<f64, FrenetError> {
    fn rec(
        f: &impl Fn(f64) -> Result<f64, FrenetError>,
        a: f64,
        b: f64,
        depth: u32,
    ) -> Result<f64, FrenetError> {
        let (k, g) = gk15(f, a, b)?;
        if depth == 0 || (k - g).abs() <= 1e-14 * k.abs().max(1e-3) {
            return Ok(k);
        }
        let m = 0.5 * (a + b);
        Ok(rec(f, a, m, depth - 1)? + rec(f, m, b, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    rec(&f, a, b, 30)
}

/// Unit-speed resampling of `c` with the default sample count.
pub fn arclength_reparam(c: &CurveSpec) -> Result<CurveSpec, FrenetError> {
    let total = ArcLength::new(c)?.total();
    let samples = ((total / REPARAM_SPACING).ceil() as usize + 1).max(REPARAM_MIN_SAMPLES);
    arclength_reparam_with(c, samples)
}

/// Unit-speed resampling of `c` at `samples` points evenly spaced in arc length.
pub fn arclength_reparam_with(c: &CurveSpec, samples: usize) -> Result<CurveSpec, FrenetError> {
    let arc = ArcLength::new(c)?;
    let s_values = linspace(0.0, arc.total(), samples);
    let mut points = Vec::with_capacity(samples);
    for &s in &s_values {
        let t = arc.t_of(s)?;
        points.push(c.point(t)?);
    }
    let table = SampleTable::new(s_values, points)?;
    Ok(CurveSpec::sampled(c.metric(), table)?.with_unit_speed(true))
}
