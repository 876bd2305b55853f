use crate::curve_dsl::Expr;
use crate::pseudo_linalg::{CausalCharacter, SemiMetric, Vector};

use super::sampled::SampleTable;
use super::FrenetError;

/// Closed parameter interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self, FrenetError> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(FrenetError::InvalidDomain { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    /// `n` evenly spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        linspace(self.start, self.end, n)
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveRepr {
    Analytic(Vec<Expr>),
    Sampled(SampleTable),
}

/// A parametric curve in a semi-Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    metric: SemiMetric,
    repr: CurveRepr,
    domain: Interval,
    unit_speed: bool,
}

impl CurveSpec {
    pub fn analytic(metric: SemiMetric, components: Vec<Expr>, domain: Interval) -> Result<Self, FrenetError> {
        if components.len() != metric.dimension() {
            return Err(FrenetError::DimensionMismatch {
                expected: metric.dimension(),
                found: components.len(),
            });
        }
        Ok(Self {
            metric,
            repr: CurveRepr::Analytic(components),
            domain,
            unit_speed: false,
        })
    }

    pub fn sampled(metric: SemiMetric, table: SampleTable) -> Result<Self, FrenetError> {
        if table.dimension() != metric.dimension() {
            return Err(FrenetError::DimensionMismatch {
                expected: metric.dimension(),
                found: table.dimension(),
            });
        }
        let domain = Interval::new(table.first(), table.last())?;
        Ok(Self {
            metric,
            repr: CurveRepr::Sampled(table),
            domain,
            unit_speed: false,
        })
    }

    /// Declares the parameter to be arc length, so no quadrature is needed.
    pub fn with_unit_speed(mut self, unit_speed: bool) -> Self {
        self.unit_speed = unit_speed;
        self
    }

    pub fn metric(&self) -> SemiMetric {
        self.metric
    }

    pub fn repr(&self) -> &CurveRepr {
        &self.repr
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_unit_speed(&self) -> bool {
        self.unit_speed
    }

    pub fn table(&self) -> Option<&SampleTable> {
        match &self.repr {
            CurveRepr::Sampled(t) => Some(t),
            CurveRepr::Analytic(_) => None,
        }
    }

    pub fn components(&self) -> Option<&[Expr]> {
        match &self.repr {
            CurveRepr::Analytic(c) => Some(c),
            CurveRepr::Sampled(_) => None,
        }
    }

    /// Parameter range where all derivatives through order four can be evaluated.
    pub fn resolvable_interval(&self) -> (f64, f64) {
        match &self.repr {
            CurveRepr::Analytic(_) => (self.domain.start, self.domain.end),
            CurveRepr::Sampled(t) => t.resolvable_interval(),
        }
    }

    pub fn point(&self, t: f64) -> Result<Vector, FrenetError> {
        self.check_domain(t)?;
        match &self.repr {
            CurveRepr::Analytic(cs) => {
                let v: Result<Vec<f64>, _> = cs.iter().map(|e| e.eval(t)).collect();
                Ok(Vector::from_vec(v?))
            }
            CurveRepr::Sampled(table) => Ok(table.point_at(t)),
        }
    }

    /// `c(t), c'(t), ..., c^(order)(t)` for `order <= 4`.
    pub fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector>, FrenetError> {
        assert!(order <= 4, "derivatives are available through order 4");
        self.check_domain(t)?;
        match &self.repr {
            CurveRepr::Analytic(cs) => {
                let n = cs.len();
                let mut out = vec![Vector::zeros(n); order + 1];
                for (i, e) in cs.iter().enumerate() {
                    let d = e.eval_jet(t)?.derivatives();
                    for (k, slot) in out.iter_mut().enumerate() {
                        slot[i] = d[k];
                    }
                }
                Ok(out)
            }
            CurveRepr::Sampled(table) => table.derivatives(t, order),
        }
    }

    /// Velocity at `t`, using short stencils for tables so that edges are covered.
    pub(crate) fn velocity(&self, t: f64) -> Result<Vector, FrenetError> {
        match &self.repr {
            CurveRepr::Analytic(_) => Ok(self.derivatives(t, 1)?.swap_remove(1)),
            CurveRepr::Sampled(table) => {
                self.check_domain(t)?;
                let (lo, hi) = table.resolvable_interval();
                if t >= lo && t <= hi {
                    Ok(table.derivatives(t, 1)?.swap_remove(1))
                } else {
                    let v = table.node_velocities();
                    Ok(table.interpolate(t, |i| v[i].clone()))
                }
            }
        }
    }

    fn check_domain(&self, t: f64) -> Result<(), FrenetError> {
        if self.domain.contains(t) {
            Ok(())
        } else {
            Err(FrenetError::OutOfRange {
                param: t,
                lo: self.domain.start,
                hi: self.domain.end,
            })
        }
    }
}

/// Speed `sqrt(|g(c', c')|)` and causal character of `c'(t0)`.
pub fn speed_and_character(c: &CurveSpec, t0: f64) -> Result<(f64, CausalCharacter), FrenetError> {
    let v = c.velocity(t0)?;
    let m = c.metric();
    Ok((m.g(&v, &v).abs().sqrt(), m.causal_character(&v)))
}
