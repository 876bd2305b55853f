//! Vector algebra in flat semi-Euclidean space `E^n_ν`.
//!
//! The metric is diagonal with the first `ν` axes carrying `-1` and the
//! remaining axes `+1`. Everything here is a pure function of its inputs.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Coordinate vector. Dimension is a runtime property of the metric.
pub type Vector = DVector<f64>;

/// Relative tolerance under which `g(v, v)` counts as zero when classifying.
pub const NULL_TOLERANCE: f64 = 1e-12;

/// Relative tolerance under which a Gram–Schmidt residual is treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid signature: index {index} exceeds dimension {dimension}")]
    InvalidSignature { dimension: usize, index: usize },
    #[error("degenerate flag: residual vector {index} is null")]
    DegenerateFlag { index: usize },
    #[error("rank deficient: vector {index} lies in the span of its predecessors")]
    RankDeficient { index: usize },
    #[error("too many vectors: {count} in dimension {dimension}")]
    TooManyVectors { count: usize, dimension: usize },
}

/// Signature descriptor of `E^dimension_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemiMetric {
    dimension: usize,
    index: usize,
}

impl SemiMetric {
    pub fn new(dimension: usize, index: usize) -> Result<Self, LinalgError> {
        if dimension == 0 || index > dimension {
            return Err(LinalgError::InvalidSignature { dimension, index });
        }
        Ok(Self { dimension, index })
    }

    /// Minkowski plane `E^2_1`.
    pub const fn minkowski_plane() -> Self {
        Self { dimension: 2, index: 1 }
    }

    /// Minkowski space `E^3_1`.
    pub const fn minkowski_space() -> Self {
        Self { dimension: 3, index: 1 }
    }

    /// Neutral space `E^4_2` with `g = -dx1² - dx2² + dx3² + dx4²`.
    pub const fn neutral4() -> Self {
        Self { dimension: 4, index: 2 }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// `g(e_i, e_i)` for the i-th coordinate axis.
    pub fn sign(&self, axis: usize) -> f64 {
        if axis < self.index {
            -1.0
        } else {
            1.0
        }
    }

    pub fn signature(&self) -> Vec<f64> {
        (0..self.dimension).map(|i| self.sign(i)).collect()
    }

    fn check(&self, v: &Vector) -> Result<(), LinalgError> {
        if v.len() == self.dimension {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                expected: self.dimension,
                found: v.len(),
            })
        }
    }

    /// The bilinear form, with dimension checks.
    pub fn inner(&self, v: &Vector, w: &Vector) -> Result<f64, LinalgError> {
        self.check(v)?;
        self.check(w)?;
        Ok(self.g(v, w))
    }

    /// The bilinear form without dimension checks.
    ///
    /// Panics if either vector is shorter than the metric dimension.
    pub fn g(&self, v: &Vector, w: &Vector) -> f64 {
        debug_assert_eq!(v.len(), self.dimension);
        debug_assert_eq!(w.len(), self.dimension);
        let mut acc = 0.0;
        for i in 0..self.dimension {
            acc += self.sign(i) * v[i] * w[i];
        }
        acc
    }

    /// `sqrt(|g(v, v)|)`.
    pub fn norm(&self, v: &Vector) -> f64 {
        self.g(v, v).abs().sqrt()
    }

    /// Index lowering: the vector `G v`, so that `g(v, w) = (G v) · w`.
    pub fn lower(&self, v: &Vector) -> Vector {
        Vector::from_fn(self.dimension, |i, _| self.sign(i) * v[i])
    }

    pub fn causal_character(&self, v: &Vector) -> CausalCharacter {
        classify(self.g(v, v), v.norm_squared(), NULL_TOLERANCE)
    }

    pub fn causal_character_checked(&self, v: &Vector) -> Result<CausalCharacter, LinalgError> {
        self.check(v)?;
        Ok(self.causal_character(v))
    }
}

impl fmt::Display for SemiMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}_{}", self.index, self.dimension)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalCharacter {
    Timelike,
    Spacelike,
    Null,
}

impl CausalCharacter {
    pub fn as_str(&self) -> &'static str {
        match self {
            CausalCharacter::Timelike => "timelike",
            CausalCharacter::Spacelike => "spacelike",
            CausalCharacter::Null => "null",
        }
    }
}

impl fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classify from `g(v, v)` and the squared Euclidean norm of `v`.
pub(crate) fn classify(gvv: f64, euclid_sq: f64, rel_tol: f64) -> CausalCharacter {
    if euclid_sq == 0.0 {
        // The zero vector is spacelike by convention.
        return CausalCharacter::Spacelike;
    }
    if gvv.abs() <= rel_tol * euclid_sq {
        CausalCharacter::Null
    } else if gvv < 0.0 {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Spacelike
    }
}

/// A list of pseudo-orthonormal vectors together with their norms `g(e_i, e_i) = ±1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoFrame {
    vectors: Vec<Vector>,
    metric: SemiMetric,
    signs: Vec<f64>,
    orientation_flipped: bool,
}

impl PseudoFrame {
    /// Wraps vectors that are expected (not checked) to be pseudo-orthonormal.
    pub fn from_parts(metric: SemiMetric, vectors: Vec<Vector>, signs: Vec<f64>) -> Self {
        assert_eq!(vectors.len(), signs.len());
        Self {
            vectors,
            metric,
            signs,
            orientation_flipped: false,
        }
    }

    /// The coordinate basis of `metric`.
    pub fn standard(metric: SemiMetric) -> Self {
        let n = metric.dimension();
        let vectors = (0..n)
            .map(|i| Vector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Self::from_parts(metric, vectors, metric.signature())
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &Vector {
        &self.vectors[i]
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn metric(&self) -> SemiMetric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.vectors.len() == self.metric.dimension()
    }

    /// True when [`PseudoFrame::orient_positive`] had to flip the last vector.
    pub fn orientation_flipped(&self) -> bool {
        self.orientation_flipped
    }

    pub fn into_vectors(self) -> Vec<Vector> {
        self.vectors
    }

    /// Largest entry of `|g(e_i, e_j) - δ_ij sign_i|`.
    pub fn gram_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, ei) in self.vectors.iter().enumerate() {
            for (j, ej) in self.vectors.iter().enumerate() {
                let target = if i == j { self.signs[i] } else { 0.0 };
                worst = worst.max((self.metric.g(ei, ej) - target).abs());
            }
        }
        worst
    }

    /// Determinant of the matrix whose rows are the frame vectors.
    ///
    /// Only meaningful for complete frames; returns `None` otherwise.
    pub fn determinant(&self) -> Option<f64> {
        if !self.is_complete() {
            return None;
        }
        Some(determinant(&self.vectors))
    }

    /// Flips the last vector when the determinant is negative.
    pub fn orient_positive(&mut self) {
        if let Some(det) = self.determinant() {
            if det < 0.0 {
                if let Some(last) = self.vectors.last_mut() {
                    *last = -last.clone();
                }
                self.orientation_flipped = !self.orientation_flipped;
            }
        }
    }

    /// Coordinates of `v` in this frame: `v = Σ c_i e_i` with `c_i = g(v, e_i) / sign_i`.
    pub fn coordinates(&self, v: &Vector) -> Vec<f64> {
        self.vectors
            .iter()
            .zip(&self.signs)
            .map(|(e, s)| self.metric.g(v, e) / s)
            .collect()
    }
}

/// Determinant of the square matrix with the given rows.
pub fn determinant(rows: &[Vector]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.determinant()
}

/// Tolerances for [`gram_schmidt_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramSchmidtTolerances {
    /// `|g(w, w)| <= null * |w|²` marks a null residual.
    pub null: f64,
    /// `|w| <= rank * |v|` marks a dependent input.
    pub rank: f64,
}

impl Default for GramSchmidtTolerances {
    fn default() -> Self {
        Self {
            null: NULL_TOLERANCE,
            rank: RANK_TOLERANCE,
        }
    }
}

/// Flag-preserving orthonormalization under an indefinite metric.
///
/// The i-th output lies in the span of the first i+1 inputs and has a
/// positive component along its own input.
pub fn indefinite_gram_schmidt(vs: &[Vector], m: SemiMetric) -> Result<PseudoFrame, LinalgError> {
    gram_schmidt_with(vs, m, GramSchmidtTolerances::default())
}

pub fn gram_schmidt_with(
    vs: &[Vector],
    m: SemiMetric,
    tol: GramSchmidtTolerances,
) -> Result<PseudoFrame, LinalgError> {
    if vs.len() > m.dimension() {
        return Err(LinalgError::TooManyVectors {
            count: vs.len(),
            dimension: m.dimension(),
        });
    }
    let mut vectors: Vec<Vector> = Vec::with_capacity(vs.len());
    let mut signs = Vec::with_capacity(vs.len());
    for (index, v) in vs.iter().enumerate() {
        m.check(v)?;
        let w = project_out(v, &vectors, &signs, m);
        let size = v.norm();
        let residual = w.norm();
        if residual <= tol.rank * size || residual == 0.0 {
            return Err(LinalgError::RankDeficient { index });
        }
        let gww = m.g(&w, &w);
        if gww.abs() <= tol.null * residual * residual {
            return Err(LinalgError::DegenerateFlag { index });
        }
        signs.push(gww.signum());
        vectors.push(w / gww.abs().sqrt());
    }
    Ok(PseudoFrame::from_parts(m, vectors, signs))
}

/// Removes the components along an orthonormal set, projecting twice.
pub(crate) fn project_out(v: &Vector, basis: &[Vector], signs: &[f64], m: SemiMetric) -> Vector {
    let mut w = v.clone();
    for _ in 0..2 {
        for (e, s) in basis.iter().zip(signs) {
            let c = m.g(&w, e) / s;
            w.axpy(-c, e, 1.0);
        }
    }
    w
}

/// A vector `g`-orthogonal to each of the `n - 1` given vectors in dimension `n`.
///
/// Built from the generalized cross product, lowered by the metric. Not normalized.
pub fn orthogonal_complement(vs: &[Vector], m: SemiMetric) -> Result<Vector, LinalgError> {
    let n = m.dimension();
    if vs.len() + 1 != n {
        return Err(LinalgError::TooManyVectors {
            count: vs.len(),
            dimension: n,
        });
    }
    for v in vs {
        m.check(v)?;
    }
    // cross_j = (-1)^(n-1+j) * minor with column j removed, so that
    // det[v_1; ...; v_{n-1}; cross] = |cross|² > 0.
    let mut cross = Vector::zeros(n);
    for j in 0..n {
        let minor = DMatrix::from_fn(n - 1, n - 1, |r, c| {
            let col = if c < j { c } else { c + 1 };
            vs[r][col]
        });
        let sign = if (n - 1 + j) % 2 == 0 { 1.0 } else { -1.0 };
        cross[j] = sign * minor.determinant();
    }
    Ok(m.lower(&cross))
}
