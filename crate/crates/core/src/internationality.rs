//! Cobb-Douglas internationality score `y = A · Π xᵢ^αᵢ`.
//!
//! Inputs are the journal indicators (x1..x4 by default, any n ≥ 1 works).
//! Positive inputs are evaluated in the log domain. A zero input with a
//! positive elasticity zeroes the score; a zero input with zero elasticity
//! contributes a factor of 1.

use crate::indicators::JournalIndicators;
use serde::Serialize;
use thiserror::Error;

/// Tolerance on `Σαᵢ = 1` for simplex-constrained elasticities.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("dimension mismatch: {inputs} inputs, {elasticities} elasticities")]
    DimensionMismatch { inputs: usize, elasticities: usize },
    #[error("input x{index} = {value} is negative or not finite")]
    NegativeInput { index: usize, value: f64 },
    #[error("elasticity α{index} = {value} is negative or not finite")]
    NegativeElasticity { index: usize, value: f64 },
    #[error("scale factor A = {0} must be positive and finite")]
    NonPositiveScale(f64),
    #[error("input x{0} is zero")]
    ZeroInput(usize),
    #[error("at least one input is required")]
    Empty,
    #[error("elasticities sum to {0}, expected 1")]
    NotOnSimplex(f64),
}

pub type Result<T, E = ScoreError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct InputVector(Vec<f64>);

impl InputVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(ScoreError::Empty);
        }
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(ScoreError::NegativeInput {
                index: index + 1,
                value,
            });
        }
        Ok(InputVector(x))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ElasticityVector(Vec<f64>);

impl ElasticityVector {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(ScoreError::Empty);
        }
        if let Some((index, &value)) = alpha
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(ScoreError::NegativeElasticity {
                index: index + 1,
                value,
            });
        }
        Ok(ElasticityVector(alpha))
    }

    /// Elasticities constrained to the probability simplex.
    pub fn simplex(alpha: Vec<f64>) -> Result<Self> {
        let v = Self::new(alpha)?;
        let sum = v.sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(ScoreError::NotOnSimplex(sum));
        }
        Ok(v)
    }

    /// Equal weights `1/n`.
    pub fn uniform(n: usize) -> Self {
        ElasticityVector(vec![1.0 / n as f64; n])
    }

    /// The simplex vertex `e_k`.
    pub fn vertex(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        ElasticityVector(v)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreParams {
    #[serde(rename = "A")]
    scale: f64,
}

impl ScoreParams {
    pub fn new(scale: f64) -> Result<Self> {
        if scale.is_finite() && scale > 0.0 {
            Ok(ScoreParams { scale })
        } else {
            Err(ScoreError::NonPositiveScale(scale))
        }
    }

    pub fn scale(self) -> f64 {
        self.scale
    }
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams { scale: 1.0 }
    }
}

fn check_dims(x: &InputVector, alpha: &ElasticityVector) -> Result<()> {
    if x.len() != alpha.len() {
        return Err(ScoreError::DimensionMismatch {
            inputs: x.len(),
            elasticities: alpha.len(),
        });
    }
    Ok(())
}

pub fn score(x: &InputVector, alpha: &ElasticityVector, params: ScoreParams) -> Result<f64> {
    check_dims(x, alpha)?;
    let mut log_sum = 0.0;
    for (&xi, &ai) in x.as_slice().iter().zip(alpha.as_slice()) {
        if ai == 0.0 {
            continue;
        }
        if xi == 0.0 {
            return Ok(0.0);
        }
        log_sum += ai * xi.ln();
    }
    Ok(params.scale() * log_sum.exp())
}

/// `∂y/∂xᵢ = αᵢ · y / xᵢ`; requires every input strictly positive.
pub fn gradient(x: &InputVector, alpha: &ElasticityVector, params: ScoreParams) -> Result<Vec<f64>> {
    check_dims(x, alpha)?;
    if let Some(i) = x.as_slice().iter().position(|&v| v == 0.0) {
        return Err(ScoreError::ZeroInput(i + 1));
    }
    let y = score(x, alpha, params)?;
    Ok(x.as_slice()
        .iter()
        .zip(alpha.as_slice())
        .map(|(&xi, &ai)| ai * y / xi)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub alpha: ElasticityVector,
    pub score: f64,
}

/// Maximizes the score over elasticities on the probability simplex.
///
/// `ln y = ln A + Σ αᵢ ln xᵢ` is linear in α, so the maximum sits on the
/// vertex of the largest input. Ties go to the lowest index.
pub fn optimal_elasticities(x: &InputVector, params: ScoreParams) -> Result<Optimum> {
    if let Some(i) = x.as_slice().iter().position(|&v| v == 0.0) {
        return Err(ScoreError::ZeroInput(i + 1));
    }
    let best = x
        .as_slice()
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > x.as_slice()[best] { i } else { best });
    let alpha = ElasticityVector::vertex(x.len(), best);
    let score = score(x, &alpha, params)?;
    Ok(Optimum { alpha, score })
}

pub fn score_journal(
    ind: &JournalIndicators,
    alpha: &ElasticityVector,
    params: ScoreParams,
) -> Result<f64> {
    score(&ind.input_vector()?, alpha, params)
}
