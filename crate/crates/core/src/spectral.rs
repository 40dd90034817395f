//! Finite spectral truncation of the state space and the diagonal operator
//! calculus on it: the drift generator A, its semigroup S(t), the resolvent
//! R(n,A) and the Yosida operators R_n = nR(n,A), A_n = AR_n.
//!
//! Everything here is exact: each operator acts coordinate-wise in the
//! eigenbasis, so no matrix exponentials or linear solves are involved.

use crate::error::{Error, Result};

/// Finite eigenbasis truncation of the state space.
///
/// `eigenvalues[k]` is the eigenvalue of A on the k-th basis vector, and
/// `alpha` is the declared growth bound of the semigroup, so that
/// `‖S(t)‖ ≤ e^{alpha·t}` holds on the truncation. `alpha` is stored rather
/// than derived so a user may declare a looser bound; construction enforces
/// `mu_k ≤ alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSpace {
    dim: usize,
    eigenvalues: Vec<f64>,
    alpha: f64,
}

impl SpectralSpace {
    pub fn new(eigenvalues: Vec<f64>, alpha: f64) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidArgument("eigenvalue list is empty".into()));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )));
        }
        for (k, &mu) in eigenvalues.iter().enumerate() {
            if !mu.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalue {k} is not finite"
                )));
            }
            if mu > alpha {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalue {k} = {mu} exceeds the growth bound alpha = {alpha}"
                )));
            }
        }
        Ok(Self {
            dim: eigenvalues.len(),
            eigenvalues,
            alpha,
        })
    }

    /// Dirichlet Laplacian on (0,1) truncated to `dim` modes: mu_k = -k²π².
    pub fn heat_dirichlet(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dim must be >= 1".into()));
        }
        let eigenvalues = (1..=dim)
            .map(|k| -((k * k) as f64) * std::f64::consts::PI.powi(2))
            .collect();
        Self::new(eigenvalues, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn check_dim(&self, x: &HVec) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "state vector",
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// S(t)x, coordinate-wise e^{mu_k t} x_k.
    pub fn semigroup_apply(&self, t: f64, x: &HVec) -> Result<HVec> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "semigroup time must be >= 0, got {t}"
            )));
        }
        self.check_dim(x)?;
        Ok(HVec::from(
            self.eigenvalues
                .iter()
                .zip(x.coeffs())
                .map(|(&mu, &xk)| (mu * t).exp() * xk)
                .collect::<Vec<_>>(),
        ))
    }

    /// Coordinate factors e^{mu_k dt}, precomputed for repeated stepping.
    pub fn semigroup_factors(&self, dt: f64) -> Vec<f64> {
        self.eigenvalues.iter().map(|&mu| (mu * dt).exp()).collect()
    }

    /// R(n,A)x = (nI - A)^{-1} x, coordinate-wise x_k / (n - mu_k).
    pub fn resolvent_apply(&self, idx: &YosidaIndex, x: &HVec) -> Result<HVec> {
        self.check_dim(x)?;
        let n = idx.n();
        Ok(HVec::from(
            self.eigenvalues
                .iter()
                .zip(x.coeffs())
                .map(|(&mu, &xk)| xk / (n - mu))
                .collect::<Vec<_>>(),
        ))
    }

    /// R_n x = nR(n,A)x, coordinate-wise n x_k / (n - mu_k).
    pub fn yosida_r(&self, idx: &YosidaIndex, x: &HVec) -> Result<HVec> {
        self.check_dim(x)?;
        let n = idx.n();
        Ok(HVec::from(
            self.eigenvalues
                .iter()
                .zip(x.coeffs())
                .map(|(&mu, &xk)| n * xk / (n - mu))
                .collect::<Vec<_>>(),
        ))
    }

    /// A_n x = A R_n x, coordinate-wise n mu_k x_k / (n - mu_k).
    pub fn yosida_a(&self, idx: &YosidaIndex, x: &HVec) -> Result<HVec> {
        self.check_dim(x)?;
        let n = idx.n();
        Ok(HVec::from(
            self.eigenvalues
                .iter()
                .zip(x.coeffs())
                .map(|(&mu, &xk)| n * mu * xk / (n - mu))
                .collect::<Vec<_>>(),
        ))
    }

    /// Ax, coordinate-wise mu_k x_k. Every truncation vector lies in D(A).
    pub fn apply_a(&self, x: &HVec) -> Result<HVec> {
        self.check_dim(x)?;
        Ok(HVec::from(
            self.eigenvalues
                .iter()
                .zip(x.coeffs())
                .map(|(&mu, &xk)| mu * xk)
                .collect::<Vec<_>>(),
        ))
    }
}

/// Element of the truncated state space, coordinates in the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct HVec(Vec<f64>);

impl HVec {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// Unit basis vector e_index (zero-based) scaled by `scale`.
    pub fn unit(dim: usize, index: usize, scale: f64) -> Self {
        let mut v = vec![0.0; dim];
        v[index] = scale;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn dot(&self, other: &HVec) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: f64) -> HVec {
        Self(self.0.iter().map(|a| c * a).collect())
    }

    pub fn add(&self, other: &HVec) -> HVec {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &HVec) -> HVec {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// self += c · other, in place.
    pub fn axpy(&mut self, c: f64, other: &HVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }
}

impl From<Vec<f64>> for HVec {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Index n of the Yosida operators. Requires n > alpha so that (nI - A) is
/// invertible on the truncation; real n is accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YosidaIndex(f64);

impl YosidaIndex {
    pub fn new(n: f64, space: &SpectralSpace) -> Result<Self> {
        if !n.is_finite() || n <= space.alpha() {
            return Err(Error::YosidaIndexOutOfRange {
                n,
                alpha: space.alpha(),
            });
        }
        Ok(Self(n))
    }

    pub fn n(&self) -> f64 {
        self.0
    }
}
