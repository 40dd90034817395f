//! Equation coefficients F, B, f from a small built-in catalog, with the
//! declared growth and Lipschitz constants and a sampling audit of both.
//!
//! The catalog covers linear maps and affine variants: everything the desk
//! scale scenarios need, nothing more. A general nonlinear coefficient DSL
//! is out of scope.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::noise::{LevyMeasureSpec, QWienerSpec};
use crate::spectral::HVec;

/// Drift map F: H -> H.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftSpec {
    Zero,
    /// F(x) = a ∘ x (coordinate-wise product).
    Linear { a: Vec<f64> },
    /// F(x) = a ∘ x + a0.
    Affine { a: Vec<f64>, a0: Vec<f64> },
}

/// Diffusion map B: H -> L(K, H), stored column-wise against the Q eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub enum DiffusionSpec {
    Zero,
    /// Column j of B(x) is b_j · x: every noise coordinate drives the whole state.
    StateScaled { b: Vec<f64> },
    /// Column j of B(x) is (d_j + b_j x_j) e_j: one noise coordinate per mode.
    /// Requires k_dim = dim.
    DiagonalAffine { b: Vec<f64>, d: Vec<f64> },
}

/// Jump coefficient f: (mark, x) -> H.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpSpec {
    Zero,
    /// f(v, x) = ⟨c, v⟩ · (x + shift). With shift = 0 this is the linear
    /// scalar-multiplier jump f(v, x) = ⟨c, v⟩ x.
    MarkDotState { c: Vec<f64>, shift: Vec<f64> },
}

/// The coefficient triple with its declared contract constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    dim: usize,
    k_dim: usize,
    mark_dim: usize,
    pub drift: DriftSpec,
    pub diffusion: DiffusionSpec,
    pub jump: JumpSpec,
    /// Declared linear-growth constant: lhs ≤ growth_l (1 + ‖x‖²).
    pub growth_l: f64,
    /// Declared Lipschitz constant: lhs ≤ lipschitz_k ‖x − y‖².
    pub lipschitz_k: f64,
}

impl CoefficientSet {
    pub fn new(
        dim: usize,
        k_dim: usize,
        mark_dim: usize,
        drift: DriftSpec,
        diffusion: DiffusionSpec,
        jump: JumpSpec,
        growth_l: f64,
        lipschitz_k: f64,
    ) -> Result<Self> {
        if growth_l <= 0.0 || lipschitz_k <= 0.0 {
            return Err(Error::InvalidArgument(
                "growth and Lipschitz constants must be positive".into(),
            ));
        }
        let check = |what: &'static str, len: usize, expected: usize| {
            if len != expected {
                Err(Error::DimensionMismatch {
                    what,
                    expected,
                    got: len,
                })
            } else {
                Ok(())
            }
        };
        match &drift {
            DriftSpec::Zero => {}
            DriftSpec::Linear { a } => check("drift coefficient a", a.len(), dim)?,
            DriftSpec::Affine { a, a0 } => {
                check("drift coefficient a", a.len(), dim)?;
                check("drift offset a0", a0.len(), dim)?;
            }
        }
        match &diffusion {
            DiffusionSpec::Zero => {}
            DiffusionSpec::StateScaled { b } => check("diffusion coefficient b", b.len(), k_dim)?,
            DiffusionSpec::DiagonalAffine { b, d } => {
                check("diffusion coefficient b", b.len(), k_dim)?;
                check("diffusion offset d", d.len(), k_dim)?;
                check("diagonal diffusion noise dim", k_dim, dim)?;
            }
        }
        match &jump {
            JumpSpec::Zero => {}
            JumpSpec::MarkDotState { c, shift } => {
                check("jump coefficient c", c.len(), mark_dim)?;
                check("jump shift", shift.len(), dim)?;
            }
        }
        Ok(Self {
            dim,
            k_dim,
            mark_dim,
            drift,
            diffusion,
            jump,
            growth_l,
            lipschitz_k,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn mark_dim(&self) -> usize {
        self.mark_dim
    }

    pub fn drift_eval(&self, x: &HVec) -> HVec {
        match &self.drift {
            DriftSpec::Zero => HVec::zeros(self.dim),
            DriftSpec::Linear { a } => HVec::from(
                a.iter()
                    .zip(x.coeffs())
                    .map(|(ak, xk)| ak * xk)
                    .collect::<Vec<_>>(),
            ),
            DriftSpec::Affine { a, a0 } => HVec::from(
                a.iter()
                    .zip(x.coeffs())
                    .zip(a0)
                    .map(|((ak, xk), a0k)| ak * xk + a0k)
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// Column j of B(x), i.e. B(x) applied to the j-th Q eigenvector.
    pub fn diffusion_column(&self, x: &HVec, j: usize) -> HVec {
        match &self.diffusion {
            DiffusionSpec::Zero => HVec::zeros(self.dim),
            DiffusionSpec::StateScaled { b } => x.scale(b[j]),
            DiffusionSpec::DiagonalAffine { b, d } => {
                HVec::unit(self.dim, j, d[j] + b[j] * x.coeffs()[j])
            }
        }
    }

    /// B(x) dw for an increment row dw in Q-eigenbasis coordinates.
    pub fn diffusion_apply(&self, x: &HVec, dw: &[f64]) -> HVec {
        match &self.diffusion {
            DiffusionSpec::Zero => HVec::zeros(self.dim),
            DiffusionSpec::StateScaled { b } => {
                let s: f64 = b.iter().zip(dw).map(|(bj, wj)| bj * wj).sum();
                x.scale(s)
            }
            DiffusionSpec::DiagonalAffine { b, d } => HVec::from(
                (0..self.dim)
                    .map(|k| (d[k] + b[k] * x.coeffs()[k]) * dw[k])
                    .collect::<Vec<_>>(),
            ),
        }
    }

    pub fn diffusion_is_zero(&self) -> bool {
        match &self.diffusion {
            DiffusionSpec::Zero => true,
            DiffusionSpec::StateScaled { b } => b.iter().all(|&v| v == 0.0),
            DiffusionSpec::DiagonalAffine { b, d } => {
                b.iter().all(|&v| v == 0.0) && d.iter().all(|&v| v == 0.0)
            }
        }
    }

    /// tr(B(x) Q B(x)*) as the finite sum over the Q eigenbasis.
    pub fn diffusion_trace(&self, qspec: &QWienerSpec, x: &HVec) -> f64 {
        qspec
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(j, &lambda)| lambda * self.diffusion_column(x, j).norm_sq())
            .sum()
    }

    pub fn jump_eval(&self, mark: &[f64], x: &HVec) -> HVec {
        match &self.jump {
            JumpSpec::Zero => HVec::zeros(self.dim),
            JumpSpec::MarkDotState { c, shift } => {
                let s: f64 = c.iter().zip(mark).map(|(ck, vk)| ck * vk).sum();
                HVec::from(
                    x.coeffs()
                        .iter()
                        .zip(shift)
                        .map(|(xk, sk)| s * (xk + sk))
                        .collect::<Vec<_>>(),
                )
            }
        }
    }

    pub fn jump_is_zero(&self) -> bool {
        match &self.jump {
            JumpSpec::Zero => true,
            JumpSpec::MarkDotState { c, .. } => c.iter().all(|&v| v == 0.0),
        }
    }

    /// sum_i mass_i f(mark_i, x): the deterministic compensator drift.
    pub fn jump_compensator_drift(&self, levy: &LevyMeasureSpec, x: &HVec) -> HVec {
        let mut acc = HVec::zeros(self.dim);
        for atom in levy.atoms() {
            acc.axpy(atom.mass, &self.jump_eval(&atom.mark, x));
        }
        acc
    }

    /// The growth-side quantity ‖F(x)‖² + tr(B Q B*) + sum_i mass_i ‖f(mark_i,x)‖².
    pub fn growth_lhs(&self, qspec: &QWienerSpec, levy: &LevyMeasureSpec, x: &HVec) -> f64 {
        let jump_part: f64 = levy
            .atoms()
            .iter()
            .map(|a| a.mass * self.jump_eval(&a.mark, x).norm_sq())
            .sum();
        self.drift_eval(x).norm_sq() + self.diffusion_trace(qspec, x) + jump_part
    }
}

/// Result of sampling the declared contract constants.
#[derive(Debug, Clone)]
pub struct ContractAuditReport {
    pub worst_growth_ratio: f64,
    pub worst_lipschitz_ratio: f64,
    pub growth_bound: f64,
    pub lipschitz_bound: f64,
    pub pass: bool,
    pub violating_x: Option<Vec<f64>>,
}

/// Sample points and pairs in a Gaussian cloud and check the declared growth
/// and Lipschitz constants. Failure signals a configuration error, not a
/// solver error.
pub fn contract_audit(
    coeffs: &CoefficientSet,
    qspec: &QWienerSpec,
    levy: &LevyMeasureSpec,
    samples: usize,
    seed: u64,
) -> ContractAuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = coeffs.dim();
    let mut draw = |rng: &mut ChaCha8Rng| {
        HVec::from(
            (0..dim)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    2.0 * z
                })
                .collect::<Vec<_>>(),
        )
    };
    let mut worst_growth = 0.0f64;
    let mut worst_lip = 0.0f64;
    let mut violating = None;
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let g = coeffs.growth_lhs(qspec, levy, &x) / (1.0 + x.norm_sq());
        if g > worst_growth {
            worst_growth = g;
            if g > coeffs.growth_l {
                violating = Some(x.coeffs().to_vec());
            }
        }
        let dxy = x.sub(&y).norm_sq();
        if dxy > 0.0 {
            let df = coeffs.drift_eval(&x).sub(&coeffs.drift_eval(&y)).norm_sq();
            let db: f64 = qspec
                .eigenvalues()
                .iter()
                .enumerate()
                .map(|(j, &lambda)| {
                    lambda
                        * coeffs
                            .diffusion_column(&x, j)
                            .sub(&coeffs.diffusion_column(&y, j))
                            .norm_sq()
                })
                .sum();
            let dj: f64 = levy
                .atoms()
                .iter()
                .map(|a| {
                    a.mass
                        * coeffs
                            .jump_eval(&a.mark, &x)
                            .sub(&coeffs.jump_eval(&a.mark, &y))
                            .norm_sq()
                })
                .sum();
            let lip = (df + db + dj) / dxy;
            if lip > worst_lip {
                worst_lip = lip;
                if lip > coeffs.lipschitz_k && violating.is_none() {
                    violating = Some(x.coeffs().to_vec());
                }
            }
        }
    }
    ContractAuditReport {
        worst_growth_ratio: worst_growth,
        worst_lipschitz_ratio: worst_lip,
        growth_bound: coeffs.growth_l,
        lipschitz_bound: coeffs.lipschitz_k,
        pass: worst_growth <= coeffs.growth_l && worst_lip <= coeffs.lipschitz_k,
        violating_x: violating,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::LevyAtom;

    fn scalar_coeffs(a: f64, b: f64, c_mark: f64) -> (CoefficientSet, QWienerSpec, LevyMeasureSpec) {
        let coeffs = CoefficientSet::new(
            1,
            1,
            1,
            DriftSpec::Linear { a: vec![a] },
            DiffusionSpec::StateScaled { b: vec![b] },
            JumpSpec::MarkDotState {
                c: vec![1.0],
                shift: vec![0.0],
            },
            10.0,
            10.0,
        )
        .unwrap();
        let q = QWienerSpec::new(vec![1.0]).unwrap();
        let levy = LevyMeasureSpec::new(
            1,
            vec![LevyAtom {
                mark: vec![c_mark],
                mass: 2.0,
            }],
        )
        .unwrap();
        (coeffs, q, levy)
    }

    #[test]
    fn scalar_catalog_evaluation() {
        let (coeffs, q, levy) = scalar_coeffs(-1.0, 0.5, 0.3);
        let x = HVec::from(vec![2.0]);
        assert_eq!(coeffs.drift_eval(&x).coeffs(), &[-2.0]);
        assert_eq!(coeffs.diffusion_apply(&x, &[0.1]).coeffs(), &[0.1]);
        assert_eq!(coeffs.jump_eval(&[0.3], &x).coeffs(), &[0.6]);
        // trace = lambda * b^2 x^2 = 1 * 0.25 * 4
        assert!((coeffs.diffusion_trace(&q, &x) - 1.0).abs() < 1e-15);
        // compensator drift = mass * c * x = 2 * 0.3 * 2
        assert_eq!(coeffs.jump_compensator_drift(&levy, &x).coeffs(), &[1.2]);
    }

    #[test]
    fn growth_lhs_matches_hand_computation() {
        let (coeffs, q, levy) = scalar_coeffs(-1.0, 0.5, 0.3);
        let x = HVec::from(vec![3.0]);
        // |ax|^2 + lambda b^2 x^2 + m (c x)^2 = 9 + 2.25 + 2*0.81
        let expected = 9.0 + 2.25 + 1.62;
        assert!((coeffs.growth_lhs(&q, &levy, &x) - expected).abs() < 1e-12);
    }

    #[test]
    fn contract_audit_passes_for_consistent_constants() {
        let (coeffs, q, levy) = scalar_coeffs(-1.0, 0.5, 0.3);
        // exact constants: growth sup ratio = a^2 + b^2 lambda + m c^2 at large x
        let report = contract_audit(&coeffs, &q, &levy, 1000, 8);
        assert!(report.pass, "{report:?}");
        assert!(report.worst_growth_ratio <= 1.0 + 0.25 + 0.18 + 1e-12);
    }

    #[test]
    fn contract_audit_flags_understated_constants() {
        let (mut coeffs, q, levy) = scalar_coeffs(-4.0, 0.5, 0.3);
        coeffs.growth_l = 1.0; // true ratio exceeds 16
        let report = contract_audit(&coeffs, &q, &levy, 1000, 8);
        assert!(!report.pass);
        assert!(report.violating_x.is_some());
    }

    #[test]
    fn diagonal_affine_diffusion() {
        let coeffs = CoefficientSet::new(
            2,
            2,
            1,
            DriftSpec::Zero,
            DiffusionSpec::DiagonalAffine {
                b: vec![1.0, 0.0],
                d: vec![0.0, 0.5],
            },
            JumpSpec::Zero,
            10.0,
            10.0,
        )
        .unwrap();
        let x = HVec::from(vec![2.0, 3.0]);
        assert_eq!(coeffs.diffusion_column(&x, 0).coeffs(), &[2.0, 0.0]);
        assert_eq!(coeffs.diffusion_column(&x, 1).coeffs(), &[0.0, 0.5]);
        assert_eq!(
            coeffs.diffusion_apply(&x, &[1.0, 2.0]).coeffs(),
            &[2.0, 1.0]
        );
        assert!(!coeffs.diffusion_is_zero());
    }

    #[test]
    fn dimension_mismatches_rejected() {
        assert!(CoefficientSet::new(
            2,
            1,
            1,
            DriftSpec::Linear { a: vec![1.0] },
            DiffusionSpec::Zero,
            JumpSpec::Zero,
            1.0,
            1.0
        )
        .is_err());
        assert!(CoefficientSet::new(
            2,
            1,
            1,
            DriftSpec::Zero,
            DiffusionSpec::DiagonalAffine {
                b: vec![1.0],
                d: vec![0.0]
            },
            JumpSpec::Zero,
            1.0,
            1.0
        )
        .is_err());
    }
}
