//! Test functions Psi(s, x) with their time derivative, gradient, Hessian and
//! quasi-sublinear dominators h1, h2, plus a finite-difference validator.
//!
//! The catalog is built-in只: a quadratic norm, its exponentially weighted
//! variant, a semigroup-composed linear functional, and a semigroup-smoothed
//! quadratic. Symbolic differentiation of arbitrary user functions is a
//! non-goal; new entries are added here with exact derivatives.

use crate::spectral::{HVec, SpectralSpace};

/// Hessian of a test function. Built-ins are all diagonal in the eigenbasis;
/// a dense form is kept for completeness and testing.
#[derive(Debug, Clone, PartialEq)]
pub enum HessForm {
    Diagonal(Vec<f64>),
    Dense { dim: usize, data: Vec<f64> },
}

impl HessForm {
    pub fn dim(&self) -> usize {
        match self {
            HessForm::Diagonal(d) => d.len(),
            HessForm::Dense { dim, .. } => *dim,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            HessForm::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    0.0
                }
            }
            HessForm::Dense { dim, data } => data[i * dim + j],
        }
    }

    /// ⟨H u, u⟩.
    pub fn quad_form(&self, u: &HVec) -> f64 {
        match self {
            HessForm::Diagonal(d) => d
                .iter()
                .zip(u.coeffs())
                .map(|(dk, uk)| dk * uk * uk)
                .sum(),
            HessForm::Dense { dim, data } => {
                let mut acc = 0.0;
                for i in 0..*dim {
                    let mut row = 0.0;
                    for j in 0..*dim {
                        row += data[i * dim + j] * u.coeffs()[j];
                    }
                    acc += row * u.coeffs()[i];
                }
                acc
            }
        }
    }

    /// Upper bound on the operator norm (exact for the diagonal form).
    pub fn op_norm_bound(&self) -> f64 {
        match self {
            HessForm::Diagonal(d) => d.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            HessForm::Dense { data, .. } => data.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }
}

type ScalarFn = Box<dyn Fn(f64, &HVec) -> f64 + Send + Sync>;
type VecFn = Box<dyn Fn(f64, &HVec) -> HVec + Send + Sync>;
type HessFn = Box<dyn Fn(f64, &HVec) -> HessForm + Send + Sync>;
type DominatorFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// An explicitly closed generator attached to a test function, for the
/// extended-generator formula: a continuous extension of the generator to
/// the whole space, with its declared quadratic growth constant.
pub enum ClosedGenerator {
    /// On the finite truncation the generator itself is already continuous in
    /// x, so the closure is the generator evaluator verbatim.
    FiniteDim,
    /// A hand-derived closed form, e.g. with the drift term moved to the
    /// adjoint side.
    Custom {
        growth_k: f64,
        eval: Box<dyn Fn(&crate::generator::GeneratorContext<'_>, f64, &HVec) -> f64 + Send + Sync>,
    },
}

/// Psi with exact derivatives and dominators.
pub struct TestFunction {
    name: String,
    value: ScalarFn,
    d_s: ScalarFn,
    grad: VecFn,
    hess: HessFn,
    h1: DominatorFn,
    h2: DominatorFn,
    bounded: bool,
    closed_generator: Option<ClosedGenerator>,
}

impl TestFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, s: f64, x: &HVec) -> f64 {
        (self.value)(s, x)
    }

    pub fn d_s(&self, s: f64, x: &HVec) -> f64 {
        (self.d_s)(s, x)
    }

    pub fn grad(&self, s: f64, x: &HVec) -> HVec {
        (self.grad)(s, x)
    }

    pub fn hess(&self, s: f64, x: &HVec) -> HessForm {
        (self.hess)(s, x)
    }

    pub fn h1(&self, u: f64) -> f64 {
        (self.h1)(u)
    }

    pub fn h2(&self, u: f64) -> f64 {
        (self.h2)(u)
    }

    pub fn is_bounded_class(&self) -> bool {
        self.bounded
    }

    pub fn closed_generator(&self) -> Option<&ClosedGenerator> {
        self.closed_generator.as_ref()
    }

    /// Psi(x) = ‖x‖².
    pub fn quadratic() -> Self {
        TestFunction {
            name: "quadratic".into(),
            value: Box::new(|_, x| x.norm_sq()),
            d_s: Box::new(|_, _| 0.0),
            grad: Box::new(|_, x| x.scale(2.0)),
            hess: Box::new(|_, x| HessForm::Diagonal(vec![2.0; x.len()])),
            h1: Box::new(|u| 2.0 * u),
            h2: Box::new(|_| 2.0),
            bounded: false,
            closed_generator: Some(ClosedGenerator::FiniteDim),
        }
    }

    /// Psi(s, x) = e^{cs} ‖x‖². `horizon` bounds the time window for the
    /// dominator h1.
    pub fn exp_quadratic(c: f64, horizon: f64) -> Self {
        let cap = (c.abs() * horizon).exp();
        TestFunction {
            name: "exp_quadratic".into(),
            value: Box::new(move |s, x| (c * s).exp() * x.norm_sq()),
            d_s: Box::new(move |s, x| c * (c * s).exp() * x.norm_sq()),
            grad: Box::new(move |s, x| x.scale(2.0 * (c * s).exp())),
            hess: Box::new(move |s, x| HessForm::Diagonal(vec![2.0 * (c * s).exp(); x.len()])),
            h1: Box::new(move |u| 2.0 * cap * u),
            h2: Box::new(move |_| 2.0 * cap),
            bounded: false,
            closed_generator: Some(ClosedGenerator::FiniteDim),
        }
    }

    /// Psi(s, x) = ⟨S(horizon - s) w, x⟩, the semigroup-composed linear
    /// functional. Its closed generator moves the drift term to the adjoint:
    /// L̄Psi(s, x) = ⟨A S(horizon - s) w, x⟩ + ⟨S(horizon - s) w, F(x)⟩
    /// (the Hessian vanishes and the jump integrand of a linear function is
    /// identically zero).
    pub fn semigroup_linear(space: &SpectralSpace, w: HVec, horizon: f64) -> Self {
        assert_eq!(w.len(), space.dim(), "weight dimension");
        let sp = space.clone();
        let sp_s = space.clone();
        let sp_g = space.clone();
        let sp_c = space.clone();
        let w_v = w.clone();
        let w_s = w.clone();
        let w_g = w.clone();
        let w_c = w.clone();
        let grad_cap = w.norm() * (space.alpha() * horizon.max(0.0)).exp();
        let growth_k = {
            let aw = space.apply_a(&w).unwrap();
            1.0 + aw.norm() * (space.alpha() * horizon.max(0.0)).exp() + grad_cap
        };
        let dim = space.dim();
        TestFunction {
            name: "semigroup_linear".into(),
            value: Box::new(move |s, x| sp.semigroup_apply((horizon - s).max(0.0), &w_v).unwrap().dot(x)),
            d_s: Box::new(move |s, x| {
                let sw = sp_s.semigroup_apply((horizon - s).max(0.0), &w_s).unwrap();
                -sp_s.apply_a(&sw).unwrap().dot(x)
            }),
            grad: Box::new(move |s, _| sp_g.semigroup_apply((horizon - s).max(0.0), &w_g).unwrap()),
            hess: Box::new(move |_, _| HessForm::Diagonal(vec![0.0; dim])),
            h1: Box::new(move |_| grad_cap),
            h2: Box::new(|_| 0.0),
            bounded: true,
            closed_generator: Some(ClosedGenerator::Custom {
                growth_k,
                eval: Box::new(move |ctx, s, x| {
                    let sw = sp_c.semigroup_apply((horizon - s).max(0.0), &w_c).unwrap();
                    sp_c.apply_a(&sw).unwrap().dot(x) + sw.dot(&ctx.coeffs.drift_eval(x))
                }),
            }),
        }
    }

    /// Psi(x) = ‖S(l) x‖², the semigroup-smoothed quadratic.
    pub fn smoothed_quadratic(space: &SpectralSpace, l: f64) -> Self {
        assert!(l >= 0.0, "smoothing time must be >= 0");
        let factors: Vec<f64> = space.semigroup_factors(l);
        let sq: Vec<f64> = factors.iter().map(|f| f * f).collect();
        let f_v = sq.clone();
        let f_g = sq.clone();
        let f_h = sq.clone();
        let cap = 2.0 * (2.0 * l * space.alpha()).exp();
        TestFunction {
            name: "smoothed_quadratic".into(),
            value: Box::new(move |_, x| {
                f_v.iter()
                    .zip(x.coeffs())
                    .map(|(f, xk)| f * xk * xk)
                    .sum()
            }),
            d_s: Box::new(|_, _| 0.0),
            grad: Box::new(move |_, x| {
                HVec::from(
                    f_g.iter()
                        .zip(x.coeffs())
                        .map(|(f, xk)| 2.0 * f * xk)
                        .collect::<Vec<_>>(),
                )
            }),
            hess: Box::new(move |_, _| {
                HessForm::Diagonal(f_h.iter().map(|f| 2.0 * f).collect())
            }),
            h1: Box::new(move |u| cap * u),
            h2: Box::new(move |_| cap),
            bounded: false,
            closed_generator: Some(ClosedGenerator::FiniteDim),
        }
    }

    /// Constant function, for degenerate-case checks.
    pub fn constant(value: f64, dim: usize) -> Self {
        TestFunction {
            name: "constant".into(),
            value: Box::new(move |_, _| value),
            d_s: Box::new(|_, _| 0.0),
            grad: Box::new(move |_, _| HVec::zeros(dim)),
            hess: Box::new(move |_, _| HessForm::Diagonal(vec![0.0; dim])),
            h1: Box::new(|_| 0.0),
            h2: Box::new(|_| 0.0),
            bounded: true,
            closed_generator: Some(ClosedGenerator::FiniteDim),
        }
    }

    /// Look up a catalog entry by name with its parameters.
    pub fn by_name(
        name: &str,
        space: &SpectralSpace,
        param: Option<f64>,
        horizon: f64,
    ) -> Option<Self> {
        match name {
            "quadratic" => Some(Self::quadratic()),
            "exp_quadratic" => Some(Self::exp_quadratic(param.unwrap_or(1.0), horizon)),
            "semigroup_linear" => {
                let w = HVec::from(vec![1.0; space.dim()]);
                Some(Self::semigroup_linear(space, w, horizon))
            }
            "smoothed_quadratic" => Some(Self::smoothed_quadratic(space, param.unwrap_or(0.1))),
            _ => None,
        }
    }
}

/// Worst relative finite-difference errors of grad and hess, and whether the
/// dominators hold, over the given sample points.
#[derive(Debug, Clone)]
pub struct DerivativeCheckReport {
    pub worst_grad_rel: f64,
    pub worst_hess_rel: f64,
    pub dominators_ok: bool,
}

/// Central finite differences of value and grad against the exact grad/hess.
pub fn check_derivatives(psi: &TestFunction, points: &[(f64, HVec)]) -> DerivativeCheckReport {
    let h = 1e-5;
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    let mut dominators_ok = true;
    for (s, x) in points {
        let g = psi.grad(*s, x);
        let hess = psi.hess(*s, x);
        let scale_g = 1.0 + g.norm();
        for k in 0..x.len() {
            let mut xp = x.clone();
            xp.coeffs_mut()[k] += h;
            let mut xm = x.clone();
            xm.coeffs_mut()[k] -= h;
            let fd = (psi.value(*s, &xp) - psi.value(*s, &xm)) / (2.0 * h);
            worst_grad = worst_grad.max((fd - g.coeffs()[k]).abs() / scale_g);
            let gp = psi.grad(*s, &xp);
            let gm = psi.grad(*s, &xm);
            for i in 0..x.len() {
                let fd2 = (gp.coeffs()[i] - gm.coeffs()[i]) / (2.0 * h);
                let scale_h = 1.0 + hess.op_norm_bound();
                worst_hess = worst_hess.max((fd2 - hess.get(i, k)).abs() / scale_h);
            }
        }
        if g.norm() > psi.h1(x.norm()) * (1.0 + 1e-9) + 1e-12 {
            dominators_ok = false;
        }
        if hess.op_norm_bound() > psi.h2(x.norm()) * (1.0 + 1e-9) + 1e-12 {
            dominators_ok = false;
        }
    }
    DerivativeCheckReport {
        worst_grad_rel: worst_grad,
        worst_hess_rel: worst_hess,
        dominators_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralSpace;

    fn sample_points(dim: usize) -> Vec<(f64, HVec)> {
        vec![
            (0.0, HVec::from((0..dim).map(|k| 0.3 * k as f64 - 0.5).collect::<Vec<_>>())),
            (0.4, HVec::from((0..dim).map(|k| (k as f64).cos()).collect::<Vec<_>>())),
            (1.0, HVec::unit(dim, 0, 2.0)),
        ]
    }

    #[test]
    fn quadratic_derivatives_match_finite_differences() {
        let psi = TestFunction::quadratic();
        let report = check_derivatives(&psi, &sample_points(4));
        assert!(report.worst_grad_rel < 1e-5, "{report:?}");
        assert!(report.worst_hess_rel < 1e-5, "{report:?}");
        assert!(report.dominators_ok);
    }

    #[test]
    fn exp_quadratic_derivatives_match() {
        let psi = TestFunction::exp_quadratic(0.7, 1.0);
        let report = check_derivatives(&psi, &sample_points(3));
        assert!(report.worst_grad_rel < 1e-5);
        assert!(report.worst_hess_rel < 1e-5);
        assert!(report.dominators_ok);
    }

    #[test]
    fn semigroup_linear_derivatives_match() {
        let space = SpectralSpace::heat_dirichlet(4).unwrap();
        let w = HVec::from(vec![1.0, 0.5, -0.25, 0.1]);
        let psi = TestFunction::semigroup_linear(&space, w, 1.0);
        let report = check_derivatives(&psi, &sample_points(4));
        assert!(report.worst_grad_rel < 1e-5);
        assert!(report.worst_hess_rel < 1e-5);
        assert!(report.dominators_ok);
    }

    #[test]
    fn smoothed_quadratic_derivatives_match() {
        let space = SpectralSpace::heat_dirichlet(4).unwrap();
        let psi = TestFunction::smoothed_quadratic(&space, 0.05);
        let report = check_derivatives(&psi, &sample_points(4));
        assert!(report.worst_grad_rel < 1e-5);
        assert!(report.worst_hess_rel < 1e-5);
        assert!(report.dominators_ok);
    }

    #[test]
    fn exp_quadratic_time_derivative() {
        let psi = TestFunction::exp_quadratic(0.7, 1.0);
        let x = HVec::from(vec![1.0, 2.0]);
        let h = 1e-6;
        let fd = (psi.value(0.5 + h, &x) - psi.value(0.5 - h, &x)) / (2.0 * h);
        assert!((fd - psi.d_s(0.5, &x)).abs() < 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn semigroup_linear_time_derivative() {
        let space = SpectralSpace::heat_dirichlet(3).unwrap();
        let w = HVec::from(vec![1.0, -0.5, 0.25]);
        let psi = TestFunction::semigroup_linear(&space, w, 1.0);
        let x = HVec::from(vec![0.4, 1.0, -2.0]);
        let h = 1e-6;
        let fd = (psi.value(0.3 + h, &x) - psi.value(0.3 - h, &x)) / (2.0 * h);
        assert!((fd - psi.d_s(0.3, &x)).abs() < 1e-5 * (1.0 + fd.abs()));
    }

    #[test]
    fn dense_hessian_quad_form() {
        let h = HessForm::Dense {
            dim: 2,
            data: vec![2.0, 1.0, 1.0, 3.0],
        };
        let u = HVec::from(vec![1.0, -1.0]);
        // 2 - 1 - 1 + 3 = 3
        assert!((h.quad_form(&u) - 3.0).abs() < 1e-15);
        assert_eq!(h.get(0, 1), 1.0);
    }

    #[test]
    fn catalog_lookup() {
        let space = SpectralSpace::heat_dirichlet(3).unwrap();
        for name in ["quadratic", "exp_quadratic", "semigroup_linear", "smoothed_quadratic"] {
            assert!(TestFunction::by_name(name, &space, Some(0.5), 1.0).is_some());
        }
        assert!(TestFunction::by_name("cubic", &space, None, 1.0).is_none());
    }
}
