//! Calculus on the round S³ in the left-invariant gauge.
//!
//! A tangent vector at `g` is written `g·x` with `x ∈ Im ℍ`, and a vector
//! field `Y` is stored through its component function `y` with `Y_g = g·y(g)`.
//! Derivatives of component functions along `g·x` are taken on the curve
//! `t ↦ g·exp(t x)`, either through a registered closed form or by central
//! differences.
//!
//! Sign conventions pinned here and relied on everywhere else:
//! * orientation: `det(i, j, k) = +1`;
//! * Hodge star of a vector `z` is the 2-form `(u, w) ↦ det(z, u, w)`,
//!   so `∗e₁ = e₂ ∧ e₃`;
//! * divergence `δY = −Σᵢ ⟨eᵢ, ∇_{eᵢ} Y⟩`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::quat::{cross, ImQuat, Quat, UnitQuat};

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Values that can be differentiated numerically.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl Linear for f64 {}
impl Linear for Quat {}
impl Linear for ImQuat {}

/// How derivatives of component functions are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivMode {
    /// Use the registered closed-form differential.
    Analytic,
    /// Central differences with step `h`.
    Fd { h: f64 },
    /// Richardson-extrapolated central differences (steps `h` and `h/2`).
    Richardson { h: f64 },
}

impl DerivMode {
    pub const fn fd() -> Self {
        DerivMode::Fd { h: DEFAULT_FD_STEP }
    }

    pub fn is_analytic(self) -> bool {
        matches!(self, DerivMode::Analytic)
    }
}

impl fmt::Display for DerivMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivMode::Analytic => write!(f, "analytic"),
            DerivMode::Fd { h } => write!(f, "fd(h={h:e})"),
            DerivMode::Richardson { h } => write!(f, "richardson(h={h:e})"),
        }
    }
}

fn central<T: Linear>(f: &dyn Fn(UnitQuat) -> T, g: UnitQuat, x: ImQuat, h: f64) -> T {
    let plus = f(g.right_exp(x * h));
    let minus = f(g.right_exp(x * -h));
    (plus - minus) * (0.5 / h)
}

/// `d/dt|₀ F(g·exp(t x))` computed by the requested mode.
///
/// `analytic` is the closed-form differential `(g, x) ↦ F_*(g x)`, required
/// in [`DerivMode::Analytic`].
pub fn directional_derivative<T: Linear>(
    f: &dyn Fn(UnitQuat) -> T,
    analytic: Option<&dyn Fn(UnitQuat, ImQuat) -> T>,
    g: UnitQuat,
    x: ImQuat,
    mode: DerivMode,
) -> Result<T> {
    match mode {
        DerivMode::Analytic => analytic.map(|d| d(g, x)).ok_or_else(|| {
            Error::Config("analytic mode requested but no differential is registered".into())
        }),
        DerivMode::Fd { h } => {
            check_step(h)?;
            Ok(central(f, g, x, h))
        }
        DerivMode::Richardson { h } => {
            check_step(h)?;
            let coarse = central(f, g, x, h);
            let fine = central(f, g, x, 0.5 * h);
            Ok((fine * 4.0 - coarse) * (1.0 / 3.0))
        }
    }
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("finite-difference step must be positive, got {h}")))
    }
}

/// The tangent vector `g·lie ∈ T_g S³`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentS3 {
    pub base: UnitQuat,
    pub lie: ImQuat,
}

impl TangentS3 {
    pub fn new(base: UnitQuat, lie: ImQuat) -> Self {
        TangentS3 { base, lie }
    }

    /// The vector as an element of ℍ.
    pub fn ambient(self) -> Quat {
        self.base.quat() * Quat::from(self.lie)
    }

    /// Round-metric length, equal to `|lie|`.
    pub fn norm(self) -> f64 {
        self.lie.norm()
    }
}

type ImMap = Arc<dyn Fn(UnitQuat) -> ImQuat + Send + Sync>;
type ImDiff = Arc<dyn Fn(UnitQuat, ImQuat) -> ImQuat + Send + Sync>;
type RealMap = Arc<dyn Fn(UnitQuat) -> f64 + Send + Sync>;
type RealDiff = Arc<dyn Fn(UnitQuat, ImQuat) -> f64 + Send + Sync>;

/// A vector field `Y_g = g·y(g)`, optionally with its differential `y_*`.
#[derive(Clone)]
pub struct VectorFieldS3 {
    y: ImMap,
    dy: Option<ImDiff>,
}

impl fmt::Debug for VectorFieldS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFieldS3")
            .field("analytic", &self.dy.is_some())
            .finish()
    }
}

impl VectorFieldS3 {
    pub fn new(y: impl Fn(UnitQuat) -> ImQuat + Send + Sync + 'static) -> Self {
        VectorFieldS3 {
            y: Arc::new(y),
            dy: None,
        }
    }

    /// Registers the closed-form differential `(g, x) ↦ y_*(g x)`.
    pub fn with_differential(
        mut self,
        dy: impl Fn(UnitQuat, ImQuat) -> ImQuat + Send + Sync + 'static,
    ) -> Self {
        self.dy = Some(Arc::new(dy));
        self
    }

    /// The left-invariant field `g ↦ g·a`.
    pub fn left_invariant(a: ImQuat) -> Self {
        VectorFieldS3::new(move |_| a).with_differential(|_, _| ImQuat::ZERO)
    }

    /// The right-invariant field `g ↦ b·g`, with component `g⁻¹ b g`.
    pub fn right_invariant(b: ImQuat) -> Self {
        VectorFieldS3::new(move |g| g.inverse().rotate(b)).with_differential(move |g, x| {
            let h = g.inverse().rotate(b);
            h.bracket(x)
        })
    }

    /// The field `g ↦ g·Im(g)`.
    pub fn imaginary_part() -> Self {
        VectorFieldS3::new(|g| g.quat().im())
            .with_differential(|g, x| (g.quat() * Quat::from(x)).im())
    }

    pub fn has_differential(&self) -> bool {
        self.dy.is_some()
    }

    /// Left-frame component `y(g)`.
    pub fn component(&self, g: UnitQuat) -> ImQuat {
        (self.y)(g)
    }

    pub fn at(&self, g: UnitQuat) -> TangentS3 {
        TangentS3::new(g, self.component(g))
    }

    /// `y_*(g x)`, the derivative of the component function along `g·x`.
    pub fn differential(&self, g: UnitQuat, x: ImQuat, mode: DerivMode) -> Result<ImQuat> {
        let y = &*self.y;
        let dy = self.dy.as_deref().map(|d| d as &dyn Fn(UnitQuat, ImQuat) -> ImQuat);
        directional_derivative(&|p| y(p), dy, g, x, mode)
    }
}

/// A scalar function on S³, optionally with its differential.
#[derive(Clone)]
pub struct ScalarFieldS3 {
    alpha: RealMap,
    dalpha: Option<RealDiff>,
}

impl fmt::Debug for ScalarFieldS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFieldS3")
            .field("analytic", &self.dalpha.is_some())
            .finish()
    }
}

impl ScalarFieldS3 {
    pub fn new(alpha: impl Fn(UnitQuat) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFieldS3 {
            alpha: Arc::new(alpha),
            dalpha: None,
        }
    }

    pub fn with_differential(
        mut self,
        d: impl Fn(UnitQuat, ImQuat) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.dalpha = Some(Arc::new(d));
        self
    }

    pub fn constant(c: f64) -> Self {
        ScalarFieldS3::new(move |_| c).with_differential(|_, _| 0.0)
    }

    /// `g ↦ Re(g)`.
    pub fn real_part() -> Self {
        ScalarFieldS3::new(|g| g.quat().w)
            .with_differential(|g, x| (g.quat() * Quat::from(x)).w)
    }

    pub fn has_differential(&self) -> bool {
        self.dalpha.is_some()
    }

    pub fn value(&self, g: UnitQuat) -> f64 {
        (self.alpha)(g)
    }

    /// `X(α)` for `X = g·x`.
    pub fn derivative(&self, g: UnitQuat, x: ImQuat, mode: DerivMode) -> Result<f64> {
        let a = &*self.alpha;
        let d = self.dalpha.as_deref().map(|d| d as &dyn Fn(UnitQuat, ImQuat) -> f64);
        directional_derivative(&|p| a(p), d, g, x, mode)
    }
}

/// `∇_X Y = g·(½[x, y(g)] + y_*(X))`.
pub fn covariant_derivative(y: &VectorFieldS3, x: TangentS3, mode: DerivMode) -> Result<TangentS3> {
    let g = x.base;
    let lie = cross(x.lie, y.component(g)) + y.differential(g, x.lie, mode)?;
    Ok(TangentS3::new(g, lie))
}

/// `∇_X Y` evaluated at `g` for a vector field `X`.
pub fn covariant_derivative_along(
    y: &VectorFieldS3,
    x: &VectorFieldS3,
    g: UnitQuat,
    mode: DerivMode,
) -> Result<TangentS3> {
    covariant_derivative(y, x.at(g), mode)
}

/// `δY(g) = −Σᵢ ⟨eᵢ, y_*(g eᵢ)⟩`; the bracket part of `∇` is traceless.
pub fn divergence(y: &VectorFieldS3, g: UnitQuat, mode: DerivMode) -> Result<f64> {
    let mut acc = 0.0;
    for (i, e) in ImQuat::BASIS.iter().enumerate() {
        acc += y.differential(g, *e, mode)?.component(i);
    }
    Ok(-acc)
}

/// `grad α = g·Σᵢ eᵢ(α) eᵢ`.
pub fn gradient(alpha: &ScalarFieldS3, g: UnitQuat, mode: DerivMode) -> Result<TangentS3> {
    let mut c = [0.0; 3];
    for (i, e) in ImQuat::BASIS.iter().enumerate() {
        c[i] = alpha.derivative(g, *e, mode)?;
    }
    Ok(TangentS3::new(g, ImQuat::from_array(c)))
}

/// A 2-form at a point, as its antisymmetric matrix `ω(eᵢ, eⱼ)` in the left frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoForm(pub Matrix3<f64>);

impl TwoForm {
    /// `∗z`, i.e. `(u, w) ↦ det(z, u, w)`.
    pub fn hodge_of(z: ImQuat) -> Self {
        let mut m = Matrix3::zeros();
        for (i, ei) in ImQuat::BASIS.iter().enumerate() {
            for (j, ej) in ImQuat::BASIS.iter().enumerate() {
                m[(i, j)] = det_triple(z, *ei, *ej);
            }
        }
        TwoForm(m)
    }

    /// The vector `z` with `self = ∗z`.
    pub fn dual_vector(&self) -> ImQuat {
        let m = &self.0;
        ImQuat::new(m[(1, 2)], m[(2, 0)], m[(0, 1)])
    }

    pub fn eval(&self, u: ImQuat, w: ImQuat) -> f64 {
        (u.to_vector().transpose() * self.0 * w.to_vector())[(0, 0)]
    }

    pub fn max_abs_diff(&self, other: &TwoForm) -> f64 {
        (self.0 - other.0).abs().max()
    }
}

/// `d(Y♭)` at `g`:
/// `dY(geᵢ, geⱼ) = eᵢ⟨y, eⱼ⟩ − eⱼ⟨y, eᵢ⟩ − 2⟨y, eᵢ × eⱼ⟩`,
/// the last term being `−⟨Y, [geᵢ, geⱼ]⟩` with `[geᵢ, geⱼ] = 2 g (eᵢ × eⱼ)`.
pub fn exterior_derivative_dual(y: &VectorFieldS3, g: UnitQuat, mode: DerivMode) -> Result<TwoForm> {
    let y0 = y.component(g);
    let mut dy = [ImQuat::ZERO; 3];
    for (i, e) in ImQuat::BASIS.iter().enumerate() {
        dy[i] = y.differential(g, *e, mode)?;
    }
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let ei = ImQuat::BASIS[i];
            let ej = ImQuat::BASIS[j];
            m[(i, j)] = dy[i].component(j) - dy[j].component(i) - 2.0 * y0.dot(cross(ei, ej));
        }
    }
    Ok(TwoForm(m))
}

/// `X ⌟ ∗Y` in frame components; equals `y × x`.
pub fn hodge_contract(x: ImQuat, y: ImQuat) -> ImQuat {
    cross(y, x)
}

/// `⟨vol, x ∧ y ∧ z⟩`, the determinant of the component matrix.
pub fn det_triple(x: ImQuat, y: ImQuat, z: ImQuat) -> f64 {
    x.dot(cross(y, z))
}

/// Integrates `ġ = g·y(g)` with classical RK4, renormalizing after each step.
pub fn flow_orbit(
    y: &VectorFieldS3,
    g0: UnitQuat,
    t_max: f64,
    steps: usize,
) -> Result<Vec<(f64, UnitQuat)>> {
    const MIN_SPEED: f64 = 1e-8;
    if steps < 8 {
        return Err(Error::Domain(format!("flow_orbit needs at least 8 steps, got {steps}")));
    }
    let dt = t_max / steps as f64;
    let rhs = |q: Quat| -> Result<Quat> {
        let g = UnitQuat::new(q)?;
        let v = y.component(g);
        if v.norm() < MIN_SPEED {
            return Err(Error::Degenerate(format!("vector field vanishes near {g}")));
        }
        Ok(q * Quat::from(v))
    };
    let mut out = Vec::with_capacity(steps + 1);
    let mut g = g0;
    out.push((0.0, g));
    for n in 0..steps {
        let q = g.quat();
        let k1 = rhs(q)?;
        let k2 = rhs(q + k1 * (0.5 * dt))?;
        let k3 = rhs(q + k2 * (0.5 * dt))?;
        let k4 = rhs(q + k3 * dt)?;
        let next = q + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        g = UnitQuat::new(next)?;
        out.push(((n + 1) as f64 * dt, g));
    }
    Ok(out)
}

/// Three vector fields intended to form an oriented orthonormal frame.
#[derive(Clone, Debug)]
pub struct OrthoFrame {
    pub fields: [VectorFieldS3; 3],
}

impl OrthoFrame {
    pub fn new(fields: [VectorFieldS3; 3]) -> Self {
        OrthoFrame { fields }
    }

    /// Column matrix `[v₁ v₂ v₃]` of the components at `g`.
    pub fn matrix_at(&self, g: UnitQuat) -> Matrix3<f64> {
        let cols: Vec<_> = self.fields.iter().map(|f| f.component(g).to_vector()).collect();
        Matrix3::from_columns(&cols)
    }

    /// Checks orthonormality and positive orientation at each point.
    pub fn check(&self, points: &[UnitQuat], tol: f64) -> Result<()> {
        for g in points {
            let m = self.matrix_at(*g);
            let orth = (m.transpose() * m - Matrix3::identity()).abs().max();
            if orth > tol {
                return Err(Error::Domain(format!(
                    "frame is not orthonormal at {g} (residual {orth:e})"
                )));
            }
            if m.determinant() < 0.0 {
                return Err(Error::Domain(format!("frame reverses orientation at {g}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::exp_im;
    use crate::sampling::uniform_s3;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn g_test() -> UnitQuat {
        exp_im(ImQuat::new(0.3, -0.7, 0.4))
    }

    #[test]
    fn derivative_of_identity_map() {
        let f = |g: UnitQuat| g.quat();
        let d = directional_derivative(&f, None, UnitQuat::IDENTITY, ImQuat::I, DerivMode::fd()).unwrap();
        assert!((d - Quat::I).norm() < 1e-8);
    }

    #[test]
    fn derivative_of_inverse_matches_closed_form() {
        // d/dt (g e^{tx})⁻¹ = −x g⁻¹
        let g = g_test();
        let x = ImQuat::new(0.2, 1.0, -0.5);
        let f = |p: UnitQuat| p.inverse().quat();
        let fd = directional_derivative(&f, None, g, x, DerivMode::fd()).unwrap();
        let exact = -(Quat::from(x) * g.inverse().quat());
        assert!((fd - exact).norm() < 1e-7);
        let rich = directional_derivative(&f, None, g, x, DerivMode::Richardson { h: 1e-3 }).unwrap();
        assert!((rich - exact).norm() < 1e-10);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = |_: UnitQuat| 3.5;
        let d = directional_derivative(&f, None, g_test(), ImQuat::K, DerivMode::fd()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn analytic_mode_without_differential_is_a_config_error() {
        let y = VectorFieldS3::new(|g| g.quat().im());
        let err = y.differential(g_test(), ImQuat::I, DerivMode::Analytic).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let f = |_: UnitQuat| 0.0;
        let err = directional_derivative(&f, None, g_test(), ImQuat::I, DerivMode::Fd { h: 0.0 });
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn covariant_derivative_of_left_invariant_fields() {
        let g = g_test();
        let y = VectorFieldS3::left_invariant(ImQuat::J);
        let r = covariant_derivative(&y, TangentS3::new(g, ImQuat::I), DerivMode::Analytic).unwrap();
        assert!((r.lie - ImQuat::K).norm() < 1e-15);
        let r = covariant_derivative(&y, TangentS3::new(g, ImQuat::J), DerivMode::Analytic).unwrap();
        assert_eq!(r.lie, ImQuat::ZERO);
    }

    #[test]
    fn covariant_derivative_of_im_field_against_fd() {
        let g = exp_im(ImQuat::K * 0.4);
        let analytic = VectorFieldS3::imaginary_part();
        let numeric = VectorFieldS3::new(|g| g.quat().im());
        for e in ImQuat::BASIS {
            let a = covariant_derivative(&analytic, TangentS3::new(g, e), DerivMode::Analytic).unwrap();
            let n = covariant_derivative(&numeric, TangentS3::new(g, e), DerivMode::fd()).unwrap();
            assert!((a.lie - n.lie).norm() < 1e-8);
        }
    }

    #[test]
    fn divergence_examples() {
        let s = uniform_s3(11, 50);
        for g in s.iter() {
            for e in ImQuat::BASIS {
                let l = divergence(&VectorFieldS3::left_invariant(e), *g, DerivMode::Analytic).unwrap();
                assert_eq!(l, 0.0);
                let r = divergence(&VectorFieldS3::right_invariant(e), *g, DerivMode::fd()).unwrap();
                assert!(r.abs() < 1e-8);
            }
            let d = divergence(&VectorFieldS3::new(|g| g.quat().im()), *g, DerivMode::fd()).unwrap();
            assert!((d + 3.0 * g.quat().w).abs() < 1e-8);
        }
    }

    #[test]
    fn gradient_examples() {
        let zero = gradient(&ScalarFieldS3::constant(2.0), g_test(), DerivMode::fd()).unwrap();
        assert_eq!(zero.lie, ImQuat::ZERO);
        let re = ScalarFieldS3::real_part();
        let at_one = gradient(&re, UnitQuat::IDENTITY, DerivMode::fd()).unwrap();
        assert!(at_one.lie.norm() < 1e-12);
        let g = exp_im(ImQuat::I * FRAC_PI_4);
        let grad = gradient(&ScalarFieldS3::new(|g| g.quat().w), g, DerivMode::fd()).unwrap();
        let expected = ImQuat::I * -FRAC_PI_4.sin();
        assert!((grad.lie - expected).norm() < 1e-8);
    }

    #[test]
    fn exterior_derivative_of_hopf_fields() {
        let s = uniform_s3(12, 40);
        for g in s.iter() {
            for a in [ImQuat::I, ImQuat::new(0.6, 0.0, 0.8), ImQuat::K] {
                let left = exterior_derivative_dual(&VectorFieldS3::left_invariant(a), *g, DerivMode::Analytic).unwrap();
                let expect = TwoForm::hodge_of(a * -2.0);
                assert!(left.max_abs_diff(&expect) < 1e-12);

                let right_field = VectorFieldS3::right_invariant(a);
                let right = exterior_derivative_dual(&right_field, *g, DerivMode::Analytic).unwrap();
                let expect = TwoForm::hodge_of(right_field.component(*g) * 2.0);
                assert!(right.max_abs_diff(&expect) < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_fields_are_closed() {
        let grad_re = VectorFieldS3::new(|g| {
            gradient(&ScalarFieldS3::real_part(), g, DerivMode::Analytic).unwrap().lie
        });
        let d = exterior_derivative_dual(&grad_re, g_test(), DerivMode::fd()).unwrap();
        assert!(d.0.abs().max() < 1e-7);
    }

    #[test]
    fn hodge_contract_basis_cases() {
        assert_eq!(hodge_contract(ImQuat::J, ImQuat::I), ImQuat::K);
        assert_eq!(hodge_contract(ImQuat::K, ImQuat::K), ImQuat::ZERO);
        assert_eq!(hodge_contract(ImQuat::I, ImQuat::J), -ImQuat::K);
    }

    #[test]
    fn hodge_contract_matches_two_form_on_all_basis_triples() {
        for x in ImQuat::BASIS {
            for y in ImQuat::BASIS {
                for z in ImQuat::BASIS {
                    let lhs = hodge_contract(x, y).dot(z);
                    assert_eq!(lhs, det_triple(y, x, z));
                    assert_eq!(lhs, TwoForm::hodge_of(y).eval(x, z));
                }
            }
        }
    }

    #[test]
    fn det_triple_orientation() {
        assert_eq!(det_triple(ImQuat::I, ImQuat::J, ImQuat::K), 1.0);
        assert_eq!(det_triple(ImQuat::I, ImQuat::I, ImQuat::K), 0.0);
        assert_eq!(det_triple(ImQuat::J, ImQuat::I, ImQuat::K), -1.0);
    }

    #[test]
    fn two_form_dual_vector_round_trip() {
        let z = ImQuat::new(0.3, -1.5, 2.25);
        assert_eq!(TwoForm::hodge_of(z).dual_vector(), z);
    }

    #[test]
    fn hopf_orbits_close() {
        let orbit = flow_orbit(&VectorFieldS3::left_invariant(ImQuat::I), UnitQuat::IDENTITY, 2.0 * PI, 2000).unwrap();
        for (t, g) in orbit.iter().step_by(97) {
            assert!(g.distance(exp_im(ImQuat::I * *t)) < 1e-9);
        }
        assert!(orbit.last().unwrap().1.distance(UnitQuat::IDENTITY) < 1e-8);

        let g0 = UnitQuat::new(Quat::J).unwrap();
        let orbit = flow_orbit(&VectorFieldS3::right_invariant(ImQuat::I), g0, 2.0 * PI, 2000).unwrap();
        for (t, g) in orbit.iter().step_by(89) {
            assert!(g.distance(exp_im(ImQuat::I * *t) * g0) < 1e-9);
        }
        assert!(orbit.last().unwrap().1.distance(g0) < 1e-8);
    }

    #[test]
    fn flow_orbit_errors() {
        let zero = VectorFieldS3::left_invariant(ImQuat::ZERO);
        assert!(matches!(
            flow_orbit(&zero, UnitQuat::IDENTITY, 1.0, 10),
            Err(Error::Degenerate(_))
        ));
        let y = VectorFieldS3::left_invariant(ImQuat::I);
        assert!(matches!(flow_orbit(&y, UnitQuat::IDENTITY, 1.0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn ortho_frame_check() {
        let frame = OrthoFrame::new(ImQuat::BASIS.map(VectorFieldS3::left_invariant));
        let pts = uniform_s3(1, 20).points;
        frame.check(&pts, 1e-12).unwrap();
        let flipped = OrthoFrame::new([ImQuat::J, ImQuat::I, ImQuat::K].map(VectorFieldS3::left_invariant));
        assert!(flipped.check(&pts, 1e-12).is_err());
        let skewed = OrthoFrame::new([ImQuat::I, ImQuat::I, ImQuat::K].map(VectorFieldS3::left_invariant));
        assert!(skewed.check(&pts, 1e-12).is_err());
    }
}
