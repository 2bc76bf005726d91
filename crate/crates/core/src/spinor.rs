//! Spinors on S³ in the fixed left-invariant gauge.
//!
//! A spinor is stored as its gauge function `f: S³ → ℍ`; the frame lift is
//! never materialized. Clifford multiplication by `X = g·x` is left
//! multiplication of `f` by `x`, and the spin connection contributes `½·x·f`,
//! so `∇_X Ψ` has gauge component `X(f) + ½·x·f`.
//!
//! The vector fields `ξ_a` defined by `ξ_a·Ψ = Ψ·a` have components
//! `v_a = f a f⁻¹`. A spinor of constant length is a generalized Killing
//! spinor iff the endomorphism `A` with `∇_X Ψ = A(X)·Ψ` is symmetric.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quat::{rotation_to_unit_quat, ImQuat, Quat, UnitQuat};
use crate::s3calc::{
    covariant_derivative, det_triple, directional_derivative, divergence,
    exterior_derivative_dual, gradient, hodge_contract, DerivMode, OrthoFrame, ScalarFieldS3,
    TangentS3, VectorFieldS3,
};
use crate::sampling::{pairwise_sum, SampleSet};

type QuatMap = Arc<dyn Fn(UnitQuat) -> Quat + Send + Sync>;
type QuatDiff = Arc<dyn Fn(UnitQuat, ImQuat) -> Quat + Send + Sync>;

/// Below this norm the gauge function is treated as vanishing.
const VANISHING: f64 = 1e-12;

/// Which closed form a spinor field came from.
#[derive(Clone, Debug, PartialEq)]
pub enum SpinorFamily {
    /// `f ≡ c`: Killing spinors with constant `½` (for `|c| = 1`).
    Const(Quat),
    /// `f(g) = g⁻¹`: Killing spinors with constant `−½`.
    Inverse,
    /// `f(g) = g⁻¹ b g`: a right-invariant field times a `½`-Killing spinor.
    ConjB(ImQuat),
    /// `f(g) = b g⁻¹`: a left-invariant field times a `−½`-Killing spinor.
    BInverse(ImQuat),
    Custom(String),
}

impl fmt::Display for SpinorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinorFamily::Const(c) => write!(f, "const{c}"),
            SpinorFamily::Inverse => write!(f, "inv"),
            SpinorFamily::ConjB(b) => write!(f, "conjb{b}"),
            SpinorFamily::BInverse(b) => write!(f, "binv{b}"),
            SpinorFamily::Custom(name) => write!(f, "{name}"),
        }
    }
}

/// A spinor `Ψ = [ũ, f]` given by its gauge function.
#[derive(Clone)]
pub struct SpinorField {
    f: QuatMap,
    df: Option<QuatDiff>,
    pub family: SpinorFamily,
}

impl fmt::Debug for SpinorField {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("SpinorField")
            .field("family", &self.family)
            .field("analytic", &self.df.is_some())
            .finish()
    }
}

impl SpinorField {
    pub fn custom(name: &str, f: impl Fn(UnitQuat) -> Quat + Send + Sync + 'static) -> Self {
        SpinorField {
            f: Arc::new(f),
            df: None,
            family: SpinorFamily::Custom(name.to_string()),
        }
    }

    pub fn with_differential(
        mut self,
        df: impl Fn(UnitQuat, ImQuat) -> Quat + Send + Sync + 'static,
    ) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    /// `f ≡ c`.
    pub fn constant(c: Quat) -> Self {
        let mut s = SpinorField::custom("", move |_| c).with_differential(|_, _| Quat::ZERO);
        s.family = SpinorFamily::Const(c);
        s
    }

    /// `f(g) = g⁻¹`, with `X(f) = −x g⁻¹`.
    pub fn inverse() -> Self {
        let mut s = SpinorField::custom("", |g| g.inverse().quat())
            .with_differential(|g, x| -(Quat::from(x) * g.inverse().quat()));
        s.family = SpinorFamily::Inverse;
        s
    }

    /// `f(g) = g⁻¹ b g`, with `X(f) = [h, x]` for `h = f(g)`.
    pub fn conj_b(b: ImQuat) -> Self {
        let mut s = SpinorField::custom("", move |g| Quat::from(g.inverse().rotate(b)))
            .with_differential(move |g, x| Quat::from(g.inverse().rotate(b).bracket(x)));
        s.family = SpinorFamily::ConjB(b);
        s
    }

    /// `f(g) = b g⁻¹`, with `X(f) = −b x g⁻¹`.
    pub fn b_inverse(b: ImQuat) -> Self {
        let bq = Quat::from(b);
        let mut s = SpinorField::custom("", move |g| bq * g.inverse().quat())
            .with_differential(move |g, x| -(bq * Quat::from(x) * g.inverse().quat()));
        s.family = SpinorFamily::BInverse(b);
        s
    }

    /// `f(g) = g`; not a generalized Killing spinor.
    pub fn identity() -> Self {
        SpinorField::custom("identity", |g| g.quat())
            .with_differential(|g, x| g.quat() * Quat::from(x))
    }

    /// `f = p/|p|` with `p(g) = c₀ + c₁ g + c₂ g²` and the given coefficients.
    pub fn normalized_poly(name: &str, c: [Quat; 3]) -> Self {
        let poly = move |g: Quat| c[0] + c[1] * g + c[2] * g * g;
        let dpoly = move |g: Quat, x: Quat| c[1] * g * x + c[2] * (g * x * g + g * g * x);
        SpinorField::custom(name, move |g| {
            let p = poly(g.quat());
            p * (1.0 / p.norm())
        })
        .with_differential(move |g, x| {
            let p = poly(g.quat());
            let dp = dpoly(g.quat(), Quat::from(x));
            let n = p.norm();
            dp * (1.0 / n) - p * (p.dot(dp) / (n * n * n))
        })
    }

    /// A seeded random smooth unit spinor, generically not generalized Killing.
    ///
    /// Coefficient draws are rejected until `|p| ≥ 0.1` on every probe point.
    pub fn random_poly(seed: u64, probe: &[UnitQuat]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x5eed);
        loop {
            let c: [Quat; 3] = std::array::from_fn(|_| {
                let a: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                Quat::new(a[0], a[1], a[2], a[3])
            });
            let ok = probe.iter().all(|g| {
                let g = g.quat();
                (c[0] + c[1] * g + c[2] * g * g).norm() >= 0.1
            });
            if ok {
                return SpinorField::normalized_poly(&format!("randpoly:{seed}"), c);
            }
        }
    }

    pub fn has_differential(&self) -> bool {
        self.df.is_some()
    }

    pub fn value(&self, g: UnitQuat) -> Quat {
        (self.f)(g)
    }

    /// `X(f)` for `X = g·x`.
    pub fn differential(&self, g: UnitQuat, x: ImQuat, mode: DerivMode) -> Result<Quat> {
        let f = &*self.f;
        let df = self.df.as_deref().map(|d| d as &dyn Fn(UnitQuat, ImQuat) -> Quat);
        directional_derivative(&|p| f(p), df, g, x, mode)
    }

    fn checked_value(&self, g: UnitQuat) -> Result<Quat> {
        let f = self.value(g);
        if !f.is_finite() || f.norm() < VANISHING {
            return Err(Error::Degenerate(format!("gauge function vanishes at {g}")));
        }
        Ok(f)
    }
}

/// Clifford multiplication of the tangent vector with component `x` on a
/// spinor value: `x·f`.
pub fn clifford_action(x: ImQuat, f_val: Quat) -> Quat {
    Quat::from(x) * f_val
}

/// Gauge component of `∇_X Ψ`: `X(f) + ½·x·f(g)`.
pub fn spinor_covariant_derivative(
    psi: &SpinorField,
    g: UnitQuat,
    x: ImQuat,
    mode: DerivMode,
) -> Result<Quat> {
    Ok(psi.differential(g, x, mode)? + clifford_action(x, psi.value(g)) * 0.5)
}

/// `v_a(g) = f(g) a f(g)⁻¹`, failing where `f` vanishes.
pub fn xi_component(psi: &SpinorField, a: ImQuat, g: UnitQuat) -> Result<ImQuat> {
    let f = psi.checked_value(g)?;
    Ok((f * Quat::from(a) * f.inverse()?).im())
}

/// The vector field `ξ_a` with `ξ_a·Ψ = Ψ·a`.
///
/// When `Ψ` has a closed-form differential, so does `ξ_a`:
/// `(v_a)_*(gx) = [M_g(x), v_a]` with `M_g(x) = f_*(gx) f⁻¹`.
pub fn xi_field(psi: &SpinorField, a: ImQuat) -> VectorFieldS3 {
    let fv = psi.clone();
    let field = VectorFieldS3::new(move |g| {
        let f = fv.value(g);
        (f * Quat::from(a) * f.conj()).im() * (1.0 / f.norm_sqr())
    });
    match &psi.df {
        Some(df) => {
            let f = psi.f.clone();
            let df = df.clone();
            field.with_differential(move |g, x| {
                let fg = f(g);
                let finv = fg.conj() * (1.0 / fg.norm_sqr());
                let b = (fg * Quat::from(a) * finv).im();
                let m = (df(g, x) * finv).im();
                m.bracket(b)
            })
        }
        None => field,
    }
}

/// `f_*(gx) f(g)⁻¹` as a quaternion (imaginary when `|f|` is constant).
fn m_map(psi: &SpinorField, g: UnitQuat, x: ImQuat, mode: DerivMode) -> Result<Quat> {
    let finv = psi.checked_value(g)?.inverse()?;
    Ok(psi.differential(g, x, mode)? * finv)
}

/// Matrix of `M_g(x) = f_*(gx) f⁻¹(g)` in the basis `(i, j, k)`.
pub fn m_matrix(psi: &SpinorField, g: UnitQuat, mode: DerivMode) -> Result<Matrix3<f64>> {
    let mut m = Matrix3::zeros();
    for (c, e) in ImQuat::BASIS.iter().enumerate() {
        let col = m_map(psi, g, *e, mode)?.im();
        m.set_column(c, &col.to_vector());
    }
    Ok(m)
}

/// The matrix of `A` together with the largest real part discarded from a column.
fn gk_columns(psi: &SpinorField, g: UnitQuat, mode: DerivMode) -> Result<(Matrix3<f64>, f64)> {
    let finv = psi.checked_value(g)?.inverse()?;
    let mut m = Matrix3::zeros();
    let mut max_re: f64 = 0.0;
    for (c, e) in ImQuat::BASIS.iter().enumerate() {
        let a = spinor_covariant_derivative(psi, g, *e, mode)? * finv;
        max_re = max_re.max(a.re().abs());
        m.set_column(c, &a.im().to_vector());
    }
    Ok((m, max_re))
}

/// Matrix of `A` in the frame `u`: column `j` solves `a·f = eⱼ(f) + ½eⱼ f`.
///
/// A real part above `tol` means `|f|` is not constant near `g`, so `A` is not
/// a tangent endomorphism there.
pub fn gk_endomorphism(psi: &SpinorField, g: UnitQuat, mode: DerivMode, tol: f64) -> Result<Matrix3<f64>> {
    let (m, re) = gk_columns(psi, g, mode)?;
    if re > tol {
        return Err(Error::Consistency(format!(
            "A has real part {re:e} at {g}; |f| is not constant"
        )));
    }
    Ok(m)
}

/// Largest entry of the skew part `(A − Aᵀ)/2`.
pub fn skew_residual(m: &Matrix3<f64>) -> f64 {
    ((m - m.transpose()) * 0.5).abs().max()
}

/// Thresholds used by [`gk_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GkTolerances {
    pub skew: f64,
    pub divergence: f64,
    pub constant_length: f64,
    pub divergence_identity: f64,
    /// Largest λ-fit residual for which `A` counts as `λ·id`.
    pub killing: f64,
}

impl GkTolerances {
    pub fn uniform(tol: f64) -> Self {
        GkTolerances {
            skew: tol,
            divergence: tol,
            constant_length: tol,
            divergence_identity: tol,
            killing: 1e-6,
        }
    }

    /// Defaults: `1e−8` with closed-form differentials, `1e−4` otherwise.
    pub fn for_mode(mode: DerivMode) -> Self {
        if mode.is_analytic() {
            Self::uniform(1e-8)
        } else {
            Self::uniform(1e-4)
        }
    }
}

/// Least-squares fit `A ≈ λ·id` over all samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillingFit {
    pub lambda: f64,
    /// Largest entry of `A − λ·id` over the samples.
    pub residual: f64,
}

impl KillingFit {
    pub fn fit(matrices: &[Matrix3<f64>]) -> Self {
        let traces: Vec<f64> = matrices.iter().map(|m| m.trace()).collect();
        let lambda = pairwise_sum(&traces) / (3.0 * matrices.len().max(1) as f64);
        let residual = matrices
            .iter()
            .map(|m| (m - Matrix3::identity() * lambda).abs().max())
            .fold(0.0, f64::max);
        KillingFit { lambda, residual }
    }

    /// The Killing constant, when the fit residual is within `tol`.
    pub fn killing_constant(&self, tol: f64) -> Option<f64> {
        (self.residual <= tol).then_some(self.lambda)
    }
}

/// Outcome of a generalized-Killing check over a sample set.
#[derive(Clone, Debug)]
pub struct GKReport {
    /// `A` at each sample, in the frame `u`.
    pub endomorphisms: Vec<Matrix3<f64>>,
    pub skew_residual: f64,
    /// `max |δξ_a|` over samples and `a ∈ {i, j, k}`.
    pub divergence_max: f64,
    /// Standard deviation of `|f|` over the samples.
    pub constant_length_residual: f64,
    /// `max |δξ_a + 2 Σᵢ det(eᵢ, M(eᵢ), b)|` with `b = f a f⁻¹`.
    pub divergence_identity_residual: f64,
    /// Largest real part met while solving for the columns of `A`.
    pub real_part_residual: f64,
    pub killing_fit: KillingFit,
    pub tolerances: GkTolerances,
    pub pass: bool,
}

impl GKReport {
    pub fn killing_constant(&self) -> Option<f64> {
        self.killing_fit.killing_constant(self.tolerances.killing)
    }
}

struct GkSample {
    a: Matrix3<f64>,
    re: f64,
    div: f64,
    identity: f64,
    len: f64,
}

fn gk_sample(psi: &SpinorField, xis: &[VectorFieldS3; 3], g: UnitQuat, mode: DerivMode) -> Result<GkSample> {
    let (a, re) = gk_columns(psi, g, mode)?;
    let m = m_matrix(psi, g, mode)?;
    let mut div: f64 = 0.0;
    let mut identity: f64 = 0.0;
    for (idx, a_vec) in ImQuat::BASIS.iter().enumerate() {
        let d = divergence(&xis[idx], g, mode)?;
        let b = xi_component(psi, *a_vec, g)?;
        let proof_side: f64 = (0..3)
            .map(|i| det_triple(ImQuat::BASIS[i], ImQuat::from_vector(&m.column(i).into()), b))
            .sum();
        div = div.max(d.abs());
        identity = identity.max((d + 2.0 * proof_side).abs());
    }
    Ok(GkSample {
        a,
        re,
        div,
        identity,
        len: psi.value(g).norm(),
    })
}

/// Runs the generalized-Killing diagnostics over `samples`.
///
/// Failing residuals are recorded in the report; only configuration and
/// degeneracy problems are returned as errors.
pub fn gk_check(
    psi: &SpinorField,
    samples: &SampleSet,
    mode: DerivMode,
    tol: GkTolerances,
) -> Result<GKReport> {
    let xis = ImQuat::BASIS.map(|a| xi_field(psi, a));
    let per: Vec<GkSample> = samples
        .points
        .par_iter()
        .map(|g| gk_sample(psi, &xis, *g, mode))
        .collect::<Result<_>>()?;

    let lens: Vec<f64> = per.iter().map(|s| s.len).collect();
    let mean_len = pairwise_sum(&lens) / lens.len() as f64;
    let dev: Vec<f64> = lens.iter().map(|l| (l - mean_len).powi(2)).collect();
    let constant_length_residual = (pairwise_sum(&dev) / lens.len() as f64).sqrt();

    let max_of = |f: &dyn Fn(&GkSample) -> f64| per.iter().map(f).fold(0.0, f64::max);
    let skew = max_of(&|s| skew_residual(&s.a));
    let divergence_max = max_of(&|s| s.div);
    let identity = max_of(&|s| s.identity);
    let real_part_residual = max_of(&|s| s.re);

    let endomorphisms: Vec<_> = per.into_iter().map(|s| s.a).collect();
    let killing_fit = KillingFit::fit(&endomorphisms);
    let pass = skew <= tol.skew
        && divergence_max <= tol.divergence
        && constant_length_residual <= tol.constant_length
        && identity <= tol.divergence_identity;
    Ok(GKReport {
        endomorphisms,
        skew_residual: skew,
        divergence_max,
        constant_length_residual,
        divergence_identity_residual: identity,
        real_part_residual,
        killing_fit,
        tolerances: tol,
        pass,
    })
}

/// `Ψ = V·Φ + αΦ` relative to the Killing spinor `Φ = [ũ, c]`.
#[derive(Clone, Debug)]
pub struct VAlphaDecomposition {
    pub v: VectorFieldS3,
    pub alpha: ScalarFieldS3,
    /// Gauge value `c` of the reference spinor `Φ`.
    pub gauge: UnitQuat,
}

/// Decomposition against `Φ = [ũ, 1]`: `α = Re f`, `V = [u, Im f]`.
pub fn decompose_valpha(psi: &SpinorField) -> VAlphaDecomposition {
    decompose_valpha_with_gauge(psi, UnitQuat::IDENTITY)
}

/// Decomposition against `Φ = [ũ, c]`: `f c⁻¹ = α + v`.
pub fn decompose_valpha_with_gauge(psi: &SpinorField, c: UnitQuat) -> VAlphaDecomposition {
    let cinv = c.inverse().quat();
    let (fv, fa) = (psi.f.clone(), psi.f.clone());
    let mut v = VectorFieldS3::new(move |g| (fv(g) * cinv).im());
    let mut alpha = ScalarFieldS3::new(move |g| (fa(g) * cinv).re());
    if let Some(df) = &psi.df {
        let (dv, da) = (df.clone(), df.clone());
        v = v.with_differential(move |g, x| (dv(g, x) * cinv).im());
        alpha = alpha.with_differential(move |g, x| (da(g, x) * cinv).re());
    }
    VAlphaDecomposition { v, alpha, gauge: c }
}

/// Residuals of the unit-length generalized-Killing system at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemResidual {
    /// `α² + |V|² − 1`.
    pub unit_length: f64,
    /// `|−V⌟∗∇_V V − V(α)V + α∇_V V + dα|`.
    pub symmetric_wedge: f64,
    /// `α ∗(V∧dV) + (2α − δV)(1 − α²) + α V(α)`.
    pub scalar: f64,
}

impl SystemResidual {
    pub fn max_abs(&self) -> f64 {
        self.unit_length
            .abs()
            .max(self.symmetric_wedge.abs())
            .max(self.scalar.abs())
    }
}

pub fn system_residual_at(d: &VAlphaDecomposition, g: UnitQuat, mode: DerivMode) -> Result<SystemResidual> {
    let v = d.v.component(g);
    let alpha = d.alpha.value(g);
    let nabla_vv = covariant_derivative(&d.v, TangentS3::new(g, v), mode)?.lie;
    let v_alpha = d.alpha.derivative(g, v, mode)?;
    let grad = gradient(&d.alpha, g, mode)?.lie;
    let second = -hodge_contract(v, nabla_vv) - v * v_alpha + nabla_vv * alpha + grad;
    let dv = exterior_derivative_dual(&d.v, g, mode)?.dual_vector();
    let delta_v = divergence(&d.v, g, mode)?;
    let third = alpha * v.dot(dv) + (2.0 * alpha - delta_v) * (1.0 - alpha * alpha) + alpha * v_alpha;
    Ok(SystemResidual {
        unit_length: alpha * alpha + v.norm_sqr() - 1.0,
        symmetric_wedge: second.norm(),
        scalar: third,
    })
}

/// Per-sample residuals of the `(V, α)` system.
pub fn system_residuals(
    d: &VAlphaDecomposition,
    samples: &SampleSet,
    mode: DerivMode,
) -> Result<Vec<SystemResidual>> {
    samples
        .points
        .par_iter()
        .map(|g| system_residual_at(d, *g, mode))
        .collect()
}

/// The frame `(ξ_i, ξ_j, ξ_k)` of a spinor.
pub fn frame_from_spinor(psi: &SpinorField) -> OrthoFrame {
    OrthoFrame::new(ImQuat::BASIS.map(|a| xi_field(psi, a)))
}

/// A unit spinor recovered pointwise from a frame, with signs made coherent.
#[derive(Clone, Debug)]
pub struct ReconstructedSpinor {
    pub points: Vec<UnitQuat>,
    pub values: Vec<UnitQuat>,
}

impl ReconstructedSpinor {
    /// Largest pointwise distance to `psi`, minimized over the global sign.
    pub fn residual_against(&self, psi: &SpinorField) -> f64 {
        let (mut plus, mut minus): (f64, f64) = (0.0, 0.0);
        for (g, q) in self.points.iter().zip(&self.values) {
            let f = psi.value(*g);
            plus = plus.max((q.quat() - f).norm());
            minus = minus.max((q.quat() + f).norm());
        }
        plus.min(minus)
    }

    /// Extends to a spinor field: the value at `g` is the frame quaternion
    /// with the sign of the nearest reconstructed sample.
    pub fn to_field(&self, frame: &OrthoFrame) -> SpinorField {
        let points = self.points.clone();
        let values = self.values.clone();
        let frame = frame.clone();
        SpinorField::custom("from-frame", move |g| {
            let q = rotation_to_unit_quat(&frame.matrix_at(g))
                .map(|q| q.quat())
                .unwrap_or(Quat::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN));
            let nearest = points
                .iter()
                .enumerate()
                .min_by(|a, b| g.distance(*a.1).total_cmp(&g.distance(*b.1)))
                .map(|(i, _)| i)
                .unwrap_or(0);
            if q.dot(values[nearest].quat()) < 0.0 {
                -q
            } else {
                q
            }
        })
    }
}

/// Inverts [`frame_from_spinor`] on the samples, up to a global sign.
///
/// The frame must be orthonormal, positively oriented and divergence-free to
/// within `tol`. Signs are propagated along a nearest-neighbour spanning tree
/// of the samples so the result varies continuously.
pub fn spinor_from_frame(
    frame: &OrthoFrame,
    samples: &SampleSet,
    mode: DerivMode,
    tol: f64,
) -> Result<ReconstructedSpinor> {
    frame.check(&samples.points, tol.max(1e-9))?;
    for g in &samples.points {
        for (idx, field) in frame.fields.iter().enumerate() {
            let d = divergence(field, *g, mode)?;
            if d.abs() > tol {
                return Err(Error::Domain(format!(
                    "frame field {idx} has divergence {d:e} at {g}"
                )));
            }
        }
    }
    let raw: Vec<UnitQuat> = samples
        .points
        .par_iter()
        .map(|g| rotation_to_unit_quat(&frame.matrix_at(*g)))
        .collect::<Result<_>>()?;
    let values = propagate_signs(&samples.points, raw);
    Ok(ReconstructedSpinor {
        points: samples.points.clone(),
        values,
    })
}

/// Prim-style walk: each newly reached point takes the sign that agrees
/// with its nearest already-fixed neighbour.
fn propagate_signs(points: &[UnitQuat], mut values: Vec<UnitQuat>) -> Vec<UnitQuat> {
    let n = points.len();
    if n == 0 {
        return values;
    }
    let mut fixed = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut current = 0;
    fixed[0] = true;
    for _ in 1..n {
        for j in 0..n {
            if !fixed[j] {
                let d = points[current].distance(points[j]);
                if d < best[j].0 {
                    best[j] = (d, current);
                }
            }
        }
        let next = (0..n)
            .filter(|j| !fixed[*j])
            .min_by(|a, b| best[*a].0.total_cmp(&best[*b].0))
            .expect("unfixed point remains");
        let parent = best[next].1;
        if values[next].quat().dot(values[parent].quat()) < 0.0 {
            values[next] = values[next].neg();
        }
        fixed[next] = true;
        current = next;
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::exp_im;
    use crate::sampling::uniform_s3;

    fn pts(n: usize) -> SampleSet {
        uniform_s3(2024, n)
    }

    #[test]
    fn clifford_examples() {
        assert_eq!(clifford_action(ImQuat::I, Quat::ONE), Quat::I);
        let f = Quat::new(0.2, -0.4, 0.1, 0.9);
        let jk = clifford_action(ImQuat::J, clifford_action(ImQuat::K, f));
        assert!((jk - clifford_action(ImQuat::I, f)).norm() < 1e-15);
        let xyz = clifford_action(ImQuat::I, clifford_action(ImQuat::J, clifford_action(ImQuat::K, f)));
        assert!((xyz + f).norm() < 1e-15);
    }

    #[test]
    fn covariant_derivative_of_killing_spinors() {
        let g = exp_im(ImQuat::new(0.5, 0.1, -0.8));
        let x = ImQuat::new(0.3, -0.2, 0.9);
        let one = SpinorField::constant(Quat::ONE);
        let d = spinor_covariant_derivative(&one, g, x, DerivMode::Analytic).unwrap();
        assert!((d - Quat::from(x) * 0.5).norm() < 1e-15);
        let inv = SpinorField::inverse();
        let d = spinor_covariant_derivative(&inv, g, x, DerivMode::Analytic).unwrap();
        let expect = -(Quat::from(x) * g.inverse().quat()) * 0.5;
        assert!((d - expect).norm() < 1e-15);
    }

    #[test]
    fn covariant_derivative_conj_b_against_fd() {
        let psi = SpinorField::conj_b(ImQuat::J);
        let a = spinor_covariant_derivative(&psi, UnitQuat::IDENTITY, ImQuat::I, DerivMode::Analytic).unwrap();
        let n = spinor_covariant_derivative(&psi, UnitQuat::IDENTITY, ImQuat::I, DerivMode::fd()).unwrap();
        assert!((a - n).norm() < 1e-7, "{a} vs {n}");
        // [j, i] + ½ i j = −2k + ½k
        assert!((a - Quat::K * -1.5).norm() < 1e-15);
    }

    #[test]
    fn xi_fields_of_examples() {
        let b = ImQuat::new(0.0, 0.6, 0.8);
        let b_q = UnitQuat::new(Quat::from(b)).unwrap();
        for g in pts(30).iter() {
            for a in ImQuat::BASIS {
                let v1 = xi_field(&SpinorField::constant(Quat::ONE), a).component(*g);
                assert!((v1 - a).norm() < 1e-15);
                // ξ_a = a g  ⇒  v_a = g⁻¹ a g
                let v2 = xi_field(&SpinorField::inverse(), a).component(*g);
                assert!((v2 - g.inverse().rotate(a)).norm() < 1e-14);
                // ξ_a = g b g⁻¹ a g b⁻¹  ⇒  v_a = b g⁻¹ a g b⁻¹
                let v4 = xi_field(&SpinorField::b_inverse(b), a).component(*g);
                let expect = (b_q * g.inverse()).rotate(a);
                assert!((v4 - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn xi_defining_identity_and_orientation() {
        let fams = [
            SpinorField::conj_b(ImQuat::K),
            SpinorField::random_poly(3, &pts(50).points),
        ];
        for psi in &fams {
            for g in pts(40).iter() {
                let f = psi.value(*g);
                let vs = ImQuat::BASIS.map(|a| xi_component(psi, a, *g).unwrap());
                for (a, v) in ImQuat::BASIS.iter().zip(&vs) {
                    assert!((Quat::from(*v) * f - f * Quat::from(*a)).norm() < 1e-12);
                }
                assert!((det_triple(vs[0], vs[1], vs[2]) - 1.0).abs() < 1e-12);
                assert!(vs[0].dot(vs[1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xi_component_rejects_vanishing_gauge() {
        let psi = SpinorField::constant(Quat::ZERO);
        assert!(matches!(
            xi_component(&psi, ImQuat::I, UnitQuat::IDENTITY),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn m_matrix_examples() {
        let g = exp_im(ImQuat::I * 0.5);
        let zero = m_matrix(&SpinorField::constant(Quat::ONE), g, DerivMode::Analytic).unwrap();
        assert_eq!(zero, Matrix3::zeros());

        let b = ImQuat::J;
        let psi = SpinorField::conj_b(b);
        for g in pts(25).iter() {
            let m = m_matrix(&psi, *g, DerivMode::Analytic).unwrap();
            let fd = m_matrix(&psi, *g, DerivMode::fd()).unwrap();
            assert!((m - fd).abs().max() < 1e-7);
            assert!(skew_residual(&m) < 1e-14);
            // x ↦ h x h⁻¹ − x
            let h = UnitQuat::new(psi.value(*g)).unwrap();
            let expect = h.rotation_matrix() - Matrix3::identity();
            assert!((m - expect).abs().max() < 1e-14);
        }

        let ident = m_matrix(&SpinorField::identity(), g, DerivMode::Analytic).unwrap();
        assert!((ident - g.rotation_matrix()).abs().max() < 1e-15);
        assert!(skew_residual(&ident) > 0.5);
    }

    #[test]
    fn gk_endomorphism_examples() {
        let g = exp_im(ImQuat::new(-0.3, 0.9, 0.2));
        let a = gk_endomorphism(&SpinorField::constant(Quat::ONE), g, DerivMode::Analytic, 1e-8).unwrap();
        assert!((a - Matrix3::identity() * 0.5).abs().max() < 1e-15);
        let a = gk_endomorphism(&SpinorField::inverse(), g, DerivMode::Analytic, 1e-8).unwrap();
        assert!((a + Matrix3::identity() * 0.5).abs().max() < 1e-15);
        let a = gk_endomorphism(&SpinorField::conj_b(ImQuat::K), g, DerivMode::Analytic, 1e-8).unwrap();
        assert!(skew_residual(&a) < 1e-14);
        assert!((a - Matrix3::identity() * (a.trace() / 3.0)).abs().max() > 0.5);
    }

    #[test]
    fn gk_endomorphism_rejects_non_constant_length() {
        let psi = SpinorField::custom("grow", |g| Quat::ONE * (2.0 + g.quat().x))
            .with_differential(|g, x| Quat::ONE * (g.quat() * Quat::from(x)).x);
        let g = exp_im(ImQuat::new(0.1, 0.2, 0.3));
        let err = gk_endomorphism(&psi, g, DerivMode::Analytic, 1e-8).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    #[test]
    fn gk_check_families() {
        let s = pts(200);
        let r = gk_check(&SpinorField::constant(Quat::ONE), &s, DerivMode::Analytic, GkTolerances::for_mode(DerivMode::Analytic)).unwrap();
        assert!(r.pass);
        assert_eq!(r.killing_constant(), Some(0.5));

        let r = gk_check(&SpinorField::conj_b(ImQuat::J), &s, DerivMode::Analytic, GkTolerances::for_mode(DerivMode::Analytic)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.killing_constant(), None);

        let r = gk_check(&SpinorField::identity(), &s, DerivMode::Analytic, GkTolerances::for_mode(DerivMode::Analytic)).unwrap();
        assert!(!r.pass);
        assert!(r.skew_residual >= 0.1);
        assert!(r.divergence_identity_residual < 1e-12);
    }

    #[test]
    fn valpha_examples() {
        let s = pts(50);
        let d = decompose_valpha(&SpinorField::constant(Quat::ONE));
        for g in s.iter() {
            assert_eq!(d.alpha.value(*g), 1.0);
            assert_eq!(d.v.component(*g), ImQuat::ZERO);
        }
        let d = decompose_valpha(&SpinorField::conj_b(ImQuat::I));
        for g in s.iter() {
            assert!(d.alpha.value(*g).abs() < 1e-15);
            assert!((d.v.component(*g).norm() - 1.0).abs() < 1e-15);
        }
        let theta: f64 = 0.7;
        let h = SpinorField::conj_b(ImQuat::K);
        let mixed = SpinorField::custom("mixed", move |g| Quat::ONE * theta.cos() + h.value(g) * theta.sin());
        let d = decompose_valpha(&mixed);
        for g in s.iter() {
            assert!((d.alpha.value(*g) - theta.cos()).abs() < 1e-15);
            assert!((d.v.component(*g).norm() - theta.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn valpha_gauge_parameter() {
        let c = exp_im(ImQuat::new(0.2, 0.4, -0.1));
        let psi = SpinorField::constant(c.quat());
        let d = decompose_valpha_with_gauge(&psi, c);
        let g = exp_im(ImQuat::J);
        assert!((d.alpha.value(g) - 1.0).abs() < 1e-15);
        assert!(d.v.component(g).norm() < 1e-15);
    }

    #[test]
    fn system_residuals_on_first_family_are_exact() {
        let d = decompose_valpha(&SpinorField::constant(Quat::ONE));
        for r in system_residuals(&d, &pts(50), DerivMode::Analytic).unwrap() {
            assert_eq!(r.max_abs(), 0.0);
        }
    }

    #[test]
    fn system_residuals_negative_control() {
        let d = decompose_valpha(&SpinorField::identity());
        let worst = system_residuals(&d, &pts(100), DerivMode::Analytic)
            .unwrap()
            .iter()
            .map(SystemResidual::max_abs)
            .fold(0.0, f64::max);
        assert!(worst >= 0.05);
    }

    #[test]
    fn frame_round_trips() {
        let s = pts(150);
        for psi in [
            SpinorField::constant(Quat::ONE),
            SpinorField::inverse(),
            SpinorField::conj_b(ImQuat::J),
        ] {
            let frame = frame_from_spinor(&psi);
            let rec = spinor_from_frame(&frame, &s, DerivMode::Analytic, 1e-8).unwrap();
            assert!(rec.residual_against(&psi) < 1e-9, "{:?}", psi.family);
            let field = rec.to_field(&frame);
            let g = exp_im(ImQuat::new(0.3, 0.3, 0.3));
            let diff = (field.value(g) - psi.value(g)).norm().min((field.value(g) + psi.value(g)).norm());
            assert!(diff < 1e-9);
        }
    }

    #[test]
    fn frame_with_divergence_is_rejected() {
        let s = pts(20);
        let psi = SpinorField::random_poly(1, &s.points);
        let frame = frame_from_spinor(&psi);
        assert!(matches!(
            spinor_from_frame(&frame, &s, DerivMode::Analytic, 1e-8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn frame_with_bad_orientation_is_rejected() {
        let frame = OrthoFrame::new([ImQuat::J, ImQuat::I, ImQuat::K].map(VectorFieldS3::left_invariant));
        assert!(spinor_from_frame(&frame, &pts(5), DerivMode::Analytic, 1e-8).is_err());
    }

    #[test]
    fn random_poly_is_deterministic() {
        let probe = pts(30).points;
        let a = SpinorField::random_poly(7, &probe);
        let b = SpinorField::random_poly(7, &probe);
        let g = exp_im(ImQuat::new(1.0, 0.5, 0.25));
        assert_eq!(a.value(g), b.value(g));
        assert!((a.value(g).norm() - 1.0).abs() < 1e-15);
    }
}
