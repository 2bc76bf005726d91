//! The homogeneous nearly Kähler structure on S³ × S³.
//!
//! Tangent vectors at `(g₁, g₂)` are stored by their left-trivialized Lie
//! components `(x₁, x₂) = (g₁⁻¹X₁, g₂⁻¹X₂)`. The inner product on Im ℍ is
//! the rescaled negative Killing form `−B/12`, which equals `κ·dot` with
//! `κ = 2/3`; all radii and volumes below inherit this normalization.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quat::{ImQuat, Quat, UnitQuat};
use crate::s3calc::DerivMode;
use crate::sampling::{MCEstimate, SampleSet};
use crate::spinor::SpinorField;

/// Ratio between the `−B₀` inner product and the Euclidean dot on Im ℍ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaConstant(pub f64);

impl KappaConstant {
    /// `κ = −(1/12)·tr(ad_x ∘ ad_x)` for a unit `x`, from the matrix of `ad_x`.
    pub fn from_ad_trace(x: ImQuat) -> Self {
        let x = x.normalized().expect("κ needs a nonzero Lie algebra element");
        let ad = ad_matrix(x);
        KappaConstant(-(ad * ad).trace() / 12.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Matrix of `y ↦ [x, y]` in the basis `(i, j, k)`.
pub fn ad_matrix(x: ImQuat) -> Matrix3<f64> {
    let cols: Vec<_> = ImQuat::BASIS.iter().map(|e| x.bracket(*e).to_vector()).collect();
    Matrix3::from_columns(&cols)
}

/// `κ`, computed once from the trace of `ad_i²`.
pub fn kappa() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| {
        let k = KappaConstant::from_ad_trace(ImQuat::I).value();
        assert!((k - 2.0 / 3.0).abs() < 1e-14, "unexpected Killing-form ratio {k}");
        k
    })
}

/// `⟨x, y⟩ = −B₀(x, y) = κ·dot(x, y)`.
pub fn killing_inner(x: ImQuat, y: ImQuat) -> f64 {
    kappa() * x.dot(y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductPoint {
    pub g1: UnitQuat,
    pub g2: UnitQuat,
}

impl ProductPoint {
    pub fn new(g1: UnitQuat, g2: UnitQuat) -> Self {
        ProductPoint { g1, g2 }
    }

    pub fn distance(self, o: ProductPoint) -> f64 {
        self.g1.distance(o.g1).max(self.g2.distance(o.g2))
    }
}

impl fmt::Display for ProductPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.g1, self.g2)
    }
}

/// The tangent vector `(g₁x₁, g₂x₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductTangent {
    pub base: ProductPoint,
    pub x1: ImQuat,
    pub x2: ImQuat,
}

impl ProductTangent {
    pub fn new(base: ProductPoint, x1: ImQuat, x2: ImQuat) -> Self {
        ProductTangent { base, x1, x2 }
    }
}

fn same_base(a: &ProductTangent, b: &ProductTangent) -> Result<()> {
    const TOL: f64 = 1e-12;
    if a.base.distance(b.base) > TOL {
        return Err(Error::Domain(format!(
            "tangent vectors live at different points {} and {}",
            a.base, b.base
        )));
    }
    Ok(())
}

/// `g = ⅓(2⟨x₁,y₁⟩ + 2⟨x₂,y₂⟩ − ⟨x₁,y₂⟩ − ⟨x₂,y₁⟩)`.
pub fn nk_metric(a: &ProductTangent, b: &ProductTangent) -> Result<f64> {
    same_base(a, b)?;
    Ok(metric_lie(a.x1, a.x2, b.x1, b.x2))
}

fn metric_lie(x1: ImQuat, x2: ImQuat, y1: ImQuat, y2: ImQuat) -> f64 {
    (2.0 * killing_inner(x1, y1) + 2.0 * killing_inner(x2, y2)
        - killing_inner(x1, y2)
        - killing_inner(x2, y1))
        / 3.0
}

/// `J(x₁, x₂) = (x₁ − 2x₂, 2x₁ − x₂)/√3`.
pub fn nk_j(a: &ProductTangent) -> ProductTangent {
    let s = 1.0 / 3f64.sqrt();
    ProductTangent::new(a.base, (a.x1 - a.x2 * 2.0) * s, (a.x1 * 2.0 - a.x2) * s)
}

/// `Ω = (⟨x₁, y₂⟩ − ⟨x₂, y₁⟩)/√3` on left-trivialized components.
pub fn nk_omega(a: &ProductTangent, b: &ProductTangent) -> Result<f64> {
    same_base(a, b)?;
    Ok(omega_lie(a.x1, a.x2, b.x1, b.x2))
}

fn omega_lie(x1: ImQuat, x2: ImQuat, y1: ImQuat, y2: ImQuat) -> f64 {
    (killing_inner(x1, y2) - killing_inner(x2, y1)) / 3f64.sqrt()
}

/// The built-in Lagrangian families, each parametrized by `g ∈ S³`.
#[derive(Clone, Debug)]
pub enum LagrangianFamily {
    /// `{(g, 1)}`.
    Gamma1,
    /// `{(g, g)}`.
    Gamma2,
    /// `{(g, g⁻¹bg)}`.
    Gamma3(ImQuat),
    /// `{(g, gb)}`.
    Gamma4(ImQuat),
    /// `{(gag⁻¹, gbg⁻¹)}` with `a ⊥ b`.
    Lab(ImQuat, ImQuat),
    /// The graph `{(g, f(g)⁻¹)}` of a unit-valued map `f`.
    GraphInv(SpinorField),
}

const PARAM_TOL: f64 = 1e-9;

fn check_unit(name: &str, v: ImQuat) -> Result<()> {
    if (v.norm() - 1.0).abs() > PARAM_TOL {
        return Err(Error::Domain(format!("parameter {name} = {v} is not a unit vector")));
    }
    Ok(())
}

impl LagrangianFamily {
    pub fn gamma3(b: ImQuat) -> Result<Self> {
        check_unit("b", b)?;
        Ok(LagrangianFamily::Gamma3(b))
    }

    pub fn gamma4(b: ImQuat) -> Result<Self> {
        check_unit("b", b)?;
        Ok(LagrangianFamily::Gamma4(b))
    }

    pub fn lab(a: ImQuat, b: ImQuat) -> Result<Self> {
        check_unit("a", a)?;
        check_unit("b", b)?;
        if a.dot(b).abs() > PARAM_TOL {
            return Err(Error::Domain(format!("parameters a = {a} and b = {b} are not orthogonal")));
        }
        Ok(LagrangianFamily::Lab(a, b))
    }

    pub fn name(&self) -> String {
        match self {
            LagrangianFamily::Gamma1 => "gamma1".into(),
            LagrangianFamily::Gamma2 => "gamma2".into(),
            LagrangianFamily::Gamma3(b) => format!("gamma3{b}"),
            LagrangianFamily::Gamma4(b) => format!("gamma4{b}"),
            LagrangianFamily::Lab(a, b) => format!("lab{a}{b}"),
            LagrangianFamily::GraphInv(f) => format!("graphinv:{}", f.family),
        }
    }

    /// Lie-algebra direction of the Hopf fibre in the parameter frame, for
    /// the families whose induced metric is of Berger type.
    pub fn fiber_axis(&self, g: UnitQuat) -> Option<ImQuat> {
        match self {
            LagrangianFamily::Gamma3(b) => Some(g.inverse().rotate(*b)),
            LagrangianFamily::Gamma4(b) => Some(*b),
            _ => None,
        }
    }
}

fn as_unit(q: Quat, what: &str) -> Result<UnitQuat> {
    if !q.is_finite() || (q.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Degenerate(format!("{what} = {q} is not on S3")));
    }
    Ok(UnitQuat::renormalize(q))
}

fn imag_unit(v: ImQuat) -> UnitQuat {
    UnitQuat::renormalize(Quat::from(v))
}

/// The point of the family over the parameter `g`.
pub fn family_point(family: &LagrangianFamily, g: UnitQuat) -> Result<ProductPoint> {
    Ok(match family {
        LagrangianFamily::Gamma1 => ProductPoint::new(g, UnitQuat::IDENTITY),
        LagrangianFamily::Gamma2 => ProductPoint::new(g, g),
        LagrangianFamily::Gamma3(b) => ProductPoint::new(g, imag_unit(g.inverse().rotate(*b))),
        LagrangianFamily::Gamma4(b) => ProductPoint::new(g, g * imag_unit(*b)),
        LagrangianFamily::Lab(a, b) => ProductPoint::new(imag_unit(g.rotate(*a)), imag_unit(g.rotate(*b))),
        LagrangianFamily::GraphInv(f) => {
            let fv = as_unit(f.value(g), "f(g)")?;
            ProductPoint::new(g, fv.inverse())
        }
    })
}

/// Image of `g·x` under the family's parametrization, in Lie components.
///
/// With [`DerivMode::Analytic`] the closed forms are used:
/// * `Γ₁: (x, 0)`, `Γ₂: (x, x)`;
/// * `Γ₃(b): (x, x − h⁻¹xh)` with `h = g⁻¹bg`;
/// * `Γ₄(b): (x, b⁻¹xb)`;
/// * `L(a, b): (g a⁻¹[x,a] g⁻¹, g b⁻¹[x,b] g⁻¹)`;
/// * graph of `f⁻¹`: `(x, −f_*(gx) f(g)⁻¹)`.
///
/// Other modes differentiate [`family_point`] along `g·exp(tx)`.
pub fn family_tangent(
    family: &LagrangianFamily,
    g: UnitQuat,
    x: ImQuat,
    mode: DerivMode,
) -> Result<ProductTangent> {
    let base = family_point(family, g)?;
    let (x1, x2) = match mode {
        DerivMode::Analytic => analytic_tangent(family, g, x)?,
        DerivMode::Fd { h } => fd_tangent(family, g, x, h, base)?,
        DerivMode::Richardson { h } => {
            let (c1, c2) = fd_tangent(family, g, x, h, base)?;
            let (f1, f2) = fd_tangent(family, g, x, 0.5 * h, base)?;
            ((f1 * 4.0 - c1) * (1.0 / 3.0), (f2 * 4.0 - c2) * (1.0 / 3.0))
        }
    };
    Ok(ProductTangent::new(base, x1, x2))
}

fn analytic_tangent(family: &LagrangianFamily, g: UnitQuat, x: ImQuat) -> Result<(ImQuat, ImQuat)> {
    Ok(match family {
        LagrangianFamily::Gamma1 => (x, ImQuat::ZERO),
        LagrangianFamily::Gamma2 => (x, x),
        LagrangianFamily::Gamma3(b) => {
            let h = imag_unit(g.inverse().rotate(*b));
            (x, x - h.inverse().rotate(x))
        }
        LagrangianFamily::Gamma4(b) => (x, imag_unit(*b).inverse().rotate(x)),
        LagrangianFamily::Lab(a, b) => {
            let lie = |c: ImQuat| {
                let inner = (Quat::from(c).conj() * Quat::from(x.bracket(c))).im();
                g.rotate(inner)
            };
            (lie(*a), lie(*b))
        }
        LagrangianFamily::GraphInv(f) => {
            let finv = as_unit(f.value(g), "f(g)")?.inverse().quat();
            let df = f.differential(g, x, DerivMode::Analytic)?;
            (x, -(df * finv).im())
        }
    })
}

fn fd_tangent(
    family: &LagrangianFamily,
    g: UnitQuat,
    x: ImQuat,
    h: f64,
    base: ProductPoint,
) -> Result<(ImQuat, ImQuat)> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {h}")));
    }
    let plus = family_point(family, g.right_exp(x * h))?;
    let minus = family_point(family, g.right_exp(x * -h))?;
    let lie = |p: UnitQuat, m: UnitQuat, at: UnitQuat| {
        let d = (p.quat() - m.quat()) * (0.5 / h);
        (at.inverse().quat() * d).im()
    };
    Ok((lie(plus.g1, minus.g1, base.g1), lie(plus.g2, minus.g2, base.g2)))
}

/// Tangent images of the basis `(i, j, k)` at `g`.
pub fn basis_tangents(family: &LagrangianFamily, g: UnitQuat, mode: DerivMode) -> Result<[ProductTangent; 3]> {
    let t0 = family_tangent(family, g, ImQuat::I, mode)?;
    let t1 = family_tangent(family, g, ImQuat::J, mode)?;
    let t2 = family_tangent(family, g, ImQuat::K, mode)?;
    Ok([t0, t1, t2])
}

/// `max |Ω(T(g, x), T(g, y))|` over samples and basis pairs.
pub fn lagrangian_residual(family: &LagrangianFamily, samples: &SampleSet, mode: DerivMode) -> Result<f64> {
    let per: Vec<f64> = samples
        .points
        .par_iter()
        .map(|g| -> Result<f64> {
            let t = basis_tangents(family, *g, mode)?;
            let mut worst: f64 = 0.0;
            for a in &t {
                for b in &t {
                    worst = worst.max(nk_omega(a, b)?.abs());
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().fold(0.0, f64::max))
}

/// Gram matrix of the induced metric on the basis tangents at `g`.
pub fn induced_gram(family: &LagrangianFamily, g: UnitQuat, mode: DerivMode) -> Result<Matrix3<f64>> {
    let t = basis_tangents(family, g, mode)?;
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = nk_metric(&t[i], &t[j])?;
        }
    }
    Ok(m)
}

/// Induced geometry of a family, up to isometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Classification {
    /// Round sphere `S³(radius)`.
    Round { radius: f64 },
    /// `S³(c_base)` with the Hopf fibre length scaled to `c_fiber`.
    Berger {
        c_base: f64,
        c_fiber: f64,
        /// Largest misalignment between the simple eigenvector and the
        /// family's known fibre axis (`None` if the family has none).
        axis_residual: Option<f64>,
    },
    Other,
}

impl Classification {
    pub fn kind(&self) -> &'static str {
        match self {
            Classification::Round { .. } => "round",
            Classification::Berger { .. } => "berger",
            Classification::Other => "other",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            Classification::Round { radius } => Some(*radius),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GramReport {
    pub grams: Vec<Matrix3<f64>>,
    pub classification: Classification,
    /// Spread of the eigenvalues across samples and within the degenerate pair.
    pub fit_residual: f64,
    /// `vol / vol(S³)` from the parameter-domain pullback.
    pub volume_ratio: f64,
    pub lagrangian_residual: f64,
}

/// Sorted eigenvalues with the corresponding unit eigenvectors.
fn sorted_eigenvalues(m: &Matrix3<f64>) -> [f64; 3] {
    let mut vals: [f64; 3] = SymmetricEigen::new(*m).eigenvalues.into();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Unit eigenvector of a simple eigenvalue `lambda` of a symmetric 3×3 matrix.
///
/// The iterative solver loses accuracy in the eigenvectors when the other two
/// eigenvalues nearly coincide, so take the longest cross product of rows of `m − λ`.
fn simple_eigenvector(m: &Matrix3<f64>, lambda: f64) -> ImQuat {
    let r = m - Matrix3::identity() * lambda;
    let rows: [ImQuat; 3] = std::array::from_fn(|i| ImQuat::new(r[(i, 0)], r[(i, 1)], r[(i, 2)]));
    let best = [(0, 1), (0, 2), (1, 2)]
        .map(|(i, j)| rows[i].cross(rows[j]))
        .into_iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("three candidates");
    best * (1.0 / best.norm())
}

fn nondegenerate(m: &Matrix3<f64>, g: UnitQuat) -> Result<()> {
    let det = m.determinant();
    if !(det > 1e-12) {
        return Err(Error::Degenerate(format!("immersion degenerates at {g} (det Gram = {det:e})")));
    }
    Ok(())
}

/// Fits the induced metric to a round or Berger sphere.
pub fn fit_geometry(
    family: &LagrangianFamily,
    samples: &SampleSet,
    mode: DerivMode,
    tol: f64,
) -> Result<GramReport> {
    let grams: Vec<Matrix3<f64>> = samples
        .points
        .par_iter()
        .map(|g| {
            let m = induced_gram(family, *g, mode)?;
            nondegenerate(&m, *g)?;
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let eigen: Vec<[f64; 3]> = grams.iter().map(sorted_eigenvalues).collect();

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for vals in &eigen {
        for k in 0..3 {
            lo[k] = lo[k].min(vals[k]);
            hi[k] = hi[k].max(vals[k]);
        }
    }
    let spread = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    let mean: [f64; 3] = std::array::from_fn(|k| 0.5 * (lo[k] + hi[k]));
    let gap_low = mean[1] - mean[0];
    let gap_high = mean[2] - mean[1];

    let (classification, fit_residual) = if spread > tol {
        (Classification::Other, spread)
    } else if gap_low.max(gap_high) <= tol {
        let lambda = (mean[0] + mean[1] + mean[2]) / 3.0;
        let res = spread.max(gap_low + gap_high);
        (Classification::Round { radius: lambda.sqrt() }, res)
    } else if gap_low <= tol || gap_high <= tol {
        // simple eigenvalue sits at the opposite end of the degenerate pair
        let (simple, pair, pair_gap) = if gap_low <= tol {
            (2, 0.5 * (mean[0] + mean[1]), gap_low)
        } else {
            (0, 0.5 * (mean[1] + mean[2]), gap_high)
        };
        let axis_residual = samples.points.first().and_then(|g| family.fiber_axis(*g)).map(|_| {
            samples
                .points
                .iter()
                .zip(grams.iter().zip(&eigen))
                .map(|(g, (m, vals))| {
                    let axis = family.fiber_axis(*g).expect("family has a fibre axis");
                    let v = simple_eigenvector(m, vals[simple]);
                    (v - axis).norm().min((v + axis).norm())
                })
                .fold(0.0, f64::max)
        });
        let res = spread.max(pair_gap);
        let classification = match axis_residual {
            Some(a) if a > 1e-6 => Classification::Other,
            _ => Classification::Berger {
                c_base: pair.sqrt(),
                c_fiber: mean[simple].sqrt(),
                axis_residual,
            },
        };
        (classification, res)
    } else {
        (Classification::Other, spread.max(gap_low.min(gap_high)))
    };

    let volume = volume_from_grams(&grams)?;
    let lagrangian = lagrangian_residual(family, samples, mode)?;
    Ok(GramReport {
        grams,
        classification,
        fit_residual,
        volume_ratio: volume.mean,
        lagrangian_residual: lagrangian,
    })
}

/// The Gram matrix of a Berger-type family turns with `g`, but its
/// determinant does not, so the shortcut tests the integrand itself.
fn volume_from_grams(grams: &[Matrix3<f64>]) -> Result<MCEstimate> {
    const CONSTANT_INTEGRAND: f64 = 1e-10;
    if grams.is_empty() {
        return Err(Error::Domain("empty sample set".into()));
    }
    let values: Vec<f64> = grams.iter().map(|m| m.determinant().sqrt()).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= CONSTANT_INTEGRAND {
        return Ok(MCEstimate {
            mean: values[0],
            standard_error: 0.0,
            n: values.len(),
        });
    }
    Ok(MCEstimate::from_values(&values))
}

fn mc_volume(grams: &[Matrix3<f64>]) -> MCEstimate {
    let values: Vec<f64> = grams.iter().map(|m| m.determinant().sqrt()).collect();
    MCEstimate::from_values(&values)
}

/// `vol(F)/vol(S³)` as the uniform average of `√det G` over the parameter
/// sphere, short-circuited to the exact value when `√det G` is constant.
pub fn volume_ratio(family: &LagrangianFamily, samples: &SampleSet, mode: DerivMode) -> Result<MCEstimate> {
    let grams = gram_samples(family, samples, mode)?;
    volume_from_grams(&grams)
}

/// Plain Monte Carlo average of `√det G`, without the constant-integrand shortcut.
pub fn volume_ratio_mc(family: &LagrangianFamily, samples: &SampleSet, mode: DerivMode) -> Result<MCEstimate> {
    let grams = gram_samples(family, samples, mode)?;
    Ok(mc_volume(&grams))
}

fn gram_samples(family: &LagrangianFamily, samples: &SampleSet, mode: DerivMode) -> Result<Vec<Matrix3<f64>>> {
    samples
        .points
        .par_iter()
        .map(|g| induced_gram(family, *g, mode))
        .collect()
}

/// Whether `r` is of the form `k/3` with an integer `k ≥ 2`.
pub fn admissible_round_radius(r: f64, tol: f64) -> (bool, Option<i64>) {
    let k = (3.0 * r).round();
    if r > 0.0 && (3.0 * r - k).abs() <= tol && k >= 2.0 {
        (true, Some(k as i64))
    } else {
        (false, None)
    }
}

/// Families sharing a volume class.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeClass {
    pub volume_ratio: f64,
    pub members: Vec<String>,
}

/// Groups named reports by volume ratio; each report must be Lagrangian.
pub fn component_invariant(
    reports: &[(String, GramReport)],
    volume_tol: f64,
    lagrangian_tol: f64,
) -> Result<Vec<VolumeClass>> {
    let mut classes: Vec<VolumeClass> = Vec::new();
    for (name, rep) in reports {
        if rep.lagrangian_residual > lagrangian_tol {
            return Err(Error::Precondition(format!(
                "{name} is not Lagrangian (max |Ω| = {:e})",
                rep.lagrangian_residual
            )));
        }
        match classes
            .iter_mut()
            .find(|c| (c.volume_ratio - rep.volume_ratio).abs() <= volume_tol)
        {
            Some(c) => c.members.push(name.clone()),
            None => classes.push(VolumeClass {
                volume_ratio: rep.volume_ratio,
                members: vec![name.clone()],
            }),
        }
    }
    classes.sort_by(|a, b| a.volume_ratio.total_cmp(&b.volume_ratio));
    Ok(classes)
}
