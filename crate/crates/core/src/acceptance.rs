//! The acceptance checks, one function per criterion.
//!
//! Each check records its metrics by name and a pass flag computed from
//! them. A numerical error inside a check fails that criterion only.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Matrix3;

use crate::error::Result;
use crate::nkgeom::{
    admissible_round_radius, basis_tangents, component_invariant, family_tangent, fit_geometry,
    kappa, lagrangian_residual, nk_j, nk_metric, nk_omega, volume_ratio, volume_ratio_mc,
    Classification, KappaConstant, LagrangianFamily, ProductPoint, ProductTangent,
};
use crate::quat::{rotation_to_unit_quat, ImQuat, Quat};
use crate::s3calc::{
    covariant_derivative, exterior_derivative_dual, hodge_contract, DerivMode, ScalarFieldS3,
    TangentS3, TwoForm, VectorFieldS3,
};
use crate::sampling::{point_at, uniform_s3, SampleSet, DEFAULT_RESIDUAL_SAMPLES, DEFAULT_VOLUME_SAMPLES};
use crate::spinor::{
    decompose_valpha, frame_from_spinor, gk_check, gk_endomorphism, spinor_from_frame,
    system_residuals, xi_field, GkTolerances, SpinorField,
};

pub const CRITERIA: usize = 13;

#[derive(Clone, Copy, Debug)]
pub struct AcceptanceConfig {
    pub seed: u64,
    pub residual_samples: usize,
    pub volume_samples: usize,
    /// Number of random parameter draws per parametrized family.
    pub parameter_draws: u64,
    /// Number of random non-example spinors for the divergence identity.
    pub random_spinors: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            seed: 20_240_601,
            residual_samples: DEFAULT_RESIDUAL_SAMPLES,
            volume_samples: DEFAULT_VOLUME_SAMPLES,
            parameter_draws: 5,
            random_spinors: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    /// Metrics that missed their bound.
    pub violations: Vec<String>,
    /// Set when the check stopped on an error.
    pub error: Option<String>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {:>2}. {}", self.id, self.title)?;
        if let Some(e) = &self.error {
            write!(f, " (error: {e})")?;
        }
        Ok(())
    }
}

const TITLES: [&str; CRITERIA] = [
    "Killing constants of the constant and inverse maps",
    "genuine generalized Killing spinors",
    "negative controls",
    "divergence-free frames and the divergence identity",
    "Lagrangian families",
    "induced geometry",
    "volumes",
    "volume classes",
    "radius admissibility",
    "identities",
    "(V, alpha) system residuals",
    "round trips",
    "numerics hygiene",
];

/// Metrics of one check, with a running pass flag.
struct Sheet {
    metrics: BTreeMap<String, f64>,
    violations: Vec<String>,
    pass: bool,
}

impl Sheet {
    fn new() -> Self {
        Sheet { metrics: BTreeMap::new(), violations: Vec::new(), pass: true }
    }

    fn check(&mut self, name: impl Into<String>, value: f64, ok: bool) {
        let name = name.into();
        if !ok {
            self.pass = false;
            self.violations.push(name.clone());
        }
        self.metrics.insert(name, value);
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.check(name, value, value <= bound);
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.check(name, value, value >= bound);
    }

    fn near(&mut self, name: impl Into<String>, value: f64, target: f64, tol: f64) {
        self.check(name, value, (value - target).abs() <= tol);
    }

    fn record(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }
}

fn unit_im(seed: u64, index: u64) -> ImQuat {
    let q = point_at(seed, index).quat();
    ImQuat::new(q.x, q.y, q.z).normalized().unwrap_or(ImQuat::I)
}

fn orthonormal_pair(seed: u64, index: u64) -> (ImQuat, ImQuat) {
    let a = unit_im(seed, 2 * index);
    let c = unit_im(seed, 2 * index + 1);
    let b = (c - a * a.dot(c)).normalized().unwrap_or_else(|| a.cross(ImQuat::I).normalized().unwrap_or(ImQuat::J));
    (a, b)
}

/// The four example spinors: constant, inverse, `g⁻¹bg`, `bg⁻¹`.
fn example_spinors(b: ImQuat) -> [SpinorField; 4] {
    [
        SpinorField::constant(Quat::ONE),
        SpinorField::inverse(),
        SpinorField::conj_b(b),
        SpinorField::b_inverse(b),
    ]
}

fn samples(cfg: &AcceptanceConfig, salt: u64) -> SampleSet {
    uniform_s3(cfg.seed.wrapping_add(salt), cfg.residual_samples)
}

fn killing_deviation(psi: &SpinorField, s: &SampleSet, lambda: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in s.iter() {
        let a = gk_endomorphism(psi, *g, DerivMode::Analytic, 1e-8)?;
        worst = worst.max((a - Matrix3::identity() * lambda).abs().max());
    }
    Ok(worst)
}

fn c1(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 1);
    sh.at_most("const.deviation_from_plus_half", killing_deviation(&SpinorField::constant(Quat::ONE), &s, 0.5)?, 1e-8);
    let c = point_at(cfg.seed, 1).quat();
    sh.at_most("const_random.deviation_from_plus_half", killing_deviation(&SpinorField::constant(c), &s, 0.5)?, 1e-8);
    sh.at_most("inv.deviation_from_minus_half", killing_deviation(&SpinorField::inverse(), &s, -0.5)?, 1e-8);
    Ok(())
}

fn c2(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 2);
    let fd = DerivMode::fd();
    for draw in 0..cfg.parameter_draws {
        let b = unit_im(cfg.seed.wrapping_add(200), draw);
        for psi in [SpinorField::conj_b(b), SpinorField::b_inverse(b)] {
            let name = format!("{}.draw{draw}", family_key(&psi));
            let exact = gk_check(&psi, &s, DerivMode::Analytic, GkTolerances::for_mode(DerivMode::Analytic))?;
            sh.check(format!("{name}.pass_analytic"), exact.pass as u8 as f64, exact.pass);
            sh.at_most(format!("{name}.skew_analytic"), exact.skew_residual, 1e-8);
            sh.at_least(format!("{name}.killing_fit_residual"), exact.killing_fit.residual, 1e-2);
            let approx = gk_check(&psi, &s, fd, GkTolerances::for_mode(fd))?;
            sh.check(format!("{name}.pass_fd"), approx.pass as u8 as f64, approx.pass);
            sh.at_most(format!("{name}.skew_fd"), approx.skew_residual, 1e-5);
        }
    }
    Ok(())
}

fn family_key(psi: &SpinorField) -> &'static str {
    use crate::spinor::SpinorFamily::*;
    match psi.family {
        Const(_) => "const",
        Inverse => "inv",
        ConjB(_) => "conjb",
        BInverse(_) => "binv",
        Custom(_) => "custom",
    }
}

fn c3(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 3);
    let id = SpinorField::identity();
    let r = gk_check(&id, &s, DerivMode::Analytic, GkTolerances::for_mode(DerivMode::Analytic))?;
    sh.check("identity.pass", r.pass as u8 as f64, !r.pass);
    sh.at_least("identity.skew", r.skew_residual, 0.1);
    let omega = lagrangian_residual(&LagrangianFamily::GraphInv(id), &s, DerivMode::Analytic)?;
    sh.at_least("antidiagonal.max_abs_omega", omega, 0.05);
    Ok(())
}

fn c4(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 4);
    let tol = GkTolerances::for_mode(DerivMode::Analytic);
    for psi in example_spinors(unit_im(cfg.seed, 4)) {
        let r = gk_check(&psi, &s, DerivMode::Analytic, tol)?;
        sh.at_most(format!("{}.max_divergence", family_key(&psi)), r.divergence_max, 1e-6);
    }
    let (mut identity, mut min_skew, mut min_div): (f64, f64, f64) = (0.0, f64::INFINITY, f64::INFINITY);
    for seed in 0..cfg.random_spinors {
        let psi = SpinorField::random_poly(cfg.seed.wrapping_add(seed), &s.points);
        let r = gk_check(&psi, &s, DerivMode::Analytic, tol)?;
        identity = identity.max(r.divergence_identity_residual);
        min_skew = min_skew.min(r.skew_residual);
        min_div = min_div.min(r.divergence_max);
    }
    sh.at_most("random.divergence_identity_residual", identity, 1e-6);
    sh.record("random.min_skew", min_skew);
    sh.record("random.min_divergence", min_div);
    Ok(())
}

fn lagrangian_families(cfg: &AcceptanceConfig) -> Result<Vec<LagrangianFamily>> {
    let mut out = vec![LagrangianFamily::Gamma1, LagrangianFamily::Gamma2];
    for draw in 0..cfg.parameter_draws {
        let b = unit_im(cfg.seed.wrapping_add(500), draw);
        out.push(LagrangianFamily::gamma3(b)?);
        out.push(LagrangianFamily::gamma4(b)?);
        let (a, c) = orthonormal_pair(cfg.seed.wrapping_add(501), draw);
        out.push(LagrangianFamily::lab(a, c)?);
    }
    Ok(out)
}

fn short_name(f: &LagrangianFamily) -> &'static str {
    match f {
        LagrangianFamily::Gamma1 => "gamma1",
        LagrangianFamily::Gamma2 => "gamma2",
        LagrangianFamily::Gamma3(_) => "gamma3",
        LagrangianFamily::Gamma4(_) => "gamma4",
        LagrangianFamily::Lab(..) => "lab",
        LagrangianFamily::GraphInv(_) => "graphinv",
    }
}

fn c5(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 5);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    for fam in lagrangian_families(cfg)? {
        let r = lagrangian_residual(&fam, &s, DerivMode::Analytic)?;
        let w = worst.entry(short_name(&fam)).or_insert(0.0);
        *w = w.max(r);
    }
    for (name, w) in worst {
        sh.at_most(format!("{name}.max_abs_omega"), w, 1e-8);
    }
    Ok(())
}

/// One representative of each built-in family.
fn representatives(cfg: &AcceptanceConfig) -> Result<Vec<LagrangianFamily>> {
    let b = unit_im(cfg.seed.wrapping_add(600), 0);
    let (a, c) = orthonormal_pair(cfg.seed.wrapping_add(601), 0);
    Ok(vec![
        LagrangianFamily::Gamma1,
        LagrangianFamily::Gamma2,
        LagrangianFamily::gamma3(b)?,
        LagrangianFamily::gamma4(b)?,
        LagrangianFamily::lab(a, c)?,
    ])
}

fn c6(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 6);
    let sqrt3 = 3f64.sqrt();
    for fam in representatives(cfg)? {
        let name = short_name(&fam);
        let r = fit_geometry(&fam, &s, DerivMode::Analytic, 1e-6)?;
        sh.record(format!("{name}.fit_residual"), r.fit_residual);
        match (&fam, r.classification) {
            (LagrangianFamily::Gamma1 | LagrangianFamily::Gamma2, Classification::Round { radius }) => {
                sh.near(format!("{name}.radius"), radius, 2.0 / 3.0, 1e-6)
            }
            (LagrangianFamily::Lab(..), Classification::Round { radius }) => {
                sh.near(format!("{name}.radius"), radius, 4.0 / 3.0, 1e-6)
            }
            (
                LagrangianFamily::Gamma3(_) | LagrangianFamily::Gamma4(_),
                Classification::Berger { c_base, c_fiber, axis_residual },
            ) => {
                sh.near(format!("{name}.c_base"), c_base, 2.0 / sqrt3, 1e-6);
                sh.near(format!("{name}.length_ratio"), c_fiber / c_base, 1.0 / sqrt3, 1e-6);
                sh.record(format!("{name}.metric_ratio"), (c_fiber / c_base).powi(2));
                sh.at_most(format!("{name}.axis_residual"), axis_residual.unwrap_or(f64::INFINITY), 1e-6);
            }
            (_, other) => sh.check(format!("{name}.classification_{}", other.kind()), 0.0, false),
        }
    }
    Ok(())
}

fn expected_volume(fam: &LagrangianFamily) -> f64 {
    match fam {
        LagrangianFamily::Gamma1 | LagrangianFamily::Gamma2 => 8.0 / 27.0,
        LagrangianFamily::Gamma3(_) | LagrangianFamily::Gamma4(_) => 24.0 / 27.0,
        _ => 64.0 / 27.0,
    }
}

/// Standard-error floor for the MC agreement test: a constant integrand has
/// zero spread, so only rounding separates its mean from the exact value.
const MC_FLOOR: f64 = 1e-12;

fn c7(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let exact_s = samples(cfg, 7);
    let mc_s = uniform_s3(cfg.seed.wrapping_add(70), cfg.volume_samples);
    for fam in representatives(cfg)? {
        let name = short_name(&fam);
        let expected = expected_volume(&fam);
        let exact = volume_ratio(&fam, &exact_s, DerivMode::Analytic)?;
        sh.near(format!("{name}.volume_ratio"), exact.mean, expected, 1e-10);
        sh.check(format!("{name}.volume_ratio_stderr"), exact.standard_error, exact.standard_error == 0.0);
        let mc = volume_ratio_mc(&fam, &mc_s, DerivMode::Analytic)?;
        sh.record(format!("{name}.volume_ratio_mc"), mc.mean);
        sh.record(format!("{name}.volume_ratio_mc_stderr"), mc.standard_error);
        sh.check(
            format!("{name}.volume_ratio_mc_error"),
            (mc.mean - expected).abs(),
            mc.agrees_with(expected, 3.0, MC_FLOOR),
        );
    }
    Ok(())
}

fn c8(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 8);
    let mut reports = Vec::new();
    for fam in representatives(cfg)? {
        reports.push((short_name(&fam).to_string(), fit_geometry(&fam, &s, DerivMode::Analytic, 1e-6)?));
    }
    let classes = component_invariant(&reports, 1e-3, 1e-8)?;
    sh.near("volume_classes", classes.len() as f64, 3.0, 0.0);
    for (i, c) in classes.iter().enumerate() {
        sh.record(format!("class{i}.volume_ratio"), c.volume_ratio);
        sh.record(format!("class{i}.members"), c.members.len() as f64);
    }
    Ok(())
}

fn c9(_cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let cases = [(2.0 / 3.0, Some(2)), (4.0 / 3.0, Some(4)), (1.0, Some(3)), (0.5, None)];
    for (r, want) in cases {
        let (ok, k) = admissible_round_radius(r, 1e-6);
        sh.check(format!("r{r:.4}.k"), k.map_or(-1.0, |k| k as f64), ok == want.is_some() && k == want);
    }
    Ok(())
}

fn c10(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 10);
    let mode = DerivMode::Analytic;
    let (mut d_left, mut d_right): (f64, f64) = (0.0, 0.0);
    for g in s.iter() {
        for a in ImQuat::BASIS {
            let left = xi_field(&SpinorField::constant(Quat::ONE), a);
            let d = exterior_derivative_dual(&left, *g, mode)?;
            d_left = d_left.max(d.max_abs_diff(&TwoForm::hodge_of(left.component(*g) * -2.0)));
            let right = xi_field(&SpinorField::inverse(), a);
            let d = exterior_derivative_dual(&right, *g, mode)?;
            d_right = d_right.max(d.max_abs_diff(&TwoForm::hodge_of(right.component(*g) * 2.0)));
        }
    }
    sh.at_most("dxi_family1_residual", d_left, 1e-6);
    sh.at_most("dxi_family2_residual", d_right, 1e-6);

    for psi in example_spinors(unit_im(cfg.seed, 10)) {
        let xis = ImQuat::BASIS.map(|a| xi_field(&psi, a));
        let mut worst: f64 = 0.0;
        for (n, g) in s.iter().enumerate() {
            let x = point_at(cfg.seed.wrapping_add(100), n as u64).quat().im();
            let a = gk_endomorphism(&psi, *g, mode, 1e-8)?;
            let ax = ImQuat::from_vector(&(a * x.to_vector()));
            for xi in &xis {
                let lhs = covariant_derivative(xi, TangentS3::new(*g, x), mode)?.lie;
                let rhs = hodge_contract(ax, xi.component(*g)) * -2.0;
                worst = worst.max((lhs - rhs).norm());
            }
        }
        sh.at_most(format!("{}.nabla_xi_residual", family_key(&psi)), worst, 1e-6);
    }

    let (mut omega, mut jj, mut compat): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let lie = |seed: u64, n: u64| point_at(cfg.seed.wrapping_add(seed), n).quat().im() * 2.0;
    for n in 0..10 * cfg.residual_samples as u64 {
        let base = ProductPoint::new(point_at(cfg.seed.wrapping_add(101), n), point_at(cfg.seed.wrapping_add(102), n));
        let a = ProductTangent::new(base, lie(103, n), lie(104, n));
        let b = ProductTangent::new(base, lie(105, n), lie(106, n));
        let ja = nk_j(&a);
        omega = omega.max((nk_omega(&a, &b)? - nk_metric(&ja, &b)?).abs());
        let jja = nk_j(&ja);
        jj = jj.max((jja.x1 + a.x1).norm()).max((jja.x2 + a.x2).norm());
        compat = compat.max((nk_metric(&ja, &nk_j(&b))? - nk_metric(&a, &b)?).abs());
    }
    sh.at_most("omega_minus_g_j", omega, 1e-12);
    sh.at_most("j_squared_plus_id", jj, 1e-12);
    sh.at_most("j_compatibility", compat, 1e-12);
    Ok(())
}

fn c11(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 11);
    for psi in example_spinors(unit_im(cfg.seed, 11)) {
        let res = system_residuals(&decompose_valpha(&psi), &s, DerivMode::Analytic)?;
        let worst = res.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
        let bound = if matches!(psi.family, crate::spinor::SpinorFamily::Const(_)) { 1e-14 } else { 1e-6 };
        sh.at_most(format!("{}.system_residual", family_key(&psi)), worst, bound);
    }
    Ok(())
}

fn c12(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    let s = samples(cfg, 12);
    for psi in example_spinors(unit_im(cfg.seed, 12)) {
        let frame = frame_from_spinor(&psi);
        let rec = spinor_from_frame(&frame, &s, DerivMode::Analytic, 1e-8)?;
        sh.at_most(format!("{}.spinor_frame_residual", family_key(&psi)), rec.residual_against(&psi), 1e-9);
    }
    let mut worst: f64 = 0.0;
    for g in s.iter() {
        let q = rotation_to_unit_quat(&g.rotation_matrix())?;
        worst = worst.max(q.distance(*g).min(q.distance(g.neg())));
        worst = worst.max((q.rotation_matrix() - g.rotation_matrix()).abs().max());
    }
    sh.at_most("rotation_quaternion_residual", worst, 1e-12);
    Ok(())
}

fn fd_gap_field(field: &VectorFieldS3, s: &SampleSet, h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in s.iter() {
        for x in ImQuat::BASIS {
            let a = field.differential(*g, x, DerivMode::Analytic)?;
            let n = field.differential(*g, x, DerivMode::Fd { h })?;
            worst = worst.max((a - n).norm());
        }
    }
    Ok(worst)
}

fn richardson_gap_field(field: &VectorFieldS3, s: &SampleSet, h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in s.iter() {
        for x in ImQuat::BASIS {
            let a = field.differential(*g, x, DerivMode::Analytic)?;
            let n = field.differential(*g, x, DerivMode::Richardson { h })?;
            worst = worst.max((a - n).norm());
        }
    }
    Ok(worst)
}

fn fd_gap_scalar(field: &ScalarFieldS3, s: &SampleSet, h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for g in s.iter() {
        for x in ImQuat::BASIS {
            let a = field.derivative(*g, x, DerivMode::Analytic)?;
            let n = field.derivative(*g, x, DerivMode::Fd { h })?;
            worst = worst.max((a - n).abs());
        }
    }
    Ok(worst)
}

fn c13(cfg: &AcceptanceConfig, sh: &mut Sheet) -> Result<()> {
    const H: f64 = 1e-4;
    let s = samples(cfg, 13);
    let b = unit_im(cfg.seed, 13);
    let mut spinors = example_spinors(b).to_vec();
    spinors.push(SpinorField::identity());
    for psi in &spinors {
        let key = family_key(psi);
        let key = if matches!(psi.family, crate::spinor::SpinorFamily::Custom(_)) { "identity" } else { key };
        let mut gauge: f64 = 0.0;
        for g in s.iter() {
            for x in ImQuat::BASIS {
                let a = psi.differential(*g, x, DerivMode::Analytic)?;
                let n = psi.differential(*g, x, DerivMode::Fd { h: H })?;
                gauge = gauge.max((a - n).norm());
            }
        }
        sh.at_most(format!("{key}.gauge_fd_gap"), gauge, 1e-7);
        let d = decompose_valpha(psi);
        sh.at_most(format!("{key}.v_fd_gap"), fd_gap_field(&d.v, &s, H)?, 1e-7);
        sh.at_most(format!("{key}.alpha_fd_gap"), fd_gap_scalar(&d.alpha, &s, H)?, 1e-7);
        let (mut xi, mut xi_rich): (f64, f64) = (0.0, 0.0);
        for a in ImQuat::BASIS {
            let field = xi_field(psi, a);
            xi = xi.max(fd_gap_field(&field, &s, H)?);
            xi_rich = xi_rich.max(richardson_gap_field(&field, &s, H)?);
        }
        sh.at_most(format!("{key}.xi_fd_gap"), xi, 1e-7);
        // diagnostic only: separates truncation error from a wrong closed form
        sh.record(format!("{key}.xi_richardson_gap"), xi_rich);
    }
    for (name, field) in [
        ("left_invariant", VectorFieldS3::left_invariant(b)),
        ("right_invariant", VectorFieldS3::right_invariant(b)),
        ("imaginary_part", VectorFieldS3::imaginary_part()),
    ] {
        sh.at_most(format!("{name}.fd_gap"), fd_gap_field(&field, &s, H)?, 1e-7);
    }
    sh.at_most("real_part.fd_gap", fd_gap_scalar(&ScalarFieldS3::real_part(), &s, H)?, 1e-7);
    for fam in representatives(cfg)? {
        let mut worst: f64 = 0.0;
        for g in s.iter() {
            let exact = basis_tangents(&fam, *g, DerivMode::Analytic)?;
            for (x, t) in ImQuat::BASIS.into_iter().zip(exact) {
                let n = family_tangent(&fam, *g, x, DerivMode::Fd { h: H })?;
                worst = worst.max((t.x1 - n.x1).norm()).max((t.x2 - n.x2).norm());
            }
        }
        sh.at_most(format!("{}.tangent_fd_gap", short_name(&fam)), worst, 1e-7);
    }
    let traced = KappaConstant::from_ad_trace(unit_im(cfg.seed, 14)).value();
    sh.near("kappa", kappa(), 2.0 / 3.0, 1e-14);
    sh.near("kappa_random_direction", traced, 2.0 / 3.0, 1e-14);
    Ok(())
}

type Check = fn(&AcceptanceConfig, &mut Sheet) -> Result<()>;

const CHECKS: [Check; CRITERIA] = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, cfg: &AcceptanceConfig) -> CriterionResult {
    assert!((1..=CRITERIA).contains(&id), "no criterion {id}");
    let mut sh = Sheet::new();
    let error = CHECKS[id - 1](cfg, &mut sh).err().map(|e| e.to_string());
    CriterionResult {
        id,
        title: TITLES[id - 1],
        pass: sh.pass && error.is_none(),
        metrics: sh.metrics,
        violations: sh.violations,
        error,
    }
}

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run_criterion(id, cfg)).collect()
}
