//! One function per subcommand. Each fills the metric map and returns the
//! verdict; library errors propagate to the caller for exit-code mapping.

use nkspin::acceptance::{run_all, AcceptanceConfig};
use nkspin::nkgeom::{
    admissible_round_radius, component_invariant, fit_geometry, lagrangian_residual, volume_ratio,
    Classification, LagrangianFamily,
};
use nkspin::s3calc::DerivMode;
use nkspin::spinor::{
    decompose_valpha, frame_from_spinor, gk_check, spinor_from_frame, system_residuals, GkTolerances,
    SpinorField,
};
use nkspin::{uniform_s3, Error, ImQuat, SampleSet};

use crate::family::MapSpec;
use crate::report::{Metrics, Tolerances};

pub struct Context {
    pub samples: SampleSet,
    pub volume_samples: usize,
    pub seed: u64,
    pub mode: DerivMode,
    pub tol: Tolerances,
}

fn gk_tolerances(t: &Tolerances) -> GkTolerances {
    GkTolerances {
        skew: t.skew,
        divergence: t.divergence,
        constant_length: t.constant_length,
        divergence_identity: t.divergence_identity,
        killing: t.killing,
    }
}

pub fn verify_spinor(cx: &Context, map: &MapSpec, m: &mut Metrics) -> nkspin::Result<bool> {
    let psi = map.build(&cx.samples.points);
    let r = gk_check(&psi, &cx.samples, cx.mode, gk_tolerances(&cx.tol))?;
    m.num("skew_residual", r.skew_residual);
    m.num("divergence_max", r.divergence_max);
    m.num("constant_length_residual", r.constant_length_residual);
    m.num("divergence_identity_residual", r.divergence_identity_residual);
    m.num("real_part_residual", r.real_part_residual);
    m.num("killing_fit_lambda", r.killing_fit.lambda);
    m.num("killing_fit_residual", r.killing_fit.residual);
    m.opt("killing_constant", r.killing_constant());
    m.flag("gk_pass", r.pass);

    let sys = system_residuals(&decompose_valpha(&psi), &cx.samples, cx.mode)?;
    let max = |f: fn(&nkspin::spinor::SystemResidual) -> f64| sys.iter().map(|s| f(s).abs()).fold(0.0, f64::max);
    let (unit, wedge, scalar) = (max(|s| s.unit_length), max(|s| s.symmetric_wedge), max(|s| s.scalar));
    m.num("system_unit_length", unit);
    m.num("system_symmetric_wedge", wedge);
    m.num("system_scalar", scalar);
    Ok(r.pass && unit.max(wedge).max(scalar) <= cx.tol.system)
}

pub fn lagrangian(cx: &Context, fam: &LagrangianFamily, m: &mut Metrics) -> nkspin::Result<bool> {
    let omega = lagrangian_residual(fam, &cx.samples, cx.mode)?;
    m.num("max_abs_omega", omega);
    Ok(omega <= cx.tol.lagrangian)
}

pub fn geometry(cx: &Context, fam: &LagrangianFamily, m: &mut Metrics) -> nkspin::Result<bool> {
    let r = fit_geometry(fam, &cx.samples, cx.mode, cx.tol.fit)?;
    m.text("classification", r.classification.kind());
    m.num("fit_residual", r.fit_residual);
    m.num("lagrangian_residual", r.lagrangian_residual);
    match r.classification {
        Classification::Round { radius } => {
            m.num("radius", radius);
            let (ok, k) = admissible_round_radius(radius, 1e-6);
            m.flag("radius_admissible", ok);
            m.opt_int("k", k);
        }
        Classification::Berger { c_base, c_fiber, axis_residual } => {
            m.num("c_base", c_base);
            m.num("c_fiber", c_fiber);
            m.num("length_ratio", c_fiber / c_base);
            m.num("metric_ratio", (c_fiber / c_base).powi(2));
            m.opt("axis_residual", axis_residual);
        }
        Classification::Other => {}
    }
    let vs = uniform_s3(cx.seed, cx.volume_samples);
    let vol = volume_ratio(fam, &vs, cx.mode)?;
    m.num("volume_ratio", vol.mean);
    m.num("volume_stderr", vol.standard_error);
    Ok(r.classification != Classification::Other
        && r.fit_residual <= cx.tol.fit
        && r.lagrangian_residual <= cx.tol.lagrangian
        && vol.standard_error <= cx.tol.volume)
}

pub fn frame(cx: &Context, map: &MapSpec, m: &mut Metrics) -> nkspin::Result<bool> {
    let psi: SpinorField = map.build(&cx.samples.points);
    let frame = frame_from_spinor(&psi);
    match spinor_from_frame(&frame, &cx.samples, cx.mode, cx.tol.divergence) {
        Ok(rec) => {
            let res = rec.residual_against(&psi);
            m.num("roundtrip_residual", res);
            Ok(res <= cx.tol.roundtrip)
        }
        // a frame that is not orthonormal or divergence-free is a failed check
        Err(Error::Domain(msg)) => {
            m.text("frame_rejected", msg);
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

pub fn components(cx: &Context, a: ImQuat, b: ImQuat, m: &mut Metrics) -> nkspin::Result<bool> {
    let families = [
        LagrangianFamily::Gamma1,
        LagrangianFamily::Gamma2,
        LagrangianFamily::gamma3(b)?,
        LagrangianFamily::gamma4(b)?,
        LagrangianFamily::lab(a, b)?,
    ];
    let mut reports = Vec::new();
    for fam in families {
        let r = fit_geometry(&fam, &cx.samples, cx.mode, cx.tol.fit)?;
        reports.push((fam.name(), r));
    }
    match component_invariant(&reports, cx.tol.volume, cx.tol.lagrangian) {
        Ok(classes) => {
            m.int("volume_classes", classes.len() as i64);
            for (i, c) in classes.iter().enumerate() {
                m.num(format!("class{i}.volume_ratio"), c.volume_ratio);
                m.list(format!("class{i}.members"), &c.members);
            }
            Ok(true)
        }
        Err(Error::Precondition(msg)) => {
            m.text("not_lagrangian", msg);
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

pub fn all(cx: &Context, m: &mut Metrics) -> bool {
    let cfg = AcceptanceConfig {
        seed: cx.seed,
        residual_samples: cx.samples.n,
        volume_samples: cx.volume_samples,
        ..AcceptanceConfig::default()
    };
    let mut pass = true;
    for r in run_all(&cfg) {
        eprintln!("{r}");
        let key = |k: &str| format!("c{:02}.{k}", r.id);
        m.flag(key("pass"), r.pass);
        m.list(key("violations"), &r.violations);
        if let Some(e) = &r.error {
            m.text(key("error"), e.clone());
        }
        for (k, v) in &r.metrics {
            m.num(key(k), *v);
        }
        pass &= r.pass;
    }
    pass
}
