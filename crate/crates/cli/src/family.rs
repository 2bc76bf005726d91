//! Parsing of `--family` specs and vector parameters.

use std::fmt;

use nkspin::nkgeom::LagrangianFamily;
use nkspin::spinor::SpinorField;
use nkspin::{ImQuat, Quat, UnitQuat};

/// Warn when normalizing moves a parameter by more than this.
const RENORM_WARN: f64 = 1e-6;
/// Parameters `a`, `b` closer than this to orthogonal are straightened.
const ORTHO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Parsed<T> = std::result::Result<T, UsageError>;

fn usage<T>(msg: impl Into<String>) -> Parsed<T> {
    Err(UsageError(msg.into()))
}

/// Parsed `--family` argument, before the sample set is known.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Map(MapSpec),
    Gamma1,
    Gamma2,
    Gamma3(ImQuat),
    Gamma4(ImQuat),
    Lab,
    GraphInv(MapSpec),
}

/// A gauge function `f: S³ → ℍ`.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Const(Quat),
    Inverse,
    ConjB(ImQuat),
    BInverse(ImQuat),
    Identity,
    RandPoly(u64),
}

impl MapSpec {
    /// `probe` is where random maps are kept away from zero.
    pub fn build(&self, probe: &[UnitQuat]) -> SpinorField {
        match self {
            MapSpec::Const(c) => SpinorField::constant(*c),
            MapSpec::Inverse => SpinorField::inverse(),
            MapSpec::ConjB(b) => SpinorField::conj_b(*b),
            MapSpec::BInverse(b) => SpinorField::b_inverse(*b),
            MapSpec::Identity => SpinorField::identity(),
            MapSpec::RandPoly(seed) => SpinorField::random_poly(*seed, probe),
        }
    }
}

fn reals<const N: usize>(text: &str, what: &str) -> Parsed<[f64; N]> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != N {
        return usage(format!("{what}: expected {N} comma-separated reals, got '{text}'"));
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| UsageError(format!("{what}: '{p}' is not a finite real")))?;
    }
    Ok(out)
}

fn normalize(v: &[f64], what: &str, warn: &mut Vec<String>) -> Parsed<Vec<f64>> {
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(n > 1e-12) {
        return usage(format!("{what}: zero vector"));
    }
    if (n - 1.0).abs() > RENORM_WARN {
        warn.push(format!("{what}: normalized from length {n}"));
    }
    Ok(v.iter().map(|c| c / n).collect())
}

/// A unit imaginary quaternion from `x,y,z`.
pub fn unit_vector(text: &str, what: &str, warn: &mut Vec<String>) -> Parsed<ImQuat> {
    let v = normalize(&reals::<3>(text, what)?, what, warn)?;
    Ok(ImQuat::new(v[0], v[1], v[2]))
}

fn unit_quat(text: &str, what: &str, warn: &mut Vec<String>) -> Parsed<Quat> {
    let v = normalize(&reals::<4>(text, what)?, what, warn)?;
    Ok(Quat::new(v[0], v[1], v[2], v[3]))
}

fn parse_map(text: &str, warn: &mut Vec<String>) -> Parsed<Option<MapSpec>> {
    let (head, arg) = match text.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (text, None),
    };
    let need = || arg.ok_or_else(|| UsageError(format!("'{head}' needs a parameter")));
    let none = || match arg {
        Some(a) => usage(format!("'{head}' takes no parameter, got '{a}'")),
        None => Ok(()),
    };
    Ok(Some(match head {
        "const" => MapSpec::Const(unit_quat(need()?, "const", warn)?),
        "inv" => {
            none()?;
            MapSpec::Inverse
        }
        "identity" => {
            none()?;
            MapSpec::Identity
        }
        "conjb" => MapSpec::ConjB(unit_vector(need()?, "conjb", warn)?),
        "binv" => MapSpec::BInverse(unit_vector(need()?, "binv", warn)?),
        "randpoly" => {
            let a = need()?;
            MapSpec::RandPoly(a.parse().map_err(|_| UsageError(format!("randpoly: bad seed '{a}'")))?)
        }
        _ => return Ok(None),
    }))
}

pub fn parse_family(text: &str, warn: &mut Vec<String>) -> Parsed<FamilySpec> {
    if let Some(m) = parse_map(text, warn)? {
        return Ok(FamilySpec::Map(m));
    }
    let (head, arg) = match text.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (text, None),
    };
    let plain = |f: FamilySpec| match arg {
        Some(a) => usage(format!("'{head}' takes no parameter, got '{a}'")),
        None => Ok(f),
    };
    let param = || arg.ok_or_else(|| UsageError(format!("'{head}' needs a parameter")));
    match head {
        "gamma1" => plain(FamilySpec::Gamma1),
        "gamma2" => plain(FamilySpec::Gamma2),
        "lab" => plain(FamilySpec::Lab),
        "gamma3" => Ok(FamilySpec::Gamma3(unit_vector(param()?, "gamma3", warn)?)),
        "gamma4" => Ok(FamilySpec::Gamma4(unit_vector(param()?, "gamma4", warn)?)),
        "graphinv" => match parse_map(param()?, warn)? {
            Some(m) => Ok(FamilySpec::GraphInv(m)),
            None => usage(format!("graphinv: unknown map '{}'", param()?)),
        },
        _ => usage(format!("unknown family '{text}'")),
    }
}

/// Straightens `b` against `a` when they are orthogonal up to input rounding.
pub fn orthonormal_ab(a: ImQuat, b: ImQuat, warn: &mut Vec<String>) -> Parsed<(ImQuat, ImQuat)> {
    let d = a.dot(b);
    if d.abs() > ORTHO_TOL {
        return usage(format!("--a and --b must be orthogonal (a·b = {d})"));
    }
    let b2 = (b - a * d).normalized().expect("b is a unit vector");
    if d.abs() > 1e-12 {
        warn.push(format!("--b: orthogonalized against --a (a·b = {d:e})"));
    }
    Ok((a, b2))
}

impl FamilySpec {
    /// The Lagrangian family; `ab` is required for `lab`.
    pub fn lagrangian(&self, ab: Option<(ImQuat, ImQuat)>, probe: &[UnitQuat]) -> Parsed<LagrangianFamily> {
        let checked = |r: nkspin::Result<LagrangianFamily>| r.map_err(|e| UsageError(e.to_string()));
        match self {
            FamilySpec::Map(_) => usage("expected a Lagrangian family (gamma1..4, lab, graphinv:<map>), got a map"),
            FamilySpec::Gamma1 => Ok(LagrangianFamily::Gamma1),
            FamilySpec::Gamma2 => Ok(LagrangianFamily::Gamma2),
            FamilySpec::Gamma3(b) => checked(LagrangianFamily::gamma3(*b)),
            FamilySpec::Gamma4(b) => checked(LagrangianFamily::gamma4(*b)),
            FamilySpec::Lab => match ab {
                Some((a, b)) => checked(LagrangianFamily::lab(a, b)),
                None => usage("lab needs --a and --b"),
            },
            FamilySpec::GraphInv(m) => Ok(LagrangianFamily::GraphInv(m.build(probe))),
        }
    }
}
