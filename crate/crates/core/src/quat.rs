//! Quaternion algebra: the ambient ring ℍ, the unit sphere S³ ⊂ ℍ and its
//! Lie algebra Im ℍ ≅ ℝ³.
//!
//! Conventions: `i·j = k`, the Lie bracket is the commutator so that
//! `[x, y] = 2·cross(x, y)` on imaginary quaternions.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::Matrix3;

use crate::error::{Error, Result};

/// Tolerance on `|q| − 1` maintained by [`UnitQuat`].
pub const UNIT_TOL: f64 = 1e-12;

/// A quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub fn from_parts(re: f64, im: ImQuat) -> Self {
        Quat::new(re, im.x, im.y, im.z)
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn im(self) -> ImQuat {
        ImQuat::new(self.x, self.y, self.z)
    }

    pub fn conj(self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product on ℍ ≅ ℝ⁴.
    pub fn dot(self, other: Quat) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Hamilton product.
    pub fn mul(self, q: Quat) -> Quat {
        let p = self;
        Quat::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }

    /// `conj(q)/|q|²`; fails on the zero quaternion.
    pub fn inverse(self) -> Result<Quat> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Domain(format!("cannot invert quaternion {self}")));
        }
        Ok(self.conj() * (1.0 / n2))
    }

    pub fn scale(self, s: f64) -> Quat {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, q: Quat) -> Quat {
        Quat::new(self.w + q.w, self.x + q.x, self.y + q.y, self.z + q.z)
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, q: Quat) {
        *self = *self + q;
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, q: Quat) -> Quat {
        Quat::new(self.w - q.w, self.x - q.x, self.y - q.y, self.z - q.z)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, q: Quat) -> Quat {
        Quat::mul(self, q)
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        self.scale(s)
    }
}

impl From<ImQuat> for Quat {
    fn from(v: ImQuat) -> Quat {
        Quat::new(0.0, v.x, v.y, v.z)
    }
}

impl From<UnitQuat> for Quat {
    fn from(u: UnitQuat) -> Quat {
        u.0
    }
}

/// An imaginary quaternion, i.e. an element of the Lie algebra Im ℍ ≅ ℝ³.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ImQuat {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ImQuat {
    pub const ZERO: ImQuat = ImQuat::new(0.0, 0.0, 0.0);
    pub const I: ImQuat = ImQuat::new(1.0, 0.0, 0.0);
    pub const J: ImQuat = ImQuat::new(0.0, 1.0, 0.0);
    pub const K: ImQuat = ImQuat::new(0.0, 0.0, 1.0);
    /// The positively oriented basis `(e₁, e₂, e₃) = (i, j, k)`.
    pub const BASIS: [ImQuat; 3] = [ImQuat::I, ImQuat::J, ImQuat::K];

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ImQuat { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        ImQuat::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: ImQuat) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: ImQuat) -> ImQuat {
        ImQuat::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// Lie bracket `[x, y] = xy − yx = 2·cross(x, y)`.
    pub fn bracket(self, o: ImQuat) -> ImQuat {
        self.cross(o) * 2.0
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(self) -> Option<ImQuat> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Component along the basis element `e_index`.
    pub fn component(self, index: usize) -> f64 {
        match index {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("Im H component index out of range: {index}"),
        }
    }

    pub fn to_vector(self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &nalgebra::Vector3<f64>) -> Self {
        ImQuat::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for ImQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}i + {}j + {}k)", self.x, self.y, self.z)
    }
}

impl Add for ImQuat {
    type Output = ImQuat;
    fn add(self, o: ImQuat) -> ImQuat {
        ImQuat::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for ImQuat {
    fn add_assign(&mut self, o: ImQuat) {
        *self = *self + o;
    }
}

impl Sub for ImQuat {
    type Output = ImQuat;
    fn sub(self, o: ImQuat) -> ImQuat {
        ImQuat::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for ImQuat {
    type Output = ImQuat;
    fn neg(self) -> ImQuat {
        ImQuat::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for ImQuat {
    type Output = ImQuat;
    fn mul(self, s: f64) -> ImQuat {
        ImQuat::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Free-function form of [`ImQuat::cross`].
pub fn cross(x: ImQuat, y: ImQuat) -> ImQuat {
    x.cross(y)
}

/// Free-function form of [`ImQuat::dot`].
pub fn dot(x: ImQuat, y: ImQuat) -> f64 {
    x.dot(y)
}

/// A point of S³ ⊂ ℍ. Construction renormalizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuat(Quat);

impl UnitQuat {
    pub const IDENTITY: UnitQuat = UnitQuat(Quat::ONE);

    /// Renormalizes `q`; fails only for zero or non-finite input.
    pub fn new(q: Quat) -> Result<Self> {
        let n = q.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!("cannot normalize {q} onto S3")));
        }
        Ok(UnitQuat(q.scale(1.0 / n)))
    }

    /// Renormalizes a quaternion known to be close to the unit sphere.
    ///
    /// Panics on a zero quaternion; intended for products of unit quaternions.
    pub fn renormalize(q: Quat) -> Self {
        Self::new(q).expect("renormalize called on a degenerate quaternion")
    }

    pub fn quat(self) -> Quat {
        self.0
    }

    /// Inverse, equal to the conjugate.
    pub fn inverse(self) -> UnitQuat {
        UnitQuat(self.0.conj())
    }

    pub fn mul(self, o: UnitQuat) -> UnitQuat {
        UnitQuat::renormalize(self.0 * o.0)
    }

    pub fn neg(self) -> UnitQuat {
        UnitQuat(-self.0)
    }

    /// Conjugation action `x ↦ q x q⁻¹` on Im ℍ.
    pub fn rotate(self, x: ImQuat) -> ImQuat {
        (self.0 * Quat::from(x) * self.0.conj()).im()
    }

    /// Matrix of [`UnitQuat::rotate`] in the basis `(i, j, k)`.
    pub fn rotation_matrix(self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for (c, e) in ImQuat::BASIS.iter().enumerate() {
            let v = self.rotate(*e);
            m[(0, c)] = v.x;
            m[(1, c)] = v.y;
            m[(2, c)] = v.z;
        }
        m
    }

    /// Right multiplication by `exp(x)`, the flow of the left-invariant field `g·x`.
    pub fn right_exp(self, x: ImQuat) -> UnitQuat {
        self.mul(exp_im(x))
    }

    pub fn distance(self, o: UnitQuat) -> f64 {
        (self.0 - o.0).norm()
    }
}

impl fmt::Display for UnitQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Mul for UnitQuat {
    type Output = UnitQuat;
    fn mul(self, o: UnitQuat) -> UnitQuat {
        UnitQuat::mul(self, o)
    }
}

/// Exponential of an imaginary quaternion: `exp(θn) = cos θ + n sin θ`.
pub fn exp_im(x: ImQuat) -> UnitQuat {
    let theta = x.norm();
    // sin(θ)/θ, with its Taylor expansion near zero
    let sinc = if theta < 1e-6 {
        1.0 - theta * theta / 6.0
    } else {
        theta.sin() / theta
    };
    UnitQuat::renormalize(Quat::new(theta.cos(), x.x * sinc, x.y * sinc, x.z * sinc))
}

/// Principal logarithm of a unit quaternion; the antipode `−1` is a branch point.
pub fn log_unit(q: UnitQuat) -> Result<ImQuat> {
    let q = q.quat();
    let v = q.im();
    let s = v.norm();
    if s < 1e-15 && q.w < 0.0 {
        return Err(Error::Branch);
    }
    let theta = s.atan2(q.w);
    let factor = if s < 1e-12 { 1.0 / q.w } else { theta / s };
    Ok(v * factor)
}

/// Quaternion `q`, unique up to sign, whose conjugation action is the
/// rotation `r`. The sign is fixed so that `w ≥ 0`, with ties broken by the
/// first nonzero component being positive.
pub fn rotation_to_unit_quat(r: &Matrix3<f64>) -> Result<UnitQuat> {
    const TOL: f64 = 1e-8;
    let orth = (r.transpose() * r - Matrix3::identity()).abs().max();
    let det = r.determinant();
    if !orth.is_finite() || orth > TOL || (det - 1.0).abs() > TOL {
        return Err(Error::Domain(format!(
            "matrix is not special orthogonal (|RᵀR − I| = {orth:e}, det = {det})"
        )));
    }
    // Shepperd: pick the largest diagonal of the symmetric 4×4 form.
    let tr = r.trace();
    let (r00, r11, r22) = (r[(0, 0)], r[(1, 1)], r[(2, 2)]);
    let q = if tr >= r00 && tr >= r11 && tr >= r22 {
        let s = (1.0 + tr).sqrt() * 2.0;
        Quat::new(
            0.25 * s,
            (r[(2, 1)] - r[(1, 2)]) / s,
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(1, 0)] - r[(0, 1)]) / s,
        )
    } else if r00 >= r11 && r00 >= r22 {
        let s = (1.0 + r00 - r11 - r22).sqrt() * 2.0;
        Quat::new(
            (r[(2, 1)] - r[(1, 2)]) / s,
            0.25 * s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
        )
    } else if r11 >= r22 {
        let s = (1.0 + r11 - r00 - r22).sqrt() * 2.0;
        Quat::new(
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            0.25 * s,
            (r[(1, 2)] + r[(2, 1)]) / s,
        )
    } else {
        let s = (1.0 + r22 - r00 - r11).sqrt() * 2.0;
        Quat::new(
            (r[(1, 0)] - r[(0, 1)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
            (r[(1, 2)] + r[(2, 1)]) / s,
            0.25 * s,
        )
    };
    Ok(canonical_sign(UnitQuat::new(q)?))
}

fn canonical_sign(q: UnitQuat) -> UnitQuat {
    let first = q
        .quat()
        .to_array()
        .into_iter()
        .find(|c| *c != 0.0)
        .unwrap_or(1.0);
    if first < 0.0 {
        q.neg()
    } else {
        q
    }
}
