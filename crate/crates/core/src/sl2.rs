//! Exact 2x2 matrix layer for G = SL(2, R).
//!
//! Fixed conventions used throughout the crate:
//!
//! * theta(g) = (g^T)^{-1} (Cartan involution), K = SO(2) with rotations
//!   `r_theta = [[cos, -sin], [sin, cos]]`;
//! * eta = diag(1, -1), tau(g) = eta theta(g) eta, whose fixed group is
//!   H = SO(1,1) = { +/- exp(u Z) } with Z = [[0,1],[1,0]];
//! * A = { a_s = diag(e^s, e^{-s}) }, N upper unipotent `n_x = [[1,x],[0,1]]`,
//!   so Ad(a_s) scales the N-parameter by e^{2s} and rho corresponds to the
//!   constant 1 (a^{2 rho} = e^{2s} Jacobian);
//! * M = M_H = { +/- I }.
//!
//! On top of the group ops this module provides the Iwasawa, polar (KAH) and
//! open-orbit (HwMAN) factorizations, the norm `|g H|` built from
//! g tau(g)^{-1}, Harish-Chandra's basic spherical function phi_0 and the
//! weight Theta, and the horosphere-genericity test for G_h.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_interval, Anchor, QuadratureSpec};

/// A real 2x2 matrix with determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    /// Build from entries; the determinant must be 1 within 1e-12 and is
    /// renormalized exactly on construction.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || (det - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "matrix determinant {det} is not 1 within 1e-12"
            )));
        }
        Ok(GroupElement { a, b, c, d }.renormalized())
    }

    /// Rescale so the determinant is exactly 1 (up to rounding).
    pub fn renormalized(self) -> Self {
        let det = self.a * self.d - self.b * self.c;
        let r = det.sqrt();
        GroupElement {
            a: self.a / r,
            b: self.b / r,
            c: self.c / r,
            d: self.d / r,
        }
    }

    pub fn identity() -> Self {
        GroupElement { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// Rotation r_theta in K = SO(2).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GroupElement { a: c, b: -s, c: s, d: c }
    }

    /// Diagonal a_s = diag(e^s, e^{-s}) in A.
    pub fn a_param(s: f64) -> Self {
        GroupElement { a: s.exp(), b: 0.0, c: 0.0, d: (-s).exp() }
    }

    /// Upper unipotent n_x in N.
    pub fn n_upper(x: f64) -> Self {
        GroupElement { a: 1.0, b: x, c: 0.0, d: 1.0 }
    }

    /// Lower unipotent in theta(N).
    pub fn n_lower(x: f64) -> Self {
        GroupElement { a: 1.0, b: 0.0, c: x, d: 1.0 }
    }

    /// Hyperbolic rotation exp(u Z) in the identity component of H.
    pub fn exp_h(u: f64) -> Self {
        GroupElement { a: u.cosh(), b: u.sinh(), c: u.sinh(), d: u.cosh() }
    }

    /// The nontrivial Weyl representative w_0 = r_{pi/2}.
    pub fn weyl() -> Self {
        GroupElement::rotation(FRAC_PI_2)
    }

    pub fn inverse(self) -> Self {
        GroupElement { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(self) -> Self {
        GroupElement { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    /// Entrywise maximum deviation from `other`.
    pub fn distance(self, other: GroupElement) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Cartan involution theta(g) = (g^T)^{-1}.
pub fn theta(g: GroupElement) -> GroupElement {
    GroupElement { a: g.d, b: -g.c, c: -g.b, d: g.a }
}

/// The involution tau = Ad(eta) o theta with eta = diag(1, -1); its fixed
/// group is SO(1,1).
pub fn tau(g: GroupElement) -> GroupElement {
    GroupElement { a: g.d, b: g.c, c: g.b, d: g.a }
}

/// Element of sl(2, R) written as h*H0 + e*E + f*F with H0 = diag(1,-1),
/// E upper and F lower nilpotent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieVec {
    pub h: f64,
    pub e: f64,
    pub f: f64,
}

impl LieVec {
    pub fn new(h: f64, e: f64, f: f64) -> Self {
        LieVec { h, e, f }
    }

    /// Generator Z = E + F of the Lie algebra of H.
    pub fn z() -> Self {
        LieVec { h: 0.0, e: 1.0, f: 1.0 }
    }

    pub fn h0() -> Self {
        LieVec { h: 1.0, e: 0.0, f: 0.0 }
    }

    pub fn e_gen() -> Self {
        LieVec { h: 0.0, e: 1.0, f: 0.0 }
    }

    pub fn f_gen() -> Self {
        LieVec { h: 0.0, e: 0.0, f: 1.0 }
    }

    pub fn scale(self, t: f64) -> Self {
        LieVec { h: t * self.h, e: t * self.e, f: t * self.f }
    }

    pub fn add(self, o: LieVec) -> Self {
        LieVec { h: self.h + o.h, e: self.e + o.e, f: self.f + o.f }
    }

    pub fn matrix_entries(self) -> [f64; 4] {
        [self.h, self.e, self.f, -self.h]
    }

    pub fn norm(self) -> f64 {
        (self.h * self.h + self.e * self.e + self.f * self.f).sqrt()
    }
}

/// Cartan-Killing form kappa(X, Y) = 4 tr(XY); kappa(X, X) = 8h^2 + 8ef.
pub fn killing(x: LieVec, y: LieVec) -> f64 {
    8.0 * x.h * y.h + 4.0 * (x.e * y.f + x.f * y.e)
}

/// Matrix exponential of a LieVec, using X^2 = (h^2 + ef) I.
pub fn exp_lie(x: LieVec) -> GroupElement {
    let delta = x.h * x.h + x.e * x.f;
    let (cosd, sincd) = if delta > 1e-24 {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    } else if delta < -1e-24 {
        let r = (-delta).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        // series: cosh(sqrt(d)) ~ 1 + d/2, sinh(sqrt(d))/sqrt(d) ~ 1 + d/6
        (1.0 + delta / 2.0, 1.0 + delta / 6.0)
    };
    GroupElement {
        a: cosd + sincd * x.h,
        b: sincd * x.e,
        c: sincd * x.f,
        d: cosd - sincd * x.h,
    }
}

/// Adjoint action Ad(g) X = g X g^{-1}.
pub fn adjoint(g: GroupElement, x: LieVec) -> LieVec {
    let [m11, m12, m21, _] = x.matrix_entries();
    // g * X
    let p = (
        g.a * m11 + g.b * m21,
        g.a * m12 - g.b * m11,
        g.c * m11 + g.d * m21,
        g.c * m12 - g.d * m11,
    );
    let inv = g.inverse();
    let r11 = p.0 * inv.a + p.1 * inv.c;
    let r12 = p.0 * inv.b + p.1 * inv.d;
    let r21 = p.2 * inv.a + p.3 * inv.c;
    let r22 = p.2 * inv.b + p.3 * inv.d;
    LieVec {
        h: 0.5 * (r11 - r22),
        e: r12,
        f: r21,
    }
}

/// Iwasawa coordinates g = r_{theta_k} a_s n_x.
#[derive(Debug, Clone, Copy)]
pub struct IwasawaKAN {
    pub theta_k: f64,
    pub s: f64,
    pub x: f64,
}

/// Global Iwasawa decomposition g = k a n, read off the first column of g.
pub fn iwasawa(g: GroupElement) -> IwasawaKAN {
    let r = g.a.hypot(g.c);
    let mut theta_k = g.c.atan2(g.a);
    if theta_k < 0.0 {
        theta_k += TAU;
    }
    let s = r.ln();
    // n = a^{-1} k^{-1} g ; its upper-right entry is x
    let m = GroupElement::a_param(-s) * (GroupElement::rotation(-theta_k) * g);
    IwasawaKAN { theta_k, s, x: m.b }
}

/// Polar coordinates g = r_{theta_k} a_s (eps exp(u Z)) for G = KAH.
#[derive(Debug, Clone, Copy)]
pub struct PolarKAH {
    pub theta_k: f64,
    pub s: f64,
    pub u: f64,
    pub sign: f64,
}

impl PolarKAH {
    pub fn recompose(&self) -> GroupElement {
        let h = GroupElement::exp_h(self.u);
        let h = if self.sign < 0.0 { h.neg() } else { h };
        GroupElement::rotation(self.theta_k) * (GroupElement::a_param(self.s) * h)
    }
}

/// Coordinates of the image point Ad(g) Z on the hyperboloid
/// x1^2 + x2^2 - x3^2 = 1 (kept here so the decomposition layer does not
/// depend on the variety module).
pub fn adjoint_z_coords(g: GroupElement) -> (f64, f64, f64) {
    let x = adjoint(g, LieVec::z());
    (x.h, 0.5 * (x.e + x.f), 0.5 * (x.e - x.f))
}

/// KAH polar decomposition. The A-parameter is canonicalized so the image
/// point has x3 = sinh(2s) and theta_k lies in [0, pi); the remaining
/// freedom lands in the sign.
pub fn polar_kah(g: GroupElement) -> Result<PolarKAH> {
    let (x1, x2, x3) = adjoint_z_coords(g);
    let s = 0.5 * x3.asinh();
    let two_theta = (-x1).atan2(x2);
    let mut theta_k = 0.5 * two_theta;
    if theta_k < 0.0 {
        theta_k += PI;
    }
    // residual must lie in {+/- exp(u Z)}
    let ka = GroupElement::rotation(theta_k) * GroupElement::a_param(s);
    let h = ka.inverse() * g;
    let sym = (h.a - h.d).abs().max((h.b - h.c).abs());
    if sym > 1e-8 {
        return Err(Error::DegenerateDecomposition(format!(
            "KAH residual is not in SO(1,1): asymmetry {sym:.3e}"
        )));
    }
    let sign = if h.a >= 0.0 { 1.0 } else { -1.0 };
    let u = (h.b / h.a).atanh();
    if !u.is_finite() {
        return Err(Error::DegenerateDecomposition(
            "KAH residual H-parameter is not finite".into(),
        ));
    }
    Ok(PolarKAH { theta_k, s, u, sign })
}

/// Which open H x P_min orbit an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orbit {
    /// H e MAN, detected by v1^2 > v2^2 on the first column.
    Identity,
    /// H w_0 MAN.
    Weyl,
}

impl Orbit {
    pub fn representative(self) -> GroupElement {
        match self {
            Orbit::Identity => GroupElement::identity(),
            Orbit::Weyl => GroupElement::weyl(),
        }
    }
}

/// Open-orbit coordinates g = eps exp(u Z) w a_s n_x in H w M A N.
#[derive(Debug, Clone, Copy)]
pub struct HwanFactorization {
    pub orbit: Orbit,
    pub u: f64,
    pub s: f64,
    pub x: f64,
    pub sign: f64,
}

impl HwanFactorization {
    pub fn recompose(&self) -> GroupElement {
        let h = GroupElement::exp_h(self.u);
        let h = if self.sign < 0.0 { h.neg() } else { h };
        h * (self.orbit.representative() * (GroupElement::a_param(self.s) * GroupElement::n_upper(self.x)))
    }
}

/// Threshold below which |v1^2 - v2^2| is treated as the orbit boundary.
pub const ORBIT_BOUNDARY_THRESHOLD: f64 = 1e-12;

/// Decompose g = h w m a n along the two open orbits. The first column
/// v = g e_1 is h w a_s e_1; its null coordinates v1 +/- v2 carry the H- and
/// A-parameters, and the N-parameter is recovered by back-substitution.
pub fn hwan_decompose(g: GroupElement) -> Result<HwanFactorization> {
    let v1 = g.a;
    let v2 = g.c;
    let disc = v1 * v1 - v2 * v2;
    if disc.abs() < ORBIT_BOUNDARY_THRESHOLD {
        return Err(Error::BoundaryOrbit { discriminant: disc.abs() });
    }
    let (orbit, u, sign) = if disc > 0.0 {
        let sign = if v1 >= 0.0 { 1.0 } else { -1.0 };
        let u = 0.5 * ((v1 + v2) / (v1 - v2)).ln();
        (Orbit::Identity, u, sign)
    } else {
        let sign = if v2 >= 0.0 { 1.0 } else { -1.0 };
        let u = 0.5 * ((v2 + v1) / (v2 - v1)).ln();
        (Orbit::Weyl, u, sign)
    };
    let s = 0.5 * disc.abs().ln();
    let prefix = {
        let h = GroupElement::exp_h(u);
        let h = if sign < 0.0 { h.neg() } else { h };
        h * (orbit.representative() * GroupElement::a_param(s))
    };
    let n = prefix.inverse() * g;
    let residual = (n.a - 1.0).abs().max(n.c.abs()).max((n.d - 1.0).abs());
    if residual > 1e-8 {
        return Err(Error::Inconsistency(format!(
            "HwMAN back-substitution left a non-unipotent residual {residual:.3e}"
        )));
    }
    Ok(HwanFactorization { orbit, u, s, x: n.b, sign })
}

/// The norm |g H| = |log a_g| (Killing normalization) computed from
/// M = z theta(z)^{-1} = z z^T with z = g tau(g)^{-1}. M is symmetric
/// positive definite with unit determinant; its larger eigenvalue mu gives
/// |g H| = (sqrt 2 / 2) log mu, which equals 2 sqrt(2) |s| on a_s.
pub fn variety_norm(g: GroupElement) -> Result<f64> {
    let z = g * tau(g).inverse();
    // M = z z^T
    let m11 = z.a * z.a + z.b * z.b;
    let m22 = z.c * z.c + z.d * z.d;
    let m12 = z.a * z.c + z.b * z.d;
    let trace = m11 + m22;
    let det = m11 * m22 - m12 * m12;
    if !(trace > 0.0) || (det - 1.0).abs() > 1e-6 * trace.max(1.0) {
        return Err(Error::Inconsistency(format!(
            "g tau(g)^{{-1}} theta(...)^{{-1}} not SPD with unit det: trace {trace}, det {det}"
        )));
    }
    let t = trace.max(2.0);
    let mu = 0.5 * (t + (t * t - 4.0).max(0.0).sqrt());
    Ok(std::f64::consts::FRAC_1_SQRT_2 * mu.ln())
}

/// Harish-Chandra's basic spherical function
/// phi_0(g) = (1/2pi) int_0^{2pi} e^{-s_Iw(g r_theta)} dtheta.
///
/// The integrand is (q(theta))^{-1/2} for the positive quadratic form
/// q(theta) = |g r_theta e_1|^2; its sharp minima sit along the eigenvector
/// of the smallest eigenvalue of the associated 2x2 form, which is used as
/// an anchor so the adaptive rule resolves the peak even for large g.
pub fn phi0(g: GroupElement, spec: &QuadratureSpec) -> Result<f64> {
    // q(theta) = (a cos + b sin)^2 + (c cos + d sin)^2 as a quadratic form.
    // Evaluated literally this cancels catastrophically near its minimum
    // (lam_min ~ 1/lam_max), so the form is diagonalized once and sampled as
    // lam_min + (lam_max - lam_min) sin^2(theta - theta_min), with
    // lam_min = det(Q)/lam_max = det(g)^2/lam_max taken from the stable side.
    let q11 = g.a * g.a + g.c * g.c;
    let q22 = g.b * g.b + g.d * g.d;
    let q12 = g.a * g.b + g.c * g.d;
    let mean = 0.5 * (q11 + q22);
    let diff = 0.5 * (q11 - q22);
    let rad = (diff * diff + q12 * q12).sqrt();
    let lam_max = mean + rad;
    let det = g.det();
    let lam_min = ((det * det) / lam_max).max(1e-300);
    let theta_min = if rad > 1e-14 {
        (lam_min - q11).atan2(q12)
    } else {
        0.0
    };
    let width = (lam_min / lam_max).sqrt().max(1e-12);
    let anchors = [
        Anchor::new(theta_min.rem_euclid(TAU), width),
        Anchor::new((theta_min + PI).rem_euclid(TAU), width),
        Anchor::new((theta_min - PI).rem_euclid(TAU), width),
    ];
    let gap = lam_max - lam_min;
    let f = |theta: f64| {
        let sn = (theta - theta_min).sin();
        let q = lam_min + gap * sn * sn;
        Complex64::new(q.max(1e-300).powf(-0.5), 0.0)
    };
    let r = integrate_interval(f, 0.0, TAU, &anchors, spec)?;
    Ok(r.value.re / TAU)
}

/// The Schwartz-space weight Theta(g H) = phi_0(g tau(g)^{-1})^{-1/2}.
pub fn theta_weight(g: GroupElement, spec: &QuadratureSpec) -> Result<f64> {
    let z = g * tau(g).inverse();
    Ok(phi0(z, spec)?.powf(-0.5))
}

/// Genericity test for the horosphere chart set:
/// x is in G_h iff Ad(x^{-1}) E is not proportional to Z.
pub fn in_gh(x: GroupElement) -> bool {
    let img = adjoint(x.inverse(), LieVec::e_gen());
    let scale = img.norm().max(1e-300);
    // proportional to Z = (0, 1, 1) means h = 0 and e = f
    let off = img.h.abs().max((img.e - img.f).abs());
    off / scale > 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_elements() -> Vec<GroupElement> {
        let mut v = vec![
            GroupElement::identity(),
            GroupElement::rotation(0.3),
            GroupElement::a_param(0.7),
            GroupElement::n_upper(1.0),
            GroupElement::exp_h(0.4),
            GroupElement::weyl(),
        ];
        // deterministic pseudo-random spread through Iwasawa parameters
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let th = next() * TAU;
            let s = 4.0 * (next() - 0.5);
            let x = 6.0 * (next() - 0.5);
            let g = GroupElement::rotation(th) * (GroupElement::a_param(s) * GroupElement::n_upper(x));
            v.push(if next() > 0.5 { g } else { g.neg() });
        }
        v
    }

    #[test]
    fn involutions() {
        for g in sample_elements() {
            assert!(theta(theta(g)).distance(g) < 1e-12);
            assert!(tau(tau(g)).distance(g) < 1e-12);
            assert!(theta(tau(g)).distance(tau(theta(g))) < 1e-12);
        }
    }

    #[test]
    fn theta_on_unipotent() {
        let g = theta(GroupElement::n_upper(1.5));
        assert!(g.distance(GroupElement::n_lower(-1.5)) < 1e-15);
    }

    #[test]
    fn tau_on_a_and_h() {
        let s = 0.8;
        assert!(tau(GroupElement::a_param(s)).distance(GroupElement::a_param(-s)) < 1e-15);
        let h = GroupElement::exp_h(1.2);
        assert!(tau(h).distance(h) < 1e-15);
        assert!(tau(h.neg()).distance(h.neg()) < 1e-15);
    }

    #[test]
    fn iwasawa_recomposition() {
        for g in sample_elements() {
            let IwasawaKAN { theta_k, s, x } = iwasawa(g);
            assert!((0.0..TAU).contains(&theta_k));
            let back = GroupElement::rotation(theta_k)
                * (GroupElement::a_param(s) * GroupElement::n_upper(x));
            assert!(back.distance(g) < 1e-10, "residual {}", back.distance(g));
        }
    }

    #[test]
    fn iwasawa_basics() {
        let id = iwasawa(GroupElement::identity());
        assert!(id.theta_k.abs() < 1e-15 && id.s.abs() < 1e-15 && id.x.abs() < 1e-15);
        let a = iwasawa(GroupElement::a_param(0.9));
        assert!(a.theta_k.abs() < 1e-15 && (a.s - 0.9).abs() < 1e-15 && a.x.abs() < 1e-15);
        let n = iwasawa(GroupElement::n_upper(1.0));
        let back = GroupElement::rotation(n.theta_k)
            * (GroupElement::a_param(n.s) * GroupElement::n_upper(n.x));
        assert!(back.distance(GroupElement::n_upper(1.0)) < 1e-10);
    }

    #[test]
    fn polar_recomposition() {
        for g in sample_elements() {
            let p = polar_kah(g).unwrap();
            assert!(p.recompose().distance(g) < 1e-10);
        }
    }

    #[test]
    fn polar_basics() {
        let p = polar_kah(GroupElement::a_param(0.6)).unwrap();
        assert!(p.theta_k.abs() < 1e-12 && (p.s - 0.6).abs() < 1e-12);
        assert!(p.u.abs() < 1e-12 && p.sign > 0.0);
        let theta = 0.9;
        let p = polar_kah(GroupElement::rotation(theta)).unwrap();
        assert!((p.theta_k - theta).abs() < 1e-12);
        assert!(p.s.abs() < 1e-12 && p.u.abs() < 1e-12 && p.sign > 0.0);
    }

    #[test]
    fn hwan_recomposition() {
        for g in sample_elements() {
            match hwan_decompose(g) {
                Ok(f) => assert!(f.recompose().distance(g) < 1e-10),
                Err(Error::BoundaryOrbit { .. }) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn hwan_basics() {
        let f = hwan_decompose(GroupElement::identity()).unwrap();
        assert_eq!(f.orbit, Orbit::Identity);
        assert!(f.u.abs() + f.s.abs() + f.x.abs() < 1e-12 && f.sign > 0.0);

        let f = hwan_decompose(GroupElement::weyl()).unwrap();
        assert_eq!(f.orbit, Orbit::Weyl);
        assert!(f.s.abs() < 1e-12);

        let f = hwan_decompose(GroupElement::a_param(1.3)).unwrap();
        assert_eq!(f.orbit, Orbit::Identity);
        assert!((f.s - 1.3).abs() < 1e-12 && f.u.abs() < 1e-12 && f.x.abs() < 1e-12);

        let f = hwan_decompose(GroupElement::weyl().inverse()).unwrap();
        assert_eq!(f.orbit, Orbit::Weyl);
        assert!(f.s.abs() < 1e-12 && f.u.abs() < 1e-12);
    }

    #[test]
    fn hwan_boundary() {
        // first column (1, 1) sits on the null cone between the orbits
        let g = GroupElement::n_lower(1.0);
        assert!(matches!(hwan_decompose(g), Err(Error::BoundaryOrbit { .. })));
    }

    #[test]
    fn killing_form_polarization() {
        let xs = [LieVec::h0(), LieVec::e_gen(), LieVec::f_gen(), LieVec::new(0.3, -1.2, 0.7)];
        for &x in &xs {
            for &y in &xs {
                assert!((killing(x, y) - killing(y, x)).abs() < 1e-12);
                let sum = killing(x.add(y), x.add(y));
                let polarized = killing(x, x) + 2.0 * killing(x, y) + killing(y, y);
                assert!((sum - polarized).abs() < 1e-10);
            }
        }
        let x = LieVec::new(0.5, 0.0, 0.0);
        assert!((killing(x, x) - 8.0 * 0.25).abs() < 1e-14);
    }

    #[test]
    fn norm_values() {
        assert!(variety_norm(GroupElement::identity()).unwrap().abs() < 1e-12);
        // a_s: z = a_{2s}, M = a_{4s}, |log a_g| = 2 sqrt(2) |s|
        for &s in &[0.3, -0.8, 1.7] {
            let n = variety_norm(GroupElement::a_param(s)).unwrap();
            assert!(
                (n - 2.0 * 2.0_f64.sqrt() * s.abs()).abs() < 1e-10,
                "norm(a_{s}) = {n}"
            );
        }
    }

    #[test]
    fn norm_unipotent_matrix_diagonal() {
        // y_x = z_x z_x^T must have diagonal ((1-x^2)^2 + x^2, 1 + x^2)
        let x = 1.7;
        let z = GroupElement::n_upper(x) * tau(GroupElement::n_upper(x)).inverse();
        let m11 = z.a * z.a + z.b * z.b;
        let m22 = z.c * z.c + z.d * z.d;
        assert!((m11 - ((1.0 - x * x).powi(2) + x * x)).abs() < 1e-12);
        assert!((m22 - (1.0 + x * x)).abs() < 1e-12);
    }

    #[test]
    fn norm_invariance_under_k_and_h() {
        // the norm is |log a_g| for the KAH class, so it only depends on g
        // through K g H; near the identity the eigenvalue gap degrades the
        // comparison to sqrt(eps), so small norms get an absolute allowance
        for g in sample_elements().into_iter().take(60) {
            let n0 = variety_norm(g).unwrap();
            let k = GroupElement::rotation(1.1);
            let h = GroupElement::exp_h(-0.7);
            let n1 = variety_norm(k * (g * h)).unwrap();
            if n0 > 1e-3 {
                assert!((n0 - n1).abs() < 1e-10, "K/H invariance broke: {n0} vs {n1}");
            } else {
                assert!((n0 - n1).abs() < 1e-6, "K/H invariance broke: {n0} vs {n1}");
            }
        }
    }

    #[test]
    fn norm_unipotent_lower_bound() {
        // |n_x . y0| >= (1/4) log(x^4/2 + 1/2) on a grid of |x| in [2, 100]
        for i in 0..1000 {
            let x = 2.0 + 98.0 * i as f64 / 999.0;
            let n = variety_norm(GroupElement::n_upper(x)).unwrap();
            let bound = 0.25 * (x.powi(4) / 2.0 + 0.5).ln();
            assert!(n >= bound, "x = {x}: {n} < {bound}");
        }
    }

    #[test]
    fn norm_lower_bound_small_t() {
        // for t = e^s < 1 and |x| >= 2: |a_s n_x . y0| >= log |x|
        for &s in &[-0.05, -0.3, -0.6, -1.2, -2.5] {
            for i in 0..200 {
                let x = 2.0 + 98.0 * i as f64 / 199.0;
                let g = GroupElement::a_param(s) * GroupElement::n_upper(x);
                let n = variety_norm(g).unwrap();
                assert!(n >= x.ln(), "s={s} x={x}: {n} < {}", x.ln());
            }
        }
    }

    #[test]
    fn phi0_basics() {
        let spec = QuadratureSpec::default();
        assert!((phi0(GroupElement::identity(), &spec).unwrap() - 1.0).abs() < 1e-10);
        let p = phi0(GroupElement::a_param(1.3), &spec).unwrap();
        let q = phi0(GroupElement::a_param(-1.3), &spec).unwrap();
        assert!((p - q).abs() < 1e-10, "Weyl symmetry: {p} vs {q}");
        // bi-K-invariance
        let g = GroupElement::a_param(0.9);
        let kgk = GroupElement::rotation(0.4) * (g * GroupElement::rotation(-1.0));
        assert!((phi0(g, &spec).unwrap() - phi0(kgk, &spec).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn phi0_against_oversampled_reference() {
        let spec = QuadratureSpec::default();
        let g = GroupElement::a_param(1.0);
        let p = phi0(g, &spec).unwrap();
        // independent high-order reference: large uniform trapezoid sum
        let n = 1_000_000usize;
        let mut acc = 0.0;
        for i in 0..n {
            let theta = TAU * i as f64 / n as f64;
            let col1 = (g.a * theta.cos() + g.b * theta.sin(), g.c * theta.cos() + g.d * theta.sin());
            let q = col1.0 * col1.0 + col1.1 * col1.1;
            acc += q.powf(-0.5);
        }
        acc /= n as f64;
        assert!((p - acc).abs() < 1e-8, "phi0 {p} vs reference {acc}");
    }

    #[test]
    fn theta_weight_basics() {
        let spec = QuadratureSpec::default();
        assert!((theta_weight(GroupElement::identity(), &spec).unwrap() - 1.0).abs() < 1e-10);
        assert!((theta_weight(GroupElement::exp_h(0.9), &spec).unwrap() - 1.0).abs() < 1e-10);
        assert!((theta_weight(GroupElement::exp_h(0.9).neg(), &spec).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn theta_weight_unipotent_growth() {
        let spec = QuadratureSpec::default();
        let mut c_min = f64::INFINITY;
        for i in 0..60 {
            let x = 2.0 + 98.0 * i as f64 / 59.0;
            let theta = theta_weight(GroupElement::n_upper(x), &spec).unwrap();
            c_min = c_min.min(theta / x);
        }
        assert!(c_min > 0.0, "fitted constant must be positive, got {c_min}");
    }

    #[test]
    fn gh_is_everything() {
        assert!(in_gh(GroupElement::identity()));
        assert!(in_gh(GroupElement::rotation(std::f64::consts::FRAC_PI_4)));
        for g in sample_elements() {
            assert!(in_gh(g));
        }
    }

    #[test]
    fn adjoint_conjugation_oracle() {
        // Ad(r_{pi/4}) E by direct 2x2 conjugation
        let g = GroupElement::rotation(std::f64::consts::FRAC_PI_4);
        let img = adjoint(g.inverse(), LieVec::e_gen());
        // r_{-pi/4} E r_{pi/4} = 1/2 [[1, 1], [-1, -1]]
        assert!((img.h - 0.5).abs() < 1e-12);
        assert!((img.e - 0.5).abs() < 1e-12);
        assert!((img.f + 0.5).abs() < 1e-12);
    }

    #[test]
    fn exp_lie_matches_group_constructors() {
        assert!(exp_lie(LieVec::z().scale(0.7)).distance(GroupElement::exp_h(0.7)) < 1e-12);
        assert!(exp_lie(LieVec::h0().scale(0.4)).distance(GroupElement::a_param(0.4)) < 1e-12);
        assert!(exp_lie(LieVec::e_gen().scale(1.9)).distance(GroupElement::n_upper(1.9)) < 1e-12);
        let k = LieVec::new(0.0, -0.6, 0.6); // 0.6 * (F - E) generates rotations
        assert!(exp_lie(k).distance(GroupElement::rotation(0.6)) < 1e-12);
    }
}
