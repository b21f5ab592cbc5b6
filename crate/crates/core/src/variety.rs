//! The de Sitter surface model of Y = G/H.
//!
//! A coset gH is realized as the adjoint image Ad(g) Z on the one-sheeted
//! hyperboloid `x1^2 + x2^2 - x3^2 = 1` inside sl(2, R), with base point
//! y0 = Z = (0, 1, 0). Chart coordinates are
//!
//! ```text
//! x1 = sqrt(1+s^2) cos(phi),  x2 = sqrt(1+s^2) sin(phi),  x3 = s,
//! ```
//!
//! in which the invariant measure is exactly `dphi ds` (the induced metric is
//! diag(1+s^2, -1/(1+s^2)), |det| = 1; the normalization is certified by the
//! invariance tests rather than assumed). Horosphere parameters follow the
//! polar chart of Xi: a point (phi_tilde, s) corresponds to the coset
//! r_{phi_tilde/2} a_s M_H N, since Ad(r_theta) rotates the (x1, x2)-plane
//! by 2 theta.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_interval, integrate_line, Anchor, QuadResult, QuadratureSpec};
use crate::sl2::{adjoint_z_coords, exp_lie, in_gh, GroupElement, LieVec};

/// A point of Y carrying both ambient and chart coordinates.
#[derive(Debug, Clone, Copy)]
pub struct PointY {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub phi: f64,
    pub s: f64,
}

impl PointY {
    /// Build from ambient coordinates; the hyperboloid constraint must hold
    /// within 1e-10.
    pub fn from_ambient(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let residual = (x1 * x1 + x2 * x2 - x3 * x3 - 1.0).abs();
        if !residual.is_finite() || residual > 1e-10 * (1.0 + x3 * x3) {
            return Err(Error::Domain(format!(
                "point ({x1}, {x2}, {x3}) off the hyperboloid: residual {residual:.3e}"
            )));
        }
        let mut phi = x2.atan2(x1);
        if phi < 0.0 {
            phi += TAU;
        }
        Ok(PointY { x1, x2, x3, phi, s: x3 })
    }

    pub fn from_chart(phi: f64, s: f64) -> Self {
        let r = (1.0 + s * s).sqrt();
        let phi = phi.rem_euclid(TAU);
        PointY {
            x1: r * phi.cos(),
            x2: r * phi.sin(),
            x3: s,
            phi,
            s,
        }
    }

    pub fn base() -> Self {
        PointY::from_chart(std::f64::consts::FRAC_PI_2, 0.0)
    }

    pub fn ambient(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// Constraint defect |x1^2 + x2^2 - x3^2 - 1| scaled by the coordinate
    /// magnitude, so the tolerance is meaningful for far-out points too.
    pub fn constraint_residual(&self) -> f64 {
        let q = self.x1 * self.x1 + self.x2 * self.x2 - self.x3 * self.x3 - 1.0;
        q.abs() / (1.0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3)
    }

    /// Euclidean distance in the ambient coordinates.
    pub fn ambient_dist2(&self, other: [f64; 3]) -> f64 {
        (self.x1 - other[0]).powi(2) + (self.x2 - other[1]).powi(2) + (self.x3 - other[2]).powi(2)
    }
}

/// The projection G -> Y, g |-> Ad(g) Z in hyperboloid coordinates.
pub fn iota(g: GroupElement) -> PointY {
    let (x1, x2, x3) = adjoint_z_coords(g);
    let mut phi = x2.atan2(x1);
    if phi < 0.0 {
        phi += TAU;
    }
    PointY { x1, x2, x3, phi, s: x3 }
}

/// Left action of G on Y through the matrix model.
pub fn act(g: GroupElement, y: PointY) -> PointY {
    // X = [[x1, x2 + x3], [x2 - x3, -x1]], X' = g X g^{-1}
    let m11 = y.x1;
    let m12 = y.x2 + y.x3;
    let m21 = y.x2 - y.x3;
    let inv = g.inverse();
    let p11 = g.a * m11 + g.b * m21;
    let p12 = g.a * m12 - g.b * m11;
    let p21 = g.c * m11 + g.d * m21;
    let p22 = g.c * m12 - g.d * m11;
    let r11 = p11 * inv.a + p12 * inv.c;
    let r12 = p11 * inv.b + p12 * inv.d;
    let r21 = p21 * inv.a + p22 * inv.c;
    let r22 = p21 * inv.b + p22 * inv.d;
    let x1 = 0.5 * (r11 - r22);
    let x2 = 0.5 * (r12 + r21);
    let x3 = 0.5 * (r12 - r21);
    let mut phi = x2.atan2(x1);
    if phi < 0.0 {
        phi += TAU;
    }
    PointY { x1, x2, x3, phi, s: x3 }
}

/// A smooth section Y -> G: iota(group_section(y)) = y away from nothing
/// (the section is global in this model).
pub fn group_section(y: PointY) -> GroupElement {
    let sigma = 0.5 * y.s.asinh();
    let theta = 0.5 * (y.phi - std::f64::consts::FRAC_PI_2);
    GroupElement::rotation(theta) * GroupElement::a_param(sigma)
}

/// A horosphere parameter: the K/(M_H cap K)-angle (mod 2 pi) and the
/// A-parameter of the polar chart of Xi.
#[derive(Debug, Clone, Copy)]
pub struct HoroPoint {
    pub phi_tilde: f64,
    pub s: f64,
}

impl HoroPoint {
    pub fn new(phi_tilde: f64, s: f64) -> Self {
        HoroPoint {
            phi_tilde: phi_tilde.rem_euclid(TAU),
            s,
        }
    }

    /// The group element r_{phi_tilde/2} a_s representing the coset.
    pub fn representative(&self) -> GroupElement {
        GroupElement::rotation(0.5 * self.phi_tilde) * GroupElement::a_param(self.s)
    }
}

/// The Xi-coordinates of the coset g M_H N, via the Iwasawa decomposition.
pub fn xi_of(g: GroupElement) -> HoroPoint {
    let iw = crate::sl2::iwasawa(g);
    HoroPoint::new(2.0 * iw.theta_k, iw.s)
}

/// Left translation of a horosphere parameter: g . xi.
pub fn xi_translate(g: GroupElement, xi: HoroPoint) -> HoroPoint {
    xi_of(g * xi.representative())
}

/// The point of the horocycle attached to xi at unipotent parameter x.
pub fn horocycle(xi: HoroPoint, x: f64) -> PointY {
    iota(xi.representative() * GroupElement::n_upper(x))
}

/// A translated chart of the horosphere manifold, based at an element of G_h.
#[derive(Debug, Clone, Copy)]
pub struct HoroChart {
    base: GroupElement,
}

impl HoroChart {
    pub fn new(base: GroupElement) -> Result<Self> {
        if !in_gh(base) {
            return Err(Error::Domain(
                "chart base element is outside G_h".into(),
            ));
        }
        Ok(HoroChart { base })
    }

    pub fn identity() -> Self {
        HoroChart { base: GroupElement::identity() }
    }

    pub fn weyl() -> Self {
        HoroChart { base: GroupElement::weyl() }
    }

    pub fn base(&self) -> GroupElement {
        self.base
    }
}

/// The translated horocycle curve iota(r_{phi_tilde/2} a_s x^{-1} n_x0 x).
pub fn chart_transport(chart: &HoroChart, xi: HoroPoint, x: f64) -> PointY {
    let b = chart.base();
    iota(xi.representative() * (b.inverse() * (GroupElement::n_upper(x) * b)))
}

/// Integral of `f` over Y against the invariant measure dphi ds. The outer
/// angular integral is adaptive over the full circle; the inner s-integral
/// runs over the real line with the supplied anchors (e.g. the s-location of
/// a bump) and tail hint.
pub fn invariant_integral<F>(
    f: F,
    s_anchors: &[Anchor],
    s_tail_exponent: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadResult>
where
    F: Fn(PointY) -> Complex64 + Sync,
{
    let inner_spec = QuadratureSpec {
        tail_exponent: s_tail_exponent,
        ..spec.tightened(1e-2)
    };
    let evaluations = std::sync::atomic::AtomicUsize::new(0);
    let outer = |phi: f64| -> Complex64 {
        let inner = integrate_line(
            |s: f64| f(PointY::from_chart(phi, s)),
            s_anchors,
            &inner_spec,
        );
        match inner {
            Ok(r) => {
                evaluations.fetch_add(r.evaluations, std::sync::atomic::Ordering::Relaxed);
                r.value
            }
            // propagate failure through a NaN so the outer rule reports it
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let result = integrate_interval(outer, 0.0, TAU, &[], spec);
    match result {
        Ok(mut r) => {
            r.evaluations += evaluations.load(std::sync::atomic::Ordering::Relaxed);
            Ok(r)
        }
        Err(Error::NanSample { .. }) => Err(Error::Domain(
            "inner s-integral failed during invariant integration".into(),
        )),
        Err(e) => Err(e),
    }
}

/// Central second difference in one chart coordinate.
fn second_diff<F>(f: &F, y: PointY, axis: usize, h: f64) -> Complex64
where
    F: Fn(PointY) -> Complex64,
{
    let shifted = |delta: f64| match axis {
        0 => PointY::from_chart(y.phi + delta, y.s),
        _ => PointY::from_chart(y.phi, y.s + delta),
    };
    (f(shifted(h)) - f(shifted(0.0)) * 2.0 + f(shifted(-h))) / (h * h)
}

fn first_diff_s<F>(f: &F, y: PointY, h: f64) -> Complex64
where
    F: Fn(PointY) -> Complex64,
{
    (f(PointY::from_chart(y.phi, y.s + h)) - f(PointY::from_chart(y.phi, y.s - h))) / (2.0 * h)
}

/// The invariant wave (Casimir) operator in chart coordinates,
///
/// ```text
/// box f = (1+s^2)^{-1} d^2f/dphi^2 - (1+s^2) d^2f/ds^2 - 2s df/ds,
/// ```
///
/// by central differences with one Richardson step.
pub fn wave_operator<F>(f: &F, y: PointY, step: f64) -> Result<Complex64>
where
    F: Fn(PointY) -> Complex64,
{
    if !(step > 0.0) {
        return Err(Error::InvalidSpec("finite-difference step must be > 0".into()));
    }
    let apply = |h: f64| -> Complex64 {
        let w = 1.0 + y.s * y.s;
        second_diff(f, y, 0, h) / w - w * second_diff(f, y, 1, h) - 2.0 * y.s * first_diff_s(f, y, h)
    };
    let coarse = apply(step);
    let fine = apply(0.5 * step);
    let value = (fine * 4.0 - coarse) / 3.0;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Domain("non-finite sample in wave operator".into()));
    }
    Ok(value)
}

/// Lie derivative (L_u f)(y) = d/dt|_{t=0} f(exp(-t u) y), by a central
/// difference with one Richardson step. Returns the value and an error
/// estimate from the two stencils.
pub fn lie_derivative<F>(f: &F, u: LieVec, y: PointY, step: f64) -> Result<(Complex64, f64)>
where
    F: Fn(PointY) -> Complex64,
{
    if !(step > 0.0) {
        return Err(Error::InvalidSpec("finite-difference step must be > 0".into()));
    }
    let diff = |h: f64| -> Complex64 {
        let plus = f(act(exp_lie(u.scale(-h)), y));
        let minus = f(act(exp_lie(u.scale(h)), y));
        (plus - minus) / (2.0 * h)
    };
    let coarse = diff(step);
    let fine = diff(0.5 * step);
    let value = (fine * 4.0 - coarse) / 3.0;
    let err = (fine - coarse).norm() / 3.0;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Domain("non-finite sample in Lie derivative".into()));
    }
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn iota_base_point() {
        let y = iota(GroupElement::identity());
        assert!((y.x1, y.x2, y.x3) == (0.0, 1.0, 0.0) || y.ambient_dist2([0.0, 1.0, 0.0]) < 1e-30);
    }

    #[test]
    fn iota_on_a() {
        // direct 2x2 conjugation gives (0, cosh 2s, sinh 2s)
        let s = 0.8;
        let y = iota(GroupElement::a_param(s));
        assert!(y.x1.abs() < 1e-12);
        assert!((y.x2 - (2.0 * s).cosh()).abs() < 1e-12);
        assert!((y.x3 - (2.0 * s).sinh()).abs() < 1e-12);
    }

    #[test]
    fn iota_on_n() {
        // (x, 1 - x^2/2, -x^2/2), and the constraint holds identically
        let x = 1.3;
        let y = iota(GroupElement::n_upper(x));
        assert!((y.x1 - x).abs() < 1e-12);
        assert!((y.x2 - (1.0 - x * x / 2.0)).abs() < 1e-12);
        assert!((y.x3 + x * x / 2.0).abs() < 1e-12);
        assert!(y.constraint_residual() < 1e-12);
    }

    #[test]
    fn iota_right_h_invariant() {
        let g = GroupElement::rotation(0.7) * GroupElement::a_param(-0.4);
        let h = GroupElement::exp_h(1.1);
        let y1 = iota(g);
        let y2 = iota(g * h);
        let y3 = iota(g * h.neg());
        assert!(y1.ambient_dist2(y2.ambient()) < 1e-20);
        assert!(y1.ambient_dist2(y3.ambient()) < 1e-20);
    }

    #[test]
    fn chart_roundtrip() {
        for &(phi, s) in &[(0.0, 0.0), (1.0, 2.0), (4.5, -3.0), (FRAC_PI_2, 0.0)] {
            let y = PointY::from_chart(phi, s);
            assert!(y.constraint_residual() < 1e-12);
            let z = PointY::from_ambient(y.x1, y.x2, y.x3).unwrap();
            assert!((z.phi - y.phi).abs() < 1e-12 && (z.s - y.s).abs() < 1e-12);
        }
    }

    #[test]
    fn section_inverts_iota() {
        for &(phi, s) in &[(0.2, 0.0), (2.8, 1.5), (5.9, -2.3)] {
            let y = PointY::from_chart(phi, s);
            let g = group_section(y);
            let back = iota(g);
            assert!(y.ambient_dist2(back.ambient()) < 1e-20);
        }
    }

    #[test]
    fn action_preserves_constraint() {
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let g = GroupElement::rotation(next() * TAU)
                * (GroupElement::a_param(3.0 * (next() - 0.5)) * GroupElement::n_upper(4.0 * (next() - 0.5)));
            let y = PointY::from_chart(next() * TAU, 6.0 * (next() - 0.5));
            let z = act(g, y);
            assert!(z.constraint_residual() < 1e-12, "residual {}", z.constraint_residual());
        }
    }

    #[test]
    fn action_matches_iota() {
        let g = GroupElement::a_param(0.6) * GroupElement::n_upper(-1.2);
        let y = act(g, PointY::base());
        let z = iota(g);
        assert!(y.ambient_dist2(z.ambient()) < 1e-24);
    }

    #[test]
    fn horocycle_at_origin() {
        let xi = HoroPoint::new(0.0, 0.0);
        let x = 0.9;
        let y = horocycle(xi, x);
        assert!((y.x1 - x).abs() < 1e-12);
        assert!((y.x2 - (1.0 - x * x / 2.0)).abs() < 1e-12);
        assert!((y.x3 + x * x / 2.0).abs() < 1e-12);
    }

    #[test]
    fn horocycle_at_s() {
        // conjugation oracle: x2 = (e^{2s}(1-x^2) + e^{-2s})/2, x1 = x,
        // x3 = (e^{2s}(1-x^2) - e^{-2s})/2
        let s = 0.7;
        let xi = HoroPoint::new(0.0, s);
        for &x in &[0.0, 0.5, -1.8] {
            let y = horocycle(xi, x);
            let e2 = (2.0 * s).exp();
            let em2 = (-2.0 * s).exp();
            assert!((y.x1 - x).abs() < 1e-12);
            assert!((y.x2 - 0.5 * (e2 * (1.0 - x * x) + em2)).abs() < 1e-12);
            assert!((y.x3 - 0.5 * (e2 * (1.0 - x * x) - em2)).abs() < 1e-12);
            assert!(y.constraint_residual() < 1e-12);
        }
    }

    #[test]
    fn horocycle_x0_is_iota() {
        let xi = HoroPoint::new(2.2, -0.9);
        let y = horocycle(xi, 0.0);
        let z = iota(xi.representative());
        assert!(y.ambient_dist2(z.ambient()) < 1e-24);
    }

    #[test]
    fn horocycle_escapes() {
        // x3 ~ -x^2 e^{2s}/2 as |x| grows
        let xi = HoroPoint::new(1.0, 0.4);
        for &x in &[50.0, 200.0, 1000.0] {
            let y = horocycle(xi, x);
            let predicted = -x * x * (2.0 * xi.s).exp() / 2.0;
            assert!((y.x3 / predicted - 1.0).abs() < 1e-2, "x3 {} vs {}", y.x3, predicted);
        }
    }

    #[test]
    fn chart_transport_identity_reduces() {
        let chart = HoroChart::identity();
        let xi = HoroPoint::new(0.8, -0.3);
        for &x in &[0.0, 1.1, -2.5] {
            let a = chart_transport(&chart, xi, x);
            let b = horocycle(xi, x);
            assert!(a.ambient_dist2(b.ambient()) < 1e-24);
        }
    }

    #[test]
    fn chart_transport_weyl_is_opposite_horocycle() {
        // w0^{-1} n_x w0 is the lower unipotent with parameter -x, so the
        // transported curve through the base coset is the N-bar orbit
        let chart = HoroChart::weyl();
        let xi = HoroPoint::new(0.0, 0.0);
        let x = 0.7;
        let y = chart_transport(&chart, xi, x);
        let z = iota(GroupElement::n_lower(-x));
        assert!(y.ambient_dist2(z.ambient()) < 1e-20);
        assert!(y.constraint_residual() < 1e-12);
    }

    #[test]
    fn xi_translate_by_rotation_shifts_angle() {
        let xi = HoroPoint::new(1.2, 0.5);
        let alpha = 0.6;
        let moved = xi_translate(GroupElement::rotation(alpha), xi);
        assert!((moved.phi_tilde - (xi.phi_tilde + 2.0 * alpha).rem_euclid(TAU)).abs() < 1e-10);
        assert!((moved.s - xi.s).abs() < 1e-10);
    }

    #[test]
    fn polar_consistency_with_iota() {
        // iota(g) has x3 = sinh(2 s_polar)
        let g = GroupElement::rotation(1.9) * (GroupElement::a_param(0.8) * GroupElement::n_upper(0.3));
        let y = iota(g);
        let p = crate::sl2::polar_kah(g).unwrap();
        assert!((y.x3 - (2.0 * p.s).sinh()).abs() < 1e-10);
    }

    #[test]
    fn invariant_integral_gaussian() {
        // f = e^{-s^2} / (2 pi), angle-independent
        let spec = QuadratureSpec::default();
        let r = invariant_integral(
            |y: PointY| c((-y.s * y.s).exp() / TAU),
            &[Anchor::new(0.0, 1.0)],
            None,
            &spec,
        )
        .unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-8, "got {}", r.value.re);
    }

    #[test]
    fn invariant_integral_translation_invariance() {
        let spec = QuadratureSpec {
            rel_tol: 1e-9,
            ..Default::default()
        };
        let bump = |y: PointY| c((-(y.ambient_dist2([0.0, 1.0, 0.0]))).exp());
        let base = invariant_integral(bump, &[Anchor::new(0.0, 1.0)], None, &spec).unwrap();
        for &(th, s, x) in &[(0.4, 0.3, 0.2), (2.0, -0.5, 1.0)] {
            let g = GroupElement::rotation(th) * (GroupElement::a_param(s) * GroupElement::n_upper(x));
            let ginv = g.inverse();
            let moved = invariant_integral(
                |y: PointY| bump(act(ginv, y)),
                &[Anchor::new(0.0, 2.0), Anchor::new(iota(g).s, 1.0)],
                None,
                &spec,
            )
            .unwrap();
            let rel = (moved.value - base.value).norm() / base.value.norm();
            assert!(rel < 1e-8, "invariance residual {rel}");
        }
    }

    #[test]
    fn wave_operator_on_constant() {
        let y = PointY::from_chart(1.0, 0.5);
        let v = wave_operator(&|_y| c(3.0), y, 1e-3).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn wave_operator_invariance_spot() {
        // box(f o g) = (box f) o g at sample points, within FD tolerance
        let f = |y: PointY| c((-(y.ambient_dist2([0.3, 1.1, 0.2]))).exp());
        let g = GroupElement::a_param(0.4) * GroupElement::n_upper(0.5);
        let y = PointY::from_chart(0.9, -0.2);
        let lhs = wave_operator(&|p| f(act(g, p)), y, 1e-3).unwrap();
        let rhs = wave_operator(&f, act(g, y), 1e-3).unwrap();
        assert!((lhs - rhs).norm() < 1e-5 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
    }

    #[test]
    fn lie_derivative_constant_and_linearity() {
        let y = PointY::from_chart(0.7, 0.4);
        let (v, _) = lie_derivative(&|_y| c(2.5), LieVec::z(), y, 1e-3).unwrap();
        assert!(v.norm() < 1e-10);

        let f = |p: PointY| Complex64::new(p.x2, p.x1 * p.x3);
        let u1 = LieVec::new(0.3, -0.2, 0.5);
        let u2 = LieVec::new(-0.1, 0.8, 0.4);
        let (d1, _) = lie_derivative(&f, u1, y, 1e-4).unwrap();
        let (d2, _) = lie_derivative(&f, u2, y, 1e-4).unwrap();
        let (dsum, _) = lie_derivative(&f, u1.add(u2), y, 1e-4).unwrap();
        assert!((dsum - d1 - d2).norm() < 1e-7 * (1.0 + dsum.norm()));
    }

    #[test]
    fn lie_derivative_symbolic_oracle() {
        // u = Z stabilizes the base point, so every derivative along it is 0
        let f = |p: PointY| c(p.x3);
        let (v0, _) = lie_derivative(&f, LieVec::z(), PointY::base(), 1e-4).unwrap();
        assert!(v0.norm() < 1e-10);
        // u = H0: exp(-t H0) y0 = iota(a_{-t}) has x3(t) = -sinh(2t), so the
        // derivative of x3 at t = 0 is -2 (symbolic 2x2 conjugation oracle)
        let (v, err) = lie_derivative(&f, LieVec::h0(), PointY::base(), 1e-4).unwrap();
        assert!((v.re + 2.0).abs() < 1e-8, "got {} (err {err})", v.re);
        let t = 0.37;
        let moved = act(exp_lie(LieVec::h0().scale(-t)), PointY::base());
        assert!((moved.x3 + (2.0 * t).sinh()).abs() < 1e-12);
    }
}
