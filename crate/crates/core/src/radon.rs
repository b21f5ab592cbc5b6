//! The horospherical Radon transform, its translates, and the dual transform.
//!
//! For a parameter xi = (phi_tilde, s) the transform is the absolutely
//! convergent line integral
//!
//! ```text
//! R(f)(xi) = int_R f( iota( r_{phi_tilde/2} a_s n_x ) ) dx,
//! ```
//!
//! and the translated transforms R_x replace n_x by its conjugate under a
//! chart base element of G_h. The dual transform integrates a function on Xi
//! over the family of horospheres through a point:
//! `R^v(F)(gH) = int F(xi(g exp(uZ))) du`.
//!
//! Numerically the delicate part is that horocycle integrands concentrate on
//! windows of width ~ e^{-2s} around x = +/-1 as s grows. All ambient
//! coordinates of the integration curves here are quadratic polynomials in
//! the unipotent parameter, so the squared distance to the decay focus of the
//! integrand is an explicit quartic; its critical points (closed-form cubic)
//! provide quadrature anchors that make the adaptive engine reliable at any
//! grid depth.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::io::Write;

use crate::error::{Error, Result};
use crate::funcspace::FunctionOnY;
use crate::quadrature::{integrate_line, Anchor, GridSpec, QuadResult, QuadratureSpec};
use crate::sl2::GroupElement;
use crate::variety::{horocycle, iota, xi_of, HoroChart, HoroPoint, PointY};

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 = 0 (degenerate degrees
/// included).
fn real_cubic_roots(c0: f64, c1: f64, c2: f64, c3: f64) -> Vec<f64> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs()).max(c3.abs());
    if scale == 0.0 {
        return vec![];
    }
    if c3.abs() < 1e-14 * scale {
        // quadratic c2 x^2 + c1 x + c0
        if c2.abs() < 1e-14 * scale {
            if c1.abs() < 1e-14 * scale {
                return vec![];
            }
            return vec![-c0 / c1];
        }
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return vec![];
        }
        let r = disc.sqrt();
        return vec![(-c1 + r) / (2.0 * c2), (-c1 - r) / (2.0 * c2)];
    }
    // depressed cubic t^3 + p t + q with x = t - c2/(3 c3)
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = Vec::with_capacity(3);
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        roots.push(u + v + shift);
    } else {
        // three real roots
        let r = (-p / 3.0).max(0.0).sqrt();
        if r == 0.0 {
            roots.push(shift);
        } else {
            let phi = (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0).acos();
            for k in 0..3 {
                roots.push(2.0 * r * ((phi + TAU * k as f64) / 3.0).cos() + shift);
            }
        }
    }
    roots
}

/// Quadrature anchors for an integrand whose magnitude is controlled by the
/// weighted squared distance of a quadratic-in-x curve to a focus point.
/// `width` is the length scale of the integrand around its minima.
pub(crate) fn curve_anchors<C>(curve: C, focus: [f64; 3], mask: [f64; 3], width: f64) -> Vec<Anchor>
where
    C: Fn(f64) -> PointY,
{
    // fit p_i(x) = alpha_i + beta_i x + gamma_i x^2 from three samples
    let p0 = curve(0.0).ambient();
    let pp = curve(1.0).ambient();
    let pm = curve(-1.0).ambient();
    let mut c0 = 0.0;
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    let mut c3 = 0.0;
    let mut quad = [(0.0, 0.0, 0.0); 3];
    for i in 0..3 {
        let alpha = p0[i];
        let beta = 0.5 * (pp[i] - pm[i]);
        let gamma = 0.5 * (pp[i] + pm[i]) - p0[i];
        quad[i] = (alpha, beta, gamma);
        let m = mask[i];
        let a = m * (alpha - focus[i]);
        let b = m * beta;
        let g = m * gamma;
        // D'(x) = sum 2(A + Bx + Gx^2)(B + 2Gx)
        c0 += 2.0 * a * b;
        c1 += 2.0 * (2.0 * a * g + b * b);
        c2 += 6.0 * b * g;
        c3 += 4.0 * g * g;
    }
    let dist2 = |x: f64| -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let (alpha, beta, gamma) = quad[i];
            let v = alpha + beta * x + gamma * x * x - focus[i];
            d += mask[i] * v * v;
        }
        d
    };
    let d2_second = |x: f64| -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let (alpha, beta, gamma) = quad[i];
            let v = alpha + beta * x + gamma * x * x - focus[i];
            let v1 = beta + 2.0 * gamma * x;
            d += mask[i] * 2.0 * (v1 * v1 + v * (2.0 * gamma));
        }
        d
    };
    real_cubic_roots(c0, c1, c2, c3)
        .into_iter()
        .filter(|x| x.is_finite())
        .map(|x| {
            let curv = d2_second(x).abs().max(1e-12);
            let scale = ((width * width + dist2(x)) / (0.5 * curv)).sqrt();
            Anchor::new(x, scale.clamp(1e-9, 10.0))
        })
        .collect()
}

fn anchors_for_curve<C>(f: &FunctionOnY, curve: C) -> Vec<Anchor>
where
    C: Fn(f64) -> PointY,
{
    match f.decay.focus() {
        Some((focus, mask, width)) => curve_anchors(curve, focus, mask, width),
        None => vec![],
    }
}

/// Guarded sampler along a curve: integrands for decaying classes are cut to
/// zero at |x| beyond the overflow-safe range, far past any contribution.
const CURVE_PARAM_CUTOFF: f64 = 1e60;

fn curve_integrand<'a, C>(f: &'a FunctionOnY, curve: C, abs: bool) -> impl Fn(f64) -> Complex64 + 'a
where
    C: Fn(f64) -> PointY + 'a,
{
    move |x: f64| {
        if x.abs() > CURVE_PARAM_CUTOFF {
            return Complex64::new(0.0, 0.0);
        }
        let p = curve(x);
        // points past the floating-point horizon are far outside the support
        // of any admissible decay class
        if !p.x1.is_finite() || !p.x2.is_finite() || !p.x3.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let v = f.eval(p);
        if abs {
            Complex64::new(v.norm(), 0.0)
        } else {
            v
        }
    }
}

fn line_spec(f: &FunctionOnY, spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        tail_exponent: f.decay.horocycle_tail_exponent(),
        ..spec.clone()
    }
}

/// The Radon transform R(f)(xi).
pub fn radon(f: &FunctionOnY, xi: HoroPoint, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !f.decay.horocycle_integrable() {
        return Err(Error::Divergent(format!(
            "decay class of {} does not give absolutely convergent horocycle integrals",
            f.id
        )));
    }
    let curve = |x: f64| horocycle(xi, x);
    let anchors = anchors_for_curve(f, curve);
    integrate_line(curve_integrand(f, curve, false), &anchors, &line_spec(f, spec))
}

/// L^1 mass of f along the horocycle attached to xi.
pub fn radon_abs(f: &FunctionOnY, xi: HoroPoint, spec: &QuadratureSpec) -> Result<QuadResult> {
    if !f.decay.horocycle_integrable() {
        return Err(Error::Divergent(format!(
            "decay class of {} does not give absolutely convergent horocycle integrals",
            f.id
        )));
    }
    let curve = |x: f64| horocycle(xi, x);
    let anchors = anchors_for_curve(f, curve);
    integrate_line(curve_integrand(f, curve, true), &anchors, &line_spec(f, spec))
}

/// The translated transform R_x(f) over the chart-transported curve.
pub fn radon_translated(
    f: &FunctionOnY,
    chart: &HoroChart,
    xi: HoroPoint,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    if !f.decay.horocycle_integrable() {
        return Err(Error::Divergent(format!(
            "decay class of {} does not give absolutely convergent horocycle integrals",
            f.id
        )));
    }
    let curve = |x: f64| crate::variety::chart_transport(chart, xi, x);
    let anchors = anchors_for_curve(f, curve);
    integrate_line(curve_integrand(f, curve, false), &anchors, &line_spec(f, spec))
}

/// Sampled values of a transform on a rectangular (phi_tilde, s) grid.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    pub grid: GridSpec,
    /// Values in s-major order: index = i_s * n_angle + i_phi.
    pub values: Vec<Complex64>,
    /// Per-point error estimates; infinite where a point failed.
    pub errors: Vec<f64>,
    pub source_id: String,
    pub transform_id: String,
}

impl TransformGrid {
    pub fn index(&self, i_phi: usize, i_s: usize) -> usize {
        i_s * self.grid.angle.n + i_phi
    }

    pub fn value_at(&self, i_phi: usize, i_s: usize) -> Complex64 {
        self.values[self.index(i_phi, i_s)]
    }

    /// Per-s-slice supremum of |value| (the decay diagnostic).
    pub fn slice_sups(&self) -> Vec<(f64, f64)> {
        let ss = self.grid.s.points();
        ss.iter()
            .enumerate()
            .map(|(i_s, &s)| {
                let sup = (0..self.grid.angle.n)
                    .map(|i_phi| self.value_at(i_phi, i_s).norm())
                    .fold(0.0_f64, f64::max)
                    ;
                (s, sup)
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bilinear interpolation, periodic in the angle; zero outside the
    /// s-range.
    pub fn interpolate(&self, phi_tilde: f64, s: f64) -> Complex64 {
        let na = self.grid.angle.n;
        let ha = self.grid.angle.step();
        let phi = phi_tilde.rem_euclid(TAU);
        let fa = phi / ha;
        let ia = (fa.floor() as usize) % na;
        let ta = fa - fa.floor();

        let s_axis = &self.grid.s;
        if s < s_axis.lo || s > s_axis.hi {
            return Complex64::new(0.0, 0.0);
        }
        let hs = s_axis.step();
        let fs = (s - s_axis.lo) / hs;
        let is = (fs.floor() as usize).min(s_axis.n - 2);
        let ts = fs - is as f64;

        let v00 = self.value_at(ia, is);
        let v10 = self.value_at((ia + 1) % na, is);
        let v01 = self.value_at(ia, is + 1);
        let v11 = self.value_at((ia + 1) % na, is + 1);
        v00 * ((1.0 - ta) * (1.0 - ts))
            + v10 * (ta * (1.0 - ts))
            + v01 * ((1.0 - ta) * ts)
            + v11 * (ta * ts)
    }

    /// CSV serialization: header `phi,s,re,im,err`, rows in s-major order,
    /// full double precision.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "phi,s,re,im,err")?;
        let phis = self.grid.angle.points();
        let ss = self.grid.s.points();
        for (i_s, &s) in ss.iter().enumerate() {
            for (i_phi, &phi) in phis.iter().enumerate() {
                let v = self.value_at(i_phi, i_s);
                let e = self.errors[self.index(i_phi, i_s)];
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    phi, s, v.re, v.im, e
                )?;
            }
        }
        Ok(())
    }
}

/// Batch Radon transform over a grid; per-point failures are flagged with an
/// infinite error estimate and the batch continues.
pub fn radon_grid(f: &FunctionOnY, grid: &GridSpec, spec: &QuadratureSpec) -> Result<TransformGrid> {
    grid.angle.validate()?;
    grid.s.validate()?;
    if !f.decay.horocycle_integrable() {
        return Err(Error::Divergent(format!(
            "decay class of {} does not give absolutely convergent horocycle integrals",
            f.id
        )));
    }
    let phis = grid.angle.points();
    let ss = grid.s.points();
    let mut points = Vec::with_capacity(grid.len());
    for &s in &ss {
        for &phi in &phis {
            points.push(HoroPoint::new(phi, s));
        }
    }
    let results: Vec<(Complex64, f64)> = points
        .par_iter()
        .map(|&xi| match radon(f, xi, spec) {
            Ok(r) => (r.value, r.error),
            Err(Error::AccuracyFailure { value, .. }) => (value, f64::INFINITY),
            Err(_) => (Complex64::new(f64::NAN, f64::NAN), f64::INFINITY),
        })
        .collect();
    let (values, errors) = results.into_iter().unzip();
    Ok(TransformGrid {
        grid: grid.clone(),
        values,
        errors,
        source_id: f.id.clone(),
        transform_id: "radon".into(),
    })
}

/// Relative residual of the a^{2 rho} change-of-variables identity
/// `int |f(k n_x a_s . y0)| dx = e^{2s} int |f(k a_s n_x . y0)| dx`.
pub fn change_of_variables_check(
    f: &FunctionOnY,
    k_angle: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let k = GroupElement::rotation(k_angle);
    let a = GroupElement::a_param(s);

    let curve_na = move |x: f64| iota(k * (GroupElement::n_upper(x) * a));
    let anchors_na = anchors_for_curve(f, curve_na);
    let lhs = integrate_line(
        curve_integrand(f, curve_na, true),
        &anchors_na,
        &line_spec(f, spec),
    )?;

    let curve_an = move |x: f64| iota(k * (a * GroupElement::n_upper(x)));
    let anchors_an = anchors_for_curve(f, curve_an);
    let rhs = integrate_line(
        curve_integrand(f, curve_an, true),
        &anchors_an,
        &line_spec(f, spec),
    )?;

    let lhs_v = lhs.value.re;
    let rhs_v = (2.0 * s).exp() * rhs.value.re;
    Ok((lhs_v - rhs_v).abs() / lhs_v.abs().max(rhs_v.abs()).max(1e-300))
}

/// Grid supremum of the absolute horocycle integrals
/// `sup_{k, s} int |f(k a_s n_x . y0)| dx` (finiteness is the assertion).
pub fn sup_bound_probe(
    f: &FunctionOnY,
    k_angles: &[f64],
    s_values: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for &k in k_angles {
        for &s in s_values {
            let r = radon_abs(f, HoroPoint::new(2.0 * k, s), spec)?;
            sup = sup.max(r.value.re);
        }
    }
    Ok(sup)
}

/// The dual Radon transform R^v(F)(gH) = int_R F(xi(g exp(uZ))) du.
///
/// `tail_exponent` declares the decay of u -> F(xi(g exp(uZ))); it must
/// exceed 1 for absolute convergence (the dual transform is only defined on
/// inputs that are integrable along the H-direction).
pub fn dual_radon<F>(
    sampler: F,
    g: GroupElement,
    tail_exponent: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<QuadResult>
where
    F: Fn(HoroPoint) -> Complex64,
{
    if let Some(p) = tail_exponent {
        if p <= 1.0 {
            return Err(Error::Divergent(format!(
                "dual transform input decays like |u|^-{p}, not integrable over H"
            )));
        }
    }
    let integrand = |u: f64| {
        if u.abs() > 300.0 {
            // exp(uZ) overflows past this; contributions are long gone for
            // admissible inputs
            return Complex64::new(0.0, 0.0);
        }
        sampler(xi_of(g * GroupElement::exp_h(u)))
    };
    let spec_u = QuadratureSpec {
        tail_exponent,
        ..spec.clone()
    };
    integrate_line(integrand, &[Anchor::new(0.0, 1.0)], &spec_u)
}

/// One bin of the empirical inversion-multiplier table.
#[derive(Debug, Clone, Copy)]
pub struct MultiplierBin {
    pub mode: i32,
    pub omega: f64,
    pub coeff_f: Complex64,
    pub coeff_g: Complex64,
    /// ratio coeff_g / coeff_f, or None when the denominator is below 1e-8.
    pub ratio: Option<Complex64>,
}

/// Empirical multiplier ratios between f and R^v(R(f)) per (K-mode,
/// A-frequency) bin. Purely diagnostic.
pub fn inversion_multiplier_probe(
    f: &FunctionOnY,
    grid: &GridSpec,
    omegas: &[f64],
    modes: &[i32],
    spec: &QuadratureSpec,
) -> Result<Vec<MultiplierBin>> {
    let transform = radon_grid(f, grid, spec)?;
    let phis = grid.angle.points();
    let ss = grid.s.points();

    // g = R^v(R f) sampled on the Y-grid (same rectangle, chart coordinates)
    let back: Vec<Complex64> = ss
        .par_iter()
        .flat_map(|&s| {
            let phis = phis.clone();
            let transform = &transform;
            phis.into_par_iter().map(move |phi| {
                let y = PointY::from_chart(phi, s);
                let gsec = crate::variety::group_section(y);
                dual_radon(
                    |xi| transform.interpolate(xi.phi_tilde, xi.s),
                    gsec,
                    None,
                    &spec.tightened(10.0),
                )
                .map(|r| r.value)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            })
        })
        .collect();

    let n_phi = grid.angle.n;
    let mode_coeffs = |values: &dyn Fn(usize, usize) -> Complex64, m: i32| -> Vec<Complex64> {
        ss.iter()
            .enumerate()
            .map(|(i_s, _)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i_phi, &phi) in phis.iter().enumerate() {
                    acc += values(i_phi, i_s) * Complex64::new(0.0, -(m as f64) * phi).exp();
                }
                acc / n_phi as f64
            })
            .collect()
    };

    let f_vals: Vec<Complex64> = ss
        .iter()
        .flat_map(|&s| phis.iter().map(move |&phi| (phi, s)))
        .map(|(phi, s)| f.eval(PointY::from_chart(phi, s)))
        .collect();

    let mut bins = Vec::new();
    for &m in modes {
        let cf = mode_coeffs(&|i_phi, i_s| f_vals[i_s * n_phi + i_phi], m);
        let cg = mode_coeffs(&|i_phi, i_s| back[i_s * n_phi + i_phi], m);
        let lambdas: Vec<Complex64> = omegas.iter().map(|&w| Complex64::new(0.0, w)).collect();
        let ff = crate::quadrature::line_fourier(&ss, &cf, 0.0, &lambdas, 1e-6)?;
        let gg = crate::quadrature::line_fourier(&ss, &cg, 0.0, &lambdas, 1e-6)?;
        for (k, &omega) in omegas.iter().enumerate() {
            let num = gg[k].value;
            let den = ff[k].value;
            bins.push(MultiplierBin {
                mode: m,
                omega,
                coeff_f: den,
                coeff_g: num,
                ratio: if den.norm() > 1e-8 { Some(num / den) } else { None },
            });
        }
    }
    Ok(bins)
}
