//! The spectral layer: A-Fourier transform, open-orbit Poisson functionals,
//! the Fourier transform on Y, and the Fourier-Radon unwinding identity.
//!
//! Conventions (all pinned by the identity test below):
//!
//! * `a_s^lambda = e^{lambda s}` and rho = 1, so the A-Fourier transform of a
//!   function on Xi at the A-axis is
//!   `F_A(F)(lambda) = int e^{(1 + lambda) s} F(s) ds`;
//! * the Poisson functional is evaluated through the open-orbit coordinates
//!   g = h w m a n as `poisson_j(lambda, eta, g) = e^{(lambda - 1) s} eta_w
//!   = |v1^2 - v2^2|^{(lambda-1)/2} eta_w` (zero on the orbit boundary),
//!   which has covariance `e^{(lambda - 1) sigma}` under right A-translation;
//! * the Fourier transform on Y pairs f against that kernel:
//!   `F(f)(lambda, eta)(g) = int_Y f(y) poisson_j(lambda, eta, y^{-1} g) dy`,
//!   absolutely convergent for Re lambda > -1 thanks to the integrable
//!   |.|^{(Re lambda - 1)/2} singularity along the null set of y -> y^{-1}g.
//!
//! With the invariant measure dy = dphi ds, the two open cells
//! {x2 > x3} = AN.y0 and {x2 < x3} = AN w0.y0 carry dphi ds = 2 dsigma dx,
//! and unwinding the kernel along the cells gives the exact identity
//!
//! ```text
//! F(f)(lambda, eta)(g) = 2 sum_w eta_w int e^{(1 - lambda) sigma}
//!                        [ int f(g a_sigma n_x w . y0) dx ] dsigma,
//! ```
//!
//! i.e. the composition of the w-translated Radon transform with the
//! A-Fourier transform at the reflected parameter -lambda.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::io::Write;

use crate::error::{Error, Result};
use crate::funcspace::FunctionOnY;
use crate::quadrature::{
    integrate_interval, integrate_line, integrate_singular, line_fourier, Anchor, FourierSample,
    GridSpec, QuadResult, QuadratureSpec,
};
use crate::radon::{curve_anchors, radon_abs, radon_grid};
use crate::sl2::{hwan_decompose, GroupElement, Orbit};
use crate::variety::{group_section, iota, HoroPoint, PointY};

/// A spectral parameter lambda, identified with lambda(H0) in the
/// `a_s^lambda = e^{lambda s}` normalization (rho = 1).
#[derive(Debug, Clone, Copy)]
pub struct SpectralParam {
    pub lambda: Complex64,
}

impl SpectralParam {
    pub fn new(lambda: Complex64) -> Self {
        SpectralParam { lambda }
    }

    /// Absolute convergence of the Fourier kernel on Y requires
    /// Re lambda > -1.
    pub fn check_fourier_y(&self) -> Result<()> {
        if self.lambda.re <= -1.0 {
            return Err(Error::InvalidSpec(format!(
                "Re lambda = {} rejected: the |.|^{{(lambda-1)/2}} kernel is only integrable for Re lambda > -1",
                self.lambda.re
            )));
        }
        Ok(())
    }
}

/// A functional on the two open orbits: one component per element of
/// W_H \ W = {e, w0}.
#[derive(Debug, Clone, Copy)]
pub struct OrbitFunctional {
    pub eta_e: Complex64,
    pub eta_w: Complex64,
}

impl OrbitFunctional {
    pub fn new(eta_e: Complex64, eta_w: Complex64) -> Self {
        OrbitFunctional { eta_e, eta_w }
    }

    pub fn component(&self, orbit: Orbit) -> Complex64 {
        match orbit {
            Orbit::Identity => self.eta_e,
            Orbit::Weyl => self.eta_w,
        }
    }
}

/// Value of the Poisson functional, with a flag for the measure-zero orbit
/// boundary (where the value is taken to be 0).
#[derive(Debug, Clone, Copy)]
pub struct PoissonValue {
    pub value: Complex64,
    pub boundary: bool,
}

/// The open-orbit Poisson functional
/// `j(lambda, eta)(g) = e^{(lambda - 1) s(g)} eta_{w(g)}`.
pub fn poisson_j(lambda: SpectralParam, eta: &OrbitFunctional, g: GroupElement) -> PoissonValue {
    match hwan_decompose(g) {
        Ok(h) => PoissonValue {
            value: ((lambda.lambda - 1.0) * h.s).exp() * eta.component(h.orbit),
            boundary: false,
        },
        Err(_) => PoissonValue {
            value: Complex64::new(0.0, 0.0),
            boundary: true,
        },
    }
}

/// A-Fourier transform of a sampler on the A-axis of Xi at fixed angle:
/// `int e^{(1 + lambda) s} F(s) ds` by adaptive quadrature.
pub fn fourier_a_sampler<F>(
    sampler: F,
    lambda: SpectralParam,
    anchors: &[Anchor],
    spec: &QuadratureSpec,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let weight = 1.0 + lambda.lambda;
    integrate_line(
        move |s: f64| {
            if s.abs() > 300.0 {
                return Complex64::new(0.0, 0.0);
            }
            (weight * s).exp() * sampler(s)
        },
        anchors,
        spec,
    )
}

/// A-Fourier transform of one angular row of a sampled transform grid
/// (rho-hat = 1), for a list of spectral parameters.
pub fn fourier_a_grid(
    s_points: &[f64],
    values: &[Complex64],
    lambdas: &[Complex64],
    rel_tol: f64,
) -> Result<Vec<FourierSample>> {
    line_fourier(s_points, values, 1.0, lambdas, rel_tol)
}

/// Orbit-split constituents of the Fourier transform on Y: the value is
/// `eta_e * part_e + eta_w * part_w`.
#[derive(Debug, Clone, Copy)]
pub struct FourierYParts {
    pub part_e: Complex64,
    pub part_w: Complex64,
}

impl FourierYParts {
    pub fn contract(&self, eta: &OrbitFunctional) -> Complex64 {
        eta.eta_e * self.part_e + eta.eta_w * self.part_w
    }
}

/// The Fourier transform on Y against the raw Poisson kernel, split by
/// orbit:
///
/// `F(f)(lambda, eta)(g) = int_Y f(y) poisson_j(lambda, eta, y^{-1} g) dy`.
///
/// The y-integral runs in chart coordinates; for fixed angle the kernel has
/// exactly one sign change of v1^2 - v2^2 along the s-line (at
/// e^{4 sigma} = c1^2/c2^2), which is passed to the singular integrator with
/// grading exponent (Re lambda - 1)/2.
pub fn fourier_y_parts(
    f: &FunctionOnY,
    lambda: SpectralParam,
    g: GroupElement,
    spec: &QuadratureSpec,
) -> Result<FourierYParts> {
    lambda.check_fourier_y()?;
    let beta = (lambda.lambda.re - 1.0) / 2.0;
    let exponent = (lambda.lambda - 1.0) / 2.0;
    // the sigma-range is the truncation radius: s = sinh(2 sigma) then sweeps
    // far enough that even power-decay integrands (f ~ |s|^{-n} against the
    // e^{|sigma|}-growing kernel) are exhausted to ~e^{-radius}
    let sigma_window = spec.truncation_radius.min(150.0);
    let inner_spec = spec.tightened(1e-1);

    let inner = |phi: f64, pick_e: bool| -> Result<Complex64> {
        // section(phi, s) = r_theta a_{sigma(s)}, theta = (phi - pi/2)/2;
        // v = a_{-sigma} r_{-theta} g e1 = (e^{-sigma} c1, e^{sigma} c2)
        let theta = 0.5 * (phi - std::f64::consts::FRAC_PI_2);
        let (sn, cs) = theta.sin_cos();
        let c1 = cs * g.a + sn * g.c;
        let c2 = -sn * g.a + cs * g.c;
        // Integrate in the sigma variable (s = sinh(2 sigma), ds =
        // 2 cosh(2 sigma) dsigma): the null set is then located exactly at
        // the float sigma* with e^{4 sigma*} = c1^2/c2^2, and the stable form
        // D = -c1^2 e^{-2 sigma} expm1(4 (sigma - sigma*)) vanishes at the
        // anchor to the last bit, so the graded substitution sees a clean
        // power singularity.
        let degenerate = c1.abs() < 1e-140 || c2.abs() < 1e-140;
        let sigma_star = if degenerate {
            0.0
        } else {
            0.5 * (c1.abs() / c2.abs()).ln()
        };
        let integrand = |sigma: f64| -> Complex64 {
            let d = if degenerate {
                (-2.0 * sigma).exp() * c1 * c1 - (2.0 * sigma).exp() * c2 * c2
            } else {
                -c1 * c1 * (-2.0 * sigma).exp() * (4.0 * (sigma - sigma_star)).exp_m1()
            };
            // the orbit boundary carries j = 0; this also covers sigma so
            // close to sigma* that D collapses in floating point
            if d.abs() < 1e-100 {
                return Complex64::new(0.0, 0.0);
            }
            let on_e = d > 0.0;
            if on_e != pick_e {
                return Complex64::new(0.0, 0.0);
            }
            let kernel = (exponent * d.abs().ln()).exp();
            let s = (2.0 * sigma).sinh();
            f.eval(PointY::from_chart(phi, s)) * kernel * (2.0 * (2.0 * sigma).cosh())
        };
        let singular: &[f64] = if !degenerate && sigma_star.abs() < sigma_window {
            std::slice::from_ref(&sigma_star)
        } else {
            &[]
        };
        let r = integrate_singular(
            integrand,
            -sigma_window,
            sigma_window,
            singular,
            beta,
            &inner_spec,
        );
        match r {
            Ok(r) => Ok(r.value),
            // a stalled slice is fine as long as its absolute error is
            // negligible against the outer angular integral
            Err(Error::AccuracyFailure { value, error, .. })
                if error <= 1e-8 * (1.0 + value.norm()) =>
            {
                Ok(value)
            }
            Err(e) => Err(e),
        }
    };

    let mut parts = [Complex64::new(0.0, 0.0); 2];
    for (slot, pick_e) in [(0usize, true), (1usize, false)] {
        let outer = |phi: f64| match inner(phi, pick_e) {
            Ok(v) => v,
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        };
        let r = integrate_interval(outer, 0.0, TAU, &[], spec).map_err(|e| match e {
            Error::NanSample { .. } => {
                Error::Domain("inner s-integral failed during Fourier transform on Y".into())
            }
            other => other,
        })?;
        parts[slot] = r.value;
    }
    Ok(FourierYParts {
        part_e: parts[0],
        part_w: parts[1],
    })
}

/// Contracted Fourier transform on Y.
pub fn fourier_y(
    f: &FunctionOnY,
    lambda: SpectralParam,
    eta: &OrbitFunctional,
    g: GroupElement,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    Ok(fourier_y_parts(f, lambda, g, spec)?.contract(eta))
}

/// The w-cell horocycle integral `int f(g a_sigma n_x w . y0) dx`.
fn cell_transform(
    f: &FunctionOnY,
    g: GroupElement,
    orbit: Orbit,
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    if sigma.abs() > 300.0 {
        // a_sigma squares past the floating-point range there; admissible
        // inputs contribute nothing
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let prefix = g * GroupElement::a_param(sigma);
    let w = orbit.representative();
    let curve = move |x: f64| iota(prefix * (GroupElement::n_upper(x) * w));
    let anchors = match f.decay.focus() {
        Some((focus, mask, width)) => curve_anchors(curve, focus, mask, width),
        None => vec![],
    };
    let integrand = move |x: f64| {
        if x.abs() > 1e60 {
            return Complex64::new(0.0, 0.0);
        }
        let p = curve(x);
        if !p.x1.is_finite() || !p.x2.is_finite() || !p.x3.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        f.eval(p)
    };
    let line_spec = QuadratureSpec {
        tail_exponent: f.decay.horocycle_tail_exponent(),
        ..spec.clone()
    };
    integrate_line(integrand, &anchors, &line_spec)
}

/// One orbit term of the unwinding:
/// `2 int e^{(1 - lambda) sigma} [int f(g a_sigma n_x w . y0) dx] dsigma`.
fn unwinding_term(
    f: &FunctionOnY,
    lambda: SpectralParam,
    g: GroupElement,
    orbit: Orbit,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let inner_spec = spec.tightened(1e-1);
    let weight = 1.0 - lambda.lambda;
    let integrand = |sigma: f64| -> Complex64 {
        if sigma.abs() > 300.0 {
            return Complex64::new(0.0, 0.0);
        }
        match cell_transform(f, g, orbit, sigma, &inner_spec) {
            Ok(r) => (weight * sigma).exp() * r.value,
            Err(Error::AccuracyFailure { value, error, .. })
                if error <= 1e-8 * (1.0 + value.norm()) =>
            {
                (weight * sigma).exp() * value
            }
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let r = integrate_line(integrand, &[Anchor::new(0.0, 1.0)], spec).map_err(|e| match e {
        Error::NanSample { .. } => Error::Domain(
            "inner horocycle integral failed during the unwinding sweep".into(),
        ),
        other => other,
    })?;
    Ok(2.0 * r.value)
}

/// Both sides of the Fourier-Radon identity and their relative residual.
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Compare the direct Fourier transform on Y against the unwinding through
/// the cell Radon transforms composed with the A-Fourier transform at the
/// reflected parameter. The two routes share no quadrature structure beyond
/// the base engine.
pub fn fourier_radon_identity(
    f: &FunctionOnY,
    lambda: SpectralParam,
    eta: &OrbitFunctional,
    g: GroupElement,
    spec: &QuadratureSpec,
) -> Result<IdentityCheck> {
    let lhs = fourier_y(f, lambda, eta, g, spec)?;
    let term_e = unwinding_term(f, lambda, g, Orbit::Identity, spec)?;
    let term_w = unwinding_term(f, lambda, g, Orbit::Weyl, spec)?;
    let rhs = eta.eta_e * term_e + eta.eta_w * term_w;
    let residual = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-14);
    Ok(IdentityCheck { lhs, rhs, residual })
}

/// Gram matrix of a family of transforms under the discrete L^2(Xi) inner
/// product, and its smallest eigenvalue.
#[derive(Debug, Clone)]
pub struct GramReport {
    pub gram: Vec<Vec<Complex64>>,
    pub sigma_min: f64,
}

/// Injectivity probe: the Gram matrix of { R(f_i) } over the grid, each
/// transform normalized by its source's central horocycle mass so the scale
/// is comparable across inputs (and a kernel-direction input shows up as a
/// near-zero row).
pub fn injectivity_gram(
    functions: &[FunctionOnY],
    grid: &GridSpec,
    spec: &QuadratureSpec,
) -> Result<GramReport> {
    if functions.len() < 2 {
        return Err(Error::InvalidSpec(
            "the injectivity probe needs at least two functions".into(),
        ));
    }
    let transforms: Result<Vec<(Vec<Complex64>, f64)>> = functions
        .par_iter()
        .map(|f| {
            let tg = radon_grid(f, grid, spec)?;
            let mass = radon_abs(f, HoroPoint::new(0.0, 0.0), spec)?.value.re;
            Ok((tg.values, mass.max(1e-300)))
        })
        .collect();
    let transforms = transforms?;
    let cell = grid.angle.step() * grid.s.step();
    let n = functions.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let (fi, mi) = &transforms[i];
            let (fj, mj) = &transforms[j];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in fi.iter().zip(fj.iter()) {
                acc += a.conj() * b;
            }
            gram[i][j] = acc * cell / (mi * mj);
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
    let eig = m.symmetric_eigen();
    let sigma_min = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v.abs()));
    Ok(GramReport { gram, sigma_min })
}

/// One row of the identity-check CSV.
#[derive(Debug, Clone)]
pub struct IdentityRecord {
    pub lambda: Complex64,
    pub g_id: String,
    pub eta: OrbitFunctional,
    pub check: IdentityCheck,
}

/// CSV serialization:
/// `lambda_re,lambda_im,g_id,eta_e,eta_w,lhs_re,lhs_im,rhs_re,rhs_im,residual`.
pub fn write_identity_csv<W: Write>(records: &[IdentityRecord], out: &mut W) -> std::io::Result<()> {
    writeln!(
        out,
        "lambda_re,lambda_im,g_id,eta_e,eta_w,lhs_re,lhs_im,rhs_re,rhs_im,residual"
    )?;
    for r in records {
        writeln!(
            out,
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.lambda.re,
            r.lambda.im,
            r.g_id,
            r.eta.eta_e.re,
            r.eta.eta_w.re,
            r.check.lhs.re,
            r.check.lhs.im,
            r.check.rhs.re,
            r.check.rhs.im,
            r.check.residual
        )?;
    }
    Ok(())
}
