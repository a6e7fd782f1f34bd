//! Spherical means of radial functions via John's identity
//!
//! For `|x| = r` and a radial `b`,
//!
//! ```text
//! ∫_{|ω|=1} b(|x + ρω|) dS_ω = 2^{3-n} ω_{n-1} (rρ)^{2-n} ∫_{|ρ-r|}^{ρ+r} λ b(λ) h(λ,ρ,r) dλ
//! h(λ,ρ,r) = {λ² - (ρ-r)²}^{(n-3)/2} {(ρ+r)² - λ²}^{(n-3)/2}
//! ```
//!
//! which turns every surface integral in the crate into a 1D integral over
//! `λ`. For even `n` the kernel vanishes like a square root at both ends of
//! the interval; those ends are handled by [`crate::quadrature::graded_panel`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, graded_panel, Grading, GaussRule, MAX_ORDER};

/// Below this ratio of the two radii the small-radius Taylor rule is used.
pub const SMALL_RADIUS_RATIO: f64 = 1e-6;

/// Space dimension `n ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("dimension must be at least 3, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss nodes per cell.
    pub base_order: usize,
    /// Width ratio of consecutive cells in an endpoint-graded zone.
    pub endpoint_split: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { base_order: 8, endpoint_split: 0.2, abs_tol: 1e-11 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_order < 2 || self.base_order > MAX_ORDER {
            return Err(Error::invalid(format!("base_order must be in 2..={MAX_ORDER}, got {}", self.base_order)));
        }
        if !(self.endpoint_split > 0.0 && self.endpoint_split < 1.0) {
            return Err(Error::invalid(format!("endpoint_split must lie in (0,1), got {}", self.endpoint_split)));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        Ok(())
    }

    pub(crate) fn rule(&self) -> &'static GaussRule {
        gauss_legendre(self.base_order)
    }
}

/// Surface measure of the unit sphere in `R^n`, `2π^{n/2}/Γ(n/2)`.
pub fn omega_n(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("omega_n needs n >= 2, got {n}")));
    }
    Ok(omega(n))
}

/// ω_2 = 2π, ω_3 = 4π and ω_{n+2} = 2π ω_n / n.
pub(crate) fn omega(n: u32) -> f64 {
    let (mut m, mut w) = if n % 2 == 0 { (2, 2.0 * PI) } else { (3, 4.0 * PI) };
    while m < n {
        w *= 2.0 * PI / m as f64;
        m += 2;
    }
    w
}

/// `2^{3-n} ω_{n-1} / ω_n`, the constant in front of the radial form of V.
pub fn linear_constant(n: Dimension) -> f64 {
    2f64.powi(3 - n.get() as i32) * omega(n.get() - 1) / omega(n.get())
}

/// x^{(n-3)/2} for x ≥ 0.
#[inline]
pub(crate) fn half_power(x: f64, n: u32) -> f64 {
    let e = n - 3;
    if e % 2 == 0 {
        x.powi((e / 2) as i32)
    } else {
        x.powi((e / 2) as i32) * x.sqrt()
    }
}

/// The kernel `h(λ, ρ, r)` of John's identity.
pub fn eval_h(lambda: f64, rho: f64, r: f64, n: Dimension) -> Result<f64> {
    if !(rho >= 0.0 && r >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("h needs rho, r >= 0 (got rho={rho}, r={r})")));
    }
    let a = (rho - r).abs();
    let b = rho + r;
    let slack = 1e-12 * b.max(1.0);
    if lambda < a - slack || lambda > b + slack {
        return Err(Error::invalid(format!(
            "lambda={lambda} outside the admissible interval [{a}, {b}] for rho={rho}, r={r}"
        )));
    }
    if n.get() == 3 {
        return Ok(1.0);
    }
    let f1 = ((lambda - a) * (lambda + a)).max(0.0);
    let f2 = ((b - lambda) * (b + lambda)).max(0.0);
    if f1 == 0.0 || f2 == 0.0 {
        return Ok(0.0);
    }
    let m = 0.5 * (n.as_f64() - 3.0);
    Ok((m * (f1.ln() + f2.ln())).exp())
}

/// A radial function `b(|x|)` that can be averaged over spheres.
pub trait RadialFunction: Sync {
    fn value(&self, r: f64) -> f64;

    /// `b'(r)`, `b''(r)` when available; used by the small-radius rule.
    fn first_two_derivatives(&self, _r: f64) -> Option<(f64, f64)> {
        None
    }

    /// Interval outside of which the function vanishes identically.
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// Points of reduced smoothness inside the support.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A constant function on all of `R^n`.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl RadialFunction for Constant {
    fn value(&self, _r: f64) -> f64 {
        self.0
    }
    fn first_two_derivatives(&self, _r: f64) -> Option<(f64, f64)> {
        Some((0.0, 0.0))
    }
}

/// Wraps a closure; the caller supplies the support interval.
pub struct FnRadial<F> {
    pub f: F,
    pub support: (f64, f64),
}

impl<F: Fn(f64) -> f64 + Sync> RadialFunction for FnRadial<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn support(&self) -> (f64, f64) {
        self.support
    }
}

/// `b(ρ) + r²/(2n) Δb(ρ)`: mean of `b` over a sphere of small radius `r`.
pub(crate) fn small_radius_mean<B: RadialFunction + ?Sized>(b: &B, center: f64, radius: f64, n: Dimension) -> f64 {
    let v = b.value(center);
    if radius == 0.0 {
        return v;
    }
    match b.first_two_derivatives(center) {
        Some((d1, d2)) => {
            let lap = if center > 0.0 { d2 + (n.as_f64() - 1.0) * d1 / center } else { n.as_f64() * d2 };
            v + radius * radius / (2.0 * n.as_f64()) * lap
        }
        None => v,
    }
}

/// `2^{n-3} ω_{n-1}/ω_n`; the mean equals this over `rρ` times `∫ λ b h̃ dλ`.
pub(crate) fn mean_constant(n: Dimension) -> f64 {
    2f64.powi(n.get() as i32 - 3) * omega(n.get() - 1) / omega(n.get())
}

/// Kernel geometry for one `(r, ρ)` pair.
///
/// Works with the normalised kernel `h̃ = h / (4rρ)^{n-3}`, whose two factors
/// lie in `[0, 1]` because `(ρ+r)² - (ρ-r)² = 4rρ`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelGeometry {
    pub n: Dimension,
    pub a: f64,
    pub b: f64,
    scale: f64,
}

impl KernelGeometry {
    pub fn new(r: f64, rho: f64, n: Dimension) -> Self {
        KernelGeometry { n, a: (rho - r).abs(), b: rho + r, scale: 4.0 * r * rho }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn h_tilde(&self, lambda: f64, d_lo: f64, d_hi: f64) -> f64 {
        if self.n.get() == 3 {
            return 1.0;
        }
        let f1 = (d_lo.max(0.0) * (lambda + self.a)) / self.scale;
        let f2 = (d_hi.max(0.0) * (self.b + lambda)) / self.scale;
        half_power(f1 * f2, self.n.get())
    }

    /// Grading for the lower end. After `λ = a + w u²` the factor `λ + a`
    /// varies on the scale `u ~ (a/w)^{1/2}`, which the `u`-cells resolve.
    pub fn lower_grading(&self, width: f64, q: &QuadratureSpec) -> Option<Grading> {
        if !self.n.is_even() {
            return None;
        }
        let s = (self.a / width).sqrt();
        let levels = if s >= 1.0 || s < 1e-8 { 0 } else { (s.ln() / q.endpoint_split.ln()).ceil() as usize };
        Some(Grading { levels, ratio: q.endpoint_split })
    }

    pub fn upper_grading(&self, q: &QuadratureSpec) -> Option<Grading> {
        if !self.n.is_even() {
            return None;
        }
        Some(Grading { levels: 0, ratio: q.endpoint_split })
    }
}

/// `∫_{lo}^{hi} λ b(λ) h̃(λ) dλ` over the admissible interval clipped to the
/// support of `b`, refined until two successive estimates (scaled by
/// `norm`) agree to `abs_tol`.
pub(crate) fn adaptive_kernel_integral<B>(geo: &KernelGeometry, b: &B, q: &QuadratureSpec, norm: f64) -> Result<f64>
where
    B: RadialFunction + ?Sized,
{
    let (s_lo, s_hi) = b.support();
    let lo = geo.a.max(s_lo);
    let hi = geo.b.min(s_hi);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let mut cuts = vec![lo];
    let mut bps: Vec<f64> = b.breakpoints().into_iter().filter(|&x| x > lo && x < hi).collect();
    bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.extend(bps);
    cuts.push(hi);

    let rule = q.rule();
    let mut integrand = |l: f64, dl: f64, du: f64| l * b.value(l) * geo.h_tilde(l, dl, du);
    let mut prev = f64::NAN;
    let mut change = f64::INFINITY;
    for level in 0..8 {
        let panels = 2usize << level;
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (x, y) = (w[0], w[1]);
            let lower_singular = x == geo.a;
            let upper_singular = y == geo.b;
            total += composite(rule, geo, q, x, y, panels, lower_singular, upper_singular, &mut integrand);
        }
        if level > 0 {
            change = ((total - prev) * norm).abs();
            if change <= q.abs_tol {
                return Ok(total);
            }
        }
        prev = total;
    }
    Err(Error::QuadratureNotConverged { estimate: prev * norm, change, tol: q.abs_tol })
}

#[allow(clippy::too_many_arguments)]
fn composite<F>(
    rule: &GaussRule,
    geo: &KernelGeometry,
    q: &QuadratureSpec,
    x: f64,
    y: f64,
    panels: usize,
    lower_singular: bool,
    upper_singular: bool,
    f: &mut F,
) -> f64
where
    F: FnMut(f64, f64, f64) -> f64,
{
    let width = (y - x) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let px = x + width * p as f64;
        let py = if p + 1 == panels { y } else { x + width * (p + 1) as f64 };
        let lower = if lower_singular && p == 0 {
            geo.lower_grading(py - px, q)
        } else {
            None
        };
        let upper = if upper_singular && p + 1 == panels {
            geo.upper_grading(q)
        } else {
            None
        };
        sum += graded_panel(rule, px, py, geo.a, geo.b, lower, upper, f);
    }
    sum
}

/// Mean value of `b(|x + ρω|)` over the unit sphere, `|x| = r`.
pub fn spherical_mean<B>(b: &B, r: f64, rho: f64, n: Dimension, q: &QuadratureSpec) -> Result<f64>
where
    B: RadialFunction + ?Sized,
{
    if !(r >= 0.0 && rho >= 0.0 && r.is_finite() && rho.is_finite()) {
        return Err(Error::invalid(format!("spherical_mean needs finite r, rho >= 0 (got r={r}, rho={rho})")));
    }
    if r <= SMALL_RADIUS_RATIO * rho {
        return Ok(small_radius_mean(b, rho, r, n));
    }
    if rho <= SMALL_RADIUS_RATIO * r {
        return Ok(small_radius_mean(b, r, rho, n));
    }
    let geo = KernelGeometry::new(r, rho, n);
    let norm = mean_constant(n) / (r * rho);
    Ok(norm * adaptive_kernel_integral(&geo, b, q, norm)?)
}

/// One violated inequality with its witness triple.
#[derive(Debug, Clone, PartialEq)]
pub struct HBoundViolation {
    /// 1..=4, in the order h ≤ 4^{n-3}r^{n-3}λ^{n-3}, 2^{n-3}ρ^{n-3}(rλ)^{(n-3)/2},
    /// 8^{n-3}ρ^{n-3}r^{n-3}, 2^{n-3}ρ^{n-3}λ^{n-3}.
    pub bound: usize,
    pub lambda: f64,
    pub rho: f64,
    pub r: f64,
    pub h: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct HBoundsReport {
    pub n: Dimension,
    pub samples: usize,
    pub violations: Vec<HBoundViolation>,
    /// Largest observed h / rhs per bound.
    pub max_ratio: [f64; 4],
    /// Largest relative defect of 4ρ²λ² - {λ²-(ρ-r)²}{(ρ+r)²-λ²} = (λ²+ρ²-r²)².
    pub identity_max_rel_err: f64,
}

impl HBoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The four right-hand sides bounding `h(λ, ρ, r)`.
pub fn h_bound_rhs(lambda: f64, rho: f64, r: f64, n: Dimension) -> [f64; 4] {
    let e = n.get() as i32 - 3;
    let eh = 0.5 * e as f64;
    [
        4f64.powi(e) * r.powi(e) * lambda.powi(e),
        2f64.powi(e) * rho.powi(e) * r.powf(eh) * lambda.powf(eh),
        8f64.powi(e) * rho.powi(e) * r.powi(e),
        2f64.powi(e) * rho.powi(e) * lambda.powi(e),
    ]
}

/// Draws admissible (λ, ρ, r) with ρ, r log-uniform on [10⁻², 10²] and λ
/// uniform on [|ρ-r|, ρ+r], and audits the four kernel bounds.
pub fn check_h_bounds(samples: usize, n: Dimension, seed: u64) -> Result<HBoundsReport> {
    if samples == 0 {
        return Err(Error::invalid("samples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n.get() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut violations = Vec::new();
    let mut max_ratio = [0.0f64; 4];
    let mut identity_max_rel_err = 0.0f64;
    for _ in 0..samples {
        let rho = 10f64.powf(rng.gen_range(-2.0..2.0));
        let r = 10f64.powf(rng.gen_range(-2.0..2.0));
        let lambda = rng.gen_range((rho - r).abs()..=rho + r);
        let h = eval_h(lambda, rho, r, n)?;
        let rhs = h_bound_rhs(lambda, rho, r, n);
        for (i, &bound) in rhs.iter().enumerate() {
            let ratio = if bound > 0.0 { h / bound } else if h > 0.0 { f64::INFINITY } else { 0.0 };
            max_ratio[i] = max_ratio[i].max(ratio);
            if h > bound * (1.0 + 1e-12) {
                violations.push(HBoundViolation { bound: i + 1, lambda, rho, r, h, rhs: bound });
            }
        }
        let l2 = lambda * lambda;
        let lhs = 4.0 * rho * rho * l2 - (l2 - (rho - r).powi(2)) * ((rho + r).powi(2) - l2);
        let sq = (l2 + rho * rho - r * r).powi(2);
        let scale = 4.0 * rho * rho * l2 + (rho + r).powi(4);
        identity_max_rel_err = identity_max_rel_err.max((lhs - sq).abs() / scale);
    }
    Ok(HBoundsReport { n, samples, violations, max_ratio, identity_max_rel_err })
}
