//! The linear part
//!
//! ```text
//! V(r,t) = (t/(n-2)) ∂_t M_f(r,t) + M_f(r,t) + t M_g(r,t)
//! ```
//!
//! where `M_b(r, t)` is the mean of `b` over the sphere of radius `t` about
//! a point at distance `r` from the origin.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{Lattice, RadialProfile, SpaceTimeField};
use crate::quadrature::{gauss_legendre, graded_panel, Grading};
use crate::sphmeans::{eval_h, linear_constant, spherical_mean, Dimension, QuadratureSpec, RadialFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPartSpec {
    pub f: RadialProfile,
    pub g: RadialProfile,
    pub n: Dimension,
    /// Step of the central difference for `∂_t M_f`.
    pub dt_fd: f64,
    pub q: QuadratureSpec,
}

impl LinearPartSpec {
    pub fn new(f: RadialProfile, g: RadialProfile, n: Dimension) -> Self {
        LinearPartSpec { f, g, n, dt_fd: 1e-3, q: QuadratureSpec::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.q.validate()?;
        if !(self.dt_fd > 0.0 && self.dt_fd.is_finite()) {
            return Err(Error::invalid(format!("dt_fd must be positive, got {}", self.dt_fd)));
        }
        Ok(())
    }

    /// Radius containing the support of both data.
    pub fn support_radius(&self) -> f64 {
        let mut k = 0.0f64;
        if !self.f.is_zero() {
            k = k.max(self.f.k());
        }
        if !self.g.is_zero() {
            k = k.max(self.g.k());
        }
        k
    }

    /// `dt_fd` must be much smaller than the lattice step it is used with.
    pub fn check_against(&self, lattice: &Lattice) -> Result<()> {
        if self.dt_fd > 0.1 * lattice.dt {
            return Err(Error::invalid(format!(
                "dt_fd={} is not small against lattice dt={}",
                self.dt_fd, lattice.dt
            )));
        }
        Ok(())
    }
}

fn mean<B: RadialFunction>(b: &B, r: f64, rho: f64, spec: &LinearPartSpec) -> Result<f64> {
    spherical_mean(b, r, rho.abs(), spec.n, &spec.q)
}

/// `∂_ρ M_b(r, ρ)` by central differences with one Richardson step; the
/// mean is even in `ρ`.
pub(crate) fn mean_rate<B: RadialFunction>(b: &B, r: f64, t: f64, spec: &LinearPartSpec) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((mean(b, r, t + h, spec)? - mean(b, r, t - h, spec)?) / (2.0 * h)) };
    let h = spec.dt_fd;
    Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
}

/// True when the shell `|t - r| ≤ k` misses `(r, t)`, where V vanishes identically.
fn outside_shell(spec: &LinearPartSpec, r: f64, t: f64) -> bool {
    (t - r).abs() >= spec.support_radius()
}

pub fn eval_v(spec: &LinearPartSpec, r: f64, t: f64) -> Result<f64> {
    v_from_means(spec, r, t, true)
}

/// `V` from the quadrature of the means even where the shell `|t - r| ≤ k`
/// misses `(r, t)`; used to observe the support property rather than impose it.
pub fn eval_v_unclipped(spec: &LinearPartSpec, r: f64, t: f64) -> Result<f64> {
    v_from_means(spec, r, t, false)
}

fn v_from_means(spec: &LinearPartSpec, r: f64, t: f64, clip: bool) -> Result<f64> {
    if !(r >= 0.0 && t >= 0.0 && r.is_finite() && t.is_finite()) {
        return Err(Error::invalid(format!("V needs r, t >= 0 (got r={r}, t={t})")));
    }
    if t == 0.0 {
        return Ok(spec.f.value(r));
    }
    if clip && outside_shell(spec, r, t) {
        return Ok(0.0);
    }
    let mut v = 0.0;
    if !spec.f.is_zero() {
        let m = mean(&spec.f, r, t, spec)?;
        let dm = mean_rate(&spec.f, r, t, spec)?;
        v += t / (spec.n.as_f64() - 2.0) * dm + m;
    }
    if !spec.g.is_zero() {
        v += t * mean(&spec.g, r, t, spec)?;
    }
    Ok(v)
}

/// `C r^{2-n} t^{3-n} ∫_{|t-r|}^{t+r} λ g(λ) h(λ,t,r) dλ` for `f ≡ 0`,
/// with `C = 2^{3-n} ω_{n-1}/ω_n`, evaluated straight from the kernel `h`.
pub fn eval_v_blowup(spec: &LinearPartSpec, r: f64, t: f64) -> Result<f64> {
    if !spec.f.is_zero() {
        return Err(Error::invalid("the blow-up form of V needs f = 0"));
    }
    if !(r > 0.0 && t > 0.0) {
        return Err(Error::invalid(format!("blow-up form needs r, t > 0 (got r={r}, t={t})")));
    }
    let g = &spec.g;
    let (s_lo, s_hi) = g.support();
    let a = (t - r).abs();
    let b = t + r;
    let lo = a.max(s_lo);
    let hi = b.min(s_hi);
    if g.is_zero() || !(hi > lo) {
        return Ok(0.0);
    }
    let n = spec.n;
    let pref = linear_constant(n) * r.powi(2 - n.get() as i32) * t.powi(3 - n.get() as i32);
    let rule = gauss_legendre(spec.q.base_order);
    let grade = n.is_even().then_some(Grading { levels: 0, ratio: spec.q.endpoint_split });
    let lower = if lo == a { grade } else { None };
    let upper = if hi == b { grade } else { None };
    let eval = |panels: usize| -> f64 {
        let w = (hi - lo) / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            let x = lo + w * i as f64;
            let y = if i + 1 == panels { hi } else { x + w };
            let gl = if i == 0 { lower } else { None };
            let gu = if i + 1 == panels { upper } else { None };
            s += graded_panel(rule, x, y, a, b, gl, gu, &mut |l, _, _| {
                let lam = l.clamp(a, b);
                l * g.value(l) * eval_h(lam, t, r, n).unwrap_or(0.0)
            });
        }
        s
    };
    let mut prev = eval(2);
    let mut panels = 4;
    while panels <= 1024 {
        let cur = eval(panels);
        if ((cur - prev) * pref).abs() <= spec.q.abs_tol {
            return Ok(pref * cur);
        }
        prev = cur;
        panels *= 2;
    }
    Err(Error::QuadratureNotConverged { estimate: pref * prev, change: f64::NAN, tol: spec.q.abs_tol })
}

/// `∂_t V` at `t = 0` by one-sided differences; equals `g(r)` when `f ≡ 0`.
pub fn initial_rate(spec: &LinearPartSpec, r: f64, h: f64) -> Result<f64> {
    let v0 = eval_v(spec, r, 0.0)?;
    let v1 = eval_v(spec, r, h)?;
    let v2 = eval_v(spec, r, 2.0 * h)?;
    Ok((-3.0 * v0 + 4.0 * v1 - v2) / (2.0 * h))
}

/// `εV` on every slice of a lattice, with the support `r ≤ t + k` attached.
pub fn sample_v(spec: &LinearPartSpec, lattice: &Lattice, eps: f64) -> Result<SpaceTimeField> {
    let k = spec.support_radius().max(f64::MIN_POSITIVE);
    let mut field = SpaceTimeField::new(*lattice, Some(k));
    for j in 0..lattice.nt() {
        let values = v_slice(spec, lattice, &field, j, eps)?;
        field.push_slice(values)?;
    }
    Ok(field)
}

pub(crate) fn v_slice(spec: &LinearPartSpec, lattice: &Lattice, shape: &SpaceTimeField, j: usize, eps: f64) -> Result<Vec<f64>> {
    let t = lattice.t(j);
    if eps == 0.0 {
        return Ok(vec![0.0; shape.slice_len(j)]);
    }
    (0..shape.slice_len(j))
        .into_par_iter()
        .map(|i| eval_v(spec, lattice.r(i), t).map(|v| eps * v))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_slice(j))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    pub max_weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `sup (t + r + 2k)^{n-2} |V|` over the sampled grid.
    pub sup_weighted: f64,
    pub windows: Vec<DyadicWindow>,
    pub times: Vec<f64>,
    /// `max_r |V(r, t)|` per sampled time.
    pub max_abs: Vec<f64>,
    /// Per sampled time, `max_r (t + r + 2k)^{n-2} |V(r, t)|`.
    pub max_weighted: Vec<f64>,
}

impl DecayReport {
    /// Largest over smallest window maximum among windows starting at or after `t_from`.
    pub fn window_spread(&self, t_from: f64) -> f64 {
        let m: Vec<f64> = self.windows.iter().filter(|w| w.t_lo >= t_from * (1.0 - 1e-12)).map(|w| w.max_weighted).collect();
        let hi = m.iter().cloned().fold(0.0, f64::max);
        let lo = m.iter().cloned().fold(f64::INFINITY, f64::min);
        if lo > 0.0 {
            hi / lo
        } else if hi == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    }

    /// Least-squares slope of `log max_r |V|` against `log t` on `[t_lo, t_hi]`.
    pub fn decay_slope(&self, t_lo: f64, t_hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.max_abs)
            .filter(|(t, v)| **t >= t_lo && **t <= t_hi && **v > 0.0)
            .map(|(t, v)| (t.ln(), v.ln()))
            .collect();
        crate::solver::least_squares(&pts).map(|f| f.slope)
    }

    pub fn max_weighted_up_to(&self, t: f64) -> f64 {
        self.times.iter().zip(&self.max_weighted).filter(|(s, _)| **s <= t).map(|x| *x.1).fold(0.0, f64::max)
    }
}

/// Weighted sup of V over the grid, with dyadic windows `[2^m k, 2^{m+1} k)`.
///
/// Only nodes in the band `|t - r| ≤ k + 2 dr` are evaluated: V vanishes
/// identically outside the shell.
pub fn verify_decay(spec: &LinearPartSpec, grid: &Lattice) -> Result<DecayReport> {
    let k = spec.support_radius();
    let n2 = spec.n.get() as i32 - 2;
    let nt = grid.nt();
    let rows: Vec<(f64, f64, f64)> = (1..nt)
        .into_par_iter()
        .map(|j| {
            let t = grid.t(j);
            let mut m_abs = 0.0f64;
            let mut m_w = 0.0f64;
            if k > 0.0 {
                let band = k + 2.0 * grid.dr;
                let i_lo = (((t - band) / grid.dr) - 0.5).ceil().max(0.0) as usize;
                let i_hi = (((t + band) / grid.dr) - 0.5).floor().max(0.0) as usize;
                for i in i_lo..=i_hi.min(grid.nr() - 1) {
                    let r = grid.r(i);
                    let v = eval_v(spec, r, t).map_err(|e| e.at_slice(j))?.abs();
                    m_abs = m_abs.max(v);
                    m_w = m_w.max((t + r + 2.0 * k).powi(n2) * v);
                }
            }
            Ok((t, m_abs, m_w))
        })
        .collect::<Result<_>>()?;
    let times: Vec<f64> = rows.iter().map(|x| x.0).collect();
    let max_abs: Vec<f64> = rows.iter().map(|x| x.1).collect();
    let max_weighted: Vec<f64> = rows.iter().map(|x| x.2).collect();
    let sup_weighted = max_weighted.iter().cloned().fold(0.0, f64::max);
    let mut windows = Vec::new();
    let unit = if k > 0.0 { k } else { 1.0 };
    let mut lo = unit;
    while lo < grid.t_max {
        let hi = 2.0 * lo;
        let m = times.iter().zip(&max_weighted).filter(|(t, _)| **t >= lo && **t < hi).map(|x| *x.1).fold(0.0, f64::max);
        windows.push(DyadicWindow { t_lo: lo, t_hi: hi.min(grid.t_max), max_weighted: m });
        lo = hi;
    }
    Ok(DecayReport { sup_weighted, windows, times, max_abs, max_weighted })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundFit {
    /// `min V r^{n-2}` over the sampled region.
    pub c_ngk: f64,
    /// Minimum per sampled time.
    pub per_time: Vec<(f64, f64)>,
}

impl LowerBoundFit {
    /// Largest over smallest per-time minimum.
    pub fn spread(&self) -> f64 {
        let hi = self.per_time.iter().map(|x| x.1).fold(0.0, f64::max);
        let lo = self.per_time.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        hi / lo
    }
}

/// Fits the constant in `V ≥ C_{n,g,k} / r^{n-2}` on
/// `t + k0 < r < t + (k + k0)/2`, `t ∈ [t_lo, t_hi]`, for `f ≡ 0` and a
/// nonnegative `g` that is positive on `(k0, k)`.
pub fn fit_lower_bound(spec: &LinearPartSpec, t_lo: f64, t_hi: f64, n_t: usize, n_r: usize) -> Result<LowerBoundFit> {
    if !spec.f.is_zero() || spec.g.is_zero() {
        return Err(Error::invalid("lower-bound fit needs f = 0 and g != 0"));
    }
    let (k, k0) = (spec.g.k(), spec.g.k0());
    let k1 = 0.5 * (k + k0);
    let n_t = n_t.max(2);
    let n_r = n_r.max(2);
    let per_time: Vec<(f64, f64)> = (0..n_t)
        .into_par_iter()
        .map(|it| {
            let t = t_lo + (t_hi - t_lo) * it as f64 / (n_t - 1) as f64;
            let mut m = f64::INFINITY;
            for ir in 0..n_r {
                // open interval: stay off both ends
                let s = (ir as f64 + 0.5) / n_r as f64;
                let r = t + k0 + s * (k1 - k0);
                let v = eval_v_blowup(spec, r, t)?;
                m = m.min(v * r.powi(spec.n.get() as i32 - 2));
            }
            Ok((t, m))
        })
        .collect::<Result<_>>()?;
    let c_ngk = per_time.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    Ok(LowerBoundFit { c_ngk, per_time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_profile, ProfileFamily};

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn smooth_spec(n: u32) -> LinearPartSpec {
        let f = make_profile(ProfileFamily::SmoothBump, 1.0, 0.0, 1.0).unwrap();
        let g = make_profile(ProfileFamily::SmoothBump, 1.0, 0.0, 0.5).unwrap();
        LinearPartSpec::new(f, g, dim(n))
    }

    fn blowup_spec(n: u32) -> LinearPartSpec {
        let g = make_profile(ProfileFamily::AnnularBump, 1.0, 0.5, 1.0).unwrap();
        LinearPartSpec::new(RadialProfile::zero(), g, dim(n))
    }

    #[test]
    fn initial_trace_is_f() {
        let s = smooth_spec(4);
        for r in [0.0, 0.3, 0.9, 1.5] {
            assert_eq!(eval_v(&s, r, 0.0).unwrap(), s.f.value(r));
        }
    }

    #[test]
    fn zero_data_give_zero() {
        let s = LinearPartSpec::new(RadialProfile::zero(), RadialProfile::zero(), dim(5));
        assert_eq!(eval_v(&s, 0.4, 2.0).unwrap(), 0.0);
        assert_eq!(eval_v_blowup(&s, 0.4, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn huygens_zero_far_inside_cone() {
        for n in 3..=6 {
            let s = smooth_spec(n);
            assert_eq!(eval_v(&s, 0.5, 3.0).unwrap(), 0.0);
            assert_eq!(eval_v(&s, 4.0, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn n3_matches_kirchhoff() {
        // n = 3, f = 0: V = (1/(2r)) ∫_{|t-r|}^{t+r} λ g(λ) dλ
        let s = blowup_spec(3);
        for &(r, t) in &[(0.3, 0.5), (1.0, 0.7), (2.2, 1.6)] {
            let rule = gauss_legendre(32);
            let (a, b) = ((t - r as f64).abs(), t + r);
            let mut ex = 0.0;
            let m = 400;
            for i in 0..m {
                let x = a + (b - a) * i as f64 / m as f64;
                let y = a + (b - a) * (i + 1) as f64 / m as f64;
                ex += rule.integrate(x, y, |l| l * s.g.value(l));
            }
            ex /= 2.0 * r;
            let v = eval_v(&s, r, t).unwrap();
            assert!((v - ex).abs() < 1e-10, "({r},{t}): {v} vs {ex}");
        }
    }

    #[test]
    fn initial_rate_is_g_when_f_vanishes() {
        let s = blowup_spec(4);
        for r in [0.6, 0.75, 0.9] {
            let h = 1e-3;
            let d = initial_rate(&s, r, h).unwrap();
            assert!((d - s.g.value(r)).abs() < 1e-4, "r={r}: {d} vs {}", s.g.value(r));
        }
    }

    #[test]
    fn blowup_form_agrees_with_general_form() {
        for n in 3..=6 {
            let s = blowup_spec(n);
            for &(r, t) in &[(0.7, 0.2), (2.0, 1.6), (5.0, 4.4), (3.1, 3.0)] {
                let a = eval_v(&s, r, t).unwrap();
                let b = eval_v_blowup(&s, r, t).unwrap();
                assert!((a - b).abs() < 10.0 * s.q.abs_tol.max(1e-12 * a.abs()), "n={n} ({r},{t}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn lower_bound_constant_is_positive() {
        let s = blowup_spec(4);
        let fit = fit_lower_bound(&s, 0.5, 5.0, 6, 6).unwrap();
        assert!(fit.c_ngk > 0.0);
    }

    #[test]
    fn zero_data_have_zero_decay_sup() {
        let s = LinearPartSpec::new(RadialProfile::zero(), RadialProfile::zero(), dim(4));
        let grid = Lattice::new(0.5, 0.5, 12.0, 10.0).unwrap();
        let rep = verify_decay(&s, &grid).unwrap();
        assert_eq!(rep.sup_weighted, 0.0);
    }
}
