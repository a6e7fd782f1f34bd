//! The Duhamel-type operator in radial form,
//!
//! ```text
//! N(F)(r,t) = c̄ r^{2-n} ∫_0^t (t-τ)^{3-n} ∫_{|t-τ-r|}^{t-τ+r} λ h(λ,t-τ,r) F(λ,τ) dλ dτ,
//! c̄ = 2^{3-n} ω_{n-1} / ((n-2) ω_n),
//! ```
//!
//! applied to lattice fields. `F` is interpolated linearly in `λ` on each
//! slice and the `τ`-integral is the trapezoid rule over slices. The
//! integrand vanishes at `τ = t`, so a slice of `N(F)` only needs the
//! earlier slices of `F`.
//!
//! With `h̃ = h/(4rρ)^{n-3}` the slice contribution is `c̄ 4^{n-3} r^{-1}
//! ∫ λ F h̃ dλ`. For `n = 3` the kernel is 1 and the inner integral is a
//! difference of prefix moments of `λ F`, one per slice.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::SpaceTimeField;
use crate::quadrature::{gauss_legendre, GaussRule};
use crate::sphmeans::{mean_constant, omega, Dimension, KernelGeometry, QuadratureSpec, SMALL_RADIUS_RATIO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhamelSpec {
    pub n: Dimension,
    /// `base_order` is the number of Gauss nodes per lattice cell.
    pub q: QuadratureSpec,
    pub cbar: f64,
}

/// `2^{3-n} ω_{n-1} / ((n-2) ω_n)`.
pub fn cbar(n: Dimension) -> f64 {
    let m = n.get();
    2f64.powi(3 - m as i32) * omega(m - 1) / ((m as f64 - 2.0) * omega(m))
}

impl DuhamelSpec {
    /// Two Gauss nodes per cell; the interpolant is linear per cell, so this
    /// is exact for `n = 3` and second order otherwise.
    pub fn new(n: Dimension) -> Self {
        let q = QuadratureSpec { base_order: 2, ..QuadratureSpec::default() };
        DuhamelSpec { n, q, cbar: cbar(n) }
    }

    pub fn with_quadrature(n: Dimension, q: QuadratureSpec) -> Self {
        DuhamelSpec { n, q, cbar: cbar(n) }
    }

    pub fn validate(&self) -> Result<()> {
        self.q.validate()?;
        let expect = cbar(self.n);
        if !(self.cbar > 0.0) || (self.cbar - expect).abs() > 1e-14 * expect {
            return Err(Error::invalid(format!("cbar must equal {expect}, got {}", self.cbar)));
        }
        Ok(())
    }

    /// Factor turning `∫ λ F h̃ dλ` into the slice integrand `(t-τ) M[F_τ](r, t-τ)/(n-2)`.
    fn slice_factor(&self) -> f64 {
        self.cbar * 4f64.powi(self.n.get() as i32 - 3)
    }
}

/// Trapezoid nodes for `∫_0^t g(τ) dτ` over lattice slices `0..=m` with
/// `t_m < t`, plus the endpoint `t` itself (weight returned separately).
pub(crate) fn time_weights(dt: f64, t: f64) -> (Vec<f64>, f64) {
    if t <= 0.0 {
        return (Vec::new(), 0.0);
    }
    let y = t / dt;
    let near = y.round();
    let (m, t_last) = if (y - near).abs() <= 1e-9 * y.max(1.0) {
        (near as usize - 1, near * dt)
    } else {
        (y.floor() as usize, t)
    };
    let mut x: Vec<f64> = (0..=m).map(|j| j as f64 * dt).collect();
    x.push(t_last);
    let mut w = vec![0.0; m + 1];
    for j in 0..=m {
        let left = if j == 0 { x[0] } else { x[j - 1] };
        w[j] = 0.5 * (x[j + 1] - left);
    }
    let w_end = 0.5 * (x[m + 1] - x[m]);
    (w, w_end)
}

/// Linear interpolant of one slice, split into cells `[x_m, x_{m+1}]`.
///
/// Cell 0 is `[0, r_0]` where the value is constant; cell `m ≥ 1` joins
/// nodes `m-1` and `m`; the last cell falls to zero at one spacing past the
/// final stored node.
struct SliceView<'a> {
    values: &'a [f64],
    dr: f64,
    cutoff: f64,
}

impl<'a> SliceView<'a> {
    fn new(field: &'a SpaceTimeField, j: usize) -> Self {
        SliceView { values: field.slice(j), dr: field.lattice().dr, cutoff: field.cutoff(j) }
    }

    fn n_cells(&self) -> usize {
        self.values.len() + 1
    }

    /// Right end of the region where the interpolant can be nonzero.
    fn reach(&self) -> f64 {
        (self.values.len() as f64 + 0.5) * self.dr
    }

    #[inline]
    fn edge(&self, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            (m as f64 - 0.5) * self.dr
        }
    }

    #[inline]
    fn cell_of(&self, x: f64) -> usize {
        let y = x / self.dr - 0.5;
        if y < 0.0 {
            0
        } else {
            ((y.floor() as usize) + 1).min(self.n_cells() - 1)
        }
    }

    /// End values of cell `m`.
    #[inline]
    fn cell_values(&self, m: usize) -> (f64, f64) {
        let s = self.values;
        if m == 0 {
            let v = s.first().copied().unwrap_or(0.0);
            (v, v)
        } else {
            (s[m - 1], s.get(m).copied().unwrap_or(0.0))
        }
    }

    #[inline]
    fn linear(&self, m: usize) -> impl Fn(f64) -> f64 {
        let (va, vb) = self.cell_values(m);
        let x0 = self.edge(m);
        let w = if m == 0 { 0.5 * self.dr } else { self.dr };
        let slope = if m == 0 { 0.0 } else { (vb - va) / w };
        move |l| va + slope * (l - x0)
    }
}

/// `∫_u^v λ L(λ) dλ` for linear `L`, by the two-point rule (exact for cubics).
#[inline]
fn lambda_moment(u: f64, v: f64, lin: &impl Fn(f64) -> f64) -> f64 {
    const G: f64 = 0.577_350_269_189_625_8;
    let (m, h) = (0.5 * (u + v), 0.5 * (v - u));
    let (x1, x2) = (m - h * G, m + h * G);
    h * (x1 * lin(x1) + x2 * lin(x2))
}

/// `sqrt(d / w)`, with gaps at rounding level taken as zero: a cell edge
/// that should coincide with an end of the interval would otherwise shift
/// the `u`-nodes by `O(sqrt(ulp))`.
#[inline]
fn u_of(d: f64, w: f64) -> f64 {
    if d <= 1e-12 * w {
        0.0
    } else {
        (d / w).sqrt()
    }
}

/// The even-dimensional path of `kernel_integral` for `n = 4` and the
/// two-point rule, where `h̃ = sqrt((λ-a)(λ+a)(b-λ)(b+λ)) / (4rρ)`.
fn four_dim_integral(view: &SliceView, a: f64, b: f64, hi: f64, scale: f64) -> f64 {
    const G: f64 = 0.577_350_269_189_625_8;
    let mid = 0.5 * (a + b);
    let w = mid - a;
    let lo_end = hi.min(mid);
    // λ = end ± w u²: the integrand becomes λ L(λ) · 2 w^{3/2} u² sqrt(rest) / scale
    let c = 2.0 * w * w.sqrt() / scale;
    let mut sum = 0.0;
    let cell = |m: usize, u0: f64, u1: f64, lower: bool| {
        let (va, vb) = view.cell_values(m);
        let x0 = view.edge(m);
        let slope = if m == 0 { 0.0 } else { (vb - va) / view.dr };
        let (um, uh) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
        let mut s = 0.0;
        for u in [um - uh * G, um + uh * G] {
            let off = w * u * u;
            let (l, rest) = if lower {
                let l = a + off;
                (l, (l + a) * (b - l) * (b + l))
            } else {
                let l = b - off;
                (l, (l - a) * (l + a) * (b + l))
            };
            s += l * (va + slope * (l - x0)) * u * u * rest.max(0.0).sqrt();
        }
        s * uh * c
    };
    let mut u_prev = 0.0;
    for m in view.cell_of(a)..=view.cell_of(lo_end) {
        let y = view.edge(m + 1).min(lo_end);
        if y <= a {
            continue;
        }
        let u1 = u_of(y - a, w);
        if u1 > u_prev {
            sum += cell(m, u_prev, u1, true);
        }
        u_prev = u1;
    }
    if hi > mid {
        let m_hi = view.cell_of(hi);
        let m_mid = view.cell_of(mid);
        if hi == b {
            let mut u_prev = 1.0;
            for m in m_mid..=m_hi {
                let y = view.edge(m + 1).min(hi);
                let u1 = u_of(b - y, w);
                if u1 < u_prev {
                    sum += cell(m, u1, u_prev, false);
                }
                u_prev = u1;
            }
        } else {
            let scale_inv = 1.0 / scale;
            for m in m_mid..=m_hi {
                let x = view.edge(m).max(mid);
                let y = view.edge(m + 1).min(hi);
                if y <= x {
                    continue;
                }
                let (va, vb) = view.cell_values(m);
                let x0 = view.edge(m);
                let slope = if m == 0 { 0.0 } else { (vb - va) / view.dr };
                let (lm, lh) = (0.5 * (x + y), 0.5 * (y - x));
                let mut s = 0.0;
                for l in [lm - lh * G, lm + lh * G] {
                    let p = (l - a) * (l + a) * (b - l) * (b + l);
                    s += l * (va + slope * (l - x0)) * p.max(0.0).sqrt();
                }
                sum += s * lh * scale_inv;
            }
        }
    }
    sum
}

/// Applies the operator to one fixed field, caching what can be reused
/// across output points.
pub struct DuhamelOperator<'a> {
    spec: DuhamelSpec,
    field: &'a SpaceTimeField,
    /// n = 3: prefix integrals of `λ F_j` at the cell edges.
    prefix: Vec<Vec<f64>>,
    rule: &'static GaussRule,
}

impl<'a> DuhamelOperator<'a> {
    pub fn new(spec: &DuhamelSpec, field: &'a SpaceTimeField) -> Self {
        let mut op = DuhamelOperator { spec: *spec, field, prefix: Vec::new(), rule: gauss_legendre(spec.q.base_order) };
        if spec.n.get() == 3 {
            op.prefix = (0..field.n_filled()).map(|j| prefix_moments(&SliceView::new(field, j))).collect();
        }
        op
    }

    /// Reuses prefix tables computed for an earlier state of a growing field.
    pub fn with_prefix(spec: &DuhamelSpec, field: &'a SpaceTimeField, mut prefix: Vec<Vec<f64>>) -> Self {
        if spec.n.get() == 3 {
            prefix.truncate(field.n_filled());
            for j in prefix.len()..field.n_filled() {
                prefix.push(prefix_moments(&SliceView::new(field, j)));
            }
        }
        DuhamelOperator { spec: *spec, field, prefix, rule: gauss_legendre(spec.q.base_order) }
    }

    pub fn into_prefix(self) -> Vec<Vec<f64>> {
        self.prefix
    }

    /// `∫_{|ρ-r|}^{ρ+r} λ F_j(λ) h̃(λ,ρ,r) dλ`.
    pub fn kernel_integral(&self, j: usize, r: f64, rho: f64) -> f64 {
        let view = SliceView::new(self.field, j);
        let a = (rho - r).abs();
        let b = rho + r;
        let hi = b.min(view.cutoff).min(view.reach());
        if !(hi > a) {
            return 0.0;
        }
        if self.spec.n.get() == 3 && !self.prefix.is_empty() {
            return prefix_integral(&view, &self.prefix[j], a, hi);
        }
        let geo = KernelGeometry::new(r, rho, self.spec.n);
        let integrand = |l: f64, dl: f64, du: f64, lin: &dyn Fn(f64) -> f64| l * lin(l) * geo.h_tilde(l, dl, du);
        if !self.spec.n.is_even() {
            let mut sum = 0.0;
            for m in view.cell_of(a)..=view.cell_of(hi) {
                let x = view.edge(m).max(a);
                let y = view.edge(m + 1).min(hi);
                if y > x {
                    let lin = view.linear(m);
                    sum += self.rule.integrate(x, y, |l| integrand(l, l - a, b - l, &lin));
                }
            }
            return sum;
        }
        if self.spec.n.get() == 4 && self.spec.q.base_order == 2 {
            return four_dim_integral(&view, a, b, hi, geo.scale());
        }
        // Square-root ends: λ = a + W u² on the lower half and λ = b - W u²
        // on the upper half, with the lattice cells mapped into u.
        let mid = 0.5 * (a + b);
        let w = mid - a;
        let mut sum = 0.0;
        let lo_end = hi.min(mid);
        for m in view.cell_of(a)..=view.cell_of(lo_end) {
            let x = view.edge(m).max(a);
            let y = view.edge(m + 1).min(lo_end);
            if y > x {
                let lin = view.linear(m);
                let (u0, u1) = (u_of(x - a, w), u_of(y - a, w));
                sum += self.rule.integrate(u0, u1, |u| {
                    let off = w * u * u;
                    let l = a + off;
                    integrand(l, off, b - l, &lin) * 2.0 * w * u
                });
            }
        }
        if hi > mid {
            let upper_end = hi == b;
            for m in view.cell_of(mid)..=view.cell_of(hi) {
                let x = view.edge(m).max(mid);
                let y = view.edge(m + 1).min(hi);
                if y <= x {
                    continue;
                }
                let lin = view.linear(m);
                if upper_end {
                    let (u0, u1) = (u_of(b - y, w), u_of(b - x, w));
                    sum += self.rule.integrate(u0, u1, |u| {
                        let off = w * u * u;
                        let l = b - off;
                        integrand(l, l - a, off, &lin) * 2.0 * w * u
                    });
                } else {
                    sum += self.rule.integrate(x, y, |l| integrand(l, l - a, b - l, &lin));
                }
            }
        }
        sum
    }

    /// Mean of slice `j` over the sphere of radius `rho` about a point at
    /// distance `r` from the origin.
    pub fn slice_mean(&self, j: usize, r: f64, rho: f64) -> f64 {
        if rho <= SMALL_RADIUS_RATIO * r {
            return self.field.interp_r(j, r);
        }
        if r <= SMALL_RADIUS_RATIO * rho {
            return self.field.interp_r(j, rho);
        }
        mean_constant(self.spec.n) / (r * rho) * self.kernel_integral(j, r, rho)
    }

    /// `(t-τ_j) M[F_j](r, t-τ_j) / (n-2)`.
    fn duhamel_integrand(&self, j: usize, r: f64, rho: f64) -> f64 {
        if r <= SMALL_RADIUS_RATIO * rho {
            return rho * self.field.interp_r(j, rho) / (self.spec.n.as_f64() - 2.0);
        }
        self.spec.slice_factor() / r * self.kernel_integral(j, r, rho)
    }

    fn check_filled(&self, needed: usize) -> Result<()> {
        let filled = self.field.filled_up_to();
        if filled.is_none_or(|f| f < needed) {
            return Err(Error::NotFilled { needed, filled });
        }
        Ok(())
    }

    /// `N(F)(r, t)` and the number of slices with a nonempty contribution.
    pub fn point(&self, r: f64, t: f64) -> Result<(f64, usize)> {
        if !(r > 0.0 && t >= 0.0 && r.is_finite() && t.is_finite()) {
            return Err(Error::invalid(format!("N(F) needs r > 0, t >= 0 (got r={r}, t={t})")));
        }
        let (w, _) = time_weights(self.field.lattice().dt, t);
        if w.is_empty() {
            return Ok((0.0, 0));
        }
        self.check_filled(w.len() - 1)?;
        let lat = self.field.lattice();
        let mut sum = 0.0;
        let mut touched = 0;
        for (j, wj) in w.iter().enumerate() {
            let rho = t - lat.t(j);
            if (rho - r).abs() >= self.field.cutoff(j) {
                continue;
            }
            touched += 1;
            sum += wj * self.duhamel_integrand(j, r, rho);
        }
        Ok((sum, touched))
    }

    /// `∫_0^t M[F_τ](r, t-τ) dτ`; the `τ = t` end uses `F(r, t)`.
    pub fn mean_time_integral(&self, r: f64, t: f64) -> Result<f64> {
        let (w, w_end) = time_weights(self.field.lattice().dt, t);
        if w.is_empty() {
            return Ok(0.0);
        }
        let lat = self.field.lattice();
        let top = self.field.bilinear(r, t)?;
        let mut sum = w_end * top;
        for (j, wj) in w.iter().enumerate() {
            let rho = t - lat.t(j);
            if (rho - r).abs() >= self.field.cutoff(j) {
                continue;
            }
            sum += wj * self.slice_mean(j, r, rho);
        }
        Ok(sum)
    }
}

fn prefix_moments(view: &SliceView) -> Vec<f64> {
    let cells = view.n_cells();
    let mut p = Vec::with_capacity(cells + 1);
    let mut acc = 0.0;
    p.push(0.0);
    for m in 0..cells {
        acc += lambda_moment(view.edge(m), view.edge(m + 1), &view.linear(m));
        p.push(acc);
    }
    p
}

/// Whole cells come from the prefix table, partial end cells are integrated
/// directly, so nonnegative data give a nonnegative result.
fn prefix_integral(view: &SliceView, prefix: &[f64], lo: f64, hi: f64) -> f64 {
    let m_lo = view.cell_of(lo);
    let m_hi = view.cell_of(hi);
    if m_lo == m_hi {
        return lambda_moment(lo, hi, &view.linear(m_lo));
    }
    let head = lambda_moment(lo, view.edge(m_lo + 1), &view.linear(m_lo));
    let tail = lambda_moment(view.edge(m_hi), hi, &view.linear(m_hi));
    head + (prefix[m_hi] - prefix[m_lo + 1]) + tail
}

/// One output slice of `N(F)` with operation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct NSlice {
    pub values: Vec<f64>,
    /// Earlier slices with a nonempty contribution, summed over output nodes.
    pub slices_touched: usize,
}

pub fn apply_n_point(spec: &DuhamelSpec, f: &SpaceTimeField, r: f64, t: f64) -> Result<f64> {
    Ok(DuhamelOperator::new(spec, f).point(r, t)?.0)
}

/// `N(F)` on every stored node of slice `t_index` (node count from the support of `F`).
pub fn apply_n_slice(spec: &DuhamelSpec, f: &SpaceTimeField, t_index: usize) -> Result<NSlice> {
    DuhamelOperator::new(spec, f).slice(t_index, f.slice_len(t_index))
}

impl DuhamelOperator<'_> {
    pub fn slice(&self, t_index: usize, len: usize) -> Result<NSlice> {
        let lat = *self.field.lattice();
        if t_index > 0 {
            self.check_filled(t_index - 1)?;
        }
        let t = lat.t(t_index);
        let out: Vec<(f64, usize)> =
            (0..len).into_par_iter().map(|i| self.point(lat.r(i), t)).collect::<Result<_>>()?;
        let slices_touched = out.iter().map(|x| x.1).sum();
        Ok(NSlice { values: out.into_iter().map(|x| x.0).collect(), slices_touched })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Lattice;
    use std::f64::consts::PI;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn cbar_closed_forms() {
        // n = 3: 1/(4π) ... 2^0 ω_2 / ω_3 = 1/2, over (n-2) = 1
        assert!((cbar(dim(3)) - 0.5).abs() < 1e-15);
        // n = 4: 2^{-1} 4π / (2 · 2π²) = 1/(2π)
        assert!((cbar(dim(4)) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(DuhamelSpec::new(dim(5)).validate().is_ok());
        let mut bad = DuhamelSpec::new(dim(4));
        bad.cbar *= 2.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn time_weights_sum_to_t() {
        for &t in &[0.3, 1.0, 1.05, 2.5] {
            let (w, we) = time_weights(0.1, t);
            let s: f64 = w.iter().sum::<f64>() + we;
            assert!((s - t).abs() < 1e-12, "t={t}: {s}");
        }
        // within round-off of a lattice time the lattice time is used
        let (w, we) = time_weights(0.1, 2.0000000001);
        assert_eq!(w.len(), 20);
        assert!((w.iter().sum::<f64>() + we - 2.0).abs() < 1e-12);
        assert!(time_weights(0.1, 0.0).0.is_empty());
    }

    #[test]
    fn zero_field_gives_zero() {
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |_, _| 0.0);
        for n in 3..=5 {
            assert_eq!(apply_n_point(&DuhamelSpec::new(dim(n)), &f, 0.7, 1.5).unwrap(), 0.0);
        }
    }

    #[test]
    fn constant_field_reproduces_half_t_squared() {
        // F ≡ 1 on the whole integration range: N = t²/(2(n-2))
        let lat = Lattice::new(0.05, 0.05, 6.0, 2.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, None, |_, _| 1.0);
        for n in 3..=6 {
            let spec = DuhamelSpec::new(dim(n));
            for &(r, t) in &[(0.5, 1.0), (1.3, 2.0), (0.125, 1.5), (2.0, 0.77)] {
                let got = apply_n_point(&spec, &f, r, t).unwrap();
                let expect = t * t / (2.0 * (n as f64 - 2.0));
                assert!((got / expect - 1.0).abs() < 2e-3, "n={n} r={r} t={t}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn slice_matches_points_exactly() {
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| (1.0 + t) * (-(r - t).powi(2)).exp());
        for n in [3, 4] {
            let spec = DuhamelSpec::new(dim(n));
            let s = apply_n_slice(&spec, &f, 15).unwrap();
            for i in (0..s.values.len()).step_by(3) {
                let p = apply_n_point(&spec, &f, lat.r(i), lat.t(15)).unwrap();
                assert_eq!(p, s.values[i], "n={n} i={i}");
            }
        }
        let zero = apply_n_slice(&DuhamelSpec::new(dim(4)), &f, 0).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn prefix_path_matches_quadrature_path() {
        let lat = Lattice::for_support(0.1, 0.07, 3.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| (r * 3.0 + t).sin() + 1.5);
        let spec = DuhamelSpec::new(dim(3));
        let op = DuhamelOperator::new(&spec, &f);
        let plain = DuhamelOperator { spec, field: &f, prefix: Vec::new(), rule: gauss_legendre(2) };
        for &(j, r, rho) in &[(3usize, 0.33, 1.2), (10, 1.7, 0.4), (20, 0.05, 2.0), (5, 2.0, 2.0)] {
            let x = op.kernel_integral(j, r, rho);
            let y = plain.kernel_integral(j, r, rho);
            assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn four_dimensional_path_matches_general_path() {
        let lat = Lattice::for_support(0.1, 0.1, 3.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| (r * 3.0 + t).sin() + 1.5);
        let spec = DuhamelSpec::new(dim(4));
        let fast = DuhamelOperator::new(&spec, &f);
        let mut general = spec;
        general.q.base_order = 3;
        let plain = DuhamelOperator { spec: general, field: &f, prefix: Vec::new(), rule: gauss_legendre(2) };
        for &(j, r, rho) in &[(3usize, 0.33, 1.2), (10, 1.7, 0.4), (20, 0.05, 2.0), (5, 2.0, 2.0), (25, 0.9, 3.1)] {
            let x = fast.kernel_integral(j, r, rho);
            let y = plain.kernel_integral(j, r, rho);
            eprintln!("DBG j={j} r={r} rho={rho} {x} {y} {:e}", (x - y) / x);
        }
    }

    #[test]
    fn unfilled_field_is_rejected() {
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let mut f = SpaceTimeField::new(lat, Some(1.0));
        for j in 0..5 {
            let len = f.slice_len(j);
            f.push_slice(vec![1.0; len]).unwrap();
        }
        let spec = DuhamelSpec::new(dim(4));
        assert!(apply_n_point(&spec, &f, 0.5, 0.4).is_ok());
        assert!(apply_n_point(&spec, &f, 0.5, 0.45).is_ok());
        assert!(matches!(apply_n_point(&spec, &f, 0.5, 0.55), Err(Error::NotFilled { .. })));
        assert!(apply_n_slice(&spec, &f, 5).is_ok());
        assert!(apply_n_slice(&spec, &f, 6).is_err());
    }
}
