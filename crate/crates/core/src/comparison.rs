//! One-dimensional comparison equations for the blow-up argument.
//!
//! The solution on the interior cone `Σ₀ = {2k ≤ t - r ≤ r}` is bounded
//! below by `w(ξ)` with `W(ξ) = ξ^{q̄+n-2} w(ξ)` solving a Volterra
//! equation in `ξ ≥ 2k`. The marches here solve the equality versions of
//! the frames; the data term `E₂ε^p` needs the constant of the lower bound
//! `V ≥ C/r^{n-2}`, which is fitted from the linear part.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::duhamel::cbar;
use crate::error::{Error, Result};
use crate::fields::SpaceTimeField;
use crate::linear_part::{fit_lower_bound, LinearPartSpec};
use crate::norms::Exponents;
use crate::quadrature::gauss_legendre;
use crate::solver::least_squares;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonConstants {
    pub n: u32,
    pub p: f64,
    pub k: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub c_ngk: f64,
    pub c_bar: f64,
    pub d_n: f64,
    pub e1: f64,
    pub e2: f64,
}

impl ComparisonConstants {
    pub fn new(expo: &Exponents, k: f64, k0: f64, c_ngk: f64) -> Result<Self> {
        if !(0.0 < k0 && k0 < k) {
            return Err(Error::invalid(format!("need 0 < k0 < k, got k0={k0}, k={k}")));
        }
        if !(c_ngk > 0.0 && c_ngk.is_finite()) {
            return Err(Error::invalid(format!("C_ngk must be positive, got {c_ngk}")));
        }
        let n = expo.n.get();
        let nf = n as f64;
        let p = expo.p;
        let c_bar = cbar(expo.n);
        let k1 = 0.5 * (k + k0);
        let d_n = c_bar / (2f64.powi(n as i32 - 2) * (nf - 1.0));
        let e1 = c_bar * c_ngk.powf(p) * (k1 - k0) / ((nf - 1.0) * 2f64.powf((nf - 2.0) * p - (3.0 * nf - 11.0) / 2.0));
        let e2 = e1 / 2f64.powf((3.0 * nf - 5.0) / 2.0);
        Ok(ComparisonConstants { n, p, k, k0, k1, k2: k - k0, c_ngk, c_bar, d_n, e1, e2 })
    }

    /// Fits `C_{n,g,k}` on `t ∈ [k2, 10 k2]` and builds the constants.
    pub fn from_data(spec: &LinearPartSpec, expo: &Exponents) -> Result<(Self, f64)> {
        if spec.n != expo.n {
            return Err(Error::invalid("dimension of data and exponents differ"));
        }
        let (k, k0) = (spec.g.k(), spec.g.k0());
        let k2 = k - k0;
        let fit = fit_lower_bound(spec, k2, 10.0 * k2, 10, 16)?;
        Ok((ComparisonConstants::new(expo, k, k0, fit.c_ngk)?, fit.spread()))
    }

    /// `W(2k)`.
    pub fn data_term(&self, eps: f64) -> f64 {
        self.e2 * eps.powf(self.p)
    }

    /// ε for which the growth term of the frame becomes comparable to the
    /// data near `ξ = xi_target`; a start value for sweeps, not a result.
    pub fn eps_scale(&self, expo: &Exponents, frame: Frame, xi_target: f64) -> f64 {
        let p = self.p;
        let growth = match frame {
            Frame::Critical => (p - 1.0) * self.d_n * (xi_target / (2.0 * self.k)).ln().max(1e-12),
            _ => self.d_n * xi_target.powf(1.0 - p * expo.qbar) / (expo.n.as_f64() - 1.0),
        };
        let w0 = growth.powf(-1.0 / (p - 1.0));
        (w0 / self.e2).powf(1.0 / p)
    }
}

/// Which equality is marched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// `W = D ξ^{q̄+1} ∫ (ξ-β)^{n-2} |W|^p β^{-(n-2)p-pq̄} dβ + E₂ε^p`
    General,
    /// `W = D ∫ ((ξ-β)/ξ)^{n-2} |W|^p β^{-pq̄} dβ + E₂ε^p`, for `p = p1(n)`
    Critical,
    /// `W = D ξ^{-(n-2)-pq̄} ∫ (ξ-β)^{n-2} |W|^p dβ + E₂ε^p`, for `p < p1(n)`
    Subcritical,
}

impl FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Frame::General),
            "critical" => Ok(Frame::Critical),
            "subcritical" => Ok(Frame::Subcritical),
            other => Err(Error::invalid(format!("unknown frame '{other}'"))),
        }
    }
}

/// Nodes in `ξ`, starting at `2k` and stored as `ln ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiGrid {
    Uniform { start: f64, h: f64, max: f64 },
    Log { start: f64, per_decade: usize, max_ln: f64 },
}

impl XiGrid {
    pub fn log(start: f64, per_decade: usize, max_ln: f64) -> Self {
        XiGrid::Log { start, per_decade, max_ln }
    }

    pub fn start(&self) -> f64 {
        match *self {
            XiGrid::Uniform { start, .. } | XiGrid::Log { start, .. } => start,
        }
    }

    /// Same range with twice the density.
    pub fn refined(&self) -> Self {
        match *self {
            XiGrid::Uniform { start, h, max } => XiGrid::Uniform { start, h: 0.5 * h, max },
            XiGrid::Log { start, per_decade, max_ln } => XiGrid::Log { start, per_decade: 2 * per_decade, max_ln },
        }
    }

    pub fn ln_nodes(&self) -> Result<Vec<f64>> {
        match *self {
            XiGrid::Uniform { start, h, max } => {
                if !(start > 0.0 && h > 0.0 && max > start) {
                    return Err(Error::invalid("uniform xi grid needs 0 < start < max and h > 0"));
                }
                let m = ((max - start) / h).floor() as usize;
                Ok((0..=m).map(|i| (start + i as f64 * h).ln()).collect())
            }
            XiGrid::Log { start, per_decade, max_ln } => {
                if !(start > 0.0 && per_decade > 0 && max_ln > start.ln()) {
                    return Err(Error::invalid("log xi grid needs start > 0, per_decade > 0, max_ln > ln start"));
                }
                let d = std::f64::consts::LN_10 / per_decade as f64;
                let m = ((max_ln - start.ln()) / d).floor() as usize;
                Ok((0..=m).map(|i| start.ln() + i as f64 * d).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WMarch {
    pub ln_xi: Vec<f64>,
    pub w: Vec<f64>,
    /// `ln ξ*` of the first node with `W > cap`; `None` when the grid ran out.
    pub ln_xi_star: Option<f64>,
}

impl WMarch {
    pub fn xi_star(&self) -> Option<f64> {
        self.ln_xi_star.map(f64::exp)
    }

    pub fn survived(&self) -> bool {
        self.ln_xi_star.is_none()
    }

    /// `w(ξ) = ξ^{-q̄-(n-2)} W(ξ)` at node `i`.
    pub fn small_w(&self, i: usize, expo: &Exponents) -> f64 {
        let s = expo.qbar + expo.n.as_f64() - 2.0;
        (-s * self.ln_xi[i]).exp() * self.w[i]
    }

    /// `w` at `ξ`, linear in `ln ξ` between nodes.
    pub fn small_w_at(&self, xi: f64, expo: &Exponents) -> Option<f64> {
        let x = xi.ln();
        let j = self.ln_xi.partition_point(|&y| y <= x);
        if j == 0 || j >= self.w.len() {
            return (j == self.w.len() && (x - self.ln_xi[j - 1]).abs() < 1e-12).then(|| self.small_w(j - 1, expo));
        }
        let (a, b) = (self.ln_xi[j - 1], self.ln_xi[j]);
        let s = (x - a) / (b - a);
        Some((1.0 - s) * self.small_w(j - 1, expo) + s * self.small_w(j, expo))
    }
}

fn check_frame(consts: &ComparisonConstants, expo: &Exponents, frame: Frame, grid: &XiGrid) -> Result<()> {
    if consts.n != expo.n.get() || (consts.p - expo.p).abs() > 1e-15 * expo.p {
        return Err(Error::invalid("comparison constants were built for other exponents"));
    }
    if (grid.start() - 2.0 * consts.k).abs() > 1e-12 * consts.k {
        return Err(Error::invalid(format!("xi grid must start at 2k = {}", 2.0 * consts.k)));
    }
    match frame {
        Frame::Critical if (expo.p - expo.p1).abs() > 1e-9 * expo.p1 => {
            Err(Error::invalid(format!("critical frame needs p = p1(n) = {}, got {}", expo.p1, expo.p)))
        }
        Frame::Subcritical if expo.p >= expo.p1 => {
            Err(Error::invalid(format!("subcritical frame needs p < p1(n) = {}, got {}", expo.p1, expo.p)))
        }
        _ => Ok(()),
    }
}

/// Marches one frame.
///
/// `W` at node `J` uses nodes `< J` only: on earlier cells `|W|^p` (times
/// the β-power of the frame) is linear and the kernel is integrated exactly
/// against it; on the last cell it is held at its left value. The critical
/// frame is integrated in `ln β`, where its kernel is
/// `(1 - β/ξ)^{n-2}` and `β^{1-pq̄}` is the vanishing power `β^{ζ/2}`.
pub fn march_frame(
    consts: &ComparisonConstants,
    expo: &Exponents,
    frame: Frame,
    eps: f64,
    grid: &XiGrid,
    cap: f64,
) -> Result<WMarch> {
    check_frame(consts, expo, frame, grid)?;
    if !(eps >= 0.0 && eps.is_finite()) || !(cap > 0.0) {
        return Err(Error::invalid("eps must be nonnegative and cap positive"));
    }
    let y = grid.ln_nodes()?;
    let m = expo.n.get() as i32 - 2;
    let p = expo.p;
    let pq = p * expo.qbar;
    let data = consts.data_term(eps);
    // g_i: the piecewise-linear factor; its β-power depends on the frame
    let beta_power = match frame {
        Frame::General => -(expo.n.as_f64() - 2.0) * p - pq,
        Frame::Critical => 1.0 - pq,
        Frame::Subcritical => 0.0,
    };
    let rule = gauss_legendre(((m + 3) / 2).max(2) as usize);
    let crit_rule = gauss_legendre(4);
    let mut w = Vec::with_capacity(y.len());
    let mut g: Vec<f64> = Vec::with_capacity(y.len());
    // prefix of ∫ g over cells, used where the critical kernel is 1
    let mut cum = vec![0.0f64];
    let mut ln_xi_star = None;
    for (jn, &x) in y.iter().enumerate() {
        let wj = if jn == 0 || data == 0.0 {
            data
        } else {
            let xi = x.exp();
            let mut s = 0.0;
            match frame {
                Frame::Critical => {
                    // (1 - e^{y-x})^m rounds to 1 below this
                    let far = x - 40.0;
                    let first = y[..jn].partition_point(|&v| v < far).saturating_sub(1).min(jn - 1);
                    s += cum[first];
                    for i in first..jn - 1 {
                        let (a, b) = (y[i], y[i + 1]);
                        let (ga, gb) = (g[i], g[i + 1]);
                        s += crit_rule.integrate(a, b, |v| {
                            let lin = ga + (gb - ga) * (v - a) / (b - a);
                            (1.0 - (v - x).exp()).powi(m) * lin
                        });
                    }
                    let a = y[jn - 1];
                    s += g[jn - 1] * crit_rule.integrate(a, x, |v| (1.0 - (v - x).exp()).powi(m));
                }
                _ => {
                    for i in 0..jn - 1 {
                        let (a, b) = (y[i].exp(), y[i + 1].exp());
                        let (ga, gb) = (g[i], g[i + 1]);
                        s += rule.integrate(a, b, |v| {
                            let lin = ga + (gb - ga) * (v - a) / (b - a);
                            (xi - v).powi(m) * lin
                        });
                    }
                    let a = y[jn - 1].exp();
                    s += g[jn - 1] * (xi - a).powi(m + 1) / (m + 1) as f64;
                }
            }
            let outer = match frame {
                Frame::General => ((expo.qbar + 1.0) * x).exp(),
                Frame::Critical => 1.0,
                Frame::Subcritical => (-(expo.n.as_f64() - 2.0 + pq) * x).exp(),
            };
            consts.d_n * outer * s + data
        };
        w.push(wj);
        if !wj.is_finite() || wj > cap {
            ln_xi_star = Some(x);
            break;
        }
        let gj = wj.abs().powf(p) * if beta_power == 0.0 { 1.0 } else { (beta_power * x).exp() };
        g.push(gj);
        if jn > 0 {
            let (a, b) = (y[jn - 1], y[jn]);
            let cell = match frame {
                Frame::Critical => 0.5 * (g[jn - 1] + gj) * (b - a),
                _ => 0.5 * (g[jn - 1] + gj) * (b.exp() - a.exp()),
            };
            cum.push(cum[jn - 1] + cell);
        }
    }
    let len = w.len();
    Ok(WMarch { ln_xi: y[..len].to_vec(), w, ln_xi_star })
}

pub fn march_w(consts: &ComparisonConstants, expo: &Exponents, eps: f64, grid: &XiGrid, cap: f64) -> Result<WMarch> {
    march_frame(consts, expo, Frame::General, eps, grid, cap)
}

pub fn march_w_critical(consts: &ComparisonConstants, expo: &Exponents, eps: f64, grid: &XiGrid, cap: f64) -> Result<WMarch> {
    march_frame(consts, expo, Frame::Critical, eps, grid, cap)
}

pub fn march_w_subcritical(consts: &ComparisonConstants, expo: &Exponents, eps: f64, grid: &XiGrid, cap: f64) -> Result<WMarch> {
    march_frame(consts, expo, Frame::Subcritical, eps, grid, cap)
}

/// `(ε, ln ξ*)` per ε, in the order given.
pub fn xi_star_sweep(
    consts: &ComparisonConstants,
    expo: &Exponents,
    frame: Frame,
    eps_list: &[f64],
    grid: &XiGrid,
    cap: f64,
) -> Result<Vec<(f64, Option<f64>)>> {
    eps_list
        .par_iter()
        .map(|&e| march_frame(consts, expo, frame, e, grid, cap).map(|m| (e, m.ln_xi_star)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct XiFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `d ln ξ* / d ln ε` between consecutive sweep entries.
    pub local_slopes: Vec<f64>,
    pub points: usize,
}

/// Subcritical law: `ln ξ*` against `ln ε`. Critical law: `ln ξ*` against
/// `ε^{-p(p-1)}`.
pub fn fit_xi_star(sweep: &[(f64, Option<f64>)], expo: &Exponents, critical: bool) -> Result<XiFit> {
    let hits: Vec<(f64, f64)> = sweep.iter().filter_map(|&(e, s)| s.map(|s| (e, s))).collect();
    if hits.len() < 4 {
        return Err(Error::invalid(format!("xi* fit needs at least 4 crossings, got {}", hits.len())));
    }
    let pts: Vec<(f64, f64)> = hits
        .iter()
        .map(|&(e, s)| if critical { (e.powf(-expo.critical_rate()), s) } else { (e.ln(), s) })
        .collect();
    let fit = least_squares(&pts).ok_or_else(|| Error::invalid("degenerate abscissae in xi* fit"))?;
    let local_slopes = hits.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0.ln() - w[0].0.ln())).collect();
    Ok(XiFit { slope: fit.slope, intercept: fit.intercept, r2: fit.r2, local_slopes, points: hits.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameViolation {
    pub r: f64,
    pub t: f64,
    pub u: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub samples: usize,
    pub violations: Vec<FrameViolation>,
    /// Smallest `u / bound` over the samples with a positive bound.
    pub min_ratio: f64,
    pub w_samples: usize,
    pub w_violations: Vec<FrameViolation>,
    pub w_min_ratio: f64,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.w_violations.is_empty()
    }
}

/// Right side of the iteration frame at `(r, t) ∈ Σ₀`, with `|u|^p` read
/// from `u` on the characteristic rectangle `R(r, t)`.
pub fn frame_rhs(u: &SpaceTimeField, consts: &ComparisonConstants, expo: &Exponents, eps: f64, r: f64, t: f64) -> Result<f64> {
    let nf = expo.n.as_f64();
    let p = expo.p;
    let d = t - r;
    let two_k = 2.0 * consts.k;
    if d < two_k - 1e-12 || d > r + 1e-12 {
        return Err(Error::invalid(format!("({r}, {t}) is outside the interior cone")));
    }
    let lead = r.powf(-(3.0 * nf - 7.0) / 2.0);
    let data = consts.e1 * d.powf((3.0 * nf - 5.0) / 2.0 - (nf - 2.0) * p) * lead * eps.powf(p);
    if d - two_k <= 0.0 {
        return Ok(data);
    }
    // α = τ + λ ∈ [2d + β, t + r], β = τ - λ ∈ [2k, d], dλ dτ = dα dβ / 2
    let e = (nf - 3.0) / 2.0;
    let rule = gauss_legendre(12);
    let panels = 6;
    let mut err = None;
    let mut total = 0.0;
    let hb = (d - two_k) / panels as f64;
    for pb in 0..panels {
        let (b0, b1) = (two_k + pb as f64 * hb, two_k + (pb + 1) as f64 * hb);
        total += rule.integrate(b0, b1, |beta| {
            let a_lo = 2.0 * d + beta;
            let a_hi = t + r;
            if a_hi <= a_lo {
                return 0.0;
            }
            let ha = (a_hi - a_lo) / panels as f64;
            let mut inner = 0.0;
            for pa in 0..panels {
                let (a0, a1) = (a_lo + pa as f64 * ha, a_lo + (pa + 1) as f64 * ha);
                inner += rule.integrate(a0, a1, |alpha| {
                    let lam = 0.5 * (alpha - beta);
                    let tau = 0.5 * (alpha + beta);
                    match u.bilinear(lam, tau) {
                        Ok(v) => ((d - beta) * (t + r - alpha)).max(0.0).powf(e) * v.abs().powf(p),
                        Err(x) => {
                            err.get_or_insert(x);
                            0.0
                        }
                    }
                });
            }
            inner
        });
    }
    if let Some(x) = err {
        return Err(x);
    }
    let integral = 0.5 * total;
    Ok(consts.c_bar * 2f64.powf(e) * d.powf((nf - 1.0) / 2.0) * lead * integral + data)
}

/// Audits the iteration frame at random nodes of `Σ₀` and `u > w` on
/// `Γ₀ = {r = 2ξ, t = 3ξ}`, where `w` is read from the general-frame march.
pub fn frame_check(
    u: &SpaceTimeField,
    consts: &ComparisonConstants,
    expo: &Exponents,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<FrameReport> {
    let lat = *u.lattice();
    let filled = u.n_filled();
    if filled < 2 {
        return Err(Error::NotFilled { needed: 1, filled: u.filled_up_to() });
    }
    let t_top = lat.t(filled - 1);
    let two_k = 2.0 * consts.k;
    if t_top < 2.0 * two_k {
        return Err(Error::invalid(format!("solution must reach t >= 4k = {}, reached {t_top}", 2.0 * two_k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            let t = rng.gen_range(2.0 * two_k..=t_top);
            let d = rng.gen_range(two_k..=0.5 * t);
            (t - d, t)
        })
        .collect();
    let checked: Vec<(f64, f64, f64, f64)> = pts
        .par_iter()
        .map(|&(r, t)| Ok((r, t, u.bilinear(r, t)?, frame_rhs(u, consts, expo, eps, r, t)?)))
        .collect::<Result<_>>()?;
    let mut violations = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for &(r, t, uv, b) in &checked {
        if b > 0.0 {
            min_ratio = min_ratio.min(uv / b);
        }
        if uv < b {
            violations.push(FrameViolation { r, t, u: uv, bound: b });
        }
    }

    let xi_hi = t_top / 3.0;
    let mut w_violations = Vec::new();
    let mut w_min_ratio = f64::INFINITY;
    let mut w_samples = 0;
    if xi_hi > two_k {
        let grid = XiGrid::log(two_k, 400, xi_hi.ln() + 1e-9);
        let wm = march_w(consts, expo, eps, &grid, f64::INFINITY)?;
        let n_w = samples.clamp(2, 64);
        let xi_last = wm.ln_xi.last().copied().unwrap_or(two_k.ln()).exp();
        for i in 0..n_w {
            let xi = (two_k * (xi_hi / two_k).powf(i as f64 / (n_w - 1) as f64)).min(xi_last);
            let Some(wv) = wm.small_w_at(xi, expo) else {
                continue;
            };
            let uv = u.bilinear(2.0 * xi, 3.0 * xi)?;
            w_samples += 1;
            if wv > 0.0 {
                w_min_ratio = w_min_ratio.min(uv / wv);
            }
            if uv <= wv {
                w_violations.push(FrameViolation { r: 2.0 * xi, t: 3.0 * xi, u: uv, bound: wv });
            }
        }
    }
    Ok(FrameReport { samples, violations, min_ratio, w_samples, w_violations, w_min_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::p1;
    use crate::sphmeans::Dimension;

    fn consts(n: u32, p: f64) -> (ComparisonConstants, Exponents) {
        let e = Exponents::new(Dimension::new(n).unwrap(), p).unwrap();
        (ComparisonConstants::new(&e, 1.0, 0.5, 0.05).unwrap(), e)
    }

    #[test]
    fn constants_in_three_dimensions() {
        let (c, _) = consts(3, 2.0);
        assert!((c.c_bar - 0.5).abs() < 1e-15);
        assert!((c.d_n - 0.125).abs() < 1e-15);
        // E1 = C̄ C² (k1 - k0) / (2 · 2^{2+1})
        assert!((c.e1 - 0.5 * 0.0025 * 0.25 / 16.0).abs() < 1e-18);
        assert!((c.e2 - c.e1 / 4.0).abs() < 1e-18);
        assert!(c.k0 < c.k1 && c.k1 < c.k);
    }

    #[test]
    fn zero_epsilon_stays_zero() {
        let (c, e) = consts(3, 2.0);
        let m = march_w(&c, &e, 0.0, &XiGrid::log(2.0, 50, 5.0), 1e6).unwrap();
        assert!(m.survived());
        assert!(m.w.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn left_endpoint_is_the_data_term() {
        for frame in [Frame::General, Frame::Subcritical] {
            let (c, e) = consts(3, 2.0);
            let m = march_frame(&c, &e, frame, 3.0, &XiGrid::log(2.0, 50, 5.0), 1e6).unwrap();
            assert_eq!(m.w[0], c.e2 * 9.0);
            assert!(m.w.iter().all(|&x| x >= m.w[0]));
        }
        let (c, e) = consts(4, p1(Dimension::new(4).unwrap()));
        let m = march_w_critical(&c, &e, 3.0, &XiGrid::log(2.0, 50, 5.0), 1e6).unwrap();
        assert_eq!(m.w[0], c.data_term(3.0));
        let q = e.qbar + 2.0;
        assert!((m.small_w(0, &e) - 2f64.powf(-q) * c.data_term(3.0)).abs() < 1e-15 * m.w[0]);
    }

    #[test]
    fn uniform_and_log_grids_agree() {
        let (c, e) = consts(3, 2.0);
        let eps = c.eps_scale(&e, Frame::Subcritical, 200.0);
        let a = march_w_subcritical(&c, &e, eps, &XiGrid::Uniform { start: 2.0, h: 0.05, max: 100.0 }, f64::INFINITY).unwrap();
        let b = march_w_subcritical(&c, &e, eps, &XiGrid::log(2.0, 800, 100f64.ln()), f64::INFINITY).unwrap();
        let i = b.w.len() - 1;
        let wb = b.small_w(i, &e);
        let wa = a.small_w_at(b.ln_xi[i].exp(), &e).unwrap();
        assert!((wa - wb).abs() < 1e-2 * wa, "{wa} {wb}");
    }

    #[test]
    fn frame_checks_reject_wrong_exponent() {
        let (c, e) = consts(3, 3.0);
        assert!(march_w_subcritical(&c, &e, 1.0, &XiGrid::log(2.0, 10, 3.0), 1e6).is_err());
        assert!(march_w_critical(&c, &e, 1.0, &XiGrid::log(2.0, 10, 3.0), 1e6).is_err());
        let (c, e) = consts(3, 2.0);
        assert!(march_w(&c, &e, 1.0, &XiGrid::log(1.0, 10, 3.0), 1e6).is_err());
    }
}
