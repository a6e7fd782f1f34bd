//! Solving `u = εV + N(F(u))` on a lattice.
//!
//! Slice `j` of `N(F(u))` only involves slices `< j` of `u`, so the lattice
//! equations are solved exactly by marching forward in time. The Picard
//! iteration `U_m = N(F(U_{m-1} + εV))` on the whole lattice is kept as a
//! cross-check. Blow-up is declared when `max_r |u|` exceeds a cap; the
//! crossing time is then refined between the last two slices.

use std::str::FromStr;

use rayon::prelude::*;

use crate::duhamel::{DuhamelOperator, DuhamelSpec};
use crate::error::{Error, Result};
use crate::fields::{Lattice, SpaceTimeField};
use crate::linear_part::{eval_v, v_slice, LinearPartSpec};
use crate::norms::{weight_w, weighted_norm, Exponents, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearForm {
    /// `A |u|^p`
    AbsPower,
    /// `A u²`
    Square,
}

impl FromStr for NonlinearForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs_power" => Ok(NonlinearForm::AbsPower),
            "square" => Ok(NonlinearForm::Square),
            other => Err(Error::invalid(format!("unknown nonlinearity '{other}'"))),
        }
    }
}

impl std::fmt::Display for NonlinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NonlinearForm::AbsPower => "abs_power",
            NonlinearForm::Square => "square",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearitySpec {
    pub p: f64,
    pub form: NonlinearForm,
    pub a: f64,
}

impl NonlinearitySpec {
    pub fn new(p: f64, form: NonlinearForm, a: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!("p must exceed 1, got {p}")));
        }
        if form == NonlinearForm::Square && p != 2.0 {
            return Err(Error::invalid("the square nonlinearity needs p = 2"));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::invalid(format!("nonlinearity scale must be nonnegative, got {a}")));
        }
        Ok(NonlinearitySpec { p, form, a })
    }

    pub fn abs_power(p: f64) -> Self {
        NonlinearitySpec { p, form: NonlinearForm::AbsPower, a: 1.0 }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if self.a == 0.0 {
            return 0.0;
        }
        match self.form {
            NonlinearForm::AbsPower => self.a * s.abs().powf(self.p),
            NonlinearForm::Square => self.a * s * s,
        }
    }

    /// `F'(s)`.
    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        match self.form {
            NonlinearForm::AbsPower => self.a * self.p * s.abs().powf(self.p - 1.0) * s.signum(),
            NonlinearForm::Square => 2.0 * self.a * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    March,
    Picard,
}

impl FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "march" => Ok(SolveMode::March),
            "picard" => Ok(SolveMode::Picard),
            other => Err(Error::invalid(format!("unknown solve mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub epsilon: f64,
    pub lattice: Lattice,
    pub blowup_cap: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub mode: SolveMode,
    /// Horizon up to which a sweep may extend `t_max` by doubling.
    pub budget: f64,
    /// Lower caps whose crossing times are also recorded.
    pub probe_caps: Vec<f64>,
    /// δ of the weight when `p = (n-1)/(n-2)`.
    pub delta: f64,
    pub duhamel_order: usize,
}

impl SolveConfig {
    pub fn new(epsilon: f64, lattice: Lattice) -> Self {
        SolveConfig {
            epsilon,
            lattice,
            blowup_cap: 1e6,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            mode: SolveMode::March,
            budget: 1024.0,
            probe_caps: Vec::new(),
            delta: 0.1,
            duhamel_order: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be nonnegative, got {}", self.epsilon)));
        }
        if !(self.blowup_cap > 0.0) {
            return Err(Error::invalid("blowup_cap must be positive"));
        }
        if !(self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return Err(Error::invalid("picard_tol and picard_max_iters must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifespanResult {
    pub epsilon: f64,
    /// Cap-crossing time; `None` when the run survived to the horizon.
    pub t_hat: Option<f64>,
    pub blew_up: bool,
    /// Weighted norm of `U = u - εV` over the completed slices.
    pub max_weighted_norm: f64,
    pub slices_completed: usize,
    pub dr: f64,
    pub dt: f64,
    pub t_reached: f64,
    pub max_abs_u: f64,
    /// Crossing times of the probe caps, in the order given.
    pub cap_crossings: Vec<(f64, Option<f64>)>,
    /// Running weighted norm of `U` per completed slice.
    pub norm_series: Vec<f64>,
}

impl LifespanResult {
    /// Relative growth of the running weighted norm over the last quarter of the run.
    pub fn final_quarter_growth(&self) -> f64 {
        let n = self.norm_series.len();
        if n < 4 {
            return f64::INFINITY;
        }
        let at = |i: usize| self.norm_series[..=i].iter().cloned().fold(0.0, f64::max);
        let late = at(n - 1);
        let early = at((3 * n) / 4);
        if early == 0.0 {
            return if late == 0.0 { 0.0 } else { f64::INFINITY };
        }
        late / early - 1.0
    }

    pub fn crossing(&self, cap: f64) -> Option<f64> {
        self.cap_crossings.iter().find(|c| c.0 == cap).and_then(|c| c.1)
    }
}

/// Incremental marcher; keeps its state so the horizon can be extended.
pub struct Marcher {
    spec: LinearPartSpec,
    nl: NonlinearitySpec,
    cfg: SolveConfig,
    k: f64,
    duhamel: DuhamelSpec,
    weight: WeightSpec,
    u: SpaceTimeField,
    f: SpaceTimeField,
    v: SpaceTimeField,
    prefix: Vec<Vec<f64>>,
    norm_series: Vec<f64>,
    running_norm: f64,
    max_abs: f64,
    t_hat: Option<f64>,
    crossings: Vec<(f64, Option<f64>)>,
}

impl Marcher {
    pub fn new(spec: &LinearPartSpec, nl: &NonlinearitySpec, cfg: &SolveConfig) -> Result<Self> {
        spec.validate()?;
        cfg.validate()?;
        spec.check_against(&cfg.lattice)?;
        let k = spec.support_radius().max(f64::MIN_POSITIVE);
        cfg.lattice.check_support(k)?;
        let mut q = spec.q;
        q.base_order = cfg.duhamel_order;
        let duhamel = DuhamelSpec::with_quadrature(spec.n, q);
        duhamel.validate()?;
        let weight = WeightSpec::new(k, Exponents::new(spec.n, nl.p)?, cfg.delta)?;
        let mut caps: Vec<f64> = cfg.probe_caps.iter().copied().filter(|&c| c < cfg.blowup_cap).collect();
        caps.push(cfg.blowup_cap);
        Ok(Marcher {
            spec: *spec,
            nl: *nl,
            cfg: cfg.clone(),
            k,
            duhamel,
            weight,
            u: SpaceTimeField::new(cfg.lattice, Some(k)),
            f: SpaceTimeField::new(cfg.lattice, Some(k)),
            v: SpaceTimeField::new(cfg.lattice, Some(k)),
            prefix: Vec::new(),
            norm_series: Vec::new(),
            running_norm: 0.0,
            max_abs: 0.0,
            t_hat: None,
            crossings: caps.into_iter().map(|c| (c, None)).collect(),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        self.u.lattice()
    }

    pub fn blew_up(&self) -> bool {
        self.t_hat.is_some()
    }

    pub fn finished(&self) -> bool {
        self.blew_up() || self.u.n_filled() >= self.lattice().nt()
    }

    pub fn weight_spec(&self) -> &WeightSpec {
        &self.weight
    }

    /// Computes the next slice. Returns `false` once the run has ended.
    pub fn step(&mut self) -> Result<bool> {
        if self.finished() {
            return Ok(false);
        }
        let j = self.u.n_filled();
        let lat = *self.lattice();
        let len = self.u.slice_len(j);
        let v = v_slice(&self.spec, &lat, &self.u, j, self.cfg.epsilon)?;
        let op = DuhamelOperator::with_prefix(&self.duhamel, &self.f, std::mem::take(&mut self.prefix));
        let n = op.slice(j, len).map_err(|e| e.at_slice(j))?;
        self.prefix = op.into_prefix();
        let uj: Vec<f64> = v.iter().zip(&n.values).map(|(a, b)| a + b).collect();
        let peak = uj.iter().fold(0.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY });

        let mut i_peak = 0;
        for (i, x) in uj.iter().enumerate() {
            if !x.is_finite() || x.abs() >= peak {
                i_peak = i;
                break;
            }
        }
        let fj: Vec<f64> = uj.iter().map(|&x| self.nl.eval(x)).collect();
        let f_finite = fj.iter().all(|x| x.is_finite());
        for c in 0..self.crossings.len() {
            let (cap, hit) = self.crossings[c];
            if hit.is_none() && (peak > cap || !f_finite) {
                let t = if j == 0 { 0.0 } else { self.refine_crossing(j, i_peak, cap)? };
                self.crossings[c].1 = Some(t);
            }
        }
        if self.crossings.last().is_some_and(|c| c.1.is_some()) {
            self.t_hat = self.crossings.last().unwrap().1;
            return Ok(false);
        }
        let t = lat.t(j);
        let mut slice_norm = 0.0f64;
        for (i, (&x, &vx)) in uj.iter().zip(&v).enumerate() {
            let r = lat.r(i);
            if r <= t + self.k && x != vx {
                slice_norm = slice_norm.max(weight_w(&self.weight, r, t)? * (x - vx).abs());
            }
        }
        self.running_norm = self.running_norm.max(slice_norm);
        self.norm_series.push(slice_norm);
        self.max_abs = self.max_abs.max(peak);
        self.u.push_slice(uj)?;
        self.v.push_slice(v)?;
        self.f.push_slice(fj)?;
        Ok(true)
    }

    /// `u(r, t)` between slice `j - 1` and `j` from the filled history.
    fn u_between(&self, r: f64, t: f64) -> Result<f64> {
        let op = DuhamelOperator::new(&self.duhamel, &self.f);
        let n = op.point(r, t)?.0;
        let v = if self.cfg.epsilon == 0.0 { 0.0 } else { self.cfg.epsilon * eval_v(&self.spec, r, t)? };
        Ok(v + n)
    }

    /// Bisection for the first time in `(t_{j-1}, t_j]` at which `|u|` exceeds
    /// `cap` near the peak node.
    fn refine_crossing(&self, j: usize, i_peak: usize, cap: f64) -> Result<f64> {
        let lat = self.lattice();
        let (mut lo, mut hi) = (lat.t(j - 1), lat.t(j));
        let len = self.u.slice_len(j);
        let nodes: Vec<f64> = (i_peak.saturating_sub(1)..(i_peak + 2).min(len)).map(|i| lat.r(i)).collect();
        let above = |t: f64| -> Result<bool> {
            for &r in &nodes {
                let x = self.u_between(r, t)?;
                if !x.is_finite() || x.abs() > cap {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        // the history is fixed below t_j, so u is continuous here
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if above(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-6 * lat.dt {
                break;
            }
        }
        Ok(hi)
    }

    pub fn run(&mut self) -> Result<()> {
        while self.step()? {}
        Ok(())
    }

    /// Extends the horizon to `t_max` with the same spacing.
    pub fn extend(&mut self, t_max: f64) -> Result<()> {
        let lat = self.lattice().extended(t_max, Some(self.k));
        self.u.extend_lattice(lat)?;
        self.f.extend_lattice(lat)?;
        self.v.extend_lattice(lat)?;
        self.cfg.lattice = lat;
        Ok(())
    }

    pub fn solution(&self) -> &SpaceTimeField {
        &self.u
    }

    pub fn nonlinear_term(&self) -> &SpaceTimeField {
        &self.f
    }

    /// `εV` on the completed slices.
    pub fn linear_term(&self) -> &SpaceTimeField {
        &self.v
    }

    pub fn result(&self) -> LifespanResult {
        let lat = self.lattice();
        let done = self.u.n_filled();
        LifespanResult {
            epsilon: self.cfg.epsilon,
            t_hat: self.t_hat,
            blew_up: self.t_hat.is_some(),
            max_weighted_norm: self.running_norm,
            slices_completed: done,
            dr: lat.dr,
            dt: lat.dt,
            t_reached: if done == 0 { 0.0 } else { lat.t(done - 1) },
            max_abs_u: self.max_abs,
            cap_crossings: self.crossings.clone(),
            norm_series: self.norm_series.clone(),
        }
    }

    pub fn into_parts(self) -> (SpaceTimeField, LifespanResult) {
        let r = self.result();
        (self.u, r)
    }
}

pub fn march(spec: &LinearPartSpec, nl: &NonlinearitySpec, cfg: &SolveConfig) -> Result<(SpaceTimeField, LifespanResult)> {
    let mut m = Marcher::new(spec, nl, cfg)?;
    m.run()?;
    Ok(m.into_parts())
}

/// The Picard sequence on the whole lattice; returns `u = U + εV` and the
/// number of iterations used.
pub fn picard(spec: &LinearPartSpec, nl: &NonlinearitySpec, cfg: &SolveConfig) -> Result<(SpaceTimeField, usize)> {
    spec.validate()?;
    cfg.validate()?;
    let lat = cfg.lattice;
    let k = spec.support_radius().max(f64::MIN_POSITIVE);
    lat.check_support(k)?;
    let mut q = spec.q;
    q.base_order = cfg.duhamel_order;
    let duhamel = DuhamelSpec::with_quadrature(spec.n, q);
    let weight = WeightSpec::new(k, Exponents::new(spec.n, nl.p)?, cfg.delta)?;
    let u0 = crate::linear_part::sample_v(spec, &lat, cfg.epsilon)?;
    let mut big_u = u0.map(|_| 0.0);
    let mut prev_diff = f64::NAN;
    let mut ratio = f64::NAN;
    for it in 1..=cfg.picard_max_iters {
        let f = big_u.zip_with(&u0, |a, b| nl.eval(a + b))?;
        let op = DuhamelOperator::new(&duhamel, &f);
        let mut next = SpaceTimeField::new(lat, Some(k));
        for j in 0..lat.nt() {
            let s = op.slice(j, next.slice_len(j)).map_err(|e| e.at_slice(j))?;
            if s.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::PicardNotConverged { iterations: it, ratio: f64::INFINITY });
            }
            next.push_slice(s.values)?;
        }
        let diff = weighted_norm(&weight, &next.zip_with(&big_u, |a, b| a - b)?);
        if prev_diff.is_finite() && prev_diff > 0.0 {
            ratio = diff / prev_diff;
        }
        big_u = next;
        if diff < cfg.picard_tol {
            return Ok((big_u.zip_with(&u0, |a, b| a + b)?, it));
        }
        prev_diff = diff;
    }
    Err(Error::PicardNotConverged { iterations: cfg.picard_max_iters, ratio })
}

/// Runs `cfg.mode` and reports the result in the common form.
pub fn solve(spec: &LinearPartSpec, nl: &NonlinearitySpec, cfg: &SolveConfig) -> Result<(SpaceTimeField, LifespanResult)> {
    match cfg.mode {
        SolveMode::March => march(spec, nl, cfg),
        SolveMode::Picard => {
            let (u, _) = picard(spec, nl, cfg)?;
            let mut m = Marcher::new(spec, nl, cfg)?;
            let v = crate::linear_part::sample_v(spec, &cfg.lattice, cfg.epsilon)?;
            let big_u = u.zip_with(&v, |a, b| a - b)?;
            let norm = weighted_norm(m.weight_spec(), &big_u);
            m.run()?;
            let mut r = m.result();
            r.max_weighted_norm = norm;
            Ok((u, r))
        }
    }
}

/// March with the horizon doubled until blow-up or until `cfg.budget`.
pub fn lifespan_run(spec: &LinearPartSpec, nl: &NonlinearitySpec, cfg: &SolveConfig) -> Result<LifespanResult> {
    let mut m = Marcher::new(spec, nl, cfg)?;
    loop {
        m.run()?;
        if m.blew_up() {
            break;
        }
        let t_max = m.lattice().t_max;
        if t_max >= cfg.budget * (1.0 - 1e-12) {
            break;
        }
        m.extend((2.0 * t_max).min(cfg.budget))?;
    }
    Ok(m.result())
}

/// One lifespan run per ε, in parallel; results keep the order of `eps_list`.
pub fn lifespan_sweep(spec: &LinearPartSpec, nl: &NonlinearitySpec, eps_list: &[f64], template: &SolveConfig) -> Result<Vec<LifespanResult>> {
    if eps_list.is_empty() {
        return Err(Error::invalid("eps_list is empty"));
    }
    if eps_list.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::invalid("eps_list must be descending"));
    }
    eps_list
        .par_iter()
        .map(|&eps| {
            let cfg = SolveConfig { epsilon: eps, ..template.clone() };
            lifespan_run(spec, nl, &cfg)
        })
        .collect()
}

/// Largest ε in `[lo, hi]` (to `rel_tol`) for which the run survives to the
/// lattice horizon, by bisection; `lo` must survive.
pub fn bisect_threshold(
    spec: &LinearPartSpec,
    nl: &NonlinearitySpec,
    template: &SolveConfig,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let survives = |eps: f64| -> Result<bool> {
        let cfg = SolveConfig { epsilon: eps, ..template.clone() };
        Ok(!march(spec, nl, &cfg)?.1.blew_up)
    };
    if !survives(lo)? {
        return Err(Error::invalid(format!("lower bracket eps={lo} does not survive")));
    }
    if survives(hi)? {
        return Ok(hi);
    }
    while hi - lo > rel_tol * lo {
        let mid = 0.5 * (lo + hi);
        if survives(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares; `None` for fewer than two distinct abscissae.
pub fn least_squares(pts: &[(f64, f64)]) -> Option<LineFit> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LineFit { slope, intercept: my - slope * mx, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingLaw {
    /// `log T̂` against `log ε`.
    Subcritical,
    /// `log T̂` against `ε^{-p(p-1)}`.
    Critical,
}

impl FromStr for ScalingLaw {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subcritical" => Ok(ScalingLaw::Subcritical),
            "critical" => Ok(ScalingLaw::Critical),
            other => Err(Error::invalid(format!("unknown scaling law '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `-2p(p-1)/ζ` for the subcritical law; the critical law only predicts a positive slope.
    pub predicted_slope: Option<f64>,
    pub points: usize,
}

/// Fits `(ε, T̂)` pairs to the given law; needs at least four finite lifespans.
pub fn fit_points(points: &[(f64, f64)], expo: &Exponents, law: ScalingLaw) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, t)| *e > 0.0 && *t > 0.0 && t.is_finite())
        .map(|&(e, t)| match law {
            ScalingLaw::Subcritical => (e.ln(), t.ln()),
            ScalingLaw::Critical => (e.powf(-expo.critical_rate()), t.ln()),
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::invalid(format!("scaling fit needs at least 4 blow-up points, got {}", pts.len())));
    }
    let fit = least_squares(&pts).ok_or_else(|| Error::invalid("degenerate abscissae in scaling fit"))?;
    let predicted_slope = match law {
        ScalingLaw::Subcritical => Some(-expo.lifespan_rate()),
        ScalingLaw::Critical => None,
    };
    Ok(ScalingFit { slope: fit.slope, intercept: fit.intercept, r2: fit.r2, predicted_slope, points: pts.len() })
}

pub fn fit_scaling(results: &[LifespanResult], expo: &Exponents, law: ScalingLaw) -> Result<ScalingFit> {
    let pts: Vec<(f64, f64)> =
        results.iter().filter(|r| r.blew_up).filter_map(|r| r.t_hat.map(|t| (r.epsilon, t))).collect();
    fit_points(&pts, expo, law)
}
