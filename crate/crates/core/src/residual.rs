//! The differential equation behind the integral equation.
//!
//! A solution of `u = εV + N(F)` solves `u_tt - Δu = F - H` with
//! `u(·,0) = εf`, `u_t(·,0) = εg`, where
//!
//! `H = (n-3)/(n-2) · [∫_0^t M[∂_τF_τ](r, t-τ) dτ + M[F_0](r, t)
//!      + ε (M[Δf](r, t) + (n-2) ∂_t M_g(r, t))]`
//!
//! and `M` is the spherical mean. The term `∂_t M_g` is the surface integral
//! of `ω·∇g`.

use rayon::prelude::*;

use crate::duhamel::{DuhamelOperator, DuhamelSpec};
use crate::error::{Error, Result};
use crate::fields::{ProfileLaplacian, SpaceTimeField};
use crate::linear_part::{mean_rate, LinearPartSpec};
use crate::solver::{least_squares, NonlinearitySpec};
use crate::sphmeans::{omega, spherical_mean, Dimension};

/// `(n-3)/(n-2)`.
pub fn loss_prefactor(n: Dimension) -> f64 {
    let nf = n.as_f64();
    (nf - 3.0) / (nf - 2.0)
}

/// `M[Δf](r, t) + (n-2) ∂_t M_g(r, t)`.
pub fn data_mean(spec: &LinearPartSpec, r: f64, t: f64) -> Result<f64> {
    let mut s = 0.0;
    if !spec.f.is_zero() {
        s += spherical_mean(&ProfileLaplacian { profile: &spec.f, n: spec.n.get() }, r, t, spec.n, &spec.q)?;
    }
    if !spec.g.is_zero() {
        s += (spec.n.as_f64() - 2.0) * mean_rate(&spec.g, r, t, spec)?;
    }
    Ok(s)
}

/// Inputs of `H` on a lattice: `F` with its initial slice, and `∂_t F`.
pub struct LossInputs<'a> {
    pub spec: &'a LinearPartSpec,
    pub f_field: &'a SpaceTimeField,
    pub dt_f: &'a SpaceTimeField,
    pub eps: f64,
}

/// The three parts of `H(r, t)` before the prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub history: f64,
    pub initial: f64,
    pub data: f64,
}

impl LossParts {
    pub fn total(&self, n: Dimension) -> f64 {
        loss_prefactor(n) * (self.history + self.initial + self.data)
    }
}

pub fn assemble_h_parts(inp: &LossInputs<'_>, r: f64, t: f64) -> Result<LossParts> {
    let spec = inp.spec;
    if inp.f_field.lattice() != inp.dt_f.lattice() {
        return Err(Error::invalid("F and its time derivative live on different lattices"));
    }
    let d = DuhamelSpec::with_quadrature(spec.n, spec.q);
    let history = DuhamelOperator::new(&d, inp.dt_f).mean_time_integral(r, t)?;
    let initial = if inp.f_field.n_filled() == 0 {
        return Err(Error::NotFilled { needed: 0, filled: None });
    } else if t == 0.0 {
        inp.f_field.interp_r(0, r)
    } else {
        DuhamelOperator::new(&d, inp.f_field).slice_mean(0, r, t)
    };
    let data = if inp.eps == 0.0 { 0.0 } else { inp.eps * data_mean(spec, r, t)? };
    Ok(LossParts { history, initial, data })
}

pub fn assemble_h(inp: &LossInputs<'_>, r: f64, t: f64) -> Result<f64> {
    if inp.spec.n.get() == 3 {
        return Ok(0.0);
    }
    Ok(assemble_h_parts(inp, r, t)?.total(inp.spec.n))
}

/// `∂_t u` by central differences, second-order one-sided at `t = 0` and at
/// the last slice.
pub fn time_derivative(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    let lat = *u.lattice();
    let m = u.n_filled();
    if m < 3 {
        return Err(Error::NotFilled { needed: 2, filled: u.filled_up_to() });
    }
    let mut out = SpaceTimeField::new(lat, u.support());
    for j in 0..m {
        let len = u.slice(j).len();
        let s = (0..len)
            .map(|i| {
                let g = |jj: usize| u.get(i, jj);
                if j == 0 {
                    (-3.0 * g(0) + 4.0 * g(1) - g(2)) / (2.0 * lat.dt)
                } else if j == m - 1 {
                    (3.0 * g(j) - 4.0 * g(j - 1) + g(j - 2)) / (2.0 * lat.dt)
                } else {
                    (g(j + 1) - g(j - 1)) / (2.0 * lat.dt)
                }
            })
            .collect();
        out.push_slice(s)?;
    }
    Ok(out)
}

/// `∂_t F(u) = F'(u) u_t`.
pub fn chain_rule_dt(nl: &NonlinearitySpec, u: &SpaceTimeField) -> Result<SpaceTimeField> {
    let ut = time_derivative(u)?;
    u.zip_with(&ut, |a, b| nl.derivative(a) * b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientCheck {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
}

impl CoefficientCheck {
    pub fn rel_err(&self) -> f64 {
        ((self.computed - self.expected) / self.expected).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub linf_residual: f64,
    /// Sup-norm of `u_tt - Δu` over the same nodes, for scale.
    pub linf_operator: f64,
    pub nodes: usize,
    pub convergence_order: Option<f64>,
    pub ic_errors: (f64, f64),
    pub coefficient_checks: Vec<CoefficientCheck>,
}

/// Region where the residual is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualWindow {
    /// Measured only for `r ≥ r_min`; at least `3 dr` is always enforced.
    pub r_min: f64,
    /// Nodes with `|t - r| ≤ cone_band` are skipped; at least `2 dr`.
    pub cone_band: f64,
    pub t_min: f64,
    pub r_max: f64,
}

impl Default for ResidualWindow {
    fn default() -> Self {
        ResidualWindow { r_min: 0.0, cone_band: 0.0, t_min: 0.0, r_max: f64::INFINITY }
    }
}

/// `u_tt - u_rr - (n-1)u_r/r` at interior node `(i, j)`.
fn wave_operator(u: &SpaceTimeField, i: usize, j: usize, n: Dimension) -> f64 {
    let lat = u.lattice();
    let (dr, dt) = (lat.dr, lat.dt);
    let r = lat.r(i);
    let utt = (u.get(i, j + 1) - 2.0 * u.get(i, j) + u.get(i, j - 1)) / (dt * dt);
    let urr = (u.get(i + 1, j) - 2.0 * u.get(i, j) + u.get(i - 1, j)) / (dr * dr);
    let ur = (u.get(i + 1, j) - u.get(i - 1, j)) / (2.0 * dr);
    utt - urr - (n.as_f64() - 1.0) * ur / r
}

fn in_window(win: &ResidualWindow, dr: f64, r: f64, t: f64) -> bool {
    r >= win.r_min.max(3.0 * dr) && r <= win.r_max && t >= win.t_min && (t - r).abs() > win.cone_band.max(2.0 * dr)
}

/// `L∞` of `u_tt - Δu - F + H` over the interior nodes of the window.
pub fn pde_residual(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    h: &SpaceTimeField,
    n: Dimension,
    win: &ResidualWindow,
) -> Result<ResidualReport> {
    let lat = *u.lattice();
    if f.lattice() != &lat || h.lattice() != &lat {
        return Err(Error::invalid("u, F and H must share the lattice"));
    }
    let m = u.n_filled().min(f.n_filled()).min(h.n_filled());
    if m < 3 {
        return Err(Error::NotFilled { needed: 2, filled: u.filled_up_to() });
    }
    let (res, op, nodes) = (1..m - 1)
        .into_par_iter()
        .map(|j| {
            let t = lat.t(j);
            let len = u.slice(j).len().min(lat.nr() - 1);
            let mut acc = (0.0f64, 0.0f64, 0usize);
            for i in 1..len {
                let r = lat.r(i);
                if !in_window(win, lat.dr, r, t) {
                    continue;
                }
                let w = wave_operator(u, i, j, n);
                acc.0 = acc.0.max((w - f.get(i, j) + h.get(i, j)).abs());
                acc.1 = acc.1.max(w.abs());
                acc.2 += 1;
            }
            acc
        })
        .reduce(|| (0.0, 0.0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2 + b.2));
    Ok(ResidualReport {
        linf_residual: res,
        linf_operator: op,
        nodes,
        convergence_order: None,
        ic_errors: (0.0, 0.0),
        coefficient_checks: Vec::new(),
    })
}

/// Residual at lattice nodes nearest to the given points, with `F` and `H`
/// supplied pointwise. Each point is moved to the node nearest to it.
pub fn pde_residual_at<FF, HF>(u: &SpaceTimeField, n: Dimension, points: &[(f64, f64)], f: FF, h: HF) -> Result<Vec<f64>>
where
    FF: Fn(usize, usize) -> f64 + Sync,
    HF: Fn(f64, f64) -> Result<f64> + Sync,
{
    let lat = *u.lattice();
    let m = u.n_filled();
    points
        .par_iter()
        .map(|&(r, t)| {
            let i = ((r / lat.dr - 0.5).round().max(1.0)) as usize;
            let j = ((t / lat.dt).round().max(1.0)) as usize;
            if j + 1 >= m || i + 1 >= lat.nr() {
                return Err(Error::NotFilled { needed: j + 1, filled: u.filled_up_to() });
            }
            let w = wave_operator(u, i, j, n);
            Ok((w - f(i, j) + h(lat.r(i), lat.t(j))?).abs())
        })
        .collect()
}

/// Slope of `log residual` against `log dr`; needs three levels.
pub fn convergence_order(levels: &[(f64, f64)]) -> Option<f64> {
    if levels.len() < 3 || levels.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return None;
    }
    let pts: Vec<(f64, f64)> = levels.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    least_squares(&pts).map(|f| f.slope)
}

/// `max |u(·,0) - εf|` and `max |∂_t u(·,0) - εg|` with the one-sided
/// second-order difference.
pub fn check_initial_conditions(u: &SpaceTimeField, spec: &LinearPartSpec, eps: f64) -> Result<(f64, f64)> {
    let lat = *u.lattice();
    if u.n_filled() < 3 {
        return Err(Error::NotFilled { needed: 2, filled: u.filled_up_to() });
    }
    let mut e0 = 0.0f64;
    let mut e1 = 0.0f64;
    for i in 0..u.slice(0).len() {
        let r = lat.r(i);
        e0 = e0.max((u.get(i, 0) - eps * spec.f.eval(r, 0)?).abs());
        let ut = (-3.0 * u.get(i, 0) + 4.0 * u.get(i, 1) - u.get(i, 2)) / (2.0 * lat.dt);
        e1 = e1.max((ut - eps * spec.g.eval(r, 0)?).abs());
    }
    Ok((e0, e1))
}

/// The coefficients of `H` for `n = 4`, `F = u²`, read back from assembled
/// values on probe inputs, against `1/(2π²)`, `ε²/(4π²)`, `ε/(4π²)`.
///
/// The targets belong to the surface-integral form
/// `H = a ∫∫ u_t u dS dτ + b ∫ f² dS + c ∫ (Δf + 2ω·∇g) dS`.
pub fn effective_coefficients(spec: &LinearPartSpec, eps: f64, r: f64, t: f64) -> Result<Vec<CoefficientCheck>> {
    if spec.n.get() != 4 {
        return Err(Error::invalid("the effective coefficients are for n = 4"));
    }
    let n = spec.n;
    let area = omega(4);
    let pi2 = std::f64::consts::PI.powi(2);
    let lat = crate::fields::Lattice::new(0.05, 0.05, r + t + 1.0, t + 0.5)?;
    // u u_t ≡ 1: ∂_t(u²) = 2, history term is 2 t ω_4 in surface form
    let one = SpaceTimeField::from_fn(lat, None, |_, _| 1.0);
    let zero = one.map(|_| 0.0);
    let two = one.map(|_| 2.0);
    let bare = LinearPartSpec::new(crate::fields::RadialProfile::zero(), crate::fields::RadialProfile::zero(), n);
    let h1 = assemble_h(&LossInputs { spec: &bare, f_field: &zero, dt_f: &two, eps: 0.0 }, r, t)?;
    let a = h1 / (area * t);
    // F(·,0) = (εf)² with f ≡ 1
    let f0 = one.map(|_| eps * eps);
    let h2 = assemble_h(&LossInputs { spec: &bare, f_field: &f0, dt_f: &zero, eps: 0.0 }, r, t)?;
    let b = h2 / area;
    // data term: ∫ (Δf + 2ω·∇g) dS = ω_4 · data_mean
    let h3 = assemble_h(&LossInputs { spec, f_field: &zero, dt_f: &zero, eps }, r, t)?;
    let c = h3 / (area * data_mean(spec, r, t)?);
    Ok(vec![
        CoefficientCheck { name: "u_t u history".into(), expected: 1.0 / (2.0 * pi2), computed: a },
        CoefficientCheck { name: "initial f^2".into(), expected: eps * eps / (4.0 * pi2), computed: b },
        CoefficientCheck { name: "data".into(), expected: eps / (4.0 * pi2), computed: c },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_profile, Lattice, ProfileFamily, RadialProfile};

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn smooth_spec(n: u32) -> LinearPartSpec {
        let f = make_profile(ProfileFamily::SmoothBump, 1.0, 0.0, 1.0).unwrap();
        let g = make_profile(ProfileFamily::SmoothBump, 1.0, 0.0, 0.5).unwrap();
        LinearPartSpec::new(f, g, dim(n))
    }

    #[test]
    fn loss_vanishes_in_three_dimensions() {
        let spec = smooth_spec(3);
        let lat = Lattice::new(0.1, 0.1, 4.0, 2.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, None, |r, t| (r * t).sin() + 1.0);
        let inp = LossInputs { spec: &spec, f_field: &f, dt_f: &f, eps: 0.7 };
        assert_eq!(assemble_h(&inp, 0.8, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn loss_vanishes_for_zero_inputs() {
        let spec = LinearPartSpec::new(RadialProfile::zero(), RadialProfile::zero(), dim(4));
        let lat = Lattice::new(0.1, 0.1, 4.0, 2.0).unwrap();
        let z = SpaceTimeField::from_fn(lat, None, |_, _| 0.0);
        let inp = LossInputs { spec: &spec, f_field: &z, dt_f: &z, eps: 0.7 };
        assert_eq!(assemble_h(&inp, 0.8, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn coefficients_in_four_dimensions() {
        for c in effective_coefficients(&smooth_spec(4), 0.3, 0.7, 1.2).unwrap() {
            assert!(c.rel_err() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let lat = Lattice::new(0.1, 0.1, 3.0, 2.0).unwrap();
        let z = SpaceTimeField::from_fn(lat, None, |_, _| 0.0);
        let rep = pde_residual(&z, &z, &z, dim(4), &ResidualWindow::default()).unwrap();
        assert_eq!(rep.linf_residual, 0.0);
        assert!(rep.nodes > 0);
    }

    #[test]
    fn convergence_order_needs_three_levels() {
        assert!(convergence_order(&[(0.1, 1e-2), (0.05, 2.5e-3)]).is_none());
        let o = convergence_order(&[(0.1, 1e-2), (0.05, 2.5e-3), (0.025, 6.25e-4)]).unwrap();
        assert!((o - 2.0).abs() < 1e-12);
    }

    #[test]
    fn initial_conditions_of_zero_solution() {
        let spec = smooth_spec(3);
        let lat = Lattice::new(0.1, 0.1, 3.0, 1.0).unwrap();
        let z = SpaceTimeField::from_fn(lat, None, |_, _| 0.0);
        assert_eq!(check_initial_conditions(&z, &spec, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn time_derivative_of_quadratic_is_exact() {
        let lat = Lattice::new(0.1, 0.1, 2.0, 1.0).unwrap();
        let u = SpaceTimeField::from_fn(lat, None, |r, t| r * t * t + t);
        let ut = time_derivative(&u).unwrap();
        for j in 0..lat.nt() {
            for i in 0..ut.slice(j).len() {
                let exact = 2.0 * lat.r(i) * lat.t(j) + 1.0;
                assert!((ut.get(i, j) - exact).abs() < 1e-11);
            }
        }
    }
}
