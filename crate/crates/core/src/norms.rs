//! Exponents, the three-case weight and the weighted sup norm, the growth
//! factors of the a priori estimates, and a numerical probe of the basic
//! estimate for the operator N.

use rayon::prelude::*;

use crate::duhamel::{DuhamelOperator, DuhamelSpec};
use crate::error::{Error, Result};
use crate::fields::{Lattice, SpaceTimeField};
use crate::sphmeans::Dimension;

/// Relative tolerance for deciding that `p` sits exactly on a critical value.
pub const CRITICAL_TOL: f64 = 1e-9;

/// `ζ(p, n) = 2(1 + (n-1)p - (n-2)p²)`.
pub fn zeta(p: f64, n: Dimension) -> f64 {
    let n = n.as_f64();
    2.0 * (1.0 + (n - 1.0) * p - (n - 2.0) * p * p)
}

/// Positive root of `ζ(·, n)`.
pub fn p1(n: Dimension) -> f64 {
    let n = n.as_f64();
    (n - 1.0 + (n * n + 2.0 * n - 7.0).sqrt()) / (2.0 * (n - 2.0))
}

/// `γ(p, n) = 2 + (n+1)p - (n-1)p²`.
pub fn gamma_strauss(p: f64, n: Dimension) -> f64 {
    let n = n.as_f64();
    2.0 + (n + 1.0) * p - (n - 1.0) * p * p
}

/// Positive root of `γ(·, n)`, `(n + 1 + √(n² + 10n - 7)) / (2(n-1))`.
pub fn p0(n: Dimension) -> f64 {
    let n = n.as_f64();
    (n + 1.0 + (n * n + 10.0 * n - 7.0).sqrt()) / (2.0 * (n - 1.0))
}

pub fn zeta_p1(n: Dimension, p: f64) -> (f64, f64) {
    (zeta(p, n), p1(n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub n: Dimension,
    pub p: f64,
    pub qbar: f64,
    pub zeta: f64,
    pub p1: f64,
    pub p0: f64,
}

/// Where `p` sits relative to `(n-1)/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightCase {
    Above,
    Equal,
    Below,
}

/// Where `p` sits relative to `p1(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

fn compare(p: f64, c: f64) -> std::cmp::Ordering {
    if (p - c).abs() <= CRITICAL_TOL * c {
        std::cmp::Ordering::Equal
    } else if p < c {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

impl Exponents {
    pub fn new(n: Dimension, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!("p must exceed 1, got {p}")));
        }
        let nf = n.as_f64();
        Ok(Exponents { n, p, qbar: (nf - 2.0) * p - (nf - 1.0), zeta: zeta(p, n), p1: p1(n), p0: p0(n) })
    }

    /// `(n-1)/(n-2)`, where `q̄` changes sign.
    pub fn qbar_threshold(&self) -> f64 {
        (self.n.as_f64() - 1.0) / (self.n.as_f64() - 2.0)
    }

    pub fn weight_case(&self) -> WeightCase {
        match compare(self.p, self.qbar_threshold()) {
            std::cmp::Ordering::Greater => WeightCase::Above,
            std::cmp::Ordering::Equal => WeightCase::Equal,
            std::cmp::Ordering::Less => WeightCase::Below,
        }
    }

    pub fn regime(&self) -> Regime {
        match compare(self.p, self.p1) {
            std::cmp::Ordering::Greater => Regime::Supercritical,
            std::cmp::Ordering::Equal => Regime::Critical,
            std::cmp::Ordering::Less => Regime::Subcritical,
        }
    }

    /// `2p(p-1)/ζ`, the rate in `T̂(ε) ~ ε^{-2p(p-1)/ζ}` below `p1`.
    pub fn lifespan_rate(&self) -> f64 {
        2.0 * self.p * (self.p - 1.0) / self.zeta
    }

    /// `p(p-1)`, the rate in `log T̂(ε) ~ ε^{-p(p-1)}` at `p1`.
    pub fn critical_rate(&self) -> f64 {
        self.p * (self.p - 1.0)
    }
}

/// `((t + r + 2k)/k, (t - r + 2k)/k)`.
pub fn tau_pm(k: f64, r: f64, t: f64) -> (f64, f64) {
    ((t + r + 2.0 * k) / k, (t - r + 2.0 * k) / k)
}

/// `log(4 τ₊/τ₋)`.
pub fn log_ratio(tau_plus: f64, tau_minus: f64) -> f64 {
    (4.0 * tau_plus / tau_minus).ln()
}

/// `(2T + 3k)/k`.
pub fn horizon_ratio(k: f64, t: f64) -> f64 {
    (2.0 * t + 3.0 * k) / k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub k: f64,
    pub exponents: Exponents,
    pub delta: f64,
}

/// `min(0.1, (1 + |a2|)/(2 a3 + 1))`.
pub fn default_delta(a2: f64, a3: f64) -> f64 {
    0.1f64.min((1.0 + a2.abs()) / (2.0 * a3 + 1.0))
}

impl WeightSpec {
    pub fn new(k: f64, exponents: Exponents, delta: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("k must be positive, got {k}")));
        }
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        Ok(WeightSpec { k, exponents, delta })
    }

    pub fn weight(&self, r: f64, t: f64) -> Result<f64> {
        weight_w(self, r, t)
    }
}

pub fn weight_w(spec: &WeightSpec, r: f64, t: f64) -> Result<f64> {
    let (tp, tm) = tau_pm(spec.k, r, t);
    if !(tm > 0.0) {
        return Err(Error::invalid(format!("weight needs t - r + 2k > 0 (r={r}, t={t})")));
    }
    let e = &spec.exponents;
    let m = e.n.as_f64() - 2.0;
    Ok(match e.weight_case() {
        WeightCase::Above => tp.powf(m) * tm.powf(e.qbar),
        WeightCase::Equal => tp.powf(m) / log_ratio(tp, tm),
        WeightCase::Below => tp.powf(m + e.qbar),
    })
}

/// `max w(r,t)|U(r,t)|` over filled nodes with `r ≤ t + k`.
pub fn weighted_norm(spec: &WeightSpec, u: &SpaceTimeField) -> f64 {
    let lat = *u.lattice();
    let mut best = 0.0f64;
    for j in 0..u.n_filled() {
        let t = lat.t(j);
        for (i, v) in u.slice(j).iter().enumerate() {
            let r = lat.r(i);
            if r > t + spec.k || *v == 0.0 {
                continue;
            }
            if let Ok(w) = weight_w(spec, r, t) {
                best = best.max(w * v.abs());
            }
        }
    }
    best
}

/// Per-slice maxima of `w|U|`, useful for plateau detection.
pub fn weighted_norm_series(spec: &WeightSpec, u: &SpaceTimeField) -> Vec<f64> {
    let lat = *u.lattice();
    (0..u.n_filled())
        .map(|j| {
            let t = lat.t(j);
            u.slice(j)
                .iter()
                .enumerate()
                .filter(|(i, _)| lat.r(*i) <= t + spec.k)
                .map(|(i, v)| weight_w(spec, lat.r(i), t).map(|w| w * v.abs()).unwrap_or(0.0))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Growth factor `Ē_ν(T)` of the a priori estimate, `0 ≤ ν ≤ p`.
pub fn e_factor(spec: &WeightSpec, t: f64, nu: f64) -> Result<f64> {
    let e = &spec.exponents;
    if !(nu >= 0.0 && nu <= e.p * (1.0 + CRITICAL_TOL)) {
        return Err(Error::invalid(format!("nu must lie in [0, p], got {nu}")));
    }
    let x = horizon_ratio(spec.k, t);
    if compare(nu, e.p) == std::cmp::Ordering::Equal {
        return Ok(match e.regime() {
            Regime::Supercritical => 1.0,
            Regime::Critical => x.ln(),
            Regime::Subcritical => x.powf(e.zeta / 2.0),
        });
    }
    Ok(match e.weight_case() {
        WeightCase::Above => 1.0,
        WeightCase::Equal => x.powf(nu * spec.delta),
        WeightCase::Below => x.powf(-nu * e.qbar),
    })
}

/// Case of the basic estimate selected by `(a2, a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicCase {
    /// `a2 < -1, a3 = 0`: bounded.
    Bounded,
    /// `a2 = -1, a3 = 0`: logarithmic growth.
    Logarithmic,
    /// `a2 ≤ -1, a3 > 0`: growth `X^{δ a3}`.
    LogPower,
    /// `a2 > -1`: growth `X^{1 + a2}`.
    Power,
}

pub fn basic_case(a2: f64, a3: f64) -> BasicCase {
    let on_minus_one = (a2 + 1.0).abs() <= CRITICAL_TOL;
    if a2 > -1.0 && !on_minus_one {
        BasicCase::Power
    } else if a3 > 0.0 {
        BasicCase::LogPower
    } else if on_minus_one {
        BasicCase::Logarithmic
    } else {
        BasicCase::Bounded
    }
}

/// `Ē_{a1,a2,a3}(T)`.
pub fn e_general(spec: &WeightSpec, t: f64, a2: f64, a3: f64) -> f64 {
    let x = horizon_ratio(spec.k, t);
    match basic_case(a2, a3) {
        BasicCase::Bounded => 1.0,
        BasicCase::Logarithmic => x.ln(),
        BasicCase::LogPower => x.powf(spec.delta * a3),
        BasicCase::Power => x.powf(1.0 + a2),
    }
}

/// The argument of N in the basic estimate,
/// `τ₊^{-(n-2)p + a1} τ₋^{a2} (log 4τ₊/τ₋)^{a3}` on `λ ≤ τ + k`.
pub fn probe_field(spec: &WeightSpec, a: [f64; 3], lattice: Lattice) -> SpaceTimeField {
    let e = spec.exponents;
    let k = spec.k;
    let lead = -(e.n.as_f64() - 2.0) * e.p + a[0];
    SpaceTimeField::from_fn(lattice, Some(k), move |r, t| {
        let (tp, tm) = tau_pm(k, r, t);
        let mut v = tp.powf(lead) * tm.powf(a[1]);
        if a[2] != 0.0 {
            v *= log_ratio(tp, tm).powf(a[2]);
        }
        v
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub sup_ratio: f64,
    /// `(r, t)` of the largest ratio.
    pub argmax: (f64, f64),
    pub samples: usize,
    pub case: BasicCase,
}

/// Sample grid for the probe: about `n_t` times in `(0, T]` and `n_r` radii
/// in `[0, t + k]` per time, always including `t = T`.
pub fn probe_nodes(grid: &Lattice, t_end: f64, k: f64, n_t: usize, n_r: usize) -> Vec<(f64, f64)> {
    let j_end = ((t_end / grid.dt) + 1e-9).floor() as usize;
    let stride_t = (j_end / n_t.max(1)).max(1);
    let mut js: Vec<usize> = (1..=j_end).rev().step_by(stride_t).collect();
    js.sort_unstable();
    let mut nodes = Vec::new();
    for j in js {
        let t = grid.t(j);
        let i_end = (((t + k) / grid.dr) - 0.5).floor().max(0.0) as usize;
        let stride_r = (i_end / n_r.max(1)).max(1);
        for i in (0..=i_end).step_by(stride_r) {
            nodes.push((grid.r(i), t));
        }
        if i_end % stride_r != 0 {
            nodes.push((grid.r(i_end), t));
        }
    }
    nodes
}

/// `sup N(probe) w / (k² X^{a1} Ē_{a1,a2,a3}(T))` over the sample nodes,
/// `X = (2T+3k)/k`.
pub fn basic_estimate_probe(spec: &WeightSpec, a: [f64; 3], t_end: f64, grid: &Lattice) -> Result<ProbeReport> {
    if a[0] < 0.0 || a[2] < 0.0 {
        return Err(Error::invalid("basic estimate needs a1 >= 0 and a3 >= 0"));
    }
    if grid.t_max + 1e-9 < t_end {
        return Err(Error::invalid(format!("grid reaches t={} but T={t_end}", grid.t_max)));
    }
    grid.check_support(spec.k)?;
    let field = probe_field(spec, a, *grid);
    probe_with_field(spec, a, t_end, &field, 12, 24)
}

pub fn probe_with_field(
    spec: &WeightSpec,
    a: [f64; 3],
    t_end: f64,
    field: &SpaceTimeField,
    n_t: usize,
    n_r: usize,
) -> Result<ProbeReport> {
    let n_spec = DuhamelSpec::new(spec.exponents.n);
    let op = DuhamelOperator::new(&n_spec, field);
    let nodes = probe_nodes(field.lattice(), t_end, spec.k, n_t, n_r);
    let denom = spec.k * spec.k * horizon_ratio(spec.k, t_end).powf(a[0]) * e_general(spec, t_end, a[1], a[2]);
    let ratios: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, t)| {
            let (v, _) = op.point(r, t)?;
            Ok(v * weight_w(spec, r, t)? / denom)
        })
        .collect::<Result<_>>()?;
    let (idx, sup) = ratios
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    Ok(ProbeReport {
        sup_ratio: sup,
        argmax: nodes.get(idx).copied().unwrap_or((0.0, 0.0)),
        samples: nodes.len(),
        case: basic_case(a[1], a[2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn zeta_and_p1_examples() {
        let (z, r) = zeta_p1(dim(3), 2.0);
        assert!((z - 2.0).abs() < 1e-14);
        assert!((r - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        let (z, r) = zeta_p1(dim(4), 2.0);
        assert!((z + 2.0).abs() < 1e-14);
        assert!((r - (3.0 + 17f64.sqrt()) / 4.0).abs() < 1e-14);
        assert!((r - 1.780_776_406_404_415).abs() < 1e-12);
        for n in 3..=8 {
            assert!(zeta(p1(dim(n)), dim(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn strauss_root_and_ordering() {
        for n in 3..=8 {
            let d = dim(n);
            assert!(gamma_strauss(p0(d), d).abs() < 1e-12, "n={n}");
            if n > 3 {
                assert!(p1(d) < p0(d), "n={n}");
            }
        }
        assert!((p1(dim(3)) - p0(dim(3))).abs() < 1e-12);
    }

    #[test]
    fn qbar_and_sign_of_zeta() {
        let e = Exponents::new(dim(4), 1.5).unwrap();
        assert_eq!(e.qbar, 0.0);
        assert_eq!(e.weight_case(), WeightCase::Equal);
        assert!((e.zeta - 2.0).abs() < 1e-14);
        assert!((e.lifespan_rate() - 0.75).abs() < 1e-14);
        let e = Exponents::new(dim(3), 2.0).unwrap();
        assert!((e.lifespan_rate() - 2.0).abs() < 1e-14);
        assert!(Exponents::new(dim(3), 1.0).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_pm(0.7, 0.0, 0.0), (2.0, 2.0));
        assert_eq!(tau_pm(1.0, 3.0, 5.0), (10.0, 4.0));
        assert_eq!(tau_pm(1.0, 7.0, 5.0).1, 0.0);
    }

    #[test]
    fn weight_examples() {
        let e = Exponents::new(dim(4), 2.0).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        assert!((weight_w(&s, 0.0, 0.0).unwrap() - 4.0 * 2.0).abs() < 1e-14);
        let e = Exponents::new(dim(4), 1.5).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        assert!((weight_w(&s, 0.0, 0.0).unwrap() - 4.0 / 4f64.ln()).abs() < 1e-14);
        let e = Exponents::new(dim(4), 1.25).unwrap();
        let s = WeightSpec::new(2.0, e, 0.1).unwrap();
        assert!((weight_w(&s, 0.0, 0.0).unwrap() - 2f64.powf(2.0 - 0.5)).abs() < 1e-14);
        assert!(weight_w(&s, 7.0, 3.0).is_err());
    }

    #[test]
    fn norm_of_reciprocal_weight_is_one() {
        let e = Exponents::new(dim(4), 2.0).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        let lat = Lattice::for_support(0.25, 0.25, 4.0, 1.0).unwrap();
        let u = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| if r <= t + 1.0 { 1.0 / weight_w(&s, r, t).unwrap() } else { 0.0 });
        assert!((weighted_norm(&s, &u) - 1.0).abs() < 1e-14);
        let twice = u.map(|v| 2.0 * v);
        assert!((weighted_norm(&s, &twice) - 2.0).abs() < 1e-14);
        assert_eq!(weighted_norm(&s, &u.map(|_| 0.0)), 0.0);
    }

    #[test]
    fn e_factor_cases() {
        let e = Exponents::new(dim(4), 2.0).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        assert_eq!(e_factor(&s, 50.0, 2.0).unwrap(), 1.0);
        assert_eq!(e_factor(&s, 50.0, 0.0).unwrap(), 1.0);
        let e = Exponents::new(dim(4), p1(dim(4))).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        let t = (std::f64::consts::E - 3.0) / 2.0;
        assert!((e_factor(&s, t, e.p).unwrap() - 1.0).abs() < 1e-14);
        let e = Exponents::new(dim(3), 2.0).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        assert!((e_factor(&s, 1.0, 2.0).unwrap() - 5f64).abs() < 1e-12);
        for nu in [0.0, 0.5, 1.0] {
            let e = Exponents::new(dim(4), 1.25).unwrap();
            let s = WeightSpec::new(1.0, e, 0.1).unwrap();
            let x = horizon_ratio(1.0, 10.0);
            assert!((e_factor(&s, 10.0, nu).unwrap() - x.powf(nu * 0.5)).abs() < 1e-12);
        }
        assert!(e_factor(&s, 1.0, 2.5).is_err());
    }

    #[test]
    fn basic_cases_and_default_delta() {
        assert_eq!(basic_case(-2.0, 0.0), BasicCase::Bounded);
        assert_eq!(basic_case(-1.0, 0.0), BasicCase::Logarithmic);
        assert_eq!(basic_case(-2.0, 1.0), BasicCase::LogPower);
        assert_eq!(basic_case(-1.0, 1.0), BasicCase::LogPower);
        assert_eq!(basic_case(-0.5, 0.0), BasicCase::Power);
        assert!((default_delta(-2.0, 1.0) - 0.1).abs() < 1e-15);
        assert!((default_delta(-0.5, 10.0) - 1.5 / 21.0).abs() < 1e-15);
        // the constraint 1 + a2 - δ a3 > 0 holds where it is used (a2 > -1)
        for &(a2, a3) in &[(-0.5, 0.0), (-0.5, 3.0), (0.0, 10.0)] {
            assert!(1.0 + a2 - default_delta(a2, a3) * a3 > 0.0);
        }
    }

    #[test]
    fn degenerate_probe_is_zero() {
        let e = Exponents::new(dim(4), 2.0).unwrap();
        let s = WeightSpec::new(1.0, e, 0.1).unwrap();
        let lat = Lattice::for_support(0.5, 0.5, 5.0, 1.0).unwrap();
        let zero = SpaceTimeField::from_fn(lat, Some(1.0), |_, _| 0.0);
        let rep = probe_with_field(&s, [0.0, -2.0, 0.0], 5.0, &zero, 4, 4).unwrap();
        assert_eq!(rep.sup_ratio, 0.0);
    }

    proptest::proptest! {
        #[test]
        fn log_bound(x in 1.0f64..1e8, delta in 1e-3f64..2.0) {
            proptest::prop_assert!(x.ln() <= x.powf(delta) / delta);
        }

        #[test]
        fn zeta_sign_tracks_p1(p in 1.0001f64..4.0, n in 3u32..9) {
            let d = dim(n);
            let z = zeta(p, d);
            let r = p1(d);
            if (p - r).abs() > 1e-9 {
                proptest::prop_assert_eq!(z > 0.0, p < r);
            }
        }
    }
}
