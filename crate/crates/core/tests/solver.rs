use wavelab::error::Error;
use wavelab::fields::{make_profile, Lattice, ProfileFamily, RadialProfile};
use wavelab::linear_part::LinearPartSpec;
use wavelab::norms::{weighted_norm, Exponents, WeightSpec};
use wavelab::solver::{fit_scaling, lifespan_sweep, march, picard, NonlinearitySpec, ScalingLaw, SolveConfig, SolveMode};
use wavelab::sphmeans::Dimension;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn blowup_data(n: u32, amp: f64) -> LinearPartSpec {
    LinearPartSpec::new(RadialProfile::zero(), make_profile(ProfileFamily::AnnularBump, 1.0, 0.5, amp).unwrap(), dim(n))
}

#[test]
fn picard_agrees_with_march_below_the_lifespan() {
    let spec = blowup_data(3, 1.0);
    let nl = NonlinearitySpec::abs_power(2.0);
    let mut cfg = SolveConfig::new(0.2, Lattice::for_support(0.25, 0.25, 5.0, 1.0).unwrap());
    cfg.mode = SolveMode::Picard;
    let (up, iters) = picard(&spec, &nl, &cfg).unwrap();
    let (um, res) = march(&spec, &nl, &cfg).unwrap();
    assert!(!res.blew_up);
    assert!(iters > 1 && iters < cfg.picard_max_iters, "{iters} iterations");
    let w = WeightSpec::new(1.0, Exponents::new(dim(3), 2.0).unwrap(), cfg.delta).unwrap();
    let diff = up.zip_with(&um, |a, b| a - b).unwrap();
    let d = weighted_norm(&w, &diff);
    assert!(d <= 10.0 * cfg.picard_tol, "weighted difference {d:e}");
}

#[test]
fn picard_reports_divergence_for_large_data() {
    let spec = blowup_data(3, 7.0);
    let nl = NonlinearitySpec::abs_power(2.0);
    let mut cfg = SolveConfig::new(2.0, Lattice::for_support(0.25, 0.25, 20.0, 1.0).unwrap());
    cfg.mode = SolveMode::Picard;
    match picard(&spec, &nl, &cfg) {
        Err(Error::PicardNotConverged { iterations, ratio }) => assert!(iterations >= 1 && ratio > 1.0, "ratio {ratio}"),
        other => panic!("expected non-convergence, got {:?}", other.map(|r| r.1)),
    }
}

#[test]
fn duplicate_eps_entries_give_identical_results() {
    let spec = blowup_data(3, 7.0);
    let nl = NonlinearitySpec::abs_power(2.0);
    let tpl = SolveConfig::new(1.0, Lattice::for_support(0.25, 0.25, 10.0, 1.0).unwrap());
    let res = lifespan_sweep(&spec, &nl, &[0.8, 0.8, 0.6], &tpl).unwrap();
    assert_eq!(res[0], res[1]);
    assert!(res[0].blew_up && res[2].blew_up);
    assert!(res[2].t_hat.unwrap() >= res[0].t_hat.unwrap());
}

#[test]
fn halving_eps_quadruples_the_lifespan_in_three_dimensions() {
    let spec = blowup_data(3, 7.0);
    let nl = NonlinearitySpec::abs_power(2.0);
    let tpl = SolveConfig::new(1.0, Lattice::for_support(0.2, 0.2, 20.0, 1.0).unwrap());
    let res = lifespan_sweep(&spec, &nl, &[0.8, 0.4], &tpl).unwrap();
    let ratio = res[1].t_hat.unwrap() / res[0].t_hat.unwrap();
    assert!((ratio / 4.0 - 1.0).abs() <= 0.3, "ratio {ratio}");
}

#[test]
fn supercritical_small_data_survive_the_budget() {
    let spec = LinearPartSpec::new(RadialProfile::zero(), make_profile(ProfileFamily::SmoothBump, 1.0, 0.0, 1.0).unwrap(), dim(4));
    let nl = NonlinearitySpec::abs_power(2.0);
    let mut tpl = SolveConfig::new(1.0, Lattice::for_support(0.5, 0.5, 16.0, 1.0).unwrap());
    tpl.budget = 64.0;
    let res = lifespan_sweep(&spec, &nl, &[20.0, 5.0], &tpl).unwrap();
    for r in &res {
        assert!(!r.blew_up && r.t_hat.is_none(), "eps {} blew up at {:?}", r.epsilon, r.t_hat);
        assert!(r.t_reached >= 64.0 - 1e-9);
    }
}

#[test]
fn square_form_matches_abs_power_for_positive_solutions() {
    let spec = blowup_data(3, 1.0);
    let cfg = SolveConfig::new(0.3, Lattice::for_support(0.25, 0.25, 4.0, 1.0).unwrap());
    let (a, _) = march(&spec, &NonlinearitySpec::abs_power(2.0), &cfg).unwrap();
    let sq = NonlinearitySpec::new(2.0, wavelab::solver::NonlinearForm::Square, 1.0).unwrap();
    let (b, _) = march(&spec, &sq, &cfg).unwrap();
    assert_eq!(a.slices(), b.slices());
}

#[test]
fn four_dimensional_subcritical_sweep_slope() {
    let spec = blowup_data(4, 7.0);
    let nl = NonlinearitySpec::abs_power(1.5);
    let expo = Exponents::new(dim(4), 1.5).unwrap();
    let tpl = SolveConfig::new(1.0, Lattice::for_support(0.25, 0.25, 20.0, 1.0).unwrap());
    let res = lifespan_sweep(&spec, &nl, &[1.41, 1.0, 0.71, 0.5, 0.35], &tpl).unwrap();
    let fit = fit_scaling(&res, &expo, ScalingLaw::Subcritical).unwrap();
    assert!((fit.slope + 0.75).abs() <= 0.15 && fit.r2 >= 0.95, "slope {} r2 {}", fit.slope, fit.r2);
}
