use wavelab::comparison::{frame_check, frame_rhs, march_w_critical, march_w_subcritical, ComparisonConstants, Frame, XiGrid};
use wavelab::fields::{make_profile, Lattice, ProfileFamily, RadialProfile, SpaceTimeField};
use wavelab::linear_part::{fit_lower_bound, LinearPartSpec};
use wavelab::norms::{p1, Exponents};
use wavelab::solver::{march, NonlinearitySpec, SolveConfig};
use wavelab::sphmeans::Dimension;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn blowup_data(n: u32, amp: f64) -> LinearPartSpec {
    LinearPartSpec::new(RadialProfile::zero(), make_profile(ProfileFamily::AnnularBump, 1.0, 0.5, amp).unwrap(), dim(n))
}

#[test]
fn lower_bound_constant_is_stable() {
    for n in [3u32, 4, 5] {
        let spec = blowup_data(n, 1.0);
        let fit = fit_lower_bound(&spec, 0.5, 5.0, 10, 16).unwrap();
        assert!(fit.c_ngk > 0.0);
        for other in [fit_lower_bound(&spec, 0.5, 2.5, 10, 16).unwrap(), fit_lower_bound(&spec, 0.5, 5.0, 20, 32).unwrap()] {
            assert!((other.c_ngk / fit.c_ngk - 1.0).abs() <= 0.2, "n={n}: {} against {}", other.c_ngk, fit.c_ngk);
        }
        let per: Vec<f64> = fit.per_time.iter().map(|x| x.1).collect();
        if n == 3 {
            assert!(per.iter().all(|c| (c / fit.c_ngk - 1.0).abs() <= 1e-12));
        } else {
            // approaches its large-time value from above, so the last time binds
            assert!(per.windows(2).all(|w| w[1] <= w[0]), "n={n}: {per:?}");
        }
    }
}

#[test]
fn doubling_eps_shortens_the_subcritical_lifespan() {
    let expo = Exponents::new(dim(3), 2.0).unwrap();
    let (c, _) = ComparisonConstants::from_data(&blowup_data(3, 1.0), &expo).unwrap();
    let grid = XiGrid::log(2.0, 100, 60.0);
    let e = c.eps_scale(&expo, Frame::Subcritical, 1e4);
    let a = march_w_subcritical(&c, &expo, e, &grid, 1e6).unwrap().ln_xi_star.unwrap();
    let b = march_w_subcritical(&c, &expo, 2.0 * e, &grid, 1e6).unwrap().ln_xi_star.unwrap();
    assert!(b < a, "ln xi* {b} at 2eps, {a} at eps");
}

#[test]
fn critical_lifespan_is_grid_converged() {
    let expo = Exponents::new(dim(4), p1(dim(4))).unwrap();
    let (c, _) = ComparisonConstants::from_data(&blowup_data(4, 1.0), &expo).unwrap();
    for target in [1e6, 1e20] {
        let e = c.eps_scale(&expo, Frame::Critical, target);
        let fine = march_w_critical(&c, &expo, e, &XiGrid::log(2.0, 100, 400.0), 1e6).unwrap().xi_star().unwrap();
        let coarse = march_w_critical(&c, &expo, e, &XiGrid::log(2.0, 50, 400.0), 1e6).unwrap().xi_star().unwrap();
        let rel = (coarse.ln() - fine.ln()).abs() / fine.ln();
        assert!(rel < 0.1, "target {target:e}: ln xi* {} vs {}", fine.ln(), coarse.ln());
    }
}

#[test]
fn reconstructed_w_at_the_left_endpoint() {
    for (n, p) in [(3u32, 2.0), (4, 1.5), (5, 1.3)] {
        let expo = Exponents::new(dim(n), p).unwrap();
        let c = ComparisonConstants::new(&expo, 1.0, 0.5, 0.3).unwrap();
        let m = march_w_subcritical(&c, &expo, 3.0, &XiGrid::log(2.0, 50, 5.0), 1e6).unwrap();
        let want = 2f64.powf(-expo.qbar - (n as f64 - 2.0)) * c.data_term(3.0);
        assert!((m.small_w(0, &expo) / want - 1.0).abs() < 1e-13);
    }
}

#[test]
fn frame_rhs_without_history_is_the_data_term() {
    let expo = Exponents::new(dim(3), 2.0).unwrap();
    let c = ComparisonConstants::new(&expo, 1.0, 0.5, 0.3).unwrap();
    let lat = Lattice::for_support(0.1, 0.1, 10.0, 1.0).unwrap();
    let u = SpaceTimeField::from_fn(lat, Some(1.0), |_, _| 0.0);
    // d = t - r = 2k leaves an empty rectangle
    let (r, t) = (3.0, 5.0);
    let rhs = frame_rhs(&u, &c, &expo, 0.7, r, t).unwrap();
    let d: f64 = t - r;
    let data = c.e1 * d.powf((3.0 * 3.0 - 5.0) / 2.0 - 2.0) * r.powf(-(3.0 * 3.0 - 7.0) / 2.0) * 0.7f64.powi(2);
    assert!((rhs / data - 1.0).abs() < 1e-12, "{rhs} vs {data}");
}

#[test]
fn frame_audit_on_a_blow_up_run() {
    let spec = blowup_data(3, 7.0);
    let expo = Exponents::new(dim(3), 2.0).unwrap();
    let (c, _) = ComparisonConstants::from_data(&spec, &expo).unwrap();
    let eps = 0.45;
    let cfg = SolveConfig::new(eps, Lattice::for_support(0.1, 0.1, 60.0, 1.0).unwrap());
    let (u, res) = march(&spec, &NonlinearitySpec::abs_power(2.0), &cfg).unwrap();
    assert!(res.blew_up);
    let rep = frame_check(&u, &c, &expo, eps, 200, 7).unwrap();
    assert_eq!(rep.samples, 200);
    assert!(rep.violations.is_empty(), "{:?}", &rep.violations[..rep.violations.len().min(3)]);
    assert!(rep.w_samples > 0 && rep.w_violations.is_empty(), "{:?}", &rep.w_violations[..rep.w_violations.len().min(3)]);
}
