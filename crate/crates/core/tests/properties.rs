use proptest::prelude::*;

use wavelab::comparison::{march_w, march_w_subcritical, ComparisonConstants, XiGrid};
use wavelab::duhamel::{apply_n_point, DuhamelSpec};
use wavelab::fields::{make_profile, Lattice, ProfileFamily, RadialProfile, SpaceTimeField};
use wavelab::linear_part::{eval_v_unclipped, LinearPartSpec};
use wavelab::norms::Exponents;
use wavelab::residual::{assemble_h, LossInputs};
use wavelab::solver::{march, NonlinearitySpec, SolveConfig};
use wavelab::sphmeans::{eval_h, spherical_mean, Constant, Dimension, QuadratureSpec};

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn family() -> impl Strategy<Value = ProfileFamily> {
    prop_oneof![Just(ProfileFamily::SmoothBump), Just(ProfileFamily::AnnularBump)]
}

fn profile(fam: ProfileFamily, k: f64, amp: f64) -> RadialProfile {
    let k0 = if fam == ProfileFamily::AnnularBump { 0.5 * k } else { 0.0 };
    make_profile(fam, k, k0, amp).unwrap()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn mean_of_one_is_one(n in 3u32..=6, lr in -2.0f64..2.0, lrho in -2.0f64..2.0) {
        let m = spherical_mean(&Constant(1.0), 10f64.powf(lr), 10f64.powf(lrho), dim(n), &QuadratureSpec::default()).unwrap();
        prop_assert!((m - 1.0).abs() <= 1e-8, "mean {m}");
    }

    #[test]
    fn kernel_is_symmetric(n in 3u32..=8, r in 0.01f64..10.0, rho in 0.01f64..10.0, s in 0.0f64..1.0) {
        let lam = (r - rho).abs() + s * (r + rho - (r - rho).abs());
        let a = eval_h(lam, rho, r, dim(n)).unwrap();
        let b = eval_h(lam, r, rho, dim(n)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn kernel_endpoints(n in 3u32..=8, r in 0.01f64..10.0, rho in 0.01f64..10.0) {
        let lo = eval_h((r - rho).abs(), rho, r, dim(n)).unwrap();
        let hi = eval_h(r + rho, rho, r, dim(n)).unwrap();
        if n == 3 {
            prop_assert_eq!((lo, hi), (1.0, 1.0));
        } else {
            prop_assert!(lo.abs() <= 1e-9 * (r + rho).powi(2 * (n as i32 - 3)));
            prop_assert!(hi.abs() <= 1e-9 * (r + rho).powi(2 * (n as i32 - 3)));
        }
    }

    #[test]
    fn profiles_vanish_outside_support(fam in family(), k in 0.2f64..3.0, amp in -5.0f64..5.0, s in 1.0f64..4.0) {
        let p = profile(fam, k, amp);
        for d in 0..=4 {
            prop_assert_eq!(p.eval(s * k, d).unwrap(), 0.0);
        }
    }

    #[test]
    fn profile_derivatives_match_differences(fam in family(), k in 0.5f64..2.0, s in 0.05f64..0.95) {
        let p = profile(fam, k, 1.0);
        let r = s * k;
        let h = 1e-4 * k;
        for d in 0..4 {
            let fd = (p.eval(r + h, d).unwrap() - p.eval(r - h, d).unwrap()) / (2.0 * h);
            let an = p.eval(r, d + 1).unwrap();
            let scale = (0..=4).map(|e| p.eval(r, e).unwrap().abs()).fold(1.0, f64::max);
            prop_assert!((fd - an).abs() <= 1e-5 * scale, "d={d}: {fd} vs {an}");
        }
    }

    #[test]
    fn log_bound(lx in 0.0f64..50.0, delta in 0.01f64..2.0) {
        let x = lx.exp();
        prop_assert!(x.ln() <= x.powf(delta) / delta * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn linear_part_obeys_huygens(n in 3u32..=5, fam in family(), r in 0.1f64..20.0, gap in 0.05f64..10.0, above in any::<bool>()) {
        let spec = LinearPartSpec::new(profile(fam, 1.0, 1.0), profile(ProfileFamily::SmoothBump, 1.0, 0.7), dim(n));
        let d = 1.0 * (1.0 + 2.0 * 0.1) + gap;
        let t = if above { r + d } else { r - d };
        prop_assume!(t > 0.0);
        let v = eval_v_unclipped(&spec, r, t).unwrap();
        prop_assert!(v.abs() <= 10.0 * spec.q.abs_tol, "V({r},{t}) = {v}");
    }

    #[test]
    fn duhamel_is_linear_and_positive(n in 3u32..=5, a in -3.0f64..3.0, b in -3.0f64..3.0, r in 0.05f64..3.0, t in 0.3f64..2.0) {
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| (1.0 + t) * (1.0 - r * r).max(0.0));
        let g = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| (-(r - t).powi(2)).exp());
        let combo = f.zip_with(&g, |x, y| a * x + b * y).unwrap();
        let spec = DuhamelSpec::new(dim(n));
        let (nf, ng, nc) = (
            apply_n_point(&spec, &f, r, t).unwrap(),
            apply_n_point(&spec, &g, r, t).unwrap(),
            apply_n_point(&spec, &combo, r, t).unwrap(),
        );
        prop_assert!(nf >= 0.0 && ng >= 0.0);
        prop_assert!((nc - (a * nf + b * ng)).abs() <= 1e-12 * (nf.abs() + ng.abs()).max(1.0) * (a.abs() + b.abs()).max(1.0));
    }

    #[test]
    fn duhamel_ignores_the_top_slice(n in 3u32..=5, j in 3usize..20, r in 0.05f64..3.0, bump in -10.0f64..10.0) {
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| (1.0 + t) * (-r * r).exp());
        let t = lat.t(j);
        let g = SpaceTimeField::from_fn(lat, Some(1.0), |r, s| if (s - t).abs() < 1e-9 { bump } else { (1.0 + s) * (-r * r).exp() });
        let spec = DuhamelSpec::new(dim(n));
        prop_assert_eq!(apply_n_point(&spec, &f, r, t).unwrap(), apply_n_point(&spec, &g, r, t).unwrap());
    }

    #[test]
    fn duhamel_respects_support(n in 3u32..=5, t in 0.2f64..2.0, gap in 1e-3f64..2.0) {
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |_, _| 1.0);
        let v = apply_n_point(&DuhamelSpec::new(dim(n)), &f, t + 1.0 + gap, t).unwrap();
        prop_assert_eq!(v, 0.0);
    }

    #[test]
    fn loss_term_vanishes_in_three_dimensions(c in -2.0f64..2.0, eps in 0.0f64..2.0, r in 0.05f64..3.0, t in 0.1f64..2.0) {
        let spec = LinearPartSpec::new(profile(ProfileFamily::SmoothBump, 1.0, 1.0), profile(ProfileFamily::AnnularBump, 1.0, 1.0), dim(3));
        let lat = Lattice::for_support(0.1, 0.1, 2.0, 1.0).unwrap();
        let f = SpaceTimeField::from_fn(lat, Some(1.0), |r, t| c * (1.0 + t * r));
        let inp = LossInputs { spec: &spec, f_field: &f, dt_f: &f, eps };
        prop_assert_eq!(assemble_h(&inp, r, t).unwrap(), 0.0);
    }

    #[test]
    fn comparison_w_is_bounded_below_and_monotone(n in 3u32..=4, pf in 0.05f64..0.95, eps in 0.1f64..50.0) {
        let d = dim(n);
        let p = 1.0 + pf * (wavelab::norms::p1(d) - 1.0);
        let expo = Exponents::new(d, p).unwrap();
        let consts = ComparisonConstants::new(&expo, 1.0, 0.5, 0.2).unwrap();
        let grid = XiGrid::log(2.0, 40, 30.0);
        let floor = consts.data_term(eps);
        let a = march_w_subcritical(&consts, &expo, eps, &grid, 1e6).unwrap();
        prop_assert!((a.w[0] - floor).abs() <= 1e-14 * floor);
        prop_assert!(a.w.iter().all(|&w| w >= floor));
        prop_assert!(a.w.windows(2).all(|w| w[1] >= w[0]));
        let g0 = march_w(&consts, &expo, eps, &grid, 1e6).unwrap();
        let g1 = march_w(&consts, &expo, 1.5 * eps, &grid, 1e6).unwrap();
        prop_assert!(g0.w.iter().zip(&g1.w).all(|(x, y)| y >= x));
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn marching_is_deterministic_and_supported(eps in 0.05f64..1.5, amp in 1.0f64..7.0) {
        let spec = LinearPartSpec::new(RadialProfile::zero(), profile(ProfileFamily::AnnularBump, 1.0, amp), dim(3));
        let nl = NonlinearitySpec::abs_power(2.0);
        let cfg = SolveConfig::new(eps, Lattice::for_support(0.25, 0.25, 8.0, 1.0).unwrap());
        let (u1, r1) = march(&spec, &nl, &cfg).unwrap();
        let (u2, r2) = march(&spec, &nl, &cfg).unwrap();
        prop_assert_eq!(&r1, &r2);
        prop_assert_eq!(u1.slices(), u2.slices());
        let lat = *u1.lattice();
        for j in 0..u1.n_filled() {
            for (i, &v) in u1.slice(j).iter().enumerate() {
                if lat.r(i) > lat.t(j) + 1.0 {
                    prop_assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn lifespan_is_nonincreasing_in_eps(e in 0.5f64..2.0, f in 1.1f64..2.0) {
        let spec = LinearPartSpec::new(RadialProfile::zero(), profile(ProfileFamily::AnnularBump, 1.0, 7.0), dim(3));
        let nl = NonlinearitySpec::abs_power(2.0);
        let cfg = |eps| SolveConfig::new(eps, Lattice::for_support(0.25, 0.25, 40.0, 1.0).unwrap());
        let (_, small) = march(&spec, &nl, &cfg(e)).unwrap();
        let (_, large) = march(&spec, &nl, &cfg(f * e)).unwrap();
        let t = |r: &wavelab::solver::LifespanResult| r.t_hat.unwrap_or(f64::INFINITY);
        prop_assert!(t(&large) <= t(&small), "T({}) = {} > T({}) = {}", f * e, t(&large), e, t(&small));
    }
}
