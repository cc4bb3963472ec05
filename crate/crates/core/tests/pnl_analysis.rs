use uncertain_pricing::bs::{self, BsInputs};
use uncertain_pricing::error_calculus::{quantile_multiplier, QuoteMethod, UncertainParamSet};
use uncertain_pricing::normal;
use uncertain_pricing::pnl::*;
use uncertain_pricing::sde::{McConfig, TimeGrid};

const X0: f64 = 100.0;
const K: f64 = 100.0;
const T: f64 = 1.0;
const VOL: f64 = 0.2;

fn flat(bias: f64, var: f64) -> LocalVolSpec {
    LocalVolSpec::constant(X0, T, VOL, bias, var).unwrap()
}

fn call() -> Payoff {
    Payoff::Call { strike: K }
}

fn cfg(paths: usize, seed: u64) -> PnlConfig {
    PnlConfig {
        mc: McConfig {
            steps: 128,
            paths,
            seed,
        },
        ..Default::default()
    }
}

fn within(value: f64, oracle: f64, se: f64, rel: f64) -> bool {
    (value - oracle).abs() <= (3.0 * se).max(rel * oracle.abs())
}

/// `∂Δ/∂σ` of a Black–Scholes call.
fn bs_vanna(x: f64, k: f64, tau: f64, v: f64) -> f64 {
    let s = v * tau.sqrt();
    let d1 = ((x / k).ln() + 0.5 * s * s) / s;
    -normal::pdf(d1) * (d1 - s) / v
}

/// `∫₀ᵀ E[σ² X_s² vanna(s, X_s)²] ds` under Black–Scholes, by nested Simpson
/// rules; the outer variable is `u` with `T - s = T u²` to tame the spike at
/// expiry.
fn bs_vanna_integral(x0: f64, k: f64, t: f64, v: f64) -> f64 {
    let simpson = |n: usize, i: usize| {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let (nu, nz) = (2000usize, 4000usize);
    let mut acc = 0.0;
    for iu in 1..=nu {
        let u = iu as f64 / nu as f64;
        let tau = t * u * u;
        let s = t - tau;
        let inner = if s <= 0.0 {
            v * v * x0 * x0 * bs_vanna(x0, k, tau, v).powi(2)
        } else {
            let sd = v * s.sqrt();
            let h = 20.0 / nz as f64;
            let mut a = 0.0;
            for iz in 0..=nz {
                let z = -10.0 + iz as f64 * h;
                let x = x0 * (sd * z - 0.5 * sd * sd).exp();
                a += simpson(nz, iz)
                    * normal::pdf(z)
                    * v
                    * v
                    * x
                    * x
                    * bs_vanna(x, k, tau, v).powi(2);
            }
            a * h / 3.0
        };
        acc += simpson(nu, iu) * inner * 2.0 * t * u;
    }
    acc / (3.0 * nu as f64)
}

#[test]
fn smoothed_call_price_matches_closed_form() {
    let spec = flat(0.0, 4e-4);
    let payoff = Payoff::SmoothCall {
        strike: K,
        width: 0.05,
    };
    let c = price(&spec, &payoff, cfg(100_000, 1).mc).unwrap();
    let oracle = bs::call_price(X0, K, T, VOL);
    assert!(
        (c.mean - oracle).abs() < 3.0 * c.std_error,
        "{c:?} vs {oracle}"
    );
}

#[test]
fn trivial_payoffs_price_and_delta() {
    let spec = flat(0.0, 4e-4);
    let small = PnlConfig {
        lattice: LatticeConfig {
            time_nodes: 6,
            spot_nodes: 9,
            paths: 1024,
            ..Default::default()
        },
        ..cfg(2_000, 2)
    };
    let (c, delta) = price_and_delta(&spec, &Payoff::Constant(3.5), &small).unwrap();
    assert_eq!(c.mean, 3.5);
    assert_eq!(delta.max_abs(), 0.0);

    let (c, delta) = price_and_delta(
        &spec,
        &Payoff::Linear {
            intercept: 0.0,
            slope: 1.0,
        },
        &small,
    )
    .unwrap();
    assert!((c.mean - X0).abs() < 3.0 * c.std_error);
    // Euler is linear in the start point: each node is the sample mean of
    // Π(1 + σ dW), exactly 1 in expectation with relative sd σ√(T - t).
    for j in 0..6 {
        let tol = 4.0 * VOL * (T - delta.times()[j]).sqrt() / (1024f64).sqrt() + 1e-12;
        for k in 0..9 {
            assert!(
                (delta.node(j, k) - 1.0).abs() < tol,
                "{j} {k}: {}",
                delta.node(j, k)
            );
        }
    }
}

#[test]
fn gateaux_price_matches_vega() {
    let spec = flat(0.0, 4e-4);
    let mc = cfg(100_000, 3).mc;
    let g = gateaux_price(&spec, &call(), 0, 1e-3, mc).unwrap();
    let vega = bs::call_vega(X0, K, T, VOL);
    assert!(within(g.mean, vega, g.std_error, 0.01), "{g:?} vs {vega}");

    // Halving the step moves the estimate by less than the CRN noise band.
    let half = gateaux_price(&spec, &call(), 0, 5e-4, mc).unwrap();
    let band = 3.0 * (g.std_error.powi(2) + half.std_error.powi(2)).sqrt();
    assert!((g.mean - half.mean).abs() < band);

    let lin = gateaux_price(
        &spec,
        &Payoff::Linear {
            intercept: 1.0,
            slope: 1.0,
        },
        0,
        1e-3,
        mc,
    )
    .unwrap();
    assert!(lin.mean.abs() <= 3.0 * lin.std_error + 1e-9);
}

#[test]
fn common_random_numbers_shrink_the_error() {
    let spec = flat(0.0, 4e-4);
    let mc = cfg(20_000, 4).mc;
    let crn = gateaux_price(&spec, &call(), 0, 1e-3, mc).unwrap();
    let ind = gateaux_price_independent(&spec, &call(), 0, 1e-3, mc).unwrap();
    assert!(ind.std_error >= 10.0 * crn.std_error, "{ind:?} vs {crn:?}");
}

#[test]
fn gateaux_delta_matches_closed_form_vanna() {
    let spec = flat(0.0, 4e-4);
    let eps = 1e-3;
    // A single time slice: the node (0, x0) is simulated over 256 steps.
    let c = PnlConfig {
        lattice: LatticeConfig {
            time_nodes: 2,
            spot_nodes: 3,
            paths: 100_000,
            substeps: 256,
            ..Default::default()
        },
        ..cfg(1_000, 5)
    };
    let l = gateaux_delta(&spec, &call(), 0, eps, &c).unwrap();
    assert_eq!(l.spots()[1], X0);
    let at = gateaux_delta_at(&spec, &call(), 0, eps, X0, &c).unwrap();
    assert!(
        (at.mean - l.node(0, 1)).abs() < 1e-9 * at.mean.abs(),
        "{at:?} {}",
        l.node(0, 1)
    );
    let oracle =
        (bs::call_delta(X0, K, T, VOL + eps) - bs::call_delta(X0, K, T, VOL - eps)) / (2.0 * eps);
    // The pathwise vanna is noisy (relative se ≈ 1.5% here), hence 3 se.
    assert!(
        within(at.mean, oracle, at.std_error, 0.01),
        "{at:?} vs {oracle}"
    );

    // Linear payoff: zero in expectation, node noise of order √T/√paths.
    let linear = Payoff::Linear {
        intercept: 0.0,
        slope: 2.0,
    };
    let lin = gateaux_delta(&spec, &linear, 0, eps, &c).unwrap();
    let lin_at = gateaux_delta_at(&spec, &linear, 0, eps, X0, &c).unwrap();
    assert!(lin_at.mean.abs() < 4.0 * lin_at.std_error, "{lin_at:?}");
    assert!(lin.max_abs() < 10.0 * lin_at.std_error, "{}", lin.max_abs());
}

#[test]
fn gateaux_delta_vanishes_far_from_the_money() {
    let spec = flat(0.0, 4e-4);
    let c = PnlConfig {
        lattice: LatticeConfig {
            time_nodes: 11,
            spot_nodes: 21,
            paths: 512,
            ..Default::default()
        },
        ..cfg(1_000, 6)
    };
    let l = gateaux_delta(&spec, &call(), 0, 1e-3, &c).unwrap();
    for j in 0..l.times().len() {
        assert!(
            l.node(j, 0).abs() < 1e-3,
            "t={}: {}",
            l.times()[j],
            l.node(j, 0)
        );
    }
}

#[test]
fn functionals_match_closed_form_corrections() {
    let spec = flat(0.0, 4e-4);
    let bi = BsInputs::from_scalars(X0, K, T, VOL, 0.0, 4e-4).unwrap();
    let st = pnl_functionals(&spec, &call(), &TestFunction::identity(), &cfg(400_000, 7)).unwrap();
    let var = bs::variance_correction(&bi);
    let bias = bs::bias_correction(&bi);
    assert!(
        within(st.variance, var, st.variance_se, 0.02),
        "{} vs {var}",
        st.variance
    );
    assert!(
        within(st.bias, bias, st.bias_se, 0.02),
        "{} ± {} vs {bias}",
        st.bias,
        st.bias_se
    );
    assert_eq!(st.psi, st.lambda1);

    let none = pnl_functionals(
        &flat(0.0, 0.0),
        &call(),
        &TestFunction::identity(),
        &cfg(5_000, 7),
    )
    .unwrap();
    assert_eq!(none.bias, 0.0);
    assert_eq!(none.variance, 0.0);
}

#[test]
fn second_order_term_matches_vanna_integral() {
    let spec = flat(0.0, 4e-4);
    let h = TestFunction::logistic(1.0, 2.0);
    let c = PnlConfig {
        lattice: LatticeConfig {
            paths: 4096,
            ..Default::default()
        },
        ..cfg(20_000, 8)
    };
    let id = pnl_functionals(&spec, &call(), &TestFunction::identity(), &c).unwrap();
    let st = pnl_functionals(&spec, &call(), &h, &c).unwrap();
    let integral = (st.lambda2[0][0] - h.dh0() * id.lambda2[0][0]) / h.d2h0() - id.psi[0].powi(2);
    let oracle = bs_vanna_integral(X0, K, T, VOL);
    assert!(
        (integral - oracle).abs() < 0.05 * oracle,
        "{integral} vs {oracle}"
    );
    assert!((st.psi[0] - h.dh0() * id.psi[0]).abs() < 1e-12 * id.psi[0].abs());
}

#[test]
fn general_quote_matches_closed_form_quote() {
    let spec = flat(0.01, 4e-4);
    let q = general_quote(
        &spec,
        &call(),
        0.01,
        QuoteMethod::Gaussian,
        &cfg(100_000, 9),
    )
    .unwrap();
    let bi = BsInputs::from_scalars(X0, K, T, VOL, 0.01, 4e-4).unwrap();
    let b = bs::quote(&bi, 0.01, QuoteMethod::Gaussian).unwrap();
    let k = quantile_multiplier(0.01, QuoteMethod::Gaussian).unwrap();
    let std_se = 0.5 * q.stats.variance_se / q.stats.variance.sqrt();
    let se = q.stats.price.std_error + q.stats.bias_se + k * std_se;
    for (m, o) in [
        (q.band.bid, b.bid),
        (q.band.mid, b.mid),
        (q.band.ask, b.ask),
    ] {
        assert!(within(m, o, se, 0.02), "{m} vs {o}");
    }
}

#[test]
fn general_quote_algebra() {
    let spec = flat(0.01, 4e-4);
    let c = cfg(5_000, 10);
    let a = general_quote(&spec, &call(), 0.01, QuoteMethod::Gaussian, &c).unwrap();
    let b = general_quote(&spec, &call(), 0.2, QuoteMethod::Gaussian, &c).unwrap();
    assert!((a.band.mid - b.band.mid).abs() <= 1e-14 * a.band.ask.abs());
    let ratio = a.band.spread / b.band.spread;
    let k = quantile_multiplier(0.01, QuoteMethod::Gaussian).unwrap()
        / quantile_multiplier(0.2, QuoteMethod::Gaussian).unwrap();
    assert!((ratio - k).abs() < 1e-12 * k);

    let certain =
        general_quote(&flat(0.0, 0.0), &call(), 0.01, QuoteMethod::Chebyshev, &c).unwrap();
    assert_eq!(certain.band.bid, certain.stats.price.mean);
    assert_eq!(certain.band.mid, certain.stats.price.mean);
    assert_eq!(certain.band.ask, certain.stats.price.mean);
}

#[test]
fn variance_is_additive_over_uncorrelated_directions() {
    let coeffs = UncertainParamSet::new(
        vec![0.2, 0.05],
        vec![0.0, 0.0],
        vec![vec![4e-4, 0.0], vec![0.0, 1e-3]],
    )
    .unwrap();
    let two = LocalVolSpec::new(
        vec![BasisFn::constant(), BasisFn::spot_linear(X0)],
        coeffs,
        1e-3,
        X0,
        T,
    )
    .unwrap();
    let c = cfg(20_000, 11);
    let st = pnl_functionals(&two, &call(), &TestFunction::identity(), &c).unwrap();
    let psi1 = gateaux_price(&two, &call(), 0, c.epsilon, c.mc)
        .unwrap()
        .mean;
    let psi2 = gateaux_price(&two, &call(), 1, c.epsilon, c.mc)
        .unwrap()
        .mean;
    let expected = psi1 * psi1 * 4e-4 + psi2 * psi2 * 1e-3;
    assert!((st.variance - expected).abs() < 1e-12 * expected);

    // Each direction alone contributes its own square.
    let only1 = two
        .with_coeffs(
            UncertainParamSet::new(
                vec![0.2, 0.05],
                vec![0.0, 0.0],
                vec![vec![4e-4, 0.0], vec![0.0, 0.0]],
            )
            .unwrap(),
        )
        .unwrap();
    let s1 = pnl_functionals(&only1, &call(), &TestFunction::identity(), &c).unwrap();
    assert!((s1.variance - psi1 * psi1 * 4e-4).abs() < 1e-12 * s1.variance);
    assert!(psi2.abs() > 0.0);
}

#[test]
fn floor_violations_are_input_errors() {
    let spec = flat(0.0, 4e-4);
    assert!(gateaux_price(&spec, &call(), 0, 0.3, cfg(100, 1).mc)
        .unwrap_err()
        .is_input());
    assert!(gateaux_price(&spec, &call(), 1, 1e-3, cfg(100, 1).mc)
        .unwrap_err()
        .is_input());
    assert!(price(&spec, &Payoff::Digital { strike: K }, cfg(100, 1).mc)
        .unwrap_err()
        .is_input());
    let low = |_: f64, _: f64| 1e-9;
    let g = TimeGrid::uniform(T, 8).unwrap();
    assert!(
        hedge_simulate(&low, &spec, &call(), &g, 100, 1, &LatticeConfig::default())
            .unwrap_err()
            .is_input()
    );
}

#[test]
fn hedging_at_the_true_vol_is_fair() {
    let spec = flat(0.0, 4e-4);
    let s = spec.surface();
    let vol = move |t: f64, x: f64| s.vol(t, x);
    let g = TimeGrid::uniform(T, 64).unwrap();
    let lattice = LatticeConfig {
        paths: 1024,
        ..Default::default()
    };
    let run = hedge_simulate(&vol, &spec, &call(), &g, 10_000, 12, &lattice).unwrap();
    assert!(
        run.mean.mean.abs() < 3.0 * run.mean.std_error,
        "{:?}",
        run.mean
    );
    assert!(
        (run.price.mean - bs::call_price(X0, K, T, VOL)).abs() < 3.0 * run.price.std_error + 0.02
    );
    assert!(
        run.sample_std() < 0.15 * run.price.mean,
        "{}",
        run.sample_std()
    );
}

#[test]
fn under_priced_vol_loses_money() {
    let spec = flat(0.0, 4e-4);
    let vol = |_: f64, _: f64| 1.1 * VOL;
    let g = TimeGrid::uniform(T, 32).unwrap();
    let lattice = LatticeConfig {
        time_nodes: 21,
        spot_nodes: 41,
        paths: 256,
        ..Default::default()
    };
    for seed in 1..=3 {
        let run = hedge_simulate(&vol, &spec, &call(), &g, 4_000, seed, &lattice).unwrap();
        assert!(
            run.mean.mean + 3.0 * run.mean.std_error < 0.0,
            "seed {seed}: {:?}",
            run.mean
        );
    }
}

#[test]
fn bootstrap_matches_functionals() {
    let spec = flat(0.01, 4e-4);
    let st = pnl_functionals(&spec, &call(), &TestFunction::identity(), &cfg(50_000, 13)).unwrap();
    let bc = BootstrapConfig {
        draws: 40,
        hedge: McConfig {
            steps: 32,
            paths: 4_000,
            seed: 14,
        },
        lattice: LatticeConfig {
            time_nodes: 21,
            spot_nodes: 41,
            paths: 256,
            ..Default::default()
        },
        draw_seed: 15,
    };
    let r = parameter_bootstrap(&spec, &call(), &TestFunction::identity(), &bc).unwrap();
    assert_eq!(r.values.len(), 40);
    assert_eq!(r.truncated_fraction, 0.0);
    assert!(
        (r.mean - st.bias).abs() < 0.2 * st.bias.abs(),
        "{} vs {}",
        r.mean,
        st.bias
    );
    assert!(
        (r.variance - st.variance).abs() < 0.2 * st.variance,
        "{} vs {}",
        r.variance,
        st.variance
    );
}

#[test]
fn bootstrap_reports_truncation() {
    // A huge variance pushes many drawn surfaces below the floor.
    let spec = flat(0.0, 0.04);
    let bc = BootstrapConfig {
        draws: 20,
        hedge: McConfig {
            steps: 8,
            paths: 200,
            seed: 1,
        },
        lattice: LatticeConfig {
            time_nodes: 5,
            spot_nodes: 9,
            paths: 32,
            ..Default::default()
        },
        draw_seed: 2,
    };
    let r = parameter_bootstrap(&spec, &call(), &TestFunction::identity(), &bc).unwrap();
    assert!(r.truncated_fraction > 0.0 && r.truncated_fraction < 1.0);
    assert_eq!(r.values.len() as f64, 20.0 * (1.0 - r.truncated_fraction));
}
