use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::tail_models::TailModel;

const E: f64 = std::f64::consts::E;

fn pareto(alpha: f64) -> TailModel {
    TailModel::pareto(alpha, 1.0).unwrap()
}
fn burr12() -> TailModel {
    TailModel::burr(1.0, 2.0).unwrap()
}
fn lp(gamma: f64) -> TailModel {
    TailModel::log_pareto(1.0, gamma, 1.0).unwrap()
}
fn models() -> Vec<TailModel> {
    vec![pareto(1.0), pareto(2.5), burr12(), lp(0.5), lp(-0.5)]
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        50,
    )
}

#[test]
fn scaling_examples() {
    assert_relative_eq!(
        scaling_constant(&pareto(2.0), 10_000).unwrap(),
        100.0,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        scaling_constant(&burr12(), 100).unwrap(),
        9.0,
        max_relative = 1e-13
    );
    let m = lp(0.5);
    let a = scaling_constant(&m, 10_000).unwrap();
    assert_relative_eq!(a, m.quantile(1.0 - 1e-4).unwrap(), max_relative = 1e-10);
    assert_relative_eq!(a, 33_805.902_899_060_409, max_relative = 1e-12);
    for model in models() {
        for n in [2u64, 3, 10, 1000, 1 << 40] {
            let a = scaling_constant(&model, n).unwrap();
            assert!(
                model.survival(a).unwrap() <= 1.0 / n as f64,
                "{model} n={n}"
            );
        }
    }
    assert!(scaling_constant(&pareto(1.0), 1).is_err());
    assert!(scaling_constant(&pareto(1.0), 0).is_err());
}

#[test]
fn threshold_examples() {
    for model in models() {
        assert_eq!(
            threshold(&model, 100, 1.0).unwrap(),
            scaling_constant(&model, 100).unwrap()
        );
        let a = scaling_constant(&model, 100).unwrap();
        assert_relative_eq!(z_value(&model, 100, a).unwrap(), 1.0, max_relative = 1e-15);
    }
    assert_relative_eq!(
        threshold(&pareto(1.0), 100, E).unwrap(),
        1e4,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        threshold(&burr12(), 100, E).unwrap(),
        90.0,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        z_value(&pareto(1.0), 100, 1e4).unwrap(),
        E,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        z_value(&burr12(), 100, 90.0).unwrap(),
        E,
        max_relative = 1e-13
    );
    assert!(threshold(&pareto(1.0), 100, -1.0).is_err());
    assert_eq!(threshold(&pareto(1.0), 100, 0.0).unwrap(), 0.0);
    assert!(z_value(&pareto(1.0), 100, 0.0).is_err());
    assert!(z_value(&pareto(1.0), 100, -3.0).is_err());
}

#[test]
fn exceed_examples() {
    let m = pareto(1.0);
    assert_relative_eq!(
        exact_exceed_prob(&m, 100, 1.0).unwrap(),
        0.633_967_658_726_770_5,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        exact_exceed_prob(&m, 100, E).unwrap(),
        0.009_950_661_308_629_185,
        max_relative = 1e-12
    );
    assert_eq!(exact_exceed_prob(&m, 100, f64::INFINITY).unwrap(), 0.0);
    assert!(exact_exceed_prob(&m, 100, 0.99).is_err());
    assert!(exact_exceed_prob(&m, 1, 2.0).is_err());
    // resolves probabilities far below unit roundoff
    let p = exact_exceed_prob(&m, 1_000_000, 20.0).unwrap();
    let expected = -(1e6f64.ln() * 20f64.ln());
    assert!(p > 0.0);
    assert_relative_eq!(p.ln(), expected, max_relative = 1e-10);
}

#[test]
fn exceed_decreasing_in_x() {
    for model in models() {
        let mut prev = 1.0;
        for x in crate::stats::log_spaced(1.0, 50.0, 300) {
            let p = exact_exceed_prob(&model, 1000, x).unwrap();
            assert!(p <= prev, "{model} x={x}");
            prev = p;
        }
    }
}

#[test]
fn union_upper_bound() {
    for model in models() {
        for n in [100u64, 1000, 10_000, 1_000_000] {
            for x in [1.0, 1.5, E, E * E] {
                let ln_t = ln_threshold(&model, n, x).unwrap();
                let ln_p = ln_exact_exceed_prob(&model, n, x).unwrap();
                let ln_bound = (n as f64).ln() + model.log_survival_ln(ln_t);
                assert!(ln_p <= ln_bound, "{model} n={n} x={x}: {ln_p} > {ln_bound}");
                let p = exact_exceed_prob(&model, n, x).unwrap();
                assert!(
                    p <= n as f64
                        * model.survival(ln_t.exp()).unwrap()
                        * (1.0 + 4.0 * f64::EPSILON)
                );
            }
        }
    }
}

#[test]
fn set_prob_examples() {
    for model in models() {
        let above = BorelSubset::single(Interval::open(1.0, f64::INFINITY)).unwrap();
        assert_eq!(
            exact_set_prob(&model, 100, &above).unwrap(),
            exact_exceed_prob(&model, 100, 1.0).unwrap()
        );
        let point = BorelSubset::single(Interval::point(2.0)).unwrap();
        assert_eq!(exact_set_prob(&model, 100, &point).unwrap(), 0.0);
        assert_eq!(
            ln_exact_set_prob(&model, 100, &point).unwrap(),
            f64::NEG_INFINITY
        );
    }
    let m = pareto(1.0);
    let a = BorelSubset::single(Interval::new(2.0, 3.0, false, true)).unwrap();
    let diff = exact_exceed_prob(&m, 100, 2.0).unwrap() - exact_exceed_prob(&m, 100, 3.0).unwrap();
    assert_relative_eq!(
        exact_set_prob(&m, 100, &a).unwrap(),
        diff,
        max_relative = 1e-14
    );
    // closed form: F̄(t_n(x)) = n^{-1-ln x}
    let g = |x: f64| (100.0 * (-(100f64.powf(-1.0 - x.ln()))).ln_1p()).exp();
    assert_relative_eq!(
        exact_set_prob(&m, 100, &a).unwrap(),
        g(3.0) - g(2.0),
        max_relative = 1e-10
    );
}

#[test]
fn set_additivity() {
    for model in models() {
        for n in [10u64, 1000, 1_000_000] {
            let parts = [
                Interval::new(1.0, 1.3, true, false),
                Interval::new(1.3, 2.0, true, true),
                Interval::new(2.5, E, false, false),
                Interval::above(4.0),
            ];
            let whole = BorelSubset::new(parts).unwrap();
            let sum: f64 = parts
                .iter()
                .map(|iv| exact_set_prob(&model, n, &BorelSubset::single(*iv).unwrap()).unwrap())
                .sum();
            assert!(
                (exact_set_prob(&model, n, &whole).unwrap() - sum).abs() <= 1e-14,
                "{model} n={n}"
            );
        }
    }
}

#[test]
fn log_density_examples() {
    assert_relative_eq!(
        log_density(&pareto(1.0), 100, 1.0).unwrap(),
        0.532_196_376_311_258_4,
        max_relative = 1e-12
    );
    let direct = 100.0 * 100.0 * 100f64.ln() * 0.99f64.powi(99) * 1e-4;
    assert_relative_eq!(
        log_density(&pareto(1.0), 100, 1.0).unwrap(),
        direct.ln(),
        max_relative = 1e-12
    );
    assert_relative_eq!(
        log_density(&burr12(), 100, 1.0).unwrap(),
        0.426_835_860_653_432_1,
        max_relative = 1e-12
    );
    assert!(log_density(&pareto(1.0), 100, 0.5).is_err());
}

#[test]
fn density_integrates_to_set_prob() {
    for model in models() {
        for n in [100u64, 10_000] {
            for upper in [E, 5.0] {
                let g = |x: f64| log_density(&model, n, x).unwrap().exp();
                let integral = simpson(&g, 1.0, upper, 1e-10);
                let p = exact_set_prob(
                    &model,
                    n,
                    &BorelSubset::single(Interval::closed(1.0, upper)).unwrap(),
                )
                .unwrap();
                assert!(
                    (integral - p).abs() <= 1e-6,
                    "{model} n={n} M={upper}: {integral} vs {p}"
                );
            }
        }
    }
}

#[test]
fn rate_and_infimum_examples() {
    assert_eq!(rate_function(1.0).unwrap(), 0.0);
    assert_eq!(rate_function(E).unwrap(), 1.0);
    assert_relative_eq!(rate_function(E * E).unwrap(), 2.0, max_relative = 1e-15);
    assert!(rate_function(0.5).is_err());

    let two = BorelSubset::new([Interval::closed(2.0, 3.0), Interval::closed(5.0, 6.0)]).unwrap();
    assert_relative_eq!(essential_infimum(&two), 2f64.ln(), max_relative = 1e-15);
    assert_eq!(
        essential_infimum(&BorelSubset::single(Interval::point(2.0)).unwrap()),
        f64::INFINITY
    );
    assert_eq!(
        essential_infimum(&BorelSubset::single(Interval::closed(1.0, 2.0)).unwrap()),
        0.0
    );
    let with_null = BorelSubset::new([
        Interval::point(1.5),
        Interval::closed(2.0, 3.0),
        Interval::closed(5.0, 6.0),
    ])
    .unwrap();
    assert_eq!(essential_infimum(&with_null), essential_infimum(&two));
}

#[test]
fn normalized_examples() {
    let m = pareto(1.0);
    let a = BorelSubset::single(Interval::open(E, f64::INFINITY)).unwrap();
    let p = normalized_log_prob(&m, 100, &a).unwrap();
    assert_eq!(p.n, 100);
    assert_relative_eq!(p.prob, 0.009_950_661_308_629_185, max_relative = 1e-12);
    assert_relative_eq!(p.r_n, -1.001_074_027_810_82, max_relative = 1e-12);
    assert_eq!(p.target, -1.0);
    assert_relative_eq!(p.gap, p.r_n + 1.0, max_relative = 1e-12);
    let big = normalized_log_prob(&m, 1_000_000, &a).unwrap();
    assert!(big.gap.abs() <= 1e-5);
    assert_relative_eq!(big.gap, -3.6191e-8, max_relative = 1e-3);

    let null = BorelSubset::single(Interval::point(2.0)).unwrap();
    let p = normalized_log_prob(&m, 100, &null).unwrap();
    assert_eq!(
        (p.prob, p.r_n, p.target, p.gap),
        (0.0, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0)
    );
    assert!(normalized_log_prob(&m, 2, &a).is_err());
}

#[test]
fn gap_shrinks_along_n() {
    let a = BorelSubset::above(E).unwrap();
    let grid = [
        1_000u64,
        10_000,
        100_000,
        1_000_000,
        10_000_000,
        100_000_000,
    ];
    for model in models() {
        let rows = rate_table(&model, &a, &grid).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), grid);
        for w in rows.windows(2) {
            assert!(w[1].gap.abs() <= w[0].gap.abs(), "{model}: {:?}", rows);
        }
    }
}

#[test]
fn scaling_cache_concurrent_fill() {
    use rayon::prelude::*;
    let m = TailModel::log_pareto(1.3, 0.4, 2.0).unwrap();
    let values: Vec<f64> = (0..64)
        .into_par_iter()
        .map(|_| scaling_constant(&m, 777_777).unwrap())
        .collect();
    assert!(values.iter().all(|v| *v == values[0]));
}

proptest! {
    #[test]
    fn threshold_round_trip(x in 1.0f64..20.085, ln_n in 0.7f64..30.0, idx in 0usize..5) {
        let model = models()[idx];
        let n = ln_n.exp() as u64;
        prop_assume!(n >= 2);
        let t = threshold(&model, n, x).unwrap();
        let z = z_value(&model, n, t).unwrap();
        prop_assert!((z - x).abs() <= 1e-12 * x, "x={} z={}", x, z);
    }

    #[test]
    fn set_prob_in_unit_interval(lo in 1.0f64..10.0, w in 0.0f64..10.0, n in 2u64..100_000, idx in 0usize..5) {
        let model = models()[idx];
        let a = BorelSubset::single(Interval::closed(lo, lo + w)).unwrap();
        let p = exact_set_prob(&model, n, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(p <= exact_exceed_prob(&model, n, lo).unwrap() + 1e-16);
    }
}
