use proptest::prelude::*;
use proptest::strategy::Strategy as _;

use predckpt::waste::{opt_period_tp, optimize_branch, optimize_strategy, waste};
use predckpt::{
    derive_rates, multi_event_prob, PlatformParams, PredictorParams, Seconds, Strategy, WasteQuery, WindowLaw,
};

fn platform() -> impl proptest::strategy::Strategy<Value = PlatformParams> {
    (
        30.0..1_200.0f64,
        20.0..2_000.0f64,
        1.0..300.0f64,
        30.0..1_200.0f64,
        0.1..2.0f64,
    )
        .prop_map(|(c, ratio, d, r, m)| {
            PlatformParams::new(1, Seconds(c * ratio), Seconds(c), Seconds(d), Seconds(r))
                .unwrap()
                .with_migration(Seconds(c * m))
                .unwrap()
        })
}

fn predictor() -> impl proptest::strategy::Strategy<Value = PredictorParams> {
    (0.0..0.99f64, 0.05..=1.0f64, 0.0..20.0f64)
        .prop_map(|(r, p, w)| PredictorParams::new(r, p, Seconds(w), 1.0, WindowLaw::UniformInWindow).unwrap())
}

/// Window scaled to the checkpoint length so that WithCkptI applies.
fn with_window(pl: &PlatformParams, pr: &PredictorParams) -> PredictorParams {
    pr.with_window(Seconds(pl.ckpt().get() * (1.0 + pr.window().get())))
        .unwrap()
}

fn query(pl: PlatformParams, pr: PredictorParams, t: f64) -> WasteQuery {
    let mut q = WasteQuery::new(pl, pr, Seconds(t));
    if pr.window() >= pl.ckpt() {
        q = q.with_tp(opt_period_tp(&pr, pl.ckpt()).unwrap());
    }
    q
}

const PREDICTING: [Strategy; 5] = [
    Strategy::ExactPrediction,
    Strategy::Migration,
    Strategy::Instant,
    Strategy::NoCkptI,
    Strategy::WithCkptI,
];

proptest! {
    #[test]
    fn waste_is_affine_in_trust(pl in platform(), pr in predictor(), t_ratio in 1.0..100.0f64, q in 0.0..=1.0f64) {
        let pr = with_window(&pl, &pr);
        let qy = query(pl, pr, pl.ckpt().get() * t_ratio);
        for s in PREDICTING {
            let w0 = waste(s, &qy, 0.0).unwrap();
            let w1 = waste(s, &qy, 1.0).unwrap();
            let wq = waste(s, &qy, q).unwrap();
            let lin = w0 + q * (w1 - w0);
            prop_assert!((wq - lin).abs() <= 1e-12 * w0.abs().max(w1.abs()), "{s}: {wq} vs {lin}");
        }
    }

    #[test]
    fn optimal_period_beats_neighbours(pl in platform(), pr in predictor(), q in prop::sample::select(vec![0.0, 1.0])) {
        let pr = with_window(&pl, &pr);
        for s in Strategy::ALL {
            let b = optimize_branch(s, &pl, &pr, q, 0.27, false).unwrap().unwrap();
            let Some(t) = b.t_r.finite() else { continue };
            let qy = |t: f64| query(pl, pr, t);
            let at = waste(s, &qy(t.get()), b.q).unwrap();
            prop_assert!((at - b.waste).abs() <= 1e-12 * at.abs());
            for f in [1.01, 1.1, 2.0] {
                let up = waste(s, &qy(t.get() * f), b.q).unwrap();
                prop_assert!(up >= at - 1e-12, "{s} above: {up} < {at}");
                let lo = t.get() / f;
                if lo >= pl.ckpt().get() {
                    let down = waste(s, &qy(lo), b.q).unwrap();
                    prop_assert!(down >= at - 1e-12, "{s} below: {down} < {at}");
                }
            }
        }
    }

    #[test]
    fn capping_never_helps(pl in platform(), pr in predictor()) {
        let pr = with_window(&pl, &pr);
        for s in Strategy::ALL {
            let free = optimize_strategy(s, &pl, &pr, 0.27, false).unwrap();
            let capped = optimize_strategy(s, &pl, &pr, 0.27, true).unwrap();
            prop_assert!(capped.waste_raw >= free.waste_raw - 1e-12, "{s}");
        }
    }

    #[test]
    fn predictions_never_hurt_the_optimum(pl in platform(), pr in predictor()) {
        let pr = with_window(&pl, &pr);
        let young = optimize_strategy(Strategy::Young, &pl, &pr, 0.27, false).unwrap().waste_raw;
        for s in PREDICTING {
            let w = optimize_strategy(s, &pl, &pr, 0.27, false).unwrap().waste_raw;
            prop_assert!(w <= young + 1e-12, "{s}: {w} > {young}");
        }
    }

    #[test]
    fn young_waste_grows_with_processors(c in 60.0..1_200.0f64, e in 10u32..19) {
        let at = |n: u64| {
            let pl = PlatformParams::new(n, Seconds::from_years(125.0), Seconds(c), Seconds(60.0), Seconds(c)).unwrap();
            optimize_strategy(Strategy::Young, &pl, &PredictorParams::none(), 0.27, false).unwrap().waste_raw
        };
        prop_assert!(at(1 << (e + 1)) > at(1 << e));
    }

    #[test]
    fn event_rates_add_up(mu in 100.0..1e7f64, r in 0.0..1.0f64, p in 0.01..=1.0f64) {
        let pr = PredictorParams::new(r, p, Seconds::ZERO, 1.0, WindowLaw::UniformInWindow).unwrap();
        let rates = derive_rates(Seconds(mu), &pr);
        let sum = rates.rate_p() + rates.rate_np();
        prop_assert!((sum - rates.rate_e()).abs() <= 1e-12 * sum);
        // Faults reach the platform at rate 1/mu whatever the predictor.
        let faults = p * rates.rate_p() + rates.rate_np();
        prop_assert!((faults * mu - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn proactive_period_splits_the_window(c in 30.0..1_200.0f64, k in 1.0..40.0f64, p in 0.05..=1.0f64) {
        let pr = PredictorParams::new(0.5, p, Seconds(c * k), 1.0, WindowLaw::UniformInWindow).unwrap();
        let tp = opt_period_tp(&pr, Seconds(c)).unwrap().get();
        prop_assert!(tp >= c * (1.0 - 1e-12));
        let n = pr.window().get() / tp;
        prop_assert!((n - n.round()).abs() <= 1e-9 * n, "I / T_P = {n}");
    }

    #[test]
    fn multi_event_prob_is_a_growing_probability(b in 0.0..50.0f64, d in 0.0..1.0f64) {
        let lo = multi_event_prob(Seconds(b), Seconds(1.0));
        let hi = multi_event_prob(Seconds(b + d), Seconds(1.0));
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo);
    }
}
