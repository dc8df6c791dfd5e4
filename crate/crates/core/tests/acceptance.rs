//! End-to-end acceptance checks. Prints one `[PASS]`/`[FAIL]` line per
//! criterion and exits nonzero if any criterion fails.
//!
//! Run with `cargo test -p predckpt-core --test acceptance --release` for
//! the simulation-heavy criteria to finish quickly.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use predckpt::experiment::{analytic_waste, Point, DEFAULT_REPS, DEFAULT_SEED};
use predckpt::sim::{best_period_search, formula_spec, period_grid, run_replicates, ReplicateSummary};
use predckpt::waste::{
    optimize_branch, waste_exact_date, waste_instant, waste_migration, waste_nockpt, waste_withckpt, waste_young,
};
use predckpt::{
    derive_rates, multi_event_prob, EventKind, JobSpec, LawKind, PlatformParams, PredictorParams, Scenario, Seconds,
    Strategy, TraceConfig, TraceStream, WasteQuery, WindowLaw,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Single-processor platform with random durations; `mu` at least 20 C.
fn draw_platform(rng: &mut ChaCha8Rng) -> PlatformParams {
    let c = rng.random_range(30.0..1_200.0);
    let mu = c * rng.random_range(20.0..2_000.0);
    PlatformParams::new(
        1,
        Seconds(mu),
        Seconds(c),
        Seconds(rng.random_range(1.0..300.0)),
        Seconds(rng.random_range(30.0..1_200.0)),
    )
    .unwrap()
}

fn draw_predictor(rng: &mut ChaCha8Rng, window: f64) -> PredictorParams {
    PredictorParams::new(
        rng.random_range(0.01..0.99),
        rng.random_range(0.05..1.0),
        Seconds(window),
        1.0,
        WindowLaw::UniformInWindow,
    )
    .unwrap()
}

// Reduction identities between the closed forms, to 1e-12 relative to the
// larger of the compared wastes.
fn formula_reductions() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    for _ in 0..1_000 {
        let pl = draw_platform(&mut rng);
        let c = pl.ckpt().get();
        let mu = pl.mtbf().get();
        let dr = pl.down().get() + pl.recovery().get();
        let pr = draw_predictor(&mut rng, 0.0);
        let q = rng.random_range(0.0..=1.0);
        let t = Seconds(c * rng.random_range(1.0..200.0));
        let at = |pr: PredictorParams| WasteQuery::new(pl, pr, t);

        let young = waste_young(&at(pr)).unwrap();
        let exact0 = waste_exact_date(&at(pr), 0.0).unwrap();
        worst[0] = worst[0].max(rel(exact0, young));

        let exact = waste_exact_date(&at(pr), q).unwrap();
        worst[1] = worst[1].max(rel(waste_instant(&at(pr), q).unwrap(), exact));
        worst[2] = worst[2].max(rel(waste_nockpt(&at(pr), q).unwrap(), exact));

        let (r, p) = (pr.recall(), pr.precision());
        let window = c * rng.random_range(1.0..20.0);
        let pw = pr.with_window(Seconds(window)).unwrap();
        let e = pw.mean_fault_offset().get();
        let k = ((1.0 - p) * window + p * e) / p;
        let tp = window / rng.random_range(1..=(window / c).floor() as u32) as f64;
        let with = waste_withckpt(&at(pw).with_tp(Seconds(tp)), q).unwrap();
        let without = waste_nockpt(&at(pw), q).unwrap();
        let term = q * r / mu * (k * c / tp + tp - e);
        worst[3] = worst[3].max(((with - without) - term).abs() / with.abs().max(without.abs()));

        let pm = pl.with_migration(pl.ckpt()).unwrap();
        let mig = waste_migration(&WasteQuery::new(pm, pr, t), q).unwrap();
        let diff = q * r / mu * dr;
        worst[4] = worst[4].max(((exact - mig) - diff).abs() / exact.abs().max(mig.abs()));
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max <= 1e-12,
        format!(
            "max rel err: exact(q=0)/young {:.1e}, instant(I=0) {:.1e}, nockpt(I=0) {:.1e}, withckpt-nockpt {:.1e}, \
             exact-migration {:.1e} (tol 1e-12)",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

// The optimal waste over a q grid is reached at q = 0 or q = 1.
fn q_extremality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let mut violations = Vec::new();
    let mut checked = 0;
    for draw in 0..1_000 {
        let pl = draw_platform(&mut rng);
        let c = pl.ckpt().get();
        let pl = pl.with_migration(Seconds(c * rng.random_range(0.1..2.0))).unwrap();
        let window = c * rng.random_range(1.0..20.0);
        let pr = draw_predictor(&mut rng, window);
        for s in Strategy::ALL.into_iter().filter(|s| s.uses_predictions()) {
            let curve: Vec<f64> = grid
                .iter()
                .map(|&q| optimize_branch(s, &pl, &pr, q, 0.27, false).unwrap().unwrap().waste)
                .collect();
            let ends = curve[0].min(curve[20]);
            let inner = curve[1..20].iter().copied().fold(f64::INFINITY, f64::min);
            checked += 1;
            if inner < ends - 1e-12 * ends.abs() {
                violations.push(format!("draw {draw} {s}: interior {inner} < endpoints {ends}"));
            }
        }
    }
    verdict(
        violations.is_empty(),
        format!(
            "{checked} strategy/draw pairs, {} interior minima{}",
            violations.len(),
            violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    )
}

// Brute-force minimizer of the exact-date waste against sqrt(2 mu C / (1 - r q)).
fn closed_form_vs_grid() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let pl = draw_platform(&mut rng);
        let pr = draw_predictor(&mut rng, 0.0);
        let q = rng.random_range(0.0..=1.0);
        let (mu, c) = (pl.mtbf().get(), pl.ckpt().get());
        let extr = (2.0 * mu * c / (1.0 - pr.recall() * q)).sqrt();
        let lo = (extr / 10.0).max(c);
        let hi = extr * 10.0;
        let step = 1.0 + 1e-5;
        let mut t = lo;
        let mut best = (lo, f64::INFINITY);
        while t <= hi {
            let w = waste_exact_date(&WasteQuery::new(pl, pr, Seconds(t)), q).unwrap();
            if w < best.1 {
                best = (t, w);
            }
            t *= step;
        }
        worst = worst.max(rel(best.0, extr));
    }
    verdict(worst <= 1e-3, format!("100 draws, max rel gap {worst:.2e} (tol 1e-3)"))
}

fn validity_bound() -> Verdict {
    let pi = multi_event_prob(Seconds(0.27), Seconds(1.0));
    verdict(
        (pi - 0.0305).abs() <= 0.0005,
        format!("pi(0.27) = {pi:.5} (want 0.0305 +- 0.0005)"),
    )
}

// Empirical mean inter-arrival times on 1e6-event traces.
fn trace_statistics() -> Verdict {
    let platform = PlatformParams::reference(1 << 16).unwrap();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (r, p) in [(0.85, 0.82), (0.7, 0.4)] {
        let pred = PredictorParams::new(r, p, Seconds(300.0), 1.0, WindowLaw::UniformInWindow).unwrap();
        let rates = derive_rates(platform.mtbf(), &pred);
        for law in [
            LawKind::Exponential,
            LawKind::Weibull { shape: 0.5 },
            LawKind::Weibull { shape: 0.7 },
        ] {
            let cfg = TraceConfig::new(law, &platform, &pred);
            let (mut n_p, mut n_np, mut last) = (0u64, 0u64, 0.0);
            for ev in TraceStream::new(cfg, 7).take(1_000_000) {
                match ev.kind {
                    EventKind::UnpredictedFault => n_np += 1,
                    _ => n_p += 1,
                }
                last = ev.time;
            }
            let got = [last / n_p as f64, last / n_np as f64, last / (n_p + n_np) as f64];
            let want = [rates.mu_p.as_f64(), rates.mu_np.as_f64(), rates.mu_e.get()];
            let err = (0..3).map(|i| rel(got[i], want[i])).fold(0.0, f64::max);
            worst = worst.max(err);
            lines.push(format!("r={r} p={p} {law}: {:.2}%", 100.0 * err));
        }
    }
    verdict(
        worst <= 0.02,
        format!("max rel err {:.2}% (tol 2%); {}", 100.0 * worst, lines.join(", ")),
    )
}

fn point(n: u64, recall: f64, precision: f64, window: f64) -> Point {
    Point {
        platform: PlatformParams::reference(n).unwrap(),
        predictor: PredictorParams::new(recall, precision, Seconds(window), 1.0, WindowLaw::UniformInWindow).unwrap(),
    }
}

fn simulate(point: &Point, law: LawKind, kind: Strategy) -> ReplicateSummary {
    let spec = formula_spec(kind, &point.platform, &point.predictor).unwrap();
    let scenario = Scenario::new(point.platform, point.predictor, law);
    run_replicates(&JobSpec::calibrated(), &spec, &scenario, DEFAULT_REPS, DEFAULT_SEED).unwrap()
}

fn model_vs_simulation() -> Verdict {
    let mut pass = true;
    let mut lines = Vec::new();
    for n in [1u64 << 16, 1 << 19] {
        let pt = point(n, 0.85, 0.82, 300.0);
        for kind in [Strategy::Young, Strategy::ExactPrediction] {
            let spec = formula_spec(kind, &pt.platform, &pt.predictor).unwrap();
            let model = analytic_waste(&pt, &spec).unwrap();
            let sim = simulate(&pt, LawKind::Exponential, kind).waste_mean;
            let gap = (sim - model) / model;
            pass &= gap.abs() <= 0.10;
            lines.push(format!(
                "N=2^{} {kind}: sim {sim:.4} model {model:.4} ({:+.1}%)",
                n.trailing_zeros(),
                100.0 * gap
            ));
        }
    }
    verdict(pass, format!("{} (tol 10%)", lines.join(", ")))
}

fn gain_table() -> Verdict {
    let w07 = LawKind::Weibull { shape: 0.7 };
    let w05 = LawKind::Weibull { shape: 0.5 };
    // (law, recall, precision, window, strategy, target gains at 2^16 and 2^19, tolerance in points)
    let cases = [
        (w07, 0.85, 0.82, 300.0, Strategy::ExactPrediction, [19.0, 47.0], 4.0),
        (w07, 0.85, 0.82, 300.0, Strategy::NoCkptI, [18.0, 44.0], 4.0),
        (w05, 0.85, 0.82, 300.0, Strategy::ExactPrediction, [40.0, 77.0], 5.0),
        (w07, 0.7, 0.4, 3_000.0, Strategy::WithCkptI, [7.1, 9.7], 3.0),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (law, r, p, window, kind, targets, tol) in cases {
        for (n, target) in [1u64 << 16, 1 << 19].into_iter().zip(targets) {
            let pt = point(n, r, p, window);
            let young = simulate(&pt, law, Strategy::Young).makespan_mean;
            let ours = simulate(&pt, law, kind).makespan_mean;
            let gain = 100.0 * (1.0 - ours / young);
            let ok = (gain - target).abs() <= tol;
            pass &= ok;
            lines.push(format!(
                "{kind} {law} r={r} p={p} I={window} N=2^{}: {gain:.1}% vs {target}+-{tol}{}",
                n.trailing_zeros(),
                if ok { "" } else { " MISS" }
            ));
        }
    }
    verdict(pass, lines.join("; "))
}

fn best_period_closeness() -> Verdict {
    let law = LawKind::Weibull { shape: 0.7 };
    let mut pass = true;
    let mut lines = Vec::new();
    for (kind, window) in [
        (Strategy::ExactPrediction, 300.0),
        (Strategy::Instant, 300.0),
        (Strategy::NoCkptI, 300.0),
        (Strategy::WithCkptI, 3_000.0),
    ] {
        let pt = point(1 << 19, 0.85, 0.82, window);
        let spec = formula_spec(kind, &pt.platform, &pt.predictor).unwrap();
        let scenario = Scenario::new(pt.platform, pt.predictor, law);
        let t = spec.period_tr().get();
        let lo = (t / 4.0).max(1.05 * pt.platform.ckpt().get());
        let grid = period_grid(Seconds(lo), Seconds(4.0 * t), 25);
        let job = JobSpec::calibrated();
        let best = best_period_search(&job, &spec, &scenario, &grid, DEFAULT_REPS, DEFAULT_SEED).unwrap();
        let at_formula = run_replicates(&job, &spec, &scenario, DEFAULT_REPS, DEFAULT_SEED)
            .unwrap()
            .waste_mean;
        let gap = (at_formula - best.summary.waste_mean) / best.summary.waste_mean;
        pass &= gap <= 0.05;
        lines.push(format!(
            "{kind}: formula T={t:.0} waste {at_formula:.4}, best T={:.0} waste {:.4} ({:+.1}%)",
            best.period.get(),
            best.summary.waste_mean,
            100.0 * gap
        ));
    }
    verdict(pass, format!("{} (tol 5%)", lines.join("; ")))
}

fn recall_dominates_precision() -> Verdict {
    let law = LawKind::Weibull { shape: 0.7 };
    let levels = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    let range = |xs: &[f64]| {
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - xs.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for kind in [Strategy::ExactPrediction, Strategy::Instant, Strategy::NoCkptI] {
        let over_p: Vec<f64> = levels
            .iter()
            .map(|&p| simulate(&point(1 << 19, 0.8, p, 300.0), law, kind).waste_mean)
            .collect();
        let over_r: Vec<f64> = levels
            .iter()
            .map(|&r| simulate(&point(1 << 19, r, 0.8, 300.0), law, kind).waste_mean)
            .collect();
        let (rp, rr) = (range(&over_p), range(&over_r));
        pass &= rp < rr;
        lines.push(format!("{kind}: range over p {rp:.4}, over r {rr:.4}"));
    }
    verdict(pass, lines.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("formula reductions", formula_reductions),
        ("q extremality", q_extremality),
        ("closed form vs grid search", closed_form_vs_grid),
        ("validity bound", validity_bound),
        ("trace statistics", trace_statistics),
        ("model vs simulation (Exponential)", model_vs_simulation),
        ("gain table", gain_table),
        ("formula period vs best period", best_period_closeness),
        ("recall dominates precision", recall_dominates_precision),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "[{}] {name}: {} ({:.1}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
