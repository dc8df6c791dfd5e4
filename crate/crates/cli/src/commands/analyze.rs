use anyhow::Result;

use predckpt::experiment::{analytic_rows, CsvHeader};
use predckpt::waste::{dominance_nockpt, optimize_all};
use predckpt::{ExperimentPlan, WindowLaw};

use super::{write_csv, Output};
use crate::args::AnalyzeArgs;

pub fn analyze(plan: &ExperimentPlan, args: &AnalyzeArgs, output: &Output) -> Result<()> {
    let mut rows = Vec::new();
    for point in plan.points()? {
        let (pl, pr) = (&point.platform, &point.predictor);
        let mu = pl.mtbf();
        println!(
            "N={} mu={:.1}s ({:.1} mn) C={} D={} R={} r={} p={} I={}",
            pl.n_procs(),
            mu.get(),
            mu.minutes(),
            pl.ckpt(),
            pl.down(),
            pl.recovery(),
            pr.recall(),
            pr.precision(),
            pr.window()
        );
        let uncapped = optimize_all(pl, pr, plan.alpha, false)?;
        let capped = optimize_all(pl, pr, plan.alpha, true)?;
        println!(
            "  {:<16} {:>3} {:>10} {:>8} {:>8}   {:>3} {:>10} {:>8}",
            "strategy", "q", "T_R(mn)", "T_P(s)", "waste", "q", "T_R(mn)", "waste"
        );
        println!("  {:<16} {:-^32}   {:-^23}", "", " uncapped ", " capped ");
        for u in &uncapped {
            let c = capped.iter().find(|c| c.strategy == u.strategy);
            let t_r = |p: &predckpt::OptimizedPlan| match p.t_r_star.finite() {
                Some(t) => format!("{:.1}", t.minutes()),
                None => "inf".to_string(),
            };
            let capped_cols = match c {
                Some(c) if c.feasible => format!("{:>3} {:>10} {:>8.4}", c.q_star, t_r(c), c.waste_star),
                _ => format!("{:>3} {:>10} {:>8}", "-", "infeasible", "-"),
            };
            println!(
                "  {:<16} {:>3} {:>10} {:>8} {:>8.4}   {capped_cols}",
                u.strategy.name(),
                u.q_star,
                t_r(u),
                u.t_p_star.map_or("-".to_string(), |t| format!("{:.1}", t.get())),
                u.waste_star,
            );
        }
        println!("  dominance: {}", dominance_line(&point.platform, &point.predictor));
        rows.extend(analytic_rows(&point, plan.alpha, plan.base_seed)?);
    }
    if let Some(path) = &args.csv {
        let path = output.path(Some(path), "analyze", None, false);
        write_csv(&path, &CsvHeader::new(plan.base_seed, None), &rows)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn dominance_line(pl: &predckpt::PlatformParams, pr: &predckpt::PredictorParams) -> String {
    let verdict = if dominance_nockpt(pr, pl.ckpt()) {
        "NoCkptI-favorable"
    } else {
        "WithCkptI-favorable"
    };
    match pr.window_law() {
        WindowLaw::UniformInWindow => {
            let p = pr.precision();
            let threshold = 16.0 * (1.0 - p / 2.0) / p * pl.ckpt().get();
            format!("{verdict} (I = {:.0} s, threshold {threshold:.0} s)", pr.window().get())
        }
        _ => verdict.to_string(),
    }
}
