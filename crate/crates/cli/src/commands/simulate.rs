use anyhow::{bail, Result};

use predckpt::experiment::{run_plan, CsvHeader};
use predckpt::ExperimentPlan;

use super::{print_sim_table, write_csv, Output};
use crate::args::RunArgs;

pub fn simulate(plan: &ExperimentPlan, run: &RunArgs, output: &Output) -> Result<()> {
    execute(plan, run, output, "simulate")
}

/// Like [`simulate`], but at most one of N, r, p and I may take several
/// values.
pub fn sweep(plan: &ExperimentPlan, run: &RunArgs, output: &Output) -> Result<()> {
    let varying: Vec<&str> = [
        ("n", plan.n_procs.len()),
        ("recall", plan.recalls.len()),
        ("precision", plan.precisions.len()),
        ("window", plan.windows.len()),
    ]
    .into_iter()
    .filter(|(_, len)| *len > 1)
    .map(|(name, _)| name)
    .collect();
    if varying.len() > 1 {
        bail!("a sweep varies a single axis, got {}", varying.join(", "));
    }
    execute(plan, run, output, "sweep")
}

fn execute(plan: &ExperimentPlan, run: &RunArgs, output: &Output, stem: &str) -> Result<()> {
    if run.fast {
        eprintln!(
            "warning: --fast runs {} replicates per point; standard errors are larger",
            plan.n_reps
        );
    }
    let sets = run_plan(plan)?;
    let several = sets.len() > 1;
    for set in &sets {
        println!("law {}", set.law);
        print_sim_table(&set.rows);
        for s in &set.skipped {
            eprintln!("skipped {s}");
        }
        let path = output.path(run.out.as_deref(), stem, Some(set.law), several);
        write_csv(&path, &CsvHeader::new(plan.base_seed, Some(set.law)), &set.rows)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
