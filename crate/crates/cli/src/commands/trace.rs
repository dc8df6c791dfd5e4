use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};

use anyhow::{bail, Context, Result};

use predckpt::sim::{formula_spec, run, run_logged};
use predckpt::trace::{read_trace, write_trace};
use predckpt::{
    derive_rates, EventKind, EventTrace, ExperimentPlan, JobSpec, PlatformParams, PredictorParams, TraceConfig,
};

use crate::args::{ExportArgs, ImportArgs};

pub fn export(plan: &ExperimentPlan, args: &ExportArgs) -> Result<()> {
    let points = plan.points()?;
    let [point] = points.as_slice() else {
        bail!("trace export needs a single (N, r, p, I) point, got {}", points.len());
    };
    let law = match (args.law, plan.laws.as_slice()) {
        (Some(l), _) => l,
        (None, [l]) => *l,
        (None, _) => bail!("trace export needs a single law"),
    };
    let mut cfg = TraceConfig::new(law, &point.platform, &point.predictor).with_false_shape(plan.false_shape);
    if args.exact_dates {
        cfg = cfg.exact_dates();
    }
    let trace = EventTrace::generate(cfg, args.horizon, plan.base_seed);
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut out = BufWriter::new(file);
            write_trace(&trace, &mut out)?;
            out.flush()?;
            eprintln!("wrote {} events to {}", trace.events.len(), path.display());
        }
        None => write_trace(&trace, io::stdout().lock())?,
    }
    Ok(())
}

pub fn import(args: &ImportArgs) -> Result<()> {
    let file = File::open(&args.file).with_context(|| format!("opening {}", args.file.display()))?;
    let trace = read_trace(BufReader::new(file)).with_context(|| format!("reading {}", args.file.display()))?;
    let cfg = trace.config;
    let pred = PredictorParams::new(cfg.recall, cfg.precision, cfg.window, 1.0, cfg.window_law)?;

    let (mut unpredicted, mut true_preds, mut false_preds) = (0u64, 0u64, 0u64);
    for ev in &trace.events {
        match ev.kind {
            EventKind::UnpredictedFault => unpredicted += 1,
            EventKind::TruePrediction { .. } => true_preds += 1,
            EventKind::FalsePrediction { .. } => false_preds += 1,
        }
    }
    let horizon = trace.horizon.get();
    let rates = derive_rates(cfg.fault_law.mean, &pred);
    let mean = |n: u64| {
        if n == 0 {
            "-".to_string()
        } else {
            format!("{:.1}", horizon / n as f64)
        }
    };
    println!(
        "{}: {} events up to {:.1} days (seed {})",
        args.file.display(),
        trace.events.len(),
        trace.horizon.days(),
        trace.seed
    );
    println!("  unpredicted faults {unpredicted}, true predictions {true_preds}, false predictions {false_preds}");
    println!(
        "  mean time between predictions {} s (model {:.1}), unpredicted faults {} s (model {:.1}), events {} s (model {:.1})",
        mean(true_preds + false_preds),
        rates.mu_p.as_f64(),
        mean(unpredicted),
        rates.mu_np.as_f64(),
        mean(unpredicted + true_preds + false_preds),
        rates.mu_e.get()
    );

    let Some(kind) = args.strategy else {
        return Ok(());
    };
    let platform = PlatformParams::new(1, cfg.fault_law.mean, cfg.lead, args.down, args.recovery)?;
    let spec = formula_spec(kind, &platform, &pred)?;
    let job = match args.base_work {
        Some(w) => JobSpec::new(w)?,
        None => JobSpec::calibrated(),
    };
    let outcome = match &args.log {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut log = BufWriter::new(file);
            let o = run_logged(&job, &spec, &platform, &pred, trace.extended(), trace.seed, &mut log)?;
            log.flush()?;
            o
        }
        None => run(&job, &spec, &platform, &pred, trace.extended(), trace.seed)?,
    };
    println!(
        "  {kind} T_R={:.0}s: makespan {:.2} days, waste {:.4}, faults {}, rollbacks {}",
        spec.period_tr().get(),
        outcome.makespan / 86_400.0,
        outcome.waste(),
        outcome.faults(),
        outcome.counters.rollbacks
    );
    Ok(())
}
