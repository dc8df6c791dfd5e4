mod analyze;
mod simulate;
mod trace;

pub use analyze::analyze;
pub use simulate::{simulate, sweep};
pub use trace::{export, import};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use predckpt::experiment::{write_results, CsvHeader};
use predckpt::{LawKind, ResultRow};

/// Where CSV files go when no `--out` is given.
pub struct Output {
    pub dir: PathBuf,
}

impl Output {
    /// `out` as given for a single law; otherwise `<stem>-<law>.csv`, next
    /// to `out` or in the output directory.
    pub fn path(&self, out: Option<&Path>, stem: &str, law: Option<LawKind>, several: bool) -> PathBuf {
        let slug = law.map(|l| l.to_string().replace(':', "-"));
        match (out, slug) {
            (Some(p), Some(slug)) if several => {
                let file_stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(stem);
                let ext = p.extension().and_then(|s| s.to_str()).unwrap_or("csv");
                p.with_file_name(format!("{file_stem}-{slug}.{ext}"))
            }
            (Some(p), _) => p.to_path_buf(),
            (None, Some(slug)) => self.dir.join(format!("{stem}-{slug}.csv")),
            (None, None) => self.dir.join(format!("{stem}.csv")),
        }
    }
}

pub fn write_csv(path: &Path, header: &CsvHeader, rows: &[ResultRow]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write_results(&mut out, header, rows)?;
    out.flush()?;
    Ok(())
}

fn opt(x: Option<f64>, scale: f64, prec: usize) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{:.*}", prec, v * scale))
}

/// Human-readable summary of simulated rows.
pub fn print_sim_table(rows: &[ResultRow]) {
    println!(
        "{:<28} {:>8} {:>5} {:>5} {:>7} {:>9} {:>8} {:>8} {:>10} {:>8}",
        "strategy", "N", "r", "p", "I(s)", "T_R(s)", "waste", "+-se", "days", "gain%"
    );
    for r in rows {
        println!(
            "{:<28} {:>8} {:>5} {:>5} {:>7} {:>9.0} {:>8} {:>8} {:>10} {:>8}",
            r.strategy,
            r.n_procs,
            r.recall,
            r.precision,
            r.window_s,
            r.t_r_s,
            opt(r.waste_sim_mean, 1.0, 4),
            opt(r.waste_sim_se, 1.0, 4),
            opt(r.makespan_mean_s, 1.0 / 86_400.0, 2),
            opt(r.gain_vs_young_pct, 1.0, 1),
        );
    }
}
