use std::io::{BufRead, Write};

use super::ResultRow;
use crate::error::ExperimentError;
use crate::trace::LawKind;

pub const SCHEMA_VERSION: u32 = 1;

/// First line of a result file:
/// `# predckpt <version> seed=<seed> schema=<n> law=<law>`, with `law=-`
/// for analytic-only files.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvHeader {
    pub version: String,
    pub seed: u64,
    pub schema: u32,
    pub law: Option<LawKind>,
}

impl CsvHeader {
    pub fn new(seed: u64, law: Option<LawKind>) -> Self {
        CsvHeader {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            schema: SCHEMA_VERSION,
            law,
        }
    }

    fn line(&self) -> String {
        format!(
            "# predckpt {} seed={} schema={} law={}",
            self.version,
            self.seed,
            self.schema,
            self.law.map_or("-".to_string(), |l| l.to_string())
        )
    }

    fn parse(line: &str) -> Result<Self, ExperimentError> {
        let bad = || ExperimentError::Header(line.to_string());
        let mut words = line.strip_prefix("# predckpt ").ok_or_else(bad)?.split_whitespace();
        let version = words.next().ok_or_else(bad)?.to_string();
        let (mut seed, mut schema, mut law) = (None, None, None);
        for w in words {
            match w.split_once('=').ok_or_else(bad)? {
                ("seed", v) => seed = v.parse().ok(),
                ("schema", v) => schema = v.parse().ok(),
                ("law", "-") => law = Some(None),
                ("law", v) => law = Some(Some(v.parse().map_err(|_| bad())?)),
                _ => return Err(bad()),
            }
        }
        let schema = schema.ok_or_else(bad)?;
        if schema != SCHEMA_VERSION {
            return Err(ExperimentError::Header(format!("unsupported schema {schema}")));
        }
        Ok(CsvHeader {
            version,
            seed: seed.ok_or_else(bad)?,
            schema,
            law: law.ok_or_else(bad)?,
        })
    }
}

pub fn write_results<W: Write>(mut out: W, header: &CsvHeader, rows: &[ResultRow]) -> Result<(), ExperimentError> {
    writeln!(out, "{}", header.line())?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results<R: BufRead>(mut input: R) -> Result<(CsvHeader, Vec<ResultRow>), ExperimentError> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let header = CsvHeader::parse(first.trim_end())?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if columns != COLUMNS {
        return Err(ExperimentError::Header(format!(
            "unexpected columns {}",
            columns.join(",")
        )));
    }
    let rows = r.deserialize().collect::<Result<Vec<ResultRow>, _>>()?;
    Ok((header, rows))
}

const COLUMNS: [&str; 18] = [
    "strategy",
    "n_procs",
    "mu_s",
    "recall",
    "precision",
    "window_s",
    "q",
    "capped",
    "t_r_s",
    "t_p_s",
    "waste_analytic",
    "waste_sim_mean",
    "waste_sim_se",
    "makespan_mean_s",
    "makespan_se_s",
    "gain_vs_young_pct",
    "n_reps",
    "seed",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: &str) -> ResultRow {
        ResultRow {
            strategy: strategy.to_string(),
            n_procs: 65_536,
            mu_s: 60_150.375_939_849_62,
            recall: 0.85,
            precision: 0.82,
            window_s: 300.0,
            q: 1.0,
            capped: false,
            t_r_s: 21_936.281_123_456_78,
            t_p_s: None,
            waste_analytic: Some(0.076_138_109_123),
            waste_sim_mean: Some(0.1 + 0.2),
            waste_sim_se: Some(1e-17),
            makespan_mean_s: Some(6_363_360.000_000_001),
            makespan_se_s: Some(3.3),
            gain_vs_young_pct: Some(-7.654_321),
            n_reps: 100,
            seed: u64::MAX,
        }
    }

    #[test]
    fn round_trip() {
        let header = CsvHeader::new(7, Some(LawKind::Weibull { shape: 0.7 }));
        let mut rows = vec![row("Young"), row("BestPeriod-WithCkptI")];
        rows[1].t_p_s = Some(1_000.0);
        rows[1].waste_analytic = None;
        rows[1].capped = true;
        rows[1].t_r_s = f64::INFINITY;
        let mut buf = Vec::new();
        write_results(&mut buf, &header, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# predckpt "));
        assert_eq!(text.lines().nth(1).unwrap(), COLUMNS.join(","));
        let (h, back) = read_results(buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(back, rows);
    }

    #[test]
    fn empty_file_keeps_columns() {
        let header = CsvHeader::new(1, None);
        let mut buf = Vec::new();
        write_results(&mut buf, &header, &[]).unwrap();
        let (h, rows) = read_results(buf.as_slice()).unwrap();
        assert_eq!(h.law, None);
        assert!(rows.is_empty());
    }

    #[test]
    fn rejects_foreign_headers() {
        assert!(read_results("strategy,n_procs\n".as_bytes()).is_err());
        let future = "# predckpt 9.9.9 seed=1 schema=2 law=exp\n";
        assert!(matches!(
            read_results(future.as_bytes()),
            Err(ExperimentError::Header(_))
        ));
    }
}
