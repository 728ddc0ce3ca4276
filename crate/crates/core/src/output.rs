//! CSV output of sweep results.
//!
//! One row per (sweep value, strategy), columns
//! `sweep_param,strategy,mean_rate,mean_c1,mean_c2,mean_tau,realizations,seed`.
//! Reals are printed with 9 significant digits, `\n` terminated.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::channels::Seed;
use crate::error::Result;
use crate::montecarlo::SweepPoint;

pub const CSV_COLUMNS: [&str; 8] = [
    "sweep_param",
    "strategy",
    "mean_rate",
    "mean_c1",
    "mean_c2",
    "mean_tau",
    "realizations",
    "seed",
];

/// Formats like C's `%.9g`.
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A row read back from a sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub sweep_param: f64,
    pub strategy: String,
    pub mean_rate: f64,
    pub mean_c1: f64,
    pub mean_c2: f64,
    pub mean_tau: f64,
    pub realizations: u64,
    pub seed: u64,
}

pub fn write_sweep_csv<W: Write>(out: W, points: &[SweepPoint], seed: Seed) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for point in points {
        for s in &point.stats.per_strategy {
            w.write_record([
                fmt_sig9(point.value),
                s.strategy.name().to_string(),
                fmt_sig9(s.mean_rate),
                fmt_sig9(s.mean_c1),
                fmt_sig9(s.mean_c2),
                fmt_sig9(s.mean_tau),
                s.count.to_string(),
                seed.0.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(crate::Error::Scenario(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
