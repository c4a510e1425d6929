use std::io::Write;

use super::SweepRow;
use crate::error::{EssError, Result};

pub const CSV_HEADER: [&str; 15] = [
    "model",
    "rho",
    "n",
    "n1",
    "n2",
    "b",
    "m",
    "b1",
    "m1",
    "b2",
    "m2",
    "blocking",
    "ess_full",
    "ess_block",
    "eff",
];

fn num(x: f64, round: Option<usize>) -> String {
    match round {
        Some(d) => format!("{x:.d$}"),
        None => format!("{x:.16e}"),
    }
}

fn opt(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows as RFC 4180 CSV. Reals carry 17 significant digits unless
/// `round` fixes the number of decimals.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W, round: Option<usize>) -> Result<()> {
    let io = |e: csv::Error| EssError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            num(r.rho, round),
            r.n.to_string(),
            opt(r.n1),
            opt(r.n2),
            opt(r.b),
            r.m.to_string(),
            opt(r.b1),
            opt(r.m1),
            opt(r.b2),
            opt(r.m2),
            r.blocking.clone(),
            num(r.ess_full, round),
            num(r.ess_block, round),
            num(r.eff, round),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
