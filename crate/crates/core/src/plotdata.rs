//! Plot-ready text: the exploration series and the presence bands of the
//! neutral features (a band per maximal run of iterations with the feature
//! present, inclusive on both ends).

use crate::environment::Feature;
use crate::error::{Error, Result};
use crate::trace::{format_real, write_atomic, Trace};
use std::fmt::Write as _;
use std::path::Path;

pub const EXPLORATION_FILE: &str = "exploration.csv";
pub const FEATURES_FILE: &str = "features.csv";

pub fn presence_intervals(trace: &Trace, feature: Feature) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut open: Option<(u64, u64)> = None;
    for r in &trace.rows {
        match (r.feature(feature), open) {
            (true, None) => open = Some((r.t, r.t)),
            (true, Some((start, _))) => open = Some((start, r.t)),
            (false, Some(band)) => {
                out.push(band);
                open = None;
            }
            (false, None) => {}
        }
    }
    out.extend(open);
    out
}

pub fn exploration_csv(trace: &Trace) -> String {
    let mut s = String::from("t,E\n");
    for r in &trace.rows {
        let _ = writeln!(s, "{},{}", r.t, format_real(r.e));
    }
    s
}

pub fn features_csv(trace: &Trace) -> String {
    let mut s = String::from("feature,start,end\n");
    for f in Feature::ALL {
        for (start, end) in presence_intervals(trace, f) {
            let _ = writeln!(s, "{f},{start},{end}");
        }
    }
    s
}

/// Writes `exploration.csv` and `features.csv` into `dir`, creating it if needed.
pub fn write_plotdata(trace: &Trace, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_atomic(
        &dir.join(EXPLORATION_FILE),
        exploration_csv(trace).as_bytes(),
    )?;
    write_atomic(&dir.join(FEATURES_FILE), features_csv(trace).as_bytes())?;
    Ok(())
}
