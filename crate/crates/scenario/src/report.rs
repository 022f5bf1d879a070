// SPDX-License-Identifier: Apache-2.0

//! Byte-deterministic run exports: identical runs must produce identical
//! files, so every float is printed with a fixed precision and all rows
//! follow the deterministic orderings of the run itself.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::sim::SimOutput;

pub const REPORT_FILES: [&str; 4] = ["timeseries.csv", "links.csv", "ledger.csv", "timeseries.dat"];

fn timeseries_csv(out: &SimOutput) -> String {
    let mut s = String::from("tick,instances,monitors,offered_mbps,max_risk,mean_risk\n");
    for tp in &out.series {
        writeln!(
            s,
            "{},{},{},{:.6},{:.6},{:.6}",
            tp.tick, tp.instances, tp.monitors, tp.offered_mbps, tp.max_risk, tp.mean_risk
        )
        .expect("string write");
    }
    s
}

fn links_csv(out: &SimOutput) -> String {
    let mut s = String::from("tick,link,risk\n");
    for lp in &out.links {
        writeln!(s, "{},{},{:.6}", lp.tick, lp.link, lp.risk).expect("string write");
    }
    s
}

fn ledger_csv(out: &SimOutput) -> String {
    let c = &out.ledger.counters;
    let mut s = String::from("counter,value\n");
    for (name, value) in [
        ("raw_samples", c.raw_samples),
        ("estimates", c.estimates),
        ("local_triggers", c.local_triggers),
        ("central_events", c.central_events),
        ("scale_ops", c.scale_ops),
        ("verification_runs", c.verification_runs),
        ("dead_letters", out.broker.dead_letters),
    ] {
        writeln!(s, "{name},{value}").expect("string write");
    }
    s
}

/// Plot-friendly whitespace table of the scaling trajectory.
fn timeseries_dat(out: &SimOutput) -> String {
    let mut s = String::from("# tick instances offered_mbps max_risk\n");
    for tp in &out.series {
        writeln!(s, "{} {} {:.6} {:.6}", tp.tick, tp.instances, tp.offered_mbps, tp.max_risk)
            .expect("string write");
    }
    s
}

/// Renders all report files as (name, contents) pairs, in `REPORT_FILES`
/// order.
pub fn report_strings(out: &SimOutput) -> Vec<(&'static str, String)> {
    vec![
        ("timeseries.csv", timeseries_csv(out)),
        ("links.csv", links_csv(out)),
        ("ledger.csv", ledger_csv(out)),
        ("timeseries.dat", timeseries_dat(out)),
    ]
}

/// Writes the report files into `dir` (created if missing); returns their
/// paths in `REPORT_FILES` order.
pub fn export_report(out: &SimOutput, dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, contents) in report_strings(out) {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        paths.push(path);
    }
    Ok(paths)
}
