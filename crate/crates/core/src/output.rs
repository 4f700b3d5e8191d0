//! CSV tables and figure files for finished runs and sweeps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::engine::{MetricsSeries, RunOutput, SweepCell, Tracked};
use crate::error::{Error, Result};
use crate::model::AgentState;
use crate::scenario::OutputKind;
use crate::svg;

pub const HISTOGRAM_BINS: usize = 20;

pub const TIMESERIES_HEADER: [&str; 5] = ["tick", "attr", "mean", "variance", "net_change"];
pub const SNAPSHOT_HEADER: [&str; 14] = [
    "id", "sex", "age", "env", "exp", "wca", "know", "trust", "access", "freq", "s_pp", "s_sm",
    "s_gov", "purchase_prob",
];
pub const HISTOGRAM_HEADER: [&str; 3] = ["bin_start", "bin_end", "count"];

/// Counts of final purchase probabilities in 20 equal bins over [0, 1].
pub fn histogram(agents: &[AgentState]) -> [usize; HISTOGRAM_BINS] {
    let mut counts = [0; HISTOGRAM_BINS];
    for a in agents {
        let bin = ((a.purchase_prob * HISTOGRAM_BINS as f64).floor() as usize).min(HISTOGRAM_BINS - 1);
        counts[bin] += 1;
    }
    counts
}

pub fn write_timeseries<W: Write>(metrics: &MetricsSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMESERIES_HEADER)?;
    let net: Vec<Vec<f64>> = Tracked::ALL.iter().map(|&t| metrics.net_change(t)).collect();
    for (row, tick) in metrics.ticks.iter().enumerate() {
        for (i, &what) in Tracked::ALL.iter().enumerate() {
            w.write_record([
                tick.to_string(),
                what.name().to_string(),
                metrics.mean(what)[row].to_string(),
                metrics.variance(what)[row].to_string(),
                net[i][row].to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_snapshot<W: Write>(agents: &[AgentState], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOT_HEADER)?;
    for a in agents {
        let mut row = vec![a.id.to_string()];
        row.extend(a.attributes.to_array().iter().map(f64::to_string));
        let s = a.susceptibilities;
        row.extend([s.s_pp, s.s_sm, s.s_gov, a.purchase_prob].iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_histogram<W: Write>(agents: &[AgentState], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HISTOGRAM_HEADER)?;
    for (i, c) in histogram(agents).iter().enumerate() {
        let start = i as f64 / HISTOGRAM_BINS as f64;
        let end = (i + 1) as f64 / HISTOGRAM_BINS as f64;
        w.write_record([start.to_string(), end.to_string(), c.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn render(kind: OutputKind, run: &RunOutput, title: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match kind {
        OutputKind::TimeseriesCsv => write_timeseries(&run.metrics, &mut buf)?,
        OutputKind::FinalSnapshotCsv => write_snapshot(&run.agents, &mut buf)?,
        OutputKind::HistogramCsv => write_histogram(&run.agents, &mut buf)?,
        OutputKind::SvgLines => buf = svg::lines_svg(&run.metrics, title).into_bytes(),
        OutputKind::SvgHistogram => {
            buf = svg::histogram_svg(&histogram(&run.agents), title).into_bytes()
        }
    }
    Ok(buf)
}

/// Writes the requested artefacts into `dir`, creating it if needed.
///
/// If any file fails, the ones already written by this call are removed.
pub fn emit_outputs(
    run: &RunOutput,
    kinds: &[OutputKind],
    dir: &Path,
    title: &str,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for &kind in kinds {
        let path = dir.join(kind.file_name());
        let result = render(kind, run, title)
            .and_then(|bytes| fs::write(&path, bytes).map_err(|e| Error::io(&path, e)));
        if let Err(e) = result {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            return Err(e);
        }
        written.push(path);
    }
    Ok(written)
}

/// One row per sweep cell with the mean and sample sd of final net changes.
pub fn write_sweep_summary<W: Write>(cells: &[SweepCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let keys: Vec<_> = cells
        .first()
        .map(|c| c.assignments.iter().map(|(k, _)| *k).collect())
        .unwrap_or_default();
    let mut header = vec!["cell".to_string()];
    header.extend(keys.iter().map(|k| k.name().to_string()));
    header.push("seeds".into());
    for what in Tracked::ALL {
        header.push(format!("{}_net_change_mean", what.name()));
        header.push(format!("{}_net_change_sd", what.name()));
    }
    w.write_record(&header)?;
    for cell in cells {
        let mut row = vec![cell.label.clone()];
        row.extend(cell.assignments.iter().map(|(_, v)| v.to_string()));
        row.push(cell.runs.len().to_string());
        for what in Tracked::ALL {
            let s = cell.stat(what);
            row.push(s.mean.to_string());
            row.push(s.sd.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
