//! Strategy comparison over a manifest of fixtures, written as CSV.

use crate::exec::Exec;
use crate::isosig::canonical_signature;
use crate::pipeline::{find_chs, PipelineOptions, Status, Strategy, StrategyKind};
use crate::triangulation::Triangulation;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const CSV_HEADER: [&str; 9] = ["name", "sig", "strategy", "seed", "success", "phases", "moves", "volume", "seconds"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    /// Signature of the input, or a note when the fixture could not be used.
    pub sig: String,
    pub strategy: String,
    pub seed: u64,
    pub success: bool,
    pub phases: usize,
    pub moves: usize,
    pub volume: Option<f64>,
    pub seconds: f64,
}

/// Fixture paths listed in a manifest, one per line, relative to the manifest's directory.
/// Blank lines and lines starting with `#` are skipped.
pub fn read_manifest(path: &Path) -> io::Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| dir.join(l))
        .collect())
}

fn fixture_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn load(path: &Path) -> Result<Triangulation, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Triangulation::from_json(&text).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub phase_cap: usize,
    pub options: PipelineOptions,
    pub exec: Exec,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { phase_cap: 50, options: PipelineOptions::default(), exec: Exec::Parallel }
    }
}

/// Runs one cell per (fixture, strategy, seed); rows come back in that order.
pub fn run_bench(paths: &[PathBuf], strategies: &[StrategyKind], seeds: &[u64], config: &BenchConfig) -> Vec<BenchRow> {
    let fixtures: Vec<(String, Result<Triangulation, String>)> =
        paths.iter().map(|p| (fixture_name(p), load(p))).collect();
    let mut cells = Vec::new();
    for f in 0..fixtures.len() {
        for &kind in strategies {
            for &seed in seeds {
                cells.push((f, kind, seed));
            }
        }
    }
    config.exec.map(&cells, |&(f, kind, seed)| {
        let (name, tri) = &fixtures[f];
        let failed = |note: String| BenchRow {
            name: name.clone(),
            sig: note,
            strategy: kind.name().to_string(),
            seed,
            success: false,
            phases: 0,
            moves: 0,
            volume: None,
            seconds: 0.0,
        };
        let tri = match tri {
            Ok(t) => t,
            Err(e) => return failed(format!("unreadable: {e}")),
        };
        let sig = canonical_signature(tri).unwrap_or_default();
        let strategy = Strategy { phase_cap: config.phase_cap, ..Strategy::new(kind, seed) };
        let start = Instant::now();
        match find_chs(tri, &strategy, &config.options) {
            Ok(r) => BenchRow {
                name: name.clone(),
                sig,
                strategy: kind.name().to_string(),
                seed,
                success: r.status == Status::Success,
                phases: r.log.phases.len(),
                moves: r.log.total_moves(),
                volume: r.volume,
                seconds: start.elapsed().as_secs_f64(),
            },
            Err(e) => failed(format!("rejected: {e}")),
        }
    })
}

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.name.clone(),
            r.sig.clone(),
            r.strategy.clone(),
            r.seed.to_string(),
            r.success.to_string(),
            r.phases.to_string(),
            r.moves.to_string(),
            r.volume.map(|v| format!("{v:.12}")).unwrap_or_default(),
            format!("{:.6}", r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<BenchRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(csv::Error::from(io::Error::new(io::ErrorKind::InvalidData, format!("unexpected header {header:?}"))));
    }
    r.deserialize().collect()
}

/// Cumulative success fraction for each strategy: `curve[k]` counts rows that
/// succeeded with at most `k` of the measured quantity.
pub fn success_curve(rows: &[BenchRow], strategy: &str, measure: impl Fn(&BenchRow) -> usize, upto: usize) -> Vec<f64> {
    let subset: Vec<&BenchRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
    if subset.is_empty() {
        return vec![0.0; upto + 1];
    }
    (0..=upto)
        .map(|k| subset.iter().filter(|r| r.success && measure(r) <= k).count() as f64 / subset.len() as f64)
        .collect()
}

/// Plain-text summary: success rate by phase count and by move count.
pub fn summary(rows: &[BenchRow]) -> String {
    let mut by_strategy: BTreeMap<&str, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        by_strategy.entry(r.strategy.as_str()).or_default().push(r);
    }
    let max_phases = rows.iter().map(|r| r.phases).max().unwrap_or(0);
    let move_marks = [0usize, 1, 2, 5, 10, 20, 50, 100, 200, 500];
    let mut s = String::new();
    let _ = writeln!(s, "success rate by phases");
    let _ = write!(s, "{:>10}", "phases");
    for name in by_strategy.keys() {
        let _ = write!(s, " {name:>8}");
    }
    let _ = writeln!(s);
    let curves: Vec<Vec<f64>> = by_strategy.keys().map(|n| success_curve(rows, n, |r| r.phases, max_phases)).collect();
    for k in 1..=max_phases {
        let _ = write!(s, "{k:>10}");
        for c in &curves {
            let _ = write!(s, " {:>8.3}", c[k]);
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "success rate by moves");
    let _ = write!(s, "{:>10}", "moves");
    for name in by_strategy.keys() {
        let _ = write!(s, " {name:>8}");
    }
    let _ = writeln!(s);
    let max_moves = rows.iter().map(|r| r.moves).max().unwrap_or(0).max(*move_marks.last().unwrap());
    let curves: Vec<Vec<f64>> = by_strategy.keys().map(|n| success_curve(rows, n, |r| r.moves, max_moves)).collect();
    for &m in &move_marks {
        let _ = write!(s, "{m:>10}");
        for c in &curves {
            let _ = write!(s, " {:>8.3}", c[m]);
        }
        let _ = writeln!(s);
    }
    for (name, rs) in &by_strategy {
        let ok = rs.iter().filter(|r| r.success).count();
        let mean_moves = rs.iter().map(|r| r.moves as f64).sum::<f64>() / rs.len() as f64;
        let _ = writeln!(s, "{name}: {ok}/{} succeeded, mean moves {mean_moves:.1}", rs.len());
    }
    s
}
