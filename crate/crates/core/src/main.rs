use chs::angles::{build_constraints, find_interior_point, tangent_basis, InteriorPoint};
use chs::bench::{read_manifest, run_bench, summary, write_csv, BenchConfig};
use chs::isosig::{canonical_signature, decode_signature};
use chs::moves::{pachner_2_3, pachner_3_2};
use chs::pipeline::{find_chs, PipelineOptions, Status, Strategy, StrategyKind};
use chs::search::SearchOptions;
use chs::skeleton::validate_ideal;
use chs::volume::{maximize, MaximizeOptions, OutcomeKind};
use chs::{Exec, Triangulation};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_NO_STRUCTURE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "chs", version, about = "Complete hyperbolic structures on ideal triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MoveArg {
    #[value(name = "23")]
    TwoThree,
    #[value(name = "32")]
    ThreeTwo,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a triangulation (JSON gluing table or signature).
    Check { file: PathBuf },
    /// Maximize volume on the given triangulation without retriangulating.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = chs::volume::TAU_GRAD)]
        tol: f64,
        #[arg(long, default_value_t = chs::volume::MAX_ITER)]
        max_iter: usize,
        #[arg(long)]
        json: bool,
    },
    /// Search for the complete structure, retriangulating as needed.
    Retriangulate {
        file: PathBuf,
        #[arg(long, default_value = "guided")]
        strategy: StrategyKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 50)]
        phases: usize,
        /// Write the search trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the final triangulation as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the isomorphism signature.
    Isosig { file: PathBuf },
    /// Apply one combinatorial move and print the result as JSON.
    Move {
        file: PathBuf,
        #[arg(long)]
        kind: MoveArg,
        /// `tet,face` for a 2-3 move, an edge id for a 3-2 move.
        #[arg(long)]
        at: String,
    },
    /// Compare strategies over a manifest of fixtures.
    Bench {
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "guided,random")]
        strategies: Vec<StrategyKind>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        seeds: Vec<u64>,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        phases: usize,
        #[arg(long)]
        sequential: bool,
    },
}

fn load(path: &Path) -> Result<Triangulation, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    match Triangulation::from_json(&text) {
        Ok(t) => Ok(t),
        Err(json_err) => decode_signature(text.trim()).map_err(|_| format!("{}: {json_err}", path.display())),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Check { file } => {
            let tri = load(&file)?;
            let report = validate_ideal(&tri);
            println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
            Ok(if report.is_one_vertex_ideal() { 0 } else { EXIT_USAGE })
        }
        Command::Solve { file, tol, max_iter, json } => {
            let tri = load(&file)?;
            let cs = build_constraints(&tri);
            let start = match find_interior_point(&cs).map_err(|e| e.to_string())? {
                InteriorPoint::Point { angles, .. } => angles,
                InteriorPoint::Empty { margin } => {
                    if json {
                        println!("{}", json!({ "status": "no_angle_structure", "margin": margin }));
                    } else {
                        println!("no strict angle structure (margin {margin:e})");
                    }
                    return Ok(EXIT_NO_STRUCTURE);
                }
            };
            let opts = MaximizeOptions { tau_grad: tol, max_iter, ..Default::default() };
            let out = maximize(&start, &tangent_basis(&cs), &opts).map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
            } else {
                println!("outcome: {:?}", out.kind);
                println!("volume: {:.12}", out.volume);
                println!("iterations: {}, gradient norm: {:e}", out.iterations, out.gradient_norm);
                for t in 0..out.point.tets() {
                    let [a, b, c] = out.point.triple(t);
                    println!("tet {t}: {a:.12} {b:.12} {c:.12}");
                }
                for f in &out.flat_tets {
                    println!("flat: tet {} pair {}", f.tet, f.pi_pair);
                }
            }
            Ok(if out.kind == OutcomeKind::InteriorChs { 0 } else { EXIT_EXHAUSTED })
        }
        Command::Retriangulate { file, strategy, seed, width, depth, phases, trace, out } => {
            let tri = load(&file)?;
            let opts = PipelineOptions {
                search: SearchOptions { width, exhaustive_depth: depth, ..Default::default() },
                trace: trace.is_some(),
                ..Default::default()
            };
            let strategy = Strategy { phase_cap: phases, ..Strategy::new(strategy, seed) };
            let result = find_chs(&tri, &strategy, &opts).map_err(|e| e.to_string())?;
            for p in &result.log.phases {
                println!("{}", serde_json::to_string(p).map_err(|e| e.to_string())?);
            }
            println!(
                "status: {:?}, phases: {}, moves: {}, tets: {}",
                result.status,
                result.log.phases.len(),
                result.log.total_moves(),
                result.tri.len()
            );
            if let Some(v) = result.volume {
                println!("volume: {v:.12}");
            }
            if let Some(path) = trace {
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| e.to_string())?);
                for entry in &result.trace {
                    writeln!(f, "{}", serde_json::to_string(entry).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                }
            }
            if let Some(path) = out {
                std::fs::write(&path, result.tri.to_json()).map_err(|e| e.to_string())?;
            }
            Ok(match result.status {
                Status::Success => 0,
                Status::NoAngleStructure => EXIT_NO_STRUCTURE,
                Status::Exhausted => EXIT_EXHAUSTED,
            })
        }
        Command::Isosig { file } => {
            let tri = load(&file)?;
            println!("{}", canonical_signature(&tri).map_err(|e| e.to_string())?);
            Ok(0)
        }
        Command::Move { file, kind, at } => {
            let tri = load(&file)?;
            let outcome = match kind {
                MoveArg::TwoThree => {
                    let (t, f) = at.split_once(',').ok_or("--at expects `tet,face` for a 2-3 move")?;
                    let t: usize = t.trim().parse().map_err(|_| format!("bad tetrahedron `{t}`"))?;
                    let f: usize = f.trim().parse().map_err(|_| format!("bad face `{f}`"))?;
                    if t >= tri.len() || f >= 4 {
                        return Err(format!("no face {f} on tetrahedron {t}"));
                    }
                    pachner_2_3(&tri, t, f)
                }
                MoveArg::ThreeTwo => {
                    let e: usize = at.trim().parse().map_err(|_| format!("bad edge `{at}`"))?;
                    pachner_3_2(&tri, e)
                }
            };
            let outcome = outcome.map_err(|e| e.to_string())?;
            println!("{}", outcome.tri.to_json());
            Ok(0)
        }
        Command::Bench { manifest, strategies, seeds, out, phases, sequential } => {
            let paths = read_manifest(&manifest).map_err(|e| format!("{}: {e}", manifest.display()))?;
            let config = BenchConfig {
                phase_cap: phases,
                exec: if sequential { Exec::Sequential } else { Exec::Parallel },
                ..Default::default()
            };
            let rows = run_bench(&paths, &strategies, &seeds, &config);
            let file = std::fs::File::create(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            write_csv(&rows, file).map_err(|e| e.to_string())?;
            print!("{}", summary(&rows));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
