//! End-to-end search for the complete hyperbolic structure: maximize volume,
//! retriangulate on a boundary maximum, repeat.

use crate::angles::{
    build_constraints, check_structure, find_interior_point, tangent_basis, AngleAssignment, AngleError, InteriorPoint,
};
use crate::isosig::canonical_signature;
use crate::moves::{pachner_2_3, pachner_3_2, two_zero_edge};
use crate::search::{remove_flat_tet, SearchOptions, TraceEntry};
use crate::skeleton::{compute_edge_classes, validate_ideal, EdgeMap};
use crate::triangulation::Triangulation;
use crate::volume::{maximize, reduced_gradient, MaximizeOptions, OutcomeKind, VolumeError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashSet;
use std::time::Instant;
use thiserror::Error;

/// Weight of the fresh interior point when restarting from a carried structure.
const BLEND: f64 = 1e-3;
/// Attempts per move slot in a random retriangulation.
const REDRAWS: usize = 20;
const SUCCESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Guided,
    Random,
    Hybrid,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Guided => "guided",
            StrategyKind::Random => "random",
            StrategyKind::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "guided" => Ok(StrategyKind::Guided),
            "random" => Ok(StrategyKind::Random),
            "hybrid" => Ok(StrategyKind::Hybrid),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub seed: u64,
    /// Hybrid uses the guided search while fewer than this many tetrahedra are flat.
    pub hybrid_threshold: usize,
    pub phase_cap: usize,
}

impl Strategy {
    pub fn new(kind: StrategyKind, seed: u64) -> Self {
        Strategy { kind, seed, hybrid_threshold: 4, phase_cap: 50 }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineOptions {
    pub search: SearchOptions,
    pub maximize: MaximizeOptions,
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    NoAngleStructure,
    Exhausted,
}

/// What a phase did after optimizing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// Terminal phase, nothing applied.
    Stop,
    Guided,
    Random,
    /// Guided search failed and a random retriangulation was used instead.
    Fallback,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRecord {
    pub phase: usize,
    pub action: Action,
    pub tets: usize,
    pub moves: usize,
    /// `None` when the polytope was empty.
    pub outcome: Option<OutcomeKind>,
    pub volume: Option<f64>,
    pub flat_count: usize,
    pub seconds: f64,
    pub census: (usize, usize, usize),
    pub status: Option<Status>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PhaseLog {
    pub phases: Vec<PhaseRecord>,
}

impl PhaseLog {
    pub fn total_moves(&self) -> usize {
        self.phases.iter().map(|p| p.moves).sum()
    }

    pub fn fallbacks(&self) -> usize {
        self.phases.iter().filter(|p| p.action == Action::Fallback).count()
    }
}

#[derive(Clone, Debug)]
pub struct ChsResult {
    pub status: Status,
    pub tri: Triangulation,
    pub angles: Option<AngleAssignment>,
    pub volume: Option<f64>,
    pub log: PhaseLog,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input is not a valid one-cusped ideal triangulation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Angles(#[from] AngleError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// Repeated 3-2 moves and 2-0 collapses until neither applies.
/// Returns the simplified triangulation and the number of moves made.
pub fn greedy_simplify(tri: &Triangulation) -> (Triangulation, usize) {
    simplify_avoiding(tri, &HashSet::new())
}

/// As [`greedy_simplify`], skipping any move whose result has a signature in `avoid`.
fn simplify_avoiding(tri: &Triangulation, avoid: &HashSet<String>) -> (Triangulation, usize) {
    let mut cur = tri.clone();
    let census = validate_ideal(&cur).census();
    let mut count = 0;
    let allowed = |t: &Triangulation| avoid.is_empty() || canonical_signature(t).is_ok_and(|sig| !avoid.contains(&sig));
    'outer: loop {
        let edges = compute_edge_classes(&cur);
        for e in edges.iter().filter(|e| e.degree() == 3) {
            if let Ok(out) = pachner_3_2(&cur, e.id) {
                if allowed(&out.tri) {
                    cur = out.tri;
                    count += 1;
                    continue 'outer;
                }
            }
        }
        for e in edges.iter().filter(|e| e.degree() == 2) {
            if let Ok(out) = two_zero_edge(&cur, e.id) {
                let report = validate_ideal(&out.tri);
                if report.is_ideal() && report.census() == census && allowed(&out.tri) {
                    cur = out.tri;
                    count += 1;
                    continue 'outer;
                }
            }
        }
        return (cur, count);
    }
}

/// `4n` random 2-3 moves followed by simplification; returns the result and the move count.
/// Simplification never returns to the input triangulation itself.
pub fn random_retriangulate(tri: &Triangulation, rng: &mut impl Rng) -> (Triangulation, usize) {
    let avoid = canonical_signature(tri).into_iter().collect();
    random_retriangulate_avoiding(tri, rng, &avoid)
}

/// As [`random_retriangulate`], never simplifying into a triangulation whose signature is in `avoid`.
pub fn random_retriangulate_avoiding(tri: &Triangulation, rng: &mut impl Rng, avoid: &HashSet<String>) -> (Triangulation, usize) {
    let mut cur = tri.clone();
    let slots = 4 * tri.len();
    let mut count = 0;
    for _ in 0..slots {
        for _ in 0..REDRAWS {
            let tet = rng.gen_range(0..cur.len());
            let face = rng.gen_range(0..4);
            if let Ok(out) = pachner_2_3(&cur, tet, face) {
                cur = out.tri;
                count += 1;
                break;
            }
        }
    }
    let (cur, simplified) = simplify_avoiding(&cur, avoid);
    (cur, count + simplified)
}

fn blend(carried: &AngleAssignment, fresh: &AngleAssignment) -> AngleAssignment {
    AngleAssignment::new(carried.angles.iter().zip(&fresh.angles).map(|(c, f)| (1.0 - BLEND) * c + BLEND * f).collect())
}

/// Searches for the complete hyperbolic structure of `tri`.
pub fn find_chs(tri: &Triangulation, strategy: &Strategy, opts: &PipelineOptions) -> Result<ChsResult, PipelineError> {
    let report = validate_ideal(tri);
    if !report.is_ideal() {
        return Err(PipelineError::Invalid(report.issues.join("; ")));
    }
    let census = report.census();
    let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
    let mut cur = tri.clone();
    let mut carried: Option<AngleAssignment> = None;
    let mut log = PhaseLog::default();
    let mut trace = Vec::new();
    let mut last_volume = None;
    // random phases restart from the input and avoid every triangulation already tried
    let mut tried: HashSet<String> = HashSet::new();

    for phase in 1..=strategy.phase_cap {
        let start = Instant::now();
        let phase_census = validate_ideal(&cur).census();
        assert_eq!(phase_census, census, "retriangulation changed the vertex census");
        let mut record = PhaseRecord {
            phase,
            action: Action::Stop,
            tets: cur.len(),
            moves: 0,
            outcome: None,
            volume: None,
            flat_count: 0,
            seconds: 0.0,
            census: phase_census,
            status: None,
        };
        if let Ok(sig) = canonical_signature(&cur) {
            tried.insert(sig);
        }
        let cs = build_constraints(&cur);
        let lp_point = match find_interior_point(&cs)? {
            InteriorPoint::Point { angles, .. } => angles,
            InteriorPoint::Empty { .. } => {
                if phase == 1 {
                    record.status = Some(Status::NoAngleStructure);
                    record.seconds = start.elapsed().as_secs_f64();
                    log.phases.push(record);
                    return Ok(ChsResult { status: Status::NoAngleStructure, tri: cur, angles: None, volume: None, log, trace });
                }
                // a retriangulation lost the polytope; try another one
                let (next, moves) = random_retriangulate_avoiding(tri, &mut rng, &tried);
                record.action = Action::Random;
                record.moves = moves;
                record.seconds = start.elapsed().as_secs_f64();
                log.phases.push(record);
                cur = next;
                carried = None;
                continue;
            }
        };
        let basis = tangent_basis(&cs);
        let start_point = match carried.take() {
            Some(c) if c.angles.len() == lp_point.angles.len() => blend(&c, &lp_point),
            _ => lp_point,
        };
        let out = maximize(&start_point, &basis, &opts.maximize)?;
        record.outcome = Some(out.kind);
        record.volume = Some(out.volume);
        record.flat_count = out.flat_tets.len();
        last_volume = Some(out.volume);

        let mut kind = out.kind;
        if kind == OutcomeKind::InteriorChs {
            let valid = check_structure(&cur, &out.point).is_valid(SUCCESS_TOL);
            let grad = reduced_gradient(&out.point, &basis).map(|g| g.norm()).unwrap_or(f64::INFINITY);
            if valid && grad < opts.maximize.tau_grad {
                record.status = Some(Status::Success);
                record.seconds = start.elapsed().as_secs_f64();
                log.phases.push(record);
                return Ok(ChsResult {
                    status: Status::Success,
                    tri: cur,
                    volume: Some(out.volume),
                    angles: Some(out.point),
                    log,
                    trace,
                });
            }
            kind = OutcomeKind::Stalled;
            record.outcome = Some(kind);
        }

        let guided = match strategy.kind {
            StrategyKind::Guided => true,
            StrategyKind::Random => false,
            StrategyKind::Hybrid => out.flat_tets.len() < strategy.hybrid_threshold,
        };
        let mut removed = None;
        if guided && kind == OutcomeKind::Boundary {
            let map = EdgeMap::build(&cur);
            let mut flats = out.flat_tets.clone();
            flats.sort_by_key(|f| {
                let (e1, e2) = crate::search::pi_edges(&map, *f);
                (map.classes[e1].degree().min(map.classes[e2].degree()), f.tet)
            });
            for f in flats {
                let sink = if opts.trace { Some(&mut trace) } else { None };
                if let Ok(r) = remove_flat_tet(&cur, &out.point, f, &opts.search, sink) {
                    removed = Some(r);
                    break;
                }
            }
        }
        match removed {
            Some(r) => {
                record.action = Action::Guided;
                record.moves = r.moves.len();
                cur = r.tri;
                carried = Some(r.angles);
            }
            None => {
                // a guided failure gets one random phase; the next boundary retries guided
                record.action = if guided { Action::Fallback } else { Action::Random };
                let (next, moves) = random_retriangulate_avoiding(tri, &mut rng, &tried);
                record.moves = moves;
                cur = next;
                carried = None;
            }
        }
        record.seconds = start.elapsed().as_secs_f64();
        log.phases.push(record);
    }
    if let Some(last) = log.phases.last_mut() {
        last.status = Some(Status::Exhausted);
    }
    Ok(ChsResult { status: Status::Exhausted, tri: cur, angles: None, volume: last_volume, log, trace })
}
