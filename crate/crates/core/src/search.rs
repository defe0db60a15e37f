//! Removal of flat tetrahedra by a backtracking search over geometric moves.
//!
//! A flat tetrahedron has angle `π` on two opposite edges. It can only disappear
//! in a 3-2 move, so the search lowers the degree of one of those edges to three
//! with geometric 2-3 moves around it. A 2-3 move blocked by a face edge `e_f`
//! whose angle sum reaches `π` is unlocked by first reducing `e_f` to degree
//! three (leaving the two tetrahedra of the blocked face alone) and collapsing it
//! with a 3-2 move.

use crate::angles::{check_structure, AngleAssignment};
use crate::geometric::{apply_2_3_geometric, apply_3_2_geometric, can_2_3_geometric, GeoMove};
use crate::isosig::canonical_signature;
use crate::moves::MoveBlocked;
use crate::perm::opposite_edge;
use crate::skeleton::{EdgeClass, EdgeMap};
use crate::triangulation::Triangulation;
use crate::volume::FlatTet;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::HashSet;

/// Equality residual above which a search state is discarded.
const STRUCTURE_TOL: f64 = 1e-9;
/// Hard bound on the nesting of search calls.
const MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub width: usize,
    pub exhaustive_depth: usize,
    pub recursion_budget: usize,
    pub visited_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { width: 8, exhaustive_depth: 2, recursion_budget: 3, visited_cap: 10_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MoveKind {
    #[serde(rename = "2-3")]
    Move23,
    #[serde(rename = "3-2")]
    Move32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Location {
    Face { tet: usize, face: usize },
    Edge { edge: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub location: Location,
    pub was_recursive: bool,
}

/// A search state as seen from outside.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub tri: Triangulation,
    pub angles: AngleAssignment,
    pub target_edge: usize,
    pub depth: usize,
    pub moves_taken: Vec<MoveRecord>,
    pub sig: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub sig: String,
    pub depth: usize,
    pub target_degree: usize,
    #[serde(rename = "move")]
    pub last_move: Option<MoveRecord>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub signatures_stored: usize,
    pub deepest_recursion: usize,
    pub cap_reached: bool,
}

/// Candidate move around an edge.
#[derive(Clone, Debug, PartialEq)]
pub enum Candidate {
    /// Geometric 2-3 on a face around the edge; `angle` is the smaller of the two
    /// dihedral angles at the edge in the merged tetrahedra.
    Direct { tet: usize, face: usize, angle: f64 },
    /// 2-3 blocked by `blocking_edge`, whose smallest incident angle is `min_angle`.
    Recursive { tet: usize, face: usize, blocking_edge: usize, vertices: (usize, usize), min_angle: f64 },
}

/// Edge class position that survives moves: a tetrahedron and two of its vertices.
type EdgeRep = (usize, usize, usize);

#[derive(Clone, Debug)]
struct State {
    tri: Triangulation,
    angles: AngleAssignment,
    moves: Vec<MoveRecord>,
    edges: Vec<Option<EdgeRep>>,
    tets: Vec<Option<usize>>,
}

impl State {
    fn edge_class(&self, map: &EdgeMap, slot: usize) -> Option<usize> {
        self.edges[slot].map(|(t, a, b)| map.class_of(t, a, b))
    }

    fn after(&self, m: GeoMove, record: MoveRecord) -> Option<State> {
        let report = check_structure(m.tri(), &m.angles);
        if !report.is_valid(STRUCTURE_TOL) {
            return None;
        }
        let edges = self.edges.iter().map(|e| e.and_then(|(t, a, b)| m.outcome.track_edge(t, a, b))).collect();
        let tets = self.tets.iter().map(|t| t.and_then(|t| m.outcome.track_tet(t))).collect();
        let mut moves = self.moves.clone();
        moves.push(record);
        Some(State { tri: m.outcome.tri, angles: m.angles, moves, edges, tets })
    }
}

/// Smallest dihedral angle among the incidences of an edge class.
pub fn min_incident_angle(class: &EdgeClass, a: &AngleAssignment) -> f64 {
    class.incidences.iter().map(|inc| a.get(inc.tet, inc.pair())).fold(f64::INFINITY, f64::min)
}

/// The two edge classes carrying the `π` angle of a flat tetrahedron.
pub fn pi_edges(map: &EdgeMap, flat: FlatTet) -> (usize, usize) {
    let (a, b) = (0, flat.pi_pair + 1);
    let (c, d) = opposite_edge(a, b);
    (map.class_of(flat.tet, a, b), map.class_of(flat.tet, c, d))
}

/// Of the two `π` edges, the one whose smallest incident angle is larger; ties go to the lower id.
pub fn select_pi_edge(tri: &Triangulation, a: &AngleAssignment, flat: FlatTet) -> usize {
    let map = EdgeMap::build(tri);
    let (e1, e2) = pi_edges(&map, flat);
    prefer(&map, a, e1, e2).0
}

fn prefer(map: &EdgeMap, a: &AngleAssignment, e1: usize, e2: usize) -> (usize, Option<usize>) {
    if e1 == e2 {
        return (e1, None);
    }
    let m1 = min_incident_angle(&map.classes[e1], a);
    let m2 = min_incident_angle(&map.classes[e2], a);
    match m1.partial_cmp(&m2).unwrap_or(Ordering::Equal) {
        Ordering::Greater => (e1, Some(e2)),
        Ordering::Less => (e2, Some(e1)),
        Ordering::Equal => (e1.min(e2), Some(e1.max(e2))),
    }
}

/// Candidate moves around `edge`, direct ones first (smallest angle at the edge
/// first), then recursive ones by the edge-selection criterion on the blocking edge.
pub fn order_moves(tri: &Triangulation, a: &AngleAssignment, edge: usize) -> Vec<Candidate> {
    order_moves_protected(tri, a, edge, &[])
}

fn order_moves_protected(tri: &Triangulation, a: &AngleAssignment, edge: usize, protected: &[usize]) -> Vec<Candidate> {
    let map = EdgeMap::build(tri);
    let class = &map.classes[edge];
    let mut direct = Vec::new();
    let mut recursive = Vec::new();
    let mut seen_faces = HashSet::new();
    let k = class.incidences.len();
    for (i, inc) in class.incidences.iter().enumerate() {
        let face = inc.forward_face();
        let Some(g) = tri.gluing(inc.tet, face) else { continue };
        if protected.contains(&inc.tet) || protected.contains(&g.tet) {
            continue;
        }
        let key = (inc.tet.min(g.tet), if inc.tet <= g.tet { face } else { g.perm.apply(face) });
        if !seen_faces.insert(key) {
            continue;
        }
        let next = class.incidences[(i + 1) % k];
        match can_2_3_geometric(tri, a, inc.tet, face) {
            Ok(()) => {
                let angle = a.get(inc.tet, inc.pair()).min(a.get(next.tet, next.pair()));
                direct.push(Candidate::Direct { tet: inc.tet, face, angle });
            }
            Err(MoveBlocked::Geometric { edge_class, tet, vertices, .. }) if edge_class != edge => {
                debug_assert_eq!(tet, inc.tet);
                let min_angle = min_incident_angle(&map.classes[edge_class], a);
                recursive.push(Candidate::Recursive { tet: inc.tet, face, blocking_edge: edge_class, vertices, min_angle });
            }
            Err(_) => {}
        }
    }
    direct.sort_by(|x, y| match (x, y) {
        (Candidate::Direct { angle: p, .. }, Candidate::Direct { angle: q, .. }) => p.total_cmp(q),
        _ => Ordering::Equal,
    });
    recursive.sort_by(|x, y| match (x, y) {
        (
            Candidate::Recursive { min_angle: p, blocking_edge: i, .. },
            Candidate::Recursive { min_angle: q, blocking_edge: j, .. },
        ) => q.total_cmp(p).then(i.cmp(j)),
        _ => Ordering::Equal,
    });
    direct.extend(recursive);
    direct
}

struct Ctx<'a> {
    opts: SearchOptions,
    visited: HashSet<String>,
    stats: SearchStats,
    trace: Option<&'a mut Vec<TraceEntry>>,
    best: Option<(usize, State)>,
}

impl Ctx<'_> {
    /// Registers a new state; false if it was seen before or the cap is hit.
    fn admit(&mut self, state: &State, depth: usize, target_degree: usize) -> bool {
        if self.visited.len() >= self.opts.visited_cap {
            self.stats.cap_reached = true;
            return false;
        }
        let Ok(sig) = canonical_signature(&state.tri) else { return false };
        if !self.visited.insert(sig.clone()) {
            return false;
        }
        self.stats.signatures_stored = self.visited.len();
        if let Some(trace) = self.trace.as_deref_mut() {
            trace.push(TraceEntry { sig, depth, target_degree, last_move: state.moves.last().copied() });
        }
        true
    }
}

/// Lowers the degree of the tracked edge `slot` to three; `protected` tetrahedra
/// (tracked slots) are never touched.
fn reduce(state: State, slot: usize, protected: &[usize], budget: usize, depth: usize, recursive: bool, ctx: &mut Ctx) -> Option<State> {
    let map = EdgeMap::build(&state.tri);
    let edge = state.edge_class(&map, slot)?;
    let class = &map.classes[edge];
    if class.degree() == 3 && class.distinct_tets().len() == 3 && !class.reversed {
        return Some(state);
    }
    if depth >= MAX_DEPTH {
        return None;
    }
    ctx.stats.nodes_expanded += 1;
    if !recursive && ctx.best.as_ref().is_none_or(|(d, _)| class.degree() < *d) {
        ctx.best = Some((class.degree(), state.clone()));
    }
    let guarded: Vec<usize> = protected.iter().filter_map(|&s| state.tets[s]).collect();
    let mut candidates = order_moves_protected(&state.tri, &state.angles, edge, &guarded);
    if depth >= ctx.opts.exhaustive_depth {
        candidates.truncate(ctx.opts.width);
    }
    for cand in candidates {
        match cand {
            Candidate::Direct { tet, face, .. } => {
                let Ok(m) = apply_2_3_geometric(&state.tri, &state.angles, tet, face) else { continue };
                let record = MoveRecord { kind: MoveKind::Move23, location: Location::Face { tet, face }, was_recursive: recursive };
                let Some(child) = state.after(m, record) else { continue };
                let degree = child_degree(&child, slot);
                if !ctx.admit(&child, depth + 1, degree) {
                    continue;
                }
                if let Some(done) = reduce(child, slot, protected, budget, depth + 1, recursive, ctx) {
                    return Some(done);
                }
            }
            Candidate::Recursive { tet, face, vertices, .. } => {
                if budget == 0 {
                    continue;
                }
                let Some(g) = state.tri.gluing(tet, face) else { continue };
                let mut marked = state.clone();
                let ef_slot = marked.edges.len();
                marked.edges.push(Some((tet, vertices.0, vertices.1)));
                let t1_slot = marked.tets.len();
                marked.tets.push(Some(tet));
                marked.tets.push(Some(g.tet));
                let mut inner: Vec<usize> = protected.to_vec();
                inner.extend([t1_slot, t1_slot + 1]);
                ctx.stats.deepest_recursion = ctx.stats.deepest_recursion.max(ctx.opts.recursion_budget - budget + 1);
                let Some(sub) = reduce(marked, ef_slot, &inner, budget - 1, depth + 1, true, ctx) else { continue };
                let sub_map = EdgeMap::build(&sub.tri);
                let Some(ef) = sub.edge_class(&sub_map, ef_slot) else { continue };
                let outer: Vec<usize> = protected.iter().filter_map(|&s| sub.tets[s]).collect();
                if sub_map.classes[ef].incidences.iter().any(|inc| outer.contains(&inc.tet)) {
                    continue;
                }
                let Ok(m) = apply_3_2_geometric(&sub.tri, &sub.angles, ef) else { continue };
                let record = MoveRecord { kind: MoveKind::Move32, location: Location::Edge { edge: ef }, was_recursive: true };
                let Some(mut child) = sub.after(m, record) else { continue };
                child.edges.truncate(ef_slot);
                child.tets.truncate(t1_slot);
                let degree = child_degree(&child, slot);
                if !ctx.admit(&child, depth + 1, degree) {
                    continue;
                }
                if let Some(done) = reduce(child, slot, protected, budget, depth + 1, recursive, ctx) {
                    return Some(done);
                }
            }
        }
    }
    None
}

fn child_degree(state: &State, slot: usize) -> usize {
    let map = EdgeMap::build(&state.tri);
    state.edge_class(&map, slot).map_or(0, |e| map.classes[e].degree())
}

/// Outcome of one edge-degree reduction.
#[derive(Clone, Debug)]
pub enum SearchResult {
    Success(SearchNode),
    Failure { best: SearchNode, stats: SearchStats },
}

fn node(state: State, target_slot: usize, depth: usize) -> SearchNode {
    let map = EdgeMap::build(&state.tri);
    let target_edge = state.edge_class(&map, target_slot).unwrap_or(usize::MAX);
    let sig = canonical_signature(&state.tri).unwrap_or_default();
    SearchNode { tri: state.tri, angles: state.angles, target_edge, depth, moves_taken: state.moves, sig }
}

fn root_state(tri: &Triangulation, a: &AngleAssignment, edge: usize) -> State {
    let map = EdgeMap::build(tri);
    let inc = map.classes[edge].incidences[0];
    let (x, y) = inc.endpoints();
    State { tri: tri.clone(), angles: a.clone(), moves: Vec::new(), edges: vec![Some((inc.tet, x, y))], tets: Vec::new() }
}

/// Reduces the degree of `edge` to three with geometric moves.
pub fn reduce_edge_degree(tri: &Triangulation, a: &AngleAssignment, edge: usize, opts: &SearchOptions) -> SearchResult {
    let mut ctx = Ctx { opts: *opts, visited: HashSet::new(), stats: SearchStats::default(), trace: None, best: None };
    let root = root_state(tri, a, edge);
    if let Ok(sig) = canonical_signature(tri) {
        ctx.visited.insert(sig);
    }
    match reduce(root.clone(), 0, &[], opts.recursion_budget, 0, false, &mut ctx) {
        Some(done) => {
            let depth = done.moves.len();
            SearchResult::Success(node(done, 0, depth))
        }
        None => {
            let best = ctx.best.take().map(|(_, s)| s).unwrap_or(root);
            let depth = best.moves.len();
            SearchResult::Failure { best: node(best, 0, depth), stats: ctx.stats }
        }
    }
}

/// A successful removal.
#[derive(Clone, Debug)]
pub struct Removal {
    pub tri: Triangulation,
    pub angles: AngleAssignment,
    pub moves: Vec<MoveRecord>,
    pub stats: SearchStats,
}

#[derive(Clone, Debug)]
pub struct RemovalFailure {
    pub best: SearchNode,
    pub stats: SearchStats,
}

/// Eliminates the flat tetrahedron `flat`: reduces one of its `π` edges to degree
/// three and applies a geometric 3-2 move there. Both `π` edges are tried.
pub fn remove_flat_tet(
    tri: &Triangulation,
    a: &AngleAssignment,
    flat: FlatTet,
    opts: &SearchOptions,
    trace: Option<&mut Vec<TraceEntry>>,
) -> Result<Removal, RemovalFailure> {
    let map = EdgeMap::build(tri);
    let (e1, e2) = pi_edges(&map, flat);
    let (first, second) = prefer(&map, a, e1, e2);
    let mut ctx = Ctx { opts: *opts, visited: HashSet::new(), stats: SearchStats::default(), trace, best: None };
    if let Ok(sig) = canonical_signature(tri) {
        ctx.visited.insert(sig);
    }
    for edge in std::iter::once(first).chain(second) {
        let root = root_state(tri, a, edge);
        let Some(done) = reduce(root, 0, &[], opts.recursion_budget, 0, false, &mut ctx) else { continue };
        let map = EdgeMap::build(&done.tri);
        let Some(e) = done.edge_class(&map, 0) else { continue };
        let Ok(m) = apply_3_2_geometric(&done.tri, &done.angles, e) else { continue };
        let record = MoveRecord { kind: MoveKind::Move32, location: Location::Edge { edge: e }, was_recursive: false };
        let Some(fin) = done.after(m, record) else { continue };
        let sig = canonical_signature(&fin.tri).unwrap_or_default();
        if let Some(trace) = ctx.trace.as_deref_mut() {
            trace.push(TraceEntry { sig, depth: fin.moves.len(), target_degree: 0, last_move: fin.moves.last().copied() });
        }
        return Ok(Removal { tri: fin.tri, angles: fin.angles, moves: fin.moves, stats: ctx.stats });
    }
    let best = match ctx.best.take() {
        Some((_, s)) => node(s, 0, 0),
        None => node(root_state(tri, a, first), 0, 0),
    };
    Err(RemovalFailure { best, stats: ctx.stats })
}

/// Re-applies recorded moves; returns `None` if one of them no longer applies.
pub fn replay(tri: &Triangulation, a: &AngleAssignment, moves: &[MoveRecord]) -> Option<(Triangulation, AngleAssignment)> {
    let mut cur = (tri.clone(), a.clone());
    for m in moves {
        let g = match (m.kind, m.location) {
            (MoveKind::Move23, Location::Face { tet, face }) => apply_2_3_geometric(&cur.0, &cur.1, tet, face).ok()?,
            (MoveKind::Move32, Location::Edge { edge }) => apply_3_2_geometric(&cur.0, &cur.1, edge).ok()?,
            _ => return None,
        };
        cur = (g.outcome.tri, g.angles);
    }
    Some(cur)
}
