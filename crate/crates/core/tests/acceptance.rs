//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

mod common;

use chs::angles::{build_constraints, find_interior_point, tangent_basis, AngleAssignment, InteriorPoint};
use chs::bench::{read_manifest, run_bench, BenchConfig, BenchRow};
use chs::fixtures;
use chs::geometric::{apply_2_3_geometric, apply_3_2_geometric, can_2_3_geometric};
use chs::isosig::{canonical_signature, decode_signature};
use chs::lobachevsky::lobachevsky;
use chs::moves::{names_for_23, names_for_32, MoveBlocked, NEW_23};
use chs::perm::edge_pair;
use chs::pipeline::{find_chs, PipelineOptions, Status, Strategy, StrategyKind};
use chs::skeleton::{compute_edge_classes, validate_ideal, EdgeMap};
use chs::volume::{classify_flat, maximize, reduced_gradient, volume, MaximizeOptions, OutcomeKind, ROUNDING};
use chs::{Exec, Triangulation};
use common::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn fig8_end_to_end() -> Outcome {
    let oracle = 6.0 * lobachevsky_quad(PI / 3.0);
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_chs"))
        .args(["solve", &fixture_path("fig8.json"), "--json"])
        .output()
        .expect("run chs");
    let elapsed = start.elapsed().as_secs_f64();
    let v: serde_json::Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => return (false, format!("unparsable output: {e}")),
    };
    let kind_ok = v["kind"] == "interior_chs" && out.status.code() == Some(0);
    let angles: Vec<f64> = v["point"]["angles"].as_array().map(|a| a.iter().filter_map(|x| x.as_f64()).collect()).unwrap_or_default();
    let angle_err = angles.iter().map(|a| (a - PI / 3.0).abs()).fold(0.0, f64::max);
    let vol = v["volume"].as_f64().unwrap_or(f64::NAN);
    let ok = kind_ok
        && angles.len() == 6
        && angle_err < 1e-9
        && (vol - oracle).abs() < 1e-9
        && (oracle - 2.029_883_212_819).abs() < 1e-9
        && elapsed < 1.0;
    (ok, format!("kind {}, max angle error {angle_err:.1e}, volume {vol:.12} vs quadrature {oracle:.12}, {elapsed:.3}s", v["kind"]))
}

fn lobachevsky_suite() -> Outcome {
    let mut worst_quad: f64 = 0.0;
    for k in 0..1000 {
        let x = PI * k as f64 / 999.0;
        worst_quad = worst_quad.max((lobachevsky(x) - lobachevsky_quad(x)).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_id: f64 = 0.0;
    for _ in 0..100 {
        let x: f64 = rng.gen_range(-10.0..10.0);
        worst_id = worst_id
            .max((lobachevsky(-x) + lobachevsky(x)).abs())
            .max((lobachevsky(x + PI) - lobachevsky(x)).abs())
            .max((lobachevsky(2.0 * x) - 2.0 * (lobachevsky(x) + lobachevsky(x + PI / 2.0))).abs());
    }
    let l6 = lobachevsky(PI / 6.0);
    let ok = worst_quad < 1e-12 && worst_id < 1e-10 && (l6 - 0.507_470_803_20).abs() < 1e-10;
    (ok, format!("quadrature gap {worst_quad:.1e} on 1000 points, identity gap {worst_id:.1e}, L(pi/6) = {l6:.11}"))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut points = 0;
    let feasible = feasible_fixtures();
    for (_, tri) in &feasible {
        let basis = tangent_basis(&build_constraints(tri));
        let mut done = 0;
        while done < 100 {
            let reach = rng.gen_range(0.05..0.95);
            let a = random_interior_point(tri, &mut rng, reach);
            if a.min_angle() < 1e-4 {
                continue;
            }
            let g = reduced_gradient(&a, &basis).unwrap();
            let scale = g.amax().max(1.0);
            for j in 0..basis.dimension() {
                let col = basis.columns.column(j);
                let shift = |s: f64| AngleAssignment::new(a.angles.iter().zip(col.iter()).map(|(x, d)| x + s * d).collect());
                let fd = (volume(&shift(h)) - volume(&shift(-h))) / (2.0 * h);
                worst = worst.max((g[j] - fd).abs() / scale);
            }
            done += 1;
            points += 1;
        }
    }
    (worst < 1e-6, format!("{points} points on {} fixtures, worst relative gap {worst:.1e}", feasible.len()))
}

// --- geometric moves --------------------------------------------------------

fn label(names: &[u8; 4], name: u8) -> usize {
    names.iter().position(|&x| x == name).unwrap()
}

/// Largest `m` such that the new angles of a 2-3 move on this face can all be
/// at least `m`, from the linear conditions on the new tetrahedra alone.
fn lambda_margin(a: &AngleAssignment, t1: usize, n1: &[u8; 4], t2: usize, n2: &[u8; 4]) -> Result<f64, String> {
    let mut m = DMatrix::zeros(13, 9);
    let mut r = DVector::zeros(13);
    for k in 0..3 {
        for p in 0..3 {
            m[(k, 3 * k + p)] = 1.0;
        }
        r[k] = PI;
    }
    let mut row = 3;
    for x in 0..5u8 {
        for y in x + 1..5u8 {
            for (k, names) in NEW_23.iter().enumerate() {
                if names.contains(&x) && names.contains(&y) {
                    m[(row, 3 * k + edge_pair(label(names, x), label(names, y)))] += 1.0;
                }
            }
            let mut old = 0.0;
            for (t, names) in [(t1, n1), (t2, n2)] {
                if names.contains(&x) && names.contains(&y) {
                    old += a.get(t, edge_pair(label(names, x), label(names, y)));
                }
            }
            // the new edge A-E goes around once
            r[row] = if (x, y) == (0, 4) { 2.0 * PI } else { old };
            row += 1;
        }
    }
    let svd = m.clone().svd(true, true);
    let x0 = svd.solve(&r, 1e-12).map_err(|e| e.to_string())?;
    let resid = (&m * &x0 - &r).amax();
    if resid > 1e-9 {
        return Err(format!("inconsistent system, residual {resid:e}"));
    }
    let null = null_space(&m);
    if null.ncols() != 1 {
        return Err(format!("solution set has dimension {}", null.ncols()));
    }
    let v = null.column(0);
    let line = |lambda: f64| (0..9).map(|i| x0[i] + lambda * v[i]).fold(f64::INFINITY, f64::min);
    let mut best = line(0.0);
    for i in 0..9 {
        for j in i + 1..9 {
            if (v[i] - v[j]).abs() > 1e-14 {
                best = best.max(line((x0[j] - x0[i]) / (v[i] - v[j])));
            }
        }
    }
    Ok(best)
}

fn max_face_sum(a: &AngleAssignment, t1: usize, n1: &[u8; 4], t2: usize, n2: &[u8; 4]) -> f64 {
    let s = |t: usize, n: &[u8; 4], x: u8, y: u8| a.get(t, edge_pair(label(n, x), label(n, y)));
    [(1, 2), (2, 3), (3, 1)].iter().map(|&(x, y)| s(t1, n1, x, y) + s(t2, n2, x, y)).fold(f64::NEG_INFINITY, f64::max)
}

fn structure_gap(tri: &Triangulation, a: &AngleAssignment) -> f64 {
    let mut gap: f64 = 0.0;
    for t in 0..tri.len() {
        gap = gap.max((a.triple(t).iter().sum::<f64>() - PI).abs());
    }
    for e in compute_edge_classes(tri) {
        let s: f64 = e.incidences.iter().map(|i| a.get(i.tet, i.pair())).sum();
        gap = gap.max((s - 2.0 * PI).abs());
    }
    gap
}

fn sorted_triples(a: &AngleAssignment, tets: &[usize]) -> Vec<[f64; 3]> {
    let mut v: Vec<[f64; 3]> = tets
        .iter()
        .map(|&t| {
            let mut tr = a.triple(t);
            tr.sort_by(f64::total_cmp);
            tr
        })
        .collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

fn geometric_suite() -> Outcome {
    let feasible = feasible_fixtures();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let boundary_points: Vec<(usize, AngleAssignment)> = feasible
        .iter()
        .enumerate()
        .filter_map(|(i, (_, tri))| {
            let cs = build_constraints(tri);
            let InteriorPoint::Point { angles, .. } = find_interior_point(&cs).ok()? else { return None };
            let out = maximize(&angles, &tangent_basis(&cs), &MaximizeOptions::default()).ok()?;
            (out.kind == OutcomeKind::Boundary).then_some((i, out.point))
        })
        .collect();

    let (mut agree, mut ambiguous, mut blocked, mut applied) = (0, 0, 0, 0);
    let mut failures: Vec<String> = Vec::new();
    let (mut worst_sum, mut worst_trip): (f64, f64) = (0.0, 0.0);
    let mut checked_32 = 0;
    for k in 0..1000 {
        let (fi, a) = match k % 3 {
            0 | 1 => {
                let fi = rng.gen_range(0..feasible.len());
                let reach = if k % 3 == 0 { rng.gen_range(0.0..0.9) } else { 1.0 - 10f64.powf(-rng.gen_range(1.0..9.0)) };
                (fi, random_interior_point(&feasible[fi].1, &mut rng, reach))
            }
            _ => boundary_points[rng.gen_range(0..boundary_points.len())].clone(),
        };
        let tri = &feasible[fi].1;
        let tet = rng.gen_range(0..tri.len());
        let face = rng.gen_range(0..4);

        // (iv) every combinatorially valid 3-2 is geometric
        for e in compute_edge_classes(tri) {
            if names_for_32(&e).is_ok() {
                checked_32 += 1;
                if apply_3_2_geometric(tri, &a, e.id).is_err() {
                    failures.push(format!("3-2 refused on {} edge {}", feasible[fi].0, e.id));
                }
            }
        }

        let code = can_2_3_geometric(tri, &a, tet, face);
        let Ok([(t1, n1), (t2, n2)]) = names_for_23(tri, tet, face) else {
            if matches!(code, Err(MoveBlocked::Combinatorial(_))) {
                agree += 1;
            } else {
                failures.push("combinatorial block not reported".into());
            }
            continue;
        };
        // (i) agreement with the linear-feasibility oracle
        let margin = match lambda_margin(&a, t1, &n1, t2, &n2) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("oracle: {e}"));
                continue;
            }
        };
        let near = (PI - max_face_sum(&a, t1, &n1, t2, &n2)).abs() < 1e-7;
        if code.is_ok() == (margin > 1e-12) {
            agree += 1;
        } else if near {
            ambiguous += 1;
        } else {
            failures.push(format!("state {k}: move {:?} but oracle margin {margin:e}", code.is_ok()));
        }
        if code.is_err() {
            blocked += 1;
            continue;
        }
        // (ii) structure and untouched angles
        let m = apply_2_3_geometric(tri, &a, tet, face).unwrap();
        applied += 1;
        // residual added by the move on top of that of the input
        let base = structure_gap(tri, &a);
        worst_sum = worst_sum.max(structure_gap(m.tri(), &m.angles) - base);
        if m.angles.min_angle() < 0.0 {
            failures.push(format!("state {k}: negative angle after 2-3"));
        }
        for (old, new) in m.outcome.remap.iter().enumerate() {
            if let Some(n) = new {
                if a.triple(old).map(f64::to_bits) != m.angles.triple(*n).map(f64::to_bits) {
                    failures.push(format!("state {k}: tetrahedron {old} changed"));
                }
            }
        }
        // (iii) round trip
        let nt = m.outcome.new[0].0;
        let edge = EdgeMap::build(m.tri()).class_of(nt, 0, 3);
        let back = match apply_3_2_geometric(m.tri(), &m.angles, edge) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("state {k}: inverse 3-2 refused: {e}"));
                continue;
            }
        };
        worst_sum = worst_sum.max(structure_gap(back.tri(), &back.angles) - base);
        if canonical_signature(back.tri()) != canonical_signature(tri) {
            failures.push(format!("state {k}: round trip changed the signature"));
        }
        for (old, mid) in m.outcome.remap.iter().enumerate() {
            if let Some(mid) = mid {
                let fin = back.outcome.remap[*mid].unwrap();
                for p in 0..3 {
                    worst_trip = worst_trip.max((a.get(old, p) - back.angles.get(fin, p)).abs());
                }
            }
        }
        let rebuilt: Vec<usize> = back.outcome.new.iter().map(|x| x.0).collect();
        for (x, y) in sorted_triples(&a, &[t1, t2]).iter().zip(sorted_triples(&back.angles, &rebuilt)) {
            for p in 0..3 {
                worst_trip = worst_trip.max((x[p] - y[p]).abs());
            }
        }
    }
    let ok = failures.is_empty() && worst_sum < 1e-10 && worst_trip < 1e-10 && blocked > 0 && applied > 0;
    let mut detail = format!(
        "1000 states: {agree} agree, {ambiguous} within 1e-7 of the threshold, {blocked} blocked, {applied} applied; \
         sum gap {worst_sum:.1e}, round-trip gap {worst_trip:.1e}, {checked_32} 3-2 checks"
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; {} failures, first: {f}", failures.len()));
    }
    (ok, detail)
}

// --- boundary ---------------------------------------------------------------

fn boundary_classification() -> Outcome {
    let tri = fixtures::flat1();
    let cs = build_constraints(&tri);
    let InteriorPoint::Point { angles, .. } = find_interior_point(&cs).unwrap() else {
        return (false, "no interior point".into());
    };
    let out = maximize(&angles, &tangent_basis(&cs), &MaximizeOptions::default()).unwrap();
    let mut degenerate_ok = true;
    for t in 0..tri.len() {
        let mut tr = out.point.triple(t);
        tr.sort_by(f64::total_cmp);
        if tr[0] < 1e-4 && !(tr[1] < 1e-4 && (tr[2] - PI).abs() < 1e-4) {
            degenerate_ok = false;
        }
    }
    let c = classify_flat(&out.point, 1e-4);

    // oracle: derivative-free maximization on every face with one flat tetrahedron, and inside
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let v = |x: &[f64]| x.iter().map(|&y| lobachevsky(y)).sum::<f64>();
    let mut best = (f64::NEG_INFINITY, None);
    let interior = null_space(&cs.eq_matrix);
    let (_, vi) = maximize_on_affine(&v, &angles.angles, &interior, 4000, &mut rng);
    if vi > best.0 {
        best = (vi, None);
    }
    for t in 0..tri.len() {
        for p in 0..3 {
            let Some((x0, margin)) = face_point(&tri, t, p) else { continue };
            if margin < 0.0 {
                continue;
            }
            let mut m = DMatrix::zeros(cs.eq_matrix.nrows() + 3, cs.variables());
            m.rows_mut(0, cs.eq_matrix.nrows()).copy_from(&cs.eq_matrix);
            for q in 0..3 {
                m[(cs.eq_matrix.nrows() + q, 3 * t + q)] = 1.0;
            }
            let (_, vf) = maximize_on_affine(&v, &x0, &null_space(&m), 4000, &mut rng);
            if vf > best.0 {
                best = (vf, Some((t, p)));
            }
        }
    }
    let gap = (out.volume - best.0).abs();
    let face_matches = best.1.is_some_and(|(t, p)| out.flat_tets.iter().any(|f| f.tet == t && f.pi_pair == p));
    let ok = out.kind == OutcomeKind::Boundary && degenerate_ok && c.anomalies.is_empty() && c.other.is_empty() && gap < 1e-6 && face_matches;
    (
        ok,
        format!(
            "{:?}, flat {:?}, anomalies {}, volume {:.9} vs oracle {:.9} on face {:?} (gap {gap:.1e})",
            out.kind,
            out.flat_tets.iter().map(|f| (f.tet, f.pi_pair)).collect::<Vec<_>>(),
            c.anomalies.len(),
            out.volume,
            best.0,
            best.1
        ),
    )
}

fn infeasibility_gates() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, tri) in [("deg2", fixtures::deg2()), ("tref", fixtures::tref())] {
        for kind in [StrategyKind::Guided, StrategyKind::Random, StrategyKind::Hybrid] {
            let r = find_chs(&tri, &Strategy::new(kind, 0), &PipelineOptions::default()).unwrap();
            ok &= r.status == Status::NoAngleStructure && r.log.phases.len() == 1;
        }
        let code = Command::new(env!("CARGO_BIN_EXE_chs"))
            .args(["retriangulate", &fixture_path(&format!("{name}.json"))])
            .output()
            .unwrap()
            .status
            .code();
        ok &= code == Some(2);
        let margin = chebyshev_margin(&tri);
        ok &= margin.is_none_or(|m| m <= 1e-7);
        parts.push(format!("{name}: exit {code:?}, oracle margin {margin:?}"));
    }
    (ok, parts.join(", "))
}

// --- desk-scale comparison --------------------------------------------------

fn strip_time(rows: &[BenchRow]) -> Vec<BenchRow> {
    rows.iter().cloned().map(|mut r| {
        r.seconds = 0.0;
        r
    }).collect()
}

fn desk_comparison() -> Outcome {
    let paths = read_manifest(&fixtures::desk_manifest()).unwrap();
    let seeds = [0, 1, 2];
    let strategies = [StrategyKind::Guided, StrategyKind::Random];
    let config = BenchConfig { phase_cap: 50, exec: Exec::Parallel, ..Default::default() };
    let rows = run_bench(&paths, &strategies, &seeds, &config);
    let again = run_bench(&paths, &strategies, &seeds, &BenchConfig { exec: Exec::Sequential, ..config });
    let deterministic = strip_time(&rows) == strip_time(&again);

    let (mut guided_ok, mut fewer, mut all_boundary, mut steady) = (0, 0, true, true);
    for (i, p) in paths.iter().enumerate() {
        let tri = Triangulation::from_json(&std::fs::read_to_string(p).unwrap()).unwrap();
        let cs = build_constraints(&tri);
        if let Ok(InteriorPoint::Point { angles, .. }) = find_interior_point(&cs) {
            let out = maximize(&angles, &tangent_basis(&cs), &MaximizeOptions::default()).unwrap();
            all_boundary &= out.kind == OutcomeKind::Boundary;
        } else {
            all_boundary = false;
        }
        let mine = &rows[i * 6..i * 6 + 6];
        let guided: Vec<&BenchRow> = mine.iter().filter(|r| r.strategy == "guided").collect();
        let random: Vec<&BenchRow> = mine.iter().filter(|r| r.strategy == "random").collect();
        steady &= guided.iter().all(|r| r.phases == guided[0].phases);
        let r = find_chs(&tri, &Strategy::new(StrategyKind::Guided, 0), &PipelineOptions::default()).unwrap();
        steady &= r.log.fallbacks() == 0;
        let g = guided[0];
        if g.success && g.phases <= 30 {
            guided_ok += 1;
        }
        let random_mean = random.iter().map(|r| r.moves as f64).sum::<f64>() / random.len() as f64;
        if g.success && (g.moves as f64) < random_mean {
            fewer += 1;
        }
    }
    let n = paths.len();
    let success_rate = guided_ok as f64 / n as f64;
    let fewer_rate = fewer as f64 / n as f64;
    let ok = n >= 20 && success_rate >= 0.8 && fewer_rate >= 0.6 && deterministic && steady && all_boundary;
    (
        ok,
        format!(
            "{n} fixtures, guided success within 30 phases {success_rate:.2}, fewer moves than random {fewer_rate:.2}, \
             deterministic {deterministic}, guided fallback-free and seed-independent {steady}, all start on the boundary {all_boundary}"
        ),
    )
}

fn signature_suite() -> Outcome {
    let all = named_fixtures();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut sigs = Vec::new();
    let mut problems = Vec::new();
    for (name, tri) in &all {
        let sig = canonical_signature(tri).unwrap();
        for _ in 0..100 {
            if canonical_signature(&random_relabel(tri, &mut rng)).unwrap() != sig {
                problems.push(format!("{name}: relabeling changed the signature"));
                break;
            }
        }
        match decode_signature(&sig) {
            Ok(back) => {
                if canonical_signature(&back).unwrap() != sig || !isomorphic(&back, tri) {
                    problems.push(format!("{name}: decode does not round-trip"));
                }
            }
            Err(e) => problems.push(format!("{name}: decode failed: {e}")),
        }
        sigs.push(sig);
    }
    let mut distinct_pairs = 0;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let iso = isomorphic(&all[i].1, &all[j].1);
            if !iso {
                distinct_pairs += 1;
            }
            if iso != (sigs[i] == sigs[j]) {
                problems.push(format!("{} vs {}: isomorphic {iso}, signatures equal {}", all[i].0, all[j].0, sigs[i] == sigs[j]));
            }
        }
    }
    let mut detail = format!("{} fixtures x 100 relabelings, {distinct_pairs} non-isomorphic pairs separated", all.len());
    if let Some(p) = problems.first() {
        detail.push_str(&format!("; {} problems, first: {p}", problems.len()));
    }
    (problems.is_empty(), detail)
}

fn invariant_gates() -> Outcome {
    let mut problems = Vec::new();
    let mut one_vertex = 0;
    for (name, tri) in named_fixtures() {
        let report = validate_ideal(&tri);
        if report.is_one_vertex_ideal() {
            one_vertex += 1;
            if report.edge_classes != tri.len() {
                problems.push(format!("{name}: {} edges for {} tetrahedra", report.edge_classes, tri.len()));
            }
        }
    }
    let mut phases = 0;
    let mut runs = vec![("flat1".to_string(), fixtures::flat1())];
    runs.extend(desk());
    for (name, tri) in &runs {
        let census = validate_ideal(tri).census();
        for kind in [StrategyKind::Guided, StrategyKind::Random, StrategyKind::Hybrid] {
            let r = find_chs(tri, &Strategy::new(kind, 7), &PipelineOptions::default()).unwrap();
            for p in &r.log.phases {
                phases += 1;
                if p.census != census {
                    problems.push(format!("{name} {kind:?} phase {}: census {:?}", p.phase, p.census));
                }
            }
            if validate_ideal(&r.tri).census() != census {
                problems.push(format!("{name} {kind:?}: final census changed"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut iterates = 0;
    for (name, tri) in feasible_fixtures() {
        let basis = tangent_basis(&build_constraints(&tri));
        for k in 0..6 {
            let reach = if k == 0 { 0.0 } else { rng.gen_range(0.0..0.99) };
            let start = random_interior_point(&tri, &mut rng, reach);
            let out = maximize(&start, &basis, &MaximizeOptions::default()).unwrap();
            iterates += out.history.len();
            if !out.history.windows(2).all(|w| w[1] >= w[0] - ROUNDING * w[0].abs().max(1.0)) {
                problems.push(format!("{name}: volume decreased along iterates"));
            }
        }
    }
    let mut detail = format!("{one_vertex} one-vertex fixtures, {phases} pipeline phases, {iterates} optimizer iterates");
    if let Some(p) = problems.first() {
        detail.push_str(&format!("; {} problems, first: {p}", problems.len()));
    }
    (problems.is_empty(), detail)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("figure-eight end to end", fig8_end_to_end),
        ("lobachevsky suite", lobachevsky_suite),
        ("gradient check", gradient_check),
        ("geometric moves", geometric_suite),
        ("boundary classification", boundary_classification),
        ("infeasibility gates", infeasibility_gates),
        ("guided retriangulation at desk scale", desk_comparison),
        ("signature suite", signature_suite),
        ("invariant gates", invariant_gates),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!("{} {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
