//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use chs::angles::{build_constraints, find_interior_point, tangent_basis, AngleAssignment, InteriorPoint};
use chs::bench::read_manifest;
use chs::perm::ALL_PERMS;
use chs::{fixtures, Perm4, Triangulation};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// quadrature

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = GK_WEIGHTS[7] * f(c);
    let mut g = G_WEIGHTS[3] * f(c);
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth > 40 || (b - a) < 1e-14 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, tol, 0)
}

/// `log(2 sin t / (t (π - t)))`, smooth on `[0, π]`.
fn log_g(t: f64) -> f64 {
    let s = if t > PI / 2.0 { PI - t } else { t };
    let sinc = if s == 0.0 { 1.0 } else { s.sin() / s };
    (2.0 * sinc / (PI - s)).ln()
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `-∫₀ˣ log|2 sin t| dt` for `x` in `[0, π]`, splitting off the logarithmic singularities.
pub fn lobachevsky_quad(x: f64) -> f64 {
    assert!((0.0..=PI).contains(&x));
    let smooth = integrate(&log_g, 0.0, x, 1e-16);
    let log_t = xlogx(x) - x;
    let log_pi_t = xlogx(PI) - PI - xlogx(PI - x) + (PI - x);
    -(smooth + log_t + log_pi_t)
}

pub fn volume_quad(a: &AngleAssignment) -> f64 {
    a.angles.iter().map(|&x| lobachevsky_quad(x)).sum()
}

// ---------------------------------------------------------------------------
// fixtures

pub fn desk() -> Vec<(String, Triangulation)> {
    read_manifest(&fixtures::desk_manifest())
        .expect("desk manifest")
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let tri = Triangulation::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (name, tri)
        })
        .collect()
}

pub fn named_fixtures() -> Vec<(String, Triangulation)> {
    let mut v = vec![
        ("fig8".to_string(), fixtures::fig8()),
        ("m003".to_string(), fixtures::m003()),
        ("tref".to_string(), fixtures::tref()),
        ("deg2".to_string(), fixtures::deg2()),
        ("rep3".to_string(), fixtures::rep3()),
        ("flat1".to_string(), fixtures::flat1()),
    ];
    v.extend(desk());
    v
}

/// Fixtures with a non-empty angle-structure polytope.
pub fn feasible_fixtures() -> Vec<(String, Triangulation)> {
    named_fixtures()
        .into_iter()
        .filter(|(_, t)| matches!(find_interior_point(&build_constraints(t)), Ok(InteriorPoint::Point { .. })))
        .collect()
}

pub fn random_relabel(tri: &Triangulation, rng: &mut impl Rng) -> Triangulation {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..tri.len()).collect();
    order.shuffle(rng);
    let maps: Vec<Perm4> = (0..tri.len()).map(|_| ALL_PERMS[rng.gen_range(0..24)]).collect();
    tri.relabel(&order, &maps)
}

// ---------------------------------------------------------------------------
// isomorphism by exhaustive search

/// True when some relabeling takes `a` onto `b`.
pub fn isomorphic(a: &Triangulation, b: &Triangulation) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..b.len()).any(|target| ALL_PERMS.iter().any(|&p| extends(a, b, target, p)))
}

/// Follows the gluings from `0 ↦ (target, p)` and checks the induced map is an isomorphism.
fn extends(a: &Triangulation, b: &Triangulation, target: usize, p: Perm4) -> bool {
    let mut tet_map: Vec<Option<(usize, Perm4)>> = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    tet_map[0] = Some((target, p));
    used[target] = true;
    let mut queue = vec![0usize];
    while let Some(t) = queue.pop() {
        let (u, pt) = tet_map[t].unwrap();
        for f in 0..4 {
            match (a.gluing(t, f), b.gluing(u, pt.apply(f))) {
                (None, None) => {}
                (Some(ga), Some(gb)) => {
                    let want = gb.perm.compose(pt).compose(ga.perm.inverse());
                    match tet_map[ga.tet] {
                        Some((v, q)) if v == gb.tet && q == want => {}
                        Some(_) => return false,
                        None if used[gb.tet] => return false,
                        None => {
                            used[gb.tet] = true;
                            tet_map[ga.tet] = Some((gb.tet, want));
                            queue.push(ga.tet);
                        }
                    }
                }
                _ => return false,
            }
        }
    }
    tet_map.iter().all(Option::is_some)
}

// ---------------------------------------------------------------------------
// random points of the angle polytope

/// A random strictly interior angle structure: the LP point moved a random
/// fraction of the way to the boundary along a random tangent direction.
pub fn random_interior_point(tri: &Triangulation, rng: &mut impl Rng, reach: f64) -> AngleAssignment {
    let cs = build_constraints(tri);
    let InteriorPoint::Point { angles, .. } = find_interior_point(&cs).unwrap() else { panic!("feasible fixture") };
    let basis = tangent_basis(&cs);
    let coeffs = DVector::from_fn(basis.dimension(), |_, _| rng.gen_range(-1.0..1.0));
    let dir = &basis.columns * coeffs;
    let x = angles.as_vector();
    let mut t_max = f64::INFINITY;
    for (xi, di) in x.iter().zip(dir.iter()) {
        if *di < 0.0 {
            t_max = t_max.min(-xi / di);
        } else if *di > 0.0 {
            t_max = t_max.min((PI - xi) / di);
        }
    }
    let t = reach * t_max;
    let y = x + t * dir;
    AngleAssignment::new(y.iter().copied().collect())
}

/// Null space of `m` by SVD, independent of the crate's eigen-based basis.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.unwrap();
    let scale = svd.singular_values.max().max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] < 1e-10 * scale).collect();
    let mut out = DMatrix::zeros(cols, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &vt.row(i).transpose());
    }
    out
}

// ---------------------------------------------------------------------------
// linear programs: dense two-phase simplex with Bland's rule

const PIVOT_TOL: f64 = 1e-10;

fn pivot(t: &mut DMatrix<f64>, row: usize, col: usize) {
    let p = t[(row, col)];
    for j in 0..t.ncols() {
        t[(row, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i != row {
            let f = t[(i, col)];
            if f != 0.0 {
                for j in 0..t.ncols() {
                    let v = t[(row, j)];
                    t[(i, j)] -= f * v;
                }
            }
        }
    }
}

/// Runs simplex iterations for `cost` over columns `< allowed`; `false` if unbounded.
fn iterate(t: &mut DMatrix<f64>, basis: &mut [usize], cost: &[f64], allowed: usize) -> bool {
    let rhs = t.ncols() - 1;
    loop {
        let entering = (0..allowed).find(|&j| {
            !basis.contains(&j) && cost[j] - (0..basis.len()).map(|i| cost[basis[i]] * t[(i, j)]).sum::<f64>() > PIVOT_TOL
        });
        let Some(j) = entering else { return true };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..basis.len() {
            if t[(i, j)] > PIVOT_TOL {
                let r = t[(i, rhs)] / t[(i, j)];
                leave = match leave {
                    Some((k, best)) if r > best + 1e-12 || (r > best - 1e-12 && basis[k] < basis[i]) => Some((k, best)),
                    _ => Some((i, r)),
                };
            }
        }
        let Some((i, _)) = leave else { return false };
        pivot(t, i, j);
        basis[i] = j;
    }
}

/// Maximizes `c·y` subject to `A y = b`, `y ≥ 0`. `None` if infeasible or unbounded.
pub fn simplex_max(a: &DMatrix<f64>, b: &DVector<f64>, c: &[f64]) -> Option<Vec<f64>> {
    let (m, n) = a.shape();
    let w = n + m;
    let mut t = DMatrix::zeros(m, w + 1);
    for i in 0..m {
        let sg = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sg * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, w)] = sg * b[i];
    }
    let mut basis: Vec<usize> = (n..w).collect();
    let mut cost = vec![0.0; w];
    cost[n..].fill(-1.0);
    iterate(&mut t, &mut basis, &cost, w);
    let infeasibility: f64 = (0..m).filter(|&i| basis[i] >= n).map(|i| t[(i, w)]).sum();
    if infeasibility > 1e-9 {
        return None;
    }
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !basis.contains(&j) && t[(i, j)].abs() > 1e-9) {
                pivot(&mut t, i, j);
                basis[i] = j;
            }
        }
    }
    let mut cost = c.to_vec();
    cost.resize(w, 0.0);
    if !iterate(&mut t, &mut basis, &cost, n) {
        return None;
    }
    let mut y = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            y[j] = t[(i, w)];
        }
    }
    Some(y)
}

/// Maximizes the smallest angle outside `fixed` with `s ≤ 1`, where `fixed`
/// pins some angles. Angles are written `x = z + s`, `s = 1 - w`, `z, w ≥ 0`.
fn max_margin(tri: &Triangulation, fixed: &[(usize, f64)]) -> Option<(Vec<f64>, f64)> {
    let cs = build_constraints(tri);
    let (rows, n) = (cs.eq_matrix.nrows(), cs.variables());
    let free: Vec<usize> = (0..n).filter(|i| !fixed.iter().any(|f| f.0 == *i)).collect();
    // columns: z for free variables, then w
    let mut a = DMatrix::zeros(rows, free.len() + 1);
    let mut b = cs.eq_rhs.clone();
    for r in 0..rows {
        for (k, &i) in free.iter().enumerate() {
            a[(r, k)] = cs.eq_matrix[(r, i)];
            b[r] -= cs.eq_matrix[(r, i)];
            a[(r, free.len())] -= cs.eq_matrix[(r, i)];
        }
        for &(i, v) in fixed {
            b[r] -= cs.eq_matrix[(r, i)] * v;
        }
    }
    let mut c = vec![0.0; free.len() + 1];
    c[free.len()] = -1.0;
    let y = simplex_max(&a, &b, &c)?;
    let s = 1.0 - y[free.len()];
    let mut x = vec![0.0; n];
    for (k, &i) in free.iter().enumerate() {
        x[i] = y[k] + s;
    }
    for &(i, v) in fixed {
        x[i] = v;
    }
    Some((x, s))
}

/// Largest `s` with `E x = r`, `x ≥ s`, `s ≤ 1`; `None` when the equalities are inconsistent.
pub fn chebyshev_margin(tri: &Triangulation) -> Option<f64> {
    max_margin(tri, &[]).map(|(_, s)| s)
}

/// A point of the face where tetrahedron `tet` is flat with `π` on `pair`,
/// maximizing the smallest remaining angle. Returns the point and that margin.
pub fn face_point(tri: &Triangulation, tet: usize, pair: usize) -> Option<(Vec<f64>, f64)> {
    let fixed: Vec<(usize, f64)> = (0..3).map(|p| (3 * tet + p, if p == pair { PI } else { 0.0 })).collect();
    max_margin(tri, &fixed)
}

// ---------------------------------------------------------------------------
// derivative-free maximization

/// Golden-section maximum of a concave function on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (hi - lo).abs() < 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    let ends = [(lo, f(lo)), (hi, f(hi)), (t, f(t))];
    ends.into_iter().fold((t, f64::NEG_INFINITY), |best, (x, v)| if v > best.1 { (x, v) } else { best })
}

/// Maximizes a concave `f` over `{x0 + N u : 0 ≤ x ≤ π}` by line searches along
/// basis directions and random combinations of them.
pub fn maximize_on_affine(f: &impl Fn(&[f64]) -> f64, x0: &[f64], basis: &DMatrix<f64>, rounds: usize, rng: &mut impl Rng) -> (Vec<f64>, f64) {
    let mut x = DVector::from_column_slice(x0);
    let mut best = f(x.as_slice());
    if basis.ncols() == 0 {
        return (x.iter().copied().collect(), best);
    }
    for round in 0..rounds {
        let dir = if round % 2 == 0 {
            basis.column(round / 2 % basis.ncols()).into_owned()
        } else {
            let c = DVector::from_fn(basis.ncols(), |_, _| rng.gen_range(-1.0..1.0));
            basis * c
        };
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (xi, di) in x.iter().zip(dir.iter()) {
            if di.abs() < 1e-15 {
                continue;
            }
            let (a, b) = ((0.0 - xi) / di, (PI - xi) / di);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if !(lo < hi) {
            continue;
        }
        let eval = |t: f64| {
            let y: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, b)| (a + t * b).clamp(0.0, PI)).collect();
            f(&y)
        };
        let (t, v) = golden_max(eval, lo, hi);
        if v > best {
            best = v;
            x = DVector::from_iterator(x.len(), x.iter().zip(dir.iter()).map(|(a, b)| (a + t * b).clamp(0.0, PI)));
        }
    }
    (x.iter().copied().collect(), best)
}
