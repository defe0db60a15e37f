//! Volume functional on the angle polytope and its maximization.

use crate::angles::{AngleAssignment, TangentBasis};
use crate::lobachevsky::lobachevsky;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

pub const TAU_GRAD: f64 = 1e-10;
pub const EPS_FLAT: f64 = 1e-6;
pub const MAX_ITER: usize = 500;

/// Below this angle an iterate that has not matched the flat pattern is given up on.
const HARD_FLOOR: f64 = 1e-13;
const FRACTION_TO_BOUNDARY: f64 = 0.9;
const ARMIJO: f64 = 1e-4;
const NEGLIGIBLE_GAIN: f64 = 1e-13;
/// Volume decrease tolerated when the step is below the working precision.
pub const ROUNDING: f64 = 1e-14;

pub fn tet_volume(angles: [f64; 3]) -> f64 {
    angles.iter().map(|&x| lobachevsky(x)).sum()
}

pub fn volume(a: &AngleAssignment) -> f64 {
    a.angles.iter().map(|&x| lobachevsky(x)).sum()
}

#[derive(Debug, Error, PartialEq)]
pub enum VolumeError {
    #[error("angle {index} = {value} is not in (0, π)")]
    NotInterior { index: usize, value: f64 },
    #[error("basis has {rows} rows for {angles} angles")]
    Shape { rows: usize, angles: usize },
}

fn check_interior(a: &AngleAssignment) -> Result<(), VolumeError> {
    match a.angles.iter().position(|&x| !(x > 0.0 && x < PI)) {
        Some(index) => Err(VolumeError::NotInterior { index, value: a.angles[index] }),
        None => Ok(()),
    }
}

/// Component `j` is `Σ_i -B[i][j] log sin(A_i)`.
pub fn reduced_gradient(a: &AngleAssignment, b: &TangentBasis) -> Result<DVector<f64>, VolumeError> {
    check_interior(a)?;
    if b.columns.nrows() != a.angles.len() {
        return Err(VolumeError::Shape { rows: b.columns.nrows(), angles: a.angles.len() });
    }
    let full = DVector::from_iterator(a.angles.len(), a.angles.iter().map(|x| -x.sin().ln()));
    Ok(b.columns.transpose() * full)
}

/// `Bᵀ diag(-cot A) B`.
pub fn reduced_hessian(a: &AngleAssignment, b: &TangentBasis) -> DMatrix<f64> {
    let cot = DVector::from_iterator(a.angles.len(), a.angles.iter().map(|x| -x.cos() / x.sin()));
    let scaled = DMatrix::from_fn(b.columns.nrows(), b.columns.ncols(), |i, j| cot[i] * b.columns[(i, j)]);
    b.columns.transpose() * scaled
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    InteriorChs,
    Boundary,
    Stalled,
}

/// A tetrahedron at `(0, 0, π)`, with the pair carrying `π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FlatTet {
    pub tet: usize,
    pub pi_pair: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlatClassification {
    pub flat: Vec<FlatTet>,
    /// Tetrahedra with exactly one angle below `eps`.
    pub anomalies: Vec<usize>,
    /// Tetrahedra with an angle below `eps` that fit neither pattern.
    pub other: Vec<usize>,
}

pub fn classify_flat(a: &AngleAssignment, eps: f64) -> FlatClassification {
    let mut out = FlatClassification::default();
    for t in 0..a.tets() {
        let tr = a.triple(t);
        let small = tr.iter().filter(|&&x| x < eps).count();
        match small {
            0 => {}
            2 => match tr.iter().position(|&x| x > PI - eps) {
                Some(pi_pair) => out.flat.push(FlatTet { tet: t, pi_pair }),
                None => out.other.push(t),
            },
            1 => out.anomalies.push(t),
            _ => out.other.push(t),
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct MaximizeOptions {
    pub tau_grad: f64,
    pub eps_flat: f64,
    pub max_iter: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions { tau_grad: TAU_GRAD, eps_flat: EPS_FLAT, max_iter: MAX_ITER }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximizeOutcome {
    pub kind: OutcomeKind,
    pub point: AngleAssignment,
    pub volume: f64,
    pub flat_tets: Vec<FlatTet>,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Volume after each accepted step, starting with the initial point.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Largest `t` with `x + t·d` strictly positive in every coordinate, capped at `cap`.
fn max_step(x: &DVector<f64>, d: &DVector<f64>, cap: f64) -> f64 {
    let mut t = cap;
    for (xi, di) in x.iter().zip(d.iter()) {
        if *di < 0.0 {
            t = t.min(-xi / di);
        }
    }
    t
}

/// Newton direction (gradient direction where the Hessian is not negative
/// definite) in the span of `cols`, as a full angle vector, with its slope and
/// the reduced gradient norm.
/// Angles listed in `fixed` are left out of the derivatives.
fn newton_direction(point: &AngleAssignment, cols: &DMatrix<f64>, fixed: &[usize]) -> Result<(DVector<f64>, f64, f64), VolumeError> {
    if cols.ncols() == 0 {
        return Ok((DVector::zeros(cols.nrows()), 0.0, 0.0));
    }
    let (g, neg) = if fixed.is_empty() {
        let basis = TangentBasis { columns: cols.clone() };
        (reduced_gradient(point, &basis)?, -reduced_hessian(point, &basis))
    } else {
        let live = |i: usize| !fixed.contains(&i);
        let d1 = DVector::from_fn(cols.nrows(), |i, _| if live(i) { -point.angles[i].sin().ln() } else { 0.0 });
        let d2 = DVector::from_fn(cols.nrows(), |i, _| if live(i) { point.angles[i].cos() / point.angles[i].sin() } else { 0.0 });
        let scaled = DMatrix::from_fn(cols.nrows(), cols.ncols(), |i, j| d2[i] * cols[(i, j)]);
        (cols.transpose() * d1, cols.transpose() * scaled)
    };
    let dir_u = match neg.clone().cholesky() {
        Some(ch) if neg.diagonal().min() > 1e-10 => ch.solve(&g),
        _ => g.clone(),
    };
    let mut slope = g.dot(&dir_u);
    let mut dir = cols * &dir_u;
    if slope <= 0.0 {
        dir = cols * &g;
        slope = g.dot(&g);
    }
    Ok((dir, slope, g.norm()))
}

/// Columns of `b` combined so that the angles in `fixed` do not move.
fn restrict(b: &DMatrix<f64>, fixed: &[usize]) -> DMatrix<f64> {
    let rows = DMatrix::from_fn(fixed.len(), b.ncols(), |i, j| b[(fixed[i], j)]);
    let eig = SymmetricEigen::new(rows.transpose() * rows);
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i].abs() < 1e-9).collect();
    let mut null = DMatrix::zeros(b.ncols(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        null.set_column(k, &eig.eigenvectors.column(i));
    }
    b * null
}

/// Maximum of the volume on the face where the tetrahedra in `flat` are
/// exactly `(0, 0, π)`, starting from the projection of `near` onto that face.
/// Returns the point, its volume and the final gradient norm on the face.
fn face_maximum(near: &AngleAssignment, b: &TangentBasis, flat: &[FlatTet], opts: &MaximizeOptions) -> Option<(AngleAssignment, f64, f64)> {
    let fixed: Vec<usize> = flat.iter().flat_map(|f| (0..3).map(move |p| 3 * f.tet + p)).collect();
    let target = |i: usize| if flat.iter().any(|f| 3 * f.tet + f.pi_pair == i) { PI } else { 0.0 };
    let rows = DMatrix::from_fn(fixed.len(), b.columns.ncols(), |i, j| b.columns[(fixed[i], j)]);
    let delta = DVector::from_fn(fixed.len(), |i, _| target(fixed[i]) - near.angles[fixed[i]]);
    let u = rows.clone().pseudo_inverse(1e-10).ok()? * &delta;
    if (&rows * &u - &delta).amax() > crate::angles::TAU_EQ {
        return None;
    }
    let mut x = near.as_vector() + &b.columns * u;
    for &i in &fixed {
        x[i] = target(i);
    }
    let live = |x: &DVector<f64>| (0..x.len()).all(|i| fixed.contains(&i) || (x[i] > 0.0 && x[i] < PI));
    if !live(&x) {
        return None;
    }
    let cols = restrict(&b.columns, &fixed);
    let mut point = AngleAssignment::new(x.iter().copied().collect());
    let mut vol = volume(&point);
    let mut gn = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let (mut dir, slope, g) = newton_direction(&point, &cols, &fixed).ok()?;
        for &i in &fixed {
            dir[i] = 0.0;
        }
        gn = g;
        if gn < opts.tau_grad {
            break;
        }
        let mut t = (FRACTION_TO_BOUNDARY * max_step(&x, &dir, f64::INFINITY)).min(1.0);
        let mut accepted = None;
        while t > 1e-18 {
            let mut trial = &x + t * &dir;
            for &i in &fixed {
                trial[i] = target(i);
            }
            if live(&trial) {
                let p = AngleAssignment::new(trial.iter().copied().collect());
                let v = volume(&p);
                if v >= vol + ARMIJO * t * slope {
                    accepted = Some((trial, p, v));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, p, v)) = accepted else { break };
        x = trial;
        point = p;
        vol = v;
    }
    Some((point, vol, gn))
}

/// Newton ascent in tangent coordinates with a positivity-preserving line search.
///
/// When the iterates run into a face where some tetrahedra flatten, the
/// ascent is finished on that face with the flat angles set to exactly 0 and `π`.
pub fn maximize(a0: &AngleAssignment, b: &TangentBasis, opts: &MaximizeOptions) -> Result<MaximizeOutcome, VolumeError> {
    check_interior(a0)?;
    if b.columns.nrows() != a0.angles.len() {
        return Err(VolumeError::Shape { rows: b.columns.nrows(), angles: a0.angles.len() });
    }
    let mut x = a0.as_vector();
    let mut point = a0.clone();
    let mut vol = volume(&point);
    let mut history = vec![vol];
    let mut truncated_run = 0usize;
    let mut grad_norm = f64::INFINITY;
    let finish = |kind, point: AngleAssignment, vol, flat, it, g, history| MaximizeOutcome {
        kind,
        point,
        volume: vol,
        flat_tets: flat,
        iterations: it,
        gradient_norm: g,
        history,
    };

    for it in 0..opts.max_iter {
        let g = reduced_gradient(&point, b)?;
        grad_norm = g.norm();
        let min = point.min_angle();
        if min > opts.eps_flat && grad_norm < opts.tau_grad {
            return Ok(finish(OutcomeKind::InteriorChs, point, vol, Vec::new(), it, grad_norm, history));
        }
        if min < opts.eps_flat && truncated_run >= 2 {
            let c = classify_flat(&point, opts.eps_flat);
            if !c.flat.is_empty() && c.anomalies.is_empty() && c.other.is_empty() {
                if let Some((p, v, g)) = face_maximum(&point, b, &c.flat, opts) {
                    if v >= vol {
                        history.push(v);
                        return Ok(finish(OutcomeKind::Boundary, p, v, c.flat, it, g, history));
                    }
                }
                return Ok(finish(OutcomeKind::Boundary, point, vol, c.flat, it, grad_norm, history));
            }
        }
        if min < HARD_FLOOR {
            return Ok(finish(OutcomeKind::Stalled, point, vol, Vec::new(), it, grad_norm, history));
        }

        let (dir, slope, _) = newton_direction(&point, &b.columns, &[])?;
        let bound = max_step(&x, &dir, f64::INFINITY);
        let mut t = 1.0;
        let truncated = FRACTION_TO_BOUNDARY * bound < 1.0;
        if truncated {
            t = FRACTION_TO_BOUNDARY * bound;
        }
        let mut accepted = None;
        while t > 1e-18 {
            let trial = &x + t * &dir;
            if trial.iter().all(|&v| v > 0.0 && v < PI) {
                let p = AngleAssignment::new(trial.iter().copied().collect());
                let v = volume(&p);
                // once the predicted gain is below rounding level the full Newton step is taken
                let negligible = slope < NEGLIGIBLE_GAIN * vol.abs().max(1.0);
                if v >= vol + ARMIJO * t * slope || (negligible && v >= vol - ROUNDING * vol.abs().max(1.0)) {
                    accepted = Some((trial, p, v));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, p, v)) = accepted else {
            // no ascent possible at working precision
            let c = classify_flat(&point, opts.eps_flat);
            let kind = if min < opts.eps_flat && !c.flat.is_empty() && c.anomalies.is_empty() && c.other.is_empty() {
                OutcomeKind::Boundary
            } else if min > opts.eps_flat && grad_norm < 1e3 * opts.tau_grad {
                OutcomeKind::InteriorChs
            } else {
                OutcomeKind::Stalled
            };
            let flat = if kind == OutcomeKind::Boundary { c.flat } else { Vec::new() };
            return Ok(finish(kind, point, vol, flat, it, grad_norm, history));
        };
        truncated_run = if truncated && t == FRACTION_TO_BOUNDARY * bound { truncated_run + 1 } else { 0 };
        x = trial;
        point = p;
        vol = v;
        history.push(vol);
    }
    Ok(finish(OutcomeKind::Stalled, point, vol, Vec::new(), opts.max_iter, grad_norm, history))
}
