//! The angle-structure polytope: linear constraints, an interior point and a
//! tangent basis.

use crate::lp::{self, LpError};
use crate::perm::edge_pair;
use crate::skeleton::{compute_edge_classes, compute_vertex_classes, VertexKind};
use crate::triangulation::Triangulation;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Minimum LP margin for a point to count as strictly interior.
pub const TAU_INTERIOR: f64 = 1e-7;
/// Tolerance on equality residuals.
pub const TAU_EQ: f64 = 1e-9;

/// One angle per (tetrahedron, pair), stored at `3 * tet + pair`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleAssignment {
    pub angles: Vec<f64>,
}

impl AngleAssignment {
    pub fn new(angles: Vec<f64>) -> Self {
        AngleAssignment { angles }
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        AngleAssignment { angles: vec![value; 3 * n] }
    }

    pub fn tets(&self) -> usize {
        self.angles.len() / 3
    }

    #[inline]
    pub fn get(&self, tet: usize, pair: usize) -> f64 {
        self.angles[3 * tet + pair]
    }

    /// Angle at the tetrahedron edge `{a, b}`.
    #[inline]
    pub fn at_edge(&self, tet: usize, a: usize, b: usize) -> f64 {
        self.get(tet, edge_pair(a, b))
    }

    pub fn triple(&self, tet: usize) -> [f64; 3] {
        [self.get(tet, 0), self.get(tet, 1), self.get(tet, 2)]
    }

    pub fn min_angle(&self) -> f64 {
        self.angles.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.angles)
    }
}

/// Equalities `eq_matrix · x = eq_rhs`: one row per tetrahedron, then one per edge class.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub eq_matrix: DMatrix<f64>,
    pub eq_rhs: DVector<f64>,
    pub tets: usize,
    pub edges: usize,
    /// Number of vertex classes with torus links.
    pub cusps: usize,
}

impl ConstraintSystem {
    pub fn variables(&self) -> usize {
        3 * self.tets
    }

    /// Column index of a (tetrahedron, pair) variable.
    #[inline]
    pub fn var(tet: usize, pair: usize) -> usize {
        3 * tet + pair
    }

    /// Dimension predicted for a non-empty polytope.
    pub fn expected_dimension(&self) -> usize {
        self.tets + self.cusps
    }

    pub fn residual(&self, a: &AngleAssignment) -> DVector<f64> {
        &self.eq_matrix * a.as_vector() - &self.eq_rhs
    }

    pub fn report(&self, a: &AngleAssignment) -> StructureReport {
        let r = self.residual(a);
        let tet_violation = r.rows(0, self.tets).amax();
        let edge_violation = if self.edges > 0 { r.rows(self.tets, self.edges).amax() } else { 0.0 };
        StructureReport { max_tet_violation: tet_violation, max_edge_violation: edge_violation, min_angle: a.min_angle() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub max_tet_violation: f64,
    pub max_edge_violation: f64,
    pub min_angle: f64,
}

impl StructureReport {
    /// Equalities hold within `tol` and no angle is negative beyond `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.max_tet_violation < tol && self.max_edge_violation < tol && self.min_angle > -tol
    }
}

pub fn build_constraints(tri: &Triangulation) -> ConstraintSystem {
    let n = tri.len();
    let edges = compute_edge_classes(tri);
    let m = n + edges.len();
    let mut eq = DMatrix::zeros(m, 3 * n);
    let mut rhs = DVector::zeros(m);
    for t in 0..n {
        for p in 0..3 {
            eq[(t, 3 * t + p)] = 1.0;
        }
        rhs[t] = PI;
    }
    for (k, e) in edges.iter().enumerate() {
        for inc in &e.incidences {
            eq[(n + k, 3 * inc.tet + inc.pair())] += 1.0;
        }
        rhs[n + k] = 2.0 * PI;
    }
    let cusps = compute_vertex_classes(tri).iter().filter(|v| v.kind == VertexKind::Ideal).count();
    ConstraintSystem { eq_matrix: eq, eq_rhs: rhs, tets: n, edges: edges.len(), cusps }
}

pub fn check_structure(tri: &Triangulation, a: &AngleAssignment) -> StructureReport {
    build_constraints(tri).report(a)
}

#[derive(Clone, Debug, PartialEq)]
pub enum InteriorPoint {
    /// A strict angle structure whose smallest angle is `margin`.
    Point { angles: AngleAssignment, margin: f64 },
    /// The optimal margin does not exceed [`TAU_INTERIOR`].
    Empty { margin: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum AngleError {
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("null space has dimension {found}, expected {expected}")]
    Dimension { found: usize, expected: usize },
}

/// Chebyshev-style interior point: maximize `s` subject to `Ex = r`, `x_i ≥ s`.
pub fn find_interior_point(cs: &ConstraintSystem) -> Result<InteriorPoint, AngleError> {
    let nv = cs.variables();
    let m = cs.eq_matrix.nrows();
    // x = y + (s⁺ - s⁻)·1 with y, s⁺, s⁻ ≥ 0
    let mut a = Vec::with_capacity(m);
    for i in 0..m {
        let row = cs.eq_matrix.row(i);
        let sum: f64 = row.iter().sum();
        let mut line: Vec<f64> = row.iter().copied().collect();
        line.push(sum);
        line.push(-sum);
        a.push(line);
    }
    let b: Vec<f64> = cs.eq_rhs.iter().copied().collect();
    let mut c = vec![0.0; nv + 2];
    c[nv] = 1.0;
    c[nv + 1] = -1.0;
    let sol = match lp::solve_standard(&a, &b, &c) {
        Ok(sol) => sol,
        // the equalities alone are inconsistent
        Err(LpError::Infeasible(_)) => return Ok(InteriorPoint::Empty { margin: f64::NEG_INFINITY }),
        Err(e) => return Err(e.into()),
    };
    let s = sol.x[nv] - sol.x[nv + 1];
    if s <= TAU_INTERIOR {
        return Ok(InteriorPoint::Empty { margin: s });
    }
    let x: Vec<f64> = sol.x[..nv].iter().map(|y| y + s).collect();
    let angles = polish(cs, AngleAssignment::new(x));
    let margin = angles.min_angle();
    Ok(InteriorPoint::Point { angles, margin })
}

/// Removes the equality residual by a least-norm correction.
pub fn polish(cs: &ConstraintSystem, a: AngleAssignment) -> AngleAssignment {
    let r = cs.residual(&a);
    if r.amax() == 0.0 {
        return a;
    }
    let e = &cs.eq_matrix;
    let gram = e * e.transpose();
    let Ok(y) = gram.svd(true, true).solve(&r, 1e-12) else { return a };
    let x = a.as_vector() - e.transpose() * y;
    AngleAssignment::new(x.iter().copied().collect())
}

/// Orthonormal basis of the null space of the constraint matrix, one column per direction.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub columns: DMatrix<f64>,
}

impl TangentBasis {
    pub fn dimension(&self) -> usize {
        self.columns.ncols()
    }
}

/// Null space of `eq_matrix` via the eigen-decomposition of `EᵀE`.
pub fn tangent_basis(cs: &ConstraintSystem) -> TangentBasis {
    let e = &cs.eq_matrix;
    let gram = e.transpose() * e;
    let eig = SymmetricEigen::new(gram);
    let scale = eig.eigenvalues.amax().max(1.0);
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i].abs() < 1e-9 * scale).collect();
    let mut columns = DMatrix::zeros(cs.variables(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        columns.set_column(k, &eig.eigenvectors.column(i));
    }
    TangentBasis { columns }
}

/// As [`tangent_basis`], failing when the dimension differs from `n + cusps`.
pub fn checked_tangent_basis(cs: &ConstraintSystem) -> Result<TangentBasis, AngleError> {
    let b = tangent_basis(cs);
    if b.dimension() != cs.expected_dimension() {
        return Err(AngleError::Dimension { found: b.dimension(), expected: cs.expected_dimension() });
    }
    Ok(b)
}
