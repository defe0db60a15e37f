//! Shape parameters of ideal tetrahedra and their relation to dihedral angles.
//!
//! The shape `z` sits on the pair-0 edge with `arg z = alpha` and
//! `|z| = sin(gamma) / sin(beta)`; `z' = (z-1)/z` then carries `beta` and
//! `z'' = 1/(1-z)` carries `gamma`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AngleTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        AngleTriple { alpha, beta, gamma }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        AngleTriple::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn sum(self) -> f64 {
        self.alpha + self.beta + self.gamma
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeParameter {
    pub z: Complex64,
}

impl ShapeParameter {
    pub fn z_prime(self) -> Complex64 {
        (self.z - 1.0) / self.z
    }

    pub fn z_double_prime(self) -> Complex64 {
        1.0 / (1.0 - self.z)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ShapeError {
    #[error("degenerate angle triple {0:?}")]
    Degenerate([f64; 3]),
}

pub fn angles_to_shape(t: AngleTriple) -> Result<ShapeParameter, ShapeError> {
    if [t.alpha, t.beta, t.gamma].iter().any(|&x| !(x > 0.0 && x < PI)) {
        return Err(ShapeError::Degenerate(t.to_array()));
    }
    let modulus = t.gamma.sin() / t.beta.sin();
    Ok(ShapeParameter { z: Complex64::from_polar(modulus, t.alpha) })
}

/// Inverse of [`angles_to_shape`] for `Im z > 0`.
pub fn shape_to_angles(s: ShapeParameter) -> Result<AngleTriple, ShapeError> {
    if !(s.z.im > 0.0) {
        return Err(ShapeError::Degenerate([s.z.arg(), 0.0, 0.0]));
    }
    Ok(AngleTriple::new(s.z.arg(), s.z_prime().arg(), s.z_double_prime().arg()))
}
