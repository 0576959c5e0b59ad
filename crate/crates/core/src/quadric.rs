//! Planar model spaces as quadrics: the unit sphere in R³ for `c > 0`, the
//! upper hyperboloid sheet in Minkowski space R^{2,1} for `c < 0`.
//!
//! Coordinates are `(x, y, z)` with `z` the pole (time) axis, and the
//! Minkowski form is `x·x' + y·y' - z·z'`. Points are stored in the
//! normalised quadric of curvature `±1`; lengths are rescaled by `√|c|`.

use crate::modelspace::{cs_unchecked, sn_unchecked};

pub type Vec3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signature {
    Euclidean,
    Minkowski,
}

impl Signature {
    pub fn for_curvature(c: f64) -> Self {
        if c < 0.0 {
            Signature::Minkowski
        } else {
            Signature::Euclidean
        }
    }

    pub fn dot(self, a: &Vec3, b: &Vec3) -> f64 {
        match self {
            Signature::Euclidean => a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
            Signature::Minkowski => a[0] * b[0] + a[1] * b[1] - a[2] * b[2],
        }
    }

    /// Vector orthogonal to both arguments for this inner product.
    pub fn cross(self, a: &Vec3, b: &Vec3) -> Vec3 {
        let e = cross(a, b);
        match self {
            Signature::Euclidean => e,
            Signature::Minkowski => [e[0], e[1], -e[2]],
        }
    }

    /// Rescale to `|<v, v>| = 1`.
    pub fn normalize(self, v: &Vec3) -> Vec3 {
        scale(v, 1.0 / self.dot(v, v).abs().sqrt())
    }
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn scale(v: &Vec3, s: f64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn norm(v: &Vec3) -> f64 {
    Signature::Euclidean.dot(v, v).sqrt()
}

/// Point of the normalised quadric at polar coordinates `(t, θ)` of `M(c)`, `c ≠ 0`.
pub fn embed(c: f64, t: f64, theta: f64) -> Vec3 {
    let s = c.abs().sqrt();
    let rho = s * sn_unchecked(c, t);
    [rho * theta.cos(), rho * theta.sin(), cs_unchecked(c, t)]
}

/// Derivative of [`embed`] along a radial graph `t = p(θ)` with `p' = dp`.
pub fn embed_tangent(c: f64, t: f64, dp: f64, theta: f64) -> Vec3 {
    let s = c.abs().sqrt();
    let (sin, cos) = theta.sin_cos();
    let rho = s * sn_unchecked(c, t);
    let drho = s * cs_unchecked(c, t) * dp;
    [drho * cos - rho * sin, drho * sin + rho * cos, -c * sn_unchecked(c, t) * dp]
}

/// Polar coordinates `(t, θ)` of a point of the normalised quadric.
pub fn chart(c: f64, y: &Vec3) -> (f64, f64) {
    let s = c.abs().sqrt();
    let rho = y[0].hypot(y[1]);
    let t = if c > 0.0 { rho.atan2(y[2]) / s } else { rho.asinh() / s };
    (t, y[1].atan2(y[0]))
}

/// Point reached from `y` after ambient distance `dist` along the unit
/// tangent `v` (unit in the normalised quadric).
pub fn exp(c: f64, y: &Vec3, v: &Vec3, dist: f64) -> Vec3 {
    let s = c.abs().sqrt();
    let a = cs_unchecked(c, dist);
    let b = s * sn_unchecked(c, dist);
    add(&scale(y, a), &scale(v, b))
}
