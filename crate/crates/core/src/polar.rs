//! Polar duality for convex curves in the sphere and the hyperbolic plane.
//!
//! Curves are embedded in the unit sphere of R³ or the upper sheet of the
//! hyperboloid `<x, x> = -1` in Minkowski space. The dual point of `X` is the
//! unit normal `X* = X × X' / |X × X'|` (with the Minkowski cross product in
//! the hyperbolic case), which for a counter-clockwise curve is the inner
//! normal. Sphere curves dualise into the sphere, hyperbolic curves into de
//! Sitter space `<x, x> = +1`.

use crate::error::{invalid, Error, Result};
use crate::hypersurface::{Direction, Surface};
use crate::modelspace::ModelSpace;
use crate::quadric::{self, Signature, Vec3};
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    SphereR3,
    HyperboloidR21,
    DesitterR21,
}

impl Ambient {
    pub fn signature(self) -> Signature {
        match self {
            Ambient::SphereR3 => Signature::Euclidean,
            _ => Signature::Minkowski,
        }
    }

    /// Value of `<x, x>` on the quadric.
    pub fn level(self) -> f64 {
        match self {
            Ambient::HyperboloidR21 => -1.0,
            _ => 1.0,
        }
    }
}

/// A closed curve sampled at `θ_i = 2π i / n` on a quadric.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedCurve {
    pub ambient: Ambient,
    pub points: Vec<Vec3>,
    /// Derivatives `dX/dθ`.
    pub tangents: Vec<Vec3>,
    /// Unit normals inside the quadric, pointing into the enclosed region.
    pub normals: Vec<Vec3>,
    /// Geodesic curvature from closed-form data, when available.
    pub curvature: Option<Vec<f64>>,
}

impl EmbeddedCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest `|<X, X> - level|` over the samples.
    pub fn quadric_residual(&self) -> f64 {
        let sig = self.ambient.signature();
        let level = self.ambient.level();
        self.points.iter().map(|x| (sig.dot(x, x) - level).abs()).fold(0.0, f64::max)
    }
}

/// Samples a curve of `M(c)`, `c = ±1`, on its quadric.
pub fn embed_curve(surface: &Surface, space: &ModelSpace, n: usize) -> Result<EmbeddedCurve> {
    let c = match space.constant_curvature() {
        Some(c) if c == 1.0 || c == -1.0 => c,
        _ => return invalid("polar map needs the unit sphere (c = 1) or the hyperbolic plane (c = -1)"),
    };
    if surface.is_revolution() {
        return invalid("polar map is implemented for curves only");
    }
    if n < 8 {
        return invalid(format!("need at least 8 samples, got {n}"));
    }
    let ambient = if c > 0.0 { Ambient::SphereR3 } else { Ambient::HyperboloidR21 };
    let sig = ambient.signature();
    let mut curve = EmbeddedCurve {
        ambient,
        points: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        curvature: Some(Vec::with_capacity(n)),
    };
    for i in 0..n {
        let theta = TAU * i as f64 / n as f64;
        let jet = surface.jet(space, theta);
        let x = quadric::embed(c, jet.p, theta);
        let dx = quadric::embed_tangent(c, jet.p, jet.dp, theta);
        curve.normals.push(sig.normalize(&sig.cross(&x, &dx)));
        curve.points.push(x);
        curve.tangents.push(dx);
        if let Some(k) = curve.curvature.as_mut() {
            k.push(surface.normal_curvature(space, theta, Direction::Meridian));
        }
    }
    Ok(curve)
}

/// Geodesic curvature of the samples from periodic central differences.
pub fn fd_curvature(curve: &EmbeddedCurve) -> Vec<f64> {
    let n = curve.len();
    let h = TAU / n as f64;
    let sig = curve.ambient.signature();
    (0..n)
        .map(|i| {
            let (prev, x, next) = (&curve.points[(i + n - 1) % n], &curve.points[i], &curve.points[(i + 1) % n]);
            let d1 = quadric::scale(&quadric::sub(next, prev), 0.5 / h);
            let d2 = quadric::scale(&quadric::add(&quadric::sub(next, x), &quadric::sub(prev, x)), 1.0 / (h * h));
            let nu = sig.normalize(&sig.cross(x, &d1));
            sig.dot(&d2, &nu) / (sig.dot(&d1, &d1) * sig.dot(&nu, &nu))
        })
        .collect()
}

/// Dual curve: `X* = N`, `X*' = -κ X'`. The dual of a hyperbolic curve lies in
/// de Sitter space and is spacelike.
pub fn polar_dual(curve: &EmbeddedCurve) -> Result<EmbeddedCurve> {
    let ambient = match curve.ambient {
        Ambient::SphereR3 => Ambient::SphereR3,
        Ambient::HyperboloidR21 => Ambient::DesitterR21,
        Ambient::DesitterR21 => return invalid("the dual of a de Sitter curve is not computed"),
    };
    let kappa = match &curve.curvature {
        Some(k) => k.clone(),
        None => fd_curvature(curve),
    };
    if let Some((i, k)) = kappa.iter().enumerate().find(|(_, k)| !(**k > 0.0)) {
        return invalid(format!("polar map needs a convex curve: curvature {k} at sample {i}"));
    }
    let sig = ambient.signature();
    let points = curve.normals.clone();
    let tangents: Vec<Vec3> = curve.tangents.iter().zip(&kappa).map(|(t, k)| quadric::scale(t, -k)).collect();
    let normals = points.iter().zip(&tangents).map(|(x, t)| sig.normalize(&sig.cross(x, t))).collect();
    Ok(EmbeddedCurve { ambient, points, tangents, normals, curvature: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCurvatureReport {
    pub n: usize,
    /// Largest `|κ·κ* - 1|`.
    pub max_deviation: f64,
    pub min_dual_curvature: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Reciprocal curvature law `κ·κ* = 1` at corresponding samples, with `κ*`
/// from finite differences on the dual.
pub fn dual_curvature_check(curve: &EmbeddedCurve, dual: &EmbeddedCurve, tol: f64) -> Result<DualCurvatureReport> {
    if curve.len() != dual.len() {
        return invalid("curve and dual must share their sampling");
    }
    let kappa = curve.curvature.clone().unwrap_or_else(|| fd_curvature(curve));
    let kappa_star = fd_curvature(dual);
    let max_deviation = kappa.iter().zip(&kappa_star).map(|(k, ks)| (k * ks - 1.0).abs()).fold(0.0, f64::max);
    let min_dual_curvature = kappa_star.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DualCurvatureReport {
        n: curve.len(),
        max_deviation,
        min_dual_curvature,
        tol,
        pass: max_deviation <= tol && min_dual_curvature > 0.0,
    })
}

/// Largest Euclidean distance between the double dual and the curve.
pub fn involution_check(curve: &EmbeddedCurve) -> Result<f64> {
    if curve.ambient != Ambient::SphereR3 {
        return invalid("involution is checked on the sphere only");
    }
    let double = polar_dual(&polar_dual(curve)?)?;
    Ok(double.points.iter().zip(&curve.points).map(|(a, b)| quadric::norm(&quadric::sub(a, b))).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarReport {
    pub ambient: Ambient,
    pub dual_ambient: Ambient,
    pub n: usize,
    pub quadric_residual: f64,
    pub dual_quadric_residual: f64,
    /// Smallest `<X*', X*'>`; positive means the dual is spacelike.
    pub min_dual_speed: f64,
    pub curvature: DualCurvatureReport,
    /// Deviation at half the resolution, for the convergence check.
    pub deviation_half: f64,
    pub order: f64,
    pub involution: Option<f64>,
    pub convention: &'static str,
    pub pass: bool,
}

/// Full polar run: embedding, dual, reciprocal law with refinement from
/// `n/2` to `n` samples, and the involution on the sphere.
pub fn polar_check(surface: &Surface, space: &ModelSpace, n: usize, tol: f64) -> Result<PolarReport> {
    if n < 16 || n % 2 != 0 {
        return invalid(format!("polar check needs an even n >= 16, got {n}"));
    }
    let curve = embed_curve(surface, space, n)?;
    let dual = polar_dual(&curve)?;
    let curvature = dual_curvature_check(&curve, &dual, tol)?;
    let coarse = embed_curve(surface, space, n / 2)?;
    let deviation_half = dual_curvature_check(&coarse, &polar_dual(&coarse)?, tol)?.max_deviation;
    if curvature.max_deviation > tol && curvature.max_deviation >= deviation_half {
        return Err(Error::Resolution(format!(
            "reciprocal-curvature deviation {} does not decrease under refinement (was {deviation_half} at n = {})",
            curvature.max_deviation,
            n / 2
        )));
    }
    let sig = dual.ambient.signature();
    let min_dual_speed = dual.tangents.iter().map(|t| sig.dot(t, t)).fold(f64::INFINITY, f64::min);
    let involution = match curve.ambient {
        Ambient::SphereR3 => Some(involution_check(&curve)?),
        _ => None,
    };
    let pass = curvature.pass && involution.map_or(true, |d| d <= 1e-8) && min_dual_speed > 0.0;
    Ok(PolarReport {
        ambient: curve.ambient,
        dual_ambient: dual.ambient,
        n,
        quadric_residual: curve.quadric_residual(),
        dual_quadric_residual: dual.quadric_residual(),
        min_dual_speed,
        order: (deviation_half / curvature.max_deviation).log2(),
        curvature,
        deviation_half,
        involution,
        convention: "dual point = X x X' normalised (inner normal of a counter-clockwise curve)",
        pass,
    })
}
