//! Rolling-ball containment checks.
//!
//! At each boundary point `P` the geodesic sphere of constant curvature `λ`
//! tangent to `∂D` at `P` (same inner normal) is built, and the whole
//! boundary is tested against it: inside the ball when `λ ≤ k_min` (part A),
//! outside the open ball when `λ ≥ k_max` (part B).
//!
//! Surfaces of revolution are handled in the meridian plane through `P`. The
//! ball centre lies in that plane, and for a fixed polar angle the distance
//! from the centre to a parallel is extremal on the plane itself, so the
//! section curve `θ ↦ p(|θ|)` over a full turn carries every extreme
//! distance.

use crate::error::{invalid, Error, Result};
use crate::hypersurface::{Direction, Surface, VALIDATION_GRID};
use crate::modelspace::{geodesic_distance, radius_for_curvature, ModelSpace, PolarPoint};
use crate::quadric::{self, Signature};
use crate::roots;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Relative slack on `λ` against the sampled curvature extremes.
const LAMBDA_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentBall {
    pub center: PolarPoint,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RollRow {
    pub theta_p: f64,
    /// Centre of the tangent ball in polar coordinates `(t, θ)` of the section plane.
    pub center: [f64; 2],
    pub margin: f64,
    pub witness_theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RollingReport {
    pub part: Part,
    pub lambda: f64,
    pub r: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub rows: Vec<RollRow>,
    pub min_margin: f64,
    pub witness_theta_p: f64,
    pub witness_theta_x: f64,
    /// `min_margin` minus the largest drop the margin can have between two
    /// neighbouring boundary samples (speed of the curve times half a cell).
    pub lipschitz_bound: f64,
    pub tol: f64,
    pub pass: bool,
}

fn curvature_of(space: &ModelSpace) -> Result<f64> {
    space
        .constant_curvature()
        .ok_or_else(|| Error::InvalidInput("rolling checks need a constant-curvature space".into()))
}

/// Tangent ball of curvature `lambda` touching `∂D` at parameter `theta_p`.
/// For surfaces of revolution the centre is given in the meridian plane
/// (azimuth zero), with the polar angle measured from the axis.
pub fn tangent_ball(surface: &Surface, space: &ModelSpace, theta_p: f64, lambda: f64) -> Result<TangentBall> {
    let c = curvature_of(space)?;
    let r = radius_for_curvature(c, lambda)?;
    let (t, theta) = section_center(surface, space, c, r, theta_p)?;
    let center = if surface.is_revolution() { PolarPoint::spatial(t, theta, 0.0) } else { PolarPoint::planar(t, theta) };
    Ok(TangentBall { center, r })
}

fn section_center(surface: &Surface, space: &ModelSpace, c: f64, r: f64, theta: f64) -> Result<(f64, f64)> {
    let jet = surface.jet(space, theta);
    let (t, th) = if c == 0.0 {
        let (sin, cos) = theta.sin_cos();
        let x = [jet.p * cos, jet.p * sin];
        let dx = [jet.dp * cos - jet.p * sin, jet.dp * sin + jet.p * cos];
        let len = dx[0].hypot(dx[1]);
        let n = [-dx[1] / len, dx[0] / len];
        let centre = [x[0] + r * n[0], x[1] + r * n[1]];
        (centre[0].hypot(centre[1]), centre[1].atan2(centre[0]))
    } else {
        let sig = Signature::for_curvature(c);
        let y = quadric::embed(c, jet.p, theta);
        let dy = quadric::embed_tangent(c, jet.p, jet.dp, theta);
        let n = sig.normalize(&sig.cross(&y, &dy));
        quadric::chart(c, &quadric::exp(c, &y, &n, r))
    };
    let limit = space.conjugate_radius();
    if !(t.is_finite() && t < limit * (1.0 - 1e-8)) {
        return Err(Error::Chart(format!("tangent ball centre at distance {t} from O leaves the chart (limit {limit})")));
    }
    Ok((t, th))
}

/// Distance from a tangent ball centre to the boundary point at `theta`,
/// both in the section plane.
fn section_point(surface: &Surface, space: &ModelSpace, theta: f64) -> PolarPoint {
    PolarPoint::planar(surface.jet(space, theta).p, theta)
}

/// Containment check for part A (`Part::A`, ball contains the body) or part
/// B (ball inside the body) with `n_p` tangent points and `n_x` boundary
/// samples per tangent point.
pub fn check_rolling(
    surface: &Surface,
    space: &ModelSpace,
    part: Part,
    lambda: f64,
    n_p: usize,
    n_x: usize,
    tol: f64,
) -> Result<RollingReport> {
    let c = curvature_of(space)?;
    if n_p < 1 || n_x < 16 {
        return invalid(format!("need n_P >= 1 and n_X >= 16, got {n_p} and {n_x}"));
    }
    if !(tol >= 0.0) {
        return invalid("tolerance must be non-negative");
    }
    let r = radius_for_curvature(c, lambda)?;
    let kn = surface.kn_range(space, VALIDATION_GRID)?;
    match part {
        Part::A if lambda > kn.k_min * (1.0 + LAMBDA_SLACK) => {
            return Err(Error::Hypothesis(format!(
                "part A needs lambda <= k_min = {}, got {lambda}",
                kn.k_min
            )));
        }
        Part::B if lambda < kn.k_max * (1.0 - LAMBDA_SLACK) => {
            return Err(Error::Hypothesis(format!(
                "part B needs lambda >= k_max = {}, got {lambda}",
                kn.k_max
            )));
        }
        _ => {}
    }
    let tangent: Vec<f64> = surface.grid(n_p);
    let cell = TAU / n_x as f64;
    let samples: Vec<(f64, PolarPoint)> =
        (0..n_x).map(|j| j as f64 * cell).map(|th| (th, section_point(surface, space, th))).collect();
    let margin_of = |centre: &PolarPoint, x: &PolarPoint| {
        let dist = geodesic_distance(c, centre, x);
        match part {
            Part::A => r - dist,
            Part::B => dist - r,
        }
    };
    let rows: Vec<Result<RollRow>> = tangent
        .par_iter()
        .map(|&theta_p| {
            let (t, th) = section_center(surface, space, c, r, theta_p)?;
            let centre = PolarPoint::planar(t, th);
            let (mut worst, mut witness) = (f64::INFINITY, 0.0);
            for (theta, x) in &samples {
                let m = margin_of(&centre, x);
                if m < worst {
                    worst = m;
                    witness = *theta;
                }
            }
            let (polished_theta, polished) = roots::golden_min(
                |th| margin_of(&centre, &section_point(surface, space, th)),
                witness - cell,
                witness + cell,
                1e-12,
            );
            if polished < worst {
                worst = polished;
                witness = polished_theta.rem_euclid(TAU);
            }
            Ok(RollRow { theta_p, center: [t, th], margin: worst, witness_theta: witness })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let worst = *rows.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("n_P >= 1");
    let speed = (0..VALIDATION_GRID)
        .map(|i| {
            let jet = surface.jet(space, TAU * i as f64 / VALIDATION_GRID as f64);
            space.warp(jet.p).f.hypot(jet.dp)
        })
        .fold(0.0f64, f64::max);
    Ok(RollingReport {
        part,
        lambda,
        r,
        k_min: kn.k_min,
        k_max: kn.k_max,
        min_margin: worst.margin,
        witness_theta_p: worst.theta_p,
        witness_theta_x: worst.witness_theta,
        lipschitz_bound: worst.margin - 0.5 * cell * speed,
        tol,
        pass: worst.margin >= -tol,
        rows,
    })
}

pub fn check_part_a(surface: &Surface, space: &ModelSpace, lambda: f64, n_p: usize, n_x: usize, tol: f64) -> Result<RollingReport> {
    check_rolling(surface, space, Part::A, lambda, n_p, n_x, tol)
}

pub fn check_part_b(surface: &Surface, space: &ModelSpace, lambda: f64, n_p: usize, n_x: usize, tol: f64) -> Result<RollingReport> {
    check_rolling(surface, space, Part::B, lambda, n_p, n_x, tol)
}

/// Tangency defects of the ball at `theta_p`: `|dist(centre, P) - r|` and the
/// angle between the ball's inner normal at `P` and the surface's.
pub fn tangency_defect(surface: &Surface, space: &ModelSpace, theta_p: f64, lambda: f64) -> Result<(f64, f64)> {
    let c = curvature_of(space)?;
    let r = radius_for_curvature(c, lambda)?;
    let (t, th) = section_center(surface, space, c, r, theta_p)?;
    let centre = PolarPoint::planar(t, th);
    let p = section_point(surface, space, theta_p);
    let dist_err = (geodesic_distance(c, &centre, &p) - r).abs();
    // Normal of the ball at P points along the geodesic from P to the centre;
    // compare its direction with the surface normal in the tangent plane at P.
    let jet = surface.jet(space, theta_p);
    let w = space.warp(jet.p);
    let tangent = [jet.dp, w.f];
    let tangent_len = tangent[0].hypot(tangent[1]);
    let surface_normal = [-tangent[1] / tangent_len, tangent[0] / tangent_len];
    let h = 1e-6 * r.min(1.0);
    let toward = if c == 0.0 {
        let (sin, cos) = theta_p.sin_cos();
        let x = [jet.p * cos, jet.p * sin];
        let cc = [t * th.cos(), t * th.sin()];
        let d = [(cc[0] - x[0]) / r, (cc[1] - x[1]) / r];
        // orthonormal frame (radial, angular) at P
        [d[0] * cos + d[1] * sin, -d[0] * sin + d[1] * cos]
    } else {
        let sig = Signature::for_curvature(c);
        let y = quadric::embed(c, jet.p, theta_p);
        let dy = quadric::embed_tangent(c, jet.p, jet.dp, theta_p);
        let n = sig.normalize(&sig.cross(&y, &dy));
        let (t1, th1) = quadric::chart(c, &quadric::exp(c, &y, &n, h));
        [(t1 - jet.p) / h, w.f * wrap(th1 - theta_p) / h]
    };
    let len = toward[0].hypot(toward[1]);
    let dot = (toward[0] * surface_normal[0] + toward[1] * surface_normal[1]) / len;
    let cross = (toward[0] * surface_normal[1] - toward[1] * surface_normal[0]) / len;
    Ok((dist_err, cross.atan2(dot).abs()))
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub direction: [f64; 3],
    pub silhouette_points: usize,
    pub max_shadow_curvature: f64,
    pub min_shadow_curvature: f64,
    pub k_max: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Orthogonal projection of a Euclidean surface of revolution along `v`:
/// the silhouette `<N, v> = 0` is located on `n` parallels, projected to the
/// plane `v⊥`, and its curvature estimated from circumcircles of consecutive
/// points. The shadow should be no more curved than the surface itself.
pub fn projection_lemma_check(surface: &Surface, space: &ModelSpace, v: [f64; 3], n: usize, tol: f64) -> Result<ProjectionReport> {
    if !surface.is_revolution() || space.constant_curvature() != Some(0.0) {
        return invalid("projection check needs a surface of revolution in Euclidean space");
    }
    if n < 16 {
        return invalid(format!("projection check needs n >= 16, got {n}"));
    }
    let norm = quadric::norm(&v);
    if !(norm > 0.0) {
        return invalid("projection direction must be non-zero");
    }
    let v = quadric::scale(&v, 1.0 / norm);
    let (v_axis, v_perp) = (v[0], v[1].hypot(v[2]));
    let psi_v = v[2].atan2(v[1]);

    // meridian-plane geometry at polar angle α: position (x along axis, y
    // radial) and outward normal (n_x, n_y)
    let meridian = |alpha: f64| {
        let jet = surface.jet(space, alpha);
        let (sin, cos) = alpha.sin_cos();
        let pos = [jet.p * cos, jet.p * sin];
        let tan = [jet.dp * cos - jet.p * sin, jet.dp * sin + jet.p * cos];
        (pos, [tan[1], -tan[0]])
    };
    let point = |alpha: f64, psi: f64| {
        let (pos, _) = meridian(alpha);
        [pos[0], pos[1] * psi.cos(), pos[1] * psi.sin()]
    };

    let mut points: Vec<[f64; 3]> = Vec::new();
    if v_perp < 1e-12 {
        // silhouette is a parallel where the normal is orthogonal to the axis
        let nx = |alpha: f64| meridian(alpha).1[0];
        let cells = 4 * n;
        let alphas: Vec<f64> = (0..=cells).map(|i| PI * i as f64 / cells as f64).collect();
        let mut roots_found = Vec::new();
        for w in alphas.windows(2) {
            if (nx(w[0]) > 0.0) != (nx(w[1]) > 0.0) {
                roots_found.push(roots::bisect(nx, w[0], w[1], 1e-15));
            }
        }
        if roots_found.len() != 1 {
            return Err(Error::Resolution(format!(
                "silhouette is not a single closed curve at resolution {n} ({} parallels)",
                roots_found.len()
            )));
        }
        let alpha = roots_found[0];
        points.extend((0..n).map(|j| point(alpha, TAU * j as f64 / n as f64)));
    } else {
        for i in 0..=n {
            let alpha = PI * i as f64 / n as f64;
            let (_, normal) = meridian(alpha);
            let q = if v_axis.abs() < 1e-15 { 0.0 } else { -normal[0] * v_axis / (normal[1] * v_perp) };
            if !(q.abs() <= 1.0) {
                continue;
            }
            let spread = q.acos();
            points.push(point(alpha, psi_v + spread));
            points.push(point(alpha, psi_v - spread));
        }
    }

    // orthonormal basis of v⊥
    let seed = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = {
        let w = quadric::cross(&v, &seed);
        quadric::scale(&w, 1.0 / quadric::norm(&w))
    };
    let e2 = quadric::cross(&v, &e1);
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut shadow: Vec<[f64; 2]> = points.iter().map(|x| [dot(x, &e1), dot(x, &e2)]).collect();
    let centroid = shadow.iter().fold([0.0, 0.0], |acc, s| [acc[0] + s[0], acc[1] + s[1]]);
    let centroid = [centroid[0] / shadow.len() as f64, centroid[1] / shadow.len() as f64];
    shadow.sort_by(|a, b| {
        let ta = (a[1] - centroid[1]).atan2(a[0] - centroid[0]);
        let tb = (b[1] - centroid[1]).atan2(b[0] - centroid[0]);
        ta.total_cmp(&tb)
    });
    let scale = shadow.iter().fold(0.0f64, |m, s| m.max(s[0].hypot(s[1])));
    shadow.dedup_by(|a, b| (a[0] - b[0]).hypot(a[1] - b[1]) <= 1e-12 * scale);
    if shadow.len() < 8 {
        return Err(Error::Resolution(format!(
            "silhouette is not a single closed curve at resolution {n} ({} points)",
            shadow.len()
        )));
    }
    let m = shadow.len();
    let (mut max_k, mut min_k) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..m {
        let (a, b, c) = (shadow[(i + m - 1) % m], shadow[i], shadow[(i + 1) % m]);
        let k = menger_curvature(a, b, c);
        max_k = max_k.max(k);
        min_k = min_k.min(k);
    }
    let k_max = surface.kn_range(space, VALIDATION_GRID)?.k_max;
    let k_max = [Direction::Meridian, Direction::Parallel]
        .iter()
        .map(|&d| surface.normal_curvature(space, 0.0, d).max(surface.normal_curvature(space, PI, d)))
        .fold(k_max, f64::max);
    Ok(ProjectionReport {
        direction: v,
        silhouette_points: m,
        max_shadow_curvature: max_k,
        min_shadow_curvature: min_k,
        k_max,
        tol,
        pass: max_k <= k_max + tol,
    })
}

/// Curvature of the circle through three points.
fn menger_curvature(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let ab = (b[0] - a[0]).hypot(b[1] - a[1]);
    let bc = (c[0] - b[0]).hypot(c[1] - b[1]);
    let ca = (a[0] - c[0]).hypot(a[1] - c[1]);
    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    2.0 * cross.abs() / (ab * bc * ca)
}
