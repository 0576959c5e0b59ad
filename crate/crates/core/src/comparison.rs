//! Angle and support-function comparison against model spheres.
//!
//! A body `∂D` seen from `O` at depth `d = dist(O, ∂D)` is compared with the
//! sphere of constant normal curvature `k` in `M(c)` seen from a point at the
//! same depth. Levels `l` of the distance are swept on a Chebyshev grid over
//! `[d, l_max]`; at each level the worst value over all points of `∂D` with
//! `ρ = l` is compared against the sphere value at `l`.
//!
//! Lower mode (curvature bounded below by `k1`, ambient curvature at least
//! `c1`) expects the body to dominate the sphere. Upper mode (`k2`, `c2`)
//! expects the reverse.

use crate::error::{invalid, Error, Result};
use crate::hypersurface::{segments_from, Extrema, Segment, Surface, VALIDATION_GRID};
use crate::modelspace::{radius_for_curvature, sn_unchecked, sphere_angle_for_radius, validate_half_ball, ModelSpace};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative slack allowed when comparing configured curvature bounds with
/// the sampled extremes of the body.
pub const BOUND_SLACK: f64 = 1e-9;

/// Samples along a trajectory in [`verify_monotone`].
pub const MONOTONE_GRID: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonConfig {
    /// `k1` in lower mode, `k2` in upper mode.
    pub k: f64,
    /// `c1` in lower mode, `c2` in upper mode.
    pub c: f64,
    pub n_levels: usize,
    pub tol: f64,
    pub mode: Mode,
}

impl ComparisonConfig {
    pub fn lower(c1: f64, k1: f64) -> Self {
        Self { k: k1, c: c1, n_levels: 64, tol: 1e-7, mode: Mode::Lower }
    }

    pub fn upper(c2: f64, k2: f64) -> Self {
        Self { k: k2, c: c2, n_levels: 64, tol: 1e-7, mode: Mode::Upper }
    }

    pub fn with_levels(mut self, n: usize) -> Self {
        self.n_levels = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Everything the comparison theorems assume, as measured on the body.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypotheses {
    pub mode: Mode,
    pub k_ref: f64,
    pub c_ref: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub curvature_min: f64,
    pub curvature_max: f64,
    pub d: f64,
    pub rho_max: f64,
    /// Radius of the comparison sphere.
    pub r_ref: f64,
    pub l_max: f64,
    /// `None` when the half-ball condition does not apply (non-positive curvature).
    pub half_ball: Option<bool>,
    pub star_shaped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Angle,
    Support,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelRow {
    pub l: f64,
    pub surface_value: f64,
    pub sphere_value: f64,
    pub margin: f64,
    /// Parameter of the point attaining the worst surface value.
    pub witness_theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub quantity: Quantity,
    pub hypotheses: Hypotheses,
    pub rows: Vec<LevelRow>,
    pub min_margin: f64,
    pub witness_l: f64,
    pub witness_theta: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Angle and support sweeps of the upper comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualReport {
    pub angle: ComparisonReport,
    pub support: ComparisonReport,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub segment_start: f64,
    pub segment_end: f64,
    pub samples: usize,
    /// `f(d)`, zero in theory.
    pub f_at_d: f64,
    /// Minimum of `Δ(f·sn_c1) / Δt` over consecutive samples.
    pub min_slope: f64,
    pub min_f: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Validates the theorem hypotheses for `config` and returns the measured
/// quantities. Checks, in order: the comparison sphere exists, curvature
/// bounds of the body and of the ambient space, feasibility `d ≤ r`, the
/// half-ball condition, and (lower mode) that every level of the body is
/// also a level of the sphere.
pub fn check_hypotheses(surface: &Surface, space: &ModelSpace, config: &ComparisonConfig) -> Result<Hypotheses> {
    Ok(prepare(surface, space, config)?.0)
}

fn prepare(surface: &Surface, space: &ModelSpace, config: &ComparisonConfig) -> Result<(Hypotheses, Extrema)> {
    if !(config.k.is_finite() && config.k > 0.0) {
        return invalid(format!("reference curvature must be positive, got {}", config.k));
    }
    if !config.c.is_finite() {
        return invalid("reference space curvature must be finite");
    }
    if config.n_levels < 2 {
        return invalid(format!("need at least 2 levels, got {}", config.n_levels));
    }
    if !(config.tol >= 0.0) {
        return invalid(format!("tolerance must be non-negative, got {}", config.tol));
    }
    let r = radius_for_curvature(config.c, config.k)?;
    let kn = surface.kn_range(space, VALIDATION_GRID)?;
    let (curvature_min, curvature_max) = space.curvature_range();
    let extrema = surface.rho_extrema(space)?;
    let (d, rho_max) = (extrema.d, extrema.rho_max);

    let (k_ref, c_ref) = (config.k, config.c);
    let half_ball_c = match config.mode {
        Mode::Lower => {
            if k_ref > kn.k_min * (1.0 + BOUND_SLACK) {
                return Err(Error::Hypothesis(format!(
                    "k1 = {k_ref} exceeds the minimal normal curvature {} (at theta = {})",
                    kn.k_min, kn.theta_min
                )));
            }
            if c_ref > curvature_min + 1e-12 {
                return Err(Error::Hypothesis(format!(
                    "c1 = {c_ref} exceeds the minimal sectional curvature {curvature_min} of the space"
                )));
            }
            curvature_max
        }
        Mode::Upper => {
            if k_ref < kn.k_max * (1.0 - BOUND_SLACK) {
                return Err(Error::Hypothesis(format!(
                    "k2 = {k_ref} is below the maximal normal curvature {} (at theta = {})",
                    kn.k_max, kn.theta_max
                )));
            }
            if c_ref < curvature_max - 1e-12 {
                return Err(Error::Hypothesis(format!(
                    "c2 = {c_ref} is below the maximal sectional curvature {curvature_max} of the space"
                )));
            }
            c_ref
        }
    };
    if d > r {
        return Err(Error::Feasibility { d, r });
    }
    let half_ball = (half_ball_c > 0.0).then(|| validate_half_ball(half_ball_c, rho_max));
    if half_ball == Some(false) {
        return Err(Error::Hypothesis(format!(
            "body does not fit in the half-ball: rho_max = {rho_max} >= pi/(2 sqrt({half_ball_c})) = {}",
            0.5 * PI / half_ball_c.sqrt()
        )));
    }
    let top = 2.0 * r - d;
    if config.mode == Mode::Lower && rho_max > top + 1e-7 {
        return Err(Error::Hypothesis(format!(
            "rho_max = {rho_max} exceeds 2 r1 - d = {top}: levels beyond the comparison sphere"
        )));
    }
    let hypotheses = Hypotheses {
        mode: config.mode,
        k_ref,
        c_ref,
        k_min: kn.k_min,
        k_max: kn.k_max,
        curvature_min,
        curvature_max,
        d,
        rho_max,
        r_ref: r,
        l_max: rho_max.min(top),
        half_ball,
        star_shaped: surface.is_star_shaped(),
    };
    Ok((hypotheses, extrema))
}

/// Chebyshev–Lobatto points on `[lo, hi]`, ascending, endpoints included.
pub fn chebyshev_levels(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (0..n)
        .map(|j| {
            if j == 0 {
                lo
            } else if j == n - 1 {
                hi
            } else {
                mid - half * (PI * j as f64 / (n - 1) as f64).cos()
            }
        })
        .collect()
}

struct LevelSample {
    l: f64,
    cos: (f64, f64),
    support: (f64, f64),
    sphere_cos: f64,
}

fn sweep(surface: &Surface, space: &ModelSpace, config: &ComparisonConfig) -> Result<(Hypotheses, Vec<LevelSample>)> {
    let (hyp, extrema) = prepare(surface, space, config)?;
    let segments = segments_from(&extrema, !surface.is_revolution());
    let levels = chebyshev_levels(hyp.d, hyp.l_max, config.n_levels);
    let pick = |a: f64, b: f64| match config.mode {
        Mode::Lower => a < b,
        Mode::Upper => a > b,
    };
    let samples: Vec<Option<LevelSample>> = levels
        .par_iter()
        .map(|&l| {
            let thetas = surface.level_set(space, &extrema, &segments, l);
            let mut cos: Option<(f64, f64)> = None;
            let mut support: Option<(f64, f64)> = None;
            for theta in thetas {
                let value = surface.normal_angle_cos(space, theta);
                let h = surface.jet(space, theta).p * value;
                if cos.map_or(true, |(best, _)| pick(value, best)) {
                    cos = Some((value, theta));
                }
                if support.map_or(true, |(best, _)| pick(h, best)) {
                    support = Some((h, theta));
                }
            }
            Some(LevelSample {
                l,
                cos: cos?,
                support: support?,
                sphere_cos: sphere_angle_for_radius(config.c, hyp.r_ref, hyp.d, l),
            })
        })
        .collect();
    let mut out = Vec::with_capacity(samples.len());
    for (sample, l) in samples.into_iter().zip(&levels) {
        out.push(sample.ok_or_else(|| Error::Resolution(format!("no boundary point found at level l = {l}")))?);
    }
    Ok((hyp, out))
}

fn report(hyp: &Hypotheses, samples: &[LevelSample], quantity: Quantity, config: &ComparisonConfig) -> ComparisonReport {
    let rows: Vec<LevelRow> = samples
        .iter()
        .map(|s| {
            let ((value, theta), sphere) = match quantity {
                Quantity::Angle => (s.cos, s.sphere_cos),
                Quantity::Support => (s.support, s.l * s.sphere_cos),
            };
            let margin = match config.mode {
                Mode::Lower => value - sphere,
                Mode::Upper => sphere - value,
            };
            LevelRow { l: s.l, surface_value: value, sphere_value: sphere, margin, witness_theta: theta }
        })
        .collect();
    let worst = rows.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).copied().expect("at least two levels");
    ComparisonReport {
        quantity,
        hypotheses: hyp.clone(),
        min_margin: worst.margin,
        witness_l: worst.l,
        witness_theta: worst.witness_theta,
        tol: config.tol,
        pass: worst.margin >= -config.tol,
        rows,
    }
}

fn require_mode(config: &ComparisonConfig, mode: Mode) -> Result<()> {
    if config.mode != mode {
        return invalid(format!("this check needs {mode:?} mode, configuration is {:?}", config.mode));
    }
    Ok(())
}

/// Lower angle comparison: `|<N, ∂t>|` on `∂D` dominates the sphere value at
/// every common distance.
pub fn verify_angle(surface: &Surface, space: &ModelSpace, config: &ComparisonConfig) -> Result<ComparisonReport> {
    require_mode(config, Mode::Lower)?;
    let (hyp, samples) = sweep(surface, space, config)?;
    Ok(report(&hyp, &samples, Quantity::Angle, config))
}

/// Lower support-function comparison.
pub fn verify_support(surface: &Surface, space: &ModelSpace, config: &ComparisonConfig) -> Result<ComparisonReport> {
    require_mode(config, Mode::Lower)?;
    let (hyp, samples) = sweep(surface, space, config)?;
    Ok(report(&hyp, &samples, Quantity::Support, config))
}

/// Upper comparison of both angle and support function: the sphere of
/// curvature `k2` dominates the body.
pub fn verify_dual(surface: &Surface, space: &ModelSpace, config: &ComparisonConfig) -> Result<DualReport> {
    require_mode(config, Mode::Upper)?;
    let (hyp, samples) = sweep(surface, space, config)?;
    let angle = report(&hyp, &samples, Quantity::Angle, config);
    let support = report(&hyp, &samples, Quantity::Support, config);
    let pass = angle.pass && support.pass;
    Ok(DualReport { angle, support, pass })
}

/// Checks along one gradient trajectory that `f = cos - cos_sphere` vanishes
/// at `d` and that `f·sn_c1` is nondecreasing in `t`.
pub fn verify_monotone(
    surface: &Surface,
    space: &ModelSpace,
    config: &ComparisonConfig,
    segment: &Segment,
) -> Result<MonotoneReport> {
    require_mode(config, Mode::Lower)?;
    let (hyp, _) = prepare(surface, space, config)?;
    let (start, end) = (surface.jet(space, segment.start()).p, surface.jet(space, segment.end()).p);
    if (start - hyp.d).abs() > 1e-12 * hyp.d.max(1.0) {
        return invalid(format!(
            "segment starts at distance {start}, not at the global minimum d = {}",
            hyp.d
        ));
    }
    let t_end = end.min(2.0 * hyp.r_ref - hyp.d);
    let n = MONOTONE_GRID;
    let ts: Vec<f64> = (0..n).map(|i| hyp.d + (t_end - hyp.d) * i as f64 / (n - 1) as f64).collect();
    let values: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let theta = surface.theta_at_level(space, segment, t).unwrap_or(segment.end());
            let f = surface.normal_angle_cos(space, theta) - sphere_angle_for_radius(config.c, hyp.r_ref, hyp.d, t);
            (f, f * sn_unchecked(config.c, t))
        })
        .collect();
    let min_slope = (1..n)
        .map(|i| (values[i].1 - values[i - 1].1) / (ts[i] - ts[i - 1]))
        .fold(f64::INFINITY, f64::min);
    let min_f = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let f_at_d = values[0].0;
    let tol = config.tol;
    Ok(MonotoneReport {
        segment_start: segment.start(),
        segment_end: segment.end(),
        samples: n,
        f_at_d,
        min_slope,
        min_f,
        tol,
        pass: f_at_d.abs() <= tol && min_slope >= -tol && min_f >= -tol,
    })
}

/// Monotone segments whose trajectory starts at the global minimum `d`.
pub fn rooted_segments(surface: &Surface, space: &ModelSpace) -> Result<Vec<Segment>> {
    let extrema = surface.rho_extrema(space)?;
    let tol = 1e-12 * extrema.d.max(1.0);
    Ok(segments_from(&extrema, !surface.is_revolution())
        .into_iter()
        .filter(|s| (surface.jet(space, s.start()).p - extrema.d).abs() <= tol)
        .collect())
}
