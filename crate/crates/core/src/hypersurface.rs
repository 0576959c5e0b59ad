//! Convex bodies written as radial graphs `t = p(θ)` about the chart origin.
//!
//! Every body carries its radial function with analytic first and second
//! derivatives (a [`Jet`]). Offset spheres and ellipses are defined
//! implicitly by a law-of-cosines or conic equation; their derivatives come
//! from implicit differentiation, never from finite differences.
//!
//! Curves live in a two-dimensional space. Surfaces of revolution live in a
//! three-dimensional constant-curvature space, with the symmetry axis through
//! the origin; their profile is parametrised by the polar angle `α ∈ [0, π]`
//! and every quantity is evaluated on a meridian.

use crate::error::{invalid, Error, Result};
use crate::modelspace::{cs_unchecked, sn_unchecked, vs_unchecked, ModelSpace};
use crate::roots;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Grid on which bodies are validated (positivity, convexity).
pub const VALIDATION_GRID: usize = 1024;

/// Number of bracketing cells used to locate critical points of `p`.
pub const CRITICAL_CELLS: usize = 1024;

/// Radial function value with its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub p: f64,
    pub dp: f64,
    pub ddp: f64,
}

/// `p(θ) = a0 + Σ a_k cos kθ + b_k sin kθ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCurve {
    pub a0: f64,
    /// `(a_k, b_k)` for `k = 1, 2, ...`
    pub harmonics: Vec<(f64, f64)>,
}

impl FourierCurve {
    pub fn new(a0: f64, harmonics: Vec<(f64, f64)>) -> Self {
        Self { a0, harmonics }
    }

    pub fn circle(r: f64) -> Self {
        Self { a0: r, harmonics: Vec::new() }
    }

    pub fn jet(&self, theta: f64) -> Jet {
        let mut jet = Jet { p: self.a0, dp: 0.0, ddp: 0.0 };
        for (i, &(a, b)) in self.harmonics.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            jet.p += a * c + b * s;
            jet.dp += k * (b * c - a * s);
            jet.ddp -= k * k * (a * c + b * s);
        }
        jet
    }

    /// Random near-circular curve; see [`RandomFourier`].
    pub fn random<R: Rng + ?Sized>(rng: &mut R, spec: &RandomFourier) -> Self {
        let mut harmonics = Vec::with_capacity(spec.harmonics);
        if spec.harmonics > 0 {
            let amp = spec.offset * spec.radius * rng.gen_range(0.5..=1.0);
            let phase = rng.gen_range(0.0..TAU);
            harmonics.push((amp * phase.cos(), amp * phase.sin()));
        }
        for k in 2..=spec.harmonics {
            let scale = spec.roughness * spec.radius / (k * k) as f64;
            harmonics.push((scale * rng.gen_range(-1.0..=1.0), scale * rng.gen_range(-1.0..=1.0)));
        }
        Self { a0: spec.radius, harmonics }
    }
}

/// Parameters of a random Fourier body: mean radius, the relative size of
/// the first harmonic (which moves the origin off-centre) and of the higher
/// harmonics (which deform the shape, damped by `1/k²`).
#[derive(Clone, Debug, PartialEq)]
pub struct RandomFourier {
    pub harmonics: usize,
    pub radius: f64,
    pub offset: f64,
    pub roughness: f64,
}

/// Geodesic sphere of radius `r` whose centre lies at distance `a` from the
/// origin in direction `θ = π`, so the nearest point is at `θ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffsetSphere {
    pub r: f64,
    pub a: f64,
}

impl OffsetSphere {
    /// Solves `vs(r) - vs(a) - vs(p) + c·vs(a)·vs(p) - sn(a)·sn(p)·cos θ = 0`,
    /// the law of cosines in `M(c)` divided by `c`.
    pub fn jet(&self, c: f64, theta: f64) -> Jet {
        let (r, a) = (self.r, self.a);
        let (sin_t, cos_t) = theta.sin_cos();
        let (sn_a, cs_a, vs_a) = (sn_unchecked(c, a), cs_unchecked(c, a), vs_unchecked(c, a));
        let vs_r = vs_unchecked(c, r);
        let g = |p: f64| {
            let (sn_p, cs_p) = (sn_unchecked(c, p), cs_unchecked(c, p));
            let value = vs_r - vs_a - vs_unchecked(c, p) + c * vs_a * vs_unchecked(c, p) - sn_a * sn_p * cos_t;
            let slope = -cs_a * sn_p - sn_a * cs_p * cos_t;
            (value, slope)
        };
        let guess = -a * cos_t + (r * r - a * a * sin_t * sin_t).max(0.0).sqrt();
        let lo = (r - a) * (1.0 - 1e-9);
        let hi = (r + a) * (1.0 + 1e-9);
        let p = roots::newton_bracketed(g, lo, hi, guess.clamp(lo, hi));
        let (sn_p, cs_p) = (sn_unchecked(c, p), cs_unchecked(c, p));
        implicit_jet(
            p,
            Partials {
                gp: -cs_a * sn_p - sn_a * cs_p * cos_t,
                gt: sn_a * sn_p * sin_t,
                gpp: -cs_a * cs_p + c * sn_a * sn_p * cos_t,
                gpt: sn_a * cs_p * sin_t,
                gtt: sn_a * sn_p * cos_t,
            },
        )
    }
}

/// Euclidean ellipse `x²/a² + y²/b² = 1` seen from the point `(e, 0)`.
/// The semi-axis `a` lies along `θ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffsetEllipse {
    pub a: f64,
    pub b: f64,
    pub e: f64,
}

impl OffsetEllipse {
    pub fn jet(&self, theta: f64) -> Jet {
        let (a2, b2, e) = (self.a * self.a, self.b * self.b, self.e);
        let (sin_t, cos_t) = theta.sin_cos();
        let (sin2, cos2) = (2.0 * theta).sin_cos();
        let delta = 1.0 / b2 - 1.0 / a2;
        let alpha = cos_t * cos_t / a2 + sin_t * sin_t / b2;
        let beta = e * cos_t / a2;
        let gamma = e * e / a2 - 1.0;
        let root = (beta * beta - alpha * gamma).sqrt();
        let p = if beta > 0.0 { -gamma / (beta + root) } else { (root - beta) / alpha };
        let (d_alpha, dd_alpha) = (delta * sin2, 2.0 * delta * cos2);
        let (d_beta, dd_beta) = (-e * sin_t / a2, -e * cos_t / a2);
        implicit_jet(
            p,
            Partials {
                gp: 2.0 * alpha * p + 2.0 * beta,
                gt: d_alpha * p * p + 2.0 * d_beta * p,
                gpp: 2.0 * alpha,
                gpt: 2.0 * d_alpha * p + 2.0 * d_beta,
                gtt: dd_alpha * p * p + 2.0 * dd_beta * p,
            },
        )
    }
}

struct Partials {
    gp: f64,
    gt: f64,
    gpp: f64,
    gpt: f64,
    gtt: f64,
}

fn implicit_jet(p: f64, g: Partials) -> Jet {
    let dp = -g.gt / g.gp;
    let ddp = -(g.gpp * dp * dp + 2.0 * g.gpt * dp + g.gtt) / g.gp;
    Jet { p, dp, ddp }
}

/// The radial function of a curve, or the meridian profile of a surface of
/// revolution.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Fourier(FourierCurve),
    OffsetSphere(OffsetSphere),
    OffsetEllipse(OffsetEllipse),
}

impl Profile {
    fn jet(&self, c: f64, theta: f64) -> Jet {
        match self {
            Profile::Fourier(f) => f.jet(theta),
            Profile::OffsetSphere(s) => s.jet(c, theta),
            Profile::OffsetEllipse(e) => e.jet(theta),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Profile::Fourier(_) => "fourier_curve",
            Profile::OffsetSphere(_) => "offset_sphere",
            Profile::OffsetEllipse(_) => "offset_ellipse",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// Closed curve over `θ ∈ [0, 2π)` in a two-dimensional space.
    Curve(Profile),
    /// Surface of revolution with meridian profile over `α ∈ [0, π]`.
    Revolution(Profile),
}

/// Principal direction on a surface of revolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Meridian,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KnRange {
    pub k_min: f64,
    pub k_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalKind {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Critical {
    pub theta: f64,
    pub p: f64,
    pub kind: CriticalKind,
}

/// Extreme distances from the origin to the body.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrema {
    /// `dist(O, ∂D)`
    pub d: f64,
    pub rho_max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    /// Critical points of `p` sorted by parameter.
    pub critical: Vec<Critical>,
    /// `p` is constant: the body is a geodesic sphere about the origin.
    pub sphere_like: bool,
}

/// A parameter interval `[lo, hi]` on which `p` is strictly monotone.
/// Gradient trajectories of the distance run from the local minimum to the
/// local maximum, in either parameter direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub increasing: bool,
}

impl Segment {
    /// Parameter of the local minimum, where the trajectory starts.
    pub fn start(&self) -> f64 {
        if self.increasing {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn end(&self) -> f64 {
        if self.increasing {
            self.hi
        } else {
            self.lo
        }
    }
}

/// One point of a gradient trajectory of the distance function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub theta: f64,
    pub cos_angle: f64,
    pub k_n: f64,
    pub mu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RiccatiResidual {
    pub max_residual: f64,
    pub theta: f64,
    pub evaluated: usize,
    /// Samples dropped because `|p'|` was too small to divide by.
    pub skipped: usize,
}

/// A validated radial-graph body.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    shape: Shape,
    star_shaped: bool,
}

impl Surface {
    /// Validates the body against its ambient space: kind/space
    /// compatibility, positivity and chart regularity of `p`, pole smoothness
    /// for surfaces of revolution and, unless `star_shaped`, convexity.
    pub fn new(shape: Shape, star_shaped: bool, space: &ModelSpace) -> Result<Self> {
        let surface = Self { shape, star_shaped };
        surface.validate(space)?;
        Ok(surface)
    }

    pub fn curve(profile: Profile, space: &ModelSpace) -> Result<Self> {
        Self::new(Shape::Curve(profile), false, space)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn profile(&self) -> &Profile {
        match &self.shape {
            Shape::Curve(p) | Shape::Revolution(p) => p,
        }
    }

    pub fn is_star_shaped(&self) -> bool {
        self.star_shaped
    }

    pub fn is_revolution(&self) -> bool {
        matches!(self.shape, Shape::Revolution(_))
    }

    /// Parameter interval: `[0, 2π)` for curves, `[0, π]` for meridians.
    pub fn domain(&self) -> (f64, f64) {
        if self.is_revolution() {
            (0.0, PI)
        } else {
            (0.0, TAU)
        }
    }

    /// `n` parameter samples covering the domain (periodic grids exclude `2π`).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.domain();
        if self.is_revolution() {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
        }
    }

    fn validate(&self, space: &ModelSpace) -> Result<()> {
        let profile = self.profile();
        match (&self.shape, space) {
            (Shape::Curve(_), s) if s.dim() != 2 => {
                return invalid("curves require a two-dimensional space");
            }
            (Shape::Revolution(_), ModelSpace::Constant { dim: 3, .. }) => {}
            (Shape::Revolution(_), _) => {
                return invalid("surfaces of revolution require a three-dimensional constant-curvature space");
            }
            _ => {}
        }
        let c = space.constant_curvature();
        match profile {
            Profile::Fourier(f) => {
                if !f.a0.is_finite() || f.harmonics.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                    return invalid("fourier_curve: non-finite coefficient");
                }
                if self.is_revolution() && f.harmonics.iter().any(|&(_, b)| b != 0.0) {
                    return invalid("revolution profile: sine terms break pole smoothness p'(0) = p'(pi) = 0");
                }
            }
            Profile::OffsetSphere(s) => {
                if c.is_none() {
                    return invalid("offset_sphere requires a constant-curvature space");
                }
                if !(s.r > 0.0 && s.a >= 0.0 && s.a < s.r) {
                    return invalid(format!("offset_sphere: need 0 <= a < r, got r = {}, a = {}", s.r, s.a));
                }
                if s.r + s.a >= space.conjugate_radius() * (1.0 - 1e-8) {
                    return invalid("offset_sphere: body reaches the conjugate radius of the chart");
                }
            }
            Profile::OffsetEllipse(e) => {
                if c != Some(0.0) {
                    return invalid("offset_ellipse is only defined in Euclidean space");
                }
                let axes_ok = if self.is_revolution() { e.b > 0.0 && e.a > 0.0 } else { e.a >= e.b && e.b > 0.0 };
                if !axes_ok {
                    return invalid(format!("offset_ellipse: need A >= B > 0, got A = {}, B = {}", e.a, e.b));
                }
                if !(e.e >= 0.0 && e.e < e.a) {
                    return invalid(format!("offset_ellipse: need 0 <= e < A, got e = {}", e.e));
                }
            }
        }
        let limit = match space {
            ModelSpace::Warped(p) => p.t_max(),
            _ => space.conjugate_radius(),
        };
        for theta in self.grid(VALIDATION_GRID) {
            let jet = self.jet(space, theta);
            if !(jet.p > 0.0) || !jet.p.is_finite() {
                return invalid(format!("{}: p = {} <= 0 at theta = {theta}", profile.name(), jet.p));
            }
            if jet.p >= limit {
                return invalid(format!(
                    "{}: p = {} at theta = {theta} leaves the chart (limit {limit})",
                    profile.name(),
                    jet.p
                ));
            }
        }
        if self.is_revolution() {
            for end in [0.0, PI] {
                if self.jet(space, end).dp.abs() > 1e-10 {
                    return invalid("revolution profile: p'(0) and p'(pi) must vanish");
                }
            }
        }
        if !self.star_shaped {
            let k = self.kn_range(space, VALIDATION_GRID)?;
            if !(k.k_min > 0.0) {
                return invalid(format!(
                    "{}: not convex, normal curvature {} at theta = {}",
                    profile.name(),
                    k.k_min,
                    k.theta_min
                ));
            }
        }
        Ok(())
    }

    /// `(p, p', p'')` at parameter `theta`.
    pub fn jet(&self, space: &ModelSpace, theta: f64) -> Jet {
        self.profile().jet(space.constant_curvature().unwrap_or(0.0), theta)
    }

    /// `|<N, ∂t>| = sn(p) / √(sn(p)² + p'²)`.
    pub fn normal_angle_cos(&self, space: &ModelSpace, theta: f64) -> f64 {
        let jet = self.jet(space, theta);
        let s = space.warp(jet.p).f;
        s / s.hypot(jet.dp)
    }

    /// Normal curvature with respect to the inner normal. `direction` only
    /// matters for surfaces of revolution.
    pub fn normal_curvature(&self, space: &ModelSpace, theta: f64, direction: Direction) -> f64 {
        let jet = self.jet(space, theta);
        let w = space.warp(jet.p);
        let (s, ds, dp) = (w.f, w.df, jet.dp);
        let q = s * s + dp * dp;
        match (direction, self.is_revolution()) {
            (Direction::Parallel, true) => {
                let sin = theta.sin();
                // cot α · p' tends to p'' at the poles
                let cot_dp = if sin.abs() < 1e-6 { jet.ddp } else { theta.cos() / sin * dp };
                (s * ds - cot_dp) / (s * q.sqrt())
            }
            _ => (s * s * ds + 2.0 * ds * dp * dp - s * jet.ddp) / (q * q.sqrt()),
        }
    }

    /// Support function `h = p · |<N, ∂t>|`.
    pub fn support_function(&self, space: &ModelSpace, theta: f64) -> f64 {
        self.jet(space, theta).p * self.normal_angle_cos(space, theta)
    }

    /// Extreme normal curvatures (both principal directions for surfaces of
    /// revolution): an `n`-point grid scan, with every grid extremum close to
    /// the best one refined by golden-section search over its two cells.
    pub fn kn_range(&self, space: &ModelSpace, n: usize) -> Result<KnRange> {
        if n < 64 {
            return invalid(format!("kn_range: need at least 64 samples, got {n}"));
        }
        let directions: &[Direction] =
            if self.is_revolution() { &[Direction::Meridian, Direction::Parallel] } else { &[Direction::Meridian] };
        let grid = self.grid(n);
        let step = grid[1] - grid[0];
        let (lo, hi) = self.domain();
        let periodic = !self.is_revolution();
        let mut range = KnRange {
            k_min: f64::INFINITY,
            k_max: f64::NEG_INFINITY,
            theta_min: 0.0,
            theta_max: 0.0,
        };
        for &dir in directions {
            let k: Vec<f64> = grid.iter().map(|&theta| self.normal_curvature(space, theta, dir)).collect();
            for sign in [1.0, -1.0] {
                // sign = 1 looks for the minimum, -1 for the maximum
                let v = |i: usize| sign * k[i];
                let best = (0..n).map(v).fold(f64::INFINITY, f64::min);
                let slack = 1e-3 * best.abs().max(1e-3);
                for i in 0..n {
                    let (prev, next) = match (i, periodic) {
                        (0, true) => (n - 1, 1),
                        (0, false) => (0, 1),
                        (i, _) if i == n - 1 => (i - 1, if periodic { 0 } else { i }),
                        (i, _) => (i - 1, i + 1),
                    };
                    if v(i) > v(prev) || v(i) > v(next) || v(i) > best + slack {
                        continue;
                    }
                    let (a, b) = if periodic {
                        (grid[i] - step, grid[i] + step)
                    } else {
                        ((grid[i] - step).max(lo), (grid[i] + step).min(hi))
                    };
                    let f = |theta: f64| sign * self.normal_curvature(space, theta, dir);
                    let (mut theta, mut value) = roots::golden_min(f, a, b, 1e-10);
                    if v(i) < value {
                        (theta, value) = (grid[i], v(i));
                    }
                    let theta = if periodic { theta.rem_euclid(TAU) } else { theta };
                    if sign > 0.0 && value < range.k_min {
                        range.k_min = value;
                        range.theta_min = theta;
                    }
                    if sign < 0.0 && -value > range.k_max {
                        range.k_max = -value;
                        range.theta_max = theta;
                    }
                }
            }
        }
        Ok(range)
    }

    /// Global minimum `d` and maximum of the distance from the origin, with
    /// every critical point of `p` located by bracketing sign changes of `p'`
    /// on [`CRITICAL_CELLS`] cells.
    pub fn rho_extrema(&self, space: &ModelSpace) -> Result<Extrema> {
        let (lo, hi) = self.domain();
        let n = CRITICAL_CELLS;
        let width = (hi - lo) / n as f64;
        let thetas: Vec<f64> = (0..=n).map(|i| lo + width * i as f64).collect();
        let jets: Vec<Jet> = thetas.iter().map(|&t| self.jet(space, t)).collect();
        let p_scale = jets.iter().fold(1.0f64, |m, j| m.max(j.p.abs()));
        let eps = 1e-13 * p_scale;
        let zero: Vec<bool> = jets.iter().map(|j| j.dp.abs() <= eps).collect();

        if zero.iter().all(|&z| z) {
            let (d, rho_max) = jets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), j| (a.min(j.p), b.max(j.p)));
            return Ok(Extrema {
                d,
                rho_max,
                argmin: Vec::new(),
                argmax: Vec::new(),
                critical: Vec::new(),
                sphere_like: true,
            });
        }
        if let Some(i) = (0..n).find(|&i| zero[i] && zero[i + 1]) {
            return Err(Error::Resolution(format!(
                "degenerate plateau (sphere-like segment) near theta = {}: p' vanishes on an interval",
                thetas[i]
            )));
        }

        let dp = |t: f64| {
            let j = self.jet(space, t);
            (j.dp, j.ddp)
        };
        let mut found: Vec<f64> = Vec::new();
        let periodic = !self.is_revolution();
        for i in 0..=n {
            if periodic && i == n {
                break;
            }
            if zero[i] {
                let jet = jets[i];
                let step = if jet.ddp != 0.0 { jet.dp / jet.ddp } else { 0.0 };
                found.push(if step.abs() < width { thetas[i] - step } else { thetas[i] });
            }
            if i < n && !zero[i] && !zero[i + 1] && (jets[i].dp < 0.0) != (jets[i + 1].dp < 0.0) {
                let guess = thetas[i] - jets[i].dp * width / (jets[i + 1].dp - jets[i].dp);
                found.push(roots::newton_bracketed(dp, thetas[i], thetas[i + 1], guess));
            }
        }
        if !periodic {
            for end in [lo, hi] {
                if !found.iter().any(|&t| (t - end).abs() < 1e-9) {
                    found.push(end);
                }
            }
        }
        found.sort_by(|a, b| a.total_cmp(b));
        found.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        if periodic && found.len() > 1 && (found[0] + TAU - found[found.len() - 1]).abs() < 1e-9 {
            found.pop();
        }

        let h = 0.25 * width;
        let mut critical = Vec::with_capacity(found.len());
        for &theta in &found {
            let jet = self.jet(space, theta);
            let kind = if jet.ddp.abs() > 1e-9 * p_scale {
                if jet.ddp > 0.0 {
                    CriticalKind::Min
                } else {
                    CriticalKind::Max
                }
            } else {
                let (left, right) = (
                    self.jet(space, (theta - h).max(if periodic { f64::NEG_INFINITY } else { lo })).p,
                    self.jet(space, (theta + h).min(if periodic { f64::INFINITY } else { hi })).p,
                );
                if left.min(right) >= jet.p {
                    CriticalKind::Min
                } else if left.max(right) <= jet.p {
                    CriticalKind::Max
                } else {
                    return Err(Error::Resolution(format!(
                        "degenerate critical point of p at theta = {theta} (inflection of the distance)"
                    )));
                }
            };
            critical.push(Critical { theta, p: jet.p, kind });
        }
        let pairs = if periodic { critical.len() } else { critical.len().saturating_sub(1) };
        let alternates = (0..pairs).all(|i| critical[i].kind != critical[(i + 1) % critical.len()].kind);
        if critical.is_empty() || !alternates || (periodic && critical.len() % 2 == 1) {
            return Err(Error::Resolution(format!(
                "critical points of p are closer than the {n}-cell bracket grid resolves"
            )));
        }

        let d = critical.iter().map(|c| c.p).fold(f64::INFINITY, f64::min);
        let rho_max = critical.iter().map(|c| c.p).fold(f64::NEG_INFINITY, f64::max);
        let close = 1e-12 * p_scale;
        let argmin = critical.iter().filter(|c| c.p <= d + close).map(|c| c.theta).collect();
        let argmax = critical.iter().filter(|c| c.p >= rho_max - close).map(|c| c.theta).collect();
        Ok(Extrema { d, rho_max, argmin, argmax, critical, sphere_like: false })
    }

    /// Parameter intervals on which `p` is strictly monotone, each oriented
    /// from a local minimum to the adjacent local maximum. A body with
    /// constant `p` has none.
    pub fn monotone_segments(&self, space: &ModelSpace) -> Result<Vec<Segment>> {
        let extrema = self.rho_extrema(space)?;
        Ok(segments_from(&extrema, !self.is_revolution()))
    }

    /// All parameters where `p = level`, found by root-finding on each
    /// monotone segment. For a body with constant `p` equal to `level`, a
    /// uniform sample of the whole domain is returned.
    pub fn level_set(&self, space: &ModelSpace, extrema: &Extrema, segments: &[Segment], level: f64) -> Vec<f64> {
        let eps = 1e-12 * level.abs().max(1.0);
        if extrema.sphere_like {
            return if (level - extrema.d).abs() <= eps { self.grid(64) } else { Vec::new() };
        }
        segments.iter().filter_map(|seg| self.theta_at_level(space, seg, level)).collect()
    }

    /// The parameter on `segment` where `p = level`, if the level is attained there.
    pub fn theta_at_level(&self, space: &ModelSpace, segment: &Segment, level: f64) -> Option<f64> {
        let eps = 1e-12 * level.abs().max(1.0);
        let (p_start, p_end) = (self.jet(space, segment.start()).p, self.jet(space, segment.end()).p);
        if level < p_start - eps || level > p_end + eps {
            return None;
        }
        if level <= p_start {
            return Some(segment.start());
        }
        if level >= p_end {
            return Some(segment.end());
        }
        let f = |t: f64| {
            let j = self.jet(space, t);
            (j.p - level, j.dp)
        };
        let guess = segment.start() + (segment.end() - segment.start()) * (level - p_start) / (p_end - p_start);
        Some(roots::newton_bracketed(f, segment.lo, segment.hi, guess))
    }

    /// Samples of the gradient trajectory of the distance along `segment`,
    /// at `n` interior parameters.
    pub fn trajectory(&self, space: &ModelSpace, segment: &Segment, n: usize) -> Vec<TrajectorySample> {
        (1..=n)
            .map(|j| {
                let theta = segment.lo + (segment.hi - segment.lo) * j as f64 / (n + 1) as f64;
                let jet = self.jet(space, theta);
                let w = space.warp(jet.p);
                TrajectorySample {
                    t: jet.p,
                    theta,
                    cos_angle: self.normal_angle_cos(space, theta),
                    k_n: self.normal_curvature(space, theta, Direction::Meridian),
                    mu: w.df / w.f,
                }
            })
            .collect()
    }

    /// Largest violation of `k_n = cos·μ + d(cos)/dt` over `n` interior
    /// samples of a monotone segment, with `d/dt = (d/dθ) / p'`.
    pub fn riccati_residual(&self, space: &ModelSpace, segment: &Segment, n: usize) -> Result<RiccatiResidual> {
        if n == 0 {
            return invalid("riccati_residual: need at least one sample");
        }
        let mut out = RiccatiResidual { max_residual: 0.0, theta: segment.lo, evaluated: 0, skipped: 0 };
        for j in 1..=n {
            let theta = segment.lo + (segment.hi - segment.lo) * j as f64 / (n + 1) as f64;
            let jet = self.jet(space, theta);
            if jet.dp.abs() < 1e-10 {
                out.skipped += 1;
                continue;
            }
            let w = space.warp(jet.p);
            let (s, ds) = (w.f, w.df);
            let q = s * s + jet.dp * jet.dp;
            let root_q = q.sqrt();
            let cos = s / root_q;
            let d_s = ds * jet.dp;
            let d_q = 2.0 * s * d_s + 2.0 * jet.dp * jet.ddp;
            let d_cos = d_s / root_q - 0.5 * s * d_q / (q * root_q);
            let mu = ds / s;
            let k = self.normal_curvature(space, theta, Direction::Meridian);
            let residual = (k - cos * mu - d_cos / jet.dp).abs();
            out.evaluated += 1;
            if residual > out.max_residual {
                out.max_residual = residual;
                out.theta = theta;
            }
        }
        Ok(out)
    }
}

pub(crate) fn segments_from(extrema: &Extrema, periodic: bool) -> Vec<Segment> {
    let crit = &extrema.critical;
    if extrema.sphere_like || crit.len() < 2 {
        return Vec::new();
    }
    let count = if periodic { crit.len() } else { crit.len() - 1 };
    (0..count)
        .map(|i| {
            let a = crit[i];
            let b = crit[(i + 1) % crit.len()];
            let hi = if i + 1 == crit.len() { b.theta + TAU } else { b.theta };
            Segment { lo: a.theta, hi, increasing: a.kind == CriticalKind::Min }
        })
        .collect()
}

/// Draws random Fourier curves until one passes validation in `space` and
/// satisfies `accept`. Deterministic for a seeded generator.
pub fn random_convex_fourier<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &RandomFourier,
    space: &ModelSpace,
    max_attempts: usize,
    accept: impl Fn(&Surface) -> bool,
) -> Result<Surface> {
    for _ in 0..max_attempts {
        let curve = FourierCurve::random(rng, spec);
        if let Ok(surface) = Surface::curve(Profile::Fourier(curve), space) {
            if accept(&surface) {
                return Ok(surface);
            }
        }
    }
    invalid(format!("no admissible random Fourier body after {max_attempts} attempts"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspace::{sphere_angle, sphere_mu, sphere_support, WarpedProfile};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn flat() -> ModelSpace {
        ModelSpace::constant(0.0, 2).unwrap()
    }

    fn ellipse(e: f64) -> Surface {
        Surface::curve(Profile::OffsetEllipse(OffsetEllipse { a: 1.2, b: 1.0, e }), &flat()).unwrap()
    }

    fn offset_sphere(c: f64, r: f64, a: f64) -> (Surface, ModelSpace) {
        let space = ModelSpace::constant(c, 2).unwrap();
        (Surface::curve(Profile::OffsetSphere(OffsetSphere { r, a }), &space).unwrap(), space)
    }

    #[test]
    fn eval_p_examples() {
        let circle = Surface::curve(Profile::Fourier(FourierCurve::circle(1.0)), &flat()).unwrap();
        for th in [0.0, 1.0, 4.0] {
            assert_eq!(circle.jet(&flat(), th), Jet { p: 1.0, dp: 0.0, ddp: 0.0 });
        }
        let (s, space) = offset_sphere(0.0, 1.0, 0.5);
        let j = s.jet(&space, 0.0);
        assert_abs_diff_eq!(j.p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dp, 0.0, epsilon = 1e-15);
        assert!(j.ddp > 0.0);
        let j = ellipse(0.0).jet(&flat(), 0.0);
        assert_abs_diff_eq!(j.p, 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dp, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn implicit_derivatives_match_finite_differences() {
        let h = 1e-4;
        for (surface, space) in [offset_sphere(1.0, 0.9, 0.3), offset_sphere(-1.0, 1.0, 0.6), (ellipse(0.5), flat())] {
            for th in [0.3, 1.7, 2.9, 5.0] {
                let j = surface.jet(&space, th);
                let (m, p) = (surface.jet(&space, th - h), surface.jet(&space, th + h));
                assert_abs_diff_eq!(j.dp, (p.p - m.p) / (2.0 * h), epsilon = 1e-7);
                assert_abs_diff_eq!(j.ddp, (p.p - 2.0 * j.p + m.p) / (h * h), epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn offset_sphere_points_are_at_distance_r_from_centre() {
        use crate::modelspace::{geodesic_distance, PolarPoint};
        for (c, r, a) in [(0.0, 1.0, 0.5), (1.0, 0.9, 0.4), (-1.0, 1.3, 0.8)] {
            let (s, space) = offset_sphere(c, r, a);
            let centre = PolarPoint::planar(a, PI);
            for th in [0.0, 0.4, 1.9, 3.0, 4.4] {
                let x = PolarPoint::planar(s.jet(&space, th).p, th);
                assert_abs_diff_eq!(geodesic_distance(c, &centre, &x), r, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn normal_angle_examples() {
        let circle = Surface::curve(Profile::Fourier(FourierCurve::circle(2.0)), &flat()).unwrap();
        assert_eq!(circle.normal_angle_cos(&flat(), 1.3), 1.0);
        let (s, space) = offset_sphere(0.0, 1.0, 0.5);
        // p(θ) = 1 where -0.5 cos θ + sqrt(1 - 0.25 sin² θ) = 1, i.e. cos θ = -0.25
        let th = (-0.25f64).acos();
        assert_abs_diff_eq!(s.jet(&space, th).p, 1.0, epsilon = 1e-14);
        let oracle = sphere_angle(0.0, 1.0, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(s.normal_angle_cos(&space, th), oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(s.support_function(&space, th), sphere_support(0.0, 1.0, 0.5, 1.0).unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(ellipse(0.0).normal_angle_cos(&flat(), 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ellipse(0.0).support_function(&flat(), 0.0), 1.2, epsilon = 1e-15);
    }

    #[test]
    fn normal_curvature_examples() {
        let circle = Surface::curve(Profile::Fourier(FourierCurve::circle(2.0)), &flat()).unwrap();
        assert_abs_diff_eq!(circle.normal_curvature(&flat(), 0.2, Direction::Meridian), 0.5, epsilon = 1e-15);
        let sphere = ModelSpace::constant(1.0, 2).unwrap();
        let geo = Surface::curve(Profile::Fourier(FourierCurve::circle(PI / 4.0)), &sphere).unwrap();
        assert_abs_diff_eq!(geo.normal_curvature(&sphere, 0.2, Direction::Meridian), 1.0, epsilon = 1e-14);
        // classical vertex curvature A/B² of the ellipse
        assert_abs_diff_eq!(ellipse(0.0).normal_curvature(&flat(), 0.0, Direction::Meridian), 1.2, epsilon = 1e-13);
    }

    #[test]
    fn offset_sphere_has_constant_curvature() {
        for (c, r, a) in [(0.0, 1.0, 0.5), (1.0, 0.9, 0.4), (-1.0, 1.3, 0.8)] {
            let (s, space) = offset_sphere(c, r, a);
            let expected = sphere_mu(&ModelSpace::constant(c, 2).unwrap(), r).unwrap();
            for th in s.grid(256) {
                assert_abs_diff_eq!(s.normal_curvature(&space, th, Direction::Meridian), expected, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn kn_range_examples() {
        let circle = Surface::curve(Profile::Fourier(FourierCurve::circle(1.0)), &flat()).unwrap();
        let k = circle.kn_range(&flat(), 64).unwrap();
        assert_abs_diff_eq!(k.k_min, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.k_max, 1.0, epsilon = 1e-15);
        let k = ellipse(0.0).kn_range(&flat(), 1024).unwrap();
        assert_abs_diff_eq!(k.k_min, 1.0 / 1.44, epsilon = 1e-12);
        assert_abs_diff_eq!(k.k_max, 1.2, epsilon = 1e-12);
        assert!(circle.kn_range(&flat(), 10).is_err());
    }

    #[test]
    fn rho_extrema_examples() {
        let (s, space) = offset_sphere(0.0, 1.0, 0.5);
        let e = s.rho_extrema(&space).unwrap();
        assert_abs_diff_eq!(e.d, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(e.rho_max, 1.5, epsilon = 1e-14);
        let e = ellipse(0.0).rho_extrema(&flat()).unwrap();
        assert_abs_diff_eq!(e.d, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.rho_max, 1.2, epsilon = 1e-14);
        assert_eq!(e.argmin.len(), 2);
        assert_eq!(e.argmax.len(), 2);
        let e = ellipse(0.5).rho_extrema(&flat()).unwrap();
        assert_abs_diff_eq!(e.d, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(e.rho_max, 1.7, epsilon = 1e-14);
    }

    #[test]
    fn monotone_segment_examples() {
        let circle = Surface::curve(Profile::Fourier(FourierCurve::circle(1.0)), &flat()).unwrap();
        assert!(circle.monotone_segments(&flat()).unwrap().is_empty());
        let (s, space) = offset_sphere(0.0, 1.0, 0.5);
        let segs = s.monotone_segments(&space).unwrap();
        assert_eq!(segs.len(), 2);
        assert_abs_diff_eq!(segs[0].lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(segs[0].hi, PI, epsilon = 1e-12);
        assert!(segs[0].increasing);
        assert_abs_diff_eq!(segs[1].lo, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(segs[1].hi, TAU, epsilon = 1e-12);
        assert_eq!(segs[1].start(), segs[1].hi);
        assert_eq!(ellipse(0.0).monotone_segments(&flat()).unwrap().len(), 4);
    }

    #[test]
    fn kn_range_refines_off_grid_extrema() {
        let body = Surface::curve(Profile::Fourier(FourierCurve::new(1.0, vec![(0.0, 0.0), (0.03, 0.02), (-0.01, 0.005)])), &flat())
            .unwrap();
        let coarse = body.kn_range(&flat(), 64).unwrap();
        let dense = (0..200_000).map(|i| body.normal_curvature(&flat(), TAU * (i as f64 + 0.5) / 200_000.0, Direction::Meridian));
        let (lo, hi) = dense.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), k| (a.min(k), b.max(k)));
        assert!(coarse.k_min <= lo + 1e-12 && coarse.k_min >= lo - 1e-9);
        assert!(coarse.k_max >= hi - 1e-12 && coarse.k_max <= hi + 1e-9);
    }

    #[test]
    fn level_set_finds_both_sides() {
        let e = ellipse(0.0);
        let ex = e.rho_extrema(&flat()).unwrap();
        let segs = segments_from(&ex, true);
        let pts = e.level_set(&flat(), &ex, &segs, 1.1);
        assert_eq!(pts.len(), 4);
        for th in pts {
            assert_abs_diff_eq!(e.jet(&flat(), th).p, 1.1, epsilon = 1e-14);
        }
        assert_eq!(e.level_set(&flat(), &ex, &segs, 1.0).len(), 4);
        assert!(e.level_set(&flat(), &ex, &segs, 1.3).is_empty());
    }

    #[test]
    fn riccati_examples() {
        for (s, space) in [offset_sphere(0.0, 1.0, 0.5), offset_sphere(1.0, 0.9, 0.3), (ellipse(0.0), flat())] {
            for seg in s.monotone_segments(&space).unwrap() {
                let res = s.riccati_residual(&space, &seg, 256).unwrap();
                assert!(res.max_residual <= 1e-8, "{res:?}");
            }
        }
        let warped = ModelSpace::warped(WarpedProfile::new(vec![0.0, 0.1], 1.5).unwrap());
        let f = Surface::curve(Profile::Fourier(FourierCurve::new(1.0, vec![(0.0, 0.0), (0.05, 0.0)])), &warped).unwrap();
        for seg in f.monotone_segments(&warped).unwrap() {
            assert!(f.riccati_residual(&warped, &seg, 256).unwrap().max_residual <= 1e-6);
        }
    }

    #[test]
    fn trajectory_samples_are_consistent() {
        let (s, space) = offset_sphere(0.0, 1.0, 0.5);
        let seg = s.monotone_segments(&space).unwrap()[0];
        let samples = s.trajectory(&space, &seg, 16);
        assert_eq!(samples.len(), 16);
        for w in samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        for smp in samples {
            assert!(smp.cos_angle > 0.0 && smp.cos_angle <= 1.0);
            assert_abs_diff_eq!(smp.k_n, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(smp.mu, 1.0 / smp.t, epsilon = 1e-14);
        }
    }

    #[test]
    fn validation_rejects_bad_bodies() {
        // dent: p'' large enough to flip curvature
        let dented = FourierCurve::new(1.0, vec![(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.2, 0.0)]);
        assert!(Surface::curve(Profile::Fourier(dented.clone()), &flat()).is_err());
        assert!(Surface::new(Shape::Curve(Profile::Fourier(dented)), true, &flat()).is_ok());
        assert!(Surface::curve(Profile::Fourier(FourierCurve::circle(-1.0)), &flat()).is_err());
        let e = OffsetEllipse { a: 1.0, b: 1.2, e: 0.0 };
        assert!(Surface::curve(Profile::OffsetEllipse(e), &flat()).is_err());
        let sphere = ModelSpace::constant(1.0, 2).unwrap();
        assert!(Surface::curve(Profile::OffsetEllipse(OffsetEllipse { a: 1.2, b: 1.0, e: 0.0 }), &sphere).is_err());
        assert!(Surface::curve(Profile::Fourier(FourierCurve::circle(3.5)), &sphere).is_err());
        let space3 = ModelSpace::constant(0.0, 3).unwrap();
        let skew = FourierCurve::new(1.0, vec![(0.0, 0.1)]);
        assert!(Surface::new(Shape::Revolution(Profile::Fourier(skew)), false, &space3).is_err());
    }

    #[test]
    fn revolution_curvatures() {
        let space = ModelSpace::constant(0.0, 3).unwrap();
        let prolate = Surface::new(
            Shape::Revolution(Profile::OffsetEllipse(OffsetEllipse { a: 1.2, b: 1.0, e: 0.0 })),
            false,
            &space,
        )
        .unwrap();
        // pole: umbilic with curvature A/B²; equator: meridian B/A², parallel 1/B
        for dir in [Direction::Meridian, Direction::Parallel] {
            assert_abs_diff_eq!(prolate.normal_curvature(&space, 0.0, dir), 1.2, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(prolate.normal_curvature(&space, FRAC_PI_2, Direction::Meridian), 1.0 / 1.44, epsilon = 1e-12);
        assert_abs_diff_eq!(prolate.normal_curvature(&space, FRAC_PI_2, Direction::Parallel), 1.0, epsilon = 1e-12);
        let k = prolate.kn_range(&space, 512).unwrap();
        assert_abs_diff_eq!(k.k_max, 1.2, epsilon = 1e-12);
        let ex = prolate.rho_extrema(&space).unwrap();
        assert_abs_diff_eq!(ex.d, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ex.rho_max, 1.2, epsilon = 1e-14);
        assert_eq!(prolate.monotone_segments(&space).unwrap().len(), 2);
    }
}
