//! Closed-form geometry of the comparison spaces.
//!
//! A constant-curvature space `M(c)` is described in geodesic polar
//! coordinates by the metric `dt² + sn_c(t)² dΩ²`, a rotationally symmetric
//! warped surface by `dt² + φ(t)² dθ²`. Everything a radial graph needs from
//! the ambient space is the warping function and its first two derivatives,
//! see [`ModelSpace::warp`].

use crate::error::{invalid, Error, Result};
use crate::roots;
use std::f64::consts::PI;

/// Below this value of `|c|·t²` the trigonometric forms are replaced by
/// their Taylor series.
const SERIES_CUTOFF: f64 = 1e-8;

/// Grid used to validate warped profiles and to sample their curvature.
const PROFILE_GRID: usize = 1024;

/// Generalised sine without domain checks: `sin(√c t)/√c`, `t` or
/// `sinh(√-c t)/√-c`.
pub fn sn_unchecked(c: f64, t: f64) -> f64 {
    let x = c * t * t;
    if x.abs() < SERIES_CUTOFF {
        t * (1.0 - x / 6.0 + x * x / 120.0)
    } else if c > 0.0 {
        let s = c.sqrt();
        (s * t).sin() / s
    } else {
        let s = (-c).sqrt();
        (s * t).sinh() / s
    }
}

/// Generalised cosine, the derivative of [`sn_unchecked`] in `t`.
pub fn cs_unchecked(c: f64, t: f64) -> f64 {
    let x = c * t * t;
    if x.abs() < SERIES_CUTOFF {
        1.0 - x / 2.0 + x * x / 24.0
    } else if c > 0.0 {
        (c.sqrt() * t).cos()
    } else {
        ((-c).sqrt() * t).cosh()
    }
}

/// `(1 - cs_c(t)) / c`, computed without cancellation; tends to `t²/2`.
pub fn vs_unchecked(c: f64, t: f64) -> f64 {
    let h = sn_unchecked(c, 0.5 * t);
    2.0 * h * h
}

/// Inverse of `sn_c` on its increasing branch.
pub fn asn_unchecked(c: f64, x: f64) -> f64 {
    let y = c * x * x;
    if y.abs() < SERIES_CUTOFF {
        x * (1.0 + y / 6.0 + 3.0 * y * y / 40.0)
    } else if c > 0.0 {
        let s = c.sqrt();
        (s * x).min(1.0).asin() / s
    } else {
        let s = (-c).sqrt();
        (s * x).asinh() / s
    }
}

/// Generalised sine `sn_c(t)`, the radius function of geodesic spheres in `M(c)`.
pub fn sn(c: f64, t: f64) -> Result<f64> {
    if !c.is_finite() || !t.is_finite() {
        return invalid(format!("sn: non-finite argument (c = {c}, t = {t})"));
    }
    if t < 0.0 {
        return invalid(format!("sn: negative length t = {t}"));
    }
    if c > 0.0 && t >= PI / c.sqrt() {
        return invalid(format!("sn: t = {t} reaches the conjugate radius pi/sqrt({c})"));
    }
    Ok(sn_unchecked(c, t))
}

/// Values of a warping function and its first two derivatives at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Warp {
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
}

/// Radial profile `φ(t) = t + Σ_{j≥2} a_j t^j` of a rotationally symmetric
/// surface, valid on `(0, t_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedProfile {
    coeffs: Vec<f64>,
    t_max: f64,
}

impl WarpedProfile {
    /// `coeffs[0]` multiplies `t²`, `coeffs[1]` multiplies `t³`, and so on.
    pub fn new(coeffs: Vec<f64>, t_max: f64) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return invalid(format!("warped profile: domain cap T = {t_max} must be positive"));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return invalid("warped profile: non-finite coefficient");
        }
        let profile = Self { coeffs, t_max };
        for i in 1..=PROFILE_GRID {
            let t = t_max * i as f64 / PROFILE_GRID as f64;
            let w = profile.eval(t);
            if w.f <= 0.0 || w.df <= 0.0 {
                return invalid(format!(
                    "warped profile: phi = {}, phi' = {} at t = {t}; both must stay positive on (0, T]",
                    w.f, w.df
                ));
            }
        }
        Ok(profile)
    }

    /// The flat profile `φ(t) = t`.
    pub fn euclidean(t_max: f64) -> Result<Self> {
        Self::new(Vec::new(), t_max)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn eval(&self, t: f64) -> Warp {
        let (mut f, mut df, mut ddf) = (t, 1.0, 0.0);
        for (i, &a) in self.coeffs.iter().enumerate() {
            let j = (i + 2) as f64;
            let tj2 = t.powi(i as i32);
            f += a * tj2 * t * t;
            df += a * j * tj2 * t;
            ddf += a * j * (j - 1.0) * tj2;
        }
        Warp { f, df, ddf }
    }

    /// Gaussian curvature `-φ''/φ` of the surface at radius `t`.
    pub fn curvature(&self, t: f64) -> f64 {
        let w = self.eval(t);
        -w.ddf / w.f
    }
}

/// The ambient space of a body.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpace {
    /// `M^dim(c)`, dimension 2 or 3.
    Constant { c: f64, dim: u8 },
    /// Two-dimensional warped surface with its pole at the chart origin.
    Warped(WarpedProfile),
}

impl ModelSpace {
    pub fn constant(c: f64, dim: u8) -> Result<Self> {
        if !c.is_finite() {
            return invalid(format!("model space: curvature c = {c} must be finite"));
        }
        if !(dim == 2 || dim == 3) {
            return invalid(format!("model space: dimension {dim} not in {{2, 3}}"));
        }
        Ok(ModelSpace::Constant { c, dim })
    }

    pub fn warped(profile: WarpedProfile) -> Self {
        ModelSpace::Warped(profile)
    }

    pub fn dim(&self) -> u8 {
        match self {
            ModelSpace::Constant { dim, .. } => *dim,
            ModelSpace::Warped(_) => 2,
        }
    }

    /// Curvature of a constant-curvature space, `None` for warped ones.
    pub fn constant_curvature(&self) -> Option<f64> {
        match self {
            ModelSpace::Constant { c, .. } => Some(*c),
            ModelSpace::Warped(_) => None,
        }
    }

    /// Radius beyond which polar coordinates about the origin break down.
    pub fn conjugate_radius(&self) -> f64 {
        match self {
            ModelSpace::Constant { c, .. } if *c > 0.0 => PI / c.sqrt(),
            ModelSpace::Constant { .. } => f64::INFINITY,
            ModelSpace::Warped(p) => p.t_max(),
        }
    }

    /// Warping function `sn_c` (or `φ`) with derivatives at radius `t`.
    pub fn warp(&self, t: f64) -> Warp {
        match self {
            ModelSpace::Constant { c, .. } => {
                let s = sn_unchecked(*c, t);
                Warp { f: s, df: cs_unchecked(*c, t), ddf: -c * s }
            }
            ModelSpace::Warped(p) => p.eval(t),
        }
    }

    /// Range `(c1, c2)` of sectional curvatures seen by bodies in this space.
    pub fn curvature_range(&self) -> (f64, f64) {
        match self {
            ModelSpace::Constant { c, .. } => (*c, *c),
            ModelSpace::Warped(p) => warped_curvature_range(p, PROFILE_GRID),
        }
    }
}

/// Normal curvature of the geodesic sphere of radius `t` about the origin.
pub fn sphere_mu(space: &ModelSpace, t: f64) -> Result<f64> {
    let limit = space.conjugate_radius();
    if !(t > 0.0 && t < limit) {
        return invalid(format!("sphere_mu: radius t = {t} outside (0, {limit})"));
    }
    if let ModelSpace::Warped(p) = space {
        if t > p.t_max() {
            return invalid(format!("sphere_mu: radius t = {t} beyond profile cap {}", p.t_max()));
        }
    }
    let w = space.warp(t);
    Ok(w.df / w.f)
}

/// Radius of the geodesic sphere in `M(c)` whose normal curvature equals `lambda`.
pub fn radius_for_curvature(c: f64, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) || !c.is_finite() {
        return invalid(format!("radius_for_curvature: need finite lambda > 0, got {lambda}"));
    }
    if c < 0.0 && lambda <= (-c).sqrt() {
        return Err(Error::NoCompactSphere { c, lambda, bound: (-c).sqrt() });
    }
    if c == 0.0 {
        return Ok(1.0 / lambda);
    }
    // cs(r) - lambda sn(r) has the same root as sn'/sn - lambda and no pole at 0
    let g = |r: f64| {
        let (s, k) = (sn_unchecked(c, r), cs_unchecked(c, r));
        (k - lambda * s, -c * s - lambda * k)
    };
    let hi = if c > 0.0 {
        0.5 * PI / c.sqrt()
    } else {
        let mut hi = 1.0 / lambda;
        while g(hi).0 > 0.0 {
            hi *= 2.0;
        }
        hi
    };
    let coarse = roots::bisect(|r| g(r).0, 0.0, hi, 1e-6 * hi);
    Ok(roots::newton_bracketed(g, 0.0, hi, coarse))
}

/// A point in geodesic polar coordinates: distance `t` from the origin along
/// the unit direction `dir`. Planar points use `dir = (cos θ, sin θ, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    pub t: f64,
    pub dir: [f64; 3],
}

impl PolarPoint {
    pub fn planar(t: f64, theta: f64) -> Self {
        Self { t, dir: [theta.cos(), theta.sin(), 0.0] }
    }

    /// Point of a rotationally symmetric chart: `polar` is measured from the
    /// symmetry axis (first coordinate), `azimuth` around it.
    pub fn spatial(t: f64, polar: f64, azimuth: f64) -> Self {
        let (s, c) = polar.sin_cos();
        Self { t, dir: [c, s * azimuth.cos(), s * azimuth.sin()] }
    }

    pub fn theta(&self) -> f64 {
        self.dir[1].atan2(self.dir[0])
    }
}

/// Geodesic distance in `M(c)` between two points given in polar coordinates
/// about a common origin (haversine form of the law of cosines).
pub fn geodesic_distance(c: f64, a: &PolarPoint, b: &PolarPoint) -> f64 {
    let chord2: f64 = (0..3).map(|i| (a.dir[i] - b.dir[i]).powi(2)).sum();
    let half_angle_sin2 = 0.25 * chord2;
    let h = sn_unchecked(c, 0.5 * (a.t - b.t));
    let q = h * h + sn_unchecked(c, a.t) * sn_unchecked(c, b.t) * half_angle_sin2;
    2.0 * asn_unchecked(c, q.max(0.0).sqrt())
}

/// Cosine of the angle between the outward normal and the radial direction
/// for the comparison sphere of radius `r` at a point at distance `l` from a
/// reference point at distance `d` from the sphere.
///
/// Uses the half-angle form of the law of cosines with centre distance
/// `a = r - d`, which is exactly one at `l = d` and `l = 2r - d`.
pub(crate) fn sphere_angle_for_radius(c1: f64, r: f64, d: f64, l: f64) -> f64 {
    let num = 2.0 * sn_unchecked(c1, 0.5 * (2.0 * r - d - l)) * sn_unchecked(c1, 0.5 * (l - d));
    let den = sn_unchecked(c1, r) * sn_unchecked(c1, l);
    (1.0 - num / den).abs()
}

fn check_sphere_args(c1: f64, k1: f64, d: f64, l: f64) -> Result<f64> {
    let r = radius_for_curvature(c1, k1)?;
    if !(d > 0.0) {
        return invalid(format!("comparison depth d = {d} must be positive"));
    }
    if d > r {
        return Err(Error::Feasibility { d, r });
    }
    let slack = 1e-12 * r.max(1.0);
    if !(l >= d - slack && l <= 2.0 * r - d + slack) {
        return invalid(format!("level l = {l} outside [{d}, {}]", 2.0 * r - d));
    }
    Ok(r)
}

/// `|<N1, ∂t>|` on the constant-curvature comparison sphere of curvature
/// `k1` in `M(c1)`, seen from a point at depth `d`, at distance `l`.
pub fn sphere_angle(c1: f64, k1: f64, d: f64, l: f64) -> Result<f64> {
    let r = check_sphere_args(c1, k1, d, l)?;
    Ok(sphere_angle_for_radius(c1, r, d, l.clamp(d, 2.0 * r - d)))
}

/// Support function `l · sphere_angle` of the comparison sphere.
pub fn sphere_support(c1: f64, k1: f64, d: f64, l: f64) -> Result<f64> {
    Ok(l * sphere_angle(c1, k1, d, l)?)
}

/// Minimum and maximum of the radial curvature `-φ''/φ` over `n` grid
/// points of `(0, T]`.
pub fn warped_curvature_range(profile: &WarpedProfile, n: usize) -> (f64, f64) {
    let n = n.max(16);
    (1..=n)
        .map(|i| profile.curvature(profile.t_max() * i as f64 / n as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| (lo.min(k), hi.max(k)))
}

/// Whether a body of outer radius `rho_max` fits in the open ball of radius
/// `π/(2√c2)` that the comparison theorems require when `c2 > 0`.
pub fn validate_half_ball(c2: f64, rho_max: f64) -> bool {
    c2 <= 0.0 || rho_max < 0.5 * PI / c2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sn_examples() {
        assert_eq!(sn(0.0, 2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(sn(1.0, FRAC_PI_2).unwrap(), 1.0, epsilon = 1e-15);
        // sinh(1) by its power series
        let series: f64 = (0..20).map(|k| 1.0 / (1..=2 * k + 1).map(|i| i as f64).product::<f64>()).sum();
        assert_abs_diff_eq!(sn(-1.0, 1.0).unwrap(), series, epsilon = 1e-14);
        assert_abs_diff_eq!(series, 1.175201, epsilon = 1e-6);
    }

    #[test]
    fn sn_rejects_domain_violations() {
        assert!(sn(0.0, -1.0).is_err());
        assert!(sn(1.0, PI).is_err());
        assert!(sn(4.0, 2.0).is_err());
    }

    #[test]
    fn sn_is_continuous_across_zero_curvature() {
        for &t in &[0.1, 1.0, 3.0] {
            let at_zero = sn(0.0, t).unwrap();
            for &c in &[1e-12, -1e-12, 1e-10, -1e-10] {
                assert_abs_diff_eq!(sn(c, t).unwrap(), at_zero, epsilon = 1e-9);
            }
            // either side of the series cutoff
            let c = 1.001 * SERIES_CUTOFF / (t * t);
            let closed = (c.sqrt() * t).sin() / c.sqrt();
            let x = c * t * t;
            let series = t * (1.0 - x / 6.0 + x * x / 120.0);
            assert_abs_diff_eq!(sn_unchecked(c, t), closed, epsilon = 1e-15 * t);
            assert_abs_diff_eq!(closed, series, epsilon = 1e-15 * t);
        }
    }

    #[test]
    fn sphere_mu_examples() {
        let flat = ModelSpace::constant(0.0, 2).unwrap();
        let sphere = ModelSpace::constant(1.0, 2).unwrap();
        let hyp = ModelSpace::constant(-1.0, 2).unwrap();
        assert_abs_diff_eq!(sphere_mu(&flat, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_mu(&sphere, PI / 4.0).unwrap(), 1.0, epsilon = 1e-15);
        let coth1 = 1f64.cosh() / 1f64.sinh();
        assert_abs_diff_eq!(sphere_mu(&hyp, 1.0).unwrap(), coth1, epsilon = 1e-15);
        assert_abs_diff_eq!(coth1, 1.313035, epsilon = 1e-6);
    }

    #[test]
    fn sphere_mu_domain() {
        let sphere = ModelSpace::constant(1.0, 2).unwrap();
        assert!(sphere_mu(&sphere, 0.0).is_err());
        assert!(sphere_mu(&sphere, PI).is_err());
        let warped = ModelSpace::warped(WarpedProfile::new(vec![0.0, 0.1], 1.0).unwrap());
        assert!(sphere_mu(&warped, 1.5).is_err());
        let w = sphere_mu(&warped, 0.5).unwrap();
        assert_abs_diff_eq!(w, (1.0 + 0.3 * 0.25) / (0.5 + 0.1 * 0.125), epsilon = 1e-15);
    }

    #[test]
    fn radius_examples() {
        assert_abs_diff_eq!(radius_for_curvature(0.0, 2.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(radius_for_curvature(1.0, 1.0).unwrap(), PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(radius_for_curvature(-1.0, 2.0).unwrap(), 0.549306, epsilon = 1e-6);
    }

    #[test]
    fn radius_rejects_non_compact() {
        assert!(matches!(radius_for_curvature(-1.0, 1.0), Err(Error::NoCompactSphere { .. })));
        assert!(matches!(radius_for_curvature(-4.0, 0.5), Err(Error::NoCompactSphere { .. })));
        assert!(radius_for_curvature(0.0, 0.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let d = geodesic_distance(0.0, &PolarPoint::planar(1.0, 0.0), &PolarPoint::planar(1.0, PI));
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-15);
        let d = geodesic_distance(
            1.0,
            &PolarPoint::planar(FRAC_PI_2, 0.0),
            &PolarPoint::planar(FRAC_PI_2, FRAC_PI_2),
        );
        assert_abs_diff_eq!(d, FRAC_PI_2, epsilon = 1e-14);
        let d = geodesic_distance(-1.0, &PolarPoint::planar(1.0, 0.0), &PolarPoint::planar(1.0, PI));
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn distance_zero_iff_coincident() {
        for &c in &[-1.0, 0.0, 1.0] {
            let p = PolarPoint::spatial(0.7, 0.4, 1.1);
            assert_eq!(geodesic_distance(c, &p, &p), 0.0);
            let q = PolarPoint::spatial(0.7, 0.4, 1.1 + 1e-9);
            assert!(geodesic_distance(c, &p, &q) > 0.0);
        }
    }

    #[test]
    fn sphere_angle_examples() {
        assert_abs_diff_eq!(sphere_angle(0.0, 1.0, 0.5, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_angle(0.0, 1.0, 0.5, 1.0).unwrap(), 0.875, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_angle(0.0, 1.0, 0.5, 1.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_support(0.0, 1.0, 0.5, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_support(0.0, 1.0, 0.5, 1.0).unwrap(), 0.875, epsilon = 1e-15);
        assert_abs_diff_eq!(sphere_support(0.0, 1.0, 0.5, 1.5).unwrap(), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn sphere_angle_errors() {
        assert!(matches!(sphere_angle(0.0, 1.0, 1.5, 1.5), Err(Error::Feasibility { .. })));
        assert!(matches!(sphere_angle(0.0, 1.0, 0.5, 1.6), Err(Error::InvalidInput(_))));
        assert!(matches!(sphere_angle(0.0, 1.0, 0.5, 0.4), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn warped_range_examples() {
        let flat = WarpedProfile::euclidean(1.0).unwrap();
        assert_eq!(warped_curvature_range(&flat, 64), (0.0, 0.0));
        let cubic = WarpedProfile::new(vec![0.0, 0.1], 1.0).unwrap();
        let (lo, hi) = warped_curvature_range(&cubic, 1024);
        // -0.6 / (1 + 0.1 t²) on (0, 1]: infimum -0.6 near the pole, maximum at t = 1
        assert_abs_diff_eq!(hi, -0.6 / 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, -0.545455, epsilon = 1e-6);
        assert!(lo < -0.5999 && lo > -0.6);
    }

    #[test]
    fn truncated_sine_profile_is_nearly_the_unit_sphere() {
        // sin t through t¹¹
        let mut coeffs = vec![0.0; 10];
        let mut fact = 1.0;
        for j in 2..=11usize {
            fact *= j as f64;
            if j % 2 == 1 {
                coeffs[j - 2] = if j % 4 == 3 { -1.0 / fact } else { 1.0 / fact };
            }
        }
        let sine = WarpedProfile::new(coeffs, 1.0).unwrap();
        let (lo, hi) = warped_curvature_range(&sine, 1024);
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn warped_profile_validation() {
        assert!(WarpedProfile::new(vec![-2.0], 1.0).is_err());
        assert!(WarpedProfile::new(vec![], 0.0).is_err());
        assert!(WarpedProfile::new(vec![0.0, -0.1], 1.0).is_ok());
    }

    #[test]
    fn half_ball_examples() {
        assert!(validate_half_ball(0.5, 1.2));
        assert!(validate_half_ball(-1.0, 100.0));
        assert!(!validate_half_ball(4.0, 1.0));
    }
}
