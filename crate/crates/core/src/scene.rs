//! Declarative scenes: a JSON description of a space, a body and one check,
//! its execution, and the JSON/CSV report files.

use crate::comparison::{self, ComparisonConfig, ComparisonReport, DualReport, MonotoneReport};
use crate::error::{Error, Result};
use crate::hypersurface::{
    FourierCurve, OffsetEllipse, OffsetSphere, Profile, RandomFourier, RiccatiResidual, Segment, Shape, Surface,
    VALIDATION_GRID,
};
use crate::modelspace::{radius_for_curvature, validate_half_ball, ModelSpace, WarpedProfile};
use crate::polar::{self, PolarReport};
use crate::rolling::{self, Part, ProjectionReport, RollingReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Constant {
        c: f64,
        #[serde(default = "default_dim")]
        dim: u8,
    },
    Warped {
        /// Coefficients of `t², t³, ...` in `φ(t)`.
        coeffs: Vec<f64>,
        t_max: f64,
    },
}

fn default_dim() -> u8 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    FourierCurve {
        a0: f64,
        #[serde(default)]
        harmonics: Vec<[f64; 2]>,
    },
    OffsetSphere {
        r: f64,
        a: f64,
    },
    OffsetEllipse {
        a: f64,
        b: f64,
        #[serde(default)]
        e: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    FourierCurve {
        a0: f64,
        #[serde(default)]
        harmonics: Vec<[f64; 2]>,
        #[serde(default)]
        star_shaped: bool,
    },
    OffsetSphere {
        r: f64,
        a: f64,
        #[serde(default)]
        star_shaped: bool,
    },
    OffsetEllipse {
        a: f64,
        b: f64,
        #[serde(default)]
        e: f64,
        #[serde(default)]
        star_shaped: bool,
    },
    /// Fourier curve drawn from the scene seed.
    RandomFourier {
        harmonics: usize,
        radius: f64,
        #[serde(default)]
        offset: f64,
        roughness: f64,
        #[serde(default = "default_attempts")]
        max_attempts: usize,
        #[serde(default)]
        star_shaped: bool,
    },
    Revolution {
        profile: ProfileSpec,
        #[serde(default)]
        star_shaped: bool,
    },
}

fn default_attempts() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Angle {
        k1: f64,
        #[serde(default)]
        c1: Option<f64>,
    },
    Support {
        k1: f64,
        #[serde(default)]
        c1: Option<f64>,
    },
    Dual {
        k2: f64,
        #[serde(default)]
        c2: Option<f64>,
    },
    Monotone {
        k1: f64,
        #[serde(default)]
        c1: Option<f64>,
        /// Index among the segments rooted at the global minimum; all when absent.
        #[serde(default)]
        segment: Option<usize>,
    },
    Riccati,
    RollA {
        lambda: f64,
    },
    RollB {
        lambda: f64,
    },
    Polar,
    Projection {
        direction: [f64; 3],
    },
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Angle { .. } => "angle",
            CheckSpec::Support { .. } => "support",
            CheckSpec::Dual { .. } => "dual",
            CheckSpec::Monotone { .. } => "monotone",
            CheckSpec::Riccati => "riccati",
            CheckSpec::RollA { .. } => "roll_a",
            CheckSpec::RollB { .. } => "roll_b",
            CheckSpec::Polar => "polar",
            CheckSpec::Projection { .. } => "projection",
        }
    }

    fn default_tol(&self, warped: bool) -> f64 {
        match self {
            CheckSpec::Angle { .. } | CheckSpec::Support { .. } | CheckSpec::Dual { .. } | CheckSpec::Monotone { .. } => {
                if warped {
                    1e-5
                } else {
                    1e-7
                }
            }
            CheckSpec::Riccati => {
                if warped {
                    1e-6
                } else {
                    1e-8
                }
            }
            CheckSpec::RollA { .. } | CheckSpec::RollB { .. } => 1e-8,
            CheckSpec::Polar => 1e-5,
            CheckSpec::Projection { .. } => 1e-4,
        }
    }

    fn default_n(&self) -> usize {
        match self {
            CheckSpec::Polar | CheckSpec::Projection { .. } => 2048,
            _ => 256,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default)]
    pub n_l: Option<usize>,
    #[serde(default)]
    pub n_p: Option<usize>,
    #[serde(default)]
    pub n_x: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_true")]
    pub csv: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), csv: true }
    }
}

fn default_dir() -> String {
    "out".to_string()
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub space: SpaceSpec,
    pub surface: SurfaceSpec,
    pub check: CheckSpec,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn profile_of(spec: &ProfileSpec) -> Profile {
    match spec {
        ProfileSpec::FourierCurve { a0, harmonics } => {
            Profile::Fourier(FourierCurve::new(*a0, harmonics.iter().map(|h| (h[0], h[1])).collect()))
        }
        ProfileSpec::OffsetSphere { r, a } => Profile::OffsetSphere(OffsetSphere { r: *r, a: *a }),
        ProfileSpec::OffsetEllipse { a, b, e } => Profile::OffsetEllipse(OffsetEllipse { a: *a, b: *b, e: *e }),
    }
}

impl SceneSpec {
    /// Parses and validates a scene, filling every default so that the echo
    /// in a report is self-contained.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut spec: SceneSpec = serde_json::from_str(text).map_err(|e| Error::Scene(e.to_string()))?;
        spec.fill_defaults()?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialises")
    }

    pub fn build_space(&self) -> Result<ModelSpace> {
        match &self.space {
            SpaceSpec::Constant { c, dim } => ModelSpace::constant(*c, *dim),
            SpaceSpec::Warped { coeffs, t_max } => Ok(ModelSpace::warped(WarpedProfile::new(coeffs.clone(), *t_max)?)),
        }
    }

    pub fn build_surface(&self, space: &ModelSpace) -> Result<Surface> {
        let (shape, star) = match &self.surface {
            SurfaceSpec::FourierCurve { a0, harmonics, star_shaped } => (
                Shape::Curve(profile_of(&ProfileSpec::FourierCurve { a0: *a0, harmonics: harmonics.clone() })),
                *star_shaped,
            ),
            SurfaceSpec::OffsetSphere { r, a, star_shaped } => {
                (Shape::Curve(Profile::OffsetSphere(OffsetSphere { r: *r, a: *a })), *star_shaped)
            }
            SurfaceSpec::OffsetEllipse { a, b, e, star_shaped } => {
                (Shape::Curve(Profile::OffsetEllipse(OffsetEllipse { a: *a, b: *b, e: *e })), *star_shaped)
            }
            SurfaceSpec::RandomFourier { harmonics, radius, offset, roughness, max_attempts, star_shaped } => {
                let spec = RandomFourier { harmonics: *harmonics, radius: *radius, offset: *offset, roughness: *roughness };
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                for _ in 0..*max_attempts {
                    let curve = FourierCurve::random(&mut rng, &spec);
                    if let Ok(s) = Surface::new(Shape::Curve(Profile::Fourier(curve)), *star_shaped, space) {
                        return Ok(s);
                    }
                }
                return Err(Error::InvalidInput(format!(
                    "random_fourier: no admissible body after {max_attempts} attempts"
                )));
            }
            SurfaceSpec::Revolution { profile, star_shaped } => (Shape::Revolution(profile_of(profile)), *star_shaped),
        };
        Surface::new(shape, star, space)
    }

    fn fill_defaults(&mut self) -> Result<()> {
        let space = self.build_space()?;
        let (c_min, c_max) = space.curvature_range();
        match &mut self.check {
            CheckSpec::Angle { c1, .. } | CheckSpec::Support { c1, .. } | CheckSpec::Monotone { c1, .. } => {
                c1.get_or_insert(c_min);
            }
            CheckSpec::Dual { c2, .. } => {
                c2.get_or_insert(c_max);
            }
            _ => {}
        }
        let warped = matches!(self.space, SpaceSpec::Warped { .. });
        self.tol.get_or_insert(self.check.default_tol(warped));
        self.sampling.n_l.get_or_insert(64);
        self.sampling.n_p.get_or_insert(256);
        self.sampling.n_x.get_or_insert(4096);
        self.sampling.n.get_or_insert(self.check.default_n());
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let tol = self.tol();
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::Scene(format!("tol: must be a non-negative number, got {tol}")));
        }
        let space = self.build_space()?;
        match (&self.check, &space) {
            (CheckSpec::Angle { k1, c1 } | CheckSpec::Support { k1, c1 } | CheckSpec::Monotone { k1, c1, .. }, _) => {
                radius_for_curvature(c1.expect("filled"), *k1)?;
            }
            (CheckSpec::Dual { k2, c2 }, _) => {
                radius_for_curvature(c2.expect("filled"), *k2)?;
            }
            (CheckSpec::RollA { lambda } | CheckSpec::RollB { lambda }, ModelSpace::Constant { c, .. }) => {
                radius_for_curvature(*c, *lambda)?;
            }
            (CheckSpec::RollA { .. } | CheckSpec::RollB { .. }, _) => {
                return Err(Error::Scene("check: rolling needs a constant-curvature space".into()));
            }
            _ => {}
        }
        self.build_surface(&space)?;
        Ok(())
    }

    pub fn tol(&self) -> f64 {
        self.tol.expect("filled")
    }

    /// Replaces the tolerance, as the command line `--tol` does.
    pub fn set_tol(&mut self, tol: f64) -> Result<()> {
        self.tol = Some(tol);
        self.validate()
    }
}

/// Reads and validates a scene file.
pub fn parse_scene(path: &Path) -> Result<SceneSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::Scene(format!("{}: {e}", path.display())))?;
    SceneSpec::from_json(&text).map_err(|e| match e {
        Error::Scene(m) => Error::Scene(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Measured hypotheses, reported for every run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisSummary {
    pub k_min: f64,
    pub k_max: f64,
    pub curvature_min: f64,
    pub curvature_max: f64,
    pub d: f64,
    pub rho_max: f64,
    pub sphere_like: bool,
    /// Curvature used for the half-ball condition, and its outcome.
    pub half_ball_c: f64,
    pub half_ball: Option<bool>,
    pub star_shaped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiccatiReport {
    pub segments: Vec<(Segment, RiccatiResidual)>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckResult {
    Angle(ComparisonReport),
    Support(ComparisonReport),
    Dual(DualReport),
    Monotone { segments: Vec<MonotoneReport>, pass: bool },
    Riccati(RiccatiReport),
    Roll(RollingReport),
    Polar(PolarReport),
    Projection(ProjectionReport),
}

impl CheckResult {
    pub fn pass(&self) -> bool {
        match self {
            CheckResult::Angle(r) | CheckResult::Support(r) => r.pass,
            CheckResult::Dual(r) => r.pass,
            CheckResult::Monotone { pass, .. } => *pass,
            CheckResult::Riccati(r) => r.pass,
            CheckResult::Roll(r) => r.pass,
            CheckResult::Polar(r) => r.pass,
            CheckResult::Projection(r) => r.pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub class: &'static str,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scene: SceneSpec,
    pub hypotheses: Option<HypothesisSummary>,
    pub result: Option<CheckResult>,
    pub error: Option<ErrorRecord>,
    pub pass: bool,
}

impl RunReport {
    /// 0 when the check passed, 1 for a failed inequality or hypothesis, 2
    /// for invalid input.
    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.pass) {
            (Some(e), _) => e.exit_code,
            (None, true) => 0,
            (None, false) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

fn summarize(spec: &SceneSpec, space: &ModelSpace, surface: &Surface) -> Result<HypothesisSummary> {
    let kn = surface.kn_range(space, VALIDATION_GRID)?;
    let (curvature_min, curvature_max) = space.curvature_range();
    let extrema = surface.rho_extrema(space)?;
    let half_ball_c = match &spec.check {
        CheckSpec::Dual { c2, .. } => c2.expect("filled"),
        _ => curvature_max,
    };
    Ok(HypothesisSummary {
        k_min: kn.k_min,
        k_max: kn.k_max,
        curvature_min,
        curvature_max,
        d: extrema.d,
        rho_max: extrema.rho_max,
        sphere_like: extrema.sphere_like,
        half_ball_c,
        half_ball: (half_ball_c > 0.0).then(|| validate_half_ball(half_ball_c, extrema.rho_max)),
        star_shaped: surface.is_star_shaped(),
    })
}

fn execute(spec: &SceneSpec, space: &ModelSpace, surface: &Surface) -> Result<CheckResult> {
    let tol = spec.tol();
    let n_l = spec.sampling.n_l.expect("filled");
    let n = spec.sampling.n.expect("filled");
    let (n_p, n_x) = (spec.sampling.n_p.expect("filled"), spec.sampling.n_x.expect("filled"));
    let lower = |c1: &Option<f64>, k1: f64| ComparisonConfig::lower(c1.expect("filled"), k1).with_levels(n_l).with_tol(tol);
    Ok(match &spec.check {
        CheckSpec::Angle { k1, c1 } => CheckResult::Angle(comparison::verify_angle(surface, space, &lower(c1, *k1))?),
        CheckSpec::Support { k1, c1 } => CheckResult::Support(comparison::verify_support(surface, space, &lower(c1, *k1))?),
        CheckSpec::Dual { k2, c2 } => {
            let config = ComparisonConfig::upper(c2.expect("filled"), *k2).with_levels(n_l).with_tol(tol);
            CheckResult::Dual(comparison::verify_dual(surface, space, &config)?)
        }
        CheckSpec::Monotone { k1, c1, segment } => {
            let config = lower(c1, *k1);
            let rooted = comparison::rooted_segments(surface, space)?;
            let chosen: Vec<Segment> = match segment {
                Some(i) => vec![*rooted.get(*i).ok_or_else(|| {
                    Error::InvalidInput(format!("segment {i} out of range: {} rooted segments", rooted.len()))
                })?],
                None => rooted,
            };
            if chosen.is_empty() {
                return Err(Error::InvalidInput("no monotone segment: the body is a sphere about O".into()));
            }
            let segments = chosen
                .iter()
                .map(|s| comparison::verify_monotone(surface, space, &config, s))
                .collect::<Result<Vec<_>>>()?;
            let pass = segments.iter().all(|r| r.pass);
            CheckResult::Monotone { segments, pass }
        }
        CheckSpec::Riccati => {
            let segments = surface
                .monotone_segments(space)?
                .into_iter()
                .map(|s| Ok((s, surface.riccati_residual(space, &s, n)?)))
                .collect::<Result<Vec<_>>>()?;
            let max_residual = segments.iter().map(|(_, r)| r.max_residual).fold(0.0, f64::max);
            CheckResult::Riccati(RiccatiReport { segments, max_residual, tol, pass: max_residual <= tol })
        }
        CheckSpec::RollA { lambda } => {
            CheckResult::Roll(rolling::check_rolling(surface, space, Part::A, *lambda, n_p, n_x, tol)?)
        }
        CheckSpec::RollB { lambda } => {
            CheckResult::Roll(rolling::check_rolling(surface, space, Part::B, *lambda, n_p, n_x, tol)?)
        }
        CheckSpec::Polar => CheckResult::Polar(polar::polar_check(surface, space, n, tol)?),
        CheckSpec::Projection { direction } => {
            CheckResult::Projection(rolling::projection_lemma_check(surface, space, *direction, n, tol)?)
        }
    })
}

/// Runs the scene. Hypotheses are measured first; any error is recorded
/// in the report rather than returned.
pub fn run_scene(spec: &SceneSpec) -> RunReport {
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        scene: spec.clone(),
        hypotheses: None,
        result: None,
        error: None,
        pass: false,
    };
    let outcome = (|| {
        let space = spec.build_space()?;
        let surface = spec.build_surface(&space)?;
        report.hypotheses = Some(summarize(spec, &space, &surface)?);
        execute(spec, &space, &surface)
    })();
    match outcome {
        Ok(result) => {
            report.pass = result.pass();
            report.result = Some(result);
        }
        Err(e) => {
            report.error = Some(ErrorRecord {
                class: e.class(),
                message: format!("{} check: {e}", spec.check.name()),
                exit_code: e.exit_code(),
            });
        }
    }
    report
}

fn csv_number(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

fn csv_table(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push_str("\r\n");
    for row in rows {
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            csv_number(&mut out, *x);
        }
        out.push_str("\r\n");
    }
    out
}

const LEVEL_HEADER: &str = "l,surface_value,sphere_value,margin";

fn level_csv(report: &ComparisonReport) -> String {
    csv_table(LEVEL_HEADER, report.rows.iter().map(|r| vec![r.l, r.surface_value, r.sphere_value, r.margin]))
}

/// CSV files for a report, as `(file name, contents)`.
pub fn csv_files(report: &RunReport) -> Result<Vec<(&'static str, String)>> {
    Ok(match &report.result {
        Some(CheckResult::Angle(r)) | Some(CheckResult::Support(r)) => vec![("rows.csv", level_csv(r))],
        Some(CheckResult::Dual(r)) => vec![("rows.csv", level_csv(&r.angle)), ("rows_support.csv", level_csv(&r.support))],
        Some(CheckResult::Roll(r)) => vec![(
            "rows.csv",
            csv_table("theta_P,margin,witness_theta", r.rows.iter().map(|x| vec![x.theta_p, x.margin, x.witness_theta])),
        )],
        Some(CheckResult::Polar(_)) => {
            let spec = &report.scene;
            let space = spec.build_space()?;
            let surface = spec.build_surface(&space)?;
            let n = spec.sampling.n.expect("filled");
            let dual = polar::polar_dual(&polar::embed_curve(&surface, &space, n)?)?;
            let rows = dual.points.iter().enumerate().map(|(i, x)| {
                vec![std::f64::consts::TAU * i as f64 / n as f64, x[0], x[1], x[2]]
            });
            vec![("dual_points.csv", csv_table("theta,x0,x1,x2", rows))]
        }
        _ => Vec::new(),
    })
}

/// Writes `report.json` and, when enabled, the CSV rows into `dir`. Returns
/// the written paths.
pub fn emit_report(report: &RunReport, dir: &Path, csv: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    fs::write(&path, report.to_json())?;
    written.push(path);
    if csv {
        for (name, contents) in csv_files(report)? {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANGLE: &str = r#"{
        "space": {"kind": "constant", "c": 0.0},
        "surface": {"kind": "offset_sphere", "r": 1.0, "a": 0.5},
        "check": {"kind": "angle", "k1": 1.0}
    }"#;

    #[test]
    fn defaults_are_filled() {
        let spec = SceneSpec::from_json(ANGLE).unwrap();
        assert_eq!(spec.check, CheckSpec::Angle { k1: 1.0, c1: Some(0.0) });
        assert_eq!(spec.tol, Some(1e-7));
        assert_eq!(spec.sampling.n_l, Some(64));
        assert_eq!(spec.seed, 0);
        assert_eq!(SceneSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn parse_errors_are_structured() {
        let err = SceneSpec::from_json(r#"{"space": {"kind": "constant", "c": 0.0}, "check": {"kind": "riccati"}}"#)
            .unwrap_err();
        assert!(matches!(&err, Error::Scene(m) if m.contains("surface")), "{err}");
        let err = SceneSpec::from_json(&ANGLE.replace("\"a\": 0.5", "\"a\": 0.5, \"b\": 1")).unwrap_err();
        assert!(matches!(err, Error::Scene(_)));
        let err = SceneSpec::from_json(
            r#"{"space": {"kind": "constant", "c": -1.0},
                "surface": {"kind": "offset_sphere", "r": 1.0, "a": 0.5},
                "check": {"kind": "angle", "k1": 0.5}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoCompactSphere { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn equality_scene_passes() {
        let report = run_scene(&SceneSpec::from_json(ANGLE).unwrap());
        assert!(report.pass);
        assert_eq!(report.exit_code(), 0);
        match report.result {
            Some(CheckResult::Angle(r)) => assert!(r.min_margin.abs() <= 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_has_fixed_header_and_crlf() {
        let report = run_scene(&SceneSpec::from_json(ANGLE).unwrap());
        let files = csv_files(&report).unwrap();
        assert_eq!(files.len(), 1);
        let text = &files[0].1;
        assert!(text.starts_with("l,surface_value,sphere_value,margin\r\n"));
        assert_eq!(text.matches("\r\n").count(), 65);
    }
}
