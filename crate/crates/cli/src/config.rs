//! Experiment configuration files.
//!
//! A config is a JSON object with a `kind` and a kind-specific `params` record.
//! Parse errors carry the line and column of the offending input.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use exdist::cover::LinearKind;
use exdist::qhyp::ShadowLevel;
use exdist::sets::RasterRule;

pub const DEFAULT_TOLERANCE: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Modulus,
    Covering,
    Distortion,
    Quasihyperbolic,
    SetsProbe,
    Survey,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Modulus => "modulus",
            Kind::Covering => "covering",
            Kind::Distortion => "distortion",
            Kind::Quasihyperbolic => "quasihyperbolic",
            Kind::SetsProbe => "sets-probe",
            Kind::Survey => "survey",
        }
    }

    /// Kinds that draw random numbers and therefore need a seed.
    pub fn stochastic(self) -> bool {
        matches!(self, Kind::Covering | Kind::Survey)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Params {
    Modulus(ModulusParams),
    Covering(CoveringParams),
    Distortion(DistortionParams),
    Quasihyperbolic(QhParams),
    SetsProbe(ProbeParams),
    Survey(SurveyParams),
}

impl Params {
    pub fn kind(&self) -> Kind {
        match self {
            Params::Modulus(_) => Kind::Modulus,
            Params::Covering(_) => Kind::Covering,
            Params::Distortion(_) => Kind::Distortion,
            Params::Quasihyperbolic(_) => Kind::Quasihyperbolic,
            Params::SetsProbe(_) => Kind::SetsProbe,
            Params::Survey(_) => Kind::Survey,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    /// What the experiment reproduces and which statement it checks.
    #[serde(default)]
    pub description: String,
    /// The statement or formula the experiment exercises.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub anchor: String,
    #[serde(flatten)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

// ---------------------------------------------------------------------------
// modulus

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SceneSpec {
    /// `r < |x| < R` in dimension 2 or 3.
    Annulus { dim: usize, r: f64, big_r: f64, cells: usize },
    /// `length x width` rectangle joining the short sides.
    Rectangle { length: f64, width: f64, cells: usize },
    /// Square ring with the two radial slits as F1 and F2.
    SquareRing { r: f64, big_r: f64, cells: usize },
    /// Annulus whose paths must pass one free cell of a separating wall.
    Pinhole { r: f64, big_r: f64, cells: usize },
    /// Rectangle cut by a full wall column: F1 and F2 lie in different
    /// components.
    Split { length: f64, width: f64, cells: usize },
    /// Scene file with run-length encoded masks.
    File { path: PathBuf },
}

impl SceneSpec {
    pub fn with_cells(&self, n: usize) -> SceneSpec {
        let mut s = self.clone();
        match &mut s {
            SceneSpec::Annulus { cells, .. }
            | SceneSpec::Rectangle { cells, .. }
            | SceneSpec::Split { cells, .. }
            | SceneSpec::SquareRing { cells, .. }
            | SceneSpec::Pinhole { cells, .. } => *cells = n,
            SceneSpec::File { .. } => {}
        }
        s
    }

    fn validate(&self, at: &str) -> Result<(), String> {
        let radii = |r: f64, big_r: f64| {
            if r > 0.0 && r < big_r && big_r.is_finite() {
                Ok(())
            } else {
                Err(format!("{at}: need 0 < r < big_r, got r={r}, big_r={big_r}"))
            }
        };
        let cells = |n: usize| if n >= 8 { Ok(()) } else { Err(format!("{at}: need at least 8 cells, got {n}")) };
        match *self {
            SceneSpec::Annulus { dim, r, big_r, cells: n } => {
                if dim != 2 && dim != 3 {
                    return Err(format!("{at}: dim must be 2 or 3, got {dim}"));
                }
                radii(r, big_r)?;
                cells(n)
            }
            SceneSpec::Rectangle { length, width, cells: n } | SceneSpec::Split { length, width, cells: n } => {
                if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
                    return Err(format!("{at}: rectangle sides must be positive"));
                }
                cells(n)
            }
            SceneSpec::SquareRing { r, big_r, cells: n } => {
                radii(r, big_r)?;
                cells(n)?;
                if n % 2 == 1 {
                    return Err(format!("{at}: square ring needs an even cell count"));
                }
                Ok(())
            }
            SceneSpec::Pinhole { r, big_r, cells: n } => {
                radii(r, big_r)?;
                cells(n)
            }
            SceneSpec::File { .. } => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "k", rename_all = "kebab-case")]
pub enum ConstraintSpec {
    #[default]
    Unconstrained,
    Avoid,
    Budget(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "study", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModulusParams {
    /// One solve, compared with the analytic value when one is known.
    Solve {
        scene: SceneSpec,
        #[serde(default)]
        constraint: ConstraintSpec,
        /// Relative accuracy demanded of the analytic comparison.
        #[serde(default = "ten_percent")]
        accuracy: f64,
    },
    /// The same scene at several resolutions; the error against the analytic
    /// value must shrink.
    Refine {
        scene: SceneSpec,
        levels: Vec<usize>,
        #[serde(default)]
        constraint: ConstraintSpec,
        #[serde(default = "ten_percent")]
        accuracy: f64,
    },
    /// Concentric rings `(r_i, r_{i+1})` and the composite ring: the reciprocal
    /// moduli `ω/md^(1/(n-1))` must add up.
    Reciprocal { radii: Vec<f64>, cells: usize },
    /// Values of a scene family under refinement, which must decrease by a
    /// given fraction per level.
    Decay {
        scene: SceneSpec,
        levels: Vec<usize>,
        #[serde(default)]
        constraint: ConstraintSpec,
        min_decrease: f64,
    },
}

fn ten_percent() -> f64 {
    0.1
}

// ---------------------------------------------------------------------------
// covering

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringParams {
    pub maps: Vec<LinearKind>,
    pub constants: Vec<f64>,
    /// Total number of random families, spread over the feasible (map, M) pairs.
    pub families: usize,
    /// Regions per family.
    pub regions: usize,
    /// Sample grid points per side of the unit square.
    pub grid: usize,
}

// ---------------------------------------------------------------------------
// distortion

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// `x -> A x` with a 2x2 matrix given by rows.
    Linear { matrix: [[f64; 2]; 2] },
    /// `(x, y) -> (x, y + φ(x)(sgn(y)|y|^alpha - y))` with `φ = 1` on
    /// `|x| <= half_length`, fading to 0 over the next `half_length`.
    SegmentCusp { alpha: f64, half_length: f64 },
    /// Forward samples from a CSV file (`x,y,fx,fy` rows on a lattice).
    Csv { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    /// Lattice nodes per side.
    pub nodes: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "study", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistortionParams {
    /// Metric and eccentric distortion at a `probes x probes` grid of points.
    Probes {
        map: MapSpec,
        sampling: Sampling,
        probes: usize,
        /// Probe points fill `[lo, hi]^2`.
        probe_box: [f64; 2],
        ladder: Vec<f64>,
        eccentric_radii: Vec<f64>,
        /// Expected H and E (both equal to the maximal stretch ratio for linear maps).
        #[serde(default)]
        expect: Option<f64>,
        #[serde(default = "five_percent")]
        accuracy: f64,
    },
    /// Image moduli of a ladder of rings with a common centre.
    RingQc {
        map: MapSpec,
        sampling: Sampling,
        center: [f64; 2],
        /// Outer radius of the largest ring.
        big_r: f64,
        /// `R / r` for every ring.
        ratio: f64,
        /// Outer radius shrinks by this factor from ring to ring.
        shrink: f64,
        rings: usize,
        /// Cells across the short side of each image scene.
        cells: usize,
        /// Bound applied to the image moduli: `c2 <= factor * C1 + 2 tol C1`.
        #[serde(default)]
        c2_factor: Option<f64>,
        /// Require the image moduli to grow as the rings shrink.
        #[serde(default)]
        expect_growth: bool,
    },
}

fn five_percent() -> f64 {
    0.05
}

// ---------------------------------------------------------------------------
// quasihyperbolic

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainShape {
    Disk { center: [f64; 2], r: f64, sides: usize },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    ExponentialCusp { samples: usize },
    Comb { teeth: usize, width: f64, depth: f64 },
    Polygon { outer: Vec<[f64; 2]>, #[serde(default)] holes: Vec<Vec<[f64; 2]>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "study", rename_all = "kebab-case", deny_unknown_fields)]
pub enum QhParams {
    /// Quasihyperbolic distance between two points plus Whitney checks.
    Distance {
        domain: DomainShape,
        from: [f64; 2],
        to: [f64; 2],
        cells: usize,
        whitney_depth: u32,
        #[serde(default = "five_percent")]
        accuracy: f64,
    },
    /// Shadow sums against the integral of `k^2` over refinement levels.
    ShadowSum {
        domain: DomainShape,
        base: [f64; 2],
        levels: Vec<ShadowLevel>,
        expect: ShadowExpectation,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trend", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShadowExpectation {
    /// Ratios of consecutive levels stay within the factor.
    Stable { factor: f64 },
    /// The rhs growth between the first and last level is at least `factor`
    /// times the lhs growth.
    RhsOutgrows { factor: f64 },
    None,
}

// ---------------------------------------------------------------------------
// sets

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    /// Regular polygon inscribed in a circle.
    Circle { center: [f64; 2], r: f64, sides: usize },
    /// Fat Cantor set on `[a, b]` times `[y0, y1]`.
    FatCantorStrip { a: f64, b: f64, y0: f64, y1: f64, depth: u32 },
    /// Middle-thirds Cantor set on `[0, 1]` times `[y0, y1]`.
    CantorStrip { y0: f64, y1: f64, depth: u32 },
    Points { points: Vec<[f64; 2]> },
    Segments { segments: Vec<[[f64; 2]; 2]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "signature", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Signature {
    /// Avoiding the set is impossible, crossing it once is almost free.
    Separating { k: u32, min_fraction: f64 },
    /// Every budget value stays below a fraction of the full modulus.
    NonRemovable { max_k: u32, max_fraction: f64 },
    /// Avoiding the set costs nothing.
    Negligible,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeParams {
    pub set: SetSpec,
    pub scene: SceneSpec,
    pub budgets: Vec<u32>,
    #[serde(default = "closure")]
    pub rule: RasterRule,
    pub expect: Signature,
}

fn closure() -> RasterRule {
    RasterRule::Closure
}

// ---------------------------------------------------------------------------
// survey

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "curve", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    Polyline { points: Vec<[f64; 2]> },
    Circle { center: [f64; 2], r: f64, sides: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyParams {
    pub set: SetSpec,
    pub curve: CurveSpec,
    pub n_max: usize,
    pub samples: usize,
    /// `N m(F_N) <= factor * length(γ) * H^1(E)` is checked.
    pub factor: f64,
}

// ---------------------------------------------------------------------------
// parsing and validation

/// Configuration problem, with the input position when it comes from parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn invalid(message: impl Into<String>) -> Self {
        ConfigError { line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig<'a> {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    anchor: String,
    kind: Kind,
    #[serde(borrow)]
    params: &'a RawValue,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn json_error(e: &serde_json::Error, base: (usize, usize)) -> ConfigError {
    let (line, column) = if e.line() == 0 {
        (None, None)
    } else if e.line() == 1 {
        (Some(base.0), Some(base.1 + e.column() - 1))
    } else {
        (Some(base.0 + e.line() - 1), Some(e.column()))
    };
    // serde_json appends its own " at line L column C" to the message.
    let full = e.to_string();
    let message = match full.rfind(" at line ") {
        Some(i) => full[..i].to_string(),
        None => full,
    };
    ConfigError { line, column, message }
}

/// 1-based line and column of byte offset `off` in `text`.
fn position(text: &str, off: usize) -> (usize, usize) {
    let before = &text[..off];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(off, |i| off - i - 1) + 1;
    (line, column)
}

fn params_of<T: serde::de::DeserializeOwned>(text: &str, raw: &RawValue) -> Result<T, ConfigError> {
    let off = raw.get().as_ptr() as usize - text.as_ptr() as usize;
    serde_json::from_str(raw.get()).map_err(|e| {
        let mut err = json_error(&e, position(text, off));
        // Errors from inside tagged enums carry no usable position; point at
        // the offending key or variant instead.
        if let Some(at) = offending_token(&err.message, raw.get()) {
            let (l, c) = position(text, off + at);
            err.line = Some(l);
            err.column = Some(c);
        }
        err
    })
}

/// Offset of the quoted token named by an "unknown field" or "unknown
/// variant" message, if it occurs in `json`.
fn offending_token(message: &str, json: &str) -> Option<usize> {
    let rest = message.strip_prefix("unknown field `").or_else(|| message.strip_prefix("unknown variant `"))?;
    let name = &rest[..rest.find('`')?];
    json.find(&format!("\"{name}\""))
}

impl ExperimentConfig {
    /// Parses and validates a config file's contents.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| json_error(&e, (1, 1)))?;
        let params = match raw.kind {
            Kind::Modulus => Params::Modulus(params_of(text, raw.params)?),
            Kind::Covering => Params::Covering(params_of(text, raw.params)?),
            Kind::Distortion => Params::Distortion(params_of(text, raw.params)?),
            Kind::Quasihyperbolic => Params::Quasihyperbolic(params_of(text, raw.params)?),
            Kind::SetsProbe => Params::SetsProbe(params_of(text, raw.params)?),
            Kind::Survey => Params::Survey(params_of(text, raw.params)?),
        };
        let cfg = ExperimentConfig {
            name: raw.name,
            description: raw.description,
            anchor: raw.anchor,
            params,
            seed: raw.seed,
            output: raw.output,
            tolerance: raw.tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn kind(&self) -> Kind {
        self.params.kind()
    }

    /// Checks the kind-specific parameters without running anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::invalid(m));
        if self.name.trim().is_empty() {
            return bad("name must not be empty".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad(format!("tolerance must lie in (0, 1), got {}", self.tolerance));
        }
        if self.kind().stochastic() && self.seed.is_none() {
            return bad(format!("{} experiments need a seed", self.kind().name()));
        }
        let r = match &self.params {
            Params::Modulus(p) => validate_modulus(p),
            Params::Covering(p) => validate_covering(p),
            Params::Distortion(p) => validate_distortion(p),
            Params::Quasihyperbolic(p) => validate_qh(p),
            Params::SetsProbe(p) => validate_probe(p),
            Params::Survey(p) => validate_survey(p),
        };
        r.map_err(ConfigError::invalid)
    }
}

fn levels_ok(levels: &[usize]) -> Result<(), String> {
    if levels.len() < 2 {
        return Err("params.levels: need at least two levels".into());
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err("params.levels: must be strictly increasing".into());
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> Result<(), String> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(format!("params.{name}: must be positive, got {x}"))
    }
}

fn validate_modulus(p: &ModulusParams) -> Result<(), String> {
    match p {
        ModulusParams::Solve { scene, accuracy, .. } => {
            scene.validate("params.scene")?;
            positive("accuracy", *accuracy)
        }
        ModulusParams::Refine { scene, levels, accuracy, .. } => {
            scene.validate("params.scene")?;
            levels_ok(levels)?;
            if matches!(scene, SceneSpec::File { .. }) {
                return Err("params.scene: file scenes cannot be refined".into());
            }
            for &n in levels {
                scene.with_cells(n).validate("params.levels")?;
            }
            positive("accuracy", *accuracy)
        }
        ModulusParams::Reciprocal { radii, cells } => {
            if radii.len() < 3 {
                return Err("params.radii: need at least three radii".into());
            }
            if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
                return Err("params.radii: must be positive and strictly increasing".into());
            }
            if *cells < 8 {
                return Err("params.cells: need at least 8 cells".into());
            }
            Ok(())
        }
        ModulusParams::Decay { scene, levels, min_decrease, .. } => {
            scene.validate("params.scene")?;
            levels_ok(levels)?;
            if matches!(scene, SceneSpec::File { .. }) {
                return Err("params.scene: file scenes cannot be refined".into());
            }
            if !(*min_decrease >= 0.0 && *min_decrease < 1.0) {
                return Err(format!("params.min_decrease: must lie in [0, 1), got {min_decrease}"));
            }
            Ok(())
        }
    }
}

fn validate_covering(p: &CoveringParams) -> Result<(), String> {
    if p.maps.is_empty() || p.constants.is_empty() {
        return Err("params: maps and constants must be nonempty".into());
    }
    for &m in &p.constants {
        if !(m > 1.0 && m.is_finite()) {
            return Err(format!("params.constants: egg-yolk constants must exceed 1, got {m}"));
        }
    }
    if p.grid < 4 {
        return Err("params.grid: need at least 4 points per side".into());
    }
    let feasible = p.maps.iter().any(|k| p.constants.iter().any(|&m| m >= k.min_constant()));
    if p.families > 0 && !feasible {
        return Err("params: no (map, constant) pair admits disk families".into());
    }
    Ok(())
}

fn validate_map(map: &MapSpec, s: &Sampling) -> Result<(), String> {
    if s.nodes < 3 || !(s.lo < s.hi) {
        return Err("params.sampling: need nodes >= 3 and lo < hi".into());
    }
    match map {
        MapSpec::Linear { matrix: a } => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if !(det > 0.0) {
                return Err(format!("params.map: matrix must have positive determinant, got {det}"));
            }
        }
        MapSpec::SegmentCusp { alpha, half_length } => {
            positive("map.alpha", *alpha)?;
            positive("map.half_length", *half_length)?;
        }
        MapSpec::Identity | MapSpec::Csv { .. } => {}
    }
    Ok(())
}

fn validate_distortion(p: &DistortionParams) -> Result<(), String> {
    match p {
        DistortionParams::Probes { map, sampling, probes, probe_box, ladder, eccentric_radii, accuracy, .. } => {
            validate_map(map, sampling)?;
            if *probes == 0 {
                return Err("params.probes: need at least one probe per side".into());
            }
            if !(probe_box[0] <= probe_box[1]) {
                return Err("params.probe_box: lo must not exceed hi".into());
            }
            if ladder.is_empty() || eccentric_radii.is_empty() {
                return Err("params: ladder and eccentric_radii must be nonempty".into());
            }
            for &r in ladder.iter().chain(eccentric_radii) {
                positive("ladder", r)?;
            }
            positive("accuracy", *accuracy)
        }
        DistortionParams::RingQc { map, sampling, big_r, ratio, shrink, rings, cells, .. } => {
            validate_map(map, sampling)?;
            positive("big_r", *big_r)?;
            if !(*ratio > 1.0) || !(*shrink > 1.0) {
                return Err("params: ratio and shrink must exceed 1".into());
            }
            if *rings == 0 || *cells < 8 {
                return Err("params: need at least one ring and 8 cells".into());
            }
            Ok(())
        }
    }
}

fn validate_domain(d: &DomainShape) -> Result<(), String> {
    match d {
        DomainShape::Disk { r, sides, .. } => {
            positive("domain.r", *r)?;
            if *sides < 3 {
                return Err("params.domain.sides: need at least 3".into());
            }
        }
        DomainShape::Rectangle { lo, hi } => {
            if !(lo[0] < hi[0] && lo[1] < hi[1]) {
                return Err("params.domain: rectangle corners out of order".into());
            }
        }
        DomainShape::ExponentialCusp { samples } => {
            if *samples < 8 {
                return Err("params.domain.samples: need at least 8".into());
            }
        }
        DomainShape::Comb { teeth, width, depth } => {
            if *teeth == 0 {
                return Err("params.domain.teeth: need at least one tooth".into());
            }
            positive("domain.width", *width)?;
            positive("domain.depth", *depth)?;
        }
        DomainShape::Polygon { outer, .. } => {
            if outer.len() < 3 {
                return Err("params.domain.outer: need at least 3 vertices".into());
            }
        }
    }
    Ok(())
}

fn validate_qh(p: &QhParams) -> Result<(), String> {
    match p {
        QhParams::Distance { domain, cells, accuracy, .. } => {
            validate_domain(domain)?;
            if *cells < 8 {
                return Err("params.cells: need at least 8".into());
            }
            positive("accuracy", *accuracy)
        }
        QhParams::ShadowSum { domain, levels, expect, .. } => {
            validate_domain(domain)?;
            if levels.is_empty() {
                return Err("params.levels: need at least one level".into());
            }
            if let ShadowExpectation::Stable { factor } | ShadowExpectation::RhsOutgrows { factor } = expect {
                positive("expect.factor", *factor)?;
            }
            if levels.len() < 2 && !matches!(expect, ShadowExpectation::None) {
                return Err("params.levels: trend checks need two levels".into());
            }
            Ok(())
        }
    }
}

fn validate_set(s: &SetSpec) -> Result<(), String> {
    match s {
        SetSpec::Circle { r, sides, .. } => {
            positive("set.r", *r)?;
            if *sides < 3 {
                return Err("params.set.sides: need at least 3".into());
            }
        }
        SetSpec::FatCantorStrip { a, b, y0, y1, .. } => {
            if !(a < b && y0 <= y1) {
                return Err("params.set: need a < b and y0 <= y1".into());
            }
        }
        SetSpec::CantorStrip { y0, y1, .. } => {
            if !(y0 <= y1) {
                return Err("params.set: need y0 <= y1".into());
            }
        }
        SetSpec::Points { points } if points.is_empty() => return Err("params.set.points: empty".into()),
        SetSpec::Segments { segments } if segments.is_empty() => return Err("params.set.segments: empty".into()),
        _ => {}
    }
    Ok(())
}

fn validate_probe(p: &ProbeParams) -> Result<(), String> {
    validate_set(&p.set)?;
    p.scene.validate("params.scene")?;
    if let SceneSpec::Annulus { dim: 3, .. } = p.scene {
        return Err("params.scene: sets are planar; use a 2D scene".into());
    }
    match p.expect {
        Signature::Separating { k, .. } if !p.budgets.contains(&k) => {
            Err(format!("params.budgets: the separating signature needs budget {k}"))
        }
        Signature::NonRemovable { max_k, .. } if !p.budgets.iter().any(|&k| k <= max_k) => {
            Err("params.budgets: no budget within the non-removable range".into())
        }
        _ => Ok(()),
    }
}

fn validate_survey(p: &SurveyParams) -> Result<(), String> {
    validate_set(&p.set)?;
    if p.n_max == 0 || p.samples == 0 {
        return Err("params: n_max and samples must be positive".into());
    }
    positive("factor", p.factor)?;
    match &p.curve {
        CurveSpec::Polyline { points } if points.len() < 2 => Err("params.curve.points: need two vertices".into()),
        CurveSpec::Circle { r, .. } => positive("curve.r", *r),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
  "name": "t",
  "kind": "modulus",
  "params": {"study": "solve", "scene": {"shape": "rectangle", "length": 2, "width": 1, "cells": 16}},
  "tolerance": 0.01
}"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(GOOD).unwrap();
        assert_eq!(c.kind(), Kind::Modulus);
        let again = ExperimentConfig::parse(&c.to_json()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn errors_point_into_params() {
        let bad = GOOD.replace("\"width\": 1", "\"widht\": 1");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, Some(4), "{e}");
        assert!(e.message.contains("widht"), "{e}");
    }

    #[test]
    fn unknown_top_level_field() {
        let bad = GOOD.replace("\"tolerance\"", "\"tolerence\"");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.line, Some(5), "{e}");
    }

    #[test]
    fn semantic_errors_have_no_position() {
        let bad = GOOD.replace("\"cells\": 16", "\"cells\": 4");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert!(e.line.is_none());
        assert!(e.message.contains("8 cells"));
    }

    #[test]
    fn stochastic_kinds_need_seed() {
        let text = r#"{"name": "c", "kind": "covering",
            "params": {"maps": ["identity"], "constants": [4], "families": 1, "regions": 3, "grid": 20}}"#;
        let e = ExperimentConfig::parse(text).unwrap_err();
        assert!(e.message.contains("seed"));
    }
}
