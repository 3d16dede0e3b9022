//! TOML run configuration: fixture definition, run parameters and regions.
//!
//! ```toml
//! fixture = "fixture-a.toml"        # or an inline [fixture] table
//!
//! [run]
//! depth = 12
//! psi = [1.0, 1.0]
//!
//! [[regions]]
//! name = "upper"
//! role = "disjoint"
//! boxes = [{ re = [1.4, 2.6], im = [0.0, 0.6] }, { re = [1.68, 3.12], im = [0.0, 0.72] }]
//! ```
//!
//! See `fixtures/SCHEMA.md` for every key.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Circle, GeometryError, LinearForm, Torus};
use crate::harness::{default_regions, RegionRole, RegionSpec};
use crate::orbit::{EnumMode, PlanarBox, Region};
use crate::schottky::{admissible_seed_check, JoiningSpec, SchottkyData, SeedTorus, DEFAULT_PING_PONG_MARGIN};

pub const ENV_THREADS: &str = "TORUS_THREADS";
pub const ENV_OUTPUT_DIR: &str = "TORUS_OUTPUT_DIR";

pub const DEFAULT_DEPTH: usize = 12;
pub const DEFAULT_ATOM_DEPTH: usize = 8;
pub const DEFAULT_SLACK: f64 = 2.0;
pub const DEFAULT_SEED_DEPTH: usize = 4;
pub const DEFAULT_SEED_MARGIN: f64 = 0.01;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {reason}")]
    Field { field: String, reason: String },
}

fn field(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    fixture: toml::Value,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    regions: Vec<RawRegion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixture {
    id: String,
    reps: Vec<RawRep>,
    seed: RawSeed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRep {
    pairs: Vec<RawPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    minus: RawDisk,
    plus: RawDisk,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisk {
    center: [f64; 2],
    radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeed {
    circles: Vec<RawDisk>,
    #[serde(default = "default_seed_depth")]
    check_depth: usize,
    #[serde(default = "default_seed_margin")]
    margin: f64,
}

fn default_seed_depth() -> usize {
    DEFAULT_SEED_DEPTH
}

fn default_seed_margin() -> f64 {
    DEFAULT_SEED_MARGIN
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    depth: Option<usize>,
    psi: Option<Vec<f64>>,
    mode: Option<EnumMode>,
    threshold: Option<f64>,
    slack: Option<f64>,
    r_grid: Option<Vec<f64>>,
    atom_depth: Option<usize>,
    tolerance: Option<f64>,
    threads: Option<usize>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    name: String,
    role: RegionRole,
    boxes: Option<Vec<RawBox>>,
    center: Option<Vec<[f64; 2]>>,
    radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    re: [f64; 2],
    im: [f64; 2],
}

/// A validated fixture: joining, certified seed and its definition.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub id: String,
    pub spec: JoiningSpec<f64>,
    pub seed: SeedTorus<f64>,
    raw: RawFixture,
}

/// Parameters of every subcommand, defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunParams {
    pub depth: usize,
    pub psi: Vec<f64>,
    pub mode: EnumMode,
    /// `R` for counts and pruning; `None` means the certified bound.
    pub threshold: Option<f64>,
    pub slack: f64,
    /// Explicit `R` values for count tables.
    pub r_grid: Option<Vec<f64>>,
    pub atom_depth: usize,
    pub tolerance: f64,
    /// 0 uses every core.
    #[serde(skip)]
    pub threads: usize,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub fixture: Fixture,
    pub run: RunParams,
    pub regions: Vec<RegionSpec>,
    /// Whether the regions came from the file rather than the default battery.
    pub explicit_regions: bool,
}

#[derive(Serialize)]
struct Echo<'a> {
    fixture: &'a RawFixture,
    run: &'a RunParams,
    regions: &'a [RegionSpec],
}

impl RunConfig {
    pub fn psi(&self) -> LinearForm<f64> {
        LinearForm::new(self.run.psi.clone())
    }

    /// The effective configuration as JSON. Thread count and output
    /// directory are left out, as they do not affect results.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(Echo {
            fixture: &self.fixture.raw,
            run: &self.run,
            regions: &self.regions,
        })
        .expect("config serializes")
    }

    /// Flags win over the environment, which wins over the file.
    pub fn apply_overrides(
        &mut self,
        threads: Option<usize>,
        output_dir: Option<PathBuf>,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<(), ConfigError> {
        if let Some(t) = threads {
            self.run.threads = t;
        } else if let Some(v) = env(ENV_THREADS) {
            self.run.threads = v
                .trim()
                .parse()
                .map_err(|_| field(ENV_THREADS, format!("expected a thread count, got {v:?}")))?;
        }
        if let Some(d) = output_dir {
            self.run.output_dir = d;
        } else if let Some(v) = env(ENV_OUTPUT_DIR) {
            self.run.output_dir = PathBuf::from(v);
        }
        Ok(())
    }
}

fn syntax(e: toml::de::Error, origin: &str) -> ConfigError {
    ConfigError::Syntax(format!("{origin}: {e}"))
}

/// Parses a configuration. A `fixture` path is resolved against `base`.
pub fn parse_config_in(text: &str, base: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| syntax(e, "config"))?;
    let fixture_raw = match raw.fixture {
        toml::Value::Table(t) => {
            RawFixture::deserialize(t).map_err(|e| ConfigError::Syntax(format!("config: fixture: {e}")))?
        }
        toml::Value::String(p) => {
            let path = base.map_or_else(|| PathBuf::from(&p), |b| b.join(&p));
            let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct FixtureFile {
                fixture: RawFixture,
                #[allow(dead_code)]
                run: Option<toml::Value>,
                #[allow(dead_code)]
                regions: Option<toml::Value>,
            }
            let file: FixtureFile = toml::from_str(&text).map_err(|e| syntax(e, &path.display().to_string()))?;
            file.fixture
        }
        _ => return Err(field("fixture", "expected a file path or a table")),
    };
    let fixture = build_fixture(fixture_raw)?;
    let d = fixture.spec.dim();
    let run = build_run(raw.run, d)?;
    let explicit_regions = !raw.regions.is_empty();
    let regions = if explicit_regions {
        raw.regions
            .into_iter()
            .enumerate()
            .map(|(i, r)| build_region(r, i, d))
            .collect::<Result<_, _>>()?
    } else {
        default_regions(&fixture.spec)
    };
    if regions.len() > 32 {
        return Err(field("regions", format!("at most 32 regions, got {}", regions.len())));
    }
    Ok(RunConfig {
        fixture,
        run,
        regions,
        explicit_regions,
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_in(text, None)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_in(&text, path.parent())
}

fn disk(raw: &RawDisk, path: &str) -> Result<(Complex64, f64), ConfigError> {
    if !(raw.center[0].is_finite() && raw.center[1].is_finite()) {
        return Err(field(format!("{path}.center"), "must be finite"));
    }
    if !(raw.radius.is_finite() && raw.radius > 0.0) {
        return Err(field(
            format!("{path}.radius"),
            format!("must be positive and finite, got {}", raw.radius),
        ));
    }
    Ok((Complex64::new(raw.center[0], raw.center[1]), raw.radius))
}

fn build_fixture(raw: RawFixture) -> Result<Fixture, ConfigError> {
    if raw.reps.is_empty() {
        return Err(field("fixture.reps", "needs at least one representation"));
    }
    let mut reps = Vec::new();
    for (i, rep) in raw.reps.iter().enumerate() {
        if rep.pairs.is_empty() {
            return Err(field(format!("fixture.reps[{i}].pairs"), "needs at least one pair"));
        }
        let mut disks = Vec::new();
        for (j, p) in rep.pairs.iter().enumerate() {
            let base = format!("fixture.reps[{i}].pairs[{j}]");
            disks.push((disk(&p.minus, &format!("{base}.minus"))?, disk(&p.plus, &format!("{base}.plus"))?));
        }
        let data = SchottkyData::from_disks(&disks).map_err(|e| field(format!("fixture.reps[{i}]"), e.to_string()))?;
        data.verify_ping_pong(DEFAULT_PING_PONG_MARGIN)
            .map_err(|e| field(format!("fixture.reps[{i}]"), e.to_string()))?;
        reps.push(data);
    }
    let spec = JoiningSpec::new(reps).map_err(|e| field("fixture.reps", e.to_string()))?;
    if raw.seed.circles.len() != spec.dim() {
        return Err(field(
            "fixture.seed.circles",
            format!("expected {} circles, one per representation, got {}", spec.dim(), raw.seed.circles.len()),
        ));
    }
    let mut circles = Vec::new();
    for (i, c) in raw.seed.circles.iter().enumerate() {
        let (center, r) = disk(c, &format!("fixture.seed.circles[{i}]"))?;
        circles.push(Circle::new(center, r).map_err(|e: GeometryError| field(format!("fixture.seed.circles[{i}]"), e.to_string()))?);
    }
    if !(raw.seed.margin.is_finite() && raw.seed.margin >= 0.0) {
        return Err(field("fixture.seed.margin", "must be finite and nonnegative"));
    }
    let torus = Torus::new(circles).map_err(|e| field("fixture.seed.circles", e.to_string()))?;
    let seed = admissible_seed_check(&spec, torus, raw.seed.check_depth, raw.seed.margin)
        .map_err(|e| field("fixture.seed", e.to_string()))?;
    Ok(Fixture {
        id: raw.id.clone(),
        spec,
        seed,
        raw,
    })
}

fn build_run(raw: RawRun, d: usize) -> Result<RunParams, ConfigError> {
    let psi = raw.psi.unwrap_or_else(|| vec![1.0; d]);
    if psi.len() != d {
        return Err(field("run.psi", format!("expected {d} coefficients, got {}", psi.len())));
    }
    if let Err(e) = LinearForm::new(psi.clone()).check_positive() {
        let reason = match e {
            GeometryError::NonPositiveForm { ray } => {
                let ray: Vec<String> = ray.iter().map(|i| format!("e{}", i + 1)).collect();
                format!(
                    "not a positive form: psi is not positive on the boundary ray spanned by {}",
                    ray.join(" + ")
                )
            }
            other => other.to_string(),
        };
        return Err(field("run.psi", reason));
    }
    let mode = raw.mode.unwrap_or(EnumMode::Exhaustive);
    if let Some(t) = raw.threshold {
        if !t.is_finite() {
            return Err(field("run.threshold", "must be finite"));
        }
    }
    if mode == EnumMode::Pruned && raw.threshold.is_none() {
        return Err(field("run.threshold", "pruned mode needs a threshold"));
    }
    let slack = raw.slack.unwrap_or(DEFAULT_SLACK);
    if !(slack.is_finite() && slack > 0.0) {
        return Err(field("run.slack", format!("must be positive, got {slack}")));
    }
    if let Some(g) = &raw.r_grid {
        if g.is_empty() || g.iter().any(|x| !x.is_finite()) || g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(field("run.r_grid", "must be a nonempty increasing list of finite values"));
        }
    }
    let tolerance = raw.tolerance.unwrap_or(crate::harness::EQUIDISTRIBUTION_TOLERANCE);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(field("run.tolerance", format!("must be positive, got {tolerance}")));
    }
    Ok(RunParams {
        depth: raw.depth.unwrap_or(DEFAULT_DEPTH),
        psi,
        mode,
        threshold: raw.threshold,
        slack,
        r_grid: raw.r_grid,
        atom_depth: raw.atom_depth.unwrap_or(DEFAULT_ATOM_DEPTH),
        tolerance,
        threads: raw.threads.unwrap_or(0),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
    })
}

fn build_region(raw: RawRegion, i: usize, d: usize) -> Result<RegionSpec, ConfigError> {
    let path = format!("regions[{i}]");
    let region = match (raw.role, raw.boxes, raw.center, raw.radius) {
        (RegionRole::Ball, None, Some(center), Some(radius)) => Region::Ball {
            center: center.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
            radius,
        },
        (RegionRole::Ball, ..) => {
            return Err(field(path, "a ball needs `center` and `radius` and no `boxes`"));
        }
        (_, Some(boxes), None, None) => Region::product(boxes.iter().map(|b| PlanarBox::new(b.re, b.im)).collect()),
        _ => return Err(field(path, "a box region needs `boxes` and no `center` or `radius`")),
    };
    if region.dim() != d {
        return Err(field(path, format!("has {} factors, the fixture has {d}", region.dim())));
    }
    region.validate().map_err(|reason| field(format!("regions[{i}]"), reason))?;
    Ok(RegionSpec {
        name: raw.name,
        role: raw.role,
        region,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[fixture]
id = "fixture-a"

[[fixture.reps]]
pairs = [
  { minus = { center = [-2.0, 0.0], radius = 0.5 }, plus = { center = [2.0, 0.0], radius = 0.5 } },
  { minus = { center = [0.0, -2.0], radius = 0.5 }, plus = { center = [0.0, 2.0], radius = 0.5 } },
]

[[fixture.reps]]
pairs = [
  { minus = { center = [-2.4, 0.0], radius = 0.6 }, plus = { center = [2.4, 0.0], radius = 0.6 } },
  { minus = { center = [0.0, -2.4], radius = 0.6 }, plus = { center = [0.0, 2.4], radius = 0.6 } },
]

[fixture.seed]
circles = [{ center = [0.0, 0.0], radius = 1.0 }, { center = [0.0, 0.0], radius = 1.0 }]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.run.depth, 12);
        assert_eq!(cfg.run.psi, vec![1.0, 1.0]);
        assert_eq!(cfg.run.mode, EnumMode::Exhaustive);
        assert_eq!(cfg.regions.len(), 6);
        assert!(!cfg.explicit_regions);
        assert!(cfg.fixture.seed.is_certified());
        let a = crate::fixtures::fixture_a();
        for (x, y) in cfg.fixture.spec.reps().iter().zip(a.reps()) {
            for (g, h) in x.generators().iter().zip(y.generators()) {
                assert!(g.approx_eq(h, 1e-12));
            }
        }
    }

    #[test]
    fn negative_radius_names_the_field() {
        let text = MINIMAL.replacen("radius = 0.6 }, plus", "radius = -0.6 }, plus", 1);
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("fixture.reps[1].pairs[0].minus.radius"), "{err}");
    }

    #[test]
    fn zero_coefficient_names_the_ray() {
        let text = format!("{MINIMAL}\n[run]\npsi = [1.0, 0.0]\n");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.starts_with("run.psi"), "{err}");
        assert!(err.contains("boundary ray spanned by e2"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replacen("[fixture]", "colour = 3\n\n[fixture]", 1);
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let text = MINIMAL.replacen("id = ", "kind = 1\nid = ", 1);
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("fixture") && err.contains("kind"), "{err}");
        let text = format!("{MINIMAL}\n[run]\ndepht = 3\n");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("depht") && err.contains("line"), "{err}");
    }

    #[test]
    fn override_precedence() {
        let mut cfg = parse_config(&format!("{MINIMAL}\n[run]\nthreads = 2\noutput_dir = \"cfg\"\n")).unwrap();
        let env = |k: &str| match k {
            ENV_THREADS => Some("4".to_string()),
            ENV_OUTPUT_DIR => Some("env".to_string()),
            _ => None,
        };
        let mut c = cfg.clone();
        c.apply_overrides(None, None, |_| None).unwrap();
        assert_eq!((c.run.threads, c.run.output_dir.clone()), (2, PathBuf::from("cfg")));
        let mut c = cfg.clone();
        c.apply_overrides(None, None, env).unwrap();
        assert_eq!((c.run.threads, c.run.output_dir.clone()), (4, PathBuf::from("env")));
        cfg.apply_overrides(Some(8), Some("flag".into()), env).unwrap();
        assert_eq!((cfg.run.threads, cfg.run.output_dir.clone()), (8, PathBuf::from("flag")));
    }

    #[test]
    fn echo_omits_threads() {
        let a = parse_config(&format!("{MINIMAL}\n[run]\nthreads = 1\n")).unwrap();
        let b = parse_config(&format!("{MINIMAL}\n[run]\nthreads = 8\n")).unwrap();
        assert_eq!(a.echo(), b.echo());
        assert_eq!(a.echo()["run"]["depth"], 12);
    }

    #[test]
    fn explicit_regions() {
        let text = format!(
            "{MINIMAL}\n[[regions]]\nname = \"b\"\nrole = \"ball\"\ncenter = [[2.0, 0.0], [2.4, 0.0]]\nradius = 0.5\n"
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.regions.len(), 1);
        let bad = format!("{MINIMAL}\n[[regions]]\nname = \"b\"\nrole = \"nested\"\nboxes = [{{ re = [0.0, 1.0], im = [0.0, 1.0] }}]\n");
        let err = parse_config(&bad).unwrap_err().to_string();
        assert!(err.starts_with("regions[0]"), "{err}");
    }
}
