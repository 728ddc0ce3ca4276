//! JSON scenario files.
//!
//! ```json
//! {
//!   "kind": "iri_sweep",
//!   "fading": { "mean_h1_db": 5, "mean_h2_db": 20, "mean_g1_db": 15, "mean_g2_db": 10 }
//! }
//! ```
//!
//! Everything except the channel description has a default. See
//! `docs/scenario-schema.md` for the full field list.

use std::path::Path;

use serde::Deserialize;

use crate::channels::{ChannelSource, FadingSpec, GeometrySpec, Seed};
use crate::error::{Error, Result};
use crate::montecarlo::{RunConfig, SweepAxis};
use crate::optimizer::{GridSpec, Strategy};
use crate::rates::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    IriSweep,
    MaxImproperSweep,
    LocationSweep,
    Single,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::IriSweep => "iri_sweep",
            ScenarioKind::MaxImproperSweep => "max_improper_sweep",
            ScenarioKind::LocationSweep => "location_sweep",
            ScenarioKind::Single => "single",
        }
    }

    fn default_strategies(&self) -> Vec<Strategy> {
        let names: &[&str] = match self {
            ScenarioKind::IriSweep | ScenarioKind::Single => &[
                "proper_eq",
                "proper_opt",
                "shared_eq",
                "shared_opt",
                "distinct_eq",
                "distinct_opt",
                "maximp_eq",
                "maximp_opt",
            ],
            ScenarioKind::MaxImproperSweep => {
                &["proper_eq", "proper_opt", "maximp_eq", "maximp_opt"]
            }
            ScenarioKind::LocationSweep => &[
                "proper_eq",
                "proper_opt",
                "shared_eq",
                "shared_opt",
                "distinct_eq",
                "distinct_opt",
            ],
        };
        names
            .iter()
            .map(|n| n.parse().expect("built-in name"))
            .collect()
    }

    fn default_sweep(&self) -> Option<(SweepAxis, Vec<f64>)> {
        match self {
            ScenarioKind::IriSweep | ScenarioKind::MaxImproperSweep => Some((
                SweepAxis::MeanFDb,
                (-2..=7).map(|k| 5.0 * k as f64).collect(),
            )),
            ScenarioKind::LocationSweep => {
                Some((SweepAxis::DSr2, (1..=9).map(|k| k as f64 / 10.0).collect()))
            }
            ScenarioKind::Single => None,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(default = "one")]
    p_s: f64,
    #[serde(default = "one")]
    p_r: f64,
    #[serde(default = "one")]
    sigma_n2: f64,
    #[serde(default = "one")]
    p_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default = "default_points")]
    circ_points: usize,
    #[serde(default = "default_points")]
    tau_points: usize,
}

fn default_points() -> usize {
    GridSpec::DEFAULT_POINTS
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFading {
    mean_h1_db: f64,
    mean_h2_db: f64,
    mean_g1_db: f64,
    mean_g2_db: f64,
    mean_f_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    d_sr2: Option<f64>,
    vertical_offset: Option<f64>,
    pathloss_exp: Option<f64>,
    shadowing_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: ScenarioKind,
    realizations: Option<u64>,
    seed: Option<u64>,
    strategies: Option<Vec<String>>,
    grid: Option<RawGrid>,
    params: Option<RawParams>,
    fading: Option<RawFading>,
    geometry: Option<RawGeometry>,
    sweep_values: Option<Vec<f64>>,
}

/// A validated scenario with every default applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub kind: ScenarioKind,
    pub run: RunConfig,
    /// Swept parameter and its values; `None` for `single`.
    pub sweep: Option<(SweepAxis, Vec<f64>)>,
}

/// Command-line values that replace the file's.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub realizations: Option<u64>,
    pub grid_points: Option<usize>,
    pub strategies: Option<Vec<Strategy>>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.is_empty() {
                Error::Scenario(inner.to_string())
            } else {
                Error::Scenario(format!("{path}: {inner}"))
            }
        })?;
        raw.validate()
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(seed) = o.seed {
            self.run.seed = Seed(seed);
        }
        if let Some(n) = o.realizations {
            if self.kind == ScenarioKind::Single && n != 1 {
                return Err(Error::invalid(
                    "realizations",
                    "`single` uses exactly one realization",
                ));
            }
            self.run.realizations = n;
        }
        if let Some(points) = o.grid_points {
            self.run.grid = GridSpec::uniform(points)?;
        }
        if let Some(strategies) = &o.strategies {
            self.run.strategies = strategies.clone();
        }
        self.run.validate()?;
        Ok(self)
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    ScenarioFile::from_json(&text).map_err(|e| match e {
        Error::Io(_) => e,
        other => Error::Scenario(format!("{}: {other}", path.display())),
    })
}

impl RawScenario {
    fn validate(self) -> Result<ScenarioFile> {
        let kind = self.kind;
        let p = self.params.unwrap_or(RawParams {
            p_s: 1.0,
            p_r: 1.0,
            sigma_n2: 1.0,
            p_max: 1.0,
        });
        let params = SystemParams::new(p.p_s, p.p_r, p.sigma_n2, p.p_max)?;
        let grid = match self.grid {
            Some(g) => GridSpec::new(g.circ_points, g.tau_points)?,
            None => GridSpec::default(),
        };
        let strategies = match self.strategies {
            Some(names) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<Vec<Strategy>>>()?,
            None => kind.default_strategies(),
        };
        let realizations = match (kind, self.realizations) {
            (ScenarioKind::Single, None | Some(1)) => 1,
            (ScenarioKind::Single, Some(_)) => {
                return Err(Error::invalid(
                    "realizations",
                    "`single` uses exactly one realization",
                ))
            }
            (_, n) => n.unwrap_or(RunConfig::DEFAULT_REALIZATIONS),
        };

        let source = match (kind, self.fading, self.geometry) {
            (_, Some(_), Some(_)) => {
                return Err(Error::Scenario(
                    "give either `fading` or `geometry`, not both".into(),
                ))
            }
            (ScenarioKind::IriSweep | ScenarioKind::MaxImproperSweep, Some(f), None) => {
                // The swept value replaces mean_f_db; keep a placeholder until then.
                fading_source(&f, f.mean_f_db.unwrap_or(0.0))?
            }
            (ScenarioKind::LocationSweep, None, Some(g)) => {
                geometry_source(&g, g.d_sr2.unwrap_or(0.5))?
            }
            (ScenarioKind::Single, Some(f), None) => {
                let mean_f_db = f.mean_f_db.ok_or_else(|| {
                    Error::Scenario("fading.mean_f_db is required for `single`".into())
                })?;
                fading_source(&f, mean_f_db)?
            }
            (ScenarioKind::Single, None, Some(g)) => {
                let d = g.d_sr2.ok_or_else(|| {
                    Error::Scenario("geometry.d_sr2 is required for `single`".into())
                })?;
                geometry_source(&g, d)?
            }
            (ScenarioKind::LocationSweep, None, None) => geometry_source(
                &RawGeometry {
                    d_sr2: None,
                    vertical_offset: None,
                    pathloss_exp: None,
                    shadowing_db: None,
                },
                0.5,
            )?,
            (ScenarioKind::LocationSweep, Some(_), None) => {
                return Err(Error::Scenario(
                    "`location_sweep` takes `geometry`, not `fading`".into(),
                ))
            }
            (ScenarioKind::Single, None, None) => {
                return Err(Error::Scenario(
                    "`single` requires `fading` or `geometry`".into(),
                ))
            }
            (_, None, _) => {
                return Err(Error::Scenario(format!(
                    "`{}` requires `fading`",
                    kind.name()
                )))
            }
        };

        let sweep = match (kind.default_sweep(), self.sweep_values) {
            (None, Some(_)) => {
                return Err(Error::Scenario("`single` takes no `sweep_values`".into()))
            }
            (None, None) => None,
            (Some((axis, defaults)), values) => {
                let values = values.unwrap_or(defaults);
                check_sweep_values(axis, &values)?;
                Some((axis, values))
            }
        };

        let run = RunConfig {
            realizations,
            seed: Seed(self.seed.unwrap_or(0)),
            strategies,
            grid,
            params,
            source,
        };
        run.validate()?;
        Ok(ScenarioFile { kind, run, sweep })
    }
}

fn fading_source(f: &RawFading, mean_f_db: f64) -> Result<ChannelSource> {
    let spec = FadingSpec {
        mean_h1_db: f.mean_h1_db,
        mean_h2_db: f.mean_h2_db,
        mean_g1_db: f.mean_g1_db,
        mean_g2_db: f.mean_g2_db,
        mean_f_db,
    };
    spec.validate()?;
    Ok(ChannelSource::Fading(spec))
}

fn geometry_source(g: &RawGeometry, d_sr2: f64) -> Result<ChannelSource> {
    let mut geo = GeometrySpec::new(d_sr2);
    if let Some(v) = g.vertical_offset {
        geo.vertical_offset = v;
    }
    if let Some(v) = g.pathloss_exp {
        geo.pathloss_exp = v;
    }
    if let Some(v) = g.shadowing_db {
        geo.shadowing_db = v;
    }
    geo.validate()?;
    Ok(ChannelSource::Geometry(geo))
}

fn check_sweep_values(axis: SweepAxis, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("sweep_values", "must not be empty"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep_values", "must be strictly ascending"));
    }
    for &v in values {
        let ok = match axis {
            SweepAxis::MeanFDb => v.is_finite(),
            SweepAxis::DSr2 => v > 0.0 && v < 1.0,
        };
        if !ok {
            return Err(Error::invalid(
                "sweep_values",
                format!("{v} is out of range for `{}`", axis.name()),
            ));
        }
    }
    Ok(())
}
