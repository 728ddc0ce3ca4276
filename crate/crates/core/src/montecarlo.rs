//! Monte-Carlo averaging of optimized rates over channel realizations.

use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::{ChannelSource, Seed};
use crate::error::{Error, Result};
use crate::optimizer::{grid_search, GridSpec, OptResult, Strategy};
use crate::rates::SystemParams;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub realizations: u64,
    pub seed: Seed,
    pub strategies: Vec<Strategy>,
    pub grid: GridSpec,
    pub params: SystemParams,
    pub source: ChannelSource,
}

impl RunConfig {
    pub const DEFAULT_REALIZATIONS: u64 = 10_000;

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "must be >= 1"));
        }
        if self.strategies.is_empty() {
            return Err(Error::invalid("strategies", "must not be empty"));
        }
        self.source.validate()
    }
}

/// Averages of one strategy over all realizations of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyStats {
    pub strategy: Strategy,
    pub mean_rate: f64,
    pub mean_c1: f64,
    pub mean_c2: f64,
    pub mean_tau: f64,
    pub count: u64,
}

/// Per-strategy averages, in the order the strategies were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub per_strategy: Vec<StrategyStats>,
}

impl AggregateStats {
    pub fn get(&self, strategy: Strategy) -> Option<&StrategyStats> {
        self.per_strategy.iter().find(|s| s.strategy == strategy)
    }
}

/// Correctly rounded floating-point sum (Shewchuk partials).
///
/// The result depends only on the multiset of inputs, never on grouping,
/// and is monotone: termwise larger inputs give a sum at least as large.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub(crate) fn add(&mut self, mut x: f64) {
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub(crate) fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(&top) = p.last() else {
            return 0.0;
        };
        let mut n = p.len() - 1;
        let mut hi = top;
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // Round half to even across the remaining partials.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

#[derive(Default)]
struct Accumulator {
    rate: ExactSum,
    c1: ExactSum,
    c2: ExactSum,
    tau: ExactSum,
}

/// Draws `realizations` channels, grid-searches each under every strategy
/// and averages. Output does not depend on the number of worker threads.
pub fn run_point(config: &RunConfig) -> Result<AggregateStats> {
    config.validate()?;
    let results: Vec<Result<Vec<OptResult>>> = (0..config.realizations)
        .into_par_iter()
        .map(|k| {
            let gains =
                config
                    .source
                    .realization(config.seed, k)
                    .map_err(|e| Error::Realization {
                        index: k,
                        source: Box::new(e),
                    })?;
            Ok(config
                .strategies
                .iter()
                .map(|&s| grid_search(s, &config.grid, &config.params, &gains))
                .collect())
        })
        .collect();

    let mut acc: Vec<Accumulator> = config
        .strategies
        .iter()
        .map(|_| Accumulator::default())
        .collect();
    for per_realization in results {
        for (a, r) in acc.iter_mut().zip(per_realization?) {
            a.rate.add(r.rate);
            a.c1.add(r.best.c1.value());
            a.c2.add(r.best.c2.value());
            a.tau.add(r.best.tau());
        }
    }

    let n = config.realizations as f64;
    let per_strategy = config
        .strategies
        .iter()
        .zip(acc)
        .map(|(&strategy, a)| StrategyStats {
            strategy,
            mean_rate: a.rate.value() / n,
            mean_c1: a.c1.value() / n,
            mean_c2: a.c2.value() / n,
            mean_tau: a.tau.value() / n,
            count: config.realizations,
        })
        .collect();
    Ok(AggregateStats { per_strategy })
}

/// Parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Mean inter-relay gain in dB (fading source).
    MeanFDb,
    /// Horizontal S-R2 distance (geometry source).
    DSr2,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::MeanFDb => "mean_f_db",
            SweepAxis::DSr2 => "d_sr2",
        }
    }

    fn apply(&self, source: &ChannelSource, value: f64) -> Result<ChannelSource> {
        match (self, source) {
            (SweepAxis::MeanFDb, ChannelSource::Fading(spec)) => {
                Ok(ChannelSource::Fading(crate::channels::FadingSpec {
                    mean_f_db: value,
                    ..*spec
                }))
            }
            (SweepAxis::DSr2, ChannelSource::Geometry(geo)) => {
                Ok(ChannelSource::Geometry(crate::channels::GeometrySpec {
                    d_sr2: value,
                    ..*geo
                }))
            }
            _ => Err(Error::invalid(
                "sweep axis",
                format!("`{}` does not apply to this channel source", self.name()),
            )),
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean_f_db" => Ok(SweepAxis::MeanFDb),
            "d_sr2" => Ok(SweepAxis::DSr2),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: AggregateStats,
}

/// One [`run_point`] per value, point `i` seeded with `base.seed.derive(i)`.
pub fn run_sweep(base: &RunConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepPoint>> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(
            "sweep values",
            format!("must be finite, got {v}"),
        ));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep values", "must be strictly ascending"));
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let config = RunConfig {
                seed: base.seed.derive(i as u64),
                source: axis.apply(&base.source, value)?,
                ..base.clone()
            };
            Ok(SweepPoint {
                value,
                stats: run_point(&config)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{FadingSpec, GeometrySpec};

    fn reference_config(mean_f_db: f64, realizations: u64) -> RunConfig {
        RunConfig {
            realizations,
            seed: Seed(2017),
            strategies: Strategy::ALL.to_vec(),
            grid: GridSpec::uniform(11).unwrap(),
            params: SystemParams::default(),
            source: ChannelSource::Fading(FadingSpec {
                mean_h1_db: 5.0,
                mean_h2_db: 20.0,
                mean_g1_db: 15.0,
                mean_g2_db: 10.0,
                mean_f_db,
            }),
        }
    }

    #[test]
    fn exact_sum_is_order_free() {
        let xs = [1e16, 1.0, -1e16, 3.5, 1e-8, 2.0, -7.25e3, 0.1, 0.2, 0.3];
        let mut fwd = ExactSum::default();
        xs.iter().for_each(|&x| fwd.add(x));
        let mut rev = ExactSum::default();
        xs.iter().rev().for_each(|&x| rev.add(x));
        assert_eq!(fwd.value(), rev.value());
        // value frozen from Python's math.fsum
        assert_eq!(fwd.value(), -7242.89999999);

        let mut tenths = ExactSum::default();
        (0..10).for_each(|_| tenths.add(0.1));
        assert_eq!(tenths.value(), 1.0);
        assert_eq!(ExactSum::default().value(), 0.0);
    }

    #[test]
    fn single_realization_matches_optimizer() {
        let cfg = reference_config(10.0, 1);
        let stats = run_point(&cfg).unwrap();
        let gains = cfg.source.realization(cfg.seed, 0).unwrap();
        for (s, st) in cfg.strategies.iter().zip(&stats.per_strategy) {
            let r = grid_search(*s, &cfg.grid, &cfg.params, &gains);
            assert_eq!(st.mean_rate, r.rate);
            assert_eq!(st.mean_c1, r.best.c1.value());
            assert_eq!(st.mean_c2, r.best.c2.value());
            assert_eq!(st.mean_tau, r.best.tau());
            assert_eq!(st.count, 1);
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = reference_config(15.0, 200);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_point(&cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = reference_config(0.0, 0);
        assert!(run_point(&cfg).is_err());
        cfg.realizations = 3;
        cfg.strategies.clear();
        assert!(run_point(&cfg).is_err());
    }

    #[test]
    fn sweep_basics() {
        let cfg = reference_config(0.0, 5);
        assert!(run_sweep(&cfg, SweepAxis::MeanFDb, &[]).unwrap().is_empty());
        assert!(run_sweep(&cfg, SweepAxis::MeanFDb, &[5.0, 0.0]).is_err());
        assert!(run_sweep(&cfg, SweepAxis::DSr2, &[0.5]).is_err());
        assert!(matches!(
            "sigma_f".parse::<SweepAxis>(),
            Err(Error::UnknownAxis(_))
        ));

        let pts = run_sweep(&cfg, SweepAxis::MeanFDb, &[-10.0, 20.0]).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].value, 20.0);
        let again = run_sweep(&cfg, SweepAxis::MeanFDb, &[-10.0, 20.0]).unwrap();
        assert_eq!(pts, again);
    }

    #[test]
    fn location_sweep_runs() {
        let cfg = RunConfig {
            source: ChannelSource::Geometry(GeometrySpec::new(0.5)),
            ..reference_config(0.0, 10)
        };
        let pts = run_sweep(&cfg, SweepAxis::DSr2, &[0.1, 0.5, 0.9]).unwrap();
        for p in &pts {
            for s in &p.stats.per_strategy {
                assert!(s.mean_rate.is_finite() && s.mean_rate >= 0.0);
                for m in [s.mean_c1, s.mean_c2, s.mean_tau] {
                    assert!((0.0..=1.0).contains(&m));
                }
            }
        }
    }
}
