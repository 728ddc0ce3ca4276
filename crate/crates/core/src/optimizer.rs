//! Exhaustive grid search over `(C1, C2, tau)`.
//!
//! Each [`Strategy`] restricts the circularity pair and the time-sharing
//! fraction. Candidates are visited in lexicographic order `(C1, C2, tau)`
//! and the first maximizer wins, so results are deterministic and a strategy
//! whose candidate set contains another's can never report a lower rate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rates::{
    combine_hops, first_hop_rate, second_hop_rate, total_rate, CircularityCoefficient, LinkGains,
    RateBreakdown, Relay, SignalConfig, SystemParams,
};

/// Constraint on the relays' circularity coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircularityMode {
    /// Both relays proper, `C1 = C2 = 0`.
    Proper,
    /// One coefficient shared by both relays.
    Shared,
    /// Independent coefficients.
    Distinct,
    /// Both relays maximally improper, `C1 = C2 = 1`.
    MaxImproper,
    /// Each relay picks proper or maximally improper, `Ci in {0, 1}`.
    MaxImproperBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TauMode {
    /// `tau = 0.5`.
    EqualFixed,
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub circularity: CircularityMode,
    pub tau: TauMode,
}

impl Strategy {
    pub const fn new(circularity: CircularityMode, tau: TauMode) -> Self {
        Strategy { circularity, tau }
    }

    /// Every named strategy, in the order used for reports.
    pub const ALL: [Strategy; 10] = {
        use CircularityMode::*;
        use TauMode::*;
        [
            Strategy::new(Proper, EqualFixed),
            Strategy::new(Proper, Optimized),
            Strategy::new(Shared, EqualFixed),
            Strategy::new(Shared, Optimized),
            Strategy::new(Distinct, EqualFixed),
            Strategy::new(Distinct, Optimized),
            Strategy::new(MaxImproper, EqualFixed),
            Strategy::new(MaxImproper, Optimized),
            Strategy::new(MaxImproperBinary, EqualFixed),
            Strategy::new(MaxImproperBinary, Optimized),
        ]
    };

    pub fn name(&self) -> &'static str {
        use CircularityMode::*;
        use TauMode::*;
        match (self.circularity, self.tau) {
            (Proper, EqualFixed) => "proper_eq",
            (Proper, Optimized) => "proper_opt",
            (Shared, EqualFixed) => "shared_eq",
            (Shared, Optimized) => "shared_opt",
            (Distinct, EqualFixed) => "distinct_eq",
            (Distinct, Optimized) => "distinct_opt",
            (MaxImproper, EqualFixed) => "maximp_eq",
            (MaxImproper, Optimized) => "maximp_opt",
            (MaxImproperBinary, EqualFixed) => "binary_eq",
            (MaxImproperBinary, Optimized) => "binary_opt",
        }
    }

    /// Parses a comma-separated list such as `proper_eq,distinct_opt`.
    pub fn parse_list(list: &str) -> Result<Vec<Strategy>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

/// Resolution of the search grid. Both axes span `[0, 1]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    circ_points: usize,
    tau_points: usize,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 51;

    /// `tau_points` has to be odd so the grid contains `tau = 0.5`.
    pub fn new(circ_points: usize, tau_points: usize) -> Result<Self> {
        if circ_points < 2 {
            return Err(Error::invalid(
                "circ_points",
                format!("must be >= 2, got {circ_points}"),
            ));
        }
        if tau_points < 2 {
            return Err(Error::invalid(
                "tau_points",
                format!("must be >= 2, got {tau_points}"),
            ));
        }
        if tau_points.is_multiple_of(2) {
            return Err(Error::invalid(
                "tau_points",
                format!("must be odd so that 0.5 is on the grid, got {tau_points}"),
            ));
        }
        Ok(GridSpec {
            circ_points,
            tau_points,
        })
    }

    /// Same resolution on every axis.
    pub fn uniform(points: usize) -> Result<Self> {
        Self::new(points, points)
    }

    pub fn circ_points(&self) -> usize {
        self.circ_points
    }

    pub fn tau_points(&self) -> usize {
        self.tau_points
    }

    pub fn circ_axis(&self) -> Vec<f64> {
        unit_axis(self.circ_points)
    }

    pub fn tau_axis(&self) -> Vec<f64> {
        unit_axis(self.tau_points)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            circ_points: Self::DEFAULT_POINTS,
            tau_points: Self::DEFAULT_POINTS,
        }
    }
}

fn unit_axis(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|k| k as f64 / last).collect()
}

fn circularity_pairs(mode: CircularityMode, grid: &GridSpec) -> Vec<(f64, f64)> {
    match mode {
        CircularityMode::Proper => vec![(0.0, 0.0)],
        CircularityMode::Shared => grid.circ_axis().into_iter().map(|c| (c, c)).collect(),
        CircularityMode::Distinct => {
            let axis = grid.circ_axis();
            axis.iter()
                .flat_map(|&c1| axis.iter().map(move |&c2| (c1, c2)))
                .collect()
        }
        CircularityMode::MaxImproper => vec![(1.0, 1.0)],
        CircularityMode::MaxImproperBinary => vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)],
    }
}

fn tau_values(mode: TauMode, grid: &GridSpec) -> Vec<f64> {
    match mode {
        TauMode::EqualFixed => vec![0.5],
        TauMode::Optimized => grid.tau_axis(),
    }
}

/// Every candidate of `strategy`, ordered by `C1`, then `C2`, then `tau`.
pub fn candidate_grid(strategy: Strategy, grid: &GridSpec) -> Vec<SignalConfig> {
    let taus = tau_values(strategy.tau, grid);
    circularity_pairs(strategy.circularity, grid)
        .into_iter()
        .flat_map(|(c1, c2)| {
            taus.iter().map(move |&tau| {
                SignalConfig::from_values(c1, c2, tau).expect("grid values lie in [0, 1]")
            })
        })
        .collect()
}

/// Best configuration found by [`grid_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult {
    pub best: SignalConfig,
    pub rate: f64,
    pub breakdown: RateBreakdown,
}

/// Maximizes the end-to-end rate over the strategy's candidates.
pub fn grid_search(
    strategy: Strategy,
    grid: &GridSpec,
    params: &SystemParams,
    gains: &LinkGains,
) -> OptResult {
    let taus = tau_values(strategy.tau, grid);
    let mut best: Option<(f64, f64, f64, f64)> = None;

    for (c1, c2) in circularity_pairs(strategy.circularity, grid) {
        let c1 = CircularityCoefficient::new(c1).expect("grid value");
        let c2 = CircularityCoefficient::new(c2).expect("grid value");
        // Hop rates do not depend on tau; evaluate them once per pair.
        let r11 = first_hop_rate(Relay::R1, c2, params, gains);
        let r12 = second_hop_rate(Relay::R1, c1, params, gains);
        let r21 = first_hop_rate(Relay::R2, c1, params, gains);
        let r22 = second_hop_rate(Relay::R2, c2, params, gains);
        for &tau in &taus {
            let (_, _, total) = combine_hops(tau, r11, r12, r21, r22);
            if best.is_none_or(|(rate, ..)| total > rate) {
                best = Some((total, c1.value(), c2.value(), tau));
            }
        }
    }

    let (_, c1, c2, tau) = best.expect("every strategy has at least one candidate");
    let best = SignalConfig::from_values(c1, c2, tau).expect("grid value");
    let breakdown = total_rate(&best, params, gains);
    OptResult {
        best,
        rate: breakdown.total,
        breakdown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CircularityMode::*;
    use TauMode::*;

    #[test]
    fn candidate_counts() {
        let g = GridSpec::default();
        let proper = candidate_grid(Strategy::new(Proper, EqualFixed), &g);
        assert_eq!(
            proper,
            vec![SignalConfig::from_values(0.0, 0.0, 0.5).unwrap()]
        );
        assert_eq!(
            candidate_grid(Strategy::new(MaxImproperBinary, EqualFixed), &g).len(),
            4
        );
        assert_eq!(
            candidate_grid(Strategy::new(MaxImproper, EqualFixed), &g).len(),
            1
        );
        assert_eq!(
            candidate_grid(Strategy::new(Distinct, Optimized), &g).len(),
            132_651
        );
        assert_eq!(
            candidate_grid(Strategy::new(Shared, Optimized), &g).len(),
            51 * 51
        );
    }

    #[test]
    fn candidates_are_lexicographic() {
        let g = GridSpec::uniform(5).unwrap();
        let cands = candidate_grid(Strategy::new(Distinct, Optimized), &g);
        let key = |s: &SignalConfig| (s.c1.value(), s.c2.value(), s.tau());
        assert!(cands.windows(2).all(|w| key(&w[0]) < key(&w[1])));
    }

    #[test]
    fn tau_grid_contains_half() {
        for n in [3, 11, 51, 101] {
            assert!(GridSpec::uniform(n).unwrap().tau_axis().contains(&0.5));
        }
        assert!(GridSpec::new(11, 10).is_err());
        assert!(GridSpec::new(1, 11).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!(matches!(
            "improper".parse::<Strategy>(),
            Err(Error::UnknownStrategy(_))
        ));
        assert_eq!(
            Strategy::parse_list("proper_eq, distinct_opt")
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn no_interference_prefers_proper() {
        let p = SystemParams::default();
        let g = LinkGains::new(3.0, 100.0, 31.0, 10.0, 0.0).unwrap();
        for s in Strategy::ALL {
            if s.circularity == MaxImproper {
                continue;
            }
            let r = grid_search(s, &GridSpec::uniform(11).unwrap(), &p, &g);
            assert_eq!((r.best.c1.value(), r.best.c2.value()), (0.0, 0.0), "{s}");
        }
    }

    #[test]
    fn symmetric_channels() {
        let p = SystemParams::default();
        let g = LinkGains::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let grid = GridSpec::uniform(11).unwrap();
        let r = grid_search(Strategy::new(Distinct, Optimized), &grid, &p, &g);
        let swapped = SignalConfig::new(r.best.c2, r.best.c1, r.best.tau()).unwrap();
        assert_eq!(total_rate(&swapped, &p, &g).total, r.rate);
        assert_eq!(r.best.tau(), 0.5);
    }

    #[test]
    fn strong_interference_goes_max_improper() {
        let p = SystemParams::default();
        let g = LinkGains::new(10.0, 10.0, 10.0, 10.0, 100.0).unwrap();
        let grid = GridSpec::default();
        let r = grid_search(Strategy::new(Distinct, EqualFixed), &grid, &p, &g);
        assert_eq!((r.best.c1.value(), r.best.c2.value()), (1.0, 1.0));

        // independent exhaustive check over the same candidates
        let mut best = (f64::MIN, 0.0, 0.0);
        for c1 in grid.circ_axis() {
            for c2 in grid.circ_axis() {
                let cfg = SignalConfig::from_values(c1, c2, 0.5).unwrap();
                let v = total_rate(&cfg, &p, &g).total;
                if v > best.0 {
                    best = (v, c1, c2);
                }
            }
        }
        assert_eq!((best.1, best.2), (1.0, 1.0));
    }

    #[test]
    fn result_recomputes_exactly() {
        let p = SystemParams::default();
        let g = LinkGains::new(2.0, 60.0, 40.0, 7.0, 12.0).unwrap();
        for s in Strategy::ALL {
            let r = grid_search(s, &GridSpec::uniform(21).unwrap(), &p, &g);
            assert_eq!(r.rate, total_rate(&r.best, &p, &g).total);
            assert_eq!(r, grid_search(s, &GridSpec::uniform(21).unwrap(), &p, &g));
        }
    }
}
