//! Rate evaluation, optimization and Monte-Carlo simulation for virtual
//! full-duplex two-path relaying with improper Gaussian signaling at the
//! relays.
//!
//! * [`rates`]: hop, path and end-to-end achievable rates.
//! * [`channels`]: Rayleigh and geometric channel generators.
//! * [`optimizer`]: grid search over `(C1, C2, tau)` per strategy.
//! * [`montecarlo`]: averaged results over many realizations and sweeps.
//! * [`scenario`], [`output`], [`cli`]: JSON scenarios, CSV results, the `vfd` binary.

pub mod channels;
pub mod cli;
mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod output;
pub mod rates;
pub mod scenario;

pub use channels::{ChannelSource, FadingSpec, GeometrySpec, Seed};
pub use error::{Error, Result};
pub use montecarlo::{
    run_point, run_sweep, AggregateStats, RunConfig, StrategyStats, SweepAxis, SweepPoint,
};
pub use optimizer::{
    candidate_grid, grid_search, CircularityMode, GridSpec, OptResult, Strategy, TauMode,
};
pub use rates::{
    first_hop_rate, improper_link_rate, path_rate, piecewise_path_min, psi, psi_coeffs,
    second_hop_rate, total_rate, CircularityCoefficient, HopLimit, LinkGains, RateBreakdown, Relay,
    SignalConfig, SystemParams,
};
