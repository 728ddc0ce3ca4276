//! Random channel realizations.
//!
//! Two sources are supported: Rayleigh fading around per-link mean gains
//! given in dB, and a planar relay-placement model with distance path loss,
//! lognormal shadowing and Rayleigh fading on top.
//!
//! Every realization owns its own ChaCha stream selected by
//! `(point seed, realization index)`, so a realization can be regenerated in
//! isolation and parallel runs reproduce serial ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::LinkGains;

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Mean power gain of each link in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSpec {
    pub mean_h1_db: f64,
    pub mean_h2_db: f64,
    pub mean_g1_db: f64,
    pub mean_g2_db: f64,
    pub mean_f_db: f64,
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("mean_h1_db", self.mean_h1_db),
            ("mean_h2_db", self.mean_h2_db),
            ("mean_g1_db", self.mean_g1_db),
            ("mean_g2_db", self.mean_g2_db),
            ("mean_f_db", self.mean_f_db),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Linear mean gains, in `LinkGains` field order.
    pub fn mean_gains(&self) -> MeanGains {
        MeanGains {
            h1: db_to_linear(self.mean_h1_db),
            h2: db_to_linear(self.mean_h2_db),
            g1: db_to_linear(self.mean_g1_db),
            g2: db_to_linear(self.mean_g2_db),
            f: db_to_linear(self.mean_f_db),
        }
    }
}

/// Linear average power gain of each link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanGains {
    pub h1: f64,
    pub h2: f64,
    pub g1: f64,
    pub g2: f64,
    pub f: f64,
}

impl MeanGains {
    fn as_array(&self) -> [f64; 5] {
        [self.h1, self.h2, self.g1, self.g2, self.f]
    }
}

fn default_vertical_offset() -> f64 {
    0.1
}

fn default_pathloss_exp() -> f64 {
    2.0
}

fn default_shadowing_db() -> f64 {
    5.0
}

/// Relay placement on the plane, distances normalized by the S-D distance.
///
/// S sits at `(0, 0)`, D at `(1, 0)`, R1 at `(0.5, +v)` and R2 at
/// `(d_sr2, -v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub d_sr2: f64,
    #[serde(default = "default_vertical_offset")]
    pub vertical_offset: f64,
    #[serde(default = "default_pathloss_exp")]
    pub pathloss_exp: f64,
    #[serde(default = "default_shadowing_db")]
    pub shadowing_db: f64,
}

impl GeometrySpec {
    pub fn new(d_sr2: f64) -> Self {
        GeometrySpec {
            d_sr2,
            vertical_offset: default_vertical_offset(),
            pathloss_exp: default_pathloss_exp(),
            shadowing_db: default_shadowing_db(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_sr2 > 0.0 && self.d_sr2 < 1.0) {
            return Err(Error::invalid(
                "d_sr2",
                format!("must lie in (0, 1), got {}", self.d_sr2),
            ));
        }
        if !(self.vertical_offset.is_finite() && self.vertical_offset > 0.0) {
            return Err(Error::invalid(
                "vertical_offset",
                format!("must be > 0, got {}", self.vertical_offset),
            ));
        }
        if !(self.pathloss_exp.is_finite() && self.pathloss_exp > 0.0) {
            return Err(Error::invalid(
                "pathloss_exp",
                format!("must be > 0, got {}", self.pathloss_exp),
            ));
        }
        if !(self.shadowing_db.is_finite() && self.shadowing_db >= 0.0) {
            return Err(Error::invalid(
                "shadowing_db",
                format!("must be >= 0, got {}", self.shadowing_db),
            ));
        }
        Ok(())
    }
}

/// Distance-based mean gains `d^-eta` of the five links.
pub fn geometry_to_mean_gains(geo: &GeometrySpec) -> Result<MeanGains> {
    geo.validate()?;
    let v = geo.vertical_offset;
    let s = (0.0, 0.0);
    let d = (1.0, 0.0);
    let r1 = (0.5, v);
    let r2 = (geo.d_sr2, -v);
    let gain = |a: (f64, f64), b: (f64, f64), link: &str| -> Result<f64> {
        let dist = (a.0 - b.0).hypot(a.1 - b.1);
        if dist > 0.0 {
            Ok(dist.powf(-geo.pathloss_exp))
        } else {
            Err(Error::Domain(format!("zero distance on link {link}")))
        }
    };
    Ok(MeanGains {
        h1: gain(s, r1, "S-R1")?,
        h2: gain(s, r2, "S-R2")?,
        g1: gain(r1, d, "R1-D")?,
        g2: gain(r2, d, "R2-D")?,
        f: gain(r1, r2, "R1-R2")?,
    })
}

/// Small-scale fading applied on top of mean gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallScaleFading {
    /// Exponential power gain with unit mean.
    #[default]
    Rayleigh,
    /// No fading: the factor is replaced by its mean, one.
    Averaged,
}

impl SmallScaleFading {
    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            SmallScaleFading::Rayleigh => Exp1.sample(rng),
            SmallScaleFading::Averaged => 1.0,
        }
    }
}

fn gains_from_array(g: [f64; 5]) -> Result<LinkGains> {
    LinkGains::new(g[0], g[1], g[2], g[3], g[4])
}

/// Independent Rayleigh power gains around the spec's mean gains.
pub fn draw_rayleigh_gains<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> Result<LinkGains> {
    spec.validate()?;
    let means = spec.mean_gains().as_array();
    gains_from_array(means.map(|m| m * SmallScaleFading::Rayleigh.sample(rng)))
}

/// Path loss times lognormal shadowing times Rayleigh fading, per link.
pub fn draw_geometric_gains<R: Rng + ?Sized>(geo: &GeometrySpec, rng: &mut R) -> Result<LinkGains> {
    draw_geometric_gains_with(geo, SmallScaleFading::Rayleigh, rng)
}

pub fn draw_geometric_gains_with<R: Rng + ?Sized>(
    geo: &GeometrySpec,
    fading: SmallScaleFading,
    rng: &mut R,
) -> Result<LinkGains> {
    let means = geometry_to_mean_gains(geo)?.as_array();
    gains_from_array(means.map(|m| {
        let z: f64 = StandardNormal.sample(rng);
        let shadow_db = geo.shadowing_db * z;
        m * db_to_linear(shadow_db) * fading.sample(rng)
    }))
}

/// Master seed of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed of the `index`-th member of a family, e.g. one sweep point.
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x5EED))))
    }

    /// The random stream owned by realization `index`.
    pub fn realization_stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Where the channel realizations of a run come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSource {
    Fading(FadingSpec),
    Geometry(GeometrySpec),
}

impl ChannelSource {
    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelSource::Fading(spec) => spec.validate(),
            ChannelSource::Geometry(geo) => geo.validate(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LinkGains> {
        match self {
            ChannelSource::Fading(spec) => draw_rayleigh_gains(spec, rng),
            ChannelSource::Geometry(geo) => draw_geometric_gains(geo, rng),
        }
    }

    /// Gains of realization `index` under `seed`.
    pub fn realization(&self, seed: Seed, index: u64) -> Result<LinkGains> {
        self.draw(&mut seed.realization_stream(index))
    }
}
