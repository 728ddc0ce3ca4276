//! Achievable-rate formulas for two-path (virtual full-duplex) relaying with
//! improper Gaussian signaling at the relays.
//!
//! Time is split into alternating slots. Odd slots last `tau` and even slots
//! last `1 - tau`. In an odd slot R1 receives from the source while R2
//! forwards to the destination, and the roles swap in even slots. The
//! receiving relay sees the transmitting relay's signal as interference
//! through the reciprocal inter-relay channel `f`.
//!
//! ```text
//! first hop  S -> Ri : 1/2 log2(1 + [2 ps|hi|^2 (pr|f|^2 + s) + ps^2|hi|^4]
//!                                  / [(1 - Cj^2) pr^2|f|^4 + 2 pr|f|^2 s + s^2])
//! second hop Ri -> D : 1/2 log2(1 + 2 pr|gi|^2 / s + pr^2|gi|^4 (1 - Ci^2) / s^2)
//! ```
//!
//! where `s` is the noise variance. All quantities are linear (no dB).

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// `0.5 * log2(1 + x)`.
#[inline]
fn half_log2_1p(x: f64) -> f64 {
    0.5 * x.ln_1p() / LN_2
}

fn check_nonneg(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

/// Transmit powers and receiver noise shared by every rate formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    p_s: f64,
    p_r: f64,
    sigma_n2: f64,
    p_max: f64,
}

impl SystemParams {
    pub fn new(p_s: f64, p_r: f64, sigma_n2: f64, p_max: f64) -> Result<Self> {
        check_nonneg("p_s", p_s)?;
        check_nonneg("p_r", p_r)?;
        check_nonneg("p_max", p_max)?;
        if !(sigma_n2.is_finite() && sigma_n2 > 0.0) {
            return Err(Error::invalid(
                "sigma_n2",
                format!("must be finite and > 0, got {sigma_n2}"),
            ));
        }
        if p_s > p_max {
            return Err(Error::invalid(
                "p_s",
                format!("{p_s} exceeds p_max {p_max}"),
            ));
        }
        if p_r > p_max {
            return Err(Error::invalid(
                "p_r",
                format!("{p_r} exceeds p_max {p_max}"),
            ));
        }
        Ok(SystemParams {
            p_s,
            p_r,
            sigma_n2,
            p_max,
        })
    }

    pub fn p_s(&self) -> f64 {
        self.p_s
    }

    pub fn p_r(&self) -> f64 {
        self.p_r
    }

    pub fn sigma_n2(&self) -> f64 {
        self.sigma_n2
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }
}

impl Default for SystemParams {
    /// Unit powers, unit budget and unit noise.
    fn default() -> Self {
        SystemParams {
            p_s: 1.0,
            p_r: 1.0,
            sigma_n2: 1.0,
            p_max: 1.0,
        }
    }
}

/// One of the two half-duplex relays, which also names the path through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relay {
    R1,
    R2,
}

impl Relay {
    pub const BOTH: [Relay; 2] = [Relay::R1, Relay::R2];

    pub fn other(self) -> Relay {
        match self {
            Relay::R1 => Relay::R2,
            Relay::R2 => Relay::R1,
        }
    }
}

/// Instantaneous power gains of one channel realization.
///
/// Rates only depend on squared magnitudes, so phases are not kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    h1_sq: f64,
    h2_sq: f64,
    g1_sq: f64,
    g2_sq: f64,
    f_sq: f64,
}

impl LinkGains {
    pub fn new(h1_sq: f64, h2_sq: f64, g1_sq: f64, g2_sq: f64, f_sq: f64) -> Result<Self> {
        check_nonneg("h1_sq", h1_sq)?;
        check_nonneg("h2_sq", h2_sq)?;
        check_nonneg("g1_sq", g1_sq)?;
        check_nonneg("g2_sq", g2_sq)?;
        check_nonneg("f_sq", f_sq)?;
        Ok(LinkGains {
            h1_sq,
            h2_sq,
            g1_sq,
            g2_sq,
            f_sq,
        })
    }

    /// Source to relay gain `|h_i|^2`.
    pub fn h_sq(&self, relay: Relay) -> f64 {
        match relay {
            Relay::R1 => self.h1_sq,
            Relay::R2 => self.h2_sq,
        }
    }

    /// Relay to destination gain `|g_i|^2`.
    pub fn g_sq(&self, relay: Relay) -> f64 {
        match relay {
            Relay::R1 => self.g1_sq,
            Relay::R2 => self.g2_sq,
        }
    }

    /// Inter-relay gain `|f|^2`.
    pub fn f_sq(&self) -> f64 {
        self.f_sq
    }

    /// The same channels with the relay labels exchanged.
    pub fn relabeled(&self) -> LinkGains {
        LinkGains {
            h1_sq: self.h2_sq,
            h2_sq: self.h1_sq,
            g1_sq: self.g2_sq,
            g2_sq: self.g1_sq,
            f_sq: self.f_sq,
        }
    }
}

/// Degree of impropriety `|pseudo-variance| / variance` of a relay signal.
///
/// `0` is a proper (circularly symmetric) signal, `1` a maximally improper
/// one whose energy lives in a single real dimension.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct CircularityCoefficient(f64);

impl CircularityCoefficient {
    pub const PROPER: CircularityCoefficient = CircularityCoefficient(0.0);
    pub const MAX_IMPROPER: CircularityCoefficient = CircularityCoefficient(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(CircularityCoefficient(value))
        } else {
            Err(Error::invalid(
                "circularity coefficient",
                format!("must lie in [0, 1], got {value}"),
            ))
        }
    }

    /// Builds the coefficient from a signal's variance `E{|x|^2}` and the
    /// magnitude of its pseudo-variance `|E{x^2}|`.
    pub fn from_moments(variance: f64, pseudo_variance_abs: f64) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::invalid(
                "variance",
                format!("must be > 0, got {variance}"),
            ));
        }
        check_nonneg("pseudo-variance", pseudo_variance_abs)?;
        Self::new(pseudo_variance_abs / variance)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_proper(self) -> bool {
        self.0 == 0.0
    }
}

/// The design triple `(C1, C2, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    pub c1: CircularityCoefficient,
    pub c2: CircularityCoefficient,
    tau: f64,
}

impl SignalConfig {
    pub fn new(c1: CircularityCoefficient, c2: CircularityCoefficient, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::invalid(
                "tau",
                format!("must lie in [0, 1], got {tau}"),
            ));
        }
        Ok(SignalConfig { c1, c2, tau })
    }

    /// Shorthand for raw values; validates like [`SignalConfig::new`].
    pub fn from_values(c1: f64, c2: f64, tau: f64) -> Result<Self> {
        Self::new(
            CircularityCoefficient::new(c1)?,
            CircularityCoefficient::new(c2)?,
            tau,
        )
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn circularity(&self, relay: Relay) -> CircularityCoefficient {
        match relay {
            Relay::R1 => self.c1,
            Relay::R2 => self.c2,
        }
    }
}

/// Every hop rate plus the effective path rates and their sum, in bits/s/Hz.
///
/// Hop rates are the unweighted per-slot rates. `r11`/`r12` are the first and
/// second hop of path 1, `r21`/`r22` those of path 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown {
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
    pub path1: f64,
    pub path2: f64,
    pub total: f64,
}

/// Rate of a single link from the second-order statistics of the received
/// signal `y` and of the interference-plus-noise `z`:
/// `1/2 log2((var_y^2 - |pvar_y|^2) / (var_z^2 - |pvar_z|^2))`, clamped at 0.
pub fn improper_link_rate(
    sigma_y2: f64,
    pseudo_y: f64,
    sigma_z2: f64,
    pseudo_z: f64,
) -> Result<f64> {
    for (name, v) in [
        ("sigma_y2", sigma_y2),
        ("pseudo_y", pseudo_y),
        ("sigma_z2", sigma_z2),
        ("pseudo_z", pseudo_z),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain(format!(
                "{name} must be finite and >= 0, got {v}"
            )));
        }
    }
    let det_y = sigma_y2 * sigma_y2 - pseudo_y * pseudo_y;
    let det_z = sigma_z2 * sigma_z2 - pseudo_z * pseudo_z;
    if det_y <= 0.0 {
        return Err(Error::Domain(format!(
            "received pseudo-variance {pseudo_y} must be below its variance {sigma_y2}"
        )));
    }
    if det_z <= 0.0 {
        return Err(Error::Domain(format!(
            "interference pseudo-variance {pseudo_z} must be below its variance {sigma_z2}"
        )));
    }
    Ok((0.5 * (det_y / det_z).log2()).max(0.0))
}

/// Argument `x` of `1/2 log2(1 + x)` for the first hop into `relay`.
fn first_hop_ratio(
    relay: Relay,
    c_interferer: CircularityCoefficient,
    params: &SystemParams,
    gains: &LinkGains,
) -> f64 {
    let s = params.sigma_n2;
    let h = gains.h_sq(relay);
    let interference = params.p_r * gains.f_sq;
    let signal = params.p_s * h;
    let c = c_interferer.value();
    let num = 2.0 * signal * (interference + s) + signal * signal;
    let den = (1.0 - c * c) * interference * interference + 2.0 * interference * s + s * s;
    num / den
}

/// Argument `x` of `1/2 log2(1 + x)` for the second hop out of `relay`.
fn second_hop_ratio(
    relay: Relay,
    c_own: CircularityCoefficient,
    params: &SystemParams,
    gains: &LinkGains,
) -> f64 {
    let snr = params.p_r * gains.g_sq(relay) / params.sigma_n2;
    let c = c_own.value();
    2.0 * snr + snr * snr * (1.0 - c * c)
}

/// Rate of the source to `relay` hop while the other relay, transmitting with
/// circularity `c_interferer`, interferes through `f`.
pub fn first_hop_rate(
    relay: Relay,
    c_interferer: CircularityCoefficient,
    params: &SystemParams,
    gains: &LinkGains,
) -> f64 {
    half_log2_1p(first_hop_ratio(relay, c_interferer, params, gains))
}

/// Rate of the `relay` to destination hop when the relay transmits with
/// circularity `c_own`. Interference-free.
pub fn second_hop_rate(
    relay: Relay,
    c_own: CircularityCoefficient,
    params: &SystemParams,
    gains: &LinkGains,
) -> f64 {
    half_log2_1p(second_hop_ratio(relay, c_own, params, gains))
}

/// Per-path effective rates and total from the four unweighted hop rates.
///
/// Path 1 receives in odd slots (`tau`) and forwards in even ones; path 2 is
/// the mirror image. Every caller goes through here so results agree to the
/// bit.
#[inline]
pub(crate) fn combine_hops(tau: f64, r11: f64, r12: f64, r21: f64, r22: f64) -> (f64, f64, f64) {
    let rest = 1.0 - tau;
    let path1 = (tau * r11).min(rest * r12);
    let path2 = (rest * r21).min(tau * r22);
    (path1, path2, path1 + path2)
}

/// Effective rate of the path through `relay`: the smaller of its two hop
/// rates, each weighted by the duration of the slot it occupies.
pub fn path_rate(
    relay: Relay,
    config: &SignalConfig,
    params: &SystemParams,
    gains: &LinkGains,
) -> f64 {
    let b = total_rate(config, params, gains);
    match relay {
        Relay::R1 => b.path1,
        Relay::R2 => b.path2,
    }
}

/// End-to-end rate of both paths.
pub fn total_rate(
    config: &SignalConfig,
    params: &SystemParams,
    gains: &LinkGains,
) -> RateBreakdown {
    // R1 hears R2 (C2) and forwards with C1; R2 hears R1 (C1) and forwards with C2.
    let r11 = first_hop_rate(Relay::R1, config.c2, params, gains);
    let r12 = second_hop_rate(Relay::R1, config.c1, params, gains);
    let r21 = first_hop_rate(Relay::R2, config.c1, params, gains);
    let r22 = second_hop_rate(Relay::R2, config.c2, params, gains);
    let (path1, path2, total) = combine_hops(config.tau, r11, r12, r21, r22);
    RateBreakdown {
        r11,
        r12,
        r21,
        r22,
        path1,
        path2,
        total,
    }
}

/// Auxiliary coefficients of the hop-crossing threshold of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn psi_coeffs(relay: Relay, params: &SystemParams, gains: &LinkGains) -> PsiCoefficients {
    let SystemParams {
        p_s,
        p_r,
        sigma_n2: s,
        ..
    } = *params;
    let h = gains.h_sq(relay);
    let g = gains.g_sq(relay);
    let f = gains.f_sq;
    let alpha = 2.0 * p_r.powi(3) * g * f * f / s;
    let beta = p_r * g * (2.0 * p_r * f + s);
    let gamma = 2.0 * p_s * h * (p_r * f + s) + p_s * p_s * h * h - 2.0 * beta;
    PsiCoefficients { alpha, beta, gamma }
}

fn check_unit_interval(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "psi argument must lie in [0, 1], got {x}"
        )))
    }
}

fn relay_snr_scale(relay: Relay, params: &SystemParams, gains: &LinkGains) -> Result<f64> {
    let pg = params.p_r * gains.g_sq(relay);
    if pg > 0.0 {
        Ok(params.sigma_n2 / pg)
    } else {
        Err(Error::Domain(
            "psi is undefined when p_r * |g_i|^2 = 0".to_string(),
        ))
    }
}

/// `Psi(x) = s / (pr |gi|^2) * (gamma - alpha x) / (beta + alpha x)`.
///
/// May be negative or exceed one.
pub fn psi(x: f64, relay: Relay, params: &SystemParams, gains: &LinkGains) -> Result<f64> {
    check_unit_interval(x)?;
    let scale = relay_snr_scale(relay, params, gains)?;
    let PsiCoefficients { alpha, beta, gamma } = psi_coeffs(relay, params, gains);
    Ok(scale * (gamma - alpha * x) / (beta + alpha * x))
}

/// Value of `1 - Ci^2` at which the two hops of the path through `relay` have
/// equal rate, given `x = 1 - Cj^2` for the interfering relay. The path is
/// first-hop limited exactly when `1 - Ci^2 >= threshold`.
///
/// Same `alpha`, `beta`, `gamma` as [`psi`] but the interference term of the
/// denominator enters with weight one half: the first-hop denominator
/// carries `x pr^2 |f|^4` while `alpha` is defined with a factor two.
pub fn hop_crossing_threshold(
    x: f64,
    relay: Relay,
    params: &SystemParams,
    gains: &LinkGains,
) -> Result<f64> {
    check_unit_interval(x)?;
    let scale = relay_snr_scale(relay, params, gains)?;
    let PsiCoefficients { alpha, beta, gamma } = psi_coeffs(relay, params, gains);
    Ok(scale * (gamma - alpha * x) / (beta + 0.5 * alpha * x))
}

/// Which hop bounds a path at equal time sharing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopLimit {
    FirstHopLimited,
    SecondHopLimited,
}

/// `min{R_i1(Cj), R_i2(Ci)}` at equal time sharing, decided branch-first.
///
/// The limiting hop is found from the endpoint comparisons (all of `Cj`
/// against all of `Ci`) and, when those are inconclusive, from the crossing
/// threshold on `1 - Ci^2`. Only the selected hop's rate is evaluated. The
/// equal-slot factor 1/2 is not applied.
pub fn piecewise_path_min(
    relay: Relay,
    c_own: CircularityCoefficient,
    c_interferer: CircularityCoefficient,
    params: &SystemParams,
    gains: &LinkGains,
) -> (f64, HopLimit) {
    let first = || {
        (
            first_hop_rate(relay, c_interferer, params, gains),
            HopLimit::FirstHopLimited,
        )
    };
    let second = || {
        (
            second_hop_rate(relay, c_own, params, gains),
            HopLimit::SecondHopLimited,
        )
    };

    if params.p_r * gains.g_sq(relay) == 0.0 {
        let (a, b) = (first(), second());
        return if a.0 <= b.0 { a } else { b };
    }

    use CircularityCoefficient as C;
    // Hop rates are monotone in C, so comparing the log arguments suffices.
    let first_best = first_hop_ratio(relay, C::MAX_IMPROPER, params, gains);
    let second_worst = second_hop_ratio(relay, C::MAX_IMPROPER, params, gains);
    if first_best <= second_worst {
        return first();
    }
    let first_worst = first_hop_ratio(relay, C::PROPER, params, gains);
    let second_best = second_hop_ratio(relay, C::PROPER, params, gains);
    if second_best <= first_worst {
        return second();
    }

    let x = 1.0 - c_interferer.value().powi(2);
    match hop_crossing_threshold(x, relay, params, gains) {
        Ok(threshold) if 1.0 - c_own.value().powi(2) >= threshold => first(),
        Ok(_) => second(),
        Err(_) => unreachable!("p_r * |g|^2 > 0 checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn unit_gains() -> LinkGains {
        LinkGains::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    fn c(v: f64) -> CircularityCoefficient {
        CircularityCoefficient::new(v).unwrap()
    }

    #[test]
    fn lemma_examples() {
        assert!((improper_link_rate(2.0, 0.0, 1.0, 0.0).unwrap() - 1.0).abs() < TOL);
        assert!(
            (improper_link_rate(2.0, 1.0, 1.0, 0.0).unwrap() - 0.792_481_250_360_578).abs() < TOL
        );
        assert_eq!(improper_link_rate(1.0, 0.5, 1.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn lemma_clamps_and_rejects() {
        assert_eq!(improper_link_rate(1.0, 0.0, 2.0, 0.0).unwrap(), 0.0);
        assert!(matches!(
            improper_link_rate(1.0, 1.0, 1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            improper_link_rate(1.0, 0.0, 1.0, 1.5),
            Err(Error::Domain(_))
        ));
        assert!(improper_link_rate(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(improper_link_rate(f64::NAN, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn first_hop_examples() {
        let no_relay_power = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let r = first_hop_rate(Relay::R1, c(0.0), &no_relay_power, &unit_gains());
        assert!((r - 1.0).abs() < TOL);

        let p = SystemParams::default();
        let r = first_hop_rate(Relay::R1, c(0.0), &p, &unit_gains());
        assert!((r - 0.584_962_500_721_156_2).abs() < TOL);
        assert!((r - 1.5f64.log2()).abs() < TOL);
        let r = first_hop_rate(Relay::R1, c(1.0), &p, &unit_gains());
        assert!((r - 0.707_518_749_639_422).abs() < TOL);
    }

    #[test]
    fn second_hop_examples() {
        let p = SystemParams::default();
        assert!((second_hop_rate(Relay::R1, c(0.0), &p, &unit_gains()) - 1.0).abs() < TOL);
        let r = second_hop_rate(Relay::R1, c(1.0), &p, &unit_gains());
        assert!((r - 0.792_481_250_360_578).abs() < TOL);
        let silent = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        for v in [0.0, 0.3, 1.0] {
            assert_eq!(
                second_hop_rate(Relay::R1, c(v), &silent, &unit_gains()),
                0.0
            );
        }
    }

    #[test]
    fn path_examples() {
        let p = SystemParams::default();
        let g = unit_gains();
        let full = SignalConfig::from_values(0.3, 0.8, 1.0).unwrap();
        assert_eq!(path_rate(Relay::R1, &full, &p, &g), 0.0);

        let half = SignalConfig::from_values(0.0, 0.0, 0.5).unwrap();
        assert!((path_rate(Relay::R1, &half, &p, &g) - 0.292_481_250_360_578_1).abs() < TOL);

        let a = 0.584_962_500_721_156_2;
        let tau_star = 1.0 / (1.0 + a);
        let cross = SignalConfig::from_values(0.0, 0.0, tau_star).unwrap();
        assert!((path_rate(Relay::R1, &cross, &p, &g) - 0.369_070_246_428_542_6).abs() < 1e-12);
    }

    #[test]
    fn total_examples() {
        let p = SystemParams::default();
        let half = SignalConfig::from_values(0.0, 0.0, 0.5).unwrap();
        let b = total_rate(&half, &p, &unit_gains());
        assert!((b.total - 0.584_962_500_721_156_2).abs() < TOL);
        assert_eq!(b.total, b.path1 + b.path2);

        let no_iri = LinkGains::new(1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let b = total_rate(&half, &p, &no_iri);
        assert!((b.total - 1.0).abs() < TOL);
    }

    #[test]
    fn relabel_symmetry_example() {
        let p = SystemParams::default();
        let g = LinkGains::new(3.2, 100.0, 31.6, 10.0, 7.0).unwrap();
        let cfg = SignalConfig::from_values(0.25, 0.75, 0.375).unwrap();
        let swapped = SignalConfig::new(cfg.c2, cfg.c1, 1.0 - cfg.tau()).unwrap();
        let a = total_rate(&cfg, &p, &g);
        let b = total_rate(&swapped, &p, &g.relabeled());
        assert_eq!(a.total, b.total);
        assert_eq!(a.path1, b.path2);
    }

    #[test]
    fn psi_coeff_examples() {
        let p = SystemParams::default();
        let k = psi_coeffs(Relay::R1, &p, &unit_gains());
        assert_eq!((k.alpha, k.beta, k.gamma), (2.0, 3.0, -1.0));

        let g = LinkGains::new(2.0, 1.0, 3.0, 1.0, 0.0).unwrap();
        let k = psi_coeffs(Relay::R1, &p, &g);
        assert_eq!(k.alpha, 0.0);
        assert_eq!(k.beta, 3.0);

        let silent = SystemParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let k = psi_coeffs(Relay::R1, &silent, &unit_gains());
        assert_eq!(k.gamma, -2.0 * k.beta);
    }

    #[test]
    fn psi_examples() {
        let p = SystemParams::default();
        let v = psi(1.0, Relay::R1, &p, &unit_gains()).unwrap();
        assert!((v + 0.6).abs() < TOL);

        let g = LinkGains::new(2.0, 1.0, 3.0, 1.0, 0.0).unwrap();
        let k = psi_coeffs(Relay::R1, &p, &g);
        let expected = k.gamma / (3.0 * k.beta);
        for x in [0.0, 0.4, 1.0] {
            assert!((psi(x, Relay::R1, &p, &g).unwrap() - expected).abs() < TOL);
        }

        // gamma = alpha * x at x = 0.5 for these gains
        let g = LinkGains::new(1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let k = psi_coeffs(Relay::R1, &p, &g);
        let root = k.gamma / k.alpha;
        assert!((0.0..=1.0).contains(&root));
        assert!(psi(root, Relay::R1, &p, &g).unwrap().abs() < TOL);
    }

    #[test]
    fn psi_domain_errors() {
        let silent = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            psi(0.5, Relay::R1, &silent, &unit_gains()),
            Err(Error::Domain(_))
        ));
        let p = SystemParams::default();
        assert!(psi(1.5, Relay::R1, &p, &unit_gains()).is_err());
    }

    #[test]
    fn piecewise_examples() {
        let p = SystemParams::default();
        for ci in [0.0, 0.5, 1.0] {
            let (r, b) = piecewise_path_min(Relay::R1, c(ci), c(0.0), &p, &unit_gains());
            assert!((r - 0.584_962_500_721_156_2).abs() < TOL);
            assert_eq!(b, HopLimit::FirstHopLimited);
        }

        // strong source link, weak relay link: second hop bounds at C = 0
        let g = LinkGains::new(1000.0, 1000.0, 0.5, 0.5, 0.1).unwrap();
        let (r, b) = piecewise_path_min(Relay::R2, c(0.0), c(0.0), &p, &g);
        assert_eq!(b, HopLimit::SecondHopLimited);
        assert_eq!(r, second_hop_rate(Relay::R2, c(0.0), &p, &g));
    }

    #[test]
    fn piecewise_falls_back_without_relay_power() {
        let silent = SystemParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let (r, b) = piecewise_path_min(Relay::R1, c(0.2), c(0.7), &silent, &unit_gains());
        assert_eq!(r, 0.0);
        assert_eq!(b, HopLimit::SecondHopLimited);
    }

    #[test]
    fn threshold_region_selects_smaller_hop() {
        // Endpoint tests are inconclusive here; the threshold has to decide.
        let p = SystemParams::default();
        let g = LinkGains::new(20.0, 20.0, 20.0, 20.0, 3.0).unwrap();
        let r1 = |cv| first_hop_ratio(Relay::R1, c(cv), &p, &g);
        let r2 = |cv| second_hop_ratio(Relay::R1, c(cv), &p, &g);
        assert!(r1(1.0) > r2(1.0) && r2(0.0) > r1(0.0));
        for ci in [0.0, 0.2, 0.5, 0.8, 0.95, 1.0] {
            for cj in [0.0, 0.3, 0.7, 1.0] {
                let (r, _) = piecewise_path_min(Relay::R1, c(ci), c(cj), &p, &g);
                let direct = first_hop_rate(Relay::R1, c(cj), &p, &g).min(second_hop_rate(
                    Relay::R1,
                    c(ci),
                    &p,
                    &g,
                ));
                assert!((r - direct).abs() <= 1e-9 * direct, "ci={ci} cj={cj}");
            }
        }
    }

    #[test]
    fn type_invariants() {
        assert!(SystemParams::new(2.0, 1.0, 1.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(SystemParams::new(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(LinkGains::new(1.0, f64::INFINITY, 1.0, 1.0, 1.0).is_err());
        assert!(LinkGains::new(1.0, 1.0, -0.1, 1.0, 1.0).is_err());
        assert!(CircularityCoefficient::new(1.01).is_err());
        assert!(CircularityCoefficient::new(f64::NAN).is_err());
        assert!(SignalConfig::from_values(0.0, 0.0, -0.1).is_err());
        assert_eq!(
            CircularityCoefficient::from_moments(2.0, 1.0)
                .unwrap()
                .value(),
            0.5
        );
        assert!(CircularityCoefficient::from_moments(1.0, 2.0).is_err());
    }
}
