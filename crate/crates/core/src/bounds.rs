//! Continuity bounds for entropic quantities under an energy constraint, the
//! finite-dimensional bounds they refine, and the optimisation over the free
//! parameter `t`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::grid_then_golden;
use crate::spectrum::Oscillator;
use crate::thermo::{d_zero, f_hat_inverse, f_osc, FHatFunction};

pub use crate::special::{checked_eta, checked_g, checked_h2, eta, g, h2};

/// Number of log-spaced grid points used by [`cb_opt`].
pub const T_GRID_POINTS: usize = 256;
/// Lower end of the `t` grid relative to `T`.
pub const T_GRID_FLOOR: f64 = 1e-6;
/// Relative bracket width at which the `t` refinement stops.
pub const T_REFINE_RTOL: f64 = 1e-6;

/// Coefficients of a continuity bound: `C` multiplies the energy term, `D` the
/// `g` terms and `delta` is the additive constant next to the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub c: f64,
    pub d: f64,
    pub delta: f64,
}

impl BoundParams {
    pub fn new(c: f64, d: f64, delta: f64) -> Result<Self> {
        if !(c >= 0.0 && d >= 0.0 && c.is_finite() && d.is_finite()) {
            return Err(Error::domain("C and D must be finite and nonnegative"));
        }
        if !(delta > std::f64::consts::LN_2 && delta.is_finite()) {
            return Err(Error::domain("delta must exceed ln 2"));
        }
        Ok(BoundParams { c, d, delta })
    }

    pub fn from_preset(preset: QuantityPreset, delta: f64) -> Result<Self> {
        let (c, d) = preset.coefficients();
        Self::new(c, d, delta)
    }

    /// `1/d0 + ln 2`.
    pub fn generic_delta(d0: u64) -> f64 {
        1.0 / d0 as f64 + std::f64::consts::LN_2
    }

    /// `exp(-l) + ln 2` for an `l`-mode oscillator.
    pub fn oscillator_delta(modes: usize) -> f64 {
        (-(modes as f64)).exp() + std::f64::consts::LN_2
    }
}

/// Entropic quantities with known `(C, D)` coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityPreset {
    Entropy,
    CondEntropy,
    Qcmi,
    ChannelMi,
    ChannelCi,
    ChannelMiAntideg,
    ChannelCiDeg,
    Holevo,
    Privacy,
    PrivacyDegOrAntideg,
}

impl QuantityPreset {
    pub const ALL: [QuantityPreset; 10] = [
        QuantityPreset::Entropy,
        QuantityPreset::CondEntropy,
        QuantityPreset::Qcmi,
        QuantityPreset::ChannelMi,
        QuantityPreset::ChannelCi,
        QuantityPreset::ChannelMiAntideg,
        QuantityPreset::ChannelCiDeg,
        QuantityPreset::Holevo,
        QuantityPreset::Privacy,
        QuantityPreset::PrivacyDegOrAntideg,
    ];

    /// `(C, D)`.
    pub fn coefficients(self) -> (f64, f64) {
        use QuantityPreset::*;
        match self {
            Entropy => (1.0, 1.0),
            CondEntropy => (2.0, 1.0),
            Qcmi | ChannelMi | ChannelCi | Holevo | PrivacyDegOrAntideg => (2.0, 2.0),
            ChannelMiAntideg | ChannelCiDeg => (1.0, 2.0),
            Privacy => (4.0, 2.0),
        }
    }

    pub fn name(self) -> &'static str {
        use QuantityPreset::*;
        match self {
            Entropy => "entropy",
            CondEntropy => "cond-entropy",
            Qcmi => "qcmi",
            ChannelMi => "channel-mi",
            ChannelCi => "channel-ci",
            ChannelMiAntideg => "channel-mi-antideg",
            ChannelCiDeg => "channel-ci-deg",
            Holevo => "holevo",
            Privacy => "privacy",
            PrivacyDegOrAntideg => "privacy-deg",
        }
    }
}

impl fmt::Display for QuantityPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantityPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown quantity '{s}'")))
    }
}

/// `C eps ln d + D g(eps)`: the bound for a `d`-dimensional system.
pub fn afw_finite(d: u64, eps: f64, params: &BoundParams) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("dimension must be at least 2"));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::domain("eps must lie in [0, 1]"));
    }
    Ok(params.c * eps * (d as f64).ln() + params.d * g(eps))
}

/// [`afw_finite`] for states of rank at most `k`, where `2k` replaces `d`.
pub fn afw_finite_rank(k: u64, eps: f64, params: &BoundParams) -> Result<f64> {
    afw_finite(2 * k.max(1), eps, params)
}

/// `eps ln(d-1) + h2(eps)`, valid for `eps <= 1 - 1/d`.
pub fn audenaert(d: u64, eps: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("dimension must be at least 2"));
    }
    let limit = 1.0 - 1.0 / d as f64;
    if eps.is_nan() || eps < 0.0 || eps > limit {
        return Err(Error::domain(format!("eps must lie in [0, {limit}]")));
    }
    Ok(eps * ((d - 1) as f64).ln() + h2(eps))
}

/// An envelope together with the threshold dimension `d0` and `gamma(d0)`, the
/// energy at which the envelope reaches `ln d0`.
#[derive(Debug, Clone)]
pub struct Envelope {
    fhat: FHatFunction,
    d0: u64,
    gamma_d0: f64,
}

impl Envelope {
    /// Uses the least admissible `d0`.
    pub fn new(fhat: FHatFunction) -> Result<Self> {
        let d0 = d_zero(&fhat)?;
        Self::with_d0(fhat, d0)
    }

    pub fn with_d0(fhat: FHatFunction, d0: u64) -> Result<Self> {
        if d0 < 1 {
            return Err(Error::domain("d0 must be positive"));
        }
        let gamma_d0 = f_hat_inverse(&fhat, (d0 as f64).ln())?;
        Ok(Envelope { fhat, d0, gamma_d0 })
    }

    pub fn oscillator(osc: Oscillator) -> Result<Self> {
        Self::new(FHatFunction::OscillatorBar(osc))
    }

    pub fn fhat(&self) -> &FHatFunction {
        &self.fhat
    }

    pub fn d0(&self) -> u64 {
        self.d0
    }

    pub fn gamma_d0(&self) -> f64 {
        self.gamma_d0
    }

    /// `T = (1/eps) min(1, sqrt(Ebar / gamma(d0)))`.
    pub fn t_max(&self, ebar: f64, eps: f64) -> Result<f64> {
        t_upper(ebar, eps, self.gamma_d0)
    }

    pub fn cb(&self, ebar: f64, eps: f64, t: f64, params: &BoundParams) -> Result<f64> {
        let t_cap = self.t_max(ebar, eps)?;
        check_t(t, t_cap)?;
        cb_formula(|x| self.fhat.eval(x), ebar, eps, t, params)
    }

    /// Minimum of [`Envelope::cb`] over `t` in `(0, T]`.
    pub fn cb_opt(&self, ebar: f64, eps: f64, params: &BoundParams) -> Result<(f64, f64)> {
        self.cb_opt_grid(ebar, eps, params, T_GRID_POINTS)
    }

    /// [`Envelope::cb_opt`] with an `n`-point initial grid.
    pub fn cb_opt_grid(&self, ebar: f64, eps: f64, params: &BoundParams, n: usize) -> Result<(f64, f64)> {
        let t_cap = self.t_max(ebar, eps)?;
        optimize_t(|t| cb_formula(|x| self.fhat.eval(x), ebar, eps, t, params), t_cap, n)
    }
}

fn t_upper(ebar: f64, eps: f64, scale: f64) -> Result<f64> {
    if !(ebar > 0.0) || !ebar.is_finite() {
        return Err(Error::domain("Ebar must be positive"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain("eps must be positive"));
    }
    let ratio = if scale > 0.0 { (ebar / scale).sqrt() } else { f64::INFINITY };
    Ok(ratio.min(1.0) / eps)
}

fn check_t(t: f64, t_cap: f64) -> Result<()> {
    if !(t > 0.0) || t > t_cap * (1.0 + 1e-12) {
        return Err(Error::domain(format!("t = {t} must lie in (0, {t_cap}]")));
    }
    Ok(())
}

pub(crate) fn cb_formula<F>(fhat: F, ebar: f64, eps: f64, t: f64, params: &BoundParams) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let et = eps * t;
    let energy_term = params.c * eps * (1.0 + 4.0 * t) * (fhat(ebar / (et * et))? + params.delta);
    Ok(energy_term + params.d * (2.0 * g(et) + g(eps * (1.0 + 2.0 * t))))
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("the t grid needs at least 2 points"));
    }
    Ok(())
}

fn optimize_t<F>(f: F, t_cap: f64, n: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    check_grid(n)?;
    let mut err = None;
    let (t, v) = grid_then_golden(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        t_cap * T_GRID_FLOOR,
        t_cap,
        n,
        T_REFINE_RTOL,
    );
    if let Some(e) = err {
        return Err(e);
    }
    if !v.is_finite() {
        return Err(Error::precision("bound is not finite on the t grid"));
    }
    Ok((t, v))
}

/// `T` for an envelope with threshold `d0`.
pub fn t_max(fhat: &FHatFunction, d0: u64, ebar: f64, eps: f64) -> Result<f64> {
    Envelope::with_d0(fhat.clone(), d0)?.t_max(ebar, eps)
}

/// `T* = (1/eps) min(1, sqrt(Ebar / E0))` for an oscillator.
pub fn t_max_osc(osc: &Oscillator, ebar: f64, eps: f64) -> Result<f64> {
    t_upper(ebar, eps, osc.ground_energy())
}

/// The continuity bound `CB_t` at a given `t`.
pub fn cb(
    fhat: &FHatFunction,
    d0: u64,
    ebar: f64,
    eps: f64,
    t: f64,
    params: &BoundParams,
) -> Result<f64> {
    Envelope::with_d0(fhat.clone(), d0)?.cb(ebar, eps, t, params)
}

/// Minimiser and minimum of `CB_t` over `t` in `(0, T]`.
pub fn cb_opt(
    fhat: &FHatFunction,
    d0: u64,
    ebar: f64,
    eps: f64,
    params: &BoundParams,
) -> Result<(f64, f64)> {
    Envelope::with_d0(fhat.clone(), d0)?.cb_opt(ebar, eps, params)
}

fn osc_ebar(osc: &Oscillator, energy: f64) -> Result<f64> {
    let e0 = osc.ground_energy();
    if energy.is_nan() || energy <= e0 {
        return Err(Error::domain(format!("energy {energy} must exceed the ground energy {e0}")));
    }
    Ok(energy - e0)
}

fn osc_envelope(osc: &Oscillator) -> impl Fn(f64) -> Result<f64> + '_ {
    let l = osc.mode_count() as f64;
    let scale = l * osc.geometric_mean();
    let e0 = osc.ground_energy();
    move |x| Ok(l * ((x + 2.0 * e0) / scale).ln() + l)
}

/// The oscillator bound at total energy `E` with `t` in `(0, T*]`; `params.delta`
/// is normally [`BoundParams::oscillator_delta`].
pub fn cb_osc(osc: &Oscillator, energy: f64, eps: f64, t: f64, params: &BoundParams) -> Result<f64> {
    let ebar = osc_ebar(osc, energy)?;
    check_t(t, t_max_osc(osc, ebar, eps)?)?;
    cb_formula(osc_envelope(osc), ebar, eps, t, params)
}

/// Minimiser and minimum of [`cb_osc`] over `t` in `(0, T*]`.
pub fn cb_osc_opt(osc: &Oscillator, energy: f64, eps: f64, params: &BoundParams) -> Result<(f64, f64)> {
    cb_osc_opt_grid(osc, energy, eps, params, T_GRID_POINTS)
}

/// [`cb_osc_opt`] with an `n`-point initial grid.
pub fn cb_osc_opt_grid(
    osc: &Oscillator,
    energy: f64,
    eps: f64,
    params: &BoundParams,
    n: usize,
) -> Result<(f64, f64)> {
    let ebar = osc_ebar(osc, energy)?;
    let t_cap = t_max_osc(osc, ebar, eps)?;
    let env = osc_envelope(osc);
    optimize_t(|t| cb_formula(&env, ebar, eps, t, params), t_cap, n)
}

/// The weaker closed form `C eps (1+4t)(F(E) - 2l ln(eps t) + delta) + D(...)`
/// that dominates [`cb_osc`].
pub fn cb_osc_loose(
    osc: &Oscillator,
    energy: f64,
    eps: f64,
    t: f64,
    params: &BoundParams,
) -> Result<f64> {
    let ebar = osc_ebar(osc, energy)?;
    check_t(t, t_max_osc(osc, ebar, eps)?)?;
    let l = osc.mode_count() as f64;
    let et = eps * t;
    let energy_term =
        params.c * eps * (1.0 + 4.0 * t) * (f_osc(osc, energy)? - 2.0 * l * et.ln() + params.delta);
    Ok(energy_term + params.d * (2.0 * g(et) + g(eps * (1.0 + 2.0 * t))))
}
