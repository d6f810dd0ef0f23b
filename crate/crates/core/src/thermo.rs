//! Gibbs-state thermodynamics of a spectrum: partition function, inverse
//! temperature, maximal entropy at bounded energy and its concave envelopes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{brent_root, golden_min};
use crate::special::g;
use crate::spectrum::{ExplicitSpectrum, Oscillator, SpectrumModel};

/// Relative accuracy of the inverse-temperature solve, measured on the mean energy
/// above the ground level.
pub const LAMBDA_RTOL: f64 = 1e-12;

/// Bound on the neglected Boltzmann tail of an incomplete explicit spectrum,
/// relative to the retained sum.
pub const TAIL_RTOL: f64 = 1e-12;

/// Largest energy the envelope scan may visit before giving up.
pub const ENVELOPE_CEILING: f64 = 1e200;

/// Consecutive decreases of `F(E')/sqrt(E')` that end the envelope scan.
const ENVELOPE_TURNOVER: usize = 8;

/// Maximal-entropy state at a given energy. At the ground energy `lambda` is
/// infinite and `ln_z` is reported as negative infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibbsPoint {
    pub energy: f64,
    pub lambda: f64,
    pub ln_z: f64,
    pub entropy: f64,
}

struct ExplicitSums {
    /// ln of sum of exp(-lambda (E_k - E_0)).
    ln_s: f64,
    /// Mean energy above `E_0`.
    excess: f64,
}

fn last_positive_gap(levels: &[f64]) -> Option<f64> {
    levels.windows(2).rev().map(|w| w[1] - w[0]).find(|&g| g > 0.0)
}

fn explicit_sums(spec: &ExplicitSpectrum, lambda: f64) -> Result<ExplicitSums> {
    let levels = spec.levels();
    let e0 = levels[0];
    let mut s = 0.0;
    let mut se = 0.0;
    for &e in levels {
        let w = (-lambda * (e - e0)).exp();
        s += w;
        se += w * (e - e0);
    }
    if !spec.is_complete() {
        // Unlisted levels lie at or above `complete_below` and are at least as
        // dense as an arithmetic progression with the last observed gap.
        let delta = last_positive_gap(levels)
            .ok_or_else(|| Error::precision("cannot bound the tail of a degenerate spectrum"))?;
        if lambda <= 0.0 {
            return Err(Error::precision("tail of an incomplete spectrum diverges at lambda = 0"));
        }
        let c = spec.complete_below() - e0;
        let q = (-lambda * delta).exp();
        let head = (-lambda * c).exp();
        let tail = head / (1.0 - q);
        let tail_e = head * (c / (1.0 - q) + delta * q / ((1.0 - q) * (1.0 - q)));
        if tail > TAIL_RTOL * s || tail_e > TAIL_RTOL * se.max(f64::MIN_POSITIVE) {
            return Err(Error::precision(format!(
                "neglected tail at lambda = {lambda} exceeds tolerance; list more levels"
            )));
        }
    }
    Ok(ExplicitSums {
        ln_s: s.ln(),
        excess: se / s,
    })
}

/// `ln Z(lambda)` with `Z = Tr exp(-lambda H)`.
pub fn ln_partition(model: &SpectrumModel, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::domain("inverse temperature must be nonnegative"));
    }
    match model {
        SpectrumModel::Oscillator(osc) => {
            if lambda == 0.0 {
                return Err(Error::domain("oscillator partition function diverges at lambda = 0"));
            }
            Ok(osc
                .energies()
                .iter()
                .map(|w| -lambda * w / 2.0 - (-(-lambda * w).exp_m1()).ln())
                .sum())
        }
        SpectrumModel::Explicit(spec) => {
            let sums = explicit_sums(spec, lambda)?;
            Ok(sums.ln_s - lambda * spec.levels()[0])
        }
    }
}

/// Mean energy of the Gibbs state at inverse temperature `lambda`.
pub fn mean_energy(model: &SpectrumModel, lambda: f64) -> Result<f64> {
    Ok(model.ground_energy() + mean_excess(model, lambda)?)
}

/// Mean energy above the ground energy; avoids cancellation against a large
/// `E_0`.
fn mean_excess(model: &SpectrumModel, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::domain("inverse temperature must be nonnegative"));
    }
    match model {
        SpectrumModel::Oscillator(osc) => {
            if lambda == 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(osc.energies().iter().map(|w| w / (lambda * w).exp_m1()).sum())
        }
        SpectrumModel::Explicit(spec) => Ok(explicit_sums(spec, lambda)?.excess),
    }
}

/// Inverse temperature `lambda(E)` with mean energy `E`.
///
/// For a complete finite spectrum any `E` at or above the maximally mixed mean
/// yields `0`.
pub fn solve_lambda(model: &SpectrumModel, energy: f64) -> Result<f64> {
    let e0 = model.ground_energy();
    if energy.is_nan() || energy <= e0 {
        return Err(Error::domain(format!(
            "energy {energy} must exceed the ground energy {e0}"
        )));
    }
    if let SpectrumModel::Oscillator(osc) = model {
        if let [w] = osc.energies() {
            return Ok((2.0 * e0 / (energy - e0)).ln_1p() / w);
        }
    }
    if let SpectrumModel::Explicit(spec) = model {
        if spec.is_complete() {
            if energy >= mean_energy(model, 0.0)? {
                return Ok(0.0);
            }
        } else if energy >= spec.complete_below() {
            return Err(Error::domain(format!(
                "energy {energy} lies beyond the listed range {}",
                spec.complete_below()
            )));
        }
    }
    let gap = energy - e0;
    let phi = |l: f64| mean_excess(model, l).map(|m| m - gap);
    let bracket_err = || Error::precision("failed to bracket the inverse temperature");
    // Bracket from the cold side: small lambda may be unresolvable for an
    // incomplete spectrum even when the root is not.
    let mut hi = 1.0 / gap;
    loop {
        match phi(hi) {
            Ok(v) if v <= 0.0 => break,
            Ok(_) | Err(Error::Precision(_)) => hi *= 2.0,
            Err(e) => return Err(e),
        }
        if hi > 1e300 {
            return Err(bracket_err());
        }
    }
    let mut lo = hi;
    let mut factor: f64 = 0.5;
    for _ in 0..2000 {
        let cand = lo * factor;
        match phi(cand) {
            Ok(v) if v >= 0.0 => {
                return brent_root(phi, cand, hi, |f| f.abs() <= LAMBDA_RTOL * gap);
            }
            Ok(_) => lo = cand,
            Err(Error::Precision(_)) if factor < 1.0 - 1e-9 => factor = factor.sqrt(),
            Err(e) => return Err(e),
        }
        if lo < 1e-300 {
            break;
        }
    }
    Err(bracket_err())
}

/// Maximal entropy `F(E)` with its Gibbs parameters.
pub fn f_max(model: &SpectrumModel, energy: f64) -> Result<GibbsPoint> {
    let e0 = model.ground_energy();
    if energy.is_nan() || energy < e0 {
        return Err(Error::domain(format!(
            "energy {energy} lies below the ground energy {e0}"
        )));
    }
    if energy == e0 {
        return Ok(GibbsPoint {
            energy,
            lambda: f64::INFINITY,
            ln_z: f64::NEG_INFINITY,
            entropy: (model.ground_multiplicity() as f64).ln(),
        });
    }
    let lambda = solve_lambda(model, energy)?;
    let ln_z = ln_partition(model, lambda)?;
    let entropy = match model {
        // Mode-wise form avoids the cancellation in lambda E + ln Z near E_0.
        SpectrumModel::Oscillator(osc) => match osc.energies() {
            [w] => g((energy - e0) / w),
            ws => ws.iter().map(|w| g(1.0 / (lambda * w).exp_m1())).sum(),
        },
        SpectrumModel::Explicit(_) if lambda == 0.0 => ln_z,
        SpectrumModel::Explicit(_) => lambda * energy + ln_z,
    };
    Ok(GibbsPoint {
        energy,
        lambda,
        ln_z,
        entropy,
    })
}

/// Entropy bound in the shifted energy variable: `F(E + E_0)`, `E >= 0`.
pub fn f_bar(model: &SpectrumModel, energy: f64) -> Result<f64> {
    if energy.is_nan() || energy < 0.0 {
        return Err(Error::domain("shifted energy must be nonnegative"));
    }
    Ok(f_max(model, energy + model.ground_energy())?.entropy)
}

/// Explicit upper bound on `F` for an oscillator, `E >= E_0`.
pub fn f_osc(osc: &Oscillator, energy: f64) -> Result<f64> {
    let e0 = osc.ground_energy();
    if energy.is_nan() || energy < e0 {
        return Err(Error::domain("energy lies below the ground energy"));
    }
    let l = osc.mode_count() as f64;
    Ok(l * ((energy + e0) / (l * osc.geometric_mean())).ln() + l)
}

/// Concave bound on `f_bar` for an oscillator, `E >= 0`.
pub fn f_osc_bar(osc: &Oscillator, energy: f64) -> Result<f64> {
    if energy.is_nan() || energy < 0.0 {
        return Err(Error::domain("shifted energy must be nonnegative"));
    }
    let l = osc.mode_count() as f64;
    Ok(l * ((energy + 2.0 * osc.ground_energy()) / (l * osc.geometric_mean())).ln() + l)
}

/// Smallest majorant of `f_bar` with `E -> F(E)/sqrt(E)` nonincreasing:
/// `sqrt(E) sup_{E' >= E} f_bar(E')/sqrt(E')`.
pub fn f_hat_star(model: &SpectrumModel, energy: f64) -> Result<f64> {
    f_hat_star_with_ceiling(model, energy, ENVELOPE_CEILING)
}

fn f_hat_star_with_ceiling(model: &SpectrumModel, energy: f64, ceiling: f64) -> Result<f64> {
    if energy.is_nan() || energy < 0.0 {
        return Err(Error::domain("shifted energy must be nonnegative"));
    }
    if energy == 0.0 {
        return f_bar(model, 0.0);
    }
    let h = |x: f64| f_bar(model, x).map(|f| f / x.sqrt());
    let mut xs = vec![energy];
    let mut hs = vec![h(energy)?];
    let mut decreases = 0;
    while decreases < ENVELOPE_TURNOVER {
        let x = 2.0 * xs.last().unwrap();
        if x > ceiling {
            return Err(Error::precision(format!(
                "envelope scan passed {ceiling} without turning over"
            )));
        }
        let v = h(x)?;
        decreases = if v < *hs.last().unwrap() { decreases + 1 } else { 0 };
        xs.push(x);
        hs.push(v);
    }
    let (k, &best) = hs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let a = xs[k.saturating_sub(1)];
    let b = xs[(k + 1).min(xs.len() - 1)];
    let mut err = None;
    let (_, neg) = golden_min(
        |x| match h(x) {
            Ok(v) => -v,
            Err(e) => {
                err.get_or_insert(e);
                f64::INFINITY
            }
        },
        a,
        b,
        1e-10,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(energy.sqrt() * best.max(-neg))
}

/// The envelope `F_hat` entering the continuity bounds.
#[derive(Debug, Clone)]
pub enum FHatFunction {
    /// The minimal envelope of `f_bar` for an arbitrary spectrum.
    Star(SpectrumModel),
    /// The closed-form oscillator envelope `f_osc_bar`.
    OscillatorBar(Oscillator),
}

impl FHatFunction {
    pub fn eval(&self, energy: f64) -> Result<f64> {
        match self {
            FHatFunction::Star(model) => f_hat_star(model, energy),
            FHatFunction::OscillatorBar(osc) => f_osc_bar(osc, energy),
        }
    }

    /// Least `E` with `F_hat(E) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        f_hat_inverse(self, y)
    }
}

/// Inverse of an envelope: the unique `E >= 0` with `F_hat(E) = y`.
pub fn f_hat_inverse(fhat: &FHatFunction, y: f64) -> Result<f64> {
    let y0 = fhat.eval(0.0)?;
    if y.is_nan() || y < y0 {
        return Err(Error::domain(format!("{y} lies below the envelope minimum {y0}")));
    }
    if y == y0 {
        return Ok(0.0);
    }
    if let FHatFunction::OscillatorBar(osc) = fhat {
        let l = osc.mode_count() as f64;
        let e = l * osc.geometric_mean() * (y / l - 1.0).exp() - 2.0 * osc.ground_energy();
        return Ok(e.max(0.0));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while fhat.eval(hi)? < y {
        lo = hi;
        hi *= 2.0;
        if hi > ENVELOPE_CEILING {
            return Err(Error::precision("envelope inverse exceeds the energy ceiling"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = fhat.eval(mid)?;
        if (v - y).abs() <= 1e-13 * y.abs().max(1.0) {
            return Ok(mid);
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Least integer `d` with `ln d > F_hat(0)`.
pub fn d_zero(fhat: &FHatFunction) -> Result<u64> {
    let y = fhat.eval(0.0)?;
    if !(y.is_finite() && y >= 0.0 && y < 40.0) {
        return Err(Error::domain(format!("envelope value {y} at zero is out of range")));
    }
    let mut d = y.exp().floor() as u64 + 1;
    while d > 1 && ((d - 1) as f64).ln() > y {
        d -= 1;
    }
    while (d as f64).ln() <= y {
        d += 1;
    }
    Ok(d)
}
