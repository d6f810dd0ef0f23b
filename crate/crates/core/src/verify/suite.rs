//! Randomised inequality suites. Each trial draws states, channels or
//! ensembles from a generator keyed by `(seed, suite, trial)` and records
//! checks of the form `lhs <= rhs`.
//!
//! The constrained system is the one-mode oscillator truncated to its first
//! `d` levels. Such states are finite-energy states of the full oscillator, so
//! the oscillator bounds apply to them unchanged.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::channel::{channel_ci, channel_mi, holevo, privacy, DiscreteEnsemble, KrausChannel};
use super::random::{
    energy_cap_ensemble, energy_cap_first, normalise, perturb, random_channel_with, random_ensemble_with,
    random_measure_prepare_with, random_rank, random_schur_with, random_state_with, rng_for,
};
use super::state::{cmi, cond_entropy, entropy, partial_trace, qcmi, trace_distance, DensityMatrix};
use super::transport::{d0_distance, kantorovich};
use crate::bounds::{afw_finite, audenaert, cb_osc_opt, h2, BoundParams, QuantityPreset};
use crate::error::{Error, Result};
use crate::spectrum::Oscillator;
use crate::special::eta;

/// Additive tolerance before a check counts as violated.
pub const SLACK: f64 = 1e-8;
/// Tolerance for the metric axioms of the ensemble distances.
pub const METRIC_SLACK: f64 = 1e-9;
/// Checks with a right-hand side at or below this do not enter `max_ratio`.
pub const RATIO_FLOOR: f64 = 1e-6;
/// Trials whose distance falls below this are skipped.
pub const MIN_EPS: f64 = 1e-12;
/// Largest supported dimension of the energy-constrained system.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Mixing,
    Audenaert,
    AfwFinite,
    EnergyBounds,
    ChannelCmi,
    ChannelInfo,
    Affinity,
    MiCiRange,
    Holevo,
    Privacy,
    CmiUpper,
    CmiMonotone,
    Ssa,
    Metric,
    /// Deliberately false inequality, used to exercise the failure path.
    Injected,
}

impl Suite {
    /// Every genuine suite; excludes [`Suite::Injected`].
    pub const ALL: [Suite; 14] = [
        Suite::Mixing,
        Suite::Audenaert,
        Suite::AfwFinite,
        Suite::EnergyBounds,
        Suite::ChannelCmi,
        Suite::ChannelInfo,
        Suite::Affinity,
        Suite::MiCiRange,
        Suite::Holevo,
        Suite::Privacy,
        Suite::CmiUpper,
        Suite::CmiMonotone,
        Suite::Ssa,
        Suite::Metric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Mixing => "mixing",
            Suite::Audenaert => "audenaert",
            Suite::AfwFinite => "afw_finite",
            Suite::EnergyBounds => "energy_bounds",
            Suite::ChannelCmi => "channel_cmi",
            Suite::ChannelInfo => "channel_info",
            Suite::Affinity => "affinity",
            Suite::MiCiRange => "mi_ci_range",
            Suite::Holevo => "holevo",
            Suite::Privacy => "privacy",
            Suite::CmiUpper => "cmi_upper",
            Suite::CmiMonotone => "cmi_monotone",
            Suite::Ssa => "ssa",
            Suite::Metric => "metric",
            Suite::Injected => "injected",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap_or(Suite::ALL.len()) as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Suite::ALL
            .iter()
            .chain([&Suite::Injected])
            .find(|x| x.name() == key)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    /// Dimension of the energy-constrained system `A`.
    pub dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 1000, seed: 0, dim: 32 }
    }
}

/// Outcome of one suite. `violations` counts failed checks; `max_ratio` is the
/// largest `lhs / rhs` over checks with `rhs > RATIO_FLOOR` (zero if there
/// were none).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: u64,
    pub violations: u64,
    pub max_ratio: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Check {
    lhs: f64,
    rhs: f64,
    slack: f64,
}

fn le(lhs: f64, rhs: f64) -> Check {
    Check { lhs, rhs, slack: SLACK }
}

fn le_tight(lhs: f64, rhs: f64) -> Check {
    Check { lhs, rhs, slack: METRIC_SLACK }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if !(2..=MAX_DIM).contains(&cfg.dim) {
        return Err(Error::domain(format!("dimension must lie in 2..={MAX_DIM}")));
    }
    let stream_seed = cfg.seed ^ (suite.index() + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let ctx = Ctx::new(cfg.dim)?;
    let checks = (0..cfg.trials)
        .into_par_iter()
        .map(|i| ctx.trial(suite, &mut rng_for(stream_seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for c in checks.iter().flatten() {
        if !(c.lhs <= c.rhs + c.slack) {
            violations += 1;
        }
        if c.rhs > RATIO_FLOOR {
            max_ratio = max_ratio.max(c.lhs / c.rhs);
        }
    }
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        trials: cfg.trials,
        violations,
        max_ratio,
        seed: cfg.seed,
    })
}

/// Runs every suite in [`Suite::ALL`].
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    Suite::ALL.iter().map(|s| run_suite(*s, cfg)).collect()
}

#[derive(Debug, Clone, Copy)]
enum ChannelKind {
    Generic,
    Antidegradable,
    Degradable,
}

struct Ctx {
    d: usize,
    levels: Vec<f64>,
    osc: Oscillator,
}

impl Ctx {
    fn new(d: usize) -> Result<Self> {
        Ok(Ctx {
            d,
            levels: (0..d).map(|k| k as f64 + 0.5).collect(),
            osc: Oscillator::new(vec![1.0])?,
        })
    }

    fn e0(&self) -> f64 {
        self.levels[0]
    }

    /// Energy cap with `E - E0` log-uniform in `[1e-3, d/2]`.
    fn energy_target<R: Rng>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = (1e-3f64.ln(), (self.d as f64 / 2.0).ln());
        self.e0() + rng.gen_range(lo..hi).exp()
    }

    fn mix_weight<R: Rng>(rng: &mut R) -> f64 {
        if rng.gen_bool(0.2) {
            1.0
        } else {
            10f64.powf(rng.gen_range(-4.0..0.0))
        }
    }

    fn state<R: Rng>(&self, dims: &[usize], e_max: f64, rng: &mut R) -> Result<DensityMatrix> {
        let n: usize = dims.iter().product();
        let rho = random_state_with(n, random_rank(n, rng), rng)?;
        energy_cap_first(&rho, dims, &self.levels, e_max)
    }

    /// Two states whose factor-0 energies share a random cap, the second a
    /// random convex perturbation of the first.
    fn pair<R: Rng>(&self, dims: &[usize], rng: &mut R) -> Result<(DensityMatrix, DensityMatrix)> {
        let e_max = self.energy_target(rng);
        let rho = self.state(dims, e_max, rng)?;
        let pi = self.state(dims, e_max, rng)?;
        let sigma = perturb(&rho, Self::mix_weight(rng), &pi)?;
        Ok((rho, sigma))
    }

    fn a_energy(&self, rho: &DensityMatrix, dims: &[usize]) -> Result<f64> {
        if dims.len() == 1 {
            rho.energy(&self.levels)
        } else {
            partial_trace(rho, dims, &[0])?.energy(&self.levels)
        }
    }

    fn pair_energy(&self, rho: &DensityMatrix, sigma: &DensityMatrix, dims: &[usize]) -> Result<f64> {
        Ok(self.a_energy(rho, dims)?.max(self.a_energy(sigma, dims)?))
    }

    /// Optimised oscillator bound, or `None` when `eps` is negligible.
    fn bound(&self, preset: QuantityPreset, energy: f64, eps: f64) -> Result<Option<f64>> {
        if eps < MIN_EPS {
            return Ok(None);
        }
        let params = BoundParams::from_preset(preset, BoundParams::oscillator_delta(1))?;
        let energy = energy.max(self.e0() + 1e-9);
        Ok(Some(cb_osc_opt(&self.osc, energy, eps.min(1.0), &params)?.1))
    }

    fn channel<R: Rng>(&self, kind: ChannelKind, rng: &mut R) -> Result<KrausChannel> {
        match kind {
            ChannelKind::Generic => random_channel_with(self.d, 4, self.d.div_ceil(4), rng),
            ChannelKind::Antidegradable => random_measure_prepare_with(self.d, 4, rng.gen_range(1..=2), rng),
            ChannelKind::Degradable => random_schur_with(self.d, rng.gen_range(2..=4), rng),
        }
    }

    fn channel_kind<R: Rng>(rng: &mut R) -> ChannelKind {
        [ChannelKind::Generic, ChannelKind::Antidegradable, ChannelKind::Degradable][rng.gen_range(0..3)]
    }

    /// A capped ensemble and a perturbed, possibly reordered or extended copy
    /// under the same average-energy cap.
    fn ensembles<R: Rng>(&self, dim: usize, rng: &mut R) -> Result<(DiscreteEnsemble, DiscreteEnsemble, f64)> {
        let levels = &self.levels[..dim];
        let e_max = self.energy_target(rng).min(levels[dim - 1]);
        let n = rng.gen_range(1..=5);
        let mu = energy_cap_ensemble(&random_ensemble_with(dim, n, rng)?, levels, e_max)?;
        let e = Self::mix_weight(rng);
        let mut pairs: Vec<(f64, DensityMatrix)> = Vec::with_capacity(n + 1);
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let r = normalise(&raw);
        let w = e * rng.gen::<f64>();
        for i in 0..n {
            let pi = random_state_with(dim, random_rank(dim, rng), rng)?;
            let s = perturb(&mu.states()[i], e, &pi)?;
            pairs.push(((1.0 - w) * mu.probs()[i] + w * r[i], s));
        }
        if rng.gen_bool(0.3) {
            pairs.shuffle(rng);
        }
        if rng.gen_bool(0.3) {
            let extra = e * rng.gen::<f64>();
            for p in pairs.iter_mut() {
                p.0 *= 1.0 - extra;
            }
            pairs.push((extra, random_state_with(dim, random_rank(dim, rng), rng)?));
        }
        let (q, s): (Vec<f64>, Vec<DensityMatrix>) = pairs.into_iter().unzip();
        let nu = energy_cap_ensemble(&DiscreteEnsemble::new(normalise(&q), s)?, levels, e_max)?;
        let energy = mu.average_energy(levels)?.max(nu.average_energy(levels)?);
        Ok((mu, nu, energy))
    }

    fn trial<R: Rng>(&self, suite: Suite, rng: &mut R) -> Result<Vec<Check>> {
        let d = self.d;
        let mut out = Vec::new();
        match suite {
            Suite::Mixing => {
                let rho = random_state_with(d, random_rank(d, rng), rng)?;
                let sigma = random_state_with(d, random_rank(d, rng), rng)?;
                let p = rng.gen::<f64>();
                let defect = entropy(&rho.mix(p, &sigma)?) - p * entropy(&rho) - (1.0 - p) * entropy(&sigma);
                out.push(le(-defect, 0.0));
                out.push(le(defect, h2(p)));
            }
            Suite::Audenaert => {
                let (rho, sigma) = self.pair(&[d], rng)?;
                let eps = trace_distance(&rho, &sigma)?;
                if eps > 0.0 && eps <= 1.0 - 1.0 / d as f64 {
                    out.push(le((entropy(&rho) - entropy(&sigma)).abs(), audenaert(d as u64, eps)?));
                }
            }
            Suite::AfwFinite | Suite::EnergyBounds => {
                let qcmi_dims: &[usize] = if suite == Suite::EnergyBounds { &[d, 2, 2, 2] } else { &[d, 2, 2] };
                let cases: [(QuantityPreset, &[usize]); 3] = [
                    (QuantityPreset::Entropy, &[d]),
                    (QuantityPreset::CondEntropy, &[d, 2]),
                    (QuantityPreset::Qcmi, qcmi_dims),
                ];
                for (preset, dims) in cases {
                    let (rho, sigma) = self.pair(dims, rng)?;
                    let f = |s: &DensityMatrix| -> Result<f64> {
                        match preset {
                            QuantityPreset::Entropy => Ok(entropy(s)),
                            QuantityPreset::CondEntropy => cond_entropy(s, [d, 2]),
                            _ => cmi(s, dims, &[0], &[1], &[2]),
                        }
                    };
                    let diff = (f(&rho)? - f(&sigma)?).abs();
                    let eps = trace_distance(&rho, &sigma)?;
                    let rhs = if suite == Suite::EnergyBounds {
                        self.bound(preset, self.pair_energy(&rho, &sigma, dims)?, eps)?
                    } else {
                        let params = BoundParams::from_preset(preset, BoundParams::generic_delta(2))?;
                        Some(afw_finite(d as u64, eps, &params)?)
                    };
                    if let Some(rhs) = rhs {
                        out.push(le(diff, rhs));
                    }
                }
            }
            Suite::ChannelCmi => {
                let dims = [d, 2, 2];
                let (rho, sigma) = self.pair(&dims, rng)?;
                let ch = self.channel(ChannelKind::Generic, rng)?;
                let f = |s: &DensityMatrix| -> Result<f64> {
                    let out = ch.apply_on_first(s, 4)?;
                    cmi(&out, &[ch.out_dim(), 2, 2], &[0], &[2], &[1])
                };
                let diff = (f(&rho)? - f(&sigma)?).abs();
                let eps = trace_distance(&rho, &sigma)?;
                if let Some(rhs) = self.bound(QuantityPreset::Qcmi, self.pair_energy(&rho, &sigma, &dims)?, eps)? {
                    out.push(le(diff, rhs));
                }
            }
            Suite::ChannelInfo => {
                let kind = Self::channel_kind(rng);
                let ch = self.channel(kind, rng)?;
                let (rho, sigma) = self.pair(&[d], rng)?;
                let eps = trace_distance(&rho, &sigma)?;
                let energy = self.pair_energy(&rho, &sigma, &[d])?;
                let (mi_preset, ci_preset) = match kind {
                    ChannelKind::Generic => (QuantityPreset::ChannelMi, QuantityPreset::ChannelCi),
                    ChannelKind::Antidegradable => (QuantityPreset::ChannelMiAntideg, QuantityPreset::ChannelMiAntideg),
                    ChannelKind::Degradable => (QuantityPreset::ChannelMi, QuantityPreset::ChannelCiDeg),
                };
                let mi = (channel_mi(&ch, &rho)? - channel_mi(&ch, &sigma)?).abs();
                let ci = (channel_ci(&ch, &rho)? - channel_ci(&ch, &sigma)?).abs();
                if let Some(rhs) = self.bound(mi_preset, energy, eps)? {
                    out.push(le(mi, rhs));
                }
                if let Some(rhs) = self.bound(ci_preset, energy, eps)? {
                    out.push(le(ci, rhs));
                }
            }
            Suite::Affinity => {
                let ch = self.channel(Self::channel_kind(rng), rng)?;
                let rho = random_state_with(d, random_rank(d, rng), rng)?;
                let sigma = random_state_with(d, random_rank(d, rng), rng)?;
                let p = rng.gen::<f64>();
                let mix = rho.mix(p, &sigma)?;
                let defect = |f: &dyn Fn(&DensityMatrix) -> Result<f64>| -> Result<f64> {
                    Ok(f(&mix)? - p * f(&rho)? - (1.0 - p) * f(&sigma)?)
                };
                let mi = defect(&|s| channel_mi(&ch, s))?;
                let ci = defect(&|s| channel_ci(&ch, s))?;
                out.push(le(-mi, 0.0));
                out.push(le(mi, 2.0 * h2(p)));
                out.push(le(-ci, h2(p)));
                out.push(le(ci, h2(p)));
            }
            Suite::MiCiRange => {
                let kind = Self::channel_kind(rng);
                let ch = self.channel(kind, rng)?;
                let rho = random_state_with(d, random_rank(d, rng), rng)?;
                let h = entropy(&rho);
                let mi = channel_mi(&ch, &rho)?;
                let ci = channel_ci(&ch, &rho)?;
                out.push(le(-mi, 0.0));
                out.push(le(mi, 2.0 * h));
                out.push(le(-ci, h));
                out.push(le(ci, h));
                match kind {
                    ChannelKind::Antidegradable => {
                        out.push(le(mi, h));
                        out.push(le(ci, 0.0));
                    }
                    ChannelKind::Degradable => out.push(le(-ci, 0.0)),
                    ChannelKind::Generic => {}
                }
            }
            Suite::Holevo | Suite::Privacy => {
                let kind = if suite == Suite::Holevo { ChannelKind::Generic } else { Self::channel_kind(rng) };
                let ch = self.channel(kind, rng)?;
                let (mu, nu, energy) = self.ensembles(d, rng)?;
                let (preset, f): (QuantityPreset, fn(&KrausChannel, &DiscreteEnsemble) -> Result<f64>) =
                    match (suite, kind) {
                        (Suite::Holevo, _) => (QuantityPreset::Holevo, holevo),
                        (_, ChannelKind::Generic) => (QuantityPreset::Privacy, privacy),
                        _ => (QuantityPreset::PrivacyDegOrAntideg, privacy),
                    };
                let (fm, fn_) = (f(&ch, &mu)?, f(&ch, &nu)?);
                let diff = (fm - fn_).abs();
                for eps in [d0_distance(&mu, &nu)?, kantorovich(&mu, &nu)?] {
                    if let Some(rhs) = self.bound(preset, energy, eps)? {
                        out.push(le(diff, rhs));
                    }
                }
                match (suite, kind) {
                    (Suite::Privacy, ChannelKind::Degradable) => out.extend([le(-fm, 0.0), le(-fn_, 0.0)]),
                    (Suite::Privacy, ChannelKind::Antidegradable) => out.extend([le(fm, 0.0), le(fn_, 0.0)]),
                    _ => {}
                }
            }
            Suite::CmiUpper => {
                let dims = [d, 2, 2];
                let rho = random_state_with(4 * d, random_rank(4 * d, rng), rng)?;
                let i = qcmi(&rho, dims)?;
                let h = |keep: &[usize]| -> Result<f64> { Ok(entropy(&partial_trace(&rho, &dims, keep)?)) };
                let m = h(&[0])?.min(h(&[1])?).min(h(&[0, 2])?).min(h(&[1, 2])?);
                out.push(le(i, 2.0 * m));
            }
            Suite::CmiMonotone => {
                let dims = [d, 2, 2, 2];
                let rho = random_state_with(8 * d, random_rank(8 * d, rng), rng)?;
                let small = cmi(&rho, &dims, &[0], &[1], &[2])?;
                let large = cmi(&rho, &dims, &[0, 3], &[1], &[2])?;
                out.push(le(small, large));
            }
            Suite::Ssa => {
                let rho = random_state_with(4 * d, random_rank(4 * d, rng), rng)?;
                out.push(le(-qcmi(&rho, [d, 2, 2])?, 0.0));
            }
            Suite::Metric => {
                let dim = d.min(4);
                let (mu, nu, _) = self.ensembles(dim, rng)?;
                let kappa = if rng.gen_bool(0.5) {
                    self.ensembles(dim, rng)?.0
                } else {
                    random_ensemble_with(dim, rng.gen_range(1..=5), rng)?
                };
                let dists: [fn(&DiscreteEnsemble, &DiscreteEnsemble) -> Result<f64>; 2] = [d0_distance, kantorovich];
                for dist in dists {
                    let (mn, nm) = (dist(&mu, &nu)?, dist(&nu, &mu)?);
                    out.push(le_tight((mn - nm).abs(), 0.0));
                    out.push(le_tight(dist(&mu, &mu)?, 0.0));
                    out.push(le_tight(-mn, 0.0));
                    out.push(le_tight(dist(&mu, &kappa)?, mn + dist(&nu, &kappa)?));
                }
            }
            Suite::Injected => {
                let rho = random_state_with(d, random_rank(d, rng).max(2), rng)?;
                let h = entropy(&rho);
                out.push(le(h, 0.5 * h));
            }
        }
        Ok(out)
    }
}

/// One row of the tightness report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    pub delta: f64,
    pub eps: f64,
    pub entropy_gap: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Energy of the one-mode Gibbs state used by [`tightness_report`].
pub const TIGHTNESS_ENERGY: f64 = 100.0;
/// Levels kept in the truncated Gibbs state.
pub const TIGHTNESS_LEVELS: usize = 4000;

/// Compares the entropy gap between the truncated one-mode Gibbs state `gamma`
/// at energy 100 and `(1 - delta) gamma + delta |0><0|` with the optimised
/// entropy bound. Both states are diagonal and handled as distributions.
pub fn tightness_report() -> Result<Vec<TightnessRow>> {
    let osc = Oscillator::new(vec![1.0])?;
    let e0 = osc.ground_energy();
    let q = (TIGHTNESS_ENERGY - e0) / (TIGHTNESS_ENERGY + e0);
    let raw: Vec<f64> = (0..TIGHTNESS_LEVELS).map(|k| q.powi(k as i32)).collect();
    let gamma = normalise(&raw);
    let energy = |p: &[f64]| p.iter().enumerate().map(|(k, x)| x * (k as f64 + e0)).sum::<f64>();
    let h = |p: &[f64]| p.iter().map(|x| eta(*x)).sum::<f64>();
    let params = BoundParams::from_preset(QuantityPreset::Entropy, BoundParams::oscillator_delta(1))?;
    [1.0, 0.1, 0.01, 0.001]
        .into_iter()
        .map(|delta| {
            let mut p: Vec<f64> = gamma.iter().map(|x| (1.0 - delta) * x).collect();
            p[0] += delta;
            let eps = 0.5 * gamma.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum::<f64>();
            let gap = (h(&gamma) - h(&p)).abs();
            let e = energy(&gamma).max(energy(&p));
            let bound = cb_osc_opt(&osc, e, eps, &params)?.1;
            Ok(TightnessRow {
                delta,
                eps,
                entropy_gap: gap,
                bound,
                ratio: gap / bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(suite: Suite) -> SuiteReport {
        run_suite(suite, &SuiteConfig { trials: 12, seed: 7, dim: 8 }).unwrap()
    }

    #[test]
    fn names_roundtrip() {
        for s in Suite::ALL.iter().chain([&Suite::Injected]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!("CMI-UPPER".parse::<Suite>().unwrap(), Suite::CmiUpper);
    }

    #[test]
    fn small_suites_hold() {
        for s in Suite::ALL {
            let r = quick(s);
            assert_eq!(r.violations, 0, "{r:?}");
            assert!(r.max_ratio <= 1.0 + 1e-6, "{r:?}");
        }
    }

    #[test]
    fn bound_suites_have_positive_ratio() {
        for s in [Suite::EnergyBounds, Suite::ChannelInfo, Suite::Holevo, Suite::Audenaert, Suite::AfwFinite] {
            assert!(quick(s).max_ratio > 0.0, "{s}");
        }
    }

    #[test]
    fn injected_suite_fails() {
        assert!(quick(Suite::Injected).violations > 0);
    }

    #[test]
    fn reproducible() {
        assert_eq!(quick(Suite::Privacy), quick(Suite::Privacy));
    }

    #[test]
    fn empty_and_invalid_configs() {
        let r = run_suite(Suite::Mixing, &SuiteConfig { trials: 0, seed: 1, dim: 8 }).unwrap();
        assert_eq!((r.trials, r.violations, r.max_ratio), (0, 0, 0.0));
        assert!(run_suite(Suite::Mixing, &SuiteConfig { trials: 1, seed: 1, dim: 1 }).is_err());
        assert!(run_suite(Suite::Mixing, &SuiteConfig { trials: 1, seed: 1, dim: 65 }).is_err());
    }

    #[test]
    fn tightness_ratios_in_unit_interval() {
        let rows = tightness_report().unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.ratio > 0.0 && r.ratio <= 1.0, "{r:?}");
        }
    }
}
