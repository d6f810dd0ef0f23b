//! Hamiltonians described by their eigenvalue sequences.
//!
//! Two shapes are supported: the multi-mode harmonic oscillator, whose levels are
//! `sum_i hw_i (n_i - 1/2)` with every `n_i >= 1`, and an explicit sorted list of
//! eigenvalues that is known to be complete below some energy.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::path::Path;

use crate::error::{Error, Result};

/// Largest number of levels `oscillator_levels` will materialise.
pub const LEVEL_ENUMERATION_CAP: usize = 1_000_000;

/// Relative slack used when comparing a level value against a threshold.
const LEVEL_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Oscillator {
    energies: Vec<f64>,
}

impl Oscillator {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::validation("oscillator needs at least one mode"));
        }
        if let Some(w) = energies.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::validation(format!(
                "mode energies must be positive and finite, got {w}"
            )));
        }
        Ok(Self { energies })
    }

    /// Mode energies `hw_i`, in the order supplied.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn mode_count(&self) -> usize {
        self.energies.len()
    }

    /// `E_0 = (1/2) sum_i hw_i`.
    pub fn ground_energy(&self) -> f64 {
        0.5 * self.energies.iter().sum::<f64>()
    }

    /// Geometric mean `E_* = (prod_i hw_i)^(1/l)`.
    pub fn geometric_mean(&self) -> f64 {
        let l = self.energies.len() as f64;
        (self.energies.iter().map(|w| w.ln()).sum::<f64>() / l).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitSpectrum {
    levels: Vec<f64>,
    complete_below: f64,
}

impl ExplicitSpectrum {
    /// `complete_below = f64::INFINITY` declares the list to be the whole spectrum.
    pub fn new(levels: Vec<f64>, complete_below: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::validation("explicit spectrum is empty"));
        }
        if complete_below.is_nan() {
            return Err(Error::validation("complete_below is NaN"));
        }
        if !(levels[0].is_finite() && levels[0] >= 0.0) {
            return Err(Error::validation(format!(
                "lowest level must be a nonnegative number, got {}",
                levels[0]
            )));
        }
        for (i, pair) in levels.windows(2).enumerate() {
            if !pair[1].is_finite() || pair[1] < pair[0] {
                return Err(Error::validation(format!(
                    "levels must be nondecreasing: level {} = {} follows {}",
                    i + 1,
                    pair[1],
                    pair[0]
                )));
            }
        }
        let last = *levels.last().unwrap();
        if last > complete_below {
            return Err(Error::validation(format!(
                "last level {last} exceeds complete_below {complete_below}"
            )));
        }
        Ok(Self {
            levels,
            complete_below,
        })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn complete_below(&self) -> f64 {
        self.complete_below
    }

    /// True when the list is the entire (finite) spectrum.
    pub fn is_complete(&self) -> bool {
        self.complete_below == f64::INFINITY
    }
}

/// A positive Hamiltonian given through its eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumModel {
    Oscillator(Oscillator),
    Explicit(ExplicitSpectrum),
}

impl SpectrumModel {
    pub fn oscillator(energies: Vec<f64>) -> Result<Self> {
        Oscillator::new(energies).map(SpectrumModel::Oscillator)
    }

    pub fn explicit(levels: Vec<f64>, complete_below: f64) -> Result<Self> {
        ExplicitSpectrum::new(levels, complete_below).map(SpectrumModel::Explicit)
    }

    /// Parses the text format: a `# complete_below=<value>` header followed by one
    /// eigenvalue per line. Blank lines and further `#` comments are ignored.
    pub fn parse_explicit(text: &str) -> Result<Self> {
        let mut complete_below = None;
        let mut levels = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("complete_below=") {
                    let v: f64 = value.trim().parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad complete_below value", lineno + 1))
                    })?;
                    complete_below = Some(v);
                }
                continue;
            }
            if complete_below.is_none() {
                return Err(Error::Parse(
                    "missing `# complete_below=<value>` header before the first level".into(),
                ));
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: `{line}` is not a number", lineno + 1)))?;
            levels.push(v);
        }
        let complete_below = complete_below
            .ok_or_else(|| Error::Parse("missing `# complete_below=<value>` header".into()))?;
        Self::explicit(levels, complete_below)
    }

    pub fn load_explicit(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_explicit(&text)
    }

    /// Minimal eigenvalue `E_0`.
    pub fn ground_energy(&self) -> f64 {
        match self {
            SpectrumModel::Oscillator(o) => o.ground_energy(),
            SpectrumModel::Explicit(x) => x.levels[0],
        }
    }

    /// Multiplicity `m(E_0)` of the ground level.
    pub fn ground_multiplicity(&self) -> usize {
        match self {
            SpectrumModel::Oscillator(_) => 1,
            SpectrumModel::Explicit(x) => x.levels.iter().take_while(|&&e| e == x.levels[0]).count(),
        }
    }

    pub fn as_oscillator(&self) -> Option<&Oscillator> {
        match self {
            SpectrumModel::Oscillator(o) => Some(o),
            SpectrumModel::Explicit(_) => None,
        }
    }
}

#[derive(PartialEq)]
struct Level(f64);

impl Eq for Level {}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn check_energies(energies: &[f64]) -> Result<()> {
    Oscillator::new(energies.to_vec()).map(|_| ())
}

/// The `m` smallest oscillator levels with multiplicity, nondecreasing.
pub fn oscillator_levels(energies: &[f64], m: usize) -> Result<Vec<f64>> {
    oscillator_levels_capped(energies, m, LEVEL_ENUMERATION_CAP)
}

/// As [`oscillator_levels`] with an explicit cap on the output length.
pub fn oscillator_levels_capped(energies: &[f64], m: usize, cap: usize) -> Result<Vec<f64>> {
    check_energies(energies)?;
    if m == 0 {
        return Err(Error::domain("level count must be positive"));
    }
    if m > cap {
        return Err(Error::resource(format!(
            "{m} levels exceed the enumeration cap {cap}; use nth_level"
        )));
    }
    if let [w] = energies {
        return Ok((0..m).map(|k| (k as f64 + 0.5) * w).collect());
    }

    // Each occupation vector is generated exactly once: from a vector whose last
    // raised mode is `j`, only modes `>= j` may be raised further.
    let ground: f64 = 0.5 * energies.iter().sum::<f64>();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Level(ground), 0usize, vec![1u32; energies.len()])));
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let Reverse((Level(e), last, occ)) = heap.pop().expect("oscillator heap never drains");
        out.push(e);
        for (i, w) in energies.iter().enumerate().skip(last) {
            let mut next = occ.clone();
            next[i] += 1;
            let value: f64 = energies
                .iter()
                .zip(&next)
                .map(|(w, &n)| w * (n as f64 - 0.5))
                .sum();
            debug_assert!(value > e - 1e-12 * w);
            heap.push(Reverse((Level(value), i, next)));
        }
    }
    Ok(out)
}

fn sorted_desc(energies: &[f64]) -> Vec<f64> {
    let mut v = energies.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn count_rec(modes: &[f64], budget: f64) -> u64 {
    let (w, rest) = modes.split_first().expect("at least one mode");
    if rest.is_empty() {
        if budget < 0.5 * w {
            return 0;
        }
        return (budget / w + 0.5).floor() as u64;
    }
    let rest_floor: f64 = 0.5 * rest.iter().sum::<f64>();
    let mut total = 0u64;
    let mut n = 1u64;
    loop {
        let remaining = budget - w * (n as f64 - 0.5);
        if remaining < rest_floor {
            break;
        }
        total = total.saturating_add(count_rec(rest, remaining));
        n += 1;
    }
    total
}

fn max_level_rec(modes: &[f64], budget: f64) -> Option<f64> {
    let (w, rest) = modes.split_first().expect("at least one mode");
    if rest.is_empty() {
        if budget < 0.5 * w {
            return None;
        }
        let n = (budget / w + 0.5).floor();
        return Some(w * (n - 0.5));
    }
    let rest_floor: f64 = 0.5 * rest.iter().sum::<f64>();
    let mut best: Option<f64> = None;
    let mut n = 1u64;
    loop {
        let used = w * (n as f64 - 0.5);
        let remaining = budget - used;
        if remaining < rest_floor {
            break;
        }
        if let Some(v) = max_level_rec(rest, remaining) {
            let v = used + v;
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
        n += 1;
    }
    best
}

fn with_slack(x: f64) -> f64 {
    x + LEVEL_RTOL * x.abs().max(1.0)
}

/// Number of oscillator levels (with multiplicity) not exceeding `x`.
pub fn count_levels(energies: &[f64], x: f64) -> Result<u64> {
    check_energies(energies)?;
    if x.is_nan() {
        return Err(Error::domain("threshold is NaN"));
    }
    Ok(count_rec(&sorted_desc(energies), with_slack(x)))
}

/// Largest oscillator level not exceeding `x`, if any.
fn max_level_at_most(modes_desc: &[f64], x: f64) -> Option<f64> {
    max_level_rec(modes_desc, with_slack(x))
}

/// The `(k+1)`-th smallest eigenvalue `E_k` (0-indexed, with multiplicity).
pub fn nth_level(model: &SpectrumModel, k: u64) -> Result<f64> {
    match model {
        SpectrumModel::Explicit(x) => x.levels.get(k as usize).copied().ok_or_else(|| {
            Error::domain(format!(
                "level index {k} out of range for {} listed levels",
                x.levels.len()
            ))
        }),
        SpectrumModel::Oscillator(o) => {
            let energies = o.energies();
            if let [w] = energies {
                return Ok((k as f64 + 0.5) * w);
            }
            let e0 = o.ground_energy();
            if k == 0 {
                return Ok(e0);
            }
            let modes = sorted_desc(energies);
            let target = k + 1;
            let mut lo = e0;
            let mut hi = 2.0 * e0;
            while count_rec(&modes, with_slack(hi)) < target {
                lo = hi;
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(Error::resource(format!("level index {k} is not representable")));
                }
            }
            for _ in 0..200 {
                if hi - lo <= 4.0 * LEVEL_RTOL * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if count_rec(&modes, with_slack(mid)) >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            max_level_at_most(&modes, hi)
                .ok_or_else(|| Error::precision(format!("failed to locate level {k}")))
        }
    }
}

/// All eigenvalues not exceeding `x`, nondecreasing, refusing incomplete data.
pub fn levels_up_to(model: &SpectrumModel, x: f64) -> Result<Vec<f64>> {
    match model {
        SpectrumModel::Explicit(s) => {
            if x > s.complete_below {
                return Err(Error::domain(format!(
                    "explicit spectrum is only complete below {}, requested levels up to {x}",
                    s.complete_below
                )));
            }
            let lim = with_slack(x);
            Ok(s.levels.iter().copied().take_while(|&e| e <= lim).collect())
        }
        SpectrumModel::Oscillator(o) => {
            let n = count_levels(o.energies(), x)?;
            if n == 0 {
                return Ok(Vec::new());
            }
            oscillator_levels(o.energies(), n as usize)
        }
    }
}

/// Pair sums `N_up = sum E_k^2` and `N_down = sum E_k E_j` over ordered pairs
/// `(k, j)` with `E_k + E_j <= E`.
pub fn bd_sums(model: &SpectrumModel, energy: f64) -> Result<(f64, f64)> {
    let e0 = model.ground_energy();
    if !(energy > e0) {
        return Err(Error::domain(format!(
            "pair sums need E > E_0 = {e0}, got {energy}"
        )));
    }
    let levels = levels_up_to(model, energy - e0)?;
    let mut prefix = Vec::with_capacity(levels.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for e in &levels {
        acc += e;
        prefix.push(acc);
    }
    let lim = with_slack(energy);
    let mut n_up = 0.0;
    let mut n_down = 0.0;
    // Partners of E_k are the levels <= E - E_k; that prefix shrinks as k grows.
    let mut partners = levels.len();
    for &ek in &levels {
        while partners > 0 && ek + levels[partners - 1] > lim {
            partners -= 1;
        }
        if partners == 0 {
            break;
        }
        n_up += ek * ek * partners as f64;
        n_down += ek * prefix[partners];
    }
    Ok((n_up, n_down))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_levels(energies: &[f64], nmax: u32) -> Vec<f64> {
        let mut out = vec![0.0];
        for w in energies {
            out = out
                .iter()
                .flat_map(|base| (1..=nmax).map(move |n| base + w * (n as f64 - 0.5)))
                .collect();
        }
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn one_mode_levels() {
        assert_eq!(oscillator_levels(&[1.0], 4).unwrap(), vec![0.5, 1.5, 2.5, 3.5]);
    }

    #[test]
    fn two_equal_modes() {
        assert_eq!(
            oscillator_levels(&[1.0, 1.0], 6).unwrap(),
            vec![1.0, 2.0, 2.0, 3.0, 3.0, 3.0]
        );
    }

    #[test]
    fn unequal_modes_match_enumeration() {
        let brute = brute_levels(&[1.0, 2.0], 10);
        assert_eq!(&brute[..5], &[1.5, 2.5, 3.5, 3.5, 4.5]);
        assert_eq!(oscillator_levels(&[1.0, 2.0], 5).unwrap(), brute[..5].to_vec());
    }

    #[test]
    fn heap_agrees_with_brute_force_three_modes() {
        let energies = [0.7, 1.3, 2.9];
        let brute = brute_levels(&energies, 80);
        let m = 2000;
        let heap = oscillator_levels(&energies, m).unwrap();
        for (a, b) in heap.iter().zip(&brute[..m]) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn level_cap_is_enforced() {
        let err = oscillator_levels_capped(&[1.0, 1.0], 11, 10).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(oscillator_levels(&[1.0], 0).is_err());
        assert!(oscillator_levels(&[1.0, -1.0], 3).is_err());
    }

    #[test]
    fn counting() {
        assert_eq!(count_levels(&[1.0], 2.6).unwrap(), 3);
        assert_eq!(count_levels(&[1.0, 1.0], 3.0).unwrap(), 6);
        assert_eq!(count_levels(&[1.0, 2.0], 4.5).unwrap(), 6);
        assert_eq!(count_levels(&[1.0, 2.0], 1.4).unwrap(), 0);
        assert_eq!(count_levels(&[1.0], -3.0).unwrap(), 0);
    }

    #[test]
    fn nth_level_examples() {
        let one = SpectrumModel::oscillator(vec![1.0]).unwrap();
        assert_eq!(nth_level(&one, 0).unwrap(), 0.5);
        assert_eq!(nth_level(&one, 1_000_000).unwrap(), 1_000_000.5);
        let ex = SpectrumModel::explicit(vec![0.0, 1.0, 1.0, 2.0], 2.0).unwrap();
        assert_eq!(nth_level(&ex, 2).unwrap(), 1.0);
        assert!(matches!(nth_level(&ex, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn nth_level_multimode_matches_heap() {
        let energies = vec![1.0, 2.0, 0.75];
        let model = SpectrumModel::oscillator(energies.clone()).unwrap();
        let heap = oscillator_levels(&energies, 3000).unwrap();
        for k in (0..3000).step_by(37) {
            assert_eq!(nth_level(&model, k as u64).unwrap(), heap[k], "k = {k}");
        }
    }

    #[test]
    fn nth_level_is_exact_on_plateaus() {
        let model = SpectrumModel::oscillator(vec![1.0, 1.0]).unwrap();
        // levels 1, 2, 2, 3, 3, 3, 4, ...
        assert_eq!(nth_level(&model, 1).unwrap(), 2.0);
        assert_eq!(nth_level(&model, 2).unwrap(), 2.0);
        assert_eq!(nth_level(&model, 5).unwrap(), 3.0);
        // k = 5e7: n1 + n2 - 1 = L holds L levels, cumulative L(L+1)/2.
        let k: u64 = 50_000_000;
        let mut l: u64 = 1;
        while l * (l + 1) / 2 < k + 1 {
            l += 1;
        }
        assert_eq!(nth_level(&model, k).unwrap(), l as f64);
    }

    #[test]
    fn bd_sum_examples() {
        let one = SpectrumModel::oscillator(vec![1.0]).unwrap();
        assert_eq!(bd_sums(&one, 2.0).unwrap(), (2.75, 1.75));
        assert_eq!(bd_sums(&one, 0.9).unwrap(), (0.0, 0.0));
        assert!(bd_sums(&one, 0.5).is_err());
    }

    #[test]
    fn bd_sums_match_pair_enumeration() {
        let model = SpectrumModel::oscillator(vec![1.0, 1.7]).unwrap();
        let levels = brute_levels(&[1.0, 1.7], 30);
        let e = 12.3;
        let (mut up, mut down) = (0.0, 0.0);
        for a in &levels {
            for b in &levels {
                if a + b <= e {
                    up += a * a;
                    down += a * b;
                }
            }
        }
        let (n_up, n_down) = bd_sums(&model, e).unwrap();
        assert!((n_up - up).abs() < 1e-9 * up);
        assert!((n_down - down).abs() < 1e-9 * down);
    }

    #[test]
    fn explicit_bd_sums_need_complete_data() {
        let ex = SpectrumModel::explicit(vec![0.0, 1.0, 2.0], 2.5).unwrap();
        assert!(bd_sums(&ex, 2.0).is_ok());
        assert!(matches!(bd_sums(&ex, 3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn explicit_validation() {
        assert!(SpectrumModel::explicit(vec![], 1.0).is_err());
        assert!(SpectrumModel::explicit(vec![1.0, 0.5], 2.0).is_err());
        assert!(SpectrumModel::explicit(vec![-1.0, 0.5], 2.0).is_err());
        assert!(SpectrumModel::explicit(vec![0.0, 3.0], 2.0).is_err());
        let ex = SpectrumModel::explicit(vec![0.0, 0.0, 1.0], f64::INFINITY).unwrap();
        assert_eq!(ex.ground_multiplicity(), 2);
    }

    #[test]
    fn parse_text_format() {
        let m = SpectrumModel::parse_explicit("# complete_below=3.5\n0.5\n1.5\n\n2.5\n").unwrap();
        match &m {
            SpectrumModel::Explicit(x) => {
                assert_eq!(x.levels(), &[0.5, 1.5, 2.5]);
                assert_eq!(x.complete_below(), 3.5);
            }
            _ => unreachable!(),
        }
        assert!(SpectrumModel::parse_explicit("0.5\n1.5\n").is_err());
        assert!(SpectrumModel::parse_explicit("# complete_below=3\n1\n0.5\n").is_err());
        assert!(SpectrumModel::parse_explicit("# complete_below=3\n1\nabc\n").is_err());
        let full = SpectrumModel::parse_explicit("# complete_below=inf\n0\n1\n").unwrap();
        assert_eq!(full.ground_energy(), 0.0);
    }

    #[test]
    fn oscillator_derived_constants() {
        let o = Oscillator::new(vec![1.0, 4.0]).unwrap();
        assert_eq!(o.ground_energy(), 2.5);
        assert!((o.geometric_mean() - 2.0).abs() < 1e-15);
    }
}
