//! Sufficient input dimensions for energy-constrained channel capacities: the
//! least `m` such that restricting inputs to the span of the first `m + 1`
//! eigenvectors changes the capacity by at most `eps`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{cb_formula, BoundParams, Envelope};
use crate::error::{Error, Result};
use crate::optim::grid_then_golden;
use crate::spectrum::{count_levels, nth_level, Oscillator, SpectrumModel};
use crate::special::g;
use crate::thermo::FHatFunction;

/// Largest dimension [`UfaProblem::sufficient_dim`] will consider.
pub const M_CAP: u64 = 1_000_000_000_000;
/// Number of log-spaced `t` grid points in [`UfaProblem::min_over_t`].
pub const T_GRID_POINTS: usize = 256;
const T_REFINE_RTOL: f64 = 1e-6;
/// Bound on the downward scan used when the predicate is not monotone.
const LINEAR_SCAN_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CapacityKind {
    Cchi,
    C,
    Qbar,
    Q,
    Cpbar,
    Cp,
}

impl CapacityKind {
    pub const ALL: [CapacityKind; 6] = [
        CapacityKind::Cchi,
        CapacityKind::C,
        CapacityKind::Qbar,
        CapacityKind::Q,
        CapacityKind::Cpbar,
        CapacityKind::Cp,
    ];

    /// Kinds shown as table columns; `Qbar` coincides with `Cchi`.
    pub const TABLE: [CapacityKind; 5] = [
        CapacityKind::Cchi,
        CapacityKind::C,
        CapacityKind::Q,
        CapacityKind::Cpbar,
        CapacityKind::Cp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CapacityKind::Cchi => "Cchi",
            CapacityKind::C => "C",
            CapacityKind::Qbar => "Qbar",
            CapacityKind::Q => "Q",
            CapacityKind::Cpbar => "Cpbar",
            CapacityKind::Cp => "Cp",
        }
    }

    fn uses_big_f(self) -> bool {
        matches!(self, CapacityKind::C | CapacityKind::Q | CapacityKind::Cp)
    }
}

impl fmt::Display for CapacityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CapacityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown capacity kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UfaResult {
    pub kind: CapacityKind,
    pub m: u64,
    pub t_star: f64,
    pub f_value: f64,
    pub e_m: f64,
}

/// The remainder term of the block-encoding estimate: with `w = 4 + 8t`,
/// `(w u + 2 s u^2 t^2) F(Ebar_m / t^2) + w delta u + 4 g(t u) + 2 g((2 + 2t) u)`.
pub fn big_f(fhat: &FHatFunction, delta: f64, u: f64, ebar_m: f64, t: f64, s: u8) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!("t = {t} must lie in (0, 1]")));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::domain(format!("u = {u} must lie in (0, 1]")));
    }
    if !(ebar_m > 0.0) {
        return Err(Error::domain("Ebar_m must be positive"));
    }
    if s > 1 {
        return Err(Error::domain("s must be 0 or 1"));
    }
    let w = 4.0 + 8.0 * t;
    let s = f64::from(s);
    Ok((w * u + 2.0 * s * u * u * t * t) * fhat.eval(ebar_m / (t * t))?
        + w * delta * u
        + 4.0 * g(t * u)
        + 2.0 * g((2.0 + 2.0 * t) * u))
}

#[derive(Debug, Clone)]
enum Regime {
    /// Closed-form oscillator envelope with `delta = exp(-l) + ln 2`, the
    /// `T*` cap and `m0` defined by `E_m0 >= 2 E0`.
    Oscillator,
    /// An arbitrary admissible envelope with `delta = 1/d0 + ln 2`, the
    /// `gamma(d0)` cap and `m0` defined by `Ebar_m0 >= gamma(d0)`.
    Generic { gamma_d0: f64 },
}

/// A Hamiltonian together with the envelope used to bound entropies on it.
#[derive(Debug, Clone)]
pub struct UfaProblem {
    model: SpectrumModel,
    fhat: FHatFunction,
    regime: Regime,
    delta: f64,
    t_grid: usize,
}

impl UfaProblem {
    pub fn oscillator(osc: Oscillator) -> Self {
        let delta = BoundParams::oscillator_delta(osc.mode_count());
        UfaProblem {
            model: SpectrumModel::Oscillator(osc.clone()),
            fhat: FHatFunction::OscillatorBar(osc),
            regime: Regime::Oscillator,
            delta,
            t_grid: T_GRID_POINTS,
        }
    }

    pub fn generic(model: SpectrumModel, envelope: Envelope) -> Self {
        UfaProblem {
            model,
            delta: BoundParams::generic_delta(envelope.d0()),
            regime: Regime::Generic {
                gamma_d0: envelope.gamma_d0(),
            },
            fhat: envelope.fhat().clone(),
            t_grid: T_GRID_POINTS,
        }
    }

    /// Uses an `n`-point initial grid in [`UfaProblem::min_over_t`].
    pub fn with_t_grid(mut self, n: usize) -> Result<Self> {
        crate::bounds::check_grid(n)?;
        self.t_grid = n;
        Ok(self)
    }

    pub fn model(&self) -> &SpectrumModel {
        &self.model
    }

    pub fn fhat(&self) -> &FHatFunction {
        &self.fhat
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `E_m`, the `m`-th eigenvalue counted from zero with multiplicity.
    pub fn level(&self, m: u64) -> Result<f64> {
        nth_level(&self.model, m)
    }

    /// Least `m` with `E_m >= x`.
    pub fn first_index_at_least(&self, x: f64) -> Result<u64> {
        let x = x - 1e-12 * x.abs().max(1.0);
        let mut m = match &self.model {
            SpectrumModel::Oscillator(osc) => match osc.energies() {
                [w] => (x / w - 0.5).ceil().max(0.0) as u64,
                ws => count_levels(ws, x)?,
            },
            SpectrumModel::Explicit(spec) => {
                let k = spec.levels().partition_point(|&e| e < x);
                if k == spec.levels().len() {
                    return Err(Error::domain(format!("no listed level reaches {x}")));
                }
                return Ok(k as u64);
            }
        };
        while m > 0 && self.level(m - 1)? >= x {
            m -= 1;
        }
        while self.level(m)? < x {
            m += 1;
        }
        Ok(m)
    }

    /// Threshold index below which the big-F estimates are infinite.
    pub fn m_zero(&self) -> Result<u64> {
        let e0 = self.model.ground_energy();
        let m = match self.regime {
            Regime::Oscillator => self.first_index_at_least(2.0 * e0)?,
            Regime::Generic { gamma_d0 } => self.first_index_at_least(e0 + gamma_d0)?,
        };
        Ok(m.max(1))
    }

    fn t_cap(&self, ebar: f64, eps: f64) -> f64 {
        let scale = match self.regime {
            Regime::Oscillator => self.model.ground_energy(),
            Regime::Generic { gamma_d0 } => gamma_d0,
        };
        let ratio = if scale > 0.0 { (ebar / scale).sqrt() } else { f64::INFINITY };
        ratio.min(1.0) / eps
    }

    fn check_energy(&self, energy: f64) -> Result<f64> {
        let e0 = self.model.ground_energy();
        if energy.is_nan() || energy <= e0 {
            return Err(Error::domain(format!("energy {energy} must exceed the ground energy {e0}")));
        }
        Ok(energy - e0)
    }

    fn geometry(&self, energy: f64, m: u64) -> Result<Geometry> {
        if m < 1 {
            return Err(Error::domain("m must be positive"));
        }
        let ebar = self.check_energy(energy)?;
        let ebar_m = self.level(m)? - self.model.ground_energy();
        let ratio = ebar / ebar_m;
        let u = ratio.sqrt();
        Ok(Geometry {
            ebar,
            ebar_m,
            u,
            s: ratio + u,
        })
    }

    /// Upper end of the feasible `t` range at `m`, or `None` when every `t` in
    /// `(0, 1]` gives an infinite estimate.
    fn t_feasible(&self, kind: CapacityKind, geo: &Geometry, m: u64) -> Result<Option<f64>> {
        if !(geo.ebar_m > 0.0) {
            return Ok(None);
        }
        if kind.uses_big_f() {
            if m < self.m_zero()? || geo.u > 1.0 {
                return Ok(None);
            }
            return Ok(Some(1.0));
        }
        if geo.s > 2.0 {
            return Ok(None);
        }
        Ok(Some((2.0 * self.t_cap(geo.ebar, geo.s)).min(1.0)))
    }

    fn eval_at(&self, kind: CapacityKind, geo: &Geometry, t: f64) -> Result<f64> {
        use CapacityKind::*;
        match kind {
            Cchi | Qbar => {
                let p = BoundParams {
                    c: 2.0,
                    d: 2.0,
                    delta: self.delta,
                };
                cb_formula(|x| self.fhat.eval(x), geo.ebar, geo.s, t / 2.0, &p)
            }
            C => big_f(&self.fhat, self.delta, geo.u, geo.ebar_m, t, 0),
            Q => big_f(&self.fhat, self.delta, geo.u, geo.ebar_m, t, 1),
            Cpbar => Ok(2.0 * self.eval_at(Cchi, geo, t)?),
            Cp => Ok(2.0 * self.eval_at(Q, geo, t)?),
        }
    }

    /// `f_kind(E, m, t)`, infinite where the estimate is undefined.
    pub fn f_capacity(&self, kind: CapacityKind, energy: f64, m: u64, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("t = {t} must lie in (0, 1]")));
        }
        let geo = self.geometry(energy, m)?;
        match self.t_feasible(kind, &geo, m)? {
            Some(hi) if t <= hi * (1.0 + 1e-12) => self.eval_at(kind, &geo, t),
            _ => Ok(f64::INFINITY),
        }
    }

    /// Minimum of `f_kind(E, m, t)` over feasible `t` in `(0, 1]`; the value is
    /// infinite when no `t` is feasible.
    pub fn min_over_t(&self, kind: CapacityKind, energy: f64, m: u64) -> Result<(f64, f64)> {
        let geo = self.geometry(energy, m)?;
        let Some(hi) = self.t_feasible(kind, &geo, m)? else {
            return Ok((f64::NAN, f64::INFINITY));
        };
        let mut err = None;
        let (t, v) = grid_then_golden(
            |t| match self.eval_at(kind, &geo, t) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            },
            hi * 1e-6,
            hi,
            self.t_grid,
            T_REFINE_RTOL,
        );
        match err {
            Some(e) => Err(e),
            None => Ok((t, v)),
        }
    }

    /// Least `m` with `E_m >= E` and `min_t f_kind(E, m, t) <= eps`.
    pub fn sufficient_dim(&self, kind: CapacityKind, energy: f64, eps: f64) -> Result<UfaResult> {
        if !(eps > 0.0) {
            return Err(Error::domain("eps must be positive"));
        }
        self.check_energy(energy)?;
        let mut start = self.first_index_at_least(energy)?.max(1);
        if kind.uses_big_f() {
            start = start.max(self.m_zero()?);
        }
        let holds = |m: u64| -> Result<bool> { Ok(self.min_over_t(kind, energy, m)?.1 <= eps) };

        let mut m = start;
        if !holds(start)? {
            let mut lo = start;
            let mut hi = start.saturating_mul(2);
            loop {
                if hi > M_CAP {
                    return Err(Error::resource(format!(
                        "no sufficient dimension up to {M_CAP}"
                    )));
                }
                if holds(hi)? {
                    break;
                }
                lo = hi;
                hi *= 2;
            }
            // Invariant: holds(hi) and !holds(lo).
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if holds(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            m = hi;
            let mut steps = 0;
            while m > start && holds(m - 1)? {
                m -= 1;
                steps += 1;
                if steps > LINEAR_SCAN_LIMIT {
                    return Err(Error::precision("predicate is not monotone near the boundary"));
                }
            }
        }
        let (t_star, f_value) = self.min_over_t(kind, energy, m)?;
        Ok(UfaResult {
            kind,
            m,
            t_star,
            f_value,
            e_m: self.level(m)?,
        })
    }
}

struct Geometry {
    ebar: f64,
    ebar_m: f64,
    u: f64,
    s: f64,
}

/// One cell of the reproduced tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    #[serde(rename = "E_over_hw")]
    pub e_over_hw: f64,
    pub rel_err: f64,
    pub kind: CapacityKind,
    pub m: u64,
    pub t_star: f64,
    pub f_value: f64,
}

pub const TABLE_ENERGIES: [f64; 3] = [3.0, 10.0, 100.0];
pub const TABLE_REL_ERRORS: [f64; 2] = [0.1, 0.01];

/// Sufficient dimensions for the one-mode oscillator with unit frequency at
/// `E in {3, 10, 100}` and `eps = r g(E - 1/2)`, `r in {0.1, 0.01}`, ordered by
/// `r`, then `E`, then kind.
pub fn reproduce_tables() -> Result<Vec<TableRow>> {
    let problem = UfaProblem::oscillator(Oscillator::new(vec![1.0])?);
    let cells: Vec<(f64, f64, CapacityKind)> = TABLE_REL_ERRORS
        .iter()
        .flat_map(|&r| {
            TABLE_ENERGIES
                .iter()
                .flat_map(move |&e| CapacityKind::TABLE.into_iter().map(move |k| (r, e, k)))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(r, e, kind)| {
            let eps = r * g(e - 0.5);
            let res = problem.sufficient_dim(kind, e, eps)?;
            Ok(TableRow {
                e_over_hw: e,
                rel_err: r,
                kind,
                m: res.m,
                t_star: res.t_star,
                f_value: res.f_value,
            })
        })
        .collect()
}

/// CSV with header `E_over_hw,rel_err,kind,m,t_star,f_value`.
pub fn write_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::resource(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::resource(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_mode() -> UfaProblem {
        UfaProblem::oscillator(Oscillator::new(vec![1.0]).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn m_zero_examples() {
        assert_eq!(one_mode().m_zero().unwrap(), 1);
        let two = UfaProblem::oscillator(Oscillator::new(vec![1.0, 1.0]).unwrap());
        assert_eq!(two.m_zero().unwrap(), 1);
        assert_eq!(two.level(1).unwrap(), 2.0);
        let generic = UfaProblem::generic(
            SpectrumModel::oscillator(vec![1.0]).unwrap(),
            Envelope::oscillator(Oscillator::new(vec![1.0]).unwrap()).unwrap(),
        );
        assert_eq!(generic.m_zero().unwrap(), 1);
        let wide = UfaProblem::oscillator(Oscillator::new(vec![1.0, 5.0]).unwrap());
        // Levels 3, 4, 5, 6, 7, 8, 8, ...; 2 E0 = 6.
        assert_eq!(wide.m_zero().unwrap(), 3);
    }

    #[test]
    fn first_index() {
        let p = one_mode();
        assert_eq!(p.first_index_at_least(3.0).unwrap(), 3);
        assert_eq!(p.first_index_at_least(3.2).unwrap(), 3);
        assert_eq!(p.first_index_at_least(3.6).unwrap(), 4);
        let two = UfaProblem::oscillator(Oscillator::new(vec![1.0, 2.0]).unwrap());
        for x in [1.5, 2.0, 3.5, 7.0, 20.25] {
            let m = two.first_index_at_least(x).unwrap();
            assert!(two.level(m).unwrap() >= x - 1e-12);
            assert!(m == 0 || two.level(m - 1).unwrap() < x);
        }
    }

    #[test]
    fn big_f_pinned() {
        let fhat = FHatFunction::OscillatorBar(Oscillator::new(vec![1.0]).unwrap());
        let delta = BoundParams::oscillator_delta(1);
        let u = (2.5f64 / 1e5).sqrt();
        let f0 = big_f(&fhat, delta, u, 1e5, 0.5, 0).unwrap();
        let f1 = big_f(&fhat, delta, u, 1e5, 0.5, 1).unwrap();
        assert!(rel(f0, 0.824_552_128_678_861_4) < 1e-13, "{f0}");
        assert!(rel(f1, 0.824_725_868_957_937_5) < 1e-13, "{f1}");
        let diff = 2.0 * u * u * 0.25 * fhat.eval(1e5 / 0.25).unwrap();
        assert!((f1 - f0 - diff).abs() < 1e-15);
        assert!(big_f(&fhat, delta, 1.5, 1e5, 0.5, 0).is_err());
        assert!(big_f(&fhat, delta, 0.5, 1e5, 0.0, 0).is_err());
    }

    #[test]
    fn big_f_vanishes_with_u() {
        let fhat = FHatFunction::OscillatorBar(Oscillator::new(vec![1.0]).unwrap());
        let delta = BoundParams::oscillator_delta(1);
        let v: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&u| big_f(&fhat, delta, u, 2.5 / (u * u), 0.5, 1).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(v[3] < 1e-5);
    }

    #[test]
    fn dispatch_identities() {
        let p = one_mode();
        for (e, m, t) in [(3.0, 1000, 0.3), (10.0, 100_000, 0.05), (3.0, 50, 1.0)] {
            let f = |k| p.f_capacity(k, e, m, t).unwrap();
            use CapacityKind::*;
            assert_eq!(f(Cpbar), 2.0 * f(Cchi));
            assert_eq!(f(Cp), 2.0 * f(Q));
            assert_eq!(f(Qbar), f(Cchi));
            assert!(f(C) <= f(Q));
        }
    }

    #[test]
    fn oscillator_cchi_closed_form() {
        let p = one_mode();
        let delta = BoundParams::oscillator_delta(1);
        let (e, m) = (3.0, 20_000u64);
        let (ebar, ebar_m) = (2.5, m as f64);
        let s = ebar / ebar_m + (ebar / ebar_m).sqrt();
        let fbar = |x: f64| (x + 1.0).ln() + 1.0;
        for t in [0.01, 0.2, 1.0] {
            let expect = 2.0 * s * (1.0 + 2.0 * t) * (fbar(4.0 * ebar / (s * t).powi(2)) + delta)
                + 2.0 * g(s * (1.0 + t))
                + 4.0 * g(s * t / 2.0);
            let got = p.f_capacity(CapacityKind::Cchi, e, m, t).unwrap();
            assert!(rel(got, expect) < 1e-12);
        }
    }

    #[test]
    fn infeasible_cases_are_infinite() {
        let p = one_mode();
        // s_m > 2 when E_m is close to E.
        assert_eq!(p.f_capacity(CapacityKind::Cchi, 3.0, 1, 0.5).unwrap(), f64::INFINITY);
        assert_eq!(p.min_over_t(CapacityKind::Cchi, 3.0, 1).unwrap().1, f64::INFINITY);
        // u > 1 when E_m < E.
        assert_eq!(p.f_capacity(CapacityKind::Q, 10.0, 2, 0.5).unwrap(), f64::INFINITY);
        assert!(p.f_capacity(CapacityKind::Q, 0.4, 2, 0.5).is_err());
    }

    #[test]
    fn min_over_t_matches_dense_grid() {
        let p = one_mode();
        for kind in CapacityKind::ALL {
            for (e, m) in [(3.0, 200_000u64), (100.0, 5_000_000)] {
                let (t_star, v) = p.min_over_t(kind, e, m).unwrap();
                assert!(t_star > 0.0 && t_star <= 1.0);
                let n = 10_000;
                let brute = (0..n)
                    .map(|i| {
                        let t = (1e-6f64.ln() * (1.0 - i as f64 / (n - 1) as f64)).exp();
                        p.f_capacity(kind, e, m, t).unwrap()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(v <= brute * (1.0 + 1e-6), "{kind}: {v} vs {brute}");
                assert!(v <= p.f_capacity(kind, e, m, 1.0).unwrap());
                assert!(v <= p.f_capacity(kind, e, m, 0.5).unwrap());
            }
        }
    }

    #[test]
    fn sufficient_dim_is_minimal() {
        let p = one_mode();
        let eps = 0.1 * g(2.5);
        for kind in CapacityKind::ALL {
            let r = p.sufficient_dim(kind, 3.0, eps).unwrap();
            assert!(r.e_m >= 3.0);
            assert!(r.f_value <= eps);
            assert!(p.min_over_t(kind, 3.0, r.m - 1).unwrap().1 > eps);
        }
    }

    #[test]
    fn generous_eps_returns_first_level() {
        let p = one_mode();
        let r = p.sufficient_dim(CapacityKind::C, 3.0, 1e6).unwrap();
        assert_eq!(r.m, 3);
    }

    #[test]
    fn multimode_and_generic_regimes() {
        let osc = Oscillator::new(vec![1.0, 1.7]).unwrap();
        let p = UfaProblem::oscillator(osc.clone());
        let r = p.sufficient_dim(CapacityKind::Q, 4.0, 1.0).unwrap();
        assert!(r.e_m >= 4.0 && r.f_value <= 1.0);
        assert!(p.min_over_t(CapacityKind::Q, 4.0, r.m - 1).unwrap().1 > 1.0);

        let model = SpectrumModel::Oscillator(osc);
        let env = Envelope::new(FHatFunction::Star(model.clone())).unwrap();
        let q = UfaProblem::generic(model, env);
        let r = q.sufficient_dim(CapacityKind::Cchi, 4.0, 2.0).unwrap();
        assert!(r.f_value <= 2.0);
        assert!(q.min_over_t(CapacityKind::Cchi, 4.0, r.m - 1).unwrap().1 > 2.0);
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in CapacityKind::ALL {
            assert_eq!(k.name().parse::<CapacityKind>().unwrap(), k);
        }
        assert!("Cea".parse::<CapacityKind>().is_err());
    }

    #[test]
    fn csv_header_and_order() {
        let rows = vec![TableRow {
            e_over_hw: 3.0,
            rel_err: 0.1,
            kind: CapacityKind::Cchi,
            m: 42,
            t_star: 0.5,
            f_value: 0.25,
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "E_over_hw,rel_err,kind,m,t_star,f_value\n3.0,0.1,Cchi,42,0.5,0.25\n");
    }
}
