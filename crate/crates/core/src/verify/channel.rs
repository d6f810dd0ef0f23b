//! Channels in Kraus form, their complements, and channel and ensemble
//! information quantities.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{entropy, mutual_information, CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Tolerance on `sum_i K_i^dagger K_i = I`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-10;

/// A CPTP map `rho -> sum_i K_i rho K_i^dagger`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
    in_dim: usize,
    out_dim: usize,
}

impl KrausChannel {
    /// Validates shapes and trace preservation.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::validation("channel needs at least one Kraus operator"));
        };
        let (out_dim, in_dim) = first.shape();
        if out_dim == 0 || in_dim == 0 || kraus.iter().any(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::validation("Kraus operators must share a nonempty shape"));
        }
        let sum: CMatrix = kraus.iter().map(|k| k.adjoint() * k).sum();
        let defect = (sum - CMatrix::identity(in_dim, in_dim)).norm();
        if defect > TRACE_PRESERVING_TOL {
            return Err(Error::validation(format!("not trace preserving (defect {defect:e})")));
        }
        Ok(KrausChannel { kraus, in_dim, out_dim })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            kraus: vec![CMatrix::identity(dim, dim)],
            in_dim: dim,
            out_dim: dim,
        }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Dimension of the environment of the Stinespring dilation built from the
    /// Kraus operators.
    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    /// The complementary channel, with Kraus operators
    /// `(L_b)_{i,a} = (K_i)_{b,a}`.
    pub fn complementary(&self) -> KrausChannel {
        let k = self.kraus.len();
        let kraus = (0..self.out_dim)
            .map(|b| DMatrix::from_fn(k, self.in_dim, |i, a| self.kraus[i][(b, a)]))
            .collect();
        KrausChannel {
            kraus,
            in_dim: self.in_dim,
            out_dim: k,
        }
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_on_first(rho, 1)
    }

    /// `(Phi (x) Id)(rho)` for `rho` on `A (x) R` with `dim R = rest`.
    pub fn apply_on_first(&self, rho: &DensityMatrix, rest: usize) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim * rest {
            return Err(Error::validation(format!(
                "channel input {} times {rest} does not match state dimension {}",
                self.in_dim,
                rho.dim()
            )));
        }
        let id = CMatrix::identity(rest, rest);
        let n = self.out_dim * rest;
        let mut out = CMatrix::zeros(n, n);
        for k in &self.kraus {
            let big = if rest == 1 { k.clone() } else { k.kronecker(&id) };
            out += &big * rho.matrix() * big.adjoint();
        }
        Ok(DensityMatrix::from_raw(out))
    }
}

/// `I(Phi, rho) = H(rho) + H(Phi(rho)) - H(Phi^c(rho))`.
pub fn channel_mi(channel: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    let b = channel.apply(rho)?;
    let e = channel.complementary().apply(rho)?;
    Ok(entropy(rho) + entropy(&b) - entropy(&e))
}

/// `I_c(Phi, rho) = H(Phi(rho)) - H(Phi^c(rho))`.
pub fn channel_ci(channel: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    let b = channel.apply(rho)?;
    let e = channel.complementary().apply(rho)?;
    Ok(entropy(&b) - entropy(&e))
}

/// Purification `sum_i sqrt(l_i) |e_i>|i>` of `rho`, as a state on `A (x) R`.
pub fn purification(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let eig = rho.matrix().clone().symmetric_eigen();
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        let w = eig.eigenvalues[i].max(0.0).sqrt();
        for a in 0..d {
            psi[a * d + i] = eig.eigenvectors[(a, i)] * w;
        }
    }
    DensityMatrix::pure(&psi).expect("purification of a unit-trace state is nonzero")
}

/// `I(Phi, rho)` as `I(B:R)` of `(Phi (x) Id)` applied to a purification.
pub fn channel_mi_purified(channel: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    let out = channel.apply_on_first(&purification(rho), d)?;
    mutual_information(&out, [channel.out_dim(), d])
}

/// A finite ensemble `{p_i, rho_i}` of states on a common space.
#[derive(Debug, Clone)]
pub struct DiscreteEnsemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl DiscreteEnsemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::validation("ensemble needs equally many weights and states"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::validation("ensemble weights must be nonnegative"));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::validation("ensemble weights must sum to 1"));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::validation("ensemble states must share a dimension"));
        }
        Ok(DiscreteEnsemble { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `sum_i p_i rho_i`.
    pub fn average(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            m += s.matrix().scale(*p);
        }
        DensityMatrix::from_raw(m)
    }

    /// `sum_i p_i Tr H rho_i` for `H = diag(levels)`.
    pub fn average_energy(&self, levels: &[f64]) -> Result<f64> {
        self.average().energy(levels)
    }

    pub fn map(&self, channel: &KrausChannel) -> Result<DiscreteEnsemble> {
        Ok(DiscreteEnsemble {
            probs: self.probs.clone(),
            states: self.states.iter().map(|s| channel.apply(s)).collect::<Result<_>>()?,
        })
    }

    /// `sum_i p_i rho_i (x) |i><i|` on `A (x) R`.
    pub fn qc_state(&self) -> DensityMatrix {
        let (d, n) = (self.dim(), self.len());
        let mut m = CMatrix::zeros(d * n, d * n);
        for (i, (p, s)) in self.probs.iter().zip(&self.states).enumerate() {
            for a in 0..d {
                for b in 0..d {
                    m[(a * n + i, b * n + i)] = s.matrix()[(a, b)] * *p;
                }
            }
        }
        DensityMatrix::from_raw(m)
    }
}

/// `chi = H(sum_i p_i rho_i) - sum_i p_i H(rho_i)`.
pub fn holevo_quantity(ens: &DiscreteEnsemble) -> f64 {
    entropy(&ens.average())
        - ens
            .probs
            .iter()
            .zip(&ens.states)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, s)| p * entropy(s))
            .sum::<f64>()
}

/// `chi({p_i, Phi(rho_i)})`.
pub fn holevo(channel: &KrausChannel, ens: &DiscreteEnsemble) -> Result<f64> {
    Ok(holevo_quantity(&ens.map(channel)?))
}

/// Private information `chi(Phi(mu)) - chi(Phi^c(mu))`.
pub fn privacy(channel: &KrausChannel, ens: &DiscreteEnsemble) -> Result<f64> {
    Ok(holevo(channel, ens)? - holevo(&channel.complementary(), ens)?)
}

/// `I(B:R) - I(E:R)` of the classical-quantum state of the ensemble sent
/// through the channel and its complement.
pub fn privacy_qc(channel: &KrausChannel, ens: &DiscreteEnsemble) -> Result<f64> {
    let n = ens.len();
    let rho = ens.qc_state();
    let comp = channel.complementary();
    let br = channel.apply_on_first(&rho, n)?;
    let er = comp.apply_on_first(&rho, n)?;
    Ok(mutual_information(&br, [channel.out_dim(), n])? - mutual_information(&er, [comp.out_dim(), n])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dephasing(p: f64) -> KrausChannel {
        let k0 = CMatrix::identity(2, 2).scale((1.0 - p).sqrt());
        let mut k1 = CMatrix::identity(2, 2).scale(p.sqrt());
        k1[(1, 1)] = c(-p.sqrt());
        KrausChannel::new(vec![k0, k1]).unwrap()
    }

    fn erasure(p: f64) -> KrausChannel {
        let mut k0 = CMatrix::zeros(3, 2);
        k0[(0, 0)] = c((1.0 - p).sqrt());
        k0[(1, 1)] = c((1.0 - p).sqrt());
        let mut k1 = CMatrix::zeros(3, 2);
        k1[(2, 0)] = c(p.sqrt());
        let mut k2 = CMatrix::zeros(3, 2);
        k2[(2, 1)] = c(p.sqrt());
        KrausChannel::new(vec![k0, k1, k2]).unwrap()
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = CMatrix::identity(2, 2).scale(0.9);
        assert!(KrausChannel::new(vec![k]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn identity_channel_quantities() {
        let id = KrausChannel::identity(3);
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let h = entropy(&rho);
        assert!((channel_mi(&id, &rho).unwrap() - 2.0 * h).abs() < 1e-12);
        assert!((channel_ci(&id, &rho).unwrap() - h).abs() < 1e-12);
        assert!((channel_mi_purified(&id, &rho).unwrap() - 2.0 * h).abs() < 1e-12);
    }

    #[test]
    fn erasure_channel_closed_forms() {
        let p = 0.3;
        let ch = erasure(p);
        let mixed = DensityMatrix::maximally_mixed(2);
        let ln2 = 2f64.ln();
        assert!((channel_mi(&ch, &mixed).unwrap() - 2.0 * (1.0 - p) * ln2).abs() < 1e-12);
        assert!((channel_ci(&ch, &mixed).unwrap() - (1.0 - 2.0 * p) * ln2).abs() < 1e-12);
        assert!((channel_mi_purified(&ch, &mixed).unwrap() - 2.0 * (1.0 - p) * ln2).abs() < 1e-12);
    }

    #[test]
    fn complement_of_complement_has_same_output() {
        let ch = dephasing(0.2);
        let rho = DensityMatrix::pure(&[c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let cc = ch.complementary().complementary();
        let a = ch.apply(&rho).unwrap();
        let b = cc.apply(&rho).unwrap();
        assert!((a.matrix() - b.matrix()).norm() < 1e-14);
    }

    #[test]
    fn dephasing_privacy_matches_qc_form() {
        let ch = dephasing(0.1);
        let plus = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        let minus = DensityMatrix::pure(&[c(1.0), c(-1.0)]).unwrap();
        let zero = DensityMatrix::basis(2, 0);
        let ens = DiscreteEnsemble::new(vec![0.5, 0.3, 0.2], vec![plus, minus, zero]).unwrap();
        let direct = privacy(&ch, &ens).unwrap();
        let qc = privacy_qc(&ch, &ens).unwrap();
        assert!((direct - qc).abs() < 1e-12, "{direct} {qc}");
        let chi = holevo(&ch, &ens).unwrap();
        assert!(chi > 0.0 && chi <= 2f64.ln() + 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        let s = DensityMatrix::basis(2, 0);
        assert!(DiscreteEnsemble::new(vec![0.5], vec![s.clone()]).is_err());
        assert!(DiscreteEnsemble::new(vec![1.0, 0.0], vec![s.clone()]).is_err());
        assert!(DiscreteEnsemble::new(vec![1.0, 0.0], vec![s.clone(), DensityMatrix::basis(3, 0)]).is_err());
        let e = DiscreteEnsemble::new(vec![1.0], vec![s]).unwrap();
        assert_eq!(holevo_quantity(&e), 0.0);
    }
}
