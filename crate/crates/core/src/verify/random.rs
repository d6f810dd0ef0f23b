//! Seeded random states, channels and ensembles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::channel::{DiscreteEnsemble, KrausChannel};
use super::state::{partial_trace, CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Deterministic generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `G G^dagger / Tr(G G^dagger)` for a `dim x rank` Ginibre matrix `G`.
pub fn random_state_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::validation(format!("rank {rank} is not in 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_raw(m.unscale(tr)))
}

pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_state_with(dim, rank, &mut rng_for(seed, 0))
}

/// Rank drawn log-uniformly from `1..=dim`.
pub fn random_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> usize {
    let r = (rng.gen::<f64>() * ((dim + 1) as f64).ln()).exp().floor() as usize;
    r.clamp(1, dim)
}

/// Mixes `rho` with `|0><0|` just enough that `Tr H rho <= e_max`, where
/// `H = diag(levels)` has its minimum at index 0.
pub fn energy_cap(rho: &DensityMatrix, levels: &[f64], e_max: f64) -> Result<DensityMatrix> {
    let e = rho.energy(levels)?;
    let w = cap_weight(e, levels[0], e_max)?;
    rho.mix(w, &DensityMatrix::basis(rho.dim(), 0))
}

/// As [`energy_cap`] for the Hamiltonian `H (x) I` on factor 0 of a
/// multipartite state: mixes with `|0><0| (x) rho_rest`.
pub fn energy_cap_first(rho: &DensityMatrix, dims: &[usize], levels: &[f64], e_max: f64) -> Result<DensityMatrix> {
    if dims.len() < 2 {
        return energy_cap(rho, levels, e_max);
    }
    let a = partial_trace(rho, dims, &[0])?;
    let w = cap_weight(a.energy(levels)?, levels[0], e_max)?;
    if w == 1.0 {
        return Ok(rho.clone());
    }
    let rest: Vec<usize> = (1..dims.len()).collect();
    let grounded = DensityMatrix::basis(dims[0], 0).tensor(&partial_trace(rho, dims, &rest)?);
    rho.mix(w, &grounded)
}

/// Weight `w` with `w e + (1 - w) e0 <= e_max`.
fn cap_weight(e: f64, e0: f64, e_max: f64) -> Result<f64> {
    if !(e_max >= e0) {
        return Err(Error::domain(format!("energy cap {e_max} is below the ground energy {e0}")));
    }
    Ok(if e <= e_max { 1.0 } else { (e_max - e0) / (e - e0) })
}

/// `(1 - eps) rho + eps pi`.
pub fn perturb(rho: &DensityMatrix, eps: f64, pi: &DensityMatrix) -> Result<DensityMatrix> {
    pi.mix(eps, rho)
}

/// Channel from a Haar-like isometry `C^in -> C^out (x) C^k` obtained by QR of a
/// Ginibre matrix. Needs `out * k >= in`.
pub fn random_channel_with<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, k: usize, rng: &mut R) -> Result<KrausChannel> {
    if in_dim == 0 || out_dim == 0 || k == 0 || out_dim * k < in_dim {
        return Err(Error::validation(format!(
            "an isometry from {in_dim} into {out_dim} x {k} does not exist"
        )));
    }
    let q = ginibre(out_dim * k, in_dim, rng).qr().q();
    let kraus = (0..k).map(|i| q.rows(i * out_dim, out_dim).into_owned()).collect();
    KrausChannel::new(kraus)
}

pub fn random_channel(in_dim: usize, out_dim: usize, k: usize, seed: u64) -> Result<KrausChannel> {
    random_channel_with(in_dim, out_dim, k, &mut rng_for(seed, 0))
}

/// Antidegradable measure-and-prepare channel `rho -> sum_a <a|rho|a> tau_a`
/// with random `tau_a` of rank at most `rank`.
pub fn random_measure_prepare_with<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rank: usize, rng: &mut R) -> Result<KrausChannel> {
    if rank == 0 || rank > out_dim {
        return Err(Error::validation("preparation rank must lie in 1..=out_dim"));
    }
    let mut kraus = Vec::with_capacity(in_dim * rank);
    for a in 0..in_dim {
        let g = ginibre(out_dim, rank, rng);
        let norm = g.norm();
        for j in 0..rank {
            let mut k = CMatrix::zeros(out_dim, in_dim);
            k.set_column(a, &g.column(j).unscale(norm));
            kraus.push(k);
        }
    }
    KrausChannel::new(kraus)
}

/// Degradable Schur-multiplier channel with diagonal Kraus operators
/// `(K_i)_{aa} = (psi_a)_i` for random unit vectors `psi_a` in `C^k`.
pub fn random_schur_with<R: Rng + ?Sized>(dim: usize, k: usize, rng: &mut R) -> Result<KrausChannel> {
    if dim == 0 || k == 0 {
        return Err(Error::validation("Schur channel needs positive dimensions"));
    }
    let psi = ginibre(k, dim, rng);
    let mut kraus = vec![CMatrix::zeros(dim, dim); k];
    for a in 0..dim {
        let col = psi.column(a);
        let n = col.norm();
        for (i, kr) in kraus.iter_mut().enumerate() {
            kr[(a, a)] = col[i] / n;
        }
    }
    KrausChannel::new(kraus)
}

/// Ensemble of `n` random states with Dirichlet(1) weights.
pub fn random_ensemble_with<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Result<DiscreteEnsemble> {
    if n == 0 {
        return Err(Error::validation("ensemble needs at least one state"));
    }
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let probs = normalise(&raw);
    let states = (0..n)
        .map(|_| {
            let r = random_rank(dim, rng);
            random_state_with(dim, r, rng)
        })
        .collect::<Result<_>>()?;
    DiscreteEnsemble::new(probs, states)
}

/// Weights scaled to sum to exactly one in floating point, up to the last
/// entry absorbing the rounding.
pub(crate) fn normalise(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / s).collect();
    let n = p.len();
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = (1.0 - head).max(0.0);
    p
}

/// Mixes every state of the ensemble with `|0><0|` by a common weight so that
/// the average energy is at most `e_max`.
pub fn energy_cap_ensemble(ens: &DiscreteEnsemble, levels: &[f64], e_max: f64) -> Result<DiscreteEnsemble> {
    let w = cap_weight(ens.average_energy(levels)?, levels[0], e_max)?;
    if w == 1.0 {
        return Ok(ens.clone());
    }
    let ground = DensityMatrix::basis(ens.dim(), 0);
    let states = ens.states().iter().map(|s| s.mix(w, &ground)).collect::<Result<_>>()?;
    DiscreteEnsemble::new(ens.probs().to_vec(), states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::state::entropy;

    #[test]
    fn states_are_valid_and_reproducible() {
        for rank in [1, 3, 8] {
            let r = random_state(8, rank, 11).unwrap();
            let checked = DensityMatrix::new(r.matrix().clone()).unwrap();
            let positive = checked.eigenvalues().iter().filter(|l| **l > 1e-10).count();
            assert_eq!(positive, rank);
        }
        assert_eq!(random_state(6, 2, 5).unwrap(), random_state(6, 2, 5).unwrap());
        assert_ne!(random_state(6, 2, 5).unwrap(), random_state(6, 2, 6).unwrap());
        assert!(random_state(4, 5, 0).is_err());
        assert!(entropy(&random_state(4, 1, 3).unwrap()) < 1e-10);
    }

    #[test]
    fn channels_are_trace_preserving() {
        let mut rng = rng_for(3, 1);
        assert!(random_channel_with(32, 4, 8, &mut rng).is_ok());
        assert!(random_channel_with(9, 4, 2, &mut rng).is_err());
        let mp = random_measure_prepare_with(5, 3, 2, &mut rng).unwrap();
        assert_eq!(mp.out_dim(), 3);
        let s = random_schur_with(6, 3, &mut rng).unwrap();
        let rho = random_state_with(6, 6, &mut rng).unwrap();
        let out = s.apply(&rho).unwrap();
        for a in 0..6 {
            assert!((out.matrix()[(a, a)] - rho.matrix()[(a, a)]).norm() < 1e-14);
        }
    }

    #[test]
    fn energy_caps_hold() {
        let levels: Vec<f64> = (0..8).map(|k| k as f64 + 0.5).collect();
        let rho = random_state(8, 8, 1).unwrap();
        let capped = energy_cap(&rho, &levels, 1.0).unwrap();
        assert!((capped.energy(&levels).unwrap() - 1.0).abs() < 1e-12);
        let same = energy_cap(&capped, &levels, 2.0).unwrap();
        assert_eq!(same, capped);
        assert!(energy_cap(&rho, &levels, 0.4).is_err());

        let dims = [8, 2, 3];
        let big = random_state(48, 10, 2).unwrap();
        let capped = energy_cap_first(&big, &dims, &levels, 0.9).unwrap();
        let a = partial_trace(&capped, &dims, &[0]).unwrap();
        assert!((a.energy(&levels).unwrap() - 0.9).abs() < 1e-12);
        let before = partial_trace(&big, &dims, &[1, 2]).unwrap();
        let after = partial_trace(&capped, &dims, &[1, 2]).unwrap();
        assert!((before.matrix() - after.matrix()).norm() < 1e-14);
    }

    #[test]
    fn ensembles() {
        let mut rng = rng_for(9, 0);
        let e = random_ensemble_with(4, 5, &mut rng).unwrap();
        assert_eq!(e.len(), 5);
        assert_eq!(e.probs().iter().sum::<f64>(), 1.0);
        let levels = [0.5, 1.5, 2.5, 3.5];
        let c = energy_cap_ensemble(&e, &levels, 0.7).unwrap();
        assert!(c.average_energy(&levels).unwrap() <= 0.7 + 1e-12);
    }
}
