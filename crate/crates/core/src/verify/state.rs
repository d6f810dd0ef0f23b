//! Density matrices and entropic functionals of finite-dimensional states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::eta;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity and unit trace of a validated state.
pub const STATE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a validated state.
pub const PSD_TOL: f64 = 1e-10;

/// A positive semidefinite unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

/// Eigenvalues of a Hermitian matrix, read off the diagonal when the matrix is
/// diagonal.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        return (0..n).map(|i| m[(i, i)].re).collect();
    }
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// `(A + A^dagger) / 2`.
pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::validation("density matrix must be square and nonempty"));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let skew = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if skew > STATE_TOL * scale {
            return Err(Error::validation(format!("matrix is not Hermitian (defect {skew:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::validation(format!("trace {tr} differs from 1")));
        }
        let m = hermitize(&m);
        let min = hermitian_eigenvalues(&m).into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::validation(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { m })
    }

    /// Wraps a matrix known to be a state up to rounding; Hermiticity is
    /// restored exactly.
    pub(crate) fn from_raw(m: CMatrix) -> Self {
        debug_assert!((trace_re(&m) - 1.0).abs() < 1e-9);
        DensityMatrix { m: hermitize(&m) }
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        let n = p.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(p[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `|psi><psi|` for a vector normalised here.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::validation("zero vector"));
        }
        let n = psi.len();
        Ok(DensityMatrix {
            m: CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm)),
        })
    }

    /// The basis state `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        DensityMatrix { m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            m: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    /// `p self + (1 - p) other`.
    pub fn mix(&self, p: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::validation("dimension mismatch"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("mixing weight must lie in [0, 1]"));
        }
        Ok(DensityMatrix {
            m: self.m.scale(p) + other.m.scale(1.0 - p),
        })
    }

    /// `Tr H rho` for `H = diag(levels)`.
    pub fn energy(&self, levels: &[f64]) -> Result<f64> {
        if levels.len() != self.dim() {
            return Err(Error::validation("Hamiltonian dimension mismatch"));
        }
        Ok(levels.iter().enumerate().map(|(i, e)| e * self.m[(i, i)].re).sum())
    }
}

/// `H(rho) = -Tr rho ln rho`, with eigenvalues clamped at zero.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().into_iter().map(|l| eta(l.max(0.0))).sum()
}

/// `||A||_1` of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(&hermitize(m)).iter().map(|l| l.abs()).sum()
}

/// `(1/2) ||rho - sigma||_1`, clamped to `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::validation("dimension mismatch"));
    }
    Ok((0.5 * trace_norm(&(&rho.m - &sigma.m))).clamp(0.0, 1.0))
}

fn check_dims(dim: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) || dims.iter().product::<usize>() != dim {
        return Err(Error::validation(format!(
            "factor dimensions {dims:?} do not multiply to {dim}"
        )));
    }
    Ok(())
}

/// Offsets `sum_k i_k stride_k` over all multi-indices of the listed factors.
fn offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut out = vec![0usize];
    for &f in factors {
        let stride = strides[f];
        out = out
            .iter()
            .flat_map(|&o| (0..dims[f]).map(move |i| o + i * stride))
            .collect();
    }
    out
}

/// Marginal on the factors in `keep`, which are output in increasing order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    check_dims(rho.dim(), dims)?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::validation("kept factor index out of range"));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    if traced.is_empty() {
        return Ok(rho.clone());
    }
    let ko = offsets(dims, &keep);
    let to = offsets(dims, &traced);
    let n = ko.len();
    let m = &rho.m;
    let out = CMatrix::from_fn(n, n, |a, b| {
        to.iter().map(|&c| m[(ko[a] + c, ko[b] + c)]).sum()
    });
    Ok(DensityMatrix::from_raw(out))
}

fn marginal_entropy(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy(&partial_trace(rho, dims, keep)?))
}

/// `H(A|B) = H(AB) - H(B)` for a state on `A (x) B`.
pub fn cond_entropy(rho_ab: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    check_dims(rho_ab.dim(), &dims)?;
    Ok(entropy(rho_ab) - marginal_entropy(rho_ab, &dims, &[1])?)
}

/// `I(X:Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z)` for disjoint groups of factors.
pub fn cmi(rho: &DensityMatrix, dims: &[usize], x: &[usize], y: &[usize], z: &[usize]) -> Result<f64> {
    check_dims(rho.dim(), dims)?;
    let join = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
    let all = join(&join(x, y), z);
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return Err(Error::validation("factor groups must be disjoint"));
    }
    Ok(marginal_entropy(rho, dims, &join(x, z))?
        + marginal_entropy(rho, dims, &join(y, z))?
        - marginal_entropy(rho, dims, &all)?
        - marginal_entropy(rho, dims, z)?)
}

/// `I(X:Y|Z)` for a tripartite state on `X (x) Y (x) Z`.
pub fn qcmi(rho_xyz: &DensityMatrix, dims: [usize; 3]) -> Result<f64> {
    cmi(rho_xyz, &dims, &[0], &[1], &[2])
}

/// `I(X:Y)` for a bipartite state.
pub fn mutual_information(rho_xy: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    cmi(rho_xy, &dims, &[0], &[1], &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::h2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell(d: usize) -> DensityMatrix {
        let psi: Vec<Complex64> = (0..d * d)
            .map(|k| if k / d == k % d { c(1.0) } else { c(0.0) })
            .collect();
        DensityMatrix::pure(&psi).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!(entropy(&DensityMatrix::basis(5, 2)).abs() < 1e-15);
        assert!((entropy(&DensityMatrix::maximally_mixed(7)) - 7f64.ln()).abs() < 1e-14);
        let r = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        assert!((entropy(&r) - h2(0.25)).abs() < 1e-15);
        let plus = DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap();
        assert!(entropy(&plus).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut m = CMatrix::identity(2, 2).scale(0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.1);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Validation(_))));
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::from_diagonal(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::basis(3, 0);
        let b = DensityMatrix::basis(3, 1);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        let m = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        let e = DensityMatrix::basis(2, 0);
        assert!((trace_distance(&e, &m).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_distance(&e, &a).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let a = DensityMatrix::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let b = DensityMatrix::pure(&[c(1.0), Complex64::new(0.0, 1.0)]).unwrap();
        let ab = a.tensor(&b);
        let back = partial_trace(&ab, &[3, 2], &[0]).unwrap();
        assert!((back.matrix() - a.matrix()).norm() < 1e-15);
        let back = partial_trace(&ab, &[3, 2], &[1]).unwrap();
        assert!((back.matrix() - b.matrix()).norm() < 1e-15);
        let half = partial_trace(&bell(3), &[3, 3], &[1]).unwrap();
        assert!((half.matrix() - DensityMatrix::maximally_mixed(3).matrix()).norm() < 1e-15);
        assert!(partial_trace(&ab, &[2, 2], &[0]).is_err());
    }

    #[test]
    fn partial_trace_tripartite_matches_index_contraction() {
        let (dx, dy, dz) = (2, 3, 2);
        let n = dx * dy * dz;
        let g = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i * 5 + j) % 7) as f64 - 3.0)
        });
        let m = &g * g.adjoint();
        let tr = m.trace();
        let rho = DensityMatrix::new(m.unscale(tr.re)).unwrap();
        let got = partial_trace(&rho, &[dx, dy, dz], &[0, 2]).unwrap();
        let idx = |x: usize, y: usize, z: usize| (x * dy + y) * dz + z;
        for x1 in 0..dx {
            for z1 in 0..dz {
                for x2 in 0..dx {
                    for z2 in 0..dz {
                        let want: Complex64 =
                            (0..dy).map(|y| rho.matrix()[(idx(x1, y, z1), idx(x2, y, z2))]).sum();
                        let have = got.matrix()[(x1 * dz + z1, x2 * dz + z2)];
                        assert!((want - have).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn conditional_quantities() {
        let a = DensityMatrix::from_diagonal(&[0.1, 0.9]).unwrap();
        let b = DensityMatrix::maximally_mixed(3);
        assert!((cond_entropy(&a.tensor(&b), [2, 3]).unwrap() - entropy(&a)).abs() < 1e-13);
        assert!((cond_entropy(&bell(3), [3, 3]).unwrap() + 3f64.ln()).abs() < 1e-12);
        let xyz = bell(2).tensor(&DensityMatrix::maximally_mixed(2));
        assert!((qcmi(&xyz, [2, 2, 2]).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        let prod = a.tensor(&bell(2));
        assert!(qcmi(&prod, [2, 2, 2]).unwrap().abs() < 1e-12);
        assert!((mutual_information(&bell(2), [2, 2]).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(cmi(&prod, &[2, 2, 2], &[0], &[0], &[1]).is_err());
    }
}
