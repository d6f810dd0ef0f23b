//! Distances between ensembles: the termwise distance `D_0` and the
//! Kantorovich optimal-transport distance `D_K` with trace-distance cost.

use super::channel::DiscreteEnsemble;
use super::state::{trace_distance, trace_norm, DensityMatrix};
use crate::error::{Error, Result};

/// Largest ensemble size accepted by [`kantorovich`].
pub const MAX_SUPPORT: usize = 16;

const REDUCED_COST_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

/// `D_0(mu, nu) = (1/2) sum_i ||p_i rho_i - q_i sigma_i||_1`, the shorter
/// ensemble padded with zero-weight ground states.
pub fn d0_distance(mu: &DiscreteEnsemble, nu: &DiscreteEnsemble) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::validation("ensembles live on different spaces"));
    }
    let n = mu.len().max(nu.len());
    let ground = DensityMatrix::basis(mu.dim(), 0);
    let term = |e: &DiscreteEnsemble, i: usize| {
        if i < e.len() {
            (e.probs()[i], e.states()[i].clone())
        } else {
            (0.0, ground.clone())
        }
    };
    let mut total = 0.0;
    for i in 0..n {
        let (p, r) = term(mu, i);
        let (q, s) = term(nu, i);
        total += trace_norm(&(r.matrix().scale(p) - s.matrix().scale(q)));
    }
    Ok(0.5 * total)
}

/// `D_K(mu, nu) = min_P sum_ij P_ij T(rho_i, sigma_j)` over couplings of the
/// weight vectors.
pub fn kantorovich(mu: &DiscreteEnsemble, nu: &DiscreteEnsemble) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::validation("ensembles live on different spaces"));
    }
    if mu.len() > MAX_SUPPORT || nu.len() > MAX_SUPPORT {
        return Err(Error::resource(format!(
            "ensembles with more than {MAX_SUPPORT} elements are not supported"
        )));
    }
    let cost = mu
        .states()
        .iter()
        .map(|r| nu.states().iter().map(|s| trace_distance(r, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let (value, _) = transport(mu.probs(), nu.probs(), &cost)?;
    Ok(value)
}

/// Minimum-cost transport plan between `supply` and `demand`, which must carry
/// the same total mass. Transportation simplex from a northwest-corner basis.
pub fn transport(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<(f64, Vec<Vec<f64>>)> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 || cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(Error::validation("transport problem has inconsistent shape"));
    }
    if supply.iter().chain(demand).any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::validation("transport weights must be nonnegative"));
    }
    let (ts, td) = (supply.iter().sum::<f64>(), demand.iter().sum::<f64>());
    if (ts - td).abs() > 1e-12 * ts.max(1.0) {
        return Err(Error::validation("supply and demand totals differ"));
    }

    let mut x = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];
    {
        let mut a = supply.to_vec();
        let mut b = demand.to_vec();
        b[n - 1] += ts - td;
        let (mut i, mut j) = (0, 0);
        loop {
            let t = a[i].min(b[j]).max(0.0);
            x[i][j] = t;
            basic[i][j] = true;
            a[i] -= t;
            b[j] -= t;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && a[i] <= b[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    for _ in 0..MAX_PIVOTS {
        let (u, v) = potentials(&basic, cost);
        let mut entering = None;
        'search: for i in 0..m {
            for j in 0..n {
                if !basic[i][j] && cost[i][j] - u[i] - v[j] < -REDUCED_COST_TOL {
                    entering = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            let value = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| x[i][j] * cost[i][j]).sum();
            return Ok((value, x));
        };
        let path = tree_path(&basic, ei, ej);
        let mut leave: Option<(usize, usize)> = None;
        for &(i, j) in path.iter().step_by(2) {
            if leave.map_or(true, |(li, lj)| x[i][j] < x[li][lj]) {
                leave = Some((i, j));
            }
        }
        let (li, lj) = leave.expect("a cycle has a decreasing cell");
        let theta = x[li][lj];
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                x[i][j] = (x[i][j] - theta).max(0.0);
            } else {
                x[i][j] += theta;
            }
        }
        x[ei][ej] = theta;
        basic[ei][ej] = true;
        basic[li][lj] = false;
        x[li][lj] = 0.0;
    }
    Err(Error::precision("transport simplex did not terminate"))
}

/// Dual potentials with `u_0 = 0` and `u_i + v_j = c_ij` on basic cells.
fn potentials(basic: &[Vec<bool>], cost: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (basic.len(), basic[0].len());
    let mut u = vec![f64::NAN; m];
    let mut v = vec![f64::NAN; n];
    u[0] = 0.0;
    let mut stack = vec![(true, 0usize)];
    while let Some((is_row, k)) = stack.pop() {
        if is_row {
            for j in 0..n {
                if basic[k][j] && v[j].is_nan() {
                    v[j] = cost[k][j] - u[k];
                    stack.push((false, j));
                }
            }
        } else {
            for i in 0..m {
                if basic[i][k] && u[i].is_nan() {
                    u[i] = cost[i][k] - v[k];
                    stack.push((true, i));
                }
            }
        }
    }
    (u, v)
}

/// Basic cells on the tree path from row `r` to column `c`, starting at row
/// `r`. Cells alternate between losing and gaining mass when `(r, c)` enters.
fn tree_path(basic: &[Vec<bool>], r: usize, c: usize) -> Vec<(usize, usize)> {
    let (m, n) = (basic.len(), basic[0].len());
    // Nodes 0..m are rows, m..m+n columns.
    let mut parent = vec![usize::MAX; m + n];
    parent[r] = r;
    let mut queue = std::collections::VecDeque::from([r]);
    while let Some(node) = queue.pop_front() {
        if node == m + c {
            break;
        }
        let next: Vec<usize> = if node < m {
            (0..n).filter(|&j| basic[node][j]).map(|j| m + j).collect()
        } else {
            (0..m).filter(|&i| basic[i][node - m]).collect()
        };
        for nb in next {
            if parent[nb] == usize::MAX {
                parent[nb] = node;
                queue.push_back(nb);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = m + c;
    while node != r {
        let p = parent[node];
        debug_assert!(p != usize::MAX, "basis is a spanning tree");
        cells.push(if node < m { (node, p - m) } else { (p, node - m) });
        node = p;
    }
    cells.reverse();
    cells
}
