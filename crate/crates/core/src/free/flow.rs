//! p = 1: the free norm of a finitely supported element is the cost of the
//! cheapest transshipment of its positive part onto its negative part, with
//! the base point absorbing or supplying the imbalance.

use super::{Decomposition, FreeElement, Molecule};
use crate::error::Result;
use crate::scalar::Scalar;

/// Exact `‖m‖₁` by successive shortest paths on the complete graph over the
/// host, plus the flow as a decomposition attaining it.
pub fn exact_norm_p1<S: Scalar>(m: &FreeElement<S>) -> Result<(S, Decomposition<S>)> {
    let host = m.host().clone();
    let n = host.len();
    let mut excess = vec![S::zero(); n];
    for (i, w) in m.iter() {
        excess[i] = w;
    }
    let net: S = m.iter().map(|(_, w)| w).sum();
    excess[host.base()] = -net;

    let mass: S = excess.iter().map(|e| e.abs()).sum();
    let eps = S::epsilon() * S::of(16.0 * n as f64) * mass.max(S::one());
    let cost = |i: usize, j: usize| host.dist(i, j);

    // flow[i * n + j] > 0 ships mass from i to j; never both directions
    let mut flow = vec![S::zero(); n * n];
    let mut potential = vec![S::zero(); n];
    let mut dist = vec![S::zero(); n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];

    while excess.iter().any(|&e| e > eps) {
        // multi-source Dijkstra on reduced costs, dense O(n^2)
        for v in 0..n {
            dist[v] = if excess[v] > eps { S::zero() } else { S::infinity() };
            pred[v] = usize::MAX;
            done[v] = false;
        }
        for _ in 0..n {
            let Some(u) = (0..n).filter(|&v| !done[v]).min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap()) else {
                break;
            };
            if dist[u] == S::infinity() {
                break;
            }
            done[u] = true;
            for v in 0..n {
                if done[v] || v == u {
                    continue;
                }
                // cancelling existing flow v -> u is the cheaper residual arc
                let arc = if flow[v * n + u] > S::zero() { -cost(u, v) } else { cost(u, v) };
                let reduced = (arc + potential[u] - potential[v]).max(S::zero());
                if dist[u] + reduced < dist[v] {
                    dist[v] = dist[u] + reduced;
                    pred[v] = u;
                }
            }
        }
        let Some(t) = (0..n)
            .filter(|&v| excess[v] < -eps)
            .min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap())
        else {
            break;
        };
        for v in 0..n {
            potential[v] = potential[v] + dist[v];
        }

        let mut path = vec![t];
        while pred[*path.last().unwrap()] != usize::MAX {
            path.push(pred[*path.last().unwrap()]);
        }
        path.reverse();
        let s = path[0];
        let mut push = excess[s].min(-excess[t]);
        for w in path.windows(2) {
            let back = flow[w[1] * n + w[0]];
            if back > S::zero() {
                push = push.min(back);
            }
        }
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            let back = flow[v * n + u];
            if back > S::zero() {
                flow[v * n + u] = if back - push <= eps { S::zero() } else { back - push };
            } else {
                flow[u * n + v] = flow[u * n + v] + push;
            }
        }
        excess[s] = excess[s] - push;
        excess[t] = excess[t] + push;
    }

    let mut witness = Decomposition::new(host.clone());
    let mut value = S::zero();
    for i in 0..n {
        for j in 0..n {
            let f = flow[i * n + j];
            if f > S::zero() {
                let a = f * cost(i, j);
                value = value + a;
                witness.push(a, Molecule { x: i, y: j })?;
            }
        }
    }
    Ok((value, witness))
}
