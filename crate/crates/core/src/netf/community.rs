//! Louvain modularity maximisation on undirected weighted graphs.
//!
//! Graphs are passed as adjacency lists without self-loops plus a per-node
//! self-loop weight. A self-loop of weight `w` adds `2w` to its node's degree.

use rand::seq::SliceRandom;

use crate::rng;

const MAX_PASSES: usize = 1000;
const GAIN_EPS: f64 = 1e-12;

fn degrees(adj: &[Vec<(usize, f64)>], loops: &[f64]) -> Vec<f64> {
    adj.iter()
        .zip(loops)
        .map(|(nb, l)| nb.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * l)
        .collect()
}

/// Newman modularity of `partition`; 0 for a graph without edges.
pub fn modularity(adj: &[Vec<(usize, f64)>], loops: &[f64], partition: &[usize]) -> f64 {
    let k = degrees(adj, loops);
    let two_m: f64 = k.iter().sum();
    if two_m <= 0.0 {
        return 0.0;
    }
    let c_count = partition.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![0.0; c_count];
    let mut total = vec![0.0; c_count];
    for (i, nb) in adj.iter().enumerate() {
        let ci = partition[i];
        total[ci] += k[i];
        inside[ci] += 2.0 * loops[i];
        for &(j, w) in nb {
            if partition[j] == ci {
                inside[ci] += w;
            }
        }
    }
    inside
        .iter()
        .zip(&total)
        .map(|(l, t)| l / two_m - (t / two_m).powi(2))
        .sum()
}

/// One round of local moves. Returns the community of each node and
/// whether anything moved.
fn local_moves(adj: &[Vec<(usize, f64)>], loops: &[f64], order: &[usize]) -> (Vec<usize>, bool) {
    let n = adj.len();
    let k = degrees(adj, loops);
    let two_m: f64 = k.iter().sum();
    let mut comm: Vec<usize> = (0..n).collect();
    if two_m <= 0.0 {
        return (comm, false);
    }
    let mut tot = k.clone();
    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;

    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for &i in order {
            let old = comm[i];
            for &(j, w) in &adj[i] {
                let c = comm[j];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            tot[old] -= k[i];
            let gain = |c: usize, link: &[f64]| link[c] - tot[c] * k[i] / two_m;
            let mut best = old;
            let mut best_gain = gain(old, &link);
            touched.sort_unstable();
            for &c in &touched {
                let g = gain(c, &link);
                if g > best_gain + GAIN_EPS {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += k[i];
            comm[i] = best;
            if best != old {
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    (comm, any_move)
}

/// Renumbers labels densely in order of first appearance.
fn relabel(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; comm.len().max(comm.iter().max().map_or(0, |&m| m + 1))];
    let mut next = 0;
    let out = comm
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (out, next)
}

fn aggregate(
    adj: &[Vec<(usize, f64)>],
    loops: &[f64],
    comm: &[usize],
    count: usize,
) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
    let mut pair = std::collections::BTreeMap::<(usize, usize), f64>::new();
    let mut new_loops = vec![0.0; count];
    for (i, nb) in adj.iter().enumerate() {
        new_loops[comm[i]] += loops[i];
        for &(j, w) in nb {
            if j <= i {
                continue;
            }
            let (a, b) = (comm[i], comm[j]);
            if a == b {
                new_loops[a] += w;
            } else {
                *pair.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
            }
        }
    }
    let mut new_adj = vec![Vec::new(); count];
    for ((a, b), w) in pair {
        new_adj[a].push((b, w));
        new_adj[b].push((a, w));
    }
    (new_adj, new_loops)
}

/// Community label per node. Visiting order at each level is a seeded
/// shuffle, so the result is a function of the graph and `seed`.
pub fn louvain(adj: &[Vec<(usize, f64)>], loops: &[f64], seed: u64) -> Vec<usize> {
    let n = adj.len();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level_adj = adj.to_vec();
    let mut level_loops = loops.to_vec();
    let mut rng = rng::stream(seed, 0);

    loop {
        let mut order: Vec<usize> = (0..level_adj.len()).collect();
        order.shuffle(&mut rng);
        let (comm, moved) = local_moves(&level_adj, &level_loops, &order);
        if !moved {
            break;
        }
        let (comm, count) = relabel(&comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        let (a, l) = aggregate(&level_adj, &level_loops, &comm, count);
        level_adj = a;
        level_loops = l;
    }
    relabel(&membership).0
}
