//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's numerical code: matchings are found
//! by enumerating injections, iterations are dense loops over adjacency
//! matrices, and NMI is computed from an explicit contingency table.

#![allow(dead_code)]

use rolegauss::evaluation::Clustering;
use rolegauss::gauss::{Energy, Gaussian, PairGrad};
use rolegauss::Graph;

// ---------------------------------------------------------------- gradients

pub const FD_STEP: f64 = 1e-6;
pub const FD_REL: f64 = 1e-5;
pub const FD_ABS: f64 = 1e-8;

pub fn close(analytic: f64, numeric: f64) -> bool {
    let err = (analytic - numeric).abs();
    err <= FD_ABS || err <= FD_REL * analytic.abs().max(numeric.abs())
}

/// One random pair of Gaussians in the requested layout.
pub struct Draw {
    pub mi: Vec<f64>,
    pub mj: Vec<f64>,
    pub ci: Vec<f64>,
    pub cj: Vec<f64>,
}

/// Compares `score_grad` with central differences of `score` for every
/// parameter; returns the first mismatch.
pub fn check_gradients(energy: Energy, draw: &Draw) -> Result<(), String> {
    let mut grad = PairGrad::default();
    energy.score_grad(Gaussian::new(&draw.mi, &draw.ci), Gaussian::new(&draw.mj, &draw.cj), &mut grad);
    let score =
        |mi: &[f64], mj: &[f64], ci: &[f64], cj: &[f64]| energy.score(Gaussian::new(mi, ci), Gaussian::new(mj, cj));
    let slots: [(&Vec<f64>, &Vec<f64>, &str); 4] = [
        (&draw.mi, &grad.mean_i, "mean_i"),
        (&draw.mj, &grad.mean_j, "mean_j"),
        (&draw.ci, &grad.cov_i, "cov_i"),
        (&draw.cj, &grad.cov_j, "cov_j"),
    ];
    for (slot, (values, analytic, name)) in slots.iter().enumerate() {
        if analytic.len() != values.len() {
            return Err(format!("{name}: gradient has {} entries for {} parameters", analytic.len(), values.len()));
        }
        for l in 0..values.len() {
            let eval = |delta: f64| {
                let mut p = [draw.mi.clone(), draw.mj.clone(), draw.ci.clone(), draw.cj.clone()];
                p[slot][l] += delta;
                score(&p[0], &p[1], &p[2], &p[3])
            };
            let numeric = (eval(FD_STEP) - eval(-FD_STEP)) / (2.0 * FD_STEP);
            if !close(analytic[l], numeric) {
                return Err(format!("{energy} {name}[{l}]: analytic {} vs numeric {numeric}", analytic[l]));
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------------ graphs

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

fn neighbours(a: &[Vec<bool>], u: usize) -> Vec<usize> {
    (0..a.len()).filter(|&v| a[u][v]).collect()
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    f(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == u && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every connected simple graph on 1..=max_n nodes, one per isomorphism class.
pub fn connected_graphs(max_n: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let index = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
        let mut perms = Vec::new();
        for_each_permutation(n, |p| perms.push(p.to_vec()));
        // image of each pair index under each permutation
        let images: Vec<Vec<usize>> =
            perms.iter().map(|p| pairs.iter().map(|&(u, v)| index(p[u], p[v])).collect()).collect();
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..(1u32 << pairs.len()) {
            let canonical = images
                .iter()
                .map(|img| (0..pairs.len()).filter(|&b| mask >> b & 1 == 1).fold(0u32, |acc, b| acc | 1 << img[b]))
                .min()
                .unwrap();
            if !seen.insert(canonical) || canonical != mask {
                continue;
            }
            let edges: Vec<(usize, usize)> =
                (0..pairs.len()).filter(|&b| mask >> b & 1 == 1).map(|b| pairs[b]).collect();
            if is_connected(n, &edges) {
                out.push(Graph::from_edges(n, edges).unwrap());
            }
        }
    }
    out
}

/// All automorphisms of `g`, found by checking every permutation.
pub fn automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let a = adjacency(g);
    let n = g.node_count();
    let mut out = Vec::new();
    for_each_permutation(n, |p| {
        if (0..n).all(|u| (0..n).all(|v| a[u][v] == a[p[u]][p[v]])) {
            out.push(p.to_vec());
        }
    });
    out
}

pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|u| (u, (u + 1) % n))).unwrap()
}

/// Two `k`-cliques joined through a path of `bridge` extra nodes.
pub fn barbell(k: usize, bridge: usize) -> Graph {
    let n = 2 * k + bridge;
    let mut edges = Vec::new();
    for base in [0, k + bridge] {
        for u in base..base + k {
            for v in u + 1..base + k {
                edges.push((u, v));
            }
        }
    }
    let mut chain: Vec<usize> = vec![k - 1];
    chain.extend(k..k + bridge);
    chain.push(k + bridge);
    for w in chain.windows(2) {
        edges.push((w[0], w[1]));
    }
    Graph::from_edges(n, edges).unwrap()
}

// ---------------------------------------------------------- similarities

/// Best total weight over all injections of the smaller side into the larger.
pub fn brute_matching(w: &[Vec<f64>]) -> f64 {
    let rows = w.len();
    let cols = if rows == 0 { 0 } else { w[0].len() };
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows > cols {
        let t: Vec<Vec<f64>> = (0..cols).map(|c| (0..rows).map(|r| w[r][c]).collect()).collect();
        return brute_matching(&t);
    }
    fn go(w: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == w.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(w[row][c] + go(w, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    go(w, 0, &mut vec![false; cols])
}

fn weights(a: &[Vec<bool>], prev: &[Vec<f64>], u: usize, v: usize) -> Vec<Vec<f64>> {
    let (nu, nv) = (neighbours(a, u), neighbours(a, v));
    nu.iter().map(|&x| nv.iter().map(|&y| prev[x][y]).collect()).collect()
}

pub fn brute_rolesim(g: &Graph, beta: f64, iterations: usize) -> Vec<Vec<f64>> {
    let a = adjacency(g);
    let n = a.len();
    let mut r = vec![vec![1.0; n]; n];
    for _ in 0..iterations {
        let mut next = vec![vec![0.0; n]; n];
        for u in 0..n {
            for v in 0..n {
                let (du, dv) = (neighbours(&a, u).len(), neighbours(&a, v).len());
                next[u][v] = if du == 0 && dv == 0 {
                    1.0
                } else if du == 0 || dv == 0 {
                    beta
                } else {
                    // every weight is at least β > 0, so the best matching is
                    // always of full size min(du, dv)
                    let w = brute_matching(&weights(&a, &r, u, v));
                    (1.0 - beta) * w / (du + dv - du.min(dv)) as f64 + beta
                };
            }
        }
        r = next;
    }
    r
}

pub fn brute_matchsim(g: &Graph, iterations: usize) -> Vec<Vec<f64>> {
    let a = adjacency(g);
    let n = a.len();
    let mut m: Vec<Vec<f64>> = (0..n).map(|u| (0..n).map(|v| if u == v { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..iterations {
        let mut next = vec![vec![0.0; n]; n];
        for u in 0..n {
            for v in 0..n {
                let (du, dv) = (neighbours(&a, u).len(), neighbours(&a, v).len());
                next[u][v] = if u == v || (du == 0 && dv == 0) {
                    1.0
                } else if du == 0 || dv == 0 {
                    0.0
                } else {
                    brute_matching(&weights(&a, &m, u, v)) / du.max(dv) as f64
                };
            }
        }
        m = next;
    }
    m
}

pub fn brute_simrank(g: &Graph, c: f64, iterations: usize) -> Vec<Vec<f64>> {
    let a = adjacency(g);
    let n = a.len();
    let mut s: Vec<Vec<f64>> = (0..n).map(|u| (0..n).map(|v| if u == v { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..iterations {
        let mut next = vec![vec![0.0; n]; n];
        for u in 0..n {
            for v in 0..n {
                let (nu, nv) = (neighbours(&a, u), neighbours(&a, v));
                next[u][v] = if u == v {
                    1.0
                } else if nu.is_empty() || nv.is_empty() {
                    0.0
                } else {
                    let total: f64 =
                        nu.iter().flat_map(|&x| nv.iter().map(move |&y| (x, y))).map(|(x, y)| s[x][y]).sum();
                    c * total / (nu.len() * nv.len()) as f64
                };
            }
        }
        s = next;
    }
    s
}

// ------------------------------------------------------------------ metrics

/// NMI from an explicit contingency table, natural logarithms,
/// `2 I / (H(c) + H(d))`, defined as 1 when both entropies vanish.
pub fn brute_nmi(c: &[usize], d: &[usize]) -> f64 {
    let n = c.len() as f64;
    let gc = c.iter().max().map_or(0, |m| m + 1);
    let gd = d.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0.0; gd]; gc];
    for (&a, &b) in c.iter().zip(d) {
        table[a][b] += 1.0;
    }
    let row: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..gd).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let h = |counts: &[f64]| -> f64 { counts.iter().filter(|&&x| x > 0.0).map(|&x| -(x / n) * (x / n).ln()).sum() };
    let (hc, hd) = (h(&row), h(&col));
    let mut mi = 0.0;
    for i in 0..gc {
        for j in 0..gd {
            let nij = table[i][j];
            if nij > 0.0 {
                mi += nij / n * (n * nij / (row[i] * col[j])).ln();
            }
        }
    }
    if hc + hd == 0.0 {
        1.0
    } else {
        2.0 * mi / (hc + hd)
    }
}

/// Every set partition of `0..n` as a restricted-growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for label in 0..=next {
            prefix.push(label);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

pub fn clustering(labels: &[usize]) -> Clustering {
    let groups = labels.iter().max().map_or(0, |m| m + 1);
    Clustering::new(labels.to_vec(), groups).unwrap()
}
