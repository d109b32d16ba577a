//! Maximum-weight bipartite matching over a dense weight matrix.

use serde::{Deserialize, Serialize};

/// How neighbour sets are matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMode {
    /// Optimal assignment (Hungarian algorithm).
    Exact,
    /// Repeatedly take the heaviest remaining pair.
    Greedy,
    /// Exact when the smaller side has at most [`AUTO_EXACT_LIMIT`] nodes,
    /// greedy otherwise.
    #[default]
    Auto,
}

/// Greedy totals are not monotone in the weights, which can leave the
/// similarity iteration cycling instead of converging, so greedy is kept for
/// very large neighbourhoods only.
pub const AUTO_EXACT_LIMIT: usize = 128;

impl std::str::FromStr for MatchingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(MatchingMode::Exact),
            "greedy" => Ok(MatchingMode::Greedy),
            "auto" => Ok(MatchingMode::Auto),
            other => Err(format!("unknown matching mode {other:?}")),
        }
    }
}

/// Row-major `rows x cols` view of non-negative weights.
#[derive(Debug, Clone, Copy)]
pub struct Weights<'a> {
    pub data: &'a [f64],
    pub rows: usize,
    pub cols: usize,
}

impl<'a> Weights<'a> {
    pub fn new(data: &'a [f64], rows: usize, cols: usize) -> Self {
        assert_eq!(data.len(), rows * cols, "weight buffer does not match shape");
        Weights { data, rows, cols }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub weight: f64,
}

impl Matching {
    fn from_pairs(mut pairs: Vec<(usize, usize)>, w: &Weights) -> Self {
        pairs.sort_unstable();
        let weight = pairs.iter().map(|&(r, c)| w.at(r, c)).sum();
        Matching { pairs, weight }
    }
}

/// Matches `min(rows, cols)` pairs. Empty input gives an empty matching.
pub fn neighbor_matching(weights: Weights, mode: MatchingMode) -> Matching {
    if weights.rows == 0 || weights.cols == 0 {
        return Matching { pairs: Vec::new(), weight: 0.0 };
    }
    let exact = match mode {
        MatchingMode::Exact => true,
        MatchingMode::Greedy => false,
        MatchingMode::Auto => weights.rows.min(weights.cols) <= AUTO_EXACT_LIMIT,
    };
    if exact {
        hungarian(weights)
    } else {
        greedy(weights)
    }
}

/// Greedy matching: heaviest pair first, ties by smaller row then column.
pub fn greedy(w: Weights) -> Matching {
    let mut entries: Vec<(f64, usize, usize)> = Vec::with_capacity(w.rows * w.cols);
    for r in 0..w.rows {
        for c in 0..w.cols {
            entries.push((w.at(r, c), r, c));
        }
    }
    entries.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let target = w.rows.min(w.cols);
    let mut row_used = vec![false; w.rows];
    let mut col_used = vec![false; w.cols];
    let mut pairs = Vec::with_capacity(target);
    for (_, r, c) in entries {
        if row_used[r] || col_used[c] {
            continue;
        }
        row_used[r] = true;
        col_used[c] = true;
        pairs.push((r, c));
        if pairs.len() == target {
            break;
        }
    }
    Matching::from_pairs(pairs, &w)
}

/// Maximum-weight assignment of the smaller side via the potentials
/// formulation of the Hungarian algorithm, O(n^2 m).
pub fn hungarian(w: Weights) -> Matching {
    let transpose = w.rows > w.cols;
    let (n, m) = if transpose { (w.cols, w.rows) } else { (w.rows, w.cols) };
    let cost = |i: usize, j: usize| -> f64 {
        if transpose {
            -w.at(j, i)
        } else {
            -w.at(i, j)
        }
    };

    // 1-based arrays; index 0 is the virtual source column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0f64; m + 1];
    let mut used = vec![false; m + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let pairs = (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| {
            let (i, j) = (owner[j] - 1, j - 1);
            if transpose {
                (j, i)
            } else {
                (i, j)
            }
        })
        .collect();
    Matching::from_pairs(pairs, &w)
}
