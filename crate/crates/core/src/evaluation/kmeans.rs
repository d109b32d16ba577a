use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Clustering;
use crate::error::{Error, Result};

const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub clustering: Clustering,
    pub centroids: Vec<f64>,
    /// Within-cluster sum of squares of the returned clustering.
    pub wcss: f64,
    /// WCSS after every Lloyd iteration of the winning restart.
    pub history: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Lloyd's algorithm with k-means++ seeding; keeps the restart with the
/// lowest WCSS (earliest restart on ties).
///
/// `points` is row-major with `dim` columns. Restarts run on the current
/// rayon pool and each draws from its own seeded generator, so the result
/// does not depend on the thread count.
pub fn kmeans(points: &[f64], dim: usize, g: usize, restarts: usize, seed: u64) -> Result<KMeansResult> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::Input("point buffer does not match the dimension".into()));
    }
    let n = points.len() / dim;
    if g == 0 || g > n {
        return Err(Error::config(format!("cannot form {g} clusters from {n} points")));
    }
    let runs: Vec<KMeansResult> = (0..restarts.max(1))
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
            lloyd(points, dim, g, &mut rng, restart)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| if run.wcss < best.wcss { run } else { best })
        .expect("at least one restart");
    Ok(best)
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn seed_centroids(points: &[f64], dim: usize, g: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut chosen = vec![false; n];
    let mut centroids = Vec::with_capacity(g * dim);
    let first = rng.gen_range(0..n);
    chosen[first] = true;
    centroids.extend_from_slice(row(first));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(row(i), row(first))).collect();

    while centroids.len() < g * dim {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            while dist[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            // every point coincides with a centre: take any unused point
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen[next] = true;
        centroids.extend_from_slice(row(next));
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(i), row(next)));
        }
    }
    centroids
}

fn lloyd(points: &[f64], dim: usize, g: usize, rng: &mut ChaCha8Rng, restart: usize) -> KMeansResult {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut centroids = seed_centroids(points, dim, g, rng);
    let mut assignment = vec![usize::MAX; n];
    let mut history = Vec::new();

    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for i in 0..n {
            let (best, _) = (0..g)
                .map(|c| (c, sq_dist(row(i), &centroids[c * dim..(c + 1) * dim])))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // an empty cluster keeps its previous centre
        let mut sums = vec![0.0; g * dim];
        let mut counts = vec![0usize; g];
        for i in 0..n {
            let c = assignment[i];
            counts[c] += 1;
            for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(row(i)) {
                *s += x;
            }
        }
        for c in 0..g {
            if counts[c] > 0 {
                for (dst, s) in centroids[c * dim..(c + 1) * dim].iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                    *dst = s / counts[c] as f64;
                }
            }
        }
        history.push(wcss_of(points, dim, &assignment, &centroids));
    }
    let wcss = wcss_of(points, dim, &assignment, &centroids);
    KMeansResult { clustering: Clustering { assignment, groups: g }, centroids, wcss, history, restart }
}

fn wcss_of(points: &[f64], dim: usize, assignment: &[usize], centroids: &[f64]) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(&points[i * dim..(i + 1) * dim], &centroids[c * dim..(c + 1) * dim]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::nmi;

    #[test]
    fn separated_pairs_split_cleanly() {
        let pts = [0.0, 0.0, 0.1, 0.0, 10.0, 10.0, 10.1, 10.0];
        let r = kmeans(&pts, 2, 2, 5, 1).unwrap();
        let a = &r.clustering.assignment;
        assert_eq!(a[0], a[1]);
        assert_eq!(a[2], a[3]);
        assert_ne!(a[0], a[2]);
    }

    #[test]
    fn g_equals_n_gives_singletons() {
        let pts = [0.0, 1.0, 2.0, 5.0, 9.0];
        let r = kmeans(&pts, 1, 5, 3, 0).unwrap();
        let mut a = r.clustering.assignment.clone();
        a.sort_unstable();
        assert_eq!(a, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.wcss, 0.0);
    }

    #[test]
    fn duplicate_points_with_g_equal_n() {
        let pts = [1.0, 1.0, 1.0];
        let r = kmeans(&pts, 1, 3, 1, 0).unwrap();
        assert_eq!(r.wcss, 0.0);
    }

    #[test]
    fn single_cluster() {
        let pts = [0.0, 3.0, 7.0, 2.0];
        let r = kmeans(&pts, 2, 1, 2, 0).unwrap();
        assert_eq!(r.clustering.assignment, vec![0, 0]);
    }

    #[test]
    fn too_many_clusters() {
        assert!(matches!(kmeans(&[0.0, 1.0], 1, 3, 1, 0), Err(Error::Config(_))));
    }

    #[test]
    fn wcss_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<f64> = (0..400).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for seed in 0..10 {
            let r = kmeans(&pts, 2, 6, 1, seed).unwrap();
            for w in r.history.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", r.history);
            }
        }
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<f64> = (0..300).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = kmeans(&pts, 3, 4, 8, 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| kmeans(&pts, 3, 4, 8, 42).unwrap());
        assert_eq!(a, b);
        let truth = a.clustering.clone();
        assert_eq!(nmi(&truth, &b.clustering).unwrap(), 1.0);
    }
}
