use proptest::prelude::*;
use rolegauss::evaluation::Clustering;
use rolegauss::gauss::{train, CovarianceMode, Energy, TrainConfig};
use rolegauss::graph::generate_role_toy;
use rolegauss::pipeline::{run_and_score, PipelineConfig};
use rolegauss::sampling::{build_training_set, sample_positives};
use rolegauss::similarity::{Measure, SimilarityMatrix};

fn random_matrix(n: usize, values: &[f64]) -> SimilarityMatrix {
    let mut m = SimilarityMatrix::from_scores(n, vec![0.0; n * n], Measure::RoleSim).unwrap();
    let mut it = values.iter().cycle();
    for u in 0..n {
        m.set_symmetric(u, u, 1.0);
        for v in u + 1..n {
            // coarse values so ties are common
            m.set_symmetric(u, v, (it.next().unwrap() * 4.0).round() / 4.0);
        }
    }
    m
}

fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (4usize..20).prop_flat_map(|n| (Just(n), prop::collection::vec(0.0..1.0f64, n * n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn positives_are_the_top_k_with_id_ties((n, values) in matrix_strategy(), k_frac in 0.0..1.0f64) {
        let m = random_matrix(n, &values);
        let k = 1 + (k_frac * (n - 2) as f64) as usize;
        for v in 0..n {
            let pos = sample_positives(&m, v, k).unwrap();
            prop_assert_eq!(pos.len(), k);
            prop_assert!(!pos.contains(&v));
            let key = |u: usize| (-m.get(v, u), u);
            for w in pos.windows(2) {
                prop_assert!(key(w[0]) < key(w[1]));
            }
            let worst = key(*pos.last().unwrap());
            for u in (0..n).filter(|u| *u != v && !pos.contains(u)) {
                prop_assert!(key(u) > worst);
            }
        }
    }

    #[test]
    fn negatives_avoid_self_and_positives((n, values) in matrix_strategy(), r in 1usize..4, seed in any::<u64>()) {
        let m = random_matrix(n, &values);
        let k = (n - 1) / 2;
        prop_assume!(k >= 1);
        let set = build_training_set(&m, k, r, seed).unwrap();
        prop_assert_eq!(set.pair_count(), n * k * r);
        for round in &set.negatives {
            for (v, neg) in round.iter().enumerate() {
                prop_assert_eq!(neg.len(), k);
                let mut sorted = neg.clone();
                sorted.sort_unstable();
                sorted.dedup();
                prop_assert_eq!(sorted.len(), k, "distinct negatives when the pool is large enough");
                prop_assert!(neg.iter().all(|u| *u != v && !set.positives[v].contains(u)));
            }
        }
        prop_assert_eq!(&set, &build_training_set(&m, k, r, seed).unwrap());
    }

    #[test]
    fn constraints_hold_after_every_epoch(
        (n, values) in matrix_strategy(),
        epochs in 1usize..4,
        spherical in any::<bool>(),
        energy in prop::sample::select(vec![Energy::ExpectedLikelihood, Energy::KlSymmetric, Energy::KlDirected]),
        rate in 0.01..2.0f64,
    ) {
        let m = random_matrix(n, &values);
        let set = build_training_set(&m, 2, 2, 3).unwrap();
        let mode = if spherical { CovarianceMode::Spherical } else { CovarianceMode::Diagonal };
        let cfg = TrainConfig { energy, mode, dim: 4, epochs, learning_rate: rate, mean_bound: 0.5, cov_min: 0.2, cov_max: 1.5, ..Default::default() };
        let (emb, report) = train(&set, &cfg).unwrap();
        prop_assert_eq!(report.epoch_losses.len(), epochs);
        prop_assert!(emb.satisfies_bounds(cfg.mean_bound, cfg.cov_min, cfg.cov_max));
        prop_assert!(emb.means.iter().chain(&emb.covariances).all(|x| x.is_finite()));
        prop_assert!(report.epoch_losses.iter().all(|l| l.is_finite() && *l >= 0.0));
    }
}

#[test]
fn training_is_reproducible() {
    let m = random_matrix(12, &(0..144).map(|i| ((i * 37) % 101) as f64 / 101.0).collect::<Vec<_>>());
    let set = build_training_set(&m, 3, 4, 9).unwrap();
    let cfg = TrainConfig { dim: 6, epochs: 5, ..Default::default() };
    let (a, ra) = train(&set, &cfg).unwrap();
    let (b, rb) = train(&set, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.epoch_losses, rb.epoch_losses);
    let (c, _) = train(&set, &TrainConfig { seed: cfg.seed + 1, ..cfg }).unwrap();
    assert_ne!(a.means, c.means);
}

#[test]
fn toy_roles_are_recovered() {
    let (g, roles) = generate_role_toy();
    let labels = Clustering::from_labels(&roles.iter().map(|r| r.name()).collect::<Vec<_>>());
    for seed in 0..5 {
        let mut cfg = PipelineConfig { k: 5, r: 20, seed, ..Default::default() };
        cfg.train.dim = 2;
        let (_, report) = run_and_score(&g, &labels, &cfg).unwrap();
        assert_eq!(report.nmi, Some(1.0), "seed {seed}");
    }
}
