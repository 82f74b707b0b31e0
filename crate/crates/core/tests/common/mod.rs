#![allow(dead_code)]

pub mod oracle;

use dtkmeans::harness::{generate, Generator, SyntheticSpec};
use dtkmeans::kmeans::random_initial_centroids;
use dtkmeans::metric::euclidean;
use dtkmeans::{CentroidSet, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub seed: u64,
    pub data: Dataset,
    pub initial: Dataset,
}

/// Seeded random instance. Every fourth seed uses small integer
/// coordinates so that duplicate points and exact ties show up.
pub fn instance(seed: u64, n: (usize, usize), d: (usize, usize), k: (usize, usize)) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(n.0..=n.1);
    let d = rng.random_range(d.0..=d.1);
    let k = rng.random_range(k.0..=k.1).min(n);
    let data = match seed % 4 {
        0 => Dataset::new((0..n * d).map(|_| rng.random_range(0..6) as f64).collect(), d).unwrap(),
        1 => Dataset::new((0..n * d).map(|_| rng.random::<f64>()).collect(), d).unwrap(),
        _ => generate(&SyntheticSpec {
            generator: Generator::GaussianMixture,
            n,
            d,
            true_k: rng.random_range(1..=12),
            spread: 0.02,
            seed,
        })
        .unwrap(),
    };
    let initial = random_initial_centroids(&data, k, seed).unwrap();
    Instance { seed, data, initial }
}

/// Owner (lowest index on ties), nearest and second-nearest distance.
pub fn brute(x: &[f64], c: &CentroidSet) -> (usize, f64, f64) {
    let (mut best, mut d1, mut d2) = (0, f64::INFINITY, f64::INFINITY);
    for j in 0..c.k() {
        let d = euclidean(x, c.centroid(j));
        if d < d1 {
            d2 = d1;
            d1 = d;
            best = j;
        } else if d < d2 {
            d2 = d;
        }
    }
    (best, d1, d2)
}

pub fn brute_all(data: &Dataset, c: &CentroidSet) -> Vec<(usize, f64, f64)> {
    data.rows().map(|x| brute(x, c)).collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

pub fn centroids_close(a: &CentroidSet, b: &CentroidSet, rel: f64) -> bool {
    a.positions()
        .values()
        .iter()
        .zip(b.positions().values())
        .all(|(&x, &y)| close(x, y, rel))
}

/// Absolute slack for comparing a stored bound with a recomputed distance.
pub fn slack(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}
