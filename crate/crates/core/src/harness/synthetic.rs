use crate::error::{usage, Result};
use crate::metric::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// `true_k` means uniform in the unit cube, isotropic Gaussian points.
    GaussianMixture,
    /// Uniform in the unit cube.
    Uniform,
    /// Gaussian blobs centered on a regular grid in the unit cube.
    GridOfClusters,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::GaussianMixture => "gaussian-mixture",
            Generator::Uniform => "uniform",
            Generator::GridOfClusters => "grid-of-clusters",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Generator::GaussianMixture,
            Generator::Uniform,
            Generator::GridOfClusters,
        ]
        .into_iter()
        .find(|g| g.name() == s)
        .map_or_else(
            || {
                usage(format!(
                    "unknown generator '{s}', expected one of: gaussian-mixture, uniform, grid-of-clusters"
                ))
            },
            Ok,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub generator: Generator,
    pub n: usize,
    pub d: usize,
    /// Ignored by `Uniform`.
    pub true_k: usize,
    /// Standard deviation of each blob. Ignored by `Uniform`.
    pub spread: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn name(&self) -> String {
        match self.generator {
            Generator::Uniform => format!("{}-n{}-d{}-s{}", self.generator, self.n, self.d, self.seed),
            g => format!("{g}-n{}-d{}-k{}-s{}", self.n, self.d, self.true_k, self.seed),
        }
    }
}

/// Draws a dataset, bit-identical for equal specs.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    let SyntheticSpec {
        generator,
        n,
        d,
        true_k,
        spread,
        seed,
    } = *spec;
    if n == 0 || d == 0 {
        return usage(format!("synthetic dataset needs n >= 1 and d >= 1, got n={n}, d={d}"));
    }
    if generator != Generator::Uniform && (true_k == 0 || !spread.is_finite() || spread < 0.0) {
        return usage(format!(
            "{generator} needs true_k >= 1 and a finite spread >= 0, got true_k={true_k}, spread={spread}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n * d);
    match generator {
        Generator::Uniform => values.extend((0..n * d).map(|_| rng.random::<f64>())),
        Generator::GaussianMixture | Generator::GridOfClusters => {
            let means = if generator == Generator::GaussianMixture {
                (0..true_k * d).map(|_| rng.random::<f64>()).collect()
            } else {
                grid_means(true_k, d)
            };
            let noise = Normal::new(0.0, spread).expect("spread checked");
            for _ in 0..n {
                let c = rng.random_range(0..true_k);
                values.extend(means[c * d..(c + 1) * d].iter().map(|m| m + noise.sample(&mut rng)));
            }
        }
    }
    Dataset::new(values, d)
}

/// First `k` cells of the smallest per-axis grid holding `k` centers.
fn grid_means(k: usize, d: usize) -> Vec<f64> {
    let mut side = 1usize;
    while side.checked_pow(d as u32).is_some_and(|c| c < k) {
        side += 1;
    }
    let mut out = Vec::with_capacity(k * d);
    for c in 0..k {
        let mut rest = c;
        for _ in 0..d {
            out.push((rest % side) as f64 / side as f64 + 0.5 / side as f64);
            rest /= side;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::euclidean;

    fn spec(generator: Generator) -> SyntheticSpec {
        SyntheticSpec {
            generator,
            n: 1000,
            d: 2,
            true_k: 10,
            spread: 0.005,
            seed: 3,
        }
    }

    #[test]
    fn same_seed_same_data() {
        for g in [
            Generator::GaussianMixture,
            Generator::Uniform,
            Generator::GridOfClusters,
        ] {
            assert_eq!(generate(&spec(g)).unwrap(), generate(&spec(g)).unwrap());
        }
        let mut other = spec(Generator::Uniform);
        other.seed = 4;
        assert_ne!(generate(&spec(Generator::Uniform)).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn uniform_stays_in_unit_square() {
        let d = generate(&spec(Generator::Uniform)).unwrap();
        assert!(d.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn mixture_blobs_are_separated() {
        // Regenerate the component labels with the same stream to know truth.
        let s = spec(Generator::GaussianMixture);
        let data = generate(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for _ in 0..s.true_k * s.d {
            rng.random::<f64>();
        }
        let noise = Normal::new(0.0, s.spread).unwrap();
        let mut labels = Vec::new();
        for _ in 0..s.n {
            labels.push(rng.random_range(0..s.true_k));
            for _ in 0..s.d {
                noise.sample(&mut rng);
            }
        }
        let mut pick = ChaCha8Rng::seed_from_u64(99);
        let (mut ok, mut total) = (0, 0);
        for _ in 0..2000 {
            let (a, b, c) = (
                pick.random_range(0..s.n),
                pick.random_range(0..s.n),
                pick.random_range(0..s.n),
            );
            if a == b || labels[a] != labels[b] || labels[a] == labels[c] {
                continue;
            }
            total += 1;
            if euclidean(data.point(a), data.point(b)) < euclidean(data.point(a), data.point(c)) {
                ok += 1;
            }
        }
        assert!(total > 100);
        assert!(ok as f64 >= 0.99 * total as f64, "{ok}/{total}");
    }

    #[test]
    fn grid_has_distinct_centers() {
        let m = grid_means(10, 2);
        assert_eq!(m.len(), 20);
        assert_eq!(&m[..4], &[0.125, 0.125, 0.375, 0.125]);
        let g = generate(&spec(Generator::GridOfClusters)).unwrap();
        assert_eq!(g.len(), 1000);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = spec(Generator::GaussianMixture);
        s.true_k = 0;
        assert!(generate(&s).is_err());
        s = spec(Generator::GaussianMixture);
        s.spread = f64::NAN;
        assert!(generate(&s).is_err());
        s = spec(Generator::Uniform);
        s.n = 0;
        assert!(generate(&s).is_err());
    }
}
