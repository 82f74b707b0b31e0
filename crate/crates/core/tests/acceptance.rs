//! Acceptance suite: one PASS or FAIL line per criterion, nonzero exit if
//! any fails. Run with `cargo test -p dtkmeans --test acceptance`.

mod common;

use common::oracle::{bound_violations, lockstep};
use dtkmeans::dualtree::{coalesce, decoalesce, NodeState};
use dtkmeans::harness::{generate, measure_peak, Generator, SyntheticSpec, TrackingAllocator};
use dtkmeans::kmeans::{cluster, random_initial_centroids};
use dtkmeans::tree::{dual_depth_first, SpaceTree, TraversalRules};
use dtkmeans::{Algorithm, ClusteringConfig, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

type Outcome = Result<String, String>;

fn blobs(n: usize, true_k: usize, seed: u64) -> Dataset {
    generate(&SyntheticSpec {
        generator: Generator::GaussianMixture,
        n,
        d: 2,
        true_k,
        spread: 0.01,
        seed,
    })
    .unwrap()
}

fn within(t: Instant, limit: Duration, detail: String) -> Outcome {
    let e = t.elapsed();
    if e > limit {
        Err(format!("{detail}; took {e:.1?}, limit {limit:?}"))
    } else {
        Ok(format!("{detail}; {e:.1?}"))
    }
}

fn exactness() -> Outcome {
    let t = Instant::now();
    let mut iterations = 0;
    for seed in 0..100 {
        iterations += lockstep(seed, &[Algorithm::DualTreeKd, Algorithm::DualTreeCover])?;
    }
    within(
        t,
        Duration::from_secs(120),
        format!("100 instances, {iterations} iterations identical to Lloyd"),
    )
}

fn bound_validity() -> Outcome {
    let mut frozen = 0;
    for seed in 0..20 {
        let (v, f) = bound_violations(seed);
        if let Some(first) = v.first() {
            return Err(format!("seed {seed}: {} violations, first: {first}", v.len()));
        }
        frozen += f;
    }
    if frozen == 0 {
        return Err("no frozen node was ever checked".into());
    }
    Ok(format!(
        "20 instances, both trees, 0 violations, {frozen} frozen node checks"
    ))
}

fn avg_calcs(r: &dtkmeans::ClusteringResult) -> f64 {
    r.iterations.iter().map(|s| s.distance_calcs as f64).sum::<f64>() / r.iterations.len() as f64
}

fn avg_ms(r: &dtkmeans::ClusteringResult) -> f64 {
    r.iterations
        .iter()
        .map(|s| s.wall_time.as_secs_f64() * 1e3)
        .sum::<f64>()
        / r.iterations.len() as f64
}

fn pruning() -> Outcome {
    let t = Instant::now();
    let (n, k) = (100_000, 250);
    let data = blobs(n, k, 1);
    let initial = random_initial_centroids(&data, k, 1).unwrap();
    let r = cluster(&data, &initial, Algorithm::DualTreeKd, &ClusteringConfig::new(k)).map_err(|e| e.to_string())?;
    let frac = avg_calcs(&r) / (k * n) as f64;
    let detail = format!(
        "{:.0} distances per iteration over {} iterations = {:.3}% of kN",
        avg_calcs(&r),
        r.iterations.len(),
        100.0 * frac
    );
    if frac >= 0.05 {
        return Err(detail);
    }
    within(t, Duration::from_secs(300), detail)
}

fn scaling() -> Outcome {
    let n = 100_000;
    let data = blobs(n, 1000, 2);
    let mut ratio = Vec::new();
    for (algorithm, iters) in [(Algorithm::DualTreeKd, 1000), (Algorithm::Naive, 5)] {
        let mut ms = Vec::new();
        for k in [100, 1000] {
            let initial = random_initial_centroids(&data, k, 2).unwrap();
            let config = ClusteringConfig {
                max_iterations: iters,
                ..ClusteringConfig::new(k)
            };
            let r = cluster(&data, &initial, algorithm, &config).map_err(|e| e.to_string())?;
            ms.push(avg_ms(&r));
        }
        ratio.push((algorithm, ms[1] / ms[0], ms));
    }
    let detail = format!(
        "time ratio k=1000/k=100: dualtree-kd {:.2} ({:.2}ms -> {:.2}ms), naive {:.2} ({:.2}ms -> {:.2}ms)",
        ratio[0].1, ratio[0].2[0], ratio[0].2[1], ratio[1].1, ratio[1].2[0], ratio[1].2[1]
    );
    if ratio[0].1 < ratio[1].1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn memory() -> Outcome {
    let (n, k) = (100_000, 1000);
    let data = blobs(n, k, 3);
    let initial = random_initial_centroids(&data, k, 3).unwrap();
    let table = k * n * 8;
    let mut peaks = Vec::new();
    for algorithm in [Algorithm::DualTreeKd, Algorithm::Elkan] {
        let config = ClusteringConfig {
            max_iterations: 3,
            ..ClusteringConfig::new(k)
        };
        let (r, peak) = measure_peak(|| cluster(&data, &initial, algorithm, &config));
        r.map_err(|e| format!("{algorithm}: {e}"))?;
        peaks.push(peak.ok_or("allocation tracking is not installed")?);
    }
    let detail = format!(
        "tracked peak: dualtree-kd {} bytes ({:.4} of kN*8), elkan {} bytes ({:.2} of kN*8)",
        peaks[0],
        peaks[0] as f64 / table as f64,
        peaks[1],
        peaks[1] as f64 / table as f64
    );
    if (peaks[0] as f64) < 0.1 * table as f64 && peaks[1] >= table {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_data(rng: &mut ChaCha8Rng, max_n: usize) -> Dataset {
    let n = rng.random_range(1..=max_n);
    let d = rng.random_range(1..=4);
    Dataset::new(
        (0..n * d)
            .map(|_| rng.random_range(-8..8) as f64 * rng.random::<f64>())
            .collect(),
        d,
    )
    .unwrap()
}

fn structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..50 {
        let data = random_data(&mut rng, 200);
        SpaceTree::cover(&data)
            .unwrap()
            .validate(&data)
            .map_err(|e| format!("cover build {i}: {e}"))?;
        let data = random_data(&mut rng, 400);
        let leaf = rng.random_range(1..30);
        SpaceTree::kd(&data, leaf)
            .unwrap()
            .validate(&data)
            .map_err(|e| format!("kd build {i}: {e}"))?;
    }
    for i in 0..100 {
        let data = random_data(&mut rng, 150);
        let t = if i % 2 == 0 {
            SpaceTree::cover(&data)
        } else {
            SpaceTree::kd(&data, 3)
        }
        .unwrap();
        let before = t.topology();
        let states: Vec<NodeState> = (0..t.node_count())
            .map(|_| NodeState {
                canchange: rng.random_bool(0.6),
                ..NodeState::fresh()
            })
            .collect();
        let view = coalesce(&t, &states);
        if view.node_count() > t.node_count() || decoalesce(&t) != before || t.topology() != before {
            return Err(format!("coalesce round trip {i} changed the tree"));
        }
    }
    Ok("50 cover and 50 kd builds validated, 100 coalesce round trips identical".into())
}

#[derive(Default)]
struct Everything {
    pairs: HashSet<(usize, usize)>,
    calls: u64,
}

impl TraversalRules for Everything {
    fn score(&mut self, _: usize, _: usize) -> f64 {
        0.0
    }

    fn base_case(&mut self, q: usize, r: usize) {
        self.calls += 1;
        self.pairs.insert((q, r));
    }
}

fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let qd = random_data(&mut rng, 120);
        let rd = Dataset::new(
            (0..rng.random_range(1..=60) * qd.dim())
                .map(|_| rng.random::<f64>())
                .collect(),
            qd.dim(),
        )
        .unwrap();
        let build = |d: &Dataset, cover: bool| {
            if cover {
                SpaceTree::cover(d)
            } else {
                SpaceTree::kd(d, 4)
            }
            .unwrap()
        };
        let (qt, rt) = (build(&qd, i % 2 == 0), build(&rd, i % 3 == 0));
        let mut rules = Everything::default();
        dual_depth_first(&qt, &rt, &mut rules);
        let want = (qd.len() * rd.len()) as u64;
        if rules.pairs.len() as u64 != want || rules.calls != want {
            return Err(format!(
                "pair {i}: {} distinct of {} calls, want {want}",
                rules.pairs.len(),
                rules.calls
            ));
        }
    }
    Ok("20 tree pairs, every point pair visited exactly once".into())
}

fn baselines() -> Outcome {
    let mut iterations = 0;
    for seed in 0..100 {
        iterations += lockstep(seed, &[Algorithm::Hamerly, Algorithm::Elkan])?;
    }
    Ok(format!(
        "100 instances, {iterations} iterations identical to Lloyd, naive counted kN every iteration"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exactness", exactness),
        ("bound validity", bound_validity),
        ("pruning effectiveness", pruning),
        ("scaling shape", scaling),
        ("memory contract", memory),
        ("structural invariants", structure),
        ("traversal completeness", completeness),
        ("baseline equivalence", baselines),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        match f() {
            Ok(d) => println!("PASS {} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
