//! Acceptance suite: one PASS/FAIL line per criterion P1..P11.
//!
//! Runs as a plain binary (no libtest harness) so the verdict lines always
//! reach stdout. Exits nonzero if any criterion fails.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use modalcores::clustering::match_estimates_to_truth;
use modalcores::dbscan::NOISE;
use modalcores::density::{theoretical_beta, unit_ball_volume};
use modalcores::mcores::high_level_estimates;
use modalcores::metrics::expected_mutual_information;
use modalcores::scalar::distance;
use modalcores::synthgen::{gen_gaussian_mixture, gen_rings, MixtureSpec, RingSpec};
use modalcores::{
    adjusted_mutual_information, adjusted_rand_index, beta_k, build_index, c_delta_n, dbscan,
    default_k, fit, knn_brute_force, BetaConfig, Dataset, DbscanConfig, LevelGraph,
    McoresConfig, ModalSetEstimate,
};
use modalcores_cli::commands::{bench_descent, sweep};
use modalcores_cli::settings::FitSettings;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn uniform_data(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset<f64> {
    let coords = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    Dataset::from_flat(coords, d).unwrap()
}

// P1: kd-tree index equals brute force.
fn p1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_rel = 0.0f64;
    let mut index_mismatch = 0;
    for _ in 0..50 {
        let n = rng.random_range(16..=200);
        let d = rng.random_range(1..=3);
        let k = rng.random_range(2..=15);
        let data = uniform_data(&mut rng, n, d);
        let tree = build_index(&data, k).unwrap();
        let brute = knn_brute_force(&data, k).unwrap();
        for i in 0..n {
            if tree.neighbors(i) != brute.neighbors(i) {
                index_mismatch += 1;
            }
            for (a, b) in tree.distances(i).iter().zip(brute.distances(i)) {
                if *b > 0.0 {
                    worst_rel = worst_rel.max((a - b).abs() / b);
                } else if *a != 0.0 {
                    worst_rel = f64::INFINITY;
                }
            }
        }
    }
    verdict(
        index_mismatch == 0 && worst_rel <= 1e-12,
        format!("50 instances, {index_mismatch} neighbor-list mismatches, max relative distance error {worst_rel:e}"),
    )
}

/// Component label per node = smallest node id in its component; inactive = usize::MAX.
fn bfs_canonical(n: usize, active: &[bool], adj: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if !active[s] || label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if active[v] && label[v] == usize::MAX {
                    label[v] = s;
                    queue.push_back(v);
                }
            }
        }
    }
    label
}

fn graph_canonical(graph: &mut LevelGraph, active: &[bool]) -> Vec<usize> {
    let n = active.len();
    let mut min_of_root = vec![usize::MAX; n];
    for i in (0..n).filter(|&i| active[i]) {
        let r = graph.component_of(i).unwrap();
        min_of_root[r] = min_of_root[r].min(i);
    }
    (0..n)
        .map(|i| {
            if active[i] {
                min_of_root[graph.component_of(i).unwrap()]
            } else {
                usize::MAX
            }
        })
        .collect()
}

/// Mutual k-NN adjacency from all pairs: ‖x_i − x_j‖ ≤ min(r_i, r_j).
fn explicit_mutual_edges(data: &Dataset<f64>, radii: &[f64]) -> Vec<Vec<usize>> {
    let n = data.n();
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if distance(data.point(a), data.point(b)) <= radii[a].min(radii[b]) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

// P2: union-find components against BFS over the explicit edge set.
fn p2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut failures = 0;
    let mut checks = 0;
    for _ in 0..100 {
        let n = rng.random_range(20..=500);
        let d = rng.random_range(1..=3);
        let k = rng.random_range(2..=15);
        let data = uniform_data(&mut rng, n, d);
        let index = build_index(&data, k).unwrap();
        let adj = explicit_mutual_edges(&data, index.radii());
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);

        let mut graph = LevelGraph::new(n);
        let mut active = vec![false; n];
        let every = (n / 5).max(1);
        for (step, &i) in order.iter().enumerate() {
            graph.add_node(i).unwrap();
            graph.add_mutual_edges(i, &index).unwrap();
            active[i] = true;
            if (step + 1) % every == 0 || step + 1 == n {
                checks += 1;
                if graph_canonical(&mut graph, &active) != bfs_canonical(n, &active, &adj) {
                    failures += 1;
                }
            }
        }
    }
    verdict(
        failures == 0,
        format!("100 sequences, {checks} checkpoints, {failures} partitions differ from BFS"),
    )
}

/// Level descent without union-find: the active set only grows, and the
/// components are recomputed by BFS whenever it does.
fn reference_descent(data: &Dataset<f64>, k: usize, beta: f64) -> Vec<(usize, Vec<usize>)> {
    let n = data.n();
    let index = knn_brute_force(data, k).unwrap();
    let radii = index.radii();
    let d = data.d() as i32;
    let vd = match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => unreachable!("reference descent is for d <= 3"),
    };
    let f: Vec<f64> = radii.iter().map(|r| k as f64 / (n as f64 * vd * r.powi(d))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[b].partial_cmp(&f[a]).unwrap().then(a.cmp(&b)));
    let mut pos = vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let adj = explicit_mutual_edges(data, radii);

    let mut threshold = f64::INFINITY;
    let mut active = vec![false; n];
    let mut active_count = 0;
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for (p, &i) in order.iter().enumerate() {
        let lambda = f[i];
        threshold = threshold.min((lambda * (1.0 - 9.0 * beta)).max(0.0));
        let now: Vec<bool> = f.iter().map(|&v| v >= threshold).collect();
        let count = now.iter().filter(|&&a| a).count();
        if count != active_count {
            active = now;
            active_count = count;
            comp = bfs_canonical(n, &active, &adj);
        }
        let members: Vec<usize> = (0..n).filter(|&j| comp[j] == comp[i]).collect();
        if members.iter().any(|&j| pos[j] < p) {
            continue;
        }
        let floor = lambda - beta * lambda;
        out.push((i, members.into_iter().filter(|&j| f[j] > floor).collect()));
    }
    out
}

fn same_estimates(ours: &[ModalSetEstimate<f64>], reference: &[(usize, Vec<usize>)]) -> bool {
    ours.len() == reference.len()
        && ours
            .iter()
            .zip(reference)
            .all(|(e, (founder, members))| e.founder == *founder && &e.members == members)
}

// P3: three rings, structural recovery.
fn p3() -> Verdict {
    let spec = RingSpec::three_rings();
    let n = spec.total();
    let k = default_k(n).unwrap();
    let tolerance = 3.0 * spec.noise_sigma + spec.discretization_bound(0);
    let config = McoresConfig::new(k);

    let mut three = 0;
    let mut worst = 0.0f64;
    let mut hausdorff_ok = true;
    let mut oracle_ok = true;
    for seed in 0..20 {
        let s = gen_rings::<f64>(&spec, seed).unwrap();
        let f = fit(&s.data, &config).unwrap();
        if seed == 0 {
            let beta: f64 = beta_k(&config.beta, k, n, 2).unwrap();
            oracle_ok = same_estimates(&f.estimates, &reference_descent(&s.data, k, beta));
        }
        if f.estimates.len() != 3 {
            continue;
        }
        three += 1;
        let m = match_estimates_to_truth(&f.estimates, &s.truth, &s.data).unwrap();
        let h = m.max_distance().unwrap_or(f64::INFINITY);
        worst = worst.max(h);
        hausdorff_ok &= m.pairs.len() == 3 && h <= tolerance;
    }
    verdict(
        three >= 18 && hausdorff_ok && oracle_ok,
        format!(
            "k={k}: exactly 3 estimates in {three}/20 (need >= 18); reference descent agrees: {oracle_ok}; \
             max matched Hausdorff {worst:.4} vs tolerance {tolerance:.4}"
        ),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

// P4: point-mode error trend in n.
fn p4() -> Verdict {
    let sizes = [500, 2000, 8000];
    let mut medians = Vec::new();
    for &n in &sizes {
        let k = default_k(n).unwrap();
        let errors: Vec<f64> = (0..20)
            .map(|trial| {
                let s = gen_gaussian_mixture::<f64>(&MixtureSpec::two_gaussians_1d(n), 4000 + trial).unwrap();
                let f = fit(&s.data, &McoresConfig::new(k)).unwrap();
                let m = match_estimates_to_truth(&f.estimates, &s.truth, &s.data).unwrap();
                if m.unmatched_truths.is_empty() {
                    m.max_distance().unwrap()
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        medians.push(median(errors));
    }
    let nonincreasing = medians.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        nonincreasing,
        format!("median max matched Hausdorff at n=500/2000/8000: {medians:.4?}"),
    )
}

// P5: pruning, one high-level estimate for a unimodal density.
fn p5() -> Verdict {
    let spec = MixtureSpec::isotropic(vec![vec![0.0, 0.0]], 1.0, 2000);
    let mut single = 0;
    let mut monotone = true;
    let mut counts = Vec::new();
    for trial in 0..20 {
        let s = gen_gaussian_mixture::<f64>(&spec, 5000 + trial).unwrap();
        let base = fit(&s.data, &McoresConfig::new(50)).unwrap();
        if high_level_estimates(&base.estimates, &base.density, 0.5).len() == 1 {
            single += 1;
        }
        let fmax = base.density.max();
        for frac in [0.01, 0.05, 0.2] {
            let pruned = fit(&s.data, &McoresConfig::new(50).with_eps_prune(frac * fmax)).unwrap();
            monotone &= pruned.estimates.len() <= base.estimates.len();
        }
        counts.push(base.estimates.len());
    }
    verdict(
        single >= 18 && monotone,
        format!(
            "one high-level estimate in {single}/20 (need >= 18); count with eps_prune > 0 never above eps_prune = 0: {monotone}; \
             total counts {counts:?}"
        ),
    )
}

fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn sizes_to_labels(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect()
}

/// Mean mutual information over all n! orderings of `b` against fixed `a`.
/// Orderings are tallied per contingency table with exact integer counts, then
/// each distinct table's MI is weighted by its count.
fn enumerated_emi(a: &[usize], b: &[usize], ra: &[usize], cb: &[usize]) -> f64 {
    let n = a.len();
    let table_of = |b: &[usize]| {
        let mut table = [[0u8; 8]; 8];
        for (&x, &y) in a.iter().zip(b) {
            table[x][y] += 1;
        }
        table
    };
    let mut tally: HashMap<[[u8; 8]; 8], u64> = HashMap::new();
    let mut b = b.to_vec();
    let mut c = vec![0usize; n];
    *tally.entry(table_of(&b)).or_default() += 1;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                b.swap(0, i);
            } else {
                b.swap(c[i], i);
            }
            *tally.entry(table_of(&b)).or_default() += 1;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let total: u64 = tally.values().sum();
    let nf = n as f64;
    tally
        .iter()
        .map(|(table, &count)| {
            let mut mi = 0.0;
            for (r, row) in table.iter().enumerate().take(ra.len()) {
                for (s, &cell) in row.iter().enumerate().take(cb.len()) {
                    if cell > 0 {
                        let x = cell as f64;
                        mi += x / nf * (nf * x / (ra[r] as f64 * cb[s] as f64)).ln();
                    }
                }
            }
            mi * count as f64 / total as f64
        })
        .sum()
}

// P6: score correctness.
fn p6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut identical_ok = true;
    for _ in 0..20 {
        let n = rng.random_range(2..300);
        let a: Vec<u32> = (0..n).map(|_| rng.random_range(0..6)).collect();
        let b: Vec<u32> = a.iter().map(|&x| 100 - 7 * x).collect();
        identical_ok &= adjusted_rand_index(&a, &b).unwrap() == 1.0;
        identical_ok &= adjusted_mutual_information(&a, &b).unwrap() == 1.0;
    }
    let hand = adjusted_rand_index(&[1, 1, 2, 2], &[1, 1, 1, 2]).unwrap();
    let hand_ok = hand.abs() <= 1e-12;

    let (mut ari_sum, mut ami_sum) = (0.0, 0.0);
    for _ in 0..50 {
        let a: Vec<u8> = (0..1000).map(|_| rng.random_range(0..5)).collect();
        let b: Vec<u8> = (0..1000).map(|_| rng.random_range(0..5)).collect();
        ari_sum += adjusted_rand_index(&a, &b).unwrap().abs();
        ami_sum += adjusted_mutual_information(&a, &b).unwrap().abs();
    }
    let (ari_mean, ami_mean) = (ari_sum / 50.0, ami_sum / 50.0);
    let chance_ok = ari_mean < 0.05 && ami_mean < 0.05;

    let mut emi_err = 0.0f64;
    let mut pairs = 0;
    for n in 1..=8 {
        let parts = integer_partitions(n);
        for ra in &parts {
            for cb in &parts {
                let got = expected_mutual_information(ra, cb);
                let want = enumerated_emi(&sizes_to_labels(ra), &sizes_to_labels(cb), ra, cb);
                emi_err = emi_err.max((got - want).abs());
                pairs += 1;
            }
        }
    }
    let emi_ok = emi_err <= 1e-12;
    verdict(
        identical_ok && hand_ok && chance_ok && emi_ok,
        format!(
            "identical partitions score 1: {identical_ok}; hand ARI {hand:e}; mean |ARI| {ari_mean:.4}, mean |AMI| {ami_mean:.4}; \
             E[MI] vs enumeration over {pairs} size profiles (n <= 8), max error {emi_err:e}"
        ),
    )
}

// P7: score stability across k.
fn p7() -> Verdict {
    let ks: Vec<usize> = (10..=60).step_by(10).collect();
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for seed in 0..5 {
        let s = gen_gaussian_mixture::<f64>(&MixtureSpec::three_gaussians(1500), 7000 + seed).unwrap();
        let rows = sweep(&s.data, &s.labels, &FitSettings::default(), &ks).unwrap();
        let aris: Vec<f64> = rows.iter().map(|r| r.ari).collect();
        let max = aris.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = aris.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(max - min);
        details.push(format!("{min:.3}..{max:.3}"));
    }
    verdict(
        worst <= 0.15,
        format!("ARI range over k=10..60 on 5 datasets: [{}], worst spread {worst:.4} (bound 0.15)", details.join(", ")),
    )
}

// P8: descent time scaling.
fn p8() -> Verdict {
    let rows = bench_descent(50_000, 1, 2, 30, 9, 808).unwrap();
    let ratio = rows[1].ratio.unwrap();
    verdict(
        ratio <= 2.5,
        format!(
            "descent {:.2} ms at n=50000, {:.2} ms at n=100000, ratio {ratio:.3} (bound 2.5)",
            rows[0].descent_ms, rows[1].descent_ms
        ),
    )
}

// P9: DBSCAN baseline.
fn p9() -> Verdict {
    let hand = dbscan(&Dataset::from_values(&[0.0, 0.5, 1.0, 10.0]).unwrap(), &DbscanConfig::new(0.6, 2)).unwrap();
    let hand_ok = hand == vec![0, 0, 0, NOISE];

    let s = gen_gaussian_mixture::<f64>(&MixtureSpec::three_gaussians(600), 909).unwrap();
    let cfg = DbscanConfig::new(0.6, 5);
    let base = dbscan(&s.data, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 1.0f64;
    for _ in 0..10 {
        let mut perm: Vec<usize> = (0..s.data.n()).collect();
        perm.shuffle(&mut rng);
        let labels = dbscan(&s.data.select(&perm).unwrap(), &cfg).unwrap();
        let expected: Vec<i64> = perm.iter().map(|&i| base[i]).collect();
        worst = worst.min(adjusted_rand_index(&labels, &expected).unwrap());
    }
    verdict(
        hand_ok && worst == 1.0,
        format!("hand example {hand:?}; min ARI over 10 shuffles {worst}"),
    )
}

// P10: formula units.
fn p10() -> Verdict {
    let practical: f64 = beta_k(&BetaConfig::practical(), 4, 100, 2).unwrap();
    let theoretical: f64 = theoretical_beta(16.0, 64);
    let vd = [
        unit_ball_volume::<f64>(1).unwrap(),
        unit_ball_volume::<f64>(2).unwrap(),
        unit_ball_volume::<f64>(3).unwrap(),
    ];
    let vd_ok = vd == [2.0, PI, 4.0 * PI / 3.0];
    // Reference values evaluated with 50-digit arithmetic.
    let cases = [
        (0.05, 1000.0, 2, 219.380_446_319_813_908_965_916_959_055_589),
        (0.05, 123_456.0, 3, 350.030_841_687_899_026_611_375_290_789),
    ];
    let c_err = cases
        .iter()
        .map(|&(delta, n, d, want)| {
            let got: f64 = c_delta_n(delta, n, d).unwrap();
            ((got - want) / want).abs()
        })
        .fold(0.0, f64::max);
    verdict(
        practical == 1.0 && theoretical == 8.0 && vd_ok && c_err <= 1e-12,
        format!(
            "practical beta(k=4) {practical}; theoretical beta(C=16, k=64) {theoretical}; v_1..v_3 {vd:?}; C relative error {c_err:e}"
        ),
    )
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_modalcores"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    std::fs::read(a).ok().is_some_and(|x| std::fs::read(b).ok() == Some(x))
}

// P11: replay from a run record.
fn p11() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let gen = root.join("gen");
    let ok = run_cli(&["gen", "--preset", "three-gaussians", "--seed", "11", "--out-dir", &s(&gen)]);
    if !ok.status.success() {
        return verdict(false, format!("gen failed: {}", String::from_utf8_lossy(&ok.stderr)));
    }
    let data = s(&gen.join("data.csv"));
    let runs: [&[&str]; 3] = [
        &[],
        &["--k", "25", "--beta-mode", "custom", "--beta", "0.08", "--eps0", "0.001"],
        &["--beta-mode", "theoretical", "--delta", "0.1", "--eps-prune", "0.002", "--jitter", "1e-6", "--seed", "3"],
    ];
    let mut reproduced = 0;
    let mut failures = Vec::new();
    for (i, extra) in runs.iter().enumerate() {
        let first = root.join(format!("fit{i}"));
        let again = root.join(format!("again{i}"));
        let replayed = root.join(format!("replay{i}"));
        let mut args = vec!["fit", data.as_str(), "--label-column", "2"];
        args.extend_from_slice(extra);
        let out_first = s(&first);
        let out_again = s(&again);
        let a = run_cli(&[&args[..], &["--out-dir", &out_first]].concat());
        let b = run_cli(&[&args[..], &["--out-dir", &out_again]].concat());
        let record = s(&first.join("run.json"));
        let r = run_cli(&["replay", &record, "--out-dir", &s(&replayed)]);
        let all_ok = a.status.success() && b.status.success() && r.status.success();
        let identical = ["estimates.jsonl", "labels.csv"].iter().all(|f| {
            same_bytes(&first.join(f), &again.join(f)) && same_bytes(&first.join(f), &replayed.join(f))
        });
        if all_ok && identical {
            reproduced += 1;
        } else {
            failures.push(format!("run {i}: {}", String::from_utf8_lossy(&r.stderr).trim()));
        }
    }
    let bad_k = run_cli(&["fit", &data, "--k", "1", "--out-dir", &s(&root.join("bad"))]);
    let exit_ok = bad_k.status.code() == Some(2);
    verdict(
        reproduced == runs.len() && exit_ok,
        format!(
            "{reproduced}/{} configurations byte-identical on rerun and replay; --k 1 exits {:?}{}",
            runs.len(),
            bad_k.status.code(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn main() {
    let criteria: [(&str, &str, Duration, fn() -> Verdict); 11] = [
        ("P1", "k-NN oracle equivalence", Duration::from_secs(5), p1),
        ("P2", "component oracle", Duration::from_secs(5), p2),
        ("P3", "three-rings structural recovery", Duration::from_secs(60), p3),
        ("P4", "point-mode error trend", Duration::from_secs(120), p4),
        ("P5", "pruning to one high-level estimate", Duration::from_secs(60), p5),
        ("P6", "score correctness", Duration::from_secs(30), p6),
        ("P7", "score stability across k", Duration::from_secs(60), p7),
        ("P8", "near-linear descent", Duration::from_secs(120), p8),
        ("P9", "DBSCAN baseline", Duration::from_secs(5), p9),
        ("P10", "formula units", Duration::from_secs(1), p10),
        ("P11", "determinism and replay", Duration::from_secs(30), p11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = v.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} {id} {name}: {} ({:.2} s, limit {} s{})",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {}/{ran} criteria pass", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
