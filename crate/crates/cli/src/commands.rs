use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use log::info;
use modalcores::dataset::validate;
use modalcores::mcores::estimate_modal_sets;
use modalcores::synthgen::{gen_gaussian_mixture, gen_rings, MixtureSpec, RingSpec, Synthetic};
use modalcores::{
    assign, build_index, dbscan, knn_density, load_csv, match_estimates_to_truth, score, Dataset,
    DbscanConfig, Error, Fit, LabeledDataset, McoresConfig, Result,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    AssignCmd, BenchCmd, DbscanCmd, EvalCmd, FitCmd, GenCmd, InputArgs, Preset, ReplayCmd, SweepCmd,
};
use crate::artifacts::{
    fingerprint, parse_estimates, parse_labels, read_file, render_estimates, render_labels,
    sha256_hex, write_file, Artifacts, EstimatesSummary, InputSpec, Provenance,
    RunRecord, Scores, Timings, FORMAT_VERSION, RUN_FORMAT,
};
use crate::settings::{resolve, FitSettings};

pub const ESTIMATES_FILE: &str = "estimates.jsonl";
pub const LABELS_FILE: &str = "labels.csv";
pub const RECORD_FILE: &str = "run.json";

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

#[derive(Debug)]
pub struct LoadedInput {
    pub data: Dataset<f64>,
    pub labels: Option<Vec<i64>>,
    pub spec: InputSpec,
    pub load_ms: f64,
}

pub fn load_input(path: &Path, header: bool, label_column: Option<usize>) -> Result<LoadedInput> {
    let start = Instant::now();
    let (data, labels) = load_csv::<f64>(path, header, label_column)?.into_parts();
    let load_ms = millis(start);
    let abs = std::fs::canonicalize(path).map_err(|e| Error::io(path, e))?;
    Ok(LoadedInput {
        data,
        labels,
        spec: InputSpec {
            path: abs.to_string_lossy().into_owned(),
            header,
            label_column,
        },
        load_ms,
    })
}

fn load_args(input: &InputArgs) -> Result<LoadedInput> {
    load_input(&input.data, input.header, input.label_column)
}

/// Result of one fit plus nearest-core assignment.
#[derive(Debug)]
pub struct FitOutcome {
    pub config: McoresConfig,
    pub fit: Fit<f64>,
    pub labels: Vec<i64>,
    pub timings: Timings,
}

/// validate → index → density → descent → assign, timing each stage.
pub fn fit_dataset(data: &Dataset<f64>, settings: &FitSettings) -> Result<FitOutcome> {
    let config = settings.mcores_config(data.n())?;
    let data: Cow<Dataset<f64>> = match settings.jitter {
        Some(sigma) => Cow::Owned(data.jittered(sigma, settings.seed)?),
        None => Cow::Borrowed(data),
    };
    let report = validate(&data, config.k)?;
    if let Some(&index) = report.zero_radius.first() {
        return Err(Error::ZeroRadius { index });
    }

    let mut timings = Timings::default();
    let start = Instant::now();
    let index = build_index(&data, config.k)?;
    timings.index_ms = millis(start);

    let start = Instant::now();
    let density = knn_density(&index)?;
    timings.density_ms = millis(start);

    let start = Instant::now();
    let estimates = estimate_modal_sets(&data, &index, &density, &config)?;
    timings.descent_ms = millis(start);

    let start = Instant::now();
    let assigned = assign(&data, &estimates)?;
    timings.assign_ms = millis(start);

    let beta = modalcores::beta_k(&config.beta, config.k, data.n(), data.d())?;
    Ok(FitOutcome {
        config,
        fit: Fit {
            index,
            density,
            beta,
            estimates,
        },
        labels: assigned.labels.iter().map(|&l| l as i64).collect(),
        timings,
    })
}

/// Writes estimates, labels and the run record into `out_dir`.
pub fn fit_and_write(
    input: &LoadedInput,
    settings: &FitSettings,
    out_dir: &Path,
) -> Result<RunRecord> {
    let outcome = fit_dataset(&input.data, settings)?;
    let resolved = settings.with_k(outcome.config.k);
    let provenance = Provenance {
        command: "fit".into(),
        settings: Some(resolved.clone()),
        fingerprint: fingerprint(&input.data),
    };
    let estimates_text = render_estimates(&provenance, &outcome.fit.estimates);
    write_file(&out_dir.join(ESTIMATES_FILE), &estimates_text)?;
    write_file(
        &out_dir.join(LABELS_FILE),
        &render_labels(Some(&provenance), &outcome.labels),
    )?;

    let scores = match &input.labels {
        Some(truth) => {
            let r = score(&outcome.labels, truth)?;
            Some(Scores { ari: r.ari, ami: r.ami })
        }
        None => None,
    };
    let record = RunRecord {
        format: RUN_FORMAT.into(),
        version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        input: input.spec.clone(),
        config: resolved,
        beta_value: outcome.fit.beta,
        dataset: provenance.fingerprint,
        estimates: EstimatesSummary::of(&outcome.fit.estimates),
        scores,
        timings: Timings {
            load_ms: input.load_ms,
            ..outcome.timings
        },
        artifacts: Artifacts {
            estimates: ESTIMATES_FILE.into(),
            estimates_sha256: sha256_hex(estimates_text.as_bytes()),
            labels: LABELS_FILE.into(),
        },
    };
    write_file(&out_dir.join(RECORD_FILE), &record.to_json())?;
    Ok(record)
}

fn print_record(record: &RunRecord, out_dir: &Path) {
    println!(
        "n={} d={} k={} beta={:.6} estimates={} sizes={:?}",
        record.dataset.n,
        record.dataset.d,
        record.config.k.unwrap_or(0),
        record.beta_value,
        record.estimates.count,
        record.estimates.sizes
    );
    if let Some(s) = record.scores {
        println!("ari={:.6} ami={:.6}", s.ari, s.ami);
    }
    let t = record.timings;
    println!(
        "time_ms load={:.1} index={:.1} density={:.1} descent={:.1} assign={:.1}",
        t.load_ms, t.index_ms, t.density_ms, t.descent_ms, t.assign_ms
    );
    println!("wrote {}", out_dir.join(RECORD_FILE).display());
}

pub fn cmd_fit(cmd: &FitCmd) -> Result<RunRecord> {
    let settings = resolve(&cmd.estimator)?;
    let input = load_args(&cmd.input)?;
    let record = fit_and_write(&input, &settings, &cmd.out_dir)?;
    print_record(&record, &cmd.out_dir);
    Ok(record)
}

/// Re-runs a recorded fit on the same data and checks the estimates file
/// reproduces byte for byte.
pub fn replay(record_path: &Path, data: Option<&Path>, out_dir: &Path) -> Result<RunRecord> {
    let record = RunRecord::from_json(&read_file(record_path)?)?;
    let path = data.map_or_else(|| PathBuf::from(&record.input.path), Path::to_path_buf);
    let input = load_input(&path, record.input.header, record.input.label_column)?;
    let fp = fingerprint(&input.data);
    if fp != record.dataset {
        return Err(Error::InvalidDataset(format!(
            "{} does not match the recorded dataset (sha256 {} vs {})",
            path.display(),
            fp.sha256,
            record.dataset.sha256
        )));
    }
    let replayed = fit_and_write(&input, &record.config, out_dir)?;
    if replayed.artifacts.estimates_sha256 != record.artifacts.estimates_sha256 {
        return Err(Error::InvalidDataset(format!(
            "replayed estimates differ from the record (sha256 {} vs {})",
            replayed.artifacts.estimates_sha256, record.artifacts.estimates_sha256
        )));
    }
    Ok(replayed)
}

pub fn cmd_replay(cmd: &ReplayCmd) -> Result<RunRecord> {
    let record = replay(&cmd.record, cmd.data.as_deref(), &cmd.out_dir)?;
    print_record(&record, &cmd.out_dir);
    println!("estimates reproduced: sha256 {}", record.artifacts.estimates_sha256);
    Ok(record)
}

fn recorded_sha(text: &str) -> Option<&str> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.split("sha256=").nth(1))
        .map(str::trim)
}

pub fn cmd_assign(cmd: &AssignCmd) -> Result<Vec<i64>> {
    let input = load_args(&cmd.input)?;
    let text = read_file(&cmd.estimates)?;
    let fp = fingerprint(&input.data);
    if let Some(sha) = recorded_sha(&text) {
        if sha != fp.sha256 {
            return Err(Error::InvalidDataset(format!(
                "{} was fitted on a different dataset",
                cmd.estimates.display()
            )));
        }
    }
    let estimates = parse_estimates(&text)?;
    let labels: Vec<i64> = assign(&input.data, &estimates)?
        .labels
        .iter()
        .map(|&l| l as i64)
        .collect();
    let provenance = Provenance {
        command: "assign".into(),
        settings: None,
        fingerprint: fp,
    };
    write_file(&cmd.out, &render_labels(Some(&provenance), &labels))?;
    println!("assigned {} points to {} cores", labels.len(), estimates.len());
    Ok(labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub ari: f64,
    pub ami: f64,
    pub count: usize,
    pub ms: f64,
}

/// One fit per k, in parallel; rows come back in the order of `ks`.
pub fn sweep(
    data: &Dataset<f64>,
    truth: &[i64],
    settings: &FitSettings,
    ks: &[usize],
) -> Result<Vec<SweepRow>> {
    ks.par_iter()
        .map(|&k| {
            let start = Instant::now();
            let outcome = fit_dataset(data, &settings.with_k(k))?;
            let ms = millis(start);
            let r = score(&outcome.labels, truth)?;
            info!("k={k}: {} estimates, ari {:.4}", outcome.fit.estimates.len(), r.ari);
            Ok(SweepRow {
                k,
                ari: r.ari,
                ami: r.ami,
                count: outcome.fit.estimates.len(),
                ms,
            })
        })
        .collect()
}

pub fn parse_k_range(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidConfig(format!("k range {spec:?} is not START:END:STEP"));
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if step == 0 || start > end {
        return Err(bad());
    }
    Ok((start..=end).step_by(step).collect())
}

pub fn cmd_sweep(cmd: &SweepCmd) -> Result<Vec<SweepRow>> {
    let settings = resolve(&cmd.estimator)?;
    let ks = match &cmd.k_range {
        Some(spec) => parse_k_range(spec)?,
        None => cmd.ks.clone(),
    };
    if ks.is_empty() {
        return Err(Error::InvalidConfig("give --ks or --k-range".into()));
    }
    let input = load_args(&cmd.input)?;
    let truth = match (&cmd.labels, input.labels.clone()) {
        (Some(path), _) => parse_labels(&read_file(path)?)?,
        (None, Some(labels)) => labels,
        (None, None) => {
            return Err(Error::InvalidConfig(
                "sweep needs ground truth: --label-column or --labels".into(),
            ))
        }
    };
    let rows = sweep(&input.data, &truth, &settings, &ks)?;

    let provenance = Provenance {
        command: "sweep".into(),
        settings: Some(FitSettings { k: None, ..settings }),
        fingerprint: fingerprint(&input.data),
    };
    let mut out = provenance.render();
    out.push_str("k,ari,ami,count,ms\n");
    for r in &rows {
        let _ = writeln!(out, "{},{},{},{},{:.3}", r.k, r.ari, r.ami, r.count, r.ms);
    }
    write_file(&cmd.out, &out)?;
    for r in &rows {
        println!("k={:<4} ari={:.4} ami={:.4} estimates={:<3} ms={:.1}", r.k, r.ari, r.ami, r.count, r.ms);
    }
    Ok(rows)
}

pub fn generate(preset: Preset, seed: u64, n: Option<usize>) -> Result<Synthetic<f64>> {
    match preset {
        Preset::ThreeRings => gen_rings(&RingSpec::three_rings(), seed),
        Preset::ThreeGaussians => {
            gen_gaussian_mixture(&MixtureSpec::three_gaussians(n.unwrap_or(1500)), seed)
        }
        Preset::TwoGaussians1d => {
            gen_gaussian_mixture(&MixtureSpec::two_gaussians_1d(n.unwrap_or(1500)), seed)
        }
    }
}

fn render_csv(header: &str, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> String {
    let mut buf = header.as_bytes().to_vec();
    write(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn cmd_gen(cmd: &GenCmd) -> Result<()> {
    let synth = generate(cmd.preset, cmd.seed, cmd.n)?;
    let name = cmd
        .preset
        .to_possible_value()
        .map_or_else(String::new, |v| v.get_name().to_owned());
    let header = format!(
        "# modalcores {}\n# command: gen preset={name} seed={}\n",
        env!("CARGO_PKG_VERSION"),
        cmd.seed
    );
    let labeled = LabeledDataset::new(synth.data.clone(), synth.labels.clone())?;
    let data_path = cmd.out_dir.join("data.csv");
    write_file(&data_path, &render_csv(&header, |b| labeled.write_csv(b)))?;

    let mut truth_text = format!("{header}# true modal sets, set id in the last column\n");
    for (id, set) in synth.truth.iter().enumerate() {
        let ids = vec![id as i64; set.n()];
        let rows = LabeledDataset::new(set.clone(), ids)?;
        truth_text.push_str(&render_csv("", |b| rows.write_csv(b)));
    }
    let truth_path = cmd.out_dir.join("truth.csv");
    write_file(&truth_path, &truth_text)?;
    println!(
        "wrote {} ({} points, d={}, label column {}) and {} ({} sets)",
        data_path.display(),
        synth.data.n(),
        synth.data.d(),
        synth.data.d(),
        truth_path.display(),
        synth.truth.len()
    );
    Ok(())
}

/// Rows of `truth` grouped by the integer id in their last column.
pub fn load_truth_sets(path: &Path, d: usize) -> Result<Vec<Dataset<f64>>> {
    let (points, ids) = load_csv::<f64>(path, false, Some(d))?.into_parts();
    let ids = ids.expect("label column requested");
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (row, id) in ids.into_iter().enumerate() {
        groups.entry(id).or_default().push(row);
    }
    groups.values().map(|rows| points.select(rows)).collect()
}

pub fn cmd_eval(cmd: &EvalCmd) -> Result<serde_json::Value> {
    let mut report = serde_json::Map::new();
    if let (Some(pred), Some(truth)) = (&cmd.pred, &cmd.truth) {
        let a = parse_labels(&read_file(pred)?)?;
        let b = match cmd.label_column {
            Some(col) => load_input(truth, cmd.header, Some(col))?
                .labels
                .ok_or_else(|| Error::InvalidConfig("no labels in --truth".into()))?,
            None => parse_labels(&read_file(truth)?)?,
        };
        let r = score(&a, &b)?;
        report.insert("ari".into(), r.ari.into());
        report.insert("ami".into(), r.ami.into());
    }
    if let (Some(est), Some(sets), Some(data)) = (&cmd.estimates, &cmd.truth_sets, &cmd.data) {
        let input = load_input(data, cmd.header, cmd.label_column)?;
        let estimates = parse_estimates(&read_file(est)?)?;
        let truth = load_truth_sets(sets, input.data.d())?;
        let m = match_estimates_to_truth(&estimates, &truth, &input.data)?;
        let pairs: Vec<serde_json::Value> = m
            .pairs
            .iter()
            .map(|p| serde_json::json!({"estimate": p.estimate, "truth": p.truth, "hausdorff": p.distance}))
            .collect();
        report.insert("matches".into(), pairs.into());
        report.insert("max_hausdorff".into(), m.max_distance().into());
        report.insert("unmatched_estimates".into(), m.unmatched_estimates.into());
        report.insert("unmatched_truths".into(), m.unmatched_truths.into());
    }
    if report.is_empty() {
        return Err(Error::InvalidConfig(
            "eval needs --pred/--truth and/or --estimates/--truth-sets/--data".into(),
        ));
    }
    let value = serde_json::Value::Object(report);
    println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub index_ms: f64,
    /// Fastest of the repeats.
    pub descent_ms: f64,
    /// descent_ms over the previous row's.
    pub ratio: Option<f64>,
}

/// Times the level descent alone on standard normal samples of size
/// n, 2n, 4n, ...
pub fn bench_descent(
    n: usize,
    doublings: usize,
    d: usize,
    k: usize,
    repeats: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if repeats == 0 || d == 0 {
        return Err(Error::InvalidConfig("bench needs repeats >= 1 and d >= 1".into()));
    }
    let config = McoresConfig::new(k);
    let mut rows: Vec<BenchRow> = Vec::new();
    for step in 0..=doublings {
        let size = n << step;
        let spec = MixtureSpec::isotropic(vec![vec![0.0; d]], 1.0, size);
        let data = gen_gaussian_mixture::<f64>(&spec, seed.wrapping_add(step as u64))?.data;
        let start = Instant::now();
        let index = build_index(&data, k)?;
        let index_ms = millis(start);
        let density = knn_density(&index)?;
        let mut best = f64::INFINITY;
        for _ in 0..repeats {
            let start = Instant::now();
            let est = estimate_modal_sets(&data, &index, &density, &config)?;
            best = best.min(millis(start));
            std::hint::black_box(est);
        }
        let ratio = rows.last().map(|prev| best / prev.descent_ms);
        rows.push(BenchRow {
            n: size,
            index_ms,
            descent_ms: best,
            ratio,
        });
    }
    Ok(rows)
}

pub fn cmd_bench(cmd: &BenchCmd) -> Result<Vec<BenchRow>> {
    let rows = bench_descent(cmd.n, cmd.doublings, cmd.d, cmd.k, cmd.repeats, cmd.seed)?;
    let mut csv = String::from("n,index_ms,descent_ms,ratio\n");
    for r in &rows {
        let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.4}"));
        println!(
            "n={:<9} index_ms={:<10.2} descent_ms={:<10.2} ratio={}",
            r.n, r.index_ms, r.descent_ms, ratio
        );
        let _ = writeln!(csv, "{},{:.3},{:.3},{}", r.n, r.index_ms, r.descent_ms, ratio);
    }
    if let Some(out) = &cmd.out {
        write_file(out, &csv)?;
    }
    Ok(rows)
}

pub fn cmd_dbscan(cmd: &DbscanCmd) -> Result<Vec<i64>> {
    let input = load_args(&cmd.input)?;
    let labels = dbscan(&input.data, &DbscanConfig::new(cmd.eps, cmd.min_pts))?;
    let provenance = Provenance {
        command: format!("dbscan eps={} min_pts={}", cmd.eps, cmd.min_pts),
        settings: None,
        fingerprint: fingerprint(&input.data),
    };
    write_file(&cmd.out, &render_labels(Some(&provenance), &labels))?;
    let clusters = labels.iter().filter(|&&l| l >= 0).max().map_or(0, |m| m + 1);
    let noise = labels.iter().filter(|&&l| l < 0).count();
    println!("clusters={clusters} noise={noise}");
    if let Some(truth) = &input.labels {
        let r = score(&labels, truth)?;
        println!("ari={:.6} ami={:.6}", r.ari, r.ami);
    }
    Ok(labels)
}
