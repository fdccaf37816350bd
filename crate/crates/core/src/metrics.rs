//! External clustering scores against a reference labeling: adjusted Rand index
//! and adjusted mutual information (max-entropy normalization, natural logs).

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cluster × class count table. Rows follow the sorted distinct values of the
/// first labeling, columns those of the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency<A, B> {
    pub rows: Vec<A>,
    pub cols: Vec<B>,
    pub counts: Vec<Vec<usize>>,
}

impl<A, B> Contingency<A, B> {
    pub fn total(&self) -> usize {
        self.row_sums().iter().sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.cols.len()];
        for row in &self.counts {
            for (s, &c) in sums.iter_mut().zip(row) {
                *s += c;
            }
        }
        sums
    }

    /// Both labelings induce the same partition.
    pub fn is_bijective(&self) -> bool {
        let rows_ok = self
            .counts
            .iter()
            .all(|r| r.iter().filter(|&&c| c > 0).count() == 1);
        let cols_ok = (0..self.cols.len())
            .all(|j| self.counts.iter().filter(|r| r[j] > 0).count() == 1);
        rows_ok && cols_ok
    }
}

pub fn contingency<A: Ord + Copy, B: Ord + Copy>(a: &[A], b: &[B]) -> Result<Contingency<A, B>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let rows: BTreeMap<A, usize> = dense(a);
    let cols: BTreeMap<B, usize> = dense(b);
    let mut counts = vec![vec![0usize; cols.len()]; rows.len()];
    for (x, y) in a.iter().zip(b) {
        counts[rows[x]][cols[y]] += 1;
    }
    Ok(Contingency {
        rows: rows.into_keys().collect(),
        cols: cols.into_keys().collect(),
        counts,
    })
}

fn dense<L: Ord + Copy>(labels: &[L]) -> BTreeMap<L, usize> {
    let mut map: BTreeMap<L, usize> = labels.iter().map(|&l| (l, 0)).collect();
    for (i, v) in map.values_mut().enumerate() {
        *v = i;
    }
    map
}

fn pairs(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

fn check_len<A, B>(a: &[A], b: &[B]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewPoints { n: a.len(), min: 2 });
    }
    Ok(())
}

/// Hubert–Arabie adjusted Rand index. Identical partitions score exactly 1;
/// otherwise an undefined adjustment (both labelings all singletons or both a
/// single cluster) scores 0.
pub fn adjusted_rand_index<A: Ord + Copy, B: Ord + Copy>(a: &[A], b: &[B]) -> Result<f64> {
    check_len(a, b)?;
    let table = contingency(a, b)?;
    Ok(ari_from_table(&table))
}

pub fn ari_from_table<A, B>(table: &Contingency<A, B>) -> f64 {
    if table.is_bijective() {
        return 1.0;
    }
    let index: f64 = table.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let sum_a: f64 = table.row_sums().into_iter().map(pairs).sum();
    let sum_b: f64 = table.col_sums().into_iter().map(pairs).sum();
    let expected = sum_a * sum_b / pairs(table.total());
    let max = 0.5 * (sum_a + sum_b);
    let denom = max - expected;
    if denom == 0.0 {
        return 0.0;
    }
    (index - expected) / denom
}

/// ln(i!) for i in 0..=n.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

fn entropy(sizes: &[usize], n: usize) -> f64 {
    let n = n as f64;
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

pub fn mutual_information<A, B>(table: &Contingency<A, B>) -> f64 {
    let n = table.total() as f64;
    let row = table.row_sums();
    let col = table.col_sums();
    let mut mi = 0.0;
    for (i, r) in table.counts.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / n * (n * c / (row[i] as f64 * col[j] as f64)).ln();
            }
        }
    }
    mi
}

/// E[MI] when both marginals are held fixed and the pairing is a uniformly
/// random permutation (hypergeometric cell counts).
pub fn expected_mutual_information(row_sums: &[usize], col_sums: &[usize]) -> f64 {
    let n: usize = row_sums.iter().sum();
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in row_sums {
        for &b in col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (a as f64 * b as f64)).ln();
                let log_p = lf[a] + lf[b] + lf[n - a] + lf[n - b]
                    - lf[n]
                    - lf[nij]
                    - lf[a - nij]
                    - lf[b - nij]
                    - lf[n + nij - a - b];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

pub fn adjusted_mutual_information<A: Ord + Copy, B: Ord + Copy>(a: &[A], b: &[B]) -> Result<f64> {
    check_len(a, b)?;
    let table = contingency(a, b)?;
    Ok(ami_from_table(&table))
}

/// Identical partitions score exactly 1, an undefined adjustment scores 0.
pub fn ami_from_table<A, B>(table: &Contingency<A, B>) -> f64 {
    if table.is_bijective() {
        return 1.0;
    }
    let n = table.total();
    let row = table.row_sums();
    let col = table.col_sums();
    let (ha, hb) = (entropy(&row, n), entropy(&col, n));
    if ha == 0.0 && hb == 0.0 {
        return 0.0;
    }
    let mi = mutual_information(table);
    let emi = expected_mutual_information(&row, &col);
    let denom = ha.max(hb) - emi;
    if denom.abs() <= f64::EPSILON * ha.max(hb) {
        return 0.0;
    }
    (mi - emi) / denom
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub ari: f64,
    pub ami: f64,
    pub contingency: Contingency<i64, i64>,
}

/// Both scores of `predicted` against `truth`.
pub fn score(predicted: &[i64], truth: &[i64]) -> Result<ScoreReport> {
    check_len(predicted, truth)?;
    let table = contingency(predicted, truth)?;
    Ok(ScoreReport {
        ari: ari_from_table(&table),
        ami: ami_from_table(&table),
        contingency: table,
    })
}
