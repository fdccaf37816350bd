//! k-NN density estimate and the level-slack parameter math.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::knn::KnnIndex;
use crate::scalar::Scalar;

/// Volume of the unit ball in R^d, π^{d/2} / Γ(d/2 + 1).
pub fn unit_ball_volume<T: Scalar>(d: usize) -> Result<T> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    // v_0 = 1, v_1 = 2, v_d = v_{d-2} * 2π / d
    let two_pi = T::of(2.0) * T::PI();
    let mut v = if d.is_multiple_of(2) { T::one() } else { T::of(2.0) };
    let mut m = if d.is_multiple_of(2) { 2 } else { 3 };
    while m <= d {
        v = v * two_pi / T::of_usize(m);
        m += 2;
    }
    Ok(v)
}

/// Per-point k-NN density values and the processing order (descending value,
/// ties by ascending index).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate<T> {
    values: Vec<T>,
    order: Vec<usize>,
    k: usize,
    n: usize,
    d: usize,
}

impl<T: Scalar> DensityEstimate<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn max(&self) -> T {
        self.values[self.order[0]]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Wraps precomputed values, deriving the processing order.
    pub fn from_values(values: Vec<T>, k: usize, d: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(Error::ZeroRadius { index: i });
        }
        let n = values.len();
        let order = descending_order(&values);
        Ok(Self {
            values,
            order,
            k,
            n,
            d,
        })
    }
}

fn descending_order<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// f_k(x) = k / (n · v_d · r_k(x)^d) for every sample point.
pub fn knn_density<T: Scalar>(index: &KnnIndex<T>) -> Result<DensityEstimate<T>> {
    let (k, n, d) = (index.k(), index.n(), index.d());
    if let Some(i) = (0..n).find(|&i| index.radius(i) <= T::zero()) {
        return Err(Error::ZeroRadius { index: i });
    }
    let scale = T::of_usize(k) / (T::of_usize(n) * unit_ball_volume::<T>(d)?);
    let exponent = i32::try_from(d).map_err(|_| Error::InvalidDimension(d))?;
    let values: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| scale / index.radius(i).powi(exponent))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        // r_k^d underflowed; the estimate is unusable at this scale.
        return Err(Error::ZeroRadius { index: i });
    }
    DensityEstimate::from_values(values, k, d)
}

/// C_{δ,n} = 16 · ln(2/δ) · sqrt(d · ln n). `n` is real-valued here.
pub fn c_delta_n<T: Scalar>(delta: T, n: T, d: usize) -> Result<T> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidDelta(delta.as_f64()));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    if !(n >= T::of(2.0)) {
        return Err(Error::TooFewPoints {
            n: n.to_usize().unwrap_or(0),
            min: 2,
        });
    }
    let sixteen = T::of(16.0);
    Ok(sixteen * (T::of(2.0) / delta).ln() * (T::of_usize(d) * n.ln()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMode {
    /// 4 · C_{δ,n} / sqrt(k)
    Theoretical,
    /// 2 / sqrt(k)
    Practical,
    Custom,
}

impl std::str::FromStr for BetaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theoretical" => Ok(BetaMode::Theoretical),
            "practical" => Ok(BetaMode::Practical),
            "custom" => Ok(BetaMode::Custom),
            other => Err(Error::InvalidConfig(format!("unknown beta mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for BetaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BetaMode::Theoretical => "theoretical",
            BetaMode::Practical => "practical",
            BetaMode::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaConfig {
    pub mode: BetaMode,
    pub delta: f64,
    pub custom_value: Option<f64>,
}

impl Default for BetaConfig {
    fn default() -> Self {
        Self::practical()
    }
}

impl BetaConfig {
    pub const DEFAULT_DELTA: f64 = 0.05;

    pub fn practical() -> Self {
        Self {
            mode: BetaMode::Practical,
            delta: Self::DEFAULT_DELTA,
            custom_value: None,
        }
    }

    pub fn theoretical(delta: f64) -> Self {
        Self {
            mode: BetaMode::Theoretical,
            delta,
            custom_value: None,
        }
    }

    pub fn custom(value: f64) -> Self {
        Self {
            mode: BetaMode::Custom,
            delta: Self::DEFAULT_DELTA,
            custom_value: Some(value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidDelta(self.delta));
        }
        if self.mode == BetaMode::Custom {
            match self.custom_value {
                Some(v) if v.is_finite() && v > 0.0 => {}
                Some(v) => return Err(Error::InvalidConfig(format!("custom beta must be > 0, got {v}"))),
                None => return Err(Error::InvalidConfig("custom beta mode needs a value".into())),
            }
        }
        Ok(())
    }
}

/// 4 · c / sqrt(k), the theoretical slack for a given C_{δ,n}.
pub fn theoretical_beta<T: Scalar>(c: T, k: usize) -> T {
    T::of(4.0) * c / T::of_usize(k).sqrt()
}

pub fn beta_k<T: Scalar>(config: &BetaConfig, k: usize, n: usize, d: usize) -> Result<T> {
    config.validate()?;
    if k < 2 {
        return Err(Error::InvalidK { k, n });
    }
    Ok(match config.mode {
        BetaMode::Practical => T::of(2.0) / T::of_usize(k).sqrt(),
        BetaMode::Theoretical => {
            theoretical_beta(c_delta_n(T::of(config.delta), T::of_usize(n), d)?, k)
        }
        BetaMode::Custom => T::of(config.custom_value.expect("validated")),
    })
}

/// ½ · (ln n)^2 for real `n`.
pub fn half_log_squared(n: f64) -> f64 {
    0.5 * n.ln().powi(2)
}

/// Default neighbor count max(2, round(½ (ln n)^2)).
pub fn default_k(n: usize) -> Result<usize> {
    if n < 8 {
        return Err(Error::TooFewPoints { n, min: 8 });
    }
    Ok((half_log_squared(n as f64).round() as usize).max(2))
}
