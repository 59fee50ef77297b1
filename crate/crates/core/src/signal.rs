//! Turning continuous series into binary activity.
//!
//! The pipeline is: drop the least variable variables by robust CV, then
//! dichotomize either the raw values (time domain) or each variable's
//! periodogram (Fourier domain).

use std::cmp::Ordering;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, SeriesMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Time,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomizeConfig {
    pub domain: Domain,
    pub drop_fraction: f64,
    pub active_fraction: f64,
    pub power_quantile: f64,
}

impl Default for DichotomizeConfig {
    fn default() -> Self {
        Self {
            domain: Domain::Time,
            drop_fraction: 0.2,
            active_fraction: 0.2,
            power_quantile: 0.9,
        }
    }
}

impl DichotomizeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.drop_fraction) {
            return Err(Error::invalid("drop fraction must lie in [0, 1)"));
        }
        if !(self.active_fraction > 0.0 && self.active_fraction < 1.0) {
            return Err(Error::invalid("active fraction must lie in (0, 1)"));
        }
        if !(self.power_quantile > 0.0 && self.power_quantile < 1.0) {
            return Err(Error::invalid("power quantile must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Result of [`dichotomize`]: the binary matrix plus what was dropped on the way.
#[derive(Debug, Clone)]
pub struct Dichotomized {
    pub matrix: BinaryMatrix,
    pub dropped: Vec<String>,
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Interquartile range over median.
pub fn robust_cv(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::invalid("robust CV needs at least two values"));
    }
    let s = sorted_copy(series);
    let median = quantile_sorted(&s, 0.5);
    if median == 0.0 {
        return Err(Error::UndefinedRobustCv);
    }
    Ok((quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)) / median)
}

#[derive(Debug, Clone, Copy)]
enum Variability {
    Undefined,
    Cv(f64),
}

impl Variability {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Variability::Undefined, Variability::Undefined) => Ordering::Equal,
            (Variability::Undefined, _) => Ordering::Less,
            (_, Variability::Undefined) => Ordering::Greater,
            (Variability::Cv(a), Variability::Cv(b)) => a.total_cmp(b),
        }
    }
}

/// Remove the `floor(drop_fraction · V)` least variable columns, plus every
/// constant column. Returns the retained matrix (original column order) and the
/// dropped labels sorted.
pub fn drop_low_variability(
    sm: &SeriesMatrix,
    drop_fraction: f64,
) -> Result<(SeriesMatrix, Vec<String>)> {
    if !(0.0..1.0).contains(&drop_fraction) {
        return Err(Error::invalid("drop fraction must lie in [0, 1)"));
    }
    let n_vars = sm.n_vars();
    let stats: Vec<(Variability, bool)> = (0..n_vars)
        .into_par_iter()
        .map(|v| {
            let col = sm.column(v);
            let constant = col.iter().all(|&x| x == col[0]);
            let var = match robust_cv(&col) {
                Ok(cv) => Variability::Cv(cv),
                Err(_) => Variability::Undefined,
            };
            (var, constant)
        })
        .collect();

    // Ties broken by label so the choice does not depend on column order.
    let mut order: Vec<usize> = (0..n_vars).collect();
    order.sort_by(|&a, &b| {
        stats[a]
            .0
            .cmp(&stats[b].0)
            .then_with(|| sm.labels()[a].cmp(&sm.labels()[b]))
    });
    let quota = (drop_fraction * n_vars as f64 + 1e-9).floor() as usize;
    let mut drop = vec![false; n_vars];
    for &v in order.iter().take(quota) {
        drop[v] = true;
    }
    for (v, (var, constant)) in stats.iter().enumerate() {
        if *constant || matches!(var, Variability::Undefined) {
            drop[v] = true;
        }
    }
    let keep: Vec<usize> = (0..n_vars).filter(|&v| !drop[v]).collect();
    if keep.is_empty() {
        return Err(Error::NoVariablesRetained);
    }
    let mut dropped: Vec<String> = (0..n_vars)
        .filter(|&v| drop[v])
        .map(|v| sm.labels()[v].clone())
        .collect();
    dropped.sort();
    Ok((sm.select(&keep), dropped))
}

/// Indices of the `k` largest values; ties go to the earlier index.
fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Number of active points per variable used by [`dichotomize_time`].
pub fn active_count(n_time: usize, active_fraction: f64) -> usize {
    // the epsilon keeps exact products such as 10 * 0.2 from rounding up
    ((active_fraction * n_time as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Mark the `ceil(active_fraction · T)` highest time points of each variable.
pub fn dichotomize_time(sm: &SeriesMatrix, active_fraction: f64) -> Result<BinaryMatrix> {
    if !(active_fraction > 0.0 && active_fraction < 1.0) {
        return Err(Error::invalid("active fraction must lie in (0, 1)"));
    }
    let n_time = sm.n_time();
    let n_vars = sm.n_vars();
    let k = active_count(n_time, active_fraction);
    let columns: Vec<Vec<usize>> = (0..n_vars)
        .into_par_iter()
        .map(|v| top_k(&sm.column(v), k))
        .collect();
    let mut bits = vec![0u8; n_time * n_vars];
    for (v, active) in columns.iter().enumerate() {
        for &t in active {
            bits[t * n_vars + v] = 1;
        }
    }
    Ok(BinaryMatrix::from_parts(sm.labels().to_vec(), n_time, bits))
}

/// Periodogram at the Fourier frequencies `2πk/T`, `k = 1..=floor(T/2)`.
///
/// `I(ω_k) = |Σ_t x_t e^{-iω_k t}|² / T`. The zero frequency is omitted.
pub fn periodogram(series: &[f64]) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::invalid("periodogram needs at least two values"));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    Ok((1..=n / 2).map(|k| buf[k].norm_sqr() / n as f64).collect())
}

/// Mark, per variable, the frequencies whose power is strictly above that
/// variable's `power_quantile` power. Observations are frequencies `k = 1..=T/2`.
pub fn dichotomize_fourier(sm: &SeriesMatrix, power_quantile: f64) -> Result<BinaryMatrix> {
    if !(power_quantile > 0.0 && power_quantile < 1.0) {
        return Err(Error::invalid("power quantile must lie in (0, 1)"));
    }
    let n_freq = sm.n_time() / 2;
    let n_vars = sm.n_vars();
    let columns: Vec<Vec<bool>> = (0..n_vars)
        .into_par_iter()
        .map(|v| {
            let power = periodogram(&sm.column(v))?;
            let threshold = quantile_sorted(&sorted_copy(&power), power_quantile);
            Ok(power.iter().map(|&p| p > threshold).collect())
        })
        .collect::<Result<_>>()?;
    let mut bits = vec![0u8; n_freq * n_vars];
    for (v, col) in columns.iter().enumerate() {
        for (k, &on) in col.iter().enumerate() {
            if on {
                bits[k * n_vars + v] = 1;
            }
        }
    }
    Ok(BinaryMatrix::from_parts(sm.labels().to_vec(), n_freq, bits))
}

/// Full pipeline: drop low-variability variables, then dichotomize.
pub fn dichotomize(sm: &SeriesMatrix, cfg: &DichotomizeConfig) -> Result<Dichotomized> {
    cfg.validate()?;
    let (kept, dropped) = drop_low_variability(sm, cfg.drop_fraction)?;
    let matrix = match cfg.domain {
        Domain::Time => dichotomize_time(&kept, cfg.active_fraction)?,
        Domain::Fourier => dichotomize_fourier(&kept, cfg.power_quantile)?,
    };
    Ok(Dichotomized { matrix, dropped })
}
