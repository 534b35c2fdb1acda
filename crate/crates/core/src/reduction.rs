//! Modular index reduction and its diagnostics.
//!
//! A metric scale `L` (a nonnegative integer, Planck units, arbitrary size)
//! is reduced to a basis-state index by the exact Euclidean remainder
//! `L mod n`.  The reduction is pure integer arithmetic; no floating point
//! enters anywhere.  Around it sit three diagnostics: a histogram scan that
//! measures how uniformly a sampled `L`-sequence covers the residue classes,
//! a sensitivity map showing how the index reacts to small shifts in `L`,
//! and a comparison report that checks, per time sample, whether the reduced
//! index agrees with the index selected by the steering parameter.  The
//! comparison is an empirical record, not an assertion: agreement is exact
//! when the scale series is built from the steering parameter and drops to
//! the `1/n` baseline when the two are unrelated.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::geometry::{self, CurvatureProfile, ThermoParams};

/// One time sample of the reduction-vs-steering comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionSample {
    pub time: f64,
    /// Metric scale that was reduced.
    pub scale: BigUint,
    /// Number of basis states `n`.
    pub states: usize,
    /// `scale mod states`.
    pub index: usize,
    /// Index selected by the steering parameter at the same time.
    pub gamma_index: usize,
    pub agrees: bool,
}

/// Residue histogram of a scanned `L`-sequence with its chi-square
/// uniformity statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityScan {
    pub histogram: Vec<u64>,
    pub chi_square: f64,
    pub p_value: f64,
    pub degrees_of_freedom: usize,
}

/// Index response to small shifts of the scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityMap {
    pub center_index: usize,
    /// `(delta, index(L + delta))` for every shift in `[-radius, radius]`.
    pub entries: Vec<(i64, usize)>,
    /// Fraction of shifts whose index differs from the center index.
    pub change_fraction: f64,
}

/// Per-time comparison of reduced indices against steering indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceReport {
    pub samples: Vec<ReductionSample>,
    pub agreement_rate: f64,
}

fn check_states(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("states", "need at least one basis state"));
    }
    Ok(())
}

/// Exact Euclidean remainder `L mod n`, mapped into `[0, n)`.
pub fn index_mod(scale: &BigUint, states: usize) -> Result<usize> {
    check_states(states)?;
    let r = scale % BigUint::from(states);
    Ok(r.to_usize().expect("remainder below states fits in usize"))
}

/// Scan `count` scales starting at `l_start` with unit stride.
pub fn uniformity_scan(l_start: &BigUint, count: usize, states: usize) -> Result<UniformityScan> {
    uniformity_scan_with_stride(l_start, count, states, &BigUint::one())
}

/// Scan `count` scales `l_start + k * stride` and histogram their residues.
///
/// Only the first residue and the stride's residue are reduced with big
/// integers; every later sample steps the running residue in machine words,
/// so the scan costs O(count) regardless of how large the scales are.
pub fn uniformity_scan_with_stride(
    l_start: &BigUint,
    count: usize,
    states: usize,
    stride: &BigUint,
) -> Result<UniformityScan> {
    check_states(states)?;
    if count < 10 * states {
        return Err(Error::domain(
            "count",
            format!("need at least 10 samples per residue class, got {count} for {states}"),
        ));
    }
    if stride.is_zero() {
        return Err(Error::domain("stride", "must be positive"));
    }
    let mut histogram = vec![0u64; states];
    let mut residue = index_mod(l_start, states)?;
    let step = index_mod(stride, states)?;
    for _ in 0..count {
        histogram[residue] += 1;
        residue = (residue + step) % states;
    }
    let expected = count as f64 / states as f64;
    let chi_square: f64 =
        histogram.iter().map(|&h| (h as f64 - expected).powi(2) / expected).sum();
    let degrees_of_freedom = states - 1;
    let p_value = chi_square_p(chi_square, degrees_of_freedom);
    Ok(UniformityScan { histogram, chi_square, p_value, degrees_of_freedom })
}

/// Upper tail probability of a chi-square variable with `dof` degrees of
/// freedom.  Zero degrees of freedom is the point mass at zero.
fn chi_square_p(chi_square: f64, dof: usize) -> f64 {
    if dof == 0 {
        return if chi_square > 0.0 { 0.0 } else { 1.0 };
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    dist.sf(chi_square)
}

/// Indices of `L + delta` for every shift within `radius` of zero.
///
/// Shifts below `-L` are folded back with the Euclidean convention so the
/// reported index always lies in `[0, n)`.  For consecutive shifts spanning
/// a whole number of residue periods the change fraction is exactly
/// `1 - 1/n`.
pub fn sensitivity_map(scale: &BigUint, states: usize, radius: u32) -> Result<SensitivityMap> {
    check_states(states)?;
    if radius == 0 {
        return Err(Error::domain("radius", "must be at least 1"));
    }
    let center_index = index_mod(scale, states)?;
    let base = BigInt::from(scale.clone());
    let modulus = BigInt::from(states);
    let mut entries = Vec::with_capacity(2 * radius as usize + 1);
    let mut changed = 0usize;
    for delta in -(radius as i64)..=radius as i64 {
        let mut r = (&base + BigInt::from(delta)) % &modulus;
        if r.is_negative() {
            r += &modulus;
        }
        let index = r.to_usize().expect("remainder below states fits in usize");
        if index != center_index {
            changed += 1;
        }
        entries.push((delta, index));
    }
    let change_fraction = changed as f64 / entries.len() as f64;
    Ok(SensitivityMap { center_index, entries, change_fraction })
}

/// Compare the reduced index of each supplied scale against the index the
/// steering parameter selects at the matching time.
pub fn correspondence_report(
    scales: &[BigUint],
    states: usize,
    profile: &CurvatureProfile,
    thermo: &ThermoParams,
    times: &[f64],
) -> Result<CorrespondenceReport> {
    check_states(states)?;
    if scales.len() != times.len() {
        return Err(Error::domain(
            "scales",
            format!("{} scales but {} times", scales.len(), times.len()),
        ));
    }
    if times.is_empty() {
        return Err(Error::domain("times", "need at least one sample"));
    }
    let mut samples = Vec::with_capacity(times.len());
    let mut agreeing = 0usize;
    for (scale, &time) in scales.iter().zip(times) {
        let gamma = geometry::gamma_at(profile, thermo, time)?;
        let gamma_index = geometry::initial_index(gamma, states)?;
        let index = index_mod(scale, states)?;
        let agrees = index == gamma_index;
        if agrees {
            agreeing += 1;
        }
        samples.push(ReductionSample {
            time,
            scale: scale.clone(),
            states,
            index,
            gamma_index,
            agrees,
        });
    }
    let agreement_rate = agreeing as f64 / samples.len() as f64;
    Ok(CorrespondenceReport { samples, agreement_rate })
}
