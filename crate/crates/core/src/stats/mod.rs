//! Topology measures, their discrepancy, and the Monte Carlo experiments
//! built on them.

mod concentration;
mod scaling;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nodal::{NodalError, TopologyType};

pub use concentration::{
    bootstrap_median_order, concentration_experiment, concentration_from_trials, quantile, trial_topology, ConcentrationReport,
    ConcentrationRow, TrialTopology, CONCENTRATION_LABEL,
};
pub use scaling::{ns_scaling, scaling_experiment, ScalingFit, ScalingRun, SCALING_LABEL};

/// Tolerance on the total mass of a probability measure.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("not a probability measure: {0}")]
    NotProbability(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Nodal(#[from] NodalError),
}

/// μ_f: counts of classified component types. Unclassified components are
/// kept out of the measure and counted separately.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalTopologyMeasure {
    pub counts: BTreeMap<TopologyType, u64>,
    pub total: u64,
    pub unclassified: u64,
}

/// Row of a serialized measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub topology: String,
    pub count: u64,
    pub mass: f64,
}

pub fn empirical_measure(types: &[TopologyType]) -> EmpiricalTopologyMeasure {
    let mut m = EmpiricalTopologyMeasure::default();
    for t in types {
        m.add(t);
    }
    m
}

impl EmpiricalTopologyMeasure {
    pub fn add(&mut self, t: &TopologyType) {
        if let TopologyType::Unclassified { .. } = t {
            self.unclassified += 1;
        } else {
            *self.counts.entry(t.clone()).or_insert(0) += 1;
            self.total += 1;
        }
    }

    /// μ(t); 0 for an empty measure.
    pub fn mass(&self, t: &TopologyType) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(t).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Pointwise sum of counts (commutative, with the empty measure as unit).
    pub fn merge(&mut self, other: &EmpiricalTopologyMeasure) {
        for (t, c) in &other.counts {
            *self.counts.entry(t.clone()).or_insert(0) += c;
        }
        self.total += other.total;
        self.unclassified += other.unclassified;
    }

    pub fn masses(&self) -> BTreeMap<TopologyType, f64> {
        self.counts.keys().map(|t| (t.clone(), self.mass(t))).collect()
    }

    pub fn entries(&self) -> Vec<MeasureEntry> {
        self.counts
            .iter()
            .map(|(t, &c)| MeasureEntry { topology: t.label(), count: c, mass: self.mass(t) })
            .collect()
    }
}

fn check_probability<K>(m: &BTreeMap<K, f64>, name: &str) -> Result<(), StatsError> {
    if m.values().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(StatsError::NotProbability(format!("{name} has a negative or non-finite mass")));
    }
    let s: f64 = m.values().sum();
    if (s - 1.0).abs() > MASS_TOLERANCE {
        return Err(StatsError::NotProbability(format!("{name} has total mass {s}")));
    }
    Ok(())
}

/// sup_F |μ(F) − ν(F)| = ½ Σ_t |μ(t) − ν(t)| for probability measures given
/// as mass maps.
pub fn discrepancy_masses<K: Ord>(mu: &BTreeMap<K, f64>, nu: &BTreeMap<K, f64>) -> Result<f64, StatsError> {
    check_probability(mu, "first measure")?;
    check_probability(nu, "second measure")?;
    let mut l1 = 0.0;
    for (k, &p) in mu {
        l1 += (p - nu.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &q) in nu {
        if !mu.contains_key(k) {
            l1 += q;
        }
    }
    Ok((0.5 * l1).min(1.0))
}

/// Discrepancy of two empirical measures.
pub fn discrepancy(mu: &EmpiricalTopologyMeasure, nu: &EmpiricalTopologyMeasure) -> Result<f64, StatsError> {
    let (num, den) = discrepancy_exact(mu, nu)?;
    Ok(num as f64 / den as f64)
}

fn require_nonempty(m: &EmpiricalTopologyMeasure, name: &str) -> Result<(), StatsError> {
    if m.total == 0 {
        Err(StatsError::NotProbability(format!("{name} is empty (total = 0)")))
    } else {
        Ok(())
    }
}

/// Signed integer differences a_t·B − b_t·A over the union support; the
/// discrepancy is (sum of a subset of these)/(A·B).
fn scaled_differences(mu: &EmpiricalTopologyMeasure, nu: &EmpiricalTopologyMeasure) -> Vec<i128> {
    let (a_tot, b_tot) = (mu.total as i128, nu.total as i128);
    let mut keys: Vec<&TopologyType> = mu.counts.keys().chain(nu.counts.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|t| {
            let a = mu.counts.get(*t).copied().unwrap_or(0) as i128;
            let b = nu.counts.get(*t).copied().unwrap_or(0) as i128;
            a * b_tot - b * a_tot
        })
        .collect()
}

/// ½·L1 as an exact fraction `(numerator, denominator)`.
pub fn discrepancy_exact(
    mu: &EmpiricalTopologyMeasure,
    nu: &EmpiricalTopologyMeasure,
) -> Result<(u128, u128), StatsError> {
    require_nonempty(mu, "first measure")?;
    require_nonempty(nu, "second measure")?;
    let d = scaled_differences(mu, nu);
    let l1: u128 = d.iter().map(|x| x.unsigned_abs()).sum();
    Ok((l1, 2 * mu.total as u128 * nu.total as u128))
}

/// max over all subsets F of the union support of |μ(F) − ν(F)|, exactly,
/// by enumeration (supports up to 24 types).
pub fn discrepancy_brute_force(
    mu: &EmpiricalTopologyMeasure,
    nu: &EmpiricalTopologyMeasure,
) -> Result<(u128, u128), StatsError> {
    require_nonempty(mu, "first measure")?;
    require_nonempty(nu, "second measure")?;
    let d = scaled_differences(mu, nu);
    if d.len() > 24 {
        return Err(StatsError::InsufficientData(format!("support of size {} is too large to enumerate", d.len())));
    }
    let mut best: u128 = 0;
    for mask in 0u32..(1u32 << d.len()) {
        let s: i128 = d.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).sum();
        best = best.max(s.unsigned_abs());
    }
    Ok((best, mu.total as u128 * nu.total as u128))
}

/// Cross-multiplied equality of two fractions.
pub fn fractions_equal(a: (u128, u128), b: (u128, u128)) -> bool {
    a.0 * b.1 == b.0 * a.1
}
