//! Antipodally symmetric direction sets on S¹ and S².
//!
//! A set is returned as `N` representatives; the full set is the
//! representatives together with their antipodes.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::Rng;

/// `N` pair representatives ξ_j whose ±ξ_j are equidistributed on S^{n−1}.
///
/// * n = 2: ξ_j = (cos(πj/N), sin(πj/N)), so the 2N points are the 2N-th
///   roots of unity.
/// * n = 3: a Fibonacci spiral on the upper hemisphere with heights
///   z_j = 1 − (j + ½)/N; together with the antipodes the heights are
///   uniform on (−1, 1).
pub fn equidistributed_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|j| {
                let th = PI * j as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - (j as f64 + 0.5) / count as f64;
                    let s = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * j as f64;
                    vec![s * phi.cos(), s * phi.sin(), z]
                })
                .collect()
        }
    }
}

/// Expands representatives into the full ±ξ set.
pub fn with_antipodes(reps: &[Vec<f64>]) -> Vec<Vec<f64>> {
    reps.iter()
        .flat_map(|v| [v.clone(), v.iter().map(|x| -x).collect()])
        .collect()
}

pub fn random_direction(rng: &mut Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Radius with density ∝ s^{n−1} on [alpha, 1].
pub fn random_shell_radius(rng: &mut Rng, n: usize, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let u: f64 = rng.random();
    let lo = alpha.powi(n as i32);
    (lo + u * (1.0 - lo)).powf(1.0 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_pairs_are_roots_of_unity() {
        let reps = equidistributed_directions(2, 4);
        let full = with_antipodes(&reps);
        assert_eq!(full.len(), 8);
        for v in &full {
            let ang = v[1].atan2(v[0]);
            let k = ang / (PI / 4.0);
            assert!((k - k.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pair() {
        let reps = equidistributed_directions(3, 1);
        assert_eq!(reps.len(), 1);
        assert!((reps[0].iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
