//! Bessel functions of the first kind for real, nonnegative order.
//!
//! Small arguments (relative to the order) use the ascending series. Everything
//! else goes through Miller's backward recurrence, normalized with the Neumann
//! sum `(x/2)^ν0 = Σ_k (ν0 + 2k) Γ(ν0 + k) / k! · J_{ν0+2k}(x)` (for ν0 = 0 this
//! degenerates to `1 = J_0 + 2 Σ J_{2k}`).

use serde::{Deserialize, Serialize};

use super::gamma::{gamma, ln_gamma};
use super::SpecfunError;

/// Order ν ≥ 0 of a Bessel function.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecfunError> {
        if nu.is_finite() && nu >= 0.0 {
            Ok(Self(nu))
        } else {
            Err(SpecfunError::Domain(format!("Bessel order must be finite and >= 0, got {nu}")))
        }
    }

    pub fn integer(k: u32) -> Self {
        Self(k as f64)
    }

    /// Order `twice / 2`; exact for every half-integer.
    pub fn half(twice: u32) -> Self {
        Self(twice as f64 / 2.0)
    }

    /// ν = (n − 2)/2 for ℝⁿ.
    pub fn for_dimension(n: usize) -> Self {
        Self::half(n.saturating_sub(2) as u32)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// ν + ℓ
    pub fn shifted(self, ell: u32) -> Self {
        Self(self.0 + ell as f64)
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = SpecfunError;
    fn try_from(nu: f64) -> Result<Self, Self::Error> {
        Self::new(nu)
    }
}

impl From<BesselOrder> for f64 {
    fn from(o: BesselOrder) -> f64 {
        o.0
    }
}

const SERIES_RADIUS: f64 = 12.0;
const RESCALE_ABOVE: f64 = 1e250;

fn check_arg(x: f64) -> Result<(), SpecfunError> {
    if x.is_nan() || x < 0.0 {
        Err(SpecfunError::Domain(format!("Bessel argument must be >= 0, got {x}")))
    } else {
        Ok(())
    }
}

fn use_series(nu: f64, x: f64) -> bool {
    x <= SERIES_RADIUS || x * x <= 8.0 * (nu + 1.0)
}

/// Σ_k (−1)^k (x/2)^{2k} / (k! Γ(k + ν + 1)), i.e. J_ν(x) / (x/2)^ν.
fn reduced_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0 / gamma(nu + 1.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 0.5 * x {
            break;
        }
        if k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let red = reduced_series(nu, x);
    if nu == 0.0 {
        return red;
    }
    // (x/2)^ν may underflow on its own while the product is representable.
    let log_pref = nu * (0.5 * x).ln();
    red.signum() * (log_pref + red.abs().ln()).exp()
}

/// J_ν(x) for ν ≥ 0, x ≥ 0.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64, SpecfunError> {
    check_arg(x)?;
    let nu = order.value();
    if use_series(nu, x) {
        return Ok(series(nu, x));
    }
    let base = nu.fract();
    let steps = nu.trunc() as usize;
    Ok(miller_sequence(base, steps, x)[steps])
}

/// J_ν(r) / r^ν, continuous at r = 0 where it equals 1 / (2^ν Γ(ν + 1)).
pub fn bessel_j_scaled(order: BesselOrder, r: f64) -> Result<f64, SpecfunError> {
    check_arg(r)?;
    let nu = order.value();
    if use_series(nu, r) {
        return Ok(reduced_series(nu, r) * 0.5f64.powf(nu));
    }
    Ok(bessel_j(order, r)? / r.powf(nu))
}

/// `[J_{ν0}(x), J_{ν0+1}(x), …, J_{ν0+max_shift}(x)]` for 0 ≤ ν0 < 1.
pub fn bessel_j_sequence(base: f64, max_shift: usize, x: f64) -> Result<Vec<f64>, SpecfunError> {
    check_arg(x)?;
    if !(0.0..1.0).contains(&base) {
        return Err(SpecfunError::Domain(format!("sequence base order must lie in [0, 1), got {base}")));
    }
    if x == 0.0 {
        let mut out = vec![0.0; max_shift + 1];
        if base == 0.0 {
            out[0] = 1.0;
        }
        return Ok(out);
    }
    Ok(miller_sequence(base, max_shift, x))
}

/// `[J_{ν0+ℓ}(r) / r^{ν0}]_{ℓ = 0..=max_shift}`: the radial profiles of P₁.
pub fn bessel_j_scaled_sequence(base: f64, max_shift: usize, r: f64) -> Result<Vec<f64>, SpecfunError> {
    if r == 0.0 {
        check_arg(r)?;
        let mut out = vec![0.0; max_shift + 1];
        out[0] = bessel_j_scaled(BesselOrder::new(base)?, 0.0)?;
        return Ok(out);
    }
    let mut seq = bessel_j_sequence(base, max_shift, r)?;
    if base != 0.0 {
        let scale = r.powf(-base);
        seq.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(seq)
}

fn miller_start(max_shift: usize, x: f64) -> usize {
    let top = (max_shift as f64).max(x);
    let m = top.ceil() as usize + 30 + (60.0 * top).sqrt().ceil() as usize;
    m + (m % 2)
}

fn miller_sequence(base: f64, max_shift: usize, x: f64) -> Vec<f64> {
    let start = miller_start(max_shift, x);
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        let mu = base + k as f64;
        vals[k - 1] = 2.0 * mu / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > RESCALE_ABOVE {
            for v in vals[k - 1..].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }

    let norm = if base == 0.0 {
        let mut s = vals[0];
        for k in (2..=start).step_by(2) {
            s += 2.0 * vals[k];
        }
        1.0 / s
    } else {
        // weight_k = (ν0 + 2k) Γ(ν0 + k) / k!, built as Γ(ν0) · Π (ν0 + j − 1)/j.
        let mut ratio = gamma(base);
        let mut s = base * ratio * vals[0];
        let mut k = 1usize;
        while 2 * k <= start {
            ratio *= (base + k as f64 - 1.0) / k as f64;
            s += (base + 2.0 * k as f64) * ratio * vals[2 * k];
            k += 1;
        }
        let log_target = base * (0.5 * x).ln();
        log_target.exp() / s
    };
    vals.truncate(max_shift + 1);
    vals.iter_mut().for_each(|v| *v *= norm);
    vals
}

/// First positive zero of J_ν, bracketed on a scan and refined by bisection.
pub fn first_zero(order: BesselOrder) -> Result<f64, SpecfunError> {
    let f = |x: f64| bessel_j(order, x);
    let step = 0.05;
    let mut lo = 1e-3;
    let mut flo = f(lo)?;
    loop {
        let hi = lo + step;
        let fhi = f(hi)?;
        if flo.signum() != fhi.signum() {
            let (mut a, mut b, mut fa) = (lo, hi, flo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = f(mid)?;
                if fm == 0.0 {
                    return Ok(mid);
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a < 1e-15 * b {
                    break;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
        flo = fhi;
        if lo > 1e4 {
            return Err(SpecfunError::Domain("no Bessel zero found below 1e4".into()));
        }
    }
}

/// log of the power-series envelope (x/2)^ν / Γ(ν + 1), an upper bound for |J_ν(x)|.
pub(crate) fn ln_series_envelope(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)
}
