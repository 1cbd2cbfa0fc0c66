//! Normalized Hermite-Gauss functions
//! h_n(x) = (2ⁿ n! √π)^{−1/2} H_n(x) e^{−x²/2}.

use crate::{Error, Result};

/// Highest order accepted; the recurrence itself is stable well beyond this.
pub const MAX_ORDER: usize = 500;

const PI_M14: f64 = 0.751_125_544_464_942_5;

fn check(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        Err(Error::Domain(format!(
            "Hermite-Gauss order {n} exceeds the supported maximum {MAX_ORDER}"
        )))
    } else {
        Ok(())
    }
}

/// h₀ … h_n at `x` by the normalized three-term recurrence
/// h_{m+1} = √(2/(m+1))·x·h_m − √(m/(m+1))·h_{m−1}.
pub fn hermite_gauss_all(n: usize, x: f64) -> Result<Vec<f64>> {
    check(n)?;
    let mut h = Vec::with_capacity(n + 1);
    h.push(PI_M14 * (-0.5 * x * x).exp());
    if n >= 1 {
        h.push(std::f64::consts::SQRT_2 * x * h[0]);
    }
    for m in 1..n {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * x * h[m] - (mf / (mf + 1.0)).sqrt() * h[m - 1];
        h.push(next);
    }
    Ok(h)
}

pub fn hermite_gauss(n: usize, x: f64) -> Result<f64> {
    check(n)?;
    let mut prev = 0.0;
    let mut cur = PI_M14 * (-0.5 * x * x).exp();
    for m in 0..n {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * x * cur - (mf / (mf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
