use crate::error::{Error, Result};

pub(crate) const MAX_POWER_ITERATIONS: usize = 100_000;

#[derive(Clone, Debug)]
pub(crate) struct PowerResult {
    pub value: f64,
    pub iterations: usize,
}

/// Largest eigenvalue of a symmetric positive semidefinite operator.
///
/// Stops once the Rayleigh quotient changes by less than `tol` relative to
/// its value. For a PSD operator the quotient is nondecreasing along the
/// iteration, so every returned value is a lower estimate.
pub(crate) fn power_iteration(
    what: &'static str,
    mut x: Vec<f64>,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    tol: f64,
) -> Result<PowerResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let norm = l2(&x);
    if x.is_empty() || norm == 0.0 {
        return Ok(PowerResult {
            value: 0.0,
            iterations: 0,
        });
    }
    x.iter_mut().for_each(|v| *v /= norm);
    let mut y = vec![0.0; x.len()];
    let mut prev = f64::NEG_INFINITY;
    for it in 1..=MAX_POWER_ITERATIONS {
        apply(&x, &mut y);
        let rho: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ny = l2(&y);
        if ny == 0.0 {
            return Ok(PowerResult {
                value: 0.0,
                iterations: it,
            });
        }
        if (rho - prev).abs() <= tol * rho.abs() {
            return Ok(PowerResult {
                value: rho.max(prev),
                iterations: it,
            });
        }
        prev = rho;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    Err(Error::NonConvergence {
        what,
        iterations: MAX_POWER_ITERATIONS,
        best: prev,
    })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
