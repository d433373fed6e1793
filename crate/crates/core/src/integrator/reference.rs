//! Plain floating-point RK4, used only as a test oracle.
//!
//! Nothing here is rigorous; it exists to generate reference trajectories
//! that validated enclosures must contain.

use thiserror::Error;

use crate::model::OdeSystem;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("reference trajectory became non-finite at t = {t}")]
pub struct OracleError {
    pub t: f64,
}

/// Reusable RK4 stepper with preallocated stage buffers.
///
/// State updates use compensated summation; the carried low-order parts
/// belong to the trajectory being advanced, so use one stepper per trajectory.
pub struct Rk4<'a> {
    sys: &'a OdeSystem,
    scratch: Vec<f64>,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    comp: Vec<f64>,
}

impl<'a> Rk4<'a> {
    pub fn new(sys: &'a OdeSystem) -> Self {
        let n = sys.dim();
        Self {
            sys,
            scratch: Vec::new(),
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
            comp: vec![0.0; n],
        }
    }

    pub fn step(&mut self, x: &mut [f64], h: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        self.sys.eval_rhs_into(x, &mut self.scratch, k1);
        for ((t, xi), k) in self.tmp.iter_mut().zip(x.iter()).zip(k1.iter()) {
            *t = xi + 0.5 * h * k;
        }
        self.sys.eval_rhs_into(&self.tmp, &mut self.scratch, k2);
        for ((t, xi), k) in self.tmp.iter_mut().zip(x.iter()).zip(k2.iter()) {
            *t = xi + 0.5 * h * k;
        }
        self.sys.eval_rhs_into(&self.tmp, &mut self.scratch, k3);
        for ((t, xi), k) in self.tmp.iter_mut().zip(x.iter()).zip(k3.iter()) {
            *t = xi + h * k;
        }
        self.sys.eval_rhs_into(&self.tmp, &mut self.scratch, k4);
        for (j, xi) in x.iter_mut().enumerate() {
            let inc = h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) + self.comp[j];
            let sum = *xi + inc;
            let bb = sum - *xi;
            self.comp[j] = (*xi - (sum - bb)) + (inc - bb);
            *xi = sum;
        }
    }

    /// Integrates over `span` with `ceil(span / h_fine)` equal substeps.
    pub fn advance(&mut self, x: &mut [f64], span: f64, h_fine: f64) {
        if span <= 0.0 {
            return;
        }
        let m = (span / h_fine).ceil().max(1.0) as usize;
        let h = span / m as f64;
        for _ in 0..m {
            self.step(x, h);
        }
    }
}

/// State at `t_end` of the point trajectory from `x`.
pub fn reference_integrate(sys: &OdeSystem, x: &[f64], t_end: f64, h_fine: f64) -> Result<Vec<f64>, OracleError> {
    let mut y = x.to_vec();
    Rk4::new(sys).advance(&mut y, t_end, h_fine);
    if y.iter().all(|v| v.is_finite()) {
        Ok(y)
    } else {
        Err(OracleError { t: t_end })
    }
}

/// States at each of the increasing `times` (starting from `t = 0`).
pub fn reference_trajectory(sys: &OdeSystem, x: &[f64], times: &[f64], h_fine: f64) -> Result<Vec<Vec<f64>>, OracleError> {
    let mut rk = Rk4::new(sys);
    let mut y = x.to_vec();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &ti in times {
        rk.advance(&mut y, ti - t, h_fine);
        t = ti;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(OracleError { t });
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    #[test]
    fn zero_field() {
        let sys = parse_model("x1' = 0").unwrap();
        assert_eq!(reference_integrate(&sys, &[2.5], 3.0, 0.1).unwrap(), vec![2.5]);
    }

    #[test]
    fn exponential_decay() {
        let sys = parse_model("x1' = -x1").unwrap();
        let y = reference_integrate(&sys, &[1.0], 1.0, 1e-3).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = parse_model("x1' = x1^2").unwrap();
        assert!(reference_integrate(&sys, &[1.0], 2.0, 1e-3).is_err());
    }
}
