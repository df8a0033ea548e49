//! The shared `(k, ω)`-resolved structure-factor container.

use serde::{Deserialize, Serialize};

/// A momentum- and frequency-resolved spectral function.
///
/// `values[ik][iw]` holds `S(k_values[ik], omega[iw])`. Cross structure
/// factors carry their complex data in `complex_values` and leave `values`
/// as the real part (often zero).
#[derive(Clone, Debug)]
pub struct SpectralGrid {
    pub k_values: Vec<f64>,
    /// Uniform frequency grid.
    pub omega: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub complex_values: Option<Vec<Vec<num_complex::Complex64>>>,
    pub meta: GridMeta,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridMeta {
    pub variant: String,
    /// Gaussian broadening width (0 for methods with intrinsic linewidths).
    pub sigma_omega: f64,
    pub n_sites: Option<usize>,
    pub probe: String,
    /// Exact `ω`-integral per `k` before gridding (the sum rule target).
    pub sum_rule: Vec<f64>,
    /// Grid quadrature of each `k` column.
    pub quadrature: Vec<f64>,
}

impl SpectralGrid {
    pub fn omega_step(&self) -> f64 {
        if self.omega.len() < 2 {
            0.0
        } else {
            self.omega[1] - self.omega[0]
        }
    }

    /// Trapezoidal quadrature of one momentum column.
    pub fn integrate_column(&self, ik: usize) -> f64 {
        let h = self.omega_step();
        let col = &self.values[ik];
        if col.len() < 2 {
            return 0.0;
        }
        let inner: f64 = col[1..col.len() - 1].iter().sum();
        h * (inner + 0.5 * (col[0] + col[col.len() - 1]))
    }

    /// Relative sum-rule residual per momentum column.
    pub fn sum_rule_residuals(&self) -> Vec<f64> {
        (0..self.k_values.len())
            .map(|ik| {
                let exact = self.meta.sum_rule[ik];
                if exact == 0.0 {
                    self.integrate_column(ik).abs()
                } else {
                    (self.integrate_column(ik) - exact).abs() / exact.abs()
                }
            })
            .collect()
    }

    /// Frequency of the largest value in a column, restricted to
    /// `omega >= omega_min`, with three-point parabolic refinement.
    pub fn peak_position(&self, ik: usize, omega_min: f64) -> Option<f64> {
        let col = &self.values[ik];
        let mut best: Option<(usize, f64)> = None;
        for (i, (&w, &v)) in self.omega.iter().zip(col).enumerate() {
            if w < omega_min {
                continue;
            }
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        let (i, _) = best?;
        if i == 0 || i + 1 >= col.len() {
            return Some(self.omega[i]);
        }
        // Parabolic interpolation through the peak triple.
        let (ym, y0, yp) = (col[i - 1], col[i], col[i + 1]);
        let denom = ym - 2.0 * y0 + yp;
        let shift = if denom.abs() > 1e-300 {
            0.5 * (ym - yp) / denom
        } else {
            0.0
        };
        Some(self.omega[i] + shift.clamp(-1.0, 1.0) * self.omega_step())
    }
}

/// Uniform grid helper.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + h * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_quadrature_of_triangle() {
        let omega = linspace(-1.0, 1.0, 201);
        let values = vec![omega.iter().map(|&w: &f64| 1.0 - w.abs()).collect()];
        let g = SpectralGrid {
            k_values: vec![0.0],
            omega,
            values,
            complex_values: None,
            meta: GridMeta {
                variant: "test".into(),
                sigma_omega: 0.0,
                n_sites: None,
                probe: "test".into(),
                sum_rule: vec![1.0],
                quadrature: vec![],
            },
        };
        assert!((g.integrate_column(0) - 1.0).abs() < 1e-12);
        assert!(g.sum_rule_residuals()[0] < 1e-12);
    }

    #[test]
    fn peak_refinement_recovers_offset_maximum() {
        let omega = linspace(0.0, 2.0, 41);
        let center = 1.234;
        let values = vec![omega
            .iter()
            .map(|&w: &f64| (-((w - center) / 0.2).powi(2)).exp())
            .collect()];
        let g = SpectralGrid {
            k_values: vec![0.0],
            omega,
            values,
            complex_values: None,
            meta: GridMeta {
                variant: "test".into(),
                sigma_omega: 0.0,
                n_sites: None,
                probe: "test".into(),
                sum_rule: vec![1.0],
                quadrature: vec![],
            },
        };
        let peak = g.peak_position(0, 0.0).unwrap();
        assert!((peak - center).abs() < 0.01, "peak {peak}");
    }
}
