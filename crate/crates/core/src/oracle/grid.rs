use nalgebra::DMatrix;
use num_complex::Complex64;

use super::OracleError;

/// Integrand magnitude below which a radial window closes.
pub const TAIL_THRESHOLD: f64 = 1e-10;

/// Symmetric square trapezoid grid on `[−half_width, half_width]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    half_width: f64,
    points: usize,
}

impl PhaseGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self, OracleError> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(OracleError::Range(format!("grid half-width must be positive, got {half_width}")));
        }
        if points < 3 || points % 2 == 0 {
            return Err(OracleError::Range(format!("points per axis must be odd and ≥ 3, got {points}")));
        }
        Ok(Self { half_width, points })
    }

    /// Default grid for characteristic-function integrals.
    pub fn y_default() -> Self {
        Self { half_width: 12.0, points: 241 }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| -self.half_width + i as f64 * h).collect()
    }

    /// One-dimensional trapezoid weights.
    pub fn axis_weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points)
            .map(|i| if i == 0 || i + 1 == self.points { 0.5 * h } else { h })
            .collect()
    }

    /// All `(node, weight)` pairs in row-major order.
    pub fn cells(&self) -> Vec<([f64; 2], f64)> {
        let (nodes, weights) = (self.nodes(), self.axis_weights());
        let mut out = Vec::with_capacity(self.points * self.points);
        for i in 0..self.points {
            for j in 0..self.points {
                out.push(([nodes[i], nodes[j]], weights[i] * weights[j]));
            }
        }
        out
    }
}

/// Radius of the first grid-spacing shell whose largest `|value|` is at most
/// [`TAIL_THRESHOLD`]; values on `nodes × nodes` indexed `[(i, j)]`.
pub fn radial_window(nodes: &[f64], step: f64, values: &DMatrix<Complex64>) -> Option<f64> {
    shell_maxima(nodes, step, values)
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &m)| m <= TAIL_THRESHOLD)
        .map(|(k, _)| k as f64 * step)
}

pub(crate) fn shell_maxima(nodes: &[f64], step: f64, values: &DMatrix<Complex64>) -> Vec<f64> {
    let shell = |i: usize, j: usize| (nodes[i].hypot(nodes[j]) / step) as usize;
    let n = nodes.len();
    let mut maxima = vec![0.0f64; shell(0, 0) + 1];
    for i in 0..n {
        for j in 0..n {
            let k = shell(i, j);
            maxima[k] = maxima[k].max(values[(i, j)].norm());
        }
    }
    maxima
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_cover_the_square() {
        let g = PhaseGrid::new(12.0, 241).unwrap();
        let total: f64 = g.cells().iter().map(|c| c.1).sum();
        assert!((total - 576.0).abs() < 1e-9);
        let nodes = g.nodes();
        assert_eq!(nodes[120], 0.0);
        assert!(nodes.iter().zip(nodes.iter().rev()).all(|(a, b)| (a + b).abs() < 1e-12));
        assert!(PhaseGrid::new(1.0, 10).is_err());
        assert!(PhaseGrid::new(-1.0, 11).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }
}
