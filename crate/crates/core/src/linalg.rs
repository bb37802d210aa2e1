//! Dense LU solve with a 1-norm condition estimate.

use nalgebra::{DMatrix, DVector, LU};

pub(crate) struct DenseLu {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    norm1: f64,
    n: usize,
}

impl DenseLu {
    /// Factor `m` with partial pivoting. Returns `None` on an exactly zero pivot.
    pub fn new(m: DMatrix<f64>) -> Option<Self> {
        let n = m.nrows();
        let norm1 = (0..n)
            .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let lu = m.lu();
        if !lu.is_invertible() {
            return None;
        }
        Some(Self { lu, norm1, n })
    }

    pub fn solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        self.lu.solve(b)
    }

    /// Hager-Higham estimate of `‖M‖₁ ‖M⁻¹‖₁` for a symmetric matrix
    /// (so that `M⁻ᵀ = M⁻¹` and a single factorization serves both solves).
    pub fn condition_estimate_symmetric(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = DVector::from_element(n, 1.0 / n as f64);
        let mut estimate = 0.0;
        for _ in 0..5 {
            let Some(y) = self.solve(&x) else {
                return f64::INFINITY;
            };
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
            let Some(z) = self.solve(&xi) else {
                return f64::INFINITY;
            };
            let (jmax, zmax) = z.iter().enumerate().fold(
                (0, 0.0f64),
                |acc, (j, v)| if v.abs() > acc.1 { (j, v.abs()) } else { acc },
            );
            if zmax <= z.dot(&x) {
                break;
            }
            x.fill(0.0);
            x[jmax] = 1.0;
        }
        if !estimate.is_finite() {
            return f64::INFINITY;
        }
        self.norm1 * estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 10.0, 1e-3]));
        let lu = DenseLu::new(m).unwrap();
        let c = lu.condition_estimate_symmetric();
        assert!((c - 1e4).abs() / 1e4 < 1e-12, "{c}");
    }

    #[test]
    fn singular_detected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(DenseLu::new(m).is_none_or(|lu| lu.condition_estimate_symmetric() > 1e12));
    }
}
