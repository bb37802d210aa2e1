//! Thin-plate-spline smoothing in three dimensions.
//!
//! The fitted function is
//!
//! ```text
//! f(x) = β₀ + β₁x₁ + β₂x₂ + β₃x₃ + Σᵢ wᵢ G(‖x − Xᵢ‖)
//! ```
//!
//! where `(w, β)` solve the bordered system
//!
//! ```text
//! [ A + λI   X ] [ w ]   [ Y ]
//! [ Xᵀ       0 ] [ β ] = [ 0 ]
//! ```
//!
//! with `a_ij = G(‖Xᵢ − Xⱼ‖)`, `a_ii = 0`, and row `i` of `X` equal to
//! `[1, Xᵢᵀ]`. The kernel defaults to the two-dimensional Green function
//! `G₂(r) = r² ln r` applied to 3D distances. Inputs are expected in
//! normalized unit-cube coordinates so that `λ` is scale-free.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SingularReason};
use crate::linalg::DenseLu;

/// Minimum number of samples: the four affine terms plus one.
pub const MIN_SAMPLES: usize = 5;

/// Systems whose condition estimate exceeds this are declared singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Radial kernel of the spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `r² ln r`.
    #[default]
    Green2,
    /// General `G_p`: `r^(4-p) ln r` for p = 2 or 4, `r^(4-p)` otherwise.
    Green(u32),
}

impl Kernel {
    #[inline]
    pub fn eval(self, r: f64) -> f64 {
        match self {
            Kernel::Green2 => g2(r),
            Kernel::Green(p) => {
                if r <= 0.0 {
                    return 0.0;
                }
                let e = 4.0 - p as f64;
                if p == 2 || p == 4 {
                    r.powf(e) * r.ln()
                } else {
                    r.powf(e)
                }
            }
        }
    }

    /// Kernel as a function of squared distance.
    #[inline]
    fn eval_sq(self, r2: f64) -> f64 {
        match self {
            Kernel::Green2 => {
                if r2 > 0.0 {
                    0.5 * r2 * r2.ln()
                } else {
                    0.0
                }
            }
            other => other.eval(r2.sqrt()),
        }
    }
}

#[inline]
fn g2(r: f64) -> f64 {
    if r > 0.0 {
        r * r * r.ln()
    } else {
        0.0
    }
}

/// `r² ln r`, continuous at zero.
pub fn green2(r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::param("r", format!("distance must be non-negative, got {r}")));
    }
    Ok(g2(r))
}

#[inline]
fn dist_sq(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpsOptions {
    pub kernel: Kernel,
    pub max_condition: f64,
}

impl Default for TpsOptions {
    fn default() -> Self {
        Self {
            kernel: Kernel::Green2,
            max_condition: MAX_CONDITION,
        }
    }
}

/// A fitted thin-plate spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpsModel {
    centers: Vec<[f64; 3]>,
    weights: Vec<f64>,
    beta: [f64; 4],
    lambda: f64,
    kernel: Kernel,
    /// 1-norm condition estimate of the solved system.
    condition: f64,
}

/// A prediction together with an extrapolation flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    /// The query lies outside the bounding box of the centers.
    pub extrapolated: bool,
}

impl TpsModel {
    pub fn fit(points: &[[f64; 3]], values: &[f64], lambda: f64) -> Result<Self> {
        Self::fit_with(points, values, lambda, &TpsOptions::default())
    }

    pub fn fit_with(points: &[[f64; 3]], values: &[f64], lambda: f64, opts: &TpsOptions) -> Result<Self> {
        check_inputs(points, values)?;
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::param("lambda", format!("must be finite and >= 0, got {lambda}")));
        }
        check_geometry(points)?;

        let n = points.len();
        let m = n + 4;
        let mut sys = DMatrix::<f64>::zeros(m, m);
        for j in 0..n {
            for i in 0..j {
                let a = opts.kernel.eval_sq(dist_sq(&points[i], &points[j]));
                sys[(i, j)] = a;
                sys[(j, i)] = a;
            }
            sys[(j, j)] = lambda;
            let row = [1.0, points[j][0], points[j][1], points[j][2]];
            for (c, v) in row.into_iter().enumerate() {
                sys[(j, n + c)] = v;
                sys[(n + c, j)] = v;
            }
        }
        let mut rhs = DVector::<f64>::zeros(m);
        rhs.rows_mut(0, n).copy_from_slice(values);

        let lu = DenseLu::new(sys.clone()).ok_or(Error::SingularSystem(SingularReason::ZeroPivot))?;
        let condition = lu.condition_estimate_symmetric();
        if !(condition <= opts.max_condition) {
            return Err(Error::SingularSystem(SingularReason::IllConditioned {
                condition,
                limit: opts.max_condition,
            }));
        }
        let sol = lu.solve(&rhs).ok_or(Error::SingularSystem(SingularReason::ZeroPivot))?;

        let resid = (&sys * &sol - &rhs).amax();
        let scale = sys.amax() * sol.amax() + rhs.amax();
        if !(resid <= 1e-8 * scale) {
            return Err(Error::SingularSystem(SingularReason::IllConditioned {
                condition,
                limit: opts.max_condition,
            }));
        }

        Ok(Self {
            centers: points.to_vec(),
            weights: sol.rows(0, n).iter().copied().collect(),
            beta: [sol[n], sol[n + 1], sol[n + 2], sol[n + 3]],
            lambda,
            kernel: opts.kernel,
            condition,
        })
    }

    /// Select `λ` by GCV over `grid`, then fit at the chosen value.
    pub fn fit_gcv(points: &[[f64; 3]], values: &[f64], grid: &[f64]) -> Result<(Self, GcvReport)> {
        let report = gcv_select(points, values, grid)?;
        let model = Self::fit(points, values, report.chosen)?;
        Ok((model, report))
    }

    /// Assemble a model from explicit coefficients.
    pub fn from_parts(centers: Vec<[f64; 3]>, weights: Vec<f64>, beta: [f64; 4], lambda: f64) -> Result<Self> {
        if centers.len() != weights.len() {
            return Err(Error::param("weights", "one weight per center is required"));
        }
        Ok(Self {
            centers,
            weights,
            beta,
            lambda,
            kernel: Kernel::Green2,
            condition: f64::NAN,
        })
    }

    pub fn predict(&self, x: [f64; 3]) -> f64 {
        let b = &self.beta;
        let mut v = b[0] + b[1] * x[0] + b[2] * x[1] + b[3] * x[2];
        for (c, w) in self.centers.iter().zip(&self.weights) {
            v += w * self.kernel.eval_sq(dist_sq(c, &x));
        }
        v
    }

    pub fn predict_flagged(&self, x: [f64; 3]) -> Prediction {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in &self.centers {
            for a in 0..3 {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
        let extrapolated = (0..3).any(|a| x[a] < lo[a] || x[a] > hi[a]);
        Prediction {
            value: self.predict(x),
            extrapolated,
        }
    }

    pub fn centers(&self) -> &[[f64; 3]] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn beta(&self) -> [f64; 4] {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `‖Xᵀw‖∞`, the violation of the orthogonality side condition.
    pub fn side_condition_residual(&self) -> f64 {
        let mut s = [0.0; 4];
        for (c, w) in self.centers.iter().zip(&self.weights) {
            s[0] += w;
            s[1] += w * c[0];
            s[2] += w * c[1];
            s[3] += w * c[2];
        }
        s.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_inputs(points: &[[f64; 3]], values: &[f64]) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::param(
            "values",
            format!("{} points but {} values", points.len(), values.len()),
        ));
    }
    if points.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: points.len(),
        });
    }
    if points.iter().flatten().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::param("points", "non-finite coordinate or value"));
    }
    Ok(())
}

/// Reject duplicate coordinates and point sets without full affine rank.
fn check_geometry(points: &[[f64; 3]]) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        p[0].total_cmp(&q[0])
            .then(p[1].total_cmp(&q[1]))
            .then(p[2].total_cmp(&q[2]))
    });
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::SingularSystem(SingularReason::DuplicatePoints {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            }));
        }
    }

    let n = points.len() as f64;
    let mut mean = [0.0; 3];
    for p in points {
        for a in 0..3 {
            mean[a] += p[a] / n;
        }
    }
    let mut scatter = Matrix3::<f64>::zeros();
    for p in points {
        let d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
        for r in 0..3 {
            for c in 0..3 {
                scatter[(r, c)] += d[r] * d[c];
            }
        }
    }
    let eig = scatter.symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    if !(max > 0.0) || min <= 1e-20 * max {
        return Err(Error::SingularSystem(SingularReason::DegenerateAffine));
    }
    Ok(())
}

/// Default `λ` grid: 25 log-spaced values in `[1e-9, 1e1]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-9, 1e1, 25)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Outcome of generalized cross-validation over a `λ` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcvReport {
    pub lambdas: Vec<f64>,
    pub scores: Vec<f64>,
    pub chosen: f64,
}

/// Spectral form of the smoother restricted to the null space of `Xᵀ`.
///
/// With `Q₂` an orthonormal basis of that null space and
/// `Q₂ᵀAQ₂ = U diag(d) Uᵀ`, the residual operator is
/// `I − H(λ) = λ Q₂ U (D + λ)⁻¹ Uᵀ Q₂ᵀ`, so both the residual norm and the
/// trace are cheap for every `λ` once `d` and `z = UᵀQ₂ᵀY` are known.
struct GcvSpectrum {
    d: Vec<f64>,
    z: Vec<f64>,
    n: usize,
}

impl GcvSpectrum {
    fn new(points: &[[f64; 3]], values: &[f64], kernel: Kernel) -> Result<Self> {
        check_inputs(points, values)?;
        check_geometry(points)?;
        let n = points.len();

        let mut a = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for i in 0..j {
                let v = kernel.eval_sq(dist_sq(&points[i], &points[j]));
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let mut x = DMatrix::<f64>::from_fn(n, 4, |i, c| if c == 0 { 1.0 } else { points[i][c - 1] });
        let mut y = DVector::from_column_slice(values);

        // Q = H₀H₁H₂H₃ from Householder QR of X; apply Qᵀ · Q to A and Qᵀ to Y.
        let mut u = DVector::<f64>::zeros(n);
        for k in 0..4 {
            let len = n - k;
            let col = x.column(k).rows(k, len).into_owned();
            let norm = col.norm();
            if norm == 0.0 {
                return Err(Error::SingularSystem(SingularReason::DegenerateAffine));
            }
            let alpha = if col[0] >= 0.0 { -norm } else { norm };
            let mut v = DVector::<f64>::from_iterator(len, col.iter().copied());
            v[0] -= alpha;
            let vv = v.norm_squared();
            if vv == 0.0 {
                continue;
            }
            let tau = 2.0 / vv;

            for c in k..4 {
                let mut colv = x.column_mut(c);
                let mut colv = colv.rows_mut(k, len);
                let s = tau * v.dot(&colv);
                colv.axpy(-s, &v, 1.0);
            }
            {
                let mut yk = y.rows_mut(k, len);
                let s = tau * v.dot(&yk);
                yk.axpy(-s, &v, 1.0);
            }
            // A <- H A
            for c in 0..n {
                let mut colv = a.column_mut(c);
                let mut colv = colv.rows_mut(k, len);
                let s = tau * v.dot(&colv);
                colv.axpy(-s, &v, 1.0);
            }
            // A <- A H
            u.fill(0.0);
            for (i, vi) in v.iter().enumerate() {
                u.axpy(*vi, &a.column(k + i), 1.0);
            }
            for (i, vi) in v.iter().enumerate() {
                a.column_mut(k + i).axpy(-tau * vi, &u, 1.0);
            }
        }

        let m = n - 4;
        let t = DMatrix::<f64>::from_fn(m, m, |i, j| 0.5 * (a[(i + 4, j + 4)] + a[(j + 4, i + 4)]));
        let w = y.rows(4, m).into_owned();
        let eig = SymmetricEigen::new(t);
        let z = eig.eigenvectors.tr_mul(&w);
        Ok(Self {
            d: eig.eigenvalues.iter().map(|v| v.max(0.0)).collect(),
            z: z.iter().copied().collect(),
            n,
        })
    }

    /// `(‖(I − H)Y‖², trace(I − H))` at `λ`.
    fn residual_and_trace(&self, lambda: f64) -> (f64, f64) {
        let mut rss = 0.0;
        let mut tr = 0.0;
        for (d, z) in self.d.iter().zip(&self.z) {
            let s = lambda / (d + lambda);
            rss += s * s * z * z;
            tr += s;
        }
        (rss, tr)
    }

    fn score(&self, lambda: f64) -> Result<f64> {
        let (rss, tr) = self.residual_and_trace(lambda);
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::DegenerateGcv { lambda, n: self.n });
        }
        Ok(self.n as f64 * rss / (tr * tr))
    }
}

/// Pick `λ` from `grid` by minimizing
/// `GCV(λ) = n ‖(I − H(λ))Y‖² / trace(I − H(λ))²`.
///
/// Ties (within `1e-12` of the data energy) go to the larger `λ`.
pub fn gcv_select(points: &[[f64; 3]], values: &[f64], grid: &[f64]) -> Result<GcvReport> {
    gcv_select_with(points, values, grid, Kernel::Green2)
}

pub fn gcv_select_with(points: &[[f64; 3]], values: &[f64], grid: &[f64], kernel: Kernel) -> Result<GcvReport> {
    if grid.is_empty() {
        return Err(Error::param("lambda_grid", "must not be empty"));
    }
    if let Some(l) = grid.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(Error::param(
            "lambda_grid",
            format!("entries must be finite and >= 0, got {l}"),
        ));
    }
    let spectrum = GcvSpectrum::new(points, values, kernel)?;
    let scores = grid.iter().map(|&l| spectrum.score(l)).collect::<Result<Vec<_>>>()?;

    let energy: f64 = values.iter().map(|v| v * v).sum();
    let tol = 1e-12 * energy.max(f64::MIN_POSITIVE);
    let mut best = 0;
    for i in 1..grid.len() {
        let (s, b) = (scores[i], scores[best]);
        if s < b - tol || ((s - b).abs() <= tol && grid[i] > grid[best]) {
            best = i;
        }
    }
    Ok(GcvReport {
        lambdas: grid.to_vec(),
        scores,
        chosen: grid[best],
    })
}

/// Training residual sum of squares `‖(I − H(λ))Y‖²` for each `λ`.
pub fn training_rss(points: &[[f64; 3]], values: &[f64], lambdas: &[f64]) -> Result<Vec<f64>> {
    let spectrum = GcvSpectrum::new(points, values, Kernel::Green2)?;
    Ok(lambdas.iter().map(|&l| spectrum.residual_and_trace(l).0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect()
    }

    /// Independent oracle: column j of H(λ) is the fitted-value vector of
    /// the TPS fitted to the unit vector e_j.
    fn explicit_gcv(points: &[[f64; 3]], values: &[f64], lambda: f64) -> f64 {
        let n = points.len();
        let mut h = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let m = TpsModel::fit(points, &e, lambda).unwrap();
            for i in 0..n {
                h[i][j] = m.predict(points[i]);
            }
        }
        let mut rss = 0.0;
        let mut tr = 0.0;
        for i in 0..n {
            let fitted: f64 = (0..n).map(|j| h[i][j] * values[j]).sum();
            rss += (values[i] - fitted).powi(2);
            tr += 1.0 - h[i][i];
        }
        n as f64 * rss / (tr * tr)
    }

    #[test]
    fn green2_values() {
        assert_eq!(green2(0.0).unwrap(), 0.0);
        assert_eq!(green2(1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((green2(e).unwrap() - 7.389_056_098_930_65).abs() < 1e-12);
        assert!(green2(-1.0).is_err());
        assert!((Kernel::Green2.eval_sq(0.3 * 0.3) - g2(0.3)).abs() < 1e-15);
        assert_eq!(Kernel::Green(3).eval(2.0), 2.0);
        assert!((Kernel::Green(2).eval(2.0) - g2(2.0)).abs() < 1e-15);
    }

    #[test]
    fn affine_data_has_zero_bending() {
        let pts = random_points(6, 1);
        let y: Vec<f64> = pts.iter().map(|p| 2.0 + p[0]).collect();
        for lambda in [0.0, 1e-3, 1.0, 10.0] {
            let m = TpsModel::fit(&pts, &y, lambda).unwrap();
            let b = m.beta();
            assert!((b[0] - 2.0).abs() < 1e-8 && (b[1] - 1.0).abs() < 1e-8);
            assert!(b[2].abs() < 1e-8 && b[3].abs() < 1e-8);
            assert!(m.weights().iter().all(|w| w.abs() < 1e-8));
            let q = [0.3, 0.9, 0.1];
            assert!((m.predict(q) - 2.3).abs() < 1e-8);
        }
    }

    #[test]
    fn duplicates_are_singular() {
        let mut pts = random_points(8, 2);
        pts[5] = pts[2];
        let y = vec![1.0; 8];
        match TpsModel::fit(&pts, &y, 0.0) {
            Err(Error::SingularSystem(SingularReason::DuplicatePoints { first, second })) => {
                assert_eq!((first, second), (2, 5));
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn coplanar_points_are_singular() {
        let pts: Vec<[f64; 3]> = random_points(20, 3).into_iter().map(|p| [p[0], 0.5, p[2]]).collect();
        let y: Vec<f64> = pts.iter().map(|p| p[0] * p[2]).collect();
        assert!(matches!(
            TpsModel::fit(&pts, &y, 1e-3),
            Err(Error::SingularSystem(SingularReason::DegenerateAffine))
        ));
    }

    #[test]
    fn too_few_points() {
        let pts = random_points(4, 4);
        assert!(matches!(
            TpsModel::fit(&pts, &[0.0; 4], 0.0),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn interpolates_at_lambda_zero() {
        let pts = random_points(10, 5);
        let y: Vec<f64> = pts.iter().map(|p| (3.0 * p[0]).sin() + p[1] * p[2]).collect();
        let m = TpsModel::fit(&pts, &y, 0.0).unwrap();
        for (p, v) in pts.iter().zip(&y) {
            assert!((m.predict(*p) - v).abs() < 1e-6);
        }
        assert!(m.side_condition_residual() < 1e-8);
        assert!(m.condition() > 1.0);
    }

    #[test]
    fn constant_model_prediction() {
        let m = TpsModel::from_parts(vec![[0.1, 0.2, 0.3]], vec![0.0], [1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(m.predict([5.0, -3.0, 2.0]), 1.0);
        assert!(m.predict_flagged([5.0, -3.0, 2.0]).extrapolated);
    }

    #[test]
    fn gcv_matches_explicit_influence_matrix() {
        let pts = random_points(30, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let y: Vec<f64> = pts
            .iter()
            .map(|p| 1.0 + 2.0 * p[0] - p[2] + 0.1 * (rng.random::<f64>() - 0.5))
            .collect();
        let grid = [1e-6, 1e-2, 1e2];
        let report = gcv_select(&pts, &y, &grid).unwrap();
        for (l, s) in grid.iter().zip(&report.scores) {
            let oracle = explicit_gcv(&pts, &y, *l);
            assert!(*s >= 0.0);
            assert!(
                (s - oracle).abs() <= 1e-6 * oracle.abs().max(1e-12),
                "λ={l}: {s} vs {oracle}"
            );
        }
        let best = report.scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let chosen = grid.iter().position(|l| *l == report.chosen).unwrap();
        assert_eq!(report.scores[chosen], best);
    }

    #[test]
    fn gcv_affine_tie_goes_to_larger_lambda() {
        let pts = random_points(12, 7);
        let y: Vec<f64> = pts.iter().map(|p| 0.5 - p[1] + 3.0 * p[2]).collect();
        let r = gcv_select(&pts, &y, &[0.01, 1.0]).unwrap();
        assert_eq!(r.chosen, 1.0);
    }

    #[test]
    fn gcv_single_grid_and_errors() {
        let pts = random_points(12, 8);
        let y: Vec<f64> = pts.iter().map(|p| p[0] * p[0]).collect();
        assert_eq!(gcv_select(&pts, &y, &[0.3]).unwrap().chosen, 0.3);
        assert!(gcv_select(&pts, &y, &[]).is_err());
        assert!(matches!(gcv_select(&pts, &y, &[0.0]), Err(Error::DegenerateGcv { .. })));
    }

    #[test]
    fn default_grid_shape() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 25);
        assert!((g[0] - 1e-9).abs() < 1e-20 && (g[24] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rss_nondecreasing_in_lambda() {
        let pts = random_points(40, 9);
        let y: Vec<f64> = pts.iter().map(|p| (5.0 * p[0]).cos() * p[1]).collect();
        let lambdas = log_grid(1e-8, 1e2, 30);
        let rss = training_rss(&pts, &y, &lambdas).unwrap();
        for w in rss.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-9));
        }
        // agrees with direct fits
        for &l in &[1e-4, 1e-1] {
            let m = TpsModel::fit(&pts, &y, l).unwrap();
            let direct: f64 = pts.iter().zip(&y).map(|(p, v)| (v - m.predict(*p)).powi(2)).sum();
            let spectral = training_rss(&pts, &y, &[l]).unwrap()[0];
            assert!((direct - spectral).abs() < 1e-8 * direct.max(1e-12));
        }
    }

    #[test]
    fn serializes_to_json() {
        let pts = random_points(6, 10);
        let y: Vec<f64> = pts.iter().map(|p| p[0] - p[1]).collect();
        let m = TpsModel::fit(&pts, &y, 0.1).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        for key in ["centers", "weights", "beta", "lambda"] {
            assert!(s.contains(key));
        }
        let back: TpsModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back.predict([0.2, 0.2, 0.2]), m.predict([0.2, 0.2, 0.2]));
    }
}
