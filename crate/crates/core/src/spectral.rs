//! Spatial operator, its eigendecomposition and the exact modal solutions.
//!
//! The semi-discrete problem couples a state and an adjoint trajectory through
//! a symmetric matrix `A`. Diagonalizing `A = P D P^T` splits the coupled
//! system into independent scalar pairs, one per eigenvalue; each pair reduces
//! to a second-order two-point problem whose general solution is
//! `c1*cosh(sigma t) + c2*sinh(sigma t)`.

use nalgebra::{DMatrix, DVector};
use std::path::Path;

use crate::error::{CoreError, Result};

/// Relative symmetry tolerance for user-supplied matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A symmetric spatial operator together with its spectral data.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    /// The operator itself.
    pub a: DMatrix<f64>,
    /// Eigenvalues sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal eigenvector matrix, columns ordered like `eigenvalues`.
    pub p: DMatrix<f64>,
    /// Spatial dimension count.
    pub n: usize,
    /// Mesh width, present only for the built-in Laplacian.
    pub h: Option<f64>,
}

impl SpectralModel {
    /// Builds the model from any symmetric matrix.
    pub fn from_matrix(a: DMatrix<f64>) -> Result<Self> {
        let (eigenvalues, p) = eigendecompose(&a)?;
        let n = a.nrows();
        Ok(Self {
            a,
            eigenvalues,
            p,
            n,
            h: None,
        })
    }

    /// Diagonal model for an explicit eigenvalue list (sorted internally).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(CoreError::InvalidInput("empty eigenvalue list".into()));
        }
        for &d in &eigenvalues {
            if !d.is_finite() || d < 0.0 {
                return Err(CoreError::UnsupportedSpectrum(d));
            }
        }
        eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let n = eigenvalues.len();
        let a = DMatrix::from_diagonal(&DVector::from_vec(eigenvalues.clone()));
        Ok(Self {
            a,
            eigenvalues,
            p: DMatrix::identity(n, n),
            n,
            h: None,
        })
    }

    pub fn d_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn d_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Three-point finite-difference Laplacian on (0, length) with homogeneous
/// Dirichlet boundary values: `A = tridiag(-1, 2, -1) / h^2`, `h = length/(n+1)`.
/// Eigenpairs are attached in closed form, `d_i = (4/h^2) sin^2(i pi h / (2 length))`.
pub fn build_laplacian_1d(n: usize, length: f64) -> Result<SpectralModel> {
    if n < 2 {
        return Err(CoreError::InvalidDimension(format!(
            "1d Laplacian needs at least 2 interior points, got {n}"
        )));
    }
    if !length.is_finite() || length <= 0.0 {
        return Err(CoreError::InvalidInput(format!(
            "length must be > 0, got {length}"
        )));
    }
    let h = length / (n as f64 + 1.0);
    let scale = 1.0 / (h * h);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = 2.0 * scale;
        if i + 1 < n {
            a[(i, i + 1)] = -scale;
            a[(i + 1, i)] = -scale;
        }
    }
    let mut eigenvalues = Vec::with_capacity(n);
    let mut p = DMatrix::zeros(n, n);
    // Closed-form eigenpairs of the Dirichlet difference operator; the
    // normalized eigenvectors are sampled sines.
    let norm = (2.0 / (n as f64 + 1.0)).sqrt();
    for k in 1..=n {
        let s = (k as f64 * std::f64::consts::PI * 0.5 / (n as f64 + 1.0)).sin();
        eigenvalues.push(4.0 * scale * s * s);
        for i in 1..=n {
            p[(i - 1, k - 1)] =
                norm * (i as f64 * k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).sin();
        }
    }
    Ok(SpectralModel {
        a,
        eigenvalues,
        p,
        n,
        h: Some(h),
    })
}

/// Eigendecomposition of a symmetric matrix: ascending eigenvalues and the
/// orthogonal eigenvector matrix with matching column order.
pub fn eigendecompose(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(CoreError::InvalidDimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.amax();
    let mut deviation = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            deviation = deviation.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    let tolerance = SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE);
    if deviation > tolerance {
        return Err(CoreError::AsymmetricMatrix {
            deviation,
            tolerance,
        });
    }
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut p = DMatrix::zeros(a.nrows(), a.ncols());
    for (new_col, &old_col) in order.iter().enumerate() {
        p.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    Ok((eigenvalues, p))
}

/// Reads a plain-text matrix: first line `n`, then `n` rows of `n`
/// whitespace-separated reals. Rejects asymmetric input.
pub fn read_matrix_file(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text)
        .map_err(|msg| CoreError::MalformedMatrix(format!("{}: {msg}", path.display())))
}

fn parse_matrix(text: &str) -> std::result::Result<DMatrix<f64>, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or("empty file")?
        .trim()
        .parse()
        .map_err(|e| format!("bad dimension line: {e}"))?;
    if n == 0 {
        return Err("dimension must be positive".into());
    }
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| format!("missing row {}", i + 1))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != n {
            return Err(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                entries.len()
            ));
        }
        for (j, tok) in entries.iter().enumerate() {
            a[(i, j)] = tok
                .parse()
                .map_err(|e| format!("row {} column {}: {e}", i + 1, j + 1))?;
        }
    }
    if lines.next().is_some() {
        return Err("trailing data after last row".into());
    }
    Ok(a)
}

/// Evaluator for `c1*cosh(sigma t) + c2*sinh(sigma t)` and its derivative,
/// computed through split exponentials so arguments up to ~700 stay finite.
#[derive(Debug, Clone, Copy)]
pub struct GeneralSolution {
    half_sum: f64,
    half_diff: f64,
    pub sigma: f64,
}

impl GeneralSolution {
    pub fn value(&self, t: f64) -> f64 {
        let u = self.sigma * t;
        self.half_sum * u.exp() + self.half_diff * (-u).exp()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let u = self.sigma * t;
        self.sigma * (self.half_sum * u.exp() - self.half_diff * (-u).exp())
    }
}

/// General solution of `f'' - sigma^2 f = 0` with cosh/sinh coefficients
/// `c1`, `c2`.
pub fn modal_general_solution(c1: f64, c2: f64, sigma: f64) -> GeneralSolution {
    assert!(
        sigma > 0.0 && sigma.is_finite(),
        "sigma must be positive and finite"
    );
    GeneralSolution {
        half_sum: 0.5 * (c1 + c2),
        half_diff: 0.5 * (c1 - c2),
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn laplacian_rejects_single_point() {
        assert!(matches!(
            build_laplacian_1d(1, 1.0),
            Err(CoreError::InvalidDimension(_))
        ));
    }

    #[test]
    fn laplacian_stencil_n2() {
        let m = build_laplacian_1d(2, 1.0).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[18.0, -9.0, -9.0, 18.0]);
        assert_abs_diff_eq!(m.a, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(m.h.unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn laplacian_eigenvalues_n3_closed_form() {
        let m = build_laplacian_1d(3, 1.0).unwrap();
        let h = 0.25;
        for (i, &d) in m.eigenvalues.iter().enumerate() {
            let k = (i + 1) as f64;
            let expect = 4.0 / (h * h) * (k * std::f64::consts::PI / 8.0).sin().powi(2);
            assert_relative_eq!(d, expect, max_relative = 1e-14);
        }
        // cross-check against the dense eigensolver
        let (numeric, _) = eigendecompose(&m.a).unwrap();
        for (d, e) in m.eigenvalues.iter().zip(numeric.iter()) {
            assert_relative_eq!(d, e, max_relative = 1e-12);
        }
    }

    #[test]
    fn laplacian_matches_numeric_eigensolver_up_to_n64() {
        for n in [2usize, 5, 8, 17, 33, 64] {
            let m = build_laplacian_1d(n, 2.5).unwrap();
            let (numeric, _) = eigendecompose(&m.a).unwrap();
            for (d, e) in m.eigenvalues.iter().zip(numeric.iter()) {
                assert_relative_eq!(d, e, max_relative = 1e-10);
            }
            assert!(m.eigenvalues[0] > 0.0);
        }
    }

    #[test]
    fn eigendecompose_identity_and_2x2() {
        let (vals, p) = eigendecompose(&DMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0);
        assert_abs_diff_eq!(vals[1], 1.0);
        let orth = p.transpose() * &p;
        assert_abs_diff_eq!(orth, DMatrix::identity(2, 2), epsilon = 1e-12);

        let a = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let (vals, _) = eigendecompose(&a).unwrap();
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(vals[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn eigendecompose_rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-6, 1.0]);
        assert!(matches!(
            eigendecompose(&a),
            Err(CoreError::AsymmetricMatrix { .. })
        ));
    }

    #[test]
    fn reconstruction_roundtrip_random_symmetric() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 5, 13, 32] {
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v: f64 = rng.random_range(-3.0..3.0);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let (vals, p) = eigendecompose(&a).unwrap();
            let recon = &p * DMatrix::from_diagonal(&DVector::from_vec(vals)) * p.transpose();
            let err = (&a - recon).amax();
            assert!(
                err <= 1e-10 * a.amax(),
                "n={n}: reconstruction error {err:e}"
            );
        }
    }

    #[test]
    fn matrix_parser_roundtrip_and_errors() {
        let a = parse_matrix("2\n1.0 0.5\n0.5 2.0\n").unwrap();
        assert_abs_diff_eq!(a[(0, 1)], 0.5);
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\n1 2\n").is_err());
        assert!(parse_matrix("2\n1 2 3\n4 5 6\n").is_err());
        assert!(parse_matrix("2\n1 x\n3 4\n").is_err());
    }

    #[test]
    fn general_solution_basics() {
        let f = modal_general_solution(1.0, 0.0, 3.0);
        assert_abs_diff_eq!(f.value(0.0), 1.0);
        assert_abs_diff_eq!(f.deriv(0.0), 0.0);
        let g = modal_general_solution(0.0, 1.0, 3.0);
        assert_abs_diff_eq!(g.value(0.0), 0.0);
        assert_abs_diff_eq!(g.deriv(0.0), 3.0);
        // cosh(2) + sinh(2) = e^2
        let h = modal_general_solution(1.0, 1.0, 2.0);
        assert_relative_eq!(
            h.value(1.0),
            std::f64::consts::E.powi(2),
            max_relative = 1e-15
        );
    }

    #[test]
    fn general_solution_large_argument_no_overflow() {
        let f = modal_general_solution(1e-3, -1e-3, 700.0);
        // pure decaying branch stays finite and tiny
        assert!(f.value(1.0).is_finite());
        let g = modal_general_solution(1.0, 1.0, 700.0);
        assert!(g.value(1.0).is_finite());
    }

    #[test]
    fn general_solution_satisfies_ode_by_finite_differences() {
        let sigma = 2.75;
        let f = modal_general_solution(0.8, -0.3, sigma);
        let dt = 1e-5;
        for &t in &[0.1, 0.5, 1.3] {
            let second = (f.value(t + dt) - 2.0 * f.value(t) + f.value(t - dt)) / (dt * dt);
            let residual = second - sigma * sigma * f.value(t);
            assert!(
                residual.abs() <= 1e-6 * (1.0 + f.value(t).abs() * sigma * sigma),
                "t={t}: residual {residual:e}"
            );
        }
    }
}
