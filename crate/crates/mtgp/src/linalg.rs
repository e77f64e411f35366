//! Dense and structured linear-algebra primitives: Kronecker products, the
//! row-major vec/unvec pair, masked matrix-vector products, a conjugate
//! gradient solver, and exact/stochastic log-determinants.
//!
//! Every flattening in this crate uses the single row-major convention fixed
//! by [`vec_t`]: an `N x M` matrix `C` maps to the length-`NM` vector
//! `[C11, .., C1M, C21, .., CNM]`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Indices of the observed positions of a flattened output vector.
///
/// Stands in for the column-pruned identity matrix that selects observed
/// entries; only the kept indices are stored. The dense selection matrix is
/// never materialized outside test oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMap {
    total: usize,
    kept: Vec<usize>,
}

impl SelectionMap {
    /// Builds a selection over a flattened vector of length `total`.
    /// `kept` must be strictly increasing with every index below `total`.
    pub fn new(total: usize, kept: Vec<usize>) -> Result<Self> {
        for (pos, &idx) in kept.iter().enumerate() {
            if idx >= total {
                return Err(Error::InvalidInput(format!(
                    "selection index {idx} out of range (total {total})"
                )));
            }
            if pos > 0 && kept[pos - 1] >= idx {
                return Err(Error::InvalidInput(
                    "selection indices must be strictly increasing".into(),
                ));
            }
        }
        Ok(SelectionMap { total, kept })
    }

    /// Selection that keeps everything.
    pub fn full(total: usize) -> Self {
        SelectionMap {
            total,
            kept: (0..total).collect(),
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.kept.len() == self.total
    }

    /// Scatters `v` (one value per kept index) into a zero-padded vector of
    /// length `total`.
    pub fn scatter(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.total);
        for (pos, &idx) in self.kept.iter().enumerate() {
            out[idx] = v[pos];
        }
        out
    }

    /// Gathers the kept entries of a full-length vector.
    pub fn gather(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.kept.len(), |pos, _| v[self.kept[pos]])
    }
}

/// Conjugate-gradient termination settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CgConfig {
    pub max_iterations: usize,
    /// Relative 2-norm residual threshold.
    pub residual_tolerance: f64,
}

impl Default for CgConfig {
    fn default() -> Self {
        CgConfig {
            max_iterations: 1000,
            residual_tolerance: 1e-10,
        }
    }
}

/// Kronecker product `A (x) B`: block `(i, j)` of the result is `A[i,j] * B`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Row-major flattening of `C`, i.e. the vec of its transpose.
pub fn vec_t(c: &DMatrix<f64>) -> DVector<f64> {
    let (rows, cols) = c.shape();
    DVector::from_fn(rows * cols, |k, _| c[(k / cols, k % cols)])
}

/// Inverse of [`vec_t`]: reshapes `v` into a `rows x cols` matrix row-major.
pub fn unvec_t(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return Err(Error::dim(format!(
            "cannot reshape length {} into {rows} x {cols}",
            v.len()
        )));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

/// Applies `(A (x) B) v` without materializing the Kronecker product, via
/// `(A (x) B) vec_t(C) = vec_t(A C B^T)`.
pub fn kron_matvec(a: &DMatrix<f64>, b: &DMatrix<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    if v.len() != a.ncols() * b.ncols() {
        return Err(Error::dim(format!(
            "kron_matvec: vector length {} != {} * {}",
            v.len(),
            a.ncols(),
            b.ncols()
        )));
    }
    let c = unvec_t(v, a.ncols(), b.ncols())?;
    Ok(vec_t(&(a * c * b.transpose())))
}

/// Applies the observed-block restriction of `A (x) B` to a vector living on
/// the kept indices: scatter to a zero-padded full vector, apply the
/// structured product, gather the kept entries back.
pub fn masked_kron_matvec(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    sel: &SelectionMap,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() {
        return Err(Error::dim("masked_kron_matvec requires square factors"));
    }
    if sel.total() != a.ncols() * b.ncols() {
        return Err(Error::dim(format!(
            "selection over {} entries does not match {} * {}",
            sel.total(),
            a.ncols(),
            b.ncols()
        )));
    }
    if v.len() != sel.len() {
        return Err(Error::dim(format!(
            "masked_kron_matvec: vector length {} != {} kept entries",
            v.len(),
            sel.len()
        )));
    }
    let padded = sel.scatter(v);
    let full = kron_matvec(a, b, &padded)?;
    Ok(sel.gather(&full))
}

/// Solves `apply(x) = rhs` for a symmetric positive definite operator by
/// unpreconditioned conjugate gradients.
///
/// Returns the first iterate whose relative residual drops below the
/// configured tolerance, or an iteration-limit error carrying the last
/// residual seen.
pub fn cg_solve<F>(apply: F, rhs: &DVector<f64>, cfg: &CgConfig) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(DVector::zeros(rhs.len()));
    }
    let mut x = DVector::zeros(rhs.len());
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs_old = r.dot(&r);
    let mut rel = 1.0;
    for _ in 0..cfg.max_iterations {
        let ap = apply(&p);
        let denom = p.dot(&ap);
        if !(denom > 0.0) {
            return Err(Error::NotPositiveDefinite {
                context: "conjugate gradient operator",
            });
        }
        let alpha = rs_old / denom;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rs_new = r.dot(&r);
        rel = rs_new.sqrt() / rhs_norm;
        if rel <= cfg.residual_tolerance {
            return Ok(x);
        }
        p = &r + p * (rs_new / rs_old);
        rs_old = rs_new;
    }
    Err(Error::CgIterationLimit {
        iterations: cfg.max_iterations,
        residual: rel,
    })
}

/// Exact `log |A|` of a symmetric positive definite matrix via Cholesky.
pub fn logdet_dense(a: &DMatrix<f64>) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite {
        context: "logdet_dense",
    })?;
    let l = chol.l();
    Ok(2.0 * (0..a.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

/// Stochastic log-determinant estimate by Lanczos quadrature with Rademacher
/// probes. Deterministic for a fixed seed. A Lanczos breakdown terminates
/// that probe early and the quadrature uses the completed steps.
pub fn logdet_lanczos<F>(
    apply: F,
    dim: usize,
    probes: usize,
    steps: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    if probes == 0 || steps == 0 {
        return Err(Error::InvalidInput(
            "logdet_lanczos needs at least one probe and one step".into(),
        ));
    }
    if dim == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..probes {
        let z = DVector::from_fn(dim, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
        let q0 = &z / (dim as f64).sqrt();
        let (alphas, betas) = lanczos_tridiag(&apply, q0, steps);
        total += quadrature_logdet(&alphas, &betas)? * dim as f64;
    }
    Ok(total / probes as f64)
}

/// Runs `steps` Lanczos iterations from unit vector `q0`, returning the
/// tridiagonal coefficients. Fully reorthogonalizes against the stored basis.
fn lanczos_tridiag<F>(apply: &F, q0: DVector<f64>, steps: usize) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps.saturating_sub(1));
    let mut q = q0;
    for it in 0..steps {
        let mut w = apply(&q);
        let alpha = q.dot(&w);
        alphas.push(alpha);
        basis.push(q.clone());
        for b in &basis {
            let proj = b.dot(&w);
            w.axpy(-proj, b, 1.0);
        }
        let beta = w.norm();
        if beta <= 1e-12 || it + 1 == steps {
            break;
        }
        betas.push(beta);
        q = w / beta;
    }
    (alphas, betas)
}

/// Gauss quadrature of `log` against the spectral measure encoded by a
/// Lanczos tridiagonal: sum of squared first eigenvector components times the
/// log of the Ritz values.
fn quadrature_logdet(alphas: &[f64], betas: &[f64]) -> Result<f64> {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::try_new(t, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("Lanczos tridiagonal eigensolve did not converge".into()))?;
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut acc = 0.0;
    for j in 0..k {
        let lambda = eig.eigenvalues[j];
        if lambda <= 0.0 {
            if lambda < -1e-10 * max_abs.max(1.0) {
                return Err(Error::NotPositiveDefinite {
                    context: "Lanczos quadrature Ritz value",
                });
            }
            continue;
        }
        let tau = eig.eigenvectors[(0, j)];
        acc += tau * tau * lambda.ln();
    }
    Ok(acc)
}

/// Evaluates both sides of the quadratic-form identity
/// `vec_t(C)^T (A (x) B) vec_t(C) = tr(A C B^T C^T)` by independent routes.
/// Exposed so test suites can assert their agreement.
pub fn quad_form_identity_check(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() {
        return Err(Error::dim("quad_form_identity_check requires square A, B"));
    }
    if c.nrows() != a.nrows() || c.ncols() != b.nrows() {
        return Err(Error::dim(format!(
            "C must be {} x {}, got {} x {}",
            a.nrows(),
            b.nrows(),
            c.nrows(),
            c.ncols()
        )));
    }
    let v = vec_t(c);
    let lhs = v.dot(&(kron(a, b) * &v));
    let rhs = (a * c * b.transpose() * c.transpose()).trace();
    Ok((lhs, rhs))
}

/// Evaluates `tr(CD)` and `tr(DC)`; their equality is the cyclic property.
pub fn trace_cyclic_check(c: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<(f64, f64)> {
    if c.nrows() != d.ncols() || c.ncols() != d.nrows() {
        return Err(Error::dim(format!(
            "trace_cyclic_check: {} x {} against {} x {}",
            c.nrows(),
            c.ncols(),
            d.nrows(),
            d.ncols()
        )));
    }
    Ok(((c * d).trace(), (d * c).trace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let a = random_matrix(rng, n, n);
        &a * a.transpose() / n as f64 + DMatrix::identity(n, n)
    }

    /// Dense selection matrix, used only as a test oracle.
    fn dense_selection(sel: &SelectionMap) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(sel.total(), sel.len());
        for (pos, &idx) in sel.kept().iter().enumerate() {
            p[(idx, pos)] = 1.0;
        }
        p
    }

    #[test]
    fn kron_identity_left_is_block_diagonal() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let k = kron(&DMatrix::identity(2, 2), &b);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 2.0, 0.0, 0.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 0.0, 3.0, 4.0],
        );
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_matches_two_loop_definition() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 1.0, 0.0, 2.0, 1.0, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 4.0, 3.0, 0.0, 4.0, 0.0],
        );
        assert_eq!(kron(&a, &b), expected);
    }

    #[test]
    fn kron_scalar_left_scales() {
        let b = random_matrix(&mut rng(1), 3, 2);
        let c = DMatrix::from_element(1, 1, 2.5);
        assert_eq!(kron(&c, &b), &b * 2.5);
    }

    #[test]
    fn vec_t_is_row_major() {
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vec_t(&c), DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn vec_t_of_row_is_identity() {
        let c = DMatrix::from_row_slice(1, 4, &[5.0, 6.0, 7.0, 8.0]);
        assert_eq!(vec_t(&c), DVector::from_vec(vec![5.0, 6.0, 7.0, 8.0]));
    }

    #[test]
    fn unvec_t_rejects_length_mismatch() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(matches!(unvec_t(&v, 2, 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn unvec_t_corner_cases() {
        let zero = DVector::zeros(6);
        assert_eq!(unvec_t(&zero, 2, 3).unwrap(), DMatrix::zeros(2, 3));
        let single = DVector::from_vec(vec![7.0]);
        assert_eq!(unvec_t(&single, 1, 1).unwrap(), DMatrix::from_element(1, 1, 7.0));
    }

    #[test]
    fn kron_matvec_identity_factors() {
        let v = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5, 0.0, 4.0]);
        let out = kron_matvec(&DMatrix::identity(3, 3), &DMatrix::identity(2, 2), &v).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn kron_matvec_matches_dense_product() {
        let mut r = rng(7);
        let a = random_matrix(&mut r, 3, 3);
        let b = random_matrix(&mut r, 2, 2);
        let v = DVector::from_fn(6, |_, _| r.random::<f64>() * 2.0 - 1.0);
        let fast = kron_matvec(&a, &b, &v).unwrap();
        let dense = kron(&a, &b) * &v;
        assert_relative_eq!(fast, dense, epsilon = 1e-12);
    }

    #[test]
    fn kron_matvec_zero_vector() {
        let mut r = rng(8);
        let a = random_matrix(&mut r, 3, 3);
        let b = random_matrix(&mut r, 2, 2);
        let out = kron_matvec(&a, &b, &DVector::zeros(6)).unwrap();
        assert_eq!(out, DVector::zeros(6));
    }

    #[test]
    fn masked_kron_matvec_full_selection_is_plain() {
        let mut r = rng(9);
        let a = random_matrix(&mut r, 3, 3);
        let b = random_matrix(&mut r, 2, 2);
        let v = DVector::from_fn(6, |_, _| r.random::<f64>());
        let sel = SelectionMap::full(6);
        assert_eq!(
            masked_kron_matvec(&a, &b, &sel, &v).unwrap(),
            kron_matvec(&a, &b, &v).unwrap()
        );
    }

    #[test]
    fn masked_kron_matvec_matches_explicit_selection() {
        let mut r = rng(10);
        let a = random_matrix(&mut r, 3, 3);
        let b = random_matrix(&mut r, 2, 2);
        for kept in [vec![0usize, 2, 3, 5], (0..5).collect::<Vec<_>>()] {
            let sel = SelectionMap::new(6, kept).unwrap();
            let v = DVector::from_fn(sel.len(), |_, _| r.random::<f64>() * 2.0 - 1.0);
            let p = dense_selection(&sel);
            let dense = p.transpose() * kron(&a, &b) * &p * &v;
            let fast = masked_kron_matvec(&a, &b, &sel, &v).unwrap();
            assert_relative_eq!(fast, dense, epsilon = 1e-12);
        }
    }

    #[test]
    fn selection_map_rejects_bad_indices() {
        assert!(SelectionMap::new(4, vec![0, 4]).is_err());
        assert!(SelectionMap::new(4, vec![1, 1]).is_err());
        assert!(SelectionMap::new(4, vec![2, 1]).is_err());
    }

    #[test]
    fn cg_identity_returns_rhs() {
        let rhs = DVector::from_vec(vec![1.0, 2.0, -3.0]);
        let x = cg_solve(|v| v.clone(), &rhs, &CgConfig::default()).unwrap();
        assert_relative_eq!(x, rhs, epsilon = 1e-12);
    }

    #[test]
    fn cg_matches_dense_solve_on_spd_system() {
        let mut r = rng(11);
        let a = random_spd(&mut r, 10);
        let rhs = DVector::from_fn(10, |_, _| r.random::<f64>() * 2.0 - 1.0);
        let cfg = CgConfig {
            max_iterations: 200,
            residual_tolerance: 1e-12,
        };
        let x = cg_solve(|v| &a * v, &rhs, &cfg).unwrap();
        let exact = nalgebra::Cholesky::new(a.clone()).unwrap().solve(&rhs);
        assert_relative_eq!(x, exact, epsilon = 1e-8);
    }

    #[test]
    fn cg_zero_rhs_is_zero() {
        let x = cg_solve(|v| v * 2.0, &DVector::zeros(5), &CgConfig::default()).unwrap();
        assert_eq!(x, DVector::zeros(5));
    }

    #[test]
    fn cg_reports_iteration_limit_with_residual() {
        let mut r = rng(12);
        let a = random_spd(&mut r, 20);
        let rhs = DVector::from_fn(20, |_, _| r.random::<f64>());
        let cfg = CgConfig {
            max_iterations: 1,
            residual_tolerance: 1e-14,
        };
        match cg_solve(|v| &a * v, &rhs, &cfg) {
            Err(Error::CgIterationLimit {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0 && residual.is_finite());
            }
            other => panic!("expected iteration limit, got {other:?}"),
        }
    }

    #[test]
    fn logdet_dense_identity_and_diagonal() {
        assert_relative_eq!(logdet_dense(&DMatrix::identity(4, 4)).unwrap(), 0.0);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 8.0]));
        assert_relative_eq!(logdet_dense(&d).unwrap(), 16.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn logdet_dense_matches_eigenvalue_sum() {
        let a = random_spd(&mut rng(13), 8);
        let eig = nalgebra::SymmetricEigen::new(a.clone());
        let oracle: f64 = eig.eigenvalues.iter().map(|&l| l.ln()).sum();
        assert_relative_eq!(logdet_dense(&a).unwrap(), oracle, epsilon = 1e-10);
    }

    #[test]
    fn logdet_dense_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            logdet_dense(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn lanczos_identity_operator_is_zero() {
        for probes in [1, 5] {
            let est = logdet_lanczos(|v| v.clone(), 30, probes, 10, 42).unwrap();
            assert!(est.abs() < 1e-10, "estimate {est}");
        }
    }

    #[test]
    fn lanczos_diagonal_exact_at_full_steps() {
        let d: Vec<f64> = (1..=12).map(|i| i as f64).collect();
        let oracle: f64 = d.iter().map(|x| x.ln()).sum();
        let diag = d.clone();
        let est = logdet_lanczos(
            |v| DVector::from_fn(12, |i, _| diag[i] * v[i]),
            12,
            4,
            12,
            7,
        )
        .unwrap();
        assert_relative_eq!(est, oracle, epsilon = 1e-8);
    }

    #[test]
    fn lanczos_tracks_dense_logdet() {
        // shifted Wishart-style SPD matrix; the shift keeps the logdet large
        // relative to the probe noise so 5% is a meaningful bound
        let a = random_spd(&mut rng(14), 50) + DMatrix::identity(50, 50);
        let exact = logdet_dense(&a).unwrap();
        let est = logdet_lanczos(|v| &a * v, 50, 30, 30, 3).unwrap();
        assert!(
            (est - exact).abs() <= 0.05 * exact.abs(),
            "estimate {est} vs exact {exact}"
        );
    }

    #[test]
    fn quad_form_identity_trivial_cases() {
        let c = random_matrix(&mut rng(15), 3, 2);
        let (lhs, rhs) = quad_form_identity_check(
            &DMatrix::identity(3, 3),
            &DMatrix::identity(2, 2),
            &c,
        )
        .unwrap();
        let tr = (&c * c.transpose()).trace();
        assert_relative_eq!(lhs, tr, epsilon = 1e-12);
        assert_relative_eq!(rhs, tr, epsilon = 1e-12);

        let zero = DMatrix::zeros(3, 2);
        let a = random_matrix(&mut rng(16), 3, 3);
        let b = random_matrix(&mut rng(17), 2, 2);
        let (lhs, rhs) = quad_form_identity_check(&a, &b, &zero).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn quad_form_identity_random_instances() {
        let mut r = rng(18);
        for _ in 0..50 {
            let a = random_matrix(&mut r, 3, 3);
            let b = random_matrix(&mut r, 2, 2);
            let c = random_matrix(&mut r, 3, 2);
            let (lhs, rhs) = quad_form_identity_check(&a, &b, &c).unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn trace_cyclic_random_and_rank_one() {
        let mut r = rng(19);
        for _ in 0..50 {
            let c = random_matrix(&mut r, 3, 2);
            let d = random_matrix(&mut r, 2, 3);
            let (lhs, rhs) = trace_cyclic_check(&c, &d).unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);
        }
        // rank-1: tr(uv^T wz^T) = (v.w)(z.u)
        let u = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let v = DVector::from_vec(vec![-1.0, 0.5]);
        let w = DVector::from_vec(vec![2.0, 1.0]);
        let z = DVector::from_vec(vec![0.5, -2.0, 1.0]);
        let c = &u * v.transpose();
        let d = &w * z.transpose();
        let (lhs, rhs) = trace_cyclic_check(&c, &d).unwrap();
        let scalar = v.dot(&w) * z.dot(&u);
        assert_relative_eq!(lhs, scalar, epsilon = 1e-12);
        assert_relative_eq!(rhs, scalar, epsilon = 1e-12);
    }

    #[test]
    fn trace_cyclic_identity_matrices() {
        let (lhs, rhs) =
            trace_cyclic_check(&DMatrix::identity(3, 3), &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(lhs, 3.0);
        assert_eq!(rhs, 3.0);
    }

    proptest! {
        #[test]
        fn vec_unvec_round_trip(rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
            let c = random_matrix(&mut rng(seed), rows, cols);
            let back = unvec_t(&vec_t(&c), rows, cols).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn kron_shape_and_block(seed in 0u64..500) {
            let mut r = rng(seed);
            let a = random_matrix(&mut r, 2, 3);
            let b = random_matrix(&mut r, 3, 2);
            let k = kron(&a, &b);
            prop_assert_eq!(k.shape(), (6, 6));
            // block (i, j) equals A[i,j] * B
            for i in 0..2 {
                for j in 0..3 {
                    for p in 0..3 {
                        for q in 0..2 {
                            prop_assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                        }
                    }
                }
            }
        }
    }
}
