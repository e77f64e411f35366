//! Input-space kernel, inter-task covariance, observation noise, and the
//! analytic derivatives of every covariance piece with respect to its
//! unconstrained parameters.
//!
//! All positive quantities (lengthscales, signal variance, noise variances,
//! the diagonal of the task Cholesky factor) are stored as logs so
//! optimizers work on an unconstrained vector. Strictly-lower entries of the
//! task factor stay unconstrained, which lets the task covariance express
//! negative correlations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Diagonal inflation added to input kernel matrices so they stay positive
/// definite under duplicate or near-duplicate inputs.
pub const DEFAULT_JITTER: f64 = 1e-8;

/// ARD-RBF kernel hyperparameters in unconstrained log form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// One log-lengthscale per input dimension.
    pub log_lengthscales: Vec<f64>,
    pub log_signal_variance: f64,
}

impl KernelParams {
    /// Unit lengthscales and unit signal variance for `input_dim` inputs.
    pub fn unit(input_dim: usize) -> Self {
        KernelParams {
            log_lengthscales: vec![0.0; input_dim],
            log_signal_variance: 0.0,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.log_lengthscales.len()
    }

    pub fn lengthscales(&self) -> Vec<f64> {
        self.log_lengthscales.iter().map(|l| l.exp()).collect()
    }

    pub fn signal_variance(&self) -> f64 {
        self.log_signal_variance.exp()
    }
}

/// Identifies a single input-kernel parameter for derivative evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelParam {
    LogLengthscale(usize),
    LogSignalVariance,
}

/// Inter-task covariance `K_f = L L^T` parameterized by its lower-triangular
/// factor. Strictly-lower entries are stored raw; diagonal entries are
/// stored as logs and exponentiated, keeping the factor's diagonal positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskCov {
    size: usize,
    /// Row-major lower triangle: `(0,0), (1,0), (1,1), (2,0), ...`
    params: Vec<f64>,
}

impl TaskCov {
    /// `K_f = I`: zero log-diagonal, zero strictly-lower entries.
    pub fn identity(num_tasks: usize) -> Self {
        TaskCov {
            size: num_tasks,
            params: vec![0.0; num_tasks * (num_tasks + 1) / 2],
        }
    }

    /// Position of entry `(i, j)`, `j <= i`, in the packed parameter vector.
    pub fn param_index(i: usize, j: usize) -> usize {
        i * (i + 1) / 2 + j
    }

    pub fn from_params(size: usize, params: Vec<f64>) -> Result<Self> {
        if params.len() != size * (size + 1) / 2 {
            return Err(Error::dim(format!(
                "task covariance over {size} tasks needs {} parameters, got {}",
                size * (size + 1) / 2,
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("task covariance parameter not finite".into()));
        }
        Ok(TaskCov { size, params })
    }

    /// Packs an explicit lower-triangular factor with positive diagonal.
    pub fn from_factor(l: &DMatrix<f64>) -> Result<Self> {
        let size = l.nrows();
        if l.ncols() != size {
            return Err(Error::dim("task factor must be square"));
        }
        let mut params = Vec::with_capacity(size * (size + 1) / 2);
        for i in 0..size {
            for j in 0..size {
                if j > i && l[(i, j)] != 0.0 {
                    return Err(Error::InvalidInput(
                        "task factor must be lower triangular".into(),
                    ));
                }
                if j <= i {
                    if i == j {
                        if l[(i, i)] <= 0.0 {
                            return Err(Error::InvalidInput(
                                "task factor diagonal must be positive".into(),
                            ));
                        }
                        params.push(l[(i, i)].ln());
                    } else {
                        params.push(l[(i, j)]);
                    }
                }
            }
        }
        TaskCov::from_params(size, params)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// The lower-triangular factor `L` with exponentiated diagonal.
    pub fn factor(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.size, self.size);
        for i in 0..self.size {
            for j in 0..=i {
                let p = self.params[Self::param_index(i, j)];
                l[(i, j)] = if i == j { p.exp() } else { p };
            }
        }
        l
    }

    /// `K_f = L L^T`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let l = self.factor();
        &l * l.transpose()
    }

    /// Derivative of `L L^T` with respect to the packed parameter at `(i, j)`:
    /// `E_ij L^T + L E_ji`, scaled by `L[i,i]` for the log-diagonal entries.
    pub fn derivative(&self, i: usize, j: usize) -> Result<DMatrix<f64>> {
        if i >= self.size || j > i {
            return Err(Error::InvalidInput(format!(
                "task parameter ({i}, {j}) is not a lower-triangular entry of size {}",
                self.size
            )));
        }
        let l = self.factor();
        let mut d = DMatrix::zeros(self.size, self.size);
        for k in 0..self.size {
            d[(i, k)] += l[(k, j)];
            d[(k, i)] += l[(k, j)];
        }
        if i == j {
            d *= l[(i, i)];
        }
        Ok(d)
    }
}

/// Per-task observation noise variances, stored as logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub log_variances: Vec<f64>,
}

impl NoiseParams {
    pub fn from_variances(variances: &[f64]) -> Result<Self> {
        if variances.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput(
                "noise variances must be positive and finite".into(),
            ));
        }
        Ok(NoiseParams {
            log_variances: variances.iter().map(|v| v.ln()).collect(),
        })
    }

    pub fn num_tasks(&self) -> usize {
        self.log_variances.len()
    }

    pub fn variances(&self) -> Vec<f64> {
        self.log_variances.iter().map(|l| l.exp()).collect()
    }

    /// The diagonal noise covariance over tasks.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.variances()))
    }

    /// Derivative of the task-noise diagonal with respect to `log sigma_m^2`:
    /// a single diagonal entry holding `sigma_m^2`.
    pub fn derivative(&self, m: usize) -> Result<DMatrix<f64>> {
        if m >= self.num_tasks() {
            return Err(Error::InvalidInput(format!(
                "noise parameter {m} out of range ({} tasks)",
                self.num_tasks()
            )));
        }
        let mut d = DMatrix::zeros(self.num_tasks(), self.num_tasks());
        d[(m, m)] = self.log_variances[m].exp();
        Ok(d)
    }
}

fn check_point(p: &KernelParams, x: &[f64]) -> Result<()> {
    if x.len() != p.input_dim() {
        return Err(Error::dim(format!(
            "point has {} coordinates, kernel expects {}",
            x.len(),
            p.input_dim()
        )));
    }
    Ok(())
}

fn eval_unchecked(p: &KernelParams, x1: &[f64], x2: &[f64]) -> f64 {
    let mut z = 0.0;
    for (d, (a, b)) in x1.iter().zip(x2.iter()).enumerate() {
        let scaled = (a - b) / p.log_lengthscales[d].exp();
        z += scaled * scaled;
    }
    (p.log_signal_variance - 0.5 * z).exp()
}

/// ARD-RBF covariance between two points:
/// `sv^2 * exp(-1/2 * sum_d ((x1_d - x2_d) / l_d)^2)`.
pub fn kernel_eval(p: &KernelParams, x1: &[f64], x2: &[f64]) -> Result<f64> {
    check_point(p, x1)?;
    check_point(p, x2)?;
    Ok(eval_unchecked(p, x1, x2))
}

/// Kernel matrix over a point set with `jitter` added to the diagonal.
pub fn kernel_matrix(p: &KernelParams, xs: &[Vec<f64>], jitter: f64) -> Result<DMatrix<f64>> {
    if jitter < 0.0 {
        return Err(Error::InvalidInput("jitter must be non-negative".into()));
    }
    for x in xs {
        check_point(p, x)?;
    }
    let n = xs.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = eval_unchecked(p, &xs[i], &xs[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += jitter;
    }
    Ok(k)
}

/// Block kernel matrix over the observed entries of a dataset, task-major:
/// block `(i, j)` holds the kernel values between the inputs observed for
/// task `i` and those observed for task `j`. Entries index into the jittered
/// full kernel matrix, so a fully observed dataset replicates it per task
/// pair.
pub fn block_kernel_matrix(p: &KernelParams, ds: &Dataset, jitter: f64) -> Result<DMatrix<f64>> {
    let kx = kernel_matrix(p, ds.inputs(), jitter)?;
    let pairs = ds.observed_task_major();
    let s = pairs.len();
    Ok(DMatrix::from_fn(s, s, |a, b| {
        kx[(pairs[a].0, pairs[b].0)]
    }))
}

/// Entrywise derivative of the (unjittered) kernel matrix with respect to a
/// log-parameter.
pub fn kernel_matrix_derivative(
    p: &KernelParams,
    xs: &[Vec<f64>],
    which: KernelParam,
) -> Result<DMatrix<f64>> {
    for x in xs {
        check_point(p, x)?;
    }
    let n = xs.len();
    match which {
        KernelParam::LogSignalVariance => {
            // d k / d log sv^2 = k
            let mut k = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = eval_unchecked(p, &xs[i], &xs[j]);
                    k[(i, j)] = v;
                    k[(j, i)] = v;
                }
            }
            Ok(k)
        }
        KernelParam::LogLengthscale(d) => {
            if d >= p.input_dim() {
                return Err(Error::InvalidInput(format!(
                    "lengthscale index {d} out of range ({} dims)",
                    p.input_dim()
                )));
            }
            let ls = p.log_lengthscales[d].exp();
            let mut k = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let scaled = (xs[i][d] - xs[j][d]) / ls;
                    let v = eval_unchecked(p, &xs[i], &xs[j]) * scaled * scaled;
                    k[(i, j)] = v;
                    k[(j, i)] = v;
                }
            }
            Ok(k)
        }
    }
}
