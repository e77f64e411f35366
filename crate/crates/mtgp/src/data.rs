//! Training data: input points and a partially observed output table.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SelectionMap;

/// `N` input points with a partially observed `N x M` output table.
///
/// Missing outputs are explicit `None` entries. Flattened indexing is
/// row-major (`n * M + m`), matching [`crate::linalg::vec_t`]. The observed
/// sub-vector additionally has a task-major ordering (all observations of
/// task 0 in input order, then task 1, ...) used by the block covariance
/// assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    outputs: Vec<Option<f64>>,
    num_points: usize,
    num_tasks: usize,
    input_dim: usize,
    per_task_counts: Vec<usize>,
    task_offsets: Vec<usize>,
    task_observations: Vec<Vec<usize>>,
}

impl Dataset {
    /// Builds a dataset from `N` input points and an `N x M` table of
    /// optional outputs (outer index: point, inner index: task).
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let num_points = inputs.len();
        if num_points == 0 {
            return Err(Error::InvalidInput("dataset has no input points".into()));
        }
        let input_dim = inputs[0].len();
        if input_dim == 0 {
            return Err(Error::InvalidInput("input points have zero dimensions".into()));
        }
        for (n, x) in inputs.iter().enumerate() {
            if x.len() != input_dim {
                return Err(Error::dim(format!(
                    "input {n} has {} coordinates, expected {input_dim}",
                    x.len()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("input {n} is not finite")));
            }
        }
        if outputs.len() != num_points {
            return Err(Error::dim(format!(
                "{} output rows for {} inputs",
                outputs.len(),
                num_points
            )));
        }
        let num_tasks = outputs[0].len();
        if num_tasks == 0 {
            return Err(Error::InvalidInput("output table has zero tasks".into()));
        }
        let mut flat = Vec::with_capacity(num_points * num_tasks);
        for (n, row) in outputs.iter().enumerate() {
            if row.len() != num_tasks {
                return Err(Error::dim(format!(
                    "output row {n} has {} entries, expected {num_tasks}",
                    row.len()
                )));
            }
            for (m, entry) in row.iter().enumerate() {
                if let Some(y) = entry {
                    if !y.is_finite() {
                        return Err(Error::InvalidInput(format!(
                            "output ({n}, {m}) is not finite"
                        )));
                    }
                }
                flat.push(*entry);
            }
        }

        let mut task_observations = vec![Vec::new(); num_tasks];
        for n in 0..num_points {
            for (m, obs) in task_observations.iter_mut().enumerate() {
                if flat[n * num_tasks + m].is_some() {
                    obs.push(n);
                }
            }
        }
        let per_task_counts: Vec<usize> = task_observations.iter().map(Vec::len).collect();
        if let Some(task) = per_task_counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyTask { task });
        }
        let mut task_offsets = Vec::with_capacity(num_tasks);
        let mut acc = 0;
        for &c in &per_task_counts {
            task_offsets.push(acc);
            acc += c;
        }

        Ok(Dataset {
            inputs,
            outputs: flat,
            num_points,
            num_tasks,
            input_dim,
            per_task_counts,
            task_offsets,
            task_observations,
        })
    }

    /// Builds a fully observed dataset from an `N x M` output matrix.
    pub fn from_full(inputs: Vec<Vec<f64>>, outputs: &DMatrix<f64>) -> Result<Self> {
        let rows: Vec<Vec<Option<f64>>> = (0..outputs.nrows())
            .map(|n| (0..outputs.ncols()).map(|m| Some(outputs[(n, m)])).collect())
            .collect();
        Dataset::new(inputs, rows)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_tasks(&self) -> usize {
        self.num_tasks
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn input(&self, n: usize) -> &[f64] {
        &self.inputs[n]
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn output(&self, n: usize, m: usize) -> Option<f64> {
        self.outputs[n * self.num_tasks + m]
    }

    /// Number of observed entries per task.
    pub fn per_task_counts(&self) -> &[usize] {
        &self.per_task_counts
    }

    /// Cumulative task offsets into the task-major observed vector.
    pub fn task_offsets(&self) -> &[usize] {
        &self.task_offsets
    }

    /// Total number of observed entries.
    pub fn num_observed(&self) -> usize {
        self.outputs.iter().filter(|o| o.is_some()).count()
    }

    pub fn is_full(&self) -> bool {
        self.num_observed() == self.num_points * self.num_tasks
    }

    /// Input indices with an observation for task `m`, ascending.
    pub fn task_observations(&self, m: usize) -> &[usize] {
        &self.task_observations[m]
    }

    /// Observed positions of the flattened output vector, ascending.
    pub fn selection_map(&self) -> SelectionMap {
        let kept: Vec<usize> = (0..self.num_points * self.num_tasks)
            .filter(|&k| self.outputs[k].is_some())
            .collect();
        SelectionMap::new(self.num_points * self.num_tasks, kept)
            .expect("observed positions are strictly increasing by construction")
    }

    /// Observed `(point, task)` pairs in task-major order.
    pub fn observed_task_major(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_observed());
        for (m, obs) in self.task_observations.iter().enumerate() {
            for &n in obs {
                out.push((n, m));
            }
        }
        out
    }

    /// Observed output values in task-major order.
    pub fn observed_values_task_major(&self) -> DVector<f64> {
        let pairs = self.observed_task_major();
        DVector::from_fn(pairs.len(), |k, _| {
            let (n, m) = pairs[k];
            self.output(n, m).expect("pair is observed")
        })
    }

    /// Observed output values ordered by flattened index, matching
    /// [`Dataset::selection_map`].
    pub fn observed_values_selection_order(&self) -> DVector<f64> {
        let vals: Vec<f64> = self.outputs.iter().filter_map(|o| *o).collect();
        DVector::from_vec(vals)
    }

    /// Flattened index of each task-major observed position.
    pub fn task_major_to_flat(&self) -> Vec<usize> {
        self.observed_task_major()
            .into_iter()
            .map(|(n, m)| n * self.num_tasks + m)
            .collect()
    }

    /// Full output matrix; errors if any entry is missing.
    pub fn output_matrix(&self) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.num_points, self.num_tasks);
        for n in 0..self.num_points {
            for m in 0..self.num_tasks {
                out[(n, m)] = self.output(n, m).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "output ({n}, {m}) is missing; operation requires full observations"
                    ))
                })?;
            }
        }
        Ok(out)
    }

    /// Flattened full output vector `vec_t(Y)`; errors if any entry is missing.
    pub fn output_vector(&self) -> Result<DVector<f64>> {
        Ok(crate::linalg::vec_t(&self.output_matrix()?))
    }

    /// Per-task sample variance of the observed outputs (population form).
    pub fn output_variances(&self) -> Vec<f64> {
        (0..self.num_tasks)
            .map(|m| {
                let vals: Vec<f64> = self.task_observations[m]
                    .iter()
                    .map(|&n| self.output(n, m).unwrap())
                    .collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64
            })
            .collect()
    }
}
