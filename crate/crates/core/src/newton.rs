//! Approximate Newton interpolating polynomial and its evaluation at scalars,
//! matrices and matrix-vector chains.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    check_gamma, reorder_spectrum, split_clusters, ClusterPartition, Spectrum, DEFAULT_DELTA,
    DEFAULT_GAMMA,
};
use crate::divided_diff::{dd_fill_nonprincipal, ScalarRing};
use crate::error::{FunmError, Result};
use crate::linalg::{mat_mul, Complex, ComplexMatrix, ComplexVector};
use crate::taylor::{principal_dd, principal_triangle, AnalyticFunction, PrincipalTriangle, ShiftedPoints};

/// Cluster separation and degree slack applied to every cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunmParams {
    pub delta: f64,
    pub gamma: i32,
}

impl Default for FunmParams {
    fn default() -> Self {
        FunmParams {
            delta: DEFAULT_DELTA,
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl FunmParams {
    pub fn new(delta: f64, gamma: i32) -> Result<Self> {
        let p = FunmParams { delta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(FunmError::InvalidParameter {
                name: "delta",
                detail: format!("must be positive and finite, got {}", self.delta),
            });
        }
        check_gamma(self.gamma)
    }
}

/// `p(λ) = Σ_j c_j Π_{i<j} (λ − μ_i)` over the cluster-contiguous nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolynomial<S> {
    points: Vec<Complex>,
    coefficients: Vec<S>,
}

impl<S: ScalarRing> NewtonPolynomial<S> {
    pub fn new(points: Vec<Complex>, coefficients: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(FunmError::EmptyInput("Newton nodes"));
        }
        if points.len() != coefficients.len() {
            return Err(FunmError::dims(
                "NewtonPolynomial",
                format!("{} nodes but {} coefficients", points.len(), coefficients.len()),
            ));
        }
        Ok(NewtonPolynomial {
            points,
            coefficients,
        })
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `p(A)·b` by the Horner chain `v ← (A − μ_j I)v + c_j b`, using only
    /// matrix-vector products.
    pub fn eval_matrix_vector(&self, a: &ComplexMatrix, b: &[Complex]) -> Result<Vec<S>> {
        let n = a.require_square("eval_matrix_vector")?;
        if b.len() != n {
            return Err(FunmError::dims(
                "eval_matrix_vector",
                format!("matrix of order {n}, vector of length {}", b.len()),
            ));
        }
        let last = self.coefficients.len() - 1;
        let times_b = |c: &S| -> Vec<S> { b.iter().map(|&bk| c.scale_by(bk)).collect() };
        let mut v = times_b(&self.coefficients[last]);
        for j in (0..last).rev() {
            let mu = self.points[j];
            let cb = times_b(&self.coefficients[j]);
            v = (0..n)
                .map(|r| {
                    let mut acc = cb[r].add_scaled(&v[r], -mu);
                    for (k, vk) in v.iter().enumerate() {
                        let ark = a[(r, k)];
                        if ark != Complex::new(0.0, 0.0) {
                            acc = acc.add_scaled(vk, ark);
                        }
                    }
                    acc
                })
                .collect();
        }
        Ok(v)
    }
}

impl NewtonPolynomial<Complex> {
    /// Nested evaluation of the Newton form at a scalar.
    pub fn eval_scalar(&self, lambda: Complex) -> Complex {
        let last = self.coefficients.len() - 1;
        (0..last).rev().fold(self.coefficients[last], |acc, j| {
            acc * (lambda - self.points[j]) + self.coefficients[j]
        })
    }

    /// `p(A)` by the Horner chain `P ← P·(A − μ_j I) + c_j I`.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = a.require_square("eval_matrix")?;
        let last = self.coefficients.len() - 1;
        let mut p = ComplexMatrix::identity(n).scale(self.coefficients[last]);
        for j in (0..last).rev() {
            let mut next = mat_mul(&p, a)?.sub(&p.scale(self.points[j]))?;
            next.add_diag_mut(self.coefficients[j]);
            p = next;
        }
        if !p.is_finite() {
            return Err(FunmError::NonFinite("eval_matrix"));
        }
        Ok(p)
    }
}

/// Cluster the eigenvalues, compute principal differences per cluster from the
/// Taylor model, fill in the rest by the recurrence, and return the Newton form.
pub fn build_newton(
    f: &dyn AnalyticFunction,
    eigenvalues: &[Complex],
    params: FunmParams,
) -> Result<NewtonPolynomial<Complex>> {
    params.validate()?;
    let partition = split_clusters(eigenvalues, params.delta)?.with_gamma(params.gamma)?;
    build_newton_with_partition(f, eigenvalues, &partition)
}

/// As [`build_newton`], with a caller-supplied partition (per-cluster degree slack).
pub fn build_newton_with_partition(
    f: &dyn AnalyticFunction,
    eigenvalues: &[Complex],
    partition: &ClusterPartition,
) -> Result<NewtonPolynomial<Complex>> {
    let spectrum = reorder_spectrum(eigenvalues, partition)?;
    let triangles = partition
        .clusters()
        .par_iter()
        .map(|c| principal_dd(f, &spectrum.values()[c.range()], c.degree_slack()))
        .collect::<Result<Vec<_>>>()?;
    newton_from_triangles(&spectrum, partition, &triangles)
}

/// Newton form over an arbitrary ring, given the Taylor coefficients of every
/// cluster's local model (`coefficients[j]` holds `c_0..=c_{k_j+γ_j}` for cluster `j`).
pub fn build_newton_generic<S: ScalarRing>(
    spectrum: &Spectrum,
    partition: &ClusterPartition,
    coefficients: &[Vec<S>],
) -> Result<NewtonPolynomial<S>> {
    if coefficients.len() != partition.clusters().len() {
        return Err(FunmError::PartitionMismatch(format!(
            "{} coefficient lists for {} clusters",
            coefficients.len(),
            partition.clusters().len()
        )));
    }
    let triangles = partition
        .clusters()
        .iter()
        .zip(coefficients)
        .map(|(c, co)| {
            let shifted = ShiftedPoints::about(c.center(), &spectrum.values()[c.range()]);
            principal_triangle(co, shifted.offsets())
        })
        .collect::<Result<Vec<_>>>()?;
    newton_from_triangles(spectrum, partition, &triangles)
}

fn newton_from_triangles<S: ScalarRing>(
    spectrum: &Spectrum,
    partition: &ClusterPartition,
    triangles: &[PrincipalTriangle<S>],
) -> Result<NewtonPolynomial<S>> {
    let table = dd_fill_nonprincipal(spectrum, partition, triangles)?;
    NewtonPolynomial::new(spectrum.values().to_vec(), table.first_column())
}

/// Evaluates the Newton form at a scalar.
pub fn eval_scalar(p: &NewtonPolynomial<Complex>, lambda: Complex) -> Complex {
    p.eval_scalar(lambda)
}

pub fn eval_matrix(p: &NewtonPolynomial<Complex>, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.eval_matrix(a)
}

pub fn eval_matrix_vector<S: ScalarRing>(
    p: &NewtonPolynomial<S>,
    a: &ComplexMatrix,
    b: &ComplexVector,
) -> Result<Vec<S>> {
    p.eval_matrix_vector(a, b.as_slice())
}

/// `f(A)` approximated by `p(A)`, where `eigenvalues` is the spectrum of `A`
/// counted with multiplicity.
pub fn funm(
    a: &ComplexMatrix,
    eigenvalues: &[Complex],
    f: &dyn AnalyticFunction,
    params: FunmParams,
) -> Result<ComplexMatrix> {
    let n = a.require_square("funm")?;
    if eigenvalues.len() != n {
        return Err(FunmError::dims(
            "funm",
            format!("matrix of order {n} but {} eigenvalues", eigenvalues.len()),
        ));
    }
    build_newton(f, eigenvalues, params)?.eval_matrix(a)
}
