//! Dense complex matrices and vectors sized for the orders this crate targets
//! (n up to about 70). Storage is row-major with no blocking.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FunmError, Result};

pub type Complex = Complex64;

/// Pivots smaller than this in modulus are treated as exact zeros by the LU factorization.
pub const PIVOT_THRESHOLD: f64 = 1e-300;

const NORM_TOL: f64 = 1e-10;
const NORM_MAX_ITER: usize = 10_000;
const NORM_SEED: u64 = 0x6e6f_726d;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = FunmError;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        ComplexMatrix::from_row_major(raw.rows, raw.cols, raw.data)
    }
}

impl From<ComplexMatrix> for RawMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(FunmError::dims(
                "matrix construction",
                format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            ));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(FunmError::NonFinite("matrix construction"));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FunmError::dims("matrix construction", "ragged rows"));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(FunmError::dims(
                op,
                format!("expected a square matrix, got {}x{}", self.rows, self.cols),
            ))
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(Complex, Complex) -> Complex,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FunmError::dims(
                op,
                format!(
                    "{}x{} vs {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Adds `c` to every diagonal entry in place.
    pub fn add_diag_mut(&mut self, c: Complex) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += c;
        }
    }

    pub fn mul_vec(&self, x: &[Complex]) -> Result<Vec<Complex>> {
        if x.len() != self.cols {
            return Err(FunmError::dims(
                "matrix-vector product",
                format!("{} columns vs vector of length {}", self.cols, x.len()),
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::new(0.0, 0.0), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense complex vector, serialized as `{"len": n, "data": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector", into = "RawVector")]
pub struct ComplexVector(Vec<Complex>);

#[derive(Serialize, Deserialize)]
struct RawVector {
    len: usize,
    data: Vec<Complex>,
}

impl TryFrom<RawVector> for ComplexVector {
    type Error = FunmError;

    fn try_from(raw: RawVector) -> Result<Self> {
        if raw.len != raw.data.len() {
            return Err(FunmError::dims(
                "vector construction",
                format!("len {} but {} entries", raw.len, raw.data.len()),
            ));
        }
        ComplexVector::new(raw.data)
    }
}

impl From<ComplexVector> for RawVector {
    fn from(v: ComplexVector) -> Self {
        RawVector {
            len: v.0.len(),
            data: v.0,
        }
    }
}

impl ComplexVector {
    pub fn new(data: Vec<Complex>) -> Result<Self> {
        if data.iter().any(|z| !z.is_finite()) {
            return Err(FunmError::NonFinite("vector construction"));
        }
        Ok(ComplexVector(data))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(FunmError::dims(
            "mat_mul",
            format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols),
        ));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik == Complex::new(0.0, 0.0) {
                continue;
            }
            for (o, &bkj) in out_row.iter_mut().zip(b.row(k)) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// LU factorization with partial pivoting, `P·A = L·U`, packed in place.
struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.require_square("LU factorization")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            // also rejects a NaN pivot
            if !(pivot >= PIVOT_THRESHOLD) {
                return Err(FunmError::SingularMatrix { column: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / d;
                lu[(i, k)] = factor;
                if factor == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    fn solve_in_place(&self, x: &mut [Complex]) {
        let n = self.lu.rows;
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
    }
}

/// Inverse by LU with partial pivoting.
pub fn mat_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = Lu::factor(a)?;
    let n = a.rows;
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = if lu.perm[i] == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        lu.solve_in_place(&mut col);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    if !inv.is_finite() {
        return Err(FunmError::NonFinite("mat_inverse"));
    }
    Ok(inv)
}

/// Operator 2-norm (largest singular value) by power iteration on `AᴴA`.
///
/// The matrix is rescaled by its largest entry first so the iteration neither
/// overflows nor underflows. The starting vector comes from a fixed seed, so the
/// result is a deterministic function of the input.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    let scale = a.max_abs();
    if scale == 0.0 || a.cols == 0 {
        return 0.0;
    }
    let m = a.scale(Complex::new(1.0 / scale, 0.0));
    let adj = m.adjoint();

    let mut rng = ChaCha8Rng::seed_from_u64(NORM_SEED);
    let mut v: Vec<Complex> = (0..m.cols)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    normalize(&mut v);

    let mut rayleigh = 0.0;
    for _ in 0..NORM_MAX_ITER {
        // both products are dimensionally valid by construction
        let w = m.mul_vec(&v).expect("square by construction");
        let next = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut u = adj.mul_vec(&w).expect("square by construction");
        let converged = (next - rayleigh).abs() <= NORM_TOL * next;
        rayleigh = next;
        if converged || normalize(&mut u) == 0.0 {
            break;
        }
        v = u;
    }
    rayleigh.sqrt() * scale
}

fn normalize(v: &mut [Complex]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// `‖T‖·‖T⁻¹‖` in the operator 2-norm.
pub fn condition_number(t: &ComplexMatrix) -> Result<f64> {
    let inv = mat_inverse(t)?;
    Ok(operator_norm(t) * operator_norm(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_row_major(rows, cols, data).unwrap()
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_times_a_is_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 4, 4);
        assert_eq!(mat_mul(&ComplexMatrix::identity(4), &a).unwrap(), a);
    }

    #[test]
    fn diagonal_product_is_elementwise() {
        let a = [c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)];
        let b = [c(2.0, 0.0), c(1.0, -1.0), c(4.0, 4.0)];
        let prod = mat_mul(&ComplexMatrix::from_diag(&a), &ComplexMatrix::from_diag(&b)).unwrap();
        let expected: Vec<_> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        assert_eq!(prod, ComplexMatrix::from_diag(&expected));
    }

    #[test]
    fn product_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 3, 3);
        let b = random_matrix(&mut rng, 3, 3);
        let p = mat_mul(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = c(0.0, 0.0);
                for k in 0..3 {
                    s += a[(i, k)] * b[(k, j)];
                }
                assert!((p[(i, j)] - s).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn mat_mul_rejects_mismatch() {
        let err = mat_mul(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, FunmError::DimensionMismatch { .. }));
    }

    #[test]
    fn inverse_of_identity_and_diagonal() {
        assert_eq!(
            mat_inverse(&ComplexMatrix::identity(3)).unwrap(),
            ComplexMatrix::identity(3)
        );
        let inv = mat_inverse(&ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.0, 4.0)])).unwrap();
        let expected = ComplexMatrix::from_diag(&[c(0.5, 0.0), c(0.0, -0.25)]);
        assert!(max_diff(&inv, &expected) < 1e-16);
    }

    #[test]
    fn inverse_residual_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_matrix(&mut rng, 5, 5);
        let inv = mat_inverse(&t).unwrap();
        let r = mat_mul(&t, &inv).unwrap().sub(&ComplexMatrix::identity(5)).unwrap();
        assert!(operator_norm(&r) < 1e-12);
    }

    #[test]
    fn singular_matrix_detected() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            mat_inverse(&a),
            Err(FunmError::SingularMatrix { .. })
        ));
        assert!(matches!(
            condition_number(&ComplexMatrix::zeros(3, 3)),
            Err(FunmError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn norm_of_simple_matrices() {
        let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(-3.0, 0.0), c(0.0, 2.0)]);
        assert!((operator_norm(&d) - 3.0).abs() < 3e-8);
        let j = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!((operator_norm(&j) - 1.0).abs() < 1e-8);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(4, 4)), 0.0);
    }

    #[test]
    fn norm_of_rectangular_matrix() {
        // singular values of [[3, 0, 0], [0, 4, 0]] are 4 and 3
        let a = ComplexMatrix::from_rows(&[
            vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!((operator_norm(&a) - 4.0).abs() < 4e-8);
    }

    /// Independent oracle: power iteration on the explicitly formed `A·Aᴴ`
    /// from a different start, run far past the library's stopping rule.
    fn norm_oracle(a: &ComplexMatrix) -> f64 {
        let gram = mat_mul(a, &a.adjoint()).unwrap();
        let n = gram.rows();
        let mut v: Vec<Complex> = (0..n).map(|i| c(1.0 + i as f64, 0.5 - i as f64)).collect();
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            let w = gram.mul_vec(&v).unwrap();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let prev = lambda;
            lambda = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
                / v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            v = w.into_iter().map(|z| z / norm).collect();
            if (lambda - prev).abs() < 1e-16 * lambda {
                break;
            }
        }
        lambda.sqrt()
    }

    #[test]
    fn norm_matches_power_iteration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 6, 6);
            let got = operator_norm(&a);
            let want = norm_oracle(&a);
            assert!((got - want).abs() / want < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn condition_numbers() {
        assert!((condition_number(&ComplexMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::from_diag(&[c(10.0, 0.0), c(0.1, 0.0)]);
        assert!((condition_number(&d).unwrap() - 100.0).abs() < 1e-6);
    }

    #[test]
    fn json_format() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0)], vec![c(-3.0, 0.5)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":1,"data":[[1.0,2.0],[-3.0,0.5]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());

        let v = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, -1.0)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"len":2,"data":[[1.0,0.0],[0.0,-1.0]]}"#);
        assert!(serde_json::from_str::<ComplexVector>(r#"{"len":3,"data":[[1,0]]}"#).is_err());
    }
}
