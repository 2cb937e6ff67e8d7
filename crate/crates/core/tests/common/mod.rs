#![allow(dead_code)]

use funm_core::{mat_inverse, mat_mul, Complex, ComplexMatrix, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_box(rng: &mut ChaCha8Rng) -> Complex {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_row_major(rows, cols, (0..rows * cols).map(|_| unit_box(rng)).collect())
        .unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex> {
    (0..n).map(|_| unit_box(rng)).collect()
}

/// `T⁻¹·diag(eig)·T`.
pub fn similar(t: &ComplexMatrix, eig: &[Complex]) -> ComplexMatrix {
    let tinv = mat_inverse(t).unwrap();
    mat_mul(&mat_mul(&tinv, &ComplexMatrix::from_diag(eig)).unwrap(), t).unwrap()
}

/// Clustered spectrum: `sizes[j]` points scattered within `radius` of
/// well-separated centers in the box `[-1, 0] x [-1, 1]`.
pub fn clustered_spectrum(rng: &mut ChaCha8Rng, sizes: &[usize], radius: f64, separation: f64) -> Vec<Complex> {
    let mut centers: Vec<Complex> = Vec::new();
    while centers.len() < sizes.len() {
        let z = c(rng.random_range(-1.0..0.0), rng.random_range(-1.0..1.0));
        if centers.iter().all(|w| (w - z).norm() >= separation) {
            centers.push(z);
        }
    }
    sizes
        .iter()
        .zip(&centers)
        .flat_map(|(&k, &z)| {
            (0..k)
                .map(|_| z + c(rng.random_range(-radius..radius), rng.random_range(-radius..radius)))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn random_polynomial(rng: &mut ChaCha8Rng, degree: usize) -> Polynomial {
    Polynomial::new((0..=degree).map(|_| unit_box(rng)).collect())
}

/// Monomial-by-monomial `Σ a_k A^k`.
pub fn poly_of_matrix(p: &Polynomial, a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut power = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::zeros(n, n);
    for (k, &coef) in p.coefficients().iter().enumerate() {
        if k > 0 {
            power = mat_mul(&power, a).unwrap();
        }
        sum = sum.add(&power.scale(coef)).unwrap();
    }
    sum
}

pub fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    funm_core::relative_error(a, b).unwrap()
}
