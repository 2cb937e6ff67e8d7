//! Divided-difference tables built by the classical recurrence
//!
//! ```text
//! Δ_i^i     = f(μ_i)
//! Δ_i^{i+m} = (Δ_{i+1}^{i+m} − Δ_i^{i+m−1}) / (μ_{i+m} − μ_i)
//! ```
//!
//! over any [`ScalarRing`], so the same code serves numeric values and the
//! symbolic `t`-dependent coefficients of the impulse response.

use std::fmt::Debug;

use crate::clustering::{ClusterPartition, Spectrum};
use crate::error::{FunmError, Result};
use crate::linalg::Complex;
use crate::taylor::PrincipalTriangle;

/// Values the divided-difference and Horner machinery can run over: a
/// complex vector space with division by (t-independent) complex scalars.
pub trait ScalarRing: Clone + Debug {
    fn zero() -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_sub(&self, other: &Self) -> Self;
    fn scale_by(&self, c: Complex) -> Self;
    fn div_by(&self, c: Complex) -> Self;

    /// `self / (right − left)`; rings with extra precision may form the
    /// difference exactly.
    fn div_by_difference(&self, right: Complex, left: Complex) -> Self {
        self.div_by(right - left)
    }

    /// `self + c·other`.
    fn add_scaled(&self, other: &Self, c: Complex) -> Self {
        self.ring_add(&other.scale_by(c))
    }
}

impl ScalarRing for Complex {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }

    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }

    fn ring_sub(&self, other: &Self) -> Self {
        self - other
    }

    fn scale_by(&self, c: Complex) -> Self {
        self * c
    }

    fn div_by(&self, c: Complex) -> Self {
        self / c
    }

    fn add_scaled(&self, other: &Self, c: Complex) -> Self {
        self + other * c
    }
}

/// Triangular table; `entries[m][i]` is the order-`m` divided difference over
/// nodes `i..=i+m` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceTable<S> {
    entries: Vec<Vec<S>>,
}

impl<S: ScalarRing> DividedDifferenceTable<S> {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, m: usize, i: usize) -> Option<&S> {
        self.entries.get(m).and_then(|row| row.get(i))
    }

    pub fn row(&self, m: usize) -> &[S] {
        &self.entries[m]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.entries
    }

    /// `Δ_1^1, Δ_1^2, …, Δ_1^n`: the coefficients of the Newton form.
    pub fn first_column(&self) -> Vec<S> {
        self.entries.iter().map(|row| row[0].clone()).collect()
    }

    /// The top entry `Δ_1^n`.
    pub fn top(&self) -> &S {
        &self.entries[self.entries.len() - 1][0]
    }
}

fn recurrence_step<S: ScalarRing>(
    prev: &[S],
    points: &[Complex],
    m: usize,
    i: usize,
) -> Result<S> {
    let denom = points[i + m] - points[i];
    if denom == Complex::new(0.0, 0.0) {
        return Err(FunmError::ZeroDenominator {
            left: i,
            right: i + m,
        });
    }
    Ok(prev[i + 1].ring_sub(&prev[i]).div_by_difference(points[i + m], points[i]))
}

/// Full table by the direct recurrence, row by row, left to right.
///
/// Coincident nodes are rejected with [`FunmError::ZeroDenominator`]; they
/// must be handled through the Taylor path instead.
pub fn dd_table_direct<S: ScalarRing>(
    points: &[Complex],
    values: &[S],
) -> Result<DividedDifferenceTable<S>> {
    if points.is_empty() {
        return Err(FunmError::EmptyInput("interpolation points"));
    }
    if points.len() != values.len() {
        return Err(FunmError::dims(
            "dd_table_direct",
            format!("{} points but {} values", points.len(), values.len()),
        ));
    }
    let n = points.len();
    let mut entries: Vec<Vec<S>> = Vec::with_capacity(n);
    entries.push(values.to_vec());
    for m in 1..n {
        let prev = &entries[m - 1];
        let row = (0..n - m)
            .map(|i| recurrence_step(prev, points, m, i))
            .collect::<Result<Vec<S>>>()?;
        entries.push(row);
    }
    Ok(DividedDifferenceTable { entries })
}

/// Completes the table from per-cluster principal triangles.
///
/// Entries whose node span lies inside one cluster are copied from that
/// cluster's triangle; every other entry comes from the recurrence, whose
/// denominators then join nodes of different clusters and so have modulus at
/// least the partition's separation.
pub fn dd_fill_nonprincipal<S: ScalarRing>(
    spectrum: &Spectrum,
    partition: &ClusterPartition,
    principal: &[PrincipalTriangle<S>],
) -> Result<DividedDifferenceTable<S>> {
    let points = spectrum.values();
    let n = points.len();
    if partition.len() != n {
        return Err(FunmError::PartitionMismatch(format!(
            "partition covers {} nodes, spectrum has {n}",
            partition.len()
        )));
    }
    if principal.len() != partition.clusters().len() {
        return Err(FunmError::PartitionMismatch(format!(
            "{} principal triangles for {} clusters",
            principal.len(),
            partition.clusters().len()
        )));
    }
    for (c, tri) in partition.clusters().iter().zip(principal) {
        if tri.size() != c.size() {
            return Err(FunmError::PartitionMismatch(format!(
                "triangle of size {} for a cluster of size {}",
                tri.size(),
                c.size()
            )));
        }
    }

    let owner: Vec<usize> = (0..n)
        .map(|pos| partition.cluster_of(pos).expect("partition covers every position"))
        .collect();

    let mut entries: Vec<Vec<S>> = Vec::with_capacity(n);
    for m in 0..n {
        let mut row = Vec::with_capacity(n - m);
        for i in 0..n - m {
            let j = owner[i];
            let cluster = &partition.clusters()[j];
            let value = if cluster.contains(i + m) {
                principal[j].entry(m, i - cluster.start()).clone()
            } else {
                recurrence_step(&entries[m - 1], points, m, i)?
            };
            row.push(value);
        }
        entries.push(row);
    }
    Ok(DividedDifferenceTable { entries })
}
