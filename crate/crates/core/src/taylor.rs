//! Principal divided differences from local Taylor models.
//!
//! Near a cluster with center `μ̄` the function is replaced by its Taylor
//! polynomial `h(λ) = Σ_{α=0}^{k+γ} c_α (λ − μ̄)^α`. The divided differences of
//! `h` over cluster nodes are
//!
//! ```text
//! Δ_i^{i+m} h = c_m + Σ_{α=m+1}^{k+γ} c_α σ_{α−m}(ξ_i, …, ξ_{i+m}),   ξ = μ − μ̄,
//! ```
//!
//! where `σ_a` is the complete homogeneous symmetric polynomial of degree `a`.
//! Only sums and products of the small offsets occur, so nothing is divided by
//! a difference of close nodes, and coincident nodes need no special case.

use serde::{Deserialize, Serialize};

use crate::clustering::{check_gamma, cluster_center, Cluster, ClusterPartition};
use crate::divided_diff::ScalarRing;
use crate::error::{FunmError, Result};
use crate::linalg::Complex;

/// A function analytic near the spectrum, with Taylor coefficients on demand.
pub trait AnalyticFunction: Send + Sync {
    fn value(&self, z: Complex) -> Complex;

    /// Coefficient `c_α` of `(λ − center)^α` in the Taylor expansion.
    fn taylor_coefficient(&self, center: Complex, alpha: usize) -> Result<Complex>;

    /// `c_0..=c_order` about `center`.
    fn taylor_coefficients(&self, center: Complex, order: usize) -> Result<Vec<Complex>> {
        (0..=order)
            .map(|a| self.taylor_coefficient(center, a))
            .collect()
    }
}

/// `λ ↦ exp(s·λ)`; `s = 1` is the plain exponential, `s = t` gives `e^{λt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exp {
    scale: Complex,
}

impl Exp {
    pub fn new() -> Self {
        Exp {
            scale: Complex::new(1.0, 0.0),
        }
    }

    pub fn with_scale(scale: Complex) -> Self {
        Exp { scale }
    }

    /// `e^{λt}` for a real time `t`.
    pub fn at_time(t: f64) -> Self {
        Exp::with_scale(Complex::new(t, 0.0))
    }
}

impl Default for Exp {
    fn default() -> Self {
        Exp::new()
    }
}

impl AnalyticFunction for Exp {
    fn value(&self, z: Complex) -> Complex {
        (self.scale * z).exp()
    }

    fn taylor_coefficient(&self, center: Complex, alpha: usize) -> Result<Complex> {
        let mut c = self.value(center);
        for a in 1..=alpha {
            c *= self.scale / a as f64;
        }
        Ok(c)
    }

    fn taylor_coefficients(&self, center: Complex, order: usize) -> Result<Vec<Complex>> {
        let mut out = Vec::with_capacity(order + 1);
        let mut c = self.value(center);
        out.push(c);
        for a in 1..=order {
            c *= self.scale / a as f64;
            out.push(c);
        }
        if out.iter().any(|z| !z.is_finite()) {
            return Err(FunmError::CoefficientUnavailable {
                order,
                reason: format!("exp overflows at center {center}"),
            });
        }
        Ok(out)
    }
}

/// Polynomial with monomial coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coefficients(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficients of the same polynomial in powers of `(λ − center)`,
    /// by repeated synthetic division.
    pub fn recentred(&self, center: Complex) -> Vec<Complex> {
        let mut b = self.coeffs.clone();
        let len = b.len();
        for i in 0..len {
            for j in (i..len.saturating_sub(1)).rev() {
                let next = b[j + 1];
                b[j] += center * next;
            }
        }
        b
    }
}

impl AnalyticFunction for Polynomial {
    fn value(&self, z: Complex) -> Complex {
        self.eval(z)
    }

    fn taylor_coefficient(&self, center: Complex, alpha: usize) -> Result<Complex> {
        Ok(self
            .recentred(center)
            .get(alpha)
            .copied()
            .unwrap_or(Complex::new(0.0, 0.0)))
    }

    fn taylor_coefficients(&self, center: Complex, order: usize) -> Result<Vec<Complex>> {
        let mut b = self.recentred(center);
        b.resize(order + 1, Complex::new(0.0, 0.0));
        Ok(b)
    }
}

/// Taylor coefficients `c_0..=c_order` of `f` about `center`.
pub fn taylor_coefficients(
    f: &dyn AnalyticFunction,
    center: Complex,
    order: usize,
) -> Result<Vec<Complex>> {
    f.taylor_coefficients(center, order)
}

/// Cluster nodes expressed as offsets from one shared center.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedPoints {
    center: Complex,
    offsets: Vec<Complex>,
}

impl ShiftedPoints {
    /// Offsets from the arithmetic mean of `points`.
    pub fn new(points: &[Complex]) -> Result<Self> {
        Ok(Self::about(cluster_center(points)?, points))
    }

    pub fn about(center: Complex, points: &[Complex]) -> Self {
        ShiftedPoints {
            center,
            offsets: points.iter().map(|&p| p - center).collect(),
        }
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn offsets(&self) -> &[Complex] {
        &self.offsets
    }
}

/// Complete homogeneous symmetric polynomial `σ_α` of the offsets.
pub fn complete_homogeneous(alpha: usize, offsets: &[Complex]) -> Complex {
    complete_homogeneous_upto(alpha, offsets)[alpha]
}

/// `σ_0..=σ_max` of the offsets, via `σ_a(x_1..x_p) = σ_a(x_1..x_{p−1}) + x_p·σ_{a−1}(x_1..x_p)`.
pub fn complete_homogeneous_upto(max: usize, offsets: &[Complex]) -> Vec<Complex> {
    let mut h = vec![Complex::new(0.0, 0.0); max + 1];
    h[0] = Complex::new(1.0, 0.0);
    for &x in offsets {
        extend_window(&mut h, x);
    }
    h
}

fn extend_window(h: &mut [Complex], x: Complex) {
    for a in 1..h.len() {
        let lower = h[a - 1];
        h[a] += x * lower;
    }
}

/// Within-cluster divided differences; `entry(m, i)` is the order-`m`
/// difference over cluster nodes `i..=i+m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalTriangle<S> {
    entries: Vec<Vec<S>>,
}

impl<S: ScalarRing> PrincipalTriangle<S> {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, m: usize, i: usize) -> &S {
        &self.entries[m][i]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.entries
    }

    pub fn first_column(&self) -> Vec<S> {
        self.entries.iter().map(|r| r[0].clone()).collect()
    }
}

/// Principal triangle of the Taylor model with the given coefficients.
///
/// `coeffs` holds `c_0..=c_D`; `D` must be at least `offsets.len() − 1`.
/// Sums run in ascending `α`, starting from the exact `c_m` term.
pub fn principal_triangle<S: ScalarRing>(
    coeffs: &[S],
    offsets: &[Complex],
) -> Result<PrincipalTriangle<S>> {
    let k = offsets.len();
    if k == 0 {
        return Err(FunmError::EmptyInput("cluster points"));
    }
    if coeffs.len() < k {
        return Err(FunmError::InvalidParameter {
            name: "gamma",
            detail: format!(
                "Taylor degree {} is below k - 1 = {}",
                coeffs.len() as i64 - 1,
                k - 1
            ),
        });
    }
    let degree = coeffs.len() - 1;
    let mut entries: Vec<Vec<S>> = (0..k).map(|m| Vec::with_capacity(k - m)).collect();
    let mut sigma = vec![Complex::new(0.0, 0.0); degree + 1];
    for i in 0..k {
        sigma.iter_mut().for_each(|s| *s = Complex::new(0.0, 0.0));
        sigma[0] = Complex::new(1.0, 0.0);
        for m in 0..k - i {
            extend_window(&mut sigma[..=degree - m], offsets[i + m]);
            let mut acc = coeffs[m].clone();
            for alpha in m + 1..=degree {
                acc = acc.add_scaled(&coeffs[alpha], sigma[alpha - m]);
            }
            entries[m].push(acc);
        }
    }
    Ok(PrincipalTriangle { entries })
}

/// Principal divided differences of `f` over one cluster, using the Taylor
/// model of degree `k + gamma` about the cluster mean.
pub fn principal_dd(
    f: &dyn AnalyticFunction,
    cluster_points: &[Complex],
    gamma: i32,
) -> Result<PrincipalTriangle<Complex>> {
    check_gamma(gamma)?;
    let shifted = ShiftedPoints::new(cluster_points)?;
    let degree = (cluster_points.len() as i64 + i64::from(gamma)) as usize;
    let coeffs = f.taylor_coefficients(shifted.center(), degree)?;
    principal_triangle(&coeffs, shifted.offsets())
}

/// Position of a table entry relative to a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// Both ends inside the cluster.
    Principal,
    /// Starts inside the cluster, ends past it.
    NonPrincipal,
    /// Starts before the cluster, ends inside or past it.
    Cross,
}

/// Classifies entry `(i, m)` (nodes `i..=i+m`, 0-based) against one cluster;
/// `None` when the span does not touch the cluster.
pub fn classify_relative(i: usize, m: usize, cluster: &Cluster) -> Option<EntryKind> {
    let r = cluster.range();
    let end = i + m;
    if r.contains(&i) {
        Some(if r.contains(&end) {
            EntryKind::Principal
        } else {
            EntryKind::NonPrincipal
        })
    } else if i < r.start && end >= r.start {
        Some(EntryKind::Cross)
    } else {
        None
    }
}

/// Classifies entry `(i, m)` against the cluster holding its left node.
/// Anything not principal is computed by the recurrence.
pub fn classify_entry(i: usize, m: usize, partition: &ClusterPartition) -> Result<EntryKind> {
    let n = partition.len();
    if i + m >= n {
        return Err(FunmError::IndexOutOfRange(format!(
            "entry ({i}, {m}) in a table over {n} nodes"
        )));
    }
    let j = partition.cluster_of(i).expect("partition covers every position");
    Ok(classify_relative(i, m, &partition.clusters()[j]).expect("left node is inside its own cluster"))
}
