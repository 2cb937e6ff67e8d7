//! Splitting a spectrum into clusters of close eigenvalues.
//!
//! Two eigenvalues belong to the same cluster when they are joined by a chain
//! of eigenvalues with consecutive gaps below `delta`. Eigenvalues in different
//! clusters are therefore at least `delta` apart, and the clusters are exactly
//! the connected components of the "closer than `delta`" graph.
//!
//! Choosing `delta`: every cross-cluster denominator `μ_i − ν_j` has modulus
//! at least `delta`, so dividing by it costs roughly `log10|μ_i| − log10(delta)`
//! significant digits. Given the accuracy of the eigenvalues and the accuracy
//! wanted in the result, this bounds the smallest useful `delta`. Two extreme
//! choices are always available: `delta` above the spectral diameter gives one
//! cluster (plain Taylor expansion of `f`), and `delta` below the smallest
//! nonzero gap gives singletons (plain Newton interpolation).

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{FunmError, Result};
use crate::linalg::Complex;

/// Default cluster separation.
pub const DEFAULT_DELTA: f64 = 0.01;
/// Default degree slack: the local Taylor model has degree `k + gamma`.
pub const DEFAULT_GAMMA: i32 = 5;

/// One cluster of the reordered spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    start: usize,
    /// Positions of the members in the original (input) order, ascending.
    members: Vec<usize>,
    center: Complex,
    degree_slack: i32,
}

impl Cluster {
    /// Index range occupied by this cluster in the reordered spectrum.
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.members.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn degree_slack(&self) -> i32 {
        self.degree_slack
    }

    /// Degree `k + gamma` of the local Taylor model; never below `k - 1`.
    pub fn taylor_degree(&self) -> usize {
        (self.size() as i64 + i64::from(self.degree_slack)).max(self.size() as i64 - 1) as usize
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.range().contains(&pos)
    }
}

/// Clusters `S_1..S_β` of a spectrum together with the separation used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPartition {
    clusters: Vec<Cluster>,
    delta: f64,
}

impl ClusterPartition {
    /// Builds a partition of an already cluster-contiguous list of points
    /// from known cluster sizes.
    pub fn from_sizes(points: &[Complex], sizes: &[usize], delta: f64, gamma: i32) -> Result<Self> {
        check_delta(delta)?;
        check_gamma(gamma)?;
        if sizes.iter().sum::<usize>() != points.len() || sizes.contains(&0) {
            return Err(FunmError::PartitionMismatch(format!(
                "sizes {sizes:?} do not tile {} points",
                points.len()
            )));
        }
        let mut clusters = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &k in sizes {
            clusters.push(Cluster {
                start,
                members: (start..start + k).collect(),
                center: cluster_center(&points[start..start + k])?,
                degree_slack: gamma,
            });
            start += k;
        }
        Ok(ClusterPartition { clusters, delta })
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Total number of eigenvalues covered.
    pub fn len(&self) -> usize {
        self.clusters.iter().map(Cluster::size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Cluster::size).collect()
    }

    pub fn centers(&self) -> Vec<Complex> {
        self.clusters.iter().map(Cluster::center).collect()
    }

    /// Index of the cluster holding reordered position `pos`.
    pub fn cluster_of(&self, pos: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(pos))
    }

    /// Applies the same degree slack to every cluster.
    pub fn with_gamma(mut self, gamma: i32) -> Result<Self> {
        check_gamma(gamma)?;
        self.clusters.iter_mut().for_each(|c| c.degree_slack = gamma);
        Ok(self)
    }

    pub fn set_gamma(&mut self, cluster: usize, gamma: i32) -> Result<()> {
        check_gamma(gamma)?;
        let len = self.clusters.len();
        let c = self
            .clusters
            .get_mut(cluster)
            .ok_or_else(|| FunmError::IndexOutOfRange(format!("cluster {cluster} of {len}")))?;
        c.degree_slack = gamma;
        Ok(())
    }
}

/// Eigenvalues in cluster-contiguous order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<Complex>,
    /// `permutation[new] = original`.
    permutation: Vec<usize>,
}

impl Spectrum {
    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(FunmError::InvalidParameter {
            name: "delta",
            detail: format!("must be positive and finite, got {delta}"),
        })
    }
}

pub(crate) fn check_gamma(gamma: i32) -> Result<()> {
    if gamma >= -1 {
        Ok(())
    } else {
        Err(FunmError::InvalidParameter {
            name: "gamma",
            detail: format!("must be >= -1, got {gamma}"),
        })
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so roots follow first appearance
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Splits eigenvalues into the connected components of the `|μ_i − μ_j| < delta` graph.
///
/// Clusters are numbered by first appearance in the input, members keep their
/// input order, and every cluster gets the default degree slack.
pub fn split_clusters(eigenvalues: &[Complex], delta: f64) -> Result<ClusterPartition> {
    if eigenvalues.is_empty() {
        return Err(FunmError::EmptyInput("eigenvalue list"));
    }
    check_delta(delta)?;
    if eigenvalues.iter().any(|z| !z.is_finite()) {
        return Err(FunmError::NonFinite("split_clusters"));
    }
    let n = eigenvalues.len();
    let mut sets = DisjointSets::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() < delta {
                sets.union(i, j);
            }
        }
    }

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let root = sets.find(i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(i),
            None => groups.push((root, vec![i])),
        }
    }

    let mut clusters = Vec::with_capacity(groups.len());
    let mut start = 0;
    for (_, members) in groups {
        let values: Vec<Complex> = members.iter().map(|&i| eigenvalues[i]).collect();
        let size = members.len();
        clusters.push(Cluster {
            start,
            members,
            center: cluster_center(&values)?,
            degree_slack: DEFAULT_GAMMA,
        });
        start += size;
    }
    Ok(ClusterPartition { clusters, delta })
}

/// Lists each cluster's members contiguously, clusters in partition order.
pub fn reorder_spectrum(eigenvalues: &[Complex], partition: &ClusterPartition) -> Result<Spectrum> {
    let n = eigenvalues.len();
    if partition.len() != n {
        return Err(FunmError::PartitionMismatch(format!(
            "partition covers {} eigenvalues, list has {n}",
            partition.len()
        )));
    }
    let mut seen = vec![false; n];
    let mut permutation = Vec::with_capacity(n);
    for c in partition.clusters() {
        if permutation.len() != c.start() {
            return Err(FunmError::PartitionMismatch(
                "cluster ranges are not consecutive".into(),
            ));
        }
        for &i in c.members() {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(FunmError::PartitionMismatch(format!(
                    "member index {i} is out of range or repeated"
                )));
            }
            permutation.push(i);
        }
    }
    Ok(Spectrum {
        values: permutation.iter().map(|&i| eigenvalues[i]).collect(),
        permutation,
    })
}

/// Arithmetic mean of the cluster members.
pub fn cluster_center(members: &[Complex]) -> Result<Complex> {
    if members.is_empty() {
        return Err(FunmError::EmptyInput("cluster members"));
    }
    let sum: Complex = members.iter().sum();
    Ok(sum / members.len() as f64)
}
