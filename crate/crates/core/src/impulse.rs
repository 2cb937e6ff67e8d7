//! Impulse response `t ↦ ⟨d, e^{At} b⟩` in closed form.
//!
//! The Taylor coefficients of `λ ↦ e^{λt}` about a cluster center `μ̄_j` are
//! `t^α e^{μ̄_j t}/α!`. Treating each of these as a basis function, the whole
//! divided-difference and Horner pipeline is linear over them, so running it
//! over [`SymbolicCoefficient`] yields the response as a finite combination
//! `Σ w · t^α e^{μ̄_j t}/α!`. Only constant complex numbers ever divide a
//! symbolic value.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::clustering::{reorder_spectrum, split_clusters, Cluster, ClusterPartition};
use crate::divided_diff::ScalarRing;
use crate::error::{FunmError, Result};
use crate::linalg::{Complex, ComplexMatrix, ComplexVector};
use crate::newton::{build_newton_generic, FunmParams};
use crate::wide::WideComplex;

/// Weights of a finished response below this fraction of its largest weight
/// are dropped.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// `t ↦ t^power · e^{center·t} / power!`, identified by `(cluster, power)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BasisFunction {
    pub cluster: usize,
    pub power: usize,
    pub center: Complex,
}

impl BasisFunction {
    pub fn eval(&self, t: f64) -> Complex {
        let mut scale = 1.0;
        for a in 1..=self.power {
            scale *= t / a as f64;
        }
        (self.center * t).exp() * scale
    }
}

impl PartialEq for BasisFunction {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BasisFunction {}

impl PartialOrd for BasisFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BasisFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.cluster, self.power).cmp(&(other.cluster, other.power))
    }
}

/// Linear combination of basis functions with complex weights.
///
/// Weights are held in double-double precision internally and rounded to
/// [`Complex`] on the way out.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolicCoefficient {
    terms: BTreeMap<BasisFunction, WideComplex>,
}

impl SymbolicCoefficient {
    pub fn basis(b: BasisFunction) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(b, WideComplex::from_complex(Complex::new(1.0, 0.0)));
        SymbolicCoefficient { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisFunction, Complex)>) -> Self {
        let mut out = SymbolicCoefficient::default();
        for (b, w) in terms {
            let entry = out.terms.entry(b).or_default();
            *entry = entry.add(WideComplex::from_complex(w));
        }
        out.pruned()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisFunction, Complex)> {
        self.terms.iter().map(|(b, w)| (b, w.to_complex()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self, cluster: usize, power: usize) -> Option<Complex> {
        self.terms()
            .find(|(b, _)| b.cluster == cluster && b.power == power)
            .map(|(_, w)| w)
    }

    pub fn eval(&self, t: f64) -> Complex {
        self.terms().map(|(b, w)| w * b.eval(t)).sum()
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, w| !w.is_zero());
    }

    /// Drops weights below [`DROP_TOLERANCE`] times the largest one. Only
    /// meant for finished values: intermediate weights can be tiny next to
    /// their neighbours and still matter after later cancellation.
    pub fn pruned(&self) -> Self {
        let max = self.terms.values().map(|w| w.norm()).fold(0.0, f64::max);
        let floor = DROP_TOLERANCE * max;
        SymbolicCoefficient {
            terms: self
                .terms
                .iter()
                .filter(|(_, w)| !w.is_zero() && w.norm() > floor)
                .map(|(b, w)| (*b, *w))
                .collect(),
        }
    }

    fn combine(&self, other: &Self, c: Complex) -> Self {
        let mut terms = self.terms.clone();
        for (b, w) in &other.terms {
            let entry = terms.entry(*b).or_default();
            *entry = entry.add(w.mul_complex(c));
        }
        let mut out = SymbolicCoefficient { terms };
        out.canonicalize();
        out
    }

    fn map_weights(&self, f: impl Fn(WideComplex) -> WideComplex) -> Self {
        let mut out = SymbolicCoefficient {
            terms: self.terms.iter().map(|(b, w)| (*b, f(*w))).collect(),
        };
        out.canonicalize();
        out
    }
}

impl ScalarRing for SymbolicCoefficient {
    fn zero() -> Self {
        SymbolicCoefficient::default()
    }

    fn ring_add(&self, other: &Self) -> Self {
        self.combine(other, Complex::new(1.0, 0.0))
    }

    fn ring_sub(&self, other: &Self) -> Self {
        self.combine(other, Complex::new(-1.0, 0.0))
    }

    fn scale_by(&self, c: Complex) -> Self {
        self.map_weights(|w| w.mul_complex(c))
    }

    fn div_by(&self, c: Complex) -> Self {
        let c = WideComplex::from_complex(c);
        self.map_weights(|w| w.div(c))
    }

    fn div_by_difference(&self, right: Complex, left: Complex) -> Self {
        let gap = WideComplex::difference(right, left);
        self.map_weights(|w| w.div(gap))
    }

    fn add_scaled(&self, other: &Self, c: Complex) -> Self {
        self.combine(other, c)
    }
}

/// The system `x' = Ax + bu`, `y = ⟨d, x⟩`, with the spectrum of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseSystem {
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    pub b: ComplexVector,
    pub d: ComplexVector,
    #[serde(rename = "spectrum")]
    pub eigenvalues: Vec<Complex>,
}

impl ImpulseSystem {
    pub fn validate(&self) -> Result<usize> {
        let n = self.a.require_square("impulse system")?;
        for (name, len) in [("b", self.b.len()), ("d", self.d.len()), ("spectrum", self.eigenvalues.len())] {
            if len != n {
                return Err(FunmError::dims(
                    "impulse system",
                    format!("A has order {n} but {name} has length {len}"),
                ));
            }
        }
        Ok(n)
    }
}

/// Output-side pairing used for `y = ⟨d, x⟩`: `Σ d_r x_r` (no conjugation).
pub fn output_pairing<S: ScalarRing>(d: &[Complex], x: &[S]) -> S {
    d.iter()
        .zip(x)
        .fold(S::zero(), |acc, (&dr, xr)| acc.add_scaled(xr, dr))
}

/// Closed-form impulse response plus the clusters it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicResponse {
    value: SymbolicCoefficient,
    partition: ClusterPartition,
}

impl SymbolicResponse {
    pub fn value(&self) -> &SymbolicCoefficient {
        &self.value
    }

    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisFunction, Complex)> {
        self.value.terms()
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex {
        self.value.eval(t)
    }

    pub fn to_json(&self) -> ResponseJson {
        ResponseJson {
            terms: self
                .value
                .terms()
                .map(|(b, w)| TermJson {
                    cluster: b.cluster,
                    power: b.power,
                    center: b.center,
                    weight: w,
                })
                .collect(),
            clusters: self
                .partition
                .clusters()
                .iter()
                .map(|c| ClusterJson {
                    center: c.center(),
                    size: c.size(),
                    gamma: c.degree_slack(),
                })
                .collect(),
            delta: self.partition.delta(),
        }
    }
}

/// One term `weight · t^power e^{center·t} / power!`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub cluster: usize,
    pub power: usize,
    pub center: Complex,
    pub weight: Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub center: Complex,
    pub size: usize,
    pub gamma: i32,
}

/// Serialized form of a [`SymbolicResponse`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseJson {
    pub terms: Vec<TermJson>,
    pub clusters: Vec<ClusterJson>,
    pub delta: f64,
}

impl ResponseJson {
    /// Rebuilds the symbolic value (clusters are kept as metadata only).
    pub fn coefficient(&self) -> SymbolicCoefficient {
        SymbolicCoefficient::from_terms(self.terms.iter().map(|t| {
            (
                BasisFunction {
                    cluster: t.cluster,
                    power: t.power,
                    center: t.center,
                },
                t.weight,
            )
        }))
    }

    pub fn eval(&self, t: f64) -> Complex {
        self.coefficient().eval(t)
    }
}

/// Taylor coefficients `c_α(t) = t^α e^{μ̄_j t}/α!`, `α = 0..=order`, of cluster `index`.
pub fn symbolic_taylor_coefficients(index: usize, cluster: &Cluster, order: usize) -> Vec<SymbolicCoefficient> {
    (0..=order)
        .map(|power| {
            SymbolicCoefficient::basis(BasisFunction {
                cluster: index,
                power,
                center: cluster.center(),
            })
        })
        .collect()
}

/// Symbolic `⟨d, e^{At} b⟩`.
pub fn impulse_response(system: &ImpulseSystem, params: FunmParams) -> Result<SymbolicResponse> {
    params.validate()?;
    system.validate()?;
    let partition = split_clusters(&system.eigenvalues, params.delta)?.with_gamma(params.gamma)?;
    let spectrum = reorder_spectrum(&system.eigenvalues, &partition)?;
    let coefficients: Vec<Vec<SymbolicCoefficient>> = partition
        .clusters()
        .iter()
        .enumerate()
        .map(|(j, c)| symbolic_taylor_coefficients(j, c, c.taylor_degree()))
        .collect();
    let p = build_newton_generic(&spectrum, &partition, &coefficients)?;
    let v = p.eval_matrix_vector(&system.a, system.b.as_slice())?;
    Ok(SymbolicResponse {
        value: output_pairing(system.d.as_slice(), &v).pruned(),
        partition,
    })
}

pub fn eval_symbolic(resp: &SymbolicResponse, t: f64) -> Complex {
    resp.eval(t)
}

/// Numeric `⟨d, p_t(A) b⟩` for `f_t(λ) = e^{λt}`, through the same Newton pipeline.
pub fn numeric_response(system: &ImpulseSystem, params: FunmParams, t: f64) -> Result<Complex> {
    system.validate()?;
    let p = crate::newton::build_newton(&crate::taylor::Exp::at_time(t), &system.eigenvalues, params)?;
    let v = p.eval_matrix_vector(&system.a, system.b.as_slice())?;
    Ok(output_pairing(system.d.as_slice(), &v))
}

fn fmt_real(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    let s = if x == 0.0 {
        "0".to_string()
    } else {
        let exp = x.abs().log10().floor() as i32;
        if (-4..digits as i32).contains(&exp) {
            let decimals = (digits as i32 - 1 - exp).max(0) as usize;
            let s = format!("{x:.decimals$}");
            if s.contains('.') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            }
        } else {
            let s = format!("{:.*e}", digits - 1, x);
            match s.split_once('e') {
                Some((m, e)) if m.contains('.') => {
                    format!("{}e{e}", m.trim_end_matches('0').trim_end_matches('.'))
                }
                _ => s,
            }
        }
    };
    s.replace('-', "\u{2212}")
}

fn fmt_complex(z: Complex, digits: usize, wrap: bool) -> String {
    let (re, im) = (fmt_real(z.re, digits), fmt_real(z.im.abs(), digits));
    if z.im == 0.0 || im == "0" {
        return re;
    }
    let imag = if im == "1" { "i".to_string() } else { format!("{im}i") };
    if z.re == 0.0 || re == "0" {
        let sign = if z.im < 0.0 { "\u{2212}" } else { "" };
        return format!("{sign}{imag}");
    }
    let sign = if z.im < 0.0 { '\u{2212}' } else { '+' };
    if wrap {
        format!("({re}{sign}{imag})")
    } else {
        format!("{re}{sign}{imag}")
    }
}

/// Human-readable formula, terms sorted by `(cluster, power)`, weights and
/// centers printed with `digits` significant digits.
pub fn format_response(resp: &SymbolicResponse, digits: usize) -> String {
    format_coefficient(resp.value(), digits)
}

pub fn format_coefficient(value: &SymbolicCoefficient, digits: usize) -> String {
    if value.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (b, w)) in value.terms().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        out.push_str(&fmt_complex(w, digits, true));
        match b.power {
            0 => {}
            1 => out.push_str("·t"),
            p => {
                let _ = write!(out, "·t^{p}/{p}!");
            }
        }
        if b.center == Complex::new(0.0, 0.0) {
            continue;
        }
        let _ = write!(out, "·e^{{{}t}}", fmt_center(b.center, digits));
    }
    out
}

fn fmt_center(c: Complex, digits: usize) -> String {
    let s = fmt_complex(c, digits, true);
    if s.starts_with('(') {
        s
    } else {
        format!("({s})")
    }
}
