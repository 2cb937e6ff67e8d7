//! Analytic functions of small dense complex matrices whose eigenvalues form
//! well-separated clusters of close values.
//!
//! `f(A)` is approximated by `p(A)`, where `p` is the Newton interpolating
//! polynomial of `f` at the eigenvalues of `A`. Divided differences over nodes
//! of one cluster ("principal" entries) come from the Taylor expansion of `f`
//! about the cluster mean, written with complete homogeneous symmetric
//! polynomials of the node offsets, so no difference of close nodes is ever
//! divided by. The remaining entries use the ordinary recurrence, whose
//! denominators join different clusters.
//!
//! ```
//! use funm_core::{funm, Complex, ComplexMatrix, Exp, FunmParams};
//!
//! let a = ComplexMatrix::from_rows(&[
//!     vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
//!     vec![Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)],
//! ])
//! .unwrap();
//! let e = funm(&a, &[Complex::new(0.0, 0.0); 2], &Exp::new(), FunmParams::default()).unwrap();
//! assert_eq!(e[(0, 1)], Complex::new(1.0, 0.0));
//! ```

pub mod clustering;
pub mod divided_diff;
pub mod error;
pub mod experiments;
pub mod impulse;
pub mod linalg;
pub mod newton;
pub mod taylor;
mod wide;

pub use clustering::{
    cluster_center, reorder_spectrum, split_clusters, Cluster, ClusterPartition, Spectrum,
    DEFAULT_DELTA, DEFAULT_GAMMA,
};
pub use divided_diff::{dd_fill_nonprincipal, dd_table_direct, DividedDifferenceTable, ScalarRing};
pub use error::{FunmError, Result};
pub use experiments::{
    exact_exponential, generate_instance, relative_error, run_trials, ExperimentConfig,
    ExperimentInstance, StatsRow, TrialResult,
};
pub use impulse::{
    eval_symbolic, format_response, impulse_response, BasisFunction, ImpulseSystem,
    SymbolicCoefficient, SymbolicResponse,
};
pub use linalg::{
    condition_number, mat_inverse, mat_mul, operator_norm, Complex, ComplexMatrix, ComplexVector,
};
pub use newton::{
    build_newton, eval_matrix, eval_matrix_vector, eval_scalar, funm, FunmParams,
    NewtonPolynomial,
};
pub use taylor::{
    classify_entry, complete_homogeneous, principal_dd, taylor_coefficients, AnalyticFunction,
    EntryKind, Exp, Polynomial, PrincipalTriangle, ShiftedPoints,
};
