mod common;

use common::*;
use funm_core::impulse::numeric_response;
use funm_core::{
    condition_number, impulse_response, run_trials, Complex, ComplexVector, ExperimentConfig,
    FunmParams, ImpulseSystem,
};
use proptest::prelude::*;
use rand::Rng;

/// Ten states in four clusters.
fn system(seed: u64, b: Option<Vec<Complex>>, d: Option<Vec<Complex>>) -> ImpulseSystem {
    build(seed, &[3, 1, 4, 2], 0.3, 1e3, b, d)
}

fn build(
    seed: u64,
    sizes: &[usize],
    separation: f64,
    max_kappa: f64,
    b: Option<Vec<Complex>>,
    d: Option<Vec<Complex>>,
) -> ImpulseSystem {
    let mut r = rng(seed);
    let n = sizes.iter().sum();
    let eig = clustered_spectrum(&mut r, sizes, 0.001, separation);
    let mut t = random_matrix(&mut r, n, n);
    while condition_number(&t).unwrap() > max_kappa {
        t = random_matrix(&mut r, n, n);
    }
    let a = similar(&t, &eig);
    let b0 = random_vec(&mut r, n);
    let d0 = random_vec(&mut r, n);
    ImpulseSystem {
        a,
        b: ComplexVector::new(b.unwrap_or(b0)).unwrap(),
        d: ComplexVector::new(d.unwrap_or(d0)).unwrap(),
        eigenvalues: eig,
    }
}

fn combine(x: &[Complex], y: &[Complex], alpha: Complex, beta: Complex) -> Vec<Complex> {
    x.iter().zip(y).map(|(&u, &v)| alpha * u + beta * v).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn response_is_linear_in_b(seed in any::<u64>(), s2 in any::<u64>(), t in 0.0f64..3.0) {
        let mut r = rng(s2);
        let (b1, b2) = (random_vec(&mut r, 10), random_vec(&mut r, 10));
        let (alpha, beta) = (unit_box(&mut r), unit_box(&mut r));
        let p = FunmParams::default();
        let y1 = impulse_response(&system(seed, Some(b1.clone()), None), p).unwrap().eval(t);
        let y2 = impulse_response(&system(seed, Some(b2.clone()), None), p).unwrap().eval(t);
        let y = impulse_response(&system(seed, Some(combine(&b1, &b2, alpha, beta)), None), p).unwrap().eval(t);
        let want = alpha * y1 + beta * y2;
        prop_assert!((y - want).norm() <= 1e-12 * (1.0 + y1.norm() + y2.norm()));
    }

    #[test]
    fn response_is_linear_in_d(seed in any::<u64>(), s2 in any::<u64>(), t in 0.0f64..3.0) {
        let mut r = rng(s2);
        let (d1, d2) = (random_vec(&mut r, 10), random_vec(&mut r, 10));
        let (alpha, beta) = (unit_box(&mut r), unit_box(&mut r));
        let p = FunmParams::default();
        let y1 = impulse_response(&system(seed, None, Some(d1.clone())), p).unwrap().eval(t);
        let y2 = impulse_response(&system(seed, None, Some(d2.clone())), p).unwrap().eval(t);
        let y = impulse_response(&system(seed, None, Some(combine(&d1, &d2, alpha, beta))), p).unwrap().eval(t);
        let want = alpha * y1 + beta * y2;
        prop_assert!((y - want).norm() <= 1e-12 * (1.0 + y1.norm() + y2.norm()));
    }

    #[test]
    fn symbolic_and_numeric_rings_agree(seed in any::<u64>(), t in 0.0f64..3.0) {
        let sys = system(seed, None, None);
        let p = FunmParams::default();
        let symbolic = impulse_response(&sys, p).unwrap().eval(t);
        let numeric = numeric_response(&sys, p, t).unwrap();
        prop_assert!((symbolic - numeric).norm() <= 1e-9 * numeric.norm().max(1.0));
    }

    #[test]
    fn response_at_zero_is_output_pairing(seed in any::<u64>()) {
        let sys = system(seed, None, None);
        let y0 = impulse_response(&sys, FunmParams::default()).unwrap().eval(0.0);
        let want: Complex = sys.d.as_slice().iter().zip(sys.b.as_slice()).map(|(d, b)| d * b).sum();
        prop_assert!((y0 - want).norm() <= 1e-12 * sys.d.norm() * sys.b.norm());
    }
}

#[test]
fn experiments_are_reproducible() {
    let mut r = rng(5);
    for _ in 0..3 {
        let seed: u64 = r.random();
        let cfg = ExperimentConfig::new(12, 4, 3).with_trials(20).with_seed(seed);
        assert_eq!(run_trials(&cfg).unwrap(), run_trials(&cfg).unwrap());
    }
}
