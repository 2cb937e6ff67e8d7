mod common;

use common::*;
use funm_core::impulse::numeric_response;
use funm_core::{
    build_newton, complete_homogeneous, condition_number, dd_table_direct, funm, generate_instance,
    impulse_response, mat_mul, principal_dd, run_trials, Complex, ComplexVector, Exp,
    ExperimentConfig, FunmParams, ImpulseSystem, Polynomial, StatsRow,
};
use rand::seq::SliceRandom;
use rand::Rng;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { name, pass, detail }
}

fn row(n: usize, k: usize, gamma: i32, trials: usize, seed: u64) -> StatsRow {
    run_trials(&ExperimentConfig::new(n, k, gamma).with_trials(trials).with_seed(seed)).unwrap()
}

fn stats(r: &StatsRow) -> String {
    format!(
        "max={:.3e} mean={:.3e} M={} max_kappa={:.3e}",
        r.max_rel_error, r.mean_rel_error, r.exceeded, r.max_kappa
    )
}

fn ac1() -> Outcome {
    let r = row(20, 4, 5, 200, 1);
    check("AC1 stable regime n=20 K=4 gamma=5", r.max_rel_error < 1e-8 && r.exceeded == 0, stats(&r))
}

fn ac2() -> Outcome {
    let r = row(20, 8, 5, 200, 2);
    check(
        "AC2 stable regime n=20 K=8 gamma=5",
        r.max_rel_error < 1e-4 && r.mean_rel_error < 1e-6 && r.exceeded == 0,
        stats(&r),
    )
}

fn ac3() -> Outcome {
    let r = row(50, 1, -1, 200, 3);
    check("AC3 singleton clusters n=50 K=1 gamma=-1", r.mean_rel_error < 1e-6 && r.exceeded == 0, stats(&r))
}

fn ac4() -> (Outcome, StatsRow) {
    let bad = row(30, 4, -1, 500, 4);
    let good = row(30, 4, 5, 500, 4);
    let o = check(
        "AC4 gamma repair n=30 K=4, 500 shared trials",
        good.max_rel_error < bad.max_rel_error && good.exceeded == 0,
        format!("gamma=-1: {} | gamma=5: {}", stats(&bad), stats(&good)),
    );
    (o, bad)
}

fn ac5() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let sizes = [3, 2, 1, 2];
        let eig = clustered_spectrum(&mut r, &sizes, 0.001, 0.3);
        let mut t = random_matrix(&mut r, 8, 8);
        while condition_number(&t).unwrap() > 1e3 {
            t = random_matrix(&mut r, 8, 8);
        }
        let a = similar(&t, &eig);
        let degree = r.random_range(0..=7);
        let f = random_polynomial(&mut r, degree);
        // gamma large enough that every cluster's Taylor model has degree >= 7
        let got = funm(&a, &eig, &f, FunmParams::new(0.01, 7).unwrap()).unwrap();
        worst = worst.max(rel_diff(&got, &poly_of_matrix(&f, &a)));
    }
    check("AC5 polynomial exactness on 8x8 clustered matrices", worst < 1e-9, format!("worst rel={worst:.3e}"))
}

fn ac6() -> Outcome {
    let mut r = rng(6);
    let (mut worst, mut worst_zero): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let k = r.random_range(2..=6);
        let mut pts: Vec<Complex> = Vec::new();
        while pts.len() < k {
            let z = c(r.random_range(-0.5..0.5), r.random_range(-0.5..0.5));
            if pts.iter().all(|w| {
                let g = (w - z).norm();
                (0.1..=1.0).contains(&g)
            }) {
                pts.push(z);
            }
        }
        let gamma = 5;
        let degree = r.random_range(0..=k + gamma as usize);
        let f = random_polynomial(&mut r, degree);
        let vals: Vec<Complex> = pts.iter().map(|&z| f.eval(z)).collect();
        let direct = dd_table_direct(&pts, &vals).unwrap();
        let taylor = principal_dd(&f, &pts, gamma).unwrap();
        let scale = direct.rows().iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        for m in 0..k {
            for i in 0..k - m {
                let (a, b) = (taylor.entry(m, i), direct.get(m, i).unwrap());
                if m <= degree {
                    worst = worst.max((a - b).norm() / b.norm());
                } else {
                    // exactly zero in exact arithmetic
                    worst_zero = worst_zero.max((a - b).norm() / scale);
                }
            }
        }
    }
    check(
        "AC6 Taylor path equals direct recurrence for gaps in [0.1, 1]",
        worst < 1e-11 && worst_zero < 1e-11,
        format!("worst rel={worst:.3e}, vanishing rows {worst_zero:.3e} of table max"),
    )
}

fn ac7() -> Outcome {
    let mu = c(-0.7, 0.4);
    let h = c(1e-8, 0.0) * c(0.3f64.cos(), 0.3f64.sin());
    let pts = [mu, mu + h];
    // e^{μ+h} − e^{μ} over h = e^{μ} Σ_k h^k/(k+1)!, with no cancellation
    let mut term = c(1.0, 0.0);
    let mut series = c(0.0, 0.0);
    for k in 0..10 {
        term = if k == 0 { c(1.0, 0.0) } else { term * h / (k as f64 + 1.0) };
        series += term;
    }
    let oracle = mu.exp() * series;
    let vals = [pts[0].exp(), pts[1].exp()];
    let direct = *dd_table_direct(&pts, &vals).unwrap().get(1, 0).unwrap();
    let taylor = *principal_dd(&Exp::new(), &pts, 5).unwrap().entry(1, 0);
    let dev = (direct - taylor).norm() / taylor.norm();
    let err = (taylor - oracle).norm() / oracle.norm();
    check(
        "AC7 cancellation: gap 1e-8 two-point cluster",
        dev >= 1e-9 && err <= 1e-12,
        format!("direct deviates {dev:.3e}, taylor vs series {err:.3e}"),
    )
}

fn ac8() -> Outcome {
    let mut r = rng(8);
    let cfg = ExperimentConfig::new(10, 4, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inst = generate_instance(&cfg, &mut r).unwrap();
        let sys = ImpulseSystem {
            a: inst.a.clone(),
            b: ComplexVector::new(random_vec(&mut r, 10)).unwrap(),
            d: ComplexVector::new(random_vec(&mut r, 10)).unwrap(),
            eigenvalues: inst.eigenvalues.clone(),
        };
        let params = FunmParams::default();
        let resp = impulse_response(&sys, params).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let num = numeric_response(&sys, params, t).unwrap();
            worst = worst.max((resp.eval(t) - num).norm() / num.norm());
        }
    }
    check("AC8 symbolic and numeric impulse responses agree", worst < 1e-9, format!("worst rel={worst:.3e}"))
}

fn ac9() -> Outcome {
    let mut r = rng(9);
    let mut failures = Vec::new();

    let mut sym: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(2..8);
        let mut pts: Vec<Complex> = Vec::new();
        while pts.len() < n {
            let z = unit_box(&mut r);
            if pts.iter().all(|w| (w - z).norm() >= 0.2) {
                pts.push(z);
            }
        }
        let vals: Vec<Complex> = pts.iter().map(|z| z.exp()).collect();
        let top = *dd_table_direct(&pts, &vals).unwrap().top();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut r);
        let p2: Vec<Complex> = idx.iter().map(|&i| pts[i]).collect();
        let v2: Vec<Complex> = idx.iter().map(|&i| vals[i]).collect();
        sym = sym.max((top - dd_table_direct(&p2, &v2).unwrap().top()).norm() / top.norm());
    }
    if sym > 1e-10 {
        failures.push(format!("symmetry {sym:.3e}"));
    }

    let (mut rec, mut binom): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let m = r.random_range(1..6);
        let alpha = r.random_range(1..8);
        let xs = random_vec(&mut r, m + 1);
        let mut swapped = xs[1..m].to_vec();
        swapped.push(xs[0]);
        let lhs = (complete_homogeneous(alpha, &xs[1..]) - complete_homogeneous(alpha, &swapped)) / (xs[m] - xs[0]);
        let rhs = complete_homogeneous(alpha - 1, &xs);
        rec = rec.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        let x = xs[0];
        let count = (1..=m).fold(1.0, |acc, i| acc * (alpha + i) as f64 / i as f64);
        let want = x.powu(alpha as u32) * count;
        binom = binom.max((complete_homogeneous(alpha, &vec![x; m + 1]) - want).norm() / want.norm().max(1.0));
    }
    if rec > 1e-10 || binom > 1e-13 {
        failures.push(format!("sigma recurrence {rec:.3e} binomial {binom:.3e}"));
    }

    let (mut interp, mut comm): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let eig = clustered_spectrum(&mut r, &[3, 1, 2, 2], 0.001, 0.2);
        let p = build_newton(&Exp::new(), &eig, FunmParams::default()).unwrap();
        for z in &eig {
            interp = interp.max((p.eval_scalar(*z) - z.exp()).norm() / (1.0 + z.exp().norm()));
        }
        let a = similar(&random_matrix(&mut r, 8, 8), &eig);
        let pa = p.eval_matrix(&a).unwrap();
        comm = comm.max(rel_diff(&mat_mul(&pa, &a).unwrap(), &mat_mul(&a, &pa).unwrap()));
    }
    if interp > 1e-10 || comm > 1e-10 {
        failures.push(format!("interpolation {interp:.3e} commutation {comm:.3e}"));
    }

    let cfg = ExperimentConfig::new(15, 4, 2).with_trials(30).with_seed(99);
    if run_trials(&cfg).unwrap() != run_trials(&cfg).unwrap() {
        failures.push("determinism".into());
    }

    check(
        "AC9 property suites (symmetry, sigma identities, interpolation, commutation, determinism)",
        failures.is_empty(),
        if failures.is_empty() {
            format!("symmetry {sym:.1e}, sigma {rec:.1e}/{binom:.1e}, interp {interp:.1e}, comm {comm:.1e}")
        } else {
            failures.join("; ")
        },
    )
}

fn unstable_rows(bad_30_4: &StatsRow) -> Outcome {
    let r = row(20, 16, -1, 500, 10);
    check(
        "unstable rows at gamma=-1 yield M>0 over 500 trials",
        bad_30_4.exceeded > 0 && r.exceeded > 0,
        format!("(30,4,-1) M={} | (20,16,-1) M={}", bad_30_4.exceeded, r.exceeded),
    )
}

fn polynomial_exact() -> Outcome {
    let f = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(-0.5, 0.0)]);
    let mut r = rng(12);
    let eig = clustered_spectrum(&mut r, &[2, 2], 0.0005, 0.5);
    let a = similar(&random_matrix(&mut r, 4, 4), &eig);
    let got = funm(&a, &eig, &f, FunmParams::default()).unwrap();
    let err = rel_diff(&got, &poly_of_matrix(&f, &a));
    check("polynomial f on clustered matrix is reproduced", err < 1e-9, format!("rel diff {err:.3e}"))
}

fn main() {
    let (o4, bad) = ac4();
    let outcomes = vec![
        ac1(),
        ac2(),
        ac3(),
        o4,
        ac5(),
        ac6(),
        ac7(),
        ac8(),
        ac9(),
        unstable_rows(&bad),
        polynomial_exact(),
    ];
    for o in &outcomes {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name).collect();
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
