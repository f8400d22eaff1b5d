//! Acceptance checks, one line per criterion.
//!
//! Runs without the test harness so that every line is printed. Exits
//! with failure if any check fails, except those listed in
//! `KNOWN_MISMATCHES`, whose stated target value disagrees with an exact
//! computation; their lines still read FAIL.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use amalg::algebra::{AlgebraContext, DBlock, SubalgebraSpec, Target};
use amalg::cumulants::{moment_from_cumulants, CumulantEngine};
use amalg::fock::{construct_free_model, index_tuples, FockPoly, FockSpace, Perturbed, TableSeries};
use amalg::freeness::{test_factorization, test_mixed_cumulants, test_r_cyclic, test_restriction, ProbeConfig};
use amalg::liberation::{
    commutator_projection, fisher_info, gradient_functional, l2_norm, verify_conjugate, verify_conjugate_cumulant_form,
    verify_liberation_gradient, ConjugateCandidate, Side,
};
use amalg::linalg::{self, c, frobenius, ginibre, max_abs, unit, Mat};
use amalg::nc::{catalan, count_nc, enumerate_nc};
use amalg::randmat::{haar_conjugation_experiment, limit_moments_band, simulate_band, HaarConfig, VarianceProfile};
use amalg::rng::stream;
use amalg::space::{MatrixSpace, NcSpace};
use rand::Rng;

/// Criteria whose stated value is contradicted by exact computation.
const KNOWN_MISMATCHES: &[u32] = &[7];

struct Line {
    id: u32,
    pass: bool,
    text: String,
}

fn line(id: u32, pass: bool, text: String) -> Line {
    println!("{} [{id:>2}] {text}", if pass { "PASS" } else { "FAIL" });
    Line { id, pass, text }
}

fn re(x: f64) -> num_complex::Complex64 {
    c(x, 0.0)
}

// ---- 1 -------------------------------------------------------------------

/// All set partitions of `0..n` via restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let k = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(blocks);
        // Next restricted growth string.
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let prefix_max = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in rgs[i + 1..].iter_mut() {
                    *r = 0;
                }
                break;
            }
        }
    }
}

fn crosses(blocks: &[Vec<usize>]) -> bool {
    let owner: Vec<usize> = {
        let n = blocks.iter().map(|b| b.len()).sum();
        let mut o = vec![0; n];
        for (k, b) in blocks.iter().enumerate() {
            for &i in b {
                o[i] = k;
            }
        }
        o
    };
    let n = owner.len();
    for a in 0..n {
        for b in a + 1..n {
            for cc in b + 1..n {
                for d in cc + 1..n {
                    if owner[a] == owner[cc] && owner[b] == owner[d] && owner[a] != owner[b] {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn criterion_1() -> Line {
    let t = Instant::now();
    let listed = [1u64, 2, 5, 14, 42, 132, 429, 1430];
    let mut ok = (1..=8).all(|n| count_nc(n).unwrap() == listed[n - 1]);
    ok &= (1..=9).all(|n| count_nc(n).unwrap() == catalan(n) && enumerate_nc(n).unwrap().len() as u64 == catalan(n));
    for n in 1..=8 {
        let brute: BTreeSet<Vec<Vec<usize>>> = set_partitions(n).into_iter().filter(|p| !crosses(p)).collect();
        let ours: BTreeSet<Vec<Vec<usize>>> = enumerate_nc(n)
            .unwrap()
            .iter()
            .map(|p| {
                let mut b: Vec<Vec<usize>> = p.blocks().iter().map(|b| b.iter().map(|&i| i - 1).collect()).collect();
                b.sort();
                b
            })
            .collect();
        let brute: BTreeSet<Vec<Vec<usize>>> = brute
            .into_iter()
            .map(|mut p| {
                p.sort();
                p
            })
            .collect();
        ok &= brute == ours;
    }
    let secs = t.elapsed().as_secs_f64();
    line(1, ok && secs < 5.0, format!("NC counts are Catalan for n ≤ 9, brute-force sets agree for n ≤ 8 ({secs:.2} s, limit 5 s)"))
}

// ---- 2 -------------------------------------------------------------------

fn criterion_2() -> Line {
    let t = Instant::now();
    let mut rng = stream(2, 100, 0);
    let shapes: [(usize, usize, Vec<DBlock>); 10] = [
        (2, 1, vec![DBlock { size: 1, multiplicity: 1 }; 2]),
        (2, 2, vec![DBlock { size: 1, multiplicity: 2 }]),
        (2, 4, vec![DBlock { size: 2, multiplicity: 1 }]),
        (3, 2, vec![DBlock { size: 1, multiplicity: 1 }, DBlock { size: 2, multiplicity: 1 }]),
        (3, 2, vec![DBlock { size: 1, multiplicity: 3 }]),
        (4, 2, vec![DBlock { size: 2, multiplicity: 2 }]),
        (4, 2, vec![DBlock { size: 1, multiplicity: 2 }, DBlock { size: 2, multiplicity: 1 }]),
        (4, 1, vec![DBlock { size: 1, multiplicity: 4 }]),
        (8, 1, vec![DBlock { size: 2, multiplicity: 2 }, DBlock { size: 4, multiplicity: 1 }]),
        (1, 8, vec![DBlock { size: 1, multiplicity: 1 }]),
    ];
    let mut worst: f64 = 0.0;
    for (d, k, blocks) in shapes {
        let ctx = AlgebraContext::new(d, k, SubalgebraSpec::new(d, blocks).unwrap()).unwrap();
        let sp = MatrixSpace::new(ctx.clone());
        let n = ctx.n();
        for target in [Target::B, Target::D] {
            let engine = CumulantEngine::new(&sp, target).with_max_order(6);
            for order in 1..=6 {
                let args: Vec<Mat> = (0..order).map(|_| ginibre(n, &mut rng) * re(1.0 / (n as f64).sqrt())).collect();
                let rebuilt = moment_from_cumulants(&sp, &args, |a| engine.cumulant(a)).unwrap();
                let direct = sp.expect(target, &sp.product(&args)).unwrap();
                worst = worst.max(max_abs(&(rebuilt - direct)));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    line(2, worst <= 1e-10 && secs < 30.0, format!("moment-cumulant round trip, 10 contexts, orders ≤ 6, E_B and E_D: max error {worst:.2e} (tol 1e-10), {secs:.1} s"))
}

// ---- 3 -------------------------------------------------------------------

fn criterion_3() -> Line {
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let mut rng = stream(3, 100, seed);
        let d = 3;
        let terms: Vec<(Mat, Mat)> = (0..2).map(|_| {
            let l = ginibre(d, &mut rng);
            let r = l.adjoint();
            (l, r)
        }).collect();
        let eta = |b: &Mat| terms.iter().fold(linalg::zeros(d), |acc, (l, r)| acc + l * b * r);
        let sp = FockSpace::new(TableSeries::semicircular(SubalgebraSpec::scalars(d), &[terms.clone()], 4).unwrap());
        let x = sp.var(0);
        let m4 = sp.expect_b(&sp.product(&[x.clone(), x.clone(), x.clone(), x.clone()])).unwrap();
        let one = linalg::identity(d);
        let e1 = eta(&one);
        let want = eta(&e1) + &e1 * &e1;
        worst = worst.max(max_abs(&(m4 - &want)) / (1.0 + frobenius(&want)));
    }
    line(3, worst <= 1e-10, format!("B-semicircular E(X^4) = η(η(1)) + η(1)η(1): max relative error {worst:.2e} (tol 1e-10)"))
}

// ---- 4 and 5 -------------------------------------------------------------

/// Two variables, free over the diagonal of `M_2` by construction.
fn free_over_diag_series(seed: u64, max_order: usize) -> TableSeries {
    let spec = SubalgebraSpec::diagonal(2);
    let mut rng = stream(4, 100, seed);
    let mut s = TableSeries::new(spec, 2, max_order);
    for idx in index_tuples(2, max_order.min(4)) {
        if idx.iter().any(|&i| i != idx[0]) {
            continue;
        }
        if idx.len() == 2 {
            // Hadamard covariance, D-valued on D but not B-trivial.
            for i in 0..2 {
                for j in 0..2 {
                    let v = rng.random_range(0.5..1.5);
                    s.add_term(idx.clone(), vec![unit(2, i, j) * re(v), unit(2, j, i)]).unwrap();
                }
            }
            continue;
        }
        let diag = |rng: &mut amalg::rng::StreamRng| {
            Mat::from_diagonal(&nalgebra::DVector::from_fn(2, |_, _| re(rng.random_range(-0.5..0.5))))
        };
        let factors = (0..idx.len()).map(|_| diag(&mut rng)).collect();
        s.add_term(idx, factors).unwrap();
    }
    s
}

fn criterion_4() -> Line {
    let cfg = ProbeConfig { max_order: 5, tol: 1e-8, draws: 2, seed: 4 };
    let diag = SubalgebraSpec::diagonal(2);
    let model = construct_free_model(free_over_diag_series(0, 6), diag.clone()).unwrap();
    let sp = FockSpace::new(model);
    let xs = sp.vars();
    let fact = test_factorization(&sp, &xs, &cfg).unwrap();
    let mixed = test_mixed_cumulants(&sp, &xs[..1], &xs[1..], Target::D, &cfg).unwrap();

    // One off-diagonal component at indices (0, 1, 0).
    let eps = 1e-3;
    let perturbed = Perturbed {
        inner: construct_free_model(free_over_diag_series(0, 6), diag).unwrap(),
        indices: vec![0, 1, 0],
        factors: vec![unit(2, 0, 1), linalg::identity(2), linalg::identity(2)],
        scale: eps,
    };
    let psp = FockSpace::new(perturbed);
    let pxs = psp.vars();
    let pcfg = ProbeConfig { max_order: 3, ..cfg };
    let pf = test_factorization(&psp, &pxs, &pcfg).unwrap();
    let pm = test_mixed_cumulants(&psp, &pxs[..1], &pxs[1..], Target::B, &pcfg).unwrap();
    let pf3 = pf.families.iter().filter_map(|f| f.worst_at(3)).fold(0.0, f64::max);
    let pm3 = pm.family("mixed cumulants").and_then(|f| f.worst_at(3)).unwrap_or(0.0);
    let ok = fact.pass && mixed.pass && pf3 >= eps / 10.0 && pm3 >= eps / 10.0;
    line(
        4,
        ok,
        format!(
            "free-over-D model: factorization worst {:.2e}, mixed worst {:.2e} (tol 1e-8, order ≤ 5); ε = 1e-3 perturbation at order 3 gives {pf3:.2e} and {pm3:.2e} (need ≥ 1e-4)",
            fact.worst(),
            mixed.worst()
        ),
    )
}

fn criterion_5() -> Line {
    let cfg = ProbeConfig { max_order: 4, tol: 1e-9, draws: 3, seed: 5 };
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for seed in 0..3 {
        let model = construct_free_model(free_over_diag_series(seed, 5), SubalgebraSpec::diagonal(2)).unwrap();
        let sp = FockSpace::new(model);
        let rep = test_restriction(&sp, &sp.vars(), &cfg).unwrap();
        ok &= rep.pass && rep.hypothesis_holds == Some(true);
        worst = worst.max(rep.worst());
    }
    line(5, ok, format!("D-valued B-cumulants restrict: max |k_D - k_B| on D-arguments {worst:.2e} (tol 1e-9, order ≤ 4)"))
}

// ---- 6 and 7 -------------------------------------------------------------

fn criterion_6() -> Line {
    let t = Instant::now();
    let sigma = VarianceProfile::constant(64, 1.0).unwrap();
    let sim = simulate_band(1024, &sigma, 20, 80, 6).unwrap();
    let m = &sim.histogram.moments;
    let want = [1.0, 2.0, 5.0, 14.0];
    let rel: Vec<f64> = want.iter().enumerate().map(|(i, w)| (m[2 * i + 2] - w).abs() / w).collect();
    let worst = rel.iter().copied().fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    let ok = sim.ks_semicircle < 0.05 && worst <= 0.05 && secs < 120.0;
    line(
        6,
        ok,
        format!(
            "σ ≡ 1, n = 1024, 20 trials: KS {:.4} (limit 0.05), even moments {:.4} {:.4} {:.4} {:.4}, worst relative error {worst:.4} (limit 0.05), {secs:.1} s",
            sim.ks_semicircle, m[2], m[4], m[6], m[8]
        ),
    )
}

fn criterion_7() -> Line {
    let sigma = VarianceProfile::from_fn(64, |x, y| x + y).unwrap();
    let lm = limit_moments_band(&sigma, 4).unwrap();
    let gap = lm[4] - 2.0 * lm[2] * lm[2];
    let stated = 1.0 / 12.0;
    let limit_ok = (gap - stated).abs() <= 2e-3;

    let fine = VarianceProfile::from_fn(1024, |x, y| x + y).unwrap();
    let sim = simulate_band(1024, &fine, 20, 80, 7).unwrap();
    // Per-trial deviation from the semicircle value 2 m2².
    let h = &sim.histogram;
    let dev = h.moments[4] - 2.0 * h.moments[2] * h.moments[2];
    // Delta method: the spread of m4 dominates and m2 enters at first order.
    let se = (h.moment_std_errors[4].powi(2) + (4.0 * h.moments[2] * h.moment_std_errors[2]).powi(2)).sqrt();
    // Midpoint grid value of 2 Var(r) with r(x) = x + 1/2.
    let exact = (1.0 - 1.0 / 4096.0) / 6.0;
    let direction_ok = (gap - exact).abs() <= 1e-12 && dev > 0.0 && dev >= 3.0 * se;
    line(
        7,
        limit_ok && direction_ok,
        format!(
            "σ = x + y: limit m4 - 2 m2² = {gap:.6} at g = 64, stated 1/12 = {stated:.6} (tol 2e-3; exact value 2 Var(r) = 1/6){}; empirical m4 - 2 m2² = {dev:.4} ≥ 3 × SE {se:.4}: {}",
            if limit_ok { "" } else { " MISMATCH" },
            if direction_ok { "yes" } else { "no" }
        ),
    )
}

// ---- 8 -------------------------------------------------------------------

fn criterion_8() -> Line {
    let spec = SubalgebraSpec::scalars(1);
    let one = linalg::identity(1);
    let sp = FockSpace::new(TableSeries::semicircular(spec, &[vec![(one.clone(), one.clone())]], 8).unwrap());
    let x = sp.var(0);
    let xs = std::slice::from_ref(&x);
    let cfg = ProbeConfig { max_order: 4, tol: 1e-9, draws: 2, seed: 8 };
    let cand = ConjugateCandidate::new(&sp, vec![x.clone()], Target::Scalar, 1e-12).unwrap();
    let direct = verify_conjugate(&sp, xs, &cand, &cfg).unwrap();
    let phi = fisher_info(&sp, &cand).unwrap();
    let form = verify_conjugate_cumulant_form(&sp, xs, &cand, Target::Scalar, &cfg).unwrap();

    let mut rng = stream(8, 100, 0);
    let mut agree = 0;
    let mut passes = 0;
    for t in 0..20 {
        let eps = if t % 2 == 0 { 1e-13 * (1.0 + t as f64 / 20.0) } else { 1e-4 * (1.0 + t as f64) };
        let mut z = sp.zero();
        let mut power = sp.one();
        for _ in 0..=3 {
            z = sp.add(&z, &sp.scale(&power, re(rng.random_range(-1.0..1.0))));
            power = sp.mul(&power, &x);
        }
        let j = sp.add(&x, &sp.scale(&z, re(eps)));
        // Self-adjointness is only resolved to about 1e-8 by the L² norm.
        let cand = ConjugateCandidate::new(&sp, vec![j], Target::Scalar, 1e-6).unwrap();
        let a = verify_conjugate(&sp, xs, &cand, &cfg).unwrap().pass;
        let b = verify_conjugate_cumulant_form(&sp, xs, &cand, Target::Scalar, &cfg).unwrap().pass;
        agree += (a == b) as usize;
        passes += a as usize;
    }
    let ok = direct.pass && (phi - 1.0).abs() <= 1e-9 && form.pass && agree == 20;
    line(
        8,
        ok,
        format!(
            "semicircle J = X: residual {:.2e} (m ≤ 4, tol 1e-9), Φ* = {phi:.12}; cumulant form worst {:.2e}; verdicts agree on {agree}/20 perturbed candidates ({passes} pass)",
            direct.worst, form.worst
        ),
    )
}

// ---- 9 -------------------------------------------------------------------

fn criterion_9() -> Line {
    let cfg = ProbeConfig { max_order: 3, tol: 1e-9, draws: 2, seed: 9 };
    // Free over D and over B by construction.
    let model = construct_free_model(free_over_diag_series(9, 8), SubalgebraSpec::diagonal(2)).unwrap();
    let sp = FockSpace::new(model);
    let xs = sp.vars();
    let zero = sp.zero();
    let mut grad_worst: f64 = 0.0;
    let mut ok = true;
    for target in [Target::D, Target::B] {
        let rep = verify_liberation_gradient(&sp, &zero, &xs[..1], &xs[1..], target, &cfg).unwrap();
        ok &= rep.pass;
        grad_worst = grad_worst.max(rep.worst);
    }

    // Antisymmetry on a non-free word: X_0 b X_0 against B coefficients.
    let mut rng = stream(9, 100, 0);
    let mut anti: f64 = 0.0;
    for _ in 0..20 {
        let word: Vec<(FockPoly, Side)> = (0..5)
            .map(|t| {
                let b = sp.from_b(&ginibre(2, &mut rng));
                if t % 2 == 0 { (sp.mul(&xs[0], &b), Side::A1) } else { (b, Side::A2) }
            })
            .collect();
        let swapped: Vec<(FockPoly, Side)> = word.iter().map(|(a, s)| (a.clone(), s.swap())).collect();
        for target in [Target::D, Target::B] {
            let f = gradient_functional(&sp, target, &word).unwrap();
            let g = gradient_functional(&sp, target, &swapped).unwrap();
            anti = anti.max(max_abs(&(f + g)));
        }
    }

    // X free from B over D: η(b) = Σ V_ij e_ij b e_ji.
    let v = [[1.0, 0.25], [0.25, 4.0]];
    let mut terms = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            terms.push((unit(2, i, j) * re(v[i][j]), unit(2, j, i)));
        }
    }
    let hsp = FockSpace::new(TableSeries::semicircular(SubalgebraSpec::diagonal(2), &[terms], 6).unwrap());
    let hx = hsp.var(0);
    let mut hj = hsp.zero();
    for i in 0..2 {
        for j in 0..2 {
            let t = hsp.mul(&hsp.mul(&hsp.from_b(&unit(2, i, i)), &hx), &hsp.from_b(&unit(2, j, j)));
            hj = hsp.add(&hj, &hsp.scale(&t, re(1.0 / (2.0 * v[i][j]))));
        }
    }
    let hcand = ConjugateCandidate::new(&hsp, vec![hj], Target::B, 1e-12).unwrap();
    let free_norm = l2_norm(&hsp, &commutator_projection(&hsp, std::slice::from_ref(&hx), &hcand).unwrap()).unwrap();

    // B = D: X = b0 + s with s free from B.
    let mut flat = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            flat.push((unit(2, i, j) * re(0.5), unit(2, j, i)));
        }
    }
    let fsp = FockSpace::new(TableSeries::semicircular(SubalgebraSpec::full(2), &[flat], 6).unwrap());
    let s = fsp.var(0);
    let b0 = Mat::from_row_slice(2, 2, &[re(1.0), c(0.5, 0.25), c(0.5, -0.25), re(-0.5)]);
    let fx = fsp.add(&s, &fsp.from_b(&b0));
    let fcand = ConjugateCandidate::new(&fsp, vec![s], Target::B, 1e-12).unwrap();
    let bd_norm = l2_norm(&fsp, &commutator_projection(&fsp, std::slice::from_ref(&fx), &fcand).unwrap()).unwrap();

    let ok = ok && anti <= 1e-9 && free_norm <= 1e-8 && bd_norm <= 1e-8;
    line(
        9,
        ok,
        format!(
            "free pair: j = 0 relations worst {grad_worst:.2e} (m ≤ 3, tol 1e-9); antisymmetry {anti:.2e}; commutator projection {free_norm:.2e} (free over D), {bd_norm:.2e} (B = D), tol 1e-8"
        ),
    )
}

// ---- 10 ------------------------------------------------------------------

fn criterion_10() -> Line {
    let one = linalg::identity(1);
    let unit_var = vec![(one.clone(), one.clone())];
    let two = FockSpace::new(TableSeries::semicircular(SubalgebraSpec::scalars(1), &[unit_var.clone(), unit_var.clone()], 6).unwrap());
    let v = two.vars();
    let entries = vec![vec![v[0].clone(), two.zero()], vec![two.zero(), v[1].clone()]];
    let cfg = ProbeConfig { max_order: 4, tol: 1e-9, draws: 1, seed: 10 };
    let diag = test_r_cyclic(&two, &entries, &cfg).unwrap();

    let single = FockSpace::new(TableSeries::semicircular(SubalgebraSpec::scalars(1), &[unit_var], 6).unwrap());
    let x = single.var(0);
    let constant = vec![vec![x.clone(), x.clone()], vec![x.clone(), x]];
    let cst = test_r_cyclic(&single, &constant, &ProbeConfig { max_order: 2, ..cfg }).unwrap();
    let off2 = cst.family("non-cyclic patterns").and_then(|f| f.worst_at(2)).unwrap_or(0.0);
    let ok = diag.pass && !cst.pass && (off2 - 1.0).abs() < 1e-12;
    line(10, ok, format!("R-cyclic: diagonal free semicirculars worst {:.2e} (pass), constant-entry matrix order-2 residual {off2:.6} (fail, expected 1)", diag.worst()))
}

// ---- 11 ------------------------------------------------------------------

fn criterion_11() -> Line {
    let cfg = HaarConfig { d: 2, ks: vec![8, 32, 128], trials: 200, powers: vec![1, 2], cumulant_trials: 4, cumulant_order: 3, seed: 11 };
    let b = Mat::from_row_slice(2, 2, &[re(1.0), re(0.5), re(0.5), re(-1.0)]);
    let rep = haar_conjugation_experiment(&cfg, &b).unwrap();
    let last = rep.levels.last().unwrap();
    let small = last.power_norms.iter().all(|(_, v)| *v < 0.2);
    let ok = rep.pass_invariance && rep.powers_decreasing && small && rep.cumulants_decreasing;
    let fmt_levels = rep
        .levels
        .iter()
        .map(|l| {
            format!(
                "k={} ‖E_D(u)‖={:.4} ‖E_D(u²)‖={:.4} mixed={:.4}",
                l.k, l.power_norms[0].1, l.power_norms[1].1, l.mixed_cumulant_after
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    let cyc = rep.levels.iter().map(|l| l.cyclic_moment_defect).fold(0.0, f64::max);
    line(11, ok, format!("block-Haar conjugation: cyclic moment defect {cyc:.2e} (tol 1e-12); {fmt_levels}"))
}

fn main() -> ExitCode {
    let checks: [fn() -> Line; 11] = [
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9,
        criterion_10, criterion_11,
    ];
    let lines: Vec<Line> = checks.iter().map(|f| f()).collect();
    let failed: Vec<&Line> = lines.iter().filter(|l| !l.pass).collect();
    let unexpected: Vec<&&Line> = failed.iter().filter(|l| !KNOWN_MISMATCHES.contains(&l.id)).collect();
    println!("{} of {} criteria pass", lines.len() - failed.len(), lines.len());
    for l in &failed {
        if KNOWN_MISMATCHES.contains(&l.id) {
            println!("known mismatch [{}]: {}", l.id, l.text);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
