//! Gaussian band matrices with a variance profile, their limit moments,
//! and block-Haar conjugation over the diagonal constants.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, DBlock, SubalgebraSpec, Target};
use crate::cumulants::CumulantEngine;
use crate::error::{invalid, Result};
use crate::fock::index_tuples;
use crate::freeness::{test_semicircularity_scalar, SemicircleVerdict};
use crate::linalg::{self, Mat};
use crate::rng::{stream, TAG_BAND, TAG_HAAR};
use crate::space::MatrixSpace;

/// Highest empirical moment order recorded.
pub const MOMENT_ORDER: usize = 8;

/// Smallest grid accepted by [`limit_moments_band`].
pub const MIN_GRID: usize = 16;

/// Run `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Output order is the index order either way.
fn map_trials<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// `σ` sampled on a `g × g` grid of cells over `[0,1]²`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    g: usize,
    grid: Vec<f64>,
}

impl VarianceProfile {
    /// Rows of the grid; must be square, symmetric, finite and nonnegative.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let g = rows.len();
        if g == 0 {
            return invalid("variance profile is empty");
        }
        let mut grid = Vec::with_capacity(g * g);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != g {
                return invalid(format!("profile row {} has {} entries, expected {g}", a + 1, row.len()));
            }
            for (b, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return invalid(format!("profile entry ({}, {}) = {v} is not a nonnegative number", a + 1, b + 1));
                }
            }
            grid.extend_from_slice(row);
        }
        for a in 0..g {
            for b in 0..a {
                if grid[a * g + b] != grid[b * g + a] {
                    return invalid(format!("profile is not symmetric at ({}, {})", a + 1, b + 1));
                }
            }
        }
        Ok(VarianceProfile { g, grid })
    }

    /// Midpoint samples of `σ`, symmetrised so that symmetry is exact.
    pub fn from_fn(g: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mid = |a: usize| (a as f64 + 0.5) / g as f64;
        let rows = (0..g)
            .map(|a| (0..g).map(|b| 0.5 * (f(mid(a), mid(b)) + f(mid(b), mid(a)))).collect())
            .collect();
        Self::from_rows(rows)
    }

    pub fn constant(g: usize, c: f64) -> Result<Self> {
        Self::from_fn(g, |_, _| c)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Cell `(a, b)`, zero-based.
    pub fn cell(&self, a: usize, b: usize) -> f64 {
        self.grid[a * self.g + b]
    }

    /// `σ(x, y)` by cell lookup, with `x = 1` falling in the last cell.
    pub fn at(&self, x: f64, y: f64) -> f64 {
        let idx = |t: f64| ((t * self.g as f64).floor().max(0.0) as usize).min(self.g - 1);
        self.cell(idx(x), idx(y))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.grid.chunks(self.g).map(|r| r.to_vec()).collect()
    }

    /// `r(x) = ∫ σ(x, y) dy` per cell.
    pub fn row_integrals(&self) -> Vec<f64> {
        self.grid.chunks(self.g).map(|r| r.iter().sum::<f64>() / self.g as f64).collect()
    }

    /// `η(f)(x) = ∫ f(y) σ(x, y) dy` on the grid.
    fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.grid
            .chunks(self.g)
            .map(|r| r.iter().zip(f).map(|(s, v)| s * v).sum::<f64>() / self.g as f64)
            .collect()
    }
}

/// Hermitian `G` with `E|g_ij|² = σ(i/n, j/n)/n`, indices from 1.
/// Off-diagonal entries are complex Gaussian with real and imaginary
/// parts of half the variance each; diagonal entries are real.
pub fn sample_band_matrix<R: Rng + ?Sized>(n: usize, sigma: &VarianceProfile, rng: &mut R) -> Result<Mat> {
    if n < 2 {
        return invalid(format!("band matrix size must be at least 2, got {n}"));
    }
    let mut g = Mat::zeros(n, n);
    let x = |i: usize| (i + 1) as f64 / n as f64;
    for i in 0..n {
        let v = sigma.at(x(i), x(i)) / n as f64;
        let z: f64 = rng.sample(StandardNormal);
        g[(i, i)] = Complex64::new(z * v.sqrt(), 0.0);
        for j in i + 1..n {
            let z = linalg::complex_gaussian(rng, sigma.at(x(i), x(j)) / n as f64);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    Ok(g)
}

/// Pooled eigenvalue histogram with per-trial moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramResult {
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    /// `moments[k]` is the trial mean of `(1/n) Tr(G^k)`, `k = 0..=8`.
    pub moments: Vec<f64>,
    /// Standard errors of `moments` across trials.
    pub moment_std_errors: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

/// Histogram and moments from per-sample eigenvalue lists.
pub fn empirical_spectrum(eigenvalues: &[Vec<f64>], bins: usize, seed: u64) -> Result<HistogramResult> {
    if eigenvalues.is_empty() || eigenvalues.iter().any(|e| e.is_empty()) {
        return invalid("empirical spectrum needs at least one nonempty sample");
    }
    if bins == 0 {
        return invalid("histogram needs at least one bin");
    }
    let all = eigenvalues.iter().flatten().copied();
    let (mut lo, mut hi) = all.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|b| lo + b as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for x in all {
        counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
        total += 1;
    }
    let masses = counts.iter().map(|&c| c as f64 / total as f64).collect();

    let per_trial: Vec<Vec<f64>> = eigenvalues
        .iter()
        .map(|ev| (0..=MOMENT_ORDER).map(|k| ev.iter().map(|x| x.powi(k as i32)).sum::<f64>() / ev.len() as f64).collect())
        .collect();
    let t = per_trial.len() as f64;
    let moments: Vec<f64> = (0..=MOMENT_ORDER).map(|k| per_trial.iter().map(|m| m[k]).sum::<f64>() / t).collect();
    let moment_std_errors = (0..=MOMENT_ORDER).map(|k| std_error(per_trial.iter().map(|m| m[k]), moments[k])).collect();
    Ok(HistogramResult { bin_edges, masses, moments, moment_std_errors, trials: eigenvalues.len(), seed })
}

/// Standard error of the mean; zero for a single observation.
pub fn std_error(xs: impl Iterator<Item = f64> + Clone, mean: f64) -> f64 {
    let n = xs.clone().count();
    if n < 2 {
        return 0.0;
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// CDF of the semicircle law on `[−R, R]`.
pub fn semicircle_cdf(x: f64, radius: f64) -> f64 {
    let t = (x / radius).clamp(-1.0, 1.0);
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / std::f64::consts::PI
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and the
/// semicircle of radius `R`.
pub fn ks_distance_semicircle(xs: &[f64], radius: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = semicircle_cdf(x, radius);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Output of [`simulate_band`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandSimulation {
    pub n: usize,
    pub histogram: HistogramResult,
    /// Radius `2 (∫∫σ)^{1/2}` of the comparison semicircle.
    pub semicircle_radius: f64,
    pub ks_semicircle: f64,
}

/// Sample `trials` band matrices, trial `t` drawing from its own stream.
pub fn simulate_band(n: usize, sigma: &VarianceProfile, trials: usize, bins: usize, seed: u64) -> Result<BandSimulation> {
    if trials == 0 {
        return invalid("at least one trial is required");
    }
    let eigs: Vec<Result<Vec<f64>>> = map_trials(trials, |t| {
        let mut rng = stream(seed, TAG_BAND, t as u64);
        Ok(linalg::hermitian_eigenvalues(&sample_band_matrix(n, sigma, &mut rng)?))
    });
    let eigs: Vec<Vec<f64>> = eigs.into_iter().collect::<Result<_>>()?;
    let histogram = empirical_spectrum(&eigs, bins, seed)?;
    let total: f64 = sigma.row_integrals().iter().sum::<f64>() / sigma.g() as f64;
    let radius = 2.0 * total.sqrt();
    let pooled: Vec<f64> = eigs.into_iter().flatten().collect();
    let ks_semicircle = if radius > 0.0 { ks_distance_semicircle(&pooled, radius) } else { f64::NAN };
    Ok(BandSimulation { n, histogram, semicircle_radius: radius, ks_semicircle })
}

/// Limit moments `τ(X^p)`, `p = 0..=order`, of the operator-valued
/// semicircular element over `L^∞[0,1]` with covariance `η`, using the
/// first-pair recursion `E(X^p) = Σ_j η(E(X^{j−2})) E(X^{p−j})`.
pub fn limit_moments_band(sigma: &VarianceProfile, order: usize) -> Result<Vec<f64>> {
    if sigma.g() < MIN_GRID {
        return invalid(format!("limit moments need a grid of at least {MIN_GRID} cells, got {}", sigma.g()));
    }
    if order % 2 == 1 {
        return invalid(format!("odd order {order} requested; odd limit moments vanish"));
    }
    let g = sigma.g();
    let mut fm: Vec<Vec<f64>> = vec![vec![1.0; g]];
    for p in 1..=order {
        let mut acc = vec![0.0; g];
        if p % 2 == 0 {
            for j in (2..=p).step_by(2) {
                let inner = sigma.apply(&fm[j - 2]);
                for (a, (x, y)) in acc.iter_mut().zip(inner.iter().zip(&fm[p - j])) {
                    *a += x * y;
                }
            }
        }
        fm.push(acc);
    }
    Ok(fm.iter().map(|f| f.iter().sum::<f64>() / g as f64).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BandVerdict {
    pub row_integrals: Vec<f64>,
    pub row_deviation: f64,
    pub constant_rows: bool,
    pub limit_moments: Vec<f64>,
    pub semicircle: SemicircleVerdict,
    /// The two routes agree: constant rows exactly when semicircular.
    pub consistent: bool,
}

/// Row-integral test together with the moment test on the limit law.
pub fn band_semicircle_verdict(sigma: &VarianceProfile, order: usize, tol_row: f64) -> Result<BandVerdict> {
    let rows = sigma.row_integrals();
    let mean = rows.iter().sum::<f64>() / rows.len() as f64;
    let row_deviation = rows.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    let limit_moments = limit_moments_band(sigma, order.max(4))?;
    let semicircle = test_semicircularity_scalar(&limit_moments[1..], tol_row)?;
    let constant_rows = row_deviation <= tol_row;
    Ok(BandVerdict { consistent: constant_rows == semicircle.pass, row_integrals: rows, row_deviation, constant_rows, limit_moments, semicircle })
}

/// Settings for [`haar_conjugation_experiment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HaarConfig {
    pub d: usize,
    pub ks: Vec<usize>,
    pub trials: usize,
    pub powers: Vec<usize>,
    /// Trials used for the (costlier) mixed-cumulant estimate.
    pub cumulant_trials: usize,
    pub cumulant_order: usize,
    pub seed: u64,
}

impl Default for HaarConfig {
    fn default() -> Self {
        HaarConfig { d: 2, ks: vec![8, 32, 128], trials: 200, powers: vec![1, 2], cumulant_trials: 4, cumulant_order: 3, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarLevel {
    pub k: usize,
    /// Largest `‖[u, d]‖` over trials and a basis of `D`.
    pub commutator_defect: f64,
    /// Largest change of a cyclic block moment under conjugation.
    pub cyclic_moment_defect: f64,
    /// `(m, mean over trials of ‖E_D(u^m)‖)`.
    pub power_norms: Vec<(usize, f64)>,
    /// Largest mixed `D`-cumulant of `{X} ∪ B` before conjugation.
    pub mixed_cumulant_before: f64,
    /// Same for `{uXu*} ∪ B`, averaged over cumulant trials.
    pub mixed_cumulant_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaarReport {
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub levels: Vec<HaarLevel>,
    pub powers_decreasing: bool,
    pub cumulants_decreasing: bool,
    pub pass_invariance: bool,
}

/// The context `M_d ⊗ M_k` with `D` the diagonal constants.
pub fn haar_context(d: usize, k: usize) -> Result<AlgebraContext> {
    AlgebraContext::new(d, k, SubalgebraSpec::new(d, vec![DBlock { size: 1, multiplicity: 1 }; d])?)
}

/// `u = ⊕_i u_i` with independent Haar `k × k` blocks.
pub fn block_haar<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Mat {
    let mut u = Mat::zeros(d * k, d * k);
    for i in 0..d {
        u.view_mut((i * k, i * k), (k, k)).copy_from(&linalg::haar_unitary(k, rng));
    }
    u
}

/// `X = b ⊗ 1 + G` with `G` a normalised GUE matrix: coupled to `B`
/// through `b`, which conjugation by block-Haar unitaries undoes.
pub fn coupled_model<R: Rng + ?Sized>(ctx: &AlgebraContext, b: &Mat, rng: &mut R) -> Mat {
    let n = ctx.n();
    let g = linalg::random_hermitian(n, rng) * Complex64::new((1.0 / n as f64).sqrt(), 0.0);
    ctx.embed_b(b) + g
}

/// `Tr(X_{i_1 i_2} X_{i_2 i_3} ⋯ X_{i_m i_1}) / k` for every index cycle
/// of length `≤ max_len`.
pub fn cyclic_moments(x: &Mat, d: usize, k: usize, max_len: usize) -> Vec<Complex64> {
    let block = |i: usize, j: usize| x.view((i * k, j * k), (k, k)).clone_owned();
    let mut out = Vec::new();
    for cycle in index_tuples(d, max_len) {
        let mut acc = linalg::identity(k);
        for (t, &i) in cycle.iter().enumerate() {
            acc *= block(i, cycle[(t + 1) % cycle.len()]);
        }
        out.push(acc.trace() / k as f64);
    }
    out
}

/// Largest `D`-cumulant with at least one `X` argument and one
/// off-diagonal matrix unit of `B`, over orders `2..=order`. Arguments from
/// `D` itself are left out: their mixed `D`-cumulants vanish identically.
fn mixed_cumulant_size(ctx: &AlgebraContext, x: &Mat, order: usize) -> Result<f64> {
    let space = MatrixSpace::new(ctx.clone());
    let engine = CumulantEngine::new(&space, Target::D).with_max_order(order);
    let d = ctx.d();
    let mut args = vec![x.clone()];
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            args.push(ctx.embed_b(&linalg::unit(d, i, j)));
        }
    }
    let mut worst: f64 = 0.0;
    for t in index_tuples(args.len(), order).into_iter().filter(|t| t.len() >= 2) {
        if !t.contains(&0) || t.iter().all(|&i| i == 0) {
            continue;
        }
        let a: Vec<Mat> = t.iter().map(|&i| args[i].clone()).collect();
        worst = worst.max(linalg::frobenius(&engine.cumulant(&a)?));
    }
    Ok(worst)
}

/// Conjugate a coupled model by block-Haar unitaries at each `k`, with
/// the model and unitaries drawn from per-`k`, per-trial streams.
pub fn haar_conjugation_experiment(cfg: &HaarConfig, b: &Mat) -> Result<HaarReport> {
    if cfg.d == 0 || cfg.ks.is_empty() || cfg.trials == 0 {
        return invalid("haar experiment needs d ≥ 1, at least one k and at least one trial");
    }
    if b.nrows() != cfg.d || b.ncols() != cfg.d {
        return invalid(format!("coupling matrix must be {0} × {0}", cfg.d));
    }
    let mut levels = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        let ctx = haar_context(cfg.d, k)?;
        let tag = |t: usize| ((k as u64) << 20) | t as u64;
        let mut rng = stream(cfg.seed, TAG_HAAR, tag(0xfffff));
        let x = coupled_model(&ctx, b, &mut rng);
        let base = cyclic_moments(&x, cfg.d, k, 4);
        let d_basis = ctx.basis(Target::D);

        let per_trial: Vec<(f64, f64, Vec<f64>)> = map_trials(cfg.trials, |t| {
            let mut rng = stream(cfg.seed, TAG_HAAR, tag(t));
            let u = block_haar(cfg.d, k, &mut rng);
            let comm = d_basis.iter().map(|p| linalg::max_abs(&linalg::commutator(&u, p))).fold(0.0, f64::max);
            let y = &u * &x * u.adjoint();
            let cyc = cyclic_moments(&y, cfg.d, k, 4)
                .iter()
                .zip(&base)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let norms = cfg
                .powers
                .iter()
                .map(|&m| {
                    let mut p = linalg::identity(u.nrows());
                    for _ in 0..m {
                        p *= &u;
                    }
                    linalg::max_abs(&ctx.cond_exp_d(&p))
                })
                .collect();
            (comm, cyc, norms)
        });
        let commutator_defect = per_trial.iter().map(|r| r.0).fold(0.0, f64::max);
        let cyclic_moment_defect = per_trial.iter().map(|r| r.1).fold(0.0, f64::max);
        let power_norms = cfg
            .powers
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, per_trial.iter().map(|r| r.2[i]).sum::<f64>() / cfg.trials as f64))
            .collect();

        let mixed_cumulant_before = mixed_cumulant_size(&ctx, &x, cfg.cumulant_order)?;
        let after: Vec<Result<f64>> = map_trials(cfg.cumulant_trials.max(1), |t| {
            let mut rng = stream(cfg.seed, TAG_HAAR, tag(t));
            let u = block_haar(cfg.d, k, &mut rng);
            mixed_cumulant_size(&ctx, &(&u * &x * u.adjoint()), cfg.cumulant_order)
        });
        let after: Vec<f64> = after.into_iter().collect::<Result<_>>()?;
        let mixed_cumulant_after = after.iter().sum::<f64>() / after.len() as f64;
        levels.push(HaarLevel { k, commutator_defect, cyclic_moment_defect, power_norms, mixed_cumulant_before, mixed_cumulant_after });
    }
    let powers_decreasing = (0..cfg.powers.len()).all(|i| levels.windows(2).all(|w| w[1].power_norms[i].1 < w[0].power_norms[i].1));
    let cumulants_decreasing = levels.windows(2).all(|w| w[1].mixed_cumulant_after < w[0].mixed_cumulant_after);
    let pass_invariance = levels.iter().all(|l| l.cyclic_moment_defect <= 1e-12 && l.commutator_defect == 0.0);
    Ok(HaarReport { d: cfg.d, trials: cfg.trials, seed: cfg.seed, levels, powers_decreasing, cumulants_decreasing, pass_invariance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan_moments() -> Vec<f64> {
        vec![1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0]
    }

    #[test]
    fn profile_validation() {
        assert!(VarianceProfile::from_rows(vec![vec![1.0, 2.0], vec![1.0, 1.0]]).is_err());
        assert!(VarianceProfile::from_rows(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).is_err());
        assert!(VarianceProfile::from_rows(vec![vec![1.0, 2.0]]).is_err());
        assert!(VarianceProfile::from_rows(vec![]).is_err());
        let p = VarianceProfile::from_fn(4, |x, y| x * y * y).unwrap();
        assert_eq!(p.cell(1, 3), p.cell(3, 1));
        assert_eq!(p.at(1.0, 0.0), p.cell(3, 0));
        assert!(limit_moments_band(&p, 4).is_err());
    }

    #[test]
    fn band_sampling() {
        let sigma = VarianceProfile::from_fn(16, |x, y| 1.0 + x + y).unwrap();
        let n = 4;
        let mut rng = stream(1, TAG_BAND, 0);
        let trials = 1000;
        let mut sum = vec![0.0; n * n];
        let mut sum2 = vec![0.0; n * n];
        for _ in 0..trials {
            let g = sample_band_matrix(n, &sigma, &mut rng).unwrap();
            assert!(linalg::is_hermitian(&g, 0.0));
            for (idx, z) in g.iter().enumerate() {
                sum[idx] += z.norm_sqr();
                sum2[idx] += z.norm_sqr().powi(2);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let want = sigma.at((i + 1) as f64 / n as f64, (j + 1) as f64 / n as f64) / n as f64;
                // nalgebra is column-major.
                let idx = j * n + i;
                let mean = sum[idx] / trials as f64;
                let se = ((sum2[idx] / trials as f64 - mean * mean) / trials as f64).sqrt();
                assert!((mean - want).abs() < 5.0 * se, "({i},{j}): {mean} vs {want}");
            }
        }
        let zero = VarianceProfile::constant(16, 0.0).unwrap();
        assert_eq!(sample_band_matrix(5, &zero, &mut rng).unwrap(), Mat::zeros(5, 5));
        assert!(sample_band_matrix(1, &zero, &mut rng).is_err());
    }

    #[test]
    fn spectrum_of_zero_samples() {
        let h = empirical_spectrum(&[vec![0.0; 6], vec![0.0; 6]], 5, 3).unwrap();
        assert!((h.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let nonzero: Vec<&f64> = h.masses.iter().filter(|&&m| m > 0.0).collect();
        assert_eq!(nonzero, vec![&1.0]);
        assert_eq!(h.moments[0], 1.0);
        assert!(h.moments[1..].iter().all(|&m| m == 0.0));
        assert!(empirical_spectrum(&[], 5, 0).is_err());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 2000;
        let xs: Vec<f64> = (0..n)
            .map(|i| {
                let q = (i as f64 + 0.5) / n as f64;
                // Invert the CDF by bisection.
                let (mut lo, mut hi) = (-2.0, 2.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if semicircle_cdf(mid, 2.0) < q { lo = mid } else { hi = mid }
                }
                lo
            })
            .collect();
        assert!(ks_distance_semicircle(&xs, 2.0) < 1e-3);
        assert!(ks_distance_semicircle(&vec![0.0; 10], 2.0) > 0.49);
    }

    #[test]
    fn constant_profile_limit_is_catalan() {
        for c in [1.0, 2.5] {
            let m = limit_moments_band(&VarianceProfile::constant(64, c).unwrap(), 8).unwrap();
            for (p, (got, cat)) in m.iter().zip(catalan_moments()).enumerate() {
                assert!((got - cat * c.powi(p as i32 / 2)).abs() < 1e-10, "order {p}");
            }
        }
        assert!(limit_moments_band(&VarianceProfile::constant(64, 1.0).unwrap(), 5).is_err());
    }

    #[test]
    fn low_order_limit_formulas() {
        let sigma = VarianceProfile::from_fn(32, |x, y| (x - y).abs() + x * y).unwrap();
        let m = limit_moments_band(&sigma, 4).unwrap();
        let g = sigma.g();
        let r = sigma.row_integrals();
        let total: f64 = r.iter().sum::<f64>() / g as f64;
        assert!((m[2] - total).abs() < 1e-12);
        let mut m4 = 0.0;
        for a in 0..g {
            let cross: f64 = (0..g).map(|b| sigma.cell(a, b) * r[b]).sum::<f64>() / g as f64;
            m4 += (cross + r[a] * r[a]) / g as f64;
        }
        assert!((m[4] - m4).abs() < 1e-12);
    }

    #[test]
    fn sum_profile_gap_is_twice_the_row_variance() {
        // For σ = x + y the cross term equals the square term on average,
        // so m4 − 2 m2² = 2 Var(r) = 1/6 up to the grid error 1/(6 g²).
        let g = 64;
        let sigma = VarianceProfile::from_fn(g, |x, y| x + y).unwrap();
        let m = limit_moments_band(&sigma, 4).unwrap();
        let gap = m[4] - 2.0 * m[2] * m[2];
        let grid = (1.0 - 1.0 / (g * g) as f64) / 6.0;
        assert!((gap - grid).abs() < 1e-12, "gap {gap}");
        let v = band_semicircle_verdict(&sigma, 8, 1e-9).unwrap();
        assert!(!v.constant_rows && !v.semicircle.pass && v.consistent);
    }

    #[test]
    fn constant_row_profiles_are_semicircular() {
        for sigma in [
            VarianceProfile::constant(64, 1.0).unwrap(),
            VarianceProfile::from_fn(64, |x, y| 1.0 + (x - 0.5) * (y - 0.5)).unwrap(),
            VarianceProfile::from_fn(64, |x, y| 1.0 + (2.0 * std::f64::consts::PI * (x - y)).cos()).unwrap(),
        ] {
            let v = band_semicircle_verdict(&sigma, 8, 1e-9).unwrap();
            assert!(v.constant_rows && v.semicircle.pass && v.consistent, "{:?}", v.semicircle.worst);
        }
    }

    #[test]
    fn small_band_simulation_tracks_the_limit() {
        let sigma = VarianceProfile::from_fn(64, |x, y| 1.0 + (x - 0.5) * (y - 0.5)).unwrap();
        let sim = simulate_band(200, &sigma, 6, 40, 9).unwrap();
        let again = simulate_band(200, &sigma, 6, 40, 9).unwrap();
        assert_eq!(sim.histogram, again.histogram);
        assert!((sim.histogram.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let limit = limit_moments_band(&sigma, 4).unwrap();
        assert!((sim.histogram.moments[2] - limit[2]).abs() < 0.05);
        assert!((sim.histogram.moments[4] - limit[4]).abs() < 0.15);
        assert!(sim.ks_semicircle < 0.1);
    }

    #[test]
    fn haar_blocks_commute_with_d_and_preserve_cyclic_moments() {
        let ctx = haar_context(3, 5).unwrap();
        let mut rng = stream(4, TAG_HAAR, 0);
        let u = block_haar(3, 5, &mut rng);
        assert!(linalg::max_abs(&(&u * u.adjoint() - ctx.identity())) < 1e-12);
        for p in ctx.basis(Target::D) {
            assert_eq!(linalg::max_abs(&linalg::commutator(&u, &p)), 0.0);
        }
        let x = coupled_model(&ctx, &linalg::random_hermitian(3, &mut rng), &mut rng);
        let y = &u * &x * u.adjoint();
        for (a, b) in cyclic_moments(&x, 3, 5, 4).iter().zip(cyclic_moments(&y, 3, 5, 4)) {
            assert!((a - b).norm() < 1e-12);
        }
        // D-valued moments follow.
        let (mut px, mut py) = (ctx.identity(), ctx.identity());
        for _ in 0..3 {
            px *= &x;
            py *= &y;
            assert!(linalg::max_abs(&(ctx.cond_exp_d(&px) - ctx.cond_exp_d(&py))) < 1e-12);
        }
    }

    #[test]
    fn haar_experiment_small() {
        let cfg = HaarConfig { d: 2, ks: vec![2, 8, 24], trials: 60, powers: vec![1, 2], cumulant_trials: 3, cumulant_order: 2, seed: 3 };
        let b = Mat::from_row_slice(2, 2, &[linalg::c(1.0, 0.0), linalg::c(0.5, 0.0), linalg::c(0.5, 0.0), linalg::c(-1.0, 0.0)]);
        let rep = haar_conjugation_experiment(&cfg, &b).unwrap();
        assert!(rep.pass_invariance);
        assert!(rep.powers_decreasing, "{:?}", rep.levels.iter().map(|l| &l.power_norms).collect::<Vec<_>>());
        assert!(rep.cumulants_decreasing);
        assert!(rep.levels.iter().all(|l| l.mixed_cumulant_after < l.mixed_cumulant_before));
    }
}
