//! Conjugate variables, free Fisher information and the operator-valued
//! liberation gradient.
//!
//! Everything here verifies candidates against the defining linear
//! equations. The least-squares solvers restrict those equations to a
//! finite span of words `b_0 x_{i_1} b_1 ⋯ x_{i_k} b_k`, which is exact for
//! models whose solution lies in that span.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{SubalgebraSpec, Target};
use crate::cumulants::{absorb_coefficients, CumulantEngine};
use crate::error::{invalid, Error, Result};
use crate::fock::index_tuples;
use crate::freeness::{ProbeConfig, ResidualFamily};
use crate::linalg::{self, Mat};
use crate::rng::{stream, TAG_LIBERATION};
use crate::space::{project, random_coefficient, residual_norm, NcSpace};

/// Cap on exhaustively swept coefficient/index combinations per shape.
const SWEEP_CAP: usize = 1024;

/// Singular values below this are discarded by the least-squares oracle.
pub const PINV_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub test: String,
    pub max_m: usize,
    pub tol: f64,
    pub seed: u64,
    pub families: Vec<ResidualFamily>,
    pub worst: f64,
    pub pass: bool,
}

impl ResidualReport {
    fn new(test: &str, cfg: &ProbeConfig, families: Vec<ResidualFamily>) -> Self {
        let worst = families.iter().filter(|f| f.asserted).map(|f| f.worst).fold(0.0, f64::max);
        ResidualReport {
            test: test.into(),
            max_m: cfg.max_order,
            tol: cfg.tol,
            seed: cfg.seed,
            pass: worst <= cfg.tol,
            families,
            worst,
        }
    }

    pub fn family(&self, name: &str) -> Option<&ResidualFamily> {
        self.families.iter().find(|f| f.name == name)
    }
}

/// Inclusion order `ℂ ⊂ D ⊂ B`.
fn rank(t: Target) -> u8 {
    match t {
        Target::Scalar => 0,
        Target::D => 1,
        Target::B => 2,
    }
}

/// A basis of the target algebra inside `M_d`.
pub fn coefficient_basis(spec: &SubalgebraSpec, target: Target) -> Vec<Mat> {
    let d = spec.d();
    match target {
        Target::Scalar => vec![linalg::identity(d)],
        Target::D => spec.basis(),
        Target::B => (0..d).flat_map(|i| (0..d).map(move |j| linalg::unit(d, i, j))).collect(),
    }
}

/// `‖a‖_2 = τ(a* a)^{1/2}`.
pub fn l2_norm<S: NcSpace>(space: &S, a: &S::Elem) -> Result<f64> {
    Ok(space.tau(&space.mul(&space.adjoint(a), a))?.re.max(0.0).sqrt())
}

/// Candidate conjugate variables `J_1, ..., J_n`, checked self-adjoint.
#[derive(Debug, Clone)]
pub struct ConjugateCandidate<E> {
    pub js: Vec<E>,
    /// Algebra the candidate claims to be conjugate with respect to.
    pub scope: Target,
}

impl<E: Clone> ConjugateCandidate<E> {
    pub fn new<S: NcSpace<Elem = E>>(space: &S, js: Vec<E>, scope: Target, tol: f64) -> Result<Self> {
        for j in &js {
            let dist = l2_norm(space, &space.sub(j, &space.adjoint(j)))?;
            if dist > tol * (1.0 + l2_norm(space, j)?) {
                return Err(Error::NotSelfAdjoint(dist));
            }
        }
        Ok(ConjugateCandidate { js, scope })
    }
}

/// `Φ* = Σ τ(J_i²)`.
pub fn fisher_info<S: NcSpace>(space: &S, cand: &ConjugateCandidate<S::Elem>) -> Result<f64> {
    let mut total = 0.0;
    for j in &cand.js {
        total += space.tau(&space.mul(j, j))?.re;
    }
    Ok(total)
}

/// Coefficient tuples for one equation shape: an exhaustive basis sweep when
/// it is small, then `draws` Gaussian draws.
fn coefficient_tuples<R: Rng + ?Sized>(
    spec: &SubalgebraSpec,
    target: Target,
    slots: usize,
    draws: usize,
    rng: &mut R,
) -> Vec<Vec<Mat>> {
    let basis = coefficient_basis(spec, target);
    let mut out = Vec::new();
    let combos = basis.len().checked_pow(slots as u32).unwrap_or(usize::MAX);
    if combos <= SWEEP_CAP {
        for code in 0..combos {
            let mut c = code;
            out.push(
                (0..slots)
                    .map(|_| {
                        let b = basis[c % basis.len()].clone();
                        c /= basis.len();
                        b
                    })
                    .collect(),
            );
        }
    }
    for _ in 0..draws {
        out.push((0..slots).map(|_| random_coefficient(spec, target, rng)).collect());
    }
    out
}

/// `b_1 x_{1} b_2 ⋯ x_{m} b_{m+1}` as an element.
fn interleave<S: NcSpace>(space: &S, xs: &[&S::Elem], bs: &[Mat]) -> S::Elem {
    let mut acc = space.from_b(&bs[0]);
    for (x, b) in xs.iter().zip(&bs[1..]) {
        acc = space.mul(&space.mul(&acc, x), &space.from_b(b));
    }
    acc
}

/// Check `τ(J_i b_1 X_{i_1} ⋯ b_m X_{i_m} b_{m+1}) =
/// Σ_r δ_{i i_r} τ(b_1 X_{i_1} ⋯ b_r) τ(b_{r+1} ⋯ b_{m+1})` for `m ≤ max_m`
/// with coefficients from the candidate's scope.
pub fn verify_conjugate<S: NcSpace>(
    space: &S,
    xs: &[S::Elem],
    cand: &ConjugateCandidate<S::Elem>,
    cfg: &ProbeConfig,
) -> Result<ResidualReport> {
    if xs.is_empty() || xs.len() != cand.js.len() {
        return Err(Error::ArityMismatch { expected: xs.len(), got: cand.js.len() });
    }
    let n = xs.len();
    let spec = space.spec();
    let mut rng = stream(cfg.seed, TAG_LIBERATION, 1);
    let mut fam = ResidualFamily::new("conjugate relations", true);
    for m in 0..=cfg.max_order {
        let tuples: Vec<Vec<usize>> = if m == 0 { vec![vec![]] } else { index_tuples(n, m).into_iter().filter(|t| t.len() == m).collect() };
        for idx in &tuples {
            let vars: Vec<&S::Elem> = idx.iter().map(|&i| &xs[i]).collect();
            for bs in coefficient_tuples(spec, cand.scope, m + 1, cfg.draws, &mut rng) {
                let w = interleave(space, &vars, &bs);
                for (i, j) in cand.js.iter().enumerate() {
                    let lhs = space.tau(&space.mul(j, &w))?;
                    let mut rhs = linalg::ZERO;
                    for r in 0..m {
                        if idx[r] == i {
                            let left = interleave(space, &vars[..r], &bs[..=r]);
                            let right = interleave(space, &vars[r + 1..], &bs[r + 1..]);
                            rhs += space.tau(&left)? * space.tau(&right)?;
                        }
                    }
                    let mut key = vec![i];
                    key.extend_from_slice(idx);
                    fam.record(m, &key, 0, (lhs - rhs).norm());
                }
            }
        }
    }
    Ok(ResidualReport::new("conjugate", cfg, vec![fam]))
}

/// The `D`-cumulant form of the conjugate relations:
/// `κ^D(J_i) = 0`, `κ^D(J_i, d a) = δ_{a X_i} τ(d)`, and
/// `κ^D(J_i, d_1 a_1, ..., d_m a_m) = 0` for `m ≥ 2`, with `a` ranging over
/// the variables and a basis of the scope algebra. `target` plays the role
/// of `D` and must lie inside the scope.
pub fn verify_conjugate_cumulant_form<S: NcSpace>(
    space: &S,
    xs: &[S::Elem],
    cand: &ConjugateCandidate<S::Elem>,
    target: Target,
    cfg: &ProbeConfig,
) -> Result<ResidualReport> {
    if xs.is_empty() || xs.len() != cand.js.len() {
        return Err(Error::ArityMismatch { expected: xs.len(), got: cand.js.len() });
    }
    if rank(target) > rank(cand.scope) {
        return invalid(format!("cumulants over {target:?} need {target:?} inside the scope {:?}", cand.scope));
    }
    let spec = space.spec();
    let d = spec.d();
    let engine = CumulantEngine::new(space, target).with_max_order((cfg.max_order + 1).max(2));
    // Probe arguments: variables first, then the scope basis.
    let mut probes: Vec<S::Elem> = xs.to_vec();
    probes.extend(coefficient_basis(spec, cand.scope).iter().map(|b| space.from_b(b)));
    let mut rng = stream(cfg.seed, TAG_LIBERATION, 2);
    let mut f0 = ResidualFamily::new("k(J)", true);
    let mut f1 = ResidualFamily::new("k(J, d a) - delta tau(d)", true);
    let mut f2 = ResidualFamily::new("k(J, d_1 a_1, ...)", true);
    for (i, j) in cand.js.iter().enumerate() {
        f0.record(0, &[i], 0, residual_norm(target, &engine.cumulant(std::slice::from_ref(j))?));
        for (p, a) in probes.iter().enumerate() {
            for (draw, ds) in coefficient_tuples(spec, target, 1, cfg.draws, &mut rng).iter().enumerate() {
                let k = engine.cumulant(&[j.clone(), space.mul(&space.from_b(&ds[0]), a)])?;
                let want = if p == i { linalg::scalar(d, ds[0].trace() / d as f64) } else { linalg::zeros(d) };
                f1.record(1, &[i, p], draw, residual_norm(target, &(k - want)));
            }
        }
        for m in 2..=cfg.max_order {
            let mut tuples: Vec<Vec<usize>> = index_tuples(probes.len(), m).into_iter().filter(|t| t.len() == m).collect();
            if tuples.len() > SWEEP_CAP {
                tuples = (0..SWEEP_CAP).map(|_| (0..m).map(|_| rng.random_range(0..probes.len())).collect()).collect();
            }
            for t in &tuples {
                let draws = cfg.draws.min(4).max(1);
                for draw in 0..draws {
                    let mut args = vec![j.clone()];
                    for &p in t {
                        args.push(space.mul(&space.from_b(&random_coefficient(spec, target, &mut rng)), &probes[p]));
                    }
                    let mut key = vec![i];
                    key.extend_from_slice(t);
                    f2.record(m, &key, draw, residual_norm(target, &engine.cumulant(&args)?));
                }
            }
        }
    }
    Ok(ResidualReport::new("conjugate cumulant form", cfg, vec![f0, f1, f2]))
}

/// Membership label of a letter in a liberation word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    A1,
    A2,
}

impl Side {
    pub fn swap(self) -> Side {
        match self {
            Side::A1 => Side::A2,
            Side::A2 => Side::A1,
        }
    }
}

/// `E ⊗ E(δ_{A_1:A_2}(a_1 ⋯ a_L))
///  = Σ_{t: a_t ∈ A_1} E(a_1 ⋯ a_t) E(a_{t+1} ⋯ a_L) − E(a_1 ⋯ a_{t−1}) E(a_t ⋯ a_L)`.
pub fn gradient_functional<S: NcSpace>(space: &S, target: Target, word: &[(S::Elem, Side)]) -> Result<Mat> {
    let letters: Vec<S::Elem> = word.iter().map(|(a, _)| a.clone()).collect();
    let e = |lo: usize, hi: usize| -> Result<Mat> {
        if lo >= hi {
            return Ok(linalg::identity(space.d()));
        }
        space.expect(target, &space.product(&letters[lo..hi]))
    };
    let l = word.len();
    let mut acc = linalg::zeros(space.d());
    for (t, (_, side)) in word.iter().enumerate() {
        if *side == Side::A1 {
            acc += e(0, t + 1)? * e(t + 1, l)? - e(0, t)? * e(t, l)?;
        }
    }
    Ok(acc)
}

fn swapped<E: Clone>(word: &[(E, Side)]) -> Vec<(E, Side)> {
    word.iter().map(|(a, s)| (a.clone(), s.swap())).collect()
}

/// Verify a liberation gradient candidate `j` for `(A_1 : A_2)` over
/// `target`, given generators of each algebra (the target algebra is taken
/// to lie in both).
///
/// Families: `E(j) = 0`; the alternating relations
/// `E(j c_1 c̃_1 ⋯ c_m c̃_m) = E ⊗ E(δ(c_1 ⋯ c̃_m))`; antisymmetry of the
/// functional under `A_1 ↔ A_2`; and the cumulant rules
/// `κ(j, a_1, ..., a_m) ∈ {0, −κ(a_1, ..., a_m), +κ(a_1, ..., a_m)}` by the
/// membership of `a_1`, `a_m`.
pub fn verify_liberation_gradient<S: NcSpace>(
    space: &S,
    j: &S::Elem,
    a1: &[S::Elem],
    a2: &[S::Elem],
    target: Target,
    cfg: &ProbeConfig,
) -> Result<ResidualReport> {
    if a1.is_empty() || a2.is_empty() {
        return invalid("both generator lists must be nonempty");
    }
    let spec = space.spec();
    let mut rng = stream(cfg.seed, TAG_LIBERATION, 3);
    let mut f_mean = ResidualFamily::new("E(j)", true);
    let mut f_rel = ResidualFamily::new("gradient relations", true);
    let mut f_anti = ResidualFamily::new("antisymmetry", true);
    let mut f_sign = ResidualFamily::new("cumulant sign rules", true);
    f_mean.record(0, &[], 0, residual_norm(target, &space.expect(target, j)?));

    for m in 1..=cfg.max_order {
        let combos = (a1.len() * a2.len()).checked_pow(m as u32).unwrap_or(usize::MAX);
        let draws = cfg.draws.max(1);
        let shapes: Vec<Vec<usize>> = if combos.saturating_mul(draws) <= 2 * SWEEP_CAP {
            (0..combos)
                .map(|code| {
                    let mut c = code;
                    (0..2 * m)
                        .map(|t| {
                            let len = if t % 2 == 0 { a1.len() } else { a2.len() };
                            let v = c % len;
                            c /= len;
                            v
                        })
                        .collect()
                })
                .collect()
        } else {
            (0..2 * SWEEP_CAP / draws)
                .map(|_| (0..2 * m).map(|t| rng.random_range(0..if t % 2 == 0 { a1.len() } else { a2.len() })).collect())
                .collect()
        };
        for shape in &shapes {
            for draw in 0..draws {
                let mut word = Vec::with_capacity(2 * m);
                for (t, &g) in shape.iter().enumerate() {
                    let coeff = space.from_b(&random_coefficient(spec, target, &mut rng));
                    if t % 2 == 0 {
                        word.push((space.mul(&a1[g], &coeff), Side::A1));
                    } else {
                        word.push((space.mul(&a2[g], &coeff), Side::A2));
                    }
                }
                let letters: Vec<S::Elem> = word.iter().map(|(a, _)| a.clone()).collect();
                let lhs = space.expect(target, &space.mul(j, &space.product(&letters)))?;
                let rhs = gradient_functional(space, target, &word)?;
                f_rel.record(m, shape, draw, residual_norm(target, &(&lhs - &rhs)));
                let back = gradient_functional(space, target, &swapped(&word))?;
                f_anti.record(m, shape, draw, residual_norm(target, &(rhs + back)));
            }
        }
    }

    let engine = CumulantEngine::new(space, target).with_max_order((cfg.max_order + 1).max(2));
    let gens: Vec<(S::Elem, Side)> =
        a1.iter().map(|a| (a.clone(), Side::A1)).chain(a2.iter().map(|a| (a.clone(), Side::A2))).collect();
    f_sign.record(0, &[], 0, residual_norm(target, &engine.cumulant(std::slice::from_ref(j))?));
    for m in 1..=cfg.max_order {
        let mut tuples: Vec<Vec<usize>> = index_tuples(gens.len(), m).into_iter().filter(|t| t.len() == m).collect();
        if tuples.len() > SWEEP_CAP {
            tuples = (0..SWEEP_CAP).map(|_| (0..m).map(|_| rng.random_range(0..gens.len())).collect()).collect();
        }
        for t in &tuples {
            let coeffs: Vec<Mat> = (1..m).map(|_| random_coefficient(spec, target, &mut rng)).collect();
            let vars: Vec<S::Elem> = t.iter().map(|&g| gens[g].0.clone()).collect();
            let args = absorb_coefficients(space, &vars, &coeffs);
            let mut with_j = vec![j.clone()];
            with_j.extend(args.iter().cloned());
            let kj = engine.cumulant(&with_j)?;
            let first = gens[t[0]].1;
            let last = gens[t[m - 1]].1;
            let want = match (first, last) {
                (Side::A1, Side::A2) => -engine.cumulant(&args)?,
                (Side::A2, Side::A1) => engine.cumulant(&args)?,
                _ => linalg::zeros(space.d()),
            };
            f_sign.record(m, t, 0, residual_norm(target, &(kj - want)));
        }
    }
    Ok(ResidualReport::new("liberation gradient", cfg, vec![f_mean, f_rel, f_anti, f_sign]))
}

/// `E_{D'}(Σ_i [J_i, X_i]) · c^{-1} · dim(D)`.
pub fn commutator_projection<S: NcSpace>(space: &S, xs: &[S::Elem], cand: &ConjugateCandidate<S::Elem>) -> Result<S::Elem> {
    if xs.len() != cand.js.len() {
        return Err(Error::ArityMismatch { expected: xs.len(), got: cand.js.len() });
    }
    let mut sum = space.zero();
    for (x, j) in xs.iter().zip(&cand.js) {
        sum = space.add(&sum, &space.sub(&space.mul(j, x), &space.mul(x, j)));
    }
    let spec = space.spec();
    let scale = spec.central_element_c_inv()? * Complex64::new(spec.dim() as f64, 0.0);
    Ok(space.mul(&space.commutant_average(&sum), &space.from_b(&scale)))
}

/// A word `b_0 x_{i_1} b_1 ⋯ x_{i_k} b_k` of the least-squares span.
#[derive(Debug, Clone)]
pub struct SpanWord<E> {
    pub vars: Vec<usize>,
    pub coeffs: Vec<Mat>,
    pub elem: E,
}

/// All words with `k ≤ max_deg` variables and coefficients from `basis`.
pub fn word_span<S: NcSpace>(space: &S, xs: &[S::Elem], basis: &[Mat], max_deg: usize) -> Vec<SpanWord<S::Elem>> {
    let mut out = Vec::new();
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    tuples.extend(index_tuples(xs.len(), max_deg));
    for vars in tuples {
        let slots = vars.len() + 1;
        let combos = basis.len().pow(slots as u32);
        for code in 0..combos {
            let mut c = code;
            let coeffs: Vec<Mat> = (0..slots)
                .map(|_| {
                    let b = basis[c % basis.len()].clone();
                    c /= basis.len();
                    b
                })
                .collect();
            let refs: Vec<&S::Elem> = vars.iter().map(|&i| &xs[i]).collect();
            let elem = interleave(space, &refs, &coeffs);
            out.push(SpanWord { vars: vars.clone(), coeffs, elem });
        }
    }
    out
}

/// Solve `τ(v w) = φ(w)` for all `w` in the span, `v` in the span.
fn solve_in_span<S: NcSpace>(space: &S, span: &[SpanWord<S::Elem>], rhs: &[Complex64]) -> Result<S::Elem> {
    let n = span.len();
    let mut gram = Mat::zeros(n, n);
    for b in 0..n {
        for a in 0..n {
            gram[(b, a)] = space.tau(&space.mul(&span[a].elem, &span[b].elem))?;
        }
    }
    let alpha = linalg::pinv_solve(&gram, &DVector::from_column_slice(rhs), PINV_CUTOFF);
    let mut v = space.zero();
    for (a, w) in span.iter().enumerate() {
        if alpha[a].norm() > 0.0 {
            v = space.add(&v, &space.scale(&w.elem, alpha[a]));
        }
    }
    Ok(v)
}

/// Least-squares conjugate variables with respect to `scope`, in the span
/// of words of degree `≤ max_deg` with scope-basis coefficients.
pub fn solve_conjugate<S: NcSpace>(space: &S, xs: &[S::Elem], scope: Target, max_deg: usize) -> Result<Vec<S::Elem>> {
    let basis = coefficient_basis(space.spec(), scope);
    let span = word_span(space, xs, &basis, max_deg);
    let mut out = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        let mut rhs = Vec::with_capacity(span.len());
        for w in &span {
            let refs: Vec<&S::Elem> = w.vars.iter().map(|&v| &xs[v]).collect();
            let mut y = linalg::ZERO;
            for r in 0..w.vars.len() {
                if w.vars[r] == i {
                    let left = interleave(space, &refs[..r], &w.coeffs[..=r]);
                    let right = interleave(space, &refs[r + 1..], &w.coeffs[r + 1..]);
                    y += space.tau(&left)? * space.tau(&right)?;
                }
            }
            rhs.push(y);
        }
        out.push(solve_in_span(space, &span, &rhs)?);
    }
    Ok(out)
}

/// Least-squares liberation gradient of `(target⟨xs⟩ : B)` over `target`,
/// with `B` represented by the coefficient basis of `M_d`.
pub fn solve_liberation_gradient<S: NcSpace>(space: &S, xs: &[S::Elem], target: Target, max_deg: usize) -> Result<S::Elem> {
    let basis = coefficient_basis(space.spec(), Target::B);
    let span = word_span(space, xs, &basis, max_deg);
    let mut rhs = Vec::with_capacity(span.len());
    for w in &span {
        let mut word = vec![(space.from_b(&w.coeffs[0]), Side::A2)];
        for (t, &v) in w.vars.iter().enumerate() {
            word.push((xs[v].clone(), Side::A1));
            word.push((space.from_b(&w.coeffs[t + 1]), Side::A2));
        }
        let phi = gradient_functional(space, target, &word)?;
        rhs.push(phi.trace() / space.d() as f64);
    }
    solve_in_span(space, &span, &rhs)
}

/// Largest `|τ(j b w) − τ(j w b)|` over `b` in a basis of `target` and `w`
/// in the word span: a gradient over `target` lies in its relative commutant.
pub fn commutant_defect<S: NcSpace>(space: &S, j: &S::Elem, xs: &[S::Elem], target: Target, max_deg: usize) -> Result<f64> {
    let span = word_span(space, xs, &coefficient_basis(space.spec(), Target::B), max_deg);
    let mut worst: f64 = 0.0;
    for w in &span {
        for b in &coefficient_basis(space.spec(), target) {
            let bb = space.from_b(b);
            let l = space.tau(&space.mul(&space.mul(j, &bb), &w.elem))?;
            let r = space.tau(&space.mul(&space.mul(j, &w.elem), &bb))?;
            worst = worst.max((l - r).norm());
        }
    }
    Ok(worst)
}

/// `τ`-traciality moved to the cumulant level: `τ(κ^D(m_1, ..., m_r))`
/// is invariant under cyclic rotation of the arguments.
pub fn cyclic_defect<S: NcSpace>(space: &S, target: Target, args: &[S::Elem]) -> Result<f64> {
    let engine = CumulantEngine::new(space, target).with_max_order(args.len().max(2));
    let base = engine.cumulant(args)?.trace();
    let mut worst: f64 = 0.0;
    let mut rotated = args.to_vec();
    for _ in 1..args.len() {
        rotated.rotate_left(1);
        worst = worst.max((engine.cumulant(&rotated)?.trace() - base).norm() / space.d() as f64);
    }
    Ok(worst)
}

/// Projection of a `B`-value onto `target`; re-exported for callers that
/// evaluate functionals by hand.
pub fn project_value(spec: &SubalgebraSpec, target: Target, b: &Mat) -> Mat {
    project(spec, target, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockPoly, FockSpace, TableSeries};
    use crate::linalg::{max_abs, unit};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// `η(b) = Σ V_ij e_ij b e_ji` over `M_2`.
    fn hadamard(v: [[f64; 2]; 2], spec: SubalgebraSpec) -> FockSpace<TableSeries> {
        let mut terms = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                terms.push((unit(2, i, j) * re(v[i][j]), unit(2, j, i)));
            }
        }
        FockSpace::new(TableSeries::semicircular(spec, &[terms], 8).unwrap())
    }

    fn hadamard_conjugate(sp: &FockSpace<TableSeries>, v: [[f64; 2]; 2]) -> FockPoly {
        let x = sp.var(0);
        let mut j = sp.zero();
        for i in 0..2 {
            for k in 0..2 {
                let t = sp.mul(&sp.mul(&sp.from_b(&unit(2, i, i)), &x), &sp.from_b(&unit(2, k, k)));
                j = sp.add(&j, &sp.scale(&t, re(1.0 / (2.0 * v[i][k]))));
            }
        }
        j
    }

    /// `s` with `η(b) = τ(b) 1` over `M_2`.
    fn flat(spec: SubalgebraSpec) -> FockSpace<TableSeries> {
        let mut terms = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                terms.push((unit(2, i, j) * re(0.5), unit(2, j, i)));
            }
        }
        FockSpace::new(TableSeries::semicircular(spec, &[terms], 8).unwrap())
    }

    fn b0() -> Mat {
        let mut b = linalg::zeros(2);
        b[(0, 0)] = re(1.0);
        b[(0, 1)] = Complex64::new(0.5, 0.25);
        b[(1, 0)] = Complex64::new(0.5, -0.25);
        b[(1, 1)] = re(-0.5);
        b
    }

    fn cfg(max_order: usize, tol: f64) -> ProbeConfig {
        ProbeConfig { max_order, tol, draws: 3, seed: 5 }
    }

    fn l2_dist<S: NcSpace>(sp: &S, a: &S::Elem, b: &S::Elem) -> f64 {
        l2_norm(sp, &sp.sub(a, b)).unwrap()
    }

    const V: [[f64; 2]; 2] = [[1.0, 0.5], [0.5, 2.0]];

    #[test]
    fn hadamard_conjugate_and_fisher() {
        let sp = hadamard(V, SubalgebraSpec::diagonal(2));
        let x = sp.var(0);
        let j = hadamard_conjugate(&sp, V);
        let cand = ConjugateCandidate::new(&sp, vec![j.clone()], Target::B, 1e-12).unwrap();
        let rep = verify_conjugate(&sp, std::slice::from_ref(&x), &cand, &cfg(3, 1e-10)).unwrap();
        assert!(rep.pass, "worst {}", rep.worst);
        let want: f64 = V.iter().flatten().map(|v| 1.0 / (8.0 * v)).sum();
        assert!((fisher_info(&sp, &cand).unwrap() - want).abs() < 1e-12);

        let solved = solve_conjugate(&sp, std::slice::from_ref(&x), Target::B, 1).unwrap();
        assert!(l2_dist(&sp, &solved[0], &j) < 1e-6);

        // Free over the diagonal, so the same variable is conjugate over D.
        let cand_d = ConjugateCandidate::new(&sp, vec![j.clone()], Target::D, 1e-12).unwrap();
        assert!(verify_conjugate(&sp, std::slice::from_ref(&x), &cand_d, &cfg(3, 1e-10)).unwrap().pass);
        let proj = commutator_projection(&sp, std::slice::from_ref(&x), &cand).unwrap();
        assert!(l2_norm(&sp, &proj).unwrap() < 1e-10);
    }

    #[test]
    fn cumulant_form_matches() {
        let sp = hadamard(V, SubalgebraSpec::diagonal(2));
        let x = sp.var(0);
        let cand = ConjugateCandidate::new(&sp, vec![hadamard_conjugate(&sp, V)], Target::B, 1e-12).unwrap();
        for target in [Target::D, Target::B] {
            let rep = verify_conjugate_cumulant_form(&sp, std::slice::from_ref(&x), &cand, target, &cfg(3, 1e-10)).unwrap();
            assert!(rep.pass, "{target:?}: worst {}", rep.worst);
        }
        let wrong = ConjugateCandidate::new(&sp, vec![sp.scale(&x, re(0.7))], Target::B, 1e-12).unwrap();
        let rep = verify_conjugate_cumulant_form(&sp, std::slice::from_ref(&x), &wrong, Target::B, &cfg(2, 1e-10)).unwrap();
        assert!(!rep.pass);
        assert!(!verify_conjugate(&sp, std::slice::from_ref(&x), &wrong, &cfg(2, 1e-10)).unwrap().pass);
    }

    #[test]
    fn scalar_conjugate_of_balanced_hadamard() {
        let (a, b) = (1.0, 0.5);
        let v = [[a * a, b * b], [b * b, a * a]];
        let sp = hadamard(v, SubalgebraSpec::diagonal(2));
        let x = sp.var(0);
        let var = a * a + b * b;
        let solved = solve_conjugate(&sp, std::slice::from_ref(&x), Target::Scalar, 3).unwrap();
        assert!(l2_dist(&sp, &solved[0], &sp.scale(&x, re(1.0 / var))) < 1e-6);
        let cand = ConjugateCandidate::new(&sp, solved, Target::Scalar, 1e-8).unwrap();
        let phi = fisher_info(&sp, &cand).unwrap();
        assert!((phi - 1.0 / var).abs() < 1e-8);
        // Conditioning on more can only raise the information.
        let phi_b: f64 = v.iter().flatten().map(|w| 1.0 / (8.0 * w)).sum();
        assert!(phi <= phi_b + 1e-12);
        assert!(phi_b <= 0.25 * (1.0 / (a * a) + 1.0 / (b * b)) + 1e-12);
    }

    #[test]
    fn coupled_model_commutator() {
        for (spec, nonzero) in [(SubalgebraSpec::diagonal(2), true), (SubalgebraSpec::full(2), false)] {
            let sp = flat(spec);
            let s = sp.var(0);
            let x = sp.add(&s, &sp.from_b(&b0()));
            let cand = ConjugateCandidate::new(&sp, vec![s.clone()], Target::B, 1e-12).unwrap();
            assert!(verify_conjugate(&sp, std::slice::from_ref(&x), &cand, &cfg(3, 1e-10)).unwrap().pass);
            assert!((fisher_info(&sp, &cand).unwrap() - 1.0).abs() < 1e-12);
            let size = l2_norm(&sp, &commutator_projection(&sp, std::slice::from_ref(&x), &cand).unwrap()).unwrap();
            assert_eq!(size > 1e-3, nonzero, "projection size {size}");
        }
    }

    #[test]
    fn liberation_gradient_of_coupled_model() {
        let sp = flat(SubalgebraSpec::scalars(2));
        let s = sp.var(0);
        let x = sp.add(&s, &sp.from_b(&b0()));
        let xs = std::slice::from_ref(&x);
        let j = solve_liberation_gradient(&sp, xs, Target::Scalar, 2).unwrap();
        // The commutator of the conjugate variable with X.
        let comm = sp.sub(&sp.mul(&s, &x), &sp.mul(&x, &s));
        assert!(l2_dist(&sp, &j, &comm) < 1e-6, "distance {}", l2_dist(&sp, &j, &comm));
        let gens: Vec<FockPoly> = coefficient_basis(sp.spec(), Target::B).iter().map(|b| sp.from_b(b)).collect();
        let rep = verify_liberation_gradient(&sp, &j, xs, &gens, Target::Scalar, &cfg(2, 1e-9)).unwrap();
        assert!(rep.pass, "{:?}", rep.families.iter().map(|f| (&f.name, f.worst)).collect::<Vec<_>>());

        let bad = sp.scale(&comm, re(1.1));
        assert!(!verify_liberation_gradient(&sp, &bad, xs, &gens, Target::Scalar, &cfg(2, 1e-9)).unwrap().pass);
    }

    #[test]
    fn commutator_projection_is_the_d_valued_gradient() {
        let sp = flat(SubalgebraSpec::diagonal(2));
        let s = sp.var(0);
        let x = sp.add(&s, &sp.from_b(&b0()));
        let xs = std::slice::from_ref(&x);
        let cand = ConjugateCandidate::new(&sp, vec![s], Target::B, 1e-12).unwrap();
        let j = commutator_projection(&sp, xs, &cand).unwrap();
        assert!(commutant_defect(&sp, &j, xs, Target::D, 2).unwrap() < 1e-10);
        let gens: Vec<FockPoly> = coefficient_basis(sp.spec(), Target::B).iter().map(|b| sp.from_b(b)).collect();
        let rep = verify_liberation_gradient(&sp, &j, xs, &gens, Target::D, &cfg(2, 1e-9)).unwrap();
        assert!(rep.pass, "{:?}", rep.families.iter().map(|f| (&f.name, f.worst)).collect::<Vec<_>>());
        // The solved gradient agrees with the projection.
        let solved = solve_liberation_gradient(&sp, xs, Target::D, 2).unwrap();
        // `‖·‖₂` of a difference is a square root of a cancelling sum, so
        // it resolves only to about 1e-8.
        assert!(l2_dist(&sp, &solved, &j) < 1e-6);
    }

    #[test]
    fn gradient_functional_is_antisymmetric() {
        let sp = hadamard(V, SubalgebraSpec::diagonal(2));
        let x = sp.var(0);
        let mut rng = stream(8, 0, 0);
        let word: Vec<(FockPoly, Side)> = (0..5)
            .map(|t| {
                let b = sp.from_b(&linalg::ginibre(2, &mut rng));
                if t % 2 == 0 { (sp.mul(&x, &b), Side::A1) } else { (b, Side::A2) }
            })
            .collect();
        for target in [Target::Scalar, Target::D, Target::B] {
            let f = gradient_functional(&sp, target, &word).unwrap();
            let g = gradient_functional(&sp, target, &swapped(&word)).unwrap();
            assert!(max_abs(&(f + g)) < 1e-10);
        }
    }

    #[test]
    fn cumulants_are_cyclic_under_trace() {
        let sp = hadamard(V, SubalgebraSpec::diagonal(2));
        let x = sp.var(0);
        let mut rng = stream(9, 0, 0);
        let args: Vec<FockPoly> =
            (0..4).map(|_| sp.mul(&x, &sp.from_b(&sp.spec().random(&mut rng)))).collect();
        assert!(cyclic_defect(&sp, Target::D, &args).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let sp = flat(SubalgebraSpec::scalars(2));
        let j = sp.mul(&sp.var(0), &sp.from_b(&unit(2, 0, 1)));
        assert!(matches!(ConjugateCandidate::new(&sp, vec![j], Target::B, 1e-9), Err(Error::NotSelfAdjoint(_))));
    }
}
