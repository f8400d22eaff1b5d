//! Finite matrix models `M = M_d ⊗ M_k` with the tower `D ⊂ B = M_d ⊗ 1 ⊂ M`.
//!
//! `ℂ^N = ℂ^d ⊗ ℂ^k` with flat index `i * k + s`. The subalgebra `D` is
//! `⊕_j M_{n_j} ⊗ 1_{q_j}` inside `M_d`, block `j` occupying the consecutive
//! coordinates `offset_j + a * q_j + r` (`a < n_j`, `r < q_j`). The trace is
//! the normalised matrix trace, the only trace on `M_N`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Mat, ONE, ZERO};

/// Default absolute tolerance for algebraic identities.
pub const DEFAULT_TOL: f64 = 1e-10;

/// One summand `M_{n} ⊗ 1_{q}` of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DBlock {
    pub size: usize,
    pub multiplicity: usize,
}

/// `D ≅ M_{n_1} ⊕ ... ⊕ M_{n_r}` embedded block-diagonally in `M_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubalgebraSpec {
    d: usize,
    blocks: Vec<DBlock>,
    offsets: Vec<usize>,
}

impl SubalgebraSpec {
    pub fn new(d: usize, blocks: Vec<DBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return invalid("D needs at least one block");
        }
        if blocks.iter().any(|b| b.size == 0 || b.multiplicity == 0) {
            return invalid("D blocks must have positive size and multiplicity");
        }
        let total: usize = blocks.iter().map(|b| b.size * b.multiplicity).sum();
        if total != d {
            return invalid(format!("D blocks span dimension {total}, expected {d}"));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut o = 0;
        for b in &blocks {
            offsets.push(o);
            o += b.size * b.multiplicity;
        }
        Ok(SubalgebraSpec { d, blocks, offsets })
    }

    /// `D = ℂ·1`.
    pub fn scalars(d: usize) -> Self {
        Self::new(d, vec![DBlock { size: 1, multiplicity: d }]).unwrap()
    }

    /// `D = M_d`, i.e. `D = B`.
    pub fn full(d: usize) -> Self {
        Self::new(d, vec![DBlock { size: d, multiplicity: 1 }]).unwrap()
    }

    /// Diagonal matrices in `M_d`.
    pub fn diagonal(d: usize) -> Self {
        Self::new(d, vec![DBlock { size: 1, multiplicity: 1 }; d]).unwrap()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn blocks(&self) -> &[DBlock] {
        &self.blocks
    }

    /// `dim D = Σ n_j²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.size).sum()
    }

    pub fn is_full(&self) -> bool {
        self.blocks.len() == 1 && self.blocks[0].size == self.d
    }

    fn coord(&self, j: usize, a: usize, r: usize) -> usize {
        self.offsets[j] + a * self.blocks[j].multiplicity + r
    }

    /// Minimal central projections `p_j` as `d × d` matrices.
    pub fn central_projections(&self) -> Vec<Mat> {
        (0..self.blocks.len())
            .map(|j| {
                let mut p = linalg::zeros(self.d);
                let b = self.blocks[j];
                for t in 0..b.size * b.multiplicity {
                    p[(self.offsets[j] + t, self.offsets[j] + t)] = ONE;
                }
                p
            })
            .collect()
    }

    /// Embed block matrices `x_j ∈ M_{n_j}` as `⊕ x_j ⊗ 1_{q_j}`.
    pub fn embed(&self, parts: &[Mat]) -> Mat {
        let mut out = linalg::zeros(self.d);
        for (j, x) in parts.iter().enumerate() {
            let b = self.blocks[j];
            for a in 0..b.size {
                for a2 in 0..b.size {
                    for r in 0..b.multiplicity {
                        out[(self.coord(j, a, r), self.coord(j, a2, r))] = x[(a, a2)];
                    }
                }
            }
        }
        out
    }

    /// Matrix units of `D` (a basis, `dim D` elements).
    pub fn basis(&self) -> Vec<Mat> {
        let mut out = Vec::with_capacity(self.dim());
        for (j, b) in self.blocks.iter().enumerate() {
            for a in 0..b.size {
                for a2 in 0..b.size {
                    let mut parts: Vec<Mat> = self.blocks.iter().map(|bb| linalg::zeros(bb.size)).collect();
                    parts[j][(a, a2)] = ONE;
                    out.push(self.embed(&parts));
                }
            }
        }
        out
    }

    /// Trace-preserving conditional expectation `M_d → D`.
    pub fn project(&self, b: &Mat) -> Mat {
        let mut out = linalg::zeros(self.d);
        for (j, blk) in self.blocks.iter().enumerate() {
            let q = blk.multiplicity as f64;
            for a in 0..blk.size {
                for a2 in 0..blk.size {
                    let mut s = ZERO;
                    for r in 0..blk.multiplicity {
                        s += b[(self.coord(j, a, r), self.coord(j, a2, r))];
                    }
                    let v = s / q;
                    for r in 0..blk.multiplicity {
                        out[(self.coord(j, a, r), self.coord(j, a2, r))] = v;
                    }
                }
            }
        }
        out
    }

    /// `τ(p_j)` for the normalised trace of `M_d`.
    pub fn trace_weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| (b.size * b.multiplicity) as f64 / self.d as f64).collect()
    }

    /// `c = (Σ n_j²) · Σ_j τ(p_j)/n_j² · p_j` in `M_d`.
    pub fn central_element_c(&self) -> Result<Mat> {
        let dim = self.dim() as f64;
        let weights = self.trace_weights();
        let mut c = linalg::zeros(self.d);
        for (j, p) in self.central_projections().iter().enumerate() {
            let w = weights[j];
            if w <= 0.0 {
                return Err(Error::DegenerateTrace(format!("τ(p_{j}) = {w}")));
            }
            let n = self.blocks[j].size as f64;
            c += p.scale(dim * w / (n * n));
        }
        Ok(c)
    }

    /// `c^{-1}`; `c` is diagonal and positive so the inverse is entrywise.
    pub fn central_element_c_inv(&self) -> Result<Mat> {
        let c = self.central_element_c()?;
        let diag: Vec<Complex64> = (0..self.d).map(|i| ONE / c[(i, i)]).collect();
        Ok(Mat::from_diagonal(&DVector::from_vec(diag)))
    }

    /// Block-wise Haar unitary of `D` as a `d × d` matrix.
    pub fn haar<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let parts: Vec<Mat> = self.blocks.iter().map(|b| linalg::haar_unitary(b.size, rng)).collect();
        self.embed(&parts)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let parts: Vec<Mat> = self.blocks.iter().map(|b| linalg::ginibre(b.size, rng)).collect();
        self.embed(&parts)
    }
}

/// Which subalgebra a cumulant or expectation is valued in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Target {
    Scalar,
    D,
    B,
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(Target::B),
            "D" | "d" => Ok(Target::D),
            "C" | "c" | "scalar" => Ok(Target::Scalar),
            other => invalid(format!("unknown target {other:?}; expected B, D or scalar")),
        }
    }
}

/// A matrix model `M_d ⊗ M_k` with `B = M_d ⊗ 1` and `D ⊂ B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraContext {
    d: usize,
    k: usize,
    spec: SubalgebraSpec,
    pub tol: f64,
}

impl AlgebraContext {
    pub fn new(d: usize, k: usize, spec: SubalgebraSpec) -> Result<Self> {
        if d == 0 || k == 0 {
            return invalid("d and k must be positive");
        }
        if spec.d() != d {
            return invalid(format!("D is specified inside M_{} but B = M_{d}", spec.d()));
        }
        Ok(AlgebraContext { d, k, spec, tol: DEFAULT_TOL })
    }

    /// `B = M = M_d` with the given `D`; the base algebra of a Fock model.
    pub fn base(spec: SubalgebraSpec) -> Self {
        let d = spec.d();
        AlgebraContext { d, k: 1, spec, tol: DEFAULT_TOL }
    }

    /// Accept user-supplied trace weights: they must equal the weights
    /// `τ(p_j)` induced by the normalised trace.
    pub fn check_trace_weights(&self, weights: &[f64]) -> Result<()> {
        let want = self.trace_weights();
        if weights.len() != want.len() {
            return invalid(format!("expected {} trace weights (one per D block), got {}", want.len(), weights.len()));
        }
        for (w, t) in weights.iter().zip(&want) {
            if (w - t).abs() > 1e-12 {
                return invalid(format!(
                    "trace weights {weights:?} are not tracial on M_{}; the trace forces {want:?}",
                    self.n()
                ));
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `N = d·k`.
    pub fn n(&self) -> usize {
        self.d * self.k
    }

    pub fn spec(&self) -> &SubalgebraSpec {
        &self.spec
    }

    pub fn check_shape(&self, m: &Mat) -> Result<()> {
        let n = self.n();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn identity(&self) -> Mat {
        linalg::identity(self.n())
    }

    /// Normalised trace `τ`.
    pub fn trace(&self, m: &Mat) -> Complex64 {
        m.trace() / self.n() as f64
    }

    /// `b ↦ b ⊗ 1_k`.
    pub fn embed_b(&self, b: &Mat) -> Mat {
        if self.k == 1 {
            return b.clone();
        }
        linalg::kron(b, &linalg::identity(self.k))
    }

    /// Partial trace over the `k` factor, as a `d × d` matrix.
    pub fn reduce_b(&self, m: &Mat) -> Mat {
        if self.k == 1 {
            return m.clone();
        }
        let k = self.k;
        Mat::from_fn(self.d, self.d, |i, i2| {
            let mut s = ZERO;
            for t in 0..k {
                s += m[(i * k + t, i2 * k + t)];
            }
            s / k as f64
        })
    }

    /// `E_B`: normalised partial trace over `M_k`.
    pub fn cond_exp_b(&self, m: &Mat) -> Mat {
        self.embed_b(&self.reduce_b(m))
    }

    /// `E_D = E_D ∘ E_B`, computed by block compression.
    pub fn cond_exp_d(&self, m: &Mat) -> Mat {
        self.embed_b(&self.spec.project(&self.reduce_b(m)))
    }

    /// `E_{D'}`: orthogonal projection onto the relative commutant
    /// `D' ∩ M = ⊕_j 1_{n_j} ⊗ M_{q_j k}`.
    pub fn cond_exp_commutant(&self, m: &Mat) -> Mat {
        let k = self.k;
        let n = self.n();
        let mut out = linalg::zeros(n);
        for (j, blk) in self.spec.blocks.iter().enumerate() {
            let q = blk.multiplicity;
            let idx = |a: usize, r: usize, s: usize| self.spec.coord(j, a, r) * k + s;
            for r in 0..q {
                for s in 0..k {
                    for r2 in 0..q {
                        for s2 in 0..k {
                            let mut acc = ZERO;
                            for a in 0..blk.size {
                                acc += m[(idx(a, r, s), idx(a, r2, s2))];
                            }
                            let v = acc / blk.size as f64;
                            for a in 0..blk.size {
                                out[(idx(a, r, s), idx(a, r2, s2))] = v;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Expectation onto `target`.
    pub fn expect(&self, target: Target, m: &Mat) -> Mat {
        match target {
            Target::B => self.cond_exp_b(m),
            Target::D => self.cond_exp_d(m),
            Target::Scalar => linalg::scalar(self.n(), self.trace(m)),
        }
    }

    /// `τ(p_j)` for each central projection.
    pub fn trace_weights(&self) -> Vec<f64> {
        self.spec.trace_weights()
    }

    /// `c = (Σ n_j²) · Σ_j τ(p_j)/n_j² · p_j`, embedded in `M`.
    pub fn central_element_c(&self) -> Result<Mat> {
        Ok(self.embed_b(&self.spec.central_element_c()?))
    }

    /// `c^{-1}`, embedded in `M`.
    pub fn central_element_c_inv(&self) -> Result<Mat> {
        Ok(self.embed_b(&self.spec.central_element_c_inv()?))
    }

    /// Haar-distributed unitary of `D`, embedded in `M`.
    pub fn haar_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        self.embed_b(&self.spec.haar(rng))
    }

    /// Random Gaussian element of the target algebra, embedded in `M`.
    pub fn random_in<R: Rng + ?Sized>(&self, target: Target, rng: &mut R) -> Mat {
        match target {
            Target::Scalar => linalg::scalar(self.n(), linalg::complex_gaussian(rng, 1.0)),
            Target::D => self.embed_b(&self.spec.random(rng)),
            Target::B => self.embed_b(&linalg::ginibre(self.d, rng)),
        }
    }

    /// A basis of the target algebra, embedded in `M`.
    pub fn basis(&self, target: Target) -> Vec<Mat> {
        match target {
            Target::Scalar => vec![self.identity()],
            Target::D => self.spec.basis().iter().map(|b| self.embed_b(b)).collect(),
            Target::B => {
                let mut out = Vec::with_capacity(self.d * self.d);
                for i in 0..self.d {
                    for j in 0..self.d {
                        out.push(self.embed_b(&linalg::unit(self.d, i, j)));
                    }
                }
                out
            }
        }
    }

    /// Dimension of the target algebra.
    pub fn target_dim(&self, target: Target) -> usize {
        match target {
            Target::Scalar => 1,
            Target::D => self.spec.dim(),
            Target::B => self.d * self.d,
        }
    }

    /// Frobenius norm of a `B`-valued quantity measured in `M_d`
    /// (`‖b ⊗ 1_k‖_F / √k`).
    pub fn norm_b(&self, m: &Mat) -> f64 {
        linalg::frobenius(m) / (self.k as f64).sqrt()
    }

    /// `‖m‖_2 = τ(m* m)^{1/2}`.
    pub fn l2_norm(&self, m: &Mat) -> f64 {
        (m.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.n() as f64).sqrt()
    }

    /// Distance of `m` from the target subalgebra.
    pub fn distance_to(&self, target: Target, m: &Mat) -> f64 {
        let p = match target {
            Target::B => self.cond_exp_b(m),
            Target::D => self.cond_exp_d(m),
            Target::Scalar => self.expect(Target::Scalar, m),
        };
        self.norm_b(&(m - p))
    }

    /// Smallest eigenvalue of the Gram matrix `τ(b_i* b_j)` over a basis of
    /// `B`; positive iff the trace form on `B` is nondegenerate, which is
    /// the faithfulness condition on `E_D|_B`.
    pub fn trace_form_min_eigenvalue(&self) -> f64 {
        let basis = self.basis(Target::B);
        let m = basis.len();
        let gram = Mat::from_fn(m, m, |i, j| self.trace(&(basis[i].adjoint() * &basis[j])));
        linalg::hermitian_eigenvalues(&gram)[0]
    }

    /// Monte-Carlo form of `E_D(m) = dim(D) c^{-1} ∫ u τ(u* m) du`.
    pub fn cond_exp_d_monte_carlo<R: Rng + ?Sized>(&self, m: &Mat, samples: usize, rng: &mut R) -> Result<Mat> {
        if samples == 0 {
            return invalid("Monte-Carlo estimate needs at least one sample");
        }
        let mut acc = linalg::zeros(self.n());
        for _ in 0..samples {
            let u = self.haar_sample(rng);
            let t = self.trace(&(u.adjoint() * m));
            acc += &u * t;
        }
        acc /= Complex64::from(samples as f64);
        Ok(self.central_element_c_inv()? * acc * Complex64::from(self.spec.dim() as f64))
    }

    /// Monte-Carlo form of `E_{D'}(m) = ∫ u m u* du`.
    pub fn cond_exp_commutant_monte_carlo<R: Rng + ?Sized>(&self, m: &Mat, samples: usize, rng: &mut R) -> Result<Mat> {
        if samples == 0 {
            return invalid("Monte-Carlo estimate needs at least one sample");
        }
        let mut acc = linalg::zeros(self.n());
        for _ in 0..samples {
            let u = self.haar_sample(rng);
            acc += &u * m * u.adjoint();
        }
        Ok(acc / Complex64::from(samples as f64))
    }

    /// Run the invariant suite for `E_B`, `E_D`, `E_{D'}` on random elements.
    pub fn check<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> AlgebraReport {
        let mut rep = AlgebraReport::new(self);
        let n = self.n();
        let one = self.identity();
        type Proj<'a> = (&'static str, Box<dyn Fn(&Mat) -> Mat + 'a>, Target);
        let projections: Vec<Proj> = vec![
            ("E_B", Box::new(|m: &Mat| self.cond_exp_b(m)), Target::B),
            ("E_D", Box::new(|m: &Mat| self.cond_exp_d(m)), Target::D),
            ("E_D'", Box::new(|m: &Mat| self.cond_exp_commutant(m)), Target::D),
        ];
        for _ in 0..trials {
            let m = linalg::ginibre(n, rng);
            let m2 = linalg::ginibre(n, rng);
            let psd = m.adjoint() * &m;
            for (name, e, coeff) in &projections {
                let em = e(&m);
                rep.record(name, "unital", linalg::max_abs(&(e(&one) - &one)));
                rep.record(name, "idempotent", linalg::max_abs(&(e(&em) - &em)));
                let tr = (self.trace(&em) - self.trace(&m)).norm();
                rep.record(name, "trace-preserving", tr);
                let ev = linalg::hermitian_eigenvalues(&e(&psd));
                rep.record(name, "positive", (-ev[0]).max(0.0));
                // Bimodule law over the range for E_B, E_D; E_{D'} is a
                // bimodule map over D' ∩ M, probed with D' elements.
                let (b1, b2) = if *name == "E_D'" {
                    (self.cond_exp_commutant(&m2), self.cond_exp_commutant(&m2.adjoint()))
                } else {
                    (self.random_in(*coeff, rng), self.random_in(*coeff, rng))
                };
                let lhs = e(&(&b1 * &m * &b2));
                let rhs = &b1 * &em * &b2;
                rep.record(name, "bimodule", linalg::max_abs(&(lhs - rhs)));
            }
            let tower = self.cond_exp_d(&self.cond_exp_b(&m)) - self.cond_exp_d(&m);
            rep.record("E_D", "tower E_D∘E_B = E_D", linalg::max_abs(&tower));
            let tr = (self.trace(&(&m * &m2)) - self.trace(&(&m2 * &m))).norm();
            rep.record("tau", "tracial", tr);
        }
        rep.trace_form_min_eigenvalue = self.trace_form_min_eigenvalue();
        rep.finish(self.tol);
        rep
    }
}

/// Worst residual per (map, property).
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub d: usize,
    pub k: usize,
    pub dim_d: usize,
    pub trace_weights: Vec<f64>,
    pub checks: Vec<PropertyResidual>,
    pub trace_form_min_eigenvalue: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResidual {
    pub map: String,
    pub property: String,
    pub worst: f64,
}

impl AlgebraReport {
    fn new(ctx: &AlgebraContext) -> Self {
        AlgebraReport {
            d: ctx.d,
            k: ctx.k,
            dim_d: ctx.spec.dim(),
            trace_weights: ctx.trace_weights(),
            checks: Vec::new(),
            trace_form_min_eigenvalue: 0.0,
            tol: ctx.tol,
            pass: false,
        }
    }

    fn record(&mut self, map: &str, property: &str, value: f64) {
        match self.checks.iter_mut().find(|c| c.map == map && c.property == property) {
            Some(c) => c.worst = c.worst.max(value),
            None => self.checks.push(PropertyResidual { map: map.into(), property: property.into(), worst: value }),
        }
    }

    fn finish(&mut self, tol: f64) {
        self.pass = self.checks.iter().all(|c| c.worst <= tol) && self.trace_form_min_eigenvalue > 0.0;
    }
}
