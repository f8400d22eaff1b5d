//! Freeness tests with amalgamation: vanishing of mixed cumulants, the
//! factorization `k_B = F ∘ k_B ∘ F`, restriction of cumulants to `D`,
//! R-cyclicity and scalar semicircularity.
//!
//! The theorems quantify over all coefficients; here coefficients are
//! seeded Gaussian draws, and every verdict is scoped to the tested order.

use serde::Serialize;

use crate::algebra::Target;
use crate::cumulants::{absorb_coefficients, CumulantEngine};
use crate::error::{invalid, Result};
use crate::fock::index_tuples;
use crate::linalg::{self, Mat};
use crate::nc::catalan;
use crate::rng::{stream, TAG_FREENESS};
use crate::space::{random_coefficient, residual_norm, NcSpace};

/// Probe settings shared by the tests.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeConfig {
    pub max_order: usize,
    pub tol: f64,
    /// Coefficient draws per index tuple.
    pub draws: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { max_order: 4, tol: 1e-8, draws: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderResidual {
    pub order: usize,
    pub worst: f64,
    pub queries: usize,
}

/// The query that produced a family's worst residual.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub order: usize,
    pub indices: Vec<usize>,
    pub draw: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualFamily {
    pub name: String,
    /// Whether this family enters the verdict.
    pub asserted: bool,
    pub per_order: Vec<OrderResidual>,
    pub worst: f64,
    pub witness: Option<Witness>,
}

impl ResidualFamily {
    pub fn new(name: &str, asserted: bool) -> Self {
        ResidualFamily { name: name.into(), asserted, per_order: Vec::new(), worst: 0.0, witness: None }
    }

    pub fn record(&mut self, order: usize, indices: &[usize], draw: usize, residual: f64) {
        match self.per_order.iter_mut().find(|o| o.order == order) {
            Some(o) => {
                o.worst = o.worst.max(residual);
                o.queries += 1;
            }
            None => self.per_order.push(OrderResidual { order, worst: residual, queries: 1 }),
        }
        if self.witness.is_none() || residual > self.worst || residual.is_nan() {
            self.worst = residual;
            self.witness = Some(Witness { order, indices: indices.to_vec(), draw, residual });
        }
    }

    pub fn worst_at(&self, order: usize) -> Option<f64> {
        self.per_order.iter().find(|o| o.order == order).map(|o| o.worst)
    }

    fn within(&self, tol: f64) -> bool {
        self.worst <= tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FreenessReport {
    pub test: String,
    pub target: Target,
    pub max_order: usize,
    pub tol: f64,
    pub draws: usize,
    pub seed: u64,
    pub families: Vec<ResidualFamily>,
    /// Restriction test only: whether `k_B` maps `D` into `D`.
    pub hypothesis_holds: Option<bool>,
    pub pass: bool,
}

impl FreenessReport {
    fn new(test: &str, target: Target, cfg: &ProbeConfig, families: Vec<ResidualFamily>) -> Self {
        FreenessReport {
            test: test.into(),
            target,
            max_order: cfg.max_order,
            tol: cfg.tol,
            draws: cfg.draws,
            seed: cfg.seed,
            families,
            hypothesis_holds: None,
            pass: false,
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.hypothesis_holds != Some(false)
            && self.families.iter().filter(|f| f.asserted).all(|f| f.within(self.tol));
        self
    }

    pub fn family(&self, name: &str) -> Option<&ResidualFamily> {
        self.families.iter().find(|f| f.name == name)
    }

    /// Worst asserted residual.
    pub fn worst(&self) -> f64 {
        self.families.iter().filter(|f| f.asserted).map(|f| f.worst).fold(0.0, f64::max)
    }
}

fn check_cfg(cfg: &ProbeConfig) -> Result<()> {
    if cfg.max_order == 0 {
        return invalid("max_order must be positive");
    }
    if cfg.draws == 0 {
        return invalid("at least one coefficient draw is needed");
    }
    if !(cfg.tol >= 0.0) {
        return invalid("tolerance must be nonnegative");
    }
    Ok(())
}

/// Mixed cumulants `κ(a_1 b_1, ..., a_n)` with arguments from `s1 ∪ s2`,
/// each set represented at least once, must vanish. Indices in the report
/// refer to the concatenation `s1 ++ s2`.
pub fn test_mixed_cumulants<S: NcSpace>(
    space: &S,
    s1: &[S::Elem],
    s2: &[S::Elem],
    target: Target,
    cfg: &ProbeConfig,
) -> Result<FreenessReport> {
    check_cfg(cfg)?;
    if s1.is_empty() || s2.is_empty() {
        return invalid("both element sets must be nonempty");
    }
    if cfg.max_order < 2 {
        return invalid("mixed cumulants need max_order ≥ 2");
    }
    let all: Vec<S::Elem> = s1.iter().chain(s2).cloned().collect();
    let n1 = s1.len();
    let engine = CumulantEngine::new(space, target).with_max_order(cfg.max_order);
    let mut fam = ResidualFamily::new("mixed cumulants", true);
    let mut rng = stream(cfg.seed, TAG_FREENESS, 1);
    // Scalar coefficients factor out of scalar cumulants.
    let draws = if target == Target::Scalar { 1 } else { cfg.draws };
    for idx in index_tuples(all.len(), cfg.max_order) {
        if idx.len() < 2 || idx.iter().all(|&i| i < n1) || idx.iter().all(|&i| i >= n1) {
            continue;
        }
        let vars: Vec<S::Elem> = idx.iter().map(|&i| all[i].clone()).collect();
        for draw in 0..draws {
            let coeffs: Vec<Mat> = if target == Target::Scalar {
                vec![linalg::identity(space.d()); idx.len() - 1]
            } else {
                (1..idx.len()).map(|_| random_coefficient(space.spec(), target, &mut rng)).collect()
            };
            let args = absorb_coefficients(space, &vars, &coeffs);
            let k = engine.cumulant(&args)?;
            fam.record(idx.len(), &idx, draw, residual_norm(target, &k));
        }
    }
    Ok(FreenessReport::new("mixed", target, cfg, vec![fam]).finish())
}

/// Compare `k_B(b_1, ...)` with `F(k_B(F(b_1), ...))` and with
/// `k_D(F(b_1), ...)`, `F = E_D|_B`, over tuples of `xs` of orders
/// `1..=max_order`.
pub fn test_factorization<S: NcSpace>(space: &S, xs: &[S::Elem], cfg: &ProbeConfig) -> Result<FreenessReport> {
    check_cfg(cfg)?;
    if xs.is_empty() {
        return invalid("no variables given");
    }
    let spec = space.spec();
    let eb = CumulantEngine::new(space, Target::B).with_max_order(cfg.max_order);
    let ed = CumulantEngine::new(space, Target::D).with_max_order(cfg.max_order);
    let mut f1 = ResidualFamily::new("k_B - F(k_B(F))", true);
    let mut f2 = ResidualFamily::new("k_B - k_D(F)", true);
    let mut rng = stream(cfg.seed, TAG_FREENESS, 2);
    for idx in index_tuples(xs.len(), cfg.max_order) {
        let vars: Vec<S::Elem> = idx.iter().map(|&i| xs[i].clone()).collect();
        let draws = if idx.len() == 1 { 1 } else { cfg.draws };
        for draw in 0..draws {
            let bs: Vec<Mat> = (1..idx.len()).map(|_| linalg::ginibre(spec.d(), &mut rng)).collect();
            let fbs: Vec<Mat> = bs.iter().map(|b| spec.project(b)).collect();
            let kb = eb.cumulant(&absorb_coefficients(space, &vars, &bs))?;
            let kb_f = eb.cumulant(&absorb_coefficients(space, &vars, &fbs))?;
            let kd_f = ed.cumulant(&absorb_coefficients(space, &vars, &fbs))?;
            f1.record(idx.len(), &idx, draw, linalg::frobenius(&(&kb - spec.project(&kb_f))));
            f2.record(idx.len(), &idx, draw, linalg::frobenius(&(&kb - &kd_f)));
        }
    }
    Ok(FreenessReport::new("factorization", Target::D, cfg, vec![f1, f2]).finish())
}

/// If `k_B` maps `D`-arguments into `D`, then `k_D = k_B` on `D`-arguments.
/// The conclusion is only asserted when the hypothesis holds.
pub fn test_restriction<S: NcSpace>(space: &S, xs: &[S::Elem], cfg: &ProbeConfig) -> Result<FreenessReport> {
    check_cfg(cfg)?;
    if xs.is_empty() {
        return invalid("no variables given");
    }
    let spec = space.spec();
    let eb = CumulantEngine::new(space, Target::B).with_max_order(cfg.max_order);
    let ed = CumulantEngine::new(space, Target::D).with_max_order(cfg.max_order);
    let mut hyp = ResidualFamily::new("k_B(D) off D", true);
    let mut con = ResidualFamily::new("k_D - k_B on D", true);
    let mut rng = stream(cfg.seed, TAG_FREENESS, 3);
    for idx in index_tuples(xs.len(), cfg.max_order) {
        let vars: Vec<S::Elem> = idx.iter().map(|&i| xs[i].clone()).collect();
        let draws = if idx.len() == 1 { 1 } else { cfg.draws };
        for draw in 0..draws {
            let ds: Vec<Mat> = (1..idx.len()).map(|_| spec.random(&mut rng)).collect();
            let args = absorb_coefficients(space, &vars, &ds);
            let kb = eb.cumulant(&args)?;
            let kd = ed.cumulant(&args)?;
            hyp.record(idx.len(), &idx, draw, linalg::frobenius(&(&kb - spec.project(&kb))));
            con.record(idx.len(), &idx, draw, linalg::frobenius(&(&kd - &kb)));
        }
    }
    let holds = hyp.within(cfg.tol);
    con.asserted = holds;
    let mut rep = FreenessReport::new("restriction", Target::D, cfg, vec![hyp, con]);
    rep.hypothesis_holds = Some(holds);
    Ok(rep.finish())
}

/// Scalar cumulants `κ_n(x_{i_1 j_1}, ..., x_{i_n j_n})` must vanish unless
/// `j_t = i_{t+1}` and `j_n = i_1`. Indices are reported flattened as
/// `[i_1, j_1, i_2, j_2, ...]`.
pub fn test_r_cyclic<S: NcSpace>(space: &S, entries: &[Vec<S::Elem>], cfg: &ProbeConfig) -> Result<FreenessReport> {
    check_cfg(cfg)?;
    let d = entries.len();
    if d == 0 || entries.iter().any(|row| row.len() != d) {
        return invalid("the entry array must be square and nonempty");
    }
    let engine = CumulantEngine::new(space, Target::Scalar).with_max_order(cfg.max_order);
    let mut off = ResidualFamily::new("non-cyclic patterns", true);
    let mut on = ResidualFamily::new("cyclic patterns", false);
    for pattern in index_tuples(d * d, cfg.max_order) {
        let pairs: Vec<(usize, usize)> = pattern.iter().map(|&p| (p / d, p % d)).collect();
        let n = pairs.len();
        let cyclic = (0..n).all(|t| pairs[t].1 == pairs[(t + 1) % n].0);
        let args: Vec<S::Elem> = pairs.iter().map(|&(i, j)| entries[i][j].clone()).collect();
        let k = engine.cumulant(&args)?;
        let flat: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
        let fam = if cyclic { &mut on } else { &mut off };
        fam.record(n, &flat, 0, residual_norm(Target::Scalar, &k));
    }
    Ok(FreenessReport::new("rcyclic", Target::Scalar, cfg, vec![off, on]).finish())
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderDeviation {
    pub order: usize,
    pub observed: f64,
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemicircleVerdict {
    pub variance: f64,
    pub deviations: Vec<OrderDeviation>,
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare `moments[k-1] = τ(X^k)` with the semicircle of the same
/// variance: odd moments `0`, `τ(X^{2k}) = Catalan(k) τ(X²)^k`.
pub fn test_semicircularity_scalar(moments: &[f64], tol: f64) -> Result<SemicircleVerdict> {
    if moments.len() < 4 {
        return invalid("need moments up to order 4 at least");
    }
    let variance = moments[1];
    if !(variance > 0.0) {
        return invalid(format!("τ(X²) = {variance} is not positive"));
    }
    let mut deviations = Vec::with_capacity(moments.len());
    for (t, &observed) in moments.iter().enumerate() {
        let order = t + 1;
        let expected = if order % 2 == 1 { 0.0 } else { catalan(order / 2) as f64 * variance.powi(order as i32 / 2) };
        deviations.push(OrderDeviation { order, observed, expected, deviation: (observed - expected).abs() });
    }
    let worst = deviations.iter().map(|d| d.deviation).fold(0.0, f64::max);
    Ok(SemicircleVerdict { variance, deviations, worst, tol, pass: worst <= tol })
}
