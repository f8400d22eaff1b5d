//! Multiplicative bracketings and the moment-cumulant inversion.
//!
//! The production recursion splits `NC(n)` by the block containing `1`:
//! with that block `V = {v_1 < ... < v_s}`, everything strictly between
//! `v_t` and `v_{t+1}` sums to a moment and everything after `v_s` sums to a
//! moment, so
//!
//! `E(m_1⋯m_n) = Σ_V κ_s(m_{v_1} E(I_1), ..., m_{v_s}) · E(m_{v_s+1}⋯m_n)`.
//!
//! Solving for the `V = [n]` term costs `2^{n-1}` recursive calls instead of
//! a sweep over the whole lattice. The lattice form is kept as
//! [`CumulantEngine::cumulant_full_lattice`] for cross-checking.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::algebra::Target;
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Mat};
use crate::nc::{enumerate_nc, nesting_forest, NCPartition, NestingNode, NC_CAP};
use crate::space::{project, NcSpace};

pub const DEFAULT_MAX_ORDER: usize = 8;

/// Evaluate `⟨m_1, ..., m_n⟩_π` for a balanced map `f`.
///
/// Blocks nested between `v_t` and `v_{t+1}` are evaluated first and their
/// product multiplies `m_{v_t}` on the right; outer blocks multiply left to
/// right.
pub fn bracketing<S, F>(space: &S, pi: &NCPartition, args: &[S::Elem], f: &mut F) -> Result<Mat>
where
    S: NcSpace,
    F: FnMut(&[S::Elem]) -> Result<Mat>,
{
    if args.len() != pi.n() {
        return Err(Error::ArityMismatch { expected: pi.n(), got: args.len() });
    }
    let forest = nesting_forest(pi);
    let mut acc = linalg::identity(space.d());
    for root in &forest.roots {
        acc *= eval_node(space, root, args, f)?;
    }
    Ok(acc)
}

fn eval_node<S, F>(space: &S, node: &NestingNode, args: &[S::Elem], f: &mut F) -> Result<Mat>
where
    S: NcSpace,
    F: FnMut(&[S::Elem]) -> Result<Mat>,
{
    let mut list = Vec::with_capacity(node.block.len());
    for (t, &v) in node.block.iter().enumerate() {
        let mut inner: Option<Mat> = None;
        for child in node.children.iter().filter(|c| c.after == t + 1) {
            let val = eval_node(space, &child.node, args, f)?;
            inner = Some(match inner {
                None => val,
                Some(prev) => prev * val,
            });
        }
        let m = &args[v - 1];
        list.push(match inner {
            None => m.clone(),
            Some(b) => space.mul(m, &space.from_b(&b)),
        });
    }
    f(&list)
}

/// `Σ_{π ∈ NC(n)} κ_π(m_1, ..., m_n)` for a given cumulant family.
pub fn moment_from_cumulants<S, F>(space: &S, args: &[S::Elem], mut kappa: F) -> Result<Mat>
where
    S: NcSpace,
    F: FnMut(&[S::Elem]) -> Result<Mat>,
{
    let mut acc = linalg::zeros(space.d());
    for pi in enumerate_nc(args.len())? {
        acc += bracketing(space, &pi, args, &mut kappa)?;
    }
    Ok(acc)
}

/// A cumulant `κ(X_{i_1} b_1, X_{i_2} b_2, ..., X_{i_k})`.
#[derive(Debug, Clone)]
pub struct CumulantQuery<E> {
    pub variables: Vec<E>,
    /// `b_1, ..., b_{k-1}` in the target algebra, as `d × d` matrices.
    pub coefficients: Vec<Mat>,
    pub target: Target,
}

/// Moments and cumulants of a space with respect to one target algebra.
///
/// The memo cache is local to the engine; engines are cheap to create per
/// task.
pub struct CumulantEngine<'a, S: NcSpace> {
    space: &'a S,
    target: Target,
    max_order: usize,
    cache: RefCell<HashMap<Vec<u64>, Mat>>,
}

impl<'a, S: NcSpace> CumulantEngine<'a, S> {
    pub fn new(space: &'a S, target: Target) -> Self {
        CumulantEngine { space, target, max_order: DEFAULT_MAX_ORDER, cache: RefCell::new(HashMap::new()) }
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order.min(NC_CAP);
        self
    }

    pub fn space(&self) -> &'a S {
        self.space
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn cache_len(&self) -> usize {
        self.cache.borrow().len()
    }

    pub fn clear_cache(&self) {
        self.cache.borrow_mut().clear();
    }

    /// `E(a)` in the target algebra.
    pub fn expect(&self, a: &S::Elem) -> Result<Mat> {
        self.space.expect(self.target, a)
    }

    /// `E(m_1 ⋯ m_n)` in the target algebra.
    pub fn moment(&self, args: &[S::Elem]) -> Result<Mat> {
        self.expect(&self.space.product(args))
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n == 0 {
            return invalid("cumulants need at least one argument");
        }
        if n > self.max_order {
            return Err(Error::OrderExceedsCap { order: n, max: self.max_order });
        }
        Ok(())
    }

    /// `κ(m_1, ..., m_n)` valued in the target algebra.
    pub fn cumulant(&self, args: &[S::Elem]) -> Result<Mat> {
        self.check_order(args.len())?;
        let mut key = Vec::with_capacity(16);
        for a in args {
            let start = key.len();
            key.push(0);
            self.space.key(a, &mut key);
            key[start] = (key.len() - start) as u64;
        }
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let value = self.cumulant_uncached(args)?;
        self.cache.borrow_mut().insert(key, value.clone());
        Ok(value)
    }

    fn cumulant_uncached(&self, args: &[S::Elem]) -> Result<Mat> {
        let n = args.len();
        if n == 1 {
            return self.expect(&args[0]);
        }
        // Interval moments E(m_i ⋯ m_j), 0-based inclusive.
        let mut intervals: HashMap<(usize, usize), Mat> = HashMap::new();
        let mut interval = |i: usize, j: usize| -> Result<Mat> {
            if let Some(v) = intervals.get(&(i, j)) {
                return Ok(v.clone());
            }
            let v = self.moment(&args[i..=j])?;
            intervals.insert((i, j), v.clone());
            Ok(v)
        };
        let mut total = interval(0, n - 1)?;
        let full = (1u32 << (n - 1)) - 1;
        for mask in 0..full {
            let mut block = vec![0usize];
            block.extend((1..n).filter(|&v| mask & (1 << (v - 1)) != 0));
            let mut sub = Vec::with_capacity(block.len());
            for (t, &v) in block.iter().enumerate() {
                let next = block.get(t + 1).copied().unwrap_or(v + 1);
                if t + 1 < block.len() && next > v + 1 {
                    let e = interval(v + 1, next - 1)?;
                    sub.push(self.space.mul(&args[v], &self.space.from_b(&e)));
                } else {
                    sub.push(args[v].clone());
                }
            }
            let last = *block.last().unwrap();
            let mut term = self.cumulant(&sub)?;
            if last + 1 < n {
                term *= interval(last + 1, n - 1)?;
            }
            total -= term;
        }
        Ok(total)
    }

    /// `κ = E − Σ_{π ≠ 1_n} κ_π` over the whole lattice, without caching.
    pub fn cumulant_full_lattice(&self, args: &[S::Elem]) -> Result<Mat> {
        self.check_order(args.len())?;
        let n = args.len();
        let mut total = self.moment(args)?;
        if n == 1 {
            return Ok(total);
        }
        for pi in enumerate_nc(n)? {
            if pi.is_full() {
                continue;
            }
            total -= bracketing(self.space, &pi, args, &mut |sub: &[S::Elem]| self.cumulant_full_lattice(sub))?;
        }
        Ok(total)
    }

    /// Evaluate a query `κ(X_{i_1} b_1, ..., X_{i_k})`.
    pub fn query(&self, q: &CumulantQuery<S::Elem>) -> Result<Mat> {
        if q.target != self.target {
            return invalid(format!("query targets {:?} but the engine targets {:?}", q.target, self.target));
        }
        let k = q.variables.len();
        if q.coefficients.len() + 1 != k {
            return Err(Error::ArityMismatch { expected: k.saturating_sub(1), got: q.coefficients.len() });
        }
        let spec = self.space.spec();
        for b in &q.coefficients {
            if b.nrows() != spec.d() || b.ncols() != spec.d() {
                return Err(Error::ContextMismatch);
            }
            let off = linalg::frobenius(&(b - project(spec, self.target, b)));
            if off > 1e-9 * (1.0 + linalg::frobenius(b)) {
                return invalid(format!("coefficient is not in the {:?} algebra (distance {off:.3e})", self.target));
            }
        }
        let args = absorb_coefficients(self.space, &q.variables, &q.coefficients);
        self.cumulant(&args)
    }
}

/// `(X_1 b_1, X_2 b_2, ..., X_k)`.
pub fn absorb_coefficients<S: NcSpace>(space: &S, vars: &[S::Elem], coeffs: &[Mat]) -> Vec<S::Elem> {
    vars.iter()
        .enumerate()
        .map(|(t, x)| match coeffs.get(t) {
            Some(b) => space.mul(x, &space.from_b(b)),
            None => x.clone(),
        })
        .collect()
}
