//! Canonical random variables for a truncated cumulant series.
//!
//! The word algebra is generated by letters `λ_j^*`, `λ_p^q` and
//! coefficients `b ∈ B`, subject to the reduction
//!
//! `λ_{j_1}^* b_1 ⋯ λ_{j_q}^* b_q λ_j^q = k_{j_1,...,j_q,j}(b_1, ..., b_q)`
//!
//! and `E_B(w) = 0` for words that do not reduce to `B`. With
//! `Y_j = λ_j^* + Σ_q λ_j^q`, the `Y` have exactly the prescribed
//! `B`-valued cumulants. Nothing is represented in a Hilbert space; `E_B`
//! is defined by reduction alone.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::SubalgebraSpec;
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, push_bits, Mat};
use crate::rng::{stream, TAG_FOCK};
use crate::space::NcSpace;

/// A `B`-valued cumulant series `k_{i_1,...,i_k}(b_1, ..., b_{k-1})`,
/// truncated at order `max_order`.
pub trait CumulantSeries {
    fn spec(&self) -> &SubalgebraSpec;
    fn n_vars(&self) -> usize;
    fn max_order(&self) -> usize;
    /// `indices.len() = coeffs.len() + 1 ≤ max_order`.
    fn cumulant(&self, indices: &[usize], coeffs: &[Mat]) -> Result<Mat>;

    fn d(&self) -> usize {
        self.spec().d()
    }
}

impl<S: CumulantSeries + ?Sized> CumulantSeries for Rc<S> {
    fn spec(&self) -> &SubalgebraSpec {
        (**self).spec()
    }
    fn n_vars(&self) -> usize {
        (**self).n_vars()
    }
    fn max_order(&self) -> usize {
        (**self).max_order()
    }
    fn cumulant(&self, indices: &[usize], coeffs: &[Mat]) -> Result<Mat> {
        (**self).cumulant(indices, coeffs)
    }
}

fn check_call(n_vars: usize, max_order: usize, indices: &[usize], coeffs: &[Mat]) -> Result<()> {
    if indices.is_empty() || coeffs.len() + 1 != indices.len() {
        return Err(Error::ArityMismatch { expected: indices.len().saturating_sub(1), got: coeffs.len() });
    }
    if indices.len() > max_order {
        return Err(Error::OrderExceedsCap { order: indices.len(), max: max_order });
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= n_vars) {
        return invalid(format!("variable index {i} out of range (n_vars = {n_vars})"));
    }
    Ok(())
}

/// Series given by a table of multilinear terms: the entry for
/// `(i_1, ..., i_k)` is a sum of products `a_0 b_1 a_1 b_2 ⋯ b_{k-1} a_{k-1}`,
/// each term stored as `[a_0, ..., a_{k-1}]`. Every multilinear map on
/// `M_d` has this form. Missing entries are zero.
#[derive(Debug, Clone)]
pub struct TableSeries {
    spec: SubalgebraSpec,
    n_vars: usize,
    max_order: usize,
    table: HashMap<Vec<usize>, Vec<Vec<Mat>>>,
}

impl TableSeries {
    pub fn new(spec: SubalgebraSpec, n_vars: usize, max_order: usize) -> Self {
        TableSeries { spec, n_vars, max_order, table: HashMap::new() }
    }

    pub fn add_term(&mut self, indices: Vec<usize>, factors: Vec<Mat>) -> Result<()> {
        let d = self.spec.d();
        if indices.is_empty() || factors.len() != indices.len() {
            return Err(Error::ArityMismatch { expected: indices.len(), got: factors.len() });
        }
        if factors.iter().any(|a| a.nrows() != d || a.ncols() != d) {
            return Err(Error::ContextMismatch);
        }
        if indices.len() > self.max_order {
            return Err(Error::OrderExceedsCap { order: indices.len(), max: self.max_order });
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.n_vars) {
            return invalid(format!("variable index {i} out of range (n_vars = {})", self.n_vars));
        }
        self.table.entry(indices).or_default().push(factors);
        Ok(())
    }

    /// `k_{i,i}(b) = Σ_t l_t b r_t`: a `B`-semicircular family with
    /// covariance given by sandwich terms.
    pub fn semicircular(spec: SubalgebraSpec, covariances: &[Vec<(Mat, Mat)>], max_order: usize) -> Result<Self> {
        let mut s = TableSeries::new(spec, covariances.len(), max_order);
        for (i, terms) in covariances.iter().enumerate() {
            for (l, r) in terms {
                s.add_term(vec![i, i], vec![l.clone(), r.clone()])?;
            }
        }
        Ok(s)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<Vec<Mat>>)> {
        self.table.iter()
    }
}

impl CumulantSeries for TableSeries {
    fn spec(&self) -> &SubalgebraSpec {
        &self.spec
    }
    fn n_vars(&self) -> usize {
        self.n_vars
    }
    fn max_order(&self) -> usize {
        self.max_order
    }
    fn cumulant(&self, indices: &[usize], coeffs: &[Mat]) -> Result<Mat> {
        check_call(self.n_vars, self.max_order, indices, coeffs)?;
        let d = self.spec.d();
        let mut acc = linalg::zeros(d);
        if let Some(terms) = self.table.get(indices) {
            for factors in terms {
                let mut t = factors[0].clone();
                for (b, a) in coeffs.iter().zip(&factors[1..]) {
                    t = t * b * a;
                }
                acc += t;
            }
        }
        Ok(acc)
    }
}

type SeriesFn = dyn Fn(&[usize], &[Mat]) -> Mat;

/// Series given by a closure.
pub struct FnSeries {
    spec: SubalgebraSpec,
    n_vars: usize,
    max_order: usize,
    f: Box<SeriesFn>,
}

impl FnSeries {
    pub fn new(spec: SubalgebraSpec, n_vars: usize, max_order: usize, f: impl Fn(&[usize], &[Mat]) -> Mat + 'static) -> Self {
        FnSeries { spec, n_vars, max_order, f: Box::new(f) }
    }
}

impl CumulantSeries for FnSeries {
    fn spec(&self) -> &SubalgebraSpec {
        &self.spec
    }
    fn n_vars(&self) -> usize {
        self.n_vars
    }
    fn max_order(&self) -> usize {
        self.max_order
    }
    fn cumulant(&self, indices: &[usize], coeffs: &[Mat]) -> Result<Mat> {
        check_call(self.n_vars, self.max_order, indices, coeffs)?;
        Ok((self.f)(indices, coeffs))
    }
}

/// `k_B(b_1, ...) = F(k(F(b_1), ...))` with `F` the compression onto `over`.
pub struct FreeOver<S> {
    inner: S,
    over: SubalgebraSpec,
}

impl<S: CumulantSeries> FreeOver<S> {
    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn over(&self) -> &SubalgebraSpec {
        &self.over
    }
}

impl<S: CumulantSeries> CumulantSeries for FreeOver<S> {
    fn spec(&self) -> &SubalgebraSpec {
        self.inner.spec()
    }
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }
    fn cumulant(&self, indices: &[usize], coeffs: &[Mat]) -> Result<Mat> {
        let projected: Vec<Mat> = coeffs.iter().map(|b| self.over.project(b)).collect();
        Ok(self.over.project(&self.inner.cumulant(indices, &projected)?))
    }
}

/// Index tuples of every order `1..=max_order`, in lexicographic order
/// within each order.
pub fn index_tuples(n_vars: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_order {
        let mut next = Vec::with_capacity(layer.len() * n_vars);
        for t in &layer {
            for i in 0..n_vars {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Build the series of a model free from `B` over `over`, after checking
/// that `series` maps `over`-arguments into `over`.
///
/// The check probes every index tuple (at most 4096 of them) with a few
/// seeded Gaussian coefficient draws from `over`.
pub fn construct_free_model<S: CumulantSeries>(series: S, over: SubalgebraSpec) -> Result<FreeOver<S>> {
    if over.d() != series.d() {
        return Err(Error::ContextMismatch);
    }
    let mut rng = stream(0, TAG_FOCK, 0);
    for indices in index_tuples(series.n_vars(), series.max_order()).into_iter().take(4096) {
        for _ in 0..3 {
            let coeffs: Vec<Mat> = (1..indices.len()).map(|_| over.random(&mut rng)).collect();
            let v = series.cumulant(&indices, &coeffs)?;
            let residual = linalg::frobenius(&(&v - over.project(&v)));
            if residual > 1e-9 * (1.0 + linalg::frobenius(&v)) {
                return Err(Error::NotDValued { indices, residual });
            }
        }
    }
    Ok(FreeOver { inner: series, over })
}

/// Adds `scale · a_0 b_1 a_1 ⋯` to one entry of a series.
pub struct Perturbed<S> {
    pub inner: S,
    pub indices: Vec<usize>,
    pub factors: Vec<Mat>,
    pub scale: f64,
}

impl<S: CumulantSeries> CumulantSeries for Perturbed<S> {
    fn spec(&self) -> &SubalgebraSpec {
        self.inner.spec()
    }
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }
    fn cumulant(&self, indices: &[usize], coeffs: &[Mat]) -> Result<Mat> {
        let mut v = self.inner.cumulant(indices, coeffs)?;
        if indices == self.indices.as_slice() {
            let mut t = self.factors[0].clone();
            for (b, a) in coeffs.iter().zip(&self.factors[1..]) {
                t = t * b * a;
            }
            v += t * Complex64::new(self.scale, 0.0);
        }
        Ok(v)
    }
}

/// A letter of the word algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum Letter {
    /// `λ_j^*`.
    Star(usize),
    /// `λ_p^q`.
    Gen(usize, usize),
    Coeff(Mat),
}

/// A word with adjacent coefficients merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        let mut w = Word { letters: Vec::with_capacity(letters.len()) };
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn push(&mut self, l: Letter) {
        if let Letter::Coeff(b) = &l {
            if let Some(Letter::Coeff(prev)) = self.letters.last_mut() {
                *prev = &*prev * b;
                return;
            }
        }
        self.letters.push(l);
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Order in which reducible segments are contracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    RightmostInnermost,
}

/// Result of [`reduce_word`].
#[derive(Debug, Clone, PartialEq)]
pub enum Reduced {
    Value(Mat),
    Residual(Word),
}

fn check_letters<S: CumulantSeries + ?Sized>(w: &Word, series: &S) -> Result<()> {
    let d = series.d();
    for l in w.letters() {
        match l {
            Letter::Star(j) | Letter::Gen(j, _) if *j >= series.n_vars() => {
                return Err(Error::MalformedWord(format!("variable index {j} out of range")));
            }
            Letter::Gen(_, q) if *q >= series.max_order() => {
                return Err(Error::MalformedWord(format!(
                    "λ^{q} needs cumulants of order {} beyond the truncation {}",
                    q + 1,
                    series.max_order()
                )));
            }
            Letter::Coeff(b) if b.nrows() != d || b.ncols() != d => {
                return Err(Error::MalformedWord("coefficient has the wrong size".into()));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Start of the segment that `Gen` at `g` contracts, if it is reducible.
fn segment_start(letters: &[Letter], g: usize) -> Option<usize> {
    let Letter::Gen(_, q) = letters[g] else { return None };
    let mut need = q;
    let mut pos = g;
    while need > 0 {
        if pos == 0 {
            return None;
        }
        pos -= 1;
        match letters[pos] {
            Letter::Star(_) => need -= 1,
            Letter::Coeff(_) => {}
            Letter::Gen(..) => return None,
        }
    }
    Some(pos)
}

/// Contract reducible segments until none is left.
pub fn reduce_word<S: CumulantSeries + ?Sized>(w: &Word, series: &S, strategy: Strategy) -> Result<Reduced> {
    check_letters(w, series)?;
    let d = series.d();
    let mut letters = w.letters.clone();
    loop {
        let candidates = (0..letters.len()).filter(|&g| segment_start(&letters, g).is_some());
        let pick = match strategy {
            Strategy::LeftmostInnermost => candidates.into_iter().next(),
            Strategy::RightmostInnermost => candidates.into_iter().last(),
        };
        let Some(g) = pick else { break };
        let start = segment_start(&letters, g).unwrap();
        let Letter::Gen(j, _) = letters[g] else { unreachable!() };
        let mut indices = Vec::new();
        let mut coeffs = Vec::new();
        for l in &letters[start..g] {
            match l {
                Letter::Star(i) => {
                    indices.push(*i);
                    coeffs.push(linalg::identity(d));
                }
                Letter::Coeff(b) => {
                    let last = coeffs.last_mut().expect("segments start with a star");
                    *last = &*last * b;
                }
                Letter::Gen(..) => unreachable!(),
            }
        }
        indices.push(j);
        let value = series.cumulant(&indices, &coeffs)?;
        let mut rebuilt = Word { letters: Vec::with_capacity(letters.len()) };
        for l in letters.drain(..start) {
            rebuilt.push(l);
        }
        rebuilt.push(Letter::Coeff(value));
        for l in letters.drain(g + 1 - start..) {
            rebuilt.push(l);
        }
        letters = rebuilt.letters;
    }
    match letters.as_slice() {
        [] => Ok(Reduced::Value(linalg::identity(d))),
        [Letter::Coeff(b)] => Ok(Reduced::Value(b.clone())),
        _ => Ok(Reduced::Residual(Word { letters })),
    }
}

/// `E_B(w)`: the reduced value, or zero for irreducible words.
pub fn expectation_word<S: CumulantSeries + ?Sized>(w: &Word, series: &S) -> Result<Mat> {
    match reduce_word(w, series, Strategy::LeftmostInnermost)? {
        Reduced::Value(b) => Ok(b),
        Reduced::Residual(_) => Ok(linalg::zeros(series.d())),
    }
}

fn check_moment_args<S: CumulantSeries + ?Sized>(series: &S, indices: &[usize], coeffs: &[Mat]) -> Result<()> {
    if coeffs.len() != indices.len() + 1 {
        return Err(Error::ArityMismatch { expected: indices.len() + 1, got: coeffs.len() });
    }
    if indices.len() > series.max_order() {
        return Err(Error::OrderExceedsCap { order: indices.len(), max: series.max_order() });
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= series.n_vars()) {
        return invalid(format!("variable index {i} out of range"));
    }
    Ok(())
}

/// `E_B(b_0 Y_{i_1} b_1 ⋯ Y_{i_m} b_m)` for `m ≤ max_order`.
///
/// Expands the product letter by letter, keeping the open `λ^*` letters on
/// a stack with the coefficient that follows each. Choosing `λ_i^q` closes
/// the top `q` of them at once; a word can only reduce if it ends with an
/// empty stack, so branches that cannot close in time are pruned.
pub fn canonical_moment<S: CumulantSeries + ?Sized>(series: &S, indices: &[usize], coeffs: &[Mat]) -> Result<Mat> {
    check_moment_args(series, indices, coeffs)?;
    let mut acc = linalg::zeros(series.d());
    let mut stack: Vec<(usize, Mat)> = Vec::new();
    moment_dfs(series, indices, coeffs, 0, coeffs[0].clone(), &mut stack, &mut acc)?;
    Ok(acc)
}

fn moment_dfs<S: CumulantSeries + ?Sized>(
    series: &S,
    indices: &[usize],
    coeffs: &[Mat],
    t: usize,
    lead: Mat,
    stack: &mut Vec<(usize, Mat)>,
    acc: &mut Mat,
) -> Result<()> {
    let m = indices.len();
    if t == m {
        if stack.is_empty() {
            *acc += lead;
        }
        return Ok(());
    }
    let remaining = m - t;
    let i = indices[t];
    let b = &coeffs[t + 1];
    // λ_i^*: opens a segment, which some later letter has to close.
    if remaining >= 2 {
        stack.push((i, b.clone()));
        moment_dfs(series, indices, coeffs, t + 1, lead.clone(), stack, acc)?;
        stack.pop();
    }
    // λ_i^q closes the top q open letters.
    let max_q = stack.len().min(series.max_order() - 1);
    for q in 0..=max_q {
        let split = stack.len() - q;
        if split > 0 && remaining < 2 {
            continue;
        }
        let popped: Vec<(usize, Mat)> = stack.drain(split..).collect();
        let mut idx: Vec<usize> = popped.iter().map(|(j, _)| *j).collect();
        idx.push(i);
        let cs: Vec<Mat> = popped.iter().map(|(_, c)| c.clone()).collect();
        let v = series.cumulant(&idx, &cs)?;
        let res = match split.checked_sub(1) {
            Some(top) => {
                let old = stack[top].1.clone();
                stack[top].1 = &old * v * b;
                let r = moment_dfs(series, indices, coeffs, t + 1, lead.clone(), stack, acc);
                stack[top].1 = old;
                r
            }
            None => moment_dfs(series, indices, coeffs, t + 1, &lead * v * b, stack, acc),
        };
        stack.extend(popped);
        res?;
    }
    Ok(())
}

/// The same moment by expanding every letter choice into an explicit word
/// and reducing it. Exponentially slower; used to cross-check
/// [`canonical_moment`].
pub fn moment_by_expansion<S: CumulantSeries + ?Sized>(
    series: &S,
    indices: &[usize],
    coeffs: &[Mat],
    strategy: Strategy,
) -> Result<Mat> {
    check_moment_args(series, indices, coeffs)?;
    let m = indices.len();
    let choices = |i: usize| -> Vec<Letter> {
        let mut v = vec![Letter::Star(i)];
        v.extend((0..m.min(series.max_order())).map(|q| Letter::Gen(i, q)));
        v
    };
    let mut acc = linalg::zeros(series.d());
    let mut pick = vec![0usize; m];
    let sizes: Vec<usize> = indices.iter().map(|&i| choices(i).len()).collect();
    loop {
        let mut letters = vec![Letter::Coeff(coeffs[0].clone())];
        for t in 0..m {
            letters.push(choices(indices[t])[pick[t]].clone());
            letters.push(Letter::Coeff(coeffs[t + 1].clone()));
        }
        if let Reduced::Value(v) = reduce_word(&Word::new(letters), series, strategy)? {
            acc += v;
        }
        let mut t = 0;
        while t < m {
            pick[t] += 1;
            if pick[t] < sizes[t] {
                break;
            }
            pick[t] = 0;
            t += 1;
        }
        if t == m {
            break;
        }
    }
    Ok(acc)
}

/// `b_0 Y_{i_1} b_1 ⋯ Y_{i_m} b_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub vars: Vec<usize>,
    pub coeffs: Vec<Mat>,
}

/// A noncommutative polynomial in the canonical variables with `B`
/// coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockPoly {
    pub terms: Vec<Monomial>,
}

/// The canonical variables `Y_1, ..., Y_n` of a series, as a
/// `B`-probability space.
///
/// [`NcSpace::adjoint`] treats every `Y_j` as self-adjoint, which holds
/// when the series satisfies `k(b_1, ..., b_q)* = k(b_q*, ..., b_1*)` on
/// reversed indices.
pub struct FockSpace<S> {
    series: S,
    memo: RefCell<HashMap<Vec<u64>, Mat>>,
}

impl<S: CumulantSeries> FockSpace<S> {
    pub fn new(series: S) -> Self {
        FockSpace { series, memo: RefCell::new(HashMap::new()) }
    }

    pub fn series(&self) -> &S {
        &self.series
    }

    /// `Y_j`.
    pub fn var(&self, j: usize) -> FockPoly {
        let id = linalg::identity(self.series.d());
        FockPoly { terms: vec![Monomial { vars: vec![j], coeffs: vec![id.clone(), id] }] }
    }

    pub fn vars(&self) -> Vec<FockPoly> {
        (0..self.series.n_vars()).map(|j| self.var(j)).collect()
    }

    /// Highest degree of a monomial.
    pub fn degree(&self, a: &FockPoly) -> usize {
        a.terms.iter().map(|t| t.vars.len()).max().unwrap_or(0)
    }

    fn mono_moment(&self, m: &Monomial) -> Result<Mat> {
        if m.vars.is_empty() {
            return Ok(m.coeffs[0].clone());
        }
        let mut key = Vec::new();
        key.extend(m.vars.iter().map(|&v| v as u64));
        for c in &m.coeffs {
            push_bits(c, &mut key);
        }
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = canonical_moment(&self.series, &m.vars, &m.coeffs)?;
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

impl<S: CumulantSeries> NcSpace for FockSpace<S> {
    type Elem = FockPoly;

    fn spec(&self) -> &SubalgebraSpec {
        self.series.spec()
    }

    fn from_b(&self, b: &Mat) -> FockPoly {
        FockPoly { terms: vec![Monomial { vars: vec![], coeffs: vec![b.clone()] }] }
    }

    fn zero(&self) -> FockPoly {
        FockPoly::default()
    }

    fn add(&self, a: &FockPoly, b: &FockPoly) -> FockPoly {
        let mut terms = a.terms.clone();
        terms.extend(b.terms.iter().cloned());
        FockPoly { terms }
    }

    fn scale(&self, a: &FockPoly, z: Complex64) -> FockPoly {
        FockPoly {
            terms: a
                .terms
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.coeffs[0] *= z;
                    t
                })
                .collect(),
        }
    }

    fn mul(&self, a: &FockPoly, b: &FockPoly) -> FockPoly {
        let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
        for x in &a.terms {
            for y in &b.terms {
                let mut vars = x.vars.clone();
                vars.extend_from_slice(&y.vars);
                let mut coeffs = x.coeffs.clone();
                let joint = coeffs.last().unwrap() * &y.coeffs[0];
                *coeffs.last_mut().unwrap() = joint;
                coeffs.extend(y.coeffs[1..].iter().cloned());
                terms.push(Monomial { vars, coeffs });
            }
        }
        FockPoly { terms }
    }

    fn adjoint(&self, a: &FockPoly) -> FockPoly {
        FockPoly {
            terms: a
                .terms
                .iter()
                .map(|t| Monomial {
                    vars: t.vars.iter().rev().copied().collect(),
                    coeffs: t.coeffs.iter().rev().map(|c| c.adjoint()).collect(),
                })
                .collect(),
        }
    }

    fn expect_b(&self, a: &FockPoly) -> Result<Mat> {
        let mut acc = linalg::zeros(self.series.d());
        for t in &a.terms {
            acc += self.mono_moment(t)?;
        }
        Ok(acc)
    }

    fn key(&self, a: &FockPoly, out: &mut Vec<u64>) {
        out.push(a.terms.len() as u64);
        for t in &a.terms {
            out.push(t.vars.len() as u64);
            out.extend(t.vars.iter().map(|&v| v as u64));
            for c in &t.coeffs {
                push_bits(c, out);
            }
        }
    }
}

/// Random word of `Star`/`Gen`/`Coeff` letters, for confluence checks.
pub fn random_word<R: Rng + ?Sized, S: CumulantSeries + ?Sized>(series: &S, len: usize, rng: &mut R) -> Word {
    let d = series.d();
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let j = rng.random_range(0..series.n_vars());
        letters.push(match rng.random_range(0..3) {
            0 => Letter::Star(j),
            1 => Letter::Gen(j, rng.random_range(0..series.max_order().min(4))),
            _ => Letter::Coeff(linalg::ginibre(d, rng)),
        });
    }
    Word::new(letters)
}
