//! JSON input files: contexts, models and cumulant series.
//!
//! Matrices are arrays of rows. An entry is either a number or a pair
//! `[re, im]`.

use std::rc::Rc;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, DBlock, SubalgebraSpec, Target};
use crate::error::{invalid, Error, Result};
use crate::fock::{construct_free_model, CumulantSeries, FockPoly, FockSpace, Monomial, TableSeries};
use crate::linalg::Mat;
use crate::space::{MatrixSpace, NcSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Re(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Re(x) => Complex64::new(x, 0.0),
            Entry::Complex([a, b]) => Complex64::new(a, b),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Entry>>;

/// Parse into a matrix, checking it is `n × n`.
pub fn to_matrix(rows: &MatrixSpec, n: usize, what: &str) -> Result<Mat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return invalid(format!("{what}: expected a {n} × {n} matrix"));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j].value()))
}

/// Serialise a matrix, writing real entries as plain numbers.
pub fn from_matrix(m: &Mat) -> MatrixSpec {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im == 0.0 { Entry::Re(z.re) } else { Entry::Complex([z.re, z.im]) }
                })
                .collect()
        })
        .collect()
}

/// Parse JSON, reporting the line and column of syntax and type errors.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSpec {
    pub size: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextFile {
    pub d: usize,
    #[serde(default = "one")]
    pub k: usize,
    #[serde(default)]
    pub trace_weights: Option<Vec<f64>>,
    #[serde(rename = "D_blocks")]
    pub d_blocks: Vec<BlockSpec>,
}

fn one() -> usize {
    1
}

fn spec_from(d: usize, blocks: &[BlockSpec]) -> Result<SubalgebraSpec> {
    SubalgebraSpec::new(d, blocks.iter().map(|b| DBlock { size: b.size, multiplicity: b.multiplicity }).collect())
}

impl ContextFile {
    pub fn build(&self) -> Result<AlgebraContext> {
        let ctx = AlgebraContext::new(self.d, self.k, spec_from(self.d, &self.d_blocks)?)?;
        if let Some(w) = &self.trace_weights {
            ctx.check_trace_weights(w)?;
        }
        Ok(ctx)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CumulantEntry {
    pub indices: Vec<usize>,
    /// Each term lists the factors `a_0, ..., a_{q−1}` of
    /// `a_0 b_1 a_1 ⋯ b_{q−1} a_{q−1}`.
    pub terms: Vec<Vec<MatrixSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesFile {
    pub d: usize,
    #[serde(rename = "D_blocks", default)]
    pub d_blocks: Option<Vec<BlockSpec>>,
    pub n_vars: usize,
    pub max_order: usize,
    #[serde(rename = "free_over_D", default)]
    pub free_over_d: bool,
    pub cumulants: Vec<CumulantEntry>,
}

impl SeriesFile {
    /// The series, wrapped as free over `D` when requested.
    pub fn build(&self) -> Result<Rc<dyn CumulantSeries>> {
        let spec = match &self.d_blocks {
            Some(b) => spec_from(self.d, b)?,
            None => SubalgebraSpec::scalars(self.d),
        };
        let mut t = TableSeries::new(spec.clone(), self.n_vars, self.max_order);
        for (e, entry) in self.cumulants.iter().enumerate() {
            for (i, term) in entry.terms.iter().enumerate() {
                let factors = term
                    .iter()
                    .enumerate()
                    .map(|(f, m)| to_matrix(m, self.d, &format!("cumulants[{e}].terms[{i}][{f}]")))
                    .collect::<Result<Vec<_>>>()?;
                t.add_term(entry.indices.clone(), factors)?;
            }
        }
        if self.free_over_d {
            Ok(Rc::new(construct_free_model(t, spec)?))
        } else {
            Ok(Rc::new(t))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialSpec {
    pub vars: Vec<usize>,
    pub coeffs: Vec<MatrixSpec>,
}

/// An element of a model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    /// A canonical variable of a Fock model.
    Var { var: usize },
    /// A polynomial in the canonical variables of a Fock model.
    Poly { terms: Vec<MonomialSpec> },
    /// A matrix of a matrix model.
    Matrix(MatrixSpec),
}

/// Fields shared by both model kinds.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelExtras {
    /// Index groups of variables, e.g. `[[0], [1]]` for two families.
    #[serde(default)]
    pub groups: Option<Vec<Vec<usize>>>,
    /// Candidate conjugate variables, one per variable.
    #[serde(default)]
    pub conjugates: Option<Vec<ElementSpec>>,
    #[serde(default)]
    pub scope: Option<String>,
    /// Candidate liberation gradient.
    #[serde(default)]
    pub gradient: Option<ElementSpec>,
    /// Variables generating `A_1`; `A_2` is generated by `B`.
    #[serde(default)]
    pub a1: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelFile {
    Matrix {
        variables: Vec<ElementSpec>,
        #[serde(flatten)]
        extras: ModelExtras,
    },
    Fock {
        series: SeriesFile,
        #[serde(default)]
        variables: Option<Vec<ElementSpec>>,
        #[serde(flatten)]
        extras: ModelExtras,
    },
}

/// Elements and options resolved against a space.
#[derive(Debug, Clone)]
pub struct Model<E> {
    pub variables: Vec<E>,
    pub groups: Option<Vec<Vec<usize>>>,
    pub conjugates: Option<Vec<E>>,
    pub scope: Target,
    pub gradient: Option<E>,
    pub a1: Vec<usize>,
}

pub enum LoadedModel {
    Matrix(MatrixSpace, Model<Mat>),
    Fock(FockSpace<Rc<dyn CumulantSeries>>, Model<FockPoly>),
}

fn resolve<E>(
    extras: &ModelExtras,
    variables: Vec<E>,
    element: impl Fn(&ElementSpec, &str) -> Result<E>,
) -> Result<Model<E>> {
    let n = variables.len();
    if let Some(groups) = &extras.groups {
        if groups.iter().flatten().any(|&i| i >= n) {
            return invalid(format!("groups refer to a variable index ≥ {n}"));
        }
    }
    let conjugates = match &extras.conjugates {
        Some(js) => {
            Some(js.iter().enumerate().map(|(i, j)| element(j, &format!("conjugates[{i}]"))).collect::<Result<Vec<_>>>()?)
        }
        None => None,
    };
    let gradient = extras.gradient.as_ref().map(|g| element(g, "gradient")).transpose()?;
    let a1 = extras.a1.clone().unwrap_or_else(|| (0..n).collect());
    if a1.iter().any(|&i| i >= n) {
        return invalid(format!("a1 refers to a variable index ≥ {n}"));
    }
    let scope = match &extras.scope {
        Some(s) => s.parse()?,
        None => Target::B,
    };
    Ok(Model { variables, groups: extras.groups.clone(), conjugates, scope, gradient, a1 })
}

fn matrix_element(e: &ElementSpec, n: usize, what: &str) -> Result<Mat> {
    match e {
        ElementSpec::Matrix(m) => to_matrix(m, n, what),
        _ => invalid(format!("{what}: matrix models take matrices")),
    }
}

fn fock_element(space: &FockSpace<Rc<dyn CumulantSeries>>, e: &ElementSpec, what: &str) -> Result<FockPoly> {
    let series = space.series();
    let d = series.d();
    match e {
        ElementSpec::Var { var } if *var < series.n_vars() => Ok(space.var(*var)),
        ElementSpec::Var { var } => invalid(format!("{what}: variable {var} out of range")),
        ElementSpec::Poly { terms } => {
            let mut out = Vec::with_capacity(terms.len());
            for (t, m) in terms.iter().enumerate() {
                if m.coeffs.len() != m.vars.len() + 1 || m.vars.iter().any(|&v| v >= series.n_vars()) {
                    return invalid(format!("{what}.terms[{t}]: need one more coefficient than variables, all in range"));
                }
                let coeffs = m.coeffs.iter().map(|c| to_matrix(c, d, what)).collect::<Result<Vec<_>>>()?;
                out.push(Monomial { vars: m.vars.clone(), coeffs });
            }
            Ok(FockPoly { terms: out })
        }
        ElementSpec::Matrix(m) => Ok(space.from_b(&to_matrix(m, d, what)?)),
    }
}

impl ModelFile {
    /// Resolve against a context; Fock models carry their own `B` and `D`
    /// and ignore it.
    pub fn load(&self, ctx: Option<&AlgebraContext>) -> Result<LoadedModel> {
        match self {
            ModelFile::Matrix { variables, extras } => {
                let ctx = ctx.ok_or_else(|| Error::InvalidArgument("matrix models need a context file".into()))?;
                let n = ctx.n();
                let vars = variables
                    .iter()
                    .enumerate()
                    .map(|(i, v)| matrix_element(v, n, &format!("variables[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let model = resolve(extras, vars, |e, w| matrix_element(e, n, w))?;
                Ok(LoadedModel::Matrix(MatrixSpace::new(ctx.clone()), model))
            }
            ModelFile::Fock { series, variables, extras } => {
                let space = FockSpace::new(series.build()?);
                let vars = match variables {
                    Some(vs) => vs
                        .iter()
                        .enumerate()
                        .map(|(i, v)| fock_element(&space, v, &format!("variables[{i}]")))
                        .collect::<Result<Vec<_>>>()?,
                    None => space.vars(),
                };
                let model = resolve(extras, vars, |e, w| fock_element(&space, e, w))?;
                Ok(LoadedModel::Fock(space, model))
            }
        }
    }
}

/// A list of `d × d` coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientsFile {
    pub coefficients: Vec<MatrixSpec>,
}

impl CoefficientsFile {
    pub fn build(&self, d: usize) -> Result<Vec<Mat>> {
        self.coefficients.iter().enumerate().map(|(i, c)| to_matrix(c, d, &format!("coefficients[{i}]"))).collect()
    }
}
