//! Abstract `B`-probability spaces.
//!
//! A space supplies an algebra `M ⊃ B` with `B = M_d` and a conditional
//! expectation onto `B`. `B`-values are carried as `d × d` matrices; `D`
//! and scalar expectations are obtained by composing with the `D`
//! compression or the normalised trace of `M_d`.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{AlgebraContext, SubalgebraSpec, Target};
use crate::error::Result;
use crate::linalg::{self, Mat};

pub trait NcSpace {
    type Elem: Clone;

    /// `D` inside `B = M_d`.
    fn spec(&self) -> &SubalgebraSpec;

    fn d(&self) -> usize {
        self.spec().d()
    }

    /// Embed `b ∈ M_d` into `M`.
    fn from_b(&self, b: &Mat) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn scale(&self, a: &Self::Elem, z: Complex64) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn adjoint(&self, a: &Self::Elem) -> Self::Elem;

    /// `E_B(a)` as a `d × d` matrix.
    fn expect_b(&self, a: &Self::Elem) -> Result<Mat>;

    /// Bit-exact fingerprint, used as a memo key.
    fn key(&self, a: &Self::Elem, out: &mut Vec<u64>);

    fn one(&self) -> Self::Elem {
        self.from_b(&linalg::identity(self.d()))
    }

    fn zero(&self) -> Self::Elem {
        self.from_b(&linalg::zeros(self.d()))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.scale(b, Complex64::new(-1.0, 0.0)))
    }

    fn product(&self, factors: &[Self::Elem]) -> Self::Elem {
        match factors.split_first() {
            None => self.one(),
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, f| self.mul(&acc, f)),
        }
    }

    /// Expectation onto `target`, as a `d × d` matrix.
    fn expect(&self, target: Target, a: &Self::Elem) -> Result<Mat> {
        Ok(project(self.spec(), target, &self.expect_b(a)?))
    }

    /// `τ(a)`.
    fn tau(&self, a: &Self::Elem) -> Result<Complex64> {
        Ok(self.expect_b(a)?.trace() / self.d() as f64)
    }

    /// `E_{D'}(a) = ∫ u a u* du = Σ_j (1/n_j) Σ_{a,b} e^j_{ab} a e^j_{ba}`.
    fn commutant_average(&self, a: &Self::Elem) -> Self::Elem {
        let spec = self.spec();
        let mut acc = self.zero();
        let basis = spec.basis();
        let mut idx = 0;
        for blk in spec.blocks() {
            let n = blk.size;
            let w = Complex64::new(1.0 / n as f64, 0.0);
            for p in 0..n {
                for q in 0..n {
                    let e_pq = self.from_b(&basis[idx + p * n + q]);
                    let e_qp = self.from_b(&basis[idx + q * n + p]);
                    let term = self.mul(&self.mul(&e_pq, a), &e_qp);
                    acc = self.add(&acc, &self.scale(&term, w));
                }
            }
            idx += n * n;
        }
        acc
    }
}

/// Compose a `B`-value with the expectation onto `target`.
pub fn project(spec: &SubalgebraSpec, target: Target, b: &Mat) -> Mat {
    match target {
        Target::B => b.clone(),
        Target::D => spec.project(b),
        Target::Scalar => linalg::scalar(b.nrows(), b.trace() / b.nrows() as f64),
    }
}

/// Gaussian draw from the target algebra inside `M_d`.
pub fn random_coefficient<R: Rng + ?Sized>(spec: &SubalgebraSpec, target: Target, rng: &mut R) -> Mat {
    match target {
        Target::B => linalg::ginibre(spec.d(), rng),
        Target::D => spec.random(rng),
        Target::Scalar => linalg::scalar(spec.d(), linalg::complex_gaussian(rng, 1.0)),
    }
}

/// Size of a target-valued quantity: the modulus for scalars, the
/// Frobenius norm in `M_d` otherwise.
pub fn residual_norm(target: Target, m: &Mat) -> f64 {
    match target {
        Target::Scalar => linalg::max_abs(m),
        _ => linalg::frobenius(m),
    }
}

/// A concrete matrix model as a `B`-probability space.
#[derive(Debug, Clone)]
pub struct MatrixSpace {
    pub ctx: AlgebraContext,
}

impl MatrixSpace {
    pub fn new(ctx: AlgebraContext) -> Self {
        MatrixSpace { ctx }
    }
}

impl NcSpace for MatrixSpace {
    type Elem = Mat;

    fn spec(&self) -> &SubalgebraSpec {
        self.ctx.spec()
    }

    fn from_b(&self, b: &Mat) -> Mat {
        self.ctx.embed_b(b)
    }

    fn add(&self, a: &Mat, b: &Mat) -> Mat {
        a + b
    }

    fn scale(&self, a: &Mat, z: Complex64) -> Mat {
        a * z
    }

    fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        a * b
    }

    fn adjoint(&self, a: &Mat) -> Mat {
        a.adjoint()
    }

    fn expect_b(&self, a: &Mat) -> Result<Mat> {
        self.ctx.check_shape(a)?;
        Ok(self.ctx.reduce_b(a))
    }

    fn key(&self, a: &Mat, out: &mut Vec<u64>) {
        linalg::push_bits(a, out);
    }

    fn one(&self) -> Mat {
        self.ctx.identity()
    }

    fn commutant_average(&self, a: &Mat) -> Mat {
        self.ctx.cond_exp_commutant(a)
    }
}
