//! Dense complex matrix helpers shared by every module.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense complex matrix; every algebra element is stored as one.
pub type Mat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(n: usize) -> Mat {
    Mat::zeros(n, n)
}

pub fn scalar(n: usize, z: Complex64) -> Mat {
    Mat::from_diagonal_element(n, n, z)
}

/// Matrix unit `e_{ij}` in `M_n`.
pub fn unit(n: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(n);
    m[(i, j)] = ONE;
    m
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// `a ⊗ b` with the first factor as the slow index.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Complex Gaussian entry with `E|z|^2 = var`: real and imaginary parts
/// independent with variance `var / 2` each.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Ginibre matrix with unit-variance complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    Mat::from_fn(n, n, |_, _| complex_gaussian(rng, 1.0))
}

/// Random Hermitian matrix normalised so that its entries have unit scale.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let g = ginibre(n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Haar-distributed unitary in `U(n)`: QR of a Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let qr = ginibre(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &Mat) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn is_hermitian(m: &Mat, tol: f64) -> bool {
    max_abs(&(m - m.adjoint())) <= tol
}

/// Push the bit patterns of every entry; used for memo keys.
pub(crate) fn push_bits(m: &Mat, out: &mut Vec<u64>) {
    out.push(m.nrows() as u64);
    for z in m.iter() {
        out.push(z.re.to_bits());
        out.push(z.im.to_bits());
    }
}

/// Moore–Penrose solve `x = A^+ y` with singular values below `cutoff`
/// discarded.
pub fn pinv_solve(a: &Mat, y: &nalgebra::DVector<Complex64>, cutoff: f64) -> nalgebra::DVector<Complex64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let uty = u.adjoint() * y;
    let mut scaled = nalgebra::DVector::<Complex64>::zeros(svd.singular_values.len());
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > cutoff {
            scaled[i] = uty[i] / *s;
        }
    }
    vt.adjoint() * scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 16] {
            let u = haar_unitary(n, &mut rng);
            assert!(max_abs(&(&u * u.adjoint() - identity(n))) < 1e-12);
        }
    }

    #[test]
    fn hermitian_spectrum_of_diagonal() {
        let m = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]));
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn pinv_recovers_consistent_solution() {
        let a = Mat::from_row_slice(3, 2, &[ONE, ZERO, ZERO, ONE, ONE, ONE]);
        let x = nalgebra::DVector::from_vec(vec![c(2.0, 1.0), c(-1.0, 0.5)]);
        let y = &a * &x;
        let got = pinv_solve(&a, &y, 1e-10);
        assert!((got - x).norm() < 1e-12);
    }
}
