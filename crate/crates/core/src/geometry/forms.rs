use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Small dense complex matrix (n <= 8 in practice), row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix", "not square"));
        }
        Ok(CMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Constant (1,1)-form `sum xi_{kl} dz_k /\ dzbar_l` on `C^n` (descending to
/// the torus). The Hermitian form `omega` is the case `xi = (i/2) Id`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantForm {
    pub xi: CMatrix,
}

impl ConstantForm {
    pub fn new(xi: CMatrix) -> Self {
        ConstantForm { xi }
    }

    /// The Euclidean Kaehler form `omega = (i/2) sum dz_j /\ dzbar_j`.
    pub fn omega(n: usize) -> Self {
        let mut xi = CMatrix::zeros(n);
        for i in 0..n {
            xi[(i, i)] = Complex64::new(0.0, 0.5);
        }
        ConstantForm { xi }
    }

    /// Basis element `dz_k /\ dzbar_l`.
    pub fn basis(n: usize, k: usize, l: usize) -> Self {
        let mut xi = CMatrix::zeros(n);
        xi[(k, l)] = Complex64::new(1.0, 0.0);
        ConstantForm { xi }
    }

    pub fn dim(&self) -> usize {
        self.xi.n
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut xi = self.xi.clone();
        for v in &mut xi.data {
            *v *= s;
        }
        ConstantForm { xi }
    }

    pub fn plus(&self, other: &ConstantForm) -> Self {
        let mut xi = self.xi.clone();
        for (v, w) in xi.data.iter_mut().zip(&other.xi.data) {
            *v += *w;
        }
        ConstantForm { xi }
    }
}

/// Pairing of the affine current `T_[v]` (normalized Nevanlinna/Ahlfors
/// current of the affine curve in direction `v`) against a constant form:
///
/// `<T_[v], phi> = -2i sum_kl v_k xi_kl conj(v_l) / |v|^2`.
///
/// Closed form; no quadrature. Rejects `v = 0`.
pub fn affine_current_pairing(v: &[Complex64], form: &ConstantForm) -> Result<Complex64> {
    let n = form.dim();
    if v.len() != n {
        return Err(Error::invalid("pairing", "dimension mismatch"));
    }
    let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::invalid("pairing", "zero direction vector"));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            s += v[k] * form.xi[(k, l)] * v[l].conj();
        }
    }
    Ok(Complex64::new(0.0, -2.0) * s / norm2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pairing_basis_example() {
        // v=(1,0), xi = E_11 -> -2i
        let v = [c(1.0, 0.0), c(0.0, 0.0)];
        let p = affine_current_pairing(&v, &ConstantForm::basis(2, 0, 0)).unwrap();
        assert_relative_eq!(p.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(p.im, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn pairing_omega_normalization() {
        // any v against omega gives 1
        let v = [c(0.3, -1.2), c(2.0, 0.7), c(0.0, 0.4)];
        let p = affine_current_pairing(&v, &ConstantForm::omega(3)).unwrap();
        assert_relative_eq!(p.re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(p.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pairing_off_diagonal() {
        // v=(1,1)/sqrt2, xi=E_12 -> -i
        let s = 1.0 / 2f64.sqrt();
        let v = [c(s, 0.0), c(s, 0.0)];
        let p = affine_current_pairing(&v, &ConstantForm::basis(2, 0, 1)).unwrap();
        assert_relative_eq!(p.im, -1.0, epsilon = 1e-14);
        assert_relative_eq!(p.re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pairing_rejects_zero_vector() {
        let v = [c(0.0, 0.0)];
        assert!(affine_current_pairing(&v, &ConstantForm::omega(1)).is_err());
    }

    #[test]
    fn pairing_linear_and_projective() {
        let v = [c(0.9, 0.1), c(-0.3, 0.8)];
        let f1 = ConstantForm::basis(2, 0, 1);
        let f2 = ConstantForm::basis(2, 1, 1);
        let a = c(1.7, -0.4);
        let b = c(0.2, 2.2);
        let lhs = affine_current_pairing(&v, &f1.scaled(a).plus(&f2.scaled(b))).unwrap();
        let rhs = a * affine_current_pairing(&v, &f1).unwrap()
            + b * affine_current_pairing(&v, &f2).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        // projective invariance
        let lam = c(-2.3, 1.9);
        let vs: Vec<Complex64> = v.iter().map(|x| x * lam).collect();
        let p1 = affine_current_pairing(&v, &f1).unwrap();
        let p2 = affine_current_pairing(&vs, &f1).unwrap();
        assert!((p1 - p2).norm() < 1e-14);
    }
}
