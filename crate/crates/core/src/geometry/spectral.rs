use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::forms::CMatrix;
use crate::error::{Error, Result};

const HERM_TOL: f64 = 1e-12;

/// A point of the mass-1 cone `C_1`: a positive semidefinite Hermitian
/// trace-1 matrix `H`, encoding the current `T` with
/// `<T, dz_k /\ dzbar_l> = -2i H_{kl}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TargetRepr", into = "TargetRepr")]
pub struct TargetCurrent {
    h: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct TargetRepr {
    n: usize,
    #[serde(rename = "H_re")]
    h_re: Vec<Vec<f64>>,
    #[serde(rename = "H_im")]
    h_im: Vec<Vec<f64>>,
}

impl From<TargetCurrent> for TargetRepr {
    fn from(t: TargetCurrent) -> Self {
        let n = t.h.n;
        TargetRepr {
            n,
            h_re: (0..n)
                .map(|i| (0..n).map(|j| t.h[(i, j)].re).collect())
                .collect(),
            h_im: (0..n)
                .map(|i| (0..n).map(|j| t.h[(i, j)].im).collect())
                .collect(),
        }
    }
}

impl TryFrom<TargetRepr> for TargetCurrent {
    type Error = Error;
    fn try_from(r: TargetRepr) -> Result<Self> {
        let n = r.n;
        if r.h_re.len() != n || r.h_im.len() != n {
            return Err(Error::invalid("target current", "H shape mismatch"));
        }
        let rows: Vec<Vec<Complex64>> = r
            .h_re
            .iter()
            .zip(&r.h_im)
            .map(|(re, im)| {
                re.iter()
                    .zip(im)
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect()
            })
            .collect();
        TargetCurrent::new(CMatrix::from_rows(&rows)?)
    }
}

impl TargetCurrent {
    /// Validates the invariants: Hermitian, PSD (eigenvalues >= -1e-12
    /// relative), trace 1 within 1e-12.
    pub fn new(h: CMatrix) -> Result<Self> {
        let defect = h.hermitian_defect();
        if defect > HERM_TOL {
            return Err(Error::invalid(
                "target current",
                format!("H not Hermitian: max |H - H*| = {defect:.3e}"),
            ));
        }
        let tr = h.trace();
        if (tr.re - 1.0).abs() > HERM_TOL || tr.im.abs() > HERM_TOL {
            return Err(Error::invalid(
                "target current",
                format!("trace(H) = {tr} (must be 1)"),
            ));
        }
        let (vals, _) = jacobi_hermitian(&h);
        let scale = vals.iter().cloned().fold(1.0f64, f64::max);
        if let Some(&min) = vals
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
            .filter(|&&m| m < -HERM_TOL * scale.max(1.0))
        {
            return Err(Error::invalid(
                "target current",
                format!("H indefinite: eigenvalue {min:.3e} < 0"),
            ));
        }
        Ok(TargetCurrent { h })
    }

    /// Rank-one target `v v*` for a unit vector `v`.
    pub fn rank_one(v: &[Complex64]) -> Result<Self> {
        let n = v.len();
        let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::invalid("target current", "zero vector"));
        }
        let mut h = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = v[i] * v[j].conj() / norm2;
            }
        }
        TargetCurrent::new(h)
    }

    pub fn diagonal(betas: &[f64]) -> Result<Self> {
        let n = betas.len();
        let mut h = CMatrix::zeros(n);
        for i in 0..n {
            h[(i, i)] = Complex64::new(betas[i], 0.0);
        }
        TargetCurrent::new(h)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.n
    }

    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        self.h[(k, l)]
    }
}

/// Spectral data of a target current: `H = sum beta_s v_s v_s*` with
/// orthonormal directions and nonnegative weights summing to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub betas: Vec<f64>,
    pub directions: Vec<Vec<Complex64>>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.betas.len();
        let mut m = CMatrix::zeros(n);
        for (b, v) in self.betas.iter().zip(&self.directions) {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += v[i] * v[j].conj() * *b;
                }
            }
        }
        m
    }
}

/// Eigendecomposition of a target current by cyclic Jacobi rotations.
/// Deterministic output: eigenvalues sorted descending, each direction
/// phase-fixed so its first component of magnitude > 1e-12 is real
/// positive, exact ties broken by lexicographic comparison.
pub fn spectral_decompose(t: &TargetCurrent) -> Result<SpectralDecomposition> {
    let (vals, vecs) = jacobi_hermitian(t.matrix());
    let n = vals.len();
    let mut items: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut col: Vec<Complex64> = (0..n).map(|i| vecs[(i, k)]).collect();
            phase_fix(&mut col);
            (vals[k].max(0.0), col)
        })
        .collect();
    items.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| lex_cmp(&a.1, &b.1))
    });
    Ok(SpectralDecomposition {
        betas: items.iter().map(|x| x.0).collect(),
        directions: items.into_iter().map(|x| x.1).collect(),
    })
}

fn phase_fix(v: &mut [Complex64]) {
    if let Some(&x) = v.iter().find(|c| c.norm() > 1e-12) {
        let u = x.conj() / x.norm();
        for c in v.iter_mut() {
            *c *= u;
        }
    }
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x
            .re
            .partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
        {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Cyclic Jacobi for Hermitian matrices; returns (eigenvalues, eigenvector
/// matrix with eigenvectors in columns).
fn jacobi_hermitian(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.n;
    let mut a = h.clone();
    // symmetrize to guard against last-bit asymmetry
    for i in 0..n {
        for j in 0..n {
            let s = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = s;
        }
    }
    let mut v = CMatrix::identity(n);
    let norm: f64 = a.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let tol = 1e-15 * norm.max(1e-300);
    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= tol * 1e-2 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let u = apq / apq.norm(); // phase
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;
                // J = I except J[p][p]=c, J[p][q]=s*u, J[q][p]=-s*conj(u), J[q][q]=c
                let s_u = sth * u;
                // A <- J^H A J
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cth - aiq * s_u.conj();
                    a[(i, q)] = aip * s_u + aiq * cth;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cth - aqj * s_u;
                    a[(q, j)] = apj * s_u.conj() + aqj * cth;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cth - viq * s_u.conj();
                    v[(i, q)] = vip * s_u + viq * cth;
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[(i, i)].re).collect();
    (vals, v)
}
