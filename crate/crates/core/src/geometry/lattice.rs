use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A full-rank lattice `Lambda` in `C^n`, given by `2n` generators that are
/// linearly independent over the reals. `covolume` is the Lebesgue volume of
/// the fundamental parallelepiped (the area `rho` of the fundamental domain
/// when `n = 1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    n: usize,
    generators: Vec<Vec<Complex64>>,
    covolume: f64,
    // inverse of the real 2n x 2n generator matrix, row-major
    inv: Vec<f64>,
}

/// Wire format: `{"n": int, "generators_re": [[..]], "generators_im": [[..]]}`.
#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    n: usize,
    generators_re: Vec<Vec<f64>>,
    generators_im: Vec<Vec<f64>>,
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr {
            n: l.n,
            generators_re: l
                .generators
                .iter()
                .map(|g| g.iter().map(|c| c.re).collect())
                .collect(),
            generators_im: l
                .generators
                .iter()
                .map(|g| g.iter().map(|c| c.im).collect())
                .collect(),
        }
    }
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        if r.generators_re.len() != r.generators_im.len() {
            return Err(Error::invalid("lattice", "re/im generator count mismatch"));
        }
        let gens: Vec<Vec<Complex64>> = r
            .generators_re
            .iter()
            .zip(&r.generators_im)
            .map(|(re, im)| {
                re.iter()
                    .zip(im)
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect()
            })
            .collect();
        Lattice::new(r.n, gens)
    }
}

impl Lattice {
    pub fn new(n: usize, generators: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("lattice", "dimension must be positive"));
        }
        if generators.len() != 2 * n {
            return Err(Error::invalid(
                "lattice",
                format!("need {} generators, got {}", 2 * n, generators.len()),
            ));
        }
        if generators.iter().any(|g| g.len() != n) {
            return Err(Error::invalid("lattice", "generator has wrong dimension"));
        }
        // real 2n x 2n matrix: column j = generator j as (re_1..re_n, im_1..im_n)
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for (j, g) in generators.iter().enumerate() {
            for i in 0..n {
                a[i * m + j] = g[i].re;
                a[(n + i) * m + j] = g[i].im;
            }
        }
        let (inv, det) = invert_real(&a, m).ok_or_else(|| {
            Error::invalid("lattice", "generators are not R-linearly independent")
        })?;
        Ok(Lattice {
            n,
            generators,
            covolume: det.abs(),
            inv,
        })
    }

    /// Rank-2 lattice in `C` spanned by `g1, g2`.
    pub fn rank2(g1: Complex64, g2: Complex64) -> Result<Self> {
        Lattice::new(1, vec![vec![g1], vec![g2]])
    }

    /// The square lattice `Z + iZ`.
    pub fn square() -> Self {
        Lattice::rank2(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<Complex64>] {
        &self.generators
    }

    /// Covolume; for `n = 1` this is the area `rho` of the fundamental domain.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Real coordinates of `z` with respect to the generators.
    pub fn coords(&self, z: &[Complex64]) -> Vec<f64> {
        let m = 2 * self.n;
        let mut v = vec![0.0; m];
        for i in 0..self.n {
            v[i] = z[i].re;
            v[self.n + i] = z[i].im;
        }
        let mut c = vec![0.0; m];
        for i in 0..m {
            let mut s = 0.0;
            for j in 0..m {
                s += self.inv[i * m + j] * v[j];
            }
            c[i] = s;
        }
        c
    }

    fn from_coords(&self, c: &[f64]) -> Vec<Complex64> {
        let mut z = vec![Complex64::new(0.0, 0.0); self.n];
        for (j, g) in self.generators.iter().enumerate() {
            for i in 0..self.n {
                z[i] += g[i] * c[j];
            }
        }
        z
    }

    /// Reduce into the fundamental domain. `Floor` puts generator
    /// coordinates in `[0,1)`, `Centered` in `[-1/2, 1/2)`.
    pub fn reduce(&self, z: &[Complex64], mode: ReduceMode) -> Vec<Complex64> {
        let mut c = self.coords(z);
        for x in &mut c {
            *x = match mode {
                ReduceMode::Floor => *x - x.floor(),
                ReduceMode::Centered => *x - (*x + 0.5).floor(),
            };
        }
        self.from_coords(&c)
    }

    /// Scalar convenience for `n = 1`.
    pub fn reduce1(&self, z: Complex64, mode: ReduceMode) -> Complex64 {
        debug_assert_eq!(self.n, 1);
        self.reduce(&[z], mode)[0]
    }

    /// Circumradius of the centered fundamental domain (for `n = 1`).
    pub fn cell_radius(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| g.iter().map(|c| c.norm()).sum::<f64>())
            .sum::<f64>()
            / 2.0
    }

    /// Fast centered reduction for `n = 1` without allocation.
    #[inline]
    pub fn reduce1_centered_fast(&self, z: Complex64) -> Complex64 {
        let m = 2;
        let c0 = self.inv[0] * z.re + self.inv[1] * z.im;
        let c1 = self.inv[m] * z.re + self.inv[m + 1] * z.im;
        let c0 = c0 - (c0 + 0.5).floor();
        let c1 = c1 - (c1 + 0.5).floor();
        self.generators[0][0] * c0 + self.generators[1][0] * c1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceMode {
    Floor,
    Centered,
}

/// Reduce a point of `C^n` into the fundamental domain of `L`
/// (generator coordinates in `[0,1)`); total function.
pub fn reduce_mod_lattice(z: &[Complex64], lattice: &Lattice) -> Vec<Complex64> {
    lattice.reduce(z, ReduceMode::Floor)
}

/// Gauss-Jordan inverse with partial pivoting; returns (inverse, det).
fn invert_real(a: &[f64], m: usize) -> Option<(Vec<f64>, f64)> {
    let mut w = a.to_vec();
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..m {
        let mut piv = col;
        let mut best = w[col * m + col].abs();
        for r in col + 1..m {
            let v = w[r * m + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-14 {
            return None;
        }
        if piv != col {
            for j in 0..m {
                w.swap(col * m + j, piv * m + j);
                inv.swap(col * m + j, piv * m + j);
            }
            det = -det;
        }
        let d = w[col * m + col];
        det *= d;
        for j in 0..m {
            w[col * m + j] /= d;
            inv[col * m + j] /= d;
        }
        for r in 0..m {
            if r != col {
                let f = w[r * m + col];
                if f != 0.0 {
                    for j in 0..m {
                        w[r * m + j] -= f * w[col * m + j];
                        inv[r * m + j] -= f * inv[col * m + j];
                    }
                }
            }
        }
    }
    Some((inv, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn covolume_square_lattice() {
        let l = Lattice::square();
        assert!((l.covolume() - 1.0).abs() < 1e-15);
        // n=1: rho = |Im(conj(g1) g2)|
        let g1 = c(2.0, 0.5);
        let g2 = c(-0.3, 1.7);
        let l = Lattice::rank2(g1, g2).unwrap();
        assert!((l.covolume() - (g1.conj() * g2).im.abs()).abs() < 1e-12);
    }

    #[test]
    fn reduce_examples() {
        let l = Lattice::square();
        // lattice point -> 0
        let p = l.reduce1(c(0.0, 0.0), ReduceMode::Floor);
        assert!(p.norm() < 1e-15);
        // a generator maps to the origin
        let p = l.reduce1(c(1.0, 0.0), ReduceMode::Floor);
        assert!(p.norm() < 1e-12);
        // coordinate-wise fractional part
        let p = l.reduce1(c(0.5, 1.5), ReduceMode::Floor);
        assert!((p - c(0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn reduce_idempotent_and_periodic() {
        let l = Lattice::rank2(c(1.3, 0.2), c(-0.4, 1.1)).unwrap();
        let z = c(7.77, -3.21);
        let p = l.reduce1(z, ReduceMode::Floor);
        let pp = l.reduce1(p, ReduceMode::Floor);
        assert!((p - pp).norm() < 1e-12);
        for g in [c(1.3, 0.2), c(-0.4, 1.1)] {
            let q = l.reduce1(z + g, ReduceMode::Floor);
            assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn degenerate_generators_rejected() {
        let r = Lattice::rank2(c(1.0, 0.0), c(2.0, 0.0));
        assert!(r.is_err());
    }

    #[test]
    fn json_roundtrip() {
        let l = Lattice::rank2(c(1.0, 0.1), c(0.2, 1.4)).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        let l2: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(l.covolume(), l2.covolume());
        let z = c(0.37, 0.91);
        assert_eq!(
            l.reduce1(z, ReduceMode::Centered),
            l2.reduce1(z, ReduceMode::Centered)
        );
    }
}
