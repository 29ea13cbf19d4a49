use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Polynomial with complex coefficients, degree-ascending. Serialized as a
/// JSON array of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl From<Vec<[f64; 2]>> for Polynomial {
    fn from(v: Vec<[f64; 2]>) -> Self {
        Polynomial {
            coeffs: v.into_iter().map(|[a, b]| Complex64::new(a, b)).collect(),
        }
    }
}

impl From<Polynomial> for Vec<[f64; 2]> {
    fn from(p: Polynomial) -> Self {
        p.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    /// `c0 + c1 z` (affine map component).
    pub fn affine(c0: Complex64, c1: Complex64) -> Self {
        Polynomial {
            coeffs: vec![c0, c1],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    #[inline]
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (1..self.coeffs.len()).rev() {
            acc = acc * z + self.coeffs[k] * (k as f64);
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * (k as f64))
                .collect(),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Polynomial { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial {
            coeffs: vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0)],
        };
        let z = c(0.5, -1.0);
        let want = c(1.0, 0.0) + c(0.0, 2.0) * z + c(3.0, 0.0) * z * z;
        assert!((p.eval(z) - want).norm() < 1e-15);
        let wantd = c(0.0, 2.0) + c(6.0, 0.0) * z;
        assert!((p.eval_derivative(z) - wantd).norm() < 1e-15);
        assert!((p.derivative().eval(z) - wantd).norm() < 1e-15);
    }

    #[test]
    fn json_roundtrip_bitwise() {
        let p = Polynomial {
            coeffs: vec![c(0.1, -0.7), c(1.0 / 3.0, 2.0f64.sqrt()), c(1e-300, 1e300)],
        };
        let s = serde_json::to_string(&p).unwrap();
        let q: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let z = c(1.234567, -0.891011);
        assert_eq!(p.eval(z), q.eval(z));
    }
}
