use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::{Lattice, ReduceMode};

/// A point of `CP^1` in the affine chart, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cp1Point {
    Finite(Complex64),
    Infinity,
}

impl Cp1Point {
    pub fn finite(re: f64, im: f64) -> Self {
        Cp1Point::Finite(Complex64::new(re, im))
    }
}

impl From<Complex64> for Cp1Point {
    fn from(z: Complex64) -> Self {
        Cp1Point::Finite(z)
    }
}

/// Distance on `CP^1` compatible with the unit-area Fubini-Study form:
/// the arcsine of the chordal distance under the degree-1 round-sphere
/// identification. Symmetric, vanishes iff equal, satisfies the triangle
/// inequality; maximal value `pi/2` at antipodes.
pub fn fs_distance(p: Cp1Point, q: Cp1Point) -> f64 {
    let chord = match (p, q) {
        (Cp1Point::Finite(a), Cp1Point::Finite(b)) => {
            (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
        }
        (Cp1Point::Finite(a), Cp1Point::Infinity) | (Cp1Point::Infinity, Cp1Point::Finite(a)) => {
            1.0 / (1.0 + a.norm_sqr()).sqrt()
        }
        (Cp1Point::Infinity, Cp1Point::Infinity) => 0.0,
    };
    chord.min(1.0).asin()
}

/// Flat distance on `E = C/Gamma`: the minimum over lattice translates of
/// the Euclidean distance between representatives.
pub fn e_distance(a: Complex64, b: Complex64, lattice: &Lattice) -> f64 {
    let d = lattice.reduce1(a - b, ReduceMode::Centered);
    let g1 = lattice.generators()[0][0];
    let g2 = lattice.generators()[1][0];
    let mut best = f64::INFINITY;
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            let cand = d - g1 * (i as f64) - g2 * (j as f64);
            best = best.min(cand.norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fs_basic() {
        assert_eq!(fs_distance(Cp1Point::finite(0.0, 0.0), Cp1Point::finite(0.0, 0.0)), 0.0);
        // 0 and infinity are antipodal: maximal value
        let d = fs_distance(Cp1Point::finite(0.0, 0.0), Cp1Point::Infinity);
        assert_relative_eq!(d, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        // (1,-1) same as (i,-i): isometry of the identification
        let d1 = fs_distance(Cp1Point::finite(1.0, 0.0), Cp1Point::finite(-1.0, 0.0));
        let d2 = fs_distance(Cp1Point::finite(0.0, 1.0), Cp1Point::finite(0.0, -1.0));
        assert_relative_eq!(d1, d2, epsilon = 1e-15);
        assert_relative_eq!(d1, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn fs_triangle_inequality() {
        let pts = [
            Cp1Point::finite(0.3, 0.1),
            Cp1Point::finite(-2.0, 1.0),
            Cp1Point::Infinity,
            Cp1Point::finite(0.0, 5.0),
        ];
        for &a in &pts {
            for &b in &pts {
                for &x in &pts {
                    assert!(fs_distance(a, b) <= fs_distance(a, x) + fs_distance(x, b) + 1e-14);
                }
            }
        }
    }

    #[test]
    fn e_distance_periodic() {
        let l = Lattice::square();
        let a = c(0.1, 0.9);
        let b = c(0.95, 0.05);
        let d = e_distance(a, b, &l);
        // wraps around: |(0.1,0.9)-(0.95,1.05)| = |(-0.15,-0.15)|... min image
        assert!(d < 0.3);
        assert_relative_eq!(d, e_distance(a + c(3.0, -2.0), b, &l), epsilon = 1e-12);
        assert_relative_eq!(e_distance(a, a, &l), 0.0, epsilon = 1e-15);
    }
}
