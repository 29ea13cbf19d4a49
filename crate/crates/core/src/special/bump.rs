use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The exponential Runge bump `phi(z) = exp(w(z))` with
/// `w(z) = (e^{i theta} z)/x1 - 1 + eps`, where `x1` is the unrotated base
/// center and `theta` the rotation identifying this copy with the base one:
/// `phi(z) = phi_base(e^{i theta} z)` exactly, and the bump's own center is
/// `x = e^{-i theta} x1` on the same circle.
///
/// `|phi| = e^eps > 1` at the center, `|phi| < 1` on the rest of the closed
/// disc of radius `|x1|` minus the unit disc around the center (for small
/// enough `eps`; checked by [`bump_extrema`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "BumpRepr", into = "BumpRepr")]
pub struct BumpFunction {
    x1: Complex64,
    eps: f64,
    theta: f64,
    // cached: e^{i theta} and 1/x1
    rot: Complex64,
    inv_x1: Complex64,
}

/// Wire format `{x_re, x_im, eps, theta}`; `x` is the unrotated base center.
#[derive(Serialize, Deserialize)]
struct BumpRepr {
    x_re: f64,
    x_im: f64,
    eps: f64,
    theta: f64,
}

impl From<BumpRepr> for BumpFunction {
    fn from(r: BumpRepr) -> Self {
        BumpFunction::new(Complex64::new(r.x_re, r.x_im), r.eps, r.theta)
    }
}

impl From<BumpFunction> for BumpRepr {
    fn from(b: BumpFunction) -> Self {
        BumpRepr {
            x_re: b.x1.re,
            x_im: b.x1.im,
            eps: b.eps,
            theta: b.theta,
        }
    }
}

impl BumpFunction {
    /// Base bump at center `x1` (theta = 0).
    pub fn base(x1: Complex64, eps: f64) -> Self {
        BumpFunction::new(x1, eps, 0.0)
    }

    /// Rotated copy of the base bump at `x1`: the copy with angle `theta`
    /// has its own center at `e^{-i theta} x1`.
    pub fn new(x1: Complex64, eps: f64, theta: f64) -> Self {
        let rot = Complex64::new(theta.cos(), theta.sin());
        BumpFunction {
            x1,
            eps,
            theta,
            rot,
            inv_x1: Complex64::new(1.0, 0.0) / x1,
        }
    }

    /// Rotated copy centered at `x` on the same circle as `x1`; `theta` is
    /// determined by `e^{i theta} x = x1`.
    pub fn rotated_to(x1: Complex64, eps: f64, x: Complex64) -> Self {
        let mut theta = x1.arg() - x.arg();
        if theta < 0.0 {
            theta += 2.0 * std::f64::consts::PI;
        }
        if theta >= 2.0 * std::f64::consts::PI {
            theta -= 2.0 * std::f64::consts::PI;
        }
        BumpFunction::new(x1, eps, theta)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base_center(&self) -> Complex64 {
        self.x1
    }

    /// This copy's own center `e^{-i theta} x1`.
    pub fn center(&self) -> Complex64 {
        self.x1 * self.rot.conj()
    }

    pub fn circle_radius(&self) -> f64 {
        self.x1.norm()
    }

    /// Exponent `w(z)` with `phi = exp(w)`.
    #[inline]
    pub fn log_eval(&self, z: Complex64) -> Complex64 {
        (self.rot * z) * self.inv_x1 - 1.0 + self.eps
    }

    /// Derivative of the exponent: `w'(z) = e^{i theta}/x1 = 1/center`.
    #[inline]
    pub fn log_deriv(&self) -> Complex64 {
        self.rot * self.inv_x1
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.log_eval(z).exp()
    }

    /// Closed-form derivative `phi'(z) = (e^{i theta}/x1) phi(z)`.
    #[inline]
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.log_deriv() * self.eval(z)
    }
}

/// Measured extrema of a bump over the stage disc of radius `R`:
/// `m` on the closed unit-disc lens at the center, `m_prime` for `|phi'|`
/// over the disc, `m0` over the disc minus the unit disc.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BumpExtrema {
    pub m: f64,
    pub m_prime: f64,
    pub m0: f64,
}

/// Dense boundary-grid maximization with one refinement pass. `|phi|` is
/// log-linear in `z`, so each region attains its maximum on its boundary
/// arcs; we sample those and refine around the best point.
pub fn bump_extrema(bump: &BumpFunction, r: f64) -> Result<BumpExtrema> {
    let c = bump.center();
    if ((c.norm() - r) / r).abs() > 1e-9 {
        return Err(Error::invalid(
            "bump extrema",
            format!("center |{}| not on circle radius {}", c, r),
        ));
    }
    let n = 4096usize;
    let modulus = |z: Complex64| bump.log_eval(z).re;

    // arcs of the stage circle, split by membership in the unit disc
    let mut best_in = f64::NEG_INFINITY; // lens: D(c,1) cap D_R boundary pieces
    let mut best_out = f64::NEG_INFINITY; // complement boundary pieces
    let refine = |f: &dyn Fn(f64) -> (f64, bool), t0: f64, dt: f64, want_in: bool| -> f64 {
        // golden-ish refinement around t0
        let mut best = f64::NEG_INFINITY;
        let mut lo = t0 - dt;
        let mut hi = t0 + dt;
        for _ in 0..40 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let (v1, in1) = f(m1);
            let (v2, in2) = f(m2);
            let v1 = if in1 == want_in { v1 } else { f64::NEG_INFINITY };
            let v2 = if in2 == want_in { v2 } else { f64::NEG_INFINITY };
            if v1 > v2 {
                hi = m2;
                best = best.max(v1);
            } else {
                lo = m1;
                best = best.max(v2);
            }
        }
        best
    };

    // outer circle |z| = R
    let f_outer = |t: f64| -> (f64, bool) {
        let z = Complex64::from_polar(r, t);
        (modulus(z), (z - c).norm() < 1.0)
    };
    let mut best_outer_in = (f64::NEG_INFINITY, 0.0);
    let mut best_outer_out = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let t = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
        let (v, inside) = f_outer(t);
        if inside {
            if v > best_outer_in.0 {
                best_outer_in = (v, t);
            }
        } else if v > best_outer_out.0 {
            best_outer_out = (v, t);
        }
    }
    let dt = 2.0 * std::f64::consts::PI / (n as f64);
    if best_outer_in.0.is_finite() {
        best_in = best_in
            .max(best_outer_in.0)
            .max(refine(&f_outer, best_outer_in.1, dt, true));
    }
    if best_outer_out.0.is_finite() {
        best_out = best_out
            .max(best_outer_out.0)
            .max(refine(&f_outer, best_outer_out.1, dt, false));
    }

    // unit circle |z - c| = 1 (boundary between the two regions); the arc
    // inside D_R bounds both, so it feeds both maxima
    let f_unit = |t: f64| -> (f64, bool) {
        let z = c + Complex64::from_polar(1.0, t);
        (modulus(z), z.norm() <= r)
    };
    let mut best_unit = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let t = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
        let (v, inside) = f_unit(t);
        if inside && v > best_unit.0 {
            best_unit = (v, t);
        }
    }
    if best_unit.0.is_finite() {
        let v = best_unit.0.max(refine(&f_unit, best_unit.1, dt, true));
        best_in = best_in.max(v);
        best_out = best_out.max(v);
    }
    // the center itself lies on both the circle and the lens
    best_in = best_in.max(modulus(c));

    let m = best_in.exp();
    let m0 = best_out.exp();
    // |phi'| = |1/center| * |phi|; max |phi| over the whole disc is at the center
    let m_prime = bump.log_deriv().norm() * best_in.max(best_out).exp();

    if m <= 1.0 {
        return Err(Error::invalid(
            "bump extrema",
            format!("m = {m} <= 1 (eps too small)"),
        ));
    }
    if m0 >= 1.0 {
        return Err(Error::invalid(
            "bump extrema",
            format!("m0 = {m0} >= 1 (eps too large for R = {r})"),
        ));
    }
    Ok(BumpExtrema { m, m_prime, m0 })
}

/// Largest admissible bump epsilon at stage radius `r`: `eta / (2 r^2)`
/// with `eta < 1` keeps the off-disc maximum `m0 = e^{eps - 1/(2 r^2)}`
/// strictly below 1.
pub fn max_eps_for_radius(r: f64, eta: f64) -> f64 {
    eta / (2.0 * r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn value_at_center_is_e_eps() {
        let eps = 1e-3;
        let b = BumpFunction::base(c64(4.0, 0.0), eps);
        assert_relative_eq!(b.eval(c64(4.0, 0.0)).norm(), eps.exp(), epsilon = 1e-15);
        // rotated copy: own center moves, value at own center still e^eps
        let x = Complex64::from_polar(4.0, 2.1);
        let b = BumpFunction::rotated_to(c64(4.0, 0.0), eps, x);
        assert_relative_eq!(b.eval(x).norm(), eps.exp(), epsilon = 1e-12);
    }

    #[test]
    fn rotation_coherence_bitwise() {
        let eps = 2e-3;
        let x1 = c64(4.0, 0.0);
        let base = BumpFunction::base(x1, eps);
        let x = Complex64::from_polar(4.0, 4.0);
        let rotated = BumpFunction::rotated_to(x1, eps, x);
        let rot = Complex64::new(rotated.theta().cos(), rotated.theta().sin());
        for k in 0..50 {
            let z = Complex64::from_polar(0.3 + 0.1 * k as f64, 0.37 * k as f64);
            assert_eq!(rotated.eval(z), base.eval(rot * z));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let b = BumpFunction::rotated_to(c64(3.0, 1.0), 5e-4, Complex64::from_polar(10f64.sqrt(), 0.9));
        let h = 1e-6;
        for k in 0..100 {
            let z = Complex64::from_polar(2.0 + 0.01 * k as f64, 0.13 * k as f64);
            let fd = (b.eval(z + h) - b.eval(z - h)) / (2.0 * h);
            let d = b.eval_derivative(z);
            assert!((fd - d).norm() / d.norm() < 1e-6);
        }
    }

    #[test]
    fn extrema_grid() {
        let r = 4.0;
        let eps = 1e-3;
        let b = BumpFunction::base(c64(r, 0.0), eps);
        let e = bump_extrema(&b, r).unwrap();
        assert!(e.m >= eps.exp() - 1e-12);
        assert!(e.m0 < 1.0);
        assert!(e.m_prime > 0.0);
        // rotated copy has identical extrema up to 1e-9
        let b2 = BumpFunction::rotated_to(c64(r, 0.0), eps, Complex64::from_polar(r, 2.5));
        let e2 = bump_extrema(&b2, r).unwrap();
        assert!((e.m - e2.m).abs() < 1e-9);
        assert!((e.m0 - e2.m0).abs() < 1e-9);
        assert!((e.m_prime - e2.m_prime).abs() < 1e-9);
    }

    #[test]
    fn grid_max_off_region_below_one() {
        // Lemma-style property: sup over dense grid of the disc minus the
        // unit disc stays below 1.
        let r = 4.0;
        let b = BumpFunction::base(c64(r, 0.0), 1e-3);
        let mut max = 0.0f64;
        let n = 64;
        for i in 0..n {
            for j in 0..(8 * n) {
                let rr = r * (i as f64 + 0.5) / n as f64;
                let th = 2.0 * std::f64::consts::PI * j as f64 / (8 * n) as f64;
                let z = Complex64::from_polar(rr, th);
                if (z - c64(r, 0.0)).norm() >= 1.0 {
                    max = max.max(b.eval(z).norm());
                }
            }
        }
        assert!(max < 1.0, "max = {max}");
    }

    #[test]
    fn bad_eps_reported() {
        let r = 16.0;
        // eps above 1/(2 r^2): m0 >= 1
        let b = BumpFunction::base(c64(r, 0.0), 0.01);
        assert!(bump_extrema(&b, r).is_err());
    }
}
