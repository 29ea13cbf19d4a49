use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// A closed disc on which the fitted function must take a prescribed value.
#[derive(Debug, Clone, Copy)]
pub struct DiscTarget {
    pub center: Complex64,
    pub radius: f64,
    pub value: Complex64,
}

/// Outcome certificate of a constructive Runge fit: verified sup-norms on
/// independent grids twice as dense as the fitting grids, covering the
/// boundary circles and interior circles of every region (the fitted
/// difference is holomorphic, so suprema live on boundaries; interior
/// circles are sampled as a safety net).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RungeReport {
    pub degree: usize,
    pub sup_inner: f64,
    pub sup_discs: Vec<f64>,
    pub sup_guard: f64,
    pub fit_samples: usize,
    pub verify_samples: usize,
}

/// Knobs of the least-squares realization.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// degrees to try, ascending (doubling escalation)
    pub max_degree: usize,
    /// guard circles (radius, weight) where the fit is pulled toward 0 with
    /// low weight, keeping the polynomial tame on the next stage's annulus
    pub guard_circles: Vec<(f64, f64)>,
    /// weight presets (inner, pin) tried per degree
    pub weight_presets: Vec<(f64, f64)>,
    pub samples_per_circle: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_degree: 1 << 14,
            guard_circles: vec![],
            weight_presets: vec![(4.0, 1.0), (1.0, 1.0), (6.0, 2.0), (1.0, 4.0)],
            samples_per_circle: 420,
        }
    }
}

/// Constructive surrogate for Runge approximation with prescribed disc
/// values: returns a polynomial `g` with grid-verified `|g - f| < delta` on
/// the closed disc of radius `r` and `|g - value_j| < delta` on each target
/// disc. Correctness rests on the a-posteriori verification, not on the
/// least-squares fit.
pub fn multi_disc_runge(
    f: &Polynomial,
    r: f64,
    targets: &[DiscTarget],
    delta: f64,
) -> Result<(Polynomial, RungeReport)> {
    validate_geometry(r, targets)?;
    let fun = |z: Complex64| f.eval(z);
    let (rho, report) = runge_correction(&fun, r, targets, delta, &FitOptions::default())?;
    Ok((f.add(&rho), report))
}

/// Core engine: fits a correction polynomial `rho` with `|rho| < delta` on
/// the closed disc of radius `r` and `|f + rho - value_j| < delta` on each
/// target disc; returns `rho`. The caller's function `f` is carried exactly
/// and only sampled, never approximated on the inner disc.
pub fn runge_correction(
    f: &dyn Fn(Complex64) -> Complex64,
    r: f64,
    targets: &[DiscTarget],
    delta: f64,
    opts: &FitOptions,
) -> Result<(Polynomial, RungeReport)> {
    validate_geometry(r, targets)?;
    if delta <= 0.0 {
        return Err(Error::invalid("runge", "delta must be positive"));
    }
    if targets.is_empty() {
        // zero correction; verify trivially
        let report = RungeReport {
            degree: 0,
            sup_inner: 0.0,
            sup_discs: vec![],
            sup_guard: 0.0,
            fit_samples: 0,
            verify_samples: 0,
        };
        return Ok((Polynomial::zero(), report));
    }

    let outer = targets
        .iter()
        .map(|t| t.center.norm() + t.radius)
        .fold(r, f64::max);
    let guard_outer = opts
        .guard_circles
        .iter()
        .map(|&(g, _)| g)
        .fold(outer, f64::max);
    // power-of-two scale keeps monomial coefficients exactly representable
    let scale = 2.0f64.powi(guard_outer.log2().ceil() as i32);

    let mut best: Option<(f64, Polynomial, RungeReport)> = None;
    let mut degree = 16usize;
    while degree <= opts.max_degree {
        for &(w_inner, w_pin) in &opts.weight_presets {
            let (rho, report) = fit_once(f, r, targets, opts, degree, scale, w_inner, w_pin);
            let worst = report
                .sup_inner
                .max(report.sup_discs.iter().cloned().fold(0.0, f64::max));
            if worst < delta {
                return Ok((rho, report));
            }
            if best.as_ref().map_or(true, |(b, _, _)| worst < *b) {
                best = Some((worst, rho, report));
            }
        }
        // stagnation: stop escalating once doubling stops helping
        if degree >= 256 {
            if let Some((b, _, _)) = &best {
                if *b > 50.0 * delta {
                    break;
                }
            }
        }
        degree *= 2;
    }
    let (_, _, report) = best.unwrap();
    Err(Error::RungeFailed {
        inner: report.sup_inner,
        discs: report.sup_discs,
    })
}

fn validate_geometry(r: f64, targets: &[DiscTarget]) -> Result<()> {
    if r <= 0.0 {
        return Err(Error::invalid("runge", "inner radius must be positive"));
    }
    for (i, t) in targets.iter().enumerate() {
        if t.radius <= 0.0 {
            return Err(Error::invalid("runge", "disc radius must be positive"));
        }
        if t.center.norm() - t.radius < r {
            return Err(Error::invalid(
                "runge",
                format!("disc {i} intersects the closed inner disc"),
            ));
        }
        for (j, u) in targets.iter().enumerate().skip(i + 1) {
            if (t.center - u.center).norm() <= t.radius + u.radius {
                return Err(Error::invalid(
                    "runge",
                    format!("discs {i} and {j} are not disjoint"),
                ));
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fit_once(
    f: &dyn Fn(Complex64) -> Complex64,
    r: f64,
    targets: &[DiscTarget],
    opts: &FitOptions,
    degree: usize,
    scale: f64,
    w_inner: f64,
    w_pin: f64,
) -> (Polynomial, RungeReport) {
    let ns = opts.samples_per_circle;
    let mut zs: Vec<Complex64> = Vec::new();
    let mut fs: Vec<Complex64> = Vec::new();
    let mut ws: Vec<f64> = Vec::new();
    let circle = |rr: f64, c: Complex64, k: usize, n: usize| {
        c + Complex64::from_polar(rr, 2.0 * std::f64::consts::PI * (k as f64 + 0.13) / n as f64)
    };
    // inner region: rho ~ 0 on concentric circles filling the disc
    for step in 1..=5 {
        let rr = r * step as f64 / 5.0;
        for k in 0..ns {
            zs.push(circle(rr, Complex64::new(0.0, 0.0), k, ns));
            fs.push(Complex64::new(0.0, 0.0));
            ws.push(w_inner);
        }
    }
    for &(g, w) in &opts.guard_circles {
        for k in 0..ns {
            zs.push(circle(g, Complex64::new(0.0, 0.0), k, ns));
            fs.push(Complex64::new(0.0, 0.0));
            ws.push(w);
        }
    }
    // pin discs: rho ~ value - f, sampled slightly beyond the boundary too
    for t in targets {
        for rr in [1.12, 0.85, 0.55, 0.25] {
            for k in 0..ns {
                let z = circle(rr * t.radius, t.center, k, ns);
                zs.push(z);
                fs.push(t.value - f(z));
                ws.push(w_pin);
            }
        }
    }
    let coeffs_scaled = weighted_ls(&zs, &fs, &ws, degree, scale);
    // exact rescale: scale is a power of two
    let coeffs: Vec<Complex64> = coeffs_scaled
        .iter()
        .enumerate()
        .map(|(k, c)| c / scale.powi(k as i32))
        .collect();
    let rho = Polynomial { coeffs };

    // independent verification on denser grids
    let nv = 2 * ns;
    let mut sup_inner = 0.0f64;
    for step in 1..=10 {
        let rr = r * step as f64 / 10.0;
        for k in 0..nv {
            let z = circle(rr, Complex64::new(0.0, 0.0), k, nv);
            sup_inner = sup_inner.max(rho.eval(z).norm());
        }
    }
    let mut sup_discs = Vec::with_capacity(targets.len());
    for t in targets {
        let mut s = 0.0f64;
        for rr in [1.0, 0.8, 0.55, 0.3, 0.05] {
            for k in 0..nv {
                let z = circle(rr * t.radius, t.center, k, nv);
                s = s.max((f(z) + rho.eval(z) - t.value).norm());
            }
        }
        sup_discs.push(s);
    }
    let mut sup_guard = 0.0f64;
    for &(g, _) in &opts.guard_circles {
        for k in 0..nv {
            let z = circle(g, Complex64::new(0.0, 0.0), k, nv);
            sup_guard = sup_guard.max(rho.eval(z).norm());
        }
    }
    let report = RungeReport {
        degree,
        sup_inner,
        sup_discs,
        sup_guard,
        fit_samples: zs.len(),
        verify_samples: nv,
    };
    (rho, report)
}

/// Weighted least squares on the column-equilibrated scaled Vandermonde
/// matrix, solved by Householder QR. Returns coefficients in the
/// `(z/scale)^k` basis.
fn weighted_ls(
    zs: &[Complex64],
    fs: &[Complex64],
    ws: &[f64],
    degree: usize,
    scale: f64,
) -> Vec<Complex64> {
    let m = zs.len();
    let n = (degree + 1).min(m);
    // column-major matrix
    let mut a = vec![Complex64::new(0.0, 0.0); m * n];
    for (i, &z) in zs.iter().enumerate() {
        let zq = z / scale;
        let mut p = Complex64::new(ws[i], 0.0);
        for j in 0..n {
            a[j * m + i] = p;
            p *= zq;
        }
    }
    let mut col_norm = vec![0.0f64; n];
    for j in 0..n {
        let s: f64 = a[j * m..(j + 1) * m].iter().map(|c| c.norm_sqr()).sum();
        let s = s.sqrt();
        col_norm[j] = if s > 0.0 { s } else { 1.0 };
        for v in &mut a[j * m..(j + 1) * m] {
            *v /= col_norm[j];
        }
    }
    let mut b: Vec<Complex64> = fs.iter().zip(ws).map(|(&f, &w)| f * w).collect();

    // Householder QR applied in place; reflectors applied to b on the fly
    for j in 0..n {
        // reflector for column j, rows j..m
        let (head, alpha) = {
            let col = &a[j * m + j..(j + 1) * m];
            let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = col[0];
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
            (phase * norm, -(phase * norm))
        };
        // v = x - alpha e1 where alpha = -phase*norm so v0 = x0 + head
        let mut v: Vec<Complex64> = a[j * m + j..(j + 1) * m].to_vec();
        v[0] += head;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // apply to remaining columns
        for jj in j..n {
            let col = &mut a[jj * m + j..(jj + 1) * m];
            let dot: Complex64 = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
            let fac = dot * (2.0 / vnorm2);
            for (ci, vi) in col.iter_mut().zip(v.iter()) {
                *ci -= fac * vi;
            }
        }
        // apply to rhs
        let rb = &mut b[j..m];
        let dot: Complex64 = v.iter().zip(rb.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
        let fac = dot * (2.0 / vnorm2);
        for (ci, vi) in rb.iter_mut().zip(v.iter()) {
            *ci -= fac * vi;
        }
        a[j * m + j] = alpha;
        for i in j + 1..m {
            a[j * m + i] = Complex64::new(0.0, 0.0);
        }
    }
    // back substitution on the n x n triangle
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for j in (0..n).rev() {
        let mut s = b[j];
        for k in j + 1..n {
            s -= a[k * m + j] * c[k];
        }
        let d = a[j * m + j];
        c[j] = if d.norm() > 1e-300 { s / d } else { Complex64::new(0.0, 0.0) };
    }
    for j in 0..n {
        c[j] /= col_norm[j];
    }
    c
}
