//! Low-degree real polynomials: roots with multiplicities and partial
//! fractions of proper rational functions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
// Float math for targets whose `core` lacks it.
#[allow(unused_imports)]
use num_traits::Float;

/// Relative distance below which two roots are treated as one repeated root.
pub(crate) const CLUSTER_TOL: f64 = 1e-9;

/// Coefficients in ascending order: `c[0] + c[1]·x + …`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.len() > 1 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        Poly(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let out = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) - other.0.get(i).copied().unwrap_or(0.0))
            .collect();
        Poly::new(out)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c)
    }

    fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Distinct roots with multiplicities. Degree is limited to three, which
    /// covers every Laplace exponent in this crate.
    pub fn roots(&self) -> Result<Vec<(Complex64, usize)>> {
        let deg = self.degree();
        if deg == 0 {
            return Ok(Vec::new());
        }
        if deg > 3 {
            return Err(Error::RootFindingFailure(format!(
                "degree {deg} is not supported"
            )));
        }
        let mut raw: Vec<Complex64> = Vec::with_capacity(deg);
        // Exact zero roots come first so that q = 0 cases stay exact.
        let zeros = self.0.iter().take_while(|c| **c == 0.0).count();
        raw.extend(core::iter::repeat_n(Complex64::zero(), zeros));
        let rest = &self.0[zeros..];
        match rest.len() - 1 {
            0 => {}
            1 => raw.push(Complex64::new(-rest[0] / rest[1], 0.0)),
            2 => raw.extend(quadratic(rest[2], rest[1], rest[0])),
            3 => {
                let r = cubic_real_root(rest)?;
                let b1 = rest[2] + rest[3] * r;
                let b0 = rest[1] + b1 * r;
                raw.push(Complex64::new(r, 0.0));
                raw.extend(quadratic(rest[3], b1, b0));
                let p = Poly(rest.to_vec());
                for z in raw.iter_mut().skip(zeros) {
                    *z = polish(&p, *z);
                }
                if raw[zeros + 1].im != 0.0 {
                    raw[zeros + 2] = raw[zeros + 1].conj();
                }
            }
            _ => unreachable!(),
        }
        if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::RootFindingFailure("non-finite root".into()));
        }
        Ok(cluster(raw))
    }
}

fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
        if q == 0.0 {
            return [Complex64::zero(), Complex64::zero()];
        }
        [Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a).abs();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// One real root of a cubic (coefficients ascending, leading one nonzero).
fn cubic_real_root(c: &[f64]) -> Result<f64> {
    let p = Poly(c.to_vec());
    let bound = 1.0 + c[..3].iter().map(|x| (x / c[3]).abs()).fold(0.0, f64::max);
    let (mut lo, mut hi) = (-bound, bound);
    let mut flo = p.eval(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == p.eval(hi).signum() {
        return Err(Error::RootFindingFailure("cubic bracket failed".into()));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A few Newton steps on the full polynomial, kept only if they reduce the
/// residual.
fn polish(p: &Poly, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    for _ in 0..4 {
        let f = p.eval_c(z);
        let d = dp.eval_c(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - f / d;
        if p.eval_c(next).norm() < f.norm() {
            z = next;
        } else {
            break;
        }
    }
    z
}

fn cluster(raw: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for z in raw {
        let hit = out.iter_mut().find(|(w, _)| {
            let scale = 1.0f64.max(w.norm()).max(z.norm());
            (*w - z).norm() <= CLUSTER_TOL * scale
        });
        match hit {
            Some((w, m)) => {
                *w = (*w * (*m as f64) + z) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((z, 1)),
        }
    }
    out
}

/// Taylor coefficients of a complex polynomial around `at`.
fn taylor(coeffs: &[Complex64], at: Complex64) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    let n = c.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let next = c[j + 1];
            c[j] += at * next;
        }
    }
    c
}

/// One inverse-Laplace term `coef · x^power · e^{rate·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ExpTerm {
    pub coef: Complex64,
    pub rate: Complex64,
    pub power: u32,
}

/// Expands `num/den` (`deg num < deg den`) into terms whose Laplace
/// transforms sum back to `num/den`.
pub(crate) fn partial_fractions(num: &Poly, den: &Poly) -> Result<Vec<ExpTerm>> {
    if num.degree() >= den.degree() {
        return Err(Error::RootFindingFailure(
            "rational function is not proper".into(),
        ));
    }
    let roots = den.roots()?;
    let lead = *den.0.last().unwrap();
    let num_c: Vec<Complex64> = num.0.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let mut terms = Vec::new();
    for (idx, &(root, mult)) in roots.iter().enumerate() {
        // Cofactor: den / (β − root)^mult.
        let mut cof = vec![Complex64::new(lead, 0.0)];
        for (j, &(other, m)) in roots.iter().enumerate() {
            if j == idx {
                continue;
            }
            for _ in 0..m {
                let mut next = vec![Complex64::zero(); cof.len() + 1];
                for (k, c) in cof.iter().enumerate() {
                    next[k + 1] += *c;
                    next[k] -= *c * other;
                }
                cof = next;
            }
        }
        let p = taylor(&num_c, root);
        let s = taylor(&cof, root);
        if s[0].norm() == 0.0 {
            return Err(Error::RootFindingFailure("coincident roots".into()));
        }
        let mut r: Vec<Complex64> = Vec::with_capacity(mult);
        for k in 0..mult {
            let mut acc = p.get(k).copied().unwrap_or_else(Complex64::zero);
            for j in 1..=k {
                acc -= s.get(j).copied().unwrap_or_else(Complex64::zero) * r[k - j];
            }
            r.push(acc / s[0]);
        }
        for (k, rk) in r.iter().enumerate() {
            let power = (mult - k - 1) as u32;
            let fact: f64 = (1..=power).map(|v| v as f64).product();
            terms.push(ExpTerm {
                coef: *rk / fact,
                rate: root,
                power,
            });
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn quadratic_roots_real_and_complex() {
        let r = Poly::new(vec![-1.0, 0.0, 1.0]).roots().unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|(z, _)| close(*z, Complex64::new(1.0, 0.0), 1e-15)));
        assert!(r.iter().any(|(z, _)| close(*z, Complex64::new(-1.0, 0.0), 1e-15)));

        let r = Poly::new(vec![5.0, 2.0, 1.0]).roots().unwrap();
        assert!(r.iter().any(|(z, _)| close(*z, Complex64::new(-1.0, 2.0), 1e-14)));
        assert!(r.iter().any(|(z, _)| close(*z, Complex64::new(-1.0, -2.0), 1e-14)));
    }

    #[test]
    fn repeated_zero_root() {
        let r = Poly::new(vec![0.0, 0.0, 0.5]).roots().unwrap();
        assert_eq!(r, vec![(Complex64::zero(), 2)]);
    }

    #[test]
    fn cubic_roots() {
        // (x − 1)(x + 2)(x − 3) = x³ − 2x² − 5x + 6
        let r = Poly::new(vec![6.0, -5.0, -2.0, 1.0]).roots().unwrap();
        for want in [1.0, -2.0, 3.0] {
            assert!(r
                .iter()
                .any(|(z, m)| *m == 1 && close(*z, Complex64::new(want, 0.0), 1e-12)));
        }
        // (x − 1)²(x + 1): double root recovered by clustering.
        let r = Poly::new(vec![1.0, -1.0, -1.0, 1.0]).roots().unwrap();
        assert!(r
            .iter()
            .any(|(z, m)| *m == 2 && close(*z, Complex64::new(1.0, 0.0), 1e-8)));
    }

    #[test]
    fn partial_fractions_simple_and_double() {
        // 2/(β² − 1) = 1/(β − 1) − 1/(β + 1)
        let t = partial_fractions(&Poly::new(vec![2.0]), &Poly::new(vec![-1.0, 0.0, 1.0])).unwrap();
        let plus = t.iter().find(|t| t.rate.re > 0.0).unwrap();
        let minus = t.iter().find(|t| t.rate.re < 0.0).unwrap();
        assert!(close(plus.coef, Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(minus.coef, Complex64::new(-1.0, 0.0), 1e-15));

        // 2/β² ↦ 2x
        let t = partial_fractions(&Poly::new(vec![2.0]), &Poly::new(vec![0.0, 0.0, 1.0])).unwrap();
        let lin = t.iter().find(|t| t.power == 1).unwrap();
        assert!(close(lin.coef, Complex64::new(2.0, 0.0), 1e-15));
        assert!(t.iter().filter(|t| t.power == 0).all(|t| t.coef.norm() < 1e-15));

        // (β + 3)/β³ ↦ x + 3x²/2
        let t = partial_fractions(&Poly::new(vec![3.0, 1.0]), &Poly::new(vec![0.0, 0.0, 0.0, 1.0]))
            .unwrap();
        let quad = t.iter().find(|t| t.power == 2).unwrap();
        let lin = t.iter().find(|t| t.power == 1).unwrap();
        assert!(close(quad.coef, Complex64::new(1.5, 0.0), 1e-15));
        assert!(close(lin.coef, Complex64::new(1.0, 0.0), 1e-15));
    }
}
