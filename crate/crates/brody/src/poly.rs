//! Univariate complex polynomials.
//!
//! Just enough polynomial algebra for rational curves: evaluation with
//! derivative, gcd (to reject components with a common factor), and a Cauchy
//! root bound used to pick search boxes for sup-norm estimation.

use num_complex::Complex64;

/// Dense polynomial `c[0] + c[1] z + ... + c[d] z^d` over `ℂ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    fn trim(&mut self) {
        while let Some(c) = self.coeffs.last() {
            if c.norm() == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Substitute `z -> alpha z + beta`.
    pub fn compose_affine(&self, alpha: Complex64, beta: Complex64) -> Poly {
        // Horner over the shifted variable.
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![beta, alpha]);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c));
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Poly::new(out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean remainder of `self` by `other` (`other` nonzero).
    fn rem(&self, other: &Poly) -> Poly {
        let mut r = self.coeffs.clone();
        let d = other.coeffs.len();
        let lead = *other.coeffs.last().unwrap();
        while r.len() >= d && !r.is_empty() {
            let q = *r.last().unwrap() / lead;
            if q.norm() == 0.0 {
                r.pop();
                continue;
            }
            let shift = r.len() - d;
            for (j, &c) in other.coeffs.iter().enumerate() {
                r[shift + j] -= q * c;
            }
            r.pop();
            // Strip numerically-dead leading coefficients.
            while let Some(&c) = r.last() {
                if c.norm() < 1e-12 * lead.norm().max(1.0) {
                    r.pop();
                } else {
                    break;
                }
            }
        }
        Poly::new(r)
    }

    /// Monic gcd via the Euclidean algorithm with a relative tolerance.
    ///
    /// Random-coefficient polynomials are coprime with probability one, so
    /// this only needs to be reliable for exact common factors.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut a = a.normalized();
        let mut b = b.normalized();
        while !b.is_zero() {
            let r = a.rem(&b).normalized();
            a = b;
            b = r;
        }
        a
    }

    /// Scale so the leading coefficient has modulus one.
    fn normalized(&self) -> Poly {
        match self.coeffs.last() {
            None => Poly::zero(),
            Some(c) => self.scale(Complex64::new(1.0 / c.norm(), 0.0)),
        }
    }

    /// Cauchy bound: every root has modulus at most `1 + max |c_i/c_d|`.
    pub fn root_bound(&self) -> f64 {
        match self.coeffs.last() {
            None => 0.0,
            Some(lead) if self.coeffs.len() > 1 => {
                let m = self
                    .coeffs
                    .iter()
                    .take(self.coeffs.len() - 1)
                    .map(|c| c.norm())
                    .fold(0.0f64, f64::max);
                1.0 + m / lead.norm()
            }
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_matches_derivative() {
        let p = Poly::from_real(&[1.0, -2.0, 0.5, 3.0]);
        let z = c(0.3, -1.2);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - p.eval(z)).norm() < 1e-14);
        assert!((d - p.derivative().eval(z)).norm() < 1e-14);
    }

    #[test]
    fn gcd_detects_common_factor() {
        // (z-1)(z+2) and (z-1)(z-3) share (z-1).
        let f = Poly::from_real(&[-2.0, 1.0, 1.0]);
        let g = Poly::from_real(&[3.0, -4.0, 1.0]);
        let d = Poly::gcd(&f, &g);
        assert_eq!(d.degree(), 1);
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let f = Poly::from_real(&[1.0, 0.0, 1.0]);
        let g = Poly::from_real(&[-1.0, 1.0]);
        assert!(Poly::gcd(&f, &g).is_constant());
    }

    #[test]
    fn compose_affine_evaluates_correctly() {
        let p = Poly::from_real(&[1.0, 2.0, 3.0]);
        let (alpha, beta) = (c(2.0, 1.0), c(-0.5, 0.0));
        let q = p.compose_affine(alpha, beta);
        let z = c(0.7, 0.1);
        assert!((q.eval(z) - p.eval(alpha * z + beta)).norm() < 1e-12);
    }
}
