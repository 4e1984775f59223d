//! Dense complex polynomials: univariate [`Poly1`] and homogeneous ternary
//! [`HPoly`] (plane curves).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Univariate polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly1 {
    pub coeffs: Vec<C64>,
}

impl Poly1 {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Poly1 { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Poly1::new(vec![c])
    }

    /// `a + b s`.
    pub fn linear(a: C64, b: C64) -> Self {
        Poly1::new(vec![a, b])
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree after discarding leading coefficients below `rel * scale`.
    /// The zero polynomial reports `None`.
    pub fn degree_rel(&self, rel: f64) -> Option<usize> {
        let s = self.scale();
        if s == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > rel * s)
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * s + c)
    }

    pub fn deriv(&self) -> Poly1 {
        if self.coeffs.len() <= 1 {
            return Poly1::constant(ZERO);
        }
        Poly1::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly1) -> Poly1 {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1::new(out)
    }

    pub fn add(&self, other: &Poly1) -> Poly1 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<C64>, i: usize| v.get(i).copied().unwrap_or(ZERO);
        Poly1::new(
            (0..n)
                .map(|i| get(&self.coeffs, i) + get(&other.coeffs, i))
                .collect(),
        )
    }

    pub fn scaled(&self, k: C64) -> Poly1 {
        Poly1::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn pow(&self, n: usize) -> Poly1 {
        (0..n).fold(Poly1::constant(ONE), |acc, _| acc.mul(self))
    }

    /// All complex roots (with repetition) of the polynomial truncated at
    /// relative precision `1e-13`. Empty for constants and for zero.
    pub fn roots(&self) -> Vec<C64> {
        let Some(deg) = self.degree_rel(1e-13) else {
            return Vec::new();
        };
        let c = &self.coeffs[..=deg];
        // roots at the origin
        let low = c
            .iter()
            .position(|z| z.norm() > 1e-13 * self.scale())
            .unwrap_or(0);
        let mut roots = vec![ZERO; low];
        let c = &c[low..];
        let n = c.len() - 1;
        if n == 0 {
            return roots;
        }
        let lead = c[n];
        let monic: Vec<C64> = c.iter().map(|&z| z / lead).collect();
        let eig = companion_eigenvalues(&monic).unwrap_or_else(|| durand_kerner(&monic));
        let p = Poly1::new(monic);
        let dp = p.deriv();
        for z in eig {
            roots.push(newton_polish(&p, &dp, z));
        }
        roots
    }
}

fn companion_eigenvalues(monic: &[C64]) -> Option<Vec<C64>> {
    let n = monic.len() - 1;
    if n == 1 {
        return Some(vec![-monic[0]]);
    }
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -monic[i];
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)?;
    let e = schur.eigenvalues()?;
    if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(e.iter().copied().collect())
}

fn durand_kerner(monic: &[C64]) -> Vec<C64> {
    let n = monic.len() - 1;
    let p = Poly1::new(monic.to_vec());
    let bound = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n)
        .map(|k| seed.powu(k as u32) * bound.min(2.0))
        .collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let mut den = ONE;
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let d = p.eval(z[i]) / den;
            z[i] -= d;
            change = change.max(d.norm());
        }
        if change < 1e-15 {
            break;
        }
    }
    z
}

fn newton_polish(p: &Poly1, dp: &Poly1, z0: C64) -> C64 {
    let mut z = z0;
    let mut fz = p.eval(z).norm();
    for _ in 0..8 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let fc = p.eval(cand).norm();
        if !(fc < fz) {
            break;
        }
        z = cand;
        fz = fc;
    }
    z
}

/// Groups roots closer than `radius * (1 + |z|)` and returns cluster centroids
/// with multiplicities.
pub fn cluster_roots(roots: &[C64], radius: f64) -> Vec<(C64, usize)> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![roots[i]];
        // grow transitively so that split multiple roots stay together
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..roots.len() {
                if used[j] {
                    continue;
                }
                if members
                    .iter()
                    .any(|m| (roots[j] - m).norm() <= radius * (1.0 + m.norm()))
                {
                    used[j] = true;
                    members.push(roots[j]);
                    grew = true;
                }
            }
        }
        let n = members.len();
        let c = members.iter().fold(ZERO, |a, &b| a + b) / n as f64;
        out.push((c, n));
    }
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Homogeneous polynomial `F(x, y, t) = sum c[i,j] x^i y^j t^(d-i-j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoly {
    degree: usize,
    coeffs: Vec<C64>,
}

impl HPoly {
    pub fn zero(degree: usize) -> Self {
        HPoly {
            degree,
            coeffs: vec![ZERO; (degree + 1) * (degree + 2) / 2],
        }
    }

    /// Builds from `(i, j, c)` triples, `i + j <= degree`; repeated entries add up.
    pub fn from_terms(degree: usize, terms: &[(usize, usize, C64)]) -> Option<Self> {
        let mut p = HPoly::zero(degree);
        for &(i, j, c) in terms {
            if i + j > degree {
                return None;
            }
            *p.coeff_mut(i, j) += c;
        }
        Some(p)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        // rows by total degree of (x, y)
        let s = i + j;
        s * (s + 1) / 2 + j
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs[self.index(i, j)]
    }

    pub fn coeff_mut(&mut self, i: usize, j: usize) -> &mut C64 {
        let k = self.index(i, j);
        &mut self.coeffs[k]
    }

    /// Nonzero terms as `(i, j, c)`.
    pub fn terms(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for s in 0..=self.degree {
            for j in 0..=s {
                let c = self.coeff(s - j, j);
                if c != ZERO {
                    out.push((s - j, j, c));
                }
            }
        }
        out
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.scale() == 0.0
    }

    /// Coefficient vector in a fixed monomial order (for proportionality tests).
    pub fn coefficient_vector(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, p: &[C64; 3]) -> C64 {
        let [x, y, t] = *p;
        let d = self.degree;
        let mut acc = ZERO;
        for s in 0..=d {
            let ts = t.powu((d - s) as u32);
            for j in 0..=s {
                let c = self.coeff(s - j, j);
                if c != ZERO {
                    acc += c * x.powu((s - j) as u32) * y.powu(j as u32) * ts;
                }
            }
        }
        acc
    }

    pub fn eval_affine(&self, x: C64, y: C64) -> C64 {
        self.eval(&[x, y, ONE])
    }

    pub fn d_x(&self) -> HPoly {
        let d = self.degree.max(1);
        let mut out = HPoly::zero(d - 1);
        if self.degree == 0 {
            return out;
        }
        for (i, j, c) in self.terms() {
            if i > 0 {
                *out.coeff_mut(i - 1, j) += c * i as f64;
            }
        }
        out
    }

    pub fn d_y(&self) -> HPoly {
        let d = self.degree.max(1);
        let mut out = HPoly::zero(d - 1);
        if self.degree == 0 {
            return out;
        }
        for (i, j, c) in self.terms() {
            if j > 0 {
                *out.coeff_mut(i, j - 1) += c * j as f64;
            }
        }
        out
    }

    pub fn d_t(&self) -> HPoly {
        let d = self.degree.max(1);
        let mut out = HPoly::zero(d - 1);
        if self.degree == 0 {
            return out;
        }
        for (i, j, c) in self.terms() {
            let k = self.degree - i - j;
            if k > 0 {
                *out.coeff_mut(i, j) += c * k as f64;
            }
        }
        out
    }

    /// Homogeneous gradient `(F_x, F_y, F_t)` at `p`.
    pub fn grad(&self, p: &[C64; 3]) -> [C64; 3] {
        [self.d_x().eval(p), self.d_y().eval(p), self.d_t().eval(p)]
    }

    pub fn mul(&self, other: &HPoly) -> HPoly {
        let mut out = HPoly::zero(self.degree + other.degree);
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                *out.coeff_mut(i + k, j + l) += a * b;
            }
        }
        out
    }

    /// Sum of two polynomials of the same degree.
    pub fn add(&self, other: &HPoly) -> HPoly {
        assert_eq!(self.degree, other.degree, "degree mismatch in HPoly::add");
        HPoly {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `G(x, y, t) = F(x + k y, y, t)`.
    pub fn shear_x(&self, k: C64) -> HPoly {
        let mut out = HPoly::zero(self.degree);
        for (i, j, c) in self.terms() {
            for m in 0..=i {
                *out.coeff_mut(m, j + i - m) += c * binom(i, m) * k.powu((i - m) as u32);
            }
        }
        out
    }

    /// `F(x, y, 1)` restricted to a fixed `x`, as a polynomial in `y`.
    pub fn in_y_at(&self, x: C64) -> Poly1 {
        let mut out = vec![ZERO; self.degree + 1];
        for (i, j, c) in self.terms() {
            out[j] += c * x.powu(i as u32);
        }
        Poly1::new(out)
    }

    /// `s -> F(p + s q)` as a univariate polynomial of degree at most d.
    pub fn restrict(&self, p: &[C64; 3], q: &[C64; 3]) -> Poly1 {
        let lin: Vec<Poly1> = (0..3).map(|k| Poly1::linear(p[k], q[k])).collect();
        let mut acc = Poly1::constant(ZERO);
        for (i, j, c) in self.terms() {
            let k = self.degree - i - j;
            let term = lin[0]
                .pow(i)
                .mul(&lin[1].pow(j))
                .mul(&lin[2].pow(k))
                .scaled(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// Composition with a parametrization `s -> (x(s), y(s), t(s))`.
    pub fn compose(&self, x: &Poly1, y: &Poly1, t: &Poly1) -> Poly1 {
        let mut acc = Poly1::constant(ZERO);
        for (i, j, c) in self.terms() {
            let k = self.degree - i - j;
            acc = acc.add(&x.pow(i).mul(&y.pow(j)).mul(&t.pow(k)).scaled(c));
        }
        acc
    }

    /// Top-degree part `F(x, y, 0)` as a polynomial in `x` with `y = 1`,
    /// ascending. Its roots `r` give the points at infinity `(r : 1 : 0)`;
    /// a degree drop of `m` adds `(1 : 0 : 0)` with multiplicity `m`.
    pub fn top_form(&self) -> Poly1 {
        let d = self.degree;
        Poly1::new((0..=d).map(|i| self.coeff(i, d - i)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn roots_of_cubic() {
        // (s - 1)(s - 2)(s + 3) = s^3 - 7 s + 6
        let p = Poly1::new(vec![r(6.0), r(-7.0), r(0.0), r(1.0)]);
        let mut rs: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in rs.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn roots_with_zero_and_degree_drop() {
        // s^2 (s - i), with a negligible leading garbage coefficient trimmed
        let p = Poly1::new(vec![r(0.0), r(0.0), C64::new(0.0, -1.0), r(1.0), r(1e-17)]);
        let rs = p.roots();
        assert_eq!(rs.len(), 3);
        let cl = cluster_roots(&rs, 1e-7);
        assert!(cl.iter().any(|(z, m)| z.norm() < 1e-12 && *m == 2));
        assert!(cl
            .iter()
            .any(|(z, m)| (z - C64::new(0.0, 1.0)).norm() < 1e-12 && *m == 1));
    }

    #[test]
    fn double_root_clusters() {
        // (s - 0.3)^2 (s + 2)
        let a = Poly1::linear(r(-0.3), r(1.0));
        let p = a.mul(&a).mul(&Poly1::linear(r(2.0), r(1.0)));
        let cl = cluster_roots(&p.roots(), 1e-7);
        assert_eq!(cl.len(), 2);
        assert!(cl
            .iter()
            .any(|(z, m)| (z - r(0.3)).norm() < 1e-7 && *m == 2));
    }

    #[test]
    fn hpoly_eval_and_derivatives() {
        // x^2 + y^2 - t^2
        let f = HPoly::from_terms(2, &[(2, 0, r(1.0)), (0, 2, r(1.0)), (0, 0, r(-1.0))]).unwrap();
        assert_eq!(f.eval(&[r(3.0), r(4.0), r(5.0)]), r(0.0));
        let g = f.grad(&[r(1.0), r(2.0), r(3.0)]);
        assert_eq!(g, [r(2.0), r(4.0), r(-6.0)]);
    }

    #[test]
    fn shear_matches_substitution() {
        let f = HPoly::from_terms(
            3,
            &[(2, 1, r(1.0)), (0, 3, r(-2.0)), (1, 0, C64::new(0.5, 1.0))],
        )
        .unwrap();
        let k = C64::new(0.3, -0.7);
        let g = f.shear_x(k);
        let p = [C64::new(0.2, 0.1), C64::new(-1.1, 0.4), C64::new(0.9, 0.0)];
        let expect = f.eval(&[p[0] + k * p[1], p[1], p[2]]);
        assert!((g.eval(&p) - expect).norm() < 1e-13);
    }

    #[test]
    fn restriction_matches_evaluation() {
        let f = HPoly::from_terms(2, &[(2, 0, r(1.0)), (0, 2, r(1.0)), (0, 0, r(-1.0))]).unwrap();
        let p = [r(0.0), r(0.0), r(1.0)];
        let q = [r(1.0), C64::new(0.0, 1.0), r(0.0)];
        let g = f.restrict(&p, &q);
        // x^2 + y^2 vanishes along y = i x: only -t^2 = -1 remains
        assert_eq!(g.degree_rel(1e-13), Some(0));
        assert!((g.eval(r(0.7)) + r(1.0)).norm() < 1e-14);
    }
}
