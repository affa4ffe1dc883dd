use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::numkernel::{DdComplex, C64};
use crate::{Error, Result};

const MAX_VARS: usize = 4;
const MAX_TABLE_DEGREE: usize = 12;

/// Exponent vectors of all degree-`degree` monomials in `nvars` variables,
/// lexicographically descending (`x0^d` first).
pub fn monomials(nvars: usize, degree: usize) -> &'static [[u8; MAX_VARS]] {
    static TABLE: OnceLock<Vec<Vec<Vec<[u8; MAX_VARS]>>>> = OnceLock::new();
    assert!(
        (1..=MAX_VARS).contains(&nvars) && degree <= MAX_TABLE_DEGREE,
        "unsupported monomial table ({nvars} vars, degree {degree})"
    );
    let table = TABLE.get_or_init(|| {
        (0..=MAX_VARS)
            .map(|n| (0..=MAX_TABLE_DEGREE).map(|d| enumerate(n, d)).collect())
            .collect()
    });
    &table[nvars][degree]
}

fn enumerate(nvars: usize, degree: usize) -> Vec<[u8; MAX_VARS]> {
    fn rec(var: usize, nvars: usize, left: usize, cur: &mut [u8; MAX_VARS], out: &mut Vec<[u8; MAX_VARS]>) {
        if var + 1 == nvars {
            cur[var] = left as u8;
            out.push(*cur);
            cur[var] = 0;
            return;
        }
        for e in (0..=left).rev() {
            cur[var] = e as u8;
            rec(var + 1, nvars, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(0, nvars, degree, &mut [0; MAX_VARS], &mut out);
    }
    out
}

fn monomial_value(e: &[u8; MAX_VARS], p: &[C64]) -> C64 {
    p.iter()
        .zip(e.iter())
        .fold(C64::new(1.0, 0.0), |acc, (x, &k)| acc * x.powu(k as u32))
}

/// Values of every monomial of the given degree at `p`, in table order.
pub fn monomial_row(degree: usize, p: &[C64]) -> Vec<C64> {
    monomials(p.len(), degree)
        .iter()
        .map(|e| monomial_value(e, p))
        .collect()
}

/// `rows[k][m]` is `d/dx_k` of monomial `m` evaluated at `p`.
pub fn gradient_rows(degree: usize, p: &[C64]) -> Vec<Vec<C64>> {
    let mons = monomials(p.len(), degree);
    (0..p.len())
        .map(|k| {
            mons.iter()
                .map(|e| {
                    if e[k] == 0 {
                        C64::new(0.0, 0.0)
                    } else {
                        let mut f = *e;
                        f[k] -= 1;
                        monomial_value(&f, p) * e[k] as f64
                    }
                })
                .collect()
        })
        .collect()
}

/// Distance between the projective classes of two coefficient vectors: the
/// smallest `|| a/|a| - w b/|b| ||` over unit scalars `w`, in `[0, sqrt 2]`.
pub fn coeff_distance(a: &[C64], b: &[C64]) -> f64 {
    let norm = |v: &[C64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 0.0 } else { 2f64.sqrt() };
    }
    let inner: C64 = b.iter().zip(a.iter()).map(|(y, x)| y.conj() * x).sum();
    let w = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x / na - w * y / nb).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// A homogeneous polynomial of fixed degree in 3 or 4 variables.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousForm {
    nvars: usize,
    degree: usize,
    coeffs: Vec<C64>,
}

impl HomogeneousForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        let len = monomials(nvars, degree).len();
        Self {
            nvars,
            degree,
            coeffs: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn from_coeffs(nvars: usize, degree: usize, coeffs: Vec<C64>) -> Result<Self> {
        if !(1..=MAX_VARS).contains(&nvars) || degree > MAX_TABLE_DEGREE {
            return Err(Error::InvalidInput(format!(
                "unsupported form shape ({nvars} variables, degree {degree})"
            )));
        }
        let len = monomials(nvars, degree).len();
        if coeffs.len() != len {
            return Err(Error::InvalidInput(format!(
                "degree-{degree} form in {nvars} variables needs {len} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            nvars,
            degree,
            coeffs,
        })
    }

    /// Build from `(exponents, coefficient)` terms; repeated monomials add up.
    pub fn from_terms<I>(nvars: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, C64)>,
    {
        let mut f = Self::zero(nvars, degree);
        for (exps, c) in terms {
            if exps.len() != nvars || exps.iter().map(|&e| e as usize).sum::<usize>() != degree {
                return Err(Error::InvalidInput(format!(
                    "exponents {exps:?} do not describe a degree-{degree} monomial in {nvars} variables"
                )));
            }
            let k = f.index_of(&exps).expect("valid exponent vector");
            f.coeffs[k] += c;
        }
        Ok(f)
    }

    pub fn from_real_terms(nvars: usize, degree: usize, terms: &[(&[u8], f64)]) -> Result<Self> {
        Self::from_terms(
            nvars,
            degree,
            terms.iter().map(|(e, c)| (e.to_vec(), C64::new(*c, 0.0))),
        )
    }

    /// The linear form `sum l_i x_i`.
    pub fn linear(l: &[C64]) -> Self {
        // lexicographic descending order of degree-1 monomials is x0, x1, ...
        Self {
            nvars: l.len(),
            degree: 1,
            coeffs: l.to_vec(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn monomials(&self) -> &'static [[u8; MAX_VARS]] {
        monomials(self.nvars, self.degree)
    }

    fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.monomials()
            .iter()
            .position(|e| e[..self.nvars] == *exps)
    }

    pub fn coefficient(&self, exps: &[u8]) -> C64 {
        self.index_of(exps)
            .map(|k| self.coeffs[k])
            .unwrap_or_default()
    }

    /// Iterate over `(exponents, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], C64)> + '_ {
        self.monomials()
            .iter()
            .zip(self.coeffs.iter())
            .map(|(e, &c)| (&e[..self.nvars], c))
    }

    fn check_point(&self, p: &[C64]) {
        assert_eq!(p.len(), self.nvars, "point dimension does not match form");
    }

    pub fn eval(&self, p: &[C64]) -> C64 {
        self.check_point(p);
        self.monomials()
            .iter()
            .zip(self.coeffs.iter())
            .map(|(e, &c)| c * monomial_value(e, p))
            .sum()
    }

    /// Evaluation with every product and sum carried in double-double.
    pub fn eval_compensated(&self, p: &[C64]) -> C64 {
        self.check_point(p);
        let pp: Vec<DdComplex> = p.iter().map(|&x| x.into()).collect();
        let mut acc = DdComplex::ZERO;
        for (e, &c) in self.monomials().iter().zip(self.coeffs.iter()) {
            let mut term = DdComplex::from(c);
            for (x, &k) in pp.iter().zip(e.iter()) {
                for _ in 0..k {
                    term = term * *x;
                }
            }
            acc = acc + term;
        }
        acc.to_c64()
    }

    pub fn gradient(&self, p: &[C64]) -> Vec<C64> {
        self.check_point(p);
        gradient_rows(self.degree, p)
            .into_iter()
            .map(|row| row.iter().zip(self.coeffs.iter()).map(|(m, c)| m * c).sum())
            .collect()
    }

    /// `d/dx_k` as a form of degree one less.
    pub fn partial(&self, k: usize) -> Self {
        assert!(self.degree > 0 && k < self.nvars);
        let mut out = Self::zero(self.nvars, self.degree - 1);
        for (e, &c) in self.monomials().iter().zip(self.coeffs.iter()) {
            if e[k] > 0 {
                let mut f = e[..self.nvars].to_vec();
                f[k] -= 1;
                let idx = out.index_of(&f).expect("lowered exponent");
                out.coeffs[idx] += c * e[k] as f64;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (ea, &a) in self.monomials().iter().zip(self.coeffs.iter()) {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (eb, &b) in other.monomials().iter().zip(other.coeffs.iter()) {
                let e: Vec<u8> = (0..self.nvars).map(|i| ea[i] + eb[i]).collect();
                let idx = out.index_of(&e).expect("product exponent");
                out.coeffs[idx] += a * b;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nvars, self.degree), (other.nvars, other.degree));
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    /// `G(y) = F(A y)`.
    pub fn substitute(&self, a: &DMatrix<C64>) -> Self {
        assert_eq!(a.nrows(), self.nvars);
        assert_eq!(a.ncols(), self.nvars);
        let rows: Vec<Self> = (0..self.nvars)
            .map(|i| Self::linear(&a.row(i).iter().copied().collect::<Vec<_>>()))
            .collect();
        let mut one = Self::zero(self.nvars, 0);
        one.coeffs[0] = C64::new(1.0, 0.0);
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, &c) in self.monomials().iter().zip(self.coeffs.iter()) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mut term = one.clone();
            for (i, &k) in e[..self.nvars].iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&rows[i]);
                }
            }
            out = out.add(&term.scale(c));
        }
        out
    }

    /// Coefficients (lowest first, always `degree + 1` of them) of
    /// `s -> F(base + s * dir)`.
    pub fn restrict(&self, base: &[C64], dir: &[C64]) -> Vec<C64> {
        self.check_point(base);
        self.check_point(dir);
        let d = self.degree;
        let mut out = vec![C64::new(0.0, 0.0); d + 1];
        for (e, &c) in self.monomials().iter().zip(self.coeffs.iter()) {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mut poly = vec![c];
            for i in 0..self.nvars {
                for _ in 0..e[i] {
                    let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
                    for (k, &a) in poly.iter().enumerate() {
                        next[k] += a * base[i];
                        next[k + 1] += a * dir[i];
                    }
                    poly = next;
                }
            }
            for (k, a) in poly.into_iter().enumerate() {
                out[k] += a;
            }
        }
        out
    }

    /// The same polynomial regarded as a form in `nvars` (>= current)
    /// variables.
    pub fn lift(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars, self.degree);
        for (e, c) in self.terms() {
            let mut f = e.to_vec();
            f.resize(nvars, 0);
            let idx = out.index_of(&f).expect("lifted exponent");
            out.coeffs[idx] = c;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Scaled so the largest coefficient has modulus 1, with the first
    /// coefficient of largest modulus real positive.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return self.clone();
        }
        let pivot = self
            .coeffs
            .iter()
            .copied()
            .find(|c| c.norm() >= m * (1.0 - 1e-12))
            .expect("nonzero coefficient");
        self.scale(pivot.norm() / (pivot * m))
    }

    /// Distance between the projective classes of two forms: the smallest
    /// `|| a/|a| - w b/|b| ||` over unit scalars `w`. Ranges over `[0, sqrt 2]`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        coeff_distance(&self.coeffs, &other.coeffs)
    }

    /// Scale-free residual `|F(p)| / (max|coeff| * |p|^d)`.
    pub fn residual(&self, p: &[C64]) -> f64 {
        let pn = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let m = self.max_abs();
        if m == 0.0 || pn == 0.0 {
            return 0.0;
        }
        self.eval(p).norm() / (m * pn.powi(self.degree as i32))
    }

    /// Whether the gradient vanishes at `p` relative to the coefficient and
    /// point scale.
    pub fn is_singular_at(&self, p: &[C64], tol: f64) -> bool {
        let pn = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let g = self.gradient(p);
        let gn = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        gn <= tol * self.max_abs() * pn.powi(self.degree as i32 - 1)
    }
}
