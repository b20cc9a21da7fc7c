//! Exact multivariate polynomials with rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, with zero coefficients never stored, so two equal
//! polynomials always have identical representations.

mod eval;
mod parse;
mod univariate;

pub use eval::{CompiledPoly, ModPoly};
pub use parse::{parse_poly, parse_poly_vector, ParseError};
pub use univariate::{gcd_bezout_1var, gcd_bezout_primitive, BezoutData};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::lattice::AffineLattice;
use crate::{Error, Result};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial over ℚ, optionally tagged with the lattice it is
/// meant to be evaluated on (the whole of ℤ^m when absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
    domain: Option<AffineLattice>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly {
            nvars,
            terms: BTreeMap::new(),
            domain: None,
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(c.into()))
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars);
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial(e), BigRational::one());
        p
    }

    /// Builds a polynomial from raw terms, dropping zeros and merging repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn from_coeffs(coeffs: &[BigRational]) -> Self {
        Self::from_terms(
            1,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32], c.clone())),
        )
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        let c: Vec<BigRational> = coeffs
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Self::from_coeffs(&c)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.nvars])
    }

    /// Total degree; the zero polynomial has degree 0 here.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant)
    }

    /// The declared evaluation domain, ℤ^m when none was set.
    pub fn domain(&self) -> AffineLattice {
        self.domain
            .clone()
            .unwrap_or_else(|| AffineLattice::full(self.nvars))
    }

    pub fn declared_domain(&self) -> Option<&AffineLattice> {
        self.domain.as_ref()
    }

    pub fn with_domain(mut self, domain: AffineLattice) -> Result<Self> {
        if domain.dim() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: domain.dim(),
            });
        }
        self.domain = Some(domain);
        Ok(self)
    }

    /// Drops the declared domain, keeping the terms.
    pub fn without_domain(mut self) -> Self {
        self.domain = None;
        self
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self {
                terms: BTreeMap::new(),
                ..self.clone()
            };
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_int(self.nvars, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * BigRational::from_integer(e.into()));
        }
        out
    }

    /// Exact value at an integer point.
    pub fn eval(&self, point: &[BigInt]) -> Result<BigRational> {
        let pt: Vec<BigRational> = point
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        self.eval_rational(&pt)
    }

    pub fn eval_i64(&self, point: &[i64]) -> Result<BigRational> {
        let pt: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        self.eval(&pt)
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut powers: Vec<Vec<BigRational>> = Vec::with_capacity(self.nvars);
        for (j, x) in point.iter().enumerate() {
            let d = self.degree_in(j) as usize;
            let mut pw = Vec::with_capacity(d + 1);
            pw.push(BigRational::one());
            for i in 1..=d {
                let next = &pw[i - 1] * x;
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[j][e as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// `p - p(0)`: the constant-free part.
    pub fn hat(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Monomial::one(self.nvars));
        out
    }

    /// Composition `p(s_1(y), …, s_m(y))` where each `s_j` lives in `new_nvars` variables.
    pub fn compose(&self, subs: &[IntPoly]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let new_nvars = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<IntPoly>> = Vec::with_capacity(self.nvars);
        for (j, s) in subs.iter().enumerate() {
            let d = self.degree_in(j) as usize;
            let mut pw = vec![Self::from_int(new_nvars, 1)];
            for i in 1..=d {
                let next = &pw[i - 1] * s;
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut acc = Self::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut t = Self::constant(new_nvars, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[j][e as usize];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `q(n) = p(A·n + l)` for a nonsingular integer matrix `A`.
    pub fn affine_substitute(&self, matrix: &[Vec<BigInt>], offset: &[BigInt]) -> Result<Self> {
        let m = self.nvars;
        if matrix.len() != m || offset.len() != m || matrix.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: matrix.len(),
            });
        }
        if crate::linalg::det_int(matrix).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let subs: Vec<IntPoly> = (0..m)
            .map(|i| {
                let mut s = Self::constant(m, BigRational::from_integer(offset[i].clone()));
                for (j, a) in matrix[i].iter().enumerate() {
                    if !a.is_zero() {
                        s = &s + &Self::var(m, j).scale_int(a);
                    }
                }
                s
            })
            .collect();
        self.compose(&subs)
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Coefficients as integers, if they all are.
    pub fn integer_terms(&self) -> Option<Vec<(Monomial, BigInt)>> {
        self.terms
            .iter()
            .map(|(m, c)| c.is_integer().then(|| (m.clone(), c.to_integer())))
            .collect()
    }

    /// Decides whether `p` takes integer values on every point of `domain`.
    ///
    /// `p` is first pulled back along the lattice parametrization
    /// `x ↦ A·x + l` to a polynomial `q` on ℤ^m. A polynomial with per-variable
    /// degrees `d_j` is integer-valued on ℤ^m iff its coefficients in the basis
    /// `∏_j C(x_j, i_j)` (`i_j ≤ d_j`) are integers, and those coefficients are
    /// integer combinations of the values on the grid `∏_j {0, …, d_j}`
    /// (iterated forward differences). So integrality on the grid is
    /// equivalent to integrality everywhere.
    pub fn is_integral_on(&self, domain: &AffineLattice) -> Result<bool> {
        if domain.dim() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: domain.dim(),
            });
        }
        let q = self.affine_substitute(domain.basis(), domain.offset())?;
        let degs: Vec<u32> = (0..q.nvars).map(|j| q.degree_in(j)).collect();
        let mut point = vec![0u32; q.nvars];
        loop {
            let pt: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
            if !q.eval(&pt)?.is_integer() {
                return Ok(false);
            }
            // odometer over the degree grid
            let mut j = 0;
            loop {
                if j == q.nvars {
                    return Ok(true);
                }
                if point[j] < degs[j] {
                    point[j] += 1;
                    break;
                }
                point[j] = 0;
                j += 1;
            }
        }
    }

    /// Integrality on the declared domain.
    pub fn is_integral(&self) -> bool {
        self.is_integral_on(&self.domain())
            .expect("declared domain has matching dimension")
    }

    /// Coefficient vector of the nonconstant monomials, indexed by `monomials`.
    pub fn coeffs_on(&self, monomials: &[Monomial]) -> Vec<BigRational> {
        monomials
            .iter()
            .map(|m| self.terms.get(m).cloned().unwrap_or_else(BigRational::zero))
            .collect()
    }

    /// Renders in the input grammar, highest monomial first.
    pub fn render(&self, vars: &[impl AsRef<str>]) -> String {
        assert_eq!(vars.len(), self.nvars, "one name per variable");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_constant() {
                factors.push(render_rational(&abs));
            }
            for (j, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(vars[j].as_ref().to_string()),
                    _ => factors.push(format!("{}^{}", vars[j].as_ref(), e)),
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }
}

fn render_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Default variable names `x0, x1, …` (`n` in one variable).
pub fn default_vars(nvars: usize) -> Vec<String> {
    if nvars == 1 {
        vec!["n".to_string()]
    } else {
        (1..=nvars).map(|i| format!("n{i}")).collect()
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render(&default_vars(self.nvars)))
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = IntPoly::zero(self.nvars);
        out.domain = self.domain.clone();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(e), ca * cb);
            }
        }
        out
    }
}

/// Least `d > 0` such that `d·p` has integer coefficients for every `p` in the family.
pub fn denominator_scale(family: &[IntPoly]) -> BigInt {
    family
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator()))
}

/// Integer-valued polynomials in a common variable set, one per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVectorPoly {
    components: Vec<IntPoly>,
}

impl RationalVectorPoly {
    pub fn new(components: Vec<IntPoly>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyFamily)?;
        let m = first.nvars();
        if let Some(bad) = components.iter().find(|c| c.nvars() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.nvars(),
            });
        }
        Ok(RationalVectorPoly { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn nvars(&self) -> usize {
        self.components[0].nvars()
    }

    pub fn components(&self) -> &[IntPoly] {
        &self.components
    }

    pub fn eval(&self, point: &[BigInt]) -> Result<Vec<BigRational>> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p1(s: &str) -> IntPoly {
        parse_poly(s, &["n"]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p1("n^2+1").eval_i64(&[2]).unwrap(), q(5, 1));
        assert_eq!(
            p1("(n^2-5)*(n^2-41)*(n^2-205)").eval_i64(&[0]).unwrap(),
            q(-42025, 1)
        );
        assert_eq!(p1("n*(n-1)/2").eval_i64(&[7]).unwrap(), q(21, 1));
        assert!(matches!(
            p1("n").eval_i64(&[1, 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn integrality_examples() {
        let full = AffineLattice::full(1);
        let evens = AffineLattice::scalar(2, 0);
        assert!(!p1("n/2").is_integral_on(&full).unwrap());
        assert!(p1("n*(n+1)/2").is_integral_on(&full).unwrap());
        assert!(p1("n/2").is_integral_on(&evens).unwrap());
        assert!(p1("n*(n-1)*(n-2)/6").is_integral_on(&full).unwrap());
        assert!(!p1("n*(n-1)*(n-2)/12").is_integral_on(&full).unwrap());
        let two = parse_poly("x*y*(x+y)/2", &["x", "y"]).unwrap();
        assert!(two.is_integral_on(&AffineLattice::full(2)).unwrap());
    }

    #[test]
    fn hat_examples() {
        assert_eq!(p1("2*n+1").hat(), p1("2*n"));
        assert_eq!(p1("n^2+n+7").hat(), p1("n^2+n"));
        assert!(p1("5").hat().is_zero());
    }

    #[test]
    fn affine_substitution_examples() {
        let two = vec![vec![BigInt::from(2)]];
        let one = vec![vec![BigInt::from(1)]];
        assert_eq!(
            p1("n^2").affine_substitute(&two, &[BigInt::from(1)]).unwrap(),
            p1("4*n^2+4*n+1")
        );
        assert_eq!(
            p1("2*n+1").affine_substitute(&one, &[BigInt::from(0)]).unwrap(),
            p1("2*n+1")
        );
        let tri = p1("n*(n+1)/2").affine_substitute(&two, &[BigInt::from(0)]).unwrap();
        assert_eq!(tri, p1("2*n^2+n"));
        assert!(tri.has_integer_coefficients());
        let zero = vec![vec![BigInt::from(0)]];
        assert!(matches!(
            p1("n").affine_substitute(&zero, &[BigInt::from(0)]),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn denominator_scale_examples() {
        assert_eq!(denominator_scale(&[p1("n*(n+1)/2")]), BigInt::from(2));
        assert_eq!(denominator_scale(&[p1("n^2"), p1("2*n+1")]), BigInt::from(1));
        assert_eq!(denominator_scale(&[p1("n/3"), p1("n^2/2")]), BigInt::from(6));
    }

    #[test]
    fn render_is_graded_lex_descending() {
        let p = parse_poly("1 + y - x^2*y + 3/2*x", &["x", "y"]).unwrap();
        assert_eq!(p.render(&["x", "y"]), "-x^2*y + 3/2*x + y + 1");
        assert_eq!(IntPoly::zero(2).render(&["x", "y"]), "0");
    }

    #[test]
    fn derivative_of_product() {
        let p = p1("(n^3-19)*(n^2+n+1)");
        let d = p.derivative(0);
        assert_eq!(d.eval_i64(&[1]).unwrap(), q(-45, 1));
    }
}
