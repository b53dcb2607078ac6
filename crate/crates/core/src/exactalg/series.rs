//! Truncated graded series in the completion of the localized cohomology
//! ring of a point.
//!
//! A degree-n piece is a homogeneous rational function in lambda_1..lambda_m
//! of degree n, kept as a sum of polynomials over products of linear forms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cyclotomic::CycNumber;
use super::intmatrix::Q;
use super::monomial::fmt_linear_form;

/// Polynomial in lambda_1..lambda_m with cyclotomic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, CycNumber>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: CycNumber) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, CycNumber::one())
    }

    /// Monomial prod lambda_i^(e_i).
    pub fn monomial(exps: Vec<u32>, c: CycNumber) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// The linear form sum_i c_i lambda_i.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, CycNumber::from_q(c.clone()));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &CycNumber)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: CycNumber) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&CycNumber::from_int(-1)))
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (e, x) in &self.terms {
            out.terms.insert(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Exact division by a normalized linear form; None if it does not divide.
    pub fn div_linear(&self, form: &LinearForm) -> Option<Self> {
        let p = form.pivot();
        let rest: Vec<(usize, Q)> = form
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != p && !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let mut rem = self.clone();
        let mut quo = Self::zero(self.nvars);
        while let Some((e, c)) = rem
            .terms
            .iter()
            .max_by_key(|(e, _)| e[p])
            .map(|(e, c)| (e.clone(), c.clone()))
        {
            if e[p] == 0 {
                return None;
            }
            let mut qe = e.clone();
            qe[p] -= 1;
            // subtract c * x^qe * form
            rem.add_term(e, -&c);
            for (i, a) in &rest {
                let mut te = qe.clone();
                te[*i] += 1;
                rem.add_term(te, -&(&c * &CycNumber::from_q(a.clone())));
            }
            quo.add_term(qe, c);
        }
        Some(quo)
    }
}

/// Nonzero linear form in lambda, scaled so its first nonzero coefficient is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm(Vec<Q>);

impl LinearForm {
    /// Normalizes `coeffs`; returns the form and the factor c with coeffs = c * form.
    pub fn normalize(coeffs: &[Q]) -> Option<(Self, Q)> {
        let lead = coeffs.iter().find(|c| !c.is_zero())?.clone();
        Some((LinearForm(coeffs.iter().map(|c| c / &lead).collect()), lead))
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn pivot(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(&self.0)
    }

    /// Some(i) if the form is the coordinate lambda_i.
    pub fn as_coordinate(&self) -> Option<usize> {
        let p = self.pivot();
        self.0.iter().enumerate().all(|(i, c)| i == p || c.is_zero()).then_some(p)
    }
}

/// Homogeneous rational function: sum of numerator / (product of linear forms).
#[derive(Clone, Debug)]
pub struct HomRational {
    nvars: usize,
    terms: BTreeMap<Vec<LinearForm>, Poly>,
}

impl HomRational {
    pub fn zero(nvars: usize) -> Self {
        HomRational {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_parts(num: Poly, mut den: Vec<LinearForm>) -> Self {
        den.sort();
        let mut h = Self::zero(num.nvars());
        h.add_fraction(den, num);
        h
    }

    fn add_fraction(&mut self, den: Vec<LinearForm>, num: Poly) {
        if num.is_zero() {
            return;
        }
        let slot = self.terms.entry(den).or_insert_with(|| Poly::zero(num.nvars()));
        *slot = slot.add(&num);
        self.terms.retain(|_, p| !p.is_zero());
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, n) in &other.terms {
            out.add_fraction(d.clone(), n.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for p in out.terms.values_mut() {
            *p = p.scale(&CycNumber::from_int(-1));
        }
        out
    }

    /// Combines everything over one denominator, cancelling linear factors.
    pub fn combine(&self) -> (Poly, Vec<LinearForm>) {
        let mut common: BTreeMap<LinearForm, usize> = BTreeMap::new();
        for den in self.terms.keys() {
            let mut counts: BTreeMap<&LinearForm, usize> = BTreeMap::new();
            for f in den {
                *counts.entry(f).or_default() += 1;
            }
            for (f, k) in counts {
                let slot = common.entry(f.clone()).or_default();
                *slot = (*slot).max(k);
            }
        }
        let mut num = Poly::zero(self.nvars);
        for (den, p) in &self.terms {
            let mut missing = common.clone();
            for f in den {
                *missing.get_mut(f).unwrap() -= 1;
            }
            let mut t = p.clone();
            for (f, k) in missing {
                for _ in 0..k {
                    t = t.mul(&f.to_poly());
                }
            }
            num = num.add(&t);
        }
        let mut den = Vec::new();
        for (f, k) in common {
            for _ in 0..k {
                match num.div_linear(&f) {
                    Some(q) if !num.is_zero() => num = q,
                    _ => den.push(f.clone()),
                }
            }
        }
        if num.is_zero() {
            den.clear();
        }
        (num, den)
    }

    pub fn is_zero(&self) -> bool {
        self.combine().0.is_zero()
    }
}

impl PartialEq for HomRational {
    fn eq(&self, other: &Self) -> bool {
        self.add(&other.neg()).is_zero()
    }
}

fn fmt_poly(p: &Poly, neg_exps: &[u32]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        let (neg, mag) = match c.as_rational() {
            Some(x) if x.is_negative() => (true, CycNumber::from_q(-x.clone())),
            _ => (false, c.clone()),
        };
        let mut vars = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            let k = k as i64 - neg_exps[i] as i64;
            match k {
                0 => {}
                1 => vars.push(format!("l{}", i + 1)),
                _ => vars.push(format!("l{}^{k}", i + 1)),
            }
        }
        let body = match (mag.is_one(), vars.is_empty()) {
            (true, true) => "1".to_string(),
            (true, false) => vars.join("*"),
            (false, true) => mag.to_string(),
            (false, false) => format!("{mag}*{}", vars.join("*")),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for HomRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.combine();
        if den.iter().all(|d| d.as_coordinate().is_some()) {
            let mut neg = vec![0u32; self.nvars];
            for d in &den {
                neg[d.as_coordinate().unwrap()] += 1;
            }
            return write!(f, "{}", fmt_poly(&num, &neg));
        }
        let dens: Vec<String> = den.iter().map(|d| format!("({})", fmt_linear_form(d.coeffs(), "l"))).collect();
        write!(f, "({})/({})", fmt_poly(&num, &vec![0; self.nvars]), dens.join("*"))
    }
}

/// Power series in an auxiliary variable t whose k-th coefficient is a
/// polynomial in lambda (homogeneous of degree k when built from linear substitutions).
#[derive(Clone, Debug)]
pub struct TSeries {
    coeffs: Vec<Poly>,
}

impl TSeries {
    pub fn one(nvars: usize, len: usize) -> Self {
        let mut coeffs = vec![Poly::zero(nvars); len];
        if len > 0 {
            coeffs[0] = Poly::one(nvars);
        }
        TSeries { coeffs }
    }

    pub fn zero(nvars: usize, len: usize) -> Self {
        TSeries {
            coeffs: vec![Poly::zero(nvars); len],
        }
    }

    /// Substitutes s = t * L into the univariate series sum a_k s^k.
    pub fn compose(univariate: &[CycNumber], form: &[Q], len: usize) -> Self {
        let n = form.len();
        let l = Poly::linear(form);
        let mut power = Poly::one(n);
        let mut coeffs = Vec::with_capacity(len);
        for (k, c) in univariate.iter().take(len).enumerate() {
            coeffs.push(power.scale(c));
            if k + 1 < len {
                power = power.mul(&l);
            }
        }
        TSeries { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> &Poly {
        &self.coeffs[k]
    }

    pub fn add(&self, other: &Self) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let nvars = self.coeffs.first().map_or(0, Poly::nvars);
        let mut out = Self::zero(nvars, len);
        for i in 0..len {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..len - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        out
    }
}

/// Element of the degree-completed localized ring, truncated at `order`.
#[derive(Clone, Debug)]
pub struct GradedSeries {
    nvars: usize,
    order: i64,
    pieces: BTreeMap<i64, HomRational>,
}

impl GradedSeries {
    pub fn zero(nvars: usize, order: i64) -> Self {
        GradedSeries {
            nvars,
            order,
            pieces: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest degree with a nonzero piece (n0).
    pub fn min_degree(&self) -> Option<i64> {
        self.pieces.iter().find(|(_, h)| !h.is_zero()).map(|(d, _)| *d)
    }

    pub fn piece(&self, degree: i64) -> HomRational {
        self.pieces.get(&degree).cloned().unwrap_or_else(|| HomRational::zero(self.nvars))
    }

    /// Adds `t^(-poles) * series` where the 1/t poles carry the listed linear forms.
    pub fn add_expansion(&mut self, series: &TSeries, poles: &[LinearForm]) {
        let p = poles.len() as i64;
        for k in 0..series.len() {
            let degree = k as i64 - p;
            if degree > self.order {
                break;
            }
            let c = series.coeff(k);
            if c.is_zero() {
                continue;
            }
            let frac = HomRational::from_parts(c.clone(), poles.to_vec());
            let slot = self.pieces.entry(degree).or_insert_with(|| HomRational::zero(self.nvars));
            *slot = slot.add(&frac);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = GradedSeries::zero(self.nvars, self.order.min(other.order));
        for (d, h) in self.pieces.iter().chain(&other.pieces) {
            if *d > out.order {
                continue;
            }
            let slot = out.pieces.entry(*d).or_insert_with(|| HomRational::zero(self.nvars));
            *slot = slot.add(h);
        }
        out
    }

    /// Degrees present in either series up to the common order, ascending.
    fn degrees(&self, other: &Self) -> Vec<i64> {
        let order = self.order.min(other.order);
        let mut ds: Vec<i64> = self.pieces.keys().chain(other.pieces.keys()).copied().filter(|d| *d <= order).collect();
        ds.sort();
        ds.dedup();
        ds
    }

    /// First degree at which the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        self.degrees(other).into_iter().find(|&d| self.piece(d) != other.piece(d))
    }

    /// Nonzero pieces as (degree, rendered piece).
    pub fn rendered(&self) -> Vec<(i64, String)> {
        self.pieces
            .iter()
            .filter(|(_, h)| !h.is_zero())
            .map(|(d, h)| (*d, h.to_string()))
            .collect()
    }
}

impl PartialEq for GradedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rendered().into_iter().map(|(d, s)| format!("[{d}] {s}")).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Coefficients of exp(s) = sum s^k / k!.
pub fn exp_series(len: usize) -> Vec<CycNumber> {
    (0..len)
        .map(|k| CycNumber::from_q(Q::new(BigInt::one(), factorial(k))))
        .collect()
}

/// Reciprocal of a univariate power series with invertible constant term.
pub fn reciprocal(a: &[CycNumber]) -> Option<Vec<CycNumber>> {
    let inv0 = a.first()?.inv()?;
    let mut b: Vec<CycNumber> = vec![inv0.clone()];
    for k in 1..a.len() {
        let mut acc = CycNumber::zero();
        for j in 1..=k {
            acc = &acc + &(&a[j] * &b[k - j]);
        }
        b.push(-&(&acc * &inv0));
    }
    Some(b)
}

/// Bernoulli numbers B_0..B_(len-1) with B_1 = -1/2.
pub fn bernoulli(len: usize) -> Vec<Q> {
    let mut b: Vec<Q> = Vec::with_capacity(len);
    for n in 0..len {
        if n == 0 {
            b.push(Q::one());
            continue;
        }
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        let mut acc = Q::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += Q::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Q::from_integer(BigInt::from(n + 1)));
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::intmatrix::{q, qf};

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(7);
        assert_eq!(b, vec![q(1), qf(-1, 2), qf(1, 6), q(0), qf(-1, 30), q(0), qf(1, 42)]);
    }

    #[test]
    fn reciprocal_of_geometric() {
        let a = vec![CycNumber::one(), CycNumber::from_int(-1), CycNumber::zero()];
        let b = reciprocal(&a).unwrap();
        assert!(b.iter().all(CycNumber::is_one));
    }

    #[test]
    fn linear_division() {
        let (l, c) = LinearForm::normalize(&[q(2), q(-2)]).unwrap();
        assert_eq!(c, q(2));
        let p = l.to_poly().mul(&Poly::linear(&[q(1), q(3)]));
        assert_eq!(p.div_linear(&l).unwrap(), Poly::linear(&[q(1), q(3)]));
        assert!(Poly::linear(&[q(1), q(3)]).div_linear(&l).is_none());
    }

    #[test]
    fn hom_rational_equality_across_denominators() {
        // 1/(l1) + 1/(l2) == (l1 + l2)/(l1 l2)
        let (a, _) = LinearForm::normalize(&[q(1), q(0)]).unwrap();
        let (b, _) = LinearForm::normalize(&[q(0), q(1)]).unwrap();
        let lhs = HomRational::from_parts(Poly::one(2), vec![a.clone()]).add(&HomRational::from_parts(Poly::one(2), vec![b.clone()]));
        let rhs = HomRational::from_parts(Poly::linear(&[q(1), q(1)]), vec![a, b]);
        assert!(lhs == rhs);
        assert_eq!(lhs.to_string(), "l2^-1 + l1^-1");
    }
}
