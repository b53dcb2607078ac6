use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::cyclotomic::CycNumber;
use super::intmatrix::Q;
use super::laurent::LaurentPoly;
use super::monomial::FracMonomial;
use super::series::{exp_series, reciprocal, factorial, GradedSeries, LinearForm, TSeries};
use crate::error::{Error, Result};

/// Denominator factor (1 - c e^mu) where c = exp(2 pi i * angle) is a root of unity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DenFactor {
    angle: Q,
    mu: FracMonomial,
}

impl DenFactor {
    /// The angle is reduced into [0, 1).
    pub fn new(angle: Q, mu: FracMonomial) -> Self {
        let angle = &angle - angle.floor();
        DenFactor { angle, mu }
    }

    /// Plain factor (1 - e^mu).
    pub fn plain(mu: FracMonomial) -> Self {
        DenFactor { angle: Q::zero(), mu }
    }

    pub fn angle(&self) -> &Q {
        &self.angle
    }

    pub fn monomial(&self) -> &FracMonomial {
        &self.mu
    }

    pub fn coefficient(&self) -> CycNumber {
        CycNumber::exp_2pi_i(&self.angle)
    }

    fn order(&self) -> i64 {
        self.angle.denom().to_i64().expect("root of unity order overflow")
    }
}

impl fmt::Display for DenFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.angle.is_zero() {
            write!(f, "(1 - {})", self.mu)
        } else {
            write!(f, "(1 - ({})*{})", self.coefficient(), self.mu)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub num: LaurentPoly,
    pub den: Vec<DenFactor>,
}

/// Element of the fraction field of the representation ring, kept as an
/// unreduced sum of localized terms.
#[derive(Clone, Debug)]
pub struct RationalCharacter {
    nvars: usize,
    terms: Vec<Term>,
}

impl RationalCharacter {
    pub fn zero(nvars: usize) -> Self {
        RationalCharacter {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_laurent(LaurentPoly::one(nvars))
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        Self::from_term(p, Vec::new())
    }

    pub fn from_term(num: LaurentPoly, den: Vec<DenFactor>) -> Self {
        let nvars = num.nvars();
        let mut x = Self::zero(nvars);
        if !num.is_zero() {
            x.terms.push(Term { num, den });
        }
        x
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&CycNumber::from_int(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        RationalCharacter {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    num: t.num.scale(c),
                    den: t.den.clone(),
                })
                .filter(|t| !t.num.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for a in &self.terms {
            for b in &other.terms {
                let num = a.num.mul(&b.num);
                if num.is_zero() {
                    continue;
                }
                let mut den = a.den.clone();
                den.extend(b.den.iter().cloned());
                out.terms.push(Term { num, den });
            }
        }
        out
    }

    /// Replaces every exponent q by a^T q.
    pub fn specialize(&self, a: &[Vec<Q>]) -> Result<Self> {
        let k = a.first().map_or(0, |r| r.len());
        let mut out = Self::zero(k);
        for t in &self.terms {
            let mut num = t.num.specialize(a);
            let mut den = Vec::new();
            for f in &t.den {
                let mu = f.mu.specialize(a);
                if mu.is_one() {
                    if f.angle.is_zero() {
                        return Err(Error::DenominatorCollapse(f.to_string()));
                    }
                    let inv = (&CycNumber::one() - &f.coefficient()).inv().expect("nonzero");
                    num = num.scale(&inv);
                } else {
                    den.push(DenFactor::new(f.angle.clone(), mu));
                }
            }
            if !num.is_zero() {
                out.terms.push(Term { num, den });
            }
        }
        Ok(out)
    }

    /// Single fraction with integral, lex-positive denominator factors.
    pub fn canonical(&self) -> Canonical {
        let mut acc = Canonical::zero(self.nvars);
        for t in &self.terms {
            acc = acc.add(&Canonical::of_term(t));
        }
        acc
    }

    /// The same function as a single reduced term.
    pub fn reduce(&self) -> Self {
        let c = self.canonical();
        let mut den = Vec::new();
        for (mu, k) in &c.den {
            for _ in 0..*k {
                den.push(DenFactor::plain(mu.clone()));
            }
        }
        Self::from_term(c.num, den)
    }

    /// Numerator coefficients rational and exponents integral after reduction.
    pub fn has_rational_coefficients(&self) -> bool {
        let c = self.canonical();
        c.num.is_rational() && c.num.is_integral()
    }

    /// Laurent expansion at lambda = 0 up to total degree `order`.
    pub fn expand(&self, order: i64) -> Result<GradedSeries> {
        let mut out = GradedSeries::zero(self.nvars, order);
        for t in &self.terms {
            let mut poles = Vec::new();
            let mut scalar = Q::one();
            let mut pieces: Vec<(Vec<CycNumber>, Vec<Q>)> = Vec::new();
            for f in &t.den {
                let form = f.mu.exponents();
                if f.angle.is_zero() {
                    let (lf, lead) = LinearForm::normalize(&form).ok_or(Error::ZeroDenominator)?;
                    poles.push(lf);
                    scalar /= lead;
                    pieces.push((Vec::new(), form));
                } else {
                    pieces.push((vec![f.coefficient()], form));
                }
            }
            let len = (order + poles.len() as i64 + 1).max(0) as usize;
            if len == 0 {
                continue;
            }
            let mut series = TSeries::zero(self.nvars, len);
            let exp = exp_series(len);
            for (m, c) in t.num.terms() {
                series = series.add(&TSeries::compose(&exp, &m.exponents(), len).scale(c));
            }
            for (c, form) in pieces {
                let uni = match c.first() {
                    None => pole_series(len),
                    Some(c) => twisted_series(c, len),
                };
                series = series.mul(&TSeries::compose(&uni, &form, len));
            }
            out.add_expansion(&series.scale(&CycNumber::from_q(scalar)), &poles);
        }
        Ok(out)
    }

    /// Power-series expansion around the origin of the cone of exponents,
    /// truncated at total degree `bound`. Fails if some denominator factor
    /// is neither nonnegative nor nonpositive with nonzero degree.
    pub fn expand_power_series(&self, bound: i64) -> Result<LaurentPoly> {
        let c = self.canonical();
        let mut num = c.num.clone();
        let mut geo = Vec::new();
        for (mu, k) in &c.den {
            let nu = if mu.is_nonnegative() {
                mu.clone()
            } else if mu.is_nonpositive() {
                // 1/(1 - e^mu) = -e^(-mu)/(1 - e^(-mu))
                for _ in 0..*k {
                    num = num.mul_monomial(&mu.inv()).neg();
                }
                mu.inv()
            } else {
                return Err(Error::NotConvex(format!("factor {mu} has mixed signs")));
            };
            if !nu.degree().is_positive_q() {
                return Err(Error::NotConvex(format!("factor {nu} has degree zero")));
            }
            for _ in 0..*k {
                geo.push(nu.clone());
            }
        }
        let bound_q = Q::from_integer(bound.into());
        let lo = num.degree_range().map_or(Q::zero(), |(lo, _)| lo);
        let budget = &bound_q - lo;
        let mut series = LaurentPoly::one(self.nvars);
        for nu in geo {
            let mut g = LaurentPoly::zero(self.nvars);
            let mut p = FracMonomial::one(self.nvars);
            while p.degree() <= budget {
                g.add_term(p.clone(), CycNumber::one());
                p = p.mul(&nu);
            }
            series = series.mul(&g).truncate_degree(&budget);
        }
        Ok(num.mul(&series).truncate_degree(&bound_q))
    }
}

trait PositiveQ {
    fn is_positive_q(&self) -> bool;
}

impl PositiveQ for Q {
    fn is_positive_q(&self) -> bool {
        *self > Q::zero()
    }
}

/// s/(1 - e^s) as a power series in s.
fn pole_series(len: usize) -> Vec<CycNumber> {
    let a: Vec<CycNumber> = (0..len)
        .map(|k| CycNumber::from_q(-Q::new(One::one(), factorial(k + 1))))
        .collect();
    reciprocal(&a).expect("invertible")
}

/// 1/(1 - c e^s) for c != 1.
fn twisted_series(c: &CycNumber, len: usize) -> Vec<CycNumber> {
    let exp = exp_series(len);
    let a: Vec<CycNumber> = (0..len)
        .map(|k| {
            let t = -&(c * &exp[k]);
            if k == 0 {
                &CycNumber::one() + &t
            } else {
                t
            }
        })
        .collect();
    reciprocal(&a).expect("c is not 1")
}

/// Decides equality of two rational characters as rational functions.
pub fn rat_equal(a: &RationalCharacter, b: &RationalCharacter) -> bool {
    a.sub(b).canonical().num.is_zero()
}

/// A single fraction num / prod (1 - e^mu)^k with integral, lex-positive mu.
#[derive(Clone, Debug, PartialEq)]
pub struct Canonical {
    pub num: LaurentPoly,
    pub den: BTreeMap<FracMonomial, u32>,
}

impl Canonical {
    pub fn zero(nvars: usize) -> Self {
        Canonical {
            num: LaurentPoly::zero(nvars),
            den: BTreeMap::new(),
        }
    }

    fn of_term(t: &Term) -> Self {
        let nvars = t.num.nvars();
        let mut num = t.num.clone();
        let mut den: BTreeMap<FracMonomial, u32> = BTreeMap::new();
        for f in &t.den {
            let c = f.coefficient();
            if f.mu.is_one() {
                let inv = (&CycNumber::one() - &c).inv().expect("zero denominator factor");
                num = num.scale(&inv);
                continue;
            }
            // 1/(1 - y) = (1 + y + ... + y^(L-1)) / (1 - y^L), with y^L = e^(L mu)
            let l = f.order().lcm(&f.mu.den());
            let mut geo = LaurentPoly::zero(nvars);
            let mut cj = CycNumber::one();
            for j in 0..l {
                geo.add_term(f.mu.pow(j), cj.clone());
                cj = &cj * &c;
            }
            num = num.mul(&geo);
            let mut nu = f.mu.pow(l);
            if nu.lex_sign() == std::cmp::Ordering::Less {
                nu = nu.inv();
                num = num.mul_monomial(&nu).neg();
            }
            *den.entry(nu).or_default() += 1;
        }
        let mut out = Canonical { num, den };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (nu, k) in self.den.iter_mut() {
            while *k > 0 {
                match self.num.div_one_minus(nu) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, k| *k > 0);
    }

    fn clear_to(&self, target: &BTreeMap<FracMonomial, u32>) -> LaurentPoly {
        let mut num = self.num.clone();
        let nvars = num.nvars();
        for (nu, k) in target {
            let have = self.den.get(nu).copied().unwrap_or(0);
            let binom = LaurentPoly::one(nvars).sub(&LaurentPoly::monomial(nu.clone()));
            for _ in have..*k {
                num = num.mul(&binom);
            }
        }
        num
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.num.is_zero() {
            return other.clone();
        }
        if other.num.is_zero() {
            return self.clone();
        }
        let mut den = self.den.clone();
        for (nu, k) in &other.den {
            let slot = den.entry(nu.clone()).or_default();
            *slot = (*slot).max(*k);
        }
        let num = self.clear_to(&den).add(&other.clear_to(&den));
        let mut out = Canonical { num, den };
        out.reduce();
        out
    }
}

impl fmt::Display for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let dens: Vec<String> = self
            .den
            .iter()
            .rev()
            .map(|(nu, k)| {
                if *k == 1 {
                    format!("(1 - {nu})")
                } else {
                    format!("(1 - {nu})^{k}")
                }
            })
            .collect();
        if self.num.len() == 1 {
            write!(f, "{}/({})", self.num, dens.join("*"))
        } else {
            write!(f, "({})/({})", self.num, dens.join("*"))
        }
    }
}

impl fmt::Display for RationalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}
