use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::cyclotomic::CycNumber;
use super::intmatrix::Q;
use super::monomial::FracMonomial;

/// Laurent polynomial in e^(lambda_1), ..., e^(lambda_m) with fractional
/// exponents and cyclotomic coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<FracMonomial, CycNumber>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, CycNumber::one())
    }

    pub fn constant(nvars: usize, c: CycNumber) -> Self {
        Self::term(FracMonomial::one(nvars), c)
    }

    pub fn monomial(m: FracMonomial) -> Self {
        Self::term(m, CycNumber::one())
    }

    pub fn term(m: FracMonomial, c: CycNumber) -> Self {
        let mut p = Self::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FracMonomial, &CycNumber)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &FracMonomial) -> CycNumber {
        self.terms.get(m).cloned().unwrap_or_else(CycNumber::zero)
    }

    pub fn add_term(&mut self, m: FracMonomial, c: CycNumber) {
        assert_eq!(m.nvars(), self.nvars, "monomial over a different torus");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&CycNumber::from_int(-1))
    }

    pub fn scale(&self, c: &CycNumber) -> Self {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, x) in &self.terms {
            out.terms.insert(m.clone(), x * c);
        }
        out
    }

    pub fn scale_q(&self, x: &Q) -> Self {
        self.scale(&CycNumber::from_q(x.clone()))
    }

    pub fn mul_monomial(&self, m: &FracMonomial) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// True iff every coefficient is rational.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(CycNumber::is_rational)
    }

    /// True iff every exponent is integral.
    pub fn is_integral(&self) -> bool {
        self.terms.keys().all(FracMonomial::is_integral)
    }

    pub fn max_conductor(&self) -> u64 {
        self.terms.values().map(CycNumber::conductor).fold(1, |a, b| a.lcm(&b))
    }

    /// Replaces every exponent q by a^T q (see [`FracMonomial::specialize`]).
    pub fn specialize(&self, a: &[Vec<Q>]) -> Self {
        let k = a.first().map_or(0, |r| r.len());
        let mut out = Self::zero(k);
        for (m, c) in &self.terms {
            out.add_term(m.specialize(a), c.clone());
        }
        out
    }

    /// Exact division by the binomial (1 - e^mu), mu != 0. None if not divisible.
    pub fn div_one_minus(&self, mu: &FracMonomial) -> Option<Self> {
        let pivot = mu.numerators().iter().position(|&x| x != 0)?;
        let mu_i = mu.exponent(pivot);
        // classes of exponents modulo Z*mu, each indexed by the multiple k
        let mut classes: BTreeMap<FracMonomial, BTreeMap<BigInt, CycNumber>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let t: Q = m.exponent(pivot) / &mu_i;
            let k = t.floor().to_integer();
            let shift = mu.pow(-i64::try_from(k.clone()).ok()?);
            classes.entry(m.mul(&shift)).or_default().insert(k, c.clone());
        }
        let mut out = Self::zero(self.nvars);
        for (base, coeffs) in classes {
            let mut acc = CycNumber::zero();
            let kmin = coeffs.keys().next().unwrap().clone();
            let kmax = coeffs.keys().next_back().unwrap().clone();
            let mut k = kmin;
            while k < kmax {
                if let Some(c) = coeffs.get(&k) {
                    acc = &acc + c;
                }
                if !acc.is_zero() {
                    let e = i64::try_from(k.clone()).ok()?;
                    out.add_term(base.mul(&mu.pow(e)), acc.clone());
                }
                k += 1;
            }
            acc = &acc + &coeffs[&kmax];
            if !acc.is_zero() {
                return None;
            }
        }
        Some(out)
    }

    /// Total degree of the lowest and highest monomials.
    pub fn degree_range(&self) -> Option<(Q, Q)> {
        let degs: Vec<Q> = self.terms.keys().map(FracMonomial::degree).collect();
        let lo = degs.iter().min()?.clone();
        let hi = degs.iter().max()?.clone();
        Some((lo, hi))
    }

    /// Drops every term of total degree > bound.
    pub fn truncate_degree(&self, bound: &Q) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| &m.degree() <= bound)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = match c.as_rational() {
                Some(x) if x.is_negative() => (true, CycNumber::from_q(-x.clone())),
                _ => (false, c.clone()),
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
