use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cyclotomic::fmt_q;
use super::intmatrix::Q;

/// Monomial e^(q . lambda) with q in (1/den) Z^m.
///
/// Stored as integer numerators over a common denominator, always reduced
/// so that `den` is minimal and positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FracMonomial {
    num: Vec<i64>,
    den: i64,
}

impl FracMonomial {
    pub fn one(nvars: usize) -> Self {
        FracMonomial {
            num: vec![0; nvars],
            den: 1,
        }
    }

    /// e^(lambda_i)
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.num[i] = 1;
        m
    }

    pub fn from_ints(exps: &[i64]) -> Self {
        FracMonomial {
            num: exps.to_vec(),
            den: 1,
        }
    }

    pub fn from_parts(num: Vec<i64>, den: i64) -> Self {
        assert!(den != 0, "zero denominator in exponent");
        let mut m = FracMonomial { num, den };
        m.reduce();
        m
    }

    pub fn from_rationals(q: &[Q]) -> Self {
        let den = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num = q
            .iter()
            .map(|x| {
                (x * Q::from_integer(den.clone()))
                    .to_integer()
                    .to_i64()
                    .expect("exponent overflow")
            })
            .collect();
        Self::from_parts(num, den.to_i64().expect("exponent denominator overflow"))
    }

    fn reduce(&mut self) {
        if self.den < 0 {
            self.den = -self.den;
            for x in &mut self.num {
                *x = -*x;
            }
        }
        let g = self.num.iter().fold(self.den, |acc, x| acc.gcd(x));
        if g > 1 {
            self.den /= g;
            for x in &mut self.num {
                *x /= g;
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.num.len()
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn numerators(&self) -> &[i64] {
        &self.num
    }

    pub fn exponent(&self, i: usize) -> Q {
        Q::new(BigInt::from(self.num[i]), BigInt::from(self.den))
    }

    pub fn exponents(&self) -> Vec<Q> {
        (0..self.num.len()).map(|i| self.exponent(i)).collect()
    }

    pub fn is_one(&self) -> bool {
        self.num.iter().all(|&x| x == 0)
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    /// Sum of exponents (total degree).
    pub fn degree(&self) -> Q {
        Q::new(BigInt::from(self.num.iter().sum::<i64>()), BigInt::from(self.den))
    }

    /// Sign of the first nonzero exponent.
    pub fn lex_sign(&self) -> Ordering {
        self.num
            .iter()
            .find(|&&x| x != 0)
            .map_or(Ordering::Equal, |x| x.cmp(&0))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.num.iter().all(|&x| x >= 0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.num.iter().all(|&x| x <= 0)
    }

    /// Product of monomials (sum of exponents).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "monomials over different tori");
        let l = self.den.lcm(&other.den);
        let (fa, fb) = (l / self.den, l / other.den);
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| {
                a.checked_mul(fa)
                    .and_then(|x| b.checked_mul(fb).and_then(|y| x.checked_add(y)))
                    .expect("exponent overflow")
            })
            .collect();
        Self::from_parts(num, l)
    }

    pub fn inv(&self) -> Self {
        FracMonomial {
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den,
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::from_parts(
            self.num.iter().map(|x| x.checked_mul(k).expect("exponent overflow")).collect(),
            self.den,
        )
    }

    /// Substitutes lambda_i -> sum_j a[i][j] mu_j: the exponent q becomes a^T q.
    pub fn specialize(&self, a: &[Vec<Q>]) -> Self {
        assert_eq!(a.len(), self.nvars(), "specialization matrix has wrong row count");
        let k = a.first().map_or(0, |r| r.len());
        let q = self.exponents();
        let out: Vec<Q> = (0..k).map(|j| q.iter().zip(a).map(|(qi, row)| qi * &row[j]).sum()).collect();
        Self::from_rationals(&out)
    }

    /// Formats the exponent as a linear form in l1..lm (or with a custom variable prefix).
    pub fn fmt_linear(&self, var: &str) -> String {
        fmt_linear_form(&self.exponents(), var)
    }
}

pub fn fmt_linear_form(coeffs: &[Q], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let name = format!("{var}{}", i + 1);
        let mag = c.abs();
        let body = if mag.is_one() { name } else { format!("{}*{name}", fmt_q(&mag)) };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { "-" } else { "+" });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl Ord for FracMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.num.iter().zip(&other.num) {
            let lhs = *a as i128 * other.den as i128;
            let rhs = *b as i128 * self.den as i128;
            match lhs.cmp(&rhs) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.num.len().cmp(&other.num.len())
    }
}

impl PartialOrd for FracMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FracMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^({})", self.fmt_linear("l"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::intmatrix::{q, qf};

    #[test]
    fn normalizes_denominator() {
        let m = FracMonomial::from_parts(vec![2, -4], 4);
        assert_eq!(m, FracMonomial::from_rationals(&[qf(1, 2), q(-1)]));
        assert_eq!(m.den(), 2);
        assert_eq!(m.to_string(), "e^(1/2*l1-l2)");
    }

    #[test]
    fn product_and_order() {
        let a = FracMonomial::from_rationals(&[qf(1, 2), q(0)]);
        let b = FracMonomial::from_rationals(&[qf(1, 2), q(1)]);
        assert_eq!(a.mul(&b), FracMonomial::from_ints(&[1, 1]));
        assert!(a < b);
        assert!(a.mul(&a.inv()).is_one());
    }

    #[test]
    fn diagonal_specialization() {
        let m = FracMonomial::from_ints(&[1, 2]);
        let a = vec![vec![q(1)], vec![q(1)]];
        assert_eq!(m.specialize(&a), FracMonomial::from_ints(&[3]));
    }
}
