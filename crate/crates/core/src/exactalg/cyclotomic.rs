//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! An element is stored in the power basis 1, z, ..., z^(phi(N)-1) of a
//! primitive N-th root of unity z, reduced modulo the N-th cyclotomic
//! polynomial. Binary operations lift both operands to the lcm conductor.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::intmatrix::{rational_solve, Q};

fn cyclo_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (ascending) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic conductor must be positive");
    if let Some(p) = cyclo_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d | n, d < n
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = poly_div_exact(&num, &div);
        }
    }
    let p = Arc::new(num);
    cyclo_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = *den.last().unwrap();
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd] / lead;
        quot[k] = c;
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quot
}

pub fn euler_phi(n: u64) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// Element of the N-th cyclotomic field.
#[derive(Clone, Debug)]
pub struct CycNumber {
    conductor: u64,
    coeffs: Vec<Q>,
}

impl CycNumber {
    pub fn zero() -> Self {
        Self::from_q(Q::zero())
    }

    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    pub fn from_q(x: Q) -> Self {
        CycNumber {
            conductor: 1,
            coeffs: vec![x],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_q(Q::from_integer(BigInt::from(n)))
    }

    /// zeta_n^k.
    pub fn root_of_unity(n: u64, k: i64) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Q::zero(); k + 1];
        poly[k] = Q::one();
        let mut out = CycNumber {
            conductor: n,
            coeffs: reduce(poly, n),
        };
        out.normalize();
        out
    }

    /// exp(2 pi i x) for rational x.
    pub fn exp_2pi_i(x: &Q) -> Self {
        let den = x.denom().to_u64().expect("root of unity order fits in u64");
        let num = x.numer().mod_floor(x.denom()).to_i64().expect("numerator fits in i64");
        Self::root_of_unity(den, num)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|x| x.is_one())
    }

    /// Some(q) iff the element is rational.
    pub fn as_rational(&self) -> Option<&Q> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    fn normalize(&mut self) {
        if self.conductor != 1 && self.coeffs[1..].iter().all(Zero::is_zero) {
            self.conductor = 1;
            self.coeffs.truncate(1);
        }
    }

    /// Re-expresses the element in the field of conductor `l` (a multiple of the current one).
    pub fn lift(&self, l: u64) -> Self {
        assert!(l.is_multiple_of(self.conductor), "conductor {} does not divide {l}", self.conductor);
        if l == self.conductor {
            return self.clone();
        }
        let step = (l / self.conductor) as usize;
        let mut poly = vec![Q::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        CycNumber {
            conductor: l,
            coeffs: reduce(poly, l),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let l = self.conductor.lcm(&other.conductor);
        (self.lift(l), other.lift(l))
    }

    pub fn scale(&self, x: &Q) -> Self {
        let mut out = CycNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * x).collect(),
        };
        out.normalize();
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; None for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(x) = self.as_rational() {
            return Some(Self::from_q(x.recip()));
        }
        // columns of the multiplication-by-self matrix are self * z^k
        let n = self.coeffs.len();
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut poly = vec![Q::zero(); self.coeffs.len() + k];
            for (i, c) in self.coeffs.iter().enumerate() {
                poly[i + k] = c.clone();
            }
            cols.push(reduce(poly, self.conductor));
        }
        let rows: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|k| cols[k][i].clone()).collect()).collect();
        let mut rhs = vec![Q::zero(); n];
        rhs[0] = Q::one();
        let x = rational_solve(&rows, n, &rhs).ok()?;
        let mut out = CycNumber {
            conductor: self.conductor,
            coeffs: x,
        };
        out.normalize();
        Some(out)
    }
}

fn reduce(mut poly: Vec<Q>, n: u64) -> Vec<Q> {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    for k in (d..poly.len()).rev() {
        if poly[k].is_zero() {
            continue;
        }
        let c = poly[k].clone();
        for (i, p) in phi.iter().enumerate() {
            if *p != 0 {
                poly[k - d + i] -= &c * Q::from_integer(BigInt::from(*p));
            }
        }
    }
    poly.resize(d, Q::zero());
    poly
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNumber {}

impl<'a> Add<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: &CycNumber) -> CycNumber {
        if self.conductor == 1 && rhs.conductor == 1 {
            return CycNumber::from_q(&self.coeffs[0] + &rhs.coeffs[0]);
        }
        let (a, b) = self.common(rhs);
        let mut out = CycNumber {
            conductor: a.conductor,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        };
        out.normalize();
        out
    }
}

impl<'a> Sub<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: &CycNumber) -> CycNumber {
        self + &(-rhs)
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }
}

impl<'a> Mul<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: &CycNumber) -> CycNumber {
        if self.conductor == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.conductor == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        let (a, b) = self.common(rhs);
        let mut poly = vec![Q::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        let mut out = CycNumber {
            conductor: a.conductor,
            coeffs: reduce(poly, a.conductor),
        };
        out.normalize();
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycNumber> for CycNumber {
            type Output = CycNumber;
            fn $m(self, rhs: CycNumber) -> CycNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        -&self
    }
}

pub(crate) fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.as_rational() {
            return write!(f, "{}", fmt_q(x));
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = match k {
                0 => String::new(),
                1 => format!("z{}", self.conductor),
                _ => format!("z{}^{}", self.conductor, k),
            };
            let term = match (k, c.abs().is_one()) {
                (0, _) => fmt_q(c),
                (_, true) => {
                    if c.is_negative() {
                        format!("-{z}")
                    } else {
                        z
                    }
                }
                _ => format!("{}*{z}", fmt_q(c)),
            };
            parts.push(term);
        }
        write!(f, "({})", parts.join(" + ").replace("+ -", "- "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::intmatrix::qf;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn zeta_to_the_n_is_one() {
        for n in 1..=12u64 {
            let z = CycNumber::root_of_unity(n, 1);
            assert!(z.pow(n as u32).is_one(), "n = {n}");
            if n > 1 {
                assert!(!z.pow(n as u32 - 1).is_one());
            }
        }
    }

    #[test]
    fn sum_of_roots_vanishes() {
        for n in 2..=12u64 {
            let s = (0..n as i64).fold(CycNumber::zero(), |acc, k| acc + CycNumber::root_of_unity(n, k));
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn lifting_is_consistent() {
        let z3 = CycNumber::root_of_unity(3, 1);
        let z6sq = CycNumber::root_of_unity(6, 2);
        assert_eq!(z3, z6sq);
        let minus_one = CycNumber::root_of_unity(2, 1);
        assert_eq!(minus_one.as_rational(), Some(&qf(-1, 1)));
        assert_eq!(CycNumber::exp_2pi_i(&qf(3, 2)), minus_one);
    }

    #[test]
    fn inverse() {
        let z5 = CycNumber::root_of_unity(5, 2);
        let a = &CycNumber::one() - &z5;
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert!(CycNumber::zero().inv().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(CycNumber::from_q(qf(5, 12)).to_string(), "5/12");
        let z = CycNumber::root_of_unity(3, 2);
        assert_eq!(z.to_string(), "(-1 - z3)");
    }
}
