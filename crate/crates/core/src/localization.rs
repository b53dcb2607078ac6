//! Torus-equivariant Euler characteristics by fixed-point localization, and
//! the cohomological (Riemann-Roch) side of the same computation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::cyclotomic::CycNumber;
use crate::exactalg::intmatrix::{dot, rational_solve, smith_normal_form, Q};
use crate::exactalg::laurent::LaurentPoly;
use crate::exactalg::monomial::FracMonomial;
use crate::exactalg::rational::{DenFactor, RationalCharacter};
use crate::exactalg::series::{bernoulli, factorial, GradedSeries, LinearForm, TSeries};
use crate::gitdata::{fixed_points, validate, weights_convex, Anticone, GITData};

/// Line class: the line bundle induced by the K-character u and T-character s.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineClass {
    pub u: Vec<i64>,
    pub s: Vec<i64>,
}

/// Integer combination of line classes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EquivClass {
    terms: BTreeMap<LineClass, i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassTermJson {
    u: Vec<i64>,
    s: Vec<i64>,
    coeff: i64,
}

impl EquivClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn line(u: Vec<i64>, s: Vec<i64>) -> Self {
        let mut c = Self::zero();
        c.add_line(LineClass { u, s }, 1);
        c
    }

    /// The structure sheaf on data with r = `r`, m = `m`.
    pub fn trivial(r: usize, m: usize) -> Self {
        Self::line(vec![0; r], vec![0; m])
    }

    /// O(a) on rank-one data.
    pub fn o(a: i64, m: usize) -> Self {
        Self::line(vec![a], vec![0; m])
    }

    pub fn add_line(&mut self, l: LineClass, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(l.clone()).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&l);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LineClass, i64)> {
        self.terms.iter().map(|(l, c)| (l, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in other.terms() {
            out.add_line(l.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (l, c) in self.terms() {
            out.add_line(l.clone(), c * k);
        }
        out
    }

    /// Tensor product: characters add, coefficients multiply.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let u = a.u.iter().zip(&b.u).map(|(x, y)| x + y).collect();
                let s = a.s.iter().zip(&b.s).map(|(x, y)| x + y).collect();
                out.add_line(LineClass { u, s }, ca * cb);
            }
        }
        out
    }

    pub fn check_shape(&self, r: usize, m: usize) -> Result<()> {
        for (l, _) in self.terms() {
            if l.u.len() != r || l.s.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "line class with |u| = {}, |s| = {} on data with r = {r}, m = {m}",
                    l.u.len(),
                    l.s.len()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let items: Vec<ClassTermJson> =
            serde_json::from_str(text).map_err(|e| Error::parse("class", e.to_string()))?;
        let mut out = Self::zero();
        for t in items {
            out.add_line(LineClass { u: t.u, s: t.s }, t.coeff);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let items: Vec<ClassTermJson> = self
            .terms()
            .map(|(l, c)| ClassTermJson {
                u: l.u.clone(),
                s: l.s.clone(),
                coeff: c,
            })
            .collect();
        serde_json::to_string(&items).expect("serializable")
    }

    /// Accepts "O", "O(a)" on rank-one data, or a JSON list of terms.
    pub fn parse(spec: &str, r: usize, m: usize) -> Result<Self> {
        let t = spec.trim();
        let class = if t == "O" {
            Self::trivial(r, m)
        } else if let Some(inner) = t.strip_prefix("O(").and_then(|x| x.strip_suffix(')')) {
            if r != 1 {
                return Err(Error::parse("class", format!("O(a) needs rank-one data, got r = {r}")));
            }
            let a: i64 = inner
                .trim()
                .parse()
                .map_err(|_| Error::parse("class", format!("bad twist {inner:?}")))?;
            Self::o(a, m)
        } else if t.starts_with('[') {
            Self::from_json(t)?
        } else {
            return Err(Error::parse("class", format!("unrecognized class {t:?}")));
        };
        class.check_shape(r, m)?;
        Ok(class)
    }
}

impl std::fmt::Display for EquivClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(l, c)| {
                let body = format!("L(u={:?}, s={:?})", l.u, l.s);
                if c == 1 {
                    body
                } else {
                    format!("{c}*{body}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Local data at a torus-fixed point of the quotient stack.
#[derive(Clone, Debug)]
pub struct FixedPointData {
    pub delta: Anticone,
    /// Elements v of the isotropy group, exp(2 pi i v) in K, entries in [0, 1).
    pub group: Vec<Vec<Q>>,
    /// Coordinates j not in delta, with the coefficients expressing D_j in the delta basis.
    pub normal: Vec<(usize, Vec<Q>)>,
    /// Tangent weights w_j as exponent vectors in lambda.
    pub weights: Vec<Vec<Q>>,
    /// Inverse of the matrix whose columns are D_i, i in delta.
    basis_inverse: Vec<Vec<Q>>,
    m: usize,
    characters: Vec<Vec<Q>>,
}

fn frac(x: &Q) -> Q {
    x - x.floor()
}

impl FixedPointData {
    pub fn order(&self) -> usize {
        self.group.len()
    }

    /// Angle of g on the normal coordinate j, as the fractional part of -D_j . v.
    pub fn angle(&self, g: usize, normal_index: usize) -> Q {
        let j = self.normal[normal_index].0;
        frac(&-dot(&self.characters[j], &self.group[g]))
    }

    /// Coordinates of u in the basis D_i, i in delta.
    pub fn coordinates(&self, u: &[Q]) -> Vec<Q> {
        self.basis_inverse.iter().map(|row| dot(row, u)).collect()
    }

    /// Exponent of the fiber character of the line class at the fixed point.
    pub fn fiber_weight(&self, l: &LineClass) -> Vec<Q> {
        let u: Vec<Q> = l.u.iter().map(|&x| Q::from_integer(x.into())).collect();
        let a = self.coordinates(&u);
        let mut w: Vec<Q> = l.s.iter().map(|&x| Q::from_integer(x.into())).collect();
        for (k, &i) in self.delta.indices().iter().enumerate() {
            w[i] += &a[k];
        }
        w
    }

    /// Angle of g on the fiber of the line class.
    pub fn fiber_angle(&self, g: usize, l: &LineClass) -> Q {
        let u: Vec<Q> = l.u.iter().map(|&x| Q::from_integer(x.into())).collect();
        frac(&dot(&u, &self.group[g]))
    }

    pub fn nvars(&self) -> usize {
        self.m
    }
}

pub fn fixed_point_data(data: &GITData, delta: &Anticone) -> Result<FixedPointData> {
    let r = data.r();
    if delta.len() != r || !data.is_anticone(delta.indices()) {
        return Err(Error::NotMinimalAnticone(delta.to_string()));
    }
    let sub = data.weight_matrix().select_cols(delta.indices());
    let smith = smith_normal_form(&sub.transpose());
    let d: Vec<BigInt> = (0..r).map(|i| smith.s[(i, i)].clone()).collect();
    if d.iter().any(Zero::is_zero) {
        return Err(Error::NotMinimalAnticone(delta.to_string()));
    }
    let vq = smith.v.to_rational();
    let mut group = Vec::new();
    let sizes: Vec<u64> = d.iter().map(|x| x.to_u64().expect("isotropy order fits u64").max(1)).collect();
    let total: u64 = sizes.iter().product();
    for mut idx in 0..total {
        let mut w = Vec::with_capacity(r);
        for (i, &n) in sizes.iter().enumerate() {
            w.push(Q::new(BigInt::from(idx % n), d[i].clone()));
            idx /= n;
        }
        let v: Vec<Q> = (0..r).map(|a| frac(&dot(&vq[a], &w))).collect();
        group.push(v);
    }
    group.sort();
    let rows: Vec<Vec<Q>> = sub.to_rational();
    let mut basis_inverse = vec![vec![Q::zero(); r]; r];
    for k in 0..r {
        let mut unit = vec![Q::zero(); r];
        unit[k] = Q::one();
        let col = rational_solve(&rows, r, &unit)?;
        for (i, x) in col.into_iter().enumerate() {
            basis_inverse[i][k] = x;
        }
    }
    let characters: Vec<Vec<Q>> = (0..data.m()).map(|i| data.weight(i)).collect();
    let mut normal = Vec::new();
    let mut weights = Vec::new();
    for j in (0..data.m()).filter(|j| !delta.contains(*j)) {
        let c: Vec<Q> = basis_inverse.iter().map(|row| dot(row, &characters[j])).collect();
        let mut w = vec![Q::zero(); data.m()];
        w[j] = Q::one();
        for (k, &i) in delta.indices().iter().enumerate() {
            w[i] -= &c[k];
        }
        normal.push((j, c));
        weights.push(w);
    }
    Ok(FixedPointData {
        delta: delta.clone(),
        group,
        normal,
        weights,
        basis_inverse,
        m: data.m(),
        characters,
    })
}

pub fn all_fixed_point_data(data: &GITData) -> Result<Vec<FixedPointData>> {
    fixed_points(data).iter().map(|d| fixed_point_data(data, d)).collect()
}

/// Trace of g e^lambda on the fiber of E at the fixed point.
pub fn restrict(e: &EquivClass, fp: &FixedPointData, g: usize) -> LaurentPoly {
    let mut out = LaurentPoly::zero(fp.m);
    for (l, c) in e.terms() {
        let coeff = CycNumber::exp_2pi_i(&fp.fiber_angle(g, l)).scale(&Q::from_integer(c.into()));
        out.add_term(FracMonomial::from_rationals(&fp.fiber_weight(l)), coeff);
    }
    out
}

fn check_input(data: &GITData, e: &EquivClass) -> Result<()> {
    let report = validate(data);
    if !report.passed() {
        return Err(Error::InvalidData(report.failures.join("; ")));
    }
    e.check_shape(data.r(), data.m())
}

/// Equivariant Euler characteristic as a sum of fixed-point contributions.
pub fn euler_characteristic(data: &GITData, e: &EquivClass) -> Result<RationalCharacter> {
    check_input(data, e)?;
    let mut chi = RationalCharacter::zero(data.m());
    for fp in all_fixed_point_data(data)? {
        let avg = Q::new(BigInt::one(), BigInt::from(fp.order()));
        for g in 0..fp.order() {
            let num = restrict(e, &fp, g).scale_q(&avg);
            let den = (0..fp.normal.len())
                .map(|k| DenFactor::new(fp.angle(g, k), FracMonomial::from_rationals(&fp.weights[k])))
                .collect();
            chi = chi.add(&RationalCharacter::from_term(num, den));
        }
    }
    Ok(chi)
}

fn specialize_vec(w: &[Q], a: Option<&[Vec<Q>]>) -> Vec<Q> {
    match a {
        None => w.to_vec(),
        Some(a) => {
            let k = a.first().map_or(0, Vec::len);
            (0..k).map(|j| w.iter().zip(a).map(|(x, row)| x * &row[j]).sum()).collect()
        }
    }
}

/// Strict convexity of the (specialized) tangent weights at every fixed point.
pub fn convergence_certificate(data: &GITData, a: Option<&[Vec<Q>]>) -> Result<()> {
    for fp in all_fixed_point_data(data)? {
        let ws: Vec<Vec<Q>> = fp.weights.iter().map(|w| specialize_vec(w, a)).collect();
        if !weights_convex(&ws) {
            return Err(Error::NotConvex(format!(
                "tangent weights at fixed point {} are not in a strictly convex cone",
                fp.delta
            )));
        }
    }
    Ok(())
}

/// Euler characteristic on a subtorus, refused unless the certificate holds.
pub fn euler_characteristic_certified(
    data: &GITData,
    e: &EquivClass,
    a: Option<&[Vec<Q>]>,
) -> Result<RationalCharacter> {
    convergence_certificate(data, a)?;
    let chi = euler_characteristic(data, e)?;
    match a {
        None => Ok(chi),
        Some(a) => chi.specialize(a),
    }
}

/// Sum of e^(a . lambda) over monomials z^a of K-weight u and degree at most `bound`.
pub fn sections_character(data: &GITData, u: &[i64], bound: usize) -> LaurentPoly {
    let m = data.m();
    let r = data.r();
    let chars: Vec<Vec<i64>> = (0..m)
        .map(|i| data.weight_int(i).iter().map(|x| x.to_i64().expect("weight fits i64")).collect())
        .collect();
    let mut out = LaurentPoly::zero(m);
    let mut a = vec![0i64; m];
    fn rec(
        i: usize,
        left: usize,
        a: &mut Vec<i64>,
        chars: &[Vec<i64>],
        u: &[i64],
        r: usize,
        out: &mut LaurentPoly,
    ) {
        if i == a.len() {
            let hit = (0..r).all(|k| a.iter().zip(chars).map(|(x, d)| x * d[k]).sum::<i64>() == u[k]);
            if hit {
                out.add_term(FracMonomial::from_ints(a), CycNumber::one());
            }
            return;
        }
        for x in 0..=left {
            a[i] = x as i64;
            rec(i + 1, left - x, a, chars, u, r, out);
        }
        a[i] = 0;
    }
    rec(0, bound, &mut a, &chars, u, r, &mut out);
    out
}

/// Coefficients of x/(1 - e^(-x)).
fn todd_series(len: usize) -> Vec<CycNumber> {
    bernoulli(len)
        .into_iter()
        .enumerate()
        .map(|(k, b)| {
            let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
            CycNumber::from_q(sign * b / Q::from_integer(factorial(k)))
        })
        .collect()
}

/// Coefficients of f(s) = 1/(1 - c e^s) from f' = f^2 - f, f(0) = 1/(1 - c).
fn riccati_series(c: &CycNumber, len: usize) -> Vec<CycNumber> {
    let mut f = vec![(&CycNumber::one() - c).inv().expect("c is not 1")];
    for k in 0..len.saturating_sub(1) {
        let mut sq = CycNumber::zero();
        for i in 0..=k {
            sq = &sq + &(&f[i] * &f[k - i]);
        }
        let next = (&sq - &f[k]).scale(&Q::new(BigInt::one(), BigInt::from(k + 1)));
        f.push(next);
    }
    f.truncate(len);
    f
}

/// Cohomological side: orbifold Chern character times Todd class over the
/// Euler class of the normal bundle, summed over fixed points and isotropy.
pub fn hrr_rhs(data: &GITData, e: &EquivClass, order: i64, a: Option<&[Vec<Q>]>) -> Result<GradedSeries> {
    check_input(data, e)?;
    let nvars = a.map_or(data.m(), |a| a.first().map_or(0, Vec::len));
    let mut out = GradedSeries::zero(nvars, order);
    if e.is_zero() {
        return Ok(out);
    }
    for fp in all_fixed_point_data(data)? {
        let avg = CycNumber::from_q(Q::new(BigInt::one(), BigInt::from(fp.order())));
        for g in 0..fp.order() {
            let untwisted = (0..fp.normal.len()).filter(|&k| fp.angle(g, k).is_zero()).count();
            let len = (order + untwisted as i64 + 1).max(0) as usize;
            if len == 0 {
                continue;
            }
            let exp: Vec<CycNumber> = (0..len)
                .map(|k| CycNumber::from_q(Q::new(BigInt::one(), factorial(k))))
                .collect();
            let mut tch = TSeries::zero(nvars, len);
            for (l, c) in e.terms() {
                let w = specialize_vec(&fp.fiber_weight(l), a);
                let z = CycNumber::exp_2pi_i(&fp.fiber_angle(g, l)).scale(&Q::from_integer(c.into()));
                tch = tch.add(&TSeries::compose(&exp, &w, len).scale(&z));
            }
            let mut series = tch;
            let mut poles = Vec::new();
            let mut scalar = Q::one();
            for k in 0..fp.normal.len() {
                let w = specialize_vec(&fp.weights[k], a);
                let theta = fp.angle(g, k);
                if theta.is_zero() {
                    let tangent: Vec<Q> = w.iter().map(|x| -x).collect();
                    let (form, lead) = LinearForm::normalize(&tangent).ok_or(Error::ZeroDenominator)?;
                    poles.push(form);
                    scalar /= lead;
                    series = series.mul(&TSeries::compose(&todd_series(len), &tangent, len));
                } else {
                    let c = CycNumber::exp_2pi_i(&theta);
                    series = series.mul(&TSeries::compose(&riccati_series(&c, len), &w, len));
                }
            }
            let z = &avg * &CycNumber::from_q(scalar);
            out.add_expansion(&series.scale(&z), &poles);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HrrReport {
    pub lhs: Vec<(i64, String)>,
    pub rhs: Vec<(i64, String)>,
    pub equal: bool,
    pub first_mismatch_degree: Option<i64>,
}

/// Compares the expansion of the Euler characteristic with the cohomological side.
pub fn hrr_check(data: &GITData, e: &EquivClass, order: i64, a: Option<&[Vec<Q>]>) -> Result<HrrReport> {
    let chi = euler_characteristic_certified(data, e, a)?;
    let lhs = chi.expand(order)?;
    let rhs = hrr_rhs(data, e, order, a)?;
    let mismatch = lhs.first_mismatch(&rhs);
    Ok(HrrReport {
        lhs: lhs.rendered(),
        rhs: rhs.rendered(),
        equal: mismatch.is_none(),
        first_mismatch_degree: mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::intmatrix::{q, qf};
    use crate::exactalg::rational::rat_equal;
    use crate::gitdata::example;

    fn data(name: &str) -> GITData {
        example(name).unwrap().data
    }

    fn mono(x: &[i64]) -> LaurentPoly {
        LaurentPoly::monomial(FracMonomial::from_ints(x))
    }

    #[test]
    fn weighted_line_fixed_points() {
        let p12 = data("p12");
        let fp = fixed_point_data(&p12, &Anticone::new(vec![1])).unwrap();
        assert_eq!(fp.order(), 2);
        assert_eq!(fp.group, vec![vec![q(0)], vec![qf(1, 2)]]);
        assert_eq!(fp.weights, vec![vec![q(1), qf(-1, 2)]]);
        assert_eq!(fp.angle(0, 0), q(0));
        assert_eq!(fp.angle(1, 0), qf(1, 2));
        let o1 = EquivClass::o(1, 2);
        let fp1 = fixed_point_data(&p12, &Anticone::new(vec![0])).unwrap();
        assert_eq!(restrict(&o1, &fp1, 0), mono(&[1, 0]));
        let twisted = restrict(&o1, &fp, 1);
        let expected = LaurentPoly::term(FracMonomial::from_rationals(&[q(0), qf(1, 2)]), CycNumber::from_int(-1));
        assert_eq!(twisted, expected);
    }

    #[test]
    fn conifold_tangent_weights() {
        let fp = fixed_point_data(&data("conifold"), &Anticone::new(vec![0])).unwrap();
        assert_eq!(fp.order(), 1);
        let w: Vec<Vec<i64>> = fp
            .weights
            .iter()
            .map(|w| w.iter().map(|x| x.to_integer().try_into().unwrap()).collect())
            .collect();
        assert_eq!(w, vec![vec![-1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]]);
        assert!(fixed_point_data(&data("conifold"), &Anticone::new(vec![2])).is_err());
    }

    #[test]
    fn plane_and_weighted_line_characters() {
        let c2 = data("c2-diagonal");
        let chi = euler_characteristic(&c2, &EquivClass::trivial(0, 2)).unwrap();
        assert_eq!(chi.to_string(), "1/((1 - e^(l1))*(1 - e^(l2)))");
        let p12 = data("p12");
        let one = euler_characteristic(&p12, &EquivClass::trivial(1, 2)).unwrap();
        assert!(rat_equal(&one, &RationalCharacter::one(2)));
        let two = euler_characteristic(&p12, &EquivClass::o(2, 2)).unwrap();
        let expected = RationalCharacter::from_laurent(mono(&[2, 0]).add(&mono(&[0, 1])));
        assert!(rat_equal(&two, &expected));
        assert!(two.has_rational_coefficients());
    }

    #[test]
    fn section_counts() {
        let p12 = data("p12");
        assert_eq!(sections_character(&p12, &[2], 2), mono(&[2, 0]).add(&mono(&[0, 1])));
        let c2 = data("c2-diagonal");
        assert_eq!(sections_character(&c2, &[], 3).len(), 10);
        let coni = sections_character(&data("conifold"), &[0], 2);
        assert_eq!(coni.len(), 5);
        assert!(coni.terms().all(|(m, _)| m.numerators()[0] + m.numerators()[1] == m.numerators()[2] + m.numerators()[3]));
    }

    #[test]
    fn todd_and_riccati() {
        let td = todd_series(4);
        assert_eq!(td[1], CycNumber::from_q(qf(1, 2)));
        assert_eq!(td[2], CycNumber::from_q(qf(1, 12)));
        let f = riccati_series(&CycNumber::from_int(-1), 4);
        assert_eq!(f[0], CycNumber::from_q(qf(1, 2)));
        assert_eq!(f[1], CycNumber::from_q(qf(-1, 4)));
        assert_eq!(f[3], CycNumber::from_q(qf(1, 48)));
    }

    #[test]
    fn hrr_examples() {
        let diag = vec![vec![q(1)], vec![q(1)]];
        let c2 = data("c2-diagonal");
        let rep = hrr_check(&c2, &EquivClass::trivial(0, 2), 4, Some(&diag)).unwrap();
        assert!(rep.equal, "{rep:?}");
        let p12 = data("p12");
        for a in 0..3 {
            let rep = hrr_check(&p12, &EquivClass::o(a, 2), 3, None).unwrap();
            assert!(rep.equal, "{rep:?}");
        }
        let rep = hrr_check(&data("conifold"), &EquivClass::o(0, 4), 2, None).unwrap();
        assert!(rep.equal, "{rep:?}");
        let zero = hrr_rhs(&p12, &EquivClass::zero(), 3, None).unwrap();
        assert!(zero.min_degree().is_none());
    }

    #[test]
    fn class_parsing() {
        assert_eq!(EquivClass::parse("O(2)", 1, 2).unwrap(), EquivClass::o(2, 2));
        assert_eq!(EquivClass::parse("O", 1, 2).unwrap(), EquivClass::trivial(1, 2));
        let j = r#"[{"u":[1],"s":[0,0],"coeff":2}]"#;
        assert_eq!(EquivClass::parse(j, 1, 2).unwrap(), EquivClass::o(1, 2).scale(2));
        assert!(EquivClass::parse("O(x)", 1, 2).is_err());
        assert!(EquivClass::parse(r#"[{"u":[1],"s":[0],"coeff":1}]"#, 1, 2).is_err());
    }
}
