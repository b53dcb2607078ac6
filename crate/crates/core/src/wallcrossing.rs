//! Crossing a single wall in the space of stability conditions, and the
//! extended GIT problem on K x C* whose chambers give X+, X- and their
//! common blow-up.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::cone::cone_contains;
use crate::exactalg::intmatrix::{dot, nullspace, primitive_integer, rank, Q};
use crate::gitdata::{anticones, chamber_of, k_subsets, minimal_anticones, validate, Anticone, GITData, SemistableLocus};
use crate::localization::{EquivClass, LineClass};

/// A crossing of one wall of the given hyperplane along a segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub t: Q,
    pub normal: Vec<BigInt>,
    pub point: Vec<Q>,
}

fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().cloned().map(Q::from_integer).collect()
}

/// Primitive normals of all hyperplanes spanned by r-1 characters, up to sign.
pub fn wall_hyperplanes(data: &GITData) -> Vec<Vec<BigInt>> {
    let r = data.r();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    if r == 0 {
        return out;
    }
    for idx in k_subsets(data.m(), r - 1) {
        let rows = data.weights_of(&idx);
        if rank(&rows, r) != r - 1 {
            continue;
        }
        let ns = nullspace(&rows, r);
        let mut n = primitive_integer(&ns[0]);
        if n.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            n = n.iter().map(|x| -x).collect();
        }
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

/// Does `point` lie in the closed cone of r-1 characters inside the hyperplane?
fn on_wall_of(data: &GITData, normal: &[BigInt], point: &[Q]) -> bool {
    let nq = to_q(normal);
    let inside: Vec<usize> = (0..data.m()).filter(|&i| dot(&nq, &data.weight(i)).is_zero()).collect();
    k_subsets(inside.len(), data.r() - 1).into_iter().any(|sub| {
        let idx: Vec<usize> = sub.iter().map(|&k| inside[k]).collect();
        cone_contains(&data.weights_of(&idx), point, false).expect("dimensions agree")
    })
}

/// Walls met by the open segment from a to b, ordered by parameter.
pub fn segment_crossings(data: &GITData, a: &[Q], b: &[Q]) -> Vec<Crossing> {
    let mut out = Vec::new();
    for n in wall_hyperplanes(data) {
        let nq = to_q(&n);
        let fa = dot(&nq, a);
        let fb = dot(&nq, b);
        if fa.is_zero() || fb.is_zero() || fa.is_positive() == fb.is_positive() {
            continue;
        }
        let t = &fa / (&fa - &fb);
        let point: Vec<Q> = a.iter().zip(b).map(|(x, y)| x + &t * (y - x)).collect();
        if on_wall_of(data, &n, &point) {
            out.push(Crossing { t, normal: n, point });
        }
    }
    out.sort_by(|x, y| x.t.cmp(&y.t));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallCrossing {
    pub base: GITData,
    pub omega_plus: Vec<Q>,
    pub omega_minus: Vec<Q>,
    /// Primitive normal, positive on the plus side.
    pub e: Vec<BigInt>,
    pub omega0: Vec<Q>,
    pub crepant: bool,
}

pub fn make_wall_crossing(base: &GITData, omega_plus: &[Q], omega_minus: &[Q]) -> Result<WallCrossing> {
    let plus = base.with_omega(omega_plus.to_vec())?;
    let minus = base.with_omega(omega_minus.to_vec())?;
    for (name, d) in [("omega_plus", &plus), ("omega_minus", &minus)] {
        chamber_of(d).map_err(|e| Error::Degenerate(format!("{name}: {e}")))?;
        let rep = validate(d);
        if !rep.passed() {
            return Err(Error::InvalidData(format!("{name}: {}", rep.failures.join("; "))));
        }
    }
    let crossings = segment_crossings(base, omega_plus, omega_minus);
    match crossings.len() {
        1 => {}
        0 => return Err(Error::NotAdjacent(0)),
        n => {
            if crossings.iter().all(|c| c.t == crossings[0].t) {
                return Err(Error::Degenerate(format!(
                    "{n} walls meet where the segment crosses"
                )));
            }
            return Err(Error::NotAdjacent(n));
        }
    }
    let c = crossings.into_iter().next().unwrap();
    let mut e = c.normal;
    if dot(&to_q(&e), omega_plus).is_negative() {
        e = e.iter().map(|x| -x).collect();
    }
    let crepant = dot(&base.weight_sum(), &to_q(&e)).is_zero();
    Ok(WallCrossing {
        base: plus,
        omega_plus: omega_plus.to_vec(),
        omega_minus: omega_minus.to_vec(),
        e,
        omega0: c.point,
        crepant,
    })
}

impl WallCrossing {
    /// D_i . e for each character.
    pub fn pairings(&self) -> Vec<i64> {
        let e = to_q(&self.e);
        (0..self.base.m())
            .map(|i| dot(&self.base.weight(i), &e).to_integer().to_i64().expect("pairing fits i64"))
            .collect()
    }

    pub fn pairing(&self, u: &[i64]) -> i64 {
        u.iter().zip(&self.e).map(|(x, y)| x * y.to_i64().expect("normal fits i64")).sum()
    }

    pub fn plus_data(&self) -> GITData {
        self.base.clone()
    }

    pub fn minus_data(&self) -> GITData {
        self.base.with_omega(self.omega_minus.clone()).expect("same rank")
    }

    pub fn wall_data(&self) -> GITData {
        self.base.with_omega(self.omega0.clone()).expect("same rank")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub plus: Vec<usize>,
    pub zero: Vec<usize>,
    pub minus: Vec<usize>,
}

pub fn partition_m(wc: &WallCrossing) -> Result<Partition> {
    let p = wc.pairings();
    let pick = |f: fn(i64) -> bool| -> Vec<usize> { (0..p.len()).filter(|&i| f(p[i])).collect() };
    let part = Partition {
        plus: pick(|x| x > 0),
        zero: pick(|x| x == 0),
        minus: pick(|x| x < 0),
    };
    if part.plus.is_empty() || part.minus.is_empty() {
        return Err(Error::OneSidedWall);
    }
    Ok(part)
}

/// (sum over M+ of D_i . e, minus the sum over M- of D_i . e)
pub fn eta_invariants(wc: &WallCrossing) -> (i64, i64) {
    let p = wc.pairings();
    let plus = p.iter().filter(|&&x| x > 0).sum();
    let minus = -p.iter().filter(|&&x| x < 0).sum::<i64>();
    (plus, minus)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedGIT {
    /// Extended data with stability condition at the blow-up sample point.
    pub data: GITData,
    pub omega_plus: Vec<Q>,
    pub omega_minus: Vec<Q>,
    pub omega_tilde: Vec<Q>,
    pub epsilon: Q,
}

impl ExtendedGIT {
    pub fn plus_data(&self) -> GITData {
        self.data.with_omega(self.omega_plus.clone()).expect("same rank")
    }

    pub fn minus_data(&self) -> GITData {
        self.data.with_omega(self.omega_minus.clone()).expect("same rank")
    }

    pub fn tilde_data(&self) -> GITData {
        self.data.clone()
    }

    /// Rows of the extended weight matrix.
    pub fn weight_rows(&self) -> Vec<Vec<i64>> {
        let w = self.data.weight_matrix();
        (0..w.rows())
            .map(|a| w.row(a).iter().map(|x| x.to_i64().expect("weight fits i64")).collect())
            .collect()
    }

    /// Specialization lambda_(m+1) = 0 onto the torus of the base.
    pub fn common_torus(&self) -> Vec<Vec<Q>> {
        let m = self.data.m() - 1;
        (0..=m)
            .map(|i| (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect()
    }
}

fn extended_weights(wc: &WallCrossing) -> Vec<Vec<i64>> {
    let r = wc.base.r();
    let mut out = Vec::new();
    for (i, p) in wc.pairings().into_iter().enumerate() {
        let mut d: Vec<i64> = wc.base.weight_int(i).iter().map(|x| x.to_i64().expect("weight fits i64")).collect();
        d.push(if p > 0 { -p } else { 0 });
        out.push(d);
    }
    let mut last = vec![0; r];
    last.push(1);
    out.push(last);
    out
}

/// Largest admissible epsilon is below every positive parameter where the
/// ray (omega0, -s) meets a wall hyperplane.
fn epsilon_ok(data: &GITData, omega0: &[Q], eps: &Q) -> bool {
    let mut tail = omega0.to_vec();
    tail.push(Q::zero());
    for n in wall_hyperplanes(data) {
        let nq = to_q(&n);
        let last = nq.last().unwrap().clone();
        let head = dot(&nq, &tail);
        if last.is_zero() {
            if head.is_zero() {
                let mut p = omega0.to_vec();
                p.push(-eps.clone());
                if on_wall_of(data, &n, &p) {
                    return false;
                }
            }
            continue;
        }
        // n . (omega0, -s) = head - last * s vanishes at s = head / last
        let s = &head / &last;
        if s.is_positive() && s <= *eps {
            let mut p = omega0.to_vec();
            p.push(-s);
            if on_wall_of(data, &n, &p) {
                return false;
            }
        }
    }
    true
}

/// Builds the extended data; `epsilon` defaults to 1/1000, halved until admissible.
pub fn extend(wc: &WallCrossing, epsilon: Option<Q>) -> Result<ExtendedGIT> {
    let weights = extended_weights(wc);
    let r1 = wc.base.r() + 1;
    let with_last = |w: &[Q], x: Q| -> Vec<Q> {
        let mut v = w.to_vec();
        v.push(x);
        v
    };
    let probe = GITData::new(r1, &weights, vec![Q::zero(); r1])?;
    let eps = match epsilon {
        Some(e) => {
            if !e.is_positive() || !epsilon_ok(&probe, &wc.omega0, &e) {
                return Err(Error::EpsilonTooLarge(e.to_string()));
            }
            e
        }
        None => {
            let mut e = Q::new(BigInt::one(), BigInt::from(1000));
            while !epsilon_ok(&probe, &wc.omega0, &e) {
                e /= Q::from_integer(BigInt::from(2));
            }
            e
        }
    };
    let omega_tilde = with_last(&wc.omega0, -eps.clone());
    let ext = ExtendedGIT {
        data: GITData::new(r1, &weights, omega_tilde.clone())?,
        omega_plus: with_last(&wc.omega_plus, Q::one()),
        omega_minus: with_last(&wc.omega_minus, Q::one()),
        omega_tilde,
        epsilon: eps,
    };
    for d in [ext.plus_data(), ext.minus_data(), ext.tilde_data()] {
        let rep = validate(&d);
        if !rep.passed() {
            return Err(Error::Check(format!("extended data invalid: {}", rep.failures.join("; "))));
        }
        chamber_of(&d)?;
    }
    check_reduction(wc, &ext)?;
    Ok(ext)
}

/// Every anticone at the plus/minus samples contains the new index, and
/// dropping it recovers the minimal anticones of the base.
pub fn check_reduction(wc: &WallCrossing, ext: &ExtendedGIT) -> Result<()> {
    let m = wc.base.m();
    for (ext_data, base_data, name) in [
        (ext.plus_data(), wc.plus_data(), "plus"),
        (ext.minus_data(), wc.minus_data(), "minus"),
    ] {
        let all = anticones(&ext_data);
        if let Some(a) = all.iter().find(|a| !a.contains(m)) {
            return Err(Error::Check(format!("{name} anticone {a} misses the new coordinate")));
        }
        let reduced: Vec<Anticone> = minimal_anticones(&ext_data)
            .minimal()
            .iter()
            .map(|a| Anticone::new(a.indices().iter().copied().filter(|&i| i != m).collect()))
            .collect();
        let reduced = SemistableLocus::new(m, reduced);
        if reduced != minimal_anticones(&base_data) {
            return Err(Error::Check(format!("{name} chamber does not reduce to the base quotient")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Checks that the coordinate map x_j -> x_j x_(m+1)^(k_j) intertwines the
/// group map on characters for the given side.
pub fn check_equivariance(wc: &WallCrossing, ext: &ExtendedGIT, side: Side) -> Result<()> {
    let m = wc.base.m();
    let last = ext.data.weight_int(m);
    for (j, p) in wc.pairings().into_iter().enumerate() {
        let k = match side {
            Side::Minus => p.max(0),
            Side::Plus => (-p).max(0),
        };
        let dj: Vec<BigInt> = ext.data.weight_int(j);
        let image: Vec<BigInt> = dj.iter().zip(&last).map(|(x, y)| x + y * BigInt::from(k)).collect();
        let u: Vec<i64> = wc.base.weight_int(j).iter().map(|x| x.to_i64().expect("fits")).collect();
        let expected: Vec<BigInt> = pull_character(wc, side, &u).into_iter().map(BigInt::from).collect();
        if image != expected {
            return Err(Error::Check(format!("coordinate {} is not equivariant on the {side:?} side", j + 1)));
        }
    }
    Ok(())
}

fn pull_character(wc: &WallCrossing, side: Side, u: &[i64]) -> Vec<i64> {
    let mut v = u.to_vec();
    v.push(match side {
        Side::Minus => 0,
        Side::Plus => -wc.pairing(u),
    });
    v
}

/// Pullback of a class on X+ or X- to the blow-up.
pub fn pullback_class(wc: &WallCrossing, ext: &ExtendedGIT, side: Side, e: &EquivClass) -> Result<EquivClass> {
    check_equivariance(wc, ext, side)?;
    e.check_shape(wc.base.r(), wc.base.m())?;
    let mut out = EquivClass::zero();
    for (l, c) in e.terms() {
        let mut s = l.s.clone();
        s.push(0);
        out.add_line(
            LineClass {
                u: pull_character(wc, side, &l.u),
                s,
            },
            c,
        );
    }
    Ok(out)
}
