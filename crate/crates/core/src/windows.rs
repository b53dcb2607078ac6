//! Kempf-Ness strata at a wall, grade-restriction windows, and K-theoretic
//! checks of the window equivalence against the blow-up correspondence.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::intmatrix::Q;
use crate::exactalg::rational::rat_equal;
use crate::gitdata::{anticones, Anticone, GITData, SemistableLocus};
use crate::localization::{all_fixed_point_data, euler_characteristic, restrict, EquivClass, LineClass};
use crate::wallcrossing::{
    eta_invariants, partition_m, pullback_class, segment_crossings, ExtendedGIT, Side, WallCrossing,
};

/// One-parameter subgroup, fixed coordinates and blade coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnStratum {
    pub lambda: Vec<i64>,
    pub fixed: Vec<usize>,
    pub blade: Vec<usize>,
    pub eta: i64,
}

/// The stratum removed to reach X+ (subgroup e) and the one removed to reach X- (subgroup -e).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnStrata {
    pub toward_plus: KnStratum,
    pub toward_minus: KnStratum,
}

fn coordinate_weight(data: &GITData, i: usize, lambda: &[i64]) -> i64 {
    data.weight_int(i)
        .iter()
        .zip(lambda)
        .map(|(d, l)| d.to_i64().expect("weight fits i64") * l)
        .sum()
}

fn stratum(data: &GITData, lambda: Vec<i64>) -> KnStratum {
    let m = data.m();
    let w: Vec<i64> = (0..m).map(|i| coordinate_weight(data, i, &lambda)).collect();
    let fixed = (0..m).filter(|&i| w[i] == 0).collect();
    // coordinates with limit as t -> infinity: nonpositive weight
    let blade: Vec<usize> = (0..m).filter(|&i| w[i] <= 0).collect();
    let eta = (0..m).filter(|i| !blade.contains(i)).map(|i| w[i]).sum();
    KnStratum {
        lambda,
        fixed,
        blade,
        eta,
    }
}

pub fn kn_strata(wc: &WallCrossing) -> Result<KnStrata> {
    partition_m(wc)?;
    let e: Vec<i64> = wc.e.iter().map(|x| x.to_i64().expect("normal fits i64")).collect();
    let neg: Vec<i64> = e.iter().map(|x| -x).collect();
    Ok(KnStrata {
        toward_plus: stratum(&wc.base, e),
        toward_minus: stratum(&wc.base, neg),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lambda: Vec<i64>,
    pub k: i64,
    pub eta: i64,
}

impl Window {
    pub fn new(stratum: &KnStratum, k: i64) -> Self {
        Window {
            lambda: stratum.lambda.clone(),
            k,
            eta: stratum.eta,
        }
    }

    pub fn contains(&self, w: i64) -> bool {
        self.k <= w && w < self.k + self.eta
    }

    /// The same window read through the opposite subgroup, based at 1 - k - eta.
    pub fn opposite(&self) -> Window {
        Window {
            lambda: self.lambda.iter().map(|x| -x).collect(),
            k: 1 - self.k - self.eta,
            eta: self.eta,
        }
    }
}

fn pair(u: &[i64], lambda: &[i64]) -> i64 {
    u.iter().zip(lambda).map(|(a, b)| a * b).sum()
}

/// Pairing of each line class with the subgroup, repeated by multiplicity.
pub fn window_weights(e: &EquivClass, lambda: &[i64]) -> Vec<i64> {
    let mut out = Vec::new();
    for (l, c) in e.terms() {
        for _ in 0..c.unsigned_abs() {
            out.push(pair(&l.u, lambda));
        }
    }
    out
}

pub fn in_window(e: &EquivClass, w: &Window) -> bool {
    window_weights(e, &w.lambda).into_iter().all(|x| w.contains(x))
}

/// Koszul class of the coordinate subspace where z_i = 0 for i in M-.
pub fn unstable_relation(wc: &WallCrossing) -> Result<EquivClass> {
    let part = partition_m(wc)?;
    let (r, m) = (wc.base.r(), wc.base.m());
    let mut rel = EquivClass::trivial(r, m);
    for &i in &part.minus {
        let d: Vec<i64> = wc.base.weight_int(i).iter().map(|x| x.to_i64().expect("fits")).collect();
        let mut s = vec![0; m];
        s[i] = 1;
        let twist = EquivClass::line(d.iter().map(|x| -x).collect(), s);
        rel = rel.tensor(&EquivClass::trivial(r, m).add(&twist.scale(-1)));
    }
    Ok(rel)
}

/// True iff the two classes have identical restrictions at every fixed point.
pub fn restrictions_agree(data: &GITData, a: &EquivClass, b: &EquivClass) -> Result<bool> {
    for fp in all_fixed_point_data(data)? {
        for g in 0..fp.order() {
            if restrict(a, &fp, g) != restrict(b, &fp, g) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const LIFT_STEP_LIMIT: usize = 10_000;

/// Rewrites a class on X- so that every e-weight lies in [k, k + eta).
pub fn window_lift(wc: &WallCrossing, e: &EquivClass, k: i64) -> Result<EquivClass> {
    if !wc.crepant {
        return Err(Error::NonCrepant);
    }
    let part = partition_m(wc)?;
    e.check_shape(wc.base.r(), wc.base.m())?;
    let rel = unstable_relation(wc)?;
    let minus = wc.minus_data();
    if !restrictions_agree(&minus, &rel, &EquivClass::zero())? {
        return Err(Error::Check("the Koszul relation does not vanish on X-".into()));
    }
    let (eta, _) = eta_invariants(wc);
    let lambda: Vec<i64> = wc.e.iter().map(|x| x.to_i64().expect("fits")).collect();
    let top_sign = if part.minus.len() % 2 == 0 { 1 } else { -1 };
    let mut shift_u = vec![0i64; wc.base.r()];
    let mut shift_s = vec![0i64; wc.base.m()];
    for &i in &part.minus {
        for (a, d) in wc.base.weight_int(i).iter().enumerate() {
            shift_u[a] += d.to_i64().expect("fits");
        }
        shift_s[i] -= 1;
    }
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        let out = cur
            .terms()
            .map(|(l, c)| (l.clone(), c, pair(&l.u, &lambda)))
            .find(|(_, _, w)| *w < k || *w >= k + eta);
        let Some((l, c, w)) = out else { break };
        steps += 1;
        if steps > LIFT_STEP_LIMIT {
            return Err(Error::LiftDiverged(LIFT_STEP_LIMIT));
        }
        let correction = if w >= k + eta {
            // the top term of rel * X is the line itself
            let x = LineClass {
                u: l.u.iter().zip(&shift_u).map(|(a, b)| a + b).collect(),
                s: l.s.iter().zip(&shift_s).map(|(a, b)| a + b).collect(),
            };
            rel.tensor(&EquivClass::line(x.u, x.s)).scale(c * top_sign)
        } else {
            rel.tensor(&EquivClass::line(l.u.clone(), l.s.clone())).scale(c)
        };
        cur = cur.add(&correction.scale(-1));
    }
    Ok(cur)
}

#[derive(Clone, Debug, Serialize)]
pub struct FmReport {
    pub blowup_side: String,
    pub window_side: String,
    pub lifted: String,
    pub equal: bool,
}

/// Compares chi on the blow-up of pullbacks with chi on X+ of the window lift.
pub fn fm_euler_check(wc: &WallCrossing, ext: &ExtendedGIT, l: &EquivClass, m: &EquivClass) -> Result<FmReport> {
    let pl = pullback_class(wc, ext, Side::Minus, l)?;
    let pm = pullback_class(wc, ext, Side::Plus, m)?;
    let a = euler_characteristic(&ext.tilde_data(), &pl.tensor(&pm))?.specialize(&ext.common_torus())?;
    let lifted = window_lift(wc, l, 0)?;
    if !restrictions_agree(&wc.minus_data(), &lifted, l)? {
        return Err(Error::Check("window lift changed the class on X-".into()));
    }
    let b = euler_characteristic(&wc.plus_data(), &lifted.tensor(m))?;
    Ok(FmReport {
        blowup_side: a.to_string(),
        window_side: b.to_string(),
        lifted: lifted.to_string(),
        equal: rat_equal(&a, &b),
    })
}

/// Semistable loci of the extended problem for the seven stability conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SevenLoci {
    pub wall: SemistableLocus,
    pub plus: SemistableLocus,
    pub minus: SemistableLocus,
    pub tilde: SemistableLocus,
    pub plus_minus: SemistableLocus,
    pub plus_tilde: SemistableLocus,
    pub minus_tilde: SemistableLocus,
}

impl SevenLoci {
    pub fn named(&self) -> [(&'static str, &SemistableLocus); 7] {
        [
            ("wall", &self.wall),
            ("plus", &self.plus),
            ("minus", &self.minus),
            ("tilde", &self.tilde),
            ("plus|minus", &self.plus_minus),
            ("plus|tilde", &self.plus_tilde),
            ("minus|tilde", &self.minus_tilde),
        ]
    }
}

/// Removes the points of the coordinate subspace spanned by `coords`.
pub fn remove_subspace(locus: &SemistableLocus, coords: &[usize]) -> SemistableLocus {
    let sub = Anticone::new(coords.to_vec());
    let kept: Vec<Anticone> = locus.members().into_iter().filter(|p| !p.is_subset(&sub)).collect();
    SemistableLocus::new(locus.m(), kept)
}

pub fn seven_loci(wc: &WallCrossing) -> Result<SevenLoci> {
    let part = partition_m(wc)?;
    let m = wc.base.m();
    let at_wall = anticones(&wc.wall_data());
    let zero = Anticone::new(part.zero.clone());
    let mut gens = Vec::new();
    for a in at_wall {
        if a.is_subset(&zero) {
            gens.push(a);
        } else {
            let mut idx = a.indices().to_vec();
            idx.push(m);
            gens.push(Anticone::new(idx));
        }
    }
    let v0 = SemistableLocus::new(m + 1, gens);
    let mut le0: Vec<usize> = part.zero.iter().chain(&part.minus).copied().collect();
    le0.push(m);
    let mut ge0: Vec<usize> = part.zero.iter().chain(&part.plus).copied().collect();
    ge0.push(m);
    let base: Vec<usize> = (0..m).collect();
    let without = |l: &SemistableLocus, sets: &[&[usize]]| sets.iter().fold(l.clone(), |acc, s| remove_subspace(&acc, s));
    Ok(SevenLoci {
        plus: without(&v0, &[&le0, &base]),
        minus: without(&v0, &[&ge0, &base]),
        tilde: without(&v0, &[&le0, &ge0]),
        plus_minus: without(&v0, &[&base]),
        plus_tilde: without(&v0, &[&le0]),
        minus_tilde: without(&v0, &[&ge0]),
        wall: v0,
    })
}

fn family_at(ext: &ExtendedGIT, omega: Vec<Q>) -> Result<SemistableLocus> {
    let d = ext.data.with_omega(omega)?;
    Ok(SemistableLocus::new(d.m(), anticones(&d)))
}

fn single_crossing(ext: &ExtendedGIT, a: &[Q], b: &[Q]) -> Result<Vec<Q>> {
    let c = segment_crossings(&ext.data, a, b);
    if c.len() != 1 {
        return Err(Error::NotAdjacent(c.len()));
    }
    Ok(c[0].point.clone())
}

/// Loci recomputed as anticone families at sample stability conditions.
pub fn seven_loci_from_samples(wc: &WallCrossing, ext: &ExtendedGIT) -> Result<SevenLoci> {
    let with = |w: &[Q], x: i64| -> Vec<Q> {
        let mut v = w.to_vec();
        v.push(Q::from_integer(BigInt::from(x)));
        v
    };
    Ok(SevenLoci {
        wall: family_at(ext, with(&wc.omega0, 0))?,
        plus: family_at(ext, ext.omega_plus.clone())?,
        minus: family_at(ext, ext.omega_minus.clone())?,
        tilde: family_at(ext, ext.omega_tilde.clone())?,
        plus_minus: family_at(ext, with(&wc.omega0, 1))?,
        plus_tilde: family_at(ext, single_crossing(ext, &ext.omega_plus, &ext.omega_tilde)?)?,
        minus_tilde: family_at(ext, single_crossing(ext, &ext.omega_minus, &ext.omega_tilde)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gitdata::{example, minimal_anticones};
    use crate::wallcrossing::{extend, make_wall_crossing};

    fn crossing(name: &str) -> WallCrossing {
        let ex = example(name).unwrap();
        make_wall_crossing(&ex.data, ex.data.omega(), ex.omega_minus.as_ref().unwrap()).unwrap()
    }

    #[test]
    fn strata_widths() {
        let s = kn_strata(&crossing("conifold")).unwrap();
        assert_eq!((s.toward_plus.eta, s.toward_minus.eta), (2, 2));
        assert!(s.toward_plus.fixed.is_empty());
        let s = kn_strata(&crossing("kp2")).unwrap();
        assert_eq!((s.toward_plus.eta, s.toward_minus.eta), (3, 3));
        let d = GITData::new(1, &[vec![1], vec![-1]], vec![Q::from_integer(1.into())]).unwrap();
        let wc = make_wall_crossing(&d, d.omega(), &[Q::from_integer((-1).into())]).unwrap();
        let s = kn_strata(&wc).unwrap();
        assert_eq!((s.toward_plus.eta, s.toward_minus.eta), (1, 1));
    }

    #[test]
    fn strata_match_pairing_sums() {
        let d = GITData::new(1, &[vec![2], vec![-1]], vec![Q::from_integer(1.into())]).unwrap();
        let wc = make_wall_crossing(&d, d.omega(), &[Q::from_integer((-1).into())]).unwrap();
        let s = kn_strata(&wc).unwrap();
        assert_eq!((s.toward_plus.eta, s.toward_minus.eta), eta_invariants(&wc));
        assert_eq!(s.toward_plus.blade, vec![1]);
        assert!(matches!(window_lift(&wc, &EquivClass::o(0, 2), 0), Err(Error::NonCrepant)));
    }

    #[test]
    fn opposite_window() {
        let w = Window { lambda: vec![1], k: 0, eta: 3 };
        let o = w.opposite();
        assert_eq!((o.k, o.eta), (-2, 3));
        for x in -6..6 {
            assert_eq!(w.contains(x), o.contains(-x));
        }
    }

    #[test]
    fn relation_is_in_kernel() {
        let wc = crossing("kp2");
        let rel = unstable_relation(&wc).unwrap();
        assert_eq!(rel.terms().count(), 2);
        assert!(restrictions_agree(&wc.minus_data(), &rel, &EquivClass::zero()).unwrap());
        assert!(!restrictions_agree(&wc.plus_data(), &rel, &EquivClass::zero()).unwrap());
    }

    #[test]
    fn window_membership() {
        let wc = crossing("conifold");
        let w = Window::new(&kn_strata(&wc).unwrap().toward_plus, 0);
        assert!(in_window(&EquivClass::o(0, 4), &w));
        assert!(in_window(&EquivClass::o(1, 4), &w));
        assert!(!in_window(&EquivClass::o(2, 4), &w));
        assert!(in_window(&EquivClass::zero(), &w));
        let both = EquivClass::o(0, 4).add(&EquivClass::o(1, 4));
        assert_eq!(window_weights(&both, &w.lambda), vec![0, 1]);
    }

    #[test]
    fn lifts_land_in_window() {
        for (name, m, twist) in [("conifold", 4, 2), ("conifold", 4, -3), ("kp2", 4, 3), ("kp2", 4, -1)] {
            let wc = crossing(name);
            let w = Window::new(&kn_strata(&wc).unwrap().toward_plus, 0);
            let e = EquivClass::o(twist, m);
            let lifted = window_lift(&wc, &e, 0).unwrap();
            assert!(in_window(&lifted, &w), "{name} O({twist}) -> {lifted}");
            assert!(restrictions_agree(&wc.minus_data(), &lifted, &e).unwrap());
        }
        let wc = crossing("conifold");
        assert_eq!(window_lift(&wc, &EquivClass::o(1, 4), 0).unwrap(), EquivClass::o(1, 4));
    }

    #[test]
    fn fm_matches_window_on_conifold() {
        let wc = crossing("conifold");
        let ext = extend(&wc, None).unwrap();
        for (l, m) in [(0, 0), (1, 0), (1, -1)] {
            let rep = fm_euler_check(&wc, &ext, &EquivClass::o(l, 4), &EquivClass::o(m, 4)).unwrap();
            assert!(rep.equal, "L=O({l}) M=O({m}): {rep:?}");
        }
    }

    #[test]
    fn loci_table_matches_samples() {
        for name in ["conifold", "kp2"] {
            let wc = crossing(name);
            let ext = extend(&wc, None).unwrap();
            let table = seven_loci(&wc).unwrap();
            let samples = seven_loci_from_samples(&wc, &ext).unwrap();
            for ((n, a), (_, b)) in table.named().iter().zip(samples.named().iter()) {
                assert_eq!(a, b, "{name}: locus {n}");
            }
            assert_eq!(table.tilde, minimal_anticones(&ext.tilde_data()));
        }
        let table = seven_loci(&crossing("conifold")).unwrap();
        assert_eq!(table.tilde.describe(), "{(z1,z2)≠0, (z3,z4)≠0}");
    }
}
