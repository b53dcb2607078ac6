//! Strategies and property checks shared by the property tests and the
//! acceptance runner.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use torickit::exactalg::intmatrix::{smith_normal_form, IntMatrix, Q};
use torickit::exactalg::rational::rat_equal;
use torickit::gitdata::{anticones, chamber_of, validate, Anticone, GITData};
use torickit::localization::{all_fixed_point_data, euler_characteristic, restrict, EquivClass, LineClass};
use torickit::wallcrossing::{eta_invariants, make_wall_crossing};
use torickit::windows::Window;

pub type Check = Result<(), TestCaseError>;

fn fail(msg: String) -> Check {
    Err(TestCaseError::fail(msg))
}

/// Valid GIT data with a stability condition inside a chamber.
pub fn git_data(max_r: usize, max_m: usize) -> impl Strategy<Value = GITData> {
    (1..=max_r)
        .prop_flat_map(move |r| (Just(r), (r + 1)..=max_m.max(r + 1)))
        .prop_flat_map(|(r, m)| {
            (
                Just(r),
                prop::collection::vec(prop::collection::vec(-3i64..=3, r), m),
                prop::collection::vec(-4i64..=4, r),
            )
        })
        .prop_filter_map("invalid or on a wall", |(r, w, o)| {
            let omega = o.into_iter().map(|x| Q::from_integer(x.into())).collect();
            let d = GITData::new(r, &w, omega).ok()?;
            (validate(&d).passed() && chamber_of(&d).is_ok()).then_some(d)
        })
}

pub fn int_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-9i64..=9, c), r)
            .prop_map(move |rows| IntMatrix::from_rows(c, &rows).expect("shape"))
    })
}

pub fn line_classes(r: usize, m: usize) -> impl Strategy<Value = EquivClass> {
    prop::collection::vec(
        (prop::collection::vec(-2i64..=2, r), prop::collection::vec(-1i64..=1, m), -2i64..=2),
        1..=2,
    )
    .prop_map(move |terms| {
        let mut e = EquivClass::zero();
        for (u, s, c) in terms {
            e.add_line(LineClass { u, s }, c);
        }
        e
    })
}

pub fn check_smith(m: &IntMatrix) -> Check {
    let s = smith_normal_form(m);
    let prod = s.u.mul(m).and_then(|x| x.mul(&s.v)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    if prod != s.s {
        return fail(format!("U*M*V != S for {m:?}"));
    }
    if !s.u.is_unimodular() || !s.v.is_unimodular() || !s.s.is_diagonal() {
        return fail(format!("bad factors for {m:?}"));
    }
    let d: Vec<BigInt> = (0..s.s.rows().min(s.s.cols())).map(|i| s.s[(i, i)].clone()).collect();
    for w in d.windows(2) {
        if w[0].is_negative() || (!w[0].is_zero() && !w[1].is_multiple_of(&w[0])) || (w[0].is_zero() && !w[1].is_zero()) {
            return fail(format!("divisibility fails: {d:?}"));
        }
    }
    Ok(())
}

/// Every one-element enlargement of an anticone is an anticone.
pub fn check_anticone_closure(d: &GITData) -> Check {
    let m = d.m();
    let all = anticones(d);
    let masks: std::collections::BTreeSet<u64> = all.iter().map(Anticone::mask).collect();
    for mask in 0u64..(1 << m) {
        let idx = Anticone::from_mask(mask, m);
        if d.is_anticone(idx.indices()) != masks.contains(&mask) {
            return fail(format!("family disagrees with membership test at {idx}"));
        }
        if masks.contains(&mask) {
            for j in 0..m {
                if !masks.contains(&(mask | 1 << j)) {
                    return fail(format!("{idx} plus {} is not an anticone", j + 1));
                }
            }
        }
    }
    Ok(())
}

/// Chi is unchanged when omega moves within its chamber.
pub fn check_chamber_invariance(d: &GITData, shift: &[i64], e: &EquivClass) -> Check {
    let chamber = chamber_of(d).map_err(|x| TestCaseError::fail(x.to_string()))?;
    let moved: Vec<Q> = d
        .omega()
        .iter()
        .zip(shift)
        .map(|(w, s)| w * Q::from_integer(3.into()) + Q::new((*s).into(), 7.into()))
        .collect();
    prop_assume!(chamber.contains(&moved));
    let other = d.with_omega(moved).expect("same rank");
    let a = euler_characteristic(d, e).map_err(|x| TestCaseError::fail(x.to_string()))?;
    let b = euler_characteristic(&other, e).map_err(|x| TestCaseError::fail(x.to_string()))?;
    if !rat_equal(&a, &b) {
        return fail(format!("chi changed inside the chamber: {a} vs {b}"));
    }
    Ok(())
}

pub fn check_restrict_multiplicative(d: &GITData, a: &EquivClass, b: &EquivClass) -> Check {
    let ab = a.tensor(b);
    for fp in all_fixed_point_data(d).map_err(|x| TestCaseError::fail(x.to_string()))? {
        for g in 0..fp.order() {
            if restrict(&ab, &fp, g) != restrict(a, &fp, g).mul(&restrict(b, &fp, g)) {
                return fail(format!("restriction not multiplicative at {} g={g}", fp.delta));
            }
        }
    }
    Ok(())
}

pub fn check_window_reindexing(w: i64, k: i64, eta: i64) -> Check {
    let win = Window { lambda: vec![1], k, eta };
    if win.contains(w) != win.opposite().contains(-w) {
        return fail(format!("opposite window disagrees at w={w} k={k} eta={eta}"));
    }
    let base = Window { lambda: vec![1], k: 0, eta };
    let direct = (0..eta).contains(&w);
    let negated = (-eta < -w) && (-w <= 0);
    let shifted = (-eta < -w) && (-w < 1);
    if base.contains(w) != direct || direct != negated || negated != shifted {
        return fail(format!("reindexing fails at w={w} eta={eta}"));
    }
    Ok(())
}

/// Rank-one weights with both signs present; the only wall is 0.
pub fn rank_one_crossing_weights() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 2..=6).prop_filter("both signs", |w| {
        w.iter().any(|&x| x > 0) && w.iter().any(|&x| x < 0)
    })
}

pub fn check_crepant_iff_eta(weights: &[i64]) -> Check {
    let rows: Vec<Vec<i64>> = weights.iter().map(|&x| vec![x]).collect();
    let d = GITData::new(1, &rows, vec![Q::from_integer(1.into())]).expect("shape");
    let wc = make_wall_crossing(&d, d.omega(), &[Q::from_integer((-1).into())])
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let (p, m) = eta_invariants(&wc);
    if wc.crepant != (p == m) {
        return fail(format!("{weights:?}: crepant={} eta=({p},{m})", wc.crepant));
    }
    if wc.crepant != (weights.iter().sum::<i64>() == 0) {
        return fail(format!("{weights:?}: crepancy flag disagrees with the weight sum"));
    }
    Ok(())
}

/// Same equivalence for rank-two data crossing between two random chambers.
pub fn check_crepant_iff_eta_rank_two(d: &GITData, other: &[i64]) -> Check {
    let minus: Vec<Q> = other.iter().map(|&x| Q::from_integer(x.into())).collect();
    let Ok(wc) = make_wall_crossing(d, d.omega(), &minus) else {
        return Ok(());
    };
    let (p, m) = eta_invariants(&wc);
    if wc.crepant != (p == m) {
        return fail(format!("crepant={} eta=({p},{m})", wc.crepant));
    }
    Ok(())
}
