//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::props::*;
use common::{conifold_renderings, crossing, extended, golden, q};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{rngs::StdRng, Rng, SeedableRng};
use torickit::exactalg::monomial::FracMonomial;
use torickit::exactalg::rational::{rat_equal, DenFactor, RationalCharacter};
use torickit::exactalg::LaurentPoly;
use torickit::gitdata::{example, weights_convex, GITData};
use torickit::localization::{
    euler_characteristic, euler_characteristic_certified, hrr_check, sections_character, EquivClass,
};
use torickit::wallcrossing::{eta_invariants, make_wall_crossing};
use torickit::windows::fm_euler_check;
use torickit::Error;

type Outcome = Result<(), String>;

type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ac1() -> Outcome {
    let c2 = example("c2-diagonal").unwrap();
    let diag = c2.specialization.clone().unwrap();
    let one = EquivClass::trivial(0, 2);
    let chi = euler_characteristic(&c2.data, &one).map_err(err)?.specialize(&diag).map_err(err)?;
    let lam = FracMonomial::from_ints(&[1]);
    let expected = RationalCharacter::from_term(
        LaurentPoly::one(1),
        vec![DenFactor::plain(lam.clone()), DenFactor::plain(lam)],
    );
    ensure(rat_equal(&chi, &expected), || format!("chi = {chi}"))?;
    let rep = hrr_check(&c2.data, &one, 4, Some(&diag)).map_err(err)?;
    ensure(rep.equal, || format!("mismatch at degree {:?}", rep.first_mismatch_degree))?;
    let want = [(-2, "l1^-2"), (-1, "-l1^-1"), (0, "5/12"), (1, "-1/12*l1"), (2, "1/240*l1^2")];
    for (deg, text) in want {
        let got = rep.lhs.iter().find(|(d, _)| *d == deg).map(|(_, s)| s.as_str());
        ensure(got == Some(text), || format!("degree {deg}: {got:?}, want {text}"))?;
    }
    Ok(())
}

fn ac2() -> Outcome {
    let c2 = example("c2-diagonal").unwrap().data;
    let anti = vec![vec![q(-1)], vec![q(1)]];
    ensure(!weights_convex(&anti), || "anti-diagonal weights reported convex".into())?;
    let chi = euler_characteristic(&c2, &EquivClass::trivial(0, 2)).map_err(err)?;
    chi.specialize(&anti).map_err(err)?;
    match euler_characteristic_certified(&c2, &EquivClass::trivial(0, 2), Some(&anti)) {
        Err(Error::NotConvex(_)) => Ok(()),
        other => Err(format!("certificate accepted: {other:?}")),
    }
}

fn ac3() -> Outcome {
    for (file, text) in conifold_renderings() {
        let want = golden(file);
        ensure(text == want, || format!("{file}: got {text:?}, want {want:?}"))?;
    }
    Ok(())
}

fn ac4() -> Outcome {
    for (name, eta) in [("conifold", 2), ("kp2", 3)] {
        let wc = crossing(name);
        let (p, m) = eta_invariants(&wc);
        ensure(wc.crepant && p == eta && m == eta, || format!("{name}: crepant={} eta=({p},{m})", wc.crepant))?;
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut done = 0;
    while done < 50 {
        let m = rng.gen_range(2..=6);
        let w: Vec<i64> = (0..m).map(|_| rng.gen_range(-4..=4)).collect();
        if !(w.iter().any(|&x| x > 0) && w.iter().any(|&x| x < 0)) || w.iter().sum::<i64>() == 0 {
            continue;
        }
        let rows: Vec<Vec<i64>> = w.iter().map(|&x| vec![x]).collect();
        let d = GITData::new(1, &rows, vec![q(1)]).map_err(err)?;
        let wc = make_wall_crossing(&d, d.omega(), &[q(-1)]).map_err(err)?;
        let (p, mi) = eta_invariants(&wc);
        ensure(!wc.crepant && p != mi, || format!("{w:?}: crepant={} eta=({p},{mi})", wc.crepant))?;
        done += 1;
    }
    Ok(())
}

fn ac5() -> Outcome {
    let bound = 8;
    let mut cases: Vec<(GITData, EquivClass, Vec<i64>)> = (1..=3)
        .map(|m| {
            let d = GITData::new(0, &vec![vec![]; m], vec![]).unwrap();
            (d, EquivClass::trivial(0, m), vec![])
        })
        .collect();
    let p12 = example("p12").unwrap().data;
    for k in 0..=4 {
        cases.push((p12.clone(), EquivClass::o(k, 2), vec![k]));
    }
    for (d, e, u) in cases {
        let chi = euler_characteristic(&d, &e).map_err(err)?;
        ensure(chi.has_rational_coefficients(), || format!("{e}: cyclotomic parts survive in {chi}"))?;
        let series = chi.expand_power_series(bound).map_err(err)?;
        ensure(series.is_rational(), || format!("{e}: irrational expansion"))?;
        let oracle = sections_character(&d, &u, bound as usize);
        ensure(series == oracle, || format!("m={} {e}: {series} vs {oracle}", d.m()))?;
    }
    Ok(())
}

fn ac6() -> Outcome {
    for name in ["conifold", "kp2"] {
        let (wc, ext) = extended(name);
        let (r, m) = (wc.base.r(), wc.base.m());
        let plus = euler_characteristic(&wc.plus_data(), &EquivClass::trivial(r, m)).map_err(err)?;
        let minus = euler_characteristic(&wc.minus_data(), &EquivClass::trivial(r, m)).map_err(err)?;
        let tilde = euler_characteristic(&ext.tilde_data(), &EquivClass::trivial(r + 1, m + 1))
            .map_err(err)?
            .specialize(&ext.common_torus())
            .map_err(err)?;
        ensure(rat_equal(&plus, &minus), || format!("{name}: X+ {plus} vs X- {minus}"))?;
        ensure(rat_equal(&plus, &tilde), || format!("{name}: X+ {plus} vs blow-up {tilde}"))?;
    }
    Ok(())
}

fn ac7() -> Outcome {
    for (name, window) in [("conifold", 0..2), ("kp2", 0..3)] {
        let (wc, ext) = extended(name);
        let m = wc.base.m();
        for l in window {
            for k in -1..=1 {
                let rep = fm_euler_check(&wc, &ext, &EquivClass::o(l, m), &EquivClass::o(k, m)).map_err(err)?;
                ensure(rep.equal, || {
                    format!("{name} L=O({l}) M=O({k}): {} vs {}", rep.blowup_side, rep.window_side)
                })?;
            }
        }
    }
    Ok(())
}

fn run_property<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(err)
}

fn ac8() -> Outcome {
    run_property(40, git_data(2, 8), |d| check_anticone_closure(&d)).map_err(|e| format!("closure: {e}"))?;
    let with_shift = git_data(2, 5).prop_flat_map(|d| {
        let (r, m) = (d.r(), d.m());
        (Just(d), prop::collection::vec(-3i64..=3, r), line_classes(r, m))
    });
    run_property(40, with_shift, |(d, s, e)| check_chamber_invariance(&d, &s, &e))
        .map_err(|e| format!("chamber invariance: {e}"))?;
    let pairs = git_data(2, 5).prop_flat_map(|d| {
        let (r, m) = (d.r(), d.m());
        (Just(d), line_classes(r, m), line_classes(r, m))
    });
    run_property(40, pairs, |(d, a, b)| check_restrict_multiplicative(&d, &a, &b))
        .map_err(|e| format!("restriction: {e}"))?;
    run_property(100, int_matrix(), |m| check_smith(&m)).map_err(|e| format!("smith: {e}"))?;
    run_property(200, (-20i64..20, -5i64..5, 0i64..7), |(w, k, eta)| check_window_reindexing(w, k, eta))
        .map_err(|e| format!("reindexing: {e}"))?;
    Ok(())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "plane Riemann-Roch coefficients", 1, ac1),
        ("AC2", "anti-diagonal specialization rejected", 1, ac2),
        ("AC3", "conifold combinatorics", 1, ac3),
        ("AC4", "crepancy and eta duality", 5, ac4),
        ("AC5", "localization against section counts", 10, ac5),
        ("AC6", "flop invariance of chi(O)", 10, ac6),
        ("AC7", "window lift against blow-up pairing", 30, ac7),
        ("AC8", "property suites", 30, ac8),
    ];
    let mut failed = 0;
    for (id, what, limit, f) in criteria {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let res = res.and_then(|()| {
            ensure(took <= Duration::from_secs(limit), || format!("took {took:.2?}, limit {limit}s"))
        });
        match res {
            Ok(()) => println!("PASS {id} {what} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id} {what} ({took:.2?}): {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
