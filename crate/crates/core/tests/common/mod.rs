#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use torickit::exactalg::intmatrix::Q;
use torickit::gitdata::{chamber_of, example, minimal_anticones, GITData};
use torickit::wallcrossing::{extend, make_wall_crossing, ExtendedGIT, WallCrossing};

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn crossing(name: &str) -> WallCrossing {
    let ex = example(name).expect("built-in example");
    make_wall_crossing(&ex.data, ex.data.omega(), ex.omega_minus.as_ref().expect("two chambers")).expect("adjacent")
}

pub fn extended(name: &str) -> (WallCrossing, ExtendedGIT) {
    let wc = crossing(name);
    let ext = extend(&wc, None).expect("extension");
    (wc, ext)
}

pub fn golden(file: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn chamber(d: &GITData) -> String {
    chamber_of(d).expect("chamber").to_string()
}

/// Rendered conifold artifacts keyed by golden file name.
pub fn conifold_renderings() -> Vec<(&'static str, String)> {
    let (wc, ext) = extended("conifold");
    let rows: Vec<String> = ext
        .weight_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    vec![
        (
            "conifold_anticone_condition.txt",
            format!("{}\n", minimal_anticones(&wc.plus_data()).condition_disjunctive()),
        ),
        ("conifold_u_plus.txt", format!("{}\n", minimal_anticones(&wc.plus_data()).describe())),
        ("conifold_extended_weights.txt", format!("{}\n", rows.join("\n"))),
        (
            "conifold_chambers.txt",
            format!(
                "plus {}\nminus {}\ntilde {}\n",
                chamber(&ext.plus_data()),
                chamber(&ext.minus_data()),
                chamber(&ext.tilde_data())
            ),
        ),
        ("conifold_v_tilde.txt", format!("{}\n", minimal_anticones(&ext.tilde_data()).describe())),
    ]
}
