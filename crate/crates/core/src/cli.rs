//! Command-line front end. Every command builds a JSON report; without
//! `--json` the report is printed as indented text.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::exactalg::intmatrix::Q;
use crate::gitdata::{
    anticones, chamber_of, example, fixed_points, minimal_anticones, parse_rational, validate, Example, GITData,
    EXAMPLE_NAMES,
};
use crate::localization::{all_fixed_point_data, euler_characteristic, hrr_check, EquivClass};
use crate::wallcrossing::{check_reduction, eta_invariants, extend, make_wall_crossing, partition_m, WallCrossing};
use crate::windows::{fm_euler_check, in_window, kn_strata, seven_loci, window_lift, window_weights, Window};

pub const DEFAULT_ORDER: i64 = 6;

#[derive(Parser, Debug)]
#[command(name = "torickit", version, about = "Exact computations for toric GIT quotients and their wall crossings")]
pub struct JobSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// GIT data as a JSON file
    #[arg(long, global = true, conflicts_with = "example")]
    pub data: Option<String>,
    /// Built-in example name (see `catalog`)
    #[arg(long, global = true)]
    pub example: Option<String>,
    /// Emit the report as JSON
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Omegas {
    /// Stability condition on the plus side, comma separated rationals
    #[arg(long, allow_hyphen_values = true)]
    pub omega_plus: Option<String>,
    /// Stability condition on the minus side
    #[arg(long, allow_hyphen_values = true)]
    pub omega_minus: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List built-in examples
    Catalog {
        #[command(flatten)]
        src: Source,
    },
    /// Check the standing assumptions on the data
    Validate {
        #[command(flatten)]
        src: Source,
    },
    /// Anticones, semistable locus and chamber
    Anticones {
        #[command(flatten)]
        src: Source,
    },
    /// Torus-fixed points with isotropy and tangent weights
    FixedPoints {
        #[command(flatten)]
        src: Source,
    },
    /// Equivariant Euler characteristic by localization
    Euler {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value = "O")]
        class: String,
    },
    /// Compare the expanded Euler characteristic with the Riemann-Roch side
    HrrCheck {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value = "O")]
        class: String,
        #[arg(long, env = "TORICKIT_TRUNCATION", default_value_t = DEFAULT_ORDER, allow_hyphen_values = true)]
        order: i64,
    },
    /// Construct the crossing and its extended problem
    Wallcross {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        omegas: Omegas,
    },
    /// Kempf-Ness strata, windows and window lifts
    Windows {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        omegas: Omegas,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        window_base: i64,
        /// Class on X- to lift into the window
        #[arg(long)]
        lift: Option<String>,
        /// Run the Euler pairing check for L on X- and M on X+
        #[arg(long, num_args = 2, value_names = ["L", "M"])]
        check_fm: Option<Vec<String>>,
    },
    /// Euler pairing check; give --class twice, for L on X- then M on X+
    FmCheck {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        omegas: Omegas,
        #[arg(long, num_args = 1)]
        class: Vec<String>,
    },
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    field: String,
    msg: String,
}

impl Failure {
    fn input(field: &str, msg: impl ToString) -> Self {
        Failure {
            code: 2,
            field: field.into(),
            msg: msg.to_string(),
        }
    }

    fn from_error(field: &str, e: Error) -> Self {
        match e {
            Error::Parse { field, msg } => Failure { code: 2, field, msg },
            Error::Check(_) | Error::LiftDiverged(_) => Failure {
                code: 1,
                field: field.into(),
                msg: e.to_string(),
            },
            other => Failure::input(field, other),
        }
    }
}

trait Context<T> {
    fn field(self, name: &str) -> std::result::Result<T, Failure>;
}

impl<T> Context<T> for crate::Result<T> {
    fn field(self, name: &str) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure::from_error(name, e))
    }
}

struct Loaded {
    data: GITData,
    example: Option<Example>,
}

fn load(src: &Source) -> std::result::Result<Loaded, Failure> {
    match (&src.data, &src.example) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::input("data", format!("{path}: {e}")))?;
            let data = GITData::from_json(&text).field("data")?;
            Ok(Loaded { data, example: None })
        }
        (None, Some(name)) => {
            let ex = example(name).ok_or_else(|| {
                Failure::input("example", format!("unknown example {name:?}; known: {}", EXAMPLE_NAMES.join(", ")))
            })?;
            Ok(Loaded {
                data: ex.data.clone(),
                example: Some(ex),
            })
        }
        (None, None) => Err(Failure::input("data", "one of --data or --example is required")),
    }
}

fn parse_vector(field: &str, text: &str, r: usize) -> std::result::Result<Vec<Q>, Failure> {
    let v = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_rational)
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| Failure::input(field, e))?;
    if v.len() != r {
        return Err(Failure::input(field, format!("expected {r} entries, found {}", v.len())));
    }
    Ok(v)
}

fn crossing(loaded: &Loaded, omegas: &Omegas) -> std::result::Result<WallCrossing, Failure> {
    let r = loaded.data.r();
    let plus = match &omegas.omega_plus {
        Some(t) => parse_vector("omega-plus", t, r)?,
        None => loaded.data.omega().to_vec(),
    };
    let minus = match (&omegas.omega_minus, loaded.example.as_ref().and_then(|e| e.omega_minus.clone())) {
        (Some(t), _) => parse_vector("omega-minus", t, r)?,
        (None, Some(m)) => m,
        (None, None) => return Err(Failure::input("omega-minus", "required for this data")),
    };
    make_wall_crossing(&loaded.data, &plus, &minus).field("omega-minus")
}

fn qs(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn one_based(idx: &[usize]) -> Value {
    json!(idx.iter().map(|i| i + 1).collect::<Vec<_>>())
}

fn class_arg(field: &str, spec: &str, data: &GITData) -> std::result::Result<EquivClass, Failure> {
    EquivClass::parse(spec, data.r(), data.m()).map_err(|e| match e {
        Error::Parse { msg, .. } => Failure::input(field, msg),
        other => Failure::input(field, other),
    })
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 1, out);
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", inline(x))),
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render(x, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", inline(x))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", inline(v))),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn execute(cmd: &Command) -> std::result::Result<(i32, Value), Failure> {
    match cmd {
        Command::Catalog { .. } => {
            let items: Vec<Value> = EXAMPLE_NAMES
                .iter()
                .filter_map(|n| example(n))
                .map(|e| json!({"name": e.name, "description": e.description, "data": serde_json::from_str::<Value>(&e.data.to_json()).expect("valid json")}))
                .collect();
            Ok((0, json!({ "examples": items })))
        }
        Command::Validate { src } => {
            let l = load(src)?;
            let rep = validate(&l.data);
            let code = if rep.passed() { 0 } else { 1 };
            Ok((
                code,
                json!({
                    "passed": rep.passed(),
                    "whole_set_is_anticone": rep.whole_set_is_anticone,
                    "anticones_span": rep.anticones_span,
                    "failures": rep.failures,
                }),
            ))
        }
        Command::Anticones { src } => {
            let l = load(src)?;
            let locus = minimal_anticones(&l.data);
            let chamber = chamber_of(&l.data).map(|c| c.to_string()).ok();
            Ok((
                0,
                json!({
                    "anticones": anticones(&l.data).iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "minimal": locus.minimal().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "condition": locus.condition_disjunctive(),
                    "locus": locus.describe(),
                    "chamber": chamber,
                }),
            ))
        }
        Command::FixedPoints { src } => {
            let l = load(src)?;
            let pts = all_fixed_point_data(&l.data).field("data")?;
            let items: Vec<Value> = pts
                .iter()
                .map(|fp| {
                    json!({
                        "anticone": fp.delta.to_string(),
                        "isotropy_order": fp.order(),
                        "isotropy": fp.group.iter().map(|g| qs(g)).collect::<Vec<_>>(),
                        "tangent_weights": fp.weights.iter().map(|w| qs(w)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((0, json!({ "count": fixed_points(&l.data).len(), "fixed_points": items })))
        }
        Command::Euler { src, class } => {
            let l = load(src)?;
            let e = class_arg("class", class, &l.data)?;
            let chi = euler_characteristic(&l.data, &e).field("data")?;
            let mut rep = Map::new();
            rep.insert("class".into(), json!(e.to_string()));
            rep.insert("euler".into(), json!(chi.to_string()));
            if let Some(spec) = l.example.as_ref().and_then(|x| x.specialization.clone()) {
                let s = chi.specialize(&spec).field("specialization")?;
                rep.insert("specialized".into(), json!(s.to_string()));
            }
            Ok((0, Value::Object(rep)))
        }
        Command::HrrCheck { src, class, order } => {
            let l = load(src)?;
            let e = class_arg("class", class, &l.data)?;
            let spec = l.example.as_ref().and_then(|x| x.specialization.clone());
            let rep = hrr_check(&l.data, &e, *order, spec.as_deref()).field("order")?;
            let code = if rep.equal { 0 } else { 1 };
            Ok((code, serde_json::to_value(&rep).expect("serializable")))
        }
        Command::Wallcross { src, omegas } => {
            let l = load(src)?;
            let wc = crossing(&l, omegas)?;
            let (eta_plus, eta_minus) = eta_invariants(&wc);
            let ext = extend(&wc, None).field("epsilon")?;
            check_reduction(&wc, &ext).field("data")?;
            let loci = seven_loci(&wc).field("data")?;
            let chamber = |d: &GITData| chamber_of(d).map(|c| c.to_string()).field("omega");
            Ok((
                0,
                json!({
                    "wall": qs(&wc.omega0),
                    "e": wc.e.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "crepant": wc.crepant,
                    "eta": {"plus": eta_plus, "minus": eta_minus},
                    "extended_weights": ext.weight_rows(),
                    "chambers": {
                        "plus": chamber(&ext.plus_data())?,
                        "minus": chamber(&ext.minus_data())?,
                        "tilde": chamber(&ext.tilde_data())?,
                    },
                    "loci": {
                        "base_plus": minimal_anticones(&wc.plus_data()).describe(),
                        "base_minus": minimal_anticones(&wc.minus_data()).describe(),
                        "wall": loci.wall.describe(),
                        "plus": loci.plus.describe(),
                        "minus": loci.minus.describe(),
                        "tilde": loci.tilde.describe(),
                        "plus|minus": loci.plus_minus.describe(),
                        "plus|tilde": loci.plus_tilde.describe(),
                        "minus|tilde": loci.minus_tilde.describe(),
                    },
                }),
            ))
        }
        Command::Windows {
            src,
            omegas,
            window_base,
            lift,
            check_fm,
        } => {
            let l = load(src)?;
            let wc = crossing(&l, omegas)?;
            let part = partition_m(&wc).field("omega-minus")?;
            let strata = kn_strata(&wc).field("omega-minus")?;
            let window = Window::new(&strata.toward_plus, *window_base);
            let stratum = |s: &crate::windows::KnStratum| {
                json!({
                    "lambda": s.lambda,
                    "fixed": one_based(&s.fixed),
                    "blade": one_based(&s.blade),
                    "eta": s.eta,
                })
            };
            let mut rep = Map::new();
            rep.insert("crepant".into(), json!(wc.crepant));
            rep.insert(
                "partition".into(),
                json!({"plus": one_based(&part.plus), "zero": one_based(&part.zero), "minus": one_based(&part.minus)}),
            );
            rep.insert(
                "strata".into(),
                json!({"toward_plus": stratum(&strata.toward_plus), "toward_minus": stratum(&strata.toward_minus)}),
            );
            rep.insert("window".into(), json!([window.k, window.k + window.eta]));
            let mut code = 0;
            if let Some(spec) = lift {
                let e = class_arg("lift", spec, &l.data)?;
                let lifted = window_lift(&wc, &e, *window_base).field("lift")?;
                rep.insert(
                    "lift".into(),
                    json!({
                        "input": e.to_string(),
                        "input_weights": window_weights(&e, &window.lambda),
                        "lifted": lifted.to_string(),
                        "lifted_weights": window_weights(&lifted, &window.lambda),
                        "in_window": in_window(&lifted, &window),
                    }),
                );
            }
            if let Some(pair) = check_fm {
                let a = class_arg("check-fm", &pair[0], &l.data)?;
                let b = class_arg("check-fm", &pair[1], &l.data)?;
                let ext = extend(&wc, None).field("epsilon")?;
                let fm = fm_euler_check(&wc, &ext, &a, &b).field("check-fm")?;
                if !fm.equal {
                    code = 1;
                }
                rep.insert("fm_check".into(), serde_json::to_value(&fm).expect("serializable"));
            }
            Ok((code, Value::Object(rep)))
        }
        Command::FmCheck { src, omegas, class } => {
            let l = load(src)?;
            if class.len() != 2 {
                return Err(Failure::input("class", format!("expected two classes, got {}", class.len())));
            }
            let wc = crossing(&l, omegas)?;
            let a = class_arg("class", &class[0], &l.data)?;
            let b = class_arg("class", &class[1], &l.data)?;
            let ext = extend(&wc, None).field("epsilon")?;
            let fm = fm_euler_check(&wc, &ext, &a, &b).field("class")?;
            let code = if fm.equal { 0 } else { 1 };
            Ok((code, serde_json::to_value(&fm).expect("serializable")))
        }
    }
}

fn source_of(cmd: &Command) -> &Source {
    match cmd {
        Command::Catalog { src }
        | Command::Validate { src }
        | Command::Anticones { src }
        | Command::FixedPoints { src }
        | Command::Euler { src, .. }
        | Command::HrrCheck { src, .. }
        | Command::Wallcross { src, .. }
        | Command::Windows { src, .. }
        | Command::FmCheck { src, .. } => src,
    }
}

pub fn run_job(job: &JobSpec) -> Outcome {
    let as_json = source_of(&job.command).json;
    match execute(&job.command) {
        Ok((code, report)) => {
            let stdout = if as_json {
                format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable"))
            } else {
                let mut s = String::new();
                render(&report, 0, &mut s);
                s
            };
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => {
            let stdout = if as_json {
                format!("{}\n", json!({"error": {"field": f.field, "message": f.msg}}))
            } else {
                String::new()
            };
            Outcome {
                code: f.code,
                stdout,
                stderr: format!("error: {}: {}\n", f.field, f.msg),
            }
        }
    }
}

/// Parses arguments and runs the job. Usage errors exit with code 2.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match JobSpec::try_parse_from(args) {
        Ok(job) => run_job(&job),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run(std::iter::once("torickit").chain(args.iter().copied()))
    }

    #[test]
    fn catalog_lists_examples() {
        let out = go(&["catalog", "--json"]);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        let names: Vec<&str> = v["examples"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
        assert_eq!(names, EXAMPLE_NAMES);
        assert!(out.stdout.contains("Atiyah flop"));
    }

    #[test]
    fn hrr_on_plane() {
        let out = go(&["hrr-check", "--example", "c2-diagonal", "--order", "4", "--json"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("5/12") && out.stdout.contains("-1/12"), "{}", out.stdout);
    }

    #[test]
    fn wallcross_rows() {
        let out = go(&["wallcross", "--example", "conifold", "--json"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["extended_weights"], json!([[1, 1, -1, -1, 0], [-1, -1, 0, 0, 1]]));
        assert_eq!(v["eta"], json!({"plus": 2, "minus": 2}));
        assert_eq!(v["chambers"]["tilde"], "{s1+s2<0, s2<0}");
    }

    #[test]
    fn input_errors_name_the_field() {
        let out = go(&["validate", "--example", "nope"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("example"));
        let out = go(&["wallcross", "--example", "conifold", "--omega-plus", "1,2"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("omega-plus"), "{}", out.stderr);
        let out = go(&["euler", "--example", "conifold", "--class", "Q(1)"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("class"));
        assert_eq!(go(&["frobnicate"]).code, 2);
    }

    #[test]
    fn windows_report() {
        let out = go(&["windows", "--example", "kp2", "--lift", "O(3)", "--check-fm", "O(1)", "O(-1)", "--json"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["window"], json!([0, 3]));
        assert_eq!(v["lift"]["in_window"], json!(true));
        assert_eq!(v["fm_check"]["equal"], json!(true));
        let text = go(&["windows", "--example", "conifold"]);
        assert!(text.stdout.contains("window: [0, 2]"), "{}", text.stdout);
    }
}
