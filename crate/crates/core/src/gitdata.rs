//! Toric GIT data: a torus K = (C*)^r acting on C^m through characters
//! D_1..D_m, together with a stability condition omega.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::cone::cone_contains;
use crate::exactalg::intmatrix::{dot, primitive_integer, rational_solve, IntMatrix, Q};
use crate::exactalg::monomial::fmt_linear_form;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GITData {
    r: usize,
    m: usize,
    weights: IntMatrix,
    omega: Vec<Q>,
}

/// A subset of coordinates, stored 0-based and sorted; displayed 1-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Anticone(Vec<usize>);

impl Anticone {
    pub fn new(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        Anticone(idx)
    }

    pub fn from_mask(mask: u64, m: usize) -> Self {
        Anticone((0..m).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |acc, i| acc | 1 << i)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &Anticone) -> bool {
        self.mask() & !other.mask() == 0
    }
}

impl fmt::Display for Anticone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub whole_set_is_anticone: bool,
    pub anticones_span: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.whole_set_is_anticone && self.anticones_span
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GitJson {
    r: usize,
    m: usize,
    weights: Vec<Vec<i64>>,
    omega: Vec<RationalLit>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RationalLit {
    Int(i64),
    Text(String),
}

pub fn parse_rational(s: &str) -> Result<Q> {
    Q::from_str(s.trim()).map_err(|_| Error::parse("rational", format!("cannot parse {s:?} as p/q")))
}

impl GITData {
    /// `weights[i]` is the character D_(i+1) as a vector of length r.
    pub fn new(r: usize, weights: &[Vec<i64>], omega: Vec<Q>) -> Result<Self> {
        let m = weights.len();
        if omega.len() != r {
            return Err(Error::DimensionMismatch(format!("omega has length {}, expected {r}", omega.len())));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.len() != r) {
            return Err(Error::DimensionMismatch(format!(
                "character {} has length {}, expected {r}",
                i + 1,
                w.len()
            )));
        }
        if m < r {
            return Err(Error::InvalidData(format!("m = {m} is smaller than r = {r}")));
        }
        let rows: Vec<Vec<i64>> = (0..r).map(|a| weights.iter().map(|w| w[a]).collect()).collect();
        let weights = IntMatrix::from_rows(m, &rows)?;
        Ok(GITData { r, m, weights, omega })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: GitJson = serde_json::from_str(text).map_err(|e| Error::parse("data", e.to_string()))?;
        if j.weights.len() != j.m {
            return Err(Error::parse("weights", format!("expected {} characters, found {}", j.m, j.weights.len())));
        }
        let omega = j
            .omega
            .iter()
            .map(|x| match x {
                RationalLit::Int(n) => Ok(Q::from_integer((*n).into())),
                RationalLit::Text(s) => parse_rational(s),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.r, &j.weights, omega)
    }

    pub fn to_json(&self) -> String {
        let j = GitJson {
            r: self.r,
            m: self.m,
            weights: (0..self.m)
                .map(|i| self.weights.col(i).iter().map(|x| x.try_into().expect("weight fits i64")).collect())
                .collect(),
            omega: self.omega.iter().map(|x| RationalLit::Text(x.to_string())).collect(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn omega(&self) -> &[Q] {
        &self.omega
    }

    pub fn weight_matrix(&self) -> &IntMatrix {
        &self.weights
    }

    /// D_(i+1) over the rationals.
    pub fn weight(&self, i: usize) -> Vec<Q> {
        self.weights.col(i).into_iter().map(Q::from_integer).collect()
    }

    pub fn weight_int(&self, i: usize) -> Vec<BigInt> {
        self.weights.col(i)
    }

    pub fn with_omega(&self, omega: Vec<Q>) -> Result<Self> {
        if omega.len() != self.r {
            return Err(Error::DimensionMismatch(format!("omega has length {}, expected {}", omega.len(), self.r)));
        }
        Ok(GITData { omega, ..self.clone() })
    }

    pub fn weights_of(&self, idx: &[usize]) -> Vec<Vec<Q>> {
        idx.iter().map(|&i| self.weight(i)).collect()
    }

    /// Sum of all characters.
    pub fn weight_sum(&self) -> Vec<Q> {
        (0..self.r)
            .map(|a| (0..self.m).map(|i| Q::from_integer(self.weights[(a, i)].clone())).sum())
            .collect()
    }

    pub fn is_anticone(&self, idx: &[usize]) -> bool {
        cone_contains(&self.weights_of(idx), &self.omega, true).expect("dimensions agree")
    }
}

pub fn validate(data: &GITData) -> ValidationReport {
    let all: Vec<usize> = (0..data.m).collect();
    let mut report = ValidationReport {
        whole_set_is_anticone: data.is_anticone(&all),
        anticones_span: true,
        failures: Vec::new(),
    };
    if !report.whole_set_is_anticone {
        report.failures.push("omega is not in the interior of the cone of all characters".into());
    }
    for a in anticones(data) {
        let gens = data.weights_of(a.indices());
        if crate::exactalg::intmatrix::rank(&gens, data.r) != data.r {
            report.anticones_span = false;
            report.failures.push(format!("anticone {a} does not span"));
        }
    }
    report
}

/// Every I with omega in the interior of Cone_I, in order of increasing bitmask.
pub fn anticones(data: &GITData) -> Vec<Anticone> {
    assert!(data.m < 64, "too many characters for subset enumeration");
    (0u64..1 << data.m)
        .map(|mask| Anticone::from_mask(mask, data.m))
        .filter(|a| data.is_anticone(a.indices()))
        .collect()
}

fn minimal_elements(family: &[Anticone]) -> Vec<Anticone> {
    let mut out: Vec<Anticone> = family
        .iter()
        .filter(|a| !family.iter().any(|b| b != *a && b.is_subset(a)))
        .cloned()
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

pub fn minimal_anticones(data: &GITData) -> SemistableLocus {
    SemistableLocus::new(data.m, minimal_elements(&anticones(data)))
}

/// Anticones of size r, ordered lexicographically.
pub fn fixed_points(data: &GITData) -> Vec<Anticone> {
    let mut fps: Vec<Anticone> = anticones(data).into_iter().filter(|a| a.len() == data.r).collect();
    fps.sort();
    fps
}

/// True iff the vectors lie in a strictly convex cone: no nonnegative
/// combination with some positive coefficient vanishes.
pub fn weights_convex(weights: &[Vec<Q>]) -> bool {
    weights.iter().all(|w| {
        let neg: Vec<Q> = w.iter().map(|x| -x).collect();
        !cone_contains(weights, &neg, false).expect("weights share a dimension")
    })
}

/// Upward-closed family of coordinate subsets, given by its minimal members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemistableLocus {
    m: usize,
    minimal: Vec<Anticone>,
}

impl SemistableLocus {
    pub fn new(m: usize, family: Vec<Anticone>) -> Self {
        SemistableLocus {
            m,
            minimal: minimal_elements(&family),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn minimal(&self) -> &[Anticone] {
        &self.minimal
    }

    pub fn contains_set(&self, set: &Anticone) -> bool {
        self.minimal.iter().any(|a| a.is_subset(set))
    }

    /// Every member of the family, in bitmask order.
    pub fn members(&self) -> Vec<Anticone> {
        (0u64..1 << self.m)
            .map(|mask| Anticone::from_mask(mask, self.m))
            .filter(|s| self.contains_set(s))
            .collect()
    }

    /// Minimal transversals T: I is a member iff I meets every T.
    pub fn clauses(&self) -> Vec<Anticone> {
        let mut found: Vec<Anticone> = Vec::new();
        let mut masks: Vec<u64> = (0u64..1 << self.m).collect();
        masks.sort_by_key(|x| (x.count_ones(), *x));
        for mask in masks {
            if found.iter().any(|t| t.mask() & !mask == 0) {
                continue;
            }
            if self.minimal.iter().all(|a| a.mask() & mask != 0) {
                found.push(Anticone::from_mask(mask, self.m));
            }
        }
        found.sort();
        found
    }

    /// "I∩{1,2}≠∅ and I∩{3,4}≠∅"
    pub fn condition(&self) -> String {
        self.render(|t| match t.len() {
            0 => "false".into(),
            1 => format!("{}∈I", t.indices()[0] + 1),
            _ => format!("I∩{t}≠∅"),
        })
    }

    /// "1∈I or 2∈I"
    pub fn condition_disjunctive(&self) -> String {
        let clauses = self.clauses();
        let many = clauses.len() > 1;
        self.render(|t| {
            let s = if t.is_empty() {
                "false".to_string()
            } else {
                t.indices().iter().map(|i| format!("{}∈I", i + 1)).collect::<Vec<_>>().join(" or ")
            };
            if many && t.len() > 1 {
                format!("({s})")
            } else {
                s
            }
        })
    }

    fn render(&self, clause: impl Fn(&Anticone) -> String) -> String {
        let clauses = self.clauses();
        if clauses.is_empty() {
            return "true".into();
        }
        clauses.iter().map(clause).collect::<Vec<_>>().join(" and ")
    }

    /// Open subset of C^m, e.g. "{(z1,z2)≠0, z5≠0}".
    pub fn describe(&self) -> String {
        let clauses = self.clauses();
        if clauses.is_empty() {
            return format!("C^{}", self.m);
        }
        if clauses[0].is_empty() {
            return "∅".into();
        }
        let parts: Vec<String> = clauses
            .iter()
            .map(|t| match t.len() {
                1 => format!("z{}≠0", t.indices()[0] + 1),
                _ => {
                    let zs: Vec<String> = t.indices().iter().map(|i| format!("z{}", i + 1)).collect();
                    format!("({})≠0", zs.join(","))
                }
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Open cone of stability conditions cut out by strict linear inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    /// Primitive integer normals f with f . s > 0 on the chamber.
    pub inequalities: Vec<Vec<BigInt>>,
    pub sample: Vec<Q>,
}

impl Chamber {
    pub fn contains(&self, point: &[Q]) -> bool {
        self.inequalities.iter().all(|f| {
            let fq: Vec<Q> = f.iter().cloned().map(Q::from_integer).collect();
            dot(&fq, point).is_positive()
        })
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .inequalities
            .iter()
            .map(|n| {
                let lead_pos = n.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive());
                let (sign, form): (&str, Vec<Q>) = if lead_pos {
                    (">", n.iter().cloned().map(Q::from_integer).collect())
                } else {
                    ("<", n.iter().map(|x| Q::from_integer(-x)).collect())
                };
                format!("{}{sign}0", fmt_linear_form(&form, "s"))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn subsets_of_size(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= m {
        rec(0, m, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Subsets of {0..m} of size k in lexicographic order.
pub fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    subsets_of_size(m, k)
}

/// Some I with |I| = r-1 whose closed cone contains `point`.
pub fn wall_through(data: &GITData, point: &[Q]) -> Option<Vec<usize>> {
    if data.r == 0 {
        return None;
    }
    subsets_of_size(data.m, data.r - 1)
        .into_iter()
        .find(|idx| cone_contains(&data.weights_of(idx), point, false).expect("dimensions agree"))
}

pub fn chamber_of(data: &GITData) -> Result<Chamber> {
    if let Some(idx) = wall_through(data, &data.omega) {
        let a = Anticone::new(idx);
        return Err(Error::OnWall(format!("omega lies in the closed cone of {a}")));
    }
    let mut normals: Vec<Vec<BigInt>> = Vec::new();
    for fp in fixed_points(data) {
        let basis = data.weights_of(fp.indices());
        // rows of the inverse of the matrix with columns D_i, i in fp
        for k in 0..data.r {
            let rows: Vec<Vec<Q>> = (0..data.r).map(|a| basis.iter().map(|d| d[a].clone()).collect()).collect();
            let transposed: Vec<Vec<Q>> = (0..data.r).map(|a| rows.iter().map(|row| row[a].clone()).collect()).collect();
            let mut unit = vec![Q::zero(); data.r];
            unit[k] = Q::from_integer(1.into());
            let row = rational_solve(&transposed, data.r, &unit)?;
            let n = primitive_integer(&row);
            if !normals.contains(&n) {
                normals.push(n);
            }
        }
    }
    let as_q = |n: &Vec<BigInt>| -> Vec<Q> { n.iter().cloned().map(Q::from_integer).collect() };
    let mut kept: Vec<Vec<BigInt>> = normals.clone();
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Vec<Q>> = kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, n)| as_q(n)).collect();
        if cone_contains(&others, &as_q(&kept[i]), false)? {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept.sort_by_key(|n| {
        let first = n.iter().position(|x| !x.is_zero()).unwrap_or(n.len());
        let nnz = n.iter().filter(|x| !x.is_zero()).count();
        let oriented: Vec<BigInt> = if n[first].is_positive() { n.clone() } else { n.iter().map(|x| -x).collect() };
        (first, nnz, oriented)
    });
    Ok(Chamber {
        inequalities: kept,
        sample: data.omega.clone(),
    })
}

/// Named example with optional second stability condition and torus specialization.
#[derive(Clone, Debug)]
pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub data: GITData,
    pub omega_minus: Option<Vec<Q>>,
    pub specialization: Option<Vec<Vec<Q>>>,
}

pub const EXAMPLE_NAMES: [&str; 4] = ["conifold", "kp2", "p12", "c2-diagonal"];

pub fn example(name: &str) -> Option<Example> {
    let one = || Q::from_integer(1.into());
    let neg = || Q::from_integer((-1).into());
    let ex = match name {
        "conifold" => Example {
            name: "conifold",
            description: "C^4 with weights (1,1,-1,-1): the Atiyah flop",
            data: GITData::new(1, &[vec![1], vec![1], vec![-1], vec![-1]], vec![one()]).ok()?,
            omega_minus: Some(vec![neg()]),
            specialization: None,
        },
        "kp2" => Example {
            name: "kp2",
            description: "C^4 with weights (1,1,1,-3): local P^2 versus [C^3/mu_3]",
            data: GITData::new(1, &[vec![1], vec![1], vec![1], vec![-3]], vec![one()]).ok()?,
            omega_minus: Some(vec![neg()]),
            specialization: None,
        },
        "p12" => Example {
            name: "p12",
            description: "weighted projective line P(1,2)",
            data: GITData::new(1, &[vec![1], vec![2]], vec![one()]).ok()?,
            omega_minus: None,
            specialization: None,
        },
        "c2-diagonal" => Example {
            name: "c2-diagonal",
            description: "C^2 with the diagonal C* action",
            data: GITData::new(0, &[vec![], vec![]], vec![]).ok()?,
            omega_minus: None,
            specialization: Some(vec![vec![one()], vec![one()]]),
        },
        _ => return None,
    };
    Some(ex)
}
