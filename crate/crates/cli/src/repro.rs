//! End-to-end reproduction of the worked curve examples, compared fact by
//! fact against golden expectations stored next to the catalog fixtures.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use mfact::approx::{left_approximation, right_approximation, sigma_factorization_witness, sigma_membership};
use mfact::catalog::{base_cover, match_entry, Label, SingularityCatalog, FREE};
use mfact::error::{Error, Result};
use mfact::homalg::{almost_split_middle, decompose};
use mfact::semigroup::{ideal_factorization, simple_resolution, Bridge, QuiverPresentation, RING_VERTEX};

use crate::commands::{quiver_of, Session};
use crate::report::{Outcome, Status};

const E6_GOLDEN: &str = include_str!("../../core/fixtures/golden/e6.json");
const E8_GOLDEN: &str = include_str!("../../core/fixtures/golden/e8.json");

#[derive(Debug, Deserialize)]
pub struct Golden {
    pub label: String,
    pub facts: Vec<GoldenFact>,
}

#[derive(Debug, Deserialize)]
pub struct GoldenFact {
    pub id: String,
    pub expected: String,
}

#[derive(Debug, Serialize)]
pub struct FactResult {
    pub id: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

pub fn golden(label: Label) -> Result<Golden> {
    let text = match label {
        Label::E6 => E6_GOLDEN,
        Label::E8 => E8_GOLDEN,
        Label::A(_) => return Err(Error::Invalid("repro covers e6 and e8 only".into())),
    };
    serde_json::from_str(text).map_err(|e| Error::Catalog(format!("golden file: {e}")))
}

struct Context {
    cat: SingularityCatalog,
    quiver: QuiverPresentation,
    bridge: Bridge,
}

impl Context {
    fn name(&self, x: &mfact::mf::MatrixFactorization) -> Result<String> {
        Ok(match_entry(x, &self.cat)?.unwrap_or_else(|| "?".into()))
    }
}

fn arg<'a>(id: &'a str, prefix: &str) -> Option<&'a str> {
    id.strip_prefix(prefix).map(str::trim)
}

/// Evaluates one fact. Ids name the computation and its argument.
fn evaluate(cx: &Context, id: &str) -> Result<String> {
    let named = cx.cat.named();
    if let Some(e) = arg(id, "syzygy R/(x^").and_then(|e| e.strip_suffix(')')) {
        let e: u32 = e.parse().map_err(|_| Error::Invalid(format!("bad fact id `{id}`")))?;
        return cx.name(&base_cover(&cx.cat.potential, e)?);
    }
    if id == "syzygy R/(x)" {
        return cx.name(&base_cover(&cx.cat.potential, 1)?);
    }
    if let Some(m) = arg(id, "right approximation") {
        return right_approximation(cx.cat.get(m)?, 1, &named)?.sequence(Some(&cx.cat));
    }
    if let Some(m) = arg(id, "left approximation") {
        return left_approximation(cx.cat.get(m)?, 1, &named)?.sequence(Some(&cx.cat));
    }
    if let Some(m) = arg(id, "witness") {
        return Ok(sigma_factorization_witness(cx.cat.get(m)?, 1, 2, &named)?.sequence());
    }
    if let Some(v) = arg(id, "resolution S(").and_then(|v| v.strip_suffix(')')) {
        let t = simple_resolution(&cx.quiver, &cx.bridge, &cx.cat, v, 4)?;
        let terms: Vec<String> = (0..4).rev().map(|k| t.term(&cx.quiver, k)).collect();
        return Ok(format!("... -> {} -> S({v})", terms.join(" -> ")));
    }
    match id {
        "sigma_1 members" => {
            let mut names = Vec::new();
            for e in &cx.cat.entries {
                if sigma_membership(&e.mf, 1)?.member {
                    names.push(e.name.clone());
                }
            }
            names.sort();
            Ok(names.join(", "))
        }
        "quiver" => {
            let mut lines: Vec<String> = cx.quiver.adjacency().lines().map(str::to_string).collect();
            lines.sort();
            Ok(lines.join("; "))
        }
        "relations" => {
            let keep = ["M2 -1-> M1 -1-> N1", "N1 -1-> R -t^3-> M1 -1-> N1"];
            let mut lines: Vec<String> = cx
                .quiver
                .relation_lines()
                .into_iter()
                .filter(|l| {
                    let paths = l.split_once(" : ").map_or("", |(_, p)| p);
                    paths.split(" = ").any(|p| keep.contains(&p))
                })
                .collect();
            lines.sort();
            Ok(lines.join(" | "))
        }
        "ideal models" => {
            let mut parts = Vec::new();
            for v in cx.quiver.vertices.iter().filter(|v| v.name != RING_VERTEX) {
                let x = ideal_factorization(&cx.bridge, &v.ideal)?;
                parts.push(format!("{} = {}", cx.name(&x)?, v.ideal));
            }
            Ok(parts.join(", "))
        }
        "almost split middles" => {
            let mut sigma1 = BTreeSet::new();
            for e in &cx.cat.entries {
                if e.name != FREE && sigma_membership(&e.mf, 1)?.member {
                    sigma1.insert(e.name.clone());
                }
            }
            let mut found = BTreeSet::new();
            for z in &sigma1 {
                let d = decompose(&almost_split_middle(cx.cat.get(z)?)?, &named)?;
                for p in d.pieces {
                    let n = p.name.unwrap_or_else(|| "?".into());
                    if !sigma1.contains(&n) {
                        found.insert(n);
                    }
                }
            }
            Ok(found.into_iter().collect::<Vec<_>>().join(", "))
        }
        _ => Err(Error::Invalid(format!("unknown fact `{id}`"))),
    }
}

pub fn run_facts(s: &Session, label: Label) -> Result<Vec<FactResult>> {
    let g = golden(label)?;
    if g.label != label.to_string() {
        return Err(Error::Catalog(format!("golden file is for {}, not {label}", g.label)));
    }
    let cat = s.catalog(&label.to_string())?;
    let quiver = quiver_of(None, &[], Some(&label.to_string()), true)?;
    let bridge = Bridge::new(&cat.potential)?;
    let cx = Context { cat, quiver, bridge };
    let mut out = Vec::new();
    for f in g.facts {
        let actual = evaluate(&cx, &f.id)?;
        out.push(FactResult {
            pass: actual == f.expected,
            id: f.id,
            expected: f.expected,
            actual,
        });
    }
    Ok(out)
}

pub fn repro(s: &Session, label: Label) -> Result<Outcome> {
    let facts = run_facts(s, label)?;
    let passed = facts.iter().filter(|f| f.pass).count();
    let first = facts.iter().find(|f| !f.pass);
    let mut human = String::new();
    for f in &facts {
        writeln!(human, "[{}] {}", if f.pass { "pass" } else { "FAIL" }, f.id).expect("string");
    }
    writeln!(human, "{passed}/{} facts hold", facts.len()).expect("string");
    if let Some(f) = first {
        writeln!(human, "first violated fact: {}\n  - {}\n  + {}", f.id, f.expected, f.actual).expect("string");
    }
    Ok(Outcome {
        status: Status::from_bool(first.is_none()),
        result: json!({
            "label": label.to_string(),
            "passed": passed,
            "total": facts.len(),
            "first_violation": first.map(|f| json!({ "id": f.id, "expected": f.expected, "actual": f.actual })),
            "facts": facts,
        }),
        human,
    })
}
