use std::collections::BTreeMap;

use serde::Serialize;

use super::{base_cover, match_entry, quotient_signature, SingularityCatalog, FREE};
use crate::error::Result;
use crate::homalg::{almost_split_middle, decompose, is_isomorphic, syzygy_module, Syzygy};
use crate::mf::{filtration_piece, quotient_presentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogReport {
    pub label: String,
    pub facts: Vec<Fact>,
}

impl CatalogReport {
    pub fn passed(&self) -> bool {
        self.facts.iter().all(|f| f.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter().filter(|f| !f.passed)
    }
}

struct Facts(Vec<Fact>);

impl Facts {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        let detail = if passed { String::new() } else { detail.into() };
        self.0.push(Fact {
            name: name.into(),
            passed,
            detail,
        });
    }

    /// Records a computation error as a failed fact.
    fn attempt(&mut self, name: &str, f: impl FnOnce() -> Result<(bool, String)>) {
        match f() {
            Ok((p, d)) => self.check(name, p, d),
            Err(e) => self.check(name, false, e.to_string()),
        }
    }
}

fn sig(s: &[(u32, usize)]) -> BTreeMap<u32, usize> {
    s.iter().copied().collect()
}

fn fmt_sig(s: &BTreeMap<u32, usize>) -> String {
    s.iter()
        .map(|(e, m)| if *m == 1 { format!("R/x^{e}") } else { format!("(R/x^{e})^{m}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Checks every entry and the stated facts for the catalog's singularity.
pub fn validate_catalog(cat: &SingularityCatalog) -> CatalogReport {
    let mut facts = Facts(Vec::new());
    for e in &cat.entries {
        let v = e.mf.validate();
        let detail = v
            .failure
            .map(|f| format!("{} fails at ({},{}) in degree {}", f.product, f.row, f.col, f.degree))
            .unwrap_or_default();
        facts.check(format!("factorization {}", e.name), v.valid, detail);
    }
    for (i, a) in cat.entries.iter().enumerate() {
        for b in &cat.entries[..i] {
            facts.attempt(&format!("distinct {} {}", b.name, a.name), || {
                Ok((!is_isomorphic(&a.mf, &b.mf)?.is_iso(), "isomorphic".into()))
            });
        }
    }
    let curve = cat.label == "E6" || cat.label == "E8";
    for e in cat.entries.iter().filter(|e| e.name != FREE) {
        facts.attempt(&format!("indecomposable {}", e.name), || {
            let d = decompose(&e.mf, &[])?;
            let ok = d.free_rank == 0 && d.pieces.len() == 1 && d.pieces[0].multiplicity == 1;
            Ok((ok, format!("splits into {} pieces", d.pieces.iter().map(|p| p.multiplicity).sum::<usize>())))
        });
        facts.attempt(&format!("syzygy of {} in catalog", e.name), || {
            let m = match_entry(&e.mf.syzygy(), cat)?;
            Ok((m.is_some(), "unmatched".into()))
        });
        if curve {
            facts.attempt(&format!("rank {}", e.name), || {
                let r = e.mf.rank()?;
                Ok((r == e.rank, format!("computed {r}, manifest {}", e.rank)))
            });
        }
    }
    match cat.label.as_str() {
        "E6" => e6_facts(cat, &mut facts),
        "E8" => e8_facts(cat, &mut facts),
        _ => {}
    }
    CatalogReport {
        label: cat.label.clone(),
        facts: facts.0,
    }
}

fn cover_facts(cat: &SingularityCatalog, facts: &mut Facts, covers: &[(u32, &str)]) {
    for &(e, name) in covers {
        facts.attempt(&format!("syzygy of R/x^{e} is {name}"), || {
            let c = base_cover(&cat.potential, e)?;
            let m = match_entry(&c, cat)?;
            Ok((m.as_deref() == Some(name), format!("matched {m:?}")))
        });
    }
}

fn quotient_facts(cat: &SingularityCatalog, facts: &mut Facts, quotients: &[(&str, &[(u32, usize)])]) {
    for &(name, s) in quotients {
        facts.attempt(&format!("{name}/y{name} = {}", fmt_sig(&sig(s))), || {
            let q = quotient_signature(cat.get(name)?)?;
            Ok((q == sig(s), format!("computed {}", fmt_sig(&q))))
        });
    }
}

fn ar_fact(cat: &SingularityCatalog, facts: &mut Facts, end: &str, middle: &str) {
    facts.attempt(&format!("almost split sequence ending at {end} has middle {middle}"), || {
        let d = cat.decompose(&almost_split_middle(cat.get(end)?)?)?;
        Ok((d.label() == middle, format!("computed {}", d.label())))
    });
}

fn e6_facts(cat: &SingularityCatalog, facts: &mut Facts) {
    cover_facts(cat, facts, &[(1, "N1"), (2, "M2"), (3, "M1")]);
    quotient_facts(
        cat,
        facts,
        &[
            ("A", &[(3, 2), (2, 1)]),
            ("B", &[(1, 2), (2, 1)]),
            ("X", &[(2, 2), (1, 1), (3, 1)]),
        ],
    );
    ar_fact(cat, facts, "N1", "A");
    ar_fact(cat, facts, "M1", "B + R");
    ar_fact(cat, facts, "M2", "X");
}

fn e8_facts(cat: &SingularityCatalog, facts: &mut Facts) {
    cover_facts(cat, facts, &[(1, "N1"), (2, "N2"), (3, "M2"), (4, "M1")]);
    quotient_facts(
        cat,
        facts,
        &[
            ("A1", &[(4, 2), (2, 1)]),
            ("A2", &[(4, 1), (3, 2)]),
            ("C1", &[(4, 1), (3, 1), (1, 1), (2, 1)]),
            ("X1", &[(4, 1), (3, 2), (1, 1), (2, 2)]),
            ("X2", &[(4, 2), (3, 1), (2, 2)]),
            ("B2", &[(1, 1), (2, 2)]),
        ],
    );
    facts.attempt("almost split middles ending in Σ1 are A1, B1, C2, D2", || {
        let mut names = Vec::new();
        for end in ["M1", "N1", "M2", "N2"] {
            let d = cat.decompose(&almost_split_middle(cat.get(end)?)?)?;
            names.extend(d.pieces.iter().map(|p| p.name.clone().unwrap_or_else(|| "?".into())));
        }
        names.sort();
        Ok((names == ["A1", "B1", "C2", "D2"], format!("computed {names:?}")))
    });
    facts.attempt("yB2/y^2B2 = R/x + (R/x^2)^2", || {
        let p = filtration_piece(cat.get("B2")?, 1, 2)?;
        let (_, _, yi, _) = super::knit::base_of(&cat.potential)?;
        let q = crate::homalg::decompose_artinian(&p.eliminate_var(yi)?)?;
        Ok((q == sig(&[(1, 1), (2, 2)]), format!("computed {}", fmt_sig(&q))))
    });
    facts.attempt("witness middle for B2 is A2 + B2 + R^3", || {
        let b2 = cat.get("B2")?;
        let (Syzygy::Mcm(mid), Syzygy::Mcm(outer)) = (
            syzygy_module(&quotient_presentation(b2, 2)?)?,
            syzygy_module(&quotient_presentation(b2, 1)?)?,
        ) else {
            return Ok((false, "syzygy is not MCM".into()));
        };
        let d = cat.decompose(&mid)?;
        // the free part completing the minimal syzygy to the middle of the
        // sequence of syzygies, by rank
        let free = (2 * outer.rank()? - mid.rank()?) + d.free_rank;
        let label = format!("{} + R^{free}", d.label());
        Ok((label == "A2 + B2 + R^3", format!("computed {label}")))
    });
}
