//! Named indecomposable factorizations for the curve singularities `E6`,
//! `E8` and the one-variable `A` types.

pub mod knit;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::homalg::{complete_factorization, decompose, is_isomorphic, Decomposition};
use crate::mf::MatrixFactorization;
use crate::series::{Ring, SeriesMatrix, TruncatedSeries, DEFAULT_PRECISION};

pub use knit::{base_cover, base_of, knit, quotient_signature, Knitted};
pub use validate::{validate_catalog, CatalogReport, Fact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// The matrices are printed in the source text.
    Paper,
    /// Derived and accepted through validation.
    Fixture,
    Trivial,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub mf: MatrixFactorization,
    pub rank: usize,
    pub ideal: Option<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct SingularityCatalog {
    pub label: String,
    pub potential: TruncatedSeries,
    /// Non-free indecomposables followed by `free`.
    pub entries: Vec<CatalogEntry>,
    /// Irreducible maps `(from, to, multiplicity)`, display data only.
    pub arrows: Vec<(String, String, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    pub size: usize,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<String>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub label: String,
    pub potential: String,
    pub variables: Vec<String>,
    pub entries: Vec<ManifestEntry>,
    pub arrows: Vec<(String, String, usize)>,
}

pub const FREE: &str = "free";

/// `E6`, `E8` or `A<n>` (the one-variable `x^{n+1}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    E6,
    E8,
    A(u32),
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        match s.to_ascii_uppercase().as_str() {
            "E6" => Ok(Label::E6),
            "E8" => Ok(Label::E8),
            t => t
                .strip_prefix('A')
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .map(Label::A)
                .ok_or_else(|| Error::Catalog(format!("unknown catalog `{s}`"))),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::E6 => write!(f, "E6"),
            Label::E8 => write!(f, "E8"),
            Label::A(n) => write!(f, "A{n}"),
        }
    }
}

impl Label {
    pub fn potential(&self, field: Field, prec: u32) -> Result<TruncatedSeries> {
        match self {
            Label::E6 => Ring::new(&["x", "y"], field, prec)?.parse("x^4+y^3"),
            Label::E8 => Ring::new(&["x", "y"], field, prec)?.parse("x^5+y^3"),
            Label::A(n) => Ok(Ring::new(&["x"], field, prec)?.var_pow(0, n + 1)),
        }
    }
}

enum Rule {
    Cover(u32),
    Quotient(&'static [(u32, usize)]),
    /// Quotient signature plus membership in the almost split middle ending
    /// at the named module.
    QuotientAndMiddleOf(&'static [(u32, usize)], &'static str),
    SyzygyOf(&'static str),
}

fn e6_rules() -> Vec<(&'static str, Rule)> {
    vec![
        ("N1", Rule::Cover(1)),
        ("M2", Rule::Cover(2)),
        ("M1", Rule::Cover(3)),
        ("A", Rule::Quotient(&[(2, 1), (3, 2)])),
        ("B", Rule::Quotient(&[(1, 2), (2, 1)])),
        ("X", Rule::Quotient(&[(1, 1), (2, 2), (3, 1)])),
    ]
}

fn e8_rules() -> Vec<(&'static str, Rule)> {
    vec![
        ("N1", Rule::Cover(1)),
        ("N2", Rule::Cover(2)),
        ("M2", Rule::Cover(3)),
        ("M1", Rule::Cover(4)),
        ("A1", Rule::Quotient(&[(2, 1), (4, 2)])),
        ("B1", Rule::SyzygyOf("A1")),
        ("A2", Rule::Quotient(&[(3, 2), (4, 1)])),
        ("B2", Rule::SyzygyOf("A2")),
        ("C2", Rule::Quotient(&[(1, 1), (3, 3)])),
        ("D2", Rule::SyzygyOf("C2")),
        ("C1", Rule::QuotientAndMiddleOf(&[(1, 1), (2, 1), (3, 1), (4, 1)], "A1")),
        ("D1", Rule::SyzygyOf("C1")),
        ("X1", Rule::QuotientAndMiddleOf(&[(1, 1), (2, 2), (3, 2), (4, 1)], "C2")),
        ("Y1", Rule::SyzygyOf("X1")),
        ("X2", Rule::Quotient(&[(2, 2), (3, 1), (4, 2)])),
        ("Y2", Rule::SyzygyOf("X2")),
    ]
}

pub(crate) fn ideal_models(label: Label) -> &'static [(&'static str, &'static str)] {
    match label {
        Label::E6 => &[("M1", "(t^3,t^8)"), ("N1", "(t^3,t^4)"), ("M2", "(t^6,t^8)")],
        Label::E8 => &[("M1", "(t^3,t^10)"), ("N1", "(t^3,t^5)"), ("M2", "(t^6,t^10)"), ("N2", "(t^5,t^6)")],
        Label::A(_) => &[],
    }
}

/// Matrices printed in the source, by entry name.
fn printed(label: Label, f: &TruncatedSeries) -> Result<Vec<(&'static str, MatrixFactorization)>> {
    let r = f.ring();
    Ok(match label {
        Label::E6 => vec![
            ("N1", MatrixFactorization::from_strs(f, &[&["x^3", "-y"], &["y^2", "x"]], &[&["x", "y"], &["-y^2", "x^3"]])?),
            ("M2", MatrixFactorization::from_strs(f, &[&["x^2", "-y"], &["y^2", "x^2"]], &[&["x^2", "y"], &["-y^2", "x^2"]])?),
        ],
        Label::E8 => vec![
            ("N1", MatrixFactorization::from_strs(f, &[&["x^4", "-y"], &["y^2", "x"]], &[&["x", "y"], &["-y^2", "x^4"]])?),
            ("N2", MatrixFactorization::from_strs(f, &[&["x^3", "-y"], &["y^2", "x^2"]], &[&["x^2", "y"], &["-y^2", "x^3"]])?),
            ("B2", complete_factorization(f, &SeriesMatrix::parse(r, &[&["x", "-y", "0"], &["0", "x^2", "-y"], &["y", "0", "x^2"]])?)?),
        ],
        Label::A(_) => vec![],
    })
}

fn name_a(e: u32) -> String {
    format!("R/x^{e}")
}

fn free_entry(f: &TruncatedSeries) -> CatalogEntry {
    CatalogEntry {
        name: FREE.into(),
        mf: MatrixFactorization::free(f),
        rank: 1,
        ideal: None,
        provenance: Provenance::Trivial,
    }
}

/// Derives a catalog from scratch: knitting for `E6`/`E8`, the Smith form
/// classification for `A<n>`.
pub fn build_catalog(label: Label, field: Field, prec: u32) -> Result<SingularityCatalog> {
    let f = label.potential(field, prec)?;
    if let Label::A(n) = label {
        let r = f.ring();
        let mut entries: Vec<CatalogEntry> = (1..=n)
            .map(|e| {
                Ok(CatalogEntry {
                    name: name_a(e),
                    mf: MatrixFactorization::new(
                        f.clone(),
                        SeriesMatrix::scalar(r, 1, &r.var_pow(0, e)),
                        SeriesMatrix::scalar(r, 1, &r.var_pow(0, n + 1 - e)),
                    )?,
                    rank: 0,
                    ideal: None,
                    provenance: Provenance::Trivial,
                })
            })
            .collect::<Result<_>>()?;
        entries.push(free_entry(&f));
        let mut arrows = Vec::new();
        for e in 1..n {
            arrows.push((name_a(e), name_a(e + 1), 1));
            arrows.push((name_a(e + 1), name_a(e), 1));
        }
        return Ok(SingularityCatalog {
            label: label.to_string(),
            potential: f,
            entries,
            arrows,
        });
    }
    let ks = knit(&f, 64)?;
    let rules = if label == Label::E6 { e6_rules() } else { e8_rules() };
    let mut assigned: BTreeMap<&str, usize> = BTreeMap::new();
    for (name, rule) in &rules {
        let sig = |s: &[(u32, usize)]| -> BTreeMap<u32, usize> { s.iter().copied().collect() };
        let hits: Vec<usize> = (0..ks.len())
            .filter(|&i| match rule {
                Rule::Cover(e) => ks[i].cover_of == Some(*e),
                Rule::Quotient(s) => ks[i].quotient == sig(s),
                Rule::QuotientAndMiddleOf(s, of) => {
                    ks[i].quotient == sig(s) && assigned.get(of).is_some_and(|&j| ks[i].ar_middle_of.contains(&j))
                }
                Rule::SyzygyOf(of) => assigned.get(of).is_some_and(|&j| ks[j].syzygy == i),
            })
            .collect();
        match hits.as_slice() {
            [i] => {
                assigned.insert(name, *i);
            }
            _ => {
                return Err(Error::Catalog(format!("naming rule for {name} matched {} modules", hits.len())));
            }
        }
    }
    if assigned.len() != ks.len() {
        return Err(Error::Catalog(format!("{} modules found, {} named", ks.len(), assigned.len())));
    }
    let mut name_of = vec![""; ks.len()];
    for (n, &i) in &assigned {
        name_of[i] = n;
    }
    let printed = printed(label, &f)?;
    let ideals = ideal_models(label);
    let mut entries = Vec::new();
    for (name, _) in &rules {
        let k = &ks[assigned[name]];
        let (mf, provenance) = match printed.iter().find(|(n, _)| n == name) {
            Some((_, p)) => {
                if !is_isomorphic(p, &k.mf)?.is_iso() {
                    return Err(Error::Catalog(format!("printed matrix for {name} does not match")));
                }
                (p.clone(), Provenance::Paper)
            }
            None => (k.mf.clone(), Provenance::Fixture),
        };
        entries.push(CatalogEntry {
            name: name.to_string(),
            rank: mf.rank()?,
            mf,
            ideal: ideals.iter().find(|(n, _)| n == name).map(|(_, i)| i.to_string()),
            provenance,
        });
    }
    entries.push(free_entry(&f));
    let mut arrows: BTreeMap<(String, String), usize> = BTreeMap::new();
    // every arrow into a non-free module lies in the almost split sequence
    // ending there; arrows into the free module come from the free part
    for (i, k) in ks.iter().enumerate() {
        let to = name_of[i].to_string();
        for &(j, m) in &k.ar_middle {
            *arrows.entry((name_of[j].to_string(), to.clone())).or_insert(0) += m;
        }
        if k.ar_free > 0 {
            *arrows.entry((FREE.to_string(), to.clone())).or_insert(0) += k.ar_free;
            *arrows.entry((name_of[k.syzygy].to_string(), FREE.to_string())).or_insert(0) += k.ar_free;
        }
    }
    Ok(SingularityCatalog {
        label: label.to_string(),
        potential: f,
        entries,
        arrows: arrows.into_iter().map(|((a, b), m)| (a, b, m)).collect(),
    })
}

macro_rules! fixtures {
    ($dir:literal: $($name:literal),*) => {
        &[
            ("manifest.json", include_str!(concat!("../../fixtures/", $dir, "/manifest.json"))),
            $(($name, include_str!(concat!("../../fixtures/", $dir, "/", $name, ".mf")))),*
        ]
    };
}

fn bundled(label: Label) -> Option<&'static [(&'static str, &'static str)]> {
    match label {
        Label::E6 => Some(fixtures!("e6": "N1", "M2", "M1", "A", "B", "X")),
        Label::E8 => Some(fixtures!(
            "e8": "N1", "N2", "M2", "M1", "A1", "B1", "A2", "B2", "C2", "D2", "C1", "D1", "X1", "Y1", "X2", "Y2"
        )),
        Label::A(_) => None,
    }
}

/// Re-reads a fixture file over the given field and precision.
fn parse_fixture(text: &str, field: Field, prec: u32) -> Result<MatrixFactorization> {
    let body: String = text
        .lines()
        .map(|l| {
            if l.starts_with("field ") {
                format!("field {field}")
            } else if l.starts_with("prec ") {
                format!("prec {prec}")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    MatrixFactorization::parse_file(&body)
}

fn from_files(
    label: &str,
    files: &dyn Fn(&str) -> Result<String>,
    field: Field,
    prec: u32,
) -> Result<SingularityCatalog> {
    let manifest: Manifest = serde_json::from_str(&files("manifest.json")?)
        .map_err(|e| Error::Catalog(format!("{label} manifest: {e}")))?;
    let ring = Ring::new(&manifest.variables, field, prec)?;
    let potential = ring.parse(&manifest.potential)?;
    let mut entries = Vec::new();
    for m in &manifest.entries {
        let mf = if m.name == FREE {
            MatrixFactorization::free(&potential)
        } else {
            let text = files(&m.file)?;
            parse_fixture(&text, field, prec).map_err(|e| Error::Catalog(format!("{label} entry {}: {e}", m.name)))?
        };
        if mf.potential != potential {
            return Err(Error::Catalog(format!("{label} entry {} has a different potential", m.name)));
        }
        entries.push(CatalogEntry {
            name: m.name.clone(),
            mf,
            rank: m.rank,
            ideal: m.ideal.clone(),
            provenance: m.provenance,
        });
    }
    Ok(SingularityCatalog {
        label: manifest.label,
        potential,
        entries,
        arrows: manifest.arrows,
    })
}

/// Loads the bundled fixtures (derived for `A<n>`) and checks that the
/// entries are valid and pairwise non-isomorphic.
pub fn load_catalog(label: Label) -> Result<SingularityCatalog> {
    load_catalog_with(label, Field::default(), DEFAULT_PRECISION)
}

pub fn load_catalog_with(label: Label, field: Field, prec: u32) -> Result<SingularityCatalog> {
    let cat = match bundled(label) {
        None => build_catalog(label, field, prec)?,
        Some(files) => {
            let get = |name: &str| -> Result<String> {
                files
                    .iter()
                    .find(|(n, _)| *n == name || format!("{n}.mf") == name)
                    .map(|(_, t)| t.to_string())
                    .ok_or_else(|| Error::Catalog(format!("missing fixture {name}")))
            };
            from_files(&label.to_string(), &get, field, prec)?
        }
    };
    check_distinct(&cat)?;
    Ok(cat)
}

/// Loads a catalog written by [`write_fixtures`].
pub fn load_catalog_dir(dir: &Path, field: Field, prec: u32) -> Result<SingularityCatalog> {
    let get = |name: &str| -> Result<String> { std::fs::read_to_string(dir.join(name)).map_err(Error::from) };
    let cat = from_files(&dir.display().to_string(), &get, field, prec)?;
    check_distinct(&cat)?;
    Ok(cat)
}

fn check_distinct(cat: &SingularityCatalog) -> Result<()> {
    for (i, a) in cat.entries.iter().enumerate() {
        if !a.mf.validate().valid {
            return Err(Error::Catalog(format!("{}: entry {} is not a factorization", cat.label, a.name)));
        }
        for b in &cat.entries[..i] {
            if is_isomorphic(&a.mf, &b.mf)?.is_iso() {
                return Err(Error::Catalog(format!("{}: entries {} and {} are isomorphic", cat.label, b.name, a.name)));
            }
        }
    }
    Ok(())
}

pub fn write_fixtures(cat: &SingularityCatalog, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for e in &cat.entries {
        let file = if e.name == FREE { String::new() } else { format!("{}.mf", e.name) };
        if !file.is_empty() {
            std::fs::write(dir.join(&file), e.mf.to_file_string())?;
        }
        entries.push(ManifestEntry {
            name: e.name.clone(),
            file,
            size: e.mf.size(),
            rank: e.rank,
            ideal: e.ideal.clone(),
            provenance: e.provenance,
        });
    }
    let manifest = Manifest {
        label: cat.label.clone(),
        potential: cat.potential.to_string(),
        variables: cat.potential.ring().vars().to_vec(),
        entries,
        arrows: cat.arrows.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Catalog(e.to_string()))?;
    std::fs::write(dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

impl SingularityCatalog {
    pub fn entry(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn get(&self, name: &str) -> Result<&MatrixFactorization> {
        self.entry(name)
            .map(|e| &e.mf)
            .ok_or_else(|| Error::Catalog(format!("{} has no entry {name}", self.label)))
    }

    /// Non-free entries as `(name, factorization)`, for naming pieces.
    pub fn named(&self) -> Vec<(String, MatrixFactorization)> {
        self.entries
            .iter()
            .filter(|e| e.name != FREE)
            .map(|e| (e.name.clone(), e.mf.clone()))
            .collect()
    }

    pub fn decompose(&self, x: &MatrixFactorization) -> Result<Decomposition> {
        decompose(x, &self.named())
    }
}

/// The unique entry isomorphic to `x`, `free` for a free module of rank
/// one, or `None`.
pub fn match_entry(x: &MatrixFactorization, cat: &SingularityCatalog) -> Result<Option<String>> {
    if x.potential != cat.potential {
        return Err(Error::RingMismatch("factorization and catalog potential differ".into()));
    }
    let mut hits = Vec::new();
    for e in &cat.entries {
        if is_isomorphic(x, &e.mf)?.is_iso() {
            hits.push(e.name.clone());
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(hits.pop()),
        _ => Err(Error::Catalog(format!("{} matches several entries: {}", cat.label, hits.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Rewrites the bundled fixtures from a fresh derivation.
    #[test]
    #[ignore]
    fn regenerate_fixtures() {
        for (label, dir) in [(Label::E6, "e6"), (Label::E8, "e8")] {
            let cat = build_catalog(label, Field::default(), DEFAULT_PRECISION).unwrap();
            let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(dir);
            write_fixtures(&cat, &path).unwrap();
        }
    }

    #[test]
    fn bundled_fixtures_match_derivation() {
        for label in [Label::E6, Label::E8] {
            let loaded = load_catalog(label).unwrap();
            let built = build_catalog(label, Field::default(), DEFAULT_PRECISION).unwrap();
            assert_eq!(loaded.entries.len(), built.entries.len());
            for (a, b) in loaded.entries.iter().zip(&built.entries) {
                assert_eq!(a.name, b.name);
                assert_eq!(a.rank, b.rank);
                assert!(is_isomorphic(&a.mf, &b.mf).unwrap().is_iso(), "{}", a.name);
            }
            assert_eq!(loaded.arrows, built.arrows);
        }
    }

    #[test]
    fn counts_and_validation() {
        let e6 = load_catalog(Label::E6).unwrap();
        assert_eq!(e6.entries.len(), 7);
        let r = validate_catalog(&e6);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let e8 = load_catalog(Label::E8).unwrap();
        assert_eq!(e8.entries.len(), 17);
        let r = validate_catalog(&e8);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let a4 = load_catalog("A4".parse().unwrap()).unwrap();
        let names: Vec<&str> = a4.entries.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["R/x^1", "R/x^2", "R/x^3", "R/x^4", "free"]);
        assert!(validate_catalog(&a4).passed());
    }

    #[test]
    fn swapped_entry_fails_validation() {
        let mut cat = load_catalog(Label::E6).unwrap();
        let a = cat.entries.iter_mut().find(|e| e.name == "A").unwrap();
        a.mf = a.mf.syzygy();
        let r = validate_catalog(&cat);
        assert!(!r.passed());
        assert!(r.failures().any(|f| f.name == "distinct A B"));
        assert!(r.failures().any(|f| f.name.starts_with("A/yA")));
    }

    #[test]
    fn matching() {
        let cat = load_catalog(Label::E6).unwrap();
        let f = cat.potential.clone();
        assert_eq!(match_entry(&MatrixFactorization::free(&f), &cat).unwrap().as_deref(), Some("free"));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = cat.get("M2").unwrap().random_conjugate(&mut rng).unwrap();
        assert_eq!(match_entry(&c, &cat).unwrap().as_deref(), Some("M2"));
        let two = MatrixFactorization::free(&f).power(2).unwrap();
        assert_eq!(match_entry(&two, &cat).unwrap(), None);
        let x2 = cat.get("X").unwrap().power(2).unwrap();
        assert_eq!(cat.decompose(&x2).unwrap().label(), "X^2");
    }
}
