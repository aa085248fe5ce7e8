use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mfact::approx::{
    bph_bounds, equivalence, left_approximation, right_approximation, sigma_report, BrieskornPhamSpec, Side,
};
use mfact::catalog::{build_catalog, load_catalog_dir, load_catalog_with, Label, SingularityCatalog};
use mfact::error::{Error, Result};
use mfact::field::Field;
use mfact::homalg::{decompose, is_isomorphic_seeded, Decomposition};
use mfact::mf::{branched_cover, tensor_hat, BranchedCoverSpec, MatrixFactorization};
use mfact::semigroup::{
    irreducible_arrows, simple_resolution, standard_vertices, Bridge, FractionalIdeal, IdealExponents,
    QuiverPresentation, SemigroupRing, Vertex, RING_VERTEX,
};
use mfact::series::DEFAULT_PRECISION;

use crate::report::{Outcome, SessionConfig, Status};

pub struct Session {
    pub cfg: SessionConfig,
    field: Option<Field>,
}

impl Session {
    pub fn new(field: Option<&str>, prec: Option<u32>, seed: u64, no_cache: bool) -> Result<Self> {
        let field = field.map(str::parse::<Field>).transpose()?;
        if prec == Some(0) {
            return Err(Error::Invalid("precision must be positive".into()));
        }
        Ok(Session {
            cfg: SessionConfig {
                field: field.map(|f| f.to_string()),
                prec,
                seed,
                cache: !no_cache,
            },
            field,
        })
    }

    pub fn field(&self) -> Field {
        self.field.unwrap_or_default()
    }

    pub fn prec(&self) -> u32 {
        self.cfg.prec.unwrap_or(DEFAULT_PRECISION)
    }

    /// A bundled label (`e6`, `e8`, `a3`) or a directory with a manifest.
    /// Without the cache, bundled catalogs are derived again from scratch.
    pub fn catalog(&self, spec: &str) -> Result<SingularityCatalog> {
        if let Ok(label) = spec.parse::<Label>() {
            return if self.cfg.cache {
                load_catalog_with(label, self.field(), self.prec())
            } else {
                build_catalog(label, self.field(), self.prec())
            };
        }
        let dir = Path::new(spec);
        if dir.join("manifest.json").is_file() {
            load_catalog_dir(dir, self.field(), self.prec())
        } else {
            Err(Error::Catalog(format!("`{spec}` is neither a bundled catalog nor a fixture directory")))
        }
    }

    fn override_header(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for line in text.lines() {
            let t = line.trim_start();
            match (&self.field, self.cfg.prec) {
                (Some(f), _) if t.starts_with("field ") => writeln!(out, "field {f}"),
                (_, Some(p)) if t.starts_with("prec ") => writeln!(out, "prec {p}"),
                _ => writeln!(out, "{line}"),
            }
            .expect("string");
        }
        out
    }

    fn read_text(&self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(self.override_header(&text))
    }

    pub fn read_mf(&self, path: &Path) -> Result<MatrixFactorization> {
        MatrixFactorization::parse_file(&self.read_text(path)?)
    }
}

fn file_arg(p: &Path) -> String {
    p.display().to_string()
}

/// Text of an emitted factorization, after checking that it parses back to
/// the same valid factorization.
fn emit(x: &MatrixFactorization, out: Option<&PathBuf>) -> Result<Value> {
    let text = x.to_file_string();
    let back = MatrixFactorization::parse_file(&text)?;
    if back != *x {
        return Err(Error::Invalid("emitted factorization does not parse back".into()));
    }
    if let Some(p) = out {
        std::fs::write(p, &text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(json!({
        "size": x.size(),
        "potential": x.potential.to_string(),
        "round_trip": true,
        "file": out.map(|p| file_arg(p)),
        "text": text,
    }))
}

fn pieces_map(d: &Decomposition) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for p in &d.pieces {
        let name = p.name.clone().unwrap_or_else(|| format!("<size {}>", p.mf.size()));
        *m.entry(name).or_insert(0) += p.multiplicity;
    }
    m
}

pub fn verify(s: &Session, file: &Path) -> Result<Outcome> {
    let x = MatrixFactorization::parse_file_unchecked(&s.read_text(file)?)?;
    let rep = x.validate();
    let mut result = json!({ "file": file_arg(file), "validation": rep });
    let mut ok = rep.valid;
    let mut human = format!("valid: {}\nsize: {}\nreduced: {}\n", rep.valid, rep.size, rep.reduced);
    if let Some(f) = &rep.failure {
        writeln!(human, "first failure: entry ({}, {}) in degree {}", f.row, f.col, f.degree).expect("string");
    }
    if rep.valid {
        let rank = x.rank()?;
        let grading = x.grading().ok();
        let text = x.to_file_string();
        let round_trip = MatrixFactorization::parse_file(&text)? == x;
        let mut rng = ChaCha8Rng::seed_from_u64(s.cfg.seed);
        let conj = x.random_conjugate(&mut rng)?;
        let conj_iso = conj.validate().valid && is_isomorphic_seeded(&x, &conj, s.cfg.seed)?.is_iso();
        ok = round_trip && conj_iso;
        result["rank"] = json!(rank);
        result["grading"] = json!(grading);
        result["round_trip"] = json!(round_trip);
        result["conjugate_isomorphic"] = json!(conj_iso);
        writeln!(human, "rank: {rank}\ngraded: {}\nround trip: {round_trip}", grading.is_some()).expect("string");
        writeln!(human, "random conjugate isomorphic: {conj_iso}").expect("string");
    }
    Ok(Outcome {
        status: Status::from_bool(ok),
        result,
        human,
    })
}

pub fn tensor(s: &Session, a: &Path, b: &Path, out: Option<&PathBuf>) -> Result<Outcome> {
    let t = tensor_hat(&s.read_mf(a)?, &s.read_mf(b)?)?;
    let v = emit(&t, out)?;
    let human = if out.is_some() {
        format!("size {} over {}\n", t.size(), t.potential)
    } else {
        t.to_file_string()
    };
    Ok(Outcome {
        status: Status::Pass,
        result: v,
        human,
    })
}

const COVER_VARS: [&str; 6] = ["y", "z", "w", "u", "v", "s"];

pub fn cover(s: &Session, file: &Path, n: u32, var: Option<&str>, out: Option<&PathBuf>) -> Result<Outcome> {
    let x = s.read_mf(file)?;
    let var = match var {
        Some(v) => v.to_string(),
        None => COVER_VARS
            .iter()
            .find(|v| x.ring().var_index(v).is_none())
            .map(|v| v.to_string())
            .ok_or_else(|| Error::Invalid("no free variable name for the cover; pass --var".into()))?,
    };
    let (red, _) = x.strip_trivial_summands();
    let c = branched_cover(&red, &BranchedCoverSpec::new(n, &var)?)?;
    let mut v = emit(&c, out)?;
    v["n"] = json!(n);
    v["var"] = json!(var);
    let human = if out.is_some() {
        format!("size {} over {}\n", c.size(), c.potential)
    } else {
        c.to_file_string()
    };
    Ok(Outcome {
        status: Status::Pass,
        result: v,
        human,
    })
}

fn named_of(cat: Option<&SingularityCatalog>) -> Vec<(String, MatrixFactorization)> {
    cat.map(|c| c.named()).unwrap_or_default()
}

pub fn decompose_cmd(s: &Session, file: &Path, catalog: Option<&str>) -> Result<Outcome> {
    let x = s.read_mf(file)?;
    let cat = catalog.map(|c| s.catalog(c)).transpose()?;
    let d = decompose(&x, &named_of(cat.as_ref()))?;
    let back = d.reassemble(&x.potential)?;
    let recomposed = is_isomorphic_seeded(&x, &back, s.cfg.seed)?.is_iso();
    let pieces = pieces_map(&d);
    let label = d.label();
    Ok(Outcome {
        status: Status::from_bool(recomposed),
        result: json!({
            "file": file_arg(file),
            "catalog": cat.as_ref().map(|c| c.label.clone()),
            "pieces": pieces,
            "free_rank": d.free_rank,
            "label": label,
            "recomposed_isomorphic": recomposed,
        }),
        human: format!("{label}\nrecomposed isomorphic: {recomposed}\n"),
    })
}

pub fn approx(s: &Session, file: &Path, k: u32, side: Side, catalog: Option<&str>) -> Result<Outcome> {
    let x = s.read_mf(file)?;
    let cat = catalog.map(|c| s.catalog(c)).transpose()?;
    let named = named_of(cat.as_ref());
    let w = match side {
        Side::Right => right_approximation(&x, k, &named)?,
        Side::Left => left_approximation(&x, k, &named)?,
    };
    let seq = w.sequence(cat.as_ref())?;
    let mut result = serde_json::to_value(w.summary(cat.as_ref())?).expect("summary serializes");
    result["sequence"] = json!(seq);
    Ok(Outcome {
        status: Status::Pass,
        result,
        human: format!("{seq}\nsplit: {}\nminimal: {}\n", w.split, w.minimal),
    })
}

pub fn sigma(s: &Session, file: &Path, catalog: Option<&str>) -> Result<Outcome> {
    let x = s.read_mf(file)?;
    let cat = catalog.map(|c| s.catalog(c)).transpose()?;
    let rep = sigma_report(&x, cat.as_ref())?;
    let mut eqs = Vec::new();
    for k in 1..rep.n {
        eqs.push(equivalence(&x, k)?);
    }
    let coherent = eqs.iter().all(|e| e.coherent());
    let mut human = format!("{}: annihilator power {}\n", rep.label, rep.annihilator_power);
    for r in &rep.rows {
        writeln!(human, "  k = {}: member {}, split {}", r.k, r.member, r.split).expect("string");
    }
    writeln!(human, "equivalent conditions agree: {coherent}").expect("string");
    Ok(Outcome {
        status: Status::from_bool(coherent),
        result: json!({
            "report": rep,
            "least_k": rep.least_k(),
            "equivalences": eqs,
            "coherent": coherent,
        }),
        human,
    })
}

/// `NAME=(t^a,t^b)` or a bare ideal, named `I1`, `I2`, … by position.
fn parse_vertex(ring: &SemigroupRing, i: usize, s: &str) -> Result<Vertex> {
    let (name, ideal) = match s.split_once('=') {
        Some((n, rest)) => (n.trim().to_string(), rest),
        None => (format!("I{}", i + 1), s),
    };
    let e: IdealExponents = ideal.parse()?;
    Ok(Vertex {
        name,
        ideal: FractionalIdeal::new(ring, &e.0)?,
    })
}

pub fn parse_ring(s: &str) -> Result<SemigroupRing> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let bad = || Error::Invalid(format!("bad ring `{s}`, expected a,b"));
            SemigroupRing::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)
        }
        _ => Err(Error::Invalid(format!("bad ring `{s}`, expected a,b"))),
    }
}

pub fn quiver_of(ring: Option<&str>, ideals: &[String], label: Option<&str>, with_ring: bool) -> Result<QuiverPresentation> {
    let (ring, mut vertices) = match (label, ring) {
        (Some(l), None) => {
            let (r, mut v) = standard_vertices(l.parse()?)?;
            if !with_ring {
                v.retain(|x| x.name != RING_VERTEX);
            }
            (r, v)
        }
        (None, Some(r)) => {
            let r = parse_ring(r)?;
            let v = ideals
                .iter()
                .enumerate()
                .map(|(i, s)| parse_vertex(&r, i, s))
                .collect::<Result<Vec<_>>>()?;
            (r, v)
        }
        _ => return Err(Error::Invalid("give either --catalog or --ring with --ideals".into())),
    };
    if label.is_none() && with_ring && !vertices.iter().any(|v| v.name == RING_VERTEX) {
        vertices.push(Vertex {
            name: RING_VERTEX.into(),
            ideal: FractionalIdeal::unit(&ring),
        });
    }
    if vertices.is_empty() {
        return Err(Error::Invalid("no vertices".into()));
    }
    irreducible_arrows(&ring, vertices)
}

pub fn quiver(ring: Option<&str>, ideals: &[String], label: Option<&str>, with_ring: bool, dot: bool) -> Result<Outcome> {
    let q = quiver_of(ring, ideals, label, with_ring)?;
    let arrows: Vec<Value> = q
        .arrows
        .iter()
        .map(|a| {
            json!({
                "source": q.vertices[a.source].name,
                "target": q.vertices[a.target].name,
                "label": a.label(),
                "exponent": a.exponent,
            })
        })
        .collect();
    let vertices: Vec<Value> = q
        .vertices
        .iter()
        .map(|v| json!({ "name": v.name, "ideal": v.ideal.to_string() }))
        .collect();
    let relations = q.relation_lines();
    let mut result = json!({
        "ring": [q.ring.a, q.ring.b],
        "vertices": vertices,
        "arrows": arrows,
        "arrow_count": q.arrows.len(),
        "relations": relations,
    });
    let human = if dot {
        result["dot"] = json!(q.to_dot());
        q.to_dot()
    } else {
        let mut h = q.adjacency();
        writeln!(h, "{} arrows, {} groups of parallel paths (listed with --json)", q.arrows.len(), relations.len())
            .expect("string");
        h
    };
    Ok(Outcome {
        status: Status::Pass,
        result,
        human,
    })
}

pub fn resolve(s: &Session, catalog: &str, vertex: Option<&str>, steps: usize) -> Result<Outcome> {
    let label: Label = catalog.parse()?;
    let cat = s.catalog(catalog)?;
    let q = quiver_of(None, &[], Some(&label.to_string()), true)?;
    let bridge = Bridge::new(&cat.potential)?;
    let names: Vec<String> = match vertex {
        Some(v) => vec![v.to_string()],
        None => q.vertices.iter().map(|v| v.name.clone()).collect(),
    };
    let mut traces = Vec::new();
    let mut human = String::new();
    let mut ok = true;
    for name in &names {
        let t = simple_resolution(&q, &bridge, &cat, name, steps)?;
        let periodic = matches!(t.period, 1 | 2) && t.onset <= 2;
        ok &= periodic;
        let terms: Vec<String> = (0..t.steps.len()).map(|k| t.term(&q, k)).collect();
        writeln!(human, "{}", t.display(&q)).expect("string");
        writeln!(
            human,
            "  second syzygy {}, period {} from step {}",
            t.second_syzygy, t.period, t.onset
        )
        .expect("string");
        traces.push(json!({ "trace": t, "terms": terms, "periodic": periodic }));
    }
    Ok(Outcome {
        status: Status::from_bool(ok),
        result: json!({ "catalog": label.to_string(), "resolutions": traces }),
        human,
    })
}

pub fn bounds(s: &Session, exponents: &[u32]) -> Result<Outcome> {
    let spec = BrieskornPhamSpec::new(exponents.to_vec())?;
    spec.check_field(s.field())?;
    let b = bph_bounds(&spec);
    let ok = b.paper <= b.bfk;
    Ok(Outcome {
        status: Status::from_bool(ok),
        human: format!("loewy: {}\nbfk: {}\npaper: {}\nm: {}\n", b.loewy, b.bfk, b.paper, b.m),
        result: json!({ "exponents": exponents, "bounds": b, "paper_le_bfk": ok }),
    })
}
