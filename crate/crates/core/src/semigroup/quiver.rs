//! Quiver of `End(⊕ I_i)` for pairwise non-isomorphic monomial ideals: the
//! arrows `i → j` are a monomial basis of `rad(I_i, I_j)/rad²(I_i, I_j)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{colon, t_power, FractionalIdeal, IdealExponents, SemigroupRing};
use crate::catalog::{ideal_models, Label};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub name: String,
    pub ideal: FractionalIdeal,
}

/// Multiplication by `t^exponent` from `source` to `target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub exponent: i64,
}

impl Arrow {
    pub fn label(&self) -> String {
        t_power(self.exponent)
    }
}

/// Parallel paths (as arrow indices) that compose to the same power of `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationHint {
    pub source: usize,
    pub target: usize,
    pub exponent: i64,
    pub paths: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuiverPresentation {
    pub ring: SemigroupRing,
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<RelationHint>,
}

/// Exponent set of the radical maps `I_i → I_j` on a window `[lo, hi]`.
struct RadTable {
    lo: i64,
    hi: i64,
    rad: Vec<Vec<BTreeSet<i64>>>,
}

impl RadTable {
    fn new(ring: &SemigroupRing, v: &[Vertex]) -> Self {
        let t = v.iter().map(|x| x.ideal.threshold(ring)).max().unwrap_or(0)
            - v.iter().map(|x| x.ideal.order()).min().unwrap_or(0)
            + ring.conductor();
        let (lo, hi) = (-t, 4 * t);
        let rad = v
            .iter()
            .enumerate()
            .map(|(i, a)| {
                v.iter()
                    .enumerate()
                    .map(|(j, b)| {
                        let c = colon(ring, &b.ideal, &a.ideal);
                        (lo..=hi).filter(|&m| c.contains(ring, m) && (i != j || m != 0)).collect()
                    })
                    .collect()
            })
            .collect();
        RadTable { lo, hi, rad }
    }

    fn rad2(&self, i: usize, j: usize) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for l in 0..self.rad.len() {
            for &a in &self.rad[i][l] {
                for &b in &self.rad[l][j] {
                    if a + b >= self.lo && a + b <= self.hi {
                        out.insert(a + b);
                    }
                }
            }
        }
        out
    }
}

/// Quiver of `End(⊕ I_i)` with monomial arrow labels.
pub fn irreducible_arrows(ring: &SemigroupRing, vertices: Vec<Vertex>) -> Result<QuiverPresentation> {
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[..i] {
            if a.ideal.is_isomorphic(&b.ideal) {
                return Err(Error::Invalid(format!("vertices {} and {} are isomorphic", b.name, a.name)));
            }
        }
    }
    let table = RadTable::new(ring, &vertices);
    let n = vertices.len();
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r2 = table.rad2(i, j);
            // arrows lie well below the window top, where rad² is everything
            let top = table.hi / 2;
            for &m in table.rad[i][j].iter().filter(|&&m| m < top && !r2.contains(&m)) {
                arrows.push(Arrow {
                    source: i,
                    target: j,
                    exponent: m,
                });
            }
        }
    }
    arrows.sort();
    let relations = relation_hints(&arrows);
    Ok(QuiverPresentation {
        ring: ring.clone(),
        vertices,
        arrows,
        relations,
    })
}

/// Groups the paths of length 2 and 3 by endpoints and total exponent.
fn relation_hints(arrows: &[Arrow]) -> Vec<RelationHint> {
    let mut paths: Vec<Vec<usize>> = (0..arrows.len()).map(|a| vec![a]).collect();
    let mut groups: BTreeMap<(usize, usize, i64), Vec<Vec<usize>>> = BTreeMap::new();
    for _ in 0..2 {
        let mut next = Vec::new();
        for p in &paths {
            let end = arrows[*p.last().expect("nonempty")].target;
            for k in (0..arrows.len()).filter(|&k| arrows[k].source == end) {
                let mut q = p.clone();
                q.push(k);
                next.push(q);
            }
        }
        for q in &next {
            let s = arrows[q[0]].source;
            let t = arrows[*q.last().expect("nonempty")].target;
            let e = q.iter().map(|&k| arrows[k].exponent).sum();
            groups.entry((s, t, e)).or_default().push(q.clone());
        }
        paths = next;
    }
    groups
        .into_iter()
        .filter(|(_, ps)| ps.len() > 1)
        .map(|((source, target, exponent), paths)| RelationHint {
            source,
            target,
            exponent,
            paths,
        })
        .collect()
}

impl QuiverPresentation {
    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::Invalid(format!("no vertex named {name}")))
    }

    /// Arrows ending at vertex `i`.
    pub fn into(&self, i: usize) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(move |a| a.target == i)
    }

    pub fn count(&self, i: usize, j: usize) -> usize {
        self.arrows.iter().filter(|a| a.source == i && a.target == j).count()
    }

    fn path_label(&self, p: &[usize]) -> String {
        let mut s = self.vertices[self.arrows[p[0]].source].name.clone();
        for &k in p {
            let a = &self.arrows[k];
            write!(s, " -{}-> {}", a.label(), self.vertices[a.target].name).expect("string");
        }
        s
    }

    /// One line per arrow, `source -> target : label`.
    pub fn adjacency(&self) -> String {
        let mut s = String::new();
        for a in &self.arrows {
            writeln!(s, "{} -> {} : {}", self.vertices[a.source].name, self.vertices[a.target].name, a.label())
                .expect("string");
        }
        s
    }

    pub fn relation_lines(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| {
                let ps: Vec<String> = r.paths.iter().map(|p| self.path_label(p)).collect();
                format!("{} : {}", t_power(r.exponent), ps.join(" = "))
            })
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph quiver {\n");
        for v in &self.vertices {
            writeln!(s, "  \"{}\" [label=\"{} {}\"];", v.name, v.name, v.ideal).expect("string");
        }
        for a in &self.arrows {
            writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.vertices[a.source].name,
                self.vertices[a.target].name,
                a.label()
            )
            .expect("string");
        }
        s.push_str("}\n");
        s
    }
}

/// Vertex name of the ring itself.
pub const RING_VERTEX: &str = "R";

/// The ring `k[[t^n, t^a]]` for `x^a + y^n` and the ideals of `Σ_1` plus
/// the ring.
pub fn standard_vertices(label: Label) -> Result<(SemigroupRing, Vec<Vertex>)> {
    let ring = match label {
        Label::E6 => SemigroupRing::new(3, 4)?,
        Label::E8 => SemigroupRing::new(3, 5)?,
        Label::A(_) => return Err(Error::Invalid("no ideal models for A-type rings".into())),
    };
    let mut v = Vec::new();
    for (name, s) in ideal_models(label) {
        let e: IdealExponents = s.parse()?;
        v.push(Vertex {
            name: name.to_string(),
            ideal: FractionalIdeal::new(&ring, &e.0)?,
        });
    }
    v.push(Vertex {
        name: RING_VERTEX.into(),
        ideal: FractionalIdeal::unit(&ring),
    });
    Ok((ring, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(q: &QuiverPresentation) -> BTreeMap<(String, String), Vec<String>> {
        let mut m: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
        for a in &q.arrows {
            m.entry((q.vertices[a.source].name.clone(), q.vertices[a.target].name.clone()))
                .or_default()
                .push(a.label());
        }
        m
    }

    fn expect(rows: &[(&str, &str, &[&str])]) -> BTreeMap<(String, String), Vec<String>> {
        rows.iter()
            .map(|(s, t, l)| ((s.to_string(), t.to_string()), l.iter().map(|x| x.to_string()).collect()))
            .collect()
    }

    #[test]
    fn e6_quiver() {
        let (r, v) = standard_vertices(Label::E6).unwrap();
        let q = irreducible_arrows(&r, v).unwrap();
        assert_eq!(
            labels(&q),
            expect(&[
                ("N1", "M2", &["t^5"]),
                ("N1", "M1", &["t^4"]),
                ("N1", "R", &["1"]),
                ("R", "M1", &["t^3"]),
                ("M1", "M2", &["t^3"]),
                ("M1", "N1", &["1"]),
                ("M2", "N1", &["t^{-2}"]),
                ("M2", "M1", &["1"]),
                ("M2", "M2", &["t^2"]),
            ])
        );
        let lines = q.relation_lines();
        assert!(lines.contains(&"1 : M2 -1-> M1 -1-> N1 = M2 -t^2-> M2 -t^{-2}-> N1".to_string()), "{lines:?}");
        assert!(lines
            .iter()
            .any(|l| l.contains("N1 -1-> R -t^3-> M1 -1-> N1") && l.contains("N1 -t^5-> M2 -t^{-2}-> N1")));
    }

    #[test]
    fn e8_quiver() {
        let (r, v) = standard_vertices(Label::E8).unwrap();
        let q = irreducible_arrows(&r, v).unwrap();
        assert_eq!(
            labels(&q),
            expect(&[
                ("M2", "M1", &["1"]),
                ("M2", "N2", &["t^{-1}", "1"]),
                ("N2", "M2", &["t^4", "t^5"]),
                ("N2", "N1", &["1"]),
                ("M1", "M2", &["t^3"]),
                ("M1", "N1", &["1"]),
                ("N1", "N2", &["t^3"]),
                ("N1", "M1", &["t^5"]),
                ("N1", "R", &["1"]),
                ("R", "M1", &["t^3"]),
            ])
        );
    }

    #[test]
    fn single_vertex() {
        let r = SemigroupRing::new(3, 4).unwrap();
        let q = irreducible_arrows(
            &r,
            vec![Vertex {
                name: "R".into(),
                ideal: FractionalIdeal::unit(&r),
            }],
        )
        .unwrap();
        // rad/rad² of the ring alone is m/m², spanned by t^3 and t^4
        let loops: Vec<String> = q.arrows.iter().map(Arrow::label).collect();
        assert_eq!(loops, ["t^3", "t^4"]);
    }

    #[test]
    fn exports() {
        let (r, v) = standard_vertices(Label::E6).unwrap();
        let q = irreducible_arrows(&r, v).unwrap();
        assert_eq!(q.adjacency().lines().count(), 9);
        assert!(q.to_dot().contains("\"M2\" -> \"N1\" [label=\"t^{-2}\"];"));
        assert!(serde_json::to_string(&q).unwrap().contains("\"exponent\":-2"));
    }
}
