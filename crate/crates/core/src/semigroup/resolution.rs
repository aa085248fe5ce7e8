//! Minimal projective resolutions of simple modules over `End(M̃)`, and the
//! 2-periodic complete resolutions spliced from `Σ_1`-approximations.

use std::collections::BTreeMap;

use serde::Serialize;

use super::bridge::{kernel_of_map, Bridge, TPowerMap};
use super::quiver::{QuiverPresentation, RING_VERTEX};
use crate::approx::{right_approximation, sigma_membership};
use crate::catalog::{SingularityCatalog, FREE};
use crate::error::{Error, Result};
use crate::homalg::{is_isomorphic, stable_hom, MapPair};
use crate::mf::{detect_cover, extension_block, MatrixFactorization};
use crate::series::SeriesMatrix;

/// Multiplicities of the indecomposable projectives `P(i)` in one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub index: usize,
    pub projectives: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionTrace {
    pub vertex: String,
    pub steps: Vec<Step>,
    /// Name of `ker d(i)`, whose `Hom(M̃, -)` is the second syzygy.
    pub second_syzygy: String,
    /// First step from which the terms repeat, and the period.
    pub onset: usize,
    pub period: usize,
}

fn vertex_name(catalog_name: &str) -> &str {
    if catalog_name == FREE {
        RING_VERTEX
    } else {
        catalog_name
    }
}

impl ResolutionTrace {
    /// `P(M1)^2 + P(M2)` for one step, in vertex order.
    pub fn term(&self, q: &QuiverPresentation, k: usize) -> String {
        let Some(s) = self.steps.get(k) else { return "0".into() };
        let parts: Vec<String> = q
            .vertices
            .iter()
            .filter_map(|v| {
                s.projectives.get(&v.name).map(|&m| {
                    if m == 1 {
                        format!("P({})", v.name)
                    } else {
                        format!("P({})^{m}", v.name)
                    }
                })
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// `… -> T_2 -> T_1 -> T_0`.
    pub fn display(&self, q: &QuiverPresentation) -> String {
        let mut terms: Vec<String> = (0..self.steps.len()).rev().map(|k| self.term(q, k)).collect();
        terms.insert(0, "...".into());
        format!("{} -> S({})", terms.join(" -> "), self.vertex)
    }
}

fn periodicity(steps: &[Step]) -> (usize, usize) {
    let n = steps.len();
    for onset in 0..n {
        for period in [1, 2] {
            if onset + 2 * period <= n
                && (onset..n - period).all(|i| steps[i].projectives == steps[i + period].projectives)
            {
                return (onset, period);
            }
        }
    }
    (n, 0)
}

/// Minimal projective resolution of the simple module at `vertex`, with at
/// least `steps` terms.
pub fn simple_resolution(
    q: &QuiverPresentation,
    bridge: &Bridge,
    cat: &SingularityCatalog,
    vertex: &str,
    steps: usize,
) -> Result<ResolutionTrace> {
    if steps < 2 {
        return Err(Error::Invalid("a resolution trace needs at least 2 steps".into()));
    }
    let i = q.vertex(vertex)?;
    let total = steps.max(6);
    let mut out = vec![Step {
        index: 0,
        projectives: [(vertex.to_string(), 1)].into_iter().collect(),
    }];
    let into: Vec<_> = q.into(i).collect();
    let mut first = BTreeMap::new();
    for a in &into {
        *first.entry(q.vertices[a.source].name.clone()).or_insert(0) += 1;
    }
    out.push(Step {
        index: 1,
        projectives: first,
    });
    let d = TPowerMap::column(
        into.iter().map(|a| q.vertices[a.source].ideal.clone()).collect(),
        q.vertices[i].ideal.clone(),
        into.iter().map(|a| Some(a.exponent)).collect(),
    );
    let ker = kernel_of_map(bridge, &d, Some(cat))?;
    let second_syzygy = cat.decompose(&ker.mf)?.label();
    let named = cat.named();
    let is_vertex = |n: &str| q.vertices.iter().any(|v| v.name == vertex_name(n));
    let mut current: Vec<MatrixFactorization> = vec![ker.mf];
    for index in 2..total {
        let mut proj: BTreeMap<String, usize> = BTreeMap::new();
        let mut next = Vec::new();
        for m in &current {
            let dec = cat.decompose(m)?;
            if dec.free_rank > 0 {
                *proj.entry(RING_VERTEX.into()).or_insert(0) += dec.free_rank;
            }
            for p in &dec.pieces {
                let name = p.name.clone().ok_or_else(|| Error::Catalog("unmatched summand in a resolution".into()))?;
                if is_vertex(&name) {
                    *proj.entry(vertex_name(&name).to_string()).or_insert(0) += p.multiplicity;
                    continue;
                }
                let w = right_approximation(&p.mf, 1, &named)?;
                for piece in &w.decomposition.pieces {
                    let n = piece.name.clone().ok_or_else(|| Error::Catalog("unmatched approximation summand".into()))?;
                    if !is_vertex(&n) {
                        return Err(Error::TheoremViolation(format!("approximation summand {n} is not in Σ_1")));
                    }
                    *proj.entry(vertex_name(&n).to_string()).or_insert(0) += piece.multiplicity * p.multiplicity;
                }
                if w.decomposition.free_rank > 0 {
                    *proj.entry(RING_VERTEX.into()).or_insert(0) += w.decomposition.free_rank * p.multiplicity;
                }
                for _ in 0..p.multiplicity {
                    next.push(w.kernel.clone());
                }
            }
        }
        out.push(Step {
            index,
            projectives: proj,
        });
        current = next;
    }
    let (onset, period) = periodicity(&out);
    Ok(ResolutionTrace {
        vertex: vertex.to_string(),
        steps: out,
        second_syzygy,
        onset,
        period,
    })
}

/// The spliced sequence `⋯ → E_1 → E_0 → E_1 → E_0 → ⋯` built from
/// `0 → ΩN → E_0 → N → 0` and `0 → N → E_1 → ΩN → 0`.
#[derive(Clone, Debug, Serialize)]
pub struct CompleteResolution {
    pub module: String,
    /// `N` lies in `Σ_1`, so `Hom(M̃, N)` is projective.
    pub degenerate: bool,
    pub terms: Vec<String>,
    pub period: usize,
    /// Consecutive maps compose to zero.
    pub composition_zero: bool,
    /// `Hom(T, -)` is exact on both sequences for every `T` in `Σ_1`:
    /// `y` acts as zero on each `\underline{Hom}(T, N)` and
    /// `\underline{Hom}(T, ΩN)`.
    pub exact: bool,
    /// `dim \underline{Hom}(T, N)` and `dim \underline{Hom}(T, ΩN)` per `T`.
    pub dims: Vec<(String, usize, usize)>,
}

impl CompleteResolution {
    pub fn passed(&self) -> bool {
        self.composition_zero && self.exact
    }
}

fn inclusion(n: &MatrixFactorization) -> MapPair {
    let r = n.ring();
    let s = n.size();
    let m = SeriesMatrix::block(&[vec![SeriesMatrix::identity(r, s)], vec![SeriesMatrix::zeros(r, s, s)]]).expect("shapes");
    MapPair { alpha: m.clone(), beta: m }
}

fn projection(n: &MatrixFactorization) -> MapPair {
    let r = n.ring();
    let s = n.size();
    let m = SeriesMatrix::block(&[vec![SeriesMatrix::zeros(r, s, s), SeriesMatrix::identity(r, s)]]).expect("shapes");
    MapPair { alpha: m.clone(), beta: m }
}

pub fn complete_resolution_check(n: &MatrixFactorization, cat: &SingularityCatalog) -> Result<CompleteResolution> {
    let (n, _) = n.strip_trivial_summands();
    let module = cat.decompose(&n)?.label();
    let named = cat.named();
    if sigma_membership(&n, 1)?.member {
        return Ok(CompleteResolution {
            module: module.clone(),
            degenerate: true,
            terms: vec![module],
            period: 0,
            composition_zero: true,
            exact: true,
            dims: Vec::new(),
        });
    }
    let on = n.syzygy();
    let w0 = right_approximation(&n, 1, &named)?;
    let w1 = right_approximation(&on, 1, &named)?;
    let (e0, e1) = (extension_block(&n, 1)?, extension_block(&on, 1)?);
    // d0 = ι1 π0 : E0 → N → E1, d1 = ι0 π1 : E1 → ΩN → E0
    let (i0, p0) = (inclusion(&n), projection(&n));
    let (i1, p1) = (inclusion(&on), projection(&on));
    let maps_ok = i0.is_morphism(&on, &e0) && p0.is_morphism(&e0, &n) && i1.is_morphism(&n, &e1) && p1.is_morphism(&e1, &on);
    let d0 = i1.compose(&p0)?;
    let d1 = i0.compose(&p1)?;
    let composition_zero = maps_ok && d1.compose(&d0)?.is_zero() && d0.compose(&d1)?.is_zero();
    let (yi, _) = detect_cover(&n.potential).ok_or_else(|| Error::Invalid("not a cover potential".into()))?;
    let mut exact = true;
    let mut dims = Vec::new();
    for e in &cat.entries {
        if e.name == FREE || !sigma_membership(&e.mf, 1)?.member {
            continue;
        }
        let a = stable_hom(&e.mf, &n)?;
        let b = stable_hom(&e.mf, &on)?;
        exact &= a.action_tables()[yi].is_zero() && b.action_tables()[yi].is_zero();
        dims.push((e.name.clone(), a.dim(), b.dim()));
    }
    Ok(CompleteResolution {
        module,
        degenerate: false,
        terms: vec![w0.decomposition.label(), w1.decomposition.label()],
        period: if is_isomorphic(&n, &on)?.is_iso() { 1 } else { 2 },
        composition_zero,
        exact,
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{load_catalog, Label};
    use crate::semigroup::quiver::standard_vertices;
    use crate::semigroup::irreducible_arrows;

    fn e6() -> (SingularityCatalog, Bridge, QuiverPresentation) {
        let cat = load_catalog(Label::E6).unwrap();
        let b = Bridge::new(&cat.potential).unwrap();
        let (r, v) = standard_vertices(Label::E6).unwrap();
        (cat, b, irreducible_arrows(&r, v).unwrap())
    }

    #[test]
    fn e6_simple_n1() {
        let (cat, b, q) = e6();
        let t = simple_resolution(&q, &b, &cat, "N1", 4).unwrap();
        assert_eq!(t.second_syzygy, "B");
        assert_eq!(
            (0..4).rev().map(|k| t.term(&q, k)).collect::<Vec<_>>(),
            ["P(M1)^2 + P(M2)", "P(N1)^2 + P(M2)", "P(M1) + P(M2)", "P(N1)"]
        );
        assert_eq!((t.onset, t.period), (2, 2));
    }

    #[test]
    fn e6_simple_m2() {
        let (cat, b, q) = e6();
        let t = simple_resolution(&q, &b, &cat, "M2", 4).unwrap();
        assert_eq!(t.second_syzygy, "X");
        assert_eq!(
            (0..4).rev().map(|k| t.term(&q, k)).collect::<Vec<_>>(),
            ["P(M1) + P(N1) + P(M2)^2", "P(M1) + P(N1) + P(M2)^2", "P(M1) + P(N1) + P(M2)", "P(M2)"]
        );
        assert_eq!((t.onset, t.period), (2, 1));
    }

    #[test]
    fn e6_simple_ring_vertex() {
        let (cat, b, q) = e6();
        let t = simple_resolution(&q, &b, &cat, "R", 3).unwrap();
        assert!(t.onset <= 2 && t.period <= 2 && t.period >= 1);
    }

    #[test]
    fn complete_resolutions_e6() {
        let cat = load_catalog(Label::E6).unwrap();
        let a = complete_resolution_check(cat.get("A").unwrap(), &cat).unwrap();
        assert!(a.passed() && !a.degenerate);
        assert_eq!(a.terms, ["M1^2 + M2", "M2 + N1^2"]);
        assert_eq!(a.period, 2);
        let x = complete_resolution_check(cat.get("X").unwrap(), &cat).unwrap();
        assert_eq!(x.terms, ["M1 + M2^2 + N1", "M1 + M2^2 + N1"]);
        assert_eq!(x.period, 1);
        assert!(x.passed());
        assert!(complete_resolution_check(cat.get("M1").unwrap(), &cat).unwrap().degenerate);
    }
}
