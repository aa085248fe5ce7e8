//! Monomial curves `k[[t^a, t^b]]`, their monomial fractional ideals, the
//! endomorphism quiver of a sum of ideals and projective resolutions of
//! its simple modules.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod bridge;
mod quiver;
mod resolution;

pub use bridge::{ideal_factorization, kernel_of_map, Bridge, KernelRecord, TPowerMap};
pub use quiver::{irreducible_arrows, standard_vertices, Arrow, QuiverPresentation, RelationHint, Vertex, RING_VERTEX};
pub use resolution::{complete_resolution_check, simple_resolution, CompleteResolution, ResolutionTrace, Step};

/// `k[[t^a, t^b]]` for coprime `a, b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemigroupRing {
    pub a: u32,
    pub b: u32,
    /// Largest gap, `ab - a - b`.
    pub frobenius: i64,
    /// `member[i]` for `0 ≤ i ≤ frobenius`.
    member: Vec<bool>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SemigroupRing {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a < 2 || b < 2 || gcd(a, b) != 1 {
            return Err(Error::Invalid(format!("semigroup generators {a}, {b} must be coprime and at least 2")));
        }
        let frobenius = (a * b) as i64 - a as i64 - b as i64;
        let mut member = vec![false; frobenius.max(0) as usize + 1];
        member[0] = true;
        for i in 1..member.len() {
            member[i] = (i >= a as usize && member[i - a as usize]) || (i >= b as usize && member[i - b as usize]);
        }
        Ok(SemigroupRing { a, b, frobenius, member })
    }

    /// First element of the conductor ideal.
    pub fn conductor(&self) -> i64 {
        self.frobenius + 1
    }

    pub fn contains(&self, n: i64) -> bool {
        if n < 0 {
            false
        } else if n > self.frobenius {
            true
        } else {
            self.member[n as usize]
        }
    }

    pub fn gaps(&self) -> Vec<i64> {
        (0..=self.frobenius).filter(|&n| !self.contains(n)).collect()
    }
}

/// The `R`-submodule of `k((t))` spanned by `t^e`, `e ∈ gens + S`, stored by
/// its minimal generating exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FractionalIdeal {
    gens: Vec<i64>,
}

impl FractionalIdeal {
    /// Ideal generated by `t^e` for `e` in `exps`, reduced to minimal
    /// generators.
    pub fn new(ring: &SemigroupRing, exps: &[i64]) -> Result<Self> {
        if exps.is_empty() {
            return Err(Error::Invalid("fractional ideal needs a generator".into()));
        }
        let set: BTreeSet<i64> = exps.iter().copied().collect();
        let gens = set
            .iter()
            .copied()
            .filter(|&e| !set.iter().any(|&g| g != e && ring.contains(e - g)))
            .collect();
        Ok(FractionalIdeal { gens })
    }

    pub fn unit(ring: &SemigroupRing) -> Self {
        Self::new(ring, &[0]).expect("nonempty")
    }

    pub fn gens(&self) -> &[i64] {
        &self.gens
    }

    pub fn order(&self) -> i64 {
        self.gens[0]
    }

    /// All exponents from here on lie in the ideal.
    pub fn threshold(&self, ring: &SemigroupRing) -> i64 {
        let mut c = *self.gens.last().expect("nonempty") + ring.conductor();
        while c > self.order() && self.contains(ring, c - 1) {
            c -= 1;
        }
        c
    }

    pub fn contains(&self, ring: &SemigroupRing, n: i64) -> bool {
        self.gens.iter().any(|&g| ring.contains(n - g))
    }

    /// Exponents in `[lo, hi]` lying in the ideal.
    pub fn values(&self, ring: &SemigroupRing, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&n| self.contains(ring, n)).collect()
    }

    pub fn shift(&self, c: i64) -> Self {
        FractionalIdeal {
            gens: self.gens.iter().map(|g| g + c).collect(),
        }
    }

    /// Ideals are isomorphic exactly when one is a `t`-power multiple of
    /// the other.
    pub fn is_isomorphic(&self, o: &Self) -> bool {
        self.gens.len() == o.gens.len() && self.shift(o.order() - self.order()) == *o
    }

    pub fn is_subset(&self, ring: &SemigroupRing, o: &Self) -> bool {
        self.gens.iter().all(|&g| o.contains(ring, g))
    }

    /// Minimal number of generators, equal to the rank of a free cover.
    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|&e| t_power(e)).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `1`, `t`, `t^5`, `t^{-2}`.
pub fn t_power(e: i64) -> String {
    match e {
        0 => "1".into(),
        1 => "t".into(),
        e if e < 0 => format!("t^{{{e}}}"),
        e => format!("t^{e}"),
    }
}

/// Reads `1`, `t`, `t^5`, `t^{-2}` or `t^-2`.
pub fn parse_t_power(s: &str) -> Result<i64> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 1,
        msg: format!("expected a power of t, got `{s}`"),
    };
    match s {
        "1" => return Ok(0),
        "t" => return Ok(1),
        _ => {}
    }
    let e = s.strip_prefix("t^").ok_or_else(bad)?;
    let e = e.strip_prefix('{').and_then(|e| e.strip_suffix('}')).unwrap_or(e);
    e.parse().map_err(|_| bad())
}

/// Parsed exponents of `(t^3,t^8)`; a ring is needed to normalize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealExponents(pub Vec<i64>);

impl FromStr for IdealExponents {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(s);
        let exps = inner.split(',').map(parse_t_power).collect::<Result<Vec<_>>>()?;
        Ok(IdealExponents(exps))
    }
}

/// `(J : I) = {m : t^m I ⊆ J}`, which is `Hom_R(I, J)`.
pub fn colon(ring: &SemigroupRing, j: &FractionalIdeal, i: &FractionalIdeal) -> FractionalIdeal {
    let lo = j.order() - i.order();
    let hi = j.threshold(ring) - i.order() + ring.conductor();
    let exps: Vec<i64> = (lo..=hi)
        .filter(|&m| i.gens().iter().all(|&g| j.contains(ring, m + g)))
        .collect();
    FractionalIdeal::new(ring, &exps).expect("colon contains hi")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e6() -> SemigroupRing {
        SemigroupRing::new(3, 4).unwrap()
    }

    fn ideal(r: &SemigroupRing, s: &str) -> FractionalIdeal {
        FractionalIdeal::new(r, &s.parse::<IdealExponents>().unwrap().0).unwrap()
    }

    #[test]
    fn membership_by_generation() {
        for (a, b) in [(3, 4), (3, 5), (2, 7), (5, 7)] {
            let r = SemigroupRing::new(a, b).unwrap();
            for n in -3..(a * b) as i64 + 5 {
                let direct = (0..=n.max(0) / a as i64).any(|i| {
                    let rest = n - i * a as i64;
                    rest >= 0 && rest % b as i64 == 0
                });
                assert_eq!(r.contains(n), direct, "{a},{b}: {n}");
            }
            assert_eq!(r.gaps().len() as i64, (a as i64 - 1) * (b as i64 - 1) / 2);
        }
        assert!(SemigroupRing::new(4, 6).is_err());
    }

    #[test]
    fn normalization() {
        let r = e6();
        let i = FractionalIdeal::new(&r, &[3, 8, 7, 11]).unwrap();
        assert_eq!(i.gens(), &[3, 8]);
        assert_eq!(FractionalIdeal::new(&r, i.gens()).unwrap(), i);
        assert_eq!(i.to_string(), "(t^3,t^8)");
        assert_eq!(ideal(&r, "(t^{-2},t^5)").gens(), &[-2]);
        assert_eq!(ideal(&r, "(t^{-2},t^-1)").gens(), &[-2, -1]);
        assert!(ideal(&r, "(t^3,t^4)").is_isomorphic(&ideal(&r, "(1,t)")));
    }

    #[test]
    fn colon_examples() {
        let r = e6();
        let n1 = ideal(&r, "(t^3,t^4)");
        let m2 = ideal(&r, "(t^6,t^8)");
        assert!(colon(&r, &n1, &m2).contains(&r, -2));
        for s in ["(t^3,t^8)", "(t^3,t^4)", "(t^6,t^8)", "(1)"] {
            let i = ideal(&r, s);
            let e = colon(&r, &i, &i);
            assert!(e.contains(&r, 0));
            assert!(FractionalIdeal::unit(&r).is_subset(&r, &e));
        }
    }

    #[test]
    fn colon_brute_force() {
        for (a, b, ideals) in [
            (3, 4, vec!["(t^3,t^8)", "(t^3,t^4)", "(t^6,t^8)", "(1)"]),
            (3, 5, vec!["(t^3,t^10)", "(t^3,t^5)", "(t^6,t^10)", "(t^5,t^6)", "(1)"]),
        ] {
            let r = SemigroupRing::new(a, b).unwrap();
            let ids: Vec<_> = ideals.iter().map(|s| ideal(&r, s)).collect();
            for i in &ids {
                for j in &ids {
                    let c = colon(&r, j, i);
                    for m in -20..=40 {
                        let brute = (-20..=60).filter(|&v| i.contains(&r, v)).all(|v| j.contains(&r, v + m));
                        assert_eq!(c.contains(&r, m), brute, "({j} : {i}) at {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn colon_monotonicity() {
        let r = SemigroupRing::new(3, 5).unwrap();
        let small = ideal(&r, "(t^6,t^10)");
        let big = ideal(&r, "(t^3,t^5)");
        let j = ideal(&r, "(t^5,t^6)");
        assert!(small.is_subset(&r, &big));
        // antitone in the second argument, monotone in the first
        assert!(colon(&r, &j, &big).is_subset(&r, &colon(&r, &j, &small)));
        assert!(colon(&r, &small, &j).is_subset(&r, &colon(&r, &big, &j)));
    }
}
