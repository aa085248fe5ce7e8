//! One line per acceptance criterion. Runs as a plain binary so the lines
//! are always printed; exits nonzero when a criterion outside
//! `KNOWN_CONFLICTS` fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mfact::approx::{
    bph_bounds, equivalence, left_approximation, right_approximation, sigma_factorization_witness, sigma_membership,
    takahashi_check, verify_knorrer_hp, BrieskornPhamSpec,
};
use mfact::catalog::{base_cover, load_catalog, load_catalog_with, match_entry, Label, SingularityCatalog, FREE};
use mfact::error::Result;
use mfact::field::Field;
use mfact::homalg::{decompose, is_isomorphic, smith_over_dvr, syzygy_module, Syzygy};
use mfact::mf::{
    branched_cover, extension_block, quotient_presentation, tensor_hat, BranchedCoverSpec, MatrixFactorization,
};
use mfact::semigroup::{irreducible_arrows, simple_resolution, standard_vertices, Bridge, QuiverPresentation};
use mfact::series::{Ring, SeriesMatrix};

/// Criteria that fail because the displayed data and the computation
/// disagree; see the README.
const KNOWN_CONFLICTS: &[u32] = &[3];

type Verdict = Result<(bool, String)>;

fn named_check(checks: &mut Vec<(String, bool)>, name: impl Into<String>, ok: bool) {
    checks.push((name.into(), ok));
}

fn summarize(checks: Vec<(String, bool)>) -> (bool, String) {
    let total = checks.len();
    let bad: Vec<String> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.clone()).collect();
    if bad.is_empty() {
        (true, format!("{total}/{total} checks"))
    } else {
        (false, format!("{}/{total} checks; failing: {}", total - bad.len(), bad.join("; ")))
    }
}

fn name(x: &MatrixFactorization, cat: &SingularityCatalog) -> Result<String> {
    Ok(match_entry(x, cat)?.unwrap_or_else(|| "?".into()))
}

fn syzygies(cat: &SingularityCatalog, expect: &[(u32, &str)], checks: &mut Vec<(String, bool)>) -> Result<()> {
    for &(e, n) in expect {
        let got = name(&base_cover(&cat.potential, e)?, cat)?;
        named_check(checks, format!("Ω(R/(x^{e})) = {got}, want {n}"), got == n);
    }
    Ok(())
}

fn sequences(
    cat: &SingularityCatalog,
    expect: &[(&str, bool, &str)],
    checks: &mut Vec<(String, bool)>,
) -> Result<()> {
    let named = cat.named();
    for &(m, right, want) in expect {
        let w = if right {
            right_approximation(cat.get(m)?, 1, &named)?
        } else {
            left_approximation(cat.get(m)?, 1, &named)?
        };
        let got = w.sequence(Some(cat))?;
        let side = if right { "right" } else { "left" };
        let ok = got == want;
        let label = if ok { format!("{side} {m}") } else { format!("{side} {m}: got {got}") };
        named_check(checks, label, ok);
    }
    Ok(())
}

fn c1_e6_syzygies() -> Verdict {
    let cat = load_catalog(Label::E6)?;
    let mut c = Vec::new();
    syzygies(&cat, &[(1, "N1"), (3, "M1"), (2, "M2")], &mut c)?;
    Ok(summarize(c))
}

fn c2_e6_triple() -> Verdict {
    let cat = load_catalog(Label::E6)?;
    let first = "0 -> B -> M1^2 + M2 -> A -> 0";
    let second = "0 -> A -> M2 + N1^2 -> B -> 0";
    let third = "0 -> X -> M1 + M2^2 + N1 -> X -> 0";
    let mut c = Vec::new();
    sequences(
        &cat,
        &[
            ("A", true, first),
            ("B", true, second),
            ("X", true, third),
            ("A", false, second),
            ("B", false, first),
            ("X", false, third),
        ],
        &mut c,
    )?;
    Ok(summarize(c))
}

fn c3_e8() -> Verdict {
    let cat = load_catalog(Label::E8)?;
    let mut c = Vec::new();
    syzygies(&cat, &[(1, "N1"), (2, "N2"), (3, "M2"), (4, "M1")], &mut c)?;
    sequences(
        &cat,
        &[
            ("A1", true, "0 -> B1 -> M1^2 + N2 -> A1 -> 0"),
            ("A2", true, "0 -> B2 -> M1 + M2^2 -> A2 -> 0"),
            ("C1", true, "0 -> D1 -> M1 + M2 + N1 + N2 -> C1 -> 0"),
            ("C2", true, "0 -> D2 -> M1 + M2 + N1 + N2 -> C2 -> 0"),
            ("X1", true, "0 -> Y1 -> M1 + M2^2 + N1 + N2^2 -> X1 -> 0"),
            ("X2", true, "0 -> Y2 -> M1^2 + M2 + N2^2 -> X2 -> 0"),
        ],
        &mut c,
    )?;
    Ok(summarize(c))
}

fn a_type_cover(a: u32, e: u32) -> Result<MatrixFactorization> {
    let r = Ring::new(&["x"], Field::default(), 30)?;
    let x = MatrixFactorization::new(
        r.var_pow(0, a),
        SeriesMatrix::scalar(&r, 1, &r.var_pow(0, e)),
        SeriesMatrix::scalar(&r, 1, &r.var_pow(0, a - e)),
    )?;
    branched_cover(&x, &BranchedCoverSpec::new(2, "y")?)
}

fn c4_herzog_popescu() -> Verdict {
    let mut c = Vec::new();
    for l in [Label::E6, Label::E8] {
        let cat = load_catalog(l)?;
        for e in &cat.entries {
            let ok = verify_knorrer_hp(&e.mf).is_ok();
            named_check(&mut c, format!("{l} {}", e.name), ok);
        }
    }
    for a in 3..=5 {
        for e in 1..a {
            let n = a_type_cover(a, e)?;
            named_check(&mut c, format!("cover of R/x^{e} over x^{a}"), verify_knorrer_hp(&n).is_ok());
        }
    }
    Ok(summarize(c))
}

fn c5_equivalences() -> Verdict {
    let mut c = Vec::new();
    for l in [Label::E6, Label::E8] {
        let cat = load_catalog(l)?;
        for e in &cat.entries {
            for k in 1..3 {
                let v = equivalence(&e.mf, k)?;
                named_check(&mut c, format!("{l} {} k={k}", e.name), v.coherent());
            }
        }
    }
    Ok(summarize(c))
}

fn c6_sigma1() -> Verdict {
    let mut c = Vec::new();
    for (l, want) in [
        (Label::E6, vec!["M1", "N1", "M2", FREE]),
        (Label::E8, vec!["M1", "N1", "M2", "N2", FREE]),
    ] {
        let cat = load_catalog(l)?;
        let mut got = Vec::new();
        for e in &cat.entries {
            if sigma_membership(&e.mf, 1)?.member {
                got.push(e.name.as_str());
            }
        }
        let mut w = want.clone();
        w.sort();
        got.sort();
        named_check(&mut c, format!("{l}: {}", got.join(", ")), got == w);
    }
    Ok(summarize(c))
}

fn c7_cross_oracle() -> Verdict {
    let cat = load_catalog(Label::E6)?;
    let mut c = Vec::new();
    for e in cat.entries.iter().filter(|e| e.name != FREE) {
        for k in 1..=2 {
            let (ext, _) = extension_block(&e.mf, k)?.strip_trivial_summands();
            let ok = match syzygy_module(&quotient_presentation(&e.mf, k)?)? {
                Syzygy::Mcm(s) => is_isomorphic(&ext, &s.strip_trivial_summands().0)?.is_iso(),
                Syzygy::Module(_) => false,
            };
            named_check(&mut c, format!("{} k={k}", e.name), ok);
        }
    }
    Ok(summarize(c))
}

fn arrow_multiset(q: &QuiverPresentation) -> BTreeMap<(String, String), Vec<String>> {
    let mut m: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for a in &q.arrows {
        m.entry((q.vertices[a.source].name.clone(), q.vertices[a.target].name.clone()))
            .or_default()
            .push(a.label());
    }
    for v in m.values_mut() {
        v.sort();
    }
    m
}

fn expected_arrows(rows: &[(&str, &str, &[&str])]) -> BTreeMap<(String, String), Vec<String>> {
    rows.iter()
        .map(|(s, t, l)| {
            let mut l: Vec<String> = l.iter().map(|x| x.to_string()).collect();
            l.sort();
            ((s.to_string(), t.to_string()), l)
        })
        .collect()
}

fn c8_quivers() -> Verdict {
    let mut c = Vec::new();
    let (r, v) = standard_vertices(Label::E6)?;
    let q = irreducible_arrows(&r, v)?;
    let e6 = expected_arrows(&[
        ("R", "M1", &["t^3"]),
        ("M1", "N1", &["1"]),
        ("N1", "M1", &["t^4"]),
        ("N1", "M2", &["t^5"]),
        ("M1", "M2", &["t^3"]),
        ("N1", "R", &["1"]),
        ("M2", "N1", &["t^{-2}"]),
        ("M2", "M2", &["t^2"]),
        ("M2", "M1", &["1"]),
    ]);
    named_check(&mut c, format!("E6 {} arrows", q.arrows.len()), arrow_multiset(&q) == e6);
    let (r, v) = standard_vertices(Label::E8)?;
    let q = irreducible_arrows(&r, v)?;
    let e8 = expected_arrows(&[
        ("M2", "M1", &["1"]),
        ("M2", "N2", &["1", "t^{-1}"]),
        ("N2", "M2", &["t^4", "t^5"]),
        ("N2", "N1", &["1"]),
        ("M1", "M2", &["t^3"]),
        ("M1", "N1", &["1"]),
        ("N1", "N2", &["t^3"]),
        ("N1", "M1", &["t^5"]),
        ("N1", "R", &["1"]),
        ("R", "M1", &["t^3"]),
    ]);
    named_check(&mut c, format!("E8 {} arrows", q.arrows.len()), arrow_multiset(&q) == e8);
    Ok(summarize(c))
}

fn c9_resolutions() -> Verdict {
    let mut c = Vec::new();
    for l in [Label::E6, Label::E8] {
        let cat = load_catalog(l)?;
        let (r, v) = standard_vertices(l)?;
        let q = irreducible_arrows(&r, v)?;
        let b = Bridge::new(&cat.potential)?;
        if l == Label::E6 {
            for (vx, want) in [
                ("N1", ["P(N1)", "P(M1) + P(M2)", "P(N1)^2 + P(M2)", "P(M1)^2 + P(M2)"]),
                (
                    "M2",
                    [
                        "P(M2)",
                        "P(M1) + P(N1) + P(M2)",
                        "P(M1) + P(N1) + P(M2)^2",
                        "P(M1) + P(N1) + P(M2)^2",
                    ],
                ),
            ] {
                let t = simple_resolution(&q, &b, &cat, vx, 4)?;
                let got: Vec<String> = (0..4).map(|k| t.term(&q, k)).collect();
                named_check(&mut c, format!("S({vx}) display"), got == want);
            }
        }
        for v in &q.vertices {
            let t = simple_resolution(&q, &b, &cat, &v.name, 8)?;
            let ok = matches!(t.period, 1 | 2) && t.onset <= 2;
            named_check(&mut c, format!("{l} S({}) period {} from {}", v.name, t.period, t.onset), ok);
        }
    }
    Ok(summarize(c))
}

fn c10_witness() -> Verdict {
    let cat = load_catalog(Label::E8)?;
    let w = sigma_factorization_witness(cat.get("B2")?, 1, 2, &cat.named())?;
    let seq = w.sequence();
    let ok = seq == "0 -> N1 + N2^2 -> A2 + B2 + R^3 -> N1 + N2^2 -> 0" && w.free_rank == 3 && w.certified();
    Ok((ok, format!("{seq}, free rank {}", w.free_rank)))
}

fn c11_takahashi() -> Verdict {
    let r = Ring::new(&["x"], Field::default(), 30)?;
    let x = MatrixFactorization::from_strs(&r.parse("x^2")?, &[&["x"]], &[&["x"]])?;
    let v = takahashi_check(&x, &[2, 2])?;
    Ok((v.pass, format!("cover size {}, Ω^2 size {}, free rank {}", v.size, v.syzygy_size, v.free_rank)))
}

fn c12_bounds() -> Verdict {
    let mut c = Vec::new();
    for (e, want) in [(vec![4, 3], (4, 7, 1)), (vec![5, 3], (5, 9, 1)), (vec![2, 2, 2], (1, 1, 0))] {
        let b = bph_bounds(&BrieskornPhamSpec::new(e.clone())?);
        named_check(&mut c, format!("{e:?}"), (b.loewy, b.bfk, b.paper) == want);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut sweep = true;
    for _ in 0..100 {
        let len = rng.gen_range(1..=6);
        let e: Vec<u32> = (0..len).map(|_| rng.gen_range(2..=15)).collect();
        let b = bph_bounds(&BrieskornPhamSpec::new(e)?);
        sweep &= b.paper <= b.bfk;
    }
    named_check(&mut c, "sweep of 100", sweep);
    Ok(summarize(c))
}

fn mf_identity(c: &mut Vec<(String, bool)>) -> Result<()> {
    let mut all = Vec::new();
    for l in [Label::E6, Label::E8, Label::A(2), Label::A(4)] {
        let cat = load_catalog(l)?;
        for e in &cat.entries {
            all.push(e.mf.clone());
            all.push(e.mf.syzygy());
            if l == Label::E6 || l == Label::E8 {
                all.push(extension_block(&e.mf, 1)?);
                all.push(extension_block(&e.mf, 2)?);
            }
        }
    }
    for a in 3..=5 {
        for e in 1..a {
            all.push(a_type_cover(a, e)?);
        }
    }
    let r = Ring::new(&["x"], Field::Rational, 20)?;
    let s = Ring::new(&["z"], Field::Rational, 20)?;
    let x = MatrixFactorization::from_strs(&r.parse("x^3")?, &[&["x"]], &[&["x^2"]])?;
    let z = MatrixFactorization::from_strs(&s.parse("z^2")?, &[&["z"]], &[&["z"]])?;
    all.push(tensor_hat(&x, &z)?);
    let bad = all.iter().filter(|m| !m.validate().valid).count();
    named_check(c, format!("identity on {} factorizations", all.len()), bad == 0);
    Ok(())
}

fn random_sums(c: &mut Vec<(String, bool)>) -> Result<()> {
    let cat = load_catalog(Label::E6)?;
    let named = cat.named();
    let names: Vec<&str> = cat.entries.iter().map(|e| e.name.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut ok = 0;
    for _ in 0..50 {
        let picks: Vec<&str> = (0..rng.gen_range(1..=2)).map(|_| *names.choose(&mut rng).expect("nonempty")).collect();
        let parts: Vec<&MatrixFactorization> = picks.iter().map(|n| cat.get(n)).collect::<Result<_>>()?;
        let sum = MatrixFactorization::direct_sum_all(&cat.potential, parts)?;
        let d = decompose(&sum, &named)?;
        let mut want: BTreeMap<&str, usize> = BTreeMap::new();
        for p in &picks {
            *want.entry(p).or_insert(0) += 1;
        }
        let multiset = want.iter().all(|(n, &k)| if *n == FREE { d.free_rank == k } else { d.count(n) == k })
            && d.is_named();
        let back = is_isomorphic(&d.reassemble(&cat.potential)?, &sum)?.is_iso();
        if multiset && back {
            ok += 1;
        }
    }
    named_check(c, format!("{ok}/50 direct sums decompose and recompose"), ok == 50);
    Ok(())
}

fn smith_conjugations(c: &mut Vec<(String, bool)>) -> Result<()> {
    let r = Ring::new(&["t"], Field::default(), 30)?;
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut ok = 0;
    let mut tried = 0;
    while tried < 50 {
        let n = rng.gen_range(2..=4);
        let mut exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..6)).collect();
        exps.sort();
        let mut d = SeriesMatrix::zeros(&r, n, n);
        for (i, &e) in exps.iter().enumerate() {
            d.set(i, i, r.var_pow(0, e));
        }
        let mut unit = || {
            let mut m = SeriesMatrix::zeros(&r, n, n);
            for i in 0..n {
                for j in 0..n {
                    let c0 = rng.gen_range(0..1000);
                    let s = r.parse(&format!("{c0}+{}*t+{}*t^3", rng.gen_range(0..50), rng.gen_range(0..50)));
                    m.set(i, j, s.expect("parses"));
                }
            }
            m
        };
        let (p, q) = (unit(), unit());
        if p.constant_part().inverse().is_none() || q.constant_part().inverse().is_none() {
            continue;
        }
        tried += 1;
        let got = smith_over_dvr(&p.mul(&d)?.mul(&q)?)?;
        // unit diagonal entries carry exponent 0 and are dropped
        let want: Vec<u32> = exps.iter().copied().filter(|&e| e > 0).collect();
        let got: Vec<u32> = got.into_iter().filter(|&e| e > 0).collect();
        if got == want {
            ok += 1;
        }
    }
    named_check(c, format!("{ok}/50 Smith forms invariant"), ok == 50);
    Ok(())
}

fn precision_coherence(c: &mut Vec<(String, bool)>) -> Result<()> {
    let mut seen = Vec::new();
    for (field, prec) in [
        (Field::default(), 20),
        (Field::default(), 30),
        (Field::default(), 40),
        (Field::Prime(101), 30),
        (Field::Rational, 30),
    ] {
        let cat = load_catalog_with(Label::E6, field, prec)?;
        let named = cat.named();
        let mut facts = Vec::new();
        for m in ["A", "B", "X"] {
            facts.push(right_approximation(cat.get(m)?, 1, &named)?.sequence(Some(&cat))?);
        }
        for e in &cat.entries {
            facts.push(format!("{}:{}", e.name, sigma_membership(&e.mf, 1)?.member));
        }
        seen.push((format!("{field}@{prec}"), facts));
    }
    let same = seen.windows(2).all(|w| w[0].1 == w[1].1);
    let tags: Vec<&str> = seen.iter().map(|(t, _)| t.as_str()).collect();
    named_check(c, format!("E6 facts agree over {}", tags.join(", ")), same);
    Ok(())
}

fn c13_properties() -> Verdict {
    let mut c = Vec::new();
    mf_identity(&mut c)?;
    random_sums(&mut c)?;
    smith_conjugations(&mut c)?;
    precision_coherence(&mut c)?;
    Ok(summarize(c))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Verdict); 13] = [
        (1, "E6 syzygy identifications", c1_e6_syzygies),
        (2, "E6 approximation triple", c2_e6_triple),
        (3, "E8 syzygies and approximation sequences", c3_e8),
        (4, "Herzog-Popescu splitting", c4_herzog_popescu),
        (5, "equivalent Σ_k verdicts", c5_equivalences),
        (6, "Σ_1 membership", c6_sigma1),
        (7, "extension block vs syzygy of quotient", c7_cross_oracle),
        (8, "quivers", c8_quivers),
        (9, "resolutions and periodicity", c9_resolutions),
        (10, "Σ-factorization witness", c10_witness),
        (11, "iterated cover splitting", c11_takahashi),
        (12, "dimension bounds", c12_bounds),
        (13, "property suites", c13_properties),
    ];
    let mut unexpected = Vec::new();
    for (n, title, f) in criteria {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        let tag = if ok { "PASS" } else { "FAIL" };
        let note = if !ok && KNOWN_CONFLICTS.contains(&n) { " (known conflict)" } else { "" };
        println!("criterion {n:>2} [{tag}] {title}: {detail}{note} ({secs:.1}s)");
        if !ok && !KNOWN_CONFLICTS.contains(&n) {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
