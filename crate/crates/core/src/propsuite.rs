//! Regression battery of small-category facts about the quantization
//! fragments: equivalences, non-equivalences, a composition-table closure
//! check, and a limit-uniqueness counterexample.
//!
//! Each fixture builds finite categories from declarative data (or from the
//! fragment builders in [`crate::nctorus`], [`crate::prequant`], and
//! [`crate::envelope`]), runs the exhaustive decision procedures in
//! [`crate::fincat`], and compares the verdict against the expected one:
//!
//! * `equiv-collapse` — a three-object category with an isomorphic pair
//!   collapses onto a two-object one (equivalent).
//! * `equiv-no-iso` — the same shape without the isomorphism does not
//!   (not equivalent: no isomorphisms are available for the unit/counit).
//! * `table-closure` — adjoining g⁻¹ to the triangle closes into a valid
//!   seven-morphism category whose full composition table is verified
//!   cell by cell, including the non-identity idempotent it creates.
//! * `mr-dq-pointwise` / `mr-dq-chains` — one matrix level (resp. a matched
//!   chain of levels) of the matrix-regularization fragment is equivalent —
//!   indeed isomorphic — to one deformation level (resp. a matched chain)
//!   of the deformation fragment.
//! * `mr-pq` / `dq-pq` — with the classical-direction inverse adjoined,
//!   each three-object fragment is equivalent to the multiplication/
//!   endomorphism fragment built by [`crate::prequant::build_pq_fragment`].
//! * `pq-three-object` — a chain with ≥ 3 pairwise non-isomorphic
//!   non-algebra objects cannot be equivalent to that fragment.
//! * `env-dq` / `env-pq-mr` — the envelope fragment carries two distinct
//!   parallel quantization maps into its operator object, while every
//!   hom-set of the other fragments is a singleton; no equivalence exists.
//! * `mediating-nonunique` — adjoining an inverse of the deformed-level
//!   quantization creates a non-identity idempotent on the classical level;
//!   the classical cone then has two mediating endomorphisms and loses the
//!   limit property, and the surviving deformed apex fails the
//!   multiplicativity condition at ħ ≠ 0 under the torus realization.
//!
//! Fixtures are independent and run in parallel; the report order is the
//! listing order.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::envelope;
use crate::fincat::{self, CatBuilder, ConeFailure, EquivalenceOutcome, FinCategory};
use crate::nctorus::{self, TorusFunction, TorusQuantization};
use crate::prequant::{build_pq_fragment, Prequantizer};
use crate::qcat::{self, MapDecl, PreQShape};
use crate::{Error, Result};

/// Static description of one fixture.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureInfo {
    /// Stable fixture id (also the `run_fixture` key).
    pub id: &'static str,
    /// One-line description of what is built and decided.
    pub description: &'static str,
    /// The expected verdict string.
    pub expected: &'static str,
}

/// Outcome of one fixture run.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureResult {
    /// Fixture id.
    pub id: String,
    /// Human-readable description (copied from the listing).
    pub description: String,
    /// Expected verdict.
    pub expected: String,
    /// Verdict actually computed.
    pub got: String,
    /// True iff `got == expected`.
    pub pass: bool,
    /// Witness summaries / obstruction certificates, in decision order.
    pub details: Vec<String>,
}

/// All fixture ids with descriptions and expected verdicts, in report order.
pub fn list_fixtures() -> Vec<FixtureInfo> {
    vec![
        FixtureInfo {
            id: "equiv-collapse",
            description: "three objects with an isomorphic pair vs its two-object collapse",
            expected: "equivalent",
        },
        FixtureInfo {
            id: "equiv-no-iso",
            description: "the same triangle without the isomorphism vs the collapse",
            expected: "not-equivalent",
        },
        FixtureInfo {
            id: "table-closure",
            description: "triangle with g invertible closes into a 7-morphism category; full table check",
            expected: "valid-table",
        },
        FixtureInfo {
            id: "mr-dq-pointwise",
            description: "one matrix level vs one deformation level (no non-identity isomorphisms)",
            expected: "equivalent",
        },
        FixtureInfo {
            id: "mr-dq-chains",
            description: "matched 4-level chains of matrix and deformation fragments",
            expected: "equivalent",
        },
        FixtureInfo {
            id: "mr-pq",
            description: "matrix fragment with classical inverse vs multiplication/endomorphism fragment",
            expected: "equivalent",
        },
        FixtureInfo {
            id: "dq-pq",
            description: "deformation fragment with classical inverse vs multiplication/endomorphism fragment",
            expected: "equivalent",
        },
        FixtureInfo {
            id: "pq-three-object",
            description: "chains with ≥ 3 non-isomorphic levels vs the 3-object fragment",
            expected: "not-equivalent",
        },
        FixtureInfo {
            id: "env-dq",
            description: "envelope fragment (two parallel quantizations) vs a deformation level",
            expected: "not-equivalent",
        },
        FixtureInfo {
            id: "env-pq-mr",
            description: "envelope fragment vs the prequantization and matrix fragments",
            expected: "not-equivalent",
        },
        FixtureInfo {
            id: "mediating-nonunique",
            description: "inverse at ħ ≠ 0 breaks mediating uniqueness at the classical level",
            expected: "not-a-quantization-category",
        },
    ]
}

/// Run every fixture (in parallel) and return results in listing order.
pub fn run_all() -> Result<Vec<FixtureResult>> {
    list_fixtures()
        .par_iter()
        .map(|f| run_fixture(f.id))
        .collect()
}

/// Run a single fixture by id.
pub fn run_fixture(id: &str) -> Result<FixtureResult> {
    let info = list_fixtures()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::Domain(format!("unknown fixture id '{id}'")))?;
    let (got, details) = match id {
        "equiv-collapse" => fixture_equiv_collapse()?,
        "equiv-no-iso" => fixture_equiv_no_iso()?,
        "table-closure" => fixture_table_closure()?,
        "mr-dq-pointwise" => fixture_mr_dq_pointwise()?,
        "mr-dq-chains" => fixture_mr_dq_chains()?,
        "mr-pq" => fixture_mr_pq()?,
        "dq-pq" => fixture_dq_pq()?,
        "pq-three-object" => fixture_pq_three_object()?,
        "env-dq" => fixture_env_dq()?,
        "env-pq-mr" => fixture_env_pq_mr()?,
        "mediating-nonunique" => fixture_mediating_nonunique()?,
        _ => unreachable!("listed fixture without an implementation"),
    };
    Ok(FixtureResult {
        id: info.id.to_string(),
        description: info.description.to_string(),
        expected: info.expected.to_string(),
        pass: got == info.expected,
        got,
        details,
    })
}

// ---------------------------------------------------------------------------
// Shape builders shared by the fixtures (and reusable from integration tests).
// ---------------------------------------------------------------------------

/// A chain-shaped fragment: one algebra object and `levels` realization
/// objects sorted by ascending χ (the first level is the classical one and
/// must have ħ = 0). Quantization maps `t-<level>` go out of the algebra;
/// connectors `p-<from>-<to>` go from smaller χ to larger χ, and every
/// composable pair is closed (`p ∘ t = t`, `p ∘ p = p`). With `with_inverse`
/// the classical quantization gets a declared inverse.
fn chain_shape(algebra: &str, levels: &[(String, f64)], with_inverse: bool) -> PreQShape {
    let quant = |name: &str| format!("t-{name}");
    let conn = |from: &str, to: &str| format!("p-{from}-{to}");

    let objects: Vec<String> = levels.iter().map(|(n, _)| n.clone()).collect();
    let mut maps = Vec::new();
    for (name, h) in levels {
        maps.push(MapDecl {
            label: quant(name),
            dom: algebra.to_string(),
            cod: name.clone(),
            hbar: Some(Complex64::new(*h, 0.0)),
        });
    }
    for i in 0..levels.len() {
        for j in (i + 1)..levels.len() {
            maps.push(MapDecl {
                label: conn(&levels[i].0, &levels[j].0),
                dom: levels[i].0.clone(),
                cod: levels[j].0.clone(),
                hbar: None,
            });
        }
    }
    let mut compositions = Vec::new();
    for i in 0..levels.len() {
        for j in (i + 1)..levels.len() {
            compositions.push((
                conn(&levels[i].0, &levels[j].0),
                quant(&levels[i].0),
                quant(&levels[j].0),
            ));
            for k in (j + 1)..levels.len() {
                compositions.push((
                    conn(&levels[j].0, &levels[k].0),
                    conn(&levels[i].0, &levels[j].0),
                    conn(&levels[i].0, &levels[k].0),
                ));
            }
        }
    }
    let mut inverses = Vec::new();
    if with_inverse {
        let classical = &levels[0].0;
        let t0 = quant(classical);
        let t0_inv = format!("{t0}-inv");
        maps.push(MapDecl {
            label: t0_inv.clone(),
            dom: classical.clone(),
            cod: algebra.to_string(),
            hbar: None,
        });
        compositions.push((t0_inv.clone(), t0.clone(), format!("id_{algebra}")));
        compositions.push((t0.clone(), t0_inv.clone(), format!("id_{classical}")));
        for (name, _) in levels.iter().skip(1) {
            compositions.push((quant(name), t0_inv.clone(), conn(classical, name)));
        }
        inverses.push((t0, t0_inv));
    }
    PreQShape {
        algebra: algebra.to_string(),
        objects,
        maps,
        compositions,
        inverses,
    }
}

/// Matrix-regularization fragment restricted to one matrix size: objects
/// {algebra, limit level `mat-inf` (ħ = 0), `mat-<n>` (ħ = 2/n)}.
pub fn mr_restricted_shape(n: u32, with_inverse: bool) -> PreQShape {
    chain_shape(
        "sphere-polys",
        &[
            ("mat-inf".to_string(), 0.0),
            (format!("mat-{n}"), 2.0 / f64::from(n)),
        ],
        with_inverse,
    )
}

/// Deformation fragment restricted to one level: objects {algebra,
/// `classical-level` (ħ = 0), `level-q<q>` (ħ = 2π/q)}.
pub fn dq_restricted_shape(q: usize, with_inverse: bool) -> PreQShape {
    chain_shape(
        "trig-polys",
        &[
            ("classical-level".to_string(), 0.0),
            (format!("level-q{q}"), nctorus::hbar(q)),
        ],
        with_inverse,
    )
}

/// Matrix-regularization chain over the given matrix sizes plus the limit
/// level, e.g. `[2, 4, 8]` → mat-inf, mat-8, mat-4, mat-2 by ascending χ.
pub fn mr_chain_shape(sizes: &[u32]) -> PreQShape {
    let mut levels = vec![("mat-inf".to_string(), 0.0)];
    let mut sorted: Vec<u32> = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    for n in sorted {
        levels.push((format!("mat-{n}"), 2.0 / f64::from(n)));
    }
    chain_shape("sphere-polys", &levels, false)
}

/// Deformation chain over the given torus levels plus the classical level,
/// e.g. `[3, 4, 6]` → classical, level-q6, level-q4, level-q3 by ascending χ.
pub fn dq_chain_shape(qs: &[usize]) -> PreQShape {
    let mut levels = vec![("classical-level".to_string(), 0.0)];
    let mut sorted: Vec<usize> = qs.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    for q in sorted {
        levels.push((format!("level-q{q}"), nctorus::hbar(q)));
    }
    chain_shape("trig-polys", &levels, false)
}

/// The deformation fragment with an inverse of the *deformed* quantization
/// adjoined. Closing the composition table forces three extra morphisms —
/// `collapse = q-zero ∘ q-h-inv`, `restore = q-h-inv ∘ deform`, and the
/// non-identity idempotent `idem = collapse ∘ deform` on the classical
/// level — for ten morphisms total.
pub fn mediating_shape(q: usize) -> PreQShape {
    let algebra = "trig-polys";
    let classical = "classical-level";
    let deformed = "deformed-level";
    let maps = vec![
        MapDecl {
            label: "q-zero".into(),
            dom: algebra.into(),
            cod: classical.into(),
            hbar: Some(Complex64::new(0.0, 0.0)),
        },
        MapDecl {
            label: "q-h".into(),
            dom: algebra.into(),
            cod: deformed.into(),
            hbar: Some(Complex64::new(nctorus::hbar(q), 0.0)),
        },
        MapDecl {
            label: "deform".into(),
            dom: classical.into(),
            cod: deformed.into(),
            hbar: None,
        },
        MapDecl {
            label: "q-h-inv".into(),
            dom: deformed.into(),
            cod: algebra.into(),
            hbar: None,
        },
        MapDecl {
            label: "collapse".into(),
            dom: deformed.into(),
            cod: classical.into(),
            hbar: None,
        },
        MapDecl {
            label: "restore".into(),
            dom: classical.into(),
            cod: algebra.into(),
            hbar: None,
        },
        MapDecl {
            label: "idem".into(),
            dom: classical.into(),
            cod: classical.into(),
            hbar: None,
        },
    ];
    let compositions = [
        ("deform", "q-zero", "q-h"),
        ("restore", "q-zero", "id_trig-polys"),
        ("idem", "q-zero", "q-zero"),
        ("q-h-inv", "q-h", "id_trig-polys"),
        ("collapse", "q-h", "q-zero"),
        ("q-h-inv", "deform", "restore"),
        ("collapse", "deform", "idem"),
        ("q-zero", "q-h-inv", "collapse"),
        ("q-h", "q-h-inv", "id_deformed-level"),
        ("deform", "collapse", "id_deformed-level"),
        ("restore", "collapse", "q-h-inv"),
        ("idem", "collapse", "collapse"),
        ("q-zero", "restore", "idem"),
        ("q-h", "restore", "deform"),
        ("deform", "idem", "deform"),
        ("restore", "idem", "restore"),
        ("idem", "idem", "idem"),
    ]
    .iter()
    .map(|(g, f, h)| (g.to_string(), f.to_string(), h.to_string()))
    .collect();
    PreQShape {
        algebra: algebra.into(),
        objects: vec![classical.into(), deformed.into()],
        maps,
        compositions,
        inverses: vec![("q-h".into(), "q-h-inv".into())],
    }
}

// ---------------------------------------------------------------------------
// Equivalence helpers.
// ---------------------------------------------------------------------------

fn object_maps_bijective(
    witness: &fincat::EquivalenceWitness,
    a: &FinCategory,
    b: &FinCategory,
) -> bool {
    let distinct = |m: &std::collections::BTreeMap<String, String>| {
        let mut vals: Vec<&String> = m.values().collect();
        vals.sort();
        vals.dedup();
        vals.len() == m.len()
    };
    witness.forward.object_map.len() == a.objects().len()
        && witness.backward.object_map.len() == b.objects().len()
        && a.objects().len() == b.objects().len()
        && distinct(&witness.forward.object_map)
        && distinct(&witness.backward.object_map)
}

/// Decide equivalence; return the verdict string ("equivalent" /
/// "not-equivalent"), whether the witness is an isomorphism on objects,
/// and detail lines.
fn equivalence_verdict(
    label: &str,
    a: &FinCategory,
    b: &FinCategory,
) -> Result<(String, bool, Vec<String>)> {
    let outcome = fincat::decide_equivalence(a, b)?;
    match outcome {
        EquivalenceOutcome::Equivalent { witness, stats } => {
            // Independently re-check both witness functors.
            let fwd = fincat::check_functor(a, b, &witness.forward);
            let bwd = fincat::check_functor(b, a, &witness.backward);
            if !fwd.is_valid() || !bwd.is_valid() {
                return Ok((
                    "invalid-witness".to_string(),
                    false,
                    fwd.to_strings().into_iter().chain(bwd.to_strings()).collect(),
                ));
            }
            let iso = object_maps_bijective(&witness, a, b);
            let mut details = vec![format!(
                "{label}: equivalent (witness after {} functor pairs; object maps bijective: {iso})",
                stats.pairs_tested
            )];
            let fmap: Vec<String> = witness
                .forward
                .object_map
                .iter()
                .map(|(x, y)| format!("{x}→{y}"))
                .collect();
            details.push(format!("{label}: forward objects {}", fmap.join(", ")));
            Ok(("equivalent".to_string(), iso, details))
        }
        EquivalenceOutcome::NotEquivalent { stats } => Ok((
            "not-equivalent".to_string(),
            false,
            vec![format!(
                "{label}: not equivalent (exhausted {}×{} functors, {} pairs)",
                stats.functors_forward, stats.functors_backward, stats.pairs_tested
            )],
        )),
    }
}

// ---------------------------------------------------------------------------
// Individual fixtures.
// ---------------------------------------------------------------------------

/// Triangle A ⇄ B → C (f invertible, h∘f = g) — the three-object side.
fn collapse_triangle(with_iso: bool) -> Result<FinCategory> {
    let mut b = CatBuilder::new();
    b.object("A");
    b.object("B");
    b.object("C");
    b.morphism("f", "A", "B");
    b.morphism("g", "A", "C");
    b.morphism("h", "B", "C");
    b.compose("h", "f", "g");
    if with_iso {
        b.morphism("f-inv", "B", "A");
        b.compose("f-inv", "f", "id_A");
        b.compose("f", "f-inv", "id_B");
        b.compose("g", "f-inv", "h");
        b.inverse("f", "f-inv");
    }
    b.build()
}

/// The two-object collapse A2 → C2.
fn collapsed_pair() -> Result<FinCategory> {
    let mut b = CatBuilder::new();
    b.object("A2");
    b.object("C2");
    b.morphism("g2", "A2", "C2");
    b.build()
}

fn fixture_equiv_collapse() -> Result<(String, Vec<String>)> {
    let a = collapse_triangle(true)?;
    let b = collapsed_pair()?;
    let (got, _, details) = equivalence_verdict("triangle-vs-collapse", &a, &b)?;
    Ok((got, details))
}

fn fixture_equiv_no_iso() -> Result<(String, Vec<String>)> {
    let a = collapse_triangle(false)?;
    let b = collapsed_pair()?;
    let (got, _, details) = equivalence_verdict("rigid-triangle-vs-collapse", &a, &b)?;
    Ok((got, details))
}

/// The seven-morphism closure of the triangle with g invertible:
/// f: A→B, g: A→C, h: B→C, g⁻¹: C→A, and the forced composites
/// fp = g⁻¹∘h, hp = f∘g⁻¹, eb = f∘g⁻¹∘h.
pub fn closure_category() -> Result<FinCategory> {
    let mut b = CatBuilder::new();
    b.object("A");
    b.object("B");
    b.object("C");
    b.morphism("f", "A", "B");
    b.morphism("h", "B", "C");
    b.morphism("g", "A", "C");
    b.morphism("g-inv", "C", "A");
    b.morphism("fp", "B", "A");
    b.morphism("hp", "C", "B");
    b.morphism("eb", "B", "B");
    for (g, f, r) in closure_table() {
        b.compose(g, f, r);
    }
    b.inverse("g", "g-inv");
    b.build()
}

/// The defined cells of the closure composition table as (g, f, g∘f).
fn closure_table() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("h", "f", "g"),
        ("fp", "f", "id_A"),
        ("eb", "f", "f"),
        ("g-inv", "h", "fp"),
        ("hp", "h", "eb"),
        ("g-inv", "g", "id_A"),
        ("hp", "g", "f"),
        ("f", "g-inv", "hp"),
        ("g", "g-inv", "id_C"),
        ("f", "fp", "eb"),
        ("g", "fp", "h"),
        ("h", "hp", "id_C"),
        ("fp", "hp", "g-inv"),
        ("eb", "hp", "hp"),
        ("h", "eb", "h"),
        ("fp", "eb", "fp"),
        ("eb", "eb", "eb"),
    ]
}

fn fixture_table_closure() -> Result<(String, Vec<String>)> {
    let cat = closure_category()?;
    let generators = ["f", "h", "g", "g-inv", "fp", "hp", "eb"];
    let table = closure_table();

    let mut matched = 0usize;
    let mut non_composable = 0usize;
    let mut problems = Vec::new();
    // Every ordered pair of non-identity morphisms: compare the category's
    // decision (composable? composite value?) against the printed table.
    for f in &generators {
        for g in &generators {
            let expected = table
                .iter()
                .find(|(tg, tf, _)| tg == g && tf == f)
                .map(|(_, _, r)| *r);
            let actual = cat.compose(g, f);
            match (expected, actual) {
                (Some(r), Some(a)) if r == a => matched += 1,
                (None, None) => non_composable += 1,
                (exp, act) => problems.push(format!(
                    "cell {g}∘{f}: table says {exp:?}, category says {act:?}"
                )),
            }
        }
    }
    // Identity diagonals id∘id = id complete the defined-cell count.
    let mut id_cells = 0usize;
    for o in ["A", "B", "C"] {
        let id = format!("id_{o}");
        if cat.compose(&id, &id) == Some(id.as_str()) {
            id_cells += 1;
        } else {
            problems.push(format!("identity diagonal failed at {o}"));
        }
    }
    // The closure creates a non-identity idempotent on B.
    let idempotent_ok = cat.compose("eb", "eb") == Some("eb");
    if !idempotent_ok {
        problems.push("eb is not idempotent".to_string());
    }

    let got = if problems.is_empty() && matched == table.len() && id_cells == 3 {
        "valid-table"
    } else {
        "table-mismatch"
    };
    let mut details = vec![format!(
        "checked {} ordered pairs: {matched} defined cells match, {non_composable} correctly non-composable, {id_cells} identity diagonals ({} defined cells total)",
        generators.len() * generators.len(),
        matched + id_cells
    )];
    details.push("non-identity idempotent eb∘eb = eb on B".to_string());
    details.extend(problems);
    Ok((got.to_string(), details))
}

fn require_isomorphism(
    got: String,
    iso: bool,
    mut details: Vec<String>,
) -> (String, Vec<String>) {
    if got == "equivalent" && !iso {
        details.push("witness exists but object maps are not bijective".to_string());
        ("equivalent-without-isomorphism".to_string(), details)
    } else {
        (got, details)
    }
}

fn fixture_mr_dq_pointwise() -> Result<(String, Vec<String>)> {
    let a = mr_restricted_shape(8, false).ambient_category()?;
    let b = nctorus::build_dq_fragment(5)?.ambient_category()?;
    let (got, iso, details) = equivalence_verdict("matrix-level-vs-deformation-level", &a, &b)?;
    Ok(require_isomorphism(got, iso, details))
}

fn fixture_mr_dq_chains() -> Result<(String, Vec<String>)> {
    let a = mr_chain_shape(&[2, 4, 8]).ambient_category()?;
    let b = dq_chain_shape(&[3, 4, 6]).ambient_category()?;
    let (got, iso, details) = equivalence_verdict("matrix-chain-vs-deformation-chain", &a, &b)?;
    Ok(require_isomorphism(got, iso, details))
}

fn pq_category() -> Result<FinCategory> {
    build_pq_fragment(&Prequantizer::default(), false).ambient_category()
}

fn fixture_mr_pq() -> Result<(String, Vec<String>)> {
    let a = mr_restricted_shape(8, true).ambient_category()?;
    let b = pq_category()?;
    let (got, _, details) = equivalence_verdict("matrix-with-inverse-vs-pq", &a, &b)?;
    Ok((got, details))
}

fn fixture_dq_pq() -> Result<(String, Vec<String>)> {
    let a = dq_restricted_shape(5, true).ambient_category()?;
    let b = pq_category()?;
    let (got, _, details) = equivalence_verdict("deformation-with-inverse-vs-pq", &a, &b)?;
    Ok((got, details))
}

fn fixture_pq_three_object() -> Result<(String, Vec<String>)> {
    let pq = pq_category()?;
    let dq = dq_chain_shape(&[3, 4, 6]).ambient_category()?;
    let mr = mr_chain_shape(&[2, 4, 8]).ambient_category()?;
    let (got_dq, _, mut details) = equivalence_verdict("deformation-chain-vs-pq", &dq, &pq)?;
    let (got_mr, _, details_mr) = equivalence_verdict("matrix-chain-vs-pq", &mr, &pq)?;
    details.extend(details_mr);
    let got = if got_dq == "not-equivalent" && got_mr == "not-equivalent" {
        "not-equivalent"
    } else {
        "unexpected-equivalence"
    };
    Ok((got.to_string(), details))
}

/// Obstruction certificate for the envelope fragment: it has a hom-set with
/// two distinct parallel quantization maps, while `other` has none.
fn parallel_obstruction(env: &FinCategory, other: &FinCategory, other_name: &str) -> Vec<String> {
    let parallel = env
        .hom(envelope::OBJ_ALGEBRA, envelope::OBJ_WEYL)
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>();
    let max_other = other
        .objects()
        .iter()
        .flat_map(|x| other.objects().iter().map(move |y| other.hom(x, y).len()))
        .max()
        .unwrap_or(0);
    vec![format!(
        "obstruction: envelope hom({}, {}) = {{{}}} has {} parallel maps; largest hom-set in {} has {} element(s)",
        envelope::OBJ_ALGEBRA,
        envelope::OBJ_WEYL,
        parallel.join(", "),
        parallel.len(),
        other_name,
        max_other
    )]
}

fn fixture_env_dq() -> Result<(String, Vec<String>)> {
    let env = envelope::build_env_fragment(&[])?.shape.ambient_category()?;
    let dq = nctorus::build_dq_fragment(5)?.ambient_category()?;
    let (got, _, mut details) = equivalence_verdict("envelope-vs-deformation", &env, &dq)?;
    details.extend(parallel_obstruction(&env, &dq, "deformation fragment"));
    Ok((got, details))
}

fn fixture_env_pq_mr() -> Result<(String, Vec<String>)> {
    let env = envelope::build_env_fragment(&[])?.shape.ambient_category()?;
    let pq = pq_category()?;
    let mr = mr_restricted_shape(8, true).ambient_category()?;
    let (got_pq, _, mut details) = equivalence_verdict("envelope-vs-pq", &env, &pq)?;
    let (got_mr, _, details_mr) = equivalence_verdict("envelope-vs-matrix", &env, &mr)?;
    details.extend(details_mr);
    details.extend(parallel_obstruction(&env, &pq, "pq fragment"));
    let got = if got_pq == "not-equivalent" && got_mr == "not-equivalent" {
        "not-equivalent"
    } else {
        "unexpected-equivalence"
    };
    Ok((got.to_string(), details))
}

fn fixture_mediating_nonunique() -> Result<(String, Vec<String>)> {
    let q = 5;
    let shape = mediating_shape(q);
    let indexed = shape.build_index_and_diagram()?;
    let limits = fincat::limits(&indexed.ambient, &indexed.diagram)?;
    let mut details = Vec::new();

    // 1. Exactly the three expected cones.
    let cone_apexes: Vec<&str> = limits.cones.iter().map(|c| c.apex.as_str()).collect();
    details.push(format!("cones at: {}", cone_apexes.join(", ")));
    let cones_ok = {
        let mut sorted = cone_apexes.clone();
        sorted.sort_unstable();
        sorted == vec!["classical-level", "deformed-level", "trig-polys"]
    };

    // 2. The classical cone is rejected for non-unique mediating morphisms
    //    {id, idem}.
    let classical_cone = limits
        .cones
        .iter()
        .position(|c| c.apex == "classical-level");
    let nonunique = limits.failures.iter().find_map(|f| match f {
        ConeFailure::NonUniqueMediating {
            candidate,
            mediators,
            ..
        } if Some(*candidate) == classical_cone => Some(mediators.clone()),
        _ => None,
    });
    let nonunique_ok = match &nonunique {
        Some(ms) => {
            let mut sorted = ms.clone();
            sorted.sort();
            details.push(format!(
                "classical-level cone rejected: mediating endomorphisms {{{}}}",
                sorted.join(", ")
            ));
            sorted == vec!["id_classical-level".to_string(), "idem".to_string()]
        }
        None => {
            details.push("classical-level cone was not rejected for non-uniqueness".to_string());
            false
        }
    };

    // 3. The surviving limit apexes are the algebra and the deformed level.
    let mut apexes: Vec<String> = limits.apexes().into_iter().map(str::to_string).collect();
    apexes.sort();
    details.push(format!("limit apexes: {}", apexes.join(", ")));
    let apexes_ok = apexes == vec!["deformed-level".to_string(), "trig-polys".to_string()];

    // 4. At the deformed apex ħ ≠ 0, multiplicativity fails under the torus
    //    realization, so no limit object satisfies both conditions.
    let tq = TorusQuantization::new(q)?;
    let probes = vec![
        ("cos x1".to_string(), TorusFunction::cosine(1, 0)),
        ("cos x2".to_string(), TorusFunction::cosine(0, 1)),
    ];
    let cond = qcat::verify_quantization_conditions(
        |f: &TorusFunction, g| f.mul(g),
        |f, g| f.poisson(g),
        |f| tq.quantize(f),
        Complex64::new(tq.hbar, 0.0),
        &probes,
        1e-9,
    )?;
    let worst_q1 = cond
        .rows
        .iter()
        .map(|r| r.q1_residual)
        .fold(0.0f64, f64::max);
    details.push(format!(
        "deformed-level realization (q = {q}): multiplicativity residual {worst_q1:.3e} at ħ = {:.3}",
        tq.hbar
    ));
    let deformed_fails = !cond.pass && worst_q1 > 1e-3;

    let got = if cones_ok && nonunique_ok && apexes_ok && deformed_fails {
        "not-a-quantization-category"
    } else {
        "criteria-not-met"
    };
    Ok((got.to_string(), details))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_is_complete_and_resolvable() {
        let fixtures = list_fixtures();
        assert_eq!(fixtures.len(), 11);
        for f in &fixtures {
            let r = run_fixture(f.id).expect("fixture runs");
            assert_eq!(r.id, f.id);
        }
        assert!(matches!(run_fixture("nope"), Err(Error::Domain(_))));
    }

    #[test]
    fn all_fixtures_pass() {
        for r in run_all().expect("all fixtures run") {
            assert!(
                r.pass,
                "fixture {} expected {} got {} ({:?})",
                r.id, r.expected, r.got, r.details
            );
        }
    }

    #[test]
    fn chain_shapes_are_valid_categories() {
        for shape in [
            mr_restricted_shape(8, false),
            mr_restricted_shape(8, true),
            dq_restricted_shape(5, true),
            mr_chain_shape(&[2, 4, 8]),
            dq_chain_shape(&[3, 4, 6]),
        ] {
            let cat = shape.ambient_category().expect("valid category");
            assert_eq!(cat.objects().len(), shape.objects.len() + 1);
        }
    }

    #[test]
    fn chain_limit_apex_is_classical_level() {
        let indexed = dq_chain_shape(&[3, 4, 6])
            .build_index_and_diagram()
            .expect("builds");
        let report = fincat::limits(&indexed.ambient, &indexed.diagram).expect("limits");
        assert_eq!(report.apexes(), vec!["classical-level"]);
        let mr = mr_restricted_shape(8, true)
            .build_index_and_diagram()
            .expect("builds");
        let mr_report = fincat::limits(&mr.ambient, &mr.diagram).expect("limits");
        let mut apexes = mr_report.apexes();
        apexes.sort_unstable();
        assert_eq!(apexes, vec!["mat-inf", "sphere-polys"]);
    }

    #[test]
    fn mediating_shape_closes_into_ten_morphisms() {
        let cat = mediating_shape(5).ambient_category().expect("valid");
        assert_eq!(cat.morphisms().len(), 10);
        assert_eq!(cat.compose("idem", "idem"), Some("idem"));
        assert_ne!(cat.compose("idem", "idem"), Some("id_classical-level"));
    }
}
