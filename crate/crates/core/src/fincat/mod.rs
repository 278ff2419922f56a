//! Finite categories presented by explicit composition tables.
//!
//! A [`FinCategory`] is the fully elementary datum: a list of objects, a list
//! of morphisms with domain and codomain, a chosen identity per object, the
//! composition table on exactly the composable pairs, and an optional list of
//! declared inverses. Nothing is inferred — [`check_category`] verifies that
//! the declared data actually satisfies the category laws and reports every
//! violation with the ids involved.
//!
//! Because everything is finite and explicit, the derived notions are
//! decidable by enumeration: functor checking ([`check_functor`]), limits of
//! finite diagrams by exhaustive cone search ([`limits`]), and categorical
//! equivalence on small inputs ([`decide_equivalence`]).

mod builder;
mod equiv;
mod functor;
mod json;
mod limits;

pub use builder::CatBuilder;
pub use equiv::{
    decide_equivalence, EquivalenceOutcome, EquivalenceWitness, SearchStats, MAX_EQUIV_MORPHISMS,
    MAX_EQUIV_OBJECTS,
};
pub use functor::{check_functor, FunctorData, FunctorReport, FunctorViolation};
pub use json::{
    load_category, save_category, CategoryFile, CompEntry, DiagramSelection, InverseEntry,
};
pub use limits::{
    diagram_from_selection, limits, Cone, ConeFailure, DiagramShape, LimitCone, LimitsReport,
    MediatingRecord,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A morphism declaration: name, domain object, codomain object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    /// Morphism id, unique within the category.
    pub id: String,
    /// Domain object id.
    pub dom: String,
    /// Codomain object id.
    pub cod: String,
}

/// A finite category given by explicit tables.
///
/// Construction resolves all names and rejects dangling references
/// (domain errors); the category *laws* are checked separately by
/// [`check_category`], so invalid tables can be represented, inspected,
/// and reported on.
#[derive(Debug, Clone, PartialEq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<MorphismDecl>,
    /// object index -> identity morphism index
    identities: Vec<usize>,
    /// (after g, first f) -> composite g∘f, by morphism index
    comp: BTreeMap<(usize, usize), usize>,
    /// declared inverse pairs (of, inv), by morphism index
    inverses: Vec<(usize, usize)>,
    obj_index: BTreeMap<String, usize>,
    mor_index: BTreeMap<String, usize>,
}

impl FinCategory {
    /// Assemble a category from name-level tables.
    ///
    /// * `identities` maps object id -> identity morphism id and must cover
    ///   every object.
    /// * `comp` entries are `(after, first, result)` meaning result = after∘first.
    /// * `inverses` entries are `(of, inv)` declarations.
    ///
    /// Fails with a domain error on unknown or duplicate names, or a
    /// consistency error on contradictory table entries; law violations are
    /// left to [`check_category`].
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<MorphismDecl>,
        identities: &BTreeMap<String, String>,
        comp: &[(String, String, String)],
        inverses: &[(String, String)],
    ) -> Result<Self> {
        let mut obj_index = BTreeMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate object id '{o}'")));
            }
        }
        let mut mor_index = BTreeMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            if mor_index.insert(m.id.clone(), i).is_some() {
                return Err(Error::Domain(format!("duplicate morphism id '{}'", m.id)));
            }
            if !obj_index.contains_key(&m.dom) {
                return Err(Error::Domain(format!(
                    "morphism '{}' has unknown domain '{}'",
                    m.id, m.dom
                )));
            }
            if !obj_index.contains_key(&m.cod) {
                return Err(Error::Domain(format!(
                    "morphism '{}' has unknown codomain '{}'",
                    m.id, m.cod
                )));
            }
        }
        let mut identity_vec = vec![usize::MAX; objects.len()];
        for (obj, mor) in identities {
            let oi = *obj_index
                .get(obj)
                .ok_or_else(|| Error::Domain(format!("identity declared for unknown object '{obj}'")))?;
            let mi = *mor_index
                .get(mor)
                .ok_or_else(|| Error::Domain(format!("unknown identity morphism '{mor}'")))?;
            identity_vec[oi] = mi;
        }
        for (oi, mi) in identity_vec.iter().enumerate() {
            if *mi == usize::MAX {
                return Err(Error::Domain(format!(
                    "object '{}' has no declared identity",
                    objects[oi]
                )));
            }
        }
        let mut comp_map = BTreeMap::new();
        for (after, first, result) in comp {
            let g = *mor_index
                .get(after)
                .ok_or_else(|| Error::Domain(format!("comp entry names unknown morphism '{after}'")))?;
            let f = *mor_index
                .get(first)
                .ok_or_else(|| Error::Domain(format!("comp entry names unknown morphism '{first}'")))?;
            let h = *mor_index
                .get(result)
                .ok_or_else(|| Error::Domain(format!("comp entry names unknown morphism '{result}'")))?;
            if let Some(prev) = comp_map.insert((g, f), h) {
                if prev != h {
                    return Err(Error::Consistency(format!(
                        "conflicting composites declared for {after}∘{first}"
                    )));
                }
            }
        }
        let mut inverse_vec = Vec::new();
        for (of, inv) in inverses {
            let a = *mor_index
                .get(of)
                .ok_or_else(|| Error::Domain(format!("inverse entry names unknown morphism '{of}'")))?;
            let b = *mor_index
                .get(inv)
                .ok_or_else(|| Error::Domain(format!("inverse entry names unknown morphism '{inv}'")))?;
            inverse_vec.push((a, b));
        }
        Ok(FinCategory {
            objects,
            morphisms,
            identities: identity_vec,
            comp: comp_map,
            inverses: inverse_vec,
            obj_index,
            mor_index,
        })
    }

    /// Object ids, in declaration order.
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    /// Morphism declarations, in declaration order.
    pub fn morphisms(&self) -> &[MorphismDecl] {
        &self.morphisms
    }

    /// Declared inverse pairs as (of, inv) morphism ids.
    pub fn inverse_pairs(&self) -> Vec<(&str, &str)> {
        self.inverses
            .iter()
            .map(|(a, b)| (self.morphisms[*a].id.as_str(), self.morphisms[*b].id.as_str()))
            .collect()
    }

    /// Index of an object id.
    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.obj_index.get(id).copied()
    }

    /// Index of a morphism id.
    pub fn morphism_index(&self, id: &str) -> Option<usize> {
        self.mor_index.get(id).copied()
    }

    /// Morphism id at an index.
    pub fn morphism_id(&self, idx: usize) -> &str {
        &self.morphisms[idx].id
    }

    /// Domain object index of a morphism index.
    pub fn dom_idx(&self, m: usize) -> usize {
        self.obj_index[&self.morphisms[m].dom]
    }

    /// Codomain object index of a morphism index.
    pub fn cod_idx(&self, m: usize) -> usize {
        self.obj_index[&self.morphisms[m].cod]
    }

    /// Identity morphism index of an object index.
    pub fn identity_idx(&self, o: usize) -> usize {
        self.identities[o]
    }

    /// Identity morphism id of an object id, if the object exists.
    pub fn identity_of(&self, obj: &str) -> Option<&str> {
        let oi = self.object_index(obj)?;
        Some(self.morphism_id(self.identities[oi]))
    }

    /// Composite g∘f by morphism index, if declared.
    pub fn compose_idx(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    /// Composite g∘f by morphism id, if both exist and the composite is declared.
    pub fn compose(&self, g: &str, f: &str) -> Option<&str> {
        let gi = self.morphism_index(g)?;
        let fi = self.morphism_index(f)?;
        self.compose_idx(gi, fi).map(|h| self.morphism_id(h))
    }

    /// All declared composition entries as (after, first, result) indices.
    pub fn comp_entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.comp.iter().map(|((g, f), h)| (*g, *f, *h))
    }

    /// Morphism indices from object x to object y (by object index).
    pub fn hom_idx(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|m| self.dom_idx(*m) == x && self.cod_idx(*m) == y)
            .collect()
    }

    /// Morphism ids from object x to object y (by object id); empty when the
    /// objects do not exist.
    pub fn hom(&self, x: &str, y: &str) -> Vec<&str> {
        match (self.object_index(x), self.object_index(y)) {
            (Some(xi), Some(yi)) => self
                .hom_idx(xi, yi)
                .into_iter()
                .map(|m| self.morphism_id(m))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// True when some w satisfies w∘m = id_dom(m) and m∘w = id_cod(m) in the
    /// declared table (computed invertibility, independent of declarations).
    pub fn is_iso_idx(&self, m: usize) -> bool {
        self.inverse_of_idx(m).is_some()
    }

    /// A two-sided inverse of m in the declared table, if one exists.
    pub fn inverse_of_idx(&self, m: usize) -> Option<usize> {
        let d = self.dom_idx(m);
        let c = self.cod_idx(m);
        let idd = self.identities[d];
        let idc = self.identities[c];
        (0..self.morphisms.len()).find(|w| {
            self.dom_idx(*w) == c
                && self.cod_idx(*w) == d
                && self.compose_idx(*w, m) == Some(idd)
                && self.compose_idx(m, *w) == Some(idc)
        })
    }

    /// Iso morphism indices from x to y (by object index).
    pub fn isos_idx(&self, x: usize, y: usize) -> Vec<usize> {
        self.hom_idx(x, y)
            .into_iter()
            .filter(|m| self.is_iso_idx(*m))
            .collect()
    }
}

/// A single category-law violation, carrying the ids involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// Identity morphism of `object` is not an endomorphism of it.
    IdentityShape {
        /// Offending object.
        object: String,
        /// Its declared identity.
        morphism: String,
    },
    /// Composable pair with no declared composite.
    MissingComposite {
        /// Outer morphism g.
        after: String,
        /// Inner morphism f.
        first: String,
    },
    /// Composite declared for a non-composable pair.
    NonComposablePair {
        /// Outer morphism g.
        after: String,
        /// Inner morphism f.
        first: String,
    },
    /// Declared composite has the wrong domain or codomain.
    CompositeShape {
        /// Outer morphism g.
        after: String,
        /// Inner morphism f.
        first: String,
        /// Declared composite g∘f.
        result: String,
    },
    /// id∘f ≠ f or f∘id ≠ f.
    IdentityLaw {
        /// The morphism for which the law fails.
        morphism: String,
        /// "left" or "right".
        side: String,
        /// What the table returned instead.
        got: String,
    },
    /// (h∘g)∘f ≠ h∘(g∘f).
    Associativity {
        /// Outermost morphism.
        h: String,
        /// Middle morphism.
        g: String,
        /// Innermost morphism.
        f: String,
        /// Left association result.
        left: String,
        /// Right association result.
        right: String,
    },
    /// A declared inverse fails one of the two inverse laws.
    InverseLaw {
        /// The morphism declared invertible.
        of: String,
        /// Its declared inverse.
        inv: String,
        /// Which composite failed ("inv∘of" or "of∘inv").
        side: String,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::IdentityShape { object, morphism } => {
                write!(f, "identity '{morphism}' of object '{object}' is not an endomorphism of it")
            }
            Violation::MissingComposite { after, first } => {
                write!(f, "no composite declared for {after}∘{first}")
            }
            Violation::NonComposablePair { after, first } => {
                write!(f, "composite declared for non-composable pair {after}∘{first}")
            }
            Violation::CompositeShape { after, first, result } => {
                write!(f, "composite {after}∘{first} = {result} has wrong domain or codomain")
            }
            Violation::IdentityLaw { morphism, side, got } => {
                write!(f, "{side} identity law fails for '{morphism}' (got '{got}')")
            }
            Violation::Associativity { h, g, f: ff, left, right } => {
                write!(f, "associativity fails: ({h}∘{g})∘{ff} = {left} but {h}∘({g}∘{ff}) = {right}")
            }
            Violation::InverseLaw { of, inv, side } => {
                write!(f, "declared inverse pair ({of}, {inv}) fails the {side} law")
            }
        }
    }
}

/// Result of a law check: valid iff no violations.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// Every law violation found, in deterministic order.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// True when no violation was found.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Render the violations as display strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.violations.iter().map(|v| v.to_string()).collect()
    }
}

/// Check every category law on the declared tables.
///
/// Verified, in order: identity shapes; the composition table is defined on
/// exactly the composable pairs; composite shapes; left/right identity laws;
/// associativity on all composable triples; declared inverse laws.
pub fn check_category(cat: &FinCategory) -> ValidationReport {
    let mut violations = Vec::new();
    let n = cat.morphisms.len();

    for (oi, obj) in cat.objects.iter().enumerate() {
        let idm = cat.identities[oi];
        if cat.dom_idx(idm) != oi || cat.cod_idx(idm) != oi {
            violations.push(Violation::IdentityShape {
                object: obj.clone(),
                morphism: cat.morphism_id(idm).to_string(),
            });
        }
    }

    for g in 0..n {
        for f in 0..n {
            let composable = cat.dom_idx(g) == cat.cod_idx(f);
            match (composable, cat.compose_idx(g, f)) {
                (true, None) => violations.push(Violation::MissingComposite {
                    after: cat.morphism_id(g).to_string(),
                    first: cat.morphism_id(f).to_string(),
                }),
                (false, Some(_)) => violations.push(Violation::NonComposablePair {
                    after: cat.morphism_id(g).to_string(),
                    first: cat.morphism_id(f).to_string(),
                }),
                (true, Some(h)) => {
                    if cat.dom_idx(h) != cat.dom_idx(f) || cat.cod_idx(h) != cat.cod_idx(g) {
                        violations.push(Violation::CompositeShape {
                            after: cat.morphism_id(g).to_string(),
                            first: cat.morphism_id(f).to_string(),
                            result: cat.morphism_id(h).to_string(),
                        });
                    }
                }
                (false, None) => {}
            }
        }
    }

    for m in 0..n {
        let idc = cat.identities[cat.cod_idx(m)];
        if let Some(h) = cat.compose_idx(idc, m) {
            if h != m {
                violations.push(Violation::IdentityLaw {
                    morphism: cat.morphism_id(m).to_string(),
                    side: "left".into(),
                    got: cat.morphism_id(h).to_string(),
                });
            }
        }
        let idd = cat.identities[cat.dom_idx(m)];
        if let Some(h) = cat.compose_idx(m, idd) {
            if h != m {
                violations.push(Violation::IdentityLaw {
                    morphism: cat.morphism_id(m).to_string(),
                    side: "right".into(),
                    got: cat.morphism_id(h).to_string(),
                });
            }
        }
    }

    for h in 0..n {
        for g in 0..n {
            if cat.dom_idx(h) != cat.cod_idx(g) {
                continue;
            }
            for f in 0..n {
                if cat.dom_idx(g) != cat.cod_idx(f) {
                    continue;
                }
                let left = cat.compose_idx(g, f).and_then(|gf| cat.compose_idx(h, gf));
                let right = cat.compose_idx(h, g).and_then(|hg| cat.compose_idx(hg, f));
                if let (Some(l), Some(r)) = (left, right) {
                    if l != r {
                        violations.push(Violation::Associativity {
                            h: cat.morphism_id(h).to_string(),
                            g: cat.morphism_id(g).to_string(),
                            f: cat.morphism_id(f).to_string(),
                            left: cat.morphism_id(l).to_string(),
                            right: cat.morphism_id(r).to_string(),
                        });
                    }
                }
            }
        }
    }

    for (a, b) in &cat.inverses {
        let idd = cat.identities[cat.dom_idx(*a)];
        let idc = cat.identities[cat.cod_idx(*a)];
        if cat.compose_idx(*b, *a) != Some(idd) {
            violations.push(Violation::InverseLaw {
                of: cat.morphism_id(*a).to_string(),
                inv: cat.morphism_id(*b).to_string(),
                side: "inv∘of".into(),
            });
        }
        if cat.compose_idx(*a, *b) != Some(idc) {
            violations.push(Violation::InverseLaw {
                of: cat.morphism_id(*a).to_string(),
                inv: cat.morphism_id(*b).to_string(),
                side: "of∘inv".into(),
            });
        }
    }

    ValidationReport { violations }
}

/// Check the laws and fail with a consistency error when any is violated.
pub fn require_valid(cat: &FinCategory) -> Result<()> {
    let report = check_category(cat);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::Consistency(format!(
            "category law violations: {}",
            report.to_strings().join("; ")
        )))
    }
}
