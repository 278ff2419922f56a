//! Functors between explicit finite categories, checked by enumeration.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::FinCategory;

/// A functor candidate: total assignments on objects and morphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorData {
    /// Domain object id -> codomain object id.
    pub object_map: BTreeMap<String, String>,
    /// Domain morphism id -> codomain morphism id.
    pub morphism_map: BTreeMap<String, String>,
}

impl FunctorData {
    /// Look up an object image.
    pub fn ob(&self, x: &str) -> Option<&str> {
        self.object_map.get(x).map(|s| s.as_str())
    }

    /// Look up a morphism image.
    pub fn mor(&self, m: &str) -> Option<&str> {
        self.morphism_map.get(m).map(|s| s.as_str())
    }
}

/// A single functor-law violation; ids on the left are from the domain
/// category, images from the codomain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum FunctorViolation {
    /// An object has no image.
    ObjectUnmapped {
        /// The unmapped object.
        object: String,
    },
    /// An object image is not an object of the codomain.
    UnknownObjectImage {
        /// The domain object.
        object: String,
        /// The undefined image.
        image: String,
    },
    /// A morphism has no image.
    MorphismUnmapped {
        /// The unmapped morphism.
        morphism: String,
    },
    /// A morphism image is not a morphism of the codomain.
    UnknownMorphismImage {
        /// The domain morphism.
        morphism: String,
        /// The undefined image.
        image: String,
    },
    /// F(m) does not go F(dom m) → F(cod m).
    ShapeMismatch {
        /// The domain morphism.
        morphism: String,
        /// Its image.
        image: String,
    },
    /// F(id_X) ≠ id_{F(X)}.
    IdentityNotPreserved {
        /// The object whose identity is mishandled.
        object: String,
        /// What the identity was mapped to.
        got: String,
        /// The identity of the image object.
        want: String,
    },
    /// F(g∘f) ≠ F(g)∘F(f) (or the image pair has no declared composite).
    CompositionNotPreserved {
        /// Outer morphism g.
        after: String,
        /// Inner morphism f.
        first: String,
        /// F(g∘f).
        want: String,
        /// F(g)∘F(f) per the codomain table, when declared.
        got: Option<String>,
    },
}

impl fmt::Display for FunctorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorViolation::ObjectUnmapped { object } => {
                write!(f, "object '{object}' has no image")
            }
            FunctorViolation::UnknownObjectImage { object, image } => {
                write!(f, "object '{object}' maps to unknown object '{image}'")
            }
            FunctorViolation::MorphismUnmapped { morphism } => {
                write!(f, "morphism '{morphism}' has no image")
            }
            FunctorViolation::UnknownMorphismImage { morphism, image } => {
                write!(f, "morphism '{morphism}' maps to unknown morphism '{image}'")
            }
            FunctorViolation::ShapeMismatch { morphism, image } => {
                write!(f, "image '{image}' of '{morphism}' has the wrong domain or codomain")
            }
            FunctorViolation::IdentityNotPreserved { object, got, want } => {
                write!(f, "identity of '{object}' maps to '{got}', not '{want}'")
            }
            FunctorViolation::CompositionNotPreserved { after, first, want, got } => match got {
                Some(got) => write!(
                    f,
                    "composition not preserved on {after}∘{first}: F(g∘f) = '{want}' but F(g)∘F(f) = '{got}'"
                ),
                None => write!(
                    f,
                    "composition not preserved on {after}∘{first}: image pair has no composite"
                ),
            },
        }
    }
}

/// Result of a functor check: valid iff no violations.
#[derive(Debug, Clone, Serialize)]
pub struct FunctorReport {
    /// Every functor-law violation found.
    pub violations: Vec<FunctorViolation>,
}

impl FunctorReport {
    /// True when no violation was found.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Render the violations as display strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.violations.iter().map(|v| v.to_string()).collect()
    }
}

/// Verify that `f` is a functor `dom → cod`: total, shape-preserving,
/// identity-preserving, and composition-preserving.
pub fn check_functor(dom: &FinCategory, cod: &FinCategory, f: &FunctorData) -> FunctorReport {
    let mut violations = Vec::new();

    for x in dom.objects() {
        match f.ob(x) {
            None => violations.push(FunctorViolation::ObjectUnmapped { object: x.clone() }),
            Some(y) if cod.object_index(y).is_none() => {
                violations.push(FunctorViolation::UnknownObjectImage {
                    object: x.clone(),
                    image: y.to_string(),
                })
            }
            _ => {}
        }
    }
    for m in dom.morphisms() {
        match f.mor(&m.id) {
            None => violations.push(FunctorViolation::MorphismUnmapped {
                morphism: m.id.clone(),
            }),
            Some(img) if cod.morphism_index(img).is_none() => {
                violations.push(FunctorViolation::UnknownMorphismImage {
                    morphism: m.id.clone(),
                    image: img.to_string(),
                })
            }
            _ => {}
        }
    }
    if !violations.is_empty() {
        // Shape and law checks below assume totality.
        return FunctorReport { violations };
    }

    for m in dom.morphisms() {
        let img = f.mor(&m.id).expect("total");
        let mi = cod.morphism_index(img).expect("exists");
        let want_dom = f.ob(&m.dom).expect("total");
        let want_cod = f.ob(&m.cod).expect("total");
        if cod.objects()[cod.dom_idx(mi)] != want_dom || cod.objects()[cod.cod_idx(mi)] != want_cod {
            violations.push(FunctorViolation::ShapeMismatch {
                morphism: m.id.clone(),
                image: img.to_string(),
            });
        }
    }

    for x in dom.objects() {
        let idm = dom.identity_of(x).expect("own object");
        let want = cod
            .identity_of(f.ob(x).expect("total"))
            .expect("image exists");
        let got = f.mor(idm).expect("total");
        if got != want {
            violations.push(FunctorViolation::IdentityNotPreserved {
                object: x.clone(),
                got: got.to_string(),
                want: want.to_string(),
            });
        }
    }

    for (g, first, h) in dom.comp_entries() {
        let fg = f.mor(dom.morphism_id(g)).expect("total");
        let ff = f.mor(dom.morphism_id(first)).expect("total");
        let fh = f.mor(dom.morphism_id(h)).expect("total");
        match cod.compose(fg, ff) {
            Some(got) if got == fh => {}
            got => violations.push(FunctorViolation::CompositionNotPreserved {
                after: dom.morphism_id(g).to_string(),
                first: dom.morphism_id(first).to_string(),
                want: fh.to_string(),
                got: got.map(|s| s.to_string()),
            }),
        }
    }

    FunctorReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::CatBuilder;

    fn arrow() -> FinCategory {
        let mut b = CatBuilder::new();
        b.object("A");
        b.object("B");
        b.morphism("f", "A", "B");
        b.build().unwrap()
    }

    fn point() -> FinCategory {
        let mut b = CatBuilder::new();
        b.object("P");
        b.build().unwrap()
    }

    #[test]
    fn collapse_to_point_is_a_functor() {
        let a = arrow();
        let p = point();
        let f = FunctorData {
            object_map: [("A".into(), "P".into()), ("B".into(), "P".into())].into(),
            morphism_map: [
                ("id_A".into(), "id_P".into()),
                ("id_B".into(), "id_P".into()),
                ("f".into(), "id_P".into()),
            ]
            .into(),
        };
        assert!(check_functor(&a, &p, &f).is_valid());
    }

    #[test]
    fn shape_violation_detected() {
        let a = arrow();
        let f = FunctorData {
            object_map: [("A".into(), "A".into()), ("B".into(), "B".into())].into(),
            morphism_map: [
                ("id_A".into(), "f".into()), // f: A→B cannot be id_A's image
                ("id_B".into(), "id_B".into()),
                ("f".into(), "f".into()),
            ]
            .into(),
        };
        let report = check_functor(&a, &a, &f);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, FunctorViolation::ShapeMismatch { .. })));
    }

    #[test]
    fn totality_violation_detected() {
        let a = arrow();
        let p = point();
        let f = FunctorData {
            object_map: [("A".into(), "P".into())].into(),
            morphism_map: BTreeMap::new(),
        };
        let report = check_functor(&a, &p, &f);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, FunctorViolation::ObjectUnmapped { object } if object == "B")));
    }
}
