//! Limits of finite diagrams by exhaustive cone enumeration.
//!
//! A diagram is a functor F: J → 𝒞 between explicit finite categories
//! ([`DiagramShape`]). A cone is an apex X together with legs λ_j: X → F(j)
//! satisfying F(u)∘λ_j = λ_{j′} for every J-arrow u: j → j′. A cone L is a
//! limit cone iff every cone admits **exactly one** mediating morphism into
//! L. Everything here is decided by enumeration, and the report keeps the
//! evidence: each limit cone lists its mediating morphism from every cone,
//! and each rejected candidate records the first cone with zero or with two
//! or more mediators (the latter listing the candidates).

use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_functor, CatBuilder, FinCategory, FunctorData};
use crate::{Error, Result};

/// Cap on the number of leg combinations enumerated per apex.
const CONE_ENUM_CAP: u64 = 1_000_000;

/// A diagram: an index category J and a functor J → ambient given by
/// assignment tables.
#[derive(Debug, Clone)]
pub struct DiagramShape {
    /// The index category J.
    pub index: FinCategory,
    /// J-object id -> ambient object id.
    pub object_map: BTreeMap<String, String>,
    /// J-morphism id -> ambient morphism id.
    pub morphism_map: BTreeMap<String, String>,
}

impl DiagramShape {
    /// The functor data of the diagram.
    pub fn functor(&self) -> FunctorData {
        FunctorData {
            object_map: self.object_map.clone(),
            morphism_map: self.morphism_map.clone(),
        }
    }

    /// Check that the index is a valid category and the assignment a functor.
    pub fn validate(&self, ambient: &FinCategory) -> Result<()> {
        super::require_valid(&self.index)?;
        let report = check_functor(&self.index, ambient, &self.functor());
        if !report.is_valid() {
            return Err(Error::Consistency(format!(
                "diagram is not a functor: {}",
                report.to_strings().join("; ")
            )));
        }
        Ok(())
    }
}

/// A cone over a diagram: apex object plus one leg per J-object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cone {
    /// Apex object id in the ambient category.
    pub apex: String,
    /// J-object id -> ambient leg morphism id.
    pub legs: BTreeMap<String, String>,
}

/// The unique mediating morphism from one cone into a limit cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MediatingRecord {
    /// Index into [`LimitsReport::cones`] of the source cone.
    pub from_cone: usize,
    /// The mediating morphism id.
    pub morphism: String,
}

/// A cone verified to be a limit, with its full uniqueness certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitCone {
    /// Index into [`LimitsReport::cones`].
    pub cone: usize,
    /// For every cone (including this one), the unique mediating morphism.
    pub mediating: Vec<MediatingRecord>,
}

/// Why a cone failed to be a limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ConeFailure {
    /// Some cone has no mediating morphism into the candidate.
    NoMediating {
        /// Index of the rejected candidate cone.
        candidate: usize,
        /// Index of the cone with no mediator.
        from_cone: usize,
    },
    /// Some cone has two or more mediating morphisms into the candidate.
    NonUniqueMediating {
        /// Index of the rejected candidate cone.
        candidate: usize,
        /// Index of the cone with several mediators.
        from_cone: usize,
        /// All mediating morphism ids found.
        mediators: Vec<String>,
    },
}

/// Everything the limit computation found.
#[derive(Debug, Clone, Serialize)]
pub struct LimitsReport {
    /// Every cone over the diagram, in deterministic order.
    pub cones: Vec<Cone>,
    /// The cones that are limits, with uniqueness certificates.
    pub limits: Vec<LimitCone>,
    /// For each non-limit cone, the first reason it was rejected.
    pub failures: Vec<ConeFailure>,
}

impl LimitsReport {
    /// Apex object ids of the limit cones (with repetitions collapsed).
    pub fn apexes(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for l in &self.limits {
            let apex = self.cones[l.cone].apex.as_str();
            if !out.contains(&apex) {
                out.push(apex);
            }
        }
        out
    }

    /// True when some limit cone has this apex.
    pub fn has_limit_apex(&self, obj: &str) -> bool {
        self.apexes().contains(&obj)
    }
}

/// Compute all cones and all limit cones of a diagram.
pub fn limits(ambient: &FinCategory, shape: &DiagramShape) -> Result<LimitsReport> {
    shape.validate(ambient)?;

    let jobjects: Vec<&String> = shape.index.objects().iter().collect();
    // Non-identity J-arrows as (j_dom position, j_cod position, ambient morphism idx).
    let mut jarrows: Vec<(usize, usize, usize)> = Vec::new();
    for m in shape.index.morphisms() {
        let mi = shape.index.morphism_index(&m.id).expect("own morphism");
        let d = shape.index.dom_idx(mi);
        if shape.index.identity_idx(d) == mi {
            continue; // identity arrows impose no constraint beyond shapes
        }
        let jd = jobjects.iter().position(|o| **o == m.dom).expect("own object");
        let jc = jobjects.iter().position(|o| **o == m.cod).expect("own object");
        let amb = shape.morphism_map.get(&m.id).expect("validated total");
        jarrows.push((jd, jc, ambient.morphism_index(amb).expect("validated")));
    }
    // Ambient object index of F(j) per J-object position.
    let fj: Vec<usize> = jobjects
        .iter()
        .map(|j| {
            let img = shape.object_map.get(*j).expect("validated total");
            ambient.object_index(img).expect("validated")
        })
        .collect();

    let mut cones: Vec<(usize, Vec<usize>)> = Vec::new(); // (apex obj idx, legs by J position)
    for apex in 0..ambient.objects().len() {
        let cands: Vec<Vec<usize>> = fj.iter().map(|t| ambient.hom_idx(apex, *t)).collect();
        let mut size: u64 = 1;
        for c in &cands {
            size = size.saturating_mul(c.len() as u64);
        }
        if size > CONE_ENUM_CAP {
            return Err(Error::Capacity(format!(
                "cone enumeration for apex '{}' needs {} combinations (cap {})",
                ambient.objects()[apex],
                size,
                CONE_ENUM_CAP
            )));
        }
        if cands.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut legs = vec![usize::MAX; jobjects.len()];
        enumerate_legs(ambient, &cands, &jarrows, &mut legs, 0, apex, &mut cones);
    }

    let cone_records: Vec<Cone> = cones
        .iter()
        .map(|(apex, legs)| Cone {
            apex: ambient.objects()[*apex].clone(),
            legs: jobjects
                .iter()
                .enumerate()
                .map(|(t, j)| ((*j).clone(), ambient.morphism_id(legs[t]).to_string()))
                .collect(),
        })
        .collect();

    let mut limit_cones = Vec::new();
    let mut failures = Vec::new();
    'candidates: for (li, (lapex, llegs)) in cones.iter().enumerate() {
        let mut mediating = Vec::new();
        for (ci, (capex, clegs)) in cones.iter().enumerate() {
            let mut found: Vec<usize> = Vec::new();
            for u in ambient.hom_idx(*capex, *lapex) {
                let ok = (0..jobjects.len())
                    .all(|t| ambient.compose_idx(llegs[t], u) == Some(clegs[t]));
                if ok {
                    found.push(u);
                }
            }
            match found.len() {
                0 => {
                    failures.push(ConeFailure::NoMediating {
                        candidate: li,
                        from_cone: ci,
                    });
                    continue 'candidates;
                }
                1 => mediating.push(MediatingRecord {
                    from_cone: ci,
                    morphism: ambient.morphism_id(found[0]).to_string(),
                }),
                _ => {
                    failures.push(ConeFailure::NonUniqueMediating {
                        candidate: li,
                        from_cone: ci,
                        mediators: found
                            .into_iter()
                            .map(|u| ambient.morphism_id(u).to_string())
                            .collect(),
                    });
                    continue 'candidates;
                }
            }
        }
        limit_cones.push(LimitCone {
            cone: li,
            mediating,
        });
    }

    Ok(LimitsReport {
        cones: cone_records,
        limits: limit_cones,
        failures,
    })
}

/// Depth-first product of candidate legs with early commutativity pruning.
fn enumerate_legs(
    ambient: &FinCategory,
    cands: &[Vec<usize>],
    jarrows: &[(usize, usize, usize)],
    legs: &mut Vec<usize>,
    t: usize,
    apex: usize,
    out: &mut Vec<(usize, Vec<usize>)>,
) {
    if t == cands.len() {
        out.push((apex, legs.clone()));
        return;
    }
    'next: for &leg in &cands[t] {
        legs[t] = leg;
        for &(jd, jc, fu) in jarrows {
            if jd.max(jc) > t {
                continue; // involves an unassigned leg
            }
            if ambient.compose_idx(fu, legs[jd]) != Some(legs[jc]) {
                continue 'next;
            }
        }
        enumerate_legs(ambient, cands, jarrows, legs, t + 1, apex, out);
    }
    legs[t] = usize::MAX;
}

/// Build a [`DiagramShape`] from a subset of an ambient category's objects
/// and morphisms. The subset must be closed under composition (composites of
/// selected morphisms must be selected or be identities of selected objects).
pub fn diagram_from_selection(
    ambient: &FinCategory,
    objects: &[String],
    morphisms: &[String],
) -> Result<DiagramShape> {
    let mut b = CatBuilder::new();
    for o in objects {
        if ambient.object_index(o).is_none() {
            return Err(Error::Domain(format!("diagram selects unknown object '{o}'")));
        }
        b.object(o);
    }
    let mut object_map: BTreeMap<String, String> = BTreeMap::new();
    let mut morphism_map: BTreeMap<String, String> = BTreeMap::new();
    for o in objects {
        object_map.insert(o.clone(), o.clone());
        let amb_id = ambient
            .identity_of(o)
            .expect("checked above")
            .to_string();
        morphism_map.insert(format!("id_{o}"), amb_id);
    }

    // Selected non-identity morphisms, skipping identities the caller listed.
    let mut selected: Vec<usize> = Vec::new();
    for m in morphisms {
        let mi = ambient
            .morphism_index(m)
            .ok_or_else(|| Error::Domain(format!("diagram selects unknown morphism '{m}'")))?;
        let d = ambient.dom_idx(mi);
        if ambient.identity_idx(d) == mi && ambient.cod_idx(mi) == d {
            continue;
        }
        let (dom, cod) = (&ambient.morphisms()[mi].dom, &ambient.morphisms()[mi].cod);
        if !objects.contains(dom) || !objects.contains(cod) {
            return Err(Error::Domain(format!(
                "diagram morphism '{m}' has endpoints outside the selected objects"
            )));
        }
        b.morphism(m, dom, cod);
        morphism_map.insert(m.clone(), m.clone());
        selected.push(mi);
    }

    // Composition closure within the selection.
    for &g in &selected {
        for &f in &selected {
            if ambient.dom_idx(g) != ambient.cod_idx(f) {
                continue;
            }
            let h = ambient.compose_idx(g, f).ok_or_else(|| {
                Error::Consistency(format!(
                    "ambient table lacks {}∘{}",
                    ambient.morphism_id(g),
                    ambient.morphism_id(f)
                ))
            })?;
            let h_id = ambient.morphism_id(h);
            let local = if selected.contains(&h) {
                h_id.to_string()
            } else if ambient.identity_idx(ambient.dom_idx(h)) == h
                && objects.contains(&ambient.morphisms()[h].dom)
            {
                format!("id_{}", ambient.morphisms()[h].dom)
            } else {
                return Err(Error::Domain(format!(
                    "diagram selection is not closed: {}∘{} = '{h_id}' is not selected",
                    ambient.morphism_id(g),
                    ambient.morphism_id(f)
                )));
            };
            b.compose(ambient.morphism_id(g), ambient.morphism_id(f), &local);
        }
    }

    let index = b.build()?;
    Ok(DiagramShape {
        index,
        object_map,
        morphism_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> FinCategory {
        let mut b = CatBuilder::new();
        b.object("A");
        b.object("B");
        b.morphism("f", "A", "B");
        b.build().unwrap()
    }

    #[test]
    fn limit_of_single_arrow_is_its_domain() {
        let amb = arrow();
        let shape = diagram_from_selection(
            &amb,
            &["A".into(), "B".into()],
            &["f".into()],
        )
        .unwrap();
        let report = limits(&amb, &shape).unwrap();
        assert_eq!(report.apexes(), vec!["A"]);
        // The limit cone's legs are id_A and f.
        let lc = &report.cones[report.limits[0].cone];
        assert_eq!(lc.legs["A"], "id_A");
        assert_eq!(lc.legs["B"], "f");
    }

    #[test]
    fn discrete_diagram_over_arrow_category() {
        let amb = arrow();
        let shape = diagram_from_selection(&amb, &["A".into(), "B".into()], &[]).unwrap();
        let report = limits(&amb, &shape).unwrap();
        // Only apex A can reach both objects; it is the product here.
        assert_eq!(report.apexes(), vec!["A"]);
    }

    #[test]
    fn idempotent_loop_defeats_uniqueness() {
        // One object with a non-identity idempotent e; the diagram containing
        // e has the cone (X; e) but both id_X and e mediate it into itself.
        let mut b = CatBuilder::new();
        b.object("X");
        b.morphism("e", "X", "X");
        b.compose("e", "e", "e");
        let amb = b.build().unwrap();
        let shape = diagram_from_selection(&amb, &["X".into()], &["e".into()]).unwrap();
        let report = limits(&amb, &shape).unwrap();
        assert_eq!(report.cones.len(), 1);
        assert!(report.limits.is_empty());
        match &report.failures[0] {
            ConeFailure::NonUniqueMediating { mediators, .. } => {
                let mut m = mediators.clone();
                m.sort();
                assert_eq!(m, vec!["e".to_string(), "id_X".to_string()]);
            }
            other => panic!("expected non-unique mediating, got {other:?}"),
        }
    }

    #[test]
    fn unclosed_selection_is_rejected() {
        let mut b = CatBuilder::new();
        b.object("A");
        b.object("B");
        b.object("C");
        b.morphism("f", "A", "B");
        b.morphism("g", "B", "C");
        b.morphism("gf", "A", "C");
        b.compose("g", "f", "gf");
        let amb = b.build().unwrap();
        let got = diagram_from_selection(
            &amb,
            &["A".into(), "B".into(), "C".into()],
            &["f".into(), "g".into()],
        );
        assert!(matches!(got, Err(Error::Domain(_))));
    }
}
