//! Categorical equivalence on small finite categories, decided exhaustively.
//!
//! `decide_equivalence(A, B)` enumerates every functor F: A → B and G: B → A
//! (object assignments in lexicographic order, morphism images constrained to
//! the matching hom-sets, with early composition pruning), then searches for
//! natural isomorphisms η: Id_A ⇒ G∘F and ε: F∘G ⇒ Id_B by enumerating iso
//! components with naturality pruning. The first witness found is returned;
//! if the whole search space is exhausted, the refusal carries the search
//! counts as its certificate. Inputs beyond [`MAX_EQUIV_OBJECTS`] objects or
//! [`MAX_EQUIV_MORPHISMS`] morphisms per side are rejected with a capacity
//! error, which is distinct from a non-equivalence verdict.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_functor, FinCategory, FunctorData};
use crate::{Error, Result};

/// Largest object count per category accepted by the decision procedure.
pub const MAX_EQUIV_OBJECTS: usize = 6;

/// Largest morphism count per category accepted by the decision procedure.
pub const MAX_EQUIV_MORPHISMS: usize = 16;

/// Cap on enumerated functors per direction.
const FUNCTOR_ENUM_CAP: usize = 250_000;

/// A verified equivalence: both functors and both natural isomorphisms.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceWitness {
    /// F: A → B.
    pub forward: FunctorData,
    /// G: B → A.
    pub backward: FunctorData,
    /// Components η_X: X → G(F(X)), one iso per object of A.
    pub unit: BTreeMap<String, String>,
    /// Components ε_Y: F(G(Y)) → Y, one iso per object of B.
    pub counit: BTreeMap<String, String>,
}

/// Exhaustion certificate for a non-equivalence verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SearchStats {
    /// Valid functors A → B.
    pub functors_forward: u64,
    /// Valid functors B → A.
    pub functors_backward: u64,
    /// Functor pairs for which a natural-isomorphism search ran.
    pub pairs_tested: u64,
    /// True when every pair was tested without finding a witness.
    pub exhausted: bool,
}

/// Outcome of the decision procedure.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict")]
pub enum EquivalenceOutcome {
    /// The categories are equivalent; here is a witness.
    Equivalent {
        /// The verified witness.
        witness: Box<EquivalenceWitness>,
        /// Search effort up to the moment the witness was found.
        stats: SearchStats,
    },
    /// The categories are not equivalent; the search space was exhausted.
    NotEquivalent {
        /// The exhaustion certificate.
        stats: SearchStats,
    },
}

impl EquivalenceOutcome {
    /// True for the `Equivalent` variant.
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceOutcome::Equivalent { .. })
    }
}

/// A functor in index form: object images and morphism images by index.
#[derive(Debug, Clone)]
struct IdxFunctor {
    ob: Vec<usize>,
    mor: Vec<usize>,
}

impl IdxFunctor {
    fn to_data(&self, dom: &FinCategory, cod: &FinCategory) -> FunctorData {
        FunctorData {
            object_map: dom
                .objects()
                .iter()
                .enumerate()
                .map(|(i, o)| (o.clone(), cod.objects()[self.ob[i]].clone()))
                .collect(),
            morphism_map: dom
                .morphisms()
                .iter()
                .enumerate()
                .map(|(i, m)| (m.id.clone(), cod.morphism_id(self.mor[i]).to_string()))
                .collect(),
        }
    }
}

/// Decide whether two finite categories are equivalent.
pub fn decide_equivalence(a: &FinCategory, b: &FinCategory) -> Result<EquivalenceOutcome> {
    for (name, cat) in [("first", a), ("second", b)] {
        if cat.objects().len() > MAX_EQUIV_OBJECTS {
            return Err(Error::Capacity(format!(
                "{name} category has {} objects (decision budget is {MAX_EQUIV_OBJECTS})",
                cat.objects().len()
            )));
        }
        if cat.morphisms().len() > MAX_EQUIV_MORPHISMS {
            return Err(Error::Capacity(format!(
                "{name} category has {} morphisms (decision budget is {MAX_EQUIV_MORPHISMS})",
                cat.morphisms().len()
            )));
        }
        super::require_valid(cat)?;
    }

    let forward = enumerate_functors(a, b)?;
    let backward = enumerate_functors(b, a)?;
    let mut stats = SearchStats {
        functors_forward: forward.len() as u64,
        functors_backward: backward.len() as u64,
        pairs_tested: 0,
        exhausted: false,
    };

    for f in &forward {
        for g in &backward {
            stats.pairs_tested += 1;
            let unit = match natural_iso(a, |x| g.ob[f.ob[x]], |m| g.mor[f.mor[m]], true) {
                Some(u) => u,
                None => continue,
            };
            let counit = match natural_iso(b, |y| f.ob[g.ob[y]], |m| f.mor[g.mor[m]], false) {
                Some(c) => c,
                None => continue,
            };
            let witness = EquivalenceWitness {
                forward: f.to_data(a, b),
                backward: g.to_data(b, a),
                unit: a
                    .objects()
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (o.clone(), a.morphism_id(unit[i]).to_string()))
                    .collect(),
                counit: b
                    .objects()
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (o.clone(), b.morphism_id(counit[i]).to_string()))
                    .collect(),
            };
            debug_assert!(check_functor(a, b, &witness.forward).is_valid());
            debug_assert!(check_functor(b, a, &witness.backward).is_valid());
            return Ok(EquivalenceOutcome::Equivalent {
                witness: Box::new(witness),
                stats,
            });
        }
    }
    stats.exhausted = true;
    Ok(EquivalenceOutcome::NotEquivalent { stats })
}

/// Cap on DFS nodes visited while assigning morphism images.
const ASSIGN_NODE_CAP: u64 = 5_000_000;

/// Enumerate all functors dom → cod in deterministic order.
fn enumerate_functors(dom: &FinCategory, cod: &FinCategory) -> Result<Vec<IdxFunctor>> {
    let n_ob = dom.objects().len();
    let n_mor = dom.morphisms().len();
    let cod_ob = cod.objects().len();
    let mut out = Vec::new();
    if n_ob > 0 && cod_ob == 0 {
        return Ok(out); // no functors into the empty category
    }

    // Non-identity morphisms get free assignments; identities are forced.
    let free: Vec<usize> = (0..n_mor)
        .filter(|m| dom.identity_idx(dom.dom_idx(*m)) != *m || dom.dom_idx(*m) != dom.cod_idx(*m))
        .collect();
    let comp: Vec<(usize, usize, usize)> = dom.comp_entries().collect();

    let mut ob = vec![0usize; n_ob];
    let mut nodes: u64 = 0;
    loop {
        // Fill forced morphism images (identities) and try the free ones.
        let mut mor = vec![usize::MAX; n_mor];
        let mut feasible = true;
        for (oi, &img) in ob.iter().enumerate() {
            mor[dom.identity_idx(oi)] = cod.identity_idx(img);
        }
        let mut cands: Vec<Vec<usize>> = Vec::with_capacity(free.len());
        for &m in &free {
            let c = cod.hom_idx(ob[dom.dom_idx(m)], ob[dom.cod_idx(m)]);
            if c.is_empty() {
                feasible = false;
                break;
            }
            cands.push(c);
        }
        if feasible {
            let start = out.len();
            assign_free(cod, &free, &cands, &comp, &mut mor, 0, &mut out, &mut nodes)?;
            for fu in out[start..].iter_mut() {
                fu.ob = ob.clone();
            }
            if out.len() > FUNCTOR_ENUM_CAP {
                return Err(Error::Capacity(format!(
                    "functor enumeration exceeded {FUNCTOR_ENUM_CAP} candidates"
                )));
            }
        }

        // Advance the object assignment (mixed-radix counter).
        if n_ob == 0 {
            return Ok(out);
        }
        let mut k = 0;
        loop {
            ob[k] += 1;
            if ob[k] < cod_ob {
                break;
            }
            ob[k] = 0;
            k += 1;
            if k == n_ob {
                return Ok(out);
            }
        }
    }
}

/// DFS over images of the free morphisms with composition pruning.
#[allow(clippy::too_many_arguments)]
fn assign_free(
    cod: &FinCategory,
    free: &[usize],
    cands: &[Vec<usize>],
    comp: &[(usize, usize, usize)],
    mor: &mut Vec<usize>,
    t: usize,
    out: &mut Vec<IdxFunctor>,
    nodes: &mut u64,
) -> Result<()> {
    if t == free.len() {
        // Every comp entry has all participants assigned; final full check.
        for &(g, f, h) in comp {
            if cod.compose_idx(mor[g], mor[f]) != Some(mor[h]) {
                return Ok(());
            }
        }
        out.push(IdxFunctor {
            ob: Vec::new(), // caller stamps the object assignment
            mor: mor.clone(),
        });
        return Ok(());
    }
    'next: for &img in &cands[t] {
        *nodes += 1;
        if *nodes > ASSIGN_NODE_CAP {
            return Err(Error::Capacity(format!(
                "functor search exceeded {ASSIGN_NODE_CAP} nodes"
            )));
        }
        mor[free[t]] = img;
        for &(g, f, h) in comp {
            if mor[g] == usize::MAX || mor[f] == usize::MAX || mor[h] == usize::MAX {
                continue;
            }
            if cod.compose_idx(mor[g], mor[f]) != Some(mor[h]) {
                continue 'next;
            }
        }
        assign_free(cod, free, cands, comp, mor, t + 1, out, nodes)?;
    }
    mor[free[t]] = usize::MAX;
    Ok(())
}

/// Search for a natural isomorphism between the identity functor on `cat`
/// and the endofunctor given by `t_ob`/`t_mor` (T = G∘F on A, or F∘G on B).
///
/// With `unit = true`, components go η_X: X → T(X) and naturality is
/// T(m)∘η_X = η_Y∘m; with `unit = false`, components go ε_X: T(X) → X and
/// naturality is m∘ε_X = ε_Y∘T(m). Components must be isomorphisms.
fn natural_iso(
    cat: &FinCategory,
    t_ob: impl Fn(usize) -> usize,
    t_mor: impl Fn(usize) -> usize,
    unit: bool,
) -> Option<Vec<usize>> {
    let n_ob = cat.objects().len();
    let cands: Vec<Vec<usize>> = (0..n_ob)
        .map(|x| {
            if unit {
                cat.isos_idx(x, t_ob(x))
            } else {
                cat.isos_idx(t_ob(x), x)
            }
        })
        .collect();
    if cands.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut comp = vec![usize::MAX; n_ob];
    search_components(cat, &t_mor, unit, &cands, &mut comp, 0)
}

fn search_components(
    cat: &FinCategory,
    t_mor: &impl Fn(usize) -> usize,
    unit: bool,
    cands: &[Vec<usize>],
    comp: &mut Vec<usize>,
    x: usize,
) -> Option<Vec<usize>> {
    if x == cands.len() {
        return Some(comp.clone());
    }
    'next: for &c in &cands[x] {
        comp[x] = c;
        // Check naturality on every morphism whose endpoints are assigned.
        for m in 0..cat.morphisms().len() {
            let d = cat.dom_idx(m);
            let cc = cat.cod_idx(m);
            if d.max(cc) > x {
                continue;
            }
            let (lhs, rhs) = if unit {
                (
                    cat.compose_idx(t_mor(m), comp[d]),
                    cat.compose_idx(comp[cc], m),
                )
            } else {
                (
                    cat.compose_idx(m, comp[d]),
                    cat.compose_idx(comp[cc], t_mor(m)),
                )
            };
            if lhs.is_none() || lhs != rhs {
                continue 'next;
            }
        }
        if let Some(found) = search_components(cat, t_mor, unit, cands, comp, x + 1) {
            return Some(found);
        }
    }
    comp[x] = usize::MAX;
    None
}
