//! Convenience builder for [`FinCategory`] fixtures.
//!
//! The builder adds an identity morphism `id_<object>` for every object and
//! fills in all identity compositions (id∘f = f, f∘id = f) automatically, so
//! fixture code only declares the genuinely informative table entries.

use std::collections::BTreeMap;

use super::{require_valid, FinCategory, MorphismDecl};
use crate::Result;

/// Incremental constructor for finite categories.
#[derive(Debug, Default, Clone)]
pub struct CatBuilder {
    objects: Vec<String>,
    morphisms: Vec<MorphismDecl>,
    comp: Vec<(String, String, String)>,
    inverses: Vec<(String, String)>,
}

impl CatBuilder {
    /// Fresh empty builder.
    pub fn new() -> Self {
        CatBuilder::default()
    }

    /// Declare an object; its identity morphism `id_<name>` is implied.
    pub fn object(&mut self, name: &str) -> &mut Self {
        self.objects.push(name.to_string());
        self
    }

    /// Declare a morphism `id: dom → cod`.
    pub fn morphism(&mut self, id: &str, dom: &str, cod: &str) -> &mut Self {
        self.morphisms.push(MorphismDecl {
            id: id.to_string(),
            dom: dom.to_string(),
            cod: cod.to_string(),
        });
        self
    }

    /// Declare the composite after∘first = result.
    pub fn compose(&mut self, after: &str, first: &str, result: &str) -> &mut Self {
        self.comp
            .push((after.to_string(), first.to_string(), result.to_string()));
        self
    }

    /// Declare `inv` as the two-sided inverse of `of`.
    pub fn inverse(&mut self, of: &str, inv: &str) -> &mut Self {
        self.inverses.push((of.to_string(), inv.to_string()));
        self
    }

    fn assemble(&self) -> Result<FinCategory> {
        let mut morphisms = self.morphisms.clone();
        let mut identities = BTreeMap::new();
        for obj in &self.objects {
            let id = format!("id_{obj}");
            identities.insert(obj.clone(), id.clone());
            morphisms.push(MorphismDecl {
                id,
                dom: obj.clone(),
                cod: obj.clone(),
            });
        }
        let mut comp = self.comp.clone();
        // Identity compositions for every morphism, including identities
        // themselves (id∘id = id). Duplicate entries with equal results are
        // tolerated by the constructor; only conflicts error.
        for m in &morphisms {
            comp.push((format!("id_{}", m.cod), m.id.clone(), m.id.clone()));
            comp.push((m.id.clone(), format!("id_{}", m.dom), m.id.clone()));
        }
        FinCategory::new(self.objects.clone(), morphisms, &identities, &comp, &self.inverses)
    }

    /// Assemble and verify all category laws.
    pub fn build(&self) -> Result<FinCategory> {
        let cat = self.assemble()?;
        require_valid(&cat)?;
        Ok(cat)
    }

    /// Assemble without checking the laws (for fixtures that exercise the
    /// validator on broken tables).
    pub fn build_unchecked(&self) -> Result<FinCategory> {
        self.assemble()
    }
}
