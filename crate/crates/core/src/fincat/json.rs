//! JSON interchange format for categories and diagrams.
//!
//! ```json
//! {
//!   "objects": ["A", "B"],
//!   "morphisms": [{"id": "f", "dom": "A", "cod": "B"}, ...],
//!   "identities": {"A": "id_A", "B": "id_B"},
//!   "comp": [{"after": "id_B", "first": "f", "result": "f"}, ...],
//!   "inverses": [{"of": "f", "inv": "g"}],
//!   "diagram": {"objects": ["A"], "morphisms": []}
//! }
//! ```
//!
//! `inverses` and `diagram` are optional. The `comp` table must be explicit —
//! identity compositions included. Saving normalizes entry order (objects and
//! morphisms as declared, `comp` sorted by declaration indices, `identities`
//! sorted by object id), so load → save → load is the identity and a saved
//! file re-saves byte-for-byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FinCategory, MorphismDecl};
use crate::Result;

/// One composition table entry: result = after∘first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompEntry {
    /// Outer morphism g.
    pub after: String,
    /// Inner morphism f.
    pub first: String,
    /// The composite g∘f.
    pub result: String,
}

/// One declared inverse pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseEntry {
    /// The morphism declared invertible.
    pub of: String,
    /// Its two-sided inverse.
    pub inv: String,
}

/// Optional sub-diagram selection inside a category file: the subset of
/// objects and (non-identity) morphisms spanning the diagram whose limit is
/// to be computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSelection {
    /// Object ids of the diagram.
    pub objects: Vec<String>,
    /// Morphism ids of the diagram (identities of the selected objects are
    /// implied and need not be listed).
    pub morphisms: Vec<String>,
}

/// On-disk representation of a category (plus optional diagram selection).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryFile {
    /// Object ids.
    pub objects: Vec<String>,
    /// Morphism declarations.
    pub morphisms: Vec<MorphismDecl>,
    /// Object id -> identity morphism id.
    pub identities: BTreeMap<String, String>,
    /// The full composition table.
    pub comp: Vec<CompEntry>,
    /// Declared inverse pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inverses: Vec<InverseEntry>,
    /// Optional diagram selection for limit computations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<DiagramSelection>,
}

impl CategoryFile {
    /// Resolve the file into a [`FinCategory`] (no law check).
    pub fn to_category(&self) -> Result<FinCategory> {
        let comp: Vec<(String, String, String)> = self
            .comp
            .iter()
            .map(|e| (e.after.clone(), e.first.clone(), e.result.clone()))
            .collect();
        let inverses: Vec<(String, String)> = self
            .inverses
            .iter()
            .map(|e| (e.of.clone(), e.inv.clone()))
            .collect();
        FinCategory::new(
            self.objects.clone(),
            self.morphisms.clone(),
            &self.identities,
            &comp,
            &inverses,
        )
    }

    /// Snapshot a category (and optional diagram selection) into file form.
    pub fn from_category(cat: &FinCategory, diagram: Option<DiagramSelection>) -> CategoryFile {
        let identities = cat
            .objects()
            .iter()
            .map(|o| {
                let oi = cat.object_index(o).expect("own object");
                (o.clone(), cat.morphism_id(cat.identity_idx(oi)).to_string())
            })
            .collect();
        let comp = cat
            .comp_entries()
            .map(|(g, f, h)| CompEntry {
                after: cat.morphism_id(g).to_string(),
                first: cat.morphism_id(f).to_string(),
                result: cat.morphism_id(h).to_string(),
            })
            .collect();
        let inverses = cat
            .inverse_pairs()
            .into_iter()
            .map(|(of, inv)| InverseEntry {
                of: of.to_string(),
                inv: inv.to_string(),
            })
            .collect();
        CategoryFile {
            objects: cat.objects().to_vec(),
            morphisms: cat.morphisms().to_vec(),
            identities,
            comp,
            inverses,
            diagram,
        }
    }

    /// Serialize in the normalized pretty form used by [`save_category`].
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Read and parse a category file.
pub fn load_category(path: &Path) -> Result<CategoryFile> {
    let text = std::fs::read_to_string(path)?;
    let file: CategoryFile = serde_json::from_str(&text)?;
    Ok(file)
}

/// Write a category file in normalized form.
pub fn save_category(path: &Path, file: &CategoryFile) -> Result<()> {
    std::fs::write(path, file.to_json_string()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::CatBuilder;

    fn sample() -> FinCategory {
        let mut b = CatBuilder::new();
        b.object("A");
        b.object("B");
        b.morphism("f", "A", "B");
        b.morphism("w", "B", "A");
        b.compose("w", "f", "id_A");
        b.compose("f", "w", "id_B");
        b.inverse("f", "w");
        b.build().unwrap()
    }

    #[test]
    fn roundtrip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        let file0 = CategoryFile::from_category(&sample(), None);
        save_category(&path, &file0).unwrap();

        let file1 = load_category(&path).unwrap();
        assert_eq!(file0, file1);

        // Saving what was loaded reproduces the bytes exactly.
        let bytes0 = std::fs::read(&path).unwrap();
        let path2 = dir.path().join("cat2.json");
        save_category(&path2, &file1).unwrap();
        let bytes1 = std::fs::read(&path2).unwrap();
        assert_eq!(bytes0, bytes1);

        // And the resolved categories agree.
        let cat1 = file1.to_category().unwrap();
        assert_eq!(cat1, sample());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"objects": ["A"], "morphisms": [], "identities": {}, "comp": [], "typo": 1}"#;
        let got: std::result::Result<CategoryFile, _> = serde_json::from_str(text);
        assert!(got.is_err());
    }

    #[test]
    fn diagram_block_survives_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.json");
        let sel = DiagramSelection {
            objects: vec!["A".into(), "B".into()],
            morphisms: vec!["f".into()],
        };
        let file0 = CategoryFile::from_category(&sample(), Some(sel));
        save_category(&path, &file0).unwrap();
        let file1 = load_category(&path).unwrap();
        assert_eq!(file0, file1);
        assert!(file1.diagram.is_some());
    }

    #[test]
    fn malformed_json_is_a_json_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{ not json").unwrap();
        assert!(matches!(load_category(&path), Err(crate::Error::Json(_))));
    }
}
