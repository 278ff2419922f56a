//! Regenerate the category files shipped under `fixtures/`.
//!
//! Usage: `cargo run -p quantcat --example generate_fixtures [-- <dir>]`
//! (default directory `fixtures`). Output is byte-stable: re-running the
//! generator must leave a clean checkout unchanged.

use std::collections::BTreeSet;
use std::path::Path;

use quantcat::fincat::{CatBuilder, CategoryFile, DiagramSelection};
use quantcat::prequant::{build_pq_fragment, Prequantizer};
use quantcat::propsuite;
use quantcat::qcat::PreQShape;
use quantcat::Result;

/// Resolve a quantization-family shape into a category file whose `diagram`
/// block selects the χ-ordered index diagram.
fn shape_with_diagram(shape: &PreQShape) -> Result<CategoryFile> {
    let indexed = shape.build_index_and_diagram()?;
    let objects: Vec<String> = indexed.diagram.object_map.values().cloned().collect();
    let morphisms: Vec<String> = indexed
        .diagram
        .morphism_map
        .iter()
        .filter(|(j_id, _)| !j_id.starts_with("id_"))
        .map(|(_, ambient_id)| ambient_id.clone())
        .collect();
    // Dedup while keeping deterministic order.
    let mut seen = BTreeSet::new();
    let morphisms: Vec<String> = morphisms
        .into_iter()
        .filter(|m| seen.insert(m.clone()))
        .collect();
    Ok(CategoryFile::from_category(
        &indexed.ambient,
        Some(DiagramSelection { objects, morphisms }),
    ))
}

fn main() -> Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fixtures".into());
    let dir = Path::new(&dir);
    std::fs::create_dir_all(dir)?;

    // The three-object closure-table category: a triangle with one
    // invertible side, closed under composition (20 defined cells).
    let closure = propsuite::closure_category()?;
    quantcat::fincat::save_category(
        &dir.join("table-closure.json"),
        &CategoryFile::from_category(&closure, None),
    )?;

    // Two isolated objects; the selected discrete diagram has no cone at
    // all, so `limit` on this file reports no limit and exits 1.
    let mut b = CatBuilder::new();
    b.object("X");
    b.object("Y");
    let discrete = b.build()?;
    quantcat::fincat::save_category(
        &dir.join("discrete-pair.json"),
        &CategoryFile::from_category(
            &discrete,
            Some(DiagramSelection {
                objects: vec!["X".into(), "Y".into()],
                morphisms: vec![],
            }),
        ),
    )?;

    // Matrix-regularization fragment restricted to a single level, and the
    // matching single-level deformation fragment: an equivalent pair.
    quantcat::fincat::save_category(
        &dir.join("mr-pointwise.json"),
        &shape_with_diagram(&propsuite::mr_restricted_shape(8, false))?,
    )?;
    quantcat::fincat::save_category(
        &dir.join("dq-pointwise.json"),
        &shape_with_diagram(&propsuite::dq_restricted_shape(5, false))?,
    )?;

    // Prequantization fragment; its diagram has limit apexes at the algebra
    // and at the multiplication-operator object.
    quantcat::fincat::save_category(
        &dir.join("pq-fragment.json"),
        &shape_with_diagram(&build_pq_fragment(&Prequantizer::default(), false))?,
    )?;

    println!("wrote fixtures into {}", dir.display());
    Ok(())
}
