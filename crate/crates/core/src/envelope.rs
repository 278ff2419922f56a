//! Universal-envelope realization of the plane Poisson algebra inside the
//! algebra of polynomial differential operators.
//!
//! The polynomial Poisson algebra 𝒜 = ℂ[x, y] with bracket {x, y} = 1 admits
//! two structure-preserving representations into the operator algebra U on
//! ℂ[x, y]:
//!
//! * α₀(f) = μ_f, the multiplication operator — an associative-algebra map
//!   for the commutative product: α₀(f·g) = α₀(f)∘α₀(g);
//! * β₀(f) = X_f = (∂ₓf)·∂ᵧ − (∂ᵧf)·∂ₓ, the derivation attached to f — a
//!   Lie-algebra map for the bracket: [β₀(f), β₀(g)] = β₀({f, g}).
//!
//! The two interact through two exact identities that hold term-for-term in
//! the normal-ordered operator algebra (no truncation, no tolerance):
//!
//! * derivation compatibility: [β₀(a), α₀(b)] = α₀({a, b});
//! * product rule:             β₀(a·b) = α₀(a)∘β₀(b) + α₀(b)∘β₀(a).
//!
//! The four operators (X₁, X₂, Y₁, Y₂) = (α₀(x), α₀(y), β₀(y), −β₀(x))
//! satisfy the canonical commutation relations [Xᵢ, Yⱼ] = δᵢⱼ·Id,
//! [Xᵢ, Xⱼ] = [Yᵢ, Yⱼ] = 0, and their ordered monomials are linearly
//! independent: degree d contributes C(d+3, 3) basis elements, e.g. 10 at
//! d = 2. [`verify_weyl_isomorphism`] checks both facts with exact rational
//! arithmetic.
//!
//! [`build_env_fragment`] packages the situation as a small category: the
//! algebra object is viewed through a product-only object and a bracket-only
//! object, each represented into the operator object, giving two *distinct*
//! parallel quantization maps out of the algebra — one with ħ = 0 (the
//! multiplicative route) and one with ħ = 1/i (the derivation route, found
//! from [β₀f, β₀g] = i·ħ·β₀({f,g})), so the operator object has χ = 1.
//! Because the two parallel maps disagree, no strict cone over the index
//! diagram exists; [`analyze_env_limit`] reports the exhaustive cone
//! enumeration alongside the weaker candidate analysis (which objects map
//! into every diagram object, and whether the multiplicative route can
//! reproduce the derivation route) that singles out the algebra itself.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::diffop::{DiffOp, GaussianRational, Poly2};
use crate::fincat;
use crate::qcat::{MapDecl, PreQShape};
use crate::{Error, Result};

/// Largest polynomial degree accepted by the exact verification routines.
pub const MAX_ENV_DEGREE: u32 = 6;

/// Ambient-category object names used by [`build_env_fragment`].
pub const OBJ_ALGEBRA: &str = "poisson-polys";
/// The algebra seen with its commutative product only.
pub const OBJ_PRODUCT: &str = "product-polys";
/// The algebra seen with its bracket structure.
pub const OBJ_BRACKET: &str = "bracket-polys";
/// The differential-operator algebra.
pub const OBJ_WEYL: &str = "weyl-ops";

/// Multiplication-operator representation α₀(f) = μ_f.
pub fn alpha0(f: &Poly2) -> DiffOp {
    DiffOp::from_poly(f)
}

/// Derivation representation β₀(f) = (∂ₓf)·∂ᵧ − (∂ᵧf)·∂ₓ, so that
/// β₀(f) applied to g yields {f, g}.
pub fn beta0(f: &Poly2) -> DiffOp {
    let fx = DiffOp::from_poly(&f.partial_x());
    let fy = DiffOp::from_poly(&f.partial_y());
    fx.mul(&DiffOp::d_y()).sub(&fy.mul(&DiffOp::d_x()))
}

/// The canonical quadruple (X₁, X₂, Y₁, Y₂) = (α₀(x), α₀(y), β₀(y), −β₀(x)),
/// satisfying [Xᵢ, Yⱼ] = δᵢⱼ·Id with all other brackets zero.
pub fn canonical_generators() -> [(String, DiffOp); 4] {
    let x = Poly2::var_x();
    let y = Poly2::var_y();
    [
        ("X1".to_string(), alpha0(&x)),
        ("X2".to_string(), alpha0(&y)),
        ("Y1".to_string(), beta0(&y)),
        ("Y2".to_string(), beta0(&x).neg()),
    ]
}

/// One exact identity instance: the residual operator must vanish
/// identically, so `residual_terms` counts its nonzero normal-ordered terms.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    /// Which structural identity was tested.
    pub identity: String,
    /// First argument (displayed polynomial).
    pub a: String,
    /// Second argument (displayed polynomial).
    pub b: String,
    /// Nonzero terms left in the residual; 0 means the identity is exact.
    pub residual_terms: usize,
    /// True iff the residual is the zero operator.
    pub pass: bool,
}

/// Outcome of the exact structure-identity battery.
#[derive(Debug, Clone, Serialize)]
pub struct EnvIdentityReport {
    /// Largest monomial degree fed into the identities.
    pub max_degree: u32,
    /// Every identity instance, in deterministic order.
    pub checks: Vec<IdentityCheck>,
    /// Number of failing instances.
    pub failures: usize,
    /// True iff every instance is exactly zero.
    pub pass: bool,
}

fn monomials_up_to(max_degree: u32) -> Vec<(String, Poly2)> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for a in (0..=d).rev() {
            let b = d - a;
            let m = Poly2::monomial(a, b, GaussianRational::one());
            out.push((format!("{}", m), m));
        }
    }
    out
}

/// Verify, term-for-term in exact rational arithmetic, that the two defining
/// identities of the pair (α₀, β₀) — derivation compatibility and the product
/// rule — hold on all monomial pairs up to `max_degree`, together with the
/// supporting laws (α₀ multiplicative, images of α₀ commuting, β₀ a bracket
/// homomorphism).
///
/// Degrees above [`MAX_ENV_DEGREE`] are refused with a capacity error.
pub fn verify_structure_identities(max_degree: u32) -> Result<EnvIdentityReport> {
    if max_degree > MAX_ENV_DEGREE {
        return Err(Error::Capacity(format!(
            "structure identities are verified exactly only up to degree {MAX_ENV_DEGREE}; got {max_degree}"
        )));
    }
    let mons = monomials_up_to(max_degree);
    let mut checks = Vec::new();
    let mut push = |identity: &str, a: &str, b: &str, residual: DiffOp| {
        checks.push(IdentityCheck {
            identity: identity.to_string(),
            a: a.to_string(),
            b: b.to_string(),
            residual_terms: residual.term_count(),
            pass: residual.is_zero(),
        });
    };
    for (i, (na, pa)) in mons.iter().enumerate() {
        for (nb, pb) in mons.iter().skip(i) {
            let (aa, ab) = (alpha0(pa), alpha0(pb));
            let (ba, bb) = (beta0(pa), beta0(pb));
            let prod = pa.mul(pb);
            let bracket = pa.poisson(pb);

            // α₀(ab) − α₀(a)∘α₀(b)
            push("product-rep", na, nb, alpha0(&prod).sub(&aa.mul(&ab)));
            // [α₀(a), α₀(b)]
            push("rep-commute", na, nb, aa.commutator(&ab));
            // [β₀(a), α₀(b)] − α₀({a,b}), in both argument orders
            push(
                "derivation-compat",
                na,
                nb,
                ba.commutator(&ab).sub(&alpha0(&bracket)),
            );
            if na != nb {
                push(
                    "derivation-compat",
                    nb,
                    na,
                    bb.commutator(&aa).sub(&alpha0(&bracket.neg())),
                );
            }
            // β₀(ab) − α₀(a)∘β₀(b) − α₀(b)∘β₀(a)
            push(
                "product-rule",
                na,
                nb,
                beta0(&prod).sub(&aa.mul(&bb)).sub(&ab.mul(&ba)),
            );
            // [β₀(a), β₀(b)] − β₀({a,b})
            push(
                "bracket-rep",
                na,
                nb,
                ba.commutator(&bb).sub(&beta0(&bracket)),
            );
        }
    }
    let failures = checks.iter().filter(|c| !c.pass).count();
    Ok(EnvIdentityReport {
        max_degree,
        pass: failures == 0,
        failures,
        checks,
    })
}

/// One canonical commutation relation between generator monomials.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    /// The commutator that was formed, e.g. "[X1, Y1]".
    pub lhs: String,
    /// What it must equal ("Id" or "0").
    pub expected: String,
    /// Nonzero terms in the residual.
    pub residual_terms: usize,
    /// True iff the relation holds exactly.
    pub pass: bool,
}

/// Size audit of one homogeneous degree of the generated operator algebra.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeCount {
    /// Homogeneous degree of the generator monomials.
    pub degree: u32,
    /// Number of ordered generator monomials, C(degree+3, 3).
    pub monomials: usize,
    /// Exact linear rank of their images among differential operators.
    pub rank: usize,
    /// True iff rank == monomials (no collapse).
    pub pass: bool,
}

/// Outcome of [`verify_weyl_isomorphism`].
#[derive(Debug, Clone, Serialize)]
pub struct WeylIsoReport {
    /// Largest homogeneous degree audited.
    pub max_degree: u32,
    /// All pairwise canonical commutation relations.
    pub relations: Vec<RelationCheck>,
    /// Per-degree monomial counts versus measured rank.
    pub counts: Vec<DegreeCount>,
    /// True iff every relation and every count check passed.
    pub pass: bool,
}

fn op_pow(op: &DiffOp, n: u32) -> DiffOp {
    let mut out = DiffOp::identity();
    for _ in 0..n {
        out = out.mul(op);
    }
    out
}

/// Exact rank over ℚ(i) of a family of operators, by sparse Gaussian
/// elimination on their normal-ordered coefficient rows.
fn exact_rank(ops: &[DiffOp]) -> usize {
    let mut rows: Vec<BTreeMap<(u32, u32, u32, u32), GaussianRational>> = ops
        .iter()
        .map(|op| op.terms().map(|(k, c)| (*k, c.clone())).collect())
        .collect();
    let mut rank = 0;
    while let Some(pos) = rows.iter().position(|r| !r.is_empty()) {
        let pivot_row = rows.swap_remove(pos);
        rank += 1;
        let (pivot_key, pivot_val) = pivot_row.iter().next().expect("nonempty row");
        let inv = pivot_val.inv().expect("pivot is nonzero");
        for row in rows.iter_mut() {
            if let Some(c) = row.get(pivot_key).cloned() {
                let factor = c.mul(&inv);
                for (k, v) in &pivot_row {
                    let delta = factor.mul(v).neg();
                    let entry = row.entry(*k).or_insert_with(GaussianRational::zero);
                    let sum = entry.add(&delta);
                    if sum.is_zero() {
                        row.remove(k);
                    } else {
                        *entry = sum;
                    }
                }
            }
        }
    }
    rank
}

fn choose(n: u64, k: u64) -> u64 {
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Check that (α₀(x), α₀(y), β₀(y), −β₀(x)) generate a copy of the canonical
/// operator algebra on two generators pairs: the commutation relations
/// [Xᵢ, Yⱼ] = δᵢⱼ·Id hold exactly, and for each homogeneous degree d ≤
/// `max_degree` the C(d+3, 3) ordered generator monomials stay linearly
/// independent (exact rank over ℚ(i)).
///
/// Degrees above [`MAX_ENV_DEGREE`] are refused with a capacity error.
pub fn verify_weyl_isomorphism(max_degree: u32) -> Result<WeylIsoReport> {
    if max_degree > MAX_ENV_DEGREE {
        return Err(Error::Capacity(format!(
            "generated-basis audit is bounded at degree {MAX_ENV_DEGREE}; got {max_degree}"
        )));
    }
    if max_degree == 0 {
        return Err(Error::Domain(
            "generated-basis audit needs max_degree ≥ 1".to_string(),
        ));
    }
    let gens = canonical_generators();
    let mut relations = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            // Generators are ordered (X1, X2, Y1, Y2); the conjugate pairs
            // are (0, 2) and (1, 3).
            let canonical = (i, j) == (0, 2) || (i, j) == (1, 3);
            let expected = if canonical {
                DiffOp::identity()
            } else {
                DiffOp::zero()
            };
            let residual = gens[i].1.commutator(&gens[j].1).sub(&expected);
            relations.push(RelationCheck {
                lhs: format!("[{}, {}]", gens[i].0, gens[j].0),
                expected: if canonical { "Id" } else { "0" }.to_string(),
                residual_terms: residual.term_count(),
                pass: residual.is_zero(),
            });
        }
    }

    let mut counts = Vec::new();
    for d in 0..=max_degree {
        let mut ops = Vec::new();
        for a in 0..=d {
            for b in 0..=(d - a) {
                for c in 0..=(d - a - b) {
                    let e = d - a - b - c;
                    let op = op_pow(&gens[0].1, a)
                        .mul(&op_pow(&gens[1].1, b))
                        .mul(&op_pow(&gens[2].1, c))
                        .mul(&op_pow(&gens[3].1, e));
                    ops.push(op);
                }
            }
        }
        let expected = choose(u64::from(d) + 3, 3) as usize;
        debug_assert_eq!(ops.len(), expected);
        let rank = exact_rank(&ops);
        counts.push(DegreeCount {
            degree: d,
            monomials: ops.len(),
            rank,
            pass: rank == expected && ops.len() == expected,
        });
    }

    let pass = relations.iter().all(|r| r.pass) && counts.iter().all(|c| c.pass);
    Ok(WeylIsoReport {
        max_degree,
        relations,
        counts,
        pass,
    })
}

/// An endomorphism of the operator algebra, given by the images of the four
/// canonical building blocks (μ_x, μ_y, ∂ₓ, ∂ᵧ) and extended to arbitrary
/// normal-ordered operators by substitution.
///
/// Substitution is an algebra map exactly when the images satisfy the same
/// commutation relations as the originals; [`WeylEndo::respects_relations`]
/// checks this, and [`build_env_fragment`] refuses targets that fail it.
#[derive(Clone)]
pub struct WeylEndo {
    /// Short name used in object and morphism labels.
    pub name: String,
    /// Images of (μ_x, μ_y, ∂ₓ, ∂ᵧ), in that order.
    pub images: [DiffOp; 4],
}

impl WeylEndo {
    /// The linear symplectic rotation (μ_x, μ_y, ∂ₓ, ∂ᵧ) ↦ (μ_y, −μ_x, ∂ᵧ, −∂ₓ).
    pub fn rotation() -> WeylEndo {
        WeylEndo {
            name: "rot".to_string(),
            images: [
                alpha0(&Poly2::var_y()),
                alpha0(&Poly2::var_x()).neg(),
                DiffOp::d_y(),
                DiffOp::d_x().neg(),
            ],
        }
    }

    /// True iff the generator images satisfy the canonical relations
    /// [∂ᵤ, μᵤ] = Id, with all other pairs commuting.
    pub fn respects_relations(&self) -> bool {
        let [mx, my, dx, dy] = &self.images;
        let id = DiffOp::identity();
        dx.commutator(mx).sub(&id).is_zero()
            && dy.commutator(my).sub(&id).is_zero()
            && dx.commutator(my).is_zero()
            && dy.commutator(mx).is_zero()
            && mx.commutator(my).is_zero()
            && dx.commutator(dy).is_zero()
    }

    /// Substitute the generator images into a normal-ordered operator.
    pub fn apply(&self, op: &DiffOp) -> DiffOp {
        let [mx, my, dx, dy] = &self.images;
        let mut out = DiffOp::zero();
        for ((a, b, cx, cy), coeff) in op.terms() {
            let image = op_pow(mx, *a)
                .mul(&op_pow(my, *b))
                .mul(&op_pow(dx, *cx))
                .mul(&op_pow(dy, *cy));
            out = out.add(&image.scale(coeff));
        }
        out
    }
}

/// The envelope fragment: its category shape plus the operator-level
/// endomorphism targets that were adjoined.
pub struct EnvFragment {
    /// Declarative category data (objects, maps with ħ, composition table).
    pub shape: PreQShape,
    /// The validated sample targets, in declaration order.
    pub targets: Vec<WeylEndo>,
}

/// Build the category fragment around the two representations.
///
/// Base objects: the algebra (`poisson-polys`), its product-only view
/// (`product-polys`), its bracket view (`bracket-polys`), and the operator
/// algebra (`weyl-ops`). Base maps: the two views (ħ = 0), the
/// representations `mult-rep` (from the product view) and `deriv-rep` (from
/// the bracket view), and their composites `mult-quant` (ħ = 0) and
/// `deriv-quant` (ħ = 1/i) out of the algebra.
///
/// Each sample target adjoins an object `weyl-ops-<name>`, the connecting
/// map `h-<name>`, and the four composites through it. Targets must preserve
/// the canonical commutation relations and act multiplicatively; violations
/// are reported as consistency errors.
pub fn build_env_fragment(targets: &[WeylEndo]) -> Result<EnvFragment> {
    for t in targets {
        if !t.respects_relations() {
            return Err(Error::Consistency(format!(
                "sample target '{}' breaks the canonical commutation relations; substitution would not be an algebra map",
                t.name
            )));
        }
        // Spot-check multiplicativity of substitution on mixed products.
        let probes = [
            alpha0(&Poly2::var_x()),
            beta0(&Poly2::var_y()),
            alpha0(&Poly2::var_x().mul(&Poly2::var_y())),
            beta0(&Poly2::monomial(2, 0, GaussianRational::one())),
        ];
        for p in &probes {
            for q in &probes {
                let lhs = t.apply(&p.mul(q));
                let rhs = t.apply(p).mul(&t.apply(q));
                if !lhs.sub(&rhs).is_zero() {
                    return Err(Error::Consistency(format!(
                        "sample target '{}' is not multiplicative on operator products",
                        t.name
                    )));
                }
            }
        }
    }

    let zero = Complex64::new(0.0, 0.0);
    // From [β₀f, β₀g] = β₀({f,g}) = i·ħ·β₀({f,g}) with i·ħ = 1: ħ = 1/i = −i.
    let recip_i = Complex64::new(0.0, -1.0);

    let mut objects = vec![
        OBJ_PRODUCT.to_string(),
        OBJ_BRACKET.to_string(),
        OBJ_WEYL.to_string(),
    ];
    let mut maps = vec![
        MapDecl {
            label: "view-product".to_string(),
            dom: OBJ_ALGEBRA.to_string(),
            cod: OBJ_PRODUCT.to_string(),
            hbar: Some(zero),
        },
        MapDecl {
            label: "view-bracket".to_string(),
            dom: OBJ_ALGEBRA.to_string(),
            cod: OBJ_BRACKET.to_string(),
            hbar: Some(zero),
        },
        MapDecl {
            label: "mult-rep".to_string(),
            dom: OBJ_PRODUCT.to_string(),
            cod: OBJ_WEYL.to_string(),
            hbar: None,
        },
        MapDecl {
            label: "deriv-rep".to_string(),
            dom: OBJ_BRACKET.to_string(),
            cod: OBJ_WEYL.to_string(),
            hbar: None,
        },
        MapDecl {
            label: "mult-quant".to_string(),
            dom: OBJ_ALGEBRA.to_string(),
            cod: OBJ_WEYL.to_string(),
            hbar: Some(zero),
        },
        MapDecl {
            label: "deriv-quant".to_string(),
            dom: OBJ_ALGEBRA.to_string(),
            cod: OBJ_WEYL.to_string(),
            hbar: Some(recip_i),
        },
    ];
    let mut compositions = vec![
        (
            "mult-rep".to_string(),
            "view-product".to_string(),
            "mult-quant".to_string(),
        ),
        (
            "deriv-rep".to_string(),
            "view-bracket".to_string(),
            "deriv-quant".to_string(),
        ),
    ];

    for t in targets {
        let obj = format!("{OBJ_WEYL}-{}", t.name);
        let h = format!("h-{}", t.name);
        let mult_rep = format!("mult-rep-{}", t.name);
        let deriv_rep = format!("deriv-rep-{}", t.name);
        let mult_quant = format!("mult-quant-{}", t.name);
        let deriv_quant = format!("deriv-quant-{}", t.name);
        objects.push(obj.clone());
        maps.push(MapDecl {
            label: h.clone(),
            dom: OBJ_WEYL.to_string(),
            cod: obj.clone(),
            hbar: None,
        });
        maps.push(MapDecl {
            label: mult_rep.clone(),
            dom: OBJ_PRODUCT.to_string(),
            cod: obj.clone(),
            hbar: None,
        });
        maps.push(MapDecl {
            label: deriv_rep.clone(),
            dom: OBJ_BRACKET.to_string(),
            cod: obj.clone(),
            hbar: None,
        });
        maps.push(MapDecl {
            label: mult_quant.clone(),
            dom: OBJ_ALGEBRA.to_string(),
            cod: obj.clone(),
            hbar: Some(zero),
        });
        maps.push(MapDecl {
            label: deriv_quant.clone(),
            dom: OBJ_ALGEBRA.to_string(),
            cod: obj.clone(),
            hbar: Some(recip_i),
        });
        compositions.push((h.clone(), "mult-rep".to_string(), mult_rep.clone()));
        compositions.push((h.clone(), "deriv-rep".to_string(), deriv_rep.clone()));
        compositions.push((h.clone(), "mult-quant".to_string(), mult_quant.clone()));
        compositions.push((h.clone(), "deriv-quant".to_string(), deriv_quant.clone()));
        compositions.push((mult_rep, "view-product".to_string(), mult_quant));
        compositions.push((deriv_rep, "view-bracket".to_string(), deriv_quant));
    }

    let shape = PreQShape {
        algebra: OBJ_ALGEBRA.to_string(),
        objects,
        maps,
        compositions,
        inverses: Vec::new(),
    };
    // Fail fast if the declarative data does not close into a category.
    shape.ambient_category()?;
    Ok(EnvFragment {
        shape,
        targets: targets.to_vec(),
    })
}

/// Limit analysis of the envelope fragment.
#[derive(Debug, Clone, Serialize)]
pub struct EnvLimitReport {
    /// χ of the operator object (must be 1: the derivation route has |ħ| = 1).
    pub chi_weyl: f64,
    /// Objects admitting at least one morphism to every diagram object.
    pub candidates: Vec<String>,
    /// Operator-level witness that the two quantization routes differ
    /// (their values on x·y are different operators).
    pub parallel_quantizations_distinct: bool,
    /// Whether some f: algebra → product view satisfies
    /// mult-rep ∘ f = deriv-quant; false rejects the product view as an apex.
    pub commutative_factorization_exists: bool,
    /// The apex selected by the candidate analysis, when it is decisive.
    pub selected_apex: Option<String>,
    /// Apexes found by exhaustive strict cone enumeration (empty here: the
    /// two distinct parallel maps into the operator object kill every cone).
    pub strict_cone_apexes: Vec<String>,
    /// Number of strict cones over the index diagram.
    pub strict_cones_found: usize,
    /// True iff the candidate analysis selects exactly the algebra object.
    pub pass: bool,
}

/// Run both limit procedures on an envelope fragment: exhaustive strict cone
/// enumeration (which finds none, because the fragment carries two distinct
/// parallel maps algebra → operator object) and the candidate analysis that
/// selects the algebra: it is the only object mapping into every diagram
/// object, and the product-only view is rejected because no morphism f with
/// mult-rep ∘ f = deriv-quant exists.
pub fn analyze_env_limit(shape: &PreQShape) -> Result<EnvLimitReport> {
    let indexed = shape.build_index_and_diagram()?;
    let ambient = &indexed.ambient;
    let chi_weyl = *indexed.chi.get(OBJ_WEYL).ok_or_else(|| {
        Error::Domain(format!("fragment has no '{OBJ_WEYL}' object"))
    })?;

    let mut diagram_objects: Vec<&String> = indexed.diagram.object_map.values().collect();
    diagram_objects.sort();
    diagram_objects.dedup();

    let candidates: Vec<String> = ambient
        .objects()
        .iter()
        .filter(|obj| {
            diagram_objects
                .iter()
                .all(|d| !ambient.hom(obj, d).is_empty())
        })
        .cloned()
        .collect();

    let xy = Poly2::var_x().mul(&Poly2::var_y());
    let parallel_quantizations_distinct = !alpha0(&xy).sub(&beta0(&xy)).is_zero()
        && ambient.hom(&shape.algebra, OBJ_WEYL).len() >= 2;

    let commutative_factorization_exists = ambient
        .hom(&shape.algebra, OBJ_PRODUCT)
        .iter()
        .any(|f| ambient.compose("mult-rep", f) == Some("deriv-quant"));

    let strict = fincat::limits(ambient, &indexed.diagram)?;
    let strict_cone_apexes: Vec<String> =
        strict.apexes().into_iter().map(str::to_string).collect();

    let decisive = candidates == vec![shape.algebra.clone()]
        && parallel_quantizations_distinct
        && !commutative_factorization_exists;
    let selected_apex = decisive.then(|| shape.algebra.clone());

    Ok(EnvLimitReport {
        chi_weyl,
        candidates,
        parallel_quantizations_distinct,
        commutative_factorization_exists,
        pass: selected_apex.as_deref() == Some(shape.algebra.as_str()) && chi_weyl == 1.0,
        selected_apex,
        strict_cone_apexes,
        strict_cones_found: strict.cones.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(a: u32, b: u32) -> Poly2 {
        Poly2::monomial(a, b, GaussianRational::one())
    }

    #[test]
    fn derivation_images_of_coordinates() {
        assert!(beta0(&Poly2::one()).is_zero());
        assert!(beta0(&Poly2::var_x()).sub(&DiffOp::d_y()).is_zero());
        assert!(beta0(&Poly2::var_y()).add(&DiffOp::d_x()).is_zero());
        // β₀(x²) = 2x·∂ᵧ.
        let expected = DiffOp::term(1, 0, 0, 1, GaussianRational::from_int(2));
        assert!(beta0(&mono(2, 0)).sub(&expected).is_zero());
    }

    #[test]
    fn derivation_applied_to_polynomial_gives_bracket() {
        let f = mono(2, 1);
        let g = mono(1, 3).add(&Poly2::var_x());
        let via_op = beta0(&f).apply(&g);
        let via_bracket = f.poisson(&g);
        assert!(via_op.sub(&via_bracket).is_zero());
    }

    #[test]
    fn structure_identities_are_exact_to_degree_four() {
        let report = verify_structure_identities(4).expect("in range");
        assert!(report.pass, "failures: {}", report.failures);
        assert!(report.checks.iter().all(|c| c.residual_terms == 0));
        // 15 monomials to degree 4; all five identity families present.
        assert!(report.checks.len() > 15 * 16 / 2 * 5 - 200);
    }

    #[test]
    fn structure_identities_refuse_excess_degree() {
        assert!(matches!(
            verify_structure_identities(7),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn canonical_relations_and_basis_counts() {
        let report = verify_weyl_isomorphism(3).expect("in range");
        assert!(report.pass);
        assert_eq!(report.relations.len(), 6);
        let counts: Vec<usize> = report.counts.iter().map(|c| c.monomials).collect();
        assert_eq!(counts, vec![1, 4, 10, 20]);
        assert!(report.counts.iter().all(|c| c.rank == c.monomials));
        assert!(matches!(
            verify_weyl_isomorphism(7),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn exact_rank_detects_dependence() {
        let a = DiffOp::term(1, 0, 0, 0, GaussianRational::one());
        let b = DiffOp::term(0, 1, 0, 0, GaussianRational::one());
        let sum = a.add(&b).scale(&GaussianRational::from_ratio(3, 2));
        assert_eq!(exact_rank(&[a.clone(), b.clone(), sum]), 2);
        assert_eq!(exact_rank(&[a, b]), 2);
        assert_eq!(exact_rank(&[DiffOp::zero()]), 0);
    }

    #[test]
    fn rotation_target_is_accepted_and_broken_target_refused() {
        assert!(WeylEndo::rotation().respects_relations());
        let fragment = build_env_fragment(&[WeylEndo::rotation()]).expect("valid");
        assert_eq!(fragment.shape.objects.len(), 4);

        let broken = WeylEndo {
            name: "broken".to_string(),
            images: [
                alpha0(&Poly2::var_x()),
                alpha0(&Poly2::var_y()),
                DiffOp::d_x(),
                DiffOp::d_x(),
            ],
        };
        assert!(matches!(
            build_env_fragment(&[broken]),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn rotation_substitution_preserves_commutators() {
        let rot = WeylEndo::rotation();
        let p = alpha0(&mono(1, 1));
        let q = beta0(&mono(2, 0));
        let lhs = rot.apply(&p.commutator(&q));
        let rhs = rot.apply(&p).commutator(&rot.apply(&q));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn fragment_limit_analysis_selects_algebra() {
        let fragment = build_env_fragment(&[]).expect("valid");
        let report = analyze_env_limit(&fragment.shape).expect("analyzable");
        assert_eq!(report.chi_weyl, 1.0);
        assert_eq!(report.candidates, vec![OBJ_ALGEBRA.to_string()]);
        assert!(report.parallel_quantizations_distinct);
        assert!(!report.commutative_factorization_exists);
        assert_eq!(report.selected_apex.as_deref(), Some(OBJ_ALGEBRA));
        assert!(report.strict_cone_apexes.is_empty());
        assert_eq!(report.strict_cones_found, 0);
        assert!(report.pass);
    }

    #[test]
    fn fragment_with_target_still_selects_algebra() {
        let fragment = build_env_fragment(&[WeylEndo::rotation()]).expect("valid");
        let indexed = fragment.shape.build_index_and_diagram().expect("builds");
        assert_eq!(indexed.chi["weyl-ops-rot"], 1.0);
        let report = analyze_env_limit(&fragment.shape).expect("analyzable");
        assert_eq!(report.selected_apex.as_deref(), Some(OBJ_ALGEBRA));
        assert!(report.pass);
    }
}
