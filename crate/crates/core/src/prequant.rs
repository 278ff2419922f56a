//! Exact prequantization of the symplectic plane.
//!
//! The Poisson algebra is ℚ(i)[x, p] with the symplectic form dx ∧ dp, so
//! {f, g} = ∂ₓf ∂ₚg − ∂ₚf ∂ₓg. The Hamiltonian vector field is taken as
//!
//! ```text
//! X_f = (∂ₚf) ∂ₓ − (∂ₓf) ∂ₚ,   so   X_f(g) = −{f, g},
//! ```
//!
//! and the prequantum line bundle is the trivial bundle with connection
//! potential θ = p·dx, ∇_X = X − (i/ħ)θ(X). Acting on polynomial sections,
//! the prequantization operator comes out as the first-order operator
//!
//! ```text
//! f̂ = (ħ/i) ∇_{X_f} + f = −iħ X_f − p ∂ₚf + f.
//! ```
//!
//! With these jointly fixed conventions, the bracket-representation identity
//!
//! ```text
//! [f̂, ĝ] = iħ · ({f, g})^
//! ```
//!
//! holds **exactly for all polynomials** — not merely up to O(ħ²) — which is
//! the point of this backend: everything here runs in exact rational
//! arithmetic (ħ itself a nonzero rational, default 1) with zero tolerance.
//! In particular x̂ = x + iħ∂ₚ and p̂ = −iħ∂ₓ, so [x̂, p̂] = iħ.
//!
//! Multiplicativity is another story: f̂ĝ ≠ (fg)^ in general (prequantization
//! represents the bracket, not the product), which is exactly what the
//! negative fragment variant below exhibits at the wrong limit apex.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diffop::{DiffOp, GaussianRational, Poly2};
use crate::qcat::{MapDecl, PreQShape};
use crate::{Error, Result};

/// Polynomial on the symplectic plane; the first variable is x, the second p.
pub type PlanePolynomial = Poly2;

/// A prequantization operator: a normal-ordered polynomial coefficient
/// differential operator in (x, p).
pub type PrequantOperator = DiffOp;

/// Default total-degree budget for probe sets.
pub const DEFAULT_DMAX: u32 = 8;

/// Hard cap on the degree budget of exact verification runs.
pub const MAX_DMAX: u32 = 24;

/// The Hamiltonian vector field X_f = (∂ₚf) ∂ₓ − (∂ₓf) ∂ₚ as an operator,
/// so that X_f(g) = −{f, g}.
pub fn hamiltonian_vector_field(f: &Poly2) -> DiffOp {
    DiffOp::from_poly(&f.partial_y())
        .mul(&DiffOp::d_x())
        .sub(&DiffOp::from_poly(&f.partial_x()).mul(&DiffOp::d_y()))
}

/// The prequantization level: a fixed nonzero rational ħ.
#[derive(Debug, Clone)]
pub struct Prequantizer {
    hbar: GaussianRational,
}

impl Default for Prequantizer {
    fn default() -> Self {
        Prequantizer {
            hbar: GaussianRational::one(),
        }
    }
}

impl Prequantizer {
    /// Build a level with ħ = num/den. Both the numerator and the
    /// denominator must be nonzero: the connection carries a 1/ħ.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::Domain(format!(
                "ħ must be a nonzero rational, got {num}/{den}"
            )));
        }
        Ok(Prequantizer {
            hbar: GaussianRational::from_ratio(num, den),
        })
    }

    /// The exact deformation parameter.
    pub fn hbar(&self) -> &GaussianRational {
        &self.hbar
    }

    /// ħ as a float (for χ bookkeeping).
    pub fn hbar_f64(&self) -> f64 {
        self.hbar.to_complex64().re
    }

    /// The purely imaginary constant iħ.
    pub fn i_hbar(&self) -> GaussianRational {
        self.hbar.mul(&GaussianRational::i())
    }

    /// The prequantization operator f̂ = −iħ X_f − p ∂ₚf + f.
    pub fn prequantize(&self, f: &Poly2) -> DiffOp {
        let x_f = hamiltonian_vector_field(f);
        let scalar = f.sub(&Poly2::var_y().mul(&f.partial_y()));
        x_f.scale(&self.i_hbar().neg())
            .add(&DiffOp::from_poly(&scalar))
    }
}

/// Prequantize at the default level ħ = 1.
pub fn prequantize(f: &Poly2) -> DiffOp {
    Prequantizer::default().prequantize(f)
}

/// All monomials x^a p^b of total degree ≤ `max_degree`, with names.
pub fn monomial_probes(max_degree: u32) -> Vec<(String, Poly2)> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for a in (0..=d).rev() {
            let b = d - a;
            let mut name = String::new();
            if a > 0 {
                let _ = write!(name, "x^{a}");
            }
            if b > 0 {
                if !name.is_empty() {
                    name.push(' ');
                }
                let _ = write!(name, "p^{b}");
            }
            if name.is_empty() {
                name = "1".into();
            }
            out.push((name, Poly2::monomial(a, b, GaussianRational::one())));
        }
    }
    out
}

/// One exact check row of the representation-condition report.
#[derive(Debug, Clone, Serialize)]
pub struct DiracCheck {
    /// Which condition the row checks.
    pub check: String,
    /// The probe or probe pair it ran on.
    pub probes: Vec<String>,
    /// Term count of the residual operator — must be 0.
    pub residual_terms: usize,
    /// residual_terms == 0.
    pub pass: bool,
}

/// Exact verification report for the four defining conditions of the
/// prequantization representation.
#[derive(Debug, Clone, Serialize)]
pub struct DiracReport {
    /// The exact ħ used, rendered.
    pub hbar: String,
    /// Degree budget the probes were checked against.
    pub dmax: u32,
    /// All check rows: unit, additivity, homogeneity, commutator.
    pub checks: Vec<DiracCheck>,
    /// True when every residual has zero terms.
    pub pass: bool,
}

/// Verify, in exact rational arithmetic with zero tolerance, the four
/// defining conditions of the prequantization representation on a probe set:
///
/// 1. additivity — (f+g)^ = f̂ + ĝ on every pair;
/// 2. ℝ-homogeneity — (λf)^ = λ f̂ for fixed rationals λ ∈ {7/3, −2};
/// 3. bracket representation — [f̂, ĝ] = iħ ({f, g})^ on every pair;
/// 4. unit — 1̂ = Id.
///
/// Probes must have total degree ≤ dmax/2 (the commutator residual then
/// stays within degree dmax), and dmax itself is capped: past that the
/// exhaustive exact pass stops being a desk-scale computation.
pub fn verify_dirac_conditions(
    probes: &[(String, Poly2)],
    level: &Prequantizer,
    dmax: u32,
) -> Result<DiracReport> {
    if dmax > MAX_DMAX {
        return Err(Error::Capacity(format!(
            "degree budget {dmax} exceeds the exact-verification cap {MAX_DMAX}"
        )));
    }
    if probes.is_empty() {
        return Err(Error::Domain("need at least one probe".into()));
    }
    for (name, f) in probes {
        let d = f.degree().unwrap_or(0);
        if 2 * d > dmax {
            return Err(Error::Capacity(format!(
                "probe '{name}' has degree {d} > dmax/2 = {}",
                dmax / 2
            )));
        }
    }

    let mut checks = Vec::new();

    let unit = level.prequantize(&Poly2::one()).sub(&DiffOp::identity());
    checks.push(DiracCheck {
        check: "unit".into(),
        probes: vec!["1".into()],
        residual_terms: unit.term_count(),
        pass: unit.is_zero(),
    });

    let lambdas = [
        ("7/3", GaussianRational::from_ratio(7, 3)),
        ("-2", GaussianRational::from_int(-2)),
    ];
    let homo: Vec<DiracCheck> = probes
        .par_iter()
        .flat_map(|(name, f)| {
            lambdas
                .iter()
                .map(|(lname, lam)| {
                    let resid = level
                        .prequantize(&f.scale(lam))
                        .sub(&level.prequantize(f).scale(lam));
                    DiracCheck {
                        check: "homogeneity".into(),
                        probes: vec![name.clone(), format!("λ = {lname}")],
                        residual_terms: resid.term_count(),
                        pass: resid.is_zero(),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    checks.extend(homo);

    let pairs: Vec<(usize, usize)> = (0..probes.len())
        .flat_map(|i| (i..probes.len()).map(move |j| (i, j)))
        .collect();
    let pair_checks: Vec<DiracCheck> = pairs
        .par_iter()
        .flat_map(|&(i, j)| {
            let (fname, f) = &probes[i];
            let (gname, g) = &probes[j];
            let add_res = level
                .prequantize(&f.add(g))
                .sub(&level.prequantize(f))
                .sub(&level.prequantize(g));
            let comm_res = level
                .prequantize(f)
                .commutator(&level.prequantize(g))
                .sub(&level.prequantize(&f.poisson(g)).scale(&level.i_hbar()));
            vec![
                DiracCheck {
                    check: "additivity".into(),
                    probes: vec![fname.clone(), gname.clone()],
                    residual_terms: add_res.term_count(),
                    pass: add_res.is_zero(),
                },
                DiracCheck {
                    check: "commutator".into(),
                    probes: vec![fname.clone(), gname.clone()],
                    residual_terms: comm_res.term_count(),
                    pass: comm_res.is_zero(),
                },
            ]
        })
        .collect();
    checks.extend(pair_checks);

    let pass = checks.iter().all(|c| c.pass);
    Ok(DiracReport {
        hbar: format!("{}", level.hbar()),
        dmax,
        checks,
        pass,
    })
}

/// Term counts of the two quantization-condition residuals of a map
/// A → operators on one probe pair:
/// Q1 = map(fg) − map(f)∘map(g) and Q2 = [map(f), map(g)] − iħ·map({f, g}),
/// both exact.
pub fn condition_residual_terms(
    map: impl Fn(&Poly2) -> DiffOp,
    hbar: &GaussianRational,
    f: &Poly2,
    g: &Poly2,
) -> (usize, usize) {
    let qf = map(f);
    let qg = map(g);
    let q1 = map(&f.mul(g)).sub(&qf.mul(&qg));
    let q2 = qf
        .commutator(&qg)
        .sub(&map(&f.poisson(g)).scale(&hbar.mul(&GaussianRational::i())));
    (q1.term_count(), q2.term_count())
}

/// The three-object prequantization fragment: the polynomial algebra A, the
/// algebra T of multiplication operators, and the endomorphism algebra End
/// of polynomial sections.
///
/// Morphisms: ι : A → T (f ↦ μ_f, an isomorphism with inverse ι⁻¹, carrying
/// ħ = 0), the operator-level map T : T → End defined on multiplication
/// operators by μ_f ↦ f̂, and the prequantization P = T ∘ ι : A → End
/// carrying ħ. The index diagram is the single arrow T → End
/// (χ(T) = 0 ≤ χ(End) = |ħ|), and its limit apexes are T together with its
/// isomorph A — the conditions Q1/Q2 hold exactly there via ι.
///
/// With `include_p_inverse` a formal inverse P⁻¹ : End → A is adjoined; the
/// composite ι ∘ P⁻¹ then inverts T, every hom-set becomes a singleton, End
/// turns into a third limit apex, and Q1 fails exactly there (prequantization
/// does not respect products), which is the negative variant.
pub fn build_pq_fragment(level: &Prequantizer, include_p_inverse: bool) -> PreQShape {
    let h = level.hbar_f64();
    let algebra = "plane-polys".to_string();
    let mult = "mult-ops".to_string();
    let endos = "section-endos".to_string();
    let mut maps = vec![
        MapDecl {
            label: "iota".into(),
            dom: algebra.clone(),
            cod: mult.clone(),
            hbar: Some(Complex64::new(0.0, 0.0)),
        },
        MapDecl {
            label: "iota-inv".into(),
            dom: mult.clone(),
            cod: algebra.clone(),
            hbar: None,
        },
        MapDecl {
            label: "toep".into(),
            dom: mult.clone(),
            cod: endos.clone(),
            hbar: None,
        },
        MapDecl {
            label: "preq".into(),
            dom: algebra.clone(),
            cod: endos.clone(),
            hbar: Some(Complex64::new(h, 0.0)),
        },
    ];
    let mut compositions = vec![
        ("toep".into(), "iota".into(), "preq".into()),
        ("preq".into(), "iota-inv".into(), "toep".into()),
        ("iota-inv".into(), "iota".into(), format!("id_{algebra}")),
        ("iota".into(), "iota-inv".into(), format!("id_{mult}")),
    ];
    let mut inverses = vec![("iota".to_string(), "iota-inv".to_string())];
    if include_p_inverse {
        maps.push(MapDecl {
            label: "preq-inv".into(),
            dom: endos.clone(),
            cod: algebra.clone(),
            hbar: None,
        });
        maps.push(MapDecl {
            label: "toep-inv".into(),
            dom: endos.clone(),
            cod: mult.clone(),
            hbar: None,
        });
        compositions.extend([
            ("iota".to_string(), "preq-inv".to_string(), "toep-inv".to_string()),
            ("iota-inv".to_string(), "toep-inv".to_string(), "preq-inv".to_string()),
            ("preq-inv".to_string(), "toep".to_string(), "iota-inv".to_string()),
            ("toep-inv".to_string(), "preq".to_string(), "iota".to_string()),
            ("preq-inv".to_string(), "preq".to_string(), format!("id_{algebra}")),
            ("preq".to_string(), "preq-inv".to_string(), format!("id_{endos}")),
            ("toep-inv".to_string(), "toep".to_string(), format!("id_{mult}")),
            ("toep".to_string(), "toep-inv".to_string(), format!("id_{endos}")),
        ]);
        inverses.push(("preq".to_string(), "preq-inv".to_string()));
        inverses.push(("toep".to_string(), "toep-inv".to_string()));
    }
    PreQShape {
        algebra,
        objects: vec![mult, endos],
        maps,
        compositions,
        inverses,
    }
}
