//! Glue between quantization families and the finite-category kernel.
//!
//! A family of quantization maps out of one commutative Poisson algebra is
//! described at two levels:
//!
//! * **Shape level** ([`PreQShape`]): pure category data — object names,
//!   morphism names with their deformation parameters ħ, declared composites
//!   and inverses. From this the noncommutative character
//!   χ(M) = max{|ħ(T)| : T: 𝒜 → M} of every object is computed, and the index
//!   category J is carved out of the ambient category: J keeps every object
//!   except the algebra and one arrow per ambient morphism u: M → N with
//!   χ(M) ≤ χ(N) (endomorphism loops included). The inclusion J → ambient is
//!   returned as a [`DiagramShape`] ready for [`fincat::limits`].
//!
//! * **Numeric level** ([`MatrixFamily`]): concrete matrix realizations, one
//!   level per ħ, with connecting maps between levels. The verifiers measure
//!   the defining conditions quantitatively: residual decay of the bracket
//!   condition ‖[Q(f), Q(g)] − iħ Q({f, g})‖ at rate ħ^(1+ε) (slope fitted in
//!   log–log coordinates), multiplicativity and bracket conditions at a limit
//!   realization, block-diagonal structure of connectors with respect to the
//!   image of the quantized function space, and consistency of connector
//!   chains.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::fincat::{self, CatBuilder, DiagramShape, FinCategory};
use crate::numerics::{self, CMatrix};
use crate::{Error, Result};

/// Residuals at or below this are treated as exact zeros: they carry no decay
/// information and are excluded from slope fits.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

/// Minimum number of informative points for a slope fit.
pub const MIN_FIT_POINTS: usize = 4;

/// One morphism of a quantization-family shape.
#[derive(Debug, Clone, Serialize)]
pub struct MapDecl {
    /// Morphism id.
    pub label: String,
    /// Domain object id.
    pub dom: String,
    /// Codomain object id.
    pub cod: String,
    /// Deformation parameter ħ; required for maps out of the algebra,
    /// optional elsewhere.
    pub hbar: Option<Complex64>,
}

/// Shape-level description of a quantization family: the commutative algebra,
/// its target objects, all morphisms, and the declared composites.
#[derive(Debug, Clone, Serialize)]
pub struct PreQShape {
    /// Object id of the Poisson algebra.
    pub algebra: String,
    /// The remaining objects.
    pub objects: Vec<String>,
    /// All non-identity morphisms.
    pub maps: Vec<MapDecl>,
    /// Declared composites (after, first, result).
    pub compositions: Vec<(String, String, String)>,
    /// Declared inverse pairs (of, inv).
    pub inverses: Vec<(String, String)>,
}

/// Ambient category, character table, and index diagram built from a shape.
#[derive(Debug, Clone)]
pub struct IndexedDiagram {
    /// The ambient category (algebra + targets).
    pub ambient: FinCategory,
    /// χ per object (the algebra gets 0).
    pub chi: BTreeMap<String, f64>,
    /// The inclusion of the index category J into the ambient category.
    pub diagram: DiagramShape,
}

impl PreQShape {
    /// Assemble the ambient category and check the category laws.
    pub fn ambient_category(&self) -> Result<FinCategory> {
        let mut b = CatBuilder::new();
        b.object(&self.algebra);
        for o in &self.objects {
            b.object(o);
        }
        for m in &self.maps {
            if m.dom == self.algebra && m.hbar.is_none() {
                return Err(Error::Domain(format!(
                    "quantization map '{}' out of the algebra has no ħ",
                    m.label
                )));
            }
            b.morphism(&m.label, &m.dom, &m.cod);
        }
        for (g, f, h) in &self.compositions {
            b.compose(g, f, h);
        }
        for (of, inv) in &self.inverses {
            b.inverse(of, inv);
        }
        b.build()
    }

    /// Noncommutative character χ(M) = max{|ħ(T)| : T: 𝒜 → M} per object.
    ///
    /// The algebra itself has χ = 0 (its identity has ħ = 0). Objects with no
    /// incoming quantization map get χ = 0 as well, which the index-category
    /// construction treats like any other value.
    pub fn chi(&self) -> BTreeMap<String, f64> {
        let mut chi: BTreeMap<String, f64> = BTreeMap::new();
        chi.insert(self.algebra.clone(), 0.0);
        for o in &self.objects {
            chi.insert(o.clone(), 0.0);
        }
        for m in &self.maps {
            if m.dom == self.algebra {
                if let Some(h) = m.hbar {
                    let e = chi.entry(m.cod.clone()).or_insert(0.0);
                    *e = e.max(h.norm());
                }
            }
        }
        chi
    }

    /// Build the ambient category, χ table, and the index diagram J → ambient.
    pub fn build_index_and_diagram(&self) -> Result<IndexedDiagram> {
        let ambient = self.ambient_category()?;
        let chi = self.chi();
        // J-objects: everything except the algebra. J-arrows: ambient
        // morphisms between J-objects with χ(dom) ≤ χ(cod).
        let jobjects: Vec<String> = self.objects.clone();
        let jmorphisms: Vec<String> = self
            .maps
            .iter()
            .filter(|m| {
                m.dom != self.algebra
                    && m.cod != self.algebra
                    && chi[&m.dom] <= chi[&m.cod]
            })
            .map(|m| m.label.clone())
            .collect();
        let diagram = fincat::diagram_from_selection(&ambient, &jobjects, &jmorphisms)?;
        Ok(IndexedDiagram {
            ambient,
            chi,
            diagram,
        })
    }
}

/// Least-squares slope of ln(y) against ln(x), ignoring pairs at or below the
/// residual floor. Returns None when fewer than [`MIN_FIT_POINTS`] informative
/// points remain.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts = informative_points(xs, ys);
    slope_of_points(&pts)
}

/// Asymptotic decay-order estimator: least-squares log–log slope over the
/// second half of the informative points.
///
/// Level sweeps start far from the asymptotic regime — for the matrix
/// quantizations here the local decay order at the smallest levels is
/// provably near zero even though the true asymptotic order is 1 — so the
/// first half of the sweep is treated as burn-in and the rate is fitted on
/// the tail. The window rule is fixed (max(4, ⌈n/2⌉) trailing points) and
/// applies uniformly to every residual column; it is never tuned per series.
pub fn fit_tail_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts = informative_points(xs, ys);
    if pts.len() < MIN_FIT_POINTS {
        return None;
    }
    let window = MIN_FIT_POINTS.max(pts.len().div_ceil(2));
    slope_of_points(&pts[pts.len() - window..])
}

fn informative_points(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter()
        .zip(ys.iter())
        .filter(|(x, y)| **x > 0.0 && **y > RESIDUAL_FLOOR)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect()
}

fn slope_of_points(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < MIN_FIT_POINTS {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// One matrix realization level of a family.
pub struct FamilyLevel<E> {
    /// Level label (e.g. the matrix size).
    pub label: String,
    /// Deformation parameter of this level's quantization map.
    pub hbar: f64,
    /// Matrix dimension.
    pub dim: usize,
    /// The quantization map itself.
    pub quantize: Box<dyn Fn(&E) -> CMatrix + Sync>,
}

/// A connecting map between two levels (finer source, coarser destination).
pub struct Connector {
    /// Index of the source level.
    pub src: usize,
    /// Index of the destination level.
    pub dst: usize,
    /// The linear map on matrices.
    pub apply: Box<dyn Fn(&CMatrix) -> CMatrix + Sync>,
}

/// A family of matrix quantizations of one Poisson algebra, with its algebra
/// operations and a finite function-space basis for span computations.
pub struct MatrixFamily<E> {
    /// Name of the underlying algebra (reporting only).
    pub algebra: String,
    /// The realization levels, ordered by decreasing ħ.
    pub levels: Vec<FamilyLevel<E>>,
    /// Connecting maps between levels.
    pub connectors: Vec<Connector>,
    /// Pairs of connector indices declared mutually inverse.
    pub inverse_pairs: Vec<(usize, usize)>,
    /// Pointwise product of the algebra.
    pub mul: Box<dyn Fn(&E, &E) -> E + Sync>,
    /// Sum in the algebra.
    pub add: Box<dyn Fn(&E, &E) -> E + Sync>,
    /// Scalar multiple in the algebra.
    pub scale: Box<dyn Fn(&E, Complex64) -> E + Sync>,
    /// Poisson bracket of the algebra.
    pub bracket: Box<dyn Fn(&E, &E) -> E + Sync>,
    /// Sup norm on the algebra.
    pub sup_norm: Box<dyn Fn(&E) -> f64 + Sync>,
    /// Named basis of the finite function space carried by the family.
    pub basis: Vec<(String, E)>,
}

impl<E> MatrixFamily<E> {
    /// Find the connector from one level to another, if declared.
    pub fn connector(&self, src: usize, dst: usize) -> Option<&Connector> {
        self.connectors.iter().find(|c| c.src == src && c.dst == dst)
    }
}

/// Residual decay fit for one probe pair.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    /// Names of the probe pair (f, g).
    pub pair: (String, String),
    /// (ħ, residual) per level.
    pub points: Vec<(f64, f64)>,
    /// Fitted log–log slope, when enough informative points exist.
    pub slope: Option<f64>,
    /// Required minimum slope.
    pub threshold: f64,
    /// True when the slope meets the threshold, or all residuals sit at the
    /// exactness floor.
    pub pass: bool,
}

/// ħ re-estimated from the commutator data of one level.
#[derive(Debug, Clone, Serialize)]
pub struct HbarEstimate {
    /// Level label.
    pub level: String,
    /// Declared ħ.
    pub declared: f64,
    /// Least-squares estimate from [Q(f), Q(g)] ≈ iħ Q({f, g}).
    pub estimated: f64,
    /// True when the estimate deviates more than 5 % from the declaration.
    pub warn: bool,
}

/// One structural check inside [`PreQReport`].
#[derive(Debug, Clone, Serialize)]
pub struct StructuralCheck {
    /// What was checked.
    pub name: String,
    /// Whether it held.
    pub pass: bool,
    /// Human-readable detail.
    pub detail: String,
}

/// Everything `verify_preq` measures.
#[derive(Debug, Clone, Serialize)]
pub struct PreQReport {
    /// Linearity, coverage, bracket, and inverse checks.
    pub structural: Vec<StructuralCheck>,
    /// The ħ^(1+ε) decay fits per probe pair.
    pub slope_fits: Vec<SlopeFit>,
    /// Per-level ħ re-estimation diagnostics.
    pub hbar_estimates: Vec<HbarEstimate>,
    /// ε used in the decay threshold.
    pub epsilon: f64,
    /// Overall verdict.
    pub pass: bool,
}

/// Verify the defining conditions of a quantization family on probe data.
///
/// Structural items: each quantization map is complex-linear on probe
/// combinations; every level carries a quantization map; the commutator
/// bracket on every level is antisymmetric; declared connector inverse pairs
/// compose to the identity. Quantitative item: for every unordered probe
/// pair, ‖[Q(f), Q(g)] − iħ Q({f, g})‖ must decay like ħ^(1+ε), i.e. the
/// fitted log–log slope must be ≥ 1 + ε − 0.1 (a 0.1 fitting margin), unless
/// all residuals already sit at the exactness floor.
pub fn verify_preq<E>(
    family: &MatrixFamily<E>,
    probes: &[(String, E)],
    epsilon: f64,
    tol: f64,
) -> Result<PreQReport> {
    if family.levels.is_empty() {
        return Err(Error::Domain("family has no levels".into()));
    }
    if probes.len() < 2 {
        return Err(Error::Domain("need at least two probes".into()));
    }
    let mut structural = Vec::new();

    // Linearity: Q(αf + βg) = αQ(f) + βQ(g) on the first two probes, at
    // every level, with fixed nontrivial coefficients.
    let mut lin_worst: f64 = 0.0;
    let (alpha, beta) = (Complex64::new(2.0, 0.0), Complex64::new(-1.0 / 3.0, 0.0));
    for level in &family.levels {
        let f = &probes[0].1;
        let g = &probes[1].1;
        let combo = (family.add)(&(family.scale)(f, alpha), &(family.scale)(g, beta));
        let lhs = (level.quantize)(&combo);
        let rhs = (level.quantize)(f)
            .scale(alpha)
            .add(&(level.quantize)(g).scale(beta))?;
        lin_worst = lin_worst.max(lhs.sub(&rhs)?.max_abs());
    }
    structural.push(StructuralCheck {
        name: "linearity".into(),
        pass: lin_worst <= tol,
        detail: format!("worst defect {lin_worst:.3e} on αf + βg probes"),
    });

    structural.push(StructuralCheck {
        name: "coverage".into(),
        pass: !family.levels.is_empty(),
        detail: format!(
            "{} levels, each with a quantization map out of '{}'",
            family.levels.len(),
            family.algebra
        ),
    });

    // Commutator bracket antisymmetry on the first probe pair, every level.
    let mut bracket_ok = true;
    let mut bracket_detail = String::new();
    for level in &family.levels {
        let qf = (level.quantize)(&probes[0].1);
        let qg = (level.quantize)(&probes[1].1);
        let ab = numerics::commutator(&qf, &qg)?;
        let ba = numerics::commutator(&qg, &qf)?;
        let defect = ab.add(&ba)?.max_abs();
        if defect > tol {
            bracket_ok = false;
            bracket_detail = format!("antisymmetry defect {defect:.3e} at level {}", level.label);
            break;
        }
    }
    structural.push(StructuralCheck {
        name: "commutator-bracket".into(),
        pass: bracket_ok,
        detail: if bracket_ok {
            "noncommutative levels carry the antisymmetric commutator bracket".into()
        } else {
            bracket_detail
        },
    });

    // Declared inverse pairs of connectors.
    let mut inv_ok = true;
    let mut inv_detail = format!("{} declared pairs", family.inverse_pairs.len());
    for (ci, cj) in &family.inverse_pairs {
        let c1 = &family.connectors[*ci];
        let c2 = &family.connectors[*cj];
        if c1.src != c2.dst || c1.dst != c2.src {
            inv_ok = false;
            inv_detail = format!("pair ({ci}, {cj}) endpoints do not match");
            break;
        }
        for (name, e) in &family.basis {
            let x = (family.levels[c1.src].quantize)(e);
            let roundtrip = (c2.apply)(&(c1.apply)(&x));
            let defect = roundtrip.sub(&x)?.max_abs();
            if defect > tol {
                inv_ok = false;
                inv_detail = format!("pair ({ci}, {cj}) fails on basis '{name}': {defect:.3e}");
                break;
            }
        }
    }
    structural.push(StructuralCheck {
        name: "declared-inverses".into(),
        pass: inv_ok,
        detail: inv_detail,
    });

    // The ħ^(1+ε) decay condition per unordered probe pair.
    let threshold = 1.0 + epsilon - 0.1;
    let mut slope_fits = Vec::new();
    for i in 0..probes.len() {
        for j in (i + 1)..probes.len() {
            let (fname, f) = &probes[i];
            let (gname, g) = &probes[j];
            let br = (family.bracket)(f, g);
            let mut points = Vec::new();
            for level in &family.levels {
                let qf = (level.quantize)(f);
                let qg = (level.quantize)(g);
                let qbr = (level.quantize)(&br);
                let lhs = numerics::commutator(&qf, &qg)?;
                let rhs = qbr.scale(Complex64::new(0.0, level.hbar));
                let residual = numerics::operator_norm(&lhs.sub(&rhs)?).value;
                points.push((level.hbar, residual));
            }
            let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
            let slope = fit_loglog_slope(&xs, &ys);
            let all_floor = ys.iter().all(|y| *y <= RESIDUAL_FLOOR);
            let pass = all_floor || slope.map(|s| s >= threshold).unwrap_or(false);
            slope_fits.push(SlopeFit {
                pair: (fname.clone(), gname.clone()),
                points,
                slope,
                threshold,
                pass,
            });
        }
    }

    // ħ re-estimation: least squares over all probe pairs per level.
    let mut hbar_estimates = Vec::new();
    for level in &family.levels {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..probes.len() {
            for j in (i + 1)..probes.len() {
                let br = (family.bracket)(&probes[i].1, &probes[j].1);
                let qf = (level.quantize)(&probes[i].1);
                let qg = (level.quantize)(&probes[j].1);
                let qbr = (level.quantize)(&br).scale(Complex64::new(0.0, 1.0));
                let comm = numerics::commutator(&qf, &qg)?;
                num += qbr.frobenius_inner(&comm)?.re;
                den += qbr.frobenius_norm().powi(2);
            }
        }
        let estimated = if den > 0.0 { num / den } else { 0.0 };
        let warn = if level.hbar != 0.0 {
            ((estimated - level.hbar) / level.hbar).abs() > 0.05
        } else {
            estimated.abs() > tol
        };
        hbar_estimates.push(HbarEstimate {
            level: level.label.clone(),
            declared: level.hbar,
            estimated,
            warn,
        });
    }

    let pass = structural.iter().all(|s| s.pass) && slope_fits.iter().all(|s| s.pass);
    Ok(PreQReport {
        structural,
        slope_fits,
        hbar_estimates,
        epsilon,
        pass,
    })
}

/// Residuals of the two quantization conditions for one probe pair.
#[derive(Debug, Clone, Serialize)]
pub struct QuantCondRow {
    /// First probe.
    pub f: String,
    /// Second probe.
    pub g: String,
    /// ‖Q(f·g) − Q(f)Q(g)‖.
    pub q1_residual: f64,
    /// ‖[Q(f), Q(g)] − iħ Q({f, g})‖.
    pub q2_residual: f64,
}

/// Multiplicativity (Q1) and bracket (Q2) conditions at one realization.
#[derive(Debug, Clone, Serialize)]
pub struct QuantCondReport {
    /// ħ of the realization under test.
    pub hbar: Complex64,
    /// Per-pair residuals.
    pub rows: Vec<QuantCondRow>,
    /// Tolerance applied.
    pub tol: f64,
    /// True when every residual is within tolerance.
    pub pass: bool,
}

/// Check, at a single matrix realization Q with parameter ħ, the conditions
/// (Q1) Q(f·g) = Q(f)Q(g) and (Q2) [Q(f), Q(g)] = iħ Q({f, g}) on every
/// ordered probe pair.
pub fn verify_quantization_conditions<E>(
    mul: impl Fn(&E, &E) -> E,
    bracket: impl Fn(&E, &E) -> E,
    quantize: impl Fn(&E) -> CMatrix,
    hbar: Complex64,
    probes: &[(String, E)],
    tol: f64,
) -> Result<QuantCondReport> {
    let mut rows = Vec::new();
    for (fname, f) in probes {
        for (gname, g) in probes {
            let qf = quantize(f);
            let qg = quantize(g);
            let q1 = quantize(&mul(f, g)).sub(&qf.matmul(&qg)?)?;
            let q2 = numerics::commutator(&qf, &qg)?
                .sub(&quantize(&bracket(f, g)).scale(Complex64::new(0.0, 1.0) * hbar))?;
            rows.push(QuantCondRow {
                f: fname.clone(),
                g: gname.clone(),
                q1_residual: numerics::operator_norm(&q1).value,
                q2_residual: numerics::operator_norm(&q2).value,
            });
        }
    }
    let pass = rows
        .iter()
        .all(|r| r.q1_residual <= tol && r.q2_residual <= tol);
    Ok(QuantCondReport {
        hbar,
        rows,
        tol,
        pass,
    })
}

/// Block structure of one connector with respect to the quantized function
/// space: writing the source and destination in the split im(Q) ⊕ im(Q)^⊥,
/// the connector must be (T¹¹, 0; 0, T²²) with vanishing off-diagonal blocks.
#[derive(Debug, Clone, Serialize)]
pub struct BlockDiagonalReport {
    /// Source level label.
    pub src: String,
    /// Destination level label.
    pub dst: String,
    /// Dimension of the quantized span at the source.
    pub src_span_dim: usize,
    /// Dimension of the quantized span at the destination.
    pub dst_span_dim: usize,
    /// ‖(1 − P_dst) · C · P_src‖ — leakage out of the span.
    pub off_block_lower: f64,
    /// ‖P_dst · C · (1 − P_src)‖ — pickup from the complement.
    pub off_block_upper: f64,
    /// Operator norm of the diagonal block T¹¹.
    pub diag_block_norm: f64,
    /// Tolerance applied to the off-diagonal blocks.
    pub tol: f64,
    /// True when both off-diagonal blocks vanish within tolerance.
    pub pass: bool,
}

/// Measure the block structure of `connector` against the family basis.
pub fn verify_block_diagonal<E>(
    family: &MatrixFamily<E>,
    connector: &Connector,
    tol: f64,
) -> Result<BlockDiagonalReport> {
    let src = &family.levels[connector.src];
    let dst = &family.levels[connector.dst];
    let (ns, nd) = (src.dim, dst.dim);

    let vec_of = |m: &CMatrix| -> Vec<Complex64> { m.as_slice().to_vec() };
    let span_matrix = |level: &FamilyLevel<E>| -> CMatrix {
        let cols: Vec<Vec<Complex64>> = family
            .basis
            .iter()
            .map(|(_, e)| vec_of(&(level.quantize)(e)))
            .collect();
        CMatrix::from_fn(level.dim * level.dim, cols.len(), |i, j| cols[j][i])
    };
    let u_src = numerics::column_span_basis(&span_matrix(src), 1e-10);
    let u_dst = numerics::column_span_basis(&span_matrix(dst), 1e-10);

    // Materialize the connector as a matrix on vectorized inputs.
    let c = {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(ns * ns);
        for a in 0..ns {
            for b in 0..ns {
                let mut e = CMatrix::zeros(ns, ns);
                e.set(a, b, Complex64::new(1.0, 0.0));
                cols.push(vec_of(&(connector.apply)(&e)));
            }
        }
        CMatrix::from_fn(nd * nd, ns * ns, |i, j| cols[j][i])
    };

    // C restricted to the span: thin products keep everything small.
    let c_usrc = c.matmul(&u_src)?; // (nd² × m)
    let proj_dst = u_dst.matmul(&u_dst.dagger().matmul(&c_usrc)?)?;
    let off_lower = numerics::operator_norm(&c_usrc.sub(&proj_dst)?).value;

    // C on the complement of the span, projected back onto the span.
    let c_minus = c.sub(&c_usrc.matmul(&u_src.dagger())?)?; // C(1 − P_src)
    let off_upper = numerics::operator_norm(&u_dst.dagger().matmul(&c_minus)?).value;

    let diag = u_dst.dagger().matmul(&c_usrc)?;
    let pass = off_lower <= tol && off_upper <= tol;
    Ok(BlockDiagonalReport {
        src: src.label.clone(),
        dst: dst.label.clone(),
        src_span_dim: u_src.ncols(),
        dst_span_dim: u_dst.ncols(),
        off_block_lower: off_lower,
        off_block_upper: off_upper,
        diag_block_norm: numerics::operator_norm(&diag).value,
        tol,
        pass,
    })
}

/// Consistency of one connector triple.
#[derive(Debug, Clone, Serialize)]
pub struct ChainTriple {
    /// Labels of the three levels (fine, middle, coarse).
    pub levels: (String, String, String),
    /// ‖C_mc ∘ C_fm − C_fc‖ as an operator norm on vectorized matrices.
    pub residual: f64,
}

/// Report of `verify_chain_consistency`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    /// Every checked triple.
    pub triples: Vec<ChainTriple>,
    /// Tolerance applied.
    pub tol: f64,
    /// True when every triple is consistent.
    pub pass: bool,
}

/// For every level triple (fine f, middle m, coarse c) whose three connectors
/// are declared, verify ‖C_mc ∘ C_fm − C_fc‖ ≤ tol in operator norm.
pub fn verify_chain_consistency<E>(family: &MatrixFamily<E>, tol: f64) -> Result<ChainReport> {
    let materialize = |conn: &Connector| -> CMatrix {
        let ns = family.levels[conn.src].dim;
        let nd = family.levels[conn.dst].dim;
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(ns * ns);
        for a in 0..ns {
            for b in 0..ns {
                let mut e = CMatrix::zeros(ns, ns);
                e.set(a, b, Complex64::new(1.0, 0.0));
                cols.push((conn.apply)(&e).as_slice().to_vec());
            }
        }
        CMatrix::from_fn(nd * nd, ns * ns, |i, j| cols[j][i])
    };

    let mut triples = Vec::new();
    for fine in 0..family.levels.len() {
        for mid in 0..family.levels.len() {
            for coarse in 0..family.levels.len() {
                let (Some(c_fm), Some(c_mc), Some(c_fc)) = (
                    family.connector(fine, mid),
                    family.connector(mid, coarse),
                    family.connector(fine, coarse),
                ) else {
                    continue;
                };
                let lhs = materialize(c_mc).matmul(&materialize(c_fm))?;
                let rhs = materialize(c_fc);
                let residual = numerics::operator_norm(&lhs.sub(&rhs)?).value;
                triples.push(ChainTriple {
                    levels: (
                        family.levels[fine].label.clone(),
                        family.levels[mid].label.clone(),
                        family.levels[coarse].label.clone(),
                    ),
                    residual,
                });
            }
        }
    }
    let pass = triples.iter().all(|t| t.residual <= tol);
    Ok(ChainReport {
        triples,
        tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_takes_the_max_over_incoming_maps() {
        let shape = PreQShape {
            algebra: "A".into(),
            objects: vec!["M".into()],
            maps: vec![
                MapDecl {
                    label: "t1".into(),
                    dom: "A".into(),
                    cod: "M".into(),
                    hbar: Some(Complex64::new(0.5, 0.0)),
                },
                MapDecl {
                    label: "t2".into(),
                    dom: "A".into(),
                    cod: "M".into(),
                    hbar: Some(Complex64::new(0.1, 0.0)),
                },
            ],
            compositions: vec![],
            inverses: vec![],
        };
        assert_eq!(shape.chi()["M"], 0.5);
        assert_eq!(shape.chi()["A"], 0.0);
    }

    #[test]
    fn index_category_keeps_chi_monotone_arrows() {
        // A chain A → M2 → M1 with χ(M1) = 0.5 > χ(M2) = 0.25 and a
        // connector M2 ← M1 (descending χ keeps it; the reversed arrow would
        // be dropped).
        let shape = PreQShape {
            algebra: "A".into(),
            objects: vec!["M1".into(), "M2".into()],
            maps: vec![
                MapDecl {
                    label: "t1".into(),
                    dom: "A".into(),
                    cod: "M1".into(),
                    hbar: Some(Complex64::new(0.5, 0.0)),
                },
                MapDecl {
                    label: "t2".into(),
                    dom: "A".into(),
                    cod: "M2".into(),
                    hbar: Some(Complex64::new(0.25, 0.0)),
                },
                MapDecl {
                    label: "t12".into(),
                    dom: "M2".into(),
                    cod: "M1".into(),
                    hbar: None,
                },
            ],
            compositions: vec![("t12".into(), "t2".into(), "t1".into())],
            inverses: vec![],
        };
        let indexed = shape.build_index_and_diagram().unwrap();
        // J has the two targets and the single χ-ascending arrow t12.
        assert_eq!(indexed.diagram.index.objects().len(), 2);
        let non_id: Vec<_> = indexed
            .diagram
            .index
            .morphisms()
            .iter()
            .filter(|m| !m.id.starts_with("id_"))
            .collect();
        assert_eq!(non_id.len(), 1);
        assert_eq!(non_id[0].id, "t12");
        // The limit of this diagram is the algebra-side cone apex A... which
        // is not a J-object; within the ambient category the limit apex set
        // is computed by the caller. Here just confirm the diagram validates.
        assert!(indexed.diagram.validate(&indexed.ambient).is_ok());
    }

    #[test]
    fn slope_fit_recovers_quadratic_decay() {
        let xs: Vec<f64> = (2..10).map(|k| 1.0 / k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let slope = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slope_fit_needs_enough_informative_points() {
        let xs = [0.5, 0.25, 0.125];
        let ys = [0.1, 0.05, 0.025];
        assert!(fit_loglog_slope(&xs, &ys).is_none());
        let xs4 = [0.5, 0.25, 0.125, 0.0625];
        let ys4 = [1e-16, 1e-16, 1e-16, 1e-16];
        assert!(fit_loglog_slope(&xs4, &ys4).is_none());
    }
}
