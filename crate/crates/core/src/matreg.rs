//! Matrix quantization of the unit sphere by Berezin–Toeplitz compression.
//!
//! The Poisson algebra is ℂ[x, y, z]/(x² + y² + z² − 1) with the bracket
//! {f, g} = x(∂_y f ∂_z g − ∂_z f ∂_y g) + cyclic, so {x, y} = z and cyclic
//! permutations. Level k of the quantization acts on the k+1-dimensional
//! space of holomorphic sections of the degree-k line bundle; in the
//! monomial section basis the compression of a multiplication operator has
//! matrix elements that reduce to Beta integrals, evaluated here in exact
//! rational arithmetic with a single square root taken at the very end.
//!
//! The deformation parameter of level k is ħ = 2/(k + 1) (inverse matrix
//! size, scaled so the leading commutator asymptotics come out right):
//! [T_k(f), T_k(g)] = iħ T_k({f, g}) + O(ħ²). In particular the images of
//! the coordinate functions are rescaled spin matrices, T_k(x_i) = 2J_i/(k+2).
//!
//! Connecting maps between levels factor exactly through the quantized
//! function space: a matrix is resolved against the spanning images of the
//! spherical-harmonic basis (ℓ ≤ 2) at the source level by least squares and
//! re-emitted at the destination level. By construction these connectors are
//! block-diagonal with respect to im(T) ⊕ im(T)^⊥ and compose consistently
//! along chains.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::diffop::GaussianRational;
use crate::numerics::{self, CMatrix};
use crate::qcat::{Connector, FamilyLevel, MatrixFamily};
use crate::report::ConvergenceTable;
use crate::{Error, Result};

/// Hilbert-space dimension of quantization level k.
pub fn dimension(k: usize) -> usize {
    k + 1
}

/// Deformation parameter of level k: ħ = 2/(k + 1).
pub fn hbar(k: usize) -> f64 {
    2.0 / (k as f64 + 1.0)
}

/// A polynomial function on the unit sphere, kept in the canonical form with
/// z-exponent ≤ 1 via the relation z² = 1 − x² − y². Coefficients are
/// Gaussian rationals, so complex combinations like x + iy are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFunction {
    terms: BTreeMap<(u32, u32, u32), GaussianRational>,
}

impl SphereFunction {
    /// The zero function.
    pub fn zero() -> Self {
        SphereFunction {
            terms: BTreeMap::new(),
        }
    }

    /// The constant function 1.
    pub fn one() -> Self {
        SphereFunction::monomial(0, 0, 0, GaussianRational::one())
    }

    /// The coordinate function x.
    pub fn x() -> Self {
        SphereFunction::monomial(1, 0, 0, GaussianRational::one())
    }

    /// The coordinate function y.
    pub fn y() -> Self {
        SphereFunction::monomial(0, 1, 0, GaussianRational::one())
    }

    /// The coordinate function z.
    pub fn z() -> Self {
        SphereFunction::monomial(0, 0, 1, GaussianRational::one())
    }

    /// c · x^a y^b z^c, reduced to canonical form.
    pub fn monomial(a: u32, b: u32, c: u32, coeff: GaussianRational) -> Self {
        let mut p = SphereFunction::zero();
        p.insert_reduced(a, b, c, coeff);
        p
    }

    /// Iterate the canonical terms (a, b, c ≤ 1) → coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &GaussianRational)> {
        self.terms.iter()
    }

    /// True when the function is identically zero on the sphere.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree of the canonical representative.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b, c)| a + b + c).max()
    }

    fn insert_reduced(&mut self, a: u32, b: u32, c: u32, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        if c >= 2 {
            // z² = 1 − x² − y²
            self.insert_reduced(a, b, c - 2, coeff.clone());
            self.insert_reduced(a + 2, b, c - 2, coeff.neg());
            self.insert_reduced(a, b + 2, c - 2, coeff.neg());
            return;
        }
        let entry = self
            .terms
            .entry((a, b, c))
            .or_insert_with(GaussianRational::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&(a, b, c));
        }
    }

    /// Sum of two sphere functions.
    pub fn add(&self, o: &SphereFunction) -> SphereFunction {
        let mut out = self.clone();
        for (&(a, b, c), k) in &o.terms {
            out.insert_reduced(a, b, c, k.clone());
        }
        out
    }

    /// Difference of two sphere functions.
    pub fn sub(&self, o: &SphereFunction) -> SphereFunction {
        self.add(&o.neg())
    }

    /// Negation.
    pub fn neg(&self) -> SphereFunction {
        SphereFunction {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.neg()))
                .collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &GaussianRational) -> SphereFunction {
        let mut out = SphereFunction::zero();
        for (&(a, b, cz), k) in &self.terms {
            out.insert_reduced(a, b, cz, k.mul(c));
        }
        out
    }

    /// Pointwise product on the sphere.
    pub fn mul(&self, o: &SphereFunction) -> SphereFunction {
        let mut out = SphereFunction::zero();
        for (&(a1, b1, c1), k1) in &self.terms {
            for (&(a2, b2, c2), k2) in &o.terms {
                out.insert_reduced(a1 + a2, b1 + b2, c1 + c2, k1.mul(k2));
            }
        }
        out
    }

    fn partial(&self, axis: usize) -> SphereFunction {
        // Euclidean partial of the canonical representative; legitimate in
        // the bracket because x² + y² + z² is a Casimir of the ℝ³ structure.
        let mut out = SphereFunction::zero();
        for (&(a, b, c), k) in &self.terms {
            let (e, key): (u32, (u32, u32, u32)) = match axis {
                0 if a > 0 => (a, (a - 1, b, c)),
                1 if b > 0 => (b, (a, b - 1, c)),
                2 if c > 0 => (c, (a, b, c - 1)),
                _ => continue,
            };
            out.insert_reduced(key.0, key.1, key.2, k.mul(&GaussianRational::from_int(e as i64)));
        }
        out
    }

    /// Poisson bracket {f, g} = x(∂_y f ∂_z g − ∂_z f ∂_y g) + cyclic.
    pub fn poisson(&self, o: &SphereFunction) -> SphereFunction {
        let (fx, fy, fz) = (self.partial(0), self.partial(1), self.partial(2));
        let (gx, gy, gz) = (o.partial(0), o.partial(1), o.partial(2));
        let term_x = fy.mul(&gz).sub(&fz.mul(&gy)).mul(&SphereFunction::x());
        let term_y = fz.mul(&gx).sub(&fx.mul(&gz)).mul(&SphereFunction::y());
        let term_z = fx.mul(&gy).sub(&fy.mul(&gx)).mul(&SphereFunction::z());
        term_x.add(&term_y).add(&term_z)
    }

    /// Evaluate at a point of ℝ³ (callers pass points on the sphere).
    pub fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b, c), k) in &self.terms {
            acc += k.to_complex64() * x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32);
        }
        acc
    }

    /// Numerical sup norm over an inclusive θ × φ grid that contains the
    /// poles, the equator, and the φ-multiples of π/4.
    pub fn sup_norm_grid(&self) -> f64 {
        let (nt, np) = (200usize, 400usize);
        let mut best: f64 = 0.0;
        for i in 0..=nt {
            let theta = std::f64::consts::PI * i as f64 / nt as f64;
            let (st, ct) = (theta.sin(), theta.cos());
            for j in 0..np {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / np as f64;
                best = best.max(self.eval(st * phi.cos(), st * phi.sin(), ct).norm());
            }
        }
        best
    }

    /// Exact integral over the sphere: ∫ x^a y^b z^c dΩ =
    /// 4π (a−1)!!(b−1)!!(c−1)!!/(a+b+c+1)!! for even exponents, else zero.
    /// Returns the exact rational multiple of 4π.
    pub fn integral_over_4pi(&self) -> GaussianRational {
        fn double_factorial(n: i64) -> BigInt {
            let mut p = BigInt::one();
            let mut k = n;
            while k > 1 {
                p *= k;
                k -= 2;
            }
            p
        }
        let mut acc = GaussianRational::zero();
        for (&(a, b, c), coeff) in &self.terms {
            if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
                continue;
            }
            let num = double_factorial(a as i64 - 1)
                * double_factorial(b as i64 - 1)
                * double_factorial(c as i64 - 1);
            let den = double_factorial((a + b + c) as i64 + 1);
            let r = BigRational::new(num, den);
            let factor = GaussianRational {
                re: r,
                im: BigRational::zero(),
            };
            acc = acc.add(&coeff.mul(&factor));
        }
        acc
    }
}

impl fmt::Display for SphereFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b, c), k) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({k})")?;
            for (e, name) in [(a, "x"), (b, "y"), (c, "z")] {
                if e == 1 {
                    write!(f, "*{name}")?;
                } else if e > 1 {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// The spanning set of the quantized function space used by the connecting
/// maps: spherical harmonics through ℓ = 2, written as polynomials.
pub fn harmonic_basis() -> Vec<(String, SphereFunction)> {
    let one = GaussianRational::one();
    vec![
        ("1".into(), SphereFunction::one()),
        ("x".into(), SphereFunction::x()),
        ("y".into(), SphereFunction::y()),
        ("z".into(), SphereFunction::z()),
        ("xy".into(), SphereFunction::monomial(1, 1, 0, one.clone())),
        ("yz".into(), SphereFunction::monomial(0, 1, 1, one.clone())),
        ("zx".into(), SphereFunction::monomial(1, 0, 1, one.clone())),
        ("z^2".into(), SphereFunction::monomial(0, 0, 2, one.clone())),
        (
            "x^2-y^2".into(),
            SphereFunction::monomial(2, 0, 0, one.clone()).sub(&SphereFunction::monomial(0, 2, 0, one)),
        ),
    ]
}

/// The standard probe set for the quantitative suites, with exact sup norms.
pub fn probes() -> Vec<(String, SphereFunction, f64)> {
    let one = GaussianRational::one();
    vec![
        ("1".into(), SphereFunction::one(), 1.0),
        ("x".into(), SphereFunction::x(), 1.0),
        ("y".into(), SphereFunction::y(), 1.0),
        ("z".into(), SphereFunction::z(), 1.0),
        ("xy".into(), SphereFunction::monomial(1, 1, 0, one.clone()), 0.5),
        ("yz".into(), SphereFunction::monomial(0, 1, 1, one.clone()), 0.5),
        ("zx".into(), SphereFunction::monomial(1, 0, 1, one.clone()), 0.5),
        ("z^2".into(), SphereFunction::monomial(0, 0, 2, one), 1.0),
    ]
}

fn factorial(n: u64) -> BigInt {
    let mut p = BigInt::one();
    for i in 2..=n {
        p *= i;
    }
    p
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// (−i)^b as a Gaussian rational.
fn neg_i_pow(b: u32) -> GaussianRational {
    match b % 4 {
        0 => GaussianRational::one(),
        1 => GaussianRational::i().neg(),
        2 => GaussianRational::one().neg(),
        _ => GaussianRational::i(),
    }
}

/// Expand a canonical sphere polynomial over the basis u^P v^Q w^s with
/// u = x + iy, v = x − iy, w = z (s ≤ 1 inherited from canonical form),
/// via x = (u + v)/2 and y = −i(u − v)/2.
fn uvw_expansion(f: &SphereFunction) -> BTreeMap<(u32, u32, u32), GaussianRational> {
    let half = GaussianRational::from_ratio(1, 2);
    let mut out: BTreeMap<(u32, u32, u32), GaussianRational> = BTreeMap::new();
    for (&(a, b, s), coeff) in f.terms() {
        for p in 0..=a {
            for q in 0..=b {
                // x^a contributes C(a,p) (1/2)^a u^p v^{a−p};
                // y^b contributes C(b,q) (−i/2)^b (−1)^{b−q} u^q v^{b−q}.
                let mut c = coeff.clone();
                for _ in 0..(a + b) {
                    c = c.mul(&half);
                }
                c = c.mul(&neg_i_pow(b));
                if (b - q) % 2 == 1 {
                    c = c.neg();
                }
                let binom = binomial(a as u64, p as u64) * binomial(b as u64, q as u64);
                c = c.mul(&GaussianRational {
                    re: BigRational::from_integer(binom),
                    im: BigRational::zero(),
                });
                if c.is_zero() {
                    continue;
                }
                let key = (p + q, (a - p) + (b - q), s);
                let e = out.entry(key).or_insert_with(GaussianRational::zero);
                *e = e.add(&c);
                if e.is_zero() {
                    out.remove(&key);
                }
            }
        }
    }
    out
}

/// Squared norm of the n-th monomial section relative to 4π:
/// N_n = n!(k−n)!/(k+1)!.
fn section_norm_sq(k: usize, n: usize) -> BigRational {
    BigRational::new(
        factorial(n as u64) * factorial((k - n) as u64),
        factorial(k as u64 + 1),
    )
}

/// The exact Beta-integral value R_mn for one u^P v^Q w^s basis function:
/// R_mn = 2^{P+Q} Σ_{t=0}^{s} (−1)^t C(s,t) (A+t)! (k+P+Q+s−A−t)! / (k+P+Q+s+1)!
/// with A = (m+n+P+Q)/2, valid on the selection rule m − n = Q − P.
///
/// The rule reflects the chart orientation: sections carry e^{−inφ}, so
/// multiplication by u = x + iy lowers the basis index, i.e. raises the
/// z-weight — the orientation under which {x, y} = z quantizes with ħ > 0.
fn beta_integral(k: usize, m: usize, n: usize, p: u32, q: u32, s: u32) -> BigRational {
    debug_assert_eq!(m as i64 - n as i64, q as i64 - p as i64);
    let a_idx = (m + n + p as usize + q as usize) / 2;
    let top = k + p as usize + q as usize + s as usize;
    let mut sum = BigInt::zero();
    for t in 0..=s as usize {
        let term = binomial(s as u64, t as u64)
            * factorial((a_idx + t) as u64)
            * factorial((top - a_idx - t) as u64);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let mut r = BigRational::new(sum, factorial(top as u64 + 1));
    for _ in 0..(p + q) {
        r *= BigRational::from_integer(BigInt::from(2));
    }
    r
}

/// Berezin–Toeplitz matrix of a sphere function at level k: the compression
/// of multiplication by f onto the k+1-dimensional section space, computed
/// in exact rational arithmetic up to one final square root per entry.
pub fn toeplitz(f: &SphereFunction, k: usize) -> CMatrix {
    let n_dim = k + 1;
    let uvw = uvw_expansion(f);
    // Accumulate the rational part R_mn/N_n per entry; the residual factor
    // √(N_n/N_m) depends only on (m, n) and is applied at conversion.
    let mut rat: BTreeMap<(usize, usize), GaussianRational> = BTreeMap::new();
    for (&(p, q, s), gamma) in &uvw {
        let d = q as i64 - p as i64;
        for n in 0..n_dim as i64 {
            let m = n + d;
            if m < 0 || m >= n_dim as i64 {
                continue;
            }
            let (m, n) = (m as usize, n as usize);
            let r = beta_integral(k, m, n, p, q, s) / section_norm_sq(k, n);
            let contrib = gamma.mul(&GaussianRational {
                re: r,
                im: BigRational::zero(),
            });
            let e = rat
                .entry((m, n))
                .or_insert_with(GaussianRational::zero);
            *e = e.add(&contrib);
        }
    }
    let mut out = CMatrix::zeros(n_dim, n_dim);
    for (&(m, n), val) in &rat {
        let ratio = section_norm_sq(k, n) / section_norm_sq(k, m);
        let scale = ratio.to_f64().expect("norm ratio fits in f64").sqrt();
        out.set(m, n, val.to_complex64() * scale);
    }
    out
}

/// Precomputed quantized harmonic basis at one level.
struct LevelSpan {
    mats: Vec<CMatrix>,
    gram: CMatrix,
}

fn level_span(k: usize) -> LevelSpan {
    let mats: Vec<CMatrix> = harmonic_basis()
        .iter()
        .map(|(_, f)| toeplitz(f, k))
        .collect();
    let m = mats.len();
    let gram = CMatrix::from_fn(m, m, |i, j| {
        mats[i]
            .frobenius_inner(&mats[j])
            .expect("basis matrices share dimensions")
    });
    LevelSpan { mats, gram }
}

/// Resolve a matrix against the quantized harmonic span at the source level
/// and re-emit the same combination at the destination level. Exact on the
/// span, zero on its orthogonal complement.
fn compress(src: &LevelSpan, dst: &LevelSpan, x: &CMatrix) -> CMatrix {
    let m = src.mats.len();
    let rhs: Vec<Complex64> = src
        .mats
        .iter()
        .map(|b| b.frobenius_inner(x).expect("dimension match"))
        .collect();
    let coeffs =
        numerics::solve_linear(&src.gram, &rhs).expect("harmonic Gram matrix is nonsingular");
    let n = dst.mats[0].nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..m {
        out = out
            .add(&dst.mats[i].scale(coeffs[i]))
            .expect("dimension match");
    }
    out
}

/// Build the full matrix family over levels kmin..=kmax with connecting maps
/// between every ordered pair of levels.
pub fn family(kmin: usize, kmax: usize) -> Result<MatrixFamily<SphereFunction>> {
    if kmin < 2 {
        return Err(Error::Domain(
            "sphere family needs kmin ≥ 2 so the harmonic span stays independent".into(),
        ));
    }
    if kmax < kmin {
        return Err(Error::Domain("kmax must be ≥ kmin".into()));
    }
    let ks: Vec<usize> = (kmin..=kmax).collect();
    let spans: Vec<Arc<LevelSpan>> = ks.iter().map(|&k| Arc::new(level_span(k))).collect();
    let levels: Vec<FamilyLevel<SphereFunction>> = ks
        .iter()
        .map(|&k| FamilyLevel {
            label: format!("k={k}"),
            hbar: hbar(k),
            dim: dimension(k),
            quantize: Box::new(move |f: &SphereFunction| toeplitz(f, k)),
        })
        .collect();
    let mut connectors = Vec::new();
    for i in 0..ks.len() {
        for j in 0..ks.len() {
            if i == j {
                continue;
            }
            let src = Arc::clone(&spans[i]);
            let dst = Arc::clone(&spans[j]);
            connectors.push(Connector {
                src: i,
                dst: j,
                apply: Box::new(move |x: &CMatrix| compress(&src, &dst, x)),
            });
        }
    }
    Ok(MatrixFamily {
        algebra: "C∞(S²) polynomials".into(),
        levels,
        connectors,
        inverse_pairs: Vec::new(),
        mul: Box::new(|f, g| f.mul(g)),
        add: Box::new(|f, g| f.add(g)),
        scale: Box::new(|f, c| {
            // Complex scalar → Gaussian rational via small continued-fraction
            // free approximation: components arrive as exact dyadics in
            // practice; fall back to nearest rational with denominator 2^40.
            let denom: i64 = 1 << 40;
            let to_rat = |v: f64| {
                BigRational::new(
                    BigInt::from((v * denom as f64).round() as i64),
                    BigInt::from(denom),
                )
            };
            f.scale(&GaussianRational {
                re: to_rat(c.re),
                im: to_rat(c.im),
            })
        }),
        bracket: Box::new(|f, g| f.poisson(g)),
        sup_norm: Box::new(|f| f.sup_norm_grid()),
        basis: harmonic_basis()
            .into_iter()
            .map(|(n, f)| (n, f))
            .collect(),
    })
}

/// Results of the quantitative sphere suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SphereSuiteReport {
    /// ‖T(f·g) − T(f)T(g)‖ per probe pair and level.
    pub product: ConvergenceTable,
    /// ‖(1/(iħ))[T(f), T(g)] − T({f, g})‖ per coordinate pair and level.
    pub commutator: ConvergenceTable,
    /// Raw ‖[T(f), T(g)] − iħ T({f, g})‖ — the ħ^(1+ε) decay quantity.
    pub bracket_decay: ConvergenceTable,
    /// |2πħ Tr T(f) − ∫ f dΩ| per trace probe and level.
    pub trace: ConvergenceTable,
    /// Norm-contraction margins per probe.
    pub norm: Vec<NormCheck>,
    /// Worst Hermiticity defect seen across all levels and probes.
    pub hermiticity_defect: f64,
}

/// Norm contraction ‖T_k(f)‖ ≤ ‖f‖_∞ for one probe across all levels.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormCheck {
    /// Probe name.
    pub probe: String,
    /// Exact sup norm of the probe.
    pub sup: f64,
    /// max_k ‖T_k(f)‖ − ‖f‖_∞ (negative when contraction holds strictly).
    pub worst_excess: f64,
}

/// Run the full quantitative suite over levels kmin..=kmax.
///
/// Product and commutator pairs are drawn from the coordinate functions;
/// trace probes are 1, z², and xy; the norm contraction check runs over the
/// full probe set with exact sup norms.
pub fn convergence_suite(kmin: usize, kmax: usize) -> Result<SphereSuiteReport> {
    if kmin < 2 || kmax < kmin {
        return Err(Error::Domain("need 2 ≤ kmin ≤ kmax".into()));
    }
    let coords = [
        ("x".to_string(), SphereFunction::x()),
        ("y".to_string(), SphereFunction::y()),
        ("z".to_string(), SphereFunction::z()),
    ];
    let mut prod_pairs = Vec::new();
    for i in 0..coords.len() {
        for j in i..coords.len() {
            prod_pairs.push((coords[i].clone(), coords[j].clone()));
        }
    }
    let comm_pairs: Vec<_> = vec![
        (coords[0].clone(), coords[1].clone()),
        (coords[1].clone(), coords[2].clone()),
        (coords[2].clone(), coords[0].clone()),
    ];
    let trace_probes: Vec<(String, SphereFunction)> = vec![
        ("1".into(), SphereFunction::one()),
        ("z^2".into(), SphereFunction::monomial(0, 0, 2, GaussianRational::one())),
        ("xy".into(), SphereFunction::monomial(1, 1, 0, GaussianRational::one())),
    ];
    let probe_set = probes();

    struct Row {
        prod: Vec<f64>,
        comm: Vec<f64>,
        decay: Vec<f64>,
        trace: Vec<f64>,
        norms: Vec<f64>,
        herm: f64,
    }

    let ks: Vec<usize> = (kmin..=kmax).collect();
    let rows: Vec<Row> = ks
        .par_iter()
        .map(|&k| {
            let h = hbar(k);
            let quant: BTreeMap<String, CMatrix> = probe_set
                .iter()
                .map(|(name, f, _)| (name.clone(), toeplitz(f, k)))
                .collect();
            let mut herm: f64 = 0.0;
            for m in quant.values() {
                herm = herm.max(m.hermiticity_defect().expect("square"));
            }
            let prod = prod_pairs
                .iter()
                .map(|((_, f), (_, g))| {
                    let lhs = toeplitz(&f.mul(g), k);
                    let rhs = toeplitz(f, k).matmul(&toeplitz(g, k)).expect("square");
                    numerics::operator_norm(&lhs.sub(&rhs).expect("square")).value
                })
                .collect();
            let (comm, decay): (Vec<f64>, Vec<f64>) = comm_pairs
                .iter()
                .map(|((_, f), (_, g))| {
                    let tf = toeplitz(f, k);
                    let tg = toeplitz(g, k);
                    let tbr = toeplitz(&f.poisson(g), k);
                    let raw = numerics::commutator(&tf, &tg)
                        .expect("square")
                        .sub(&tbr.scale(Complex64::new(0.0, h)))
                        .expect("square");
                    let raw_norm = numerics::operator_norm(&raw).value;
                    (raw_norm / h, raw_norm)
                })
                .unzip();
            let trace = trace_probes
                .iter()
                .map(|(_, f)| {
                    let integral = 4.0 * std::f64::consts::PI
                        * f.integral_over_4pi().to_complex64().re;
                    let tr = toeplitz(f, k).trace().expect("square").re;
                    (2.0 * std::f64::consts::PI * h * tr - integral).abs()
                })
                .collect();
            let norms = probe_set
                .iter()
                .map(|(_, f, sup)| numerics::operator_norm(&toeplitz(f, k)).value - sup)
                .collect();
            Row {
                prod,
                comm,
                decay,
                trace,
                norms,
                herm,
            }
        })
        .collect();

    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let hbars: Vec<f64> = ks.iter().map(|&k| hbar(k)).collect();
    let mut product = ConvergenceTable::new(
        "sphere multiplicativity residuals",
        "k",
        xs.clone(),
        hbars.clone(),
    );
    for (idx, ((fname, _), (gname, _))) in prod_pairs.iter().enumerate() {
        product.push_column(
            &format!("{fname}*{gname}"),
            rows.iter().map(|r| r.prod[idx]).collect(),
        );
    }
    let mut commutator = ConvergenceTable::new(
        "sphere rescaled commutator residuals",
        "k",
        xs.clone(),
        hbars.clone(),
    );
    let mut bracket_decay = ConvergenceTable::new(
        "sphere bracket-condition decay",
        "k",
        xs.clone(),
        hbars.clone(),
    );
    for (idx, ((fname, _), (gname, _))) in comm_pairs.iter().enumerate() {
        commutator.push_column(
            &format!("[{fname},{gname}]"),
            rows.iter().map(|r| r.comm[idx]).collect(),
        );
        bracket_decay.push_column(
            &format!("[{fname},{gname}]"),
            rows.iter().map(|r| r.decay[idx]).collect(),
        );
    }
    let mut trace = ConvergenceTable::new("sphere trace normalization", "k", xs, hbars);
    for (idx, (name, _)) in trace_probes.iter().enumerate() {
        trace.push_column(name, rows.iter().map(|r| r.trace[idx]).collect());
    }
    let norm = probe_set
        .iter()
        .enumerate()
        .map(|(idx, (name, _, sup))| NormCheck {
            probe: name.clone(),
            sup: *sup,
            worst_excess: rows
                .iter()
                .map(|r| r.norms[idx])
                .fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    let hermiticity_defect = rows.iter().map(|r| r.herm).fold(0.0, f64::max);
    Ok(SphereSuiteReport {
        product,
        commutator,
        bracket_decay,
        trace,
        norm,
        hermiticity_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn sphere_relation_reduces_to_constant() {
        let r2 = SphereFunction::x()
            .mul(&SphereFunction::x())
            .add(&SphereFunction::y().mul(&SphereFunction::y()))
            .add(&SphereFunction::z().mul(&SphereFunction::z()));
        assert_eq!(r2, SphereFunction::one());
    }

    #[test]
    fn poisson_brackets_are_cyclic() {
        assert_eq!(SphereFunction::x().poisson(&SphereFunction::y()), SphereFunction::z());
        assert_eq!(SphereFunction::y().poisson(&SphereFunction::z()), SphereFunction::x());
        assert_eq!(SphereFunction::z().poisson(&SphereFunction::x()), SphereFunction::y());
        // {z², x} = 2zy.
        let z2 = SphereFunction::monomial(0, 0, 2, GaussianRational::one());
        let want = SphereFunction::monomial(0, 1, 1, GaussianRational::from_int(2));
        assert_eq!(z2.poisson(&SphereFunction::x()), want);
    }

    #[test]
    fn z_at_level_two_is_the_exact_diagonal() {
        let t = toeplitz(&SphereFunction::z(), 2);
        for (i, want) in [0.5, 0.0, -0.5].iter().enumerate() {
            for j in 0..3 {
                let expect = if i == j {
                    Complex64::new(*want, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!(
                    approx(t.get(i, j), expect, 1e-15),
                    "entry ({i},{j}) = {}",
                    t.get(i, j)
                );
            }
        }
    }

    #[test]
    fn raising_function_matches_the_ladder_closed_form() {
        // u = x + iy raises the z-weight: T(u)_{m,m+1} = 2√((m+1)(k−m))/(k+2),
        // zero elsewhere.
        let k = 5;
        let u = SphereFunction::x().add(&SphereFunction::y().scale(&GaussianRational::i()));
        let t = toeplitz(&u, k);
        for m in 0..=k {
            for n in 0..=k {
                let want = if n == m + 1 {
                    2.0 * ((m as f64 + 1.0) * (k as f64 - m as f64)).sqrt() / (k as f64 + 2.0)
                } else {
                    0.0
                };
                assert!(
                    approx(t.get(m, n), Complex64::new(want, 0.0), 1e-13),
                    "entry ({m},{n}) = {} want {want}",
                    t.get(m, n)
                );
            }
        }
    }

    #[test]
    fn coordinate_images_are_rescaled_spin_matrices() {
        // [T(x), T(y)] = (2i/(k+2)) T(z) exactly, from [J_x, J_y] = iJ_z.
        let k = 4;
        let tx = toeplitz(&SphereFunction::x(), k);
        let ty = toeplitz(&SphereFunction::y(), k);
        let tz = toeplitz(&SphereFunction::z(), k);
        for n in 0..=k {
            let want = (k as f64 - 2.0 * n as f64) / (k as f64 + 2.0);
            assert!(
                approx(tz.get(n, n), Complex64::new(want, 0.0), 1e-13),
                "T(z)[{n},{n}] = {} want {want}",
                tz.get(n, n)
            );
        }
        let lhs = numerics::commutator(&tx, &ty).unwrap();
        let rhs = tz.scale(Complex64::new(0.0, 2.0 / (k as f64 + 2.0)));
        let defect = lhs.sub(&rhs).unwrap();
        assert!(
            defect.max_abs() < 1e-13,
            "defect {:.3e}; lhs={:?} rhs={:?}",
            defect.max_abs(),
            lhs.as_slice(),
            rhs.as_slice()
        );
    }

    #[test]
    fn real_probes_quantize_to_hermitian_matrices() {
        for (_, f, _) in probes() {
            for k in [2, 3, 7] {
                assert!(toeplitz(&f, k).hermiticity_defect().unwrap() < 1e-13);
            }
        }
    }

    #[test]
    fn trace_identity_is_exact_at_every_level() {
        // Tr T_k(f) = (k+1)/(4π) ∫ f dΩ for every polynomial f.
        let z2 = SphereFunction::monomial(0, 0, 2, GaussianRational::one());
        for k in [2usize, 5, 11] {
            let tr = toeplitz(&z2, k).trace().unwrap().re;
            let want = (k as f64 + 1.0) / 3.0;
            assert!((tr - want).abs() < 1e-12, "k={k}: {tr} vs {want}");
        }
    }

    #[test]
    fn compression_is_identity_on_span_and_zero_on_complement() {
        let src = level_span(6);
        let dst = level_span(4);
        // Identity on the span (round trip within one level).
        for (i, m) in src.mats.iter().enumerate() {
            let back = compress(&src, &src, m);
            assert!(
                back.sub(m).unwrap().max_abs() < 1e-10,
                "basis element {i} not reproduced"
            );
        }
        // Zero on a complement element: take E_00 minus its span projection
        // by compressing E_00 within the level and subtracting.
        let mut e00 = CMatrix::zeros(7, 7);
        e00.set(0, 0, Complex64::new(1.0, 0.0));
        let proj = compress(&src, &src, &e00);
        let perp = e00.sub(&proj).unwrap();
        let image = compress(&src, &dst, &perp);
        assert!(image.max_abs() < 1e-10);
    }

    #[test]
    fn norm_contraction_holds_on_probes() {
        for (name, f, sup) in probes() {
            for k in [2usize, 9, 16] {
                let n = numerics::operator_norm(&toeplitz(&f, k)).value;
                assert!(n <= sup + 1e-9, "probe {name} at k={k}: {n} > {sup}");
            }
        }
    }

    #[test]
    fn suite_slopes_match_first_order_asymptotics() {
        let report = convergence_suite(2, 24).unwrap();
        // Multiplicativity and rescaled commutator residuals decay like 1/k.
        for col in &report.product.columns {
            let s = report.product.slope_vs_x(&col.name).expect("fit");
            assert!((s + 1.0).abs() < 0.3, "product {}: slope {s}", col.name);
        }
        for col in &report.commutator.columns {
            let s = report.commutator.slope_vs_x(&col.name).expect("fit");
            assert!((s + 1.0).abs() < 0.3, "commutator {}: slope {s}", col.name);
        }
        // The raw bracket residual decays like ħ².
        for col in &report.bracket_decay.columns {
            let s = col.slope.expect("fit");
            assert!((s - 2.0).abs() < 0.4, "decay {}: slope {s}", col.name);
        }
        // Traces are exact, far below any slope regime.
        for col in &report.trace.columns {
            assert!(col.values.iter().all(|v| *v < 1e-12));
        }
        assert!(report.hermiticity_defect < 1e-12);
        // Norm contraction with the exact sup norms of the probes.
        for check in &report.norm {
            assert!(
                check.worst_excess <= 1e-9,
                "probe {}: excess {:.3e}",
                check.probe,
                check.worst_excess
            );
        }
    }
}
