//! Weyl (clock-and-shift) quantization of the 2-torus at rational
//! deformation parameter θ = 1/q.
//!
//! The function algebra consists of finite Fourier sums f = Σ c_m e_m with
//! e_m(x) = e^{i m·x}, m ∈ ℤ², and the Poisson bracket of the symplectic
//! form dx₁ ∧ dx₂:
//!
//! ```text
//! {e_m, e_n} = −(m ∧ n) e_{m+n},   m ∧ n = m₁n₂ − m₂n₁.
//! ```
//!
//! Level q (dimension q, θ = 1/q, ħ = 2πθ) sends the mode e_m to the Weyl
//! element
//!
//! ```text
//! W(m) = λ^{m₁ m₂} U^{m₁} V^{m₂},   λ = e^{iπθ},
//! ```
//!
//! where U = diag(ω^j) with ω = e^{2πiθ} is the clock matrix and V is the
//! cyclic down-shift |j⟩ ↦ |j − 1 mod q⟩, so that VU = e^{2πiθ} UV. The
//! symmetric phase λ^{m₁m₂} makes W(m)† = W(−m), hence real (self-adjoint)
//! functions quantize to Hermitian matrices, and gives the exact exchange law
//!
//! ```text
//! W(m) W(n) = e^{−iπθ (m∧n)} W(m+n),
//! [W(m), W(n)] = −2i sin(πθ (m∧n)) W(m+n),
//! ```
//!
//! from which every convergence rate in this module can be read off: the
//! symmetrized product misses the pointwise product by 1 − cos(πθκ) = O(θ²)
//! per mode pair and the rescaled commutator (1/(iħ))[·,·] misses the Poisson
//! bracket by |κ| |1 − sin(πθκ)/(πθκ)| = O(θ²), with κ = m ∧ n.
//!
//! The map is q-periodic in each mode index (U^q = V^q = 1 up to the λ
//! bookkeeping), so it cannot be injective on all of ℤ²; it is injective on
//! the fundamental window |m_i| < q/2, and the images of one representative
//! per residue class span the full q×q matrix algebra.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::numerics::{self, CMatrix};
use crate::qcat::{FamilyLevel, MatrixFamily, MapDecl, PreQShape};
use crate::report::ConvergenceTable;
use crate::{Error, Result};

/// Hilbert-space dimension of quantization level q.
pub fn dimension(q: usize) -> usize {
    q
}

/// Deformation angle of level q: θ = 1/q.
pub fn theta(q: usize) -> f64 {
    1.0 / q as f64
}

/// Deformation parameter of level q: ħ = 2πθ = 2π/q.
pub fn hbar(q: usize) -> f64 {
    2.0 * PI / q as f64
}

/// A trigonometric polynomial on the 2-torus: a finitely supported Fourier
/// sum f = Σ c_m e_m, e_m(x) = e^{i m·x}, m ∈ ℤ². Real (self-adjoint)
/// functions are exactly those with c_{−m} = conj(c_m).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction {
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl TorusFunction {
    /// The zero function.
    pub fn zero() -> Self {
        TorusFunction {
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self::mode(0, 0)
    }

    /// The single Fourier mode e_m(x) = e^{i(m₁x₁ + m₂x₂)}.
    pub fn mode(m1: i64, m2: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((m1, m2), Complex64::new(1.0, 0.0));
        TorusFunction { coeffs }
    }

    /// cos(m·x) = (e_m + e_{−m})/2 — real for every m.
    pub fn cosine(m1: i64, m2: i64) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let mut f = TorusFunction::zero();
        f.insert((m1, m2), half);
        f.insert((-m1, -m2), half);
        f
    }

    /// sin(m·x) = (e_m − e_{−m})/(2i) — real for every m.
    pub fn sine(m1: i64, m2: i64) -> Self {
        let v = Complex64::new(0.0, -0.5);
        let mut f = TorusFunction::zero();
        f.insert((m1, m2), v);
        f.insert((-m1, -m2), -v);
        f
    }

    fn insert(&mut self, m: (i64, i64), c: Complex64) {
        let entry = self.coeffs.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm_sqr() == 0.0 {
            self.coeffs.remove(&m);
        }
    }

    /// The coefficient of mode m (zero when absent).
    pub fn coeff(&self, m: (i64, i64)) -> Complex64 {
        self.coeffs
            .get(&m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// All (mode, coefficient) pairs, in lexicographic mode order.
    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, *c))
    }

    /// True when no mode has a nonzero coefficient.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// max(|m₁|, |m₂|) over the support — the mode window radius.
    pub fn support_radius(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|(a, b)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &TorusFunction) -> TorusFunction {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.insert(m, c);
        }
        out
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &TorusFunction) -> TorusFunction {
        self.add(&other.neg())
    }

    /// Pointwise negation.
    pub fn neg(&self) -> TorusFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> TorusFunction {
        if c.norm_sqr() == 0.0 {
            return TorusFunction::zero();
        }
        TorusFunction {
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Pointwise product: coefficient convolution,
    /// e_m · e_n = e_{m+n}.
    pub fn mul(&self, other: &TorusFunction) -> TorusFunction {
        let mut out = TorusFunction::zero();
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                out.insert((m.0 + n.0, m.1 + n.1), a * b);
            }
        }
        out
    }

    /// Poisson bracket {e_m, e_n} = −(m ∧ n) e_{m+n}, extended bilinearly.
    pub fn poisson(&self, other: &TorusFunction) -> TorusFunction {
        let mut out = TorusFunction::zero();
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                let wedge = (m.0 * n.1 - m.1 * n.0) as f64;
                if wedge != 0.0 {
                    out.insert((m.0 + n.0, m.1 + n.1), a * b * Complex64::new(-wedge, 0.0));
                }
            }
        }
        out
    }

    /// Complex conjugate function: c_m ↦ conj(c_{−m}).
    pub fn conj(&self) -> TorusFunction {
        TorusFunction {
            coeffs: self
                .coeffs
                .iter()
                .map(|((a, b), c)| ((-a, -b), c.conj()))
                .collect(),
        }
    }

    /// True when the function is real-valued (c_{−m} = conj(c_m) exactly).
    pub fn is_real(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(m, c)| (self.coeff((-m.0, -m.1)) - c.conj()).norm_sqr() == 0.0)
    }

    /// Evaluate at a point of the torus.
    pub fn eval(&self, x1: f64, x2: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|((a, b), c)| c * Complex64::from_polar(1.0, *a as f64 * x1 + *b as f64 * x2))
            .sum()
    }

    /// Sup norm over a uniform 512 × 512 grid on [0, 2π)². For the mode
    /// windows used here (|m_i| ≤ a handful) the grid maximum matches the
    /// true supremum to well below any tolerance in play.
    pub fn sup_norm_grid(&self) -> f64 {
        let n = 512usize;
        let step = 2.0 * PI / n as f64;
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                best = best.max(self.eval(i as f64 * step, j as f64 * step).norm());
            }
        }
        best
    }
}

impl fmt::Display for TorusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in self.coeffs.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.4}{:+.4}i)·e[{},{}]", c.re, c.im, a, b)?;
        }
        Ok(())
    }
}

/// One quantization level: the q×q matrix algebra at θ = 1/q with the Weyl
/// map e_m ↦ λ^{m₁m₂} U^{m₁} V^{m₂}.
#[derive(Debug, Clone, Copy)]
pub struct TorusQuantization {
    /// Matrix dimension (and inverse deformation angle).
    pub q: usize,
    /// Deformation angle θ = 1/q.
    pub theta: f64,
    /// Deformation parameter ħ = 2πθ.
    pub hbar: f64,
}

impl TorusQuantization {
    /// Build the level for a given q ≥ 2.
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("torus level needs q ≥ 2, got {q}")));
        }
        Ok(TorusQuantization {
            q,
            theta: theta(q),
            hbar: hbar(q),
        })
    }

    /// The clock matrix U = diag(ω^j), ω = e^{2πi/q}.
    pub fn clock(&self) -> CMatrix {
        let q = self.q;
        CMatrix::from_diag(
            &(0..q)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / q as f64))
                .collect::<Vec<_>>(),
        )
    }

    /// The cyclic down-shift V: |j⟩ ↦ |j − 1 mod q⟩, so VU = e^{2πi/q} UV.
    pub fn shift(&self) -> CMatrix {
        let q = self.q;
        CMatrix::from_fn(q, q, |r, c| {
            if (c + q - 1) % q == r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// The Weyl element W(m) = λ^{m₁m₂} U^{m₁} V^{m₂}, λ = e^{iπθ}.
    ///
    /// Column j carries the single nonzero entry at row (j − m₂) mod q with
    /// value λ^{m₁m₂} ω^{m₁·((j − m₂) mod q)}; the matrix is unitary and
    /// W(m)† = W(−m).
    pub fn weyl(&self, m: (i64, i64)) -> CMatrix {
        let q = self.q as i64;
        let mut out = CMatrix::zeros(self.q, self.q);
        for j in 0..q {
            let r = (j - m.1).rem_euclid(q);
            let angle = PI * self.theta * (m.0 * m.1) as f64
                + 2.0 * PI * (m.0 * r) as f64 / q as f64;
            out.set(r as usize, j as usize, Complex64::from_polar(1.0, angle));
        }
        out
    }

    /// Quantize a trigonometric polynomial: Q(Σ c_m e_m) = Σ c_m W(m).
    /// Linear in f; Hermitian whenever f is real.
    pub fn quantize(&self, f: &TorusFunction) -> CMatrix {
        let mut out = CMatrix::zeros(self.q, self.q);
        for (m, c) in f.terms() {
            out = out.add(&self.weyl(m).scale(c)).expect("same dim");
        }
        out
    }
}

/// Quantize `f` at level q (convenience wrapper over [`TorusQuantization`]).
pub fn quantize(f: &TorusFunction, q: usize) -> Result<CMatrix> {
    Ok(TorusQuantization::new(q)?.quantize(f))
}

/// One representative mode per residue class of ℤ²/(qℤ)², centered:
/// m_i ∈ [−⌊(q−1)/2⌋, −⌊(q−1)/2⌋ + q − 1]. For odd q this is the symmetric
/// window |m_i| ≤ (q−1)/2.
pub fn representative_window(q: usize) -> Vec<(i64, i64)> {
    let q = q as i64;
    let lo = -((q - 1) / 2);
    let mut out = Vec::with_capacity((q * q) as usize);
    for a in lo..lo + q {
        for b in lo..lo + q {
            out.push((a, b));
        }
    }
    out
}

/// The symmetric injectivity window |m_i| < q/2 (strict), i.e.
/// |m_i| ≤ ⌈q/2⌉ − 1.
pub fn injectivity_window(q: usize) -> Vec<(i64, i64)> {
    let r = (q as i64 + 1) / 2 - 1;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            out.push((a, b));
        }
    }
    out
}

/// Dimension of span{W(m) : m ∈ modes} at level q, computed numerically.
///
/// W(m) has its q nonzero entries on the cyclic diagonal selected by
/// m₂ mod q, so Weyl elements with different shift residues are supported on
/// disjoint entry sets and the total rank is the sum of the per-diagonal
/// ranks. Each per-diagonal block is a small q × (group size) matrix whose
/// rank is measured by SVD.
pub fn span_rank(q: usize, modes: &[(i64, i64)]) -> Result<usize> {
    let level = TorusQuantization::new(q)?;
    let mut groups: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for m in modes {
        groups.entry(m.1.rem_euclid(q as i64)).or_default().push(*m);
    }
    let mut rank = 0usize;
    for (_, group) in groups {
        let mat = CMatrix::from_fn(q, group.len(), |j, col| {
            let m = group[col];
            let w = level.weyl(m);
            let r = (j as i64 - m.1).rem_euclid(q as i64) as usize;
            w.get(r, j)
        });
        rank += numerics::numerical_rank(&mat, 1e-10).rank;
    }
    Ok(rank)
}

/// Rank of the quantized representative window — the density surrogate.
/// Equals q² exactly: one Weyl element per residue class, and they are
/// pairwise orthogonal in the Hilbert–Schmidt inner product.
pub fn density_rank(q: usize) -> Result<usize> {
    span_rank(q, &representative_window(q))
}

/// The default probe set: cos x₁, cos x₂, their sum (the Harper function,
/// whose quantization is the discrete almost-Mathieu operator), and
/// sin(x₁ + x₂). All lie in the mode window |m_i| ≤ 1.
pub fn probes() -> Vec<(String, TorusFunction)> {
    vec![
        ("cos x1".into(), TorusFunction::cosine(1, 0)),
        ("cos x2".into(), TorusFunction::cosine(0, 1)),
        (
            "cos x1 + cos x2".into(),
            TorusFunction::cosine(1, 0).add(&TorusFunction::cosine(0, 1)),
        ),
        ("sin(x1+x2)".into(), TorusFunction::sine(1, 1)),
    ]
}

/// Results of the quantitative torus suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TorusSuiteReport {
    /// Residual columns over the q-ladder: `norm_gap` = max_f
    /// |‖Q(f)‖ − ‖f‖_∞|, `product` = max pairs ‖Q(f)⋆Q(g) − Q(fg)‖ with the
    /// symmetrized product ⋆, `commutator` = max pairs
    /// ‖(1/(iħ))[Q(f), Q(g)] − Q({f, g})‖.
    pub table: ConvergenceTable,
    /// rank span{Q(e_m) : m in the representative window} per level; the
    /// density surrogate, expected q².
    pub density_ranks: Vec<usize>,
    /// Worst Hermiticity defect across all real probes and levels.
    pub hermiticity_defect: f64,
}

impl TorusSuiteReport {
    /// True when the norm gap trends downward: the maximum over the second
    /// half of the q-ladder is strictly below the maximum over the first
    /// half. (The gap is not monotone level by level — parity of q matters —
    /// so the trend is compared between window halves.)
    pub fn norm_gap_trend_decreasing(&self) -> bool {
        let vals = match self.table.column_values("norm_gap") {
            Some(v) => v,
            None => return false,
        };
        if vals.len() < 2 {
            return false;
        }
        let mid = vals.len() / 2;
        let head = vals[..mid].iter().cloned().fold(f64::MIN, f64::max);
        let tail = vals[mid..].iter().cloned().fold(f64::MIN, f64::max);
        tail < head
    }

    /// True when every level's density rank equals q².
    pub fn density_full(&self) -> bool {
        self.table
            .xs
            .iter()
            .zip(&self.density_ranks)
            .all(|(q, r)| *r == (*q as usize) * (*q as usize))
    }

    /// CSV with one row per level:
    /// q, theta, hbar, residual_a, residual_b, residual_c, rank_d.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "q",
            "theta",
            "hbar",
            "residual_a",
            "residual_b",
            "residual_c",
            "rank_d",
        ])?;
        let a = self.table.column_values("norm_gap").unwrap_or_default();
        let b = self.table.column_values("product").unwrap_or_default();
        let c = self.table.column_values("commutator").unwrap_or_default();
        for (i, q) in self.table.xs.iter().enumerate() {
            w.write_record([
                format!("{}", *q as usize),
                format!("{:.12e}", 1.0 / q),
                format!("{:.12e}", self.table.hbars[i]),
                format!("{:.12e}", a[i]),
                format!("{:.12e}", b[i]),
                format!("{:.12e}", c[i]),
                format!("{}", self.density_ranks[i]),
            ])?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Consistency(format!("csv writer: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Consistency(format!("csv utf8: {e}")))
    }
}

/// Run the quantitative suite over a ladder of levels.
///
/// Per level q the suite measures, with ⋆ the symmetrized matrix product and
/// [·,·] the commutator:
///
/// * `norm_gap`  — max over probes of |‖Q(f)‖ − ‖f‖_∞|;
/// * `product`   — max over probe pairs of ‖Q(f) ⋆ Q(g) − Q(fg)‖;
/// * `commutator` — max over probe pairs of ‖(1/(iħ))[Q(f), Q(g)] − Q({f, g})‖;
/// * `density_ranks` — rank of the quantized representative mode window.
///
/// Probes must be real and lie strictly inside the injectivity window
/// |m_i| < q/2 of the smallest level: outside it the q-periodicity of the
/// Weyl map would alias residuals to zero and fake convergence.
pub fn strict_conditions_suite(
    q_list: &[usize],
    probes: &[(String, TorusFunction)],
) -> Result<TorusSuiteReport> {
    if q_list.len() < 4 {
        return Err(Error::Domain(format!(
            "need at least 4 levels for trend fits, got {}",
            q_list.len()
        )));
    }
    if probes.len() < 2 {
        return Err(Error::Domain("need at least two probes".into()));
    }
    let qmin = *q_list.iter().min().expect("nonempty");
    if qmin < 2 {
        return Err(Error::Domain("levels need q ≥ 2".into()));
    }
    for (name, f) in probes {
        if !f.is_real() {
            return Err(Error::Domain(format!("probe '{name}' is not real-valued")));
        }
        if 2 * f.support_radius() >= qmin as i64 {
            return Err(Error::Domain(format!(
                "probe '{name}' has a mode outside the injectivity window |m_i| < q/2 \
                 of the smallest level q = {qmin}"
            )));
        }
    }
    let sups: Vec<f64> = probes.iter().map(|(_, f)| f.sup_norm_grid()).collect();

    struct Row {
        norm_gap: f64,
        product: f64,
        commutator: f64,
        rank: usize,
        herm: f64,
    }

    let mut qs: Vec<usize> = q_list.to_vec();
    qs.sort_unstable();
    let rows: Vec<Row> = qs
        .par_iter()
        .map(|&q| {
            let level = TorusQuantization::new(q).expect("q ≥ 2 checked");
            let mats: Vec<CMatrix> = probes.iter().map(|(_, f)| level.quantize(f)).collect();
            let mut herm: f64 = 0.0;
            let mut norm_gap: f64 = 0.0;
            for (i, m) in mats.iter().enumerate() {
                herm = herm.max(m.hermiticity_defect().expect("square"));
                norm_gap = norm_gap.max((numerics::operator_norm(m).value - sups[i]).abs());
            }
            let mut product: f64 = 0.0;
            let mut commutator: f64 = 0.0;
            for i in 0..probes.len() {
                for j in i..probes.len() {
                    let sym = numerics::anticommutator(&mats[i], &mats[j])
                        .expect("square")
                        .scale(Complex64::new(0.5, 0.0));
                    let fg = level.quantize(&probes[i].1.mul(&probes[j].1));
                    product = product.max(
                        numerics::operator_norm(&sym.sub(&fg).expect("square")).value,
                    );
                    if i < j {
                        let resc = numerics::commutator(&mats[i], &mats[j])
                            .expect("square")
                            .scale(Complex64::new(0.0, -1.0 / level.hbar));
                        let br = level.quantize(&probes[i].1.poisson(&probes[j].1));
                        commutator = commutator.max(
                            numerics::operator_norm(&resc.sub(&br).expect("square")).value,
                        );
                    }
                }
            }
            let rank = density_rank(q).expect("q ≥ 2 checked");
            Row {
                norm_gap,
                product,
                commutator,
                rank,
                herm,
            }
        })
        .collect();

    let xs: Vec<f64> = qs.iter().map(|&q| q as f64).collect();
    let hbars: Vec<f64> = qs.iter().map(|&q| hbar(q)).collect();
    let mut table = ConvergenceTable::new("torus strict-quantization residuals", "q", xs, hbars);
    table.push_column("norm_gap", rows.iter().map(|r| r.norm_gap).collect());
    table.push_column("product", rows.iter().map(|r| r.product).collect());
    table.push_column("commutator", rows.iter().map(|r| r.commutator).collect());
    Ok(TorusSuiteReport {
        table,
        density_ranks: rows.iter().map(|r| r.rank).collect(),
        hermiticity_defect: rows.iter().map(|r| r.herm).fold(0.0, f64::max),
    })
}

/// Assemble the quantization ladder as a matrix family over the given levels.
///
/// The torus levels carry no connecting maps between different q (no natural
/// algebra map relates the q×q and q′×q′ realizations), so the family has
/// levels only; the named basis spans the real mode window |m_i| ≤ 1.
pub fn family(q_list: &[usize]) -> Result<MatrixFamily<TorusFunction>> {
    if q_list.is_empty() {
        return Err(Error::Domain("need at least one level".into()));
    }
    let mut qs = q_list.to_vec();
    qs.sort_unstable();
    let mut levels = Vec::new();
    for &q in &qs {
        let level = TorusQuantization::new(q)?;
        levels.push(FamilyLevel {
            label: format!("q{q}"),
            hbar: level.hbar,
            dim: q,
            quantize: Box::new(move |f: &TorusFunction| level.quantize(f)),
        });
    }
    let mut basis: Vec<(String, TorusFunction)> = vec![("1".into(), TorusFunction::one())];
    for (a, b) in [(1i64, 0i64), (0, 1), (1, 1), (1, -1)] {
        basis.push((format!("cos[{a},{b}]"), TorusFunction::cosine(a, b)));
        basis.push((format!("sin[{a},{b}]"), TorusFunction::sine(a, b)));
    }
    Ok(MatrixFamily {
        algebra: "trig-polys".into(),
        levels,
        connectors: Vec::new(),
        inverse_pairs: Vec::new(),
        mul: Box::new(|f, g| f.mul(g)),
        add: Box::new(|f, g| f.add(g)),
        scale: Box::new(|f, c| f.scale(c)),
        bracket: Box::new(|f, g| f.poisson(g)),
        sup_norm: Box::new(|f| f.sup_norm_grid()),
        basis,
    })
}

/// The three-object deformation fragment at level q: the trigonometric
/// polynomial algebra A, its classical home C⁰ (the same functions viewed
/// with the sup norm, reached by the inclusion at ħ = 0), and the q×q matrix
/// algebra C^ħ, with the deformation map C⁰ → C^ħ defined on the image of
/// the inclusion by T ∘ incl = Q^ħ.
///
/// The index category of this shape has the two non-algebra objects and the
/// single deformation arrow between them (χ(C⁰) = 0 ≤ χ(C^ħ) = 2π/q); its
/// limit apex is C⁰ alone: the cone at A factors through C⁰ via the
/// inclusion, while nothing maps back out of C⁰.
pub fn build_dq_fragment(q: usize) -> Result<PreQShape> {
    if q < 2 {
        return Err(Error::Domain(format!("torus level needs q ≥ 2, got {q}")));
    }
    let classical = "classical-torus".to_string();
    let matrix = format!("matrix-torus-q{q}");
    Ok(PreQShape {
        algebra: "trig-polys".into(),
        objects: vec![classical.clone(), matrix.clone()],
        maps: vec![
            MapDecl {
                label: "embed-classical".into(),
                dom: "trig-polys".into(),
                cod: classical.clone(),
                hbar: Some(Complex64::new(0.0, 0.0)),
            },
            MapDecl {
                label: format!("weyl-q{q}"),
                dom: "trig-polys".into(),
                cod: matrix.clone(),
                hbar: Some(Complex64::new(hbar(q), 0.0)),
            },
            MapDecl {
                label: format!("deform-to-q{q}"),
                dom: classical,
                cod: matrix,
                hbar: None,
            },
        ],
        compositions: vec![(
            format!("deform-to-q{q}"),
            "embed-classical".into(),
            format!("weyl-q{q}"),
        )],
        inverses: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bracket_is_antisymmetric_and_matches_wedge() {
        let f = TorusFunction::mode(2, 1);
        let g = TorusFunction::mode(-1, 3);
        let fg = f.poisson(&g);
        let gf = g.poisson(&f);
        assert!(fg.add(&gf).is_zero());
        // m ∧ n = 2·3 − 1·(−1) = 7, so {e_m, e_n} = −7 e_{m+n}.
        assert_eq!(fg.coeff((1, 4)), c(-7.0, 0.0));
        assert!(f.poisson(&f).is_zero());
    }

    #[test]
    fn real_functions_and_products() {
        let h = TorusFunction::cosine(1, 0).add(&TorusFunction::sine(2, -1));
        assert!(h.is_real());
        assert!(h.mul(&h).is_real());
        let sq = TorusFunction::cosine(1, 0).mul(&TorusFunction::cosine(1, 0));
        // cos² x = 1/2 + cos(2x)/2.
        assert_eq!(sq.coeff((0, 0)), c(0.5, 0.0));
        assert_eq!(sq.coeff((2, 0)), c(0.25, 0.0));
        assert_eq!(sq.coeff((-2, 0)), c(0.25, 0.0));
    }

    #[test]
    fn sup_norm_on_reference_functions() {
        assert!((TorusFunction::cosine(1, 0).sup_norm_grid() - 1.0).abs() < 1e-12);
        assert!((TorusFunction::sine(1, 1).sup_norm_grid() - 1.0).abs() < 1e-12);
        let harper = TorusFunction::cosine(1, 0).add(&TorusFunction::cosine(0, 1));
        assert!((harper.sup_norm_grid() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clock_shift_exchange_and_weyl_phases() {
        for q in [2usize, 3, 5, 8] {
            let level = TorusQuantization::new(q).unwrap();
            let u = level.clock();
            let v = level.shift();
            let vu = v.matmul(&u).unwrap();
            let uv = u.matmul(&v).unwrap().scale(Complex64::from_polar(
                1.0,
                2.0 * PI * level.theta,
            ));
            assert!(vu.sub(&uv).unwrap().max_abs() < 1e-12, "q = {q}");
            // W agrees with the defining product formula.
            for m in [(1i64, 0i64), (0, 1), (2, 3), (-1, 2), (-2, -2)] {
                let direct = level.weyl(m);
                let pw = |mat: &CMatrix, e: i64| -> CMatrix {
                    let mut acc = CMatrix::identity(q);
                    let base = if e >= 0 { mat.clone() } else { mat.dagger() };
                    for _ in 0..e.abs() {
                        acc = acc.matmul(&base).unwrap();
                    }
                    acc
                };
                let built = pw(&u, m.0)
                    .matmul(&pw(&v, m.1))
                    .unwrap()
                    .scale(Complex64::from_polar(
                        1.0,
                        PI * level.theta * (m.0 * m.1) as f64,
                    ));
                assert!(direct.sub(&built).unwrap().max_abs() < 1e-12, "q={q} m={m:?}");
                // Unitary, and W(m)† = W(−m).
                let wd = direct.dagger();
                assert!(
                    wd.matmul(&direct).unwrap().sub(&CMatrix::identity(q)).unwrap().max_abs()
                        < 1e-12
                );
                assert!(wd.sub(&level.weyl((-m.0, -m.1))).unwrap().max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weyl_exchange_law_exactly() {
        for q in [3usize, 5, 8] {
            let level = TorusQuantization::new(q).unwrap();
            for m in [(1i64, 0i64), (2, -1), (0, 3)] {
                for n in [(0i64, 1i64), (1, 1), (-2, 2)] {
                    let kappa = (m.0 * n.1 - m.1 * n.0) as f64;
                    let lhs = level.weyl(m).matmul(&level.weyl(n)).unwrap();
                    let rhs = level
                        .weyl((m.0 + n.0, m.1 + n.1))
                        .scale(Complex64::from_polar(1.0, -PI * level.theta * kappa));
                    assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12, "q={q} m={m:?} n={n:?}");
                }
            }
        }
    }

    #[test]
    fn quantize_unit_periodicity_and_trace() {
        let level = TorusQuantization::new(5).unwrap();
        let id = CMatrix::identity(5);
        assert!(level.quantize(&TorusFunction::one()).sub(&id).unwrap().max_abs() < 1e-15);
        // U^q = 1: the mode (q, 0) aliases to the constant.
        assert!(level.quantize(&TorusFunction::mode(5, 0)).sub(&id).unwrap().max_abs() < 1e-12);
        // Normalized trace picks out the zero mode.
        for m in [(1i64, 0i64), (0, 1), (2, 2), (-1, 2)] {
            let tr = level.quantize(&TorusFunction::mode(m.0, m.1)).trace().unwrap();
            assert!(tr.norm() < 1e-12, "m = {m:?}");
        }
        let f = TorusFunction::cosine(1, 0)
            .scale(c(3.0, 0.0))
            .add(&TorusFunction::one().scale(c(0.25, 0.0)));
        let tr = level.quantize(&f).trace().unwrap() / c(5.0, 0.0);
        assert!((tr - c(0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hermitian_images_and_unit_norms() {
        let level = TorusQuantization::new(7).unwrap();
        for (name, f) in probes() {
            let m = level.quantize(&f);
            assert!(m.hermiticity_defect().unwrap() < 1e-14, "{name}");
        }
        for m in [(1i64, 0i64), (2, 1), (-1, 3)] {
            let n = numerics::operator_norm(&level.quantize(&TorusFunction::mode(m.0, m.1))).value;
            assert!((n - 1.0).abs() < 1e-10, "m = {m:?}");
        }
    }

    #[test]
    fn clock_quantization_of_cos_x_at_q2() {
        // At q = 2 the clock is diag(1, −1): cos x₁ quantizes to the diagonal
        // involution diag(1, −1) — Hermitian, traceless, unit norm, square 1.
        // (The Fourier-conjugate realization, with the shift playing the
        // clock, gives the off-diagonal form of the same operator; the two
        // are unitarily equivalent.)
        let level = TorusQuantization::new(2).unwrap();
        let m = level.quantize(&TorusFunction::cosine(1, 0));
        assert!((m.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.get(1, 1) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(m.get(0, 1).norm() < 1e-15 && m.get(1, 0).norm() < 1e-15);
        let sq = m.matmul(&m).unwrap();
        assert!(sq.sub(&CMatrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn ranks_count_residue_classes() {
        // Representative window: full matrix algebra at every q.
        for q in [3usize, 4, 5, 8] {
            assert_eq!(density_rank(q).unwrap(), q * q, "q = {q}");
        }
        // Injectivity window: one point per listed mode (no aliasing).
        for q in [4usize, 5, 7] {
            let w = injectivity_window(q);
            assert_eq!(span_rank(q, &w).unwrap(), w.len(), "q = {q}");
        }
        // Sanity against the dense vectorization at small q.
        let modes = representative_window(4);
        let level = TorusQuantization::new(4).unwrap();
        let dense = CMatrix::from_fn(16, modes.len(), |r, c_| {
            let w = level.weyl(modes[c_]);
            w.get(r / 4, r % 4)
        });
        assert_eq!(numerics::numerical_rank(&dense, 1e-10).rank, 16);
        // Aliased modes add nothing: (q, 0) ≡ (0, 0).
        let aliased = vec![(0i64, 0i64), (4, 0), (1, 0)];
        assert_eq!(span_rank(4, &aliased).unwrap(), 2);
    }

    #[test]
    fn suite_residuals_decay_at_quadratic_rate() {
        let qs: Vec<usize> = (3..=24).collect();
        let report = strict_conditions_suite(&qs, &probes()).unwrap();
        assert!(report.hermiticity_defect < 1e-13);
        assert!(report.density_full());
        assert!(report.norm_gap_trend_decreasing());
        let slope_c = report.table.slope_of("commutator").unwrap();
        assert!(
            (slope_c - 2.0).abs() < 0.4,
            "rescaled commutator slope {slope_c}"
        );
        let slope_b = report.table.slope_of("product").unwrap();
        assert!((slope_b - 2.0).abs() < 0.6, "product slope {slope_b}");
        // Residuals truly shrink end to end.
        let b = report.table.column_values("product").unwrap();
        let c_ = report.table.column_values("commutator").unwrap();
        assert!(b.last().unwrap() < &(0.1 * b.first().unwrap()));
        assert!(c_.last().unwrap() < &(0.1 * c_.first().unwrap()));
    }

    #[test]
    fn suite_rejects_out_of_window_probes() {
        let qs = vec![3usize, 4, 5, 6];
        let bad = vec![
            ("ok".to_string(), TorusFunction::cosine(1, 0)),
            ("aliased".to_string(), TorusFunction::cosine(2, 0)),
        ];
        assert!(matches!(
            strict_conditions_suite(&qs, &bad),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn self_pair_commutator_residual_is_zero() {
        let level = TorusQuantization::new(6).unwrap();
        let f = TorusFunction::cosine(1, 0).add(&TorusFunction::sine(0, 1));
        let qf = level.quantize(&f);
        let resid = numerics::commutator(&qf, &qf)
            .unwrap()
            .scale(c(0.0, -1.0 / level.hbar))
            .sub(&level.quantize(&f.poisson(&f)))
            .unwrap();
        assert!(resid.max_abs() == 0.0);
    }

    #[test]
    fn dq_fragment_has_classical_limit_apex() {
        let shape = build_dq_fragment(5).unwrap();
        let indexed = shape.build_index_and_diagram().unwrap();
        assert_eq!(indexed.chi["classical-torus"], 0.0);
        assert!((indexed.chi["matrix-torus-q5"] - hbar(5)).abs() < 1e-15);
        let report = fincat::limits(&indexed.ambient, &indexed.diagram).unwrap();
        assert_eq!(report.apexes(), vec!["classical-torus"]);
    }
}
