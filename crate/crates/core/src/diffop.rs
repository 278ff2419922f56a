//! Exact polynomial differential operators in two variables.
//!
//! Coefficients live in ℚ(i) ([`GaussianRational`]), so every identity checked
//! with this module is exact: a residual either vanishes identically or has a
//! nonzero term that can be printed. Polynomials ([`Poly2`]) are written in
//! abstract coordinates (x, y) — callers rename them ((x, p) for the
//! symplectic plane) — and carry the canonical bracket
//!
//! ```text
//! {f, g} = ∂ₓf ∂ᵧg − ∂ᵧf ∂ₓg        ({x, y} = 1)
//! ```
//!
//! Operators ([`DiffOp`]) are stored **normal ordered**: every term is
//! `c · x^a y^b ∂ₓ^c ∂ᵧ^d` with all multiplications to the left of all
//! derivatives. Composition re-normal-orders via the Leibniz rule
//!
//! ```text
//! ∂ₓ^c ∘ x^a = Σ_r  C(c, r) · a·(a−1)···(a−r+1) · x^(a−r) ∂ₓ^(c−r)
//! ```
//!
//! so products and commutators stay in canonical form by construction, and
//! re-canonicalizing is the identity (idempotence of normal ordering).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Element of ℚ(i): a complex number with rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    /// Real part.
    pub re: BigRational,
    /// Imaginary part.
    pub im: BigRational,
}

impl GaussianRational {
    /// Additive identity.
    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    /// Multiplicative identity.
    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// Embed an integer.
    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// Embed a rational p/q (panics when q = 0, as with `Ratio::new`).
    pub fn from_ratio(p: i64, q: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    /// Purely imaginary rational i·(p/q).
    pub fn from_imag_ratio(p: i64, q: i64) -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::new(BigInt::from(p), BigInt::from(q)),
        }
    }

    /// True iff both parts vanish.
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Product (a+bi)(c+di) = (ac−bd) + (ad+bc)i.
    pub fn mul(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Exact multiplicative inverse 1/(a+bi) = (a−bi)/(a²+b²), or `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm_sq = &self.re * &self.re + &self.im * &self.im;
        Some(GaussianRational {
            re: &self.re / &norm_sq,
            im: -(&self.im / &norm_sq),
        })
    }

    /// Lossy conversion for reporting.
    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({}{}i)", self.re, self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

fn falling(n: u32, r: u32) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..r {
        acc *= BigInt::from(n - j);
    }
    acc
}

fn big_to_gr(b: BigInt) -> GaussianRational {
    GaussianRational {
        re: BigRational::from_integer(b),
        im: BigRational::zero(),
    }
}

/// Polynomial in two commuting variables with ℚ(i) coefficients,
/// keyed by exponent pair (a, b) for x^a y^b.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), GaussianRational>,
}

impl Poly2 {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly2::default()
    }

    /// The constant 1.
    pub fn one() -> Self {
        Poly2::monomial(0, 0, GaussianRational::one())
    }

    /// The first coordinate x.
    pub fn var_x() -> Self {
        Poly2::monomial(1, 0, GaussianRational::one())
    }

    /// The second coordinate y.
    pub fn var_y() -> Self {
        Poly2::monomial(0, 1, GaussianRational::one())
    }

    /// c · x^a y^b.
    pub fn monomial(a: u32, b: u32, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        Poly2 { terms }
    }

    /// Iterate (exponents, coefficient) in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &GaussianRational)> {
        self.terms.iter()
    }

    /// True iff no terms survive.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree (None for the zero polynomial).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    fn insert(&mut self, key: (u32, u32), c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// Sum.
    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    /// Difference.
    pub fn sub(&self, o: &Poly2) -> Poly2 {
        self.add(&o.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Poly2 {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &GaussianRational) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.mul(c)))
                .collect(),
        }
    }

    /// Product.
    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                out.insert((a1 + a2, b1 + b2), c1.mul(c2));
            }
        }
        out
    }

    /// ∂ₓ.
    pub fn partial_x(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            if *a > 0 {
                out.insert((a - 1, *b), c.mul(&GaussianRational::from_int(*a as i64)));
            }
        }
        out
    }

    /// ∂ᵧ.
    pub fn partial_y(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            if *b > 0 {
                out.insert((*a, b - 1), c.mul(&GaussianRational::from_int(*b as i64)));
            }
        }
        out
    }

    /// Canonical Poisson bracket {f, g} = ∂ₓf ∂ᵧg − ∂ᵧf ∂ₓg.
    pub fn poisson(&self, o: &Poly2) -> Poly2 {
        self.partial_x()
            .mul(&o.partial_y())
            .sub(&self.partial_y().mul(&o.partial_x()))
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            if *a > 0 {
                write!(f, "·x^{}", a)?;
            }
            if *b > 0 {
                write!(f, "·y^{}", b)?;
            }
        }
        Ok(())
    }
}

/// Normal-ordered polynomial differential operator: a ℚ(i)-linear combination
/// of x^a y^b ∂ₓ^c ∂ᵧ^d, keyed by (a, b, c, d).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<(u32, u32, u32, u32), GaussianRational>,
}

impl DiffOp {
    /// The zero operator.
    pub fn zero() -> Self {
        DiffOp::default()
    }

    /// The identity operator.
    pub fn identity() -> Self {
        DiffOp::term(0, 0, 0, 0, GaussianRational::one())
    }

    /// Single term c · x^a y^b ∂ₓ^c ∂ᵧ^d.
    pub fn term(a: u32, b: u32, dx: u32, dy: u32, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b, dx, dy), c);
        }
        DiffOp { terms }
    }

    /// Multiplication operator f ↦ g·f.
    pub fn from_poly(p: &Poly2) -> Self {
        DiffOp {
            terms: p
                .terms()
                .map(|((a, b), c)| ((*a, *b, 0, 0), c.clone()))
                .collect(),
        }
    }

    /// ∂ₓ.
    pub fn d_x() -> Self {
        DiffOp::term(0, 0, 1, 0, GaussianRational::one())
    }

    /// ∂ᵧ.
    pub fn d_y() -> Self {
        DiffOp::term(0, 0, 0, 1, GaussianRational::one())
    }

    /// Iterate ((a, b, dx, dy), coefficient) in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32, u32), &GaussianRational)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True iff the operator is identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree a + b + dx + dy over all terms.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b, c, d)| a + b + c + d).max()
    }

    fn insert(&mut self, key: (u32, u32, u32, u32), c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// Sum.
    pub fn add(&self, o: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    /// Difference.
    pub fn sub(&self, o: &DiffOp) -> DiffOp {
        self.add(&o.neg())
    }

    /// Negation.
    pub fn neg(&self) -> DiffOp {
        DiffOp {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &GaussianRational) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero();
        }
        DiffOp {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v.mul(c)))
                .collect(),
        }
    }

    /// Operator composition self ∘ o, re-normal-ordered by the Leibniz rule.
    pub fn mul(&self, o: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (&(a1, b1, c1, d1), k1) in &self.terms {
            for (&(a2, b2, c2, d2), k2) in &o.terms {
                let coeff = k1.mul(k2);
                for r in 0..=c1.min(a2) {
                    let fx = binomial(c1, r) * falling(a2, r);
                    for s in 0..=d1.min(b2) {
                        let fy = binomial(d1, s) * falling(b2, s);
                        let k = coeff.mul(&big_to_gr(&fx * &fy));
                        out.insert(
                            (a1 + a2 - r, b1 + b2 - s, c1 - r + c2, d1 - s + d2),
                            k,
                        );
                    }
                }
            }
        }
        out
    }

    /// Commutator [self, o] = self∘o − o∘self.
    pub fn commutator(&self, o: &DiffOp) -> DiffOp {
        self.mul(o).sub(&o.mul(self))
    }

    /// Apply the operator to a polynomial.
    pub fn apply(&self, p: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b, dx, dy), k) in &self.terms {
            for ((pa, pb), pc) in p.terms() {
                if dx > pa || dy > pb {
                    continue;
                }
                let factor = falling(*pa, *dx) * falling(*pb, *dy);
                out = out.add(&Poly2::monomial(
                    pa - dx + a,
                    pb - dy + b,
                    pc.mul(k).mul(&big_to_gr(factor)),
                ));
            }
        }
        out
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b, dx, dy), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            if *a > 0 {
                write!(f, "·x^{}", a)?;
            }
            if *b > 0 {
                write!(f, "·y^{}", b)?;
            }
            if *dx > 0 {
                write!(f, "·Dx^{}", dx)?;
            }
            if *dy > 0 {
                write!(f, "·Dy^{}", dy)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn dx_x_commutator_is_identity() {
        let lhs = DiffOp::d_x().commutator(&DiffOp::from_poly(&Poly2::var_x()));
        assert_eq!(lhs, DiffOp::identity());
    }

    #[test]
    fn dy_x_commute() {
        let lhs = DiffOp::d_y().commutator(&DiffOp::from_poly(&Poly2::var_x()));
        assert!(lhs.is_zero());
    }

    #[test]
    fn leibniz_reordering_dx_squared_times_x_squared() {
        // ∂ₓ² ∘ x² = x²∂ₓ² + 4x∂ₓ + 2.
        let dx2 = DiffOp::term(0, 0, 2, 0, gr(1));
        let x2 = DiffOp::term(2, 0, 0, 0, gr(1));
        let got = dx2.mul(&x2);
        let want = DiffOp::term(2, 0, 2, 0, gr(1))
            .add(&DiffOp::term(1, 0, 1, 0, gr(4)))
            .add(&DiffOp::term(0, 0, 0, 0, gr(2)));
        assert_eq!(got, want);
    }

    #[test]
    fn multiplication_operators_multiply() {
        let f = Poly2::var_x().add(&Poly2::var_y());
        let g = Poly2::monomial(1, 2, gr(3));
        let lhs = DiffOp::from_poly(&f).mul(&DiffOp::from_poly(&g));
        let rhs = DiffOp::from_poly(&f.mul(&g));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_associative() {
        let a = DiffOp::term(1, 0, 2, 1, GaussianRational::from_ratio(1, 3))
            .add(&DiffOp::term(0, 2, 0, 1, GaussianRational::i()));
        let b = DiffOp::term(2, 1, 1, 0, gr(-2)).add(&DiffOp::d_y());
        let c = DiffOp::term(0, 3, 1, 2, GaussianRational::from_ratio(5, 7))
            .add(&DiffOp::identity());
        let lhs = a.mul(&b).mul(&c);
        let rhs = a.mul(&b.mul(&c));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_matches_composition_on_constants() {
        // (op ∘ μ_f)(1) = op(f).
        let op = DiffOp::term(1, 1, 1, 1, gr(2)).add(&DiffOp::d_x());
        let f = Poly2::monomial(2, 3, GaussianRational::from_ratio(7, 2));
        let via_apply = op.apply(&f);
        let via_compose = op.mul(&DiffOp::from_poly(&f)).apply(&Poly2::one());
        assert_eq!(via_apply, via_compose);
    }

    #[test]
    fn poisson_bracket_canonical_pair() {
        let x = Poly2::var_x();
        let y = Poly2::var_y();
        assert_eq!(x.poisson(&y), Poly2::one());
        assert_eq!(y.poisson(&x), Poly2::one().neg());
        // Leibniz: {x, y²} = 2y.
        let y2 = y.mul(&y);
        assert_eq!(x.poisson(&y2), Poly2::monomial(0, 1, gr(2)));
    }

    #[test]
    fn poisson_jacobi_identity_exact() {
        let f = Poly2::monomial(2, 1, gr(1)).add(&Poly2::var_y());
        let g = Poly2::monomial(1, 2, GaussianRational::from_ratio(-3, 4));
        let h = Poly2::monomial(3, 0, gr(2)).add(&Poly2::one());
        let jac = f
            .poisson(&g.poisson(&h))
            .add(&g.poisson(&h.poisson(&f)))
            .add(&h.poisson(&f.poisson(&g)));
        assert!(jac.is_zero());
    }

    #[test]
    fn gaussian_rational_field_ops() {
        let a = GaussianRational::from_ratio(1, 2).add(&GaussianRational::i());
        let b = a.mul(&a.conj()); // |a|² = 1/4 + 1 = 5/4
        assert_eq!(b, GaussianRational::from_ratio(5, 4));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn display_is_readable() {
        let op = DiffOp::term(1, 0, 0, 1, gr(-2)).add(&DiffOp::identity());
        let s = format!("{}", op);
        assert!(s.contains("Dy"));
        assert!(s.contains("x^1"));
    }
}
