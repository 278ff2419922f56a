//! Family-level verification on the concrete backends: the defining
//! quantization-family conditions (structural items plus the ħ^(1+ε) decay
//! fit), block structure of the connecting maps, and chain consistency —
//! together with hand-built counterexample families that each check must
//! reject.

use num_complex::Complex64;
use quantcat::matreg::{self, SphereFunction};
use quantcat::nctorus::{self, TorusFunction};
use quantcat::numerics::CMatrix;
use quantcat::qcat::{
    verify_block_diagonal, verify_chain_consistency, verify_preq, Connector, FamilyLevel,
    MatrixFamily,
};

fn sphere_probes() -> Vec<(String, SphereFunction)> {
    vec![
        ("x".to_string(), SphereFunction::x()),
        ("y".to_string(), SphereFunction::y()),
        ("z".to_string(), SphereFunction::z()),
    ]
}

#[test]
fn sphere_family_satisfies_preq_conditions() {
    let family = matreg::family(2, 8).expect("family builds");
    let report = verify_preq(&family, &sphere_probes(), 0.5, 1e-9).expect("runs");
    assert!(report.pass, "structural or decay check failed: {report:?}");
    for fit in &report.slope_fits {
        let slope = fit.slope.expect("enough informative points");
        assert!(
            slope >= 1.4 && slope <= 2.6,
            "pair {:?} slope {slope} outside the expected ħ² window",
            fit.pair
        );
    }
    // The commutator data re-estimates ħ ≈ 2/(k+2) against declared 2/(k+1):
    // close, but intentionally flagged at coarse levels where they differ > 5%.
    assert!(!report.hbar_estimates.is_empty());
    for est in &report.hbar_estimates {
        assert!(
            (est.estimated - est.declared).abs() / est.declared < 0.35,
            "estimate {est:?} too far from declared"
        );
    }
}

#[test]
fn preq_slope_is_invariant_under_probe_rescaling() {
    let family = matreg::family(2, 8).expect("family builds");
    let base = sphere_probes();
    let three = quantcat::diffop::GaussianRational::from_int(3);
    let scaled: Vec<(String, SphereFunction)> = base
        .iter()
        .map(|(n, f)| (format!("3{n}"), f.scale(&three)))
        .collect();
    let r1 = verify_preq(&family, &base, 0.5, 1e-9).expect("runs");
    let r2 = verify_preq(&family, &scaled, 0.5, 1e-9).expect("runs");
    for (a, b) in r1.slope_fits.iter().zip(&r2.slope_fits) {
        let (sa, sb) = (a.slope.unwrap(), b.slope.unwrap());
        assert!(
            (sa - sb).abs() < 1e-6,
            "slope moved under common rescaling: {sa} vs {sb}"
        );
        // Residuals themselves scale by 9 = 3².
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert!((pb.1 - 9.0 * pa.1).abs() <= 1e-9 + 1e-6 * pa.1);
        }
    }
}

#[test]
fn probe_paired_with_itself_sits_at_exactness_floor() {
    let family = matreg::family(2, 6).expect("family builds");
    let probes = vec![
        ("x-left".to_string(), SphereFunction::x()),
        ("x-right".to_string(), SphereFunction::x()),
    ];
    let report = verify_preq(&family, &probes, 0.5, 1e-9).expect("runs");
    assert_eq!(report.slope_fits.len(), 1);
    let fit = &report.slope_fits[0];
    assert!(fit.pass, "identical probes must pass via the exactness floor");
    for (_, residual) in &fit.points {
        assert!(
            *residual <= 1e-13,
            "bracket of a probe with itself must vanish, got {residual}"
        );
    }
}

/// A commutative "quantization": evaluate the function at q sample points and
/// place the values on a diagonal. All commutators vanish, so the declared
/// nonzero ħ is inconsistent with the data and the decay fit cannot reach the
/// required order.
fn commutative_torus_family(qs: &[usize]) -> MatrixFamily<TorusFunction> {
    let levels = qs
        .iter()
        .map(|&q| {
            let dim = q;
            FamilyLevel {
                label: format!("diag-q{q}"),
                hbar: nctorus::hbar(q),
                dim,
                quantize: Box::new(move |f: &TorusFunction| {
                    let mut m = CMatrix::zeros(dim, dim);
                    for i in 0..dim {
                        let t = 2.0 * std::f64::consts::PI * (i as f64) / (dim as f64);
                        m.set(i, i, f.eval(t, 1.0 + 0.5 * t));
                    }
                    m
                }),
            }
        })
        .collect();
    MatrixFamily {
        algebra: "trig-polys".into(),
        levels,
        connectors: Vec::new(),
        inverse_pairs: Vec::new(),
        mul: Box::new(|f, g| f.mul(g)),
        add: Box::new(|f, g| f.add(g)),
        scale: Box::new(|f, c| f.scale(c)),
        bracket: Box::new(|f, g| f.poisson(g)),
        sup_norm: Box::new(|f| f.sup_norm_grid()),
        basis: vec![
            ("1".into(), TorusFunction::one()),
            ("cos[1,0]".into(), TorusFunction::cosine(1, 0)),
            ("cos[0,1]".into(), TorusFunction::cosine(0, 1)),
        ],
    }
}

#[test]
fn commutative_family_is_flagged_as_inconsistent() {
    let family = commutative_torus_family(&[5, 8, 13, 21, 34]);
    let probes = vec![
        ("cos[1,0]".to_string(), TorusFunction::cosine(1, 0)),
        ("cos[0,1]".to_string(), TorusFunction::cosine(0, 1)),
    ];
    let report = verify_preq(&family, &probes, 0.5, 1e-9).expect("runs");
    assert!(!report.pass, "a commutative family must fail the decay fit");
    // Residual ‖0 − iħ Q({f,g})‖ scales like ħ¹, well under the 1.4 threshold.
    let fit = &report.slope_fits[0];
    let slope = fit.slope.expect("informative points");
    assert!(slope < 1.3, "expected ~linear decay, got slope {slope}");
    // Every level's ħ re-estimate is 0 against a nonzero declaration.
    for est in &report.hbar_estimates {
        assert!(est.warn, "level {} should warn: {est:?}", est.level);
        assert!(est.estimated.abs() < 1e-12);
    }
}

#[test]
fn torus_family_satisfies_preq_conditions() {
    let family = nctorus::family(&[5, 8, 13, 21, 34]).expect("family builds");
    let probes = vec![
        ("cos[1,0]".to_string(), TorusFunction::cosine(1, 0)),
        ("cos[0,1]".to_string(), TorusFunction::cosine(0, 1)),
        ("sin[1,0]".to_string(), TorusFunction::sine(1, 0)),
    ];
    let report = verify_preq(&family, &probes, 0.5, 1e-9).expect("runs");
    assert!(report.pass, "torus family failed: {report:?}");
    // Pairs with a nonzero bracket decay like ħ³; the (cos, sin) pair of the
    // same mode has zero bracket and exactly commuting images (floor case).
    for fit in &report.slope_fits {
        assert!(fit.pass, "pair {:?} failed", fit.pair);
    }
}

#[test]
fn sphere_compressions_are_block_diagonal() {
    let family = matreg::family(2, 6).expect("family builds");
    // Fine k = 6 (index 4) down to coarse k = 3 (index 1).
    let connector = family.connector(4, 1).expect("declared connector");
    let report = verify_block_diagonal(&family, connector, 1e-9).expect("runs");
    assert!(report.pass, "off-blocks too large: {report:?}");
    assert_eq!(report.src_span_dim, 9, "harmonic span is 9-dimensional");
    assert_eq!(report.dst_span_dim, 9);
    assert!(report.off_block_lower <= 1e-10);
    assert!(report.off_block_upper <= 1e-10);
    assert!(report.diag_block_norm > 0.5);
}

#[test]
fn injected_off_block_entry_is_detected() {
    let mut family = matreg::family(2, 6).expect("family builds");
    let fine = 4; // k = 6, 7×7
    let coarse = 1; // k = 3, 4×4
    let idx = family
        .connectors
        .iter()
        .position(|c| c.src == fine && c.dst == coarse)
        .expect("declared connector");
    let placeholder: Box<dyn Fn(&CMatrix) -> CMatrix + Sync> =
        Box::new(|x: &CMatrix| x.clone());
    let orig_apply = std::mem::replace(&mut family.connectors[idx].apply, placeholder);

    // Corrupt the map: add 0.1·x₀₀·|0⟩⟨3| at the destination. The matrix
    // unit |0⟩⟨3| couples weights m − n = 3, outside everything the degree-2
    // harmonic span can produce, so the addition lands squarely in the
    // complement block.
    let corrupted = Connector {
        src: fine,
        dst: coarse,
        apply: Box::new(move |x: &CMatrix| {
            let mut y = (orig_apply)(x);
            let bump = y.get(0, 3) + x.get(0, 0) * Complex64::new(0.1, 0.0);
            y.set(0, 3, bump);
            y
        }),
    };
    let report = verify_block_diagonal(&family, &corrupted, 1e-9).expect("runs");
    assert!(!report.pass, "injected off-block entry went undetected");
    assert!(
        report.off_block_lower > 1e-3,
        "leakage should be macroscopic, got {}",
        report.off_block_lower
    );
}

#[test]
fn sphere_compression_chain_is_consistent() {
    let family = matreg::family(2, 5).expect("family builds");
    let report = verify_chain_consistency(&family, 1e-9).expect("runs");
    assert!(report.pass, "chain failed: {report:?}");
    // 4 levels with all ordered pairs connected → 4·3·2 = 24 ordered triples.
    assert_eq!(report.triples.len(), 24);
    for t in &report.triples {
        assert!(t.residual <= 1e-10, "triple {:?}: {}", t.levels, t.residual);
    }
}

#[test]
fn corrupted_chain_step_fails_consistency() {
    let mut family = matreg::family(2, 5).expect("family builds");
    // Replace the k=4 → k=3 step (levels are ordered k = 2,3,4,5) with the
    // original followed by conjugation by a nontrivial diagonal unitary.
    let idx = family
        .connectors
        .iter()
        .position(|c| c.src == 2 && c.dst == 1)
        .expect("connector exists");
    let placeholder: Box<dyn Fn(&CMatrix) -> CMatrix + Sync> =
        Box::new(|x: &CMatrix| x.clone());
    let original = std::mem::replace(&mut family.connectors[idx].apply, placeholder);
    let dim = family.levels[1].dim;
    let w = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 0.9 * i as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let w_dag = w.dagger();
    family.connectors[idx].apply = Box::new(move |x: &CMatrix| {
        let y = original(x);
        w.matmul(&y).unwrap().matmul(&w_dag).unwrap()
    });

    let report = verify_chain_consistency(&family, 1e-9).expect("runs");
    assert!(!report.pass, "corrupted step went undetected");
    let worst = report
        .triples
        .iter()
        .map(|t| t.residual)
        .fold(0.0f64, f64::max);
    assert!(worst > 1e-2, "expected a macroscopic defect, got {worst}");
}
