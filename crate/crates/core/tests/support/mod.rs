//! Shared helpers for the integration tests: an independent spherical
//! quadrature oracle (Gauss–Legendre in θ × uniform trapezoid in φ), exact
//! moment formulas, and seeded RNG construction.
//!
//! Everything here is deliberately built from scratch, without touching the
//! library's own linear algebra or quantization code, so that agreement
//! between the two is evidence rather than tautology.

#![allow(dead_code)]

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Standard initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_{n-1}(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // P'_n(x) = n (x P_n − P_{n−1}) / (x² − 1).
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Integrate g(θ, φ) over the unit sphere with measure sinθ dθ dφ,
/// using 64-point Gauss–Legendre in θ and a 128-point trapezoid rule in φ.
/// Exact (to rounding) for smooth integrands of the bandwidths used here.
pub fn sphere_integral(g: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let n_theta = 64;
    let n_phi = 128;
    let (t_nodes, t_weights) = gauss_legendre(n_theta);
    let mut total = Complex64::new(0.0, 0.0);
    for (t, wt) in t_nodes.iter().zip(t_weights.iter()) {
        // Map [−1, 1] → [0, π].
        let theta = std::f64::consts::PI * (t + 1.0) / 2.0;
        let jac = std::f64::consts::PI / 2.0;
        let mut phi_sum = Complex64::new(0.0, 0.0);
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            phi_sum += g(theta, phi);
        }
        phi_sum *= 2.0 * std::f64::consts::PI / n_phi as f64;
        total += phi_sum * wt * jac * theta.sin();
    }
    total
}

/// Integrate f(x, y, z) over the unit sphere (Cartesian wrapper).
pub fn sphere_integral_xyz(f: impl Fn(f64, f64, f64) -> Complex64) -> Complex64 {
    sphere_integral(|theta, phi| {
        let (st, ct) = (theta.sin(), theta.cos());
        f(st * phi.cos(), st * phi.sin(), ct)
    })
}

/// Exact sphere moment ∫ x^a y^b z^c dΩ = 4π (a−1)!! (b−1)!! (c−1)!! / (a+b+c+1)!!
/// when a, b, c are all even; zero otherwise.
pub fn exact_sphere_moment(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    fn double_factorial(n: i64) -> f64 {
        if n <= 0 {
            1.0
        } else {
            let mut p = 1.0;
            let mut k = n;
            while k > 0 {
                p *= k as f64;
                k -= 2;
            }
            p
        }
    }
    4.0 * std::f64::consts::PI * double_factorial(a as i64 - 1) * double_factorial(b as i64 - 1)
        * double_factorial(c as i64 - 1)
        / double_factorial((a + b + c) as i64 + 1)
}

/// Matrix elements of the lowest-weight quantization of a sphere function by
/// direct quadrature: T(f)_mn = I_mn(f) / √(I_mm(1) · I_nn(1)) with
/// I_mn(f) = ∫ f · cos^{2k−m−n}(θ/2) sin^{m+n}(θ/2) e^{i(m−n)φ} dΩ.
///
/// The sections behind this are the monomial holomorphic sections of the
/// degree-k line bundle in stereographic coordinates, with the chart oriented
/// so that the n-th section carries angular dependence e^{−inφ} (the
/// orientation under which {x, y} = z quantizes with positive ħ). Only their
/// pointwise absolute values and relative phases enter, so the computation
/// stays independent of the library's algebraic route.
pub fn toeplitz_entry_by_quadrature(
    k: usize,
    m: usize,
    n: usize,
    f: impl Fn(f64, f64, f64) -> Complex64,
) -> Complex64 {
    let weight = |theta: f64, a: usize, b: usize| -> f64 {
        (theta / 2.0).cos().powi((2 * k - a - b) as i32) * (theta / 2.0).sin().powi((a + b) as i32)
    };
    let i_mn = sphere_integral(|theta, phi| {
        let (st, ct) = (theta.sin(), theta.cos());
        let phase = Complex64::from_polar(1.0, (m as f64 - n as f64) * phi);
        f(st * phi.cos(), st * phi.sin(), ct) * weight(theta, m, n) * phase
    });
    let norm_m = sphere_integral(|theta, _| Complex64::new(weight(theta, m, m), 0.0)).re;
    let norm_n = sphere_integral(|theta, _| Complex64::new(weight(theta, n, n), 0.0)).re;
    i_mn / (norm_m * norm_n).sqrt()
}

/// Mean of a function on the 2-torus by an n × n uniform grid. The uniform
/// grid integrates trigonometric polynomials exactly whenever every mode has
/// |m_i| < n, so this is an independent integration oracle for Fourier data.
pub fn torus_mean(n: usize, f: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += f(i as f64 * step, j as f64 * step);
        }
    }
    acc / Complex64::new((n * n) as f64, 0.0)
}

/// Deterministic RNG for randomized invariant suites.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
