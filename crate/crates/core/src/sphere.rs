//! Gauss-Legendre nodes and product quadrature rules on unit spheres.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial and cached.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature rule for an even integrand over S^{n-1}: directions with
/// weights that sum to the full sphere measure omega_n. For n <= 3 the
/// directions cover one half-sphere with pre-doubled weights.
pub fn sphere_rule(n: usize, angular_nodes: usize) -> Vec<(Vec<f64>, f64)> {
    let m = angular_nodes.max(4);
    match n {
        1 => vec![(vec![1.0], 2.0)],
        2 => {
            // midpoint rule on the half-circle, spectrally accurate on
            // smooth periodic integrands
            (0..m)
                .map(|j| {
                    let phi = std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                    (vec![phi.cos(), phi.sin()], 2.0 * std::f64::consts::PI / m as f64)
                })
                .collect()
        }
        3 => {
            let nz = (m / 2).max(4);
            let gl = gauss_legendre(nz);
            let mut out = Vec::with_capacity(nz * m);
            for (zi, zw) in gl.0.iter().zip(&gl.1) {
                let z = 0.5 * (zi + 1.0); // z in [0,1]: upper hemisphere
                let wz = 0.5 * zw;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..m {
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                    let dir = vec![rho * phi.cos(), rho * phi.sin(), z];
                    out.push((dir, 2.0 * wz * 2.0 * std::f64::consts::PI / m as f64));
                }
            }
            out
        }
        _ => sphere_rule_recursive(n, m),
    }
}

// Full-sphere product rule, Gauss-Legendre in the polar angle itself so the
// sin^{n-2} weight stays part of a smooth integrand.
fn sphere_rule_recursive(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    if n == 2 {
        return (0..2 * m)
            .map(|j| {
                let phi = std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
                (vec![phi.cos(), phi.sin()], std::f64::consts::PI / m as f64)
            })
            .collect();
    }
    let np = (m / 2).max(6);
    let gl = gauss_legendre(np);
    let inner = sphere_rule_recursive(n - 1, m);
    let mut out = Vec::with_capacity(np * inner.len());
    for (ti, tw) in gl.0.iter().zip(&gl.1) {
        let theta = 0.5 * (ti + 1.0) * std::f64::consts::PI;
        let w_theta = 0.5 * std::f64::consts::PI * tw * theta.sin().powi(n as i32 - 2);
        let (cost, sint) = (theta.cos(), theta.sin());
        for (omega, w_in) in &inner {
            let mut dir = Vec::with_capacity(n);
            dir.push(cost);
            dir.extend(omega.iter().map(|c| c * sint));
            out.push((dir, w_theta * w_in));
        }
    }
    out
}
