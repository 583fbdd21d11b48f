//! Gauss-Legendre quadrature and the radial integrals of the standard
//! compactly supported bump kernel.

use std::f64::consts::PI;

/// Nodes and weights on `[−1, 1]` by Newton iteration on the Legendre
/// polynomial (standard Golub-free construction, deterministic).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = pk;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `∫₀¹ e^{1/(ρ²−1)} ρ^power dρ` with an `npoints` Gauss-Legendre rule.
pub fn bump_radial_integral(power: usize, npoints: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(npoints);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let rho = 0.5 * (x + 1.0); // map to (0, 1)
        let val = (1.0 / (rho * rho - 1.0)).exp() * rho.powi(power as i32);
        acc += w * 0.5 * val;
    }
    acc
}

/// Surface area of the unit sphere in `ℝ^d` for even `d`:
/// `2 π^{d/2} / Γ(d/2)` with `Γ(m) = (m−1)!`.
pub fn sphere_area_even_dim(d: usize) -> f64 {
    assert!(d >= 2 && d % 2 == 0, "even dimensions only");
    let half = d / 2;
    let mut gamma = 1.0f64;
    for k in 1..half {
        gamma *= k as f64;
    }
    2.0 * PI.powi(half as i32) / gamma
}
