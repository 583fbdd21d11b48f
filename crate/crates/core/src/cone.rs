//! Symmetric-function and angle algebra on eigenvalue tuples.
//!
//! Everything the continuity method asks of a spectrum lives here: the
//! elementary symmetric polynomials `σ_k`, the angle sum `θ(λ) = Σ arctan λ_i`,
//! membership in the cones `Γ_k` and `Γ^τ`, the subsolution margin
//! `A(μ) = min_j Σ_{i≠j} arctan μ_i`, the two-branch dichotomy with its
//! constant `δ₀`, the append-a-unit-eigenvalue identity behind the dimension
//! lift, and the real/imaginary parts of `Π_j (λ_j + i)`.
//!
//! `σ_k` is evaluated by multiplying out the characteristic polynomial
//! incrementally (O(n²), stable for the small n used here). Brute-force
//! subset enumeration is kept in [`reference`] as the independent oracle.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::Error;
use crate::Result;

/// Default smallness threshold `t₀` when no constant `C` is available; see
/// [`lemma_t0`] for the constructive formula.
pub const DEFAULT_T0: f64 = 1e-2;

/// Ordered real eigenvalue tuple (sorted descending on construction).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenTuple {
    values: Vec<f64>,
}

impl EigenTuple {
    /// Sorts the entries descending. Errors on an empty or non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("eigenvalue tuple must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("eigenvalue tuple has non-finite entries"));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(EigenTuple { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Entries, sorted descending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Cone selector: `Γ_k` (σ₁..σ_k positive) or `Γ^τ` (angle sum above τ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeTag {
    GammaK(usize),
    GammaTau(f64),
}

/// All elementary symmetric polynomials `σ_0..σ_n` of `values`, by the
/// incremental product `Π (x + λ_i)`.
pub fn sigma_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut c = vec![0.0f64; n + 1];
    c[0] = 1.0;
    for (i, &lam) in values.iter().enumerate() {
        for m in (1..=i + 1).rev() {
            c[m] += lam * c[m - 1];
        }
    }
    c
}

/// `σ_k(λ)` with `σ_0 = 1`. Errors if `k > n`.
pub fn sigma_k(lambda: &EigenTuple, k: usize) -> Result<f64> {
    if k > lambda.n() {
        return Err(Error::domain(format!(
            "sigma_{k} undefined for a {}-tuple",
            lambda.n()
        )));
    }
    Ok(sigma_all(lambda.values())[k])
}

/// Angle sum `θ(λ) = Σ arctan λ_i ∈ (−nπ/2, nπ/2)`.
pub fn theta_angle(lambda: &EigenTuple) -> f64 {
    theta_slice(lambda.values())
}

pub fn theta_slice(values: &[f64]) -> f64 {
    values.iter().map(|v| v.atan()).sum()
}

/// Cone membership with a closure slack: `Γ_k` requires `σ_m > −slack` for
/// all `m ≤ k`; `Γ^τ` requires `θ(λ) > τ − slack`.
pub fn in_cone(lambda: &EigenTuple, tag: ConeTag, slack: f64) -> Result<bool> {
    if slack < 0.0 {
        return Err(Error::domain("cone slack must be nonnegative"));
    }
    let n = lambda.n();
    match tag {
        ConeTag::GammaK(k) => {
            if k == 0 || k > n {
                return Err(Error::domain(format!("Gamma_{k} invalid for n = {n}")));
            }
            let sig = sigma_all(lambda.values());
            Ok((1..=k).all(|m| sig[m] > -slack))
        }
        ConeTag::GammaTau(tau) => {
            let lo = (n as f64 - 2.0) * PI / 2.0;
            let hi = n as f64 * PI / 2.0;
            if !(lo..hi).contains(&tau) {
                return Err(Error::domain(format!(
                    "tau = {tau} outside [(n-2)pi/2, n pi/2) for n = {n}"
                )));
            }
            Ok(theta_angle(lambda) > tau - slack)
        }
    }
}

/// Subsolution margin `A(μ) = min_j Σ_{i≠j} arctan μ_i`.
///
/// All n omission sums are formed explicitly (robust to ties) rather than
/// subtracting one arctangent from the total.
pub fn subsolution_margin(mu: &EigenTuple) -> Result<f64> {
    if mu.n() < 2 {
        return Err(Error::domain("subsolution margin needs n >= 2"));
    }
    Ok(subsolution_margin_slice(mu.values()))
}

pub fn subsolution_margin_slice(values: &[f64]) -> f64 {
    let n = values.len();
    let mut best = f64::INFINITY;
    for j in 0..n {
        let mut s = 0.0;
        for (i, &v) in values.iter().enumerate() {
            if i != j {
                s += v.atan();
            }
        }
        best = best.min(s);
    }
    best
}

/// Outcome of the structural checks on a supercritical spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum YuanCheck {
    /// `θ(λ) < τ`: the hypothesis fails, the conclusions are not claimed.
    HypothesisFailed,
    Checked {
        /// `λ_{n−1} > 0` and `λ_{n−1} ≥ |λ_n|` (to tolerance).
        ordered_positivity: bool,
        /// `λ₁ + (n−1) λ_n ≥ 0` (to tolerance).
        trace_pairing: bool,
        /// `λ ∈ Γ_{n−1}` (closure tolerance).
        cone_membership: bool,
    },
}

impl YuanCheck {
    pub fn all_hold(&self) -> bool {
        matches!(
            self,
            YuanCheck::Checked {
                ordered_positivity: true,
                trace_pairing: true,
                cone_membership: true,
            }
        )
    }
}

/// Checks the three conclusions available when `θ(λ) ≥ τ ≥ (n−2)π/2`.
pub fn yuan_check(lambda: &EigenTuple, tau: f64, tol: f64) -> YuanCheck {
    let v = lambda.values();
    let n = v.len();
    if theta_angle(lambda) < tau {
        return YuanCheck::HypothesisFailed;
    }
    if n == 1 {
        // Degenerate: conclusions collapse to λ₁ ≥ tan(τ) > ... nothing to check.
        return YuanCheck::Checked {
            ordered_positivity: true,
            trace_pairing: true,
            cone_membership: v[0] > -tol,
        };
    }
    let second_smallest = v[n - 2];
    let smallest = v[n - 1];
    let ordered_positivity = second_smallest > -tol && second_smallest >= smallest.abs() - tol;
    let trace_pairing = v[0] + (n as f64 - 1.0) * smallest >= -tol;
    let sig = sigma_all(v);
    let cone_membership = (1..n).all(|m| sig[m] > -tol);
    YuanCheck::Checked {
        ordered_positivity,
        trace_pairing,
        cone_membership,
    }
}

/// Which branch of the two-branch alternative held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DichotomyBranch {
    /// Branch (i): the subsolution direction wins,
    /// `Σ (μ_i − λ_i)/(1+λ_i²) ≥ δ₀ Σ 1/(1+λ_i²)`.
    Subsolution,
    /// Branch (ii): every `1/(1+λ_j²)` is a definite fraction of the total.
    SmallEigenvalue,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DichotomyResult {
    pub branch: DichotomyBranch,
    pub delta0: f64,
    pub t0: f64,
}

/// Evaluates the dichotomy for sorted `μ` against sorted `λ` at a given
/// `δ₀`. `None` means neither branch holds at this `δ₀` (the failure marker
/// consumed by [`delta0_search`]).
pub fn dichotomy(
    mu: &EigenTuple,
    lambda: &EigenTuple,
    delta0: f64,
) -> Result<Option<DichotomyResult>> {
    if delta0 <= 0.0 {
        return Err(Error::domain("delta0 must be positive"));
    }
    if mu.n() != lambda.n() {
        return Err(Error::domain("dichotomy needs tuples of equal length"));
    }
    let lam = lambda.values();
    let m = mu.values();
    let weights: Vec<f64> = lam.iter().map(|l| 1.0 / (1.0 + l * l)).collect();
    let total: f64 = weights.iter().sum();
    let lhs: f64 = m
        .iter()
        .zip(lam.iter())
        .zip(weights.iter())
        .map(|((mi, li), w)| (mi - li) * w)
        .sum();
    let branch = if lhs >= delta0 * total {
        Some(DichotomyBranch::Subsolution)
    } else if weights.iter().cloned().fold(f64::INFINITY, f64::min) >= delta0 * total {
        Some(DichotomyBranch::SmallEigenvalue)
    } else {
        None
    };
    Ok(branch.map(|branch| DichotomyResult {
        branch,
        delta0,
        t0: DEFAULT_T0,
    }))
}

/// Constructive smallness threshold `t₀ = (A₀ − (n−3)π/2) / (8C)` given the
/// phase-bracket constant `C`.
pub fn lemma_t0(a0: f64, n: usize, c: f64) -> Result<f64> {
    let floor = (n as f64 - 3.0) * PI / 2.0;
    if a0 <= floor {
        return Err(Error::domain("A0 must exceed (n-3)pi/2"));
    }
    if c <= 0.0 {
        return Err(Error::domain("bracket constant C must be positive"));
    }
    Ok((a0 - floor) / (8.0 * c))
}

/// Largest `δ₀` on a 64-point log grid over `[1e−12, 1]` for which no
/// sampled `λ` returns the failure marker against the fixed `μ`.
///
/// "Holds at δ" is monotone in δ, so a bisection over grid indices finds
/// the boundary. Returns `None` when even the smallest grid value fails.
pub fn delta0_search(mu: &EigenTuple, lambdas: &[EigenTuple]) -> Result<Option<f64>> {
    const GRID: usize = 64;
    let grid: Vec<f64> = (0..GRID)
        .map(|i| {
            let t = i as f64 / (GRID - 1) as f64;
            10f64.powf(-12.0 * (1.0 - t))
        })
        .collect();
    let holds = |delta: f64| -> Result<bool> {
        for lam in lambdas {
            if dichotomy(mu, lam, delta)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if !holds(grid[0])? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0usize, GRID - 1);
    if holds(grid[hi])? {
        return Ok(Some(grid[hi]));
    }
    // invariant: holds at lo, fails at hi
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if holds(grid[mid])? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(grid[lo]))
}

/// `(σ_k(λ, 1), σ_k(λ) + σ_{k−1}(λ))` — the two sides of the identity that
/// turns `σ_{n−1} + σ_n` statements in dimension n into `σ_n` statements in
/// dimension n+1. Both sides agree to rounding; callers assert 1e−12.
pub fn append_unit_eigenvalue_identity(lambda: &EigenTuple, k: usize) -> Result<(f64, f64)> {
    let n = lambda.n();
    if k > n + 1 {
        return Err(Error::domain(format!(
            "sigma_{k} undefined for the lifted {}-tuple",
            n + 1
        )));
    }
    let mut lifted = lambda.values().to_vec();
    lifted.push(1.0);
    let lhs = sigma_all(&lifted)[k];
    let sig = sigma_all(lambda.values());
    let at = |m: isize| -> f64 {
        if m < 0 || m as usize > n {
            0.0
        } else {
            sig[m as usize]
        }
    };
    let rhs = at(k as isize) + at(k as isize - 1);
    Ok((lhs, rhs))
}

/// `(Re, Im)` of `Π_j (λ_j + i)`.
///
/// Expanding the product gives `Re = σ_n − σ_{n−2} + σ_{n−4} − ⋯` and
/// `Im = σ_{n−1} − σ_{n−3} + ⋯`; `Im = 0` with `Re < 0` characterizes the
/// critical phase pointwise, and `atan2(Im, Re) ≡ nπ/2 − θ(λ) (mod 2π)`.
pub fn critical_form_parts(lambda: &EigenTuple) -> (f64, f64) {
    critical_form_parts_slice(lambda.values())
}

pub fn critical_form_parts_slice(values: &[f64]) -> (f64, f64) {
    let mut p = Complex64::new(1.0, 0.0);
    for &v in values {
        p *= Complex64::new(v, 1.0);
    }
    (p.re, p.im)
}

/// Brute-force reference implementations retained as independent oracles
/// for the recurrence-based fast paths. Test and harness code only.
pub mod reference {
    /// `σ_k` by explicit enumeration of all k-subsets.
    pub fn sigma_k_enum(values: &[f64], k: usize) -> f64 {
        assert!(k <= values.len());
        if k == 0 {
            return 1.0;
        }
        let mut total = 0.0;
        let mut idx: Vec<usize> = (0..k).collect();
        let n = values.len();
        loop {
            total += idx.iter().map(|&i| values[i]).product::<f64>();
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        total
    }

    /// Sum of |subset product| over all k-subsets: the natural scale for
    /// relative comparisons of σ_k evaluations.
    pub fn sigma_k_abs_scale(values: &[f64], k: usize) -> f64 {
        assert!(k <= values.len());
        if k == 0 {
            return 1.0;
        }
        let mut total = 0.0;
        let mut idx: Vec<usize> = (0..k).collect();
        let n = values.len();
        loop {
            total += idx.iter().map(|&i| values[i].abs()).product::<f64>();
            if !next_combination(&mut idx, n) {
                break;
            }
        }
        total
    }

    fn next_combination(idx: &mut [usize], n: usize) -> bool {
        let k = idx.len();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(v: &[f64]) -> EigenTuple {
        EigenTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_basics() {
        assert_eq!(sigma_k(&tuple(&[1.0, 1.0, 1.0]), 2).unwrap(), 3.0);
        assert_eq!(sigma_k(&tuple(&[1.0, 1.0, 0.0]), 2).unwrap(), 1.0);
        // frozen from subset enumeration: {2,1,1}=2, {2,1,-0.5}=-1 twice, {1,1,-0.5}=-0.5
        let s = sigma_k(&tuple(&[2.0, 1.0, 1.0, -0.5]), 3).unwrap();
        assert!((s - (-0.5)).abs() < 1e-15);
        assert_eq!(sigma_k(&tuple(&[5.0]), 0).unwrap(), 1.0);
        assert!(sigma_k(&tuple(&[5.0]), 2).is_err());
    }

    #[test]
    fn sigma_recurrence_matches_enumeration() {
        let mut rng = crate::sampling::SeedRng::new(11);
        for _ in 0..200 {
            let n = 1 + rng.index(6);
            let v: Vec<f64> = (0..n).map(|_| rng.range(-3.0, 3.0)).collect();
            let sig = sigma_all(&v);
            for k in 0..=n {
                let oracle = reference::sigma_k_enum(&v, k);
                let scale = reference::sigma_k_abs_scale(&v, k).max(1.0);
                assert!(
                    (sig[k] - oracle).abs() <= 1e-13 * scale,
                    "sigma_{k} of {v:?}: {} vs {}",
                    sig[k],
                    oracle
                );
            }
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_angle(&tuple(&[0.0, 0.0, 0.0])), 0.0);
        assert!((theta_angle(&tuple(&[1.0, 1.0, 0.0])) - PI / 2.0).abs() < 1e-15);
        assert!((theta_angle(&tuple(&[1.0, 1.0, 1.0, 1.0])) - PI).abs() < 1e-15);
    }

    #[test]
    fn cone_membership() {
        assert!(in_cone(&tuple(&[1.0, 1.0, 0.0]), ConeTag::GammaK(2), 0.0).unwrap());
        // sigma_2(2,2,-1) = 4 - 2 - 2 = 0: not strictly inside
        assert!(!in_cone(&tuple(&[2.0, 2.0, -1.0]), ConeTag::GammaK(2), 0.0).unwrap());
        // theta(1,1,1) = 3pi/4 is not strictly above tau = 3pi/4
        assert!(
            !in_cone(&tuple(&[1.0, 1.0, 1.0]), ConeTag::GammaTau(3.0 * PI / 4.0), 0.0).unwrap()
        );
        assert!(in_cone(&tuple(&[1.0]), ConeTag::GammaK(2), 0.0).is_err());
        assert!(in_cone(&tuple(&[1.0, 1.0]), ConeTag::GammaTau(-10.0), 0.0).is_err());
    }

    #[test]
    fn subsolution_margin_examples() {
        assert!((subsolution_margin(&tuple(&[1.0, 1.0, 1.0])).unwrap() - PI / 2.0).abs() < 1e-15);
        // min over omissions of (2,1,1): omitting the 2 leaves 2 * arctan 1
        assert!((subsolution_margin(&tuple(&[2.0, 1.0, 1.0])).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(subsolution_margin(&tuple(&[0.0, 0.0])).unwrap(), 0.0);
        assert!(subsolution_margin(&tuple(&[1.0])).is_err());
    }

    #[test]
    fn yuan_examples() {
        let all = yuan_check(&tuple(&[1.0, 1.0, 0.0]), PI / 2.0, 1e-12);
        assert!(all.all_hold());
        let b = yuan_check(&tuple(&[3.0, 1.0, -0.2]), PI / 2.0, 1e-12);
        assert!(b.all_hold());
        assert_eq!(
            yuan_check(&tuple(&[1.0, -1.0, 0.0]), PI / 2.0, 1e-12),
            YuanCheck::HypothesisFailed
        );
    }

    #[test]
    fn dichotomy_examples() {
        // left ~ 0.9899, right = 0.4 * (0.5 + 0.5 + ~1.0): branch (i)
        let mu = tuple(&[1.0, 1.0, 1.0]);
        let lam = tuple(&[1.0, 1.0, (0.01f64).tan()]);
        let r = dichotomy(&mu, &lam, 0.4).unwrap().unwrap();
        assert_eq!(r.branch, DichotomyBranch::Subsolution);

        // mu = lambda: branch (i) degenerates to 0, branch (ii) must carry
        let lam = tuple(&[1.0, 2.0, 0.5]);
        let r = dichotomy(&lam, &lam, 1e-6).unwrap().unwrap();
        assert_eq!(r.branch, DichotomyBranch::SmallEigenvalue);

        // a huge top eigenvalue starves branch (ii); delta0 = 1e-6 fails both
        let lam = tuple(&[1e6, 1.0, 1.0]);
        assert!(dichotomy(&mu, &lam, 1e-6).unwrap().is_none());
        assert!(dichotomy(&mu, &lam, 0.0).is_err());
    }

    #[test]
    fn delta0_search_finds_a_constant() {
        let mu = tuple(&[1.0, 1.0, 1.0]);
        let mut rng = crate::sampling::SeedRng::new(5);
        let mut lams = Vec::new();
        // spectra hugging the critical band theta in (pi/2, pi/2 + 0.05)
        while lams.len() < 500 {
            let v: Vec<f64> = (0..3).map(|_| rng.range(-1.0, 4.0)).collect();
            let t = theta_slice(&v);
            if t > PI / 2.0 && t < PI / 2.0 + 0.05 {
                lams.push(tuple(&v));
            }
        }
        let found = delta0_search(&mu, &lams).unwrap().expect("delta0 exists");
        assert!(found > 0.0 && found <= 1.0);
        for lam in &lams {
            assert!(dichotomy(&mu, lam, found).unwrap().is_some());
        }
    }

    #[test]
    fn append_identity_examples() {
        let (a, b) = append_unit_eigenvalue_identity(&tuple(&[1.0, 1.0]), 2).unwrap();
        assert_eq!((a, b), (3.0, 3.0));
        let (a, b) = append_unit_eigenvalue_identity(&tuple(&[0.0, 0.0, 0.0]), 1).unwrap();
        assert_eq!((a, b), (1.0, 1.0));
        let lam = tuple(&[2.0, -1.0, 0.5]);
        for k in 0..=4 {
            let (lhs, rhs) = append_unit_eigenvalue_identity(&lam, k).unwrap();
            let oracle = {
                let mut v = lam.values().to_vec();
                v.push(1.0);
                reference::sigma_k_enum(&v, k)
            };
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            assert!((lhs - oracle).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn critical_form_examples() {
        let (re, im) = critical_form_parts(&tuple(&[1.0, 1.0, 0.0]));
        assert!((re - (-2.0)).abs() < 1e-15 && im.abs() < 1e-15);
        let (re, im) = critical_form_parts(&tuple(&[1.0, 1.0, 1.0, 1.0]));
        assert!((re - (-4.0)).abs() < 1e-14 && im.abs() < 1e-14);
    }

    #[test]
    fn critical_form_matches_alternating_sigma_sums() {
        // dual route: Re = σ_n − σ_{n−2} + σ_{n−4} − ⋯, Im = σ_{n−1} − σ_{n−3} + ⋯
        let mut rng = crate::sampling::SeedRng::new(61);
        for _ in 0..200 {
            let n = 2 + rng.index(4);
            let v: Vec<f64> = (0..n).map(|_| rng.range(-4.0, 4.0)).collect();
            let (re, im) = critical_form_parts_slice(&v);
            let sig = sigma_all(&v);
            let mut re_sum = 0.0;
            let mut im_sum = 0.0;
            for (step, k) in (0..=n).rev().step_by(2).enumerate() {
                let sign = if step % 2 == 0 { 1.0 } else { -1.0 };
                re_sum += sign * sig[k];
            }
            for (step, k) in (0..n).rev().step_by(2).enumerate() {
                let sign = if step % 2 == 0 { 1.0 } else { -1.0 };
                im_sum += sign * sig[k];
            }
            let scale = v.iter().fold(1.0f64, |acc, x| acc * (1.0 + x * x)).sqrt();
            assert!((re - re_sum).abs() <= 1e-12 * scale);
            assert!((im - im_sum).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn critical_form_angle_consistency() {
        let mut rng = crate::sampling::SeedRng::new(23);
        for _ in 0..500 {
            let v: Vec<f64> = (0..3).map(|_| rng.range(-5.0, 5.0)).collect();
            let lam = tuple(&v);
            let (re, im) = critical_form_parts(&lam);
            let lhs = im.atan2(re);
            let rhs = 3.0 * PI / 2.0 - theta_angle(&lam);
            let diff = (lhs - rhs).rem_euclid(2.0 * PI);
            let dist = diff.min(2.0 * PI - diff);
            assert!(dist < 1e-10, "angle mismatch {dist} for {v:?}");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recurrence_equals_enumeration(
                v in proptest::collection::vec(-4.0f64..4.0, 1..7)
            ) {
                let sig = sigma_all(&v);
                for k in 0..=v.len() {
                    let oracle = reference::sigma_k_enum(&v, k);
                    let scale = reference::sigma_k_abs_scale(&v, k).max(1.0);
                    prop_assert!((sig[k] - oracle).abs() <= 1e-13 * scale);
                }
            }

            #[test]
            fn append_identity_holds(
                v in proptest::collection::vec(-4.0f64..4.0, 1..6),
                k in 0usize..7
            ) {
                let lam = EigenTuple::new(v).unwrap();
                prop_assume!(k <= lam.n() + 1);
                let (lhs, rhs) = append_unit_eigenvalue_identity(&lam, k).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
            }

            #[test]
            fn theta_stays_in_the_open_band(
                v in proptest::collection::vec(-50.0f64..50.0, 1..7)
            ) {
                let lam = EigenTuple::new(v).unwrap();
                let n = lam.n() as f64;
                let t = theta_angle(&lam);
                prop_assert!(t > -n * PI / 2.0 && t < n * PI / 2.0);
            }
        }
    }

    #[test]
    fn lemma_t0_formula() {
        let t0 = lemma_t0(0.3, 3, 2.0).unwrap();
        assert!((t0 - 0.3 / 16.0).abs() < 1e-15);
        assert!(lemma_t0(-0.1, 3, 2.0).is_err());
        assert!(lemma_t0(0.3, 3, 0.0).is_err());
    }
}
