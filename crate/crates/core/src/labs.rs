//! Bulk property sweeps: the cone-algebra lab and the weak-solutions lab.
//!
//! Both labs are pure functions of (config, seed): sampling is chunked, each
//! chunk derives its own stream, and chunk results merge through min/max
//! only, so reports are identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cone::{
    append_unit_eigenvalue_identity, critical_form_parts_slice, delta0_search, sigma_all,
    subsolution_margin_slice, theta_slice, EigenTuple,
};
use crate::error::Error;
use crate::herm::CMat;
use crate::sampling::{derive_seed, unitary, SeedRng};
use crate::weak::{
    comparison_check, cone_margins, keylemmavr_checks, make_supersolution_partner,
    polarized_sigma_k, sample_gamma_k_quadratic, sample_solution_quadratic,
    ComparisonOutcome, MollifierKernel,
};
use crate::Result;

// ---------------------------------------------------------------------------
// cone lab

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeLabConfig {
    pub seed: u64,
    /// Accepted samples per (n, τ) configuration.
    pub samples_per_config: usize,
    pub dims: Vec<usize>,
    /// Offsets above the critical angle defining the τ values.
    pub tau_offsets: Vec<f64>,
    /// Band samples per dimension for the δ₀ search.
    pub dichotomy_samples: usize,
    pub schur_horn_trials: usize,
    pub append_trials: usize,
}

impl Default for ConeLabConfig {
    fn default() -> Self {
        ConeLabConfig {
            seed: 1,
            samples_per_config: 100_000,
            dims: vec![2, 3, 4, 5],
            tau_offsets: vec![0.0, 0.3],
            dichotomy_samples: 10_000,
            schur_horn_trials: 2_000,
            append_trials: 10_000,
        }
    }
}

/// Worst margins of one (n, τ) sweep. All "worst" values are minima of
/// quantities that the lemmas force to be ≥ 0 (up to the stated tolerance).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeConfigReport {
    pub n: usize,
    pub tau: f64,
    pub samples: usize,
    pub yuan_violations: usize,
    /// min over samples and conclusions of the Yuan margins.
    pub yuan_worst: f64,
    pub convexity_pairs: usize,
    /// min of `θ(midpoint) − τ` over sampled `Γ^τ` pairs.
    pub convexity_worst: f64,
    pub concavity_pairs: usize,
    /// min midpoint-concavity gap of `σ_{n−1}^{1/(n−1)}` on `Γ_{n−1}` pairs.
    pub concavity_root_worst: f64,
    /// min midpoint-concavity gap of `σ_n/σ_{n−1}` on `Γ_{n−1}` pairs.
    pub concavity_quotient_worst: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub n: usize,
    pub samples: usize,
    pub delta0: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeLabReport {
    pub seed: u64,
    pub configs: Vec<ConeConfigReport>,
    pub schur_horn_trials: usize,
    /// min of `Σ f_i A_ii − Σ f_i μ_i` over trials.
    pub schur_horn_worst: f64,
    pub append_trials: usize,
    /// max relative gap of the append-unit-eigenvalue identity.
    pub append_worst_rel: f64,
    /// max circle distance of `atan2(Im, Re)` from `nπ/2 − θ(λ)`.
    pub angle_consistency_worst: f64,
    pub dichotomy: Vec<DichotomyReport>,
    pub pass: bool,
}

const YUAN_TOL: f64 = 1e-10;
const CONVEXITY_TOL: f64 = 1e-12;
const CONCAVITY_TOL: f64 = 1e-10;

fn yuan_margins(sorted: &[f64], tau: f64) -> f64 {
    let n = sorted.len();
    let mut worst = f64::INFINITY;
    debug_assert!(theta_slice(sorted) >= tau, "caller filters by the hypothesis");
    // (1) λ_{n−1} > 0 and λ_{n−1} ≥ |λ_n|
    worst = worst.min(sorted[n - 2]);
    worst = worst.min(sorted[n - 2] - sorted[n - 1].abs());
    // (2) λ₁ + (n−1) λ_n ≥ 0
    worst = worst.min(sorted[0] + (n as f64 - 1.0) * sorted[n - 1]);
    // (3) Γ_{n−1}
    let sig = sigma_all(sorted);
    for s in &sig[1..n] {
        worst = worst.min(*s);
    }
    worst
}

struct ConeChunk {
    samples: usize,
    yuan_violations: usize,
    yuan_worst: f64,
    convexity_pairs: usize,
    convexity_worst: f64,
    concavity_pairs: usize,
    concavity_root_worst: f64,
    concavity_quotient_worst: f64,
}

fn cone_chunk(n: usize, tau: f64, quota: usize, seed: u64) -> ConeChunk {
    let mut rng = SeedRng::new(seed);
    let mut out = ConeChunk {
        samples: 0,
        yuan_violations: 0,
        yuan_worst: f64::INFINITY,
        convexity_pairs: 0,
        convexity_worst: f64::INFINITY,
        concavity_pairs: 0,
        concavity_root_worst: f64::INFINITY,
        concavity_quotient_worst: f64::INFINITY,
    };
    let mut tau_prev: Option<Vec<f64>> = None;
    let mut cone_prev: Option<Vec<f64>> = None;
    while out.samples < quota {
        let mut v: Vec<f64> = (0..n).map(|_| rng.range(-5.0, 5.0)).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Γ_{n−1} stream for the concavity pairs (independent filter)
        let sig = sigma_all(&v);
        if sig[1..n].iter().all(|s| *s > 0.0) {
            if let Some(prev) = cone_prev.take() {
                out.concavity_pairs += 1;
                let mid: Vec<f64> = v.iter().zip(prev.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
                let sig_mid = sigma_all(&mid);
                let sig_prev = sigma_all(&prev);
                let root = |s: &[f64]| s[n - 1].powf(1.0 / (n as f64 - 1.0));
                if sig_mid[1..n].iter().all(|s| *s > 0.0) {
                    let gap_root =
                        root(&sig_mid) - 0.5 * (root(&sig) + root(&sig_prev));
                    out.concavity_root_worst = out.concavity_root_worst.min(gap_root);
                    let q = |s: &[f64]| s[n] / s[n - 1];
                    let gap_q = q(&sig_mid) - 0.5 * (q(&sig) + q(&sig_prev));
                    out.concavity_quotient_worst = out.concavity_quotient_worst.min(gap_q);
                }
            } else {
                cone_prev = Some(v.clone());
            }
        }
        let theta = theta_slice(&v);
        if theta < tau {
            continue;
        }
        out.samples += 1;
        let margin = yuan_margins(&v, tau);
        out.yuan_worst = out.yuan_worst.min(margin);
        if margin < -YUAN_TOL {
            out.yuan_violations += 1;
        }
        if let Some(prev) = tau_prev.take() {
            out.convexity_pairs += 1;
            let mid: Vec<f64> = v.iter().zip(prev.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
            out.convexity_worst = out.convexity_worst.min(theta_slice(&mid) - tau);
        } else {
            tau_prev = Some(v.clone());
        }
    }
    out
}

/// Runs the cone lab.
pub fn cone_lab(config: &ConeLabConfig) -> Result<ConeLabReport> {
    for &n in &config.dims {
        if !(2..=8).contains(&n) {
            return Err(Error::domain(format!("cone lab dimension {n} outside 2..=8")));
        }
    }
    const CHUNKS: usize = 64;
    let mut configs = Vec::new();
    for &n in &config.dims {
        for &off in &config.tau_offsets {
            let tau = (n as f64 - 2.0) * PI / 2.0 + off;
            let quota = config.samples_per_config / CHUNKS
                + usize::from(config.samples_per_config % CHUNKS != 0);
            let tag = (n as u64) << 32 | ((off * 1e6) as u64);
            let chunks: Vec<ConeChunk> = (0..CHUNKS)
                .into_par_iter()
                .map(|c| cone_chunk(n, tau, quota, derive_seed(config.seed, tag ^ c as u64)))
                .collect();
            let mut rep = ConeConfigReport {
                n,
                tau,
                samples: 0,
                yuan_violations: 0,
                yuan_worst: f64::INFINITY,
                convexity_pairs: 0,
                convexity_worst: f64::INFINITY,
                concavity_pairs: 0,
                concavity_root_worst: f64::INFINITY,
                concavity_quotient_worst: f64::INFINITY,
            };
            for c in chunks {
                rep.samples += c.samples;
                rep.yuan_violations += c.yuan_violations;
                rep.yuan_worst = rep.yuan_worst.min(c.yuan_worst);
                rep.convexity_pairs += c.convexity_pairs;
                rep.convexity_worst = rep.convexity_worst.min(c.convexity_worst);
                rep.concavity_pairs += c.concavity_pairs;
                rep.concavity_root_worst = rep.concavity_root_worst.min(c.concavity_root_worst);
                rep.concavity_quotient_worst =
                    rep.concavity_quotient_worst.min(c.concavity_quotient_worst);
            }
            configs.push(rep);
        }
    }

    // Schur-Horn pairing across dimensions
    let mut schur_worst = f64::INFINITY;
    for trial in 0..config.schur_horn_trials {
        let mut rng = SeedRng::new(derive_seed(config.seed, 0x5348 ^ trial as u64));
        let n = config.dims[trial % config.dims.len()];
        let mut mu: Vec<f64> = (0..n).map(|_| rng.range(-3.0, 3.0)).collect();
        mu.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let d = CMat::from_fn(n, |i, j| {
            if i == j {
                num_complex::Complex64::new(mu[i], 0.0)
            } else {
                num_complex::Complex64::ZERO
            }
        });
        let u = unitary(&mut rng, n);
        let a = d.conjugate_by(&u).hermitize();
        let mut f: Vec<f64> = (0..n).map(|_| rng.range(0.0, 2.0)).collect();
        f.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let lhs: f64 = (0..n).map(|i| f[i] * a.a[i][i].re).sum();
        let rhs: f64 = (0..n).map(|i| f[i] * mu[i]).sum();
        schur_worst = schur_worst.min(lhs - rhs);
    }

    // append-unit-eigenvalue identity and angle consistency
    let mut append_worst = 0.0f64;
    let mut angle_worst = 0.0f64;
    for trial in 0..config.append_trials {
        let mut rng = SeedRng::new(derive_seed(config.seed, 0x4150 ^ trial as u64));
        let n = config.dims[trial % config.dims.len()];
        let v: Vec<f64> = (0..n).map(|_| rng.range(-5.0, 5.0)).collect();
        let tuple = EigenTuple::new(v.clone())?;
        for k in 0..=n + 1 {
            let (lhs, rhs) = append_unit_eigenvalue_identity(&tuple, k)?;
            let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
            append_worst = append_worst.max(rel);
        }
        let (re, im) = critical_form_parts_slice(&v);
        let lhs = im.atan2(re);
        let rhs = n as f64 * PI / 2.0 - theta_slice(&v);
        angle_worst = angle_worst.max(crate::phase::circle_distance(lhs, rhs));
    }

    // dichotomy: fixed μ = (2, …, 2), spectra shifted into the band
    // ((n−2)π/2, (n−2)π/2 + 0.05) along the diagonal
    let mut dichotomy = Vec::new();
    for &n in &config.dims {
        let mu = EigenTuple::new(vec![2.0; n])?;
        debug_assert!(
            subsolution_margin_slice(mu.values()) > (n as f64 - 3.0) * PI / 2.0 + 0.1,
            "mu must satisfy the dichotomy hypothesis with headroom"
        );
        let critical = (n as f64 - 2.0) * PI / 2.0;
        let mut lambdas = Vec::with_capacity(config.dichotomy_samples);
        let mut rng = SeedRng::new(derive_seed(config.seed, 0xD1C0 ^ n as u64));
        while lambdas.len() < config.dichotomy_samples {
            let v: Vec<f64> = (0..n).map(|_| rng.range(-5.0, 5.0)).collect();
            let target = critical + rng.range(1e-6, 0.05);
            // shift along the diagonal onto the target level set
            let mut s = 0.0f64;
            let mut ok = false;
            for _ in 0..80 {
                let theta: f64 = v.iter().map(|l| (l + s).atan()).sum();
                let gap = theta - target;
                if gap.abs() < 1e-12 {
                    ok = true;
                    break;
                }
                let slope: f64 = v.iter().map(|l| 1.0 / (1.0 + (l + s) * (l + s))).sum();
                s -= gap / slope;
            }
            if !ok {
                continue;
            }
            let shifted: Vec<f64> = v.iter().map(|l| l + s).collect();
            lambdas.push(EigenTuple::new(shifted)?);
        }
        let found = delta0_search(&mu, &lambdas)?;
        dichotomy.push(DichotomyReport {
            n,
            samples: lambdas.len(),
            delta0: found,
        });
    }

    let pass = configs.iter().all(|c| {
        c.yuan_violations == 0
            && c.yuan_worst >= -YUAN_TOL
            && c.convexity_worst >= -CONVEXITY_TOL
            && c.concavity_root_worst >= -CONCAVITY_TOL
            && c.concavity_quotient_worst >= -CONCAVITY_TOL
    }) && schur_worst >= -1e-10
        && append_worst <= 1e-12
        && angle_worst <= 1e-10
        && dichotomy.iter().all(|d| d.delta0.is_some());

    Ok(ConeLabReport {
        seed: config.seed,
        configs,
        schur_horn_trials: config.schur_horn_trials,
        schur_horn_worst: schur_worst,
        append_trials: config.append_trials,
        append_worst_rel: append_worst,
        angle_consistency_worst: angle_worst,
        dichotomy,
        pass,
    })
}

// ---------------------------------------------------------------------------
// weak lab

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakLabConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    /// Sampled solution quadratics per dimension.
    pub samples: usize,
    /// Points per quadratic entering the part-(iii) check.
    pub points_per_sample: usize,
    pub comparison_pairs: usize,
    pub polarization_trials: usize,
    pub kernel_radius: f64,
}

impl Default for WeakLabConfig {
    fn default() -> Self {
        WeakLabConfig {
            seed: 1,
            dims: vec![2, 3, 4],
            samples: 10_000,
            points_per_sample: 4,
            comparison_pairs: 100,
            polarization_trials: 500,
            kernel_radius: 0.3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakDimReport {
    pub n: usize,
    pub samples: usize,
    /// max |σ_{n−1} + σ_n| over sampled spectra.
    pub constraint_worst: f64,
    /// max relative gap of the σ-lift identity over all orders.
    pub lift_worst_rel: f64,
    /// min margin of the mollified quadratic (part ii).
    pub part_ii_worst: f64,
    /// min margin of `Hess(½v²)` at admissible points (part iii).
    pub part_iii_worst: f64,
    pub part_iii_points: usize,
    /// min midpoint margin with an independent partner (part iv).
    pub part_iv_worst: f64,
    /// min polarized σ_k over Γ̄_k samples, k = 2..n.
    pub garding_worst: f64,
    pub comparison_holds: usize,
    pub comparison_skipped: usize,
    pub comparison_violated: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakLabReport {
    pub seed: u64,
    pub dims: Vec<WeakDimReport>,
    pub pass: bool,
}

struct WeakChunk {
    constraint_worst: f64,
    lift_worst_rel: f64,
    part_ii_worst: f64,
    part_iii_worst: f64,
    part_iii_points: usize,
    part_iv_worst: f64,
}

fn weak_chunk(
    n: usize,
    start: usize,
    count: usize,
    seed: u64,
    kernel: &MollifierKernel,
    points_per_sample: usize,
) -> Result<WeakChunk> {
    let mut out = WeakChunk {
        constraint_worst: 0.0,
        lift_worst_rel: 0.0,
        part_ii_worst: f64::INFINITY,
        part_iii_worst: f64::INFINITY,
        part_iii_points: 0,
        part_iv_worst: f64::INFINITY,
    };
    for i in start..start + count {
        let sample_seed = derive_seed(seed, i as u64);
        let v = sample_solution_quadratic(sample_seed, n)?;
        let margins = cone_margins(&v.eigen[..n]);
        out.constraint_worst = out.constraint_worst.max(margins.subsolution.abs());
        // σ-lift identity at every order
        let tuple = EigenTuple::new(v.eigen[..n].to_vec())?;
        for k in 0..=n + 1 {
            let (lhs, rhs) = append_unit_eigenvalue_identity(&tuple, k)?;
            let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
            out.lift_worst_rel = out.lift_worst_rel.max(rel);
        }
        let rep = keylemmavr_checks(&v, kernel, 2.0, points_per_sample, sample_seed ^ 0xBEEF)?;
        out.part_ii_worst = out.part_ii_worst.min(rep.mollified_margin);
        if rep.half_square_points > 0 {
            out.part_iii_worst = out.part_iii_worst.min(rep.half_square_margin);
            out.part_iii_points += rep.half_square_points;
        }
        out.part_iv_worst = out.part_iv_worst.min(rep.midpoint_margin);
    }
    Ok(out)
}

/// Runs the weak-solutions lab.
pub fn weak_lab(config: &WeakLabConfig) -> Result<WeakLabReport> {
    let mut dims = Vec::new();
    for &n in &config.dims {
        if !(2..=4).contains(&n) {
            return Err(Error::domain(format!("weak lab dimension {n} outside 2..=4")));
        }
        let kernel = MollifierKernel::new(n, config.kernel_radius)?;
        const CHUNKS: usize = 32;
        let per = config.samples / CHUNKS + usize::from(config.samples % CHUNKS != 0);
        let chunk_results: Vec<WeakChunk> = (0..CHUNKS)
            .into_par_iter()
            .map(|c| {
                weak_chunk(
                    n,
                    c * per,
                    per.min(config.samples.saturating_sub(c * per)),
                    derive_seed(config.seed, 0x77AB ^ n as u64),
                    &kernel,
                    config.points_per_sample,
                )
            })
            .collect::<Result<_>>()?;
        let mut rep = WeakDimReport {
            n,
            samples: config.samples,
            constraint_worst: 0.0,
            lift_worst_rel: 0.0,
            part_ii_worst: f64::INFINITY,
            part_iii_worst: f64::INFINITY,
            part_iii_points: 0,
            part_iv_worst: f64::INFINITY,
            garding_worst: f64::INFINITY,
            comparison_holds: 0,
            comparison_skipped: 0,
            comparison_violated: 0,
        };
        for c in chunk_results {
            rep.constraint_worst = rep.constraint_worst.max(c.constraint_worst);
            rep.lift_worst_rel = rep.lift_worst_rel.max(c.lift_worst_rel);
            rep.part_ii_worst = rep.part_ii_worst.min(c.part_ii_worst);
            rep.part_iii_worst = rep.part_iii_worst.min(c.part_iii_worst);
            rep.part_iii_points += c.part_iii_points;
            rep.part_iv_worst = rep.part_iv_worst.min(c.part_iv_worst);
        }

        // Garding polarization on Γ̄_k samples
        let mut rng = SeedRng::new(derive_seed(config.seed, 0x6A4D ^ n as u64));
        for _ in 0..config.polarization_trials {
            for k in 2..=n {
                let mats: Vec<CMat> = (0..k)
                    .map(|_| sample_gamma_k_quadratic(&mut rng, n, k).q)
                    .collect();
                rep.garding_worst = rep.garding_worst.min(polarized_sigma_k(&mats));
            }
        }

        // comparison principle on certified pairs
        for pair in 0..config.comparison_pairs {
            let pair_seed = derive_seed(config.seed, 0xC0AA ^ (n as u64) << 16 ^ pair as u64);
            let w = sample_solution_quadratic(pair_seed, n)?;
            let mut prng = SeedRng::new(pair_seed ^ 0xFACE);
            let partner = make_supersolution_partner(&w, &mut prng, 1.5);
            match comparison_check(&w, &partner, 1.5, 100, 100, pair_seed ^ 0x51DE)? {
                ComparisonOutcome::Holds => rep.comparison_holds += 1,
                ComparisonOutcome::SkippedBoundaryHypothesis => rep.comparison_skipped += 1,
                ComparisonOutcome::Violated => rep.comparison_violated += 1,
            }
        }
        dims.push(rep);
    }

    let pass = dims.iter().all(|d| {
        d.constraint_worst <= 1e-12
            && d.lift_worst_rel <= 1e-12
            && d.part_ii_worst >= -1e-10
            && d.part_iii_worst >= -1e-10
            && d.part_iv_worst >= -1e-10
            && d.garding_worst >= -1e-10
            && d.comparison_violated == 0
            && d.comparison_holds > 0
    });
    Ok(WeakLabReport {
        seed: config.seed,
        dims,
        pass,
    })
}
