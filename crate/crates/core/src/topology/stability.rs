//! Random smooth perturbations below the discriminant distance.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::condition::{self, frobenius, newton_critical, SingularityKind};
use crate::geometry::{norm, sub};
use crate::jets::{c_norm, GaussianBump, ScalarField};
use crate::{par, Disk, Error, Point, Result};

use super::{isotopy_signature_equal, zero_set_signature, ZeroSetSignature};

/// Unit-height Gaussian `exp(-|x - center|^2 / width^2)` with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpSpec {
    pub center: Point,
    pub width: f64,
    pub sign: f64,
}

/// Critical points grouped by Morse index (number of negative Hessian
/// eigenvalues).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalSignature {
    pub by_index: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Signature {
    ZeroSet(ZeroSetSignature),
    Critical(CriticalSignature),
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub bump: BumpSpec,
    /// Signed height after rescaling to the target norm.
    pub amplitude: f64,
    pub changed: bool,
    pub components: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub kind: SingularityKind,
    pub magnitude: f64,
    pub delta: f64,
    pub resolution: f64,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub base_components: usize,
    /// Trials whose signature changed.
    pub failed_trials: Vec<TrialOutcome>,
}

/// `trials` bumps with centers uniform in the disk, widths uniform in
/// `[0.1, 0.5] R` and random signs. Trial `t` draws from its own stream
/// seeded by `(seed, t)`, so results do not depend on scheduling.
pub fn random_bumps(disk: &Disk, trials: usize, seed: u64) -> Vec<BumpSpec> {
    (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let n = disk.n;
            let center = loop {
                let mut p = disk.center;
                for pi in p.iter_mut().take(n) {
                    *pi += disk.radius * rng.gen_range(-1.0..=1.0);
                }
                if disk.contains(&p) {
                    break p;
                }
            };
            let width = disk.radius * rng.gen_range(0.1..=0.5);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            BumpSpec { center, width, sign }
        })
        .collect()
}

fn base_signature(f: &ScalarField, disk: &Disk, kind: SingularityKind, h: f64) -> Result<Signature> {
    Ok(match kind {
        SingularityKind::Hypersurface => Signature::ZeroSet(zero_set_signature(f, disk, h)?),
        SingularityKind::CriticalPoints => Signature::Critical(critical_signature(f, disk, h)?),
    })
}

fn same(a: &Signature, b: &Signature) -> bool {
    match (a, b) {
        (Signature::ZeroSet(x), Signature::ZeroSet(y)) => isotopy_signature_equal(x, y),
        (Signature::Critical(x), Signature::Critical(y)) => x == y,
        _ => false,
    }
}

fn components(s: &Signature) -> usize {
    match s {
        Signature::ZeroSet(z) => z.components,
        Signature::Critical(c) => c.by_index.iter().sum(),
    }
}

/// Adds each bump, rescaled so its grid `C^{r+1}` norm equals `magnitude`,
/// and compares signatures with the unperturbed field. No hypothesis check.
pub fn perturbation_trials(
    f: &ScalarField,
    disk: &Disk,
    kind: SingularityKind,
    bumps: &[BumpSpec],
    magnitude: f64,
    resolution: f64,
) -> Result<Vec<TrialOutcome>> {
    let base = base_signature(f, disk, kind, resolution)?;
    let ell = kind.r() + 1;
    let indexed: Vec<(usize, BumpSpec)> = bumps.iter().copied().enumerate().collect();
    par::try_map(&indexed, |&(trial, bump)| -> Result<TrialOutcome> {
        let unit = ScalarField::gaussian(
            disk.n,
            GaussianBump { center: bump.center, width: bump.width, height: 1.0 },
        );
        let size = c_norm(&unit, disk, ell, resolution)?.value;
        let amplitude = if magnitude == 0.0 { 0.0 } else { bump.sign * magnitude / size };
        let h = ScalarField::gaussian(
            disk.n,
            GaussianBump { center: bump.center, width: bump.width, height: amplitude },
        );
        let g = f.plus(&h);
        Ok(match base_signature(&g, disk, kind, resolution) {
            Ok(s) => TrialOutcome {
                trial,
                bump,
                amplitude,
                changed: !same(&base, &s),
                components: Some(components(&s)),
                error: None,
            },
            Err(e) => TrialOutcome {
                trial,
                bump,
                amplitude,
                changed: true,
                components: None,
                error: Some(e.to_string()),
            },
        })
    })
}

/// Checks that random perturbations of `C^{r+1}` size `magnitude < delta`
/// leave the signature unchanged.
pub fn perturbation_stability_test(
    f: &ScalarField,
    disk: &Disk,
    kind: SingularityKind,
    magnitude: f64,
    trials: usize,
    seed: u64,
    resolution: f64,
) -> Result<StabilityReport> {
    let delta = condition::delta(f, disk, kind, resolution)?.delta;
    if !(magnitude >= 0.0) || magnitude >= delta {
        return Err(Error::Hypothesis(format!(
            "perturbation magnitude {magnitude} must lie in [0, delta = {delta})"
        )));
    }
    let base = base_signature(f, disk, kind, resolution)?;
    let bumps = random_bumps(disk, trials, seed);
    let outcomes = perturbation_trials(f, disk, kind, &bumps, magnitude, resolution)?;
    let failed: Vec<TrialOutcome> = outcomes.into_iter().filter(|o| o.changed).collect();
    Ok(StabilityReport {
        kind,
        magnitude,
        delta,
        resolution,
        seed,
        trials,
        failures: failed.len(),
        base_components: components(&base),
        failed_trials: failed,
    })
}

/// Nondegenerate interior critical points of `f`, found from grid candidates
/// by Newton iteration and merged when closer than one grid cell.
pub fn critical_signature(f: &ScalarField, disk: &Disk, resolution: f64) -> Result<CriticalSignature> {
    let n = disk.n;
    let grid = disk.grid(resolution);
    let h = grid.resolution;
    let sqrt_n = (n as f64).sqrt();
    let found = par::try_map(&grid.interior, |z| -> Result<Option<(Point, usize)>> {
        let j = f.jet(z, 2)?;
        let hess = frobenius(&j.hessian, n);
        if j.gradient_norm() > sqrt_n * h * hess + 1e-12 {
            return Ok(None);
        }
        let Some(y) = newton_critical(f, disk, *z, &j, h)? else {
            return Ok(None);
        };
        let jy = f.jet(&y, 2)?;
        let m = DMatrix::from_fn(n, n, |a, b| jy.hessian[a][b]);
        let eig = m.symmetric_eigenvalues();
        if eig.iter().any(|l| l.abs() < 1e-12) {
            return Ok(None);
        }
        Ok(Some((y, eig.iter().filter(|&&l| l < 0.0).count())))
    })?;
    let mut points: Vec<(Point, usize)> = Vec::new();
    for (p, idx) in found.into_iter().flatten() {
        if !points.iter().any(|(q, _)| norm(&sub(q, &p), n) < h) {
            points.push((p, idx));
        }
    }
    let mut by_index = vec![0; n + 1];
    for (_, idx) in points {
        by_index[idx] += 1;
    }
    Ok(CriticalSignature { by_index })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> (ScalarField, Disk) {
        (ScalarField::parse("x1^2+x2^2-0.25", 2).unwrap(), Disk::centered(2, 1.0).unwrap())
    }

    #[test]
    fn small_perturbations_are_stable() {
        let (f, d) = circle();
        let r = perturbation_stability_test(&f, &d, SingularityKind::Hypersurface, 0.1, 12, 7, 1.0 / 64.0)
            .unwrap();
        assert_eq!(r.failures, 0);
        assert_eq!(r.base_components, 1);
    }

    #[test]
    fn zero_magnitude_is_trivially_stable() {
        let (f, d) = circle();
        let r = perturbation_stability_test(&f, &d, SingularityKind::Hypersurface, 0.0, 4, 1, 1.0 / 32.0)
            .unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn magnitude_above_delta_rejected() {
        let (f, d) = circle();
        let e = perturbation_stability_test(&f, &d, SingularityKind::Hypersurface, 0.3, 4, 1, 1.0 / 64.0)
            .unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
    }

    #[test]
    fn bumps_are_reproducible() {
        let d = Disk::centered(2, 2.0).unwrap();
        let a = random_bumps(&d, 5, 42);
        let b = random_bumps(&d, 5, 42);
        assert_eq!(a, b);
        for bump in &a {
            assert!(d.contains(&bump.center));
            assert!(bump.width >= 0.2 && bump.width <= 1.0);
        }
        assert_ne!(a, random_bumps(&d, 5, 43));
    }

    #[test]
    fn saddle_critical_signature() {
        let f = ScalarField::parse("x1^2 - x2^2 + 0.3*x1^3", 2).unwrap();
        let d = Disk::centered(2, 1.0).unwrap();
        // critical points: origin (saddle) and x1 = -2/0.9 (outside the disk)
        let s = critical_signature(&f, &d, 1.0 / 64.0).unwrap();
        assert_eq!(s.by_index, vec![0, 1, 0]);
    }
}
