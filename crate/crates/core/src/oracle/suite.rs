//! Seeded verification suite over random kinematic points.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{det_roots_qsq, fd_velocity, nullspace_coeffs, residual_norm, OracleReport, FD_STEP};
use crate::error::{Error, Result};
use crate::num::c;
use crate::stepsolve::{
    classify_zone, coefficients, momenta, psi, tunneling_range, velocity, Branch, Kinematics,
    Momenta, Spin, StepPotential, Zone, BOUNDARY_TOL,
};

pub const MOMENTUM_TOL: f64 = 1e-9;
pub const COEFFICIENT_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const FD_VELOCITY_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-12;

/// Points whose coefficient denominators or `Q-^2` come within this
/// fraction of the energy-squared scale are excluded from the null-space
/// and finite-difference comparisons.
pub const DEGENERACY_BAND: f64 = 1e-3;

/// Deliberate defects for negative-control runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Uses `-delta` in place of `delta` for the analytic momenta.
    FlipDeltaSign,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub n_points: usize,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_points: 1000,
            fault: None,
        }
    }
}

/// One sampled parameter point, in units of the mass.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SamplePoint {
    pub energy: f64,
    pub v0: f64,
    pub w0_abs: f64,
    pub w0_arg: f64,
    pub z: f64,
}

impl SamplePoint {
    pub fn kinematics(&self) -> Kinematics<f64> {
        Kinematics::new(self.energy, 1.0).expect("sampled energy above the mass")
    }

    pub fn potential(&self) -> StepPotential<f64> {
        StepPotential::from_polar(self.v0, self.w0_abs, self.w0_arg)
            .expect("sampled potential in range")
    }
}

/// `n` reproducible points with `E in (m, 5m]`, `V0, |W0| in [0, 3m]`.
pub fn sample_points(seed: u64, n: usize) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| SamplePoint {
            energy: 5.0 - 4.0 * rng.gen::<f64>(),
            v0: 3.0 * rng.gen::<f64>(),
            w0_abs: 3.0 * rng.gen::<f64>(),
            w0_arg: std::f64::consts::TAU * rng.gen::<f64>(),
            z: 2.0 * rng.gen::<f64>(),
        })
        .collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckSummary {
    pub count: usize,
    pub passed: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub version: &'static str,
    pub config: SuiteConfig,
    pub checks_run: usize,
    pub checks_passed: usize,
    /// Comparisons skipped inside degeneracy bands.
    pub skipped: usize,
    pub zone_counts: BTreeMap<String, usize>,
    pub summary: BTreeMap<String, CheckSummary>,
    pub failures: Vec<OracleReport>,
    pub pass: bool,
}

/// Distance of a point from the coefficient degeneracies, relative to
/// the energy-squared scale. Small values mean ill-conditioned spinors.
pub fn degeneracy_margin(k: &Kinematics<f64>, pot: &StepPotential<f64>, mom: &Momenta<f64>) -> f64 {
    let scale = k.energy * k.energy + pot.v0 * pot.v0 + pot.w0_abs_sqr() + k.mass * k.mass;
    let gaps = [
        mom.minus_sq.abs(),
        (mom.complex_plus_sq - mom.minus_sq).abs(),
        (mom.complex_minus_sq - mom.plus_sq).abs(),
    ];
    gaps.iter().fold(f64::INFINITY, |acc, g| acc.min(g / scale))
}

fn analytic_momenta(
    k: &Kinematics<f64>,
    pot: &StepPotential<f64>,
    fault: Option<Fault>,
) -> Result<Momenta<f64>> {
    let mut m = momenta(k, pot)?;
    if fault == Some(Fault::FlipDeltaSign) {
        m.minus_sq += 4.0 * m.delta;
        m.plus_sq -= 4.0 * m.delta;
    }
    Ok(m)
}

struct PointOutcome {
    zone: Zone,
    reports: Vec<OracleReport>,
    skipped: usize,
}

fn error_report(name: &str, err: &Error) -> OracleReport {
    OracleReport {
        check_name: format!("{name}: {err}"),
        analytic_value: f64::NAN,
        oracle_value: f64::NAN,
        abs_error: f64::INFINITY,
        rel_error: f64::INFINITY,
        pass: false,
        tolerance: 0.0,
    }
}

fn check_point(pt: &SamplePoint, fault: Option<Fault>) -> PointOutcome {
    let k = pt.kinematics();
    let pot = pt.potential();
    let mut reports = Vec::new();
    let mut skipped = 0;
    let zone = classify_zone(&k, &pot, BOUNDARY_TOL)
        .map(|z| z.zone)
        .unwrap_or(Zone::Boundary);

    let mom = match analytic_momenta(&k, &pot, fault) {
        Ok(m) => m,
        Err(e) => {
            reports.push(error_report("momenta", &e));
            return PointOutcome {
                zone,
                reports,
                skipped,
            };
        }
    };

    match det_roots_qsq(&k, &pot) {
        Ok((lo, hi)) => {
            reports.push(OracleReport::compare(
                "det_root_Q_minus_sq",
                mom.minus_sq,
                lo,
                MOMENTUM_TOL,
                1.0,
            ));
            reports.push(OracleReport::compare(
                "det_root_Q_plus_sq",
                mom.plus_sq,
                hi,
                MOMENTUM_TOL,
                1.0,
            ));
        }
        Err(e) => reports.push(error_report("det_roots", &e)),
    }

    let margin = degeneracy_margin(&k, &pot, &mom);
    let clear = margin > DEGENERACY_BAND;

    if clear {
        match coefficients(&k, &pot) {
            Ok(co) => {
                for (branch, tag, (a, m, n)) in [
                    (Branch::Minus, "minus", (co.a_minus, co.m_minus, co.n_minus)),
                    (Branch::Plus, "plus", (co.a_plus, co.m_plus, co.n_plus)),
                ] {
                    match nullspace_coeffs(&k, &pot, branch) {
                        Ok(ns) => {
                            for (name, x, y) in [("A", a, ns.a), ("M", m, ns.m), ("N", n, ns.n)] {
                                reports.push(OracleReport::compare_complex(
                                    format!("nullspace_{name}_{tag}"),
                                    x,
                                    y,
                                    COEFFICIENT_TOL,
                                    1.0,
                                ));
                            }
                        }
                        Err(e) => reports.push(error_report(&format!("nullspace_{tag}"), &e)),
                    }
                }
            }
            Err(e) => reports.push(error_report("coefficients", &e)),
        }
    } else {
        skipped += 6;
    }

    for branch in [Branch::Minus, Branch::Plus] {
        let tag = match branch {
            Branch::Minus => "minus",
            Branch::Plus => "plus",
        };
        for spin in [Spin::Up, Spin::Down] {
            match psi(branch, pt.z, spin, &k, &pot) {
                Ok(state) => {
                    let q = mom.get(branch);
                    let res = residual_norm(&state, q, &k, &pot).unwrap_or(f64::INFINITY);
                    reports.push(OracleReport::bound(
                        format!("residual_psi_{tag}"),
                        res,
                        RESIDUAL_TOL,
                    ));
                }
                Err(Error::Degenerate(_)) => skipped += 1,
                Err(e) => reports.push(error_report(&format!("psi_{tag}"), &e)),
            }
        }

        let oscillating = branch == Branch::Plus || mom.minus_sq > 0.0;
        if oscillating && clear {
            match (
                velocity(&k, &pot, branch),
                fd_velocity(&k, &pot, branch, FD_STEP),
            ) {
                (Ok(v), Ok(fd)) => {
                    reports.push(OracleReport::compare(
                        format!("fd_velocity_{tag}"),
                        v,
                        fd,
                        FD_VELOCITY_TOL,
                        1e-3,
                    ));
                }
                (Err(Error::Degenerate(_)), _) | (_, Err(Error::Domain(_))) => skipped += 1,
                (Err(e), _) | (_, Err(e)) => {
                    reports.push(error_report(&format!("velocity_{tag}"), &e))
                }
            }
        } else {
            skipped += 1;
        }
    }

    PointOutcome {
        zone,
        reports,
        skipped,
    }
}

/// Checks that do not depend on the random sample: both limits and the
/// complex-limit velocity identity.
fn fixed_checks(seed: u64) -> Vec<OracleReport> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);

    for _ in 0..100 {
        let v0 = 3.0 * rng.gen::<f64>();
        let k = Kinematics::new(v0 + 1.0 + 1e-3 + 3.0 * rng.gen::<f64>(), 1.0).unwrap();
        let lhs =
            StepPotential::signed(-v0, c(0.0, 0.0)).and_then(|p| velocity(&k, &p, Branch::Minus));
        let rhs = StepPotential::new(v0, c(0.0, 0.0)).and_then(|p| velocity(&k, &p, Branch::Plus));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => out.push(OracleReport::compare(
                "complex_limit_velocity_identity",
                b,
                a,
                IDENTITY_TOL,
                1.0,
            )),
            (Err(e), _) | (_, Err(e)) => {
                out.push(error_report("complex_limit_velocity_identity", &e))
            }
        }
    }

    let k = Kinematics::new(2.0, 1.0).unwrap();
    for i in 1..10 {
        let w = k.momentum * i as f64 / 10.0;
        let pot = StepPotential::new(0.0, c(w, 0.0)).unwrap();
        if let Ok(v) = velocity(&k, &pot, Branch::Minus) {
            out.push(OracleReport::compare(
                "free_propagation_v_minus_sq",
                0.75,
                v * v,
                IDENTITY_TOL,
                1.0,
            ));
        }
        if let Ok(ns) = nullspace_coeffs(&k, &pot, Branch::Minus) {
            let want = k.momentum / (k.energy + k.mass);
            out.push(OracleReport::compare_complex(
                "pure_quaternionic_limit_A_minus",
                c(want, 0.0),
                ns.a,
                COEFFICIENT_TOL,
                1.0,
            ));
        }
    }

    for v0 in [0.5, 1.5, 3.0, 10.0] {
        let pot = StepPotential::new(v0, c(0.0, 0.0)).unwrap();
        let d = tunneling_range(&pot, 1.0).unwrap_or(f64::NAN);
        out.push(OracleReport::compare(
            "complex_limit_tunneling_range",
            v0.min(2.0),
            d,
            IDENTITY_TOL,
            1.0,
        ));
        let k = Kinematics::new(v0 + 1.7, 1.0).unwrap();
        if let Ok(ns) = nullspace_coeffs(&k, &pot, Branch::Minus) {
            let q = ((k.energy - v0).powi(2) - 1.0).sqrt();
            out.push(OracleReport::compare_complex(
                "complex_limit_A_minus",
                c(q / (k.energy - v0 + 1.0), 0.0),
                ns.a,
                COEFFICIENT_TOL,
                1.0,
            ));
        }
    }
    out
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let points = sample_points(config.seed, config.n_points);
    let outcomes: Vec<PointOutcome> = points
        .par_iter()
        .map(|pt| check_point(pt, config.fault))
        .collect();

    let mut zone_counts = BTreeMap::new();
    let mut all = Vec::new();
    let mut skipped = 0;
    for o in outcomes {
        *zone_counts.entry(format!("{:?}", o.zone)).or_insert(0) += 1;
        skipped += o.skipped;
        all.extend(o.reports);
    }
    all.extend(fixed_checks(config.seed));

    let mut summary: BTreeMap<String, CheckSummary> = BTreeMap::new();
    for r in &all {
        let key = r
            .check_name
            .split(':')
            .next()
            .unwrap_or(&r.check_name)
            .to_string();
        let s = summary.entry(key).or_default();
        s.count += 1;
        s.passed += usize::from(r.pass);
        s.max_rel_error = s.max_rel_error.max(r.rel_error);
        s.tolerance = r.tolerance;
    }
    let failures: Vec<OracleReport> = all.iter().filter(|r| !r.pass).cloned().collect();
    let checks_passed = all.len() - failures.len();
    SuiteReport {
        version: env!("CARGO_PKG_VERSION"),
        config: *config,
        checks_run: all.len(),
        checks_passed,
        skipped,
        zone_counts,
        summary,
        pass: failures.is_empty(),
        failures,
    }
}
