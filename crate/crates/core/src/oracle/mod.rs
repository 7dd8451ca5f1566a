//! Independent numerical checks of the closed forms in [`crate::stepsolve`].
//!
//! The oracles only share the operator constructors of [`crate::dirac`];
//! momenta come from sampled determinants, amplitudes from numerical null
//! spaces and velocities from finite differences.

pub mod linalg;
pub mod suite;

use num_complex::Complex;
use serde::Serialize;

use crate::dirac::{apply_dirac, m_minus, m_plus, Matrix4C, QSpinor};
use crate::error::{Error, Result};
use crate::num::{branch_sqrt, re, Real};
use crate::stepsolve::{momenta, Branch, Kinematics, StepPotential};

pub use suite::{run_suite, Fault, SuiteConfig, SuiteReport};

/// Singular values below this fraction of the largest count as zero.
pub const NULLSPACE_RANK_TOL: f64 = 1e-8;

/// Default finite-difference step, in units of the mass.
pub const FD_STEP: f64 = 1e-5;

/// Relative mismatch allowed between the sampled quartic and a perfect square.
const PERFECT_SQUARE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub check_name: String,
    pub analytic_value: f64,
    pub oracle_value: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub pass: bool,
    pub tolerance: f64,
}

impl OracleReport {
    /// `rel_error = abs_error / max(|analytic|, floor)`; the floor makes
    /// near-zero targets fall back to an absolute comparison.
    pub fn compare(
        name: impl Into<String>,
        analytic: f64,
        oracle: f64,
        tolerance: f64,
        floor: f64,
    ) -> Self {
        Self::from_error(
            name,
            analytic,
            oracle,
            (analytic - oracle).abs(),
            tolerance,
            floor,
        )
    }

    /// Complex comparison; the reported values are moduli.
    pub fn compare_complex(
        name: impl Into<String>,
        analytic: Complex<f64>,
        oracle: Complex<f64>,
        tolerance: f64,
        floor: f64,
    ) -> Self {
        Self::from_error(
            name,
            analytic.norm(),
            oracle.norm(),
            (analytic - oracle).norm(),
            tolerance,
            floor,
        )
    }

    /// Checks a quantity that must not exceed `tolerance`, e.g. a residual.
    pub fn bound(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            check_name: name.into(),
            analytic_value: 0.0,
            oracle_value: value,
            abs_error: value,
            rel_error: value,
            pass: value <= tolerance,
            tolerance,
        }
    }

    fn from_error(
        name: impl Into<String>,
        analytic: f64,
        oracle: f64,
        abs: f64,
        tolerance: f64,
        floor: f64,
    ) -> Self {
        let rel = abs / analytic.abs().max(floor);
        Self {
            check_name: name.into(),
            analytic_value: analytic,
            oracle_value: oracle,
            abs_error: abs,
            rel_error: rel,
            pass: rel <= tolerance,
            tolerance,
        }
    }
}

/// Numerical `M+ M-` (or `M- M+`) from the literal operator product.
fn literal_product<T: Real>(
    k: &Kinematics<T>,
    v0: T,
    q: Complex<T>,
    branch: Branch,
) -> Matrix4C<T> {
    let mp = m_plus(k.energy, q, k.mass, v0);
    let mm = m_minus(k.energy, q, k.mass, v0);
    match branch {
        Branch::Minus => mp * mm,
        Branch::Plus => mm * mp,
    }
}

/// Roots `(Q-^2, Q+^2)` of `det(M+ M- - |W0|^2) = 0`, found without the
/// closed form.
///
/// The determinant is sampled at five values of `s = Q^2`, the quartic is
/// interpolated exactly, checked to be the square of a monic quadratic
/// (the two spin blocks are identical) and that quadratic is solved.
pub fn det_roots_qsq<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> Result<(T, T)> {
    let w2 = pot.w0_abs_sqr();
    let scale = k.energy * k.energy + pot.v0 * pot.v0 + w2 + k.mass * k.mass;
    let shift = Matrix4C::identity().scale(re(w2));
    let sample = |t: T| -> T {
        let q = branch_sqrt(t * scale);
        let mat = literal_product(k, pot.v0, q, Branch::Minus) - shift;
        linalg::determinant(&mat).re / scale.powi(4)
    };
    let two = T::lit(2.0);
    let f: [T; 5] = std::array::from_fn(|i| sample(T::from_usize(i).unwrap() - two));

    // Exact interpolation on the symmetric nodes t = -2..2.
    let e0 = f[2];
    let e1 = (f[3] + f[1]) / two;
    let e2 = (f[4] + f[0]) / two;
    let o1 = (f[3] - f[1]) / two;
    let o2 = (f[4] - f[0]) / two;
    let p4 = ((e2 - e0) - T::lit(4.0) * (e1 - e0)) / T::lit(12.0);
    let p2 = e1 - e0 - p4;
    let p0 = e0;
    let p3 = (o2 - two * o1) / T::lit(6.0);
    let p1 = o1 - p3;

    if (p4 - T::one()).abs() > T::lit(PERFECT_SQUARE_TOL) {
        return Err(Error::Consistency(format!(
            "determinant is not monic in Q^2: leading {p4}"
        )));
    }
    let (p3, p2, p1, p0) = (p3 / p4, p2 / p4, p1 / p4, p0 / p4);
    // (t^2 + b t + c)^2 = t^4 + 2b t^3 + (b^2 + 2c) t^2 + 2bc t + c^2
    let b = p3 / two;
    let cc = (p2 - b * b) / two;
    let size = T::one() + b.abs() + cc.abs();
    let tol = T::lit(PERFECT_SQUARE_TOL) * size * size;
    if (p1 - two * b * cc).abs() > tol || (p0 - cc * cc).abs() > tol {
        return Err(Error::Consistency(format!(
            "determinant is not a perfect square: p1 = {p1} vs {}, p0 = {p0} vs {}",
            two * b * cc,
            cc * cc
        )));
    }

    let disc = (b * b - T::lit(4.0) * cc).max(T::zero());
    let big = -(b + b.signum() * disc.sqrt()) / two;
    let (r1, r2) = if big == T::zero() {
        (T::zero(), T::zero())
    } else {
        (big, cc / big)
    };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    Ok((lo * scale, hi * scale))
}

/// Spinor coefficients of one branch recovered numerically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullspaceCoefficients<T> {
    pub a: Complex<T>,
    pub m: Complex<T>,
    pub n: Complex<T>,
    /// Singular values of the eigen-equation matrix, descending.
    pub singular_values: [T; 4],
}

/// Extracts `A`, `M`, `N` for a branch from the null space of
/// `M+ M- - |W0|^2` (minus) or `M- M+ - |W0|^2` (plus), then applies the
/// coupled equations `M+ w = -W0 u` or `M- u = -conj(W0) w`.
pub fn nullspace_coeffs<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    branch: Branch,
) -> Result<NullspaceCoefficients<T>> {
    let q = momenta(k, pot)?.get(branch);
    let w2 = pot.w0_abs_sqr();
    let mat = literal_product(k, pot.v0, q, branch) - Matrix4C::identity().scale(re(w2));
    let svd = linalg::jacobi_svd(&mat);
    let s = svd.singular_values;
    let threshold = T::lit(NULLSPACE_RANK_TOL) * s[0];
    if !(s[1] > threshold && s[2] <= threshold && s[3] <= threshold) {
        return Err(Error::degenerate(format!(
            "null space is not two-dimensional: singular values {s:?}"
        )));
    }

    // Fix chi = spin up in the component that carries it.
    let (fixed, zeroed, read) = match branch {
        Branch::Minus => (0, 1, 2),
        Branch::Plus => (2, 3, 0),
    };
    let (v1, v2) = (svd.right_vector(2), svd.right_vector(3));
    let det = v1.c[fixed] * v2.c[zeroed] - v2.c[fixed] * v1.c[zeroed];
    if det.norm() <= T::lit(NULLSPACE_RANK_TOL) {
        return Err(Error::degenerate(
            "null space does not reach the chosen spin component",
        ));
    }
    let alpha = v2.c[zeroed] / det;
    let beta = -v1.c[zeroed] / det;
    let x = v1.scale(alpha) + v2.scale(beta);
    let a = x.c[read];

    let op = match branch {
        Branch::Minus => m_plus(k.energy, q, k.mass, pot.v0),
        Branch::Plus => m_minus(k.energy, q, k.mass, pot.v0),
    };
    let y = linalg::solve(&op, &x)
        .ok_or_else(|| Error::degenerate("coupled-equation operator is singular"))?;
    let (m, n) = match branch {
        Branch::Minus => (y.c[0], y.c[2]),
        Branch::Plus => (y.c[2], y.c[0]),
    };
    Ok(NullspaceCoefficients {
        a,
        m,
        n,
        singular_values: s,
    })
}

/// Oracle momentum of a branch at energy `e`, from the determinant roots.
fn oracle_momentum<T: Real>(
    e: T,
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    branch: Branch,
) -> Result<T> {
    let ke = Kinematics::new(e, k.mass)?;
    let (lo, hi) = det_roots_qsq(&ke, pot)?;
    let s = match branch {
        Branch::Minus => lo,
        Branch::Plus => hi,
    };
    if !(s > T::zero()) {
        return Err(Error::domain(format!(
            "{branch:?} branch is evanescent at E = {e}"
        )));
    }
    Ok(s.sqrt())
}

fn central_slope<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    branch: Branch,
    h: T,
) -> Result<T> {
    if !(h > T::zero()) || k.energy - h <= k.mass {
        return Err(Error::domain(format!(
            "stencil E ± {h} leaves the region E > m"
        )));
    }
    // the branch must oscillate at the centre and both ends
    oracle_momentum(k.energy, k, pot, branch)?;
    let hi = oracle_momentum(k.energy + h, k, pot, branch)?;
    let lo = oracle_momentum(k.energy - h, k, pot, branch)?;
    Ok((hi - lo) / (T::lit(2.0) * h))
}

/// Group velocity `(dQ/dE)^-1` by a central difference of step `h`.
pub fn fd_velocity<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    branch: Branch,
    h: T,
) -> Result<T> {
    let slope = central_slope(k, pot, branch, h)?;
    if slope == T::zero() {
        return Err(Error::degenerate("flat dispersion"));
    }
    Ok(T::one() / slope)
}

/// Same as [`fd_velocity`] with one Richardson extrapolation step.
pub fn fd_velocity_richardson<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    branch: Branch,
    h: T,
) -> Result<T> {
    let coarse = central_slope(k, pot, branch, h)?;
    let fine = central_slope(k, pot, branch, h / T::lit(2.0))?;
    let slope = (T::lit(4.0) * fine - coarse) / T::lit(3.0);
    Ok(T::one() / slope)
}

/// `|apply_dirac(psi)| / |psi|`.
pub fn residual_norm<T: Real>(
    psi: &QSpinor<T>,
    q: Complex<T>,
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
) -> Result<T> {
    let norm = psi.norm();
    if norm == T::zero() {
        return Err(Error::domain("residual of the zero spinor is undefined"));
    }
    Ok(apply_dirac(psi, q, k.energy, k.mass, pot).norm() / norm)
}

/// Residual computed through the coupled complex system instead.
pub fn coupled_residual_norm<T: Real>(
    psi: &QSpinor<T>,
    q: Complex<T>,
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
) -> Result<T> {
    let norm = psi.norm();
    if norm == T::zero() {
        return Err(Error::domain("residual of the zero spinor is undefined"));
    }
    Ok(crate::dirac::coupled_residual(psi, q, k.energy, k.mass, pot).norm() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::Spinor4;
    use crate::num::c;
    use crate::stepsolve::{coefficients, psi_minus, psi_plus, velocity, Spin};

    fn zero_spinor() -> QSpinor<f64> {
        QSpinor::new(Spinor4::zero(), Spinor4::zero())
    }

    fn kin(e: f64) -> Kinematics<f64> {
        Kinematics::new(e, 1.0).unwrap()
    }

    fn pot(v: f64, w: f64) -> StepPotential<f64> {
        StepPotential::new(v, c(w, 0.0)).unwrap()
    }

    #[test]
    fn det_roots_complex_limit() {
        let k = kin(2.7);
        let (lo, hi) = det_roots_qsq(&k, &pot(0.8, 0.0)).unwrap();
        let qm = (2.7f64 - 0.8).powi(2) - 1.0;
        let qp = (2.7f64 + 0.8).powi(2) - 1.0;
        assert!(
            (lo - qm).abs() < 1e-12 && (hi - qp).abs() < 1e-12,
            "{lo} {hi}"
        );
    }

    #[test]
    fn det_roots_reference_point() {
        let (lo, hi) = det_roots_qsq(&kin(2.0), &pot(1.0, 1.0)).unwrap();
        let s7 = 7f64.sqrt();
        assert!((lo - (5.0 - 2.0 * s7)).abs() < 1e-12);
        assert!((hi - (5.0 + 2.0 * s7)).abs() < 1e-12);
        // Vieta: the ±2 delta terms cancel in the sum
        assert!((lo + hi - 2.0 * ((8.0 + 0.0) / 2.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn nullspace_limits() {
        let k = kin(2.4);
        let v = 0.9;
        let ns = nullspace_coeffs(&k, &pot(v, 0.0), Branch::Minus).unwrap();
        let q = ((2.4f64 - v).powi(2) - 1.0).sqrt();
        assert!((ns.a - c(q / (2.4 - v + 1.0), 0.0)).norm() < 1e-12);

        let k = kin(2.0);
        let a = k.momentum / 3.0;
        for branch in [Branch::Minus, Branch::Plus] {
            let ns = nullspace_coeffs(&k, &pot(0.0, 0.5), branch).unwrap();
            assert!((ns.a - c(a, 0.0)).norm() < 1e-12, "{branch:?} {:?}", ns.a);
        }
    }

    #[test]
    fn nullspace_matches_closed_form_reference() {
        let k = kin(2.0);
        let p = StepPotential::from_polar(0.5, 0.5, 0.0).unwrap();
        let co = coefficients(&k, &p).unwrap();
        let nm = nullspace_coeffs(&k, &p, Branch::Minus).unwrap();
        let np = nullspace_coeffs(&k, &p, Branch::Plus).unwrap();
        for (x, y) in [
            (co.a_minus, nm.a),
            (co.m_minus, nm.m),
            (co.n_minus, nm.n),
            (co.a_plus, np.a),
            (co.m_plus, np.m),
            (co.n_plus, np.n),
        ] {
            assert!((x - y).norm() < 1e-9 * (1.0 + x.norm()), "{x} vs {y}");
        }
    }

    #[test]
    fn fd_velocity_examples() {
        let h = FD_STEP;
        let k = kin(3.0);
        let fd = fd_velocity(&k, &pot(1.0, 0.0), Branch::Minus, h).unwrap();
        assert!((fd - 3f64.sqrt() / 2.0).abs() < 1e-7);

        let k = kin(2.0);
        let fd = fd_velocity(&k, &pot(0.0, 0.3), Branch::Minus, h).unwrap();
        assert!((fd - k.momentum / 2.0).abs() < 1e-7);

        // evanescent minus branch has no velocity
        assert!(fd_velocity(&k, &pot(1.0, 1.0), Branch::Minus, h).is_err());
        // stencil crossing the mass shell
        assert!(fd_velocity(&kin(1.0 + 1e-6), &pot(0.2, 0.2), Branch::Plus, 1e-5).is_err());
    }

    #[test]
    fn richardson_quarters_the_error() {
        let k = kin(2.2);
        let p = StepPotential::from_polar(0.4, 0.6, 1.0).unwrap();
        let exact = velocity(&k, &p, Branch::Plus).unwrap();
        let h = 0.02;
        let e1 = (fd_velocity(&k, &p, Branch::Plus, h).unwrap() - exact).abs();
        let e2 = (fd_velocity(&k, &p, Branch::Plus, h / 2.0).unwrap() - exact).abs();
        let ratio = e2 / e1;
        assert!((ratio - 0.25).abs() < 0.02, "{ratio}");
        let er = (fd_velocity_richardson(&k, &p, Branch::Plus, h).unwrap() - exact).abs();
        assert!(er < e2 / 10.0);
    }

    #[test]
    fn residuals_of_exact_solutions() {
        let k = kin(2.0);
        let p = StepPotential::from_polar(1.0, 1.0, 0.4).unwrap();
        let m = momenta(&k, &p).unwrap();
        for spin in [Spin::Up, Spin::Down] {
            let psi = psi_minus(0.3, spin, &k, &p).unwrap();
            assert!(residual_norm(&psi, m.minus, &k, &p).unwrap() < 1e-12);
            assert!(coupled_residual_norm(&psi, m.minus, &k, &p).unwrap() < 1e-12);
            let psi = psi_plus(0.3, spin, &k, &p).unwrap();
            assert!(residual_norm(&psi, m.plus, &k, &p).unwrap() < 1e-12);
        }
        assert!(matches!(
            residual_norm(&zero_spinor(), m.plus, &k, &p),
            Err(Error::Domain(_))
        ));
    }
}
