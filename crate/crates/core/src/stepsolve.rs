//! Closed-form physics of the quaternionic step `i V0 + k W0` for `z > 0`:
//! momenta, energy zones, tunneling ranges, group velocities and the two
//! explicit spinor solutions.
//!
//! With `p^2 = E^2 - m^2`, `q±^2 = (E ± V0)^2 - m^2` and
//! `delta = sqrt(E^2 V0^2 + p^2 |W0|^2) - E V0`, the momenta in the
//! potential region are `Q±^2 = q±^2 + |W0|^2 ± 2 delta`.

use num_complex::Complex;
use serde::Serialize;

use crate::dirac::{QSpinor, Spinor4};
use crate::error::{Error, Result};
use crate::num::{branch_sqrt, c, re, Real};

/// Relative tolerance below which a coefficient denominator counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Default relative width of the band reported as a zone boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Potential `i V0 + k W0` in the region `z > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPotential<T> {
    pub v0: T,
    pub w0: Complex<T>,
}

impl<T: Real> StepPotential<T> {
    /// Supported regime: `V0 >= 0`.
    pub fn new(v0: T, w0: Complex<T>) -> Result<Self> {
        let pot = Self::signed(v0, w0)?;
        if v0 < T::zero() {
            return Err(Error::domain(format!("V0 must be non-negative, got {v0}")));
        }
        Ok(pot)
    }

    pub fn from_polar(v0: T, w0_abs: T, w0_arg: T) -> Result<Self> {
        if w0_abs < T::zero() {
            return Err(Error::domain(format!(
                "|W0| must be non-negative, got {w0_abs}"
            )));
        }
        Self::new(v0, Complex::from_polar(w0_abs, w0_arg))
    }

    /// Accepts any finite `V0`, including negative values. Only
    /// [`velocity`] works with a negative `V0`.
    pub fn signed(v0: T, w0: Complex<T>) -> Result<Self> {
        if !(v0.is_finite() && w0.re.is_finite() && w0.im.is_finite()) {
            return Err(Error::domain("potential must be finite"));
        }
        Ok(Self { v0, w0 })
    }

    pub fn w0_abs(&self) -> T {
        self.w0.norm()
    }

    pub fn w0_abs_sqr(&self) -> T {
        self.w0.norm_sqr()
    }

    fn require_non_negative(&self) -> Result<()> {
        if self.v0 < T::zero() {
            Err(Error::domain(format!(
                "V0 must be non-negative here, got {}",
                self.v0
            )))
        } else {
            Ok(())
        }
    }
}

/// Incoming particle with energy `E > m > 0` and momentum `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics<T> {
    pub energy: T,
    pub mass: T,
    pub momentum: T,
}

impl<T: Real> Kinematics<T> {
    pub fn new(energy: T, mass: T) -> Result<Self> {
        if !(mass.is_finite() && mass > T::zero()) {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        if !(energy.is_finite() && energy > mass) {
            return Err(Error::domain(format!(
                "energy must exceed the mass: E = {energy}, m = {mass}"
            )));
        }
        // (E - m)(E + m) keeps p accurate close to threshold
        let momentum = ((energy - mass) * (energy + mass)).sqrt();
        Ok(Self {
            energy,
            mass,
            momentum,
        })
    }

    /// Common energy-squared scale used for relative tolerances.
    fn scale_sqr(&self, pot: &StepPotential<T>) -> T {
        self.energy * self.energy + pot.v0 * pot.v0 + pot.w0_abs_sqr() + self.mass * self.mass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Index of the non-zero entry of `chi` and the eigenvalue of `sigma3`.
    fn slot<T: Real>(self) -> (usize, T) {
        match self {
            Spin::Up => (0, T::one()),
            Spin::Down => (1, -T::one()),
        }
    }
}

/// Derived momenta at one kinematic point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Momenta<T> {
    /// `q-^2 = (E - V0)^2 - m^2`, the complex-step value.
    #[serde(rename = "q_minus_sq")]
    pub complex_minus_sq: T,
    /// `q+^2 = (E + V0)^2 - m^2`.
    #[serde(rename = "q_plus_sq")]
    pub complex_plus_sq: T,
    pub delta: T,
    #[serde(rename = "Q_minus_sq")]
    pub minus_sq: T,
    #[serde(rename = "Q_plus_sq")]
    pub plus_sq: T,
    #[serde(skip)]
    pub minus: Complex<T>,
    #[serde(skip)]
    pub plus: Complex<T>,
}

impl<T: Real> Momenta<T> {
    pub fn get(&self, branch: Branch) -> Complex<T> {
        match branch {
            Branch::Plus => self.plus,
            Branch::Minus => self.minus,
        }
    }

    pub fn get_sq(&self, branch: Branch) -> T {
        match branch {
            Branch::Plus => self.plus_sq,
            Branch::Minus => self.minus_sq,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Zone {
    Diffusion,
    Evanescent,
    Klein,
    Boundary,
}

impl Zone {
    pub fn label(self) -> &'static str {
        match self {
            Zone::Diffusion => "D",
            Zone::Evanescent => "E",
            Zone::Klein => "K",
            Zone::Boundary => "B",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZoneClassification<T> {
    pub zone: Zone,
    /// `max(m, sqrt(|W0|^2 + (V0 - m)^2))`.
    pub lower: T,
    /// `sqrt(|W0|^2 + (V0 + m)^2)`.
    pub upper: T,
}

/// The six spinor coefficients of the two solutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorCoefficients<T> {
    pub a_minus: Complex<T>,
    pub a_plus: Complex<T>,
    pub m_minus: Complex<T>,
    pub m_plus: Complex<T>,
    pub n_minus: Complex<T>,
    pub n_plus: Complex<T>,
}

/// Which amplitude enters the numerator of `N+`. Only `A+` solves the
/// equation; `A-` is kept for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NPlusNumerator {
    PlusAmplitude,
    MinusAmplitude,
}

/// `sqrt(E^2 V0^2 + p^2 |W0|^2)`.
fn coupling_root<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> T {
    (k.energy * pot.v0).hypot(k.momentum * pot.w0_abs())
}

/// `delta` for any sign of `V0`; uses the conjugate form when `E V0 > 0`.
fn delta_any_sign<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> T {
    let root = coupling_root(k, pot);
    let ev = k.energy * pot.v0;
    if ev > T::zero() {
        k.momentum * k.momentum * pot.w0_abs_sqr() / (root + ev)
    } else {
        root - ev
    }
}

/// `delta = sqrt(E^2 V0^2 + p^2 |W0|^2) - E V0 >= 0`.
pub fn delta<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> Result<T> {
    pot.require_non_negative()?;
    Ok(delta_any_sign(k, pot))
}

/// `delta / (E - m)` through `(E + m) |W0|^2 / (sqrt(E^2 V0^2 + p^2 |W0|^2) + E V0)`,
/// which stays finite as `E -> m`.
pub fn delta_over_gap<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> Result<T> {
    pot.require_non_negative()?;
    let den = coupling_root(k, pot) + k.energy * pot.v0;
    if den == T::zero() {
        return Ok(T::zero());
    }
    Ok((k.energy + k.mass) * pot.w0_abs_sqr() / den)
}

fn momenta_any_sign<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> Momenta<T> {
    let two = T::lit(2.0);
    let (e, m, v) = (k.energy, k.mass, pot.v0);
    let w2 = pot.w0_abs_sqr();
    let d = delta_any_sign(k, pot);
    let complex_minus_sq = (e - v - m) * (e - v + m);
    let complex_plus_sq = (e + v - m) * (e + v + m);
    // Q+^2 = p^2 + V0^2 + |W0|^2 + 2R has no cancellation, and
    // Q-^2 Q+^2 factors over the two zone boundaries.
    let w = pot.w0_abs();
    let plus_sq = k.momentum * k.momentum + v * v + w2 + two * coupling_root(k, pot);
    let (h_lo, h_hi) = ((v - m).hypot(w), (v + m).hypot(w));
    let minus_sq = (e - h_lo) * (e + h_lo) * ((e - h_hi) * (e + h_hi)) / plus_sq;
    Momenta {
        complex_minus_sq,
        complex_plus_sq,
        delta: d,
        minus_sq,
        plus_sq,
        minus: branch_sqrt(minus_sq),
        plus: branch_sqrt(plus_sq),
    }
}

/// Momenta in the potential region. `Q-` is `+i sqrt(-Q-^2)` in the
/// evanescent zone so that `exp(i Q- z)` decays.
pub fn momenta<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>) -> Result<Momenta<T>> {
    pot.require_non_negative()?;
    Ok(momenta_any_sign(k, pot))
}

/// Lower and upper zone boundaries, the lower one clamped below by `m`.
pub fn zone_boundaries<T: Real>(pot: &StepPotential<T>, mass: T) -> (T, T) {
    let w = pot.w0_abs();
    let lower = w.hypot(pot.v0 - mass).max(mass);
    let upper = w.hypot(pot.v0 + mass);
    (lower, upper)
}

/// Classifies `E` as diffusion, evanescent or Klein. Energies within
/// `tol * upper` of an unclamped boundary are reported as [`Zone::Boundary`].
pub fn classify_zone<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    tol: T,
) -> Result<ZoneClassification<T>> {
    pot.require_non_negative()?;
    let e = k.energy;
    let raw_lower = pot.w0_abs().hypot(pot.v0 - k.mass);
    let (lower, upper) = zone_boundaries(pot, k.mass);
    let band = tol * upper;
    let on_upper = (e - upper).abs() <= band;
    let on_lower = raw_lower > k.mass && (e - raw_lower).abs() <= band;
    let zone = if on_upper || on_lower {
        Zone::Boundary
    } else if e > upper {
        Zone::Diffusion
    } else if e > lower {
        Zone::Evanescent
    } else {
        Zone::Klein
    };
    Ok(ZoneClassification { zone, lower, upper })
}

/// Width of the evanescent energy window,
/// `sqrt(|W0|^2 + (V0 + m)^2) - max(m, sqrt(|W0|^2 + (V0 - m)^2))`.
pub fn tunneling_range<T: Real>(pot: &StepPotential<T>, mass: T) -> Result<T> {
    if !(mass > T::zero()) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    pot.require_non_negative()?;
    let (lower, upper) = zone_boundaries(pot, mass);
    Ok((upper - lower).max(T::zero()))
}

/// `|W0|` on the circle `|W0|^2 + (V0 - m)^2 = m^2`.
pub fn circle_w0<T: Real>(v0: T, mass: T) -> Result<T> {
    check_circle_domain(v0, mass)?;
    Ok((v0 * (T::lit(2.0) * mass - v0)).max(T::zero()).sqrt())
}

/// True when `(V0, |W0|)` lies on or inside the circle, where the lower
/// boundary is clamped to `m`.
pub fn inside_circle<T: Real>(pot: &StepPotential<T>, mass: T) -> bool {
    pot.w0_abs().hypot(pot.v0 - mass) <= mass
}

/// Tunneling range on the circle: `m (sqrt(1 + 4 V0 / m) - 1)`.
pub fn tunneling_range_circle<T: Real>(v0: T, mass: T) -> Result<T> {
    check_circle_domain(v0, mass)?;
    Ok(mass * ((T::one() + T::lit(4.0) * v0 / mass).sqrt() - T::one()))
}

fn check_circle_domain<T: Real>(v0: T, mass: T) -> Result<()> {
    if !(mass > T::zero()) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    if !(v0 >= T::zero() && v0 <= T::lit(2.0) * mass) {
        return Err(Error::domain(format!(
            "V0 = {v0} lies outside the circle's extent [0, 2m]"
        )));
    }
    Ok(())
}

/// Group velocity `(dQ/dE)^-1` of the given branch,
///
/// ```text
/// v± = (Q± / E) (1 ± (V0^2 + |W0|^2) / sqrt(E^2 V0^2 + p^2 |W0|^2))^-1
/// ```
///
/// At `W0 = 0` this is evaluated as `q∓ / (E ∓ V0)`, which is also the form
/// used for negative `V0`. The raw sign is returned; in the Klein zone the
/// minus branch is negative.
pub fn velocity<T: Real>(k: &Kinematics<T>, pot: &StepPotential<T>, branch: Branch) -> Result<T> {
    let (e, v) = (k.energy, pot.v0);
    let w2 = pot.w0_abs_sqr();
    let tol = T::lit(DEGENERACY_TOL);

    if w2 == T::zero() {
        if v == T::zero() {
            return Ok(k.momentum / e);
        }
        let shifted = match branch {
            Branch::Minus => e - v,
            Branch::Plus => e + v,
        };
        let q_sq = (shifted - k.mass) * (shifted + k.mass);
        if !(q_sq > T::zero()) {
            return Err(Error::domain(format!(
                "evanescent {branch:?} branch: q^2 = {q_sq}"
            )));
        }
        if shifted.abs() <= tol * e {
            return Err(Error::degenerate("E ∓ V0 vanishes"));
        }
        return Ok(q_sq.sqrt() / shifted);
    }

    let mom = momenta_any_sign(k, pot);
    let q_sq = mom.get_sq(branch);
    if !(q_sq > T::zero()) {
        return Err(Error::domain(format!(
            "evanescent {branch:?} branch: Q^2 = {q_sq}"
        )));
    }
    let ratio = (v * v + w2) / coupling_root(k, pot);
    let factor = match branch {
        Branch::Plus => T::one() + ratio,
        Branch::Minus => T::one() - ratio,
    };
    if factor.abs() <= tol * (T::one() + ratio) {
        return Err(Error::degenerate("dQ/dE vanishes: velocity diverges"));
    }
    Ok(q_sq.sqrt() / (e * factor))
}

fn checked_div<T: Real>(num: Complex<T>, den: T, scale: T, what: &str) -> Result<Complex<T>> {
    if den.abs() <= T::lit(DEGENERACY_TOL) * scale {
        return Err(Error::degenerate(format!(
            "{what} denominator vanishes ({den})"
        )));
    }
    Ok(num / den)
}

fn amplitude_minus<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    mom: &Momenta<T>,
) -> Result<Complex<T>> {
    let den = k.energy - pot.v0 + k.mass - delta_over_gap(k, pot)?;
    checked_div(mom.minus, den, k.energy + pot.v0 + k.mass, "A-")
}

fn amplitude_plus<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    mom: &Momenta<T>,
) -> Result<Complex<T>> {
    let den = k.energy + pot.v0 + k.mass + delta_over_gap(k, pot)?;
    checked_div(mom.plus, den, k.energy + pot.v0 + k.mass, "A+")
}

/// `(M-, N-)` given `A-`.
fn lower_pair_minus<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    mom: &Momenta<T>,
    a: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let (e, m, v) = (k.energy, k.mass, pot.v0);
    let den = mom.complex_plus_sq - mom.minus_sq;
    let scale = k.scale_sqr(pot);
    let mm = checked_div(mom.minus * a + re(e - m + v), den, scale, "M-")?;
    let nn = checked_div(a * (e + m + v) + mom.minus, den, scale, "N-")?;
    Ok((mm, nn))
}

/// `(M+, N+)` given `A+` and the amplitude used in `N+`.
fn lower_pair_plus<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    mom: &Momenta<T>,
    a: Complex<T>,
    n_amplitude: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let (e, m, v) = (k.energy, k.mass, pot.v0);
    let den = mom.complex_minus_sq - mom.plus_sq;
    let scale = k.scale_sqr(pot);
    let mm = checked_div(mom.plus * a + re(e - m - v), den, scale, "M+")?;
    let nn = checked_div(n_amplitude * (e + m - v) + mom.plus, den, scale, "N+")?;
    Ok((mm, nn))
}

/// All six spinor coefficients, with `A+` in the numerator of `N+`.
pub fn coefficients<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
) -> Result<SpinorCoefficients<T>> {
    coefficients_with(k, pot, NPlusNumerator::PlusAmplitude)
}

pub fn coefficients_with<T: Real>(
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
    n_plus_numerator: NPlusNumerator,
) -> Result<SpinorCoefficients<T>> {
    let mom = momenta(k, pot)?;
    let a_minus = amplitude_minus(k, pot, &mom)?;
    let a_plus = amplitude_plus(k, pot, &mom)?;
    let (m_minus, n_minus) = lower_pair_minus(k, pot, &mom, a_minus)?;
    let n_amp = match n_plus_numerator {
        NPlusNumerator::PlusAmplitude => a_plus,
        NPlusNumerator::MinusAmplitude => a_minus,
    };
    let (m_plus, n_plus) = lower_pair_plus(k, pot, &mom, a_plus, n_amp)?;
    Ok(SpinorCoefficients {
        a_minus,
        a_plus,
        m_minus,
        m_plus,
        n_minus,
        n_plus,
    })
}

fn phase<T: Real>(q: Complex<T>, z: T) -> Complex<T> {
    (c(T::zero(), T::one()) * q * z).exp()
}

/// `psi-(z) = [(1 - j W0 M-) chi ; (A- - j W0 N-) sigma3 chi] exp(i Q- z)`.
pub fn psi_minus<T: Real>(
    z: T,
    spin: Spin,
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
) -> Result<QSpinor<T>> {
    let mom = momenta(k, pot)?;
    let a = amplitude_minus(k, pot, &mom)?;
    let (mm, nn) = if pot.w0_abs_sqr() == T::zero() {
        (re(T::zero()), re(T::zero()))
    } else {
        lower_pair_minus(k, pot, &mom, a)?
    };
    Ok(assemble_minus(z, spin, pot, mom.minus, a, mm, nn))
}

/// `psi+(z) = [(-conj(W0) N+ + j A+) sigma3 chi ; (-conj(W0) M+ + j) chi] exp(i Q+ z)`.
pub fn psi_plus<T: Real>(
    z: T,
    spin: Spin,
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
) -> Result<QSpinor<T>> {
    let mom = momenta(k, pot)?;
    let a = amplitude_plus(k, pot, &mom)?;
    let (mm, nn) = if pot.w0_abs_sqr() == T::zero() {
        (re(T::zero()), re(T::zero()))
    } else {
        lower_pair_plus(k, pot, &mom, a, a)?
    };
    Ok(assemble_plus(z, spin, pot, mom.plus, a, mm, nn))
}

pub fn psi<T: Real>(
    branch: Branch,
    z: T,
    spin: Spin,
    k: &Kinematics<T>,
    pot: &StepPotential<T>,
) -> Result<QSpinor<T>> {
    match branch {
        Branch::Minus => psi_minus(z, spin, k, pot),
        Branch::Plus => psi_plus(z, spin, k, pot),
    }
}

/// Builds either solution from precomputed coefficients, e.g. ones
/// obtained with [`coefficients_with`].
pub fn psi_from_coefficients<T: Real>(
    branch: Branch,
    z: T,
    spin: Spin,
    mom: &Momenta<T>,
    pot: &StepPotential<T>,
    coeffs: &SpinorCoefficients<T>,
) -> QSpinor<T> {
    match branch {
        Branch::Minus => assemble_minus(
            z,
            spin,
            pot,
            mom.minus,
            coeffs.a_minus,
            coeffs.m_minus,
            coeffs.n_minus,
        ),
        Branch::Plus => assemble_plus(
            z,
            spin,
            pot,
            mom.plus,
            coeffs.a_plus,
            coeffs.m_plus,
            coeffs.n_plus,
        ),
    }
}

fn assemble_minus<T: Real>(
    z: T,
    spin: Spin,
    pot: &StepPotential<T>,
    q: Complex<T>,
    a: Complex<T>,
    mm: Complex<T>,
    nn: Complex<T>,
) -> QSpinor<T> {
    let (slot, s) = spin.slot::<T>();
    let mut u = Spinor4::zero();
    let mut w = Spinor4::zero();
    u.c[slot] = re(T::one());
    u.c[slot + 2] = a * s;
    w.c[slot] = -pot.w0 * mm;
    w.c[slot + 2] = -pot.w0 * nn * s;
    QSpinor::new(u, w).scale_right(phase(q, z))
}

fn assemble_plus<T: Real>(
    z: T,
    spin: Spin,
    pot: &StepPotential<T>,
    q: Complex<T>,
    a: Complex<T>,
    mm: Complex<T>,
    nn: Complex<T>,
) -> QSpinor<T> {
    let (slot, s) = spin.slot::<T>();
    let mut u = Spinor4::zero();
    let mut w = Spinor4::zero();
    w.c[slot] = a * s;
    w.c[slot + 2] = re(T::one());
    u.c[slot] = -pot.w0.conj() * nn * s;
    u.c[slot + 2] = -pot.w0.conj() * mm;
    QSpinor::new(u, w).scale_right(phase(q, z))
}
