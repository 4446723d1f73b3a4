use crate::scalar::Real;

/// Plane (cylinder on a plane) or axisymmetric (sphere on a plane) Hertz contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HertzMode {
    Plane,
    Axisymmetric,
}

/// Closed-form Hertz solution: half-width `a`, peak pressure `p0` and the
/// elliptic profile `p(r) = p0 sqrt(1 - r^2 / a^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HertzAnalytic<T> {
    pub mode: HertzMode,
    pub radius: T,
    pub young: T,
    pub poisson: T,
    pub pressure: T,
    pub a: T,
    pub p0: T,
}

/// Cylinder of radius `R` loaded by a pressure `P` on its mid-plane section.
pub fn hertz_2d<T: Real>(radius: T, young: T, poisson: T, pressure: T) -> HertzAnalytic<T> {
    let a = (T::lit(8.0) * radius * radius * pressure * (T::one() - poisson * poisson) / (T::PI() * young)).sqrt();
    let p0 = if a > T::zero() { T::lit(4.0) * radius * pressure / (T::PI() * a) } else { T::zero() };
    HertzAnalytic { mode: HertzMode::Plane, radius, young, poisson, pressure, a, p0 }
}

/// Sphere of radius `R` loaded by a pressure `P` on its equatorial section.
pub fn hertz_3d<T: Real>(radius: T, young: T, poisson: T, pressure: T) -> HertzAnalytic<T> {
    let a = (T::lit(3.0) * T::PI() * radius.powi(3) * pressure * (T::one() - poisson * poisson) / (T::lit(4.0) * young)).cbrt();
    let p0 = if a > T::zero() { T::lit(1.5) * radius * radius * pressure / (a * a) } else { T::zero() };
    HertzAnalytic { mode: HertzMode::Axisymmetric, radius, young, poisson, pressure, a, p0 }
}

impl<T: Real> HertzAnalytic<T> {
    /// Contact pressure at distance `r` from the first contact point.
    pub fn pressure_at(&self, r: T) -> T {
        if !(self.a > T::zero()) || r.abs() >= self.a {
            return T::zero();
        }
        let s = r / self.a;
        self.p0 * (T::one() - s * s).sqrt()
    }
}
