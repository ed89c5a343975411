//! Two-port helpers shared by the physical oracles.

use num_complex::Complex64;
use rfsurrogate_core::CMatrix;

pub const C0: f64 = 299_792_458.0;
pub const MU0: f64 = 4e-7 * std::f64::consts::PI;
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Reference impedance of both ports.
pub const Z_REF: f64 = 50.0;

/// Transmission matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// Cascade `self` followed by `next`.
    pub fn then(&self, next: &Abcd) -> Abcd {
        Abcd {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    /// Uniform line of propagation constant × length `gl` and characteristic impedance `zc`.
    pub fn line(gl: Complex64, zc: Complex64) -> Abcd {
        Abcd {
            a: gl.cosh(),
            b: zc * gl.sinh(),
            c: gl.sinh() / zc,
            d: gl.cosh(),
        }
    }

    /// Scattering matrix for equal real reference impedances `z0` on both ports.
    pub fn to_s(&self, z0: f64) -> CMatrix {
        let Abcd { a, b, c, d } = *self;
        let den = a + b / z0 + c * z0 + d;
        let s11 = (a + b / z0 - c * z0 - d) / den;
        let s12 = 2.0 * (a * d - b * c) / den;
        let s21 = 2.0 / den;
        let s22 = (-a + b / z0 - c * z0 + d) / den;
        CMatrix::from_row_slice(2, 2, &[s11, s12, s21, s22])
    }
}

/// Surface resistance of a good conductor.
pub fn surface_resistance(f: f64, conductivity: f64) -> f64 {
    (std::f64::consts::PI * f * MU0 / conductivity).sqrt()
}

/// Complete elliptic integral of the first kind by the arithmetic-geometric mean.
pub fn ellip_k(k: f64) -> f64 {
    let (mut a, mut b) = (1.0_f64, (1.0 - k * k).sqrt());
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    std::f64::consts::PI / (2.0 * a)
}

/// Hammerstad–Jensen microstrip impedance and effective permittivity, with
/// the usual strip-thickness width correction.
pub fn microstrip(w: f64, h: f64, eps_r: f64, t: f64) -> (f64, f64) {
    let w = if t > 0.0 {
        w + t / std::f64::consts::PI * (1.0 + (2.0 * h / t).ln())
    } else {
        w
    };
    let u = w / h;
    let mut eeff = (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / (1.0 + 12.0 / u).sqrt();
    if u < 1.0 {
        eeff += 0.04 * (1.0 - u).powi(2) * (eps_r - 1.0) / 2.0;
    }
    let z = if u <= 1.0 {
        60.0 / eeff.sqrt() * (8.0 / u + u / 4.0).ln()
    } else {
        120.0 * std::f64::consts::PI / eeff.sqrt() / (u + 1.393 + 0.667 * (u + 1.444).ln())
    };
    (z, eeff)
}

/// Frequency at which the substrate's `eps_r` and loss tangent are quoted.
pub const LOSS_REFERENCE: f64 = 1e9;
const DEBYE_LOW: f64 = 2.0 * std::f64::consts::PI * 1e3;
const DEBYE_HIGH: f64 = 2.0 * std::f64::consts::PI * 1e12;

fn debye_shape(f: f64) -> Complex64 {
    let jw = Complex64::new(0.0, 2.0 * std::f64::consts::PI * f);
    ((DEBYE_HIGH + jw) / (DEBYE_LOW + jw)).ln() / (DEBYE_HIGH / DEBYE_LOW).ln()
}

/// Complex permittivity relative to `eps_r`, from a wideband Debye model
/// (Djordjevic–Sarkar) matched to `eps_r(1 − j·tan δ)` at [`LOSS_REFERENCE`].
/// Unlike a constant loss tangent this is causal, so line responses stay
/// representable by stable rational functions.
pub fn permittivity_ratio(f: f64, eps_r: f64, loss_tangent: f64) -> Complex64 {
    let r = debye_shape(LOSS_REFERENCE);
    let delta = -loss_tangent * eps_r / r.im;
    let eps_inf = eps_r - delta * r.re;
    (eps_inf + delta * debye_shape(f)) / eps_r
}

/// Causal internal impedance per unit length of a conductor: tends to `r_dc`
/// at low frequency and to `(1 + j)·R_s·g` once the skin effect sets in,
/// where `g` is the sum of inverse conductor widths carrying current.
pub fn internal_impedance(f: f64, r_dc: f64, g: f64, conductivity: f64) -> Complex64 {
    let omega = 2.0 * std::f64::consts::PI * f;
    Complex64::new(r_dc * r_dc, omega * MU0 * g * g / conductivity).sqrt()
}

/// Filling factor turning the substrate loss tangent into a line loss.
pub fn dielectric_filling(eps_r: f64, eeff: f64) -> f64 {
    eps_r * (eeff - 1.0) / (eeff * (eps_r - 1.0))
}
