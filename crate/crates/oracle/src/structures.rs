//! Closed-form two-port models of the three test structures. Lengths are in
//! metres and frequencies in hertz.

use std::f64::consts::PI;

use num_complex::Complex64;
use rfsurrogate_core::CMatrix;

use crate::network::{
    dielectric_filling, ellip_k, internal_impedance, microstrip, permittivity_ratio, surface_resistance, Abcd, C0,
    EPS0, MU0, Z_REF,
};
use crate::Constants;

const J: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BclfGeometry {
    pub l: f64,
    pub l1: f64,
    pub l2: f64,
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Propagation constant × length and impedance of a microstrip section.
/// Conductor loss uses the causal `(1 + j)` skin-effect form and dielectric
/// loss the wideband Debye permittivity.
fn microstrip_section(f: f64, len: f64, w: f64, k: &Constants) -> (Complex64, f64) {
    let (z, eeff) = microstrip(w, k.height, k.eps_r, k.metal_thickness);
    let beta = 2.0 * PI * f * eeff.sqrt() / C0;
    let ac = surface_resistance(f, k.conductivity) / (z * w);
    let eta = permittivity_ratio(f, k.eps_r, k.loss_tangent);
    let q = dielectric_filling(k.eps_r, eeff);
    let gamma = J * beta * (1.0 + q * (eta - 1.0)).sqrt() + Complex64::new(ac, ac);
    (gamma * len, z)
}

/// Parallel-coupled section with open ends on the unused ports, from its
/// even/odd-mode impedances. The coupling coefficient decays exponentially
/// with the gap.
fn coupled_section(f: f64, len: f64, w: f64, gap: f64, k: &Constants) -> Abcd {
    let (gl, z) = microstrip_section(f, len, w, k);
    let theta = -J * gl;
    let kc = 0.48 * (-gap / (1.36 * k.height)).exp();
    let ze = z * ((1.0 + kc) / (1.0 - kc)).sqrt();
    let zo = z * ((1.0 - kc) / (1.0 + kc)).sqrt();
    let (cos, sin) = (theta.cos(), theta.sin());
    let a = (ze + zo) / (ze - zo) * cos;
    let b = J * ((ze - zo).powi(2) - (ze + zo).powi(2) * cos * cos) / (2.0 * (ze - zo) * sin);
    let c = J * 2.0 * sin / (ze - zo);
    Abcd { a, b, c, d: a }
}

/// Feed line, four coupled sections mirrored about the centre, feed line.
pub fn bclf(g: &BclfGeometry, f: f64, k: &Constants) -> CMatrix {
    let feed = {
        let (gl, z) = microstrip_section(f, g.l, g.w, k);
        Abcd::line(gl, Complex64::new(z, 0.0))
    };
    let outer = coupled_section(f, g.l1, g.w1, g.s1, k);
    let inner = coupled_section(f, g.l2, g.w2, g.s2, k);
    feed.then(&outer)
        .then(&inner)
        .then(&inner)
        .then(&outer)
        .then(&feed)
        .to_s(Z_REF)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiGeometry {
    pub din: f64,
    pub s: f64,
    pub w: f64,
}

/// Element values of the spiral π model at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiElements {
    pub ls: f64,
    pub rs: f64,
    pub cs: f64,
    pub cox: f64,
    pub csi: f64,
    pub rsi: f64,
}

pub fn si_elements(g: &SiGeometry, f: f64, k: &Constants) -> SiElements {
    let n = k.turns as f64;
    let dout = g.din + 2.0 * n * g.w + 2.0 * (n - 1.0) * g.s;
    let davg = 0.5 * (g.din + dout);
    let fill = (dout - g.din) / (dout + g.din);
    // modified Wheeler, square spiral
    let ls = 2.34 * MU0 * n * n * davg / (1.0 + 2.75 * fill);
    let len = 4.0 * n * davg;
    let omega = 2.0 * PI * f;
    let delta = (2.0 / (omega * MU0 * k.conductivity)).sqrt();
    let t_eff = delta * (1.0 - (-k.metal_thickness / delta).exp());
    let eox = k.oxide_eps_r * EPS0;
    SiElements {
        ls,
        rs: len / (k.conductivity * g.w * t_eff),
        cs: n * g.w * g.w * eox / k.underpass_thickness,
        cox: 0.5 * len * g.w * eox / k.oxide_thickness,
        csi: 0.5 * len * g.w * k.substrate_capacitance,
        rsi: 2.0 / (len * g.w * k.substrate_conductance),
    }
}

/// π model: series `(Rs + jωLs) ∥ Cs`, each shunt arm `Cox` in series with `Rsi ∥ Csi`.
pub fn si(g: &SiGeometry, f: f64, k: &Constants) -> CMatrix {
    let e = si_elements(g, f, k);
    let jw = J * (2.0 * PI * f);
    let z = 1.0 / (1.0 / (e.rs + jw * e.ls) + jw * e.cs);
    let y = 1.0 / (1.0 / (jw * e.cox) + 1.0 / (1.0 / e.rsi + jw * e.csi));
    let a = 1.0 + z * y;
    Abcd {
        a,
        b: z,
        c: 2.0 * y + z * y * y,
        d: a,
    }
    .to_s(Z_REF)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtlGeometry {
    /// Gap to the coplanar side grounds.
    pub s: f64,
    pub l: f64,
    pub t: f64,
    pub w: f64,
}

/// Quasi-static impedance and effective permittivity of a strip with coplanar
/// side grounds over a backing ground (conformal mapping).
pub fn grounded_cpw(w: f64, gap: f64, t: f64, k: &Constants) -> (f64, f64) {
    let dw = 1.25 * t / PI * (1.0 + (4.0 * PI * w / t).ln());
    let a = 0.5 * (w + dw);
    let b = 0.5 * w + gap;
    let k1 = a / b;
    let k3 = (PI * a / (2.0 * k.height)).tanh() / (PI * b / (2.0 * k.height)).tanh();
    let r1 = ellip_k(k1) / ellip_k((1.0 - k1 * k1).sqrt());
    let r3 = ellip_k(k3) / ellip_k((1.0 - k3 * k3).sqrt());
    let eeff = (1.0 + k.eps_r * r3 / r1) / (1.0 + r3 / r1);
    let z = 60.0 * PI / eeff.sqrt() / (r1 + r3);
    (z, eeff)
}

/// Per-unit-length series impedance and shunt admittance at frequency `f`.
pub fn mtl_zy(g: &MtlGeometry, f: f64, k: &Constants) -> (Complex64, Complex64) {
    let (z, eeff) = grounded_cpw(g.w, g.s, g.t, k);
    let l = z * eeff.sqrt() / C0;
    let c = eeff.sqrt() / (z * C0);
    let w = 2.0 * PI * f;
    // strip plus the return current in the side grounds
    let inv_width = 1.0 / g.w + 1.0 / (g.w + 2.0 * g.s);
    let r_dc = 1.0 / (k.conductivity * g.w * g.t);
    let zs = J * (w * l) + internal_impedance(f, r_dc, inv_width, k.conductivity);
    let eta = permittivity_ratio(f, k.eps_r, k.loss_tangent);
    let ys = J * (w * c) * (1.0 + dielectric_filling(k.eps_r, eeff) * (eta - 1.0));
    (zs, ys)
}

/// Telegrapher solution of the lossy line.
pub fn mtl(g: &MtlGeometry, f: f64, k: &Constants) -> CMatrix {
    let (zs, ys) = mtl_zy(g, f, k);
    let gamma = (zs * ys).sqrt();
    let zc = (zs / ys).sqrt();
    Abcd::line(gamma * g.l, zc).to_s(Z_REF)
}
