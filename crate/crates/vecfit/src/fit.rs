use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rfsurrogate_core::{CMatrix, ComplexResponse, FrequencyGrid};

use crate::linalg::lstsq;
use crate::{RationalModel, Result, VecfitError};

/// Relative threshold for the minimum-norm solution of the relocation system.
const RELOCATION_RCOND: f64 = 1e-13;
/// Residue systems with a relative singular value below this are rank deficient.
const RESIDUE_RCOND: f64 = 1e-15;
/// Relaxed solutions with `|d̃|` below this fall back to the fixed-normalization system.
const RELAXED_FLOOR: f64 = 1e-8;
/// Residual, relative to the data RMS, treated as an exact fit.
const ROUNDOFF_RMS: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPoles {
    /// Conjugate pairs with imaginary parts spread linearly over the band and
    /// real parts at −1/100 of the imaginary part; odd orders add one real pole
    /// at the band centre.
    Linear,
    /// Explicit poles in rad/s; the set must be closed under conjugation.
    Explicit(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub order: usize,
    pub iterations: usize,
    pub initial_poles: InitialPoles,
    /// Stop once the largest pole movement relative to the largest pole falls below this.
    pub tolerance: f64,
    pub include_linear: bool,
    /// Relaxed normalization of the scaling function.
    pub relaxed: bool,
}

impl FitConfig {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            iterations: 20,
            initial_poles: InitialPoles::Linear,
            tolerance: 1e-8,
            include_linear: false,
            relaxed: true,
        }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(VecfitError::InvalidConfig("order must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(VecfitError::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(VecfitError::InvalidConfig("tolerance must be non-negative".into()));
        }
        if let InitialPoles::Explicit(p) = &self.initial_poles {
            if p.len() != self.order {
                return Err(VecfitError::InvalidConfig(format!(
                    "{} explicit poles for order {}",
                    p.len(),
                    self.order
                )));
            }
        }
        Ok(())
    }

    /// Smallest number of frequency samples accepted for this order.
    pub fn min_samples(&self) -> usize {
        2 * self.order + 2
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    /// Lowest-residual model seen over all iterations.
    pub model: RationalModel,
    pub converged: bool,
    /// Relocation steps performed.
    pub iterations: usize,
    /// RMS residual after the residue solve; entry 0 uses the initial poles.
    pub residual_history: Vec<f64>,
    /// RMS error of `model` over the samples.
    pub rms: f64,
}

/// Starting poles in rad/s for the band of `grid`.
pub fn initial_poles(order: usize, grid: &FrequencyGrid) -> Vec<Complex64> {
    let (w0, w1) = (2.0 * PI * grid.min(), 2.0 * PI * grid.max());
    let pairs = order / 2;
    let mut poles = Vec::with_capacity(order);
    for i in 0..pairs {
        let beta = if pairs == 1 {
            0.5 * (w0 + w1)
        } else {
            w0 + (w1 - w0) * i as f64 / (pairs - 1) as f64
        };
        let p = Complex64::new(-beta / 100.0, beta);
        poles.push(p);
        poles.push(p.conj());
    }
    if order % 2 == 1 {
        poles.push(Complex64::new(-0.5 * (w0 + w1), 0.0));
    }
    poles
}

/// Pole set in canonical order: conjugate pairs `(p, p̄)` with `Im p > 0`
/// sorted by imaginary part, then real poles sorted by decreasing real part.
#[derive(Debug, Clone, PartialEq)]
struct PoleSet {
    pairs: Vec<Complex64>,
    reals: Vec<f64>,
}

impl PoleSet {
    /// Pairs up eigenvalues of a real matrix. Near-real values become real.
    fn from_values(values: &[Complex64]) -> Self {
        let thr = |z: &Complex64| 1e-10 * z.norm().max(f64::MIN_POSITIVE);
        let mut pos: Vec<Complex64> = values.iter().copied().filter(|z| z.im > thr(z)).collect();
        let mut neg: Vec<Complex64> = values.iter().copied().filter(|z| z.im < -thr(z)).collect();
        let mut reals: Vec<f64> = values
            .iter()
            .filter(|z| z.im.abs() <= thr(z))
            .map(|z| z.re)
            .collect();
        pos.sort_by(|a, b| b.im.total_cmp(&a.im));
        neg.sort_by(|a, b| a.im.total_cmp(&b.im));
        let m = pos.len().min(neg.len());
        let mut pairs: Vec<Complex64> = pos
            .iter()
            .zip(&neg)
            .map(|(a, b)| Complex64::new(0.5 * (a.re + b.re), 0.5 * (a.im - b.im)))
            .collect();
        reals.extend(pos[m..].iter().chain(&neg[m..]).map(|z| z.re));
        pairs.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
        reals.sort_by(|a, b| b.total_cmp(a));
        Self { pairs, reals }
    }

    fn order(&self) -> usize {
        2 * self.pairs.len() + self.reals.len()
    }

    fn flip_unstable(&mut self) {
        let fix = |re: f64, scale: f64| {
            if re > 0.0 {
                -re
            } else if re == 0.0 {
                -1e-8 * scale.max(1e-3)
            } else {
                re
            }
        };
        for p in &mut self.pairs {
            p.re = fix(p.re, p.im);
        }
        for r in &mut self.reals {
            *r = fix(*r, r.abs());
        }
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            pairs: self.pairs.iter().map(|p| p * k).collect(),
            reals: self.reals.iter().map(|r| r * k).collect(),
        }
    }

    /// Flattened in model order.
    fn poles(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.order());
        for p in &self.pairs {
            out.push(*p);
            out.push(p.conj());
        }
        out.extend(self.reals.iter().map(|&r| Complex64::new(r, 0.0)));
        out
    }

    /// Largest pole displacement relative to the largest pole, or infinity if
    /// the pair/real structure changed.
    fn movement(&self, other: &Self) -> f64 {
        if self.pairs.len() != other.pairs.len() || self.reals.len() != other.reals.len() {
            return f64::INFINITY;
        }
        let a = self.poles();
        let b = other.poles();
        let big = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / big
    }

    /// Real basis: each pair contributes `1/(s−p) + 1/(s−p̄)` and
    /// `j/(s−p) − j/(s−p̄)`; each real pole `1/(s−p)`.
    fn basis(&self, s: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.order();
        let j = Complex64::i();
        DMatrix::from_fn(s.len(), n, |k, c| {
            let sk = s[k];
            let np = 2 * self.pairs.len();
            if c < np {
                let p = self.pairs[c / 2];
                let (a, b) = (1.0 / (sk - p), 1.0 / (sk - p.conj()));
                if c % 2 == 0 {
                    a + b
                } else {
                    j * a - j * b
                }
            } else {
                1.0 / (sk - self.reals[c - np])
            }
        })
    }

    /// Real state matrix and input vector realizing the basis.
    fn realization(&self) -> (DMatrix<f64>, Vec<f64>) {
        let n = self.order();
        let mut a = DMatrix::zeros(n, n);
        let mut b = vec![0.0; n];
        for (i, p) in self.pairs.iter().enumerate() {
            let c = 2 * i;
            a[(c, c)] = p.re;
            a[(c, c + 1)] = p.im;
            a[(c + 1, c)] = -p.im;
            a[(c + 1, c + 1)] = p.re;
            b[c] = 2.0;
        }
        let np = 2 * self.pairs.len();
        for (i, r) in self.reals.iter().enumerate() {
            a[(np + i, np + i)] = *r;
            b[np + i] = 1.0;
        }
        (a, b)
    }
}

/// Stacks a complex column-block into real rows: real parts first, then imaginary.
fn split_rows(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let k = m.nrows();
    DMatrix::from_fn(2 * k, m.ncols(), |r, c| {
        if r < k {
            m[(r, c)].re
        } else {
            m[(r - k, c)].im
        }
    })
}

struct Problem<'a> {
    s: Vec<Complex64>,
    /// One column per matrix entry, row-major over ports.
    f: DMatrix<Complex64>,
    ports: usize,
    config: &'a FitConfig,
}

impl Problem<'_> {
    fn n_common(&self, order: usize) -> usize {
        order + 1 + usize::from(self.config.include_linear)
    }

    /// `[Φ | 1 | s]`.
    fn common_block(&self, phi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = phi.ncols();
        let nc = self.n_common(n);
        DMatrix::from_fn(self.s.len(), nc, |k, c| {
            if c < n {
                phi[(k, c)]
            } else if c == n {
                Complex64::new(1.0, 0.0)
            } else {
                self.s[k]
            }
        })
    }

    /// Solves for the scaling-function coefficients `(c̃, d̃)`.
    fn relocation_coefficients(&self, poles: &PoleSet) -> (Vec<f64>, f64) {
        let phi = poles.basis(&self.s);
        let n = poles.order();
        let common = self.common_block(&phi);
        let nc = common.ncols();
        let k = self.s.len();
        let entries = self.f.ncols();

        if self.config.relaxed {
            let mut stack = DMatrix::zeros(entries * (n + 1) + 1, n + 1);
            for m in 0..entries {
                let block = DMatrix::from_fn(k, nc + n + 1, |r, c| {
                    if c < nc {
                        common[(r, c)]
                    } else if c < nc + n {
                        -self.f[(r, m)] * phi[(r, c - nc)]
                    } else {
                        -self.f[(r, m)]
                    }
                });
                let r = split_rows(&block).qr().r();
                stack
                    .view_mut((m * (n + 1), 0), (n + 1, n + 1))
                    .copy_from(&r.view((nc, nc), (n + 1, n + 1)));
            }
            // Fixes the scale of the scaling function: Σ_k Re σ(s_k) = K.
            let scale = self.f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / k as f64;
            let scale = if scale > 0.0 { scale } else { 1.0 };
            let last = stack.nrows() - 1;
            for c in 0..n {
                stack[(last, c)] = scale * (0..k).map(|r| phi[(r, c)].re).sum::<f64>();
            }
            stack[(last, n)] = scale * k as f64;
            let mut rhs = DMatrix::zeros(stack.nrows(), 1);
            rhs[(last, 0)] = scale * k as f64;
            let x = lstsq(&stack, &rhs, RELOCATION_RCOND).x;
            let d = x[(n, 0)];
            if d.abs() >= RELAXED_FLOOR {
                return ((0..n).map(|i| x[(i, 0)]).collect(), d);
            }
        }

        // Scaling function with d̃ fixed at 1.
        let mut stack = DMatrix::zeros(entries * n, n);
        let mut rhs = DMatrix::zeros(entries * n, 1);
        for m in 0..entries {
            let block = DMatrix::from_fn(k, nc + n + 1, |r, c| {
                if c < nc {
                    common[(r, c)]
                } else if c < nc + n {
                    -self.f[(r, m)] * phi[(r, c - nc)]
                } else {
                    self.f[(r, m)]
                }
            });
            let r = split_rows(&block).qr().r();
            stack
                .view_mut((m * n, 0), (n, n))
                .copy_from(&r.view((nc, nc), (n, n)));
            rhs.view_mut((m * n, 0), (n, 1))
                .copy_from(&r.view((nc, nc + n), (n, 1)));
        }
        let x = lstsq(&stack, &rhs, RELOCATION_RCOND).x;
        ((0..n).map(|i| x[(i, 0)]).collect(), 1.0)
    }

    fn relocate(&self, poles: &PoleSet) -> PoleSet {
        let (c, d) = self.relocation_coefficients(poles);
        let (mut a, b) = poles.realization();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                a[(i, j)] -= b[i] * c[j] / d;
            }
        }
        let eig: Vec<Complex64> = a.complex_eigenvalues().iter().copied().collect();
        let mut next = PoleSet::from_values(&eig);
        next.flip_unstable();
        next
    }

    /// Residues, offset and linear term for fixed poles, in the scaled domain.
    fn residues(&self, poles: &PoleSet) -> Result<(RationalModel, f64)> {
        let phi = poles.basis(&self.s);
        let n = poles.order();
        let a = split_rows(&self.common_block(&phi));
        let b = split_rows(&self.f);
        let sol = lstsq(&a, &b, RESIDUE_RCOND);
        if sol.rank < a.ncols() {
            return Err(VecfitError::IllConditioned {
                condition: sol.condition,
            });
        }
        let resid = &a * &sol.x - &b;
        let rms = (resid.norm_squared() / (self.s.len() * self.f.ncols()) as f64).sqrt();

        let p = self.ports;
        let x = &sol.x;
        let entry = |row: usize, m: usize| x[(row, m)];
        let np = 2 * poles.pairs.len();
        let mut residues = Vec::with_capacity(n);
        for i in 0..poles.pairs.len() {
            let r = CMatrix::from_fn(p, p, |a, b| {
                let m = a * p + b;
                Complex64::new(entry(2 * i, m), entry(2 * i + 1, m))
            });
            residues.push(r.clone());
            residues.push(r.map(|z| z.conj()));
        }
        for i in 0..poles.reals.len() {
            residues.push(CMatrix::from_fn(p, p, |a, b| {
                Complex64::new(entry(np + i, a * p + b), 0.0)
            }));
        }
        let d = DMatrix::from_fn(p, p, |a, b| entry(n, a * p + b));
        let e = if self.config.include_linear {
            DMatrix::from_fn(p, p, |a, b| entry(n + 1, a * p + b))
        } else {
            DMatrix::zeros(p, p)
        };
        let model = RationalModel::new(poles.poles(), residues, d, e, self.config.include_linear)?;
        Ok((model, rms))
    }
}

/// Undoes the frequency normalization `s̃ = s / ω_s`.
fn unscale(model: &RationalModel, w: f64) -> Result<RationalModel> {
    RationalModel::new(
        model.poles().iter().map(|p| p * w).collect(),
        model.residues().iter().map(|r| r * Complex64::new(w, 0.0)).collect(),
        model.offset().clone(),
        model.linear() / w,
        model.include_linear(),
    )
}

/// Vector fitting with relaxed pole relocation.
///
/// Frequencies are normalized by `2π·f_max` internally. Each relocation step
/// eliminates the per-entry unknowns with a QR factorization and solves the
/// stacked scaling-function system; new poles are the eigenvalues of
/// `A − b·c̃ᵀ/d̃`, with unstable ones reflected into the left half-plane.
pub fn fit(samples: &ComplexResponse, config: &FitConfig) -> Result<FitOutcome> {
    config.validate()?;
    if !samples.is_finite() {
        return Err(VecfitError::NonFinite);
    }
    let grid = samples.grid();
    let need = config.min_samples();
    if grid.len() < need {
        return Err(VecfitError::NotEnoughSamples {
            order: config.order,
            need,
            have: grid.len(),
        });
    }
    let w = 2.0 * PI * grid.max();
    let p = samples.ports();
    let s: Vec<Complex64> = grid.points().iter().map(|&f| Complex64::new(0.0, 2.0 * PI * f / w)).collect();
    let f = DMatrix::from_fn(s.len(), p * p, |k, m| samples.at(k)[(m / p, m % p)]);
    let problem = Problem {
        s,
        f,
        ports: p,
        config,
    };

    let start = match &config.initial_poles {
        InitialPoles::Linear => initial_poles(config.order, grid),
        InitialPoles::Explicit(poles) => poles.clone(),
    };
    let mut poles = PoleSet::from_values(&start).scaled(1.0 / w);
    if poles.order() != config.order {
        return Err(VecfitError::InvalidConfig("initial poles are not closed under conjugation".into()));
    }

    let (mut best, first) = problem.residues(&poles)?;
    let mut best_rms = first;
    let mut history = vec![first];
    let data_rms = (problem.f.norm_squared() / problem.f.len() as f64).sqrt();
    let floor = ROUNDOFF_RMS * data_rms.max(f64::MIN_POSITIVE);
    let mut converged = first <= floor;
    let mut steps = 0;
    while !converged && steps < config.iterations {
        let next = problem.relocate(&poles);
        steps += 1;
        let moved = next.movement(&poles);
        poles = next;
        // Relocation on data without pole information can collapse poles;
        // keep the best model found so far.
        let (model, rms) = match problem.residues(&poles) {
            Ok(v) => v,
            Err(VecfitError::IllConditioned { .. }) => break,
            Err(e) => return Err(e),
        };
        history.push(rms);
        if rms <= best_rms {
            best = model;
            best_rms = rms;
        }
        if moved < config.tolerance || rms <= floor {
            converged = true;
        }
    }
    let model = unscale(&best, w)?;
    let fitted = model.evaluate(grid)?;
    let sq: f64 = fitted
        .data()
        .iter()
        .zip(samples.data())
        .map(|(a, b)| (a - b).norm_squared())
        .sum();
    let rms = (sq / (grid.len() * p * p) as f64).sqrt();
    Ok(FitOutcome {
        model,
        converged,
        iterations: steps,
        residual_history: history,
        rms,
    })
}
