//! Touchstone v1 reader and writer for 1- and 2-port S-parameter files.

use std::fmt::Write as _;
use std::path::Path;

use rfsurrogate_core::fmt::f17;
use rfsurrogate_core::{CMatrix, Complex64, ComplexResponse, FrequencyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Real and imaginary parts.
    Ri,
    /// Linear magnitude and angle in degrees.
    Ma,
    /// Magnitude in dB and angle in degrees.
    Db,
}

impl Format {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "RI" => Some(Format::Ri),
            "MA" => Some(Format::Ma),
            "DB" => Some(Format::Db),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Format::Ri => "RI",
            Format::Ma => "MA",
            Format::Db => "DB",
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            Format::Ri => Complex64::new(a, b),
            Format::Ma => Complex64::from_polar(a, b.to_radians()),
            Format::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            Format::Ri => (z.re, z.im),
            Format::Ma => (z.norm(), z.arg().to_degrees()),
            Format::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "HZ" => Some(FreqUnit::Hz),
            "KHZ" => Some(FreqUnit::KHz),
            "MHZ" => Some(FreqUnit::MHz),
            "GHZ" => Some(FreqUnit::GHz),
            _ => None,
        }
    }

    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TouchstoneError {
    #[error("line {line}: malformed option line: {reason}")]
    Option { line: usize, reason: String },
    #[error("line {line}: frequency {freq} does not increase")]
    NonMonotone { line: usize, freq: f64 },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Columns { line: usize, expected: usize, found: usize },
    #[error("line {line}: invalid number {token:?}")]
    Number { line: usize, token: String },
    #[error("line {line}: frequency {freq} is not positive")]
    Frequency { line: usize, freq: f64 },
    #[error("no data lines")]
    Empty,
    #[error("only 1- and 2-port responses are supported, got {0} ports")]
    Ports(usize),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Touchstone {
    pub response: ComplexResponse,
    pub format: Format,
    pub unit: FreqUnit,
    /// Reference impedance in ohms.
    pub z0: f64,
}

struct Options {
    unit: FreqUnit,
    format: Format,
    z0: f64,
}

fn parse_option(text: &str, line: usize) -> Result<Options, TouchstoneError> {
    let err = |reason: String| TouchstoneError::Option { line, reason };
    let mut opts = Options {
        unit: FreqUnit::GHz,
        format: Format::Ma,
        z0: 50.0,
    };
    let upper = text.to_ascii_uppercase();
    let mut tokens = upper.split_whitespace().skip(1);
    while let Some(t) = tokens.next() {
        if let Some(u) = FreqUnit::parse(t) {
            opts.unit = u;
        } else if let Some(f) = Format::parse(t) {
            opts.format = f;
        } else if t == "S" {
        } else if t == "R" {
            let v = tokens.next().ok_or_else(|| err("R without a value".into()))?;
            opts.z0 = v.parse().map_err(|_| err(format!("bad reference impedance {v:?}")))?;
            if !(opts.z0 > 0.0) {
                return Err(err("reference impedance must be positive".into()));
            }
        } else if matches!(t, "Y" | "Z" | "H" | "G") {
            return Err(err(format!("parameter type {t} is not supported")));
        } else {
            return Err(err(format!("unknown token {t:?}")));
        }
    }
    Ok(opts)
}

/// Parses Touchstone text. `ports` comes from the file extension when known,
/// otherwise from the first data line's column count.
pub fn parse(text: &str, ports: Option<usize>) -> Result<Touchstone, TouchstoneError> {
    let mut opts: Option<Options> = None;
    let mut freqs = Vec::new();
    let mut data = Vec::new();
    let mut ports = ports;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('!').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('#') {
            if opts.is_some() {
                return Err(TouchstoneError::Option {
                    line,
                    reason: "second option line".into(),
                });
            }
            opts = Some(parse_option(body, line)?);
            continue;
        }
        let o = opts.get_or_insert(Options {
            unit: FreqUnit::GHz,
            format: Format::Ma,
            z0: 50.0,
        });
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let n = *ports.get_or_insert(match tokens.len() {
            3 => 1,
            _ => 2,
        });
        if n > 2 || n == 0 {
            return Err(TouchstoneError::Ports(n));
        }
        let expected = 1 + 2 * n * n;
        if tokens.len() != expected {
            return Err(TouchstoneError::Columns {
                line,
                expected,
                found: tokens.len(),
            });
        }
        let mut v = Vec::with_capacity(expected);
        for t in &tokens {
            let x: f64 = t.parse().map_err(|_| TouchstoneError::Number {
                line,
                token: t.to_string(),
            })?;
            if !x.is_finite() {
                return Err(TouchstoneError::Number {
                    line,
                    token: t.to_string(),
                });
            }
            v.push(x);
        }
        let f = v[0] * o.unit.scale();
        if !(f > 0.0) {
            return Err(TouchstoneError::Frequency { line, freq: f });
        }
        if freqs.last().is_some_and(|&prev| f <= prev) {
            return Err(TouchstoneError::NonMonotone { line, freq: f });
        }
        freqs.push(f);
        let pairs: Vec<Complex64> = v[1..].chunks(2).map(|c| o.format.decode(c[0], c[1])).collect();
        let m = if n == 1 {
            CMatrix::from_element(1, 1, pairs[0])
        } else {
            // 2-port order is S11 S21 S12 S22
            CMatrix::from_row_slice(2, 2, &[pairs[0], pairs[2], pairs[1], pairs[3]])
        };
        data.push(m);
    }
    let o = opts.unwrap_or(Options {
        unit: FreqUnit::GHz,
        format: Format::Ma,
        z0: 50.0,
    });
    if freqs.is_empty() {
        return Err(TouchstoneError::Empty);
    }
    let grid = FrequencyGrid::new(freqs).expect("frequencies checked while parsing");
    let response = ComplexResponse::new(grid, data).expect("one matrix per frequency");
    Ok(Touchstone {
        response,
        format: o.format,
        unit: o.unit,
        z0: o.z0,
    })
}

fn ports_from_path(path: &Path) -> Option<usize> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    let n = ext.strip_prefix('s')?.strip_suffix('p')?;
    n.parse().ok()
}

pub fn read(path: &Path) -> Result<Touchstone, TouchstoneError> {
    let text = std::fs::read_to_string(path).map_err(|e| TouchstoneError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text, ports_from_path(path))
}

/// Touchstone text with 17 significant digits.
pub fn render(resp: &ComplexResponse, format: Format, unit: FreqUnit, z0: f64) -> Result<String, TouchstoneError> {
    let n = resp.ports();
    if n > 2 {
        return Err(TouchstoneError::Ports(n));
    }
    let mut out = format!("# {} S {} R {}\n", unit.name(), format.name(), rfsurrogate_core::fmt::sig(z0, 17));
    for (f, m) in resp.grid().points().iter().zip(resp.data()) {
        out.push_str(&f17(f / unit.scale()));
        let order: Vec<Complex64> = if n == 1 {
            vec![m[(0, 0)]]
        } else {
            vec![m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)]]
        };
        for z in order {
            let (a, b) = format.encode(z);
            let _ = write!(out, " {} {}", f17(a), f17(b));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes an RI file in Hz.
pub fn write(resp: &ComplexResponse, path: &Path) -> Result<(), TouchstoneError> {
    write_with(resp, path, Format::Ri, FreqUnit::Hz)
}

pub fn write_with(resp: &ComplexResponse, path: &Path, format: Format, unit: FreqUnit) -> Result<(), TouchstoneError> {
    let text = render(resp, format, unit, 50.0)?;
    std::fs::write(path, text).map_err(|e| TouchstoneError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
