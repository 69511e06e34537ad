//! Periodic complex time-frequency grid container, lag-support geometry, and
//! the forward/inverse symplectic 2D DFTs that every other module builds on.
//!
//! All time-frequency objects handled by this crate (ambiguity functions,
//! Rihaczek spectra/distributions, smoothing kernels, masks) live on an N×N
//! grid that is N-periodic in both indices. [`TfMatrix`] stores one period
//! (indices 0..N−1) and resolves every signed/centered index through a modulo
//! at the accessor, so periodicity has a single source of truth.

use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

/// Errors produced by grid construction and serialization.
#[derive(Debug, Error)]
pub enum GridError {
    /// Grid length too small or inconsistent with the data it must hold.
    #[error("invalid grid size: {0}")]
    InvalidSize(String),
    /// Lag half-widths incompatible with the grid length.
    #[error("invalid lag support: {0}")]
    InvalidSupport(String),
    /// Underlying I/O failure during (de)serialization.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Malformed serialized matrix.
    #[error("parse error: {0}")]
    Parse(String),
}

/// N×N complex matrix, doubly periodic in both indices.
///
/// Row index is the first argument (time `n` or time lag `m`), column index
/// the second (frequency `k` or frequency lag `l`). Storage is row-major over
/// one period `0..N−1`; negative or out-of-range indices are reduced modulo N
/// by [`TfMatrix::get`] / [`TfMatrix::set`].
#[derive(Debug, Clone, PartialEq)]
pub struct TfMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl TfMatrix {
    /// Creates an all-zeros N×N grid. Requires `n ≥ 2`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 2, "grid length must be at least 2");
        TfMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Builds a grid from a function of the stored (non-negative) indices.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut out = TfMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = f(i, j);
            }
        }
        out
    }

    /// Grid length N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Periodic accessor: `get(i, j) = get(i mod N, j mod N)` for any signed
    /// indices.
    pub fn get(&self, i: i64, j: i64) -> Complex64 {
        let n = self.n as i64;
        let i = i.rem_euclid(n) as usize;
        let j = j.rem_euclid(n) as usize;
        self.data[i * self.n + j]
    }

    /// Periodic mutator; same index convention as [`TfMatrix::get`].
    pub fn set(&mut self, i: i64, j: i64, v: Complex64) {
        let n = self.n as i64;
        let i = i.rem_euclid(n) as usize;
        let j = j.rem_euclid(n) as usize;
        self.data[i * self.n + j] = v;
    }

    /// Raw row-major storage for one period.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable raw storage (row-major, one period).
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Squared Frobenius (ℓ2) norm over one period.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius (ℓ2) norm over one period.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Entrywise map to a new grid.
    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> TfMatrix {
        TfMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `self − other`, entrywise.
    pub fn sub(&self, other: &TfMatrix) -> TfMatrix {
        assert_eq!(self.n, other.n, "grid sizes must match");
        TfMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &TfMatrix) -> f64 {
        assert_eq!(self.n, other.n, "grid sizes must match");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Writes the CSV form: a header line `N=<n>` followed by N rows of N
    /// interleaved `re,im` cell pairs (2N comma-separated numbers per row).
    pub fn write_csv(&self, w: &mut impl Write) -> Result<(), GridError> {
        writeln!(w, "N={}", self.n)?;
        for i in 0..self.n {
            let mut first = true;
            for j in 0..self.n {
                let z = self.data[i * self.n + j];
                if !first {
                    write!(w, ",")?;
                }
                write!(w, "{},{}", z.re, z.im)?;
                first = false;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads the CSV form written by [`TfMatrix::write_csv`].
    pub fn read_csv(r: &mut impl Read) -> Result<TfMatrix, GridError> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| GridError::Parse("empty input".into()))?;
        let n: usize = header
            .strip_prefix("N=")
            .ok_or_else(|| GridError::Parse(format!("bad header line: {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| GridError::Parse(format!("bad grid size: {e}")))?;
        if n < 2 {
            return Err(GridError::InvalidSize(format!("N={n} < 2")));
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, line) in lines.take(n).enumerate() {
            let mut cells = line.split(',');
            for col in 0..n {
                let re: f64 = cells
                    .next()
                    .ok_or_else(|| GridError::Parse(format!("row {row}: missing re at col {col}")))?
                    .trim()
                    .parse()
                    .map_err(|e| GridError::Parse(format!("row {row} col {col}: {e}")))?;
                let im: f64 = cells
                    .next()
                    .ok_or_else(|| GridError::Parse(format!("row {row}: missing im at col {col}")))?
                    .trim()
                    .parse()
                    .map_err(|e| GridError::Parse(format!("row {row} col {col}: {e}")))?;
                data.push(Complex64::new(re, im));
            }
        }
        if data.len() != n * n {
            return Err(GridError::Parse(format!(
                "expected {} rows of data, got fewer",
                n
            )));
        }
        Ok(TfMatrix { n, data })
    }

    /// Writes the raw little-endian binary form: `u64` N, then N² interleaved
    /// `f64` re/im pairs in row-major order. Round-trips bit-exactly.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<(), GridError> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for z in &self.data {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the binary form written by [`TfMatrix::write_binary`].
    pub fn read_binary(r: &mut impl Read) -> Result<TfMatrix, GridError> {
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n = u64::from_le_bytes(buf8) as usize;
        if n < 2 {
            return Err(GridError::InvalidSize(format!("N={n} < 2")));
        }
        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            r.read_exact(&mut buf8)?;
            let re = f64::from_le_bytes(buf8);
            r.read_exact(&mut buf8)?;
            let im = f64::from_le_bytes(buf8);
            data.push(Complex64::new(re, im));
        }
        Ok(TfMatrix { n, data })
    }
}

/// Lag-support geometry: the effective rectangle {−M..M}×{−L..L} of
/// time/frequency lags and its divisor-aligned extension.
///
/// `ΔM` (`dm`) is the smallest divisor of N with `ΔM ≥ 2M+1`, and likewise
/// `ΔL` (`dl`) for `2L+1`; the extension makes the lag window tile the grid
/// exactly, with subsampling strides `Δn = N/ΔL` in time and `Δk = N/ΔM` in
/// frequency. `S = (2M+1)(2L+1)` counts effective lags and `S′ = ΔM·ΔL` the
/// extended window size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LagSupport {
    /// Grid length N.
    pub n_size: usize,
    /// Time-lag half-width M (samples).
    pub m_half: usize,
    /// Frequency-lag half-width L (bins).
    pub l_half: usize,
    /// Extended time-lag extent ΔM (smallest divisor of N ≥ 2M+1).
    pub dm: usize,
    /// Extended frequency-lag extent ΔL (smallest divisor of N ≥ 2L+1).
    pub dl: usize,
    /// Time subsampling stride Δn = N/ΔL.
    pub dn: usize,
    /// Frequency subsampling stride Δk = N/ΔM.
    pub dk: usize,
    /// Effective support size S = (2M+1)(2L+1).
    pub s: usize,
    /// Extended support size S′ = ΔM·ΔL.
    pub s_prime: usize,
}

impl LagSupport {
    /// Iterator over the effective lag rectangle, `m ∈ −M..=M`, `l ∈ −L..=L`.
    pub fn effective_lags(&self) -> impl Iterator<Item = (i64, i64)> {
        let (m, l) = (self.m_half as i64, self.l_half as i64);
        (-m..=m).flat_map(move |mm| (-l..=l).map(move |ll| (mm, ll)))
    }

    /// True iff the signed lag pair lies in the periodized effective
    /// rectangle {−M..M}×{−L..L}.
    pub fn contains_effective(&self, m: i64, l: i64) -> bool {
        let n = self.n_size as i64;
        let mc = centered_residue(m, n);
        let lc = centered_residue(l, n);
        mc.abs() <= self.m_half as i64 && lc.abs() <= self.l_half as i64
    }

    /// True iff the signed lag pair lies in the periodized extended window
    /// {−M..−M+ΔM−1}×{−L..−L+ΔL−1}.
    pub fn contains_extended(&self, m: i64, l: i64) -> bool {
        let n = self.n_size as i64;
        let m = (m + self.m_half as i64).rem_euclid(n);
        let l = (l + self.l_half as i64).rem_euclid(n);
        m < self.dm as i64 && l < self.dl as i64
    }
}

/// Signed representative of `x mod n` in (−n/2, n/2].
fn centered_residue(x: i64, n: i64) -> i64 {
    let r = x.rem_euclid(n);
    if r > n / 2 {
        r - n
    } else {
        r
    }
}

/// Builds the [`LagSupport`] for grid length `n` and half-widths `m_half`,
/// `l_half`, rejecting half-widths of ⌊N/2⌋ or more.
pub fn make_lag_support(n: usize, m_half: usize, l_half: usize) -> Result<LagSupport, GridError> {
    if n < 2 {
        return Err(GridError::InvalidSize(format!("N={n} < 2")));
    }
    if m_half >= n / 2 || l_half >= n / 2 {
        return Err(GridError::InvalidSupport(format!(
            "half-widths (M={m_half}, L={l_half}) must be below ⌊N/2⌋ = {}",
            n / 2
        )));
    }
    let dm = smallest_divisor_at_least(n, 2 * m_half + 1);
    let dl = smallest_divisor_at_least(n, 2 * l_half + 1);
    Ok(LagSupport {
        n_size: n,
        m_half,
        l_half,
        dm,
        dl,
        dn: n / dl,
        dk: n / dm,
        s: (2 * m_half + 1) * (2 * l_half + 1),
        s_prime: dm * dl,
    })
}

fn smallest_divisor_at_least(n: usize, lo: usize) -> usize {
    (lo..=n).find(|d| n % d == 0).expect("n divides n")
}

/// Unit root helper: `e^{j·2π·num/den}`.
pub(crate) fn cis_frac(num: f64, den: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * num / den)
}

/// Forward symplectic 2D DFT:
/// `out[n,k] = (1/N) Σ_{m,l} in[m,l] e^{−j2π(km−nl)/N}`.
///
/// Maps lag-domain objects (ambiguity functions) to time-frequency-domain
/// objects (Rihaczek distributions/spectra). With the 1/N scale the transform
/// is unitary, and [`symplectic_idft`] is its exact inverse.
pub fn symplectic_dft(eaf_like: &TfMatrix) -> TfMatrix {
    let n = eaf_like.n();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    // Stage 1: G[k,l] = Σ_m in[m,l] e^{−j2πkm/N}  (forward FFT down columns).
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for l in 0..n {
        for m in 0..n {
            col[m] = eaf_like.data[m * n + l];
        }
        fwd.process(&mut col);
        for k in 0..n {
            g[k * n + l] = col[k];
        }
    }
    // Stage 2: out[n',k] = (1/N) Σ_l G[k,l] e^{+j2πn'l/N}  (unscaled inverse
    // FFT along rows of G).
    let mut out = TfMatrix::zeros(n);
    let scale = 1.0 / n as f64;
    for k in 0..n {
        col.copy_from_slice(&g[k * n..(k + 1) * n]);
        inv.process(&mut col);
        for nn in 0..n {
            out.data[nn * n + k] = col[nn] * scale;
        }
    }
    out
}

/// Inverse symplectic 2D DFT:
/// `out[m,l] = (1/N) Σ_{n,k} in[n,k] e^{+j2π(mk−ln)/N}`.
///
/// Exact inverse of [`symplectic_dft`] (the sign flip relative to the forward
/// exponent, together with the 1/N scale, makes the pair unitary).
pub fn symplectic_idft(rs_like: &TfMatrix) -> TfMatrix {
    let n = rs_like.n();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    // Stage 1: G[n',m] = Σ_k in[n',k] e^{+j2πmk/N}  (unscaled inverse FFT
    // along rows).
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for nn in 0..n {
        buf.copy_from_slice(&rs_like.data[nn * n..(nn + 1) * n]);
        inv.process(&mut buf);
        g[nn * n..(nn + 1) * n].copy_from_slice(&buf);
    }
    // Stage 2: out[m,l] = (1/N) Σ_n' G[n',m] e^{−j2πln'/N}  (forward FFT down
    // columns of G).
    let mut out = TfMatrix::zeros(n);
    let scale = 1.0 / n as f64;
    for m in 0..n {
        for nn in 0..n {
            buf[nn] = g[nn * n + m];
        }
        fwd.process(&mut buf);
        for l in 0..n {
            out.data[m * n + l] = buf[l] * scale;
        }
    }
    out
}
