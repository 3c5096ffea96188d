//! Uniformly sampled signals and their CSV representation.

use std::fmt::Debug;
use std::io::{Read, Write};
use std::ops::{Add, AddAssign, Mul, Sub};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Scalar types a [`TimeSeries`] can carry.
pub trait Sample:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    /// CSV header columns following `t`.
    const COLUMNS: &'static [&'static str];

    fn is_finite(&self) -> bool;
    fn modulus(&self) -> f64;
    fn to_complex(self) -> Complex64;
    fn from_complex(z: Complex64) -> Self;
    fn fields(&self) -> Vec<f64>;
    fn from_fields(fields: &[f64]) -> Self;
}

impl Sample for f64 {
    const COLUMNS: &'static [&'static str] = &["value"];

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    /// Keeps the real part.
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn fields(&self) -> Vec<f64> {
        vec![*self]
    }
    fn from_fields(fields: &[f64]) -> Self {
        fields[0]
    }
}

impl Sample for Complex64 {
    const COLUMNS: &'static [&'static str] = &["re", "im"];

    fn is_finite(&self) -> bool {
        Complex64::is_finite(*self)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn fields(&self) -> Vec<f64> {
        vec![self.re, self.im]
    }
    fn from_fields(fields: &[f64]) -> Self {
        Complex64::new(fields[0], fields[1])
    }
}

/// A signal sampled at `t0 + n dt`, `n = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T = f64> {
    samples: Vec<T>,
    dt: f64,
    t0: f64,
}

impl<T: Sample> TimeSeries<T> {
    /// Validates `N >= 2`, `dt > 0` and finite samples.
    pub fn new(samples: Vec<T>, dt: f64) -> Result<Self> {
        Self::with_origin(samples, dt, 0.0)
    }

    pub fn with_origin(samples: Vec<T>, dt: f64, t0: f64) -> Result<Self> {
        if samples.len() < 2 {
            return invalid(format!("time series needs at least 2 samples, got {}", samples.len()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        if !t0.is_finite() {
            return invalid("time origin must be finite");
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return invalid(format!("sample {i} is not finite"));
        }
        Ok(Self { samples, dt, t0 })
    }

    /// Samples `f(t0 + n dt)` for `n = 0..n`.
    pub fn from_fn(n: usize, dt: f64, t0: f64, f: impl Fn(f64) -> T) -> Result<Self> {
        let samples = (0..n).map(|i| f(t0 + i as f64 * dt)).collect();
        Self::with_origin(samples, dt, t0)
    }

    pub fn zeros(n: usize, dt: f64) -> Result<Self> {
        Self::new(vec![T::default(); n], dt)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a series holds at least two samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Record length `N dt`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |n| self.time(n))
    }

    /// Same grid, new samples. Panics if the lengths differ.
    pub fn with_samples<U: Sample>(&self, samples: Vec<U>) -> TimeSeries<U> {
        assert_eq!(samples.len(), self.samples.len(), "sample count mismatch");
        TimeSeries { samples, dt: self.dt, t0: self.t0 }
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> TimeSeries<U> {
        self.with_samples(self.samples.iter().map(|&s| f(s)).collect())
    }

    pub fn to_complex(&self) -> TimeSeries<Complex64> {
        self.map(Sample::to_complex)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(Sample::modulus).fold(0.0, f64::max)
    }

    /// `sqrt(dt * sum |x_n|^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.dt * self.samples.iter().map(|s| s.modulus().powi(2)).sum::<f64>()).sqrt()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t"];
        header.extend_from_slice(T::COLUMNS);
        w.write_record(&header)?;
        for (n, s) in self.samples.iter().enumerate() {
            let mut row = vec![format_f64(self.time(n))];
            row.extend(s.fields().into_iter().map(format_f64));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a `t,value` or `t,re,im` table. The sample spacing is taken
    /// from the first two rows and must be uniform.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        let expected: Vec<&str> = std::iter::once("t").chain(T::COLUMNS.iter().copied()).collect();
        let got: Vec<&str> = headers.iter().map(str::trim).collect();
        if got != expected {
            return invalid(format!("expected CSV header {expected:?}, got {got:?}"));
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let fields = record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::InvalidArgument(format!("row {}: {e}", line + 2)))?;
            if fields.len() != expected.len() {
                return invalid(format!("row {} has {} fields", line + 2, fields.len()));
            }
            times.push(fields[0]);
            samples.push(T::from_fields(&fields[1..]));
        }
        if times.len() < 2 {
            return invalid("CSV must contain at least two samples");
        }
        let dt = times[1] - times[0];
        for (n, &t) in times.iter().enumerate() {
            let expected_t = times[0] + n as f64 * dt;
            if (t - expected_t).abs() > 1e-9 * dt.abs().max(1e-300) + 1e-12 * expected_t.abs() {
                return invalid(format!("non-uniform sampling at row {}", n + 2));
            }
        }
        Self::with_origin(samples, dt, times[0])
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Maximum modulus of the pointwise difference over the index range.
pub fn max_abs_diff<T: Sample>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).modulus())
        .fold(0.0, f64::max)
}

/// Root-mean-square of the pointwise difference.
pub fn rms_diff<T: Sample>(a: &[T], b: &[T]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    let ss: f64 = a.iter().zip(b).map(|(&x, &y)| (x - y).modulus().powi(2)).sum();
    (ss / n as f64).sqrt()
}
