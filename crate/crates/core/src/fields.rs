//! Radial data profiles and lattice functions of (r, t).

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::output::fmt_f64;
use crate::sphmeans::RadialFunction;

/// Highest radial derivative every profile family provides.
pub const MAX_DERIVATIVE: usize = 4;

const SMOOTH_POWER: i32 = 6;
const ANNULAR_POWER: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFamily {
    Zero,
    /// `A (1 - (r/k)²)^6` on `[0, k)`.
    SmoothBump,
    /// `A [4 (r² - k0²)(k² - r²) / (k² - k0²)²]^5` on `(k0, k)`; peaks at `A`.
    AnnularBump,
}

impl FromStr for ProfileFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(ProfileFamily::Zero),
            "smooth_bump" => Ok(ProfileFamily::SmoothBump),
            "annular_bump" => Ok(ProfileFamily::AnnularBump),
            other => Err(Error::invalid(format!("unknown profile family '{other}'"))),
        }
    }
}

impl fmt::Display for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileFamily::Zero => "zero",
            ProfileFamily::SmoothBump => "smooth_bump",
            ProfileFamily::AnnularBump => "annular_bump",
        })
    }
}

/// Compactly supported radial profile with four continuous derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    family: ProfileFamily,
    k: f64,
    k0: f64,
    amplitude: f64,
}

pub fn make_profile(family: ProfileFamily, k: f64, k0: f64, amplitude: f64) -> Result<RadialProfile> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("support radius k must be positive, got {k}")));
    }
    if !(k0 >= 0.0 && k0 < k) {
        return Err(Error::invalid(format!("inner radius must satisfy 0 <= k0 < k, got k0={k0}, k={k}")));
    }
    if !amplitude.is_finite() {
        return Err(Error::invalid("amplitude must be finite"));
    }
    Ok(RadialProfile { family, k, k0, amplitude })
}

impl RadialProfile {
    pub fn zero() -> Self {
        RadialProfile { family: ProfileFamily::Zero, k: 1.0, k0: 0.0, amplitude: 0.0 }
    }

    pub fn family(&self) -> ProfileFamily {
        self.family
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn is_zero(&self) -> bool {
        self.family == ProfileFamily::Zero || self.amplitude == 0.0
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        RadialProfile { amplitude, ..self }
    }

    /// The `deriv`-th radial derivative at `r`.
    pub fn eval(&self, r: f64, deriv: usize) -> Result<f64> {
        if deriv > MAX_DERIVATIVE {
            return Err(Error::invalid(format!("derivative order {deriv} exceeds {MAX_DERIVATIVE}")));
        }
        Ok(self.derivatives(r)[deriv])
    }

    /// Value and first four derivatives.
    pub fn derivatives(&self, r: f64) -> [f64; 5] {
        let r = r.abs();
        match self.family {
            ProfileFamily::Zero => [0.0; 5],
            ProfileFamily::SmoothBump => {
                if r >= self.k {
                    return [0.0; 5];
                }
                let k2 = self.k * self.k;
                let q = [1.0 - r * r / k2, -2.0 * r / k2, -2.0 / k2, 0.0, 0.0];
                scale(power_derivatives(q, SMOOTH_POWER), self.amplitude)
            }
            ProfileFamily::AnnularBump => {
                if r <= self.k0 || r >= self.k {
                    return [0.0; 5];
                }
                let (k2, j2) = (self.k * self.k, self.k0 * self.k0);
                let c = 4.0 / ((k2 - j2) * (k2 - j2));
                let s = k2 + j2;
                let r2 = r * r;
                let q = [
                    c * (r2 - j2) * (k2 - r2),
                    c * (-4.0 * r2 * r + 2.0 * s * r),
                    c * (-12.0 * r2 + 2.0 * s),
                    c * (-24.0 * r),
                    c * -24.0,
                ];
                scale(power_derivatives(q, ANNULAR_POWER), self.amplitude)
            }
        }
    }

    /// `b'' + (n-1) b'/r`, with the `r = 0` limit `n b''(0)`.
    pub fn laplacian(&self, r: f64, n: u32) -> f64 {
        let d = self.derivatives(r);
        if r == 0.0 {
            n as f64 * d[2]
        } else {
            d[2] + (n as f64 - 1.0) * d[1] / r
        }
    }
}

pub fn eval_profile(p: &RadialProfile, r: f64, deriv: usize) -> Result<f64> {
    p.eval(r, deriv)
}

fn scale(mut d: [f64; 5], a: f64) -> [f64; 5] {
    for x in d.iter_mut() {
        *x *= a;
    }
    d
}

/// Derivatives of `q(r)^m` from those of `q` (Faà di Bruno up to order 4).
fn power_derivatives(q: [f64; 5], m: i32) -> [f64; 5] {
    let p = |j: i32| -> f64 {
        if j > m {
            return 0.0;
        }
        let mut c = 1.0;
        for i in 0..j {
            c *= (m - i) as f64;
        }
        c * q[0].powi(m - j)
    };
    let [_, q1, q2, q3, q4] = q;
    [
        p(0),
        p(1) * q1,
        p(2) * q1 * q1 + p(1) * q2,
        p(3) * q1.powi(3) + 3.0 * p(2) * q1 * q2 + p(1) * q3,
        p(4) * q1.powi(4) + 6.0 * p(3) * q1 * q1 * q2 + p(2) * (3.0 * q2 * q2 + 4.0 * q1 * q3) + p(1) * q4,
    ]
}

impl RadialFunction for RadialProfile {
    fn value(&self, r: f64) -> f64 {
        self.derivatives(r)[0]
    }

    fn first_two_derivatives(&self, r: f64) -> Option<(f64, f64)> {
        let d = self.derivatives(r);
        Some((d[1], d[2]))
    }

    fn support(&self) -> (f64, f64) {
        match self.family {
            ProfileFamily::Zero => (0.0, 0.0),
            ProfileFamily::SmoothBump => (0.0, self.k),
            ProfileFamily::AnnularBump => (self.k0, self.k),
        }
    }
}

/// The radial Laplacian of a profile, as a function that can be averaged.
pub struct ProfileLaplacian<'a> {
    pub profile: &'a RadialProfile,
    pub n: u32,
}

impl RadialFunction for ProfileLaplacian<'_> {
    fn value(&self, r: f64) -> f64 {
        self.profile.laplacian(r, self.n)
    }

    fn support(&self) -> (f64, f64) {
        self.profile.support()
    }
}

/// Cell-centred space-time lattice: `r_i = (i + 1/2) dr`, `t_j = j dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub dr: f64,
    pub dt: f64,
    pub r_max: f64,
    pub t_max: f64,
}

impl Lattice {
    pub fn new(dr: f64, dt: f64, r_max: f64, t_max: f64) -> Result<Self> {
        for (name, v) in [("dr", dr), ("dt", dt), ("r_max", r_max), ("t_max", t_max)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("lattice {name} must be positive, got {v}")));
            }
        }
        if dt > dr * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("lattice needs dt <= dr (dt={dt}, dr={dr})")));
        }
        if r_max < 0.5 * dr {
            return Err(Error::invalid("r_max smaller than the first cell centre"));
        }
        Ok(Lattice { dr, dt, r_max, t_max })
    }

    /// Lattice reaching `t_max` whose radial extent keeps a support of radius
    /// `t + k` inside, with a two-cell margin.
    pub fn for_support(dr: f64, dt: f64, t_max: f64, k: f64) -> Result<Self> {
        Lattice::new(dr, dt, t_max + k + 2.0 * dr, t_max)
    }

    pub fn check_support(&self, k: f64) -> Result<()> {
        if self.r_max < self.t_max + k {
            return Err(Error::invalid(format!(
                "r_max={} does not cover t_max + k = {}",
                self.r_max,
                self.t_max + k
            )));
        }
        Ok(())
    }

    pub fn nr(&self) -> usize {
        ((self.r_max / self.dr - 0.5 + 1e-9).floor() as usize) + 1
    }

    pub fn nt(&self) -> usize {
        ((self.t_max / self.dt + 1e-9).floor() as usize) + 1
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// Same spacing, longer horizon.
    pub fn extended(&self, t_max: f64, k: Option<f64>) -> Lattice {
        let r_max = match k {
            Some(k) => self.r_max.max(t_max + k + 2.0 * self.dr),
            None => self.r_max,
        };
        Lattice { r_max, t_max, ..*self }
    }

    pub fn refined(&self) -> Lattice {
        Lattice { dr: 0.5 * self.dr, dt: 0.5 * self.dt, ..*self }
    }
}

/// Values of a radial function on the lattice, filled slice by slice.
///
/// When a support radius `k` is attached, slice `j` stores only the nodes
/// with `r_i < t_j + k + dr` and the function is taken to vanish for
/// `r > t_j + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    lattice: Lattice,
    support: Option<f64>,
    slices: Vec<Vec<f64>>,
}

impl SpaceTimeField {
    pub fn new(lattice: Lattice, support: Option<f64>) -> Self {
        SpaceTimeField { lattice, support, slices: Vec::new() }
    }

    /// Samples `f(r, t)` on every slice.
    pub fn from_fn(lattice: Lattice, support: Option<f64>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = SpaceTimeField::new(lattice, support);
        for j in 0..lattice.nt() {
            let t = lattice.t(j);
            let values = (0..field.slice_len(j)).map(|i| f(lattice.r(i), t)).collect();
            field.slices.push(values);
        }
        if let Some(k) = support {
            field.zero_outside(k);
        }
        field
    }

    fn zero_outside(&mut self, k: f64) {
        let lat = self.lattice;
        for (j, s) in self.slices.iter_mut().enumerate() {
            let cut = lat.t(j) + k;
            for (i, v) in s.iter_mut().enumerate() {
                if lat.r(i) > cut {
                    *v = 0.0;
                }
            }
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn support(&self) -> Option<f64> {
        self.support
    }

    /// Number of stored nodes on slice `j`.
    pub fn slice_len(&self, j: usize) -> usize {
        let nr = self.lattice.nr();
        match self.support {
            Some(k) => {
                let reach = (self.lattice.t(j) + k) / self.lattice.dr + 0.5;
                ((reach.floor() as usize) + 1).min(nr)
            }
            None => nr,
        }
    }

    /// Index of the last completed slice.
    pub fn filled_up_to(&self) -> Option<usize> {
        self.slices.len().checked_sub(1)
    }

    pub fn n_filled(&self) -> usize {
        self.slices.len()
    }

    pub fn push_slice(&mut self, values: Vec<f64>) -> Result<()> {
        let j = self.slices.len();
        if j >= self.lattice.nt() {
            return Err(Error::invalid(format!("lattice holds only {} slices", self.lattice.nt())));
        }
        let len = self.slice_len(j);
        if values.len() != len {
            return Err(Error::invalid(format!("slice {j} needs {len} values, got {}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at node {i} of slice {j}")));
        }
        self.slices.push(values);
        Ok(())
    }

    /// Drops slices above `last`.
    pub fn truncate(&mut self, n_slices: usize) {
        self.slices.truncate(n_slices);
    }

    /// Moves the field onto a lattice with the same spacing and a longer horizon.
    pub fn extend_lattice(&mut self, lattice: Lattice) -> Result<()> {
        if lattice.dr != self.lattice.dr || lattice.dt != self.lattice.dt || lattice.t_max < self.lattice.t_max {
            return Err(Error::invalid("extension must keep the spacing and not shorten the horizon"));
        }
        let old = std::mem::replace(&mut self.lattice, lattice);
        if self.support.is_none() && lattice.nr() != old.nr() {
            for s in self.slices.iter_mut() {
                s.resize(lattice.nr(), 0.0);
            }
        }
        Ok(())
    }

    pub fn slice(&self, j: usize) -> &[f64] {
        &self.slices[j]
    }

    pub fn slices(&self) -> &[Vec<f64>] {
        &self.slices
    }

    /// Stored value, 0 beyond the stored part of the slice.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slices[j].get(i).copied().unwrap_or(0.0)
    }

    /// Largest radius at which slice `j` can be nonzero.
    pub fn cutoff(&self, j: usize) -> f64 {
        match self.support {
            Some(k) => self.lattice.t(j) + k,
            None => f64::INFINITY,
        }
    }

    /// Piecewise-linear interpolant of slice `j` in `r`; constant on
    /// `[0, r_0]` (even reflection) and zero past the support cutoff.
    pub fn interp_r(&self, j: usize, r: f64) -> f64 {
        let r = r.abs();
        if r > self.cutoff(j) {
            return 0.0;
        }
        let s = &self.slices[j];
        let x = r / self.lattice.dr - 0.5;
        if x <= 0.0 {
            return s.first().copied().unwrap_or(0.0);
        }
        let i = x.floor() as usize;
        let w = x - i as f64;
        match (s.get(i), s.get(i + 1)) {
            (Some(&a), Some(&b)) => a * (1.0 - w) + b * w,
            // past the last stored node the interpolant falls linearly to 0
            (Some(&a), None) => a * (1.0 - w),
            _ => 0.0,
        }
    }

    /// Bilinear interpolation in `(r, t)`.
    pub fn bilinear(&self, r: f64, t: f64) -> Result<f64> {
        let lat = &self.lattice;
        let y = t / lat.dt;
        if y < -1e-12 {
            return Err(Error::invalid(format!("negative time {t}")));
        }
        let j = (y.floor().max(0.0)) as usize;
        let w = (y - j as f64).clamp(0.0, 1.0);
        let filled = self.filled_up_to();
        let top = if w > 1e-12 { j + 1 } else { j };
        if filled.is_none_or(|f| top > f) {
            return Err(Error::NotFilled { needed: top, filled });
        }
        let lo = self.interp_r(j, r);
        if top == j {
            return Ok(lo);
        }
        Ok(lo * (1.0 - w) + self.interp_r(j + 1, r) * w)
    }

    /// Pointwise image under `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpaceTimeField {
        SpaceTimeField {
            lattice: self.lattice,
            support: self.support,
            slices: self.slices.iter().map(|s| s.iter().map(|&v| f(v)).collect()).collect(),
        }
    }

    /// Pointwise combination with a field on the same lattice.
    pub fn zip_with(&self, other: &SpaceTimeField, f: impl Fn(f64, f64) -> f64) -> Result<SpaceTimeField> {
        if self.lattice != other.lattice {
            return Err(Error::invalid("fields live on different lattices"));
        }
        let n = self.slices.len().min(other.slices.len());
        let support = match (self.support, other.support) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let mut out = SpaceTimeField::new(self.lattice, support);
        for j in 0..n {
            let len = out.slice_len(j);
            out.slices.push((0..len).map(|i| f(self.get(i, j), other.get(i, j))).collect());
        }
        Ok(out)
    }

    pub fn max_abs_slice(&self, j: usize) -> f64 {
        self.slices[j].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Writes `r,t,value` rows for every stored node.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        self.write_csv_to(&mut out)?;
        crate::output::write_atomic(path, &out)
    }

    pub fn write_csv_to<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "r,t,value")?;
        for (j, s) in self.slices.iter().enumerate() {
            let t = self.lattice.t(j);
            for (i, v) in s.iter().enumerate() {
                writeln!(w, "{},{},{}", fmt_f64(self.lattice.r(i)), fmt_f64(t), fmt_f64(*v))?;
            }
        }
        Ok(())
    }
}
