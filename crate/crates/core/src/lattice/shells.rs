//! Shell counts `r_d(n) = #{m in Z^d : |m|^2 = n}` and per-shell weights
//! `E(n, x) = sum_{|m|^2 = n} e^{2 pi i m.x}`.
//!
//! Both are d-fold convolutions of one-dimensional sequences supported on
//! the squares: `1` at `k = 0` and `2 cos(2 pi k x_i)` at `k^2` for `k > 0`.

use crate::error::{domain, Error, Result};
use crate::radial::rational_point;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Largest shell index strictly below `s`, or `None` when `s <= 0`.
pub fn last_shell_below(s: f64) -> Option<u64> {
    if !(s > 0.0) {
        return None;
    }
    Some(s.ceil() as u64 - 1)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Exact counts `r_d(n)` for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellTable {
    pub d: usize,
    pub n_max: u64,
    pub counts: Vec<u64>,
}

fn overflow(d: usize, n: u64) -> Error {
    Error::Overflow(format!("shell count r_{d}({n}) exceeds 64 bits"))
}

/// `d`-fold convolution with `r_1`, in exact arithmetic.
pub fn build_shell_table(d: usize, n_max: u64) -> Result<ShellTable> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    let len = usize::try_from(n_max + 1).map_err(|_| Error::Resource("shell table too large".into()))?;
    let root = isqrt(n_max);
    let mut g = vec![0u64; len];
    g[0] = 1;
    for k in 1..=root {
        g[(k * k) as usize] = 2;
    }
    for dim in 2..=d {
        let mut h = vec![0u64; len];
        let nonzero: Vec<usize> = (0..len).filter(|&n| g[n] != 0).collect();
        if nonzero.len() * 16 <= len {
            for &n in &nonzero {
                let gn = g[n];
                for k in 0..=isqrt(n_max - n as u64) {
                    let w = if k == 0 { gn } else { gn.checked_mul(2).ok_or_else(|| overflow(dim, n as u64))? };
                    let idx = n + (k * k) as usize;
                    h[idx] = h[idx].checked_add(w).ok_or_else(|| overflow(dim, idx as u64))?;
                }
            }
        } else {
            for k in 0..=root {
                let off = (k * k) as usize;
                let w = if k == 0 { 1 } else { 2 };
                for n in 0..len - off {
                    let v = g[n].checked_mul(w).ok_or_else(|| overflow(dim, n as u64))?;
                    h[n + off] = h[n + off].checked_add(v).ok_or_else(|| overflow(dim, (n + off) as u64))?;
                }
            }
        }
        g = h;
    }
    Ok(ShellTable { d, n_max, counts: g })
}

impl ShellTable {
    /// `#{m : |m|^2 < s}`.
    pub fn count_below(&self, s: f64) -> Result<u64> {
        match last_shell_below(s) {
            None => Ok(0),
            Some(n) if n > self.n_max => domain(format!("shell table ends at {}, need {n}", self.n_max)),
            Some(n) => self.counts[..=n as usize]
                .iter()
                .try_fold(0u64, |acc, &c| acc.checked_add(c))
                .ok_or_else(|| Error::Overflow("lattice point count exceeds 64 bits".into())),
        }
    }
}

const CACHE_MAGIC: &[u8; 8] = b"LFSHELL\0";
const CACHE_VERSION: u32 = 1;

/// On-disk cache of shell tables keyed by `(d, n_max)`.
#[derive(Debug, Clone)]
pub struct ShellCache {
    dir: PathBuf,
}

impl ShellCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, d: usize, n_max: u64) -> PathBuf {
        self.dir.join(format!("shells_v{CACHE_VERSION}_d{d}_n{n_max}.bin"))
    }

    /// Loads the table if a valid cache file exists, otherwise builds and stores it.
    pub fn load_or_build(&self, d: usize, n_max: u64) -> Result<ShellTable> {
        let path = self.path_for(d, n_max);
        if let Ok(t) = read_table(&path) {
            if t.d == d && t.n_max == n_max {
                return Ok(t);
            }
        }
        let t = build_shell_table(d, n_max)?;
        std::fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        write_table(&tmp, &t)?;
        std::fs::rename(&tmp, &path)?;
        Ok(t)
    }
}

pub fn write_table(path: &Path, t: &ShellTable) -> Result<()> {
    let mut buf = Vec::with_capacity(24 + 8 * t.counts.len());
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    buf.extend_from_slice(&(t.d as u32).to_le_bytes());
    buf.extend_from_slice(&t.n_max.to_le_bytes());
    for &c in &t.counts {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<ShellTable> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let bad = || Error::Io(format!("malformed shell cache {}", path.display()));
    if buf.len() < 24 || &buf[..8] != CACHE_MAGIC {
        return Err(bad());
    }
    let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(bad());
    }
    let d = u32::from_le_bytes(buf[12..16].try_into().unwrap()) as usize;
    let n_max = u64::from_le_bytes(buf[16..24].try_into().unwrap());
    let body = &buf[24..];
    if body.len() as u64 != 8 * (n_max + 1) {
        return Err(bad());
    }
    let counts = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ShellTable { d, n_max, counts })
}

/// How `E(n, x)` is assembled.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum ShellMode {
    /// `x = 0`: exact shell counts.
    Origin,
    /// `x = x1 e_axis`.
    AxisSlice { axis: usize, x1: f64 },
    /// `q x in Z^d`: cosines looked up by residue class mod `q`.
    Rational { q: u32 },
    /// Any point: one cosine sequence per coordinate.
    Generic,
}

/// Default cap on the denominator of the rational mode.
pub const RATIONAL_Q_MAX: u32 = 64;

impl ShellMode {
    /// The cheapest mode that applies to `x`.
    pub fn detect(x: &[f64]) -> ShellMode {
        if x.iter().all(|&c| c == 0.0) {
            return ShellMode::Origin;
        }
        let nonzero: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
        if let Some((_, q)) = rational_point(x, RATIONAL_Q_MAX as i64) {
            return ShellMode::Rational { q: q as u32 };
        }
        if nonzero.len() == 1 {
            return ShellMode::AxisSlice { axis: nonzero[0], x1: x[nonzero[0]] };
        }
        ShellMode::Generic
    }
}

/// `E(n, x)` for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellWeights {
    pub d: usize,
    pub values: Vec<f64>,
}

fn mismatch<T>(msg: String) -> Result<T> {
    Err(Error::ModeMismatch(msg))
}

fn convolve(g: &[f64], w: &[f64]) -> Vec<f64> {
    let len = g.len();
    let mut h = vec![0.0; len];
    let nonzero: Vec<usize> = (0..len).filter(|&n| g[n] != 0.0).collect();
    if nonzero.len() * 16 <= len {
        let n_max = (len - 1) as u64;
        for &n in &nonzero {
            for k in 0..=isqrt(n_max - n as u64) as usize {
                h[n + k * k] += w[k] * g[n];
            }
        }
    } else {
        for (k, &wk) in w.iter().enumerate() {
            let off = k * k;
            if off >= len {
                break;
            }
            for n in 0..len - off {
                h[n + off] += wk * g[n];
            }
        }
    }
    h
}

impl ShellWeights {
    pub fn from_table(t: &ShellTable) -> Self {
        Self { d: t.d, values: t.counts.iter().map(|&c| c as f64).collect() }
    }

    /// Builds the weights for `x` under `mode`, checking that `mode` fits `x`.
    pub fn build(x: &[f64], n_max: u64, mode: ShellMode) -> Result<Self> {
        let d = x.len();
        if d == 0 {
            return domain("empty point");
        }
        let root = isqrt(n_max) as usize;
        let cosines = |c: f64| -> Vec<f64> {
            (0..=root)
                .map(|k| if k == 0 { 1.0 } else { 2.0 * (2.0 * PI * k as f64 * c).cos() })
                .collect()
        };
        let seqs: Vec<Vec<f64>> = match mode {
            ShellMode::Origin => {
                if x.iter().any(|&c| c != 0.0) {
                    return mismatch("origin mode needs x = 0".into());
                }
                return Ok(Self::from_table(&build_shell_table(d, n_max)?));
            }
            ShellMode::AxisSlice { axis, x1 } => {
                if axis >= d || (0..d).any(|i| if i == axis { x[i] != x1 } else { x[i] != 0.0 }) {
                    return mismatch(format!("point is not x1 e_{axis} with x1 = {x1}"));
                }
                (0..d).map(|i| cosines(if i == axis { x1 } else { 0.0 })).collect()
            }
            ShellMode::Rational { q } => {
                let q = q as i64;
                let mut nums = Vec::with_capacity(d);
                for &c in x {
                    let n = (c * q as f64).round();
                    if n / q as f64 != c {
                        return mismatch(format!("{c} is not a multiple of 1/{q}"));
                    }
                    nums.push(n as i64);
                }
                let table: Vec<f64> = (0..q).map(|r| (2.0 * PI * r as f64 / q as f64).cos()).collect();
                nums.iter()
                    .map(|&p| {
                        (0..=root)
                            .map(|k| {
                                if k == 0 {
                                    1.0
                                } else {
                                    2.0 * table[(p * k as i64).rem_euclid(q) as usize]
                                }
                            })
                            .collect()
                    })
                    .collect()
            }
            ShellMode::Generic => x.iter().map(|&c| cosines(c)).collect(),
        };
        let len = usize::try_from(n_max + 1).map_err(|_| Error::Resource("shell range too large".into()))?;
        let mut g = vec![0.0; len];
        for (k, &w) in seqs[0].iter().enumerate() {
            g[k * k] = w;
        }
        for w in &seqs[1..] {
            g = convolve(&g, w);
        }
        Ok(Self { d, values: g })
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    /// `D_alpha(s : x) = (1/Gamma(alpha+1)) sum_{n < s} E(n, x) (s - n)^alpha`.
    pub fn d_alpha(&self, alpha: f64, s: f64) -> Result<f64> {
        let Some(top) = last_shell_below(s) else {
            return Ok(0.0);
        };
        if top > self.n_max() {
            return domain(format!("weights end at shell {}, need {top}", self.n_max()));
        }
        let g = crate::special::gamma(alpha + 1.0)?;
        let acc = crate::sum::sum(
            self.values[..=top as usize]
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0.0)
                .map(|(n, &e)| e * if alpha == 0.0 { 1.0 } else { (s - n as f64).powf(alpha) }),
        );
        Ok(acc / g)
    }

    /// Running sums `C(n) = sum_{k <= n} E(k, x)`, i.e. `D_0` on `(n, n+1]`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = crate::sum::Neumaier::new();
        self.values
            .iter()
            .map(|&e| {
                acc.add(e);
                acc.value()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_counts(d: usize, n_max: u64) -> Vec<u64> {
        let r = isqrt(n_max) as i64;
        let mut counts = vec![0u64; n_max as usize + 1];
        crate::radial::for_each_in_box(&vec![-r; d], &vec![r; d], |m| {
            let n: i64 = m.iter().map(|k| k * k).sum();
            if n as u64 <= n_max {
                counts[n as usize] += 1;
            }
        });
        counts
    }

    #[test]
    fn examples() {
        assert_eq!(build_shell_table(2, 10).unwrap().counts[1], 4);
        assert_eq!(build_shell_table(2, 10).unwrap().counts[5], 8);
        assert_eq!(build_shell_table(4, 10).unwrap().counts[1], 8);
        assert_eq!(build_shell_table(3, 0).unwrap().counts, vec![1]);
    }

    #[test]
    fn convolution_matches_enumeration() {
        for d in 1..=4 {
            let n = [400, 300, 120, 60][d - 1];
            assert_eq!(build_shell_table(d, n).unwrap().counts, brute_counts(d, n), "d={d}");
        }
    }

    #[test]
    fn overflow_is_detected() {
        // r_40(n) grows past 2^64 quickly
        assert!(matches!(build_shell_table(40, 400), Err(Error::Overflow(_))));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ShellCache::new(dir.path());
        let a = cache.load_or_build(3, 500).unwrap();
        assert!(cache.path_for(3, 500).exists());
        let b = cache.load_or_build(3, 500).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, build_shell_table(3, 500).unwrap());
        std::fs::write(cache.path_for(2, 7), b"junk").unwrap();
        assert_eq!(cache.load_or_build(2, 7).unwrap(), build_shell_table(2, 7).unwrap());
    }

    #[test]
    fn modes_agree() {
        let x = [0.3, 0.0, 0.0];
        let a = ShellWeights::build(&x, 200, ShellMode::AxisSlice { axis: 0, x1: 0.3 }).unwrap();
        let b = ShellWeights::build(&x, 200, ShellMode::Rational { q: 10 }).unwrap();
        let c = ShellWeights::build(&x, 200, ShellMode::Generic).unwrap();
        for n in 0..=200 {
            assert!((a.values[n] - b.values[n]).abs() < 1e-11);
            assert!((a.values[n] - c.values[n]).abs() < 1e-11);
        }
        let o = ShellWeights::build(&[0.0; 3], 200, ShellMode::Generic).unwrap();
        let t = ShellWeights::from_table(&build_shell_table(3, 200).unwrap());
        assert_eq!(o, t);
        assert!(ShellWeights::build(&[0.3, 0.1], 10, ShellMode::AxisSlice { axis: 0, x1: 0.3 }).is_err());
        assert!(ShellWeights::build(&[0.3, 0.1], 10, ShellMode::Rational { q: 7 }).is_err());
        assert!(ShellWeights::build(&[0.3, 0.1], 10, ShellMode::Origin).is_err());
    }

    #[test]
    fn mode_detection() {
        assert_eq!(ShellMode::detect(&[0.0, 0.0]), ShellMode::Origin);
        assert_eq!(ShellMode::detect(&[0.3, 0.1]), ShellMode::Rational { q: 10 });
        let s = 2f64.sqrt() - 1.0;
        assert_eq!(ShellMode::detect(&[0.0, s]), ShellMode::AxisSlice { axis: 1, x1: s });
        assert_eq!(ShellMode::detect(&[s, s]), ShellMode::Generic);
    }

    #[test]
    fn strict_shell_cutoff() {
        assert_eq!(last_shell_below(0.0), None);
        assert_eq!(last_shell_below(0.5), Some(0));
        assert_eq!(last_shell_below(2.0), Some(1));
        assert_eq!(last_shell_below(2.0000001), Some(2));
    }
}
