//! Flag value parsers.

use std::path::PathBuf;

/// An integer, or `b^e` evaluated exactly.
pub fn count(s: &str) -> Result<u64, String> {
    match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base
                .trim()
                .parse()
                .map_err(|e| format!("bad base in {s:?}: {e}"))?;
            let exp: u32 = exp
                .trim()
                .parse()
                .map_err(|e| format!("bad exponent in {s:?}: {e}"))?;
            base.checked_pow(exp)
                .ok_or_else(|| format!("{s} overflows u64"))
        }
        None => s
            .trim()
            .parse()
            .map_err(|e| format!("bad integer {s:?}: {e}")),
    }
}

/// Sizes listed by a range flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<u64>);

/// `b^lo:b^hi` expands to every power of `b` in between; `lo:hi` with plain
/// integers expands to every integer.
pub fn count_range(s: &str) -> Result<Sizes, String> {
    expand_range(s).map(Sizes)
}

fn expand_range(s: &str) -> Result<Vec<u64>, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let powers = |t: &str| -> Option<(u64, u32)> {
        let (b, e) = t.split_once('^')?;
        Some((b.trim().parse().ok()?, e.trim().parse().ok()?))
    };
    match (powers(lo), powers(hi)) {
        (Some((b1, e1)), Some((b2, e2))) => {
            if b1 != b2 || b1 < 2 {
                return Err(format!("range {s:?} needs one base of at least 2"));
            }
            if e1 > e2 {
                return Err(format!("empty range {s:?}"));
            }
            (e1..=e2)
                .map(|e| {
                    b1.checked_pow(e)
                        .ok_or_else(|| format!("{b1}^{e} overflows u64"))
                })
                .collect()
        }
        (None, None) => {
            let (a, b) = (count(lo)?, count(hi)?);
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            if b - a > 1_000_000 {
                return Err(format!("range {s:?} is too long"));
            }
            Ok((a..=b).collect())
        }
        _ => Err(format!("range {s:?} mixes powers and plain integers")),
    }
}

/// `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

pub fn grid(s: &str) -> Result<Grid, String> {
    let parts = floats(s, 3)?;
    Ok(Grid {
        start: parts[0],
        stop: parts[1],
        step: parts[2],
    })
}

/// `a:b:points`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Span {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect()
    }
}

pub fn span(s: &str) -> Result<Span, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:points, got {s:?}"));
    }
    let start = number(parts[0])?;
    let stop = number(parts[1])?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| format!("bad point count in {s:?}: {e}"))?;
    if points == 0 {
        return Err("point count must be positive".into());
    }
    Ok(Span {
        start,
        stop,
        points,
    })
}

fn floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != n {
        return Err(format!("expected {n} colon-separated numbers, got {s:?}"));
    }
    parts.into_iter().map(number).collect()
}

/// A float, or `a/b` with both sides floats.
pub fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (number(a)?, number(b)?);
        return Ok(a / b);
    }
    s.parse().map_err(|e| format!("bad number {s:?}: {e}"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum GammaSpec {
    Critical,
    /// Literal value.
    Constant(f64),
    /// `const:1/N`, resolved once `N` is known.
    InverseN,
    File(PathBuf),
}

pub fn gamma(s: &str) -> Result<GammaSpec, String> {
    if s == "critical" {
        return Ok(GammaSpec::Critical);
    }
    if let Some(v) = s.strip_prefix("const:") {
        if v.trim() == "1/N" {
            return Ok(GammaSpec::InverseN);
        }
        return number(v).map(GammaSpec::Constant);
    }
    if let Some(path) = s.strip_prefix("file:") {
        if path.is_empty() {
            return Err("file: needs a path".into());
        }
        return Ok(GammaSpec::File(PathBuf::from(path)));
    }
    Err(format!(
        "expected critical, const:<v>, const:1/N or file:<path>, got {s:?}"
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TEnd {
    Auto,
    At(f64),
}

pub fn t_end(s: &str) -> Result<TEnd, String> {
    if s == "auto" {
        return Ok(TEnd::Auto);
    }
    let v = number(s)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("t-end must be positive, got {v}"));
    }
    Ok(TEnd::At(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(count("1024"), Ok(1024));
        assert_eq!(count("2^40"), Ok(1 << 40));
        assert_eq!(count("3^4"), Ok(81));
        assert!(count("2^64").is_err());
        assert!(count("2^x").is_err());
        assert!(count("-3").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(count_range("2^3:2^5"), Ok(Sizes(vec![8, 16, 32])));
        assert_eq!(count_range("4:7"), Ok(Sizes(vec![4, 5, 6, 7])));
        assert!(count_range("2^3:3^5").is_err());
        assert!(count_range("2^5:2^3").is_err());
        assert!(count_range("2^3:40").is_err());
    }

    #[test]
    fn grids_and_spans() {
        assert_eq!(
            grid("-1:0:0.01"),
            Ok(Grid {
                start: -1.0,
                stop: 0.0,
                step: 0.01
            })
        );
        assert!(grid("-1:0").is_err());
        let sp = span("0.0005:0.0015:5").unwrap();
        let v = sp.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.0005);
        assert_eq!(v[4], 0.0015);
        assert!(span("0:1:0").is_err());
    }

    #[test]
    fn gamma_specs() {
        assert_eq!(gamma("critical"), Ok(GammaSpec::Critical));
        assert_eq!(
            gamma("const:0.0009765625"),
            Ok(GammaSpec::Constant(0.0009765625))
        );
        assert_eq!(gamma("const:1/1024"), Ok(GammaSpec::Constant(1.0 / 1024.0)));
        assert_eq!(gamma("const:1/N"), Ok(GammaSpec::InverseN));
        assert_eq!(gamma("file:s.csv"), Ok(GammaSpec::File("s.csv".into())));
        assert!(gamma("linear").is_err());
        assert!(gamma("const:abc").is_err());
    }

    #[test]
    fn t_ends() {
        assert_eq!(t_end("auto"), Ok(TEnd::Auto));
        assert_eq!(t_end("12.5"), Ok(TEnd::At(12.5)));
        assert!(t_end("0").is_err());
        assert!(t_end("-1").is_err());
    }
}
