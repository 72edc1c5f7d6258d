use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, IDENTITY_TOL};

/// Closed-form continuation of a [`DecreasingSeq`] beyond its stored prefix.
///
/// Terms are 1-based: `Geometric` gives `omega^(n-1)`, `Power` gives
/// `n^(-lambda)`, `LogInverse` gives `1 / log2(n + 1)`. `Explicit` marks a
/// prefix of some non-increasing sequence whose continuation is not known;
/// the only tail information is the monotone bound by the last stored term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Geometric { omega: f64 },
    Power { lambda: f64 },
    LogInverse,
    Explicit,
}

/// Integer power used for every `omega^k` in the crate, so that band
/// thresholds and geometric terms round identically.
pub fn pow_int(base: f64, exp: u64) -> f64 {
    if exp <= i32::MAX as u64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp as f64)
    }
}

/// Counts beyond this are reported from the closed form without exact search.
const EXACT_COUNT_LIMIT: f64 = (1u64 << 50) as f64;

impl Generator {
    fn validate(&self) -> Result<()> {
        match *self {
            Generator::Geometric { omega } if !(omega > 0.0 && omega < 1.0) => Err(
                Error::InvalidSequence(format!("geometric ratio {omega} outside (0,1)")),
            ),
            Generator::Power { lambda } if !(lambda > 0.0 && lambda.is_finite()) => Err(
                Error::InvalidSequence(format!("power exponent {lambda} must be positive")),
            ),
            _ => Ok(()),
        }
    }

    /// Term `n` (1-based) from the closed form; `None` for `Explicit`.
    pub fn formula(&self, n: u64) -> Option<f64> {
        debug_assert!(n >= 1);
        match *self {
            Generator::Geometric { omega } => Some(pow_int(omega, n - 1)),
            Generator::Power { lambda } => Some((n as f64).powf(-lambda)),
            Generator::LogInverse => Some(1.0 / ((n + 1) as f64).log2()),
            Generator::Explicit => None,
        }
    }

    /// Closed-form estimate of `#{m >= 1 : term(m) > t}`.
    fn count_estimate(&self, t: f64) -> Option<f64> {
        if t >= 1.0 {
            return Some(0.0);
        }
        match *self {
            Generator::Geometric { omega } => Some((t.ln() / omega.ln()).ceil()),
            Generator::Power { lambda } => Some(t.powf(-1.0 / lambda).ceil() - 1.0),
            Generator::LogInverse => Some((1.0 / t).exp2().ceil() - 2.0),
            Generator::Explicit => None,
        }
    }
}

/// Number of terms of a sequence above a threshold.
///
/// `exact` is false only when the count is too large for integer search and
/// was taken from the generator's closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermCount {
    pub value: f64,
    pub exact: bool,
}

/// A non-negative, non-increasing sequence: a stored prefix plus an
/// optional generator for the tail.
///
/// With `generator == None` the sequence is finitely supported (all terms
/// past the prefix are zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeq", into = "RawSeq")]
pub struct DecreasingSeq {
    prefix: Vec<f64>,
    generator: Option<Generator>,
}

#[derive(Serialize, Deserialize)]
struct RawSeq {
    prefix: Vec<f64>,
    #[serde(default)]
    generator: Option<Generator>,
}

impl TryFrom<RawSeq> for DecreasingSeq {
    type Error = Error;

    fn try_from(raw: RawSeq) -> Result<Self> {
        DecreasingSeq::new(raw.prefix, raw.generator)
    }
}

impl From<DecreasingSeq> for RawSeq {
    fn from(s: DecreasingSeq) -> Self {
        RawSeq {
            prefix: s.prefix,
            generator: s.generator,
        }
    }
}

impl DecreasingSeq {
    pub fn new(prefix: Vec<f64>, generator: Option<Generator>) -> Result<Self> {
        if let Some(g) = &generator {
            g.validate()?;
        }
        for (i, &x) in prefix.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidSequence(format!(
                    "term {} = {x} is not a finite non-negative real",
                    i + 1
                )));
            }
            if i > 0 && x > prefix[i - 1] {
                return Err(Error::InvalidSequence(format!(
                    "term {} = {x} exceeds term {} = {}",
                    i + 1,
                    i,
                    prefix[i - 1]
                )));
            }
            if let Some(f) = generator.and_then(|g| g.formula(i as u64 + 1)) {
                if (f - x).abs() > IDENTITY_TOL {
                    return Err(Error::InvalidSequence(format!(
                        "term {} = {x} disagrees with its generator value {f}",
                        i + 1
                    )));
                }
            }
        }
        Ok(DecreasingSeq { prefix, generator })
    }

    /// Finitely supported sequence; `values` must already be non-increasing.
    pub fn finite(values: Vec<f64>) -> Result<Self> {
        Self::new(values, None)
    }

    /// Prefix of a sequence with an unknown non-increasing continuation.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Some(Generator::Explicit))
    }

    pub fn geometric(omega: f64, len: usize) -> Result<Self> {
        Self::generated(Generator::Geometric { omega }, len)
    }

    pub fn power(lambda: f64, len: usize) -> Result<Self> {
        Self::generated(Generator::Power { lambda }, len)
    }

    pub fn log_inverse(len: usize) -> Result<Self> {
        Self::generated(Generator::LogInverse, len)
    }

    pub fn generated(generator: Generator, len: usize) -> Result<Self> {
        generator.validate()?;
        if generator == Generator::Explicit {
            return Err(Error::InvalidSequence(
                "explicit sequences need their prefix".into(),
            ));
        }
        let len = len.max(1);
        let prefix = (1..=len as u64)
            .map(|n| generator.formula(n).expect("closed form"))
            .collect();
        Ok(DecreasingSeq {
            prefix,
            generator: Some(generator),
        })
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn generator(&self) -> Option<Generator> {
        self.generator
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// True when every term past the prefix is known to be zero.
    pub fn is_finitely_supported(&self) -> bool {
        self.generator.is_none()
    }

    /// Term `n` (1-based), if determined.
    pub fn term(&self, n: usize) -> Option<f64> {
        assert!(n >= 1, "sequence indices are 1-based");
        if n <= self.prefix.len() {
            return Some(self.prefix[n - 1]);
        }
        match self.generator {
            None => Some(0.0),
            Some(g) => g.formula(n as u64),
        }
    }

    /// The first `n` terms.
    pub fn terms(&self, n: usize) -> Result<Vec<f64>> {
        if n > self.prefix.len() && self.generator == Some(Generator::Explicit) {
            return Err(Error::InsufficientPrefix(format!(
                "{n} terms requested from an explicit prefix of length {}",
                self.prefix.len()
            )));
        }
        Ok((1..=n).map(|i| self.term(i).expect("determined")).collect())
    }

    /// Number of terms that can be produced: unbounded for generated and
    /// finitely supported sequences, the prefix length for explicit ones.
    pub fn available(&self) -> Option<usize> {
        match self.generator {
            Some(Generator::Explicit) => Some(self.prefix.len()),
            _ => None,
        }
    }

    /// An upper bound for every term with index `> n`, if one is known.
    pub fn sup_beyond(&self, n: usize) -> Option<f64> {
        if n < self.prefix.len() {
            return Some(self.prefix[n]);
        }
        match self.generator {
            None => Some(0.0),
            Some(Generator::Explicit) => self.prefix.last().copied(),
            Some(g) => g.formula(n as u64 + 1),
        }
    }

    /// Returns a copy whose stored prefix holds at least `n` terms.
    pub fn extended(&self, n: usize) -> Result<Self> {
        if n <= self.prefix.len() {
            return Ok(self.clone());
        }
        let prefix = self.terms(n)?;
        Ok(DecreasingSeq {
            prefix,
            generator: self.generator,
        })
    }

    /// `c * self`; the closed form is dropped unless `c == 1`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c < 0.0 || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("scale {c} must be >= 0")));
        }
        if c == 1.0 {
            return Ok(self.clone());
        }
        let prefix = self.prefix.iter().map(|x| x * c).collect();
        let generator = self.generator.map(|_| Generator::Explicit);
        Self::new(prefix, generator)
    }

    /// Scales so the first term is 1 (zero sequences are returned unchanged).
    pub fn normalized(&self) -> Result<Self> {
        match self.prefix.first() {
            Some(&a1) if a1 > 0.0 => self.scaled(1.0 / a1),
            _ => Ok(self.clone()),
        }
    }

    /// `r (x) self`: every term repeated `r` times, first `n` terms.
    pub fn repeated(&self, r: usize, n: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("repetition factor must be >= 1".into()));
        }
        let base = self.terms(n.div_ceil(r))?;
        let prefix: Vec<f64> = (0..n).map(|i| base[i / r]).collect();
        Self::new(prefix, self.generator.map(|_| Generator::Explicit))
    }

    /// `#{m >= 1 : a_m > t}` for `t > 0`.
    pub fn count_above(&self, t: f64) -> Result<TermCount> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("threshold {t} must be positive")));
        }
        let in_prefix = self.prefix.partition_point(|&x| x > t);
        if in_prefix < self.prefix.len() {
            return Ok(TermCount { value: in_prefix as f64, exact: true });
        }
        match self.generator {
            None => Ok(TermCount { value: in_prefix as f64, exact: true }),
            Some(Generator::Explicit) => Err(Error::InsufficientPrefix(format!(
                "all {} stored terms exceed {t}; the tail cannot be counted",
                self.prefix.len()
            ))),
            Some(g) => {
                let c = generated_count(g, t);
                Ok(TermCount {
                    value: c.value.max(in_prefix as f64),
                    exact: c.exact,
                })
            }
        }
    }
}

fn generated_count(g: Generator, t: f64) -> TermCount {
    let est = g.count_estimate(t).expect("closed form");
    if !est.is_finite() || est > EXACT_COUNT_LIMIT {
        return TermCount { value: est.floor(), exact: false };
    }
    let above = |m: u64| g.formula(m).expect("closed form") > t;
    let mut c = est.max(0.0) as u64;
    while c >= 1 && !above(c) {
        c -= 1;
    }
    while above(c + 1) {
        c += 1;
    }
    TermCount { value: c as f64, exact: true }
}

/// Decreasing rearrangement of `|raw_i|` with multiplicities.
pub fn star_rearrange(raw: &[Complex64]) -> DecreasingSeq {
    rearrange_abs(raw.iter().map(|z| z.norm()))
}

/// [`star_rearrange`] for real input.
pub fn star_rearrange_real(raw: &[f64]) -> DecreasingSeq {
    rearrange_abs(raw.iter().map(|x| x.abs()))
}

fn rearrange_abs(abs: impl Iterator<Item = f64>) -> DecreasingSeq {
    let mut v: Vec<f64> = abs.collect();
    v.sort_by(|a, b| b.total_cmp(a));
    DecreasingSeq::finite(v).expect("sorted absolute values form a decreasing sequence")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrange_small_cases() {
        assert_eq!(star_rearrange_real(&[0.1, 0.5, 0.3]).prefix(), &[0.5, 0.3, 0.1]);
        assert_eq!(star_rearrange_real(&[1.0, 1.0, 1.0]).prefix(), &[1.0, 1.0, 1.0]);
        assert!(star_rearrange_real(&[]).is_empty());
        let z = [Complex64::new(3.0, 4.0), Complex64::new(0.0, -1.0)];
        assert_eq!(star_rearrange(&z).prefix(), &[5.0, 1.0]);
    }

    #[test]
    fn rejects_increasing_or_negative() {
        assert!(DecreasingSeq::finite(vec![0.5, 0.6]).is_err());
        assert!(DecreasingSeq::finite(vec![-0.1]).is_err());
        assert!(DecreasingSeq::finite(vec![f64::NAN]).is_err());
        assert!(DecreasingSeq::new(vec![1.0, 0.4], Some(Generator::Geometric { omega: 0.5 })).is_err());
        assert!(DecreasingSeq::geometric(1.5, 3).is_err());
    }

    #[test]
    fn generated_terms() {
        let g = DecreasingSeq::geometric(0.5, 3).unwrap();
        assert_eq!(g.term(5), Some(0.0625));
        let l = DecreasingSeq::log_inverse(1).unwrap();
        assert_eq!(l.term(1), Some(1.0));
        assert_eq!(l.term(3), Some(0.5));
        let p = DecreasingSeq::power(1.0, 2).unwrap();
        assert_eq!(p.term(4), Some(0.25));
        let e = DecreasingSeq::explicit(vec![1.0, 0.5]).unwrap();
        assert_eq!(e.term(3), None);
        assert_eq!(e.sup_beyond(5), Some(0.5));
        let f = DecreasingSeq::finite(vec![1.0]).unwrap();
        assert_eq!(f.term(9), Some(0.0));
    }

    #[test]
    fn counts_match_enumeration() {
        // 1/log2(n+1) > 2^-5 for n <= 2^32 - 2
        assert_eq!(DecreasingSeq::log_inverse(1).unwrap().count_above(1.0 / 32.0).unwrap().value, 4294967294.0);
        let seqs = [
            DecreasingSeq::geometric(0.5, 1).unwrap(),
            DecreasingSeq::geometric(1.0 / 3.0, 1).unwrap(),
            DecreasingSeq::power(1.0, 1).unwrap(),
            DecreasingSeq::power(0.7, 1).unwrap(),
            DecreasingSeq::log_inverse(1).unwrap(),
        ];
        for s in &seqs {
            for k in 1..8 {
                let t = pow_int(0.5, k);
                let c = s.count_above(t).unwrap();
                if c.value >= 99_999.0 {
                    continue;
                }
                assert!(c.exact);
                let brute = (1..100_000usize).filter(|&m| s.term(m).unwrap() > t).count();
                assert_eq!(c.value as usize, brute, "{s:?} at threshold {t}");
            }
        }
    }

    #[test]
    fn explicit_tail_count_needs_certificate() {
        let e = DecreasingSeq::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(e.count_above(0.3).unwrap().value, 2.0);
        assert!(matches!(e.count_above(0.1), Err(Error::InsufficientPrefix(_))));
    }

    #[test]
    fn repeated_sequence() {
        let g = DecreasingSeq::geometric(0.5, 1).unwrap();
        let r = g.repeated(3, 7).unwrap();
        assert_eq!(r.prefix(), &[1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.25]);
    }

    #[test]
    fn json_shape() {
        let s: DecreasingSeq =
            serde_json::from_str(r#"{"prefix":[1.0,0.5],"generator":{"kind":"geometric","omega":0.5}}"#)
                .unwrap();
        assert_eq!(s.generator(), Some(Generator::Geometric { omega: 0.5 }));
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(back, r#"{"prefix":[1.0,0.5],"generator":{"kind":"geometric","omega":0.5}}"#);
        let f: DecreasingSeq = serde_json::from_str(r#"{"prefix":[2.0],"generator":null}"#).unwrap();
        assert!(f.is_finitely_supported());
        assert!(serde_json::from_str::<DecreasingSeq>(r#"{"prefix":[0.1,0.2]}"#).is_err());
    }
}
