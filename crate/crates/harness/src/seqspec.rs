//! Sequence arguments: `geo:<w>`, `pow:<l>`, `loginv`, `finite:<x,..>`,
//! `explicit:<x,..>`, or a path to a JSON sequence.

use std::path::Path;

use calkin_core::seqkit::{DecreasingSeq, Generator};

use crate::HarnessError;

fn parse_f64(s: &str) -> Result<f64, HarnessError> {
    s.trim().parse().map_err(|_| HarnessError::Usage(format!("not a number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>, HarnessError> {
    s.split(',').map(parse_f64).collect()
}

/// Resolves a sequence argument; generated sequences get a prefix of
/// length `len`.
pub fn parse_seq(spec: &str, len: usize) -> Result<DecreasingSeq, HarnessError> {
    let len = len.max(1);
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let seq = match kind {
        "geo" => DecreasingSeq::generated(Generator::Geometric { omega: parse_f64(arg)? }, len)?,
        "pow" => DecreasingSeq::generated(Generator::Power { lambda: parse_f64(arg)? }, len)?,
        "loginv" if arg.is_empty() => DecreasingSeq::generated(Generator::LogInverse, len)?,
        "finite" => DecreasingSeq::finite(parse_list(arg)?)?,
        "explicit" => DecreasingSeq::explicit(parse_list(arg)?)?,
        _ if Path::new(spec).exists() => serde_json::from_str(&std::fs::read_to_string(spec)?)?,
        _ => return Err(HarnessError::Usage(format!("unrecognised sequence {spec:?}"))),
    };
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_specs() {
        assert_eq!(parse_seq("geo:0.5", 3).unwrap().prefix(), &[1.0, 0.5, 0.25]);
        assert_eq!(parse_seq("pow:1", 2).unwrap().prefix(), &[1.0, 0.5]);
        assert_eq!(parse_seq("loginv", 1).unwrap().prefix(), &[1.0]);
        assert!(parse_seq("finite:1,0.5", 1).unwrap().is_finitely_supported());
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_seq("geo:x", 3), Err(HarnessError::Usage(_))));
        assert!(matches!(parse_seq("nope", 3), Err(HarnessError::Usage(_))));
        assert!(matches!(parse_seq("finite:0.5,1", 3), Err(HarnessError::Core(_))));
    }
}
