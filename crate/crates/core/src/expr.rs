//! Linear-combination strings such as `"1/2*e1^e2^e3 - e1^e4^e5"`.
//!
//! A term is an optional rational coefficient followed by a body. The body
//! is kept both verbatim (basis-level models resolve it as one label) and
//! split into `^`/`*`-separated factors (generator models and twist specs
//! multiply the factors out).

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{parse_scalar, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Scalar,
    /// Body with the coefficient stripped; empty for a bare number.
    pub body: String,
    pub factors: Vec<String>,
}

pub fn parse_terms(expr: &str) -> Result<Vec<Term>> {
    let err = |reason: &str| Error::Expr {
        expr: expr.to_string(),
        reason: reason.to_string(),
    };
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut negative = false;
    let mut buf = String::new();
    for ch in expr.chars() {
        match ch {
            '+' | '-' => {
                if buf.trim().is_empty() {
                    if ch == '-' {
                        negative = !negative;
                    }
                } else {
                    chunks.push((negative, std::mem::take(&mut buf)));
                    negative = ch == '-';
                }
            }
            _ => buf.push(ch),
        }
    }
    if !buf.trim().is_empty() {
        chunks.push((negative, buf));
    } else if negative || (expr.trim_end().ends_with('+')) {
        return Err(err("dangling sign"));
    }

    let mut terms = Vec::with_capacity(chunks.len());
    for (neg, chunk) in chunks {
        let mut coeff = Scalar::one();
        let mut body_parts = Vec::new();
        for tok in chunk.split('*').map(str::trim) {
            if tok.is_empty() {
                return Err(err("empty factor"));
            }
            match parse_scalar(tok) {
                Some(c) => coeff *= c,
                None => body_parts.push(tok),
            }
        }
        if neg {
            coeff = -coeff;
        }
        let body = body_parts.join("*");
        let mut factors = Vec::new();
        for part in body_parts {
            for f in part.split('^').map(str::trim) {
                if f.is_empty() {
                    return Err(err("empty wedge factor"));
                }
                if !f
                    .chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '.')
                {
                    return Err(err(&format!("invalid name `{f}`")));
                }
                factors.push(f.to_string());
            }
        }
        if !coeff.is_zero() {
            terms.push(Term { coeff, body, factors });
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ratio};

    #[test]
    fn parses_signed_terms() {
        let t = parse_terms("1/2*e1^e2^e3 - e1^e4 + 3").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].coeff, ratio(1, 2));
        assert_eq!(t[0].factors, vec!["e1", "e2", "e3"]);
        assert_eq!(t[0].body, "e1^e2^e3");
        assert_eq!(t[1].coeff, int(-1));
        assert_eq!(t[2].body, "");
        assert_eq!(t[2].coeff, int(3));
    }

    #[test]
    fn leading_minus_and_star_products() {
        let t = parse_terms("-a*b").unwrap();
        assert_eq!(t[0].coeff, int(-1));
        assert_eq!(t[0].factors, vec!["a", "b"]);
        let t = parse_terms("  ").unwrap();
        assert!(t.is_empty());
        let t = parse_terms("0*x").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_terms("a +").is_err());
        assert!(parse_terms("a^^b").is_err());
        assert!(parse_terms("2**a").is_err());
        assert!(parse_terms("a$b").is_err());
    }
}
