//! Plain-text algebra fixtures.
//!
//! ```text
//! [algebra]
//! dim 5
//! basis e1 e2 a b ab
//! unit e1 + e2
//! mult a a = a
//! mult a b = ab
//! [tau]
//! e1 = 1
//! ```
//!
//! Products without a `mult` line are zero, `[tau]` labels without a line
//! map to zero, and `#` starts a comment.

use std::sync::Arc;

use num_traits::Zero;

use super::{make_algebra, parse_combination, Algebra, AlgebraError, AugmentationMap};
use crate::scalar::{parse_rational, Rational};

#[derive(Debug, Clone)]
pub struct AlgebraFixture {
    pub algebra: Arc<Algebra>,
    pub tau: Option<AugmentationMap>,
}

fn err(line: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Fixture {
        line,
        msg: msg.into(),
    }
}

/// Splits `key value` or `key = value`.
fn key_value(line: &str) -> (&str, &str) {
    let line = line.trim();
    match line.split_once(|c: char| c.is_whitespace() || c == '=') {
        Some((k, v)) => (k, v.trim().trim_start_matches('=').trim()),
        None => (line, ""),
    }
}

pub fn parse_fixture(src: &str) -> Result<AlgebraFixture, AlgebraError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Algebra,
        Tau,
    }
    let mut section = Section::None;
    let mut dim: Option<(usize, usize)> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut unit: Option<(usize, String)> = None;
    let mut mults: Vec<(usize, String, String, String)> = Vec::new();
    let mut taus: Vec<(usize, String, String)> = Vec::new();
    let mut saw_tau = false;

    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            section = match line {
                "[algebra]" => Section::Algebra,
                "[tau]" => {
                    saw_tau = true;
                    Section::Tau
                }
                other => return Err(err(lineno, format!("unknown section {other}"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(err(lineno, "content before any section")),
            Section::Algebra => {
                let (key, rest) = key_value(line);
                match key {
                    "dim" => {
                        let d = rest
                            .parse()
                            .map_err(|_| err(lineno, format!("bad dim `{rest}`")))?;
                        dim = Some((lineno, d));
                    }
                    "basis" => labels = Some(rest.split_whitespace().map(str::to_string).collect()),
                    "unit" => unit = Some((lineno, rest.to_string())),
                    "mult" => {
                        let (lhs, rhs) = rest
                            .split_once('=')
                            .ok_or_else(|| err(lineno, "mult needs `<l1> <l2> = <combination>`"))?;
                        let factors: Vec<&str> = lhs.split_whitespace().collect();
                        if factors.len() != 2 {
                            return Err(err(lineno, "mult needs exactly two factors"));
                        }
                        mults.push((
                            lineno,
                            factors[0].to_string(),
                            factors[1].to_string(),
                            rhs.trim().to_string(),
                        ));
                    }
                    other => return Err(err(lineno, format!("unknown key `{other}`"))),
                }
            }
            Section::Tau => {
                let (label, value) = line
                    .split_once('=')
                    .ok_or_else(|| err(lineno, "tau lines look like `<label> = <rational>`"))?;
                taus.push((lineno, label.trim().to_string(), value.trim().to_string()));
            }
        }
    }

    let labels = labels.ok_or_else(|| err(0, "missing `basis`"))?;
    let n = labels.len();
    if let Some((lineno, d)) = dim {
        if d != n {
            return Err(err(lineno, format!("dim {d} but {n} basis labels")));
        }
    }
    let (unit_line, unit_src) = unit.ok_or_else(|| err(0, "missing `unit`"))?;
    let unit = parse_combination(&labels, &unit_src).map_err(|e| err(unit_line, e.to_string()))?;
    let mut table = vec![vec![vec![Rational::zero(); n]; n]; n];
    let index = |lineno: usize, l: &str| {
        labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| err(lineno, format!("unknown label `{l}`")))
    };
    for (lineno, l1, l2, rhs) in &mults {
        let i = index(*lineno, l1)?;
        let j = index(*lineno, l2)?;
        table[i][j] = parse_combination(&labels, rhs).map_err(|e| err(*lineno, e.to_string()))?;
    }
    let algebra = Arc::new(make_algebra(labels.clone(), table, unit)?);

    let tau = if saw_tau {
        let mut coeffs = vec![Rational::zero(); n];
        for (lineno, label, value) in &taus {
            let i = index(*lineno, label)?;
            coeffs[i] = parse_rational(value).map_err(|e| err(*lineno, e.to_string()))?;
        }
        Some(AugmentationMap::new(&algebra, coeffs)?)
    } else {
        None
    };
    Ok(AlgebraFixture { algebra, tau })
}
