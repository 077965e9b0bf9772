//! Symbolic expansion of `ch_j(H_i)` with exact coefficients:
//!
//! ```text
//! ch_j(H_i) = -i c_1(L_i)^j / j!
//!           + sum_{k=1}^{i-1}   b(i, j, k) T^k(ch_k(X)) c_1(L_i)^j
//!           + sum_{k=i}^{i+j}   b(i, j, k) T^i(ch_k(X)) c_1(L_i)^{i+j-k}
//! ```
//!
//! `T^m`, `ch_k(X)` and `c_1(L_i)` are opaque symbols. For `i = 1` the first
//! sum is empty.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoeffError, Coefficients, Method, TripleIndex};
use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("the expansion needs i >= 1 and j >= 1, got i = {i}, j = {j}")]
    Domain { i: usize, j: usize },
    #[error("malformed LaTeX expansion: {0}")]
    Latex(String),
    #[error(transparent)]
    Coefficient(#[from] CoeffError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leading {
    pub coefficient: Rational,
}

/// `coefficient * T^operator_order(ch_index(X)) * c_1(L_i)^c1_power`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChernTerm {
    pub k: usize,
    pub coefficient: Rational,
    pub operator_order: usize,
    pub ch_index: usize,
    pub c1_power: usize,
    /// Set when the coefficient is zero; such terms are kept.
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub zero_coefficient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernExpansion {
    pub i: usize,
    pub j: usize,
    pub leading: Leading,
    pub terms: Vec<ChernTerm>,
}

/// Builds the expansion for `(i, j)` with coefficients from `engine`.
pub fn render_chern_expansion(
    engine: &mut Coefficients,
    i: usize,
    j: usize,
    method: Method,
) -> Result<ChernExpansion, ReportError> {
    if i == 0 || j == 0 {
        return Err(ReportError::Domain { i, j });
    }
    let j_fact = (1..=j).fold(BigInt::from(1), |acc, m| acc * BigInt::from(m));
    let leading = Rational::new(-BigInt::from(i), j_fact).expect("j! > 0");
    let mut terms = Vec::with_capacity(i + j);
    for k in 1..=i + j {
        let coefficient = engine.b(TripleIndex::new(i, j, k)?, method)?;
        let (operator_order, c1_power) = if k < i { (k, j) } else { (i, i + j - k) };
        let zero_coefficient = coefficient.is_zero();
        terms.push(ChernTerm {
            k,
            coefficient,
            operator_order,
            ch_index: k,
            c1_power,
            zero_coefficient,
        });
    }
    Ok(ChernExpansion {
        i,
        j,
        leading: Leading {
            coefficient: leading,
        },
        terms,
    })
}

fn latex_abs(c: &Rational) -> String {
    let numer = c.numer().magnitude();
    if c.is_integer() {
        numer.to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", numer, c.denom())
    }
}

impl ChernExpansion {
    /// One display-math string, leading term first and then `k` ascending.
    pub fn to_latex(&self) -> String {
        let i = self.i;
        let mut out = format!("\\mathrm{{ch}}_{{{}}}(H_{{{}}}) = ", self.j, i);
        let lead = &self.leading.coefficient;
        if lead.is_negative() {
            out.push('-');
        }
        out.push_str(&format!(
            "{}\\,c_1(L_{{{}}})^{{{}}}",
            latex_abs(lead),
            i,
            self.j
        ));
        for t in &self.terms {
            out.push_str(if t.coefficient.is_negative() {
                " - "
            } else {
                " + "
            });
            out.push_str(&format!(
                "{}\\,T^{{{}}}(\\mathrm{{ch}}_{{{}}}(X))\\,c_1(L_{{{}}})^{{{}}}",
                latex_abs(&t.coefficient),
                t.operator_order,
                t.ch_index,
                i,
                t.c1_power
            ));
        }
        out
    }

    /// Reads back the output of [`ChernExpansion::to_latex`].
    pub fn from_latex(s: &str) -> Result<ChernExpansion, ReportError> {
        let bad = |what: &str| ReportError::Latex(what.into());
        let (lhs, rhs) = s.split_once(" = ").ok_or_else(|| bad("missing ' = '"))?;
        let j = braced_after(lhs, "\\mathrm{ch}_").ok_or_else(|| bad("missing ch index"))?;
        let i = braced_after(lhs, "H_").ok_or_else(|| bad("missing H index"))?;

        let mut chunks: Vec<(bool, &str)> = Vec::new();
        let mut rest = rhs;
        let mut negative = false;
        if let Some(stripped) = rest.strip_prefix('-') {
            negative = true;
            rest = stripped;
        }
        loop {
            let plus = rest.find(" + ");
            let minus = rest.find(" - ");
            let next = match (plus, minus) {
                (Some(p), Some(m)) => Some(p.min(m)),
                (p, m) => p.or(m),
            };
            match next {
                Some(pos) => {
                    chunks.push((negative, &rest[..pos]));
                    negative = rest[pos..].starts_with(" - ");
                    rest = &rest[pos + 3..];
                }
                None => {
                    chunks.push((negative, rest));
                    break;
                }
            }
        }

        let mut chunks = chunks.into_iter();
        let (neg, lead) = chunks.next().ok_or_else(|| bad("empty right-hand side"))?;
        let (coeff, _) = lead.split_once("\\,").ok_or_else(|| bad("leading term"))?;
        let leading = signed(parse_latex_rational(coeff)?, neg);

        let mut terms = Vec::new();
        for (neg, chunk) in chunks {
            let (coeff, body) = chunk
                .split_once("\\,")
                .ok_or_else(|| bad("term coefficient"))?;
            let coefficient = signed(parse_latex_rational(coeff)?, neg);
            let operator_order = braced_after(body, "T^").ok_or_else(|| bad("operator order"))?;
            let ch_index = braced_after(body, "\\mathrm{ch}_").ok_or_else(|| bad("ch index"))?;
            let c1_power = braced_after(body, ")^").ok_or_else(|| bad("c_1 power"))?;
            let zero_coefficient = coefficient.is_zero();
            terms.push(ChernTerm {
                k: ch_index,
                coefficient,
                operator_order,
                ch_index,
                c1_power,
                zero_coefficient,
            });
        }
        Ok(ChernExpansion {
            i,
            j,
            leading: Leading {
                coefficient: leading,
            },
            terms,
        })
    }
}

fn signed(c: Rational, negative: bool) -> Rational {
    if negative {
        -c
    } else {
        c
    }
}

/// The number inside the first `{...}` following `marker`.
fn braced_after(s: &str, marker: &str) -> Option<usize> {
    let start = s.find(marker)? + marker.len();
    let rest = s[start..].strip_prefix('{')?;
    let end = rest.find('}')?;
    rest[..end].parse().ok()
}

fn parse_latex_rational(s: &str) -> Result<Rational, ReportError> {
    let bad = || ReportError::Latex(format!("coefficient {s:?}"));
    if let Some(frac) = s.strip_prefix("\\frac{") {
        let (p, rest) = frac.split_once("}{").ok_or_else(bad)?;
        let q = rest.strip_suffix('}').ok_or_else(bad)?;
        format!("{p}/{q}").parse().map_err(|_| bad())
    } else {
        s.parse().map_err(|_| bad())
    }
}
