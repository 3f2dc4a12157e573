//! Text format for post-processing functions.
//!
//! ```text
//! fn m=4 family=junta
//! vars=0,2 table=0110
//! ```
//!
//! The header is `fn m=<int> family=<tag>` with an optional `sparsity=<int>`
//! override of the declared bound. Bodies by family: `parity` and `and` have
//! none; `truth_table` is one line of `2^m` characters in `{0,1}`;
//! `inner_product` is `s=<bits>`; `junta` is `vars=<i,j,...> table=<2^k bits>`;
//! `sparse_poly` is one `s=<bits> coeff=<real>` line per term. Lines starting
//! with `#` are comments.

use std::fmt::Write as _;

use super::{BooleanFunction, Family};
use crate::bits::Bits;
use crate::error::{Error, Result};

fn kv<'a>(token: &'a str, key: &str, line: usize) -> Result<&'a str> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, format!("expected `{key}=...`, found {token:?}")))
}

fn parse_table(text: &str, line: usize) -> Result<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::parse(line, format!("bad table character {c:?}"))),
        })
        .collect()
}

fn parse_bits(text: &str, line: usize) -> Result<Bits> {
    text.parse()
        .map_err(|e: Error| Error::parse(line, e.to_string()))
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { .. } | Error::Capacity(_) => e,
        other => Error::parse(line, other.to_string()),
    }
}

pub fn parse_function(text: &str) -> Result<BooleanFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty function file"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("fn") {
        return Err(Error::parse(hline, "header must start with `fn`"));
    }
    let mut m = None;
    let mut tag = None;
    let mut sparsity = None;
    for tok in tokens {
        if let Ok(v) = kv(tok, "m", hline) {
            m = Some(v.parse::<usize>().map_err(|e| Error::parse(hline, format!("m: {e}")))?);
        } else if let Ok(v) = kv(tok, "family", hline) {
            tag = Some(v.to_string());
        } else if let Ok(v) = kv(tok, "sparsity", hline) {
            sparsity = Some(v.parse::<u64>().map_err(|e| Error::parse(hline, format!("sparsity: {e}")))?);
        } else {
            return Err(Error::parse(hline, format!("unknown header field {tok:?}")));
        }
    }
    let m = m.ok_or_else(|| Error::parse(hline, "missing m=<int>"))?;
    let tag = tag.ok_or_else(|| Error::parse(hline, "missing family=<tag>"))?;
    let body: Vec<(usize, &str)> = lines.collect();
    let last = body.last().map(|b| b.0).unwrap_or(hline);

    let expect_lines = |count: usize| -> Result<()> {
        if body.len() != count {
            return Err(Error::parse(
                body.get(count).map(|b| b.0).unwrap_or(last),
                format!("family {tag} expects {count} body line(s), found {}", body.len()),
            ));
        }
        Ok(())
    };

    let f = match tag.as_str() {
        "parity" => {
            expect_lines(0)?;
            BooleanFunction::parity(m).map_err(|e| at_line(e, hline))?
        }
        "and" => {
            expect_lines(0)?;
            BooleanFunction::and(m).map_err(|e| at_line(e, hline))?
        }
        "truth_table" => {
            expect_lines(1)?;
            let (l, t) = body[0];
            BooleanFunction::truth_table(m, parse_table(t, l)?).map_err(|e| at_line(e, l))?
        }
        "inner_product" => {
            expect_lines(1)?;
            let (l, t) = body[0];
            let s = parse_bits(kv(t, "s", l)?, l)?;
            if s.len() != m {
                return Err(Error::parse(l, format!("s has {} bits, expected {m}", s.len())));
            }
            BooleanFunction::inner_product(s).map_err(|e| at_line(e, l))?
        }
        "junta" => {
            expect_lines(1)?;
            let (l, t) = body[0];
            let mut parts = t.split_whitespace();
            let vars_txt = kv(parts.next().unwrap_or(""), "vars", l)?;
            let table_txt = kv(parts.next().unwrap_or(""), "table", l)?;
            if parts.next().is_some() {
                return Err(Error::parse(l, "trailing tokens after table"));
            }
            let vars = if vars_txt.is_empty() {
                Vec::new()
            } else {
                vars_txt
                    .split(',')
                    .map(|v| v.trim().parse::<usize>().map_err(|e| Error::parse(l, format!("vars: {e}"))))
                    .collect::<Result<Vec<_>>>()?
            };
            BooleanFunction::junta(m, vars, parse_table(table_txt, l)?).map_err(|e| at_line(e, l))?
        }
        "sparse_poly" => {
            let mut terms = Vec::new();
            for &(l, t) in &body {
                let mut parts = t.split_whitespace();
                let s = parse_bits(kv(parts.next().unwrap_or(""), "s", l)?, l)?;
                let c = kv(parts.next().unwrap_or(""), "coeff", l)?
                    .parse::<f64>()
                    .map_err(|e| Error::parse(l, format!("coeff: {e}")))?;
                if parts.next().is_some() {
                    return Err(Error::parse(l, "trailing tokens after coeff"));
                }
                terms.push((s, c));
            }
            BooleanFunction::sparse_poly(m, terms).map_err(|e| at_line(e, last))?
        }
        other => return Err(Error::parse(hline, format!("unknown family {other:?}"))),
    };
    match sparsity {
        Some(b) => f.with_sparsity_bound(b).map_err(|e| at_line(e, hline)),
        None => Ok(f),
    }
}

fn table_text(table: &[bool]) -> String {
    table.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn render_function(f: &BooleanFunction) -> String {
    let mut out = format!(
        "fn m={} family={} sparsity={}\n",
        f.m(),
        f.family().tag(),
        f.sparsity_bound()
    );
    match f.family() {
        Family::Parity | Family::And => {}
        Family::TruthTable { table } => {
            let _ = writeln!(out, "{}", table_text(table));
        }
        Family::InnerProduct { s } => {
            let _ = writeln!(out, "s={s}");
        }
        Family::Junta { vars, table } => {
            let vars: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "vars={} table={}", vars.join(","), table_text(table));
        }
        Family::SparsePoly { terms } => {
            for (s, c) in terms {
                let _ = writeln!(out, "s={s} coeff={c:?}");
            }
        }
    }
    out
}
