//! SDPA sparse format (.dat-s) reader and writer.
//!
//! Layout: optional leading comment lines starting with `"` or `*`, then
//! the constraint count `m`, the block count, the block sizes (negative
//! size = diagonal block), the `m` right-hand sides, and entry lines
//! `k blk i j v` with 1-based upper-triangle indices (`i <= j`) meaning
//! `[A_k]_ij = [A_k]_ji = v`. Multiple blocks are embedded into one
//! block-diagonal matrix. The writer emits a canonical single-block file
//! with 17-significant-digit values, so `read(write(p)) == p` exactly.

use thiserror::Error;

use crate::problem::{SdpProblem, SparseSymMat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SdpaError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("index out of range at line {line}: {reason}")]
    Index { line: usize, reason: String },
}

fn parse_err(line: usize, reason: impl Into<String>) -> SdpaError {
    SdpaError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Splits a header line on whitespace and the separator characters the
/// format allows (commas, parentheses, braces).
fn header_tokens(s: &str) -> Vec<&str> {
    s.split(|c: char| c.is_whitespace() || matches!(c, ',' | '(' | ')' | '{' | '}'))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn read_sdpa_sparse(text: &str) -> Result<SdpProblem, SdpaError> {
    // (1-based line number, content) for every non-blank line.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    // Leading comments.
    let mut header = None;
    for (no, line) in lines.by_ref() {
        let t = line.trim_start();
        if t.starts_with('"') || t.starts_with('*') {
            continue;
        }
        header = Some((no, line));
        break;
    }
    let (no_m, line_m) = header.ok_or_else(|| parse_err(0, "missing constraint count"))?;
    let m: usize = header_tokens(line_m)
        .first()
        .ok_or_else(|| parse_err(no_m, "missing constraint count"))?
        .parse()
        .map_err(|_| parse_err(no_m, "constraint count is not an integer"))?;
    if m == 0 {
        return Err(parse_err(no_m, "constraint count must be positive"));
    }

    let (no_nb, line_nb) = lines
        .next()
        .ok_or_else(|| parse_err(no_m, "missing block count"))?;
    let nblocks: usize = header_tokens(line_nb)
        .first()
        .ok_or_else(|| parse_err(no_nb, "missing block count"))?
        .parse()
        .map_err(|_| parse_err(no_nb, "block count is not an integer"))?;
    if nblocks == 0 {
        return Err(parse_err(no_nb, "block count must be positive"));
    }

    let (no_bs, line_bs) = lines
        .next()
        .ok_or_else(|| parse_err(no_nb, "missing block sizes"))?;
    let tokens = header_tokens(line_bs);
    if tokens.len() < nblocks {
        return Err(parse_err(
            no_bs,
            format!("expected {nblocks} block sizes, found {}", tokens.len()),
        ));
    }
    let mut sizes: Vec<i64> = Vec::with_capacity(nblocks);
    for t in tokens.iter().take(nblocks) {
        let s: i64 = t
            .parse()
            .map_err(|_| parse_err(no_bs, format!("bad block size token `{t}`")))?;
        if s == 0 {
            return Err(parse_err(no_bs, "block size must be nonzero"));
        }
        sizes.push(s);
    }
    let mut offsets = Vec::with_capacity(nblocks);
    let mut n = 0usize;
    for &s in &sizes {
        offsets.push(n);
        n += s.unsigned_abs() as usize;
    }

    let (no_b, line_b) = lines
        .next()
        .ok_or_else(|| parse_err(no_bs, "missing right-hand sides"))?;
    let tokens = header_tokens(line_b);
    if tokens.len() != m {
        return Err(parse_err(
            no_b,
            format!("expected {m} right-hand sides, found {}", tokens.len()),
        ));
    }
    let mut b = Vec::with_capacity(m);
    for t in tokens {
        b.push(
            t.parse::<f64>()
                .map_err(|_| parse_err(no_b, format!("bad value token `{t}`")))?,
        );
    }

    let mut triplets: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); m + 1];
    let mut seen: Vec<std::collections::BTreeSet<(usize, usize)>> =
        vec![std::collections::BTreeSet::new(); m + 1];
    for (no, line) in lines {
        let tokens = header_tokens(line);
        if tokens.len() != 5 {
            return Err(parse_err(
                no,
                format!("expected `k blk i j v`, found {} tokens", tokens.len()),
            ));
        }
        let k: usize = tokens[0]
            .parse()
            .map_err(|_| parse_err(no, "bad matrix index"))?;
        let blk: usize = tokens[1]
            .parse()
            .map_err(|_| parse_err(no, "bad block index"))?;
        let i: usize = tokens[2]
            .parse()
            .map_err(|_| parse_err(no, "bad row index"))?;
        let j: usize = tokens[3]
            .parse()
            .map_err(|_| parse_err(no, "bad column index"))?;
        let v: f64 = tokens[4]
            .parse()
            .map_err(|_| parse_err(no, "bad value"))?;
        if k > m {
            return Err(SdpaError::Index {
                line: no,
                reason: format!("matrix index {k} exceeds {m}"),
            });
        }
        if blk == 0 || blk > nblocks {
            return Err(SdpaError::Index {
                line: no,
                reason: format!("block index {blk} out of 1..={nblocks}"),
            });
        }
        let size = sizes[blk - 1];
        let dim = size.unsigned_abs() as usize;
        if i == 0 || j == 0 || i > dim || j > dim {
            return Err(SdpaError::Index {
                line: no,
                reason: format!("entry ({i},{j}) outside block of size {dim}"),
            });
        }
        if i > j {
            return Err(parse_err(no, format!("lower-triangle entry ({i},{j})")));
        }
        if size < 0 && i != j {
            return Err(parse_err(
                no,
                format!("off-diagonal entry ({i},{j}) in a diagonal block"),
            ));
        }
        let row = offsets[blk - 1] + j - 1;
        let col = offsets[blk - 1] + i - 1;
        if !seen[k].insert((row, col)) {
            return Err(parse_err(no, format!("duplicate entry for ({i},{j})")));
        }
        triplets[k].push((row, col, v));
    }

    let mats = triplets
        .into_iter()
        .map(|t| SparseSymMat::from_lower_triplets(n, &t))
        .collect();
    Ok(SdpProblem::new(n, mats, b))
}

/// Canonical single-block output with entries sorted by `(k, i, j)` and
/// full-precision decimal values.
pub fn write_sdpa_sparse(problem: &SdpProblem) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", problem.m));
    out.push_str("1\n");
    out.push_str(&format!("{}\n", problem.n));
    let b_line: Vec<String> = problem.b.iter().map(|v| format!("{v:.16e}")).collect();
    out.push_str(&b_line.join(" "));
    out.push('\n');
    for (k, mat) in problem.matrices().iter().enumerate() {
        // File rows use the upper triangle: (i, j) with i <= j.
        let mut entries = mat.lower_triplets();
        entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
        for (r, c, v) in entries {
            out.push_str(&format!("{k} 1 {} {} {v:.16e}\n", c + 1, r + 1));
        }
    }
    out
}
