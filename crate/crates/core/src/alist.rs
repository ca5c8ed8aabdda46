//! The alist sparse-matrix format.
//!
//! ```text
//! cols rows
//! max_col_weight max_row_weight
//! col weights
//! row weights
//! one line per column: 1-based row indices
//! one line per row: 1-based column indices
//! ```
//!
//! Zero entries used as padding are accepted and ignored on input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

pub fn to_alist(h: &BitMatrix) -> String {
    let (m, n) = (h.rows(), h.cols());
    let cols: Vec<Vec<usize>> = {
        let mut cols = vec![Vec::new(); n];
        for r in 0..m {
            for c in h.row_support(r) {
                cols[c].push(r);
            }
        }
        cols
    };
    let rows: Vec<Vec<usize>> = (0..m).map(|r| h.row_support(r)).collect();
    // an empty list is written as a single padding zero
    let join = |v: &[usize], offset: usize| -> String {
        if v.is_empty() {
            return "0".into();
        }
        v.iter().map(|x| (x + offset).to_string()).collect::<Vec<_>>().join(" ")
    };
    let col_w: Vec<usize> = cols.iter().map(Vec::len).collect();
    let row_w: Vec<usize> = rows.iter().map(Vec::len).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(
        out,
        "{} {}",
        col_w.iter().max().unwrap_or(&0),
        row_w.iter().max().unwrap_or(&0)
    );
    let _ = writeln!(out, "{}", join(&col_w, 0));
    let _ = writeln!(out, "{}", join(&row_w, 0));
    for c in &cols {
        let _ = writeln!(out, "{}", join(c, 1));
    }
    for r in &rows {
        let _ = writeln!(out, "{}", join(r, 1));
    }
    out
}

pub fn from_alist(text: &str) -> Result<BitMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let mut next = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (ln, l) = lines.next().ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
        let nums = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(ln, format!("bad integer {t:?}"))))
            .collect::<Result<Vec<usize>>>()?;
        Ok((ln, nums))
    };
    let (ln, dims) = next("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(Error::parse(ln, "expected `cols rows`"));
    };
    next("maximum weights")?;
    let (ln, col_w) = next("column weights")?;
    if col_w.len() != n {
        return Err(Error::parse(ln, format!("expected {n} column weights")));
    }
    let (ln, row_w) = next("row weights")?;
    if row_w.len() != m {
        return Err(Error::parse(ln, format!("expected {m} row weights")));
    }
    let mut h = BitMatrix::zeros(m, n);
    for (c, &w) in col_w.iter().enumerate() {
        let (ln, idx) = next("column list")?;
        let idx: Vec<usize> = idx.into_iter().filter(|&x| x != 0).collect();
        if idx.len() != w || idx.iter().any(|&r| r > m) {
            return Err(Error::parse(ln, format!("bad entries for column {}", c + 1)));
        }
        for r in idx {
            h.set(r - 1, c, true);
        }
    }
    for (r, &w) in row_w.iter().enumerate() {
        let (ln, idx) = next("row list")?;
        let idx: Vec<usize> = idx.into_iter().filter(|&x| x != 0).collect();
        if idx.len() != w || idx.iter().any(|&c| c == 0 || c > n || !h.get(r, c - 1)) {
            return Err(Error::parse(ln, format!("row {} disagrees with column lists", r + 1)));
        }
    }
    Ok(h)
}

pub fn load_alist(path: impl AsRef<Path>) -> Result<BitMatrix> {
    from_alist(&std::fs::read_to_string(path)?)
}

pub fn save_alist(h: &BitMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_alist(h))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_example() {
        let h = BitMatrix::from_strs(&["1101", "0110"]).unwrap();
        let text = to_alist(&h);
        assert_eq!(text, "4 2\n2 3\n1 2 1 1\n3 2\n1\n1 2\n2\n1\n1 2 4\n2 3\n");
        assert_eq!(from_alist(&text).unwrap(), h);
    }

    #[test]
    fn zero_padding_accepted() {
        let text = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        let h = from_alist(text).unwrap();
        assert_eq!(h, BitMatrix::from_strs(&["110", "011"]).unwrap());
    }

    #[test]
    fn inconsistent_lists_rejected() {
        assert!(from_alist("2 1\n1 2\n1 1\n2\n1\n1\n1 2\n").is_ok());
        assert!(from_alist("2 1\n1 2\n1 1\n2\n1\n1\n1\n").is_err());
        assert!(from_alist("2 1\n1 2\n1 1\n2\n1\n3\n1 2\n").is_err());
        assert!(from_alist("2 1\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(rows in 1usize..12, cols in 1usize..80, seed in any::<u64>()) {
            let mut h = BitMatrix::zeros(rows, cols);
            let mut s = seed;
            for r in 0..rows {
                for c in 0..cols {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    h.set(r, c, s >> 62 == 0);
                }
            }
            prop_assert_eq!(from_alist(&to_alist(&h)).unwrap(), h);
        }
    }
}
