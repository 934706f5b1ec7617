//! Self-describing matrix files over a [`BasisSet`].
//!
//! Text layout:
//!
//! ```text
//! # gdf-matrix v1
//! # rows R cols C row-major
//! # basis i j k l          (one "# label" line per row when labelled)
//! # label 0 0 0 0
//! v_00 v_01 ... v_0C
//! ...
//! ```
//!
//! Values use the shortest representation that parses back to the same
//! `f64`. Binary layout, all little-endian: magic `GDFMAT01`, `u64` rows,
//! `u64` cols, `u64` label count, labels as four `u32` each, then
//! `rows * cols` `f64` values row-major.

use std::io::{BufRead, Read, Write};

use nalgebra::DMatrix;

use super::basis::{BasisSet, MonomialIndex};
use crate::error::{domain, Result};

const TEXT_MAGIC: &str = "# gdf-matrix v1";
const BINARY_MAGIC: &[u8; 8] = b"GDFMAT01";

fn labels_for(m: &DMatrix<f64>, basis: Option<&BasisSet>) -> Result<Vec<MonomialIndex>> {
    match basis {
        None => Ok(Vec::new()),
        Some(b) if b.len() == m.nrows() && m.is_square() => Ok(b.indices().to_vec()),
        Some(b) => Err(domain(format!(
            "basis of size {} does not label a {}x{} matrix",
            b.len(),
            m.nrows(),
            m.ncols()
        ))),
    }
}

pub fn write_matrix_text<W: Write>(out: &mut W, m: &DMatrix<f64>, basis: Option<&BasisSet>) -> Result<()> {
    let labels = labels_for(m, basis)?;
    writeln!(out, "{TEXT_MAGIC}")?;
    writeln!(out, "# rows {} cols {} row-major", m.nrows(), m.ncols())?;
    if !labels.is_empty() {
        writeln!(out, "# basis i j k l")?;
        for l in &labels {
            writeln!(out, "# label {} {} {} {}", l.i, l.j, l.k, l.l)?;
        }
    }
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:e}", m[(r, c)])).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix_text<R: BufRead>(input: R) -> Result<(DMatrix<f64>, Vec<MonomialIndex>)> {
    let mut lines = input.lines();
    let bad = |msg: &str| domain(format!("matrix text: {msg}"));
    if lines.next().transpose()?.as_deref() != Some(TEXT_MAGIC) {
        return Err(bad("missing header"));
    }
    let dims = lines.next().transpose()?.ok_or_else(|| bad("missing dimensions"))?;
    let parts: Vec<&str> = dims.split_whitespace().collect();
    let (rows, cols) = match parts.as_slice() {
        ["#", "rows", r, "cols", c, "row-major"] => (
            r.parse::<usize>().map_err(|_| bad("rows"))?,
            c.parse::<usize>().map_err(|_| bad("cols"))?,
        ),
        _ => return Err(bad("malformed dimension line")),
    };
    let mut labels = Vec::new();
    let mut values = Vec::with_capacity(rows * cols);
    for line in lines {
        let line = line?;
        if let Some(rest) = line.strip_prefix("# label ") {
            let e: Vec<u32> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("label")))
                .collect::<Result<_>>()?;
            if e.len() != 4 {
                return Err(bad("label needs four exponents"));
            }
            labels.push(MonomialIndex::new(e[0], e[1], e[2], e[3]));
        } else if line.starts_with('#') {
            continue;
        } else {
            for t in line.split_whitespace() {
                values.push(t.parse::<f64>().map_err(|_| bad("value"))?);
            }
        }
    }
    if values.len() != rows * cols {
        return Err(bad("value count does not match dimensions"));
    }
    Ok((DMatrix::from_row_slice(rows, cols, &values), labels))
}

pub fn write_matrix_binary<W: Write>(out: &mut W, m: &DMatrix<f64>, basis: Option<&BasisSet>) -> Result<()> {
    let labels = labels_for(m, basis)?;
    out.write_all(BINARY_MAGIC)?;
    for v in [m.nrows() as u64, m.ncols() as u64, labels.len() as u64] {
        out.write_all(&v.to_le_bytes())?;
    }
    for l in &labels {
        for e in l.exponents() {
            out.write_all(&e.to_le_bytes())?;
        }
    }
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.write_all(&m[(r, c)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix_binary<R: Read>(input: &mut R) -> Result<(DMatrix<f64>, Vec<MonomialIndex>)> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(domain("matrix binary: bad magic"));
    }
    let mut u64buf = [0u8; 8];
    let mut header = [0u64; 3];
    for h in &mut header {
        input.read_exact(&mut u64buf)?;
        *h = u64::from_le_bytes(u64buf);
    }
    let [rows, cols, count] = header.map(|v| v as usize);
    let mut labels = Vec::with_capacity(count);
    let mut u32buf = [0u8; 4];
    for _ in 0..count {
        let mut e = [0u32; 4];
        for x in &mut e {
            input.read_exact(&mut u32buf)?;
            *x = u32::from_le_bytes(u32buf);
        }
        labels.push(MonomialIndex::from_array(e));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        input.read_exact(&mut u64buf)?;
        values.push(f64::from_le_bytes(u64buf));
    }
    Ok((DMatrix::from_row_slice(rows, cols, &values), labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::gram_matrix;

    #[test]
    fn roundtrips() {
        let basis = BasisSet::new(2);
        let mut g = gram_matrix(5, 2);
        g[(1, 1)] = 0.1 + 0.2;
        g[(0, 0)] = -1.0e-300;
        let mut text = Vec::new();
        write_matrix_text(&mut text, &g, Some(&basis)).unwrap();
        let (back, labels) = read_matrix_text(text.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(labels, basis.indices());
        let mut bin = Vec::new();
        write_matrix_binary(&mut bin, &g, Some(&basis)).unwrap();
        let (back, labels) = read_matrix_binary(&mut bin.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(labels, basis.indices());
    }

    #[test]
    fn unlabelled_and_malformed() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut text = Vec::new();
        write_matrix_text(&mut text, &m, None).unwrap();
        let (back, labels) = read_matrix_text(text.as_slice()).unwrap();
        assert_eq!(back, m);
        assert!(labels.is_empty());
        assert!(write_matrix_text(&mut Vec::new(), &m, Some(&BasisSet::new(1))).is_err());
        assert!(read_matrix_text("nope\n".as_bytes()).is_err());
        assert!(read_matrix_binary(&mut &b"GDFMAT01"[..]).is_err());
    }
}
