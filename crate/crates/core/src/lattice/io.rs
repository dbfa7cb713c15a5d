//! Text serialisation of scalar fields.
//!
//! ```text
//! # lattice-dse scalar field
//! d <dimension>
//! L <sites per axis>
//! a <spacing>
//! <value of site 0>
//! ...
//! <value of site L^d - 1>
//! ```
//!
//! Values are written one per line in row-major site order with 17
//! significant digits, so a write/read cycle is exact for `f64`.
//! Blank lines and further `#` comment lines are ignored on input.

use std::io::{BufRead, Write};

use super::{LatticeSpec, ScalarField};
use crate::error::{Error, Result};
use crate::real::Real;

pub const FIELD_MAGIC: &str = "# lattice-dse scalar field";

pub fn write_field<T: Real, W: Write>(field: &ScalarField<T>, mut out: W) -> Result<()> {
    let lat = field.lattice();
    writeln!(out, "{FIELD_MAGIC}")?;
    writeln!(out, "d {}", lat.dim())?;
    writeln!(out, "L {}", lat.extent())?;
    writeln!(out, "a {:.16e}", lat.spacing().to_f64_lossy())?;
    for v in field.values() {
        writeln!(out, "{:.16e}", v.to_f64_lossy())?;
    }
    Ok(())
}

pub fn read_field<T: Real, R: BufRead>(input: R) -> Result<ScalarField<T>> {
    let mut lines = input
        .lines()
        .map(|l| l.map(|s| s.trim().to_owned()))
        .filter(|l| !matches!(l, Ok(s) if s.is_empty() || (s.starts_with('#'))));
    let mut header = |key: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("missing header `{key}`")))??;
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(v), None) if k == key => Ok(v.to_owned()),
            _ => Err(Error::Format(format!(
                "expected `{key} <value>`, found `{line}`"
            ))),
        }
    };
    let d: usize = header("d")?
        .parse()
        .map_err(|e| Error::Format(format!("d: {e}")))?;
    let l: usize = header("L")?
        .parse()
        .map_err(|e| Error::Format(format!("L: {e}")))?;
    let a: f64 = header("a")?
        .parse()
        .map_err(|e| Error::Format(format!("a: {e}")))?;
    let lattice = LatticeSpec::new(d, l, T::lit(a))?;
    let values = lines
        .map(|line| {
            let line = line?;
            line.parse::<f64>()
                .map(T::lit)
                .map_err(|e| Error::Format(format!("value `{line}`: {e}")))
        })
        .collect::<Result<Vec<T>>>()?;
    ScalarField::new(lattice, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn write_read_is_exact(values in proptest::collection::vec(-1e6f64..1e6, 9), a in 0.01f64..3.0) {
            let lat = LatticeSpec::new(2, 3, a).unwrap();
            let f = ScalarField::new(lat, values).unwrap();
            let mut buf = Vec::new();
            write_field(&f, &mut buf).unwrap();
            let g: ScalarField<f64> = read_field(buf.as_slice()).unwrap();
            prop_assert_eq!(f, g);
        }
    }

    #[test]
    fn rejects_malformed() {
        let bad = "# lattice-dse scalar field\nd 1\nL 3\na 1.0\n1.0\n2.0\n";
        assert!(read_field::<f64, _>(bad.as_bytes()).is_err());
        let bad = "d 1\nX 3\n";
        assert!(read_field::<f64, _>(bad.as_bytes()).is_err());
    }
}
