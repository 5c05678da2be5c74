//! Coefficient files and CSV export.
//!
//! Coefficients: `{"n": 3, "L": int, "coeffs": [[l, m, re, im], …]}`;
//! missing entries are zero. Grid functions: CSV with header
//! `theta,phi,re,im`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use super::coeffs::HarmonicCoeffs;
use super::grid::GridFunction;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct CoeffFile {
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    coeffs: Vec<(i64, i64, f64, f64)>,
}

pub fn coeffs_to_json(c: &HarmonicCoeffs) -> String {
    let mut coeffs = Vec::new();
    for l in 0..=c.l_max() {
        for m in -(l as i64)..=(l as i64) {
            let v = c.get(l, m);
            if v != Complex64::new(0.0, 0.0) {
                coeffs.push((l as i64, m, v.re, v.im));
            }
        }
    }
    serde_json::to_string_pretty(&CoeffFile { n: 3, l: c.l_max(), coeffs }).expect("plain data serializes")
}

pub fn coeffs_from_json(text: &str) -> Result<HarmonicCoeffs> {
    let file: CoeffFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.n != 3 {
        return Err(Error::Parse(format!("coefficient files describe S² (n = 3), got n = {}", file.n)));
    }
    let mut c = HarmonicCoeffs::zeros(file.l);
    for (l, m, re, im) in file.coeffs {
        if l < 0 || l as usize > file.l || m.abs() > l {
            return Err(Error::Parse(format!("entry (l={l}, m={m}) outside 0 <= l <= {}, |m| <= l", file.l)));
        }
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::NonFinite("coefficient file entry"));
        }
        c.set(l as usize, m, Complex64::new(re, im));
    }
    Ok(c)
}

pub fn read_coeffs(path: &Path) -> Result<HarmonicCoeffs> {
    coeffs_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_coeffs(path: &Path, c: &HarmonicCoeffs) -> Result<()> {
    std::fs::write(path, coeffs_to_json(c))?;
    Ok(())
}

pub fn write_grid_csv<W: Write>(mut w: W, f: &GridFunction) -> Result<()> {
    let grid = f.grid();
    writeln!(w, "theta,phi,re,im")?;
    for i in 0..grid.n_theta() {
        let theta = grid.theta(i);
        for j in 0..grid.n_phi() {
            let v = f.values()[i * grid.n_phi() + j];
            writeln!(w, "{:.12e},{:.12e},{:.12e},{:.12e}", theta, grid.phi(j), v.re, v.im)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphgrid::Grid;

    #[test]
    fn json_round_trip() {
        let mut c = HarmonicCoeffs::zeros(3);
        c.set(2, -1, Complex64::new(0.5, -0.25));
        c.set(0, 0, Complex64::new(1.0, 0.0));
        let back = coeffs_from_json(&coeffs_to_json(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_rejects_bad_entries() {
        assert!(coeffs_from_json(r#"{"n":3,"L":1,"coeffs":[[2,0,1,0]]}"#).is_err());
        assert!(coeffs_from_json(r#"{"n":3,"L":2,"coeffs":[[1,2,1,0]]}"#).is_err());
        assert!(coeffs_from_json(r#"{"n":4,"L":2,"coeffs":[]}"#).is_err());
        assert!(coeffs_from_json("not json").is_err());
    }

    #[test]
    fn csv_shape() {
        let g = Grid::new(2).unwrap();
        let f = GridFunction::constant(g.clone(), Complex64::new(1.0, 0.0));
        let mut out = Vec::new();
        write_grid_csv(&mut out, &f).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + g.len());
        assert!(text.starts_with("theta,phi,re,im\n"));
    }
}
