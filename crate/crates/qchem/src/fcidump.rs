//! FCIDUMP reading and writing.
//!
//! Records are `value i j k l` with 1-based spatial indices in chemists'
//! notation. `(ij|kl)` has all four indices set, one-body `h_ij` has `k = l = 0`,
//! and the core energy has all four zero. Orbital-energy records
//! (`i j k l = i 0 0 0`) are accepted and ignored.

use std::fmt::Write as _;

use qchem_core::fermion::{MolecularIntegrals, SpinOrdering};

use crate::error::{Error, Result};

/// Records equal under the 8-fold symmetry must agree to this tolerance.
pub const SYMMETRY_TOL: f64 = 1e-8;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Integer value of `key=` in a namelist header.
fn header_int(header: &str, key: &str) -> Option<i64> {
    let upper = header.to_ascii_uppercase();
    let mut from = 0;
    while let Some(pos) = upper[from..].find(key) {
        let start = from + pos;
        from = start + key.len();
        let before_ok = start == 0 || !upper.as_bytes()[start - 1].is_ascii_alphanumeric();
        let rest = upper[from..].trim_start();
        if !before_ok || !rest.starts_with('=') {
            continue;
        }
        let rest = rest[1..].trim_start();
        let end = rest.find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '+')).unwrap_or(rest.len());
        return rest[..end].parse().ok();
    }
    None
}

fn parse_value(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "E").parse().ok()
}

/// Parse FCIDUMP text into integrals with the given spin-orbital ordering.
pub fn parse_fcidump(text: &str, ordering: SpinOrdering) -> Result<MolecularIntegrals> {
    let lines: Vec<&str> = text.lines().collect();
    let end = lines
        .iter()
        .position(|l| {
            let t = l.trim().to_ascii_uppercase();
            t.starts_with("&END") || t.ends_with('/') || t.ends_with("&END")
        })
        .ok_or_else(|| parse_err(1, "missing &END terminating the header"))?;
    let header = lines[..=end].join(" ");
    if !header.to_ascii_uppercase().contains("&FCI") {
        return Err(parse_err(1, "header must start with &FCI"));
    }
    let norb = header_int(&header, "NORB").ok_or_else(|| parse_err(1, "NORB missing from header"))?;
    let nelec = header_int(&header, "NELEC").ok_or_else(|| parse_err(1, "NELEC missing from header"))?;
    let ms2 = header_int(&header, "MS2").unwrap_or(0);
    if norb < 0 || nelec < 0 {
        return Err(parse_err(1, "NORB and NELEC must be non-negative"));
    }
    let n = norb as usize;
    let mut one = vec![0.0; n * n];
    let mut one_set = vec![false; n * n];
    let mut two = vec![0.0; n * n * n * n];
    let mut two_set = vec![false; n * n * n * n];
    let mut core = 0.0;

    for (k, raw) in lines.iter().enumerate().skip(end + 1) {
        let line = k + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 5 {
            return Err(parse_err(line, format!("expected `value i j k l`, found {} fields", tokens.len())));
        }
        let value = parse_value(tokens[0]).ok_or_else(|| parse_err(line, format!("bad value `{}`", tokens[0])))?;
        let mut idx = [0usize; 4];
        for (slot, t) in idx.iter_mut().zip(&tokens[1..]) {
            let v: usize = t.parse().map_err(|_| parse_err(line, format!("bad index `{t}`")))?;
            if v > n {
                return Err(parse_err(line, format!("index {v} exceeds NORB = {n}")));
            }
            *slot = v;
        }
        let [i, j, kk, l] = idx;
        match (i > 0, j > 0, kk > 0, l > 0) {
            (true, true, true, true) => {
                let (i, j, kk, l) = (i - 1, j - 1, kk - 1, l - 1);
                for (a, b, c, d) in [
                    (i, j, kk, l),
                    (j, i, kk, l),
                    (i, j, l, kk),
                    (j, i, l, kk),
                    (kk, l, i, j),
                    (l, kk, i, j),
                    (kk, l, j, i),
                    (l, kk, j, i),
                ] {
                    let at = ((a * n + b) * n + c) * n + d;
                    if two_set[at] && (two[at] - value).abs() > SYMMETRY_TOL {
                        return Err(Error::SymmetryViolation {
                            line,
                            i: i + 1,
                            j: j + 1,
                            k: kk + 1,
                            l: l + 1,
                            value,
                            previous: two[at],
                        });
                    }
                    two[at] = value;
                    two_set[at] = true;
                }
            }
            (true, true, false, false) => {
                let (i, j) = (i - 1, j - 1);
                for at in [i * n + j, j * n + i] {
                    if one_set[at] && (one[at] - value).abs() > SYMMETRY_TOL {
                        return Err(Error::SymmetryViolation {
                            line,
                            i: i + 1,
                            j: j + 1,
                            k: 0,
                            l: 0,
                            value,
                            previous: one[at],
                        });
                    }
                    one[at] = value;
                    one_set[at] = true;
                }
            }
            (true, false, false, false) => {}
            (false, false, false, false) => core += value,
            _ => return Err(parse_err(line, format!("unsupported index pattern {i} {j} {kk} {l}"))),
        }
    }
    let ints = MolecularIntegrals::from_spatial(n, one, two, core, nelec as usize, ms2 as i32, ordering)
        .map_err(|e| parse_err(1, format!("inconsistent header: {e}")))?;
    Ok(ints)
}

/// Write integrals as FCIDUMP text, one record per symmetry-unique nonzero
/// integral. Values use the shortest exact decimal form.
pub fn emit_fcidump(ints: &MolecularIntegrals) -> String {
    let n = ints.n_orbitals;
    let mut out = String::new();
    let _ = writeln!(out, " &FCI NORB={n},NELEC={},MS2={},", ints.n_electrons, ints.ms2);
    let _ = writeln!(out, "  ORBSYM={}", "1,".repeat(n));
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(k, l) > pair(i, j) {
                        continue;
                    }
                    let v = ints.spatial_two(i, j, k, l);
                    if v != 0.0 {
                        let _ = writeln!(out, " {v:e} {} {} {} {}", i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.spatial_one(i, j);
            if v != 0.0 {
                let _ = writeln!(out, " {v:e} {} {} 0 0", i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, " {:e} 0 0 0 0", ints.core_energy);
    out
}

/// A square whitespace-separated matrix, returned as `(n, row-major values)`.
pub fn parse_rdm1(text: &str) -> Result<(usize, Vec<f64>)> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let row = raw
            .split_whitespace()
            .map(|t| parse_value(t).ok_or_else(|| parse_err(k + 1, format!("bad value `{t}`"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    for (k, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(parse_err(k + 1, format!("row has {} entries, expected {n}", r.len())));
        }
    }
    Ok((n, rows.concat()))
}
