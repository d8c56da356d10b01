//! UC instance text format (`n L` header, then `A B C p_min p_max` per
//! unit) and the scan CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{ScanPoint, UcInstance, UcUnit};
use crate::error::{Error, Result};
use crate::Scalar;

pub fn write_uc<T: Scalar>(uc: &UcInstance<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", uc.len(), uc.load());
    for u in uc.units() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            u.fixed_cost, u.linear_cost, u.quadratic_cost, u.p_min, u.p_max
        );
    }
    out
}

pub fn save_uc<T: Scalar>(uc: &UcInstance<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_uc(uc))?;
    Ok(())
}

pub fn load_uc<T: Scalar>(path: impl AsRef<Path>) -> Result<UcInstance<T>> {
    parse_uc(&fs::read_to_string(path)?)
}

pub fn parse_uc<T: Scalar>(text: &str) -> Result<UcInstance<T>> {
    const FIELDS: [&str; 5] = ["A", "B", "C", "p_min", "p_max"];
    let mut header: Option<(usize, T)> = None;
    let mut units = Vec::new();
    let parse_err = |line: usize, field: &str, message: String| Error::Parse {
        line,
        field: field.to_string(),
        message,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                let n: usize = toks
                    .first()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "n", format!("bad unit count in {line:?}")))?;
                let load: T = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(line_no, "L", format!("bad load in {line:?}")))?;
                header = Some((n, load));
            }
            Some((n, _)) => {
                if units.len() == n {
                    return Err(parse_err(line_no, "unit", format!("more than the declared {n} units")));
                }
                if toks.len() != FIELDS.len() {
                    return Err(parse_err(line_no, "unit", format!("expected 5 fields, got {}", toks.len())));
                }
                let mut vals = [T::zero(); 5];
                for (k, (tok, name)) in toks.iter().zip(FIELDS).enumerate() {
                    vals[k] = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, name, format!("not a number: {tok:?}")))?;
                }
                let unit = UcUnit::new(vals[0], vals[1], vals[2], vals[3], vals[4])
                    .map_err(|e| parse_err(line_no, "unit", e.to_string()))?;
                units.push(unit);
            }
        }
    }
    let (n, load) = header.ok_or_else(|| parse_err(1, "header", "empty file".into()))?;
    if units.len() != n {
        return Err(parse_err(text.lines().count(), "unit", format!("declared {n} units, found {}", units.len())));
    }
    UcInstance::new(units, load)
}

/// `D,cost,feasible` rows; infeasible points carry `inf`.
pub fn write_scan_csv<T: Scalar>(points: &[ScanPoint<T>]) -> String {
    let mut out = String::from("D,cost,feasible\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.marginal, p.cost, p.feasible);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uc::{random_uc, UcRanges};

    #[test]
    fn round_trip() {
        let uc = random_uc::<f64>(7, &UcRanges::standard(), 0.4, 9).unwrap();
        assert_eq!(parse_uc::<f64>(&write_uc(&uc)).unwrap(), uc);
    }

    #[test]
    fn parse_errors_name_fields() {
        let err = parse_uc::<f64>("1 10\n1 1 0 0 20\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_uc::<f64>("1 10\n1 x 0.1 0 20\n").unwrap_err();
        assert!(matches!(err, Error::Parse { ref field, .. } if field == "B"), "{err}");
        assert!(parse_uc::<f64>("2 10\n1 1 0.1 0 20\n").is_err());
    }
}
