//! Line-oriented instance files and the JSON mirror.
//!
//! ```text
//! # optional comments; `# id: <label>` sets the instance id
//! n capacity
//! value weight     (n lines)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Item, KnapsackInstance};
use crate::error::{Error, Result};
use crate::Scalar;

const ID_TAG: &str = "# id:";

pub fn write_instance<T: Scalar>(inst: &KnapsackInstance<T>) -> String {
    let mut out = String::new();
    if !inst.id().is_empty() {
        let _ = writeln!(out, "{ID_TAG} {}", inst.id());
    }
    let _ = writeln!(out, "{} {}", inst.len(), inst.capacity());
    for it in inst.items() {
        let _ = writeln!(out, "{} {}", it.value, it.weight);
    }
    out
}

pub fn save_instance<T: Scalar>(inst: &KnapsackInstance<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_instance(inst))?;
    Ok(())
}

pub fn load_instance<T: Scalar>(path: impl AsRef<Path>) -> Result<KnapsackInstance<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_instance(&text, &fallback)
}

fn parse_field<T: Scalar>(tok: Option<&str>, line: usize, field: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        field: field.into(),
        message: "missing".into(),
    })?;
    let x: T = tok.parse().map_err(|_| Error::Parse {
        line,
        field: field.into(),
        message: format!("not a number: {tok:?}"),
    })?;
    if !x.is_finite() {
        return Err(Error::Parse {
            line,
            field: field.into(),
            message: format!("not finite: {tok:?}"),
        });
    }
    Ok(x)
}

/// Parse the text format. `default_id` is used when no `# id:` line exists.
pub fn parse_instance<T: Scalar>(text: &str, default_id: &str) -> Result<KnapsackInstance<T>> {
    let mut id = default_id.to_string();
    let mut header: Option<(usize, T)> = None;
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix(ID_TAG) {
            id = rest.trim().to_string();
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match header {
            None => {
                let n_tok = toks.next();
                let n: usize = n_tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
                    line: line_no,
                    field: "n".into(),
                    message: format!("expected item count, got {n_tok:?}"),
                })?;
                let cap: T = parse_field(toks.next(), line_no, "capacity")?;
                if cap <= T::zero() {
                    return Err(Error::Parse {
                        line: line_no,
                        field: "capacity".into(),
                        message: format!("must be positive, got {cap}"),
                    });
                }
                if n == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        field: "n".into(),
                        message: "instance needs at least one item".into(),
                    });
                }
                header = Some((n, cap));
            }
            Some((n, _)) => {
                if items.len() == n {
                    return Err(Error::Parse {
                        line: line_no,
                        field: "item".into(),
                        message: format!("more than the declared {n} items"),
                    });
                }
                let value: T = parse_field(toks.next(), line_no, "value")?;
                let weight: T = parse_field(toks.next(), line_no, "weight")?;
                if weight <= T::zero() {
                    return Err(Error::Parse {
                        line: line_no,
                        field: "weight".into(),
                        message: format!("must be positive, got {weight}"),
                    });
                }
                if value < T::zero() {
                    return Err(Error::Parse {
                        line: line_no,
                        field: "value".into(),
                        message: format!("must be nonnegative, got {value}"),
                    });
                }
                if toks.next().is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        field: "item".into(),
                        message: "trailing tokens".into(),
                    });
                }
                items.push(Item::new(value, weight));
            }
        }
    }
    let (n, capacity) = header.ok_or_else(|| Error::Parse {
        line: 1,
        field: "header".into(),
        message: "empty file".into(),
    })?;
    if items.len() != n {
        return Err(Error::Parse {
            line: text.lines().count(),
            field: "item".into(),
            message: format!("declared {n} items, found {}", items.len()),
        });
    }
    KnapsackInstance::new(id, items, capacity)
}

pub fn save_instance_json<T: Scalar>(inst: &KnapsackInstance<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(inst)?)?;
    Ok(())
}

pub fn load_instance_json<T: Scalar>(path: impl AsRef<Path>) -> Result<KnapsackInstance<T>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
