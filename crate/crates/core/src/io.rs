//! Text formats for value tables and sparse coefficient maps.
//!
//! Value table:
//!
//! ```text
//! d=2
//! 0 0
//! 1 1.5
//! 2 -2
//! 3 4
//! ```
//!
//! One `<hex mask> <decimal value>` line per coalition, all `2^d` masks
//! exactly once in any order. Coefficient maps use the header
//! `d=<int> basis=<mobius|fourier>` followed by the same line shape, listing
//! only non-zero entries.

use std::fmt::Write as _;
use std::path::Path;

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::game::{check_table_dim, GameTable};
use crate::transforms::{Basis, CoefficientMap};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_dim(token: &str, line: usize) -> Result<usize> {
    token
        .strip_prefix("d=")
        .ok_or_else(|| parse_err(line, format!("expected `d=<int>`, got `{token}`")))?
        .parse()
        .map_err(|e| parse_err(line, format!("bad dimension: {e}")))
}

fn parse_mask(token: &str, line: usize) -> Result<u128> {
    let hex = token
        .strip_prefix("0x")
        .or_else(|| token.strip_prefix("0X"))
        .unwrap_or(token);
    u128::from_str_radix(hex, 16).map_err(|e| parse_err(line, format!("bad mask `{token}`: {e}")))
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|e| parse_err(line, format!("bad value `{token}`: {e}")))?;
    if !v.is_finite() {
        return Err(Error::NonFiniteValue { line });
    }
    Ok(v)
}

// Yields (1-based line number, mask token, value token) for each data line.
fn data_lines(body: &str) -> impl Iterator<Item = Result<(usize, &str, &str)>> {
    body.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            let line = k + 1;
            let mut parts = l.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(m), Some(v), None) => Ok((line, m, v)),
                _ => Err(parse_err(line, "expected `<hex mask> <value>`")),
            }
        })
}

pub fn parse_table(text: &str) -> Result<GameTable> {
    let header = text
        .lines()
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let d = parse_dim(header.trim(), 1)?;
    check_table_dim(d)?;
    let n = 1usize << d;
    let mut values: Vec<Option<f64>> = vec![None; n];
    for item in data_lines(text) {
        let (line, m, v) = item?;
        let mask = parse_mask(m, line)?;
        if mask >= n as u128 {
            return Err(parse_err(
                line,
                format!("mask {mask:#x} out of range for d={d}"),
            ));
        }
        let value = parse_value(v, line)?;
        let slot = &mut values[mask as usize];
        if slot.is_some() {
            return Err(Error::DuplicateMask {
                line,
                mask: mask as usize,
            });
        }
        *slot = Some(value);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(mask, v)| v.ok_or(Error::IncompleteTable { mask }))
        .collect::<Result<Vec<f64>>>()?;
    GameTable::new(d, values)
}

pub fn load_table_game(path: impl AsRef<Path>) -> Result<GameTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text)
}

pub fn format_table(table: &GameTable) -> String {
    let mut out = format!("d={}\n", table.d());
    for (mask, v) in table.values().iter().enumerate() {
        writeln!(out, "{mask:x} {v:?}").expect("writing to String");
    }
    out
}

pub fn save_table(table: &GameTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_table(table)).map_err(|e| Error::io(path, e))
}

pub fn parse_coefficients(text: &str) -> Result<CoefficientMap> {
    let header = text
        .lines()
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let mut tokens = header.split_whitespace();
    let d = parse_dim(tokens.next().unwrap_or(""), 1)?;
    if d > MAX_PLAYERS {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_PLAYERS,
        });
    }
    let basis: Basis = tokens
        .next()
        .and_then(|t| t.strip_prefix("basis="))
        .ok_or_else(|| parse_err(1, "expected `basis=<mobius|fourier>`"))?
        .parse()
        .map_err(|e: Error| parse_err(1, e.to_string()))?;
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for item in data_lines(text) {
        let (line, m, v) = item?;
        let bits = parse_mask(m, line)?;
        let t = Coalition::from_bits(d, bits)
            .map_err(|_| parse_err(line, format!("mask {bits:#x} out of range for d={d}")))?;
        if !seen.insert(t) {
            return Err(parse_err(line, format!("duplicate mask {bits:#x}")));
        }
        entries.push((t, parse_value(v, line)?));
    }
    CoefficientMap::from_entries(d, basis, entries)
}

pub fn format_coefficients(map: &CoefficientMap) -> String {
    let mut out = format!("d={} basis={}\n", map.d(), map.basis());
    for (t, v) in map.iter() {
        writeln!(out, "{:x} {v:?}", t.bits()).expect("writing to String");
    }
    out
}

pub fn load_coefficients(path: impl AsRef<Path>) -> Result<CoefficientMap> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coefficients(&text)
}

pub fn save_coefficients(map: &CoefficientMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_coefficients(map)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::fourier_transform;
    use proptest::prelude::*;

    #[test]
    fn parses_small_table() {
        let t = parse_table("d=2\n0 0\n1 1\n2 2\n3 4\n").unwrap();
        assert_eq!(t.d(), 2);
        assert_eq!(t.values(), &[0.0, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn any_line_order_and_hex_prefix() {
        let t = parse_table("d=2\n0x3 4\n1 1\n0 0\n2 2\n").unwrap();
        assert_eq!(t.values(), &[0.0, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn missing_mask_is_incomplete() {
        let err = parse_table("d=2\n0 0\n1 1\n2 2\n").unwrap_err();
        assert!(matches!(err, Error::IncompleteTable { mask: 3 }), "{err}");
    }

    #[test]
    fn duplicate_mask_is_rejected() {
        let err = parse_table("d=1\n0 0\n1 1\n1 2\n").unwrap_err();
        assert!(
            matches!(err, Error::DuplicateMask { line: 4, mask: 1 }),
            "{err}"
        );
    }

    #[test]
    fn nan_is_non_finite() {
        let err = parse_table("d=1\n0 NaN\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { line: 2 }), "{err}");
        let err = parse_table("d=1\n0 inf\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { .. }));
    }

    #[test]
    fn oversized_dimension_is_rejected() {
        let err = parse_table("d=25\n").unwrap_err();
        assert!(matches!(err, Error::DimensionTooLarge { d: 25, max: 24 }));
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(
            parse_table("x=2\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_table("d=1\n0 0 0\n1 1\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_table("d=1\n0 0\n5 1\n").unwrap_err(),
            Error::Parse { line: 3, .. }
        ));
    }

    #[test]
    fn coefficient_file_header() {
        let map = parse_coefficients("d=3 basis=fourier\n0 1.75\n5 -0.25\n").unwrap();
        assert_eq!(map.basis(), Basis::Fourier);
        assert_eq!(map.len(), 2);
        assert_eq!(map.get(&Coalition::from_bits(3, 5).unwrap()), -0.25);
        assert!(parse_coefficients("d=3 basis=haar\n").is_err());
        assert!(parse_coefficients("d=2 basis=mobius\n4 1\n").is_err());
    }

    proptest! {
        #[test]
        fn table_text_round_trip(d in 0usize..6, seed in 0u64..100) {
            let table = GameTable::random(d, seed).unwrap();
            prop_assert_eq!(parse_table(&format_table(&table)).unwrap(), table);
        }

        #[test]
        fn coefficient_text_round_trip(d in 1usize..7, seed in 0u64..100) {
            let beta = fourier_transform(&GameTable::random(d, seed).unwrap()).unwrap();
            prop_assert_eq!(parse_coefficients(&format_coefficients(&beta)).unwrap(), beta);
        }
    }
}
