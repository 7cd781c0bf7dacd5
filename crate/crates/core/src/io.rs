//! Plain-text formats for finite systems and finite measures.
//!
//! System table file (`#` comments and blank lines allowed anywhere):
//!
//! ```text
//! # header: group order n, space size m
//! 2 2
//! # identity element index
//! 0
//! # operation table: n rows of n entries, row g lists g∘h for h = 0..n-1
//! 0 1
//! 1 0
//! # action table: n rows of m entries, row g lists g·x for x = 0..m-1
//! 0 1
//! 1 0
//! ```
//!
//! Measure file: a mode header (`rational` or `float`), then one support
//! entry per line — `point numerator denominator` in rational mode, `point
//! value` in float mode. Rational round-trips are lossless; points are plain
//! indices on finite spaces and decimal angles on the circle.

use std::fmt::Display;
use std::str::FromStr;

use num::BigInt;
use thiserror::Error;

use crate::circle::Angle;
use crate::group::{FiniteGroup, GroupError};
use crate::measure::{FiniteMeasure, MeasureError};
use crate::system::{ActionError, FiniteSystem, Point, PointIndex};
use crate::weight::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unexpected end of file: {0}")]
    Truncated(String),
    #[error("group table invalid: {0}")]
    Group(#[from] GroupError),
    #[error("action table invalid: {0}")]
    Action(#[from] ActionError),
    #[error("measure invalid: {0}")]
    Measure(#[from] MeasureError),
}

// Content lines with their 1-based numbers; comments and blanks dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_fields<T: FromStr>(line: usize, text: &str, expected: usize) -> Result<Vec<T>, TextError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(TextError::Parse {
            line,
            message: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    fields
        .into_iter()
        .map(|f| {
            f.parse::<T>().map_err(|_| TextError::Parse {
                line,
                message: format!("cannot parse '{f}'"),
            })
        })
        .collect()
}

/// Parse a finite system from its table file.
pub fn parse_system(text: &str) -> Result<FiniteSystem, TextError> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| TextError::Truncated(what.to_string()))
    };
    let (line, header) = next("header line 'n m'")?;
    let header: Vec<usize> = parse_fields(line, header, 2)?;
    let (order, space) = (header[0], header[1]);
    let (line, identity_text) = next("identity index")?;
    let identity = parse_fields::<usize>(line, identity_text, 1)?[0];
    let mut op_rows = Vec::with_capacity(order);
    for _ in 0..order {
        let (line, row) = next("operation table row")?;
        op_rows.push(parse_fields::<usize>(line, row, order)?);
    }
    let mut action_rows = Vec::with_capacity(order);
    for _ in 0..order {
        let (line, row) = next("action table row")?;
        action_rows.push(parse_fields::<usize>(line, row, space)?);
    }
    let group = FiniteGroup::from_table(op_rows, identity)?;
    Ok(FiniteSystem::new(group, space, action_rows)?)
}

/// Render a finite system in the table-file format.
pub fn system_to_text(sys: &FiniteSystem) -> String {
    let mut out = String::new();
    out.push_str("# finite action system: group order, space size\n");
    out.push_str(&format!("{} {}\n", sys.group().order(), sys.space_size()));
    out.push_str("# identity index\n");
    out.push_str(&format!("{}\n", sys.group().identity().0));
    out.push_str("# operation table\n");
    for row in sys.group().table_rows() {
        out.push_str(&join(row));
        out.push('\n');
    }
    out.push_str("# action table\n");
    for row in sys.action_rows() {
        out.push_str(&join(row));
        out.push('\n');
    }
    out
}

fn join(row: &[usize]) -> String {
    row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// A measure parsed from text, in whichever arithmetic the file declared.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedMeasure<P> {
    Rational(FiniteMeasure<P, Rational>),
    Float(FiniteMeasure<P, f64>),
}

/// Parse a measure file; `parse_point` interprets the point field.
pub fn parse_measure<P: Point>(
    text: &str,
    parse_point: impl Fn(&str) -> Result<P, String>,
) -> Result<ParsedMeasure<P>, TextError> {
    let mut lines = content_lines(text);
    let (line, mode) = lines
        .next()
        .ok_or_else(|| TextError::Truncated("mode header".to_string()))?;
    let rational = match mode {
        "rational" => true,
        "float" => false,
        other => {
            return Err(TextError::Parse {
                line,
                message: format!("mode must be 'rational' or 'float', got '{other}'"),
            })
        }
    };
    let mut rational_entries = Vec::new();
    let mut float_entries = Vec::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split_whitespace().collect();
        let expected = if rational { 3 } else { 2 };
        if fields.len() != expected {
            return Err(TextError::Parse {
                line,
                message: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let point = parse_point(fields[0]).map_err(|message| TextError::Parse { line, message })?;
        if rational {
            let numer = BigInt::from_str(fields[1]).map_err(|_| TextError::Parse {
                line,
                message: format!("bad numerator '{}'", fields[1]),
            })?;
            let denom = BigInt::from_str(fields[2]).map_err(|_| TextError::Parse {
                line,
                message: format!("bad denominator '{}'", fields[2]),
            })?;
            if denom == BigInt::from(0) {
                return Err(TextError::Parse { line, message: "zero denominator".to_string() });
            }
            rational_entries.push((point, Rational::new(numer, denom)));
        } else {
            let value: f64 = fields[1].parse().map_err(|_| TextError::Parse {
                line,
                message: format!("bad weight '{}'", fields[1]),
            })?;
            float_entries.push((point, value));
        }
    }
    if rational {
        Ok(ParsedMeasure::Rational(FiniteMeasure::new(rational_entries)?))
    } else {
        Ok(ParsedMeasure::Float(FiniteMeasure::new(float_entries)?))
    }
}

/// Render in rational mode (lossless round-trip).
pub fn measure_to_text_rational<P: Point + Display>(m: &FiniteMeasure<P, Rational>) -> String {
    let mut out = String::from("rational\n");
    for (p, w) in m.entries() {
        out.push_str(&format!("{p} {} {}\n", w.numer(), w.denom()));
    }
    out
}

/// Render in float mode (shortest round-trip decimal).
pub fn measure_to_text_float<P: Point + Display>(m: &FiniteMeasure<P, f64>) -> String {
    let mut out = String::from("float\n");
    for (p, w) in m.entries() {
        out.push_str(&format!("{p} {w}\n"));
    }
    out
}

/// Point parser for finite spaces: a bare index.
pub fn index_point(space_size: usize) -> impl Fn(&str) -> Result<PointIndex, String> {
    move |text| {
        let i: usize = text
            .parse()
            .map_err(|_| format!("bad point index '{text}'"))?;
        if i >= space_size {
            return Err(format!("point index {i} out of space size {space_size}"));
        }
        Ok(PointIndex(i))
    }
}

/// Point parser for the circle: a decimal angle in `[0, 1)`.
pub fn angle_point(text: &str) -> Result<Angle, String> {
    let value: f64 = text.parse().map_err(|_| format!("bad angle '{text}'"))?;
    if !value.is_finite() {
        return Err(format!("angle '{text}' is not finite"));
    }
    Ok(Angle::new(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::weight::ratio;

    #[test]
    fn system_round_trips_through_text() {
        for (_, sys) in builtin::all_finite() {
            let text = system_to_text(&sys);
            let back = parse_system(&text).unwrap();
            assert_eq!(back, sys);
        }
    }

    #[test]
    fn system_parse_reports_line_numbers() {
        let text = "2 2\n0\n0 1\n1 oops\n0 1\n1 0\n";
        let err = parse_system(text).unwrap_err();
        assert_eq!(
            err,
            TextError::Parse { line: 4, message: "cannot parse 'oops'".to_string() }
        );
    }

    #[test]
    fn corrupted_table_fails_validation() {
        // non-bijective action row for the non-identity element
        let text = "2 2\n0\n0 1\n1 0\n0 1\n0 0\n";
        let err = parse_system(text).unwrap_err();
        assert!(matches!(err, TextError::Action(_)), "{err:?}");
    }

    #[test]
    fn rational_measure_round_trip_is_lossless() {
        let m = FiniteMeasure::new(vec![
            (PointIndex(0), ratio(1, 3)),
            (PointIndex(2), ratio(2, 3)),
        ])
        .unwrap();
        let text = measure_to_text_rational(&m);
        let back = parse_measure(&text, index_point(3)).unwrap();
        assert_eq!(back, ParsedMeasure::Rational(m));
    }

    #[test]
    fn float_measure_round_trip() {
        let m = FiniteMeasure::new(vec![(PointIndex(0), 0.1), (PointIndex(1), 0.9)]).unwrap();
        let text = measure_to_text_float(&m);
        let back = parse_measure(&text, index_point(2)).unwrap();
        assert_eq!(back, ParsedMeasure::Float(m));
    }

    #[test]
    fn angle_measures_parse() {
        let text = "float\n0.25 0.5\n0.75 0.5\n";
        let ParsedMeasure::Float(m) = parse_measure(text, angle_point).unwrap() else {
            panic!("expected float measure");
        };
        assert_eq!(m.weight_of(&Angle::new(0.25)), 0.5);
    }

    #[test]
    fn measure_parse_diagnostics() {
        let err = parse_measure("rational\n0 1\n", index_point(2)).unwrap_err();
        assert!(matches!(err, TextError::Parse { line: 2, .. }));
        let err = parse_measure("decimal\n", index_point(2)).unwrap_err();
        assert!(matches!(err, TextError::Parse { line: 1, .. }));
        // bad mass surfaces as a measure error
        let err = parse_measure("rational\n0 1 3\n", index_point(2)).unwrap_err();
        assert!(matches!(err, TextError::Measure(_)));
    }
}
