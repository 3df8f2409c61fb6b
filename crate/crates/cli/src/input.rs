//! Distribution files and alienation descriptors.

use std::fs;
use std::io::Write;
use std::path::Path;

use polarimeter::{Alienation, Distribution, Error as CoreError};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Line of the first data row; line 1 is the header.
const FIRST_DATA_LINE: u64 = 2;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

/// Reads a distribution from CSV (header `pi,y`) or, for a `.json`
/// extension, from an object with `pi` and `y` arrays. Groups sharing a
/// characteristic value are rejected unless `merge_duplicates` is set.
pub fn parse_distribution_file(path: &Path, merge_duplicates: bool) -> Result<Distribution> {
    let text = read(path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        parse_distribution_json(path, &text, merge_duplicates)
    } else {
        parse_distribution_csv(path, &text, merge_duplicates)
    }
}

#[derive(Deserialize)]
struct JsonDistribution {
    pi: Vec<f64>,
    y: Vec<f64>,
}

fn parse_distribution_json(path: &Path, text: &str, merge_duplicates: bool) -> Result<Distribution> {
    let raw: JsonDistribution =
        serde_json::from_str(text).map_err(|e| parse_error(path, e.line() as u64, e.to_string()))?;
    build(path, &raw.pi, &raw.y, merge_duplicates, None)
}

pub fn parse_distribution_csv(path: &Path, text: &str, merge_duplicates: bool) -> Result<Distribution> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_error(path, 1, e.to_string()))?;
    if headers.len() != 2 || &headers[0] != "pi" || &headers[1] != "y" {
        return Err(parse_error(
            path,
            1,
            format!(
                "expected header `pi,y`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut pi = Vec::new();
    let mut y = Vec::new();
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record
            .position()
            .map_or(FIRST_DATA_LINE + lines.len() as u64, |p| p.line());
        let field = |k: usize, name: &str| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .map_err(|_| parse_error(path, line, format!("{name} value {:?} is not a number", &record[k])))
        };
        pi.push(field(0, "pi")?);
        y.push(field(1, "y")?);
        lines.push(line);
    }
    build(path, &pi, &y, merge_duplicates, Some(&lines))
}

/// Validates parsed columns, attributing row errors to `lines` when given.
fn build(path: &Path, pi: &[f64], y: &[f64], merge_duplicates: bool, lines: Option<&[u64]>) -> Result<Distribution> {
    let row_error = |index: usize, source: CoreError| match lines {
        Some(lines) => CliError::Row {
            path: path.to_owned(),
            line: lines.get(index).copied().unwrap_or(FIRST_DATA_LINE + index as u64),
            source,
        },
        None => CliError::Core(source),
    };
    let attribute = |e: CoreError| match e {
        CoreError::NonIntegralPopulation { index, .. } | CoreError::NonFiniteCharacteristic { index, .. } => {
            row_error(index, e)
        }
        CoreError::DuplicateCharacteristic { second, .. } => row_error(second, e),
        other => CliError::Core(other),
    };
    if !merge_duplicates {
        return polarimeter::validate_distribution(pi, y).map_err(attribute);
    }
    let counts = polarimeter::validate_populations(pi).map_err(attribute)?;
    Distribution::merging_duplicates(&counts, y).map_err(attribute)
}

/// Writes `pi,y` CSV that re-parses to the same distribution.
pub fn write_distribution_csv(dist: &Distribution, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "pi,y")?;
    for (pi, y) in dist.groups() {
        writeln!(out, "{pi},{y:?}")?;
    }
    Ok(())
}

/// Parses `linear | power:<r> | poly:<c1>,<c2>,... | exp:<k> | table:<path>`.
/// Table files are CSV with header `d,f`.
pub fn parse_alienation_descriptor(text: &str) -> Result<Alienation> {
    let grammar = |message: &str| CliError::Grammar {
        text: text.to_owned(),
        message: message.to_owned(),
    };
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| grammar(&format!("{s:?} is not a number")))
    };
    let trimmed = text.trim();
    if trimmed == "linear" {
        return Ok(Alienation::linear());
    }
    let (kind, arg) = trimmed
        .split_once(':')
        .ok_or_else(|| grammar("expected linear, power:<r>, poly:<c1>,..., exp:<k> or table:<path>"))?;
    let parsed = match kind.trim() {
        "power" => Alienation::power(number(arg)?),
        "exp" => Alienation::exponential(number(arg)?),
        "poly" => Alienation::polynomial(arg.split(',').map(number).collect::<Result<_>>()?),
        "table" => return parse_table_file(Path::new(arg.trim())),
        other => return Err(grammar(&format!("unknown kind {other:?}"))),
    };
    parsed.map_err(|e| grammar(&e.to_string()))
}

fn parse_table_file(path: &Path) -> Result<Alienation> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_error(path, 1, e.to_string()))?;
    if headers.len() != 2 || &headers[0] != "d" || &headers[1] != "f" {
        return Err(parse_error(path, 1, "expected header `d,f`"));
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_error(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let value = |k: usize| {
            record[k]
                .parse::<f64>()
                .map_err(|_| parse_error(path, line, format!("{:?} is not a number", &record[k])))
        };
        points.push((value(0)?, value(1)?));
    }
    Alienation::tabulated(points).map_err(|e| parse_error(path, 1, e.to_string()))
}

/// Parses `lo,hi`.
pub fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("{lo:?} is not a number"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("{hi:?} is not a number"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("need finite lo < hi, got ({lo}, {hi})"));
    }
    Ok((lo, hi))
}

/// Parses `alpha=<a>,<descriptor>`.
pub fn parse_spec(text: &str) -> Result<polarimeter::AntagonismSpec> {
    let usage = || CliError::Usage(format!("--spec expects alpha=<a>,<descriptor>, got {text:?}"));
    let (alpha, descriptor) = text.split_once(',').ok_or_else(usage)?;
    let alpha = alpha
        .trim()
        .strip_prefix("alpha=")
        .ok_or_else(usage)?
        .trim()
        .parse::<f64>()
        .map_err(|_| usage())?;
    Ok(polarimeter::AntagonismSpec::new(
        alpha,
        parse_alienation_descriptor(descriptor)?,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polarimeter::AlienationKind;

    fn csv(body: &str) -> Result<Distribution> {
        parse_distribution_csv(Path::new("t.csv"), &format!("pi,y\n{body}"), false)
    }

    #[test]
    fn csv_examples() {
        let d = csv("2,0\n1,1\n1,1.2").unwrap();
        assert_eq!(d.populations(), &[2, 1, 1]);
        assert_eq!(d.values(), &[0.0, 1.0, 1.2]);
        match csv("1.5,0\n1,1").unwrap_err() {
            CliError::Row { line, source, .. } => {
                assert_eq!(line, 2);
                assert!(matches!(source, CoreError::NonIntegralPopulation { index: 0, .. }));
            }
            other => panic!("{other}"),
        }
        match csv("1,0\n1,1\n1,0").unwrap_err() {
            CliError::Row { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
        assert!(matches!(csv("1,0\nx,1").unwrap_err(), CliError::Parse { line: 3, .. }));
        assert!(matches!(
            parse_distribution_csv(Path::new("t.csv"), "a,b\n1,0\n", false),
            Err(CliError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn merging_duplicates() {
        let d = parse_distribution_csv(Path::new("t.csv"), "pi,y\n1,0\n2,1\n3,0\n", true).unwrap();
        assert_eq!(d.populations(), &[4, 2]);
        assert_eq!(d.values(), &[0.0, 1.0]);
    }

    #[test]
    fn json_example() {
        let d = parse_distribution_json(Path::new("t.json"), r#"{"pi":[1,1],"y":[0,1]}"#, false).unwrap();
        assert_eq!(d.populations(), &[1, 1]);
        assert!(matches!(
            parse_distribution_json(Path::new("t.json"), r#"{"pi":[1,2.5],"y":[0,1]}"#, false),
            Err(CliError::Core(CoreError::NonIntegralPopulation { index: 1, .. }))
        ));
    }

    #[test]
    fn descriptors() {
        assert_eq!(parse_alienation_descriptor("linear").unwrap(), Alienation::linear());
        assert_eq!(
            parse_alienation_descriptor("power:2").unwrap(),
            Alienation::power(2.0).unwrap()
        );
        assert_eq!(
            parse_alienation_descriptor("exp:0.5").unwrap(),
            Alienation::exponential(0.5).unwrap()
        );
        assert!(matches!(
            parse_alienation_descriptor("poly:1,0.5").unwrap().kind(),
            AlienationKind::Polynomial { coefficients } if coefficients == &[1.0, 0.5]
        ));
        for bad in ["quadratic", "power:", "power:-1", "exp:x", "poly:1,-2", ""] {
            assert!(
                matches!(parse_alienation_descriptor(bad), Err(CliError::Grammar { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn descriptors_round_trip_through_display() {
        for text in ["linear", "power:2", "poly:1,0.5", "exp:0.5"] {
            let f = parse_alienation_descriptor(text).unwrap();
            assert_eq!(parse_alienation_descriptor(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn spec_and_range() {
        let s = parse_spec("alpha=0,linear").unwrap();
        assert_eq!(s, polarimeter::AntagonismSpec::gini());
        let s = parse_spec("alpha=1.5,poly:1,2").unwrap();
        assert_eq!(s.alpha(), 1.5);
        assert!(matches!(parse_spec("linear"), Err(CliError::Usage(_))));
        assert_eq!(parse_range("0,4").unwrap(), (0.0, 4.0));
        assert!(parse_range("4,0").is_err());
    }
}
