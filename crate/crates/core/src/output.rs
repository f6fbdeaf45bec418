//! Machine-readable report tables.
//!
//! Each table has a fixed column list. CSV output writes exactly those
//! columns in that order; JSON output is an array of objects whose keys are
//! the same columns in the same order. Optional values render as an empty
//! CSV field and as `null` in JSON. Floats use the shortest representation
//! that round-trips, so equal inputs give byte-identical files.
//!
//! | table        | columns |
//! |--------------|---------|
//! | density      | `n, count, ratio, error_bound` |
//! | intertwine   | `k, lower, upper, bound, max_deviation, slack, checkpoints, complete, truncated, passed, witness` |
//! | refute       | `k, side, l_k, image_count, ratio, bound, sandwich, pass` |
//! | transfer     | `alpha_num, alpha_den, fhat_estimate, error_bound, certified, verdict` |

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::intertwiner::{BoundReport, WindowCheck};
use crate::refuter::{OscillationReport, OscillationRow};
use crate::set_algebra::Checkpoint;
use crate::transfer::{FHatRow, FHatTable};
use crate::{DensityReport, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A report that renders as one flat table.
pub trait Table {
    type Row: Serialize;
    const COLUMNS: &'static [&'static str];

    fn rows(&self) -> &[Self::Row];

    fn render(&self, format: Format) -> Result<String> {
        render_rows(Self::COLUMNS, self.rows(), format)
    }
}

impl Table for DensityReport {
    type Row = Checkpoint;
    const COLUMNS: &'static [&'static str] = &["n", "count", "ratio", "error_bound"];

    fn rows(&self) -> &[Checkpoint] {
        &self.checkpoints
    }
}

impl Table for BoundReport {
    type Row = WindowCheck;
    const COLUMNS: &'static [&'static str] = &[
        "k",
        "lower",
        "upper",
        "bound",
        "max_deviation",
        "slack",
        "checkpoints",
        "complete",
        "truncated",
        "passed",
        "witness",
    ];

    fn rows(&self) -> &[WindowCheck] {
        &self.windows
    }
}

impl Table for OscillationReport {
    type Row = OscillationRow;
    const COLUMNS: &'static [&'static str] = &[
        "k",
        "side",
        "l_k",
        "image_count",
        "ratio",
        "bound",
        "sandwich",
        "pass",
    ];

    fn rows(&self) -> &[OscillationRow] {
        &self.rows
    }
}

impl Table for FHatTable {
    type Row = FHatRow;
    const COLUMNS: &'static [&'static str] = &[
        "alpha_num",
        "alpha_den",
        "fhat_estimate",
        "error_bound",
        "certified",
        "verdict",
    ];

    fn rows(&self) -> &[FHatRow] {
        &self.rows
    }
}

/// Renders `rows` under the header `columns`. The header is written even
/// when there are no rows.
pub fn render_rows<R: Serialize>(columns: &[&str], rows: &[R], format: Format) -> Result<String> {
    let render_err = |e: &dyn fmt::Display| Error::Render(e.to_string());
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            w.write_record(columns).map_err(|e| render_err(&e))?;
            for row in rows {
                w.serialize(row).map_err(|e| render_err(&e))?;
            }
            let bytes = w.into_inner().map_err(|e| render_err(&e))?;
            String::from_utf8(bytes).map_err(|e| render_err(&e))
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(rows).map_err(|e| render_err(&e))?;
            out.push('\n');
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intertwiner::{
        build_plan, compute_thresholds, intertwine, verify_bound, EpsilonSchedule,
    };
    use crate::maps::InjectiveMap;
    use crate::rational::ratio;
    use crate::{estimate_densities, CheckpointSchedule, IntSet};

    fn json_keys(rendered: &str) -> Vec<String> {
        let value: serde_json::Value = serde_json::from_str(rendered).unwrap();
        let first = value
            .as_array()
            .unwrap()
            .first()
            .unwrap()
            .as_object()
            .unwrap();
        // serde_json's default map is sorted, so recover the emitted order from the text.
        let mut keys: Vec<(usize, String)> = first
            .keys()
            .map(|k| (rendered.find(&format!("\"{k}\":")).unwrap(), k.clone()))
            .collect();
        keys.sort();
        keys.into_iter().map(|(_, k)| k).collect()
    }

    fn assert_mirrors<T: Table>(t: &T) {
        let csv = t.render(Format::Csv).unwrap();
        let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
        assert_eq!(header, T::COLUMNS);
        assert_eq!(csv.lines().count(), t.rows().len() + 1);
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').count(), T::COLUMNS.len(), "{line}");
        }
        assert_eq!(json_keys(&t.render(Format::Json).unwrap()), T::COLUMNS);
    }

    #[test]
    fn json_mirrors_csv_columns() {
        let evens = IntSet::evens();
        let density = estimate_densities(&evens, &CheckpointSchedule::default(), 1_000).unwrap();
        assert_mirrors(&density);

        let eps = EpsilonSchedule::default();
        let m = compute_thresholds(&evens, &IntSet::odds(), &ratio(1, 2), &eps, 3).unwrap();
        let plan = build_plan(&m, &eps).unwrap();
        let c = intertwine(&evens, &IntSet::odds(), &plan);
        let bound = verify_bound(&c, &plan, &CheckpointSchedule::default(), 10_000).unwrap();
        assert_mirrors(&bound);

        let table = FHatTable::build(&InjectiveMap::dilate(2).unwrap(), 3, 1_000).unwrap();
        assert_mirrors(&table);
    }

    #[test]
    fn optional_fields_render_empty_and_null() {
        let squares = IntSet::squares();
        let r = estimate_densities(
            &squares,
            &CheckpointSchedule::explicit(vec![10]).unwrap(),
            10,
        )
        .unwrap();
        assert_eq!(
            r.render(Format::Csv).unwrap(),
            "n,count,ratio,error_bound\n10,3,0.3,\n"
        );
        assert!(r
            .render(Format::Json)
            .unwrap()
            .contains("\"error_bound\": null"));
    }

    #[test]
    fn header_survives_empty_tables() {
        let out = render_rows::<Checkpoint>(DensityReport::COLUMNS, &[], Format::Csv).unwrap();
        assert_eq!(out, "n,count,ratio,error_bound\n");
        assert_eq!(
            render_rows::<Checkpoint>(&[], &[], Format::Json).unwrap(),
            "[]\n"
        );
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("xml".parse::<Format>().is_err());
    }
}
