//! CSV emission and the array-measurement schema.
//!
//! Files start with optional `# key=value` metadata lines, followed by a
//! header row and comma-separated numeric rows. Numbers are written in
//! decimal scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::profiling::{ArrayMeasurement, NoiseSpec};
use crate::quantum::Point;

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Parse text produced by [`CsvTable::render`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = CsvTable::default();
        let mut have_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if have_header {
                    return Err(Error::config(Some(line_no), "metadata line after the header"));
                }
                if let Some((k, v)) = meta.split_once('=') {
                    table.metadata.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !have_header {
                table.header = line.split(',').map(|s| s.trim().to_string()).collect();
                have_header = true;
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::config(Some(line_no), format!("not a number: `{}`", cell.trim())))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != table.header.len() {
                return Err(Error::config(
                    Some(line_no),
                    format!("expected {} columns, found {}", table.header.len(), row.len()),
                ));
            }
            table.rows.push(row);
        }
        if !have_header {
            return Err(Error::config(None, "missing header row"));
        }
        Ok(table)
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Serialize an array measurement.
pub fn measurement_table(meas: &ArrayMeasurement) -> CsvTable {
    let header: &[&str] = if meas.pedestals.is_some() {
        &["x_m", "y_m", "w2m", "pedestal"]
    } else {
        &["x_m", "y_m", "w2m"]
    };
    let mut t = CsvTable::new(header);
    t.meta("photonmix", "array")
        .meta("ref_x", fmt_num(meas.ref_point.x))
        .meta("ref_y", fmt_num(meas.ref_point.y))
        .meta("n_mean", fmt_num(meas.n_mean))
        .meta("noise", meas.noise);
    for (i, (p, v)) in meas.points.iter().zip(&meas.values).enumerate() {
        let mut row = vec![p.x, p.y, *v];
        if let Some(ped) = &meas.pedestals {
            row.push(ped[i]);
        }
        t.push(row);
    }
    t
}

fn parse_noise(raw: &str) -> Result<NoiseSpec> {
    let bad = || Error::config(None, format!("unrecognized noise description `{raw}`"));
    let mut parts = raw.split_whitespace();
    let noise = match parts.next() {
        None | Some("none") => NoiseSpec::None,
        Some("gaussian") => {
            let sigma = parts.next().and_then(|p| p.strip_prefix("sigma=")).ok_or_else(bad)?;
            NoiseSpec::Gaussian {
                sigma: sigma.parse().map_err(|_| bad())?,
            }
        }
        Some("counts") => {
            let events = parts.next().and_then(|p| p.strip_prefix("events=")).ok_or_else(bad)?;
            NoiseSpec::Counts {
                events: events.parse().map_err(|_| bad())?,
            }
        }
        Some(_) => return Err(bad()),
    };
    Ok(noise)
}

/// Parse a measurement written by [`measurement_table`].
pub fn parse_measurement(text: &str) -> Result<ArrayMeasurement> {
    let t = CsvTable::parse(text)?;
    let meta_num = |key: &str| -> Result<f64> {
        let raw = t
            .get_meta(key)
            .ok_or_else(|| Error::config(None, format!("measurement is missing `# {key}=...`")))?;
        raw.parse()
            .map_err(|_| Error::config(None, format!("measurement `{key}`: cannot parse `{raw}`")))
    };
    let ref_point = Point::new(meta_num("ref_x")?, meta_num("ref_y")?);
    let n_mean = meta_num("n_mean")?;
    let noise = parse_noise(t.get_meta("noise").unwrap_or("none"))?;

    let col = |name: &str| {
        t.column(name)
            .ok_or_else(|| Error::config(None, format!("measurement is missing column `{name}`")))
    };
    let xs = col("x_m")?;
    let ys = col("y_m")?;
    let values = col("w2m")?;
    let pedestals = t.column("pedestal");

    let meas = ArrayMeasurement {
        ref_point,
        points: xs.iter().zip(&ys).map(|(&x, &y)| Point::new(x, y)).collect(),
        values,
        n_mean,
        noise,
        pedestals,
    };
    meas.validate()?;
    Ok(meas)
}
