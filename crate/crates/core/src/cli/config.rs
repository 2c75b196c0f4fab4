//! Scenario files: flat `key = value` lines with dotted section prefixes.
//!
//! ```text
//! # HOM configuration
//! seed = 7
//! lo_state.kind = fock
//! lo_state.n = 1
//! photon_mode.order_x = 1
//! scan.parameter = x_d
//! scan.start = -14
//! scan.stop = 14
//! scan.count = 141
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Unknown and
//! duplicate keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::aperture::{Detector, Window};
use crate::error::{Error, Result};
use crate::modes::{TransverseMode, SUPPORT_WAISTS};
use crate::profiling::NoiseSpec;
use crate::quantum::{BeamSplitter, LoState, Point, Units};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ScanSpec {
    pub fn new(parameter: &str, start: f64, stop: f64, count: usize) -> Self {
        Self {
            parameter: parameter.to_string(),
            start,
            stop,
            count,
        }
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => {
            let span = stop - start;
            let steps = (count - 1) as f64;
            (0..count).map(|i| start + span * i as f64 / steps).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArraySpec {
    pub ref_point: Point,
    /// y coordinate of the array line.
    pub y: f64,
    pub pedestal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilitySpec {
    pub displacement_max: f64,
    pub displacement_count: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub lo_state: LoState,
    pub lo_mode: TransverseMode,
    pub photon_mode: TransverseMode,
    pub beam_splitter: BeamSplitter,
    /// True when the symmetric preset is in use.
    pub symmetric_bs: bool,
    pub detector1: Detector,
    pub detector2: Detector,
    pub units: Units,
    pub scan: Option<ScanSpec>,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub array: ArraySpec,
    pub anchor: Option<f64>,
    pub visibility: VisibilitySpec,
}

impl Scenario {
    /// Window half-width for misalignment scans: detector 1's x half-width
    /// when it is a window, otherwise five LO waists.
    pub fn misalignment_half_width(&self) -> f64 {
        match self.detector1.as_window() {
            Some(w) => w.half_width_x,
            None => 5.0 * self.lo_mode.waist,
        }
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(Some(line_no), format!("expected `key = value`, got `{line}`")));
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::config(Some(line_no), format!("malformed key `{key}`")));
            }
            let value = value.trim().to_string();
            if let Some((first, _)) = map.insert(key.to_string(), (line_no, value)) {
                return Err(Error::config(
                    Some(line_no),
                    format!("duplicate key `{key}` (first set on line {first})"),
                ));
            }
        }
        Ok(Self { map })
    }

    fn take_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::config(Some(line), format!("`{key}`: cannot parse `{raw}`"))),
        }
    }

    fn take_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((key, (line, _))) => Err(Error::config(Some(line), format!("unknown key `{key}`"))),
        }
    }
}

/// Attach the offending key (and line, when known) to a validation error.
fn at_key(key: &str, line: Option<usize>) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::config(line, format!("`{key}`: {e}"))
}

fn parse_complex(key: &str, line: usize, raw: &str) -> Result<Complex64> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    let bad = || Error::config(Some(line), format!("`{key}`: expected `re, im`, got `{raw}`"));
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?)),
        [re] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, 0.0)),
        _ => Err(bad()),
    }
}

fn parse_mode(e: &mut Entries, section: &str) -> Result<TransverseMode> {
    let key = |f: &str| format!("{section}.{f}");
    let line = e.line_of(&key("waist"));
    let mode = TransverseMode {
        order_x: e.take_or(&key("order_x"), 0u32)?,
        order_y: e.take_or(&key("order_y"), 0u32)?,
        waist: e.take_or(&key("waist"), 1.0)?,
        center_x: e.take_or(&key("center_x"), 0.0)?,
        center_y: e.take_or(&key("center_y"), 0.0)?,
    };
    mode.validate().map_err(at_key(&key("waist"), line))?;
    Ok(mode)
}

fn parse_lo_state(e: &mut Entries) -> Result<LoState> {
    let Some((line, kind)) = e.take_raw("lo_state.kind") else {
        return Err(Error::config(None, "missing required key `lo_state.kind`"));
    };
    match kind.as_str() {
        "fock" => Ok(LoState::Fock(e.take_or("lo_state.n", 1u32)?)),
        "coherent" => {
            let sq_line = e.line_of("lo_state.alpha_sq");
            let alpha_sq: Option<f64> = e.take("lo_state.alpha_sq")?;
            let re: Option<f64> = e.take("lo_state.alpha")?;
            let im: Option<f64> = e.take("lo_state.alpha_im")?;
            match (alpha_sq, re, im) {
                (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::config(
                    sq_line,
                    "`lo_state.alpha_sq` cannot be combined with `lo_state.alpha`/`lo_state.alpha_im`",
                )),
                (Some(sq), None, None) => {
                    LoState::coherent_with_intensity(sq).map_err(at_key("lo_state.alpha_sq", sq_line))
                }
                (None, re, im) => {
                    let state = LoState::Coherent(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)));
                    state.validate().map_err(at_key("lo_state.alpha", None))?;
                    Ok(state)
                }
            }
        }
        other => Err(Error::config(
            Some(line),
            format!("`lo_state.kind`: expected `fock` or `coherent`, got `{other}`"),
        )),
    }
}

fn parse_beam_splitter(e: &mut Entries) -> Result<(BeamSplitter, bool)> {
    let (line, preset) = e
        .take_raw("beam_splitter.preset")
        .unwrap_or((0, "symmetric".to_string()));
    match preset.as_str() {
        "symmetric" => {
            for k in ["s11", "s12", "s21", "s22"] {
                if let Some(l) = e.line_of(&format!("beam_splitter.{k}")) {
                    return Err(Error::config(
                        Some(l),
                        format!("`beam_splitter.{k}` requires `beam_splitter.preset = custom`"),
                    ));
                }
            }
            Ok((BeamSplitter::symmetric(), true))
        }
        "custom" => {
            let mut s = [Complex64::new(0.0, 0.0); 4];
            for (slot, k) in s.iter_mut().zip(["s11", "s12", "s21", "s22"]) {
                let key = format!("beam_splitter.{k}");
                let (l, raw) = e
                    .take_raw(&key)
                    .ok_or_else(|| Error::config(Some(line), format!("custom beam splitter needs `{key}`")))?;
                *slot = parse_complex(&key, l, &raw)?;
            }
            let bs = BeamSplitter::new(s[0], s[1], s[2], s[3]).map_err(at_key("beam_splitter", Some(line)))?;
            Ok((bs, false))
        }
        other => Err(Error::config(
            Some(line),
            format!("`beam_splitter.preset`: expected `symmetric` or `custom`, got `{other}`"),
        )),
    }
}

fn parse_detector(e: &mut Entries, section: &str, default_x: f64, units: &Units, max_waist: f64) -> Result<Detector> {
    let key = |f: &str| format!("{section}.{f}");
    let (line, kind) = e.take_raw(&key("kind")).unwrap_or((0, "point".to_string()));
    let line = (line > 0).then_some(line);
    match kind.as_str() {
        "point" => {
            let x = e.take_or(&key("x"), default_x)?;
            let y = e.take_or(&key("y"), 0.0)?;
            Detector::point(x, y, units.d_s, units.eta).map_err(at_key(section, line))
        }
        "window" => {
            let hx_line = e.line_of(&key("half_width_x"));
            let w = Window {
                center_x: e.take_or(&key("center_x"), 0.0)?,
                center_y: e.take_or(&key("center_y"), 0.0)?,
                half_width_x: e.take_or(&key("half_width_x"), 5.0 * max_waist)?,
                half_width_y: e.take_or(&key("half_width_y"), SUPPORT_WAISTS * max_waist)?,
            };
            Detector::window(w, units.eta).map_err(at_key(&key("half_width_x"), hx_line.or(line)))
        }
        other => Err(Error::config(
            line,
            format!("`{section}.kind`: expected `point` or `window`, got `{other}`"),
        )),
    }
}

fn parse_noise(e: &mut Entries) -> Result<NoiseSpec> {
    let (line, kind) = e.take_raw("noise.kind").unwrap_or((0, "none".to_string()));
    let line = (line > 0).then_some(line);
    let noise = match kind.as_str() {
        "none" => NoiseSpec::None,
        "gaussian" => NoiseSpec::Gaussian {
            sigma: e
                .take("noise.sigma")?
                .ok_or_else(|| Error::config(line, "gaussian noise needs `noise.sigma`"))?,
        },
        "counts" => NoiseSpec::Counts {
            events: e
                .take("noise.events")?
                .ok_or_else(|| Error::config(line, "count noise needs `noise.events`"))?,
        },
        other => {
            return Err(Error::config(
                line,
                format!("`noise.kind`: expected `none`, `gaussian` or `counts`, got `{other}`"),
            ))
        }
    };
    noise.validate().map_err(at_key("noise", line))?;
    Ok(noise)
}

fn parse_scan(e: &mut Entries) -> Result<Option<ScanSpec>> {
    let present = ["scan.parameter", "scan.start", "scan.stop", "scan.count"]
        .iter()
        .any(|k| e.line_of(k).is_some());
    if !present {
        return Ok(None);
    }
    let count_line = e.line_of("scan.count");
    let parameter = e.take_raw("scan.parameter").map(|(_, v)| v).unwrap_or_default();
    let start: f64 = e.take("scan.start")?.ok_or_else(|| Error::config(None, "scan needs `scan.start`"))?;
    let stop: f64 = e.take("scan.stop")?.ok_or_else(|| Error::config(None, "scan needs `scan.stop`"))?;
    let count: usize = e.take("scan.count")?.ok_or_else(|| Error::config(None, "scan needs `scan.count`"))?;
    if count == 0 {
        return Err(Error::config(count_line, "`scan.count` must be at least 1"));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(Error::config(None, "`scan.start`/`scan.stop` must be finite"));
    }
    Ok(Some(ScanSpec {
        parameter,
        start,
        stop,
        count,
    }))
}

/// Parse and validate scenario text, filling defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut e = Entries::parse(text)?;

    let seed = e.take_or("seed", 0u64)?;
    let lo_state = parse_lo_state(&mut e)?;
    let lo_mode = parse_mode(&mut e, "lo_mode")?;
    let photon_mode = parse_mode(&mut e, "photon_mode")?;
    let (beam_splitter, symmetric_bs) = parse_beam_splitter(&mut e)?;

    let units = Units {
        eta: e.take_or("units.eta", 1.0)?,
        d_s: e.take_or("units.dS", 1.0)?,
        eps: e.take_or("units.eps", 1.0)?,
    };
    units.validate().map_err(|err| match &err {
        Error::InvalidParameter { name, .. } => {
            let key = format!("units.{name}");
            let line = e.line_of(&key);
            Error::config(line, format!("`{key}`: {err}"))
        }
        _ => err,
    })?;

    let max_waist = lo_mode.waist.max(photon_mode.waist);
    let detector1 = parse_detector(&mut e, "detector1", 0.5, &units, max_waist)?;
    let detector2 = parse_detector(&mut e, "detector2", -0.5, &units, max_waist)?;
    let scan = parse_scan(&mut e)?;
    let noise = parse_noise(&mut e)?;

    let array_y = e.take_or("array.y", 0.0)?;
    let array = ArraySpec {
        ref_point: Point::new(e.take_or("array.ref_x", 0.7)?, e.take_or("array.ref_y", array_y)?),
        y: array_y,
        pedestal: e.take_or("array.pedestal", false)?,
    };
    let anchor = e.take("reconstruct.anchor")?;

    let dmax_line = e.line_of("visibility.displacement_max");
    let displacement_max = e.take_or("visibility.displacement_max", 8.0 * max_waist)?;
    if !(displacement_max > 0.0) || !displacement_max.is_finite() {
        return Err(Error::config(dmax_line, "`visibility.displacement_max` must be positive"));
    }
    let count_line = e.line_of("visibility.displacement_count");
    let displacement_count = e.take_or("visibility.displacement_count", 33usize)?;
    if displacement_count < 3 {
        return Err(Error::config(count_line, "`visibility.displacement_count` must be at least 3"));
    }
    let hw_line = e.line_of("visibility.half_width");
    let half_width = e.take_or(
        "visibility.half_width",
        displacement_max + SUPPORT_WAISTS * max_waist,
    )?;
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::config(hw_line, "`visibility.half_width` must be positive"));
    }

    e.finish()?;

    Ok(Scenario {
        lo_state,
        lo_mode,
        photon_mode,
        beam_splitter,
        symmetric_bs,
        detector1,
        detector2,
        units,
        scan,
        noise,
        seed,
        array,
        anchor,
        visibility: VisibilitySpec {
            displacement_max,
            displacement_count,
            half_width,
        },
    })
}
