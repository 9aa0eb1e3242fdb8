//! Experiment reports and their files.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every `f64`. Non-finite values become `null` in JSON
//! and `nan`/`inf`/`-inf` in CSV.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::ExperimentConfig;

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EcdfRow {
    pub s: f64,
    pub empirical: f64,
    pub predicted: f64,
}

/// A named comparison with its bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value >= bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsSummary {
    pub distance: f64,
    pub location: f64,
    pub model_value: f64,
    /// DKW half-width at confidence 0.99 for this sample size.
    pub dkw_99: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Model constants used for centering and prediction.
    pub constants: BTreeMap<String, f64>,
    /// Main statistic of each replica, in replica order.
    pub samples: Vec<f64>,
    /// Further per-replica series of the same length.
    pub series: BTreeMap<String, Vec<f64>>,
    pub ecdf: Vec<EcdfRow>,
    pub ks: Option<KsSummary>,
    pub correlation: Option<f64>,
    pub counters: BTreeMap<String, u64>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            config,
            constants: BTreeMap::new(),
            samples: Vec::new(),
            series: BTreeMap::new(),
            ecdf: Vec::new(),
            ks: None,
            correlation: None,
            counters: BTreeMap::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        to_json_bytes(self)
    }

    pub fn ecdf_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "empirical", "predicted"])?;
        for r in &self.ecdf {
            w.write_record([fmt17(r.s), fmt17(r.empirical), fmt17(r.predicted)])?;
        }
        Ok(w.into_inner()?)
    }

    /// `replica, statistic` and one column per extra series.
    pub fn samples_csv(&self) -> Result<Vec<u8>> {
        let extra: Vec<(&String, &Vec<f64>)> =
            self.series.iter().filter(|(_, v)| v.len() == self.samples.len()).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["replica".to_string(), "statistic".to_string()];
        head.extend(extra.iter().map(|(k, _)| k.to_string()));
        w.write_record(&head)?;
        for (r, x) in self.samples.iter().enumerate() {
            let mut row = vec![r.to_string(), fmt17(*x)];
            row.extend(extra.iter().map(|(_, v)| fmt17(v[r])));
            w.write_record(&row)?;
        }
        Ok(w.into_inner()?)
    }

    /// Writes `report.json`, `ecdf.csv` and `samples.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        std::fs::write(dir.join("ecdf.csv"), self.ecdf_csv()?)?;
        std::fs::write(dir.join("samples.csv"), self.samples_csv()?)?;
        Ok(())
    }
}

/// Wall-clock figures, kept out of the report so that it stays
/// reproducible.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub threads: usize,
    pub replica_seconds: Vec<f64>,
}

impl Timings {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("timings.json"), to_json_bytes(self)?)?;
        Ok(())
    }
}

/// Pretty JSON with every float written by [`fmt17`].
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Compact single-line JSON with the same float format.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    struct Compact17;
    impl Formatter for Compact17 {
        fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
            w.write_all(fmt17(value).as_bytes())
        }
    }
    let mut out = Vec::new();
    value.serialize(&mut serde_json::Serializer::with_formatter(&mut out, Compact17))?;
    Ok(String::from_utf8(out)?)
}
