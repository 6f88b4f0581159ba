//! One- and two-axis parameter sweeps with CSV output.
//!
//! Rows are emitted with the second axis outermost (axis2-major). Output is
//! deterministic byte for byte: rows carry seeds derived from their grid
//! index, not from execution order, and the file contains no timestamps.
//! Per-row failures (an invalid parameter combination, say) land in the
//! `status` column instead of aborting the sweep.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::report::{analyze, AnalyticReport};
use crate::scenario::Scenario;
use crate::sim::{derive_seed, run_replications, SimMetrics};

/// Hard cap on grid size; two dense linspaces multiply quickly.
pub const MAX_GRID: usize = 10_000;

/// Scenario fields a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    AccessProbability,
    EhRadius,
    GzRadius,
    StDensity,
    ArrivalRate,
    SamplingRate,
    SinrThresholdDb,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::AccessProbability => "access_probability",
            SweepParam::EhRadius => "eh_radius",
            SweepParam::GzRadius => "gz_radius",
            SweepParam::StDensity => "st_density",
            SweepParam::ArrivalRate => "arrival_rate",
            SweepParam::SamplingRate => "sampling_rate",
            SweepParam::SinrThresholdDb => "sinr_threshold_db",
        }
    }

    fn apply(self, scenario: &mut Scenario, value: f64) {
        match self {
            SweepParam::AccessProbability => scenario.network.access_probability = value,
            SweepParam::EhRadius => scenario.network.region.eh_radius = value,
            SweepParam::GzRadius => scenario.network.region.gz_radius = value,
            SweepParam::StDensity => scenario.network.st_density = value,
            SweepParam::ArrivalRate => scenario.traffic.arrival_rate = value,
            SweepParam::SamplingRate => scenario.traffic.sampling_rate = value,
            SweepParam::SinrThresholdDb => {
                scenario.network.radio.sinr_threshold = 10f64.powf(value / 10.0)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<SweepSpec> {
        let file: SweepFile = toml::from_str(text).map_err(|e| Error::Sweep(e.to_string()))?;
        file.resolve()
    }

    pub fn from_path(path: &Path) -> Result<SweepSpec> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Sweep(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Sweep(msg) => Error::Sweep(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn grid_size(&self) -> usize {
        self.axis1.values.len() * self.axis2.as_ref().map_or(1, |a| a.values.len())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    schema_version: u32,
    axis1: AxisSection,
    axis2: Option<AxisSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisSection {
    param: SweepParam,
    values: Option<Vec<f64>>,
    linspace: Option<Linspace>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Linspace {
    start: f64,
    stop: f64,
    count: usize,
}

impl SweepFile {
    fn resolve(self) -> Result<SweepSpec> {
        if self.schema_version != crate::scenario::SCHEMA_VERSION {
            return Err(Error::Sweep(format!(
                "schema_version {} not supported",
                self.schema_version
            )));
        }
        let spec = SweepSpec {
            axis1: self.axis1.resolve("axis1")?,
            axis2: self.axis2.map(|a| a.resolve("axis2")).transpose()?,
        };
        if let (Some(a2), a1) = (&spec.axis2, &spec.axis1) {
            if a2.param == a1.param {
                return Err(Error::Sweep("axis1 and axis2 vary the same parameter".into()));
            }
        }
        if spec.grid_size() > MAX_GRID {
            return Err(Error::Sweep(format!(
                "grid has {} points, the limit is {MAX_GRID}",
                spec.grid_size()
            )));
        }
        Ok(spec)
    }
}

impl AxisSection {
    fn resolve(self, which: &str) -> Result<Axis> {
        let values = match (self.values, self.linspace) {
            (Some(v), None) => v,
            (None, Some(l)) => {
                if l.count < 2 {
                    return Err(Error::Sweep(format!("{which}: linspace.count must be >= 2")));
                }
                let step = (l.stop - l.start) / (l.count - 1) as f64;
                (0..l.count)
                    .map(|i| {
                        if i + 1 == l.count {
                            l.stop
                        } else {
                            l.start + step * i as f64
                        }
                    })
                    .collect()
            }
            (Some(_), Some(_)) => {
                return Err(Error::Sweep(format!(
                    "{which}: give values or linspace, not both"
                )))
            }
            (None, None) => {
                return Err(Error::Sweep(format!(
                    "{which}: one of values / linspace is required"
                )))
            }
        };
        if values.is_empty() {
            return Err(Error::Sweep(format!("{which}: values is empty")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Sweep(format!("{which}: non-finite value {bad}")));
        }
        Ok(Axis {
            param: self.param,
            values,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Also simulate each grid point (slots/replications/seed from the base
    /// scenario's sim settings; the seed is further derived per row).
    pub simulate: bool,
    /// Worker threads for the simulation pass; 1 = in-process serial,
    /// 0 = one per core.
    pub threads: usize,
    /// Where the base scenario came from; recorded in the manifest.
    pub origin: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepStats {
    pub rows: usize,
    pub ok: usize,
    pub unstable: usize,
    pub errors: usize,
}

struct Row {
    v1: f64,
    v2: Option<f64>,
    analytic: Result<AnalyticReport>,
    sim: Option<Result<SimMetrics>>,
}

fn compute_row(base: &Scenario, spec: &SweepSpec, opts: &SweepOptions, index: usize) -> Row {
    let n1 = spec.axis1.values.len();
    let v1 = spec.axis1.values[index % n1];
    let v2 = spec.axis2.as_ref().map(|a| a.values[index / n1]);
    let mut scenario = base.clone();
    spec.axis1.param.apply(&mut scenario, v1);
    if let (Some(axis), Some(value)) = (&spec.axis2, v2) {
        axis.param.apply(&mut scenario, value);
    }
    let analytic = analyze(&scenario.network, &scenario.traffic);
    let sim = (opts.simulate && analytic.is_ok()).then(|| {
        run_replications(
            &scenario.network,
            &scenario.traffic,
            scenario.sim.slots,
            derive_seed(scenario.sim.seed, index as u64),
            scenario.sim.replications,
            1,
        )
    });
    Row {
        v1,
        v2,
        analytic,
        sim,
    }
}

/// Evaluate the grid and stream CSV to `out`.
pub fn run_sweep<W: Write>(
    base: &Scenario,
    spec: &SweepSpec,
    opts: &SweepOptions,
    mut out: W,
) -> Result<SweepStats> {
    base.validate()?;
    let total = spec.grid_size();

    // Manifest: everything needed to reproduce the file, no timestamps.
    writeln!(out, "# parameter sweep over {} points", total)?;
    writeln!(out, "# base scenario: {}", opts.origin)?;
    for line in base.to_toml_string()?.lines() {
        writeln!(out, "#   {line}")?;
    }
    writeln!(
        out,
        "# axis1: {} ({} points)",
        spec.axis1.param.column(),
        spec.axis1.values.len()
    )?;
    if let Some(a2) = &spec.axis2 {
        writeln!(out, "# axis2: {} ({} points)", a2.param.column(), a2.values.len())?;
    }
    writeln!(
        out,
        "# mode: {}",
        if opts.simulate {
            "analytic + simulation"
        } else {
            "analytic"
        }
    )?;

    let rows: Vec<Row> = if opts.simulate && opts.threads != 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Sweep(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            (0..total)
                .into_par_iter()
                .map(|i| compute_row(base, spec, opts, i))
                .collect()
        })
    } else {
        (0..total).map(|i| compute_row(base, spec, opts, i)).collect()
    };

    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = vec![spec.axis1.param.column()];
    if let Some(a2) = &spec.axis2 {
        header.push(a2.param.column());
    }
    header.extend([
        "policy",
        "stable",
        "mean_age",
        "p_eh",
        "p_gz",
        "p_ch",
        "p_tr",
        "mu_p",
        "p_sx",
        "throughput",
    ]);
    if opts.simulate {
        header.extend([
            "sim_mean_age",
            "sim_mean_age_ci",
            "sim_mu_p",
            "sim_p_sx",
            "sim_p_ch",
            "sim_p_tr",
            "sim_drop",
            "sim_throughput",
            "sim_divergent",
        ]);
    }
    header.push("status");
    writer.write_record(&header)?;

    let mut stats = SweepStats {
        rows: total,
        ok: 0,
        unstable: 0,
        errors: 0,
    };
    let fmt = |v: f64| if v.is_finite() { v.to_string() } else { String::new() };
    for row in rows {
        let mut record: Vec<String> = vec![row.v1.to_string()];
        if let Some(v2) = row.v2 {
            record.push(v2.to_string());
        }
        let mut status = "ok".to_string();
        match &row.analytic {
            Ok(a) => {
                record.extend([
                    a.policy.name().to_string(),
                    a.aoi.stable.to_string(),
                    a.aoi.mean_age.map_or_else(String::new, |v| v.to_string()),
                    fmt(a.p_eh),
                    fmt(a.p_gz),
                    fmt(a.p_ch),
                    fmt(a.p_tr),
                    fmt(a.mu_p),
                    fmt(a.p_sx),
                    fmt(a.throughput),
                ]);
                if !a.aoi.stable {
                    status = "unstable".into();
                }
            }
            Err(e) => {
                record.extend(std::iter::repeat_n(String::new(), 10));
                status = format!("error: {e}");
            }
        }
        match (&row.sim, opts.simulate) {
            (Some(Ok(m)), _) => {
                record.extend([
                    fmt(m.mean_age.value),
                    fmt(m.mean_age.ci_halfwidth),
                    fmt(m.emp_mu_p.value),
                    fmt(m.emp_p_sx.value),
                    fmt(m.emp_p_ch.value),
                    fmt(m.emp_p_tr.value),
                    fmt(m.emp_drop.value),
                    fmt(m.emp_throughput.value),
                    m.divergent.to_string(),
                ]);
                if m.divergent && status == "ok" {
                    status = "unstable".into();
                }
            }
            (Some(Err(e)), _) => {
                record.extend(std::iter::repeat_n(String::new(), 9));
                status = format!("error: {e}");
            }
            (None, true) => record.extend(std::iter::repeat_n(String::new(), 9)),
            (None, false) => {}
        }
        match status.as_str() {
            "ok" => stats.ok += 1,
            "unstable" => stats.unstable += 1,
            _ => stats.errors += 1,
        }
        record.push(status);
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(stats)
}
