//! Writes a report to disk: `report.csv`, `fields/<name>.gf01` plus a P6
//! preview per raster, and `metadata.json`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Duration;

use serde_json::json;

use crate::config::Config;
use crate::constants;
use crate::report::Report;

pub fn write_outputs(report: &Report, config: &Config, dir: &Path, wall: Duration) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.csv"), report.csv())?;
    if !report.fields.is_empty() {
        let fdir = dir.join("fields");
        fs::create_dir_all(&fdir)?;
        for f in &report.fields {
            f.field.write_gf01(BufWriter::new(File::create(fdir.join(format!("{}.gf01", f.name)))?))
                .map_err(std::io::Error::other)?;
            f.field.write_ppm(BufWriter::new(File::create(fdir.join(format!("{}.ppm", f.name)))?))
                .map_err(std::io::Error::other)?;
        }
    }
    let meta = json!({
        "experiment": config.experiment.name(),
        "config_hash": report.config_hash,
        "config": config,
        "verdict": report.verdict(),
        "checks": report.checks,
        "notes": report.notes,
        "fields": report.fields.iter().map(|f| &f.name).collect::<Vec<_>>(),
        "constants": constants::table().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "versions": {
            "dynlab": env!("CARGO_PKG_VERSION"),
            "dynlab_core": dynlab_core::VERSION,
        },
        "threads": rayon::current_num_threads(),
        "wall_time_s": wall.as_secs_f64(),
    });
    fs::write(dir.join("metadata.json"), serde_json::to_vec_pretty(&meta).map_err(std::io::Error::other)?)
}
