//! Ingestion of directional and cylindrical datasets, the
//! repeated-measurement angular jitter, and plot-ready export of grid
//! evaluations.
//!
//! CSV dialect: comma-separated, UTF-8, header row required, '.' decimal
//! point. Ingestion never silently drops rows — every input row is either
//! converted or reported as rejected with its line number. All file
//! outputs are written atomically (temp file in the target directory,
//! then rename).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::estimator::DensityEstimate;
use crate::geometry::{Manifold, ManifoldPoint, wrap_angle};
use crate::models::sample_von_mises;
use crate::neighbors::{NeighborError, SampleSet};

#[derive(Debug, Error)]
pub enum DataIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("CSV parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column {column:?}")]
    MissingColumn { column: String },
    #[error("input file has no data rows")]
    EmptyFile,
    #[error("no valid rows after validation ({rejected} rejected)")]
    NoValidRows { rejected: usize },
    #[error("grid and estimates must have equal length ({grid} vs {estimates})")]
    LengthMismatch { grid: usize, estimates: usize },
    #[error("axial standardization needs at least two distinct values")]
    DegenerateStandardization,
    #[error(transparent)]
    Sample(#[from] NeighborError),
}

/// A row that failed validation, with its 1-based line number in the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

/// Parsed rows of an ingestion run; `records + rejected` accounts for
/// every data row of the file.
#[derive(Debug, Clone)]
pub struct Ingest<R> {
    pub records: Vec<R>,
    pub rejected: Vec<RejectedRow>,
    pub total_rows: usize,
}

/// A directional observation in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalRecord {
    /// Longitude in [-180, 180], east positive.
    pub longitude: f64,
    /// Latitude in [-90, 90].
    pub latitude: f64,
}

/// A cylindrical observation: a direction in degrees and an axial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderRecord {
    /// Direction in [0, 360).
    pub wind_direction: f64,
    /// Axial component (e.g. temperature in °C), used raw by default.
    pub temperature: f64,
}

/// Column names for directional CSVs.
#[derive(Debug, Clone)]
pub struct SphereColumns {
    pub longitude: String,
    pub latitude: String,
}

impl Default for SphereColumns {
    fn default() -> Self {
        Self { longitude: "longitude".into(), latitude: "latitude".into() }
    }
}

/// Column names for cylindrical CSVs.
#[derive(Debug, Clone)]
pub struct CylinderColumns {
    pub direction: String,
    pub temperature: String,
}

impl Default for CylinderColumns {
    fn default() -> Self {
        Self { direction: "direction".into(), temperature: "temperature".into() }
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, DataIoError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| DataIoError::MissingColumn { column: name.to_string() })
}

fn parse_rows<R>(
    path: &Path,
    columns: &[&str],
    mut convert: impl FnMut(&[f64]) -> Result<R, String>,
) -> Result<Ingest<R>, DataIoError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(DataIoError::EmptyFile);
    }
    let indices: Vec<usize> = columns
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<_, _>>()?;

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut total_rows = 0usize;
    for row in reader.records() {
        let row = row?;
        total_rows += 1;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let mut values = Vec::with_capacity(indices.len());
        let mut failure: Option<String> = None;
        for (&idx, &name) in indices.iter().zip(columns) {
            match row.get(idx).map(str::trim) {
                Some(field) if !field.is_empty() => match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        failure = Some(format!("column {name:?} is not a finite number"));
                        break;
                    }
                },
                _ => {
                    failure = Some(format!("column {name:?} is empty"));
                    break;
                }
            }
        }
        let outcome = match failure {
            Some(reason) => Err(reason),
            None => convert(&values),
        };
        match outcome {
            Ok(record) => records.push(record),
            Err(reason) => rejected.push(RejectedRow { line, reason }),
        }
    }
    if total_rows == 0 {
        return Err(DataIoError::EmptyFile);
    }
    if records.is_empty() {
        return Err(DataIoError::NoValidRows { rejected: rejected.len() });
    }
    Ok(Ingest { records, rejected, total_rows })
}

/// Reads a longitude/latitude CSV into directional records.
pub fn read_directional_csv(
    path: &Path,
    columns: &SphereColumns,
) -> Result<Ingest<DirectionalRecord>, DataIoError> {
    parse_rows(path, &[&columns.longitude, &columns.latitude], |v| {
        let (longitude, latitude) = (v[0], v[1]);
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(format!("longitude {longitude} outside [-180, 180]"));
        }
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(format!("latitude {latitude} outside [-90, 90]"));
        }
        Ok(DirectionalRecord { longitude, latitude })
    })
}

/// Reads a direction/temperature CSV into cylindrical records.
pub fn read_cylinder_csv(
    path: &Path,
    columns: &CylinderColumns,
) -> Result<Ingest<CylinderRecord>, DataIoError> {
    parse_rows(path, &[&columns.direction, &columns.temperature], |v| {
        let (wind_direction, temperature) = (v[0], v[1]);
        if !(0.0..360.0).contains(&wind_direction) {
            return Err(format!("direction {wind_direction} outside [0, 360)"));
        }
        Ok(CylinderRecord { wind_direction, temperature })
    })
}

/// Reads a plain-coordinate CSV with columns x1..xd.
pub fn read_euclidean_csv(path: &Path, dim: usize) -> Result<Ingest<Vec<f64>>, DataIoError> {
    let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    parse_rows(path, &name_refs, |v| Ok(v.to_vec()))
}

/// (longitude, latitude) in degrees → point on the unit sphere.
pub fn sphere_point_from_lon_lat(longitude: f64, latitude: f64) -> ManifoldPoint {
    let lambda = longitude.to_radians();
    let phi = latitude.to_radians();
    ManifoldPoint::new(vec![
        phi.cos() * lambda.cos(),
        phi.cos() * lambda.sin(),
        phi.sin(),
    ])
}

/// Inverse of [`sphere_point_from_lon_lat`], up to the radius of the
/// sphere the point lives on.
pub fn lon_lat_from_sphere_point(p: &ManifoldPoint, radius: f64) -> (f64, f64) {
    let c = p.coords();
    let latitude = (c[2] / radius).clamp(-1.0, 1.0).asin().to_degrees();
    let longitude = c[1].atan2(c[0]).to_degrees();
    (longitude, latitude)
}

/// Converts directional records to a sample on the unit sphere.
pub fn directional_to_sample(records: &[DirectionalRecord]) -> Result<SampleSet, DataIoError> {
    let points = records
        .iter()
        .map(|r| sphere_point_from_lon_lat(r.longitude, r.latitude))
        .collect();
    Ok(SampleSet::new(Manifold::Sphere { radius: 1.0 }, points)?)
}

/// Converts cylindrical records to a sample on the unit cylinder,
/// optionally standardizing the axial component to zero mean and unit
/// standard deviation (the cylinder metric mixes radians with the axial
/// unit, so the default keeps the axial values raw).
pub fn cylinder_to_sample(
    records: &[CylinderRecord],
    standardize_axial: bool,
) -> Result<SampleSet, DataIoError> {
    let (shift, scale) = if standardize_axial {
        let n = records.len() as f64;
        let mean = records.iter().map(|r| r.temperature).sum::<f64>() / n;
        let var = records
            .iter()
            .map(|r| (r.temperature - mean) * (r.temperature - mean))
            .sum::<f64>()
            / (n - 1.0).max(1.0);
        if !(var > 0.0) {
            return Err(DataIoError::DegenerateStandardization);
        }
        (mean, var.sqrt())
    } else {
        (0.0, 1.0)
    };
    let points = records
        .iter()
        .map(|r| {
            let angle = r.wind_direction.to_radians();
            ManifoldPoint::new(vec![angle.cos(), angle.sin(), (r.temperature - shift) / scale])
        })
        .collect();
    Ok(SampleSet::new(Manifold::Cylinder, points)?)
}

/// The perturbation scale ξ = n^{-1/5} used for repeated angular data.
pub fn default_jitter_scale(n: usize) -> f64 {
    (n as f64).powf(-0.2)
}

/// Replaces every angle that occurs more than once by r + ξε (mod 2π),
/// with ε drawn from the circular von Mises vM(0, κ); unique angles pass
/// through untouched. Draws happen in record order, so the output is
/// deterministic under a fixed stream, and the operation is the identity
/// on data without duplicates.
pub fn jitter_repeated_angles(
    records: &[CylinderRecord],
    rng: &mut dyn RngCore,
    xi: f64,
    kappa: f64,
) -> Vec<CylinderRecord> {
    let mut counts: HashMap<u64, u32> = HashMap::new();
    for r in records {
        *counts.entry(r.wind_direction.to_bits()).or_insert(0) += 1;
    }
    records
        .iter()
        .map(|r| {
            if counts[&r.wind_direction.to_bits()] > 1 {
                let eps = wrap_angle(sample_von_mises(rng, 0.0, kappa));
                let angle = (r.wind_direction.to_radians() + xi * eps).rem_euclid(2.0 * PI);
                CylinderRecord { wind_direction: angle.to_degrees(), temperature: r.temperature }
            } else {
                *r
            }
        })
        .collect()
}

/// Output format for grid exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Writes grid points and their density estimates to `path`, row-major in
/// grid order. Sphere grids additionally get longitude/latitude columns.
/// Identical inputs produce byte-identical files.
pub fn export_grid(
    manifold: &Manifold,
    grid: &[ManifoldPoint],
    estimates: &[DensityEstimate],
    format: ExportFormat,
    path: &Path,
) -> Result<(), DataIoError> {
    if grid.len() != estimates.len() {
        return Err(DataIoError::LengthMismatch { grid: grid.len(), estimates: estimates.len() });
    }
    let bytes = match format {
        ExportFormat::Csv => export_csv_string(manifold, grid, estimates).into_bytes(),
        ExportFormat::Json => export_json_string(manifold, grid, estimates).into_bytes(),
    };
    write_atomic(path, &bytes)
}

fn coordinate_headers(manifold: &Manifold) -> Vec<String> {
    match manifold {
        Manifold::Euclidean { dim } => (1..=*dim).map(|i| format!("x{i}")).collect(),
        Manifold::Sphere { .. } => {
            vec!["x".into(), "y".into(), "z".into(), "longitude".into(), "latitude".into()]
        }
        Manifold::Cylinder => vec!["x".into(), "y".into(), "z".into()],
    }
}

fn export_csv_string(manifold: &Manifold, grid: &[ManifoldPoint], estimates: &[DensityEstimate]) -> String {
    let mut out = String::new();
    out.push_str(&coordinate_headers(manifold).join(","));
    out.push_str(",density\n");
    for (p, e) in grid.iter().zip(estimates) {
        let mut fields: Vec<String> = p.coords().iter().map(|c| format!("{c}")).collect();
        if let Manifold::Sphere { radius } = manifold {
            let (lon, lat) = lon_lat_from_sphere_point(p, *radius);
            fields.push(format!("{lon}"));
            fields.push(format!("{lat}"));
        }
        fields.push(format!("{}", e.value));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn export_json_string(manifold: &Manifold, grid: &[ManifoldPoint], estimates: &[DensityEstimate]) -> String {
    #[derive(Serialize)]
    struct Row<'a> {
        coords: &'a [f64],
        #[serde(skip_serializing_if = "Option::is_none")]
        longitude: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        latitude: Option<f64>,
        density: f64,
        bandwidth: f64,
    }
    #[derive(Serialize)]
    struct Export<'a> {
        manifold: &'a Manifold,
        points: usize,
        rows: Vec<Row<'a>>,
    }
    let rows = grid
        .iter()
        .zip(estimates)
        .map(|(p, e)| {
            let (longitude, latitude) = match manifold {
                Manifold::Sphere { radius } => {
                    let (lon, lat) = lon_lat_from_sphere_point(p, *radius);
                    (Some(lon), Some(lat))
                }
                _ => (None, None),
            };
            Row {
                coords: p.coords(),
                longitude,
                latitude,
                density: e.value,
                bandwidth: e.bandwidth,
            }
        })
        .collect();
    serde_json::to_string_pretty(&Export { manifold, points: grid.len(), rows })
        .expect("export serialization cannot fail")
}

/// Atomic write: temp file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataIoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn sphere_conversion_examples() {
        let north = sphere_point_from_lon_lat(0.0, 90.0);
        assert_abs_diff_eq!(north.coords()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(north.coords()[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(north.coords()[2], 1.0, epsilon = 1e-15);
        let east = sphere_point_from_lon_lat(90.0, 0.0);
        assert_abs_diff_eq!(east.coords()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(east.coords()[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(east.coords()[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lon_lat_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        use rand::Rng;
        for _ in 0..100 {
            let lon: f64 = rng.random_range(-179.99..179.99);
            let lat: f64 = rng.random_range(-89.9..89.9);
            let p = sphere_point_from_lon_lat(lon, lat);
            let norm: f64 = p.coords().iter().map(|c| c * c).sum::<f64>();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            let (lon2, lat2) = lon_lat_from_sphere_point(&p, 1.0);
            assert_abs_diff_eq!(lon, lon2, epsilon = 1e-9);
            assert_abs_diff_eq!(lat, lat2, epsilon = 1e-9);
        }
    }

    #[test]
    fn ingestion_accounts_for_every_row() {
        let file = write_temp(
            "site,longitude,latitude\n\
             a,10.5,-20.25\n\
             b,191.0,10.0\n\
             c,abc,5.0\n\
             d,-45.0,45.0\n",
        );
        let ingest = read_directional_csv(file.path(), &SphereColumns::default()).unwrap();
        assert_eq!(ingest.records.len(), 2);
        assert_eq!(ingest.rejected.len(), 2);
        assert_eq!(ingest.total_rows, 4);
        assert_eq!(ingest.rejected[0].line, 3);
        assert_eq!(ingest.rejected[1].line, 4);
        let sample = directional_to_sample(&ingest.records).unwrap();
        assert_eq!(sample.len(), 2);
    }

    #[test]
    fn missing_column_and_empty_file_errors() {
        let file = write_temp("lon,lat\n1.0,2.0\n");
        assert!(matches!(
            read_directional_csv(file.path(), &SphereColumns::default()),
            Err(DataIoError::MissingColumn { .. })
        ));
        let empty = write_temp("longitude,latitude\n");
        assert!(matches!(
            read_directional_csv(empty.path(), &SphereColumns::default()),
            Err(DataIoError::EmptyFile)
        ));
        let all_bad = write_temp("longitude,latitude\n999,0\n");
        assert!(matches!(
            read_directional_csv(all_bad.path(), &SphereColumns::default()),
            Err(DataIoError::NoValidRows { rejected: 1 })
        ));
    }

    #[test]
    fn cylinder_conversion_examples() {
        let records = [
            CylinderRecord { wind_direction: 0.0, temperature: 20.0 },
            CylinderRecord { wind_direction: 180.0, temperature: -5.0 },
        ];
        let sample = cylinder_to_sample(&records, false).unwrap();
        let p0 = sample.points()[0].coords();
        assert_abs_diff_eq!(p0[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p0[1], 0.0, epsilon = 1e-15);
        assert_eq!(p0[2], 20.0);
        let p1 = sample.points()[1].coords();
        assert_abs_diff_eq!(p1[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p1[1], 0.0, epsilon = 1e-12);
        assert_eq!(p1[2], -5.0);
    }

    #[test]
    fn axial_standardization() {
        let records = [
            CylinderRecord { wind_direction: 0.0, temperature: 10.0 },
            CylinderRecord { wind_direction: 90.0, temperature: 20.0 },
            CylinderRecord { wind_direction: 180.0, temperature: 30.0 },
        ];
        let sample = cylinder_to_sample(&records, true).unwrap();
        let axials: Vec<f64> = sample.points().iter().map(|p| p.coords()[2]).collect();
        assert_abs_diff_eq!(axials.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(axials[2], 1.0, epsilon = 1e-12);
        let constant = [
            CylinderRecord { wind_direction: 0.0, temperature: 7.0 },
            CylinderRecord { wind_direction: 90.0, temperature: 7.0 },
        ];
        assert!(matches!(
            cylinder_to_sample(&constant, true),
            Err(DataIoError::DegenerateStandardization)
        ));
    }

    #[test]
    fn jitter_scale_rule() {
        assert_abs_diff_eq!(default_jitter_scale(1326), 0.23740578376532228, epsilon = 1e-12);
        assert_abs_diff_eq!(default_jitter_scale(32), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn jitter_passes_unique_data_through() {
        let records = [
            CylinderRecord { wind_direction: 10.0, temperature: 1.0 },
            CylinderRecord { wind_direction: 20.0, temperature: 2.0 },
            CylinderRecord { wind_direction: 30.0, temperature: 3.0 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let out = jitter_repeated_angles(&records, &mut rng, 0.1, 1.0);
        assert_eq!(out, records);
    }

    #[test]
    fn jitter_perturbs_only_duplicates_and_stays_local() {
        let records = [
            CylinderRecord { wind_direction: 10.0, temperature: 1.0 },
            CylinderRecord { wind_direction: 10.0, temperature: 2.0 },
            CylinderRecord { wind_direction: 355.0, temperature: 3.0 },
            CylinderRecord { wind_direction: 355.0, temperature: 4.0 },
            CylinderRecord { wind_direction: 77.0, temperature: 5.0 },
        ];
        let xi = default_jitter_scale(records.len());
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let out = jitter_repeated_angles(&records, &mut rng, xi, 1.0);
        assert_eq!(out[4], records[4]);
        for (before, after) in records.iter().zip(&out).take(4) {
            assert_ne!(before.wind_direction, after.wind_direction);
            assert_eq!(before.temperature, after.temperature);
            // Circular displacement is ξ·ε with ε ∈ (-π, π], so < 4ξ always.
            let delta = wrap_angle(
                after.wind_direction.to_radians() - before.wind_direction.to_radians(),
            )
            .abs();
            assert!(delta <= 4.0 * xi);
            assert!((0.0..360.0).contains(&after.wind_direction));
        }
        // Determinism under a fixed stream.
        let mut rng2 = ChaCha8Rng::seed_from_u64(1234);
        let out2 = jitter_repeated_angles(&records, &mut rng2, xi, 1.0);
        assert_eq!(out, out2);
    }

    #[test]
    fn export_grid_csv_and_json() {
        let m = Manifold::Sphere { radius: 1.0 };
        let grid: Vec<ManifoldPoint> = (0..10)
            .map(|i| sphere_point_from_lon_lat(i as f64 * 30.0, 10.0))
            .collect();
        let estimates: Vec<DensityEstimate> = (0..10)
            .map(|i| DensityEstimate {
                value: i as f64 / 10.0,
                bandwidth: 0.5,
                contributing_points: i,
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("grid.csv");
        export_grid(&m, &grid, &estimates, ExportFormat::Csv, &csv_path).unwrap();
        let content = std::fs::read_to_string(&csv_path).unwrap();
        assert!(content.starts_with("x,y,z,longitude,latitude,density\n"));
        assert_eq!(content.lines().count(), 11);

        // Re-export is byte identical.
        export_grid(&m, &grid, &estimates, ExportFormat::Csv, &csv_path).unwrap();
        assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), content);

        let json_path = dir.path().join("grid.json");
        export_grid(&m, &grid, &estimates, ExportFormat::Json, &json_path).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(parsed["points"], 10);
        assert_eq!(parsed["rows"].as_array().unwrap().len(), 10);
        assert!(parsed["rows"][0]["longitude"].is_number());
    }

    #[test]
    fn export_empty_grid_is_header_only() {
        let m = Manifold::Euclidean { dim: 2 };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        export_grid(&m, &[], &[], ExportFormat::Csv, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x1,x2,density\n");
    }

    #[test]
    fn export_rejects_mismatched_lengths_and_bad_paths() {
        let m = Manifold::Euclidean { dim: 1 };
        let grid = vec![ManifoldPoint::new(vec![0.0])];
        let err = export_grid(&m, &grid, &[], ExportFormat::Csv, Path::new("out.csv")).unwrap_err();
        assert!(matches!(err, DataIoError::LengthMismatch { grid: 1, estimates: 0 }));
        let est = vec![DensityEstimate { value: 0.0, bandwidth: 1.0, contributing_points: 0 }];
        let missing_dir = Path::new("/nonexistent-dir-for-export/out.csv");
        assert!(matches!(
            export_grid(&m, &grid, &est, ExportFormat::Csv, missing_dir),
            Err(DataIoError::Io(_))
        ));
    }

    #[test]
    fn euclidean_csv_reader() {
        let file = write_temp("x1,x2\n0.5,1.5\n-1.0,2.0\nbad,3.0\n");
        let ingest = read_euclidean_csv(file.path(), 2).unwrap();
        assert_eq!(ingest.records.len(), 2);
        assert_eq!(ingest.rejected.len(), 1);
        assert_eq!(ingest.records[0], vec![0.5, 1.5]);
    }
}
