//! Data-set files: one point per CSV row with an optional trailing `label`
//! column, plus a JSON sidecar naming the optional clean-point and basis
//! files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DataSet, SubspaceModel};
use crate::numerics::{Mat, Vector};

use super::table::csv_err;

pub const POINTS_FILE: &str = "points.csv";
pub const CLEAN_FILE: &str = "clean.csv";
pub const BASES_FILE: &str = "bases.csv";
pub const SIDECAR_FILE: &str = "dataset.json";

/// Contents of the JSON sidecar. File names are relative to its directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub n: usize,
    pub num_points: usize,
    pub num_clusters: Option<usize>,
    pub subspace_dim: Option<usize>,
    pub epsilon: Option<f64>,
    pub points: String,
    pub clean_points: Option<String>,
    pub bases: Option<String>,
}

/// A data set read from disk, with ground-truth subspaces when provided.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedData {
    pub data: DataSet,
    pub models: Option<Vec<SubspaceModel>>,
}

fn write_rows(
    path: &Path,
    cols: &Mat,
    tags: Option<(&str, &[usize])>,
    metadata: &[(String, String)],
) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    for (k, v) in metadata {
        writeln!(f, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(f));
    let mut header: Vec<String> = (0..cols.nrows()).map(|r| format!("x{r}")).collect();
    if let Some((name, _)) = tags {
        header.push(name.to_string());
    }
    w.write_record(&header).map_err(csv_err)?;
    for (j, c) in cols.column_iter().enumerate() {
        let mut rec: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        if let Some((_, t)) = tags {
            rec.push(t[j].to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Write points, clean points and bases into `dir`; returns the sidecar
/// path. `metadata` is prepended to each CSV as `# key=value` lines.
pub fn write_dataset(
    dir: &Path,
    data: &DataSet,
    models: Option<&[SubspaceModel]>,
    metadata: &[(String, String)],
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let labels = data.labels.as_deref().map(|l| ("label", l));
    write_rows(&dir.join(POINTS_FILE), &data.points, labels, metadata)?;
    let clean_points = match &data.clean_points {
        Some(c) => {
            write_rows(&dir.join(CLEAN_FILE), c, labels, metadata)?;
            Some(CLEAN_FILE.to_string())
        }
        None => None,
    };
    let bases = match models {
        Some(ms) if !ms.is_empty() => {
            let cols: Vec<Vector> = ms
                .iter()
                .flat_map(|m| m.basis().column_iter().map(|c| c.into_owned()))
                .collect();
            let owner: Vec<usize> = ms
                .iter()
                .enumerate()
                .flat_map(|(k, m)| std::iter::repeat_n(k, m.dim()))
                .collect();
            write_rows(
                &dir.join(BASES_FILE),
                &Mat::from_columns(&cols),
                Some(("subspace", &owner)),
                metadata,
            )?;
            Some(BASES_FILE.to_string())
        }
        _ => None,
    };
    let meta = DatasetMeta {
        n: data.ambient_dim(),
        num_points: data.num_points(),
        num_clusters: data.num_clusters(),
        subspace_dim: models.and_then(|m| m.first()).map(|m| m.dim()),
        epsilon: data.noise_bound,
        points: POINTS_FILE.to_string(),
        clean_points,
        bases,
    };
    let path = dir.join(SIDECAR_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(path)
}

/// Rows of a numeric CSV. A first row that does not parse as numbers is
/// taken as the header; a trailing column named `label` or `subspace` is
/// returned separately.
struct Rows {
    values: Vec<Vec<f64>>,
    tags: Option<Vec<i64>>,
}

fn read_rows(path: &Path) -> Result<Rows> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut records = rdr.records().peekable();
    let mut tag_col = false;
    if let Some(Ok(first)) = records.peek() {
        if first.iter().any(|f| f.parse::<f64>().is_err()) {
            tag_col = matches!(first.iter().last(), Some("label" | "subspace"));
            records.next();
        }
    }
    let mut values = Vec::new();
    let mut tags = Vec::new();
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(csv_err)?;
        let mut fields: Vec<&str> = rec.iter().collect();
        if tag_col {
            let t = fields.pop().unwrap_or_default();
            tags.push(t.parse::<i64>().map_err(|_| {
                Error::Format(format!("{}: row {}: bad label {t:?}", path.display(), line + 1))
            })?);
        }
        let row = fields
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("{}: row {}: {e}", path.display(), line + 1)))?;
        if let Some(w) = values.first().map(|r: &Vec<f64>| r.len()) {
            if row.len() != w {
                return Err(Error::Format(format!("{}: ragged row {}", path.display(), line + 1)));
            }
        }
        values.push(row);
    }
    if values.is_empty() {
        return Err(Error::Format(format!("{}: no data rows", path.display())));
    }
    Ok(Rows {
        values,
        tags: tag_col.then_some(tags),
    })
}

fn to_columns(rows: &[Vec<f64>]) -> Mat {
    Mat::from_fn(rows[0].len(), rows.len(), |r, c| rows[c][r])
}

/// Map arbitrary integer labels onto `0..L` in increasing label order.
pub fn dense_labels(raw: &[i64]) -> Vec<usize> {
    let mut vals = raw.to_vec();
    vals.sort_unstable();
    vals.dedup();
    raw.iter().map(|v| vals.binary_search(v).unwrap()).collect()
}

/// Read a sidecar (`.json`) or a bare points CSV.
pub fn read_dataset(path: &Path) -> Result<LoadedData> {
    if path.extension().is_some_and(|e| e == "json") {
        read_sidecar(path)
    } else {
        let rows = read_rows(path)?;
        let labels = rows.tags.as_deref().map(dense_labels);
        let data = DataSet::new(to_columns(&rows.values), labels, None, None)?;
        Ok(LoadedData { data, models: None })
    }
}

fn read_sidecar(path: &Path) -> Result<LoadedData> {
    let meta: DatasetMeta = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let rows = read_rows(&dir.join(&meta.points))?;
    let points = to_columns(&rows.values);
    if points.nrows() != meta.n || points.ncols() != meta.num_points {
        return Err(Error::Format(format!(
            "points file is {}×{}, sidecar says {}×{}",
            points.nrows(),
            points.ncols(),
            meta.n,
            meta.num_points
        )));
    }
    let labels = rows.tags.as_deref().map(dense_labels);
    let clean = match &meta.clean_points {
        Some(f) => Some(to_columns(&read_rows(&dir.join(f))?.values)),
        None => None,
    };
    let data = DataSet::new(points, labels, clean, meta.epsilon)?;
    let models = match &meta.bases {
        Some(f) => {
            let rows = read_rows(&dir.join(f))?;
            let owner = rows
                .tags
                .ok_or_else(|| Error::Format("bases file lacks a subspace column".into()))?;
            let cols = to_columns(&rows.values);
            let ids = dense_labels(&owner);
            let l = ids.iter().max().map_or(0, |m| m + 1);
            let models = (0..l)
                .map(|k| {
                    let idx: Vec<usize> = (0..ids.len()).filter(|&j| ids[j] == k).collect();
                    SubspaceModel::new(crate::geometry::select_columns(&cols, &idx))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(models)
        }
        None => None,
    };
    if let (Some(ms), Some(l)) = (&models, data.num_clusters()) {
        if ms.len() != l {
            return Err(Error::Format(format!("{} bases for {l} clusters", ms.len())));
        }
    }
    Ok(LoadedData { data, models })
}
