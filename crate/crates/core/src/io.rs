//! CSV import and export of point clouds, embeddings and partitions.

use std::io::{Read, Write};
use std::path::Path;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::graph::PointCloud;
use crate::metrics::Partition;

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn write_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Io(std::io::Error::other(format!("{kind:?}"))),
    }
}

/// Reads one point per row. A first row that does not parse as numbers is taken as a
/// header. `path` is only used in error messages.
pub fn read_point_cloud(reader: impl Read, path: &Path) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse).collect();
        match parsed {
            Ok(row) => points.push(row),
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: record.position().map_or(idx + 1, |p| p.line() as usize),
                    message: e.to_string(),
                })
            }
        }
    }
    if points.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "no points".into(),
        });
    }
    PointCloud::from_points(&points)
}

pub fn load_point_cloud(path: &Path) -> Result<PointCloud> {
    read_point_cloud(std::fs::File::open(path)?, path)
}

/// Header `x0,...,x{p-1}` plus `label` and `theta` columns when present.
pub fn write_point_cloud(cloud: &PointCloud, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..cloud.dim()).map(|j| format!("x{j}")).collect();
    if cloud.labels.is_some() {
        header.push("label".into());
    }
    if cloud.parameter.is_some() {
        header.push("theta".into());
    }
    w.write_record(&header).map_err(write_error)?;
    for i in 0..cloud.n_points() {
        let mut row: Vec<String> = cloud.point(i).iter().map(f64::to_string).collect();
        if let Some(labels) = &cloud.labels {
            row.push(labels[i].to_string());
        }
        if let Some(theta) = &cloud.parameter {
            row.push(theta[i].to_string());
        }
        w.write_record(&row).map_err(write_error)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per vertex, one column per basis vector, header `b0,...`.
pub fn write_embedding(basis: MatRef<'_, f64>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((0..basis.ncols()).map(|j| format!("b{j}")))
        .map_err(write_error)?;
    for i in 0..basis.nrows() {
        w.write_record((0..basis.ncols()).map(|j| basis[(i, j)].to_string()))
            .map_err(write_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads what [`write_embedding`] writes: a header row, then equal-length rows of
/// numbers.
pub fn read_embedding(reader: impl Read, path: &Path) -> Result<Mat<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.deserialize::<Vec<f64>>() {
        rows.push(record.map_err(|e| csv_error(path, e))?);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "empty embedding".into(),
        });
    }
    Ok(Mat::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn load_embedding(path: &Path) -> Result<Mat<f64>> {
    read_embedding(std::fs::File::open(path)?, path)
}

/// Rows `vertex,label`.
pub fn write_partition(partition: &Partition, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "label"]).map_err(write_error)?;
    for (v, l) in partition.labels().iter().enumerate() {
        w.write_record([v.to_string(), l.to_string()])
            .map_err(write_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `vertex,label` rows (any order, with header). Every vertex in 0..N must appear
/// exactly once.
pub fn read_partition(reader: impl Read, path: &Path) -> Result<Partition> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut pairs = Vec::new();
    for record in rdr.deserialize::<(usize, usize)>() {
        pairs.push(record.map_err(|e| csv_error(path, e))?);
    }
    let n = pairs.len();
    let mut labels = vec![usize::MAX; n];
    for (v, l) in pairs {
        if v >= n || labels[v] != usize::MAX {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("vertex {v} is out of range or repeated"),
            });
        }
        labels[v] = l;
    }
    Ok(Partition::from_labels(labels))
}

pub fn load_partition(path: &Path) -> Result<Partition> {
    read_partition(std::fs::File::open(path)?, path)
}
