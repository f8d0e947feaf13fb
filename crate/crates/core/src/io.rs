//! Artifact files: versioned CSV tables, pretty JSON and the run manifest.
//!
//! Every CSV starts with a `# roughstart-csv v<version> <schema>` line
//! followed by the header. Readers check both and parse every numeric cell.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Num(&'static str),
    Text(&'static str),
}

impl Column {
    pub fn name(&self) -> &'static str {
        match self {
            Column::Num(n) | Column::Text(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvSchema {
    pub name: &'static str,
    pub columns: &'static [Column],
}

use Column::{Num, Text};

pub const BLOCK_SERIES: CsvSchema = CsvSchema {
    name: "block_series",
    columns: &[Num("t"), Num("j"), Num("block_sup"), Num("norm")],
};

pub const IC_PROBE: CsvSchema = CsvSchema {
    name: "ic_probe",
    columns: &[
        Num("j"),
        Num("mean"),
        Num("p05"),
        Num("p50"),
        Num("p95"),
        Num("fitted_slope"),
    ],
};

pub const MOMENT_PROBE: CsvSchema = CsvSchema {
    name: "moment_probe",
    columns: &[
        Num("t"),
        Num("j"),
        Num("exact_moment"),
        Num("mc_mean"),
        Num("mc_stderr"),
    ],
};

pub const ITERATE_NORMS: CsvSchema = CsvSchema {
    name: "iterate_norms",
    columns: &[Num("iteration"), Num("norm"), Num("increment"), Num("ratio")],
};

pub const BLOWUP_MODES: CsvSchema = CsvSchema {
    name: "blowup_modes",
    columns: &[
        Num("k"),
        Num("sigma_k"),
        Num("P_analytic"),
        Num("P_empirical"),
    ],
};

pub const CLASSIFICATION: CsvSchema = CsvSchema {
    name: "classification",
    columns: &[
        Text("equation"),
        Text("tau"),
        Text("sigma"),
        Text("a"),
        Text("b"),
        Text("alpha_min"),
        Text("delta"),
        Text("critical_space"),
        Text("regime"),
    ],
};

pub const ASYMPTOTICS: CsvSchema = CsvSchema {
    name: "asymptotics",
    columns: &[
        Num("nu"),
        Num("p"),
        Num("tau"),
        Num("t"),
        Num("G"),
        Num("normalized"),
    ],
};

pub const ALL_SCHEMAS: &[CsvSchema] = &[
    BLOCK_SERIES,
    IC_PROBE,
    MOMENT_PROBE,
    ITERATE_NORMS,
    BLOWUP_MODES,
    CLASSIFICATION,
    ASYMPTOTICS,
];

fn magic(schema: &CsvSchema) -> String {
    format!("# roughstart-csv v{CSV_VERSION} {}", schema.name)
}

/// Shortest round-trip representation; stable across runs.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

/// Serializes rows of cells; the row width must match the schema.
pub fn csv_string(schema: &CsvSchema, rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(schema.columns.iter().map(Column::name))?;
    for (i, r) in rows.iter().enumerate() {
        if r.len() != schema.columns.len() {
            return Err(Error::Format(format!(
                "{} row {i} has {} cells, expected {}",
                schema.name,
                r.len(),
                schema.columns.len()
            )));
        }
        w.write_record(r)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv buffer: {e}")))?;
    let body = String::from_utf8(body).map_err(|e| Error::Format(e.to_string()))?;
    Ok(format!("{}\n{body}", magic(schema)))
}

pub fn write_csv(path: &Path, schema: &CsvSchema, rows: &[Vec<String>]) -> Result<()> {
    fs::write(path, csv_string(schema, rows)?)?;
    Ok(())
}

/// Numeric rows as strings.
pub fn num_rows<const W: usize>(rows: impl IntoIterator<Item = [f64; W]>) -> Vec<Vec<String>> {
    rows.into_iter()
        .map(|r| r.iter().map(|&x| fmt_num(x)).collect())
        .collect()
}

/// Parses and validates a table written by [`csv_string`].
pub fn parse_csv(schema: &CsvSchema, text: &str) -> Result<Vec<Vec<String>>> {
    let (first, rest) = text
        .split_once('\n')
        .ok_or_else(|| Error::Format("empty csv".into()))?;
    let first = first.trim_end_matches('\r');
    if first != magic(schema) {
        return Err(Error::Format(format!(
            "expected `{}`, found `{first}`",
            magic(schema)
        )));
    }
    let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = schema.columns.iter().map(Column::name).collect();
    if header != expected {
        return Err(Error::Format(format!(
            "{} header {header:?} differs from {expected:?}",
            schema.name
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row: Vec<String> = rec.iter().map(str::to_string).collect();
        for (c, cell) in schema.columns.iter().zip(&row) {
            if let Column::Num(name) = c {
                cell.parse::<f64>().map_err(|_| {
                    Error::Format(format!("{} row {i}: `{cell}` in `{name}` is not a number", schema.name))
                })?;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_csv(path: &Path, schema: &CsvSchema) -> Result<Vec<Vec<String>>> {
    parse_csv(schema, &fs::read_to_string(path)?)
}

/// Numeric column `name` of parsed rows.
pub fn column(schema: &CsvSchema, rows: &[Vec<String>], name: &str) -> Result<Vec<f64>> {
    let i = schema
        .columns
        .iter()
        .position(|c| c.name() == name)
        .ok_or_else(|| Error::Format(format!("no column `{name}` in {}", schema.name)))?;
    rows.iter()
        .map(|r| {
            r[i].parse::<f64>()
                .map_err(|_| Error::Format(format!("`{}` is not a number", r[i])))
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Reproduction record written next to every set of artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub csv_version: u32,
    pub command: String,
    pub seed: Option<u64>,
    /// Fully resolved configuration, defaults filled in.
    pub config: serde_json::Value,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            csv_version: CSV_VERSION,
            command: command.into(),
            seed,
            config,
            artifacts: Vec::new(),
        }
    }
}

/// Collects artifact names while writing into one directory.
pub struct ArtifactDir {
    root: PathBuf,
    written: Vec<String>,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn csv(&mut self, name: &str, schema: &CsvSchema, rows: &[Vec<String>]) -> Result<()> {
        write_csv(&self.root.join(name), schema, rows)?;
        self.written.push(name.into());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        write_json(&self.root.join(name), value)?;
        self.written.push(name.into());
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.root.join(name), body)?;
        self.written.push(name.into());
        Ok(())
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn finish(self, mut manifest: Manifest) -> Result<PathBuf> {
        manifest.artifacts = self.written;
        let p = self.root.join("manifest.json");
        write_json(&p, &manifest)?;
        Ok(p)
    }
}
