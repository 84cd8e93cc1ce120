//! Canonical relation files: a gzip container holding `#key\tvalue` header
//! lines followed by tab-separated rows, UTF-8 with LF line endings.
//!
//! Header order is fixed: `name`, `arity`, `columns`, then the metadata
//! entries in their stored order. Tabs, newlines, carriage returns and
//! backslashes inside values are written as `\t`, `\n`, `\r` and `\\`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::IngestError;
use crate::relcore::{parse_rel_name, Column, RelationInfo, RelationSchema, Row, Value};

pub const EXTENSION: &str = "tsv.gz";

/// In-memory image of a canonical file.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFile {
    pub schema: RelationSchema,
    pub info: RelationInfo,
    pub rows: Vec<Row>,
}

/// `<org>/<db>/<name>.tsv.gz` below `root`.
pub fn cell_file(root: &Path, name: &crate::relcore::RelName) -> PathBuf {
    root.join(name.org().as_str())
        .join(name.db().as_str())
        .join(format!("{name}.{EXTENSION}"))
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_field(s: &str) -> Result<String, IngestError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('#') => out.push('#'),
            other => return Err(IngestError::Corrupt(format!("bad escape \\{other:?} in {s:?}"))),
        }
    }
    Ok(out)
}

fn header_lines(schema: &RelationSchema, info: &RelationInfo, row_count: usize) -> Vec<(String, String)> {
    let mut lines = vec![
        ("name".to_string(), schema.name().to_string()),
        ("arity".to_string(), schema.arity().to_string()),
        ("columns".to_string(), schema.columns_spec()),
        (RelationInfo::ROW_COUNT.to_string(), row_count.to_string()),
    ];
    lines.extend(info.entries().iter().filter(|(k, _)| k != RelationInfo::ROW_COUNT).cloned());
    lines
}

/// Writes the uncompressed text of a canonical file.
pub fn write_text<W: Write>(
    out: &mut W,
    schema: &RelationSchema,
    info: &RelationInfo,
    rows: &[Row],
) -> Result<(), IngestError> {
    for (key, value) in header_lines(schema, info, rows.len()) {
        writeln!(out, "#{}\t{}", escape_field(&key), escape_field(&value))?;
    }
    let mut line = String::new();
    for row in rows {
        schema.check_row(row)?;
        line.clear();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push('\t');
            }
            match cell {
                Value::Int(v) => line.push_str(&v.to_string()),
                Value::Str(s) => line.push_str(&escape_field(s)),
            }
        }
        if line.starts_with('#') {
            // a body line must not read as header
            line.insert(0, '\\');
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Gzip bytes of a canonical file. The gzip header carries no timestamp or
/// file name, so equal inputs give equal bytes.
pub fn encode(schema: &RelationSchema, info: &RelationInfo, rows: &[Row]) -> Result<Vec<u8>, IngestError> {
    let mut gz = GzEncoder::new(Vec::new(), Compression::default());
    write_text(&mut gz, schema, info, rows)?;
    Ok(gz.finish()?)
}

/// Writes atomically (temp file + rename) and returns the row count.
pub fn write_canonical(
    path: &Path,
    schema: &RelationSchema,
    info: &RelationInfo,
    rows: &[Row],
) -> Result<usize, IngestError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("gz.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(&encode(schema, info, rows)?)?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(rows.len())
}

/// Streaming reader over a canonical file.
pub struct CanonicalReader<R: BufRead> {
    schema: RelationSchema,
    info: RelationInfo,
    pending: Option<String>,
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl CanonicalReader<BufReader<GzDecoder<BufReader<File>>>> {
    pub fn open(path: &Path) -> Result<Self, IngestError> {
        let file = File::open(path)?;
        Self::from_reader(BufReader::new(GzDecoder::new(BufReader::new(file))))
    }
}

impl<R: Read> CanonicalReader<BufReader<GzDecoder<R>>> {
    pub fn from_gzip(reader: R) -> Result<Self, IngestError> {
        Self::from_reader(BufReader::new(GzDecoder::new(reader)))
    }
}

impl<R: BufRead> CanonicalReader<R> {
    pub fn from_reader(reader: R) -> Result<Self, IngestError> {
        let mut lines = reader.lines();
        let mut header = Vec::new();
        let mut pending = None;
        let mut line_no = 0;
        for line in lines.by_ref() {
            let line = line.map_err(corrupt_io)?;
            line_no += 1;
            match line.strip_prefix('#') {
                Some(rest) => {
                    let (k, v) = rest
                        .split_once('\t')
                        .ok_or_else(|| IngestError::Corrupt(format!("header line {line_no} lacks a tab")))?;
                    header.push((unescape_field(k)?, unescape_field(v)?));
                }
                None => {
                    pending = Some(line);
                    break;
                }
            }
        }
        let take = |key: &str| -> Result<String, IngestError> {
            header
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| IngestError::Corrupt(format!("header lacks {key:?}")))
        };
        let name = parse_rel_name(&take("name")?)?;
        let arity: usize = take("arity")?
            .parse()
            .map_err(|_| IngestError::Corrupt("arity is not a number".into()))?;
        let columns: Vec<Column> = RelationSchema::parse_columns_spec(&take("columns")?)?;
        if columns.len() != arity {
            return Err(IngestError::SchemaMismatch(format!(
                "{name}: header arity {arity} but {} columns",
                columns.len()
            )));
        }
        let name = name.with_arity(arity)?;
        let schema = RelationSchema::with_default_keys(name, columns)?;
        let mut info = RelationInfo::new();
        for (k, v) in header.into_iter().filter(|(k, _)| !matches!(k.as_str(), "name" | "arity" | "columns")) {
            info.set(&k, v);
        }
        if info.row_count().is_none() {
            return Err(IngestError::Corrupt("header lacks a numeric row_count".into()));
        }
        Ok(CanonicalReader { schema, info, pending, lines, line_no })
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    pub fn info(&self) -> &RelationInfo {
        &self.info
    }

    fn parse_row(&self, line: &str) -> Result<Row, IngestError> {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != self.schema.arity() {
            return Err(IngestError::Corrupt(format!(
                "line {}: {} fields, expected {}",
                self.line_no,
                cells.len(),
                self.schema.arity()
            )));
        }
        cells
            .iter()
            .zip(self.schema.columns())
            .map(|(cell, col)| {
                let text = unescape_field(cell)?;
                col.ty
                    .parse_value(&text)
                    .map_err(|e| IngestError::Corrupt(format!("line {}: {e}", self.line_no)))
            })
            .collect()
    }

    /// Reads the remaining rows and checks them against the declared count.
    pub fn into_file(self) -> Result<CanonicalFile, IngestError> {
        let schema = self.schema.clone();
        let info = self.info.clone();
        let declared = info.row_count().unwrap_or(0);
        let rows = self.collect::<Result<Vec<_>, _>>()?;
        if rows.len() as u64 != declared {
            return Err(IngestError::RowCountMismatch { declared, actual: rows.len() as u64 });
        }
        Ok(CanonicalFile { schema, info, rows })
    }
}

fn corrupt_io(e: std::io::Error) -> IngestError {
    IngestError::Corrupt(format!("unreadable stream: {e}"))
}

impl<R: BufRead> Iterator for CanonicalReader<R> {
    type Item = Result<Row, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        let line = match self.pending.take() {
            Some(line) => line,
            None => match self.lines.next()? {
                Ok(line) => {
                    self.line_no += 1;
                    line
                }
                Err(e) => return Some(Err(corrupt_io(e))),
            },
        };
        Some(self.parse_row(&line))
    }
}

pub fn read_canonical(path: &Path) -> Result<CanonicalFile, IngestError> {
    CanonicalReader::open(path)?.into_file()
}

/// Parses gzip bytes fully, checking the declared row count.
pub fn decode(bytes: &[u8]) -> Result<CanonicalFile, IngestError> {
    CanonicalReader::from_gzip(bytes)?.into_file()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::{catalog_entry, parse_rel_name};

    fn sample() -> (RelationSchema, RelationInfo, Vec<Row>) {
        let name = parse_rel_name("map_hgnc_hgnc_name").unwrap();
        let schema = catalog_entry(&name).unwrap().schema.clone();
        let mut info = RelationInfo::new();
        info.set(RelationInfo::ROW_COUNT, "0");
        info.set(RelationInfo::SOURCE_DB, "hgnc");
        info.set(RelationInfo::SOURCE_URL, "fixture://hs/hgnc");
        let rows = vec![
            vec![Value::Int(5), Value::from("alpha-1-B glycoprotein")],
            vec![Value::Int(6), Value::from("tab\there")],
            vec![Value::Int(7), Value::from("line\nbreak and back\\slash")],
            vec![Value::Int(8), Value::from("")],
        ];
        (schema, info, rows)
    }

    #[test]
    fn header_text_layout() {
        let (schema, info, rows) = sample();
        let mut text = Vec::new();
        write_text(&mut text, &schema, &info, &rows[..1]).unwrap();
        assert_eq!(
            String::from_utf8(text).unwrap(),
            "#name\tmap_hgnc_hgnc_name\n#arity\t2\n#columns\thgnc:integer,name:text\n#row_count\t1\n\
             #source_db\thgnc\n#source_url\tfixture://hs/hgnc\n5\talpha-1-B glycoprotein\n"
        );
    }

    #[test]
    fn round_trip_with_escapes() {
        let (schema, info, rows) = sample();
        let bytes = encode(&schema, &info, &rows).unwrap();
        let file = decode(&bytes).unwrap();
        assert_eq!(file.rows, rows);
        assert_eq!(file.schema, schema);
        assert_eq!(file.info.row_count(), Some(4));
        assert_eq!(encode(&file.schema, &file.info, &file.rows).unwrap(), bytes);
    }

    #[test]
    fn leading_hash_in_first_row() {
        let name = parse_rel_name("map_hgnc_symb_hgnc").unwrap();
        let schema = catalog_entry(&name).unwrap().schema.clone();
        let rows = vec![vec![Value::from("#x"), Value::Int(1)], vec![Value::from("#y"), Value::Int(2)]];
        let bytes = encode(&schema, &RelationInfo::new(), &rows).unwrap();
        assert_eq!(decode(&bytes).unwrap().rows, rows);
        assert_eq!(unescape_field("\\#a#").unwrap(), "#a#");
    }

    #[test]
    fn row_count_mismatch_detected() {
        let (schema, info, rows) = sample();
        let mut text = Vec::new();
        write_text(&mut text, &schema, &info, &rows).unwrap();
        let text = String::from_utf8(text).unwrap().replace("#row_count\t4", "#row_count\t9");
        let err = CanonicalReader::from_reader(text.as_bytes()).unwrap().into_file().unwrap_err();
        assert!(matches!(err, IngestError::RowCountMismatch { declared: 9, actual: 4 }));
    }

    #[test]
    fn truncated_gzip_is_corrupt() {
        let (schema, info, rows) = sample();
        let bytes = encode(&schema, &info, &rows).unwrap();
        assert!(decode(&bytes[..bytes.len() / 2]).is_err());
    }

    #[test]
    fn arity_mismatch() {
        let text = "#name\tmap_hgnc_hgnc_symb\n#arity\t3\n#columns\thgnc:integer,symb:symbol\n#row_count\t0\n";
        assert!(matches!(
            CanonicalReader::from_reader(text.as_bytes()),
            Err(IngestError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn escapes_invert() {
        for s in ["", "plain", "a\tb", "x\\ty", "\\", "\n\r\t\\"] {
            assert_eq!(unescape_field(&escape_field(s)).unwrap(), s);
        }
        assert!(unescape_field("bad\\q").is_err());
    }
}
