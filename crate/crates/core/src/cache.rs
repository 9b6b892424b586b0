//! On-disk invariant tables, one JSON record per line.
//!
//! ```text
//! {"genus":0,"d":3,"num":"1","den":"3360","checksum":"…"}
//! {"genus":0,"d":3,"log_value":-9,"mantissa_hex":"…","precision_bits":256,"checksum":"…"}
//! ```
//!
//! Exact records come first, then scaled records, each in increasing `d`.
//! The checksum is a truncated SHA-256 of the record's other fields. Only
//! the contiguous valid prefix of each kind is used; damaged records are
//! reported and recomputed. Files are replaced atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::Result;
use crate::invariants::{
    extend_genus0_scaled, extend_genus1_scaled, genus0_table, scaled_working_precision, MANTISSA_GUARD_BITS, genus1_table, Genus, InvariantTable,
    ScaledValue,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Record {
    Exact {
        genus: u8,
        d: usize,
        num: String,
        den: String,
        checksum: String,
    },
    Scaled {
        genus: u8,
        d: usize,
        log_value: i64,
        mantissa_hex: String,
        precision_bits: u32,
        checksum: String,
    },
}

fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    h.update(parts.join("|").as_bytes());
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

impl Record {
    fn exact(genus: u8, d: usize, v: &Rational) -> Record {
        let num = v.numer().to_string();
        let den = v.denom().to_string();
        let checksum = digest(&[&genus.to_string(), &d.to_string(), &num, &den]);
        Record::Exact {
            genus,
            d,
            num,
            den,
            checksum,
        }
    }

    /// `prec` is the table precision; `v` carries the guard bits on top.
    fn scaled(genus: u8, d: usize, v: &Float, prec: u32) -> Record {
        // zero (genus one, d ≤ 2) is stored as an empty mantissa
        let (log_value, mantissa_hex) = match ScaledValue::from_float(v) {
            Some(s) => (s.log_value, s.mantissa.to_string_radix(16, None)),
            None => (0, String::new()),
        };
        let checksum = digest(&[
            &genus.to_string(),
            &d.to_string(),
            &log_value.to_string(),
            &mantissa_hex,
            &prec.to_string(),
        ]);
        Record::Scaled {
            genus,
            d,
            log_value,
            mantissa_hex,
            precision_bits: prec,
            checksum,
        }
    }

    fn checksum_ok(&self) -> bool {
        let expect = match self {
            Record::Exact {
                genus, d, num, den, ..
            } => digest(&[&genus.to_string(), &d.to_string(), num, den]),
            Record::Scaled {
                genus,
                d,
                log_value,
                mantissa_hex,
                precision_bits,
                ..
            } => digest(&[
                &genus.to_string(),
                &d.to_string(),
                &log_value.to_string(),
                mantissa_hex,
                &precision_bits.to_string(),
            ]),
        };
        match self {
            Record::Exact { checksum, .. } | Record::Scaled { checksum, .. } => *checksum == expect,
        }
    }
}

/// A damaged or out-of-place record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheIssue {
    pub line: usize,
    pub d: Option<usize>,
    pub reason: String,
}

/// Contiguous valid prefixes read from a cache file.
#[derive(Clone, Debug, Default)]
pub struct LoadedTable {
    pub exact: Vec<Rational>,
    pub scaled: Vec<Float>,
    /// Precision of the scaled entries, if any.
    pub scaled_precision: Option<u32>,
    pub issues: Vec<CacheIssue>,
}

impl LoadedTable {
    pub fn into_table(self, genus: Genus) -> InvariantTable {
        let prec = self.scaled_precision.unwrap_or(0);
        InvariantTable::from_parts(genus, self.exact, self.scaled, prec)
    }
}

#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> TableCache {
        TableCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, genus: Genus) -> PathBuf {
        self.dir.join(format!("genus{}.jsonl", genus.index()))
    }

    /// Reads the file for `genus`; a missing file is an empty table.
    pub fn load(&self, genus: Genus) -> Result<LoadedTable> {
        let path = self.path(genus);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(parse_records(&text, genus)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(LoadedTable::default()),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes `table` for its genus, replacing the file atomically.
    pub fn store(&self, table: &InvariantTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(table.genus());
        let tmp = path.with_extension("jsonl.tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render_records(table)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

/// The JSON-lines text for a table.
pub fn render_records(table: &InvariantTable) -> Result<String> {
    let g = table.genus().index();
    let mut out = String::new();
    for (i, v) in table.exact_values().iter().enumerate() {
        out.push_str(&serde_json::to_string(&Record::exact(g, i + 1, v))?);
        out.push('\n');
    }
    for (i, v) in table.scaled_values().iter().enumerate() {
        out.push_str(&serde_json::to_string(&Record::scaled(g, i + 1, v, table.precision_bits()))?);
        out.push('\n');
    }
    Ok(out)
}

fn parse_records(text: &str, genus: Genus) -> LoadedTable {
    let mut out = LoadedTable::default();
    let mut exact_open = true;
    let mut scaled_open = true;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let issue = |d: Option<usize>, reason: String| CacheIssue {
            line: line_no,
            d,
            reason,
        };
        let rec: Record = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                out.issues.push(issue(None, format!("unreadable record: {e}")));
                continue;
            }
        };
        let (g, d) = match &rec {
            Record::Exact { genus, d, .. } | Record::Scaled { genus, d, .. } => (*genus, *d),
        };
        if !rec.checksum_ok() {
            out.issues.push(issue(Some(d), "checksum mismatch".into()));
            match rec {
                Record::Exact { .. } => exact_open = false,
                Record::Scaled { .. } => scaled_open = false,
            }
            continue;
        }
        if g != genus.index() {
            out.issues.push(issue(Some(d), format!("record for genus {g} in genus {} file", genus.index())));
            continue;
        }
        match rec {
            Record::Exact { num, den, .. } => {
                if !exact_open {
                    continue;
                }
                if d != out.exact.len() + 1 {
                    out.issues.push(issue(Some(d), format!("expected d = {}", out.exact.len() + 1)));
                    exact_open = false;
                    continue;
                }
                let parsed = (num.parse::<Integer>(), den.parse::<Integer>());
                match parsed {
                    (Ok(n), Ok(m)) if m != 0 => out.exact.push(Rational::from((n, m))),
                    _ => {
                        out.issues.push(issue(Some(d), "bad numerator or denominator".into()));
                        exact_open = false;
                    }
                }
            }
            Record::Scaled {
                log_value,
                mantissa_hex,
                precision_bits,
                ..
            } => {
                if !scaled_open {
                    continue;
                }
                if d != out.scaled.len() + 1 || out.scaled_precision.is_some_and(|p| p != precision_bits) {
                    out.issues.push(issue(Some(d), "scaled record out of sequence".into()));
                    scaled_open = false;
                    continue;
                }
                let work = scaled_working_precision(precision_bits);
                let value = if mantissa_hex.is_empty() {
                    Some(Float::new(work))
                } else {
                    Float::parse_radix(&mantissa_hex, 16).ok().map(|m| {
                        ScaledValue {
                            log_value,
                            mantissa: Float::with_val(work + MANTISSA_GUARD_BITS, m),
                        }
                        .to_float(work)
                    })
                };
                match value {
                    Some(v) => {
                        out.scaled_precision = Some(precision_bits);
                        out.scaled.push(v);
                    }
                    None => {
                        out.issues.push(issue(Some(d), "bad mantissa".into()));
                        scaled_open = false;
                    }
                }
            }
        }
    }
    out
}

/// Both tables, covering the configured ranges, plus what was reused.
#[derive(Clone, Debug)]
pub struct Tables {
    pub g0: InvariantTable,
    pub g1: InvariantTable,
    pub issues: Vec<(Genus, CacheIssue)>,
    /// Whether any cache file was (re)written.
    pub wrote: bool,
}

/// Loads tables from the cache, computing and storing whatever is missing.
/// Valid cached entries are never altered; cached data beyond the request
/// is kept on disk and hidden from the returned tables.
pub fn ensure_tables(cfg: &RunConfig, cache: &TableCache) -> Result<Tables> {
    ensure_ranges(cache, cfg.precision_bits, cfg.d_exact, cfg.d_float)
}

/// [`ensure_tables`] for explicit ranges; `d_float = 0` skips the float
/// entries.
pub fn ensure_ranges(
    cache: &TableCache,
    prec: u32,
    d_exact: usize,
    d_float: usize,
) -> Result<Tables> {
    let mut issues = Vec::new();
    let mut wrote = false;

    let mut loaded0 = cache.load(Genus::Zero)?;
    let mut loaded1 = cache.load(Genus::One)?;
    for (g, l) in [(Genus::Zero, &loaded0), (Genus::One, &loaded1)] {
        for i in &l.issues {
            warn!(
                "cache {}: line {}{}: {}; recomputing",
                cache.path(g).display(),
                i.line,
                i.d.map(|d| format!(" (d = {d})")).unwrap_or_default(),
                i.reason
            );
            issues.push((g, i.clone()));
        }
    }
    for l in [&mut loaded0, &mut loaded1] {
        if l.scaled_precision.is_some_and(|p| p != prec) {
            l.scaled.clear();
            l.scaled_precision = None;
        }
    }

    // genus 0
    let mut dirty0 = !loaded0.issues.is_empty();
    let exact0 = if loaded0.exact.len() >= d_exact {
        loaded0.exact.clone()
    } else {
        dirty0 = true;
        genus0_table(d_exact)?.exact_values().to_vec()
    };
    let scaled0 = if loaded0.scaled.len() >= d_float {
        loaded0.scaled.clone()
    } else {
        dirty0 = true;
        extend_genus0_scaled(loaded0.scaled.clone(), d_float, prec)
    };
    let full0 = InvariantTable::from_parts(Genus::Zero, exact0, scaled0, prec);
    if dirty0 {
        cache.store(&full0)?;
        wrote = true;
    }

    // genus 1
    let mut dirty1 = !loaded1.issues.is_empty();
    let exact1 = if loaded1.exact.len() >= d_exact {
        loaded1.exact.clone()
    } else {
        dirty1 = true;
        genus1_table(d_exact, &full0.truncated(d_exact))?
            .exact_values()
            .to_vec()
    };
    let scaled1 = if loaded1.scaled.len() >= d_float {
        loaded1.scaled.clone()
    } else {
        dirty1 = true;
        extend_genus1_scaled(
            loaded1.scaled.clone(),
            &full0.scaled_values()[..d_float],
            d_float,
            prec,
        )?
    };
    let full1 = InvariantTable::from_parts(Genus::One, exact1, scaled1, prec);
    if dirty1 {
        cache.store(&full1)?;
        wrote = true;
    }

    Ok(Tables {
        g0: restrict(&full0, d_exact, d_float),
        g1: restrict(&full1, d_exact, d_float),
        issues,
        wrote,
    })
}

fn restrict(t: &InvariantTable, d_exact: usize, d_float: usize) -> InvariantTable {
    InvariantTable::from_parts(
        t.genus(),
        t.exact_values()[..d_exact].to_vec(),
        t.scaled_values()[..d_float].to_vec(),
        t.precision_bits(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::genus0_full;

    #[test]
    fn roundtrip_exact_and_scaled() {
        let t = genus0_full(20, 60, 128).unwrap();
        let text = render_records(&t).unwrap();
        let back = parse_records(&text, Genus::Zero);
        assert!(back.issues.is_empty());
        assert_eq!(back.exact, t.exact_values());
        assert_eq!(back.scaled, t.scaled_values());
        assert_eq!(back.scaled_precision, Some(128));
    }

    #[test]
    fn zero_entries_roundtrip() {
        let t = InvariantTable::from_parts(
            Genus::One,
            vec![Rational::new(), Rational::new(), Rational::from((1, 362880))],
            vec![Float::new(64), Float::new(64), Float::with_val(64, 1e-6)],
            64,
        );
        let back = parse_records(&render_records(&t).unwrap(), Genus::One);
        assert!(back.issues.is_empty());
        assert_eq!(back.scaled, t.scaled_values());
        assert_eq!(back.exact, t.exact_values());
    }

    #[test]
    fn tampered_record_is_located() {
        let t = genus0_full(10, 10, 64).unwrap();
        let text = render_records(&t).unwrap().replace("\"den\":\"3360\"", "\"den\":\"3361\"");
        let back = parse_records(&text, Genus::Zero);
        assert_eq!(back.issues.len(), 1);
        assert_eq!(back.issues[0].d, Some(3));
        assert_eq!(back.exact.len(), 2);
        assert_eq!(back.scaled.len(), 10);
    }

    #[test]
    fn garbage_line_reported() {
        let back = parse_records("{not json}\n", Genus::Zero);
        assert_eq!(back.issues.len(), 1);
        assert!(back.exact.is_empty());
    }
}
