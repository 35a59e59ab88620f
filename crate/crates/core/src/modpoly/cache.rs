//! Persistent store of certified `φ_m(j1, j2)` values.
//!
//! One JSON object per line in `phi_values.jsonl`, keyed by `(d1, d2, m)`.
//! Each record carries a SHA-256 checksum over its other fields; a record
//! whose checksum, residual or coset count does not check out is reported as
//! corruption instead of being trusted.

use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EvalCertificate;
use crate::arith::dedekind_psi;
use crate::{Error, Result};

const FILE_NAME: &str = "phi_values.jsonl";

/// On-disk form of one certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub d1: i64,
    pub d2: i64,
    pub m: u64,
    pub value: String,
    pub residual: f64,
    pub precision_bits: u32,
    pub coset_count: u64,
    pub checksum: String,
}

impl CacheRecord {
    fn digest(d1: i64, d2: i64, cert: &EvalCertificate, value: &str) -> String {
        let canonical = format!(
            "{d1}|{d2}|{}|{value}|{:e}|{}|{}",
            cert.m, cert.residual, cert.precision_bits, cert.coset_count
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn new(d1: i64, d2: i64, cert: &EvalCertificate) -> Self {
        let value = cert.value.to_string();
        let checksum = Self::digest(d1, d2, cert, &value);
        Self {
            d1,
            d2,
            m: cert.m,
            value,
            residual: cert.residual,
            precision_bits: cert.precision_bits,
            coset_count: cert.coset_count,
            checksum,
        }
    }

    /// Validate and convert back to a certificate.
    pub fn certificate(&self) -> Result<EvalCertificate> {
        let value: BigInt = self
            .value
            .parse()
            .map_err(|_| Error::CacheCorruption(format!("value {:?} is not an integer", self.value)))?;
        let cert = EvalCertificate {
            m: self.m,
            value,
            residual: self.residual,
            precision_bits: self.precision_bits,
            coset_count: self.coset_count,
        };
        if Self::digest(self.d1, self.d2, &cert, &self.value) != self.checksum {
            return Err(Error::CacheCorruption(format!("checksum mismatch for ({}, {}, {})", self.d1, self.d2, self.m)));
        }
        if !(self.residual >= 0.0 && self.residual < 2f64.powi(-10)) {
            return Err(Error::CacheCorruption(format!("residual {} out of range", self.residual)));
        }
        if self.m == 0 || self.coset_count != dedekind_psi(self.m) {
            return Err(Error::CacheCorruption(format!("coset count {} for m = {}", self.coset_count, self.m)));
        }
        Ok(cert)
    }
}

/// A cache directory. Reads go to the file; writes are serialized through a
/// lock so one process is a single writer.
#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    writer: Mutex<()>,
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_path_buf(), writer: Mutex::new(()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self) -> PathBuf {
        self.dir.join(FILE_NAME)
    }

    /// Every record in file order.
    pub fn records(&self) -> Result<Vec<CacheRecord>> {
        let path = self.path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        let file = fs::File::open(path)?;
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CacheRecord = serde_json::from_str(&line)
                .map_err(|e| Error::CacheCorruption(format!("line {}: {e}", i + 1)))?;
            out.push(rec);
        }
        Ok(out)
    }

    /// The most recent record for `(d1, d2, m)`, validated.
    pub fn get(&self, d1: i64, d2: i64, m: u64) -> Result<Option<EvalCertificate>> {
        let found = self.records()?.into_iter().rev().find(|r| r.d1 == d1 && r.d2 == d2 && r.m == m);
        found.map(|r| r.certificate()).transpose()
    }

    pub fn put(&self, d1: i64, d2: i64, cert: &EvalCertificate) -> Result<()> {
        let _guard = self.writer.lock().unwrap();
        let line = serde_json::to_string(&CacheRecord::new(d1, d2, cert))
            .map_err(|e| Error::CacheCorruption(e.to_string()))?;
        let mut f = OpenOptions::new().create(true).append(true).open(self.path())?;
        writeln!(f, "{line}")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert() -> EvalCertificate {
        EvalCertificate {
            m: 2,
            value: "-142826025627648".parse().unwrap(),
            residual: 1.25e-40,
            precision_bits: 192,
            coset_count: 3,
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        assert!(c.get(-3, -4, 2).unwrap().is_none());
        c.put(-3, -4, &cert()).unwrap();
        let back = c.get(-3, -4, 2).unwrap().unwrap();
        assert_eq!(back, cert());
        assert_eq!(back.value.to_string(), "-142826025627648");
        assert!(c.get(-4, -3, 2).unwrap().is_none());
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        c.put(-3, -4, &cert()).unwrap();
        let path = dir.path().join(FILE_NAME);
        let text = fs::read_to_string(&path).unwrap().replace("-142826025627648", "-142826025627649");
        fs::write(&path, text).unwrap();
        assert!(matches!(c.get(-3, -4, 2), Err(Error::CacheCorruption(_))));
    }
}
