//! Plain-text orbit atlas: a short header, then one `rep_key size delta type`
//! line per orbit. Files may be gzip-compressed; readers detect this.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::classify::{Classifier, OrbitType};
use crate::enumerate::{MatKey, OrbitPartition};
use crate::error::{Error, Result};
use crate::ring::{Ring, RingSpec};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "orbit-atlas";
const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtlasRow {
    pub rep: MatKey,
    pub size: u64,
    pub delta: u32,
    pub orbit_type: OrbitType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub spec: RingSpec,
    pub q: u32,
    pub n: u32,
    pub rows: Vec<AtlasRow>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Atlas(msg.into())
}

impl Atlas {
    pub fn from_partition(ring: &Ring, partition: &OrbitPartition) -> Result<Atlas> {
        let c = Classifier::new(ring);
        let rows = partition
            .representatives
            .iter()
            .zip(&partition.sizes)
            .map(|(&rep, &size)| {
                let m = rep.decode(ring)?;
                Ok(AtlasRow {
                    rep,
                    size,
                    delta: c.traceless_valuation(&m),
                    orbit_type: c.orbit_type(&m),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Atlas {
            spec: ring.spec().clone(),
            q: ring.q(),
            n: ring.n(),
            rows,
        })
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{MAGIC} {FORMAT_VERSION}")?;
        writeln!(w, "ring {}", self.spec)?;
        writeln!(w, "q {}", self.q)?;
        writeln!(w, "n {}", self.n)?;
        writeln!(w, "orbits {}", self.rows.len())?;
        for r in &self.rows {
            writeln!(w, "{} {} {} {}", r.rep, r.size, r.delta, r.orbit_type)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("atlas text is ascii")
    }

    /// Reads plain or gzip-compressed input.
    pub fn read_from(r: impl Read) -> Result<Atlas> {
        let mut r = BufReader::new(r);
        let gz = r.fill_buf()?.starts_with(&GZIP_MAGIC);
        if gz {
            Self::parse(BufReader::new(GzDecoder::new(r)))
        } else {
            Self::parse(r)
        }
    }

    fn parse(r: impl BufRead) -> Result<Atlas> {
        let mut lines = r.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing {key} line")))??;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| bad(format!("expected {key:?} line, got {line:?}")))
        };
        let version: u32 = header(MAGIC)?
            .parse()
            .map_err(|_| bad("bad format version"))?;
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {version}")));
        }
        let spec: RingSpec = header("ring")?.parse()?;
        let q: u32 = header("q")?.parse().map_err(|_| bad("bad q"))?;
        let n: u32 = header("n")?.parse().map_err(|_| bad("bad n"))?;
        let count: usize = header("orbits")?
            .parse()
            .map_err(|_| bad("bad orbit count"))?;
        if u64::from(q) != spec.q() || n != spec.n {
            return Err(bad(format!(
                "header q={q} n={n} disagrees with ring {spec}"
            )));
        }
        let mut rows = Vec::with_capacity(count);
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(' ').collect();
            if f.len() != 4 {
                return Err(bad(format!("malformed orbit line {line:?}")));
            }
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| bad(format!("bad number in {line:?}")))
            };
            rows.push(AtlasRow {
                rep: MatKey(num(f[0])?),
                size: num(f[1])?,
                delta: num(f[2])? as u32,
                orbit_type: f[3].parse()?,
            });
        }
        if rows.len() != count {
            return Err(bad(format!(
                "header announces {count} orbits, found {}",
                rows.len()
            )));
        }
        Ok(Atlas { spec, q, n, rows })
    }

    /// Writes gzip when `path` ends in `.gz`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        if path.extension().is_some_and(|e| e == "gz") {
            let mut enc = GzEncoder::new(file, Compression::default());
            self.write_to(&mut enc)?;
            enc.finish()?.flush()?;
            Ok(())
        } else {
            self.write_to(file)
        }
    }

    pub fn load(path: &Path) -> Result<Atlas> {
        Self::read_from(File::open(path)?)
    }

    pub fn total(&self) -> u128 {
        self.rows.iter().map(|r| r.size as u128).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{partition_all, PartitionOptions};

    fn z9_atlas() -> Atlas {
        let r = Ring::build(&"Z/9".parse::<RingSpec>().unwrap()).unwrap();
        let p = partition_all(&r, &PartitionOptions::default()).unwrap();
        Atlas::from_partition(&r, &p).unwrap()
    }

    #[test]
    fn text_layout() {
        let a = z9_atlas();
        let text = a.to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("orbit-atlas 1"));
        assert_eq!(lines.next(), Some("ring Z/3^2"));
        assert_eq!(lines.next(), Some("q 3"));
        assert_eq!(lines.next(), Some("n 2"));
        assert_eq!(lines.next(), Some("orbits 153"));
        assert_eq!(lines.next(), Some("0 1 2 scalar"));
        assert_eq!(lines.count(), 152);
        assert!(text.ends_with('\n'));
        assert_eq!(a.total(), 6561);
    }

    #[test]
    fn round_trips_plain_and_gzip() {
        let a = z9_atlas();
        let dir = tempfile::tempdir().unwrap();
        for name in ["z9.atlas", "z9.atlas.gz"] {
            let path = dir.path().join(name);
            a.save(&path).unwrap();
            assert_eq!(Atlas::load(&path).unwrap(), a);
        }
        let raw = std::fs::read(dir.path().join("z9.atlas.gz")).unwrap();
        assert_eq!(raw[..2], GZIP_MAGIC);
    }

    #[test]
    fn rejects_damaged_input() {
        let text = z9_atlas().to_text();
        let cases = [
            text.replacen("orbit-atlas 1", "orbit-atlas 2", 1),
            text.replacen("orbits 153", "orbits 154", 1),
            text.replacen("q 3", "q 5", 1),
            text.replacen("0 1 2 scalar", "0 1 2 odd", 1),
            text.replacen("0 1 2 scalar", "0 1 scalar", 1),
            text.replacen("ring Z/3^2", "ring Z/4", 1),
            String::new(),
        ];
        for bad in cases {
            assert!(Atlas::read_from(bad.as_bytes()).is_err());
        }
    }
}
