//! Binary dataset files.
//!
//! Layout, in order:
//!
//! 1. 8-byte magic `GMM2SEED`;
//! 2. a little-endian `u32` length, then that many bytes of canonical
//!    UTF-8 header text: the lines `n=`, `p=`, `sigma=`, `delta=`,
//!    `seed=`, `mode=` in exactly that order (floats with 17 significant
//!    digits; `mode` is `fixed_norm` or `gaussian_prior:<alpha>`);
//! 3. `theta` as `p` little-endian f64;
//! 4. `eta` as `n` signed bytes (each -1 or +1);
//! 5. `Y` as `p * n` little-endian f64 in row-major order (row = one of
//!    the `p` coordinates, column = one of the `n` observations).
//!
//! Floats are stored by bit pattern, so write-then-read is bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use hollowgram_core::{CenterMode, Dataset, LabelVector, Matrix, ProblemConfig};

use crate::csv_out::fmt17;
use crate::HarnessError;

const MAGIC: &[u8; 8] = b"GMM2SEED";

fn mode_text(mode: &CenterMode) -> String {
    match mode {
        CenterMode::FixedNorm => "fixed_norm".to_string(),
        CenterMode::GaussianPrior { alpha } => format!("gaussian_prior:{}", fmt17(*alpha)),
    }
}

fn parse_mode(text: &str) -> Result<CenterMode, HarnessError> {
    if text == "fixed_norm" {
        return Ok(CenterMode::FixedNorm);
    }
    if let Some(alpha_text) = text.strip_prefix("gaussian_prior:") {
        let alpha: f64 = alpha_text
            .parse()
            .map_err(|_| HarnessError::HeaderParse(format!("bad alpha: {alpha_text}")))?;
        return Ok(CenterMode::GaussianPrior { alpha });
    }
    Err(HarnessError::HeaderParse(format!("unknown mode: {text}")))
}

fn header_text(ds: &Dataset) -> String {
    format!(
        "n={}\np={}\nsigma={}\ndelta={}\nseed={}\nmode={}\n",
        ds.config.n,
        ds.config.p,
        fmt17(ds.config.sigma),
        fmt17(ds.config.delta),
        ds.seed,
        mode_text(&ds.mode),
    )
}

pub fn write_dataset(ds: &Dataset, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e| HarnessError::io(path, e);

    out.write_all(MAGIC).map_err(io_err)?;
    let header = header_text(ds);
    out.write_all(&(header.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    out.write_all(header.as_bytes()).map_err(io_err)?;
    for &x in &ds.theta {
        out.write_all(&x.to_le_bytes()).map_err(io_err)?;
    }
    for &s in ds.eta.signs() {
        out.write_all(&[s as u8]).map_err(io_err)?;
    }
    // row-major: coordinate index outer, observation index inner
    for row in 0..ds.config.p {
        for col in 0..ds.config.n {
            out.write_all(&ds.y.get(row, col).to_le_bytes())
                .map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

struct Cursor<R: Read> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn read_exact(&mut self, buf: &mut [u8]) -> Result<(), HarnessError> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => return Err(HarnessError::Truncated),
                Ok(k) => filled += k,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    return Err(HarnessError::Other(format!("read error: {e}")));
                }
            }
        }
        Ok(())
    }

    fn f64(&mut self) -> Result<f64, HarnessError> {
        let mut buf = [0u8; 8];
        self.read_exact(&mut buf)?;
        Ok(f64::from_le_bytes(buf))
    }
}

fn header_field<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    key: &str,
) -> Result<&'a str, HarnessError> {
    let line = lines
        .next()
        .ok_or_else(|| HarnessError::HeaderParse(format!("missing field {key}")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| HarnessError::HeaderParse(format!("expected {key}=..., got {line:?}")))
}

pub fn read_dataset(path: &Path) -> Result<Dataset, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut cursor = Cursor {
        inner: BufReader::new(file),
    };

    let mut magic = [0u8; 8];
    cursor.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(HarnessError::BadMagic);
    }

    let mut len_bytes = [0u8; 4];
    cursor.read_exact(&mut len_bytes)?;
    let header_len = u32::from_le_bytes(len_bytes) as usize;
    if header_len > 1 << 16 {
        return Err(HarnessError::HeaderParse(
            "header length implausible".into(),
        ));
    }
    let mut header_bytes = vec![0u8; header_len];
    cursor.read_exact(&mut header_bytes)?;
    let header = String::from_utf8(header_bytes)
        .map_err(|_| HarnessError::HeaderParse("header is not UTF-8".into()))?;

    let mut lines = header.lines();
    let parse_num = |s: &str, what: &str| -> Result<u64, HarnessError> {
        s.parse()
            .map_err(|_| HarnessError::HeaderParse(format!("bad {what}: {s}")))
    };
    let parse_float = |s: &str, what: &str| -> Result<f64, HarnessError> {
        s.parse()
            .map_err(|_| HarnessError::HeaderParse(format!("bad {what}: {s}")))
    };
    let n = parse_num(header_field(&mut lines, "n")?, "n")? as usize;
    let p = parse_num(header_field(&mut lines, "p")?, "p")? as usize;
    let sigma = parse_float(header_field(&mut lines, "sigma")?, "sigma")?;
    let delta = parse_float(header_field(&mut lines, "delta")?, "delta")?;
    let seed = parse_num(header_field(&mut lines, "seed")?, "seed")?;
    let mode = parse_mode(header_field(&mut lines, "mode")?)?;

    let config = ProblemConfig::new(n, p, sigma, delta)
        .map_err(|e| HarnessError::DatasetValidation(e.to_string()))?;

    let mut theta = Vec::with_capacity(p);
    for _ in 0..p {
        theta.push(cursor.f64()?);
    }
    let mut eta_bytes = vec![0u8; n];
    cursor.read_exact(&mut eta_bytes)?;
    let eta = LabelVector::new(eta_bytes.iter().map(|&b| b as i8).collect())
        .map_err(|e| HarnessError::DatasetValidation(e.to_string()))?;

    let mut y = Matrix::zeros(p, n);
    for row in 0..p {
        for col in 0..n {
            y.set(row, col, cursor.f64()?);
        }
    }
    Ok(Dataset {
        y,
        theta,
        eta,
        config,
        mode,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hollowgram_core::{sample_dataset_seeded, Rng};

    fn sample(seed: u64) -> Dataset {
        let config = ProblemConfig::new(6, 3, 0.8, 1.5).unwrap();
        let mut rng = Rng::new(seed);
        sample_dataset_seeded(&config, CenterMode::FixedNorm, &mut rng, seed).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.bin");
        let ds = sample(42);
        write_dataset(&ds, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back.config, ds.config);
        assert_eq!(back.seed, ds.seed);
        assert_eq!(back.mode, ds.mode);
        assert_eq!(back.eta, ds.eta);
        for (a, b) in back.theta.iter().zip(&ds.theta) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in back.y.data().iter().zip(ds.y.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn truncated_file_is_reported_not_crashed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.bin");
        write_dataset(&sample(1), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cut = path.with_extension("cut");
        std::fs::write(&cut, &bytes[..bytes.len() - 9]).unwrap();
        assert!(matches!(read_dataset(&cut), Err(HarnessError::Truncated)));
    }

    #[test]
    fn magic_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.bin");
        write_dataset(&sample(2), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] ^= 0xFF;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_dataset(&path), Err(HarnessError::BadMagic)));
    }

    #[test]
    fn zero_n_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.bin");
        let ds = sample(3);
        write_dataset(&ds, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = header_text(&ds);
        let bad_header = header.replacen("n=6", "n=0", 1);
        assert_eq!(header.len(), bad_header.len());
        let mut edited = bytes.clone();
        edited[12..12 + header.len()].copy_from_slice(bad_header.as_bytes());
        std::fs::write(&path, &edited).unwrap();
        assert!(matches!(
            read_dataset(&path),
            Err(HarnessError::DatasetValidation(_))
        ));
    }
}
