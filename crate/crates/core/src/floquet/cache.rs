//! On-disk cache of Floquet eigensystems.
//!
//! Little-endian layout:
//!
//! ```text
//! magic      8 bytes  "KTEIGSYS"
//! version    u32
//! twice_j    u32
//! kappa      f64
//! alpha      f64
//! method     u8       0 = full, 1 = sector
//! dim        u64
//! clusters   u64
//! phases     dim x f64
//! parities   dim x u8 0 = even, 1 = odd
//! vectors    dim x dim x (re f64, im f64), column-major
//! ```
//!
//! Files are named by a SHA-256 digest of the parameters; a header that does
//! not match the requested parameters is treated as a miss and overwritten.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use faer::{c64, Mat};
use sha2::{Digest, Sha256};

use super::{eigensystem, EigenMethod, FloquetEigensystem, KickedTopParams, Parity};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"KTEIGSYS";
const VERSION: u32 = 1;

fn method_tag(m: EigenMethod) -> u8 {
    match m {
        EigenMethod::Full => 0,
        EigenMethod::Sector => 1,
    }
}

pub fn write_eigensystem<W: Write>(mut w: W, eig: &FloquetEigensystem) -> Result<()> {
    let p = eig.params();
    let n = eig.len();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(2 * p.j).to_le_bytes())?;
    w.write_all(&p.kappa.to_le_bytes())?;
    w.write_all(&p.alpha.to_le_bytes())?;
    w.write_all(&[method_tag(eig.method())])?;
    w.write_all(&(n as u64).to_le_bytes())?;
    w.write_all(&(eig.degenerate_clusters() as u64).to_le_bytes())?;
    for q in eig.quasienergies() {
        w.write_all(&q.to_le_bytes())?;
    }
    for p in eig.parities() {
        w.write_all(&[(*p == Parity::Odd) as u8])?;
    }
    let v = eig.eigenvectors();
    for c in 0..n {
        for r in 0..n {
            w.write_all(&v[(r, c)].re.to_le_bytes())?;
            w.write_all(&v[(r, c)].im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

pub fn read_eigensystem<R: Read>(mut r: R) -> Result<FloquetEigensystem> {
    if &read_array::<8, _>(&mut r)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let twice_j = u32::from_le_bytes(read_array(&mut r)?);
    if twice_j % 2 != 0 {
        return Err(Error::Cache(format!("odd twice_j {twice_j}")));
    }
    let kappa = read_f64(&mut r)?;
    let alpha = read_f64(&mut r)?;
    let method = match read_array::<1, _>(&mut r)?[0] {
        0 => EigenMethod::Full,
        1 => EigenMethod::Sector,
        t => return Err(Error::Cache(format!("unknown method tag {t}"))),
    };
    let params = KickedTopParams::new(twice_j / 2, kappa, alpha)
        .map_err(|e| Error::Cache(format!("bad parameters: {e}")))?;
    let n = read_u64(&mut r)? as usize;
    if n != params.dim() {
        return Err(Error::Cache(format!("dimension {n} does not match j")));
    }
    let clusters = read_u64(&mut r)? as usize;
    let mut phases = Vec::with_capacity(n);
    for _ in 0..n {
        phases.push(read_f64(&mut r)?);
    }
    let mut parities = Vec::with_capacity(n);
    for _ in 0..n {
        parities.push(match read_array::<1, _>(&mut r)?[0] {
            0 => Parity::Even,
            1 => Parity::Odd,
            t => return Err(Error::Cache(format!("unknown parity tag {t}"))),
        });
    }
    let mut vectors = Mat::<c64>::zeros(n, n);
    for c in 0..n {
        for row in 0..n {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            vectors[(row, c)] = c64::new(re, im);
        }
    }
    Ok(FloquetEigensystem::from_parts(
        params, method, phases, vectors, parities, clusters,
    ))
}

/// Directory of cached eigensystems keyed by `(j, kappa, alpha, method)`.
#[derive(Clone, Debug)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(params: &KickedTopParams, method: EigenMethod) -> String {
        let mut h = Sha256::new();
        h.update((2 * params.j).to_le_bytes());
        h.update(params.kappa.to_bits().to_le_bytes());
        h.update(params.alpha.to_bits().to_le_bytes());
        h.update([method_tag(method)]);
        h.finalize()[..12]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn path_for(&self, params: &KickedTopParams, method: EigenMethod) -> PathBuf {
        self.dir
            .join(format!("eig-{}.bin", Self::key(params, method)))
    }

    /// Returns `None` on a miss, including a file whose header belongs to
    /// different parameters.
    pub fn load(
        &self,
        params: &KickedTopParams,
        method: EigenMethod,
    ) -> Result<Option<FloquetEigensystem>> {
        let path = self.path_for(params, method);
        let file = match fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let eig = read_eigensystem(BufReader::new(file))?;
        let p = eig.params();
        let same = p.j == params.j
            && p.kappa.to_bits() == params.kappa.to_bits()
            && p.alpha.to_bits() == params.alpha.to_bits()
            && eig.method() == method;
        Ok(same.then_some(eig))
    }

    pub fn store(&self, eig: &FloquetEigensystem) -> Result<PathBuf> {
        let path = self.path_for(eig.params(), eig.method());
        let tmp = path.with_extension("tmp");
        write_eigensystem(BufWriter::new(fs::File::create(&tmp)?), eig)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn get_or_compute(
        &self,
        params: &KickedTopParams,
        method: EigenMethod,
    ) -> Result<FloquetEigensystem> {
        if let Some(eig) = self.load(params, method)? {
            return Ok(eig);
        }
        let eig = eigensystem(params, method)?;
        self.store(&eig)?;
        Ok(eig)
    }
}
