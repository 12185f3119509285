//! Reference-table persistence: a columnar CSV and a binary cache.
//!
//! Cache layout, all little-endian: the 8-byte magic, then u64 fields
//! (rows, k_theta, k_eta, n, master seed, path length, path...), f64 alpha,
//! k_eta f64 observed summaries, and finally the rows
//! (θ₁..θ_kθ, η₁..η_kη, distance) as f64, row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::{ReferenceTable, SimulationTable};
use crate::error::{Error, Result};
use crate::rng::SeedPath;
use crate::summaries::SummaryVector;

pub const CACHE_MAGIC: [u8; 8] = *b"ABCRT\0\0\x01";

/// Header `theta_1..theta_k, eta_1..eta_k, dist`, one row per table entry.
pub fn write_table_csv(table: &ReferenceTable, path: &Path) -> Result<()> {
    let sims = &table.sims;
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=sims.k_theta).map(|j| format!("theta_{j}")).collect();
    header.extend((1..=sims.k_eta).map(|j| format!("eta_{j}")));
    header.push("dist".into());
    w.write_record(&header)?;
    let mut rec = Vec::with_capacity(header.len());
    for i in 0..table.n_rows() {
        rec.clear();
        rec.extend(sims.draw(i).iter().map(|v| v.to_string()));
        rec.extend(sims.summary(i).iter().map(|v| v.to_string()));
        rec.push(table.distances[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_cache(table: &ReferenceTable, path: &Path) -> Result<()> {
    let sims = &table.sims;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CACHE_MAGIC)?;
    let mut header = vec![
        table.n_rows() as u64,
        sims.k_theta as u64,
        sims.k_eta as u64,
        sims.n as u64,
        sims.seed.master_seed,
        sims.seed.path.len() as u64,
    ];
    header.extend_from_slice(&sims.seed.path);
    for v in header {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&table.alpha.to_le_bytes())?;
    for v in table.eta_obs.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    for i in 0..table.n_rows() {
        for v in sims.draw(i).iter().chain(sims.summary(i)).chain(std::iter::once(&table.distances[i])) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| Error::BadCache("truncated header".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| Error::BadCache("truncated data".into()))?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_table_cache(path: &Path) -> Result<ReferenceTable> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| Error::BadCache("file shorter than magic".into()))?;
    if magic != CACHE_MAGIC {
        return Err(Error::BadCache("wrong magic".into()));
    }
    let rows = read_u64(&mut r)? as usize;
    let k_theta = read_u64(&mut r)? as usize;
    let k_eta = read_u64(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let master = read_u64(&mut r)?;
    let depth = read_u64(&mut r)? as usize;
    if k_theta == 0 || k_eta == 0 || depth > 64 {
        return Err(Error::BadCache("implausible header".into()));
    }
    let path_ix = (0..depth).map(|_| read_u64(&mut r)).collect::<Result<Vec<_>>>()?;
    let alpha = read_f64(&mut r)?;
    let eta_obs = (0..k_eta).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
    let mut draws = Vec::with_capacity(rows * k_theta);
    let mut summaries = Vec::with_capacity(rows * k_eta);
    let mut distances = Vec::with_capacity(rows);
    for _ in 0..rows {
        for _ in 0..k_theta {
            draws.push(read_f64(&mut r)?);
        }
        for _ in 0..k_eta {
            summaries.push(read_f64(&mut r)?);
        }
        distances.push(read_f64(&mut r)?);
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(Error::BadCache("trailing bytes".into()));
    }
    let sims = SimulationTable {
        k_theta,
        k_eta,
        draws,
        summaries,
        n,
        seed: SeedPath::from_parts(master, &path_ix),
        resimulated: 0,
    };
    Ok(ReferenceTable { sims: Arc::new(sims), distances, eta_obs: SummaryVector::new(eta_obs), alpha, weights: None })
}
