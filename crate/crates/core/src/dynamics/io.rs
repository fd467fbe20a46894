//! Compact binary trajectory dump.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic      8 bytes  "EITPBG01"
//! version    u32      currently 1
//! n_points   u64
//! z_min      f64
//! z_max      f64
//! n_snaps    u64
//! then per snapshot:
//!   t, tau, theta           3 × f64
//!   n_points × (re Ψ₊, im Ψ₊, re Ψ₋, im Ψ₋)   f64 each
//! ```

use std::io::{self, Read, Write};

use num_complex::Complex64;

use super::{GridSpec, PolaritonState, Snapshot};

pub const BINARY_MAGIC: &[u8; 8] = b"EITPBG01";
pub const BINARY_VERSION: u32 = 1;

pub fn write_binary<W: Write>(mut w: W, snapshots: &[Snapshot]) -> io::Result<()> {
    let grid = snapshots
        .first()
        .map(|s| s.state.grid)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "no snapshots to write"))?;
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&(grid.n_points as u64).to_le_bytes())?;
    w.write_all(&grid.z_min.to_le_bytes())?;
    w.write_all(&grid.z_max.to_le_bytes())?;
    w.write_all(&(snapshots.len() as u64).to_le_bytes())?;
    for s in snapshots {
        if s.state.grid != grid {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "snapshots on different grids"));
        }
        for v in [s.time, s.tau, s.theta] {
            w.write_all(&v.to_le_bytes())?;
        }
        for (p, m) in s.state.psi_plus.iter().zip(&s.state.psi_minus) {
            for v in [p.re, p.im, m.re, m.im] {
                w.write_all(&v.to_le_bytes())?;
            }
        }
    }
    w.flush()
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    read_u64(r).map(f64::from_bits)
}

/// Reads a dump back. Drive amplitudes are not stored, so the returned
/// snapshots carry `omega_c = omega_s = NaN` and `step = index`.
pub fn read_binary<R: Read>(mut r: R) -> io::Result<Vec<Snapshot>> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(bad("not a trajectory dump"));
    }
    let mut v = [0u8; 4];
    r.read_exact(&mut v)?;
    if u32::from_le_bytes(v) != BINARY_VERSION {
        return Err(bad("unsupported dump version"));
    }
    let n = read_u64(&mut r)? as usize;
    let z_min = read_f64(&mut r)?;
    let z_max = read_f64(&mut r)?;
    let grid = GridSpec::new(z_min, z_max, n).map_err(|e| bad(&e.to_string()))?;
    let count = read_u64(&mut r)? as usize;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for step in 0..count {
        let time = read_f64(&mut r)?;
        let tau = read_f64(&mut r)?;
        let theta = read_f64(&mut r)?;
        let mut state = PolaritonState::zeros(grid, time);
        for i in 0..n {
            let mut x = [0.0; 4];
            for v in x.iter_mut() {
                *v = read_f64(&mut r)?;
            }
            state.psi_plus[i] = Complex64::new(x[0], x[1]);
            state.psi_minus[i] = Complex64::new(x[2], x[3]);
        }
        out.push(Snapshot {
            step,
            time,
            tau,
            theta,
            omega_c: f64::NAN,
            omega_s: f64::NAN,
            state,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid = GridSpec::new(-1.0, 2.0, 64).unwrap();
        let mut a = PolaritonState::gaussian(grid, 0.3, 0.2, 5.0, 1e-3).unwrap();
        a.psi_minus[3] = Complex64::new(-0.25, 1e-300);
        let snaps: Vec<Snapshot> = (0..3)
            .map(|i| Snapshot {
                step: i,
                time: i as f64,
                tau: 0.5 * i as f64,
                theta: 0.1,
                omega_c: 1.0,
                omega_s: 2.0,
                state: a.clone(),
            })
            .collect();
        let mut buf = Vec::new();
        write_binary(&mut buf, &snaps).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 8 * 4 + 3 * (24 + 64 * 32));
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[2].state.psi_plus, a.psi_plus);
        assert_eq!(back[2].state.psi_minus, a.psi_minus);
        assert_eq!(back[1].tau, 0.5);
        assert!(read_binary(&buf[..20]).is_err());
        assert!(read_binary(&b"NOTADUMP........"[..]).is_err());
    }
}
