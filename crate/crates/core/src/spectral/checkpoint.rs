//! Binary checkpoints.
//!
//! Layout, all little endian:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `ANSH` |
//! | 4 | format version (u32, currently 1) |
//! | 12 | `n_h`, `n_v`, `m` (u32 each) |
//! | 8 | time (f64) |
//! | 3 × 16·N | components u1, u2, u3; each coefficient as (re, im) f64 pairs in storage order `[i1][i2][i3]` |

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use super::field::{SpectralField, VelocityState};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ANSH";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 12 + 8;

pub fn write_checkpoint(path: &Path, state: &VelocityState) -> Result<()> {
    let g = state.grid();
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for v in [g.n_h() as u32, g.n_v() as u32, g.stretch()] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&state.time.to_le_bytes())?;
    for comp in &state.components {
        for c in comp.coeffs() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<VelocityState> {
    let bytes = fs::read(path)?;
    let bad = |reason: String| Error::Checkpoint {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("missing ANSH magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let grid = Grid::new(u32_at(8) as usize, u32_at(12) as usize, u32_at(16))
        .map_err(|e| bad(e.to_string()))?;
    let time = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let n = grid.n_points();
    let expected = HEADER_LEN + 3 * 16 * n;
    if bytes.len() != expected {
        return Err(bad(format!(
            "payload length {} does not match grid (expected {expected})",
            bytes.len()
        )));
    }
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let components = std::array::from_fn(|comp| {
        let base = HEADER_LEN + comp * 16 * n;
        let coeffs = (0..n)
            .map(|i| Complex64::new(f64_at(base + 16 * i), f64_at(base + 16 * i + 8)))
            .collect();
        SpectralField::from_coeffs(grid, coeffs).expect("length checked above")
    });
    VelocityState::new(components, time)
}
