//! Flat binary cache for weighted chi-square banks: a 16-byte header
//! (magic, kind, `V`, `B` as little-endian `u32`) followed by `B`
//! little-endian `f64` values in ascending order.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{EigenGrid, EigenKind, EmpiricalBank, NullModel};
use crate::error::{RankError, Result};

pub const BANK_MAGIC: [u8; 4] = *b"RKNB";
pub const BANK_HEADER_LEN: usize = 16;

fn format_error(msg: impl Into<String>) -> RankError {
    RankError::BankFormat(msg.into())
}

pub fn write_bank(path: &Path, null: &NullModel) -> Result<()> {
    let NullModel::WeightedChisq { grid, bank } = null else {
        return Err(format_error("only weighted chi-square banks can be cached"));
    };
    let too_big = |_| format_error("bank dimensions exceed u32");
    let mut bytes = Vec::with_capacity(BANK_HEADER_LEN + 8 * bank.len());
    bytes.extend_from_slice(&BANK_MAGIC);
    bytes.extend_from_slice(&grid.kind.code().to_le_bytes());
    bytes.extend_from_slice(&u32::try_from(grid.truncation).map_err(too_big)?.to_le_bytes());
    bytes.extend_from_slice(&u32::try_from(bank.len()).map_err(too_big)?.to_le_bytes());
    for v in bank.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = fs::File::create(path).map_err(|e| format_error(format!("{}: {e}", path.display())))?;
    file.write_all(&bytes)
        .map_err(|e| format_error(format!("{}: {e}", path.display())))
}

pub fn read_bank(path: &Path) -> Result<NullModel> {
    let bytes = fs::read(path).map_err(|e| format_error(format!("{}: {e}", path.display())))?;
    if bytes.len() < BANK_HEADER_LEN || bytes[..4] != BANK_MAGIC {
        return Err(format_error("missing bank header"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let kind = EigenKind::from_code(word(4)).ok_or_else(|| format_error("unknown eigenvalue kind"))?;
    let truncation = word(8) as usize;
    let draws = word(12) as usize;
    let body = &bytes[BANK_HEADER_LEN..];
    if body.len() != 8 * draws {
        return Err(format_error(format!(
            "expected {draws} values, found {} bytes",
            body.len()
        )));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if !values.windows(2).all(|w| w[0] <= w[1]) {
        return Err(format_error("bank values are not sorted"));
    }
    Ok(NullModel::WeightedChisq {
        grid: EigenGrid::new(kind, truncation)?,
        bank: EmpiricalBank::new(values),
    })
}
