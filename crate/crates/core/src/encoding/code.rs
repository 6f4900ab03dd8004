use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CODE_ROWS: usize = 45;
pub const CODE_COLS: usize = 360;
pub const BITS_PER_CELL: usize = 2;
/// 45 × 360 × 2.
pub const CODE_BITS: usize = CODE_ROWS * CODE_COLS * BITS_PER_CELL;
pub const CODE_PAYLOAD_BYTES: usize = CODE_BITS / 8;
pub const FILE_MAGIC: &[u8; 4] = b"IRC1";
pub const FILE_HEADER_BYTES: usize = 8;

/// Phase-quantized iris template: `rows × cols` cells of two bits each
/// (real-part sign, imaginary-part sign).
///
/// Each row is stored in little-endian `u64` words, cell `c` occupying bits
/// `2c` (real) and `2c + 1` (imaginary); unused high bits of the last word
/// are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IrisCode {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for IrisCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IrisCode({}x{}, {} ones)", self.rows, self.cols, self.count_ones())
    }
}

impl IrisCode {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = (cols * BITS_PER_CELL).div_ceil(64);
        Self { rows, cols, words_per_row, words: vec![0; rows * words_per_row] }
    }

    /// Builds a code from a per-cell function returning (real bit, imag bit).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> (bool, bool)) -> Self {
        let mut code = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let (re, im) = f(r, c);
                code.set(r, c, re, im);
            }
        }
        code
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn bit_len(&self) -> usize {
        self.rows * self.cols * BITS_PER_CELL
    }

    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    fn bit_index(&self, r: usize, j: usize) -> (usize, u32) {
        (r * self.words_per_row + j / 64, (j % 64) as u32)
    }

    #[inline]
    pub fn bit(&self, r: usize, j: usize) -> bool {
        let (w, b) = self.bit_index(r, j);
        (self.words[w] >> b) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, r: usize, j: usize, v: bool) {
        let (w, b) = self.bit_index(r, j);
        if v {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    /// (real bit, imaginary bit) of a cell.
    #[inline]
    pub fn cell(&self, r: usize, c: usize) -> (bool, bool) {
        (self.bit(r, 2 * c), self.bit(r, 2 * c + 1))
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, re: bool, im: bool) {
        self.set_bit(r, 2 * c, re);
        self.set_bit(r, 2 * c + 1, im);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn last_word_mask(&self) -> u64 {
        let used = (self.cols * BITS_PER_CELL) % 64;
        if used == 0 {
            u64::MAX
        } else {
            (1u64 << used) - 1
        }
    }

    /// Every bit inverted.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        let mask = self.last_word_mask();
        for row in out.words.chunks_exact_mut(self.words_per_row) {
            row.iter_mut().for_each(|w| *w = !*w);
            if let Some(last) = row.last_mut() {
                *last &= mask;
            }
        }
        out
    }

    /// Bytes of the interchange layout: rows outer, columns inner, real bit
    /// then imaginary bit per cell, most significant bit first.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bit_len().div_ceil(8)];
        let mut k = 0usize;
        for r in 0..self.rows {
            for j in 0..self.cols * BITS_PER_CELL {
                if self.bit(r, j) {
                    out[k / 8] |= 0x80 >> (k % 8);
                }
                k += 1;
            }
        }
        out
    }

    pub fn from_packed(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        let mut code = Self::zeros(rows, cols);
        let need = code.bit_len().div_ceil(8);
        if bytes.len() != need {
            return Err(Error::MalformedCode(format!(
                "{rows}x{cols} code needs {need} payload bytes, got {}",
                bytes.len()
            )));
        }
        let mut k = 0usize;
        for r in 0..rows {
            for j in 0..cols * BITS_PER_CELL {
                code.set_bit(r, j, bytes[k / 8] & (0x80 >> (k % 8)) != 0);
                k += 1;
            }
        }
        Ok(code)
    }

    /// Serializes as `IRC1`, rows (u16 LE), cols (u16 LE), packed payload.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(FILE_MAGIC)?;
        w.write_all(&(self.rows as u16).to_le_bytes())?;
        w.write_all(&(self.cols as u16).to_le_bytes())?;
        w.write_all(&self.to_packed())
    }

    pub fn to_file_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(FILE_HEADER_BYTES + self.bit_len().div_ceil(8));
        self.write_to(&mut out).expect("writing to a Vec");
        out
    }

    pub fn from_file_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < FILE_HEADER_BYTES {
            return Err(Error::MalformedCode(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != FILE_MAGIC {
            return Err(Error::MalformedCode(format!("bad magic {:?}", &bytes[..4])));
        }
        let rows = u16::from_le_bytes([bytes[4], bytes[5]]) as usize;
        let cols = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        if rows == 0 || cols == 0 {
            return Err(Error::MalformedCode(format!("empty geometry {rows}x{cols}")));
        }
        Self::from_packed(rows, cols, &bytes[FILE_HEADER_BYTES..])
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| Error::MalformedCode(e.to_string()))?;
        Self::from_file_bytes(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_file_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_file_bytes(&bytes).map_err(|e| match e {
            Error::MalformedCode(m) => Error::MalformedCode(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}
