//! Packed-word Hamming kernels.
//!
//! Each code row is stored twice back to back ("doubled"), so the row
//! rotated left by `s` cells is the bit window starting at `2s`. Reading that
//! window costs two shifts per word, which keeps all 360 shifts on the
//! XOR + popcount path without materializing rotated copies.

use crate::encoding::{IrisCode, BITS_PER_CELL};
use crate::error::{Error, Result};

pub(crate) fn check_dims(a: &IrisCode, b: &IrisCode) -> Result<()> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::CodeMismatch { a_rows: a.rows(), a_cols: a.cols(), b_rows: b.rows(), b_cols: b.cols() });
    }
    Ok(())
}

/// Number of differing bits.
#[inline]
pub fn hamming_count(a: &IrisCode, b: &IrisCode) -> u32 {
    a.words().iter().zip(b.words()).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Fraction of differing bits.
pub fn hamming(a: &IrisCode, b: &IrisCode) -> Result<f64> {
    check_dims(a, b)?;
    Ok(hamming_count(a, b) as f64 / a.bit_len() as f64)
}

/// Rotates every row left by `degrees` cells (mod cols): cell `c` of the
/// result holds cell `c + degrees` of the input, both bits moving together.
pub fn shift_code(c: &IrisCode, degrees: i64) -> IrisCode {
    let cols = c.cols();
    let s = degrees.rem_euclid(cols as i64) as usize;
    IrisCode::from_fn(c.rows(), cols, |r, col| c.cell(r, (col + s) % cols))
}

/// A code with doubled rows for fast shifted comparison.
#[derive(Debug, Clone)]
pub struct PreparedCode {
    code: IrisCode,
    doubled: Vec<u64>,
    doubled_words: usize,
    last_mask: u64,
}

impl PreparedCode {
    pub fn new(code: IrisCode) -> Self {
        let row_bits = code.cols() * BITS_PER_CELL;
        // Window start reaches 2 * (cols - 1); one spare word for the carry.
        let doubled_words = (2 * row_bits).div_ceil(64) + 1;
        let mut doubled = vec![0u64; code.rows() * doubled_words];
        for r in 0..code.rows() {
            let dst = &mut doubled[r * doubled_words..(r + 1) * doubled_words];
            for k in 0..2 * row_bits {
                let j = k % row_bits;
                if (code.row_words(r)[j / 64] >> (j % 64)) & 1 == 1 {
                    dst[k / 64] |= 1 << (k % 64);
                }
            }
        }
        let used = row_bits % 64;
        let last_mask = if used == 0 { u64::MAX } else { (1u64 << used) - 1 };
        Self { code, doubled, doubled_words, last_mask }
    }

    #[inline]
    pub fn code(&self) -> &IrisCode {
        &self.code
    }

    /// Word `i` of row `r` rotated left by `shift` cells.
    #[inline(always)]
    fn window_word(&self, r: usize, shift: usize, i: usize) -> u64 {
        let row = &self.doubled[r * self.doubled_words..(r + 1) * self.doubled_words];
        let off = shift * BITS_PER_CELL;
        let q = off / 64 + i;
        let b = off % 64;
        let w = if b == 0 { row[q] } else { (row[q] >> b) | (row[q + 1] << (64 - b)) };
        if i + 1 == self.code.words_per_row() {
            w & self.last_mask
        } else {
            w
        }
    }

    /// Differing bits between `a` and this code rotated left by `shift`.
    #[inline]
    pub fn shifted_distance(&self, a: &IrisCode, shift: usize) -> u32 {
        let mut total = 0u32;
        for r in 0..a.rows() {
            for (i, &w) in a.row_words(r).iter().enumerate() {
                total += (w ^ self.window_word(r, shift, i)).count_ones();
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_code(seed: u64, rows: usize, cols: usize) -> IrisCode {
        let mut s = seed | 1;
        IrisCode::from_fn(rows, cols, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s & 1 == 1, s & 2 == 2)
        })
    }

    #[test]
    fn self_and_complement() {
        let c = random_code(9, 45, 360);
        assert_eq!(hamming(&c, &c).unwrap(), 0.0);
        assert_eq!(hamming(&c, &c.complement()).unwrap(), 1.0);
    }

    #[test]
    fn known_bit_flips() {
        let c = random_code(4, 45, 360);
        let mut d = c.clone();
        for k in 0..81 {
            let (r, j) = ((k * 7) % 45, (k * 131) % 720);
            d.set_bit(r, j, !c.bit(r, j));
        }
        assert_eq!(hamming_count(&c, &d), 81);
        assert_eq!(hamming(&c, &d).unwrap(), 0.0025);
    }

    #[test]
    fn mismatched_dims() {
        let a = IrisCode::zeros(45, 360);
        let b = IrisCode::zeros(45, 359);
        assert!(matches!(hamming(&a, &b), Err(Error::CodeMismatch { .. })));
    }

    #[test]
    fn shift_identities() {
        let c = random_code(77, 45, 360);
        assert_eq!(shift_code(&c, 0), c);
        assert_eq!(shift_code(&c, 360), c);
        for k in [1, 37, 180, 359] {
            assert_eq!(shift_code(&shift_code(&c, k), 360 - k), c);
        }
        assert_eq!(shift_code(&c, -1), shift_code(&c, 359));
    }

    #[test]
    fn shift_moves_cells_left() {
        let c = random_code(5, 3, 70);
        let s = shift_code(&c, 3);
        for r in 0..3 {
            for col in 0..70 {
                assert_eq!(s.cell(r, col), c.cell(r, (col + 3) % 70));
            }
        }
    }

    #[test]
    fn windowed_distance_matches_explicit_shift() {
        for cols in [64usize, 32, 33, 360] {
            let a = random_code(11, 4, cols);
            let b = random_code(12, 4, cols);
            let prepared = PreparedCode::new(b.clone());
            for s in [0, 1, cols / 2, cols - 1] {
                assert_eq!(
                    prepared.shifted_distance(&a, s),
                    hamming_count(&a, &shift_code(&b, s as i64)),
                    "cols={cols} s={s}"
                );
            }
        }
    }
}
