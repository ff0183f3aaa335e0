//! Minimal packed GF(2) vector used as the storage for Pauli X/Z components.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn low_mask(count: usize) -> u64 {
    if count >= WORD {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / WORD];
        let bit = 1u64 << (i % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND with `other`.
    pub fn and_parity(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn or_count(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Reads `count <= 64` bits starting at `start`, bit `start` least significant.
    pub fn read(&self, start: usize, count: usize) -> u64 {
        debug_assert!(count <= WORD && start + count <= self.len);
        if count == 0 {
            return 0;
        }
        let w = start / WORD;
        let off = start % WORD;
        let mut v = self.words[w] >> off;
        if off != 0 && off + count > WORD {
            v |= self.words[w + 1] << (WORD - off);
        }
        v & low_mask(count)
    }

    /// Overwrites `count <= 64` bits starting at `start` with the low bits of `value`.
    pub fn write(&mut self, start: usize, count: usize, value: u64) {
        debug_assert!(count <= WORD && start + count <= self.len);
        if count == 0 {
            return;
        }
        let value = value & low_mask(count);
        let w = start / WORD;
        let off = start % WORD;
        let mask = low_mask(count) << off;
        self.words[w] = (self.words[w] & !mask) | (value << off);
        if off != 0 && off + count > WORD {
            let spill = off + count - WORD;
            let mask_hi = low_mask(spill);
            self.words[w + 1] = (self.words[w + 1] & !mask_hi) | (value >> (WORD - off));
        }
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        debug_assert!(start <= end && end <= self.len);
        let mut out = BitVec::zeros(end - start);
        let mut pos = start;
        while pos < end {
            let count = (end - pos).min(WORD);
            out.write(pos - start, count, self.read(pos, count));
            pos += count;
        }
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.copy_from(0, self);
        out.copy_from(self.len, other);
        out
    }

    /// Copies all of `src` into `self` starting at bit `at`.
    pub fn copy_from(&mut self, at: usize, src: &BitVec) {
        let mut pos = 0;
        while pos < src.len {
            let count = (src.len - pos).min(WORD);
            self.write(at + pos, count, src.read(pos, count));
            pos += count;
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_write_across_word_boundary() {
        let mut v = BitVec::zeros(130);
        v.write(60, 10, 0b10_1101_0111);
        assert_eq!(v.read(60, 10), 0b10_1101_0111);
        assert_eq!(v.read(64, 6), 0b10_1101);
        assert_eq!(v.count_ones(), 7);
        v.write(60, 10, 0);
        assert!(v.is_zero());
    }

    #[test]
    fn slice_and_concat() {
        let mut a = BitVec::zeros(70);
        a.set(0, true);
        a.set(69, true);
        let b = a.concat(&a);
        assert_eq!(b.len(), 140);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 69, 70, 139]);
        assert_eq!(b.slice(69, 71).iter_ones().collect::<Vec<_>>(), vec![0, 1]);
    }
}
