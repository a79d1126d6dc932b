use alloc::vec;
use alloc::vec::Vec;

/// Dense bit-per-index set.
#[derive(Clone)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: u64) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64) as usize],
        }
    }

    #[inline]
    pub fn contains(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] & (1 << (i & 63)) != 0
    }

    /// Sets bit `i`, returning whether it was already set.
    #[inline]
    pub fn insert(&mut self, i: u64) -> bool {
        let w = &mut self.words[(i >> 6) as usize];
        let mask = 1 << (i & 63);
        let was = *w & mask != 0;
        *w |= mask;
        was
    }
}
