//! Append-only arena with lock-free reads, shared between worker threads.
//!
//! Slots live in buckets of doubling size so existing entries never move.
//! An index is only handed out after its slot has been written, so readers
//! that learned the index through the unique table always find it set.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

const FIRST_BITS: u32 = 10;
const BUCKETS: usize = 32 - FIRST_BITS as usize;

pub(crate) struct Arena<T> {
    buckets: [OnceLock<Box<[OnceLock<T>]>>; BUCKETS],
    len: AtomicUsize,
}

#[inline]
fn locate(index: usize) -> (usize, usize) {
    let j = index + (1 << FIRST_BITS);
    let bucket = (usize::BITS - 1 - j.leading_zeros()) - FIRST_BITS;
    (bucket as usize, j - (1 << (bucket + FIRST_BITS)))
}

impl<T> Arena<T> {
    pub(crate) fn new() -> Self {
        Arena {
            buckets: std::array::from_fn(|_| OnceLock::new()),
            len: AtomicUsize::new(0),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len.load(Ordering::Acquire)
    }

    /// Stores `value` and returns its index.
    pub(crate) fn push(&self, value: T) -> usize {
        let index = self.len.fetch_add(1, Ordering::AcqRel);
        let (b, off) = locate(index);
        assert!(b < BUCKETS, "node arena exhausted");
        let bucket = self.buckets[b].get_or_init(|| {
            (0..1usize << (b as u32 + FIRST_BITS))
                .map(|_| OnceLock::new())
                .collect()
        });
        if bucket[off].set(value).is_err() {
            unreachable!("arena slot {index} written twice");
        }
        index
    }

    #[inline]
    pub(crate) fn get(&self, index: usize) -> &T {
        let (b, off) = locate(index);
        self.buckets[b]
            .get()
            .and_then(|bucket| bucket[off].get())
            .expect("arena index not yet published")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_boundaries() {
        assert_eq!(locate(0), (0, 0));
        assert_eq!(locate(1023), (0, 1023));
        assert_eq!(locate(1024), (1, 0));
        assert_eq!(locate(1024 + 2047), (1, 2047));
        assert_eq!(locate(1024 + 2048), (2, 0));
    }

    #[test]
    fn push_and_read_back() {
        let a = Arena::new();
        for i in 0..5000u32 {
            assert_eq!(a.push(i * 3), i as usize);
        }
        assert_eq!(a.len(), 5000);
        assert_eq!(*a.get(4321), 4321 * 3);
    }
}
