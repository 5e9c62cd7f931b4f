//! Polynomial size cap.
//!
//! Every polynomial the kernel builds is checked against a per-thread term
//! limit. Outside [`with_size_cap`] an overflow is an ordinary panic; inside
//! it the computation unwinds quietly and the caller gets `Err`.

use std::cell::Cell;
use std::panic::{self, AssertUnwindSafe};

pub const DEFAULT_CAP: usize = 200_000;

thread_local! {
    static LIMIT: Cell<usize> = const { Cell::new(DEFAULT_CAP) };
    static GUARDED: Cell<u32> = const { Cell::new(0) };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCapExceeded {
    pub limit: usize,
    pub size: usize,
}

impl std::fmt::Display for SizeCapExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "polynomial size {} exceeds cap {}",
            self.size, self.limit
        )
    }
}

impl std::error::Error for SizeCapExceeded {}

pub fn limit() -> usize {
    LIMIT.with(|l| l.get())
}

#[inline]
pub(crate) fn check(size: usize) {
    let lim = limit();
    if size > lim {
        let e = SizeCapExceeded { limit: lim, size };
        if GUARDED.with(|g| g.get()) > 0 {
            panic::resume_unwind(Box::new(e));
        }
        panic!("{e}");
    }
}

/// Runs `f` with the given term limit; an overflow anywhere inside becomes `Err`.
pub fn with_size_cap<T>(limit: usize, f: impl FnOnce() -> T) -> Result<T, SizeCapExceeded> {
    let old = LIMIT.with(|l| l.replace(limit));
    GUARDED.with(|g| g.set(g.get() + 1));
    let res = panic::catch_unwind(AssertUnwindSafe(f));
    GUARDED.with(|g| g.set(g.get() - 1));
    LIMIT.with(|l| l.set(old));
    match res {
        Ok(v) => Ok(v),
        Err(payload) => match payload.downcast::<SizeCapExceeded>() {
            Ok(e) => Err(*e),
            Err(other) => panic::resume_unwind(other),
        },
    }
}
