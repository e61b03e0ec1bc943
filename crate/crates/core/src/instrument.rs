//! Operation counting for the addition-only transform paths.
//!
//! [`Counted`] wraps an integer and bumps a thread-local counter on every `+`
//! or `-`. Running a generic transform over `Counted` values measures exactly
//! how many additions/subtractions it performs.

use std::cell::Cell;
use std::ops::{Add, Sub};

thread_local! {
    static ADDITIONS: Cell<usize> = const { Cell::new(0) };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counted(pub i64);

impl Add for Counted {
    type Output = Counted;
    fn add(self, rhs: Counted) -> Counted {
        ADDITIONS.with(|c| c.set(c.get() + 1));
        Counted(self.0 + rhs.0)
    }
}

impl Sub for Counted {
    type Output = Counted;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Counted) -> Counted {
        ADDITIONS.with(|c| c.set(c.get() + 1));
        Counted(self.0 - rhs.0)
    }
}

/// Runs `f` and returns its result along with the number of `Counted`
/// additions and subtractions it performed on this thread.
pub fn count_additions<R>(f: impl FnOnce() -> R) -> (R, usize) {
    let before = ADDITIONS.with(Cell::get);
    let out = f();
    let after = ADDITIONS.with(Cell::get);
    (out, after - before)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_adds_and_subs() {
        let (v, n) = count_additions(|| (Counted(3) + Counted(4)) - Counted(1));
        assert_eq!(v, Counted(6));
        assert_eq!(n, 2);
    }
}
