//! Thread-local accounting of time spent inside bounded-search fallbacks
//! (run BFS, boost lifting search, orbit BFS base cases). Benchmarks use it
//! to separate structural certificate construction from search time.

use std::cell::Cell;
use std::time::{Duration, Instant};

thread_local! {
    static EXCLUDED: Cell<Duration> = const { Cell::new(Duration::ZERO) };
    static DEPTH: Cell<u32> = const { Cell::new(0) };
}

/// Clears the accumulated bounded-search time for the current thread.
pub fn reset() {
    EXCLUDED.with(|c| c.set(Duration::ZERO));
}

/// Total time spent inside bounded searches on the current thread since the
/// last [`reset`].
pub fn elapsed() -> Duration {
    EXCLUDED.with(|c| c.get())
}

/// Runs `f`, charging its wall-clock time to the bounded-search account.
/// Nested tracked calls are charged only once (at the outermost level).
pub(crate) fn track<T>(f: impl FnOnce() -> T) -> T {
    let outermost = DEPTH.with(|d| {
        let v = d.get();
        d.set(v + 1);
        v == 0
    });
    let start = Instant::now();
    let out = f();
    DEPTH.with(|d| d.set(d.get() - 1));
    if outermost {
        let dt = start.elapsed();
        EXCLUDED.with(|c| c.set(c.get() + dt));
    }
    out
}

thread_local! {
    static AUX: [Cell<Duration>; 6] = [const { Cell::new(Duration::ZERO) }; 6];
}

#[doc(hidden)]
pub fn aux_reset() {
    AUX.with(|a| {
        for c in a {
            c.set(Duration::ZERO);
        }
    });
}

#[doc(hidden)]
pub fn aux_elapsed(k: usize) -> Duration {
    AUX.with(|a| a[k].get())
}

#[doc(hidden)]
pub fn aux_track<T>(k: usize, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let dt = start.elapsed();
    AUX.with(|a| a[k].set(a[k].get() + dt));
    out
}
