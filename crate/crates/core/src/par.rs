// Copyright 2026 The qbm Authors
// SPDX-License-Identifier: Apache-2.0

//! Data-parallel building blocks.
//!
//! With the `parallel` feature (default) these run on the rayon pool; without
//! it they fall back to plain iterators. Every helper assigns work by index and
//! never reduces across workers, so results do not depend on the thread count.

use ndarray::{Array2, ArrayViewMut1, Axis};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(lane_index, lane)` for every lane of `a` running along `axis`.
pub fn for_each_lane<T, F>(a: &mut Array2<T>, axis: Axis, f: F)
where
    T: Send + Sync,
    F: Fn(usize, ArrayViewMut1<'_, T>) + Sync + Send,
{
    let outer = Axis(1 - axis.index());
    #[cfg(feature = "parallel")]
    a.axis_iter_mut(outer)
        .into_par_iter()
        .enumerate()
        .for_each(|(i, lane)| f(i, lane));
    #[cfg(not(feature = "parallel"))]
    a.axis_iter_mut(outer)
        .enumerate()
        .for_each(|(i, lane)| f(i, lane));
}

/// `(0..n).map(f).collect()`, evaluated in parallel when enabled. Output order
/// always follows the index.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Number of workers the current context would use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `op` on a dedicated pool of `threads` workers (0 = rayon default).
/// Without the `parallel` feature `op` simply runs on the calling thread.
pub fn with_threads<R, OP>(threads: usize, op: OP) -> R
where
    R: Send,
    OP: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        op()
    }
}
