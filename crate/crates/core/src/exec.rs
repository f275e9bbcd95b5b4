//! Evaluation strategy for per-tuple work.
//!
//! Operator tables are filled one canonical tuple at a time, and the tuples
//! are independent. With the `parallel` feature the work is spread over the
//! rayon pool; without it, or after `set_strategy(Strategy::Sequential)`,
//! the same closures run in order on the calling thread. Both paths return
//! results in input order, so output never depends on the strategy.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

const AUTO: u8 = 0;
const SEQ: u8 = 1;
const PAR: u8 = 2;

static OVERRIDE: AtomicU8 = AtomicU8::new(AUTO);

/// Forces a strategy for subsequent calls; `None` restores the default.
pub fn set_strategy(strategy: Option<Strategy>) {
    let v = match strategy {
        None => AUTO,
        Some(Strategy::Sequential) => SEQ,
        Some(Strategy::Parallel) => PAR,
    };
    OVERRIDE.store(v, Ordering::Relaxed);
}

/// The strategy in effect. Parallel is only available with the `parallel` feature.
pub fn strategy() -> Strategy {
    if !cfg!(feature = "parallel") {
        return Strategy::Sequential;
    }
    match OVERRIDE.load(Ordering::Relaxed) {
        SEQ => Strategy::Sequential,
        _ => Strategy::Parallel,
    }
}

/// Sizes the global pool from `ANTIBRACKET_WORKERS` if set. Returns the worker count.
///
/// Only the first call can configure the pool; later calls report the current size.
pub fn init_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = std::env::var("ANTIBRACKET_WORKERS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Maps `f` over `items` with one scratch state per worker, keeping `Some` results in order.
pub(crate) fn filter_map_init<T, R, S, I, F>(items: &[T], init: I, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &T) -> Option<R> + Sync + Send,
{
    match strategy() {
        #[cfg(feature = "parallel")]
        Strategy::Parallel if items.len() > 1 => {
            use rayon::prelude::*;
            items.par_iter().with_min_len(32).map_init(&init, |s, t| f(s, t)).flatten_iter().collect()
        }
        _ => {
            let mut state = init();
            items.iter().filter_map(|t| f(&mut state, t)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let items: Vec<u32> = (0..1000).collect();
        let run = || filter_map_init(&items, || 0u32, |_, &x| (x % 3 == 0).then_some(x * 2));
        set_strategy(Some(Strategy::Sequential));
        let a = run();
        set_strategy(Some(Strategy::Parallel));
        let b = run();
        set_strategy(None);
        assert_eq!(a, b);
        assert_eq!(a.len(), 334);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }
}
