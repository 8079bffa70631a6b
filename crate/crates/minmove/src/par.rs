//! Data-parallel helpers with a sequential fallback.
//!
//! With the default `parallel` feature the helpers run on a rayon pool sized
//! by the `MINMOVE_THREADS` environment variable (all cores when unset).
//! Without the feature everything runs sequentially on the calling thread.

#[cfg(feature = "parallel")]
mod imp {
    use rayon::prelude::*;
    use std::sync::OnceLock;

    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

    fn pool() -> &'static rayon::ThreadPool {
        POOL.get_or_init(|| {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Ok(v) = std::env::var("MINMOVE_THREADS") {
                if let Ok(n) = v.trim().parse::<usize>() {
                    if n >= 1 {
                        builder = builder.num_threads(n);
                    }
                }
            }
            builder.build().expect("failed to build worker pool")
        })
    }

    /// True iff `f` holds for every index, short-circuiting on the first
    /// false or error.
    pub fn try_all<E: Send>(
        count: usize,
        f: impl Fn(usize) -> Result<bool, E> + Sync,
    ) -> Result<bool, E> {
        pool().install(|| {
            let hit = (0..count)
                .into_par_iter()
                .map(&f)
                .find_any(|r| !matches!(r, Ok(true)));
            match hit {
                None => Ok(true),
                Some(Ok(_)) => Ok(false),
                Some(Err(e)) => Err(e),
            }
        })
    }

    /// Minimum of `f(i)` over all indices by the natural ordering of the
    /// produced key, deterministically.
    pub fn try_min_by_key<T, E>(
        count: usize,
        f: impl Fn(usize) -> Result<Option<T>, E> + Sync,
    ) -> Result<Option<T>, E>
    where
        T: Ord + Send,
        E: Send,
    {
        pool().install(|| {
            (0..count)
                .into_par_iter()
                .map(&f)
                .try_reduce(
                    || None,
                    |a, b| {
                        Ok(match (a, b) {
                            (None, x) | (x, None) => x,
                            (Some(x), Some(y)) => Some(x.min(y)),
                        })
                    },
                )
        })
    }

    /// Runs `f` on a dedicated pool with `threads` workers (used by benches to
    /// compare thread counts).
    pub fn with_thread_count<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("failed to build worker pool")
            .install(f)
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn try_all<E>(
        count: usize,
        f: impl Fn(usize) -> Result<bool, E>,
    ) -> Result<bool, E> {
        for i in 0..count {
            if !f(i)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn try_min_by_key<T: Ord, E>(
        count: usize,
        f: impl Fn(usize) -> Result<Option<T>, E>,
    ) -> Result<Option<T>, E> {
        let mut best: Option<T> = None;
        for i in 0..count {
            if let Some(v) = f(i)? {
                best = Some(match best {
                    None => v,
                    Some(b) => b.min(v),
                });
            }
        }
        Ok(best)
    }

    pub fn with_thread_count<R>(_threads: usize, f: impl FnOnce() -> R) -> R {
        f()
    }
}

pub use imp::{try_all, try_min_by_key, with_thread_count};
