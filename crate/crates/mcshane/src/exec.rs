//! Execution policy for per-item work. Results are always returned in input order, so any
//! reduction performed afterwards is independent of the thread count.

use serde::{Deserialize, Serialize};

/// How independent per-item work is scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exec {
    /// One thread, in order.
    Sequential,
    /// Rayon pool; `threads == 0` uses the global pool. Without the `parallel` feature this
    /// behaves like `Sequential`.
    Parallel { threads: usize },
    /// `Parallel` on the global pool when the feature is enabled, otherwise `Sequential`.
    #[default]
    Auto,
}

impl Exec {
    /// `jobs == 1` is sequential, `jobs == 0` means all cores.
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel { threads: jobs }
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Exec::Sequential)
    }

    /// Applies `f` to every item, preserving order.
    pub fn map<T, U, F>(&self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match *self {
                Exec::Sequential => items.iter().map(f).collect(),
                Exec::Auto | Exec::Parallel { threads: 0 } => items.par_iter().map(f).collect(),
                Exec::Parallel { threads } => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                    Err(_) => items.iter().map(f).collect(),
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_for_every_policy() {
        let items: Vec<u64> = (0..1000).collect();
        let want: Vec<u64> = items.iter().map(|x| x * x).collect();
        for exec in [Exec::Sequential, Exec::Auto, Exec::Parallel { threads: 3 }, Exec::from_jobs(0)] {
            assert_eq!(exec.map(&items, |x| x * x), want);
        }
    }
}
