//! Bounded worker pool for solver runs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use tokio::sync::Semaphore;

/// The pool and its queue are both full.
#[derive(Debug, PartialEq, Eq)]
pub struct Busy;

pub struct Pool {
    workers: usize,
    slots: Arc<Semaphore>,
    admitted: Arc<AtomicUsize>,
    capacity: usize,
}

struct Admission(Arc<AtomicUsize>);

impl Drop for Admission {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

impl Pool {
    pub fn new(workers: usize, queue_depth: usize) -> Self {
        let workers = workers.max(1);
        Pool {
            workers,
            slots: Arc::new(Semaphore::new(workers)),
            admitted: Arc::new(AtomicUsize::new(0)),
            capacity: workers + queue_depth,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `job` on a blocking thread once a worker is free, or refuses
    /// at once when `workers + queue_depth` jobs are already admitted.
    pub async fn run<T: Send + 'static>(&self, job: impl FnOnce() -> T + Send + 'static) -> Result<T, Busy> {
        let n = self.admitted.fetch_add(1, Ordering::SeqCst);
        let admission = Admission(self.admitted.clone());
        if n >= self.capacity {
            return Err(Busy);
        }
        let permit = self.slots.clone().acquire_owned().await.expect("semaphore never closed");
        // Both guards travel with the job, so a dropped request still holds
        // its slot until the solver returns.
        let handle = tokio::task::spawn_blocking(move || {
            let _admission = admission;
            let _permit = permit;
            job()
        });
        Ok(handle.await.expect("solver job panicked"))
    }
}
