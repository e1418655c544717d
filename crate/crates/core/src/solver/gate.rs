//! Shared abort state with a drain barrier.
//!
//! Once `c > d`, no new iteration may start, and termination is only
//! sealed after every iteration already running has reported back. An
//! in-flight sample that fails its sift resets `c` and search resumes.

use std::sync::{Condvar, Mutex};

use super::abort::{AbortState, Sample};

#[derive(Debug)]
struct Inner {
    abort: AbortState,
    in_flight: usize,
    draining: bool,
    sealed: bool,
    stopping: bool,
}

#[derive(Debug)]
pub struct Gate {
    inner: Mutex<Inner>,
    wake: Condvar,
}

impl Gate {
    pub fn new(abort: AbortState) -> Self {
        Gate {
            inner: Mutex::new(Inner {
                abort,
                in_flight: 0,
                draining: false,
                sealed: false,
                stopping: false,
            }),
            wake: Condvar::new(),
        }
    }

    /// Registers a new iteration. False means the caller must stop.
    pub fn begin(&self) -> bool {
        let mut g = self.inner.lock().unwrap();
        while g.draining && !g.sealed && !g.stopping {
            g = self.wake.wait(g).unwrap();
        }
        if g.sealed || g.stopping {
            return false;
        }
        g.in_flight += 1;
        true
    }

    /// Ends an iteration started with [`Gate::begin`].
    pub fn finish(&self, sample: Option<Sample>) {
        let mut g = self.inner.lock().unwrap();
        g.in_flight -= 1;
        if let Some(s) = sample {
            if g.abort.record(s) {
                g.draining = true;
            }
        }
        if g.draining && g.in_flight == 0 {
            if g.abort.satisfied() {
                g.sealed = true;
            } else {
                g.draining = false;
            }
            self.wake.notify_all();
        }
    }

    /// Records a sample outside of any iteration.
    pub fn record(&self, sample: Sample) {
        let mut g = self.inner.lock().unwrap();
        g.in_flight += 1;
        drop(g);
        self.finish(Some(sample));
    }

    /// Makes every later [`Gate::begin`] fail until [`Gate::resume`].
    pub fn request_stop(&self) {
        self.inner.lock().unwrap().stopping = true;
        self.wake.notify_all();
    }

    pub fn resume(&self) {
        self.inner.lock().unwrap().stopping = false;
    }

    pub fn sealed(&self) -> bool {
        self.inner.lock().unwrap().sealed
    }

    pub fn abort_state(&self) -> AbortState {
        self.inner.lock().unwrap().abort.clone()
    }
}
