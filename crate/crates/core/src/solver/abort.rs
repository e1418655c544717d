//! The c/d abort criterion.

/// `⌈-log2(ε/2)⌉`, the initial number of consecutive covered samples needed.
pub fn initial_threshold(epsilon: f64) -> u64 {
    assert!(
        epsilon > 0.0 && epsilon < 1.0,
        "error bound must lie in (0, 1)"
    );
    let x = -(epsilon / 2.0).log2();
    // guard against 3.0000000000000004 style rounding
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as u64
    } else {
        x.ceil() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sample {
    /// True iff the automorphism was already covered by the structure.
    pub sifted: bool,
    pub uniform: bool,
}

#[derive(Clone, Debug)]
pub struct AbortState {
    /// Consecutive uniform samples that sifted successfully.
    pub c: u64,
    pub d: u64,
    pub initial_d: u64,
    pub epsilon: f64,
    /// Tests that ended with a failed sift after at least one success.
    pub tests_failed: u64,
    log: Option<Vec<Sample>>,
}

impl AbortState {
    pub fn new(epsilon: f64) -> Self {
        let d = initial_threshold(epsilon);
        AbortState {
            c: 0,
            d,
            initial_d: d,
            epsilon,
            tests_failed: 0,
            log: None,
        }
    }

    /// Also keeps every recorded sample, for [`replay`].
    pub fn with_log(epsilon: f64) -> Self {
        AbortState {
            log: Some(Vec::new()),
            ..Self::new(epsilon)
        }
    }

    /// Updates the counters and returns true iff `c > d`.
    pub fn record(&mut self, sample: Sample) -> bool {
        if let Some(log) = &mut self.log {
            log.push(sample);
        }
        if sample.uniform {
            if sample.sifted {
                self.c += 1;
            } else {
                if self.c > 0 {
                    self.d += 1;
                    self.tests_failed += 1;
                }
                self.c = 0;
            }
        }
        self.satisfied()
    }

    pub fn satisfied(&self) -> bool {
        self.c > self.d
    }

    pub fn log(&self) -> Option<&[Sample]> {
        self.log.as_deref()
    }
}

/// Re-runs a sample log from scratch.
pub fn replay(epsilon: f64, samples: &[Sample]) -> AbortState {
    let mut state = AbortState::new(epsilon);
    for &s in samples {
        state.record(s);
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    const OK: Sample = Sample {
        sifted: true,
        uniform: true,
    };
    const FAIL: Sample = Sample {
        sifted: false,
        uniform: true,
    };

    #[test]
    fn thresholds() {
        assert_eq!(initial_threshold(0.01), 8);
        assert_eq!(initial_threshold(0.5), 2);
        assert_eq!(initial_threshold(0.25), 3);
        assert_eq!(initial_threshold(0.05), 6);
    }

    #[test]
    fn success_counts() {
        let mut s = AbortState::new(0.01);
        s.record(OK);
        assert_eq!((s.c, s.d), (1, 8));
    }

    #[test]
    fn failure_after_progress_raises_d() {
        let mut s = AbortState::new(0.01);
        for _ in 0..3 {
            s.record(OK);
        }
        s.record(FAIL);
        assert_eq!((s.c, s.d), (0, 9));
        s.record(FAIL);
        assert_eq!((s.c, s.d), (0, 9));
    }

    #[test]
    fn non_uniform_ignored() {
        let mut s = AbortState::new(0.5);
        s.record(Sample {
            sifted: true,
            uniform: false,
        });
        s.record(Sample {
            sifted: false,
            uniform: false,
        });
        assert_eq!((s.c, s.d), (0, 2));
    }

    #[test]
    fn terminates_past_d() {
        let mut s = AbortState::new(0.5);
        assert!(!s.record(OK));
        assert!(!s.record(OK));
        assert!(s.record(OK));
    }
}
