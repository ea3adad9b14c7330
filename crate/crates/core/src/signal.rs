//! Core signal containers, validity handling, and clean-episode extraction.
//!
//! A recording arrives with a per-sample validity mask (the tracker's own
//! "charging / no valid heart rate" channel, modeled as a boolean). Before
//! any beat detection runs, the recording is cut into maximal contiguous
//! valid stretches, dropping stretches too short to segment.

use std::fmt;

/// Identifier of one study participant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubjectId(pub String);

impl SubjectId {
    pub fn new(s: impl Into<String>) -> Self {
        SubjectId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SubjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-sample validity flags, `true` where the device reported a usable
/// measure and was not charging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityMask(pub Vec<bool>);

impl ValidityMask {
    pub fn all_valid(len: usize) -> Self {
        ValidityMask(vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of valid samples.
    pub fn valid_count(&self) -> usize {
        self.0.iter().filter(|&&v| v).count()
    }
}

/// A uniformly sampled single-lead ECG voltage series in millivolts.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecording {
    /// Voltage samples, millivolts.
    pub samples: Vec<f64>,
    /// Sample rate in Hz. The pipeline runs at 1024 or 256; other rates are
    /// accepted but flagged by [`EcgRecording::has_pipeline_rate`].
    pub sample_rate: u32,
    pub subject_id: SubjectId,
    /// Study day, 1-based (day 1 is the first, possibly partial, day).
    pub day_index: u32,
    /// Seconds from the start of the day to the first sample.
    pub start_offset: f64,
    /// Validity mask, exactly as long as `samples`.
    pub validity: ValidityMask,
}

impl EcgRecording {
    /// A fully valid recording starting at the beginning of the day.
    pub fn new(samples: Vec<f64>, sample_rate: u32, subject_id: SubjectId, day_index: u32) -> Self {
        let validity = ValidityMask::all_valid(samples.len());
        EcgRecording {
            samples,
            sample_rate,
            subject_id,
            day_index,
            start_offset: 0.0,
            validity,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// True when the sample rate is one of the rates the pipeline was
    /// designed around.
    pub fn has_pipeline_rate(&self) -> bool {
        matches!(self.sample_rate, 256 | 1024)
    }

    /// Panics if the validity mask length disagrees with the sample count.
    pub fn assert_well_formed(&self) {
        assert_eq!(
            self.samples.len(),
            self.validity.len(),
            "validity mask must align with samples"
        );
        assert!(self.sample_rate > 0, "sample rate must be positive");
    }
}

/// A maximal contiguous run of valid samples cut from one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub subject_id: SubjectId,
    pub day_index: u32,
    /// Start index into the parent recording.
    pub start: usize,
    /// Number of samples.
    pub len: usize,
    pub sample_rate: u32,
    /// Seconds from day start to the first sample of this episode.
    pub start_offset: f64,
    /// The episode's samples, copied out of the recording.
    pub samples: Vec<f64>,
}

impl Episode {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn duration_s(&self) -> f64 {
        self.len as f64 / f64::from(self.sample_rate)
    }
}

/// Cuts a recording into maximal runs of valid samples, dropping runs
/// shorter than `min_len_s` seconds.
///
/// Returned episodes are disjoint, ordered by start index, and contain only
/// samples the mask marks valid. An empty recording yields an empty list.
pub fn split_clean_episodes(recording: &EcgRecording, min_len_s: f64) -> Vec<Episode> {
    recording.assert_well_formed();
    let min_samples = (min_len_s * f64::from(recording.sample_rate)).ceil() as usize;
    let mut episodes = Vec::new();
    let mut run_start: Option<usize> = None;
    let n = recording.len();
    for i in 0..=n {
        let valid = i < n && recording.validity.0[i];
        match (run_start, valid) {
            (None, true) => run_start = Some(i),
            (Some(s), false) => {
                let len = i - s;
                if len >= min_samples && len > 0 {
                    episodes.push(Episode {
                        subject_id: recording.subject_id.clone(),
                        day_index: recording.day_index,
                        start: s,
                        len,
                        sample_rate: recording.sample_rate,
                        start_offset: recording.start_offset
                            + s as f64 / f64::from(recording.sample_rate),
                        samples: recording.samples[s..i].to_vec(),
                    });
                }
                run_start = None;
            }
            _ => {}
        }
    }
    episodes
}

/// Default minimum episode length in seconds.
///
/// The downstream feature window needs at least three beats (3 s at 60 bpm)
/// and peak detection needs warm-up margin on both sides.
pub const DEFAULT_MIN_EPISODE_S: f64 = 10.0;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(mask: Vec<bool>, fs: u32) -> EcgRecording {
        let samples: Vec<f64> = (0..mask.len()).map(|i| i as f64).collect();
        EcgRecording {
            samples,
            sample_rate: fs,
            subject_id: SubjectId::new("t"),
            day_index: 1,
            start_offset: 0.0,
            validity: ValidityMask(mask),
        }
    }

    /// Brute-force run-length scan used as the oracle for episode cutting.
    fn oracle_runs(mask: &[bool]) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < mask.len() {
            if mask[i] {
                let s = i;
                while i < mask.len() && mask[i] {
                    i += 1;
                }
                runs.push((s, i - s));
            } else {
                i += 1;
            }
        }
        runs
    }

    #[test]
    fn all_true_mask_is_one_episode() {
        let r = rec(vec![true; 2560], 256);
        let eps = split_clean_episodes(&r, 1.0);
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].start, 0);
        assert_eq!(eps[0].len, 2560);
        assert_eq!(eps[0].samples, r.samples);
    }

    #[test]
    fn all_false_mask_is_empty() {
        let r = rec(vec![false; 1000], 256);
        assert!(split_clean_episodes(&r, 0.0).is_empty());
    }

    #[test]
    fn short_runs_are_dropped() {
        // Valid on [0, 1000) and [2000, 2500) at 256 Hz with a 2 s floor:
        // the second run is 500 samples = 1.95 s and must be dropped.
        let mut mask = vec![false; 2600];
        for m in mask.iter_mut().take(1000) {
            *m = true;
        }
        for m in mask.iter_mut().take(2500).skip(2000) {
            *m = true;
        }
        let r = rec(mask.clone(), 256);
        let eps = split_clean_episodes(&r, 2.0);
        let runs = oracle_runs(&mask);
        assert_eq!(runs, vec![(0, 1000), (2000, 500)]);
        assert_eq!(eps.len(), 1);
        assert_eq!((eps[0].start, eps[0].len), (0, 1000));
    }

    #[test]
    fn empty_recording_yields_empty_list() {
        let r = rec(vec![], 256);
        assert!(split_clean_episodes(&r, 0.0).is_empty());
    }

    #[test]
    fn start_offset_is_propagated() {
        let mut mask = vec![false; 512];
        for m in mask.iter_mut().skip(256) {
            *m = true;
        }
        let mut r = rec(mask, 256);
        r.start_offset = 100.0;
        let eps = split_clean_episodes(&r, 0.5);
        assert_eq!(eps.len(), 1);
        assert!((eps[0].start_offset - 101.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn episodes_match_runlength_oracle(mask in prop::collection::vec(any::<bool>(), 0..400)) {
            let r = rec(mask.clone(), 256);
            let eps = split_clean_episodes(&r, 0.0);
            let runs = oracle_runs(&mask);
            let got: Vec<(usize, usize)> = eps.iter().map(|e| (e.start, e.len)).collect();
            prop_assert_eq!(got, runs);
            // No returned sample is invalid, and with min_len 0 the episode
            // lengths sum to the valid count exactly.
            let total: usize = eps.iter().map(|e| e.len).sum();
            prop_assert_eq!(total, r.validity.valid_count());
            for e in &eps {
                for i in e.start..e.end() {
                    prop_assert!(mask[i]);
                }
            }
        }

        #[test]
        fn resplitting_an_episode_is_idempotent(mask in prop::collection::vec(any::<bool>(), 0..400)) {
            let r = rec(mask, 256);
            for e in split_clean_episodes(&r, 0.0) {
                let again = EcgRecording {
                    samples: e.samples.clone(),
                    sample_rate: e.sample_rate,
                    subject_id: e.subject_id.clone(),
                    day_index: e.day_index,
                    start_offset: e.start_offset,
                    validity: ValidityMask::all_valid(e.len),
                };
                let eps = split_clean_episodes(&again, 0.0);
                prop_assert_eq!(eps.len(), 1);
                prop_assert_eq!(eps[0].len, e.len);
                prop_assert_eq!(&eps[0].samples, &e.samples);
            }
        }

        #[test]
        fn min_len_only_shrinks(mask in prop::collection::vec(any::<bool>(), 0..400)) {
            let r = rec(mask, 256);
            let all = split_clean_episodes(&r, 0.0);
            let filtered = split_clean_episodes(&r, 0.5);
            let total_all: usize = all.iter().map(|e| e.len).sum();
            let total_f: usize = filtered.iter().map(|e| e.len).sum();
            prop_assert!(total_f <= total_all);
            prop_assert!(total_all <= r.validity.valid_count());
            for e in &filtered {
                prop_assert!(e.len >= 128); // 0.5 s at 256 Hz
            }
        }
    }
}
