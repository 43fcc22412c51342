//! Idealized event camera simulation on log-intensity video.
//!
//! Per transition `s-1 -> s` the per-pixel signed event count is
//! `E = trunc((L(s) - Lrec(s-1)) / delta)` with rounding toward zero, where
//! `Lrec` is the running decoder-side reconstruction. The reconstruction then
//! advances by `delta * E`. Counts for one pixel within one transition share
//! a polarity under the monotonic-variation assumption, so a signed count per
//! (pixel, transition) carries the same information as individual AER tuples
//! at frame-granularity timestamps.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::frame::{Domain, Frame, LogPolicy, LogSource, Video, VideoMeta};
use crate::transform::ShiftConstant;

/// Symmetric log-intensity contrast threshold.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EventThreshold {
    delta: f64,
}

impl EventThreshold {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Domain(format!("event threshold must be > 0, got {delta}")));
        }
        Ok(EventThreshold { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// One pixel's signed event count within a transition. `count` is never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventEntry {
    pub row: u16,
    pub col: u16,
    pub count: i64,
}

/// All events of one frame transition, sparse, sorted row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EventBatch {
    pub transition: u32,
    pub entries: Vec<EventEntry>,
}

impl EventBatch {
    /// Validates the batch invariants: nonzero counts and strictly
    /// increasing row-major pixel order (which also rules out duplicates).
    pub fn new(transition: u32, entries: Vec<EventEntry>) -> Result<Self> {
        if transition == 0 {
            return Err(Error::Domain("transition indices start at 1".into()));
        }
        let mut prev: Option<(u16, u16)> = None;
        for e in &entries {
            if e.count == 0 {
                return Err(Error::Domain(format!(
                    "zero event count stored at ({}, {})",
                    e.row, e.col
                )));
            }
            let key = (e.row, e.col);
            if let Some(p) = prev {
                if key <= p {
                    return Err(Error::Domain(format!(
                        "batch entries out of order or duplicated at ({}, {})",
                        e.row, e.col
                    )));
                }
            }
            prev = Some(key);
        }
        Ok(EventBatch { transition, entries })
    }

    /// Sum of absolute counts in this batch.
    pub fn event_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count.unsigned_abs()).sum()
    }
}

/// Everything the decoder needs: header side information, the initial
/// log plane, and the per-transition sparse event counts.
///
/// `shift` is zero for streams recorded off the scene directly and the
/// phase-recovery constant for transform-domain streams; `epsilon` is the
/// log offset both ends must agree on.
#[derive(Debug, Clone, PartialEq)]
pub struct AerStream {
    pub meta: VideoMeta,
    pub delta: EventThreshold,
    pub shift: ShiftConstant,
    pub epsilon: f64,
    pub initial_plane: Array2<f64>,
    pub batches: Vec<EventBatch>,
}

impl AerStream {
    pub fn new(
        meta: VideoMeta,
        delta: EventThreshold,
        shift: ShiftConstant,
        epsilon: f64,
        initial_plane: Array2<f64>,
        batches: Vec<EventBatch>,
    ) -> Result<Self> {
        if meta.width > u16::MAX as usize || meta.height > u16::MAX as usize {
            return Err(Error::Dimension(format!(
                "{}x{} exceeds the event stream's 16-bit address space",
                meta.width, meta.height
            )));
        }
        if initial_plane.nrows() != meta.height || initial_plane.ncols() != meta.width {
            return Err(Error::Dimension(format!(
                "initial plane is {}x{}, metadata says {}x{}",
                initial_plane.ncols(),
                initial_plane.nrows(),
                meta.width,
                meta.height
            )));
        }
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("stream epsilon must be > 0, got {epsilon}")));
        }
        let mut prev = 0u32;
        for b in &batches {
            if b.transition <= prev {
                return Err(Error::Domain(format!(
                    "batch transitions must be strictly increasing (saw {} after {})",
                    b.transition, prev
                )));
            }
            if b.transition as usize >= meta.frame_count {
                return Err(Error::Domain(format!(
                    "transition {} out of range for {} frames",
                    b.transition, meta.frame_count
                )));
            }
            for e in &b.entries {
                if (e.row as usize) >= meta.height || (e.col as usize) >= meta.width {
                    return Err(Error::Domain(format!(
                        "event at ({}, {}) outside {}x{} plane",
                        e.row, e.col, meta.width, meta.height
                    )));
                }
            }
            prev = b.transition;
        }
        Ok(AerStream { meta, delta, shift, epsilon, initial_plane, batches })
    }

    /// What the reconstructed frames were logs of, inferred from the header:
    /// a nonzero shift marks a transform-domain stream. A transform-domain
    /// recording whose coefficients never needed shifting is indistinguishable
    /// in the wire header; decode it through the transform-domain path
    /// explicitly in that case.
    pub fn log_source(&self) -> LogSource {
        if self.shift.value() > 0.0 {
            LogSource::ShiftedCoefficient
        } else {
            LogSource::Intensity
        }
    }

    pub fn log_policy(&self) -> LogPolicy {
        LogPolicy { epsilon: self.epsilon }
    }
}

fn check_log_domain(video: &Video) -> Result<()> {
    if !video.domain().is_log() {
        return Err(Error::Domain(format!(
            "event simulation runs on log-intensity video, got {:?}",
            video.domain()
        )));
    }
    Ok(())
}

/// Signed event counts for one transition: `trunc((current - recon_prev) / delta)`
/// element-wise, rounding toward zero.
pub fn event_function(
    current: &Frame,
    recon_prev: &Array2<f64>,
    delta: EventThreshold,
) -> Result<Array2<i64>> {
    if current.data().dim() != recon_prev.dim() {
        return Err(Error::Dimension(format!(
            "frame is {:?}, reconstruction is {:?}",
            current.data().dim(),
            recon_prev.dim()
        )));
    }
    let d = delta.delta();
    let mut out = Array2::zeros(current.data().dim());
    ndarray::Zip::from(&mut out)
        .and(current.data())
        .and(recon_prev)
        .for_each(|e, &l, &r| *e = ((l - r) / d).trunc() as i64);
    Ok(out)
}

/// Runs the event camera over a log-intensity video.
///
/// `initial` must be the video's first frame (the decoder is assumed to know
/// it). `shift` and `policy` are carried into the stream header as side
/// information; they do not affect event generation.
pub fn simulate(
    log_video: &Video,
    delta: EventThreshold,
    initial: &Frame,
    shift: ShiftConstant,
    policy: LogPolicy,
) -> Result<AerStream> {
    check_log_domain(log_video)?;
    if log_video.len() < 2 {
        return Err(Error::Dimension(
            "event simulation needs at least two frames".into(),
        ));
    }
    if initial != log_video.frame(0) {
        return Err(Error::Domain(
            "initial plane must equal the first log frame".into(),
        ));
    }

    let meta = log_video.meta().clone();
    let initial_plane = initial.data().clone();
    let mut recon = initial_plane.clone();
    let d = delta.delta();
    let mut batches = Vec::new();

    for s in 1..log_video.len() {
        let current = log_video.frame(s).data();
        let mut entries = Vec::new();
        // Row-major walk keeps batches canonical and matches the decoder's
        // update order exactly.
        for ((i, j), &l) in current.indexed_iter() {
            let r = recon[(i, j)];
            let e = ((l - r) / d).trunc();
            if e != 0.0 {
                let count = e as i64;
                entries.push(EventEntry { row: i as u16, col: j as u16, count });
                recon[(i, j)] = r + d * (count as f64);
            }
        }
        if !entries.is_empty() {
            batches.push(EventBatch::new(s as u32, entries)?);
        }
    }

    AerStream::new(meta, delta, shift, policy.epsilon, initial_plane, batches)
}

/// Decoder-side event integration: replays the stream into the full
/// sequence of reconstructed log frames, bit-identical to the encoder's
/// internal reconstruction.
pub fn integrate(stream: &AerStream) -> Result<Video> {
    let source = stream.log_source();
    integrate_as(stream, source)
}

/// [`integrate`] with an explicit log-source tag, for callers that know
/// which pipeline produced the stream.
pub fn integrate_as(stream: &AerStream, source: LogSource) -> Result<Video> {
    let s_total = stream.meta.frame_count;
    let d = stream.delta.delta();
    let domain = Domain::LogIntensity { source };

    let mut recon = stream.initial_plane.clone();
    let mut frames = Vec::with_capacity(s_total);
    frames.push(Frame::with_domain(recon.clone(), domain));

    let mut batch_iter = stream.batches.iter().peekable();
    for s in 1..s_total {
        if let Some(batch) = batch_iter.peek() {
            if (batch.transition as usize) < s {
                return Err(Error::corrupt(0, format!("batch index {} out of order", batch.transition)));
            }
            if batch.transition as usize == s {
                for e in &batch.entries {
                    let cell = recon
                        .get_mut((e.row as usize, e.col as usize))
                        .ok_or_else(|| Error::corrupt(0, format!("event outside plane at ({}, {})", e.row, e.col)))?;
                    *cell += d * (e.count as f64);
                }
                batch_iter.next();
            }
        }
        frames.push(Frame::with_domain(recon.clone(), domain));
    }
    if batch_iter.next().is_some() {
        return Err(Error::corrupt(0, "batch index beyond final transition".into()));
    }

    Video::new(stream.meta.clone(), frames)
}

/// Total number of events in the stream: the sum of absolute counts.
pub fn count_events(stream: &AerStream) -> u64 {
    stream.batches.iter().map(EventBatch::event_count).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn log_frame(values: Array2<f64>) -> Frame {
        Frame::with_domain(values, Domain::LogIntensity { source: LogSource::Intensity })
    }

    fn log_video(tracks: &[f64]) -> Video {
        let frames = tracks
            .iter()
            .map(|&v| log_frame(array![[v]]))
            .collect::<Vec<_>>();
        Video::from_frames(frames, 30, 1, "scalar").unwrap()
    }

    fn delta(d: f64) -> EventThreshold {
        EventThreshold::new(d).unwrap()
    }

    #[test]
    fn event_function_truncates_toward_zero() {
        let cur = log_frame(array![[0.35, 0.05]]);
        let prev = array![[0.0, 0.30]];
        let e = event_function(&cur, &prev, delta(0.1)).unwrap();
        assert_eq!(e, array![[3, -2]]);
    }

    #[test]
    fn event_function_zero_on_equal_frames() {
        let cur = log_frame(array![[1.0, 2.0]]);
        let prev = array![[1.0, 2.0]];
        let e = event_function(&cur, &prev, delta(0.1)).unwrap();
        assert!(e.iter().all(|&v| v == 0));
    }

    #[test]
    fn event_function_rejects_shape_mismatch() {
        let cur = log_frame(array![[1.0]]);
        let prev = array![[1.0, 2.0]];
        assert!(event_function(&cur, &prev, delta(0.1)).is_err());
    }

    #[test]
    fn one_pixel_walkthrough() {
        // Hand-stepped: 0 -> 0.35 gives +3 (recon 0.3); 0.3 -> 0.05 gives -2 (recon 0.1).
        let v = log_video(&[0.0, 0.35, 0.05]);
        let stream = simulate(&v, delta(0.1), v.frame(0), ShiftConstant::zero(), LogPolicy::default()).unwrap();
        assert_eq!(stream.batches.len(), 2);
        assert_eq!(stream.batches[0].transition, 1);
        assert_eq!(stream.batches[0].entries, vec![EventEntry { row: 0, col: 0, count: 3 }]);
        assert_eq!(stream.batches[1].transition, 2);
        assert_eq!(stream.batches[1].entries, vec![EventEntry { row: 0, col: 0, count: -2 }]);
        assert_eq!(count_events(&stream), 5);

        let recon = integrate(&stream).unwrap();
        let track: Vec<f64> = recon.frames().iter().map(|f| f.data()[(0, 0)]).collect();
        assert!((track[0] - 0.0).abs() < 1e-15);
        assert!((track[1] - 0.3).abs() < 1e-12);
        assert!((track[2] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn constant_video_emits_nothing() {
        let v = log_video(&[0.7, 0.7, 0.7, 0.7]);
        let stream = simulate(&v, delta(0.01), v.frame(0), ShiftConstant::zero(), LogPolicy::default()).unwrap();
        assert!(stream.batches.is_empty());
        assert_eq!(count_events(&stream), 0);
    }

    #[test]
    fn oversized_threshold_freezes_reconstruction() {
        let v = log_video(&[0.0, 0.4, 0.2]);
        let stream = simulate(&v, delta(10.0), v.frame(0), ShiftConstant::zero(), LogPolicy::default()).unwrap();
        assert_eq!(count_events(&stream), 0);
        let recon = integrate(&stream).unwrap();
        for f in recon.frames() {
            assert_eq!(f.data()[(0, 0)], 0.0);
        }
    }

    #[test]
    fn integrate_empty_batches_repeats_initial() {
        let meta = VideoMeta::new(2, 1, 3, 30, 1, "t").unwrap();
        let stream = AerStream::new(
            meta,
            delta(0.5),
            ShiftConstant::zero(),
            1.0,
            array![[1.5, 2.5]],
            vec![],
        )
        .unwrap();
        let v = integrate(&stream).unwrap();
        assert_eq!(v.len(), 3);
        for f in v.frames() {
            assert_eq!(f.data(), &array![[1.5, 2.5]]);
        }
    }

    #[test]
    fn integrate_single_negative_event() {
        let meta = VideoMeta::new(1, 1, 2, 30, 1, "t").unwrap();
        let batch = EventBatch::new(1, vec![EventEntry { row: 0, col: 0, count: -1 }]).unwrap();
        let stream = AerStream::new(
            meta,
            delta(0.5),
            ShiftConstant::zero(),
            1.0,
            array![[2.0]],
            vec![batch],
        )
        .unwrap();
        let v = integrate(&stream).unwrap();
        assert_eq!(v.frame(0).data()[(0, 0)], 2.0);
        assert_eq!(v.frame(1).data()[(0, 0)], 1.5);
    }

    #[test]
    fn stream_rejects_out_of_range_transition() {
        let meta = VideoMeta::new(1, 1, 2, 30, 1, "t").unwrap();
        let batch = EventBatch::new(2, vec![EventEntry { row: 0, col: 0, count: 1 }]).unwrap();
        let err = AerStream::new(
            meta,
            delta(0.5),
            ShiftConstant::zero(),
            1.0,
            array![[0.0]],
            vec![batch],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn count_sums_magnitudes_across_pixels() {
        let meta = VideoMeta::new(2, 1, 3, 30, 1, "t").unwrap();
        let b1 = EventBatch::new(
            1,
            vec![
                EventEntry { row: 0, col: 0, count: 2 },
                EventEntry { row: 0, col: 1, count: -2 },
            ],
        )
        .unwrap();
        let b2 = EventBatch::new(2, vec![EventEntry { row: 0, col: 1, count: 1 }]).unwrap();
        let stream = AerStream::new(
            meta,
            delta(0.5),
            ShiftConstant::zero(),
            1.0,
            array![[0.0, 0.0]],
            vec![b1, b2],
        )
        .unwrap();
        assert_eq!(count_events(&stream), 5);
    }

    #[test]
    fn simulate_requires_matching_initial() {
        let v = log_video(&[0.0, 0.1]);
        let wrong = log_frame(array![[0.5]]);
        assert!(simulate(&v, delta(0.1), &wrong, ShiftConstant::zero(), LogPolicy::default()).is_err());
    }

    #[test]
    fn polarity_matches_sign_of_change() {
        let v = log_video(&[0.0, 1.0, 0.2, 0.9]);
        let stream = simulate(&v, delta(0.3), v.frame(0), ShiftConstant::zero(), LogPolicy::default()).unwrap();
        let mut recon = 0.0f64;
        for b in &stream.batches {
            let l = v.frame(b.transition as usize).data()[(0, 0)];
            for e in &b.entries {
                assert_eq!(e.count.signum() as f64, (l - recon).signum());
                recon += 0.3 * e.count as f64;
            }
        }
    }

    #[test]
    fn shift_invariance_of_event_counts() {
        // Values chosen so no difference sits near a multiple of delta.
        let base = log_video(&[0.1, 0.735, 0.24, 0.55]);
        let shifted = log_video(&[5.1, 5.735, 5.24, 5.55]);
        let a = simulate(&base, delta(0.061), base.frame(0), ShiftConstant::zero(), LogPolicy::default()).unwrap();
        let b = simulate(&shifted, delta(0.061), shifted.frame(0), ShiftConstant::zero(), LogPolicy::default()).unwrap();
        assert_eq!(a.batches, b.batches);
        assert_eq!(count_events(&a), count_events(&b));
    }
}
