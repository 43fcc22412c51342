//! Frames, videos and the intensity/log-intensity conversions.
//!
//! Every plane is an `m x n` matrix of `f64`. 8-bit samples exist only at the
//! ingestion and emission boundaries; all internal arithmetic is double
//! precision. Each [`Frame`] carries a [`Domain`] tag so pipeline stages can
//! reject inputs from the wrong stage instead of silently producing garbage.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Nominal peak of 8-bit-origin content; reconstructions are clamped to
/// `[0, INTENSITY_MAX]` before metrics are computed.
pub const INTENSITY_MAX: f64 = 255.0;

/// What a log-domain frame was converted from, so the inverse conversion can
/// restore the original tag (and clamp only where clamping is meaningful).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogSource {
    Intensity,
    ShiftedCoefficient,
}

/// Which value domain a frame's samples live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Non-negative light intensities.
    Intensity,
    /// Natural log of (value + epsilon); remembers what it was taken of.
    LogIntensity { source: LogSource },
    /// Real transform coefficients, any sign.
    Coefficient,
    /// Transform coefficients raised by a per-video positive constant.
    ShiftedCoefficient,
}

impl Domain {
    pub fn is_log(self) -> bool {
        matches!(self, Domain::LogIntensity { .. })
    }
}

/// Offset added before taking logs so that zero intensity stays finite
/// (`ln(0 + epsilon)`); 1.0 keeps `L = 0` at black on the 0-255 scale.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogPolicy {
    pub epsilon: f64,
}

impl LogPolicy {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Domain(format!("log epsilon must be > 0, got {epsilon}")));
        }
        Ok(LogPolicy { epsilon })
    }
}

impl Default for LogPolicy {
    fn default() -> Self {
        LogPolicy { epsilon: 1.0 }
    }
}

/// One video frame or coefficient plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    data: Array2<f64>,
    domain: Domain,
}

impl Frame {
    /// Wraps a matrix with a domain tag. Intensity frames must be
    /// element-wise non-negative (NaN is rejected as well).
    pub fn new(data: Array2<f64>, domain: Domain) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Dimension("frame must be at least 1x1".into()));
        }
        if domain == Domain::Intensity {
            if let Some(v) = data.iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::Domain(format!("intensity frame contains {v}")));
            }
        }
        Ok(Frame { data, domain })
    }

    /// Intensity frame from row-major 8-bit samples.
    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} samples for {rows}x{cols}, got {}",
                rows * cols,
                bytes.len()
            )));
        }
        let data = Array2::from_shape_vec((rows, cols), bytes.iter().map(|&b| f64::from(b)).collect())
            .expect("shape checked above");
        Frame::new(data, Domain::Intensity)
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Rows (image height).
    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    /// Columns (image width).
    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub(crate) fn with_domain(data: Array2<f64>, domain: Domain) -> Self {
        Frame { data, domain }
    }

    /// Replaces each `factor x factor` block by its arithmetic mean. The
    /// factor must divide both dimensions exactly; no padding is performed.
    pub fn block_downsample(&self, factor: usize) -> Result<Frame> {
        if factor == 0 {
            return Err(Error::Dimension("downsample factor must be >= 1".into()));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let (m, n) = (self.height(), self.width());
        if m % factor != 0 || n % factor != 0 {
            return Err(Error::Dimension(format!(
                "factor {factor} does not divide {n}x{m} frame"
            )));
        }
        let (mo, no) = (m / factor, n / factor);
        let norm = 1.0 / (factor * factor) as f64;
        let mut out = Array2::zeros((mo, no));
        for bi in 0..mo {
            for bj in 0..no {
                let mut acc = 0.0;
                for i in bi * factor..(bi + 1) * factor {
                    for j in bj * factor..(bj + 1) * factor {
                        acc += self.data[(i, j)];
                    }
                }
                out[(bi, bj)] = acc * norm;
            }
        }
        Ok(Frame { data: out, domain: self.domain })
    }

    /// Element-wise `ln(value + epsilon)`. Accepts intensity and shifted
    /// coefficient frames; the source tag is recorded for the inverse.
    pub fn to_log_intensity(&self, policy: LogPolicy) -> Result<Frame> {
        let source = match self.domain {
            Domain::Intensity => LogSource::Intensity,
            Domain::ShiftedCoefficient => LogSource::ShiftedCoefficient,
            other => {
                return Err(Error::Domain(format!("cannot take log of {other:?} frame")));
            }
        };
        if let Some(v) = self.data.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("log of negative value {v}")));
        }
        let data = self.data.mapv(|v| (v + policy.epsilon).ln());
        Ok(Frame { data, domain: Domain::LogIntensity { source } })
    }

    /// Element-wise `exp(value) - epsilon`, restoring the recorded source
    /// tag. Intensity output is clamped at 0 (the forward map never produces
    /// values below `ln(epsilon)`, but lossy reconstruction can undershoot);
    /// coefficient output is left untouched.
    pub fn from_log_intensity(&self, policy: LogPolicy) -> Result<Frame> {
        let source = match self.domain {
            Domain::LogIntensity { source } => source,
            other => {
                return Err(Error::Domain(format!("cannot exponentiate {other:?} frame")));
            }
        };
        let data = match source {
            LogSource::Intensity => self.data.mapv(|v| (v.exp() - policy.epsilon).max(0.0)),
            LogSource::ShiftedCoefficient => self.data.mapv(|v| v.exp() - policy.epsilon),
        };
        let domain = match source {
            LogSource::Intensity => Domain::Intensity,
            LogSource::ShiftedCoefficient => Domain::ShiftedCoefficient,
        };
        Ok(Frame { data, domain })
    }

    /// Element-wise clamp to `[lo, hi]`, keeping the domain tag.
    pub fn clamp(&self, lo: f64, hi: f64) -> Frame {
        Frame {
            data: self.data.mapv(|v| v.clamp(lo, hi)),
            domain: self.domain,
        }
    }
}

/// Dimensions, length, frame rate and provenance of a video.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VideoMeta {
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub fps_num: u32,
    pub fps_den: u32,
    pub source_id: String,
}

impl VideoMeta {
    pub fn new(
        width: usize,
        height: usize,
        frame_count: usize,
        fps_num: u32,
        fps_den: u32,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("video dimensions {width}x{height}")));
        }
        if frame_count == 0 {
            return Err(Error::Dimension("video must contain at least one frame".into()));
        }
        if fps_den == 0 {
            return Err(Error::Dimension("fps denominator must be >= 1".into()));
        }
        Ok(VideoMeta {
            width,
            height,
            frame_count,
            fps_num,
            fps_den,
            source_id: source_id.into(),
        })
    }

    /// Total pixel-frames `m * n * S`, the denominator of the sampling rate.
    pub fn pixel_frames(&self) -> u64 {
        (self.width as u64) * (self.height as u64) * (self.frame_count as u64)
    }
}

/// An ordered frame sequence with shared dimensions and a uniform domain.
///
/// Construction accepts a single frame (a decoded still); the event
/// simulator itself requires at least two frames since events only exist
/// across transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Video {
    meta: VideoMeta,
    frames: Vec<Frame>,
}

impl Video {
    pub fn new(meta: VideoMeta, frames: Vec<Frame>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::Dimension("video must contain at least one frame".into()));
        }
        if frames.len() != meta.frame_count {
            return Err(Error::Dimension(format!(
                "metadata says {} frames, got {}",
                meta.frame_count,
                frames.len()
            )));
        }
        let domain = frames[0].domain();
        for (s, f) in frames.iter().enumerate() {
            if f.width() != meta.width || f.height() != meta.height {
                return Err(Error::Dimension(format!(
                    "frame {s} is {}x{}, expected {}x{}",
                    f.width(),
                    f.height(),
                    meta.width,
                    meta.height
                )));
            }
            if f.domain() != domain {
                return Err(Error::Domain(format!(
                    "frame {s} domain {:?} differs from {:?}",
                    f.domain(),
                    domain
                )));
            }
        }
        Ok(Video { meta, frames })
    }

    /// Builds metadata from the frames themselves.
    pub fn from_frames(
        frames: Vec<Frame>,
        fps_num: u32,
        fps_den: u32,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Dimension("video must contain at least one frame".into()))?;
        let meta = VideoMeta::new(
            first.width(),
            first.height(),
            frames.len(),
            fps_num,
            fps_den,
            source_id,
        )?;
        Video::new(meta, frames)
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, s: usize) -> &Frame {
        &self.frames[s]
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.frames[0].domain()
    }

    /// Applies a fallible per-frame transform, preserving order and metadata.
    pub fn try_map_frames<F>(&self, mut f: F) -> Result<Video>
    where
        F: FnMut(&Frame) -> Result<Frame>,
    {
        let frames = self.frames.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let first = &frames[0];
        let meta = VideoMeta {
            width: first.width(),
            height: first.height(),
            ..self.meta.clone()
        };
        Video::new(meta, frames)
    }

    /// Block-averages every frame by `factor`.
    pub fn block_downsample(&self, factor: usize) -> Result<Video> {
        self.try_map_frames(|f| f.block_downsample(factor))
    }

    /// Keeps the top-left `height x width` region of every frame, for inputs
    /// whose dimensions a requested downsample factor does not divide.
    pub fn crop(&self, width: usize, height: usize) -> Result<Video> {
        if width == 0 || height == 0 || width > self.meta.width || height > self.meta.height {
            return Err(Error::Dimension(format!(
                "cannot crop {}x{} to {width}x{height}",
                self.meta.width, self.meta.height
            )));
        }
        self.try_map_frames(|f| {
            Ok(Frame::with_domain(
                f.data().slice(ndarray::s![..height, ..width]).to_owned(),
                f.domain(),
            ))
        })
    }

    pub fn to_log_intensity(&self, policy: LogPolicy) -> Result<Video> {
        self.try_map_frames(|f| f.to_log_intensity(policy))
    }

    pub fn from_log_intensity(&self, policy: LogPolicy) -> Result<Video> {
        self.try_map_frames(|f| f.from_log_intensity(policy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn intensity(data: Array2<f64>) -> Frame {
        Frame::new(data, Domain::Intensity).unwrap()
    }

    #[test]
    fn rejects_negative_intensity() {
        let err = Frame::new(array![[1.0, -0.5]], Domain::Intensity).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn rejects_nan_intensity() {
        assert!(Frame::new(array![[f64::NAN]], Domain::Intensity).is_err());
    }

    #[test]
    fn downsample_2x2_mean() {
        let f = intensity(array![[0.0, 64.0], [128.0, 64.0]]);
        let d = f.block_downsample(2).unwrap();
        assert_eq!(d.data(), &array![[64.0]]);
        assert_eq!(d.domain(), Domain::Intensity);
    }

    #[test]
    fn downsample_factor_one_is_identity() {
        let f = intensity(array![[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(f.block_downsample(1).unwrap(), f);
    }

    #[test]
    fn downsample_constant_stays_constant() {
        let f = intensity(Array2::from_elem((4, 8), 37.5));
        let d = f.block_downsample(4).unwrap();
        assert!(d.data().iter().all(|&v| (v - 37.5).abs() < 1e-12));
        assert_eq!((d.height(), d.width()), (1, 2));
    }

    #[test]
    fn downsample_rejects_non_divisor() {
        let f = intensity(Array2::zeros((4, 6)));
        assert!(matches!(f.block_downsample(4), Err(Error::Dimension(_))));
    }

    #[test]
    fn downsample_conserves_total_brightness() {
        let f = intensity(array![
            [1.0, 2.0, 3.0, 4.0],
            [5.0, 6.0, 7.0, 8.0],
            [9.0, 10.0, 11.0, 12.0],
            [13.0, 14.0, 15.0, 16.0]
        ]);
        let d = f.block_downsample(2).unwrap();
        let total: f64 = f.data().sum();
        let scaled: f64 = d.data().sum() * 4.0;
        assert!((total - scaled).abs() <= 1e-9 * total.abs());
    }

    #[test]
    fn log_of_zero_with_unit_epsilon_is_zero() {
        let f = intensity(array![[0.0]]);
        let l = f.to_log_intensity(LogPolicy::default()).unwrap();
        assert_eq!(l.data()[(0, 0)], 0.0);
        assert_eq!(l.domain(), Domain::LogIntensity { source: LogSource::Intensity });
    }

    #[test]
    fn log_of_e_minus_one_is_one() {
        let f = intensity(array![[std::f64::consts::E - 1.0]]);
        let l = f.to_log_intensity(LogPolicy::default()).unwrap();
        assert!((l.data()[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_round_trip_restores_tag_and_values() {
        let f = intensity(array![[0.0, 12.5], [254.9, 7.0]]);
        let back = f
            .to_log_intensity(LogPolicy::default())
            .unwrap()
            .from_log_intensity(LogPolicy::default())
            .unwrap();
        assert_eq!(back.domain(), Domain::Intensity);
        for (a, b) in f.data().iter().zip(back.data().iter()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn log_rejects_coefficient_frames() {
        let f = Frame::new(array![[-1.0, 1.0]], Domain::Coefficient).unwrap();
        assert!(f.to_log_intensity(LogPolicy::default()).is_err());
    }

    #[test]
    fn from_log_rejects_non_log_frames() {
        let f = intensity(array![[1.0]]);
        assert!(f.from_log_intensity(LogPolicy::default()).is_err());
    }

    #[test]
    fn video_rejects_mixed_dimensions() {
        let a = intensity(Array2::zeros((2, 2)));
        let b = intensity(Array2::zeros((2, 3)));
        assert!(Video::from_frames(vec![a, b], 30, 1, "t").is_err());
    }

    #[test]
    fn video_rejects_empty() {
        assert!(Video::from_frames(vec![], 30, 1, "t").is_err());
    }

    #[test]
    fn crop_takes_top_left() {
        let f = intensity(array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        let v = Video::from_frames(vec![f.clone(), f], 30, 1, "t").unwrap();
        let c = v.crop(2, 1).unwrap();
        assert_eq!(c.frame(0).data(), &array![[1.0, 2.0]]);
        assert_eq!(c.meta().width, 2);
        assert_eq!(c.meta().height, 1);
    }
}
