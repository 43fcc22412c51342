//! Emulation of the optical cosine transform: orthonormal 2D DCT-II, its
//! inverse, and the positive constant shift used for binary phase recovery.
//!
//! The transform is computed as two separable matrix products against
//! precomputed cosine bases, `C_m * X * C_n^T`. Correctness is pinned by the
//! literal double-sum oracle in the test suite, not by this factorization.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::frame::{Domain, Frame, Video};

/// Orthonormal DCT-II basis for one dimension: `B[q][i] = a_q cos(pi (2i+1) q / 2n)`
/// with `a_0 = sqrt(1/n)` and `a_q = sqrt(2/n)` for `q > 0`. Rows are orthonormal.
fn basis(n: usize) -> Array2<f64> {
    let mut b = Array2::zeros((n, n));
    let a0 = (1.0 / n as f64).sqrt();
    let aq = (2.0 / n as f64).sqrt();
    for q in 0..n {
        let scale = if q == 0 { a0 } else { aq };
        for i in 0..n {
            let angle = std::f64::consts::PI * (2 * i + 1) as f64 * q as f64 / (2 * n) as f64;
            b[(q, i)] = scale * angle.cos();
        }
    }
    b
}

/// Reusable transform plan for frames of a fixed size. Building the cosine
/// bases is O(m^2 + n^2); reuse the plan when transforming a whole video.
#[derive(Debug, Clone)]
pub struct Dct2d {
    rows: usize,
    cols: usize,
    row_basis: Array2<f64>,
    col_basis: Array2<f64>,
}

impl Dct2d {
    pub fn new(rows: usize, cols: usize) -> Self {
        Dct2d { rows, cols, row_basis: basis(rows), col_basis: basis(cols) }
    }

    fn check_shape(&self, frame: &Frame) -> Result<()> {
        if frame.height() != self.rows || frame.width() != self.cols {
            return Err(Error::Dimension(format!(
                "plan is for {}x{}, frame is {}x{}",
                self.cols,
                self.rows,
                frame.width(),
                frame.height()
            )));
        }
        Ok(())
    }

    /// Forward transform; output is a coefficient frame.
    pub fn forward(&self, frame: &Frame) -> Result<Frame> {
        self.check_shape(frame)?;
        let coeffs = self.row_basis.dot(frame.data()).dot(&self.col_basis.t());
        Ok(Frame::with_domain(coeffs, Domain::Coefficient))
    }

    /// Inverse transform; expects a coefficient frame.
    pub fn inverse(&self, frame: &Frame) -> Result<Frame> {
        self.check_shape(frame)?;
        if frame.domain() != Domain::Coefficient {
            return Err(Error::Domain(format!(
                "inverse transform expects coefficients, got {:?}",
                frame.domain()
            )));
        }
        let data = self.row_basis.t().dot(frame.data()).dot(&self.col_basis);
        Ok(Frame::with_domain(data, Domain::Coefficient))
    }
}

/// Orthonormal 2D DCT-II of a frame.
pub fn dct2(frame: &Frame) -> Frame {
    Dct2d::new(frame.height(), frame.width())
        .forward(frame)
        .expect("plan built from the frame's own shape")
}

/// Exact inverse of [`dct2`].
pub fn idct2(frame: &Frame) -> Result<Frame> {
    Dct2d::new(frame.height(), frame.width()).inverse(frame)
}

/// The emulated reference-wave amplitude: a per-video non-negative constant
/// added to every coefficient so the event camera sees a positive plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShiftConstant {
    value: f64,
}

impl ShiftConstant {
    pub fn zero() -> Self {
        ShiftConstant { value: 0.0 }
    }

    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0) {
            return Err(Error::Domain(format!("shift constant must be >= 0, got {value}")));
        }
        Ok(ShiftConstant { value })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Default floor for the minimum value of shifted coefficients. A floor of 1
/// keeps the log of every shifted coefficient non-negative and bounds the log
/// slope near the minimum.
pub const SHIFT_FLOOR_DEFAULT: f64 = 1.0;

/// Smallest non-negative constant that raises every coefficient of every
/// frame to at least `floor`: `max(0, floor - global_min)`.
pub fn compute_shift(coeff_video: &Video, floor: f64) -> Result<ShiftConstant> {
    if coeff_video.domain() != Domain::Coefficient {
        return Err(Error::Domain(format!(
            "shift is computed over coefficient frames, got {:?}",
            coeff_video.domain()
        )));
    }
    let global_min = coeff_video
        .frames()
        .iter()
        .flat_map(|f| f.data().iter().copied())
        .fold(f64::INFINITY, f64::min);
    if !global_min.is_finite() {
        return Err(Error::Domain("coefficient video contains non-finite values".into()));
    }
    ShiftConstant::new((floor - global_min).max(0.0))
}

/// Adds the shift constant element-wise; coefficient -> shifted coefficient.
pub fn shift(frame: &Frame, c: ShiftConstant) -> Result<Frame> {
    if frame.domain() != Domain::Coefficient {
        return Err(Error::Domain(format!("cannot shift a {:?} frame", frame.domain())));
    }
    Ok(Frame::with_domain(
        frame.data().mapv(|v| v + c.value),
        Domain::ShiftedCoefficient,
    ))
}

/// Subtracts the shift constant element-wise; shifted coefficient -> coefficient.
pub fn unshift(frame: &Frame, c: ShiftConstant) -> Result<Frame> {
    if frame.domain() != Domain::ShiftedCoefficient {
        return Err(Error::Domain(format!("cannot unshift a {:?} frame", frame.domain())));
    }
    Ok(Frame::with_domain(
        frame.data().mapv(|v| v - c.value),
        Domain::Coefficient,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn constant_image_has_only_dc() {
        let f = Frame::new(Array2::from_elem((2, 2), 1.0), Domain::Intensity).unwrap();
        let c = dct2(&f);
        assert!((c.data()[(0, 0)] - 2.0).abs() < 1e-12);
        for (idx, v) in c.data().indexed_iter() {
            if idx != (0, 0) {
                assert!(v.abs() < 1e-12, "nonzero AC term at {idx:?}");
            }
        }
    }

    #[test]
    fn impulse_expands_to_quarter_cosines() {
        let f = Frame::new(array![[1.0, 0.0], [0.0, 0.0]], Domain::Intensity).unwrap();
        let c = dct2(&f);
        for v in c.data().iter() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dc_inverse_recovers_constant() {
        let c = Frame::new(array![[2.0, 0.0], [0.0, 0.0]], Domain::Coefficient).unwrap();
        let f = idct2(&c).unwrap();
        for v in f.data().iter() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let c = Frame::new(Array2::zeros((3, 5)), Domain::Coefficient).unwrap();
        assert!(idct2(&c).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inverse_rejects_wrong_domain() {
        let f = Frame::new(Array2::zeros((2, 2)), Domain::Intensity).unwrap();
        assert!(idct2(&f).is_err());
    }

    #[test]
    fn shift_examples() {
        let mk = |v: f64| {
            Video::from_frames(
                vec![Frame::new(array![[v, 0.5]], Domain::Coefficient).unwrap()],
                30,
                1,
                "t",
            )
            .unwrap()
        };
        let s = compute_shift(&mk(-3.2), SHIFT_FLOOR_DEFAULT).unwrap();
        assert!((s.value() - 4.2).abs() < 1e-12);

        let positive = Video::from_frames(
            vec![Frame::new(array![[5.0, 6.0]], Domain::Coefficient).unwrap()],
            30,
            1,
            "t",
        )
        .unwrap();
        assert_eq!(compute_shift(&positive, SHIFT_FLOOR_DEFAULT).unwrap().value(), 0.0);

        let zeros = Video::from_frames(
            vec![Frame::new(Array2::zeros((2, 2)), Domain::Coefficient).unwrap()],
            30,
            1,
            "t",
        )
        .unwrap();
        assert_eq!(compute_shift(&zeros, SHIFT_FLOOR_DEFAULT).unwrap().value(), 1.0);
    }

    #[test]
    fn shift_unshift_round_trip() {
        let f = Frame::new(array![[-3.2, 0.0], [7.5, -0.1]], Domain::Coefficient).unwrap();
        let c = ShiftConstant::new(4.2).unwrap();
        let shifted = shift(&f, c).unwrap();
        assert_eq!(shifted.domain(), Domain::ShiftedCoefficient);
        assert!((shifted.data()[(0, 0)] - 1.0).abs() < 1e-12);
        let back = unshift(&shifted, c).unwrap();
        assert_eq!(back.domain(), Domain::Coefficient);
        for (a, b) in f.data().iter().zip(back.data().iter()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_shift_is_identity() {
        let f = Frame::new(array![[1.0, -2.0]], Domain::Coefficient).unwrap();
        let shifted = shift(&f, ShiftConstant::zero()).unwrap();
        assert_eq!(shifted.data(), f.data());
    }
}
