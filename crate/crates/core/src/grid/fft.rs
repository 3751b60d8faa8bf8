use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Domain, Grid, SampledField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Space → frequency.
    Forward,
    /// Frequency → space.
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Reusable lane buffer for the strided axes of an n-d transform.
#[derive(Default)]
pub(crate) struct FftScratch {
    lanes: Vec<Complex64>,
}

/// Unnormalized n-d DFT in place (`e^{-i…}` forward, `e^{+i…}` inverse).
pub(crate) fn fft_in_place(data: &mut [Complex64], grid: Grid, inverse: bool, scratch: &mut FftScratch) {
    let g = grid.points();
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(g)
        } else {
            p.plan_fft_forward(g)
        }
    });
    fft.process(data);
    let len = data.len();
    let mut stride = g;
    for _axis in 1..grid.n() {
        let block = stride * g;
        let lanes = &mut scratch.lanes;
        lanes.resize(len, Complex64::default());
        // Gather every lane along this axis into contiguous rows.
        for outer in 0..len / block {
            for inner in 0..stride {
                let row = (outer * stride + inner) * g;
                let base = outer * block + inner;
                for j in 0..g {
                    lanes[row + j] = data[base + j * stride];
                }
            }
        }
        fft.process(lanes);
        for outer in 0..len / block {
            for inner in 0..stride {
                let row = (outer * stride + inner) * g;
                let base = outer * block + inner;
                for j in 0..g {
                    data[base + j * stride] = lanes[row + j];
                }
            }
        }
        stride = block;
    }
}

/// Unitary DFT on the periodic grid.
///
/// Bins are in natural FFT order: bin `b` carries `ξ = 2π/L·b` for
/// `b < G/2` and `2π/L·(b − G)` otherwise. The forward map is
/// `F_b = G^{-n/2} Σ_j f_j e^{-2πi j·b/G}`, with the inverse its adjoint, so
/// the Euclidean norm of the value array is preserved exactly in exact
/// arithmetic.
pub fn spectral_transform(field: &SampledField, direction: Direction) -> Result<SampledField> {
    let (expected, out) = match direction {
        Direction::Forward => (Domain::Space, Domain::Frequency),
        Direction::Inverse => (Domain::Frequency, Domain::Space),
    };
    if field.domain() != expected {
        return Err(Error::DomainMismatch {
            expected,
            found: field.domain(),
        });
    }
    let grid = field.grid();
    let mut data = field.values().to_vec();
    fft_in_place(
        &mut data,
        grid,
        direction == Direction::Inverse,
        &mut FftScratch::default(),
    );
    let scale = (grid.len() as f64).sqrt().recip();
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(SampledField::from_parts_unchecked(grid, data, out))
}
