//! Planned 3D and 2D complex FFTs over the row-major `[x][y][z]` layout.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisPlan {
    fn new(planner: &mut FftPlanner<f64>, n: usize) -> Self {
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn get(&self, dir: Direction) -> &Arc<dyn Fft<f64>> {
        match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        }
    }
}

/// FFT plans for one grid. Transforms are unnormalized; callers scale.
pub(crate) struct Plans {
    nx: usize,
    ny: usize,
    nz: usize,
    x: AxisPlan,
    y: AxisPlan,
    z: AxisPlan,
}

impl std::fmt::Debug for Plans {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Plans({}x{}x{})", self.nx, self.ny, self.nz)
    }
}

fn run(plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    plan.process_with_scratch(data, &mut scratch);
}

/// Out-of-place transpose of a `rows x cols` block.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        let row = &src[r * cols..(r + 1) * cols];
        for (c, v) in row.iter().enumerate() {
            dst[c * rows + r] = *v;
        }
    }
}

impl Plans {
    pub(crate) fn new(nx: usize, ny: usize, nz: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            nz,
            x: AxisPlan::new(&mut planner, nx),
            y: AxisPlan::new(&mut planner, ny),
            z: AxisPlan::new(&mut planner, nz),
        }
    }

    /// In-place 3D transform.
    pub(crate) fn process3(&self, data: &mut [Complex64], dir: Direction) {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        debug_assert_eq!(data.len(), nx * ny * nz);
        // z lines are contiguous
        run(self.z.get(dir), data);

        let mut tmp = vec![Complex64::default(); ny * nz];
        let yplan = self.y.get(dir);
        for slab in data.chunks_exact_mut(ny * nz) {
            transpose(slab, &mut tmp, ny, nz);
            run(yplan, &mut tmp);
            transpose(&tmp, slab, nz, ny);
        }

        let mut tmp = vec![Complex64::default(); data.len()];
        transpose(data, &mut tmp, nx, ny * nz);
        run(self.x.get(dir), &mut tmp);
        transpose(&tmp, data, ny * nz, nx);
    }

    /// In-place 2D transform of an `[x][y]` plane.
    pub(crate) fn process2(&self, data: &mut [Complex64], dir: Direction) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(data.len(), nx * ny);
        run(self.y.get(dir), data);
        let mut tmp = vec![Complex64::default(); data.len()];
        transpose(data, &mut tmp, nx, ny);
        run(self.x.get(dir), &mut tmp);
        transpose(&tmp, data, ny, nx);
    }
}
