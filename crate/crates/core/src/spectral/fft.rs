use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized 3D complex FFT on an `n³` cube, applied axis by axis.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: RefCell<Vec<Complex64>>,
    lines: RefCell<Vec<Complex64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Rc<Fft3>>> = RefCell::new(HashMap::new());
}

impl Fft3 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft3 {
            n,
            forward,
            inverse,
            scratch: RefCell::new(vec![Complex64::new(0.0, 0.0); scratch_len]),
            lines: RefCell::new(vec![Complex64::new(0.0, 0.0); n * n]),
        }
    }

    /// Plan for size `n`, cached per thread.
    pub fn cached(n: usize) -> Rc<Fft3> {
        PLANS.with(|plans| {
            plans
                .borrow_mut()
                .entry(n)
                .or_insert_with(|| Rc::new(Fft3::new(n)))
                .clone()
        })
    }

    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let plan = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let mut scratch = self.scratch.borrow_mut();
        let mut lines = self.lines.borrow_mut();

        // last axis is contiguous
        plan.process_with_scratch(data, &mut scratch);

        // middle axis: one plane per first index
        for a in 0..n {
            let base = a * n * n;
            for c in 0..n {
                for b in 0..n {
                    lines[c * n + b] = data[base + b * n + c];
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            for c in 0..n {
                for b in 0..n {
                    data[base + b * n + c] = lines[c * n + b];
                }
            }
        }

        // first axis
        for b in 0..n {
            for c in 0..n {
                for a in 0..n {
                    lines[c * n + a] = data[(a * n + b) * n + c];
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            for c in 0..n {
                for a in 0..n {
                    data[(a * n + b) * n + c] = lines[c * n + a];
                }
            }
        }
    }
}
