//! Scalar abstraction shared by the field calculus.

use std::collections::HashMap;
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// In-place complex FFT of a fixed length.
pub trait ComplexFft<T>: Send + Sync {
    fn len(&self) -> usize;
    fn forward(&self, buffer: &mut [Complex<T>]);
    /// Scratch length needed by [`ComplexFft::forward_with_scratch`].
    fn scratch_len(&self) -> usize;
    /// Allocation-free variant of [`ComplexFft::forward`].
    fn forward_with_scratch(&self, buffer: &mut [Complex<T>], scratch: &mut [Complex<T>]);
}

struct Planned<T: rustfft::FftNum>(Arc<dyn Fft<T>>);

impl<T: rustfft::FftNum> ComplexFft<T> for Planned<T> {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn forward(&self, buffer: &mut [Complex<T>]) {
        self.0.process(buffer);
    }
    fn scratch_len(&self) -> usize {
        self.0.get_inplace_scratch_len()
    }
    fn forward_with_scratch(&self, buffer: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        self.0.process_with_scratch(buffer, scratch);
    }
}

/// Floating-point type usable by grid fields (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static + sealed::Sealed
{
    /// Converts an `f64` constant.
    fn lit(x: f64) -> Self;
    /// Widens to `f64`.
    fn widen(self) -> f64;
    /// Forward FFT plan of length `len`, cached per process.
    fn fft_plan(len: usize) -> Arc<dyn ComplexFft<Self>>;
}

type PlanCache<T> = OnceLock<Mutex<(FftPlanner<T>, HashMap<usize, Arc<dyn ComplexFft<T>>>)>>;

fn cached_plan<T: rustfft::FftNum>(cache: &'static PlanCache<T>, len: usize) -> Arc<dyn ComplexFft<T>> {
    let lock = cache.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = lock.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, plans) = &mut *guard;
    plans
        .entry(len)
        .or_insert_with(|| Arc::new(Planned(planner.plan_fft_forward(len))) as Arc<dyn ComplexFft<T>>)
        .clone()
}

static PLANS_F64: PlanCache<f64> = OnceLock::new();
static PLANS_F32: PlanCache<f32> = OnceLock::new();

impl Real for f64 {
    fn lit(x: f64) -> Self {
        x
    }
    fn widen(self) -> f64 {
        self
    }
    fn fft_plan(len: usize) -> Arc<dyn ComplexFft<Self>> {
        cached_plan(&PLANS_F64, len)
    }
}

impl Real for f32 {
    fn lit(x: f64) -> Self {
        x as f32
    }
    fn widen(self) -> f64 {
        self as f64
    }
    fn fft_plan(len: usize) -> Arc<dyn ComplexFft<Self>> {
        cached_plan(&PLANS_F32, len)
    }
}
