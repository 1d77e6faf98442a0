//! Two-dimensional artificial datasets for boundary inspection.

use core::f64::consts::{FRAC_PI_2, PI};

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::{Dataset, Label};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Radius of the banana backbone arc.
pub const BANANA_RADIUS: f64 = 5.0;
/// Offset applied to the mirrored second lobe.
pub const BANANA_LOBE_OFFSET: (f64, f64) = (-5.0, 2.5);

fn check(count: usize, noise_std: f64) -> Result<Normal<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1"));
    }
    if !(noise_std >= 0.0) {
        return Err(Error::InvalidParameter("noise std must be finite and non-negative"));
    }
    Normal::new(0.0, noise_std).map_err(|_| Error::InvalidParameter("noise std must be finite and non-negative"))
}

/// Points on the arc `5·(cos θ, sin θ)`, θ ~ U[-π/2, π/2], plus isotropic
/// Gaussian noise. Every row is labeled target.
pub fn banana(count: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    let noise = check(count, noise_std)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = Uniform::new_inclusive(-FRAC_PI_2, FRAC_PI_2).expect("valid range");
    let mut x = Matrix::zeros(count, 2);
    for i in 0..count {
        let t = theta.sample(&mut rng);
        x[(i, 0)] = BANANA_RADIUS * libm::cos(t) + noise.sample(&mut rng);
        x[(i, 1)] = BANANA_RADIUS * libm::sin(t) + noise.sample(&mut rng);
    }
    Dataset::new(x, Some(alloc::vec![Label::Target; count]))
}

/// Two interleaved lobes: the target lobe of [`banana`] and its mirror image
/// shifted by [`BANANA_LOBE_OFFSET`], labeled outlier.
pub fn banana_pair(count_per_lobe: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    let first = banana(count_per_lobe, noise_std, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let noise = check(count_per_lobe, noise_std)?;
    let theta = Uniform::new_inclusive(-FRAC_PI_2, FRAC_PI_2).expect("valid range");
    let mut second = Matrix::zeros(count_per_lobe, 2);
    for i in 0..count_per_lobe {
        let t = theta.sample(&mut rng);
        second[(i, 0)] = -BANANA_RADIUS * libm::cos(t) + BANANA_LOBE_OFFSET.0 + noise.sample(&mut rng);
        second[(i, 1)] = BANANA_RADIUS * libm::sin(t) + BANANA_LOBE_OFFSET.1 + noise.sample(&mut rng);
    }
    let x = first.samples().vstack(&second)?;
    let mut labels = alloc::vec![Label::Target; count_per_lobe];
    labels.extend(core::iter::repeat_n(Label::Outlier, count_per_lobe));
    Dataset::new(x, Some(labels))
}

/// Circle of the given radius with radial Gaussian noise. Every row is
/// labeled target.
pub fn ring(count: usize, radius: f64, noise_std: f64, seed: u64) -> Result<Dataset> {
    let noise = check(count, noise_std)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter("radius must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = Uniform::new(0.0, 2.0 * PI).expect("valid range");
    let mut x = Matrix::zeros(count, 2);
    for i in 0..count {
        let t = theta.sample(&mut rng);
        let r = radius + noise.sample(&mut rng);
        x[(i, 0)] = r * libm::cos(t);
        x[(i, 1)] = r * libm::sin(t);
    }
    Dataset::new(x, Some(alloc::vec![Label::Target; count]))
}
