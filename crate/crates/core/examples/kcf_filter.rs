//! Trains a kernelized correlation filter on a random multi-channel patch and
//! locates cyclically shifted copies of it from the response peak.
//!
//! cargo run --release --example kcf_filter

use cfaps::spectral::{fft2, gaussian_label, response_map, train_filter, FeatureStack};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shifted(a: &Array2<f64>, dy: usize, dx: usize) -> Array2<f64> {
    let (h, w) = a.dim();
    Array2::from_shape_fn((h, w), |(r, c)| a[[(r + h - dy) % h, (c + w - dx) % w]])
}

fn main() -> cfaps::Result<()> {
    let (rows, cols) = (24, 32);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let channels: Vec<Array2<f64>> = (0..4)
        .map(|_| Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0)))
        .collect();
    let x = FeatureStack::new(channels.clone(), 1)?;
    let label = gaussian_label(rows, cols, 2.0);
    let model = train_filter(&x, &fft2(&label), 0.5, 1e-4)?;

    let own = response_map(&model, &x)?;
    println!("training patch: peak {:.3} at {:?}", own.peak_value, own.peak_pos);

    for (dy, dx) in [(0, 3), (5, 0), (7, 11), (20, 29)] {
        let z = FeatureStack::new(channels.iter().map(|c| shifted(c, dy, dx)).collect(), 1)?;
        let r = response_map(&model, &z)?;
        let (sy, sx) = r.displacement();
        println!(
            "shift ({dy:>2},{dx:>2}): peak {:.3} at {:?}, signed displacement ({sy:+.1},{sx:+.1})",
            r.peak_value, r.peak_pos
        );
    }
    Ok(())
}
