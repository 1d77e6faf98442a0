//! Decision surface sampled on a lattice, for plotting boundaries.

use std::io::Write;

use occelm_core::{Matrix, Model};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub score: f64,
    pub is_target: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("model expects {0} input features, grids need exactly 2")]
    NotTwoDimensional(usize),
    #[error("bounds must satisfy xmin <= xmax and ymin <= ymax")]
    BadBounds,
    #[error("resolution must be at least 1")]
    BadResolution,
    #[error(transparent)]
    Core(#[from] occelm_core::Error),
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Scores a `resolution × resolution` lattice over
/// `[xmin, xmax] × [ymin, ymax]`, endpoints included, x varying fastest.
pub fn boundary_grid(model: &Model, bounds: [f64; 4], resolution: usize) -> Result<Vec<GridPoint>, GridError> {
    if model.input_dim() != 2 {
        return Err(GridError::NotTwoDimensional(model.input_dim()));
    }
    let [xmin, xmax, ymin, ymax] = bounds;
    if !(xmin <= xmax && ymin <= ymax) {
        return Err(GridError::BadBounds);
    }
    if resolution == 0 {
        return Err(GridError::BadResolution);
    }
    let xs = axis(xmin, xmax, resolution);
    let ys = axis(ymin, ymax, resolution);
    let pts = Matrix::from_fn(resolution * resolution, 2, |i, j| {
        if j == 0 {
            xs[i % resolution]
        } else {
            ys[i / resolution]
        }
    });
    let decisions = model.score(&pts)?;
    Ok(pts
        .row_iter()
        .zip(decisions)
        .map(|(p, d)| GridPoint {
            x: p[0],
            y: p[1],
            score: d.score,
            is_target: d.is_target,
        })
        .collect())
}

pub fn write_grid<W: Write>(writer: W, points: &[GridPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "y", "score", "is_target"])?;
    for p in points {
        w.write_record([
            p.x.to_string(),
            p.y.to_string(),
            format!("{:e}", p.score),
            u8::from(p.is_target).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
