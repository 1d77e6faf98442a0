//! Hidden-layer feature maps: random additive/RBF nodes and explicit kernels.

use alloc::vec::Vec;
use core::fmt;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{dot, squared_distance, Matrix};

/// Lower bound of the RBF impact-factor range; keeps nodes from going flat.
pub const RBF_IMPACT_MIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeType {
    /// `g(w·x + b)` with the logistic sigmoid.
    Sigmoid,
    /// `exp(-b·‖x − w‖²)` with centre `w` and impact factor `b`.
    Rbf,
}

impl NodeType {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sigmoid => "sig",
            Self::Rbf => "rbf",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "sig" | "sigmoid" => Some(Self::Sigmoid),
            "rbf" => Some(Self::Rbf),
            _ => None,
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Randomly drawn, then frozen, hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    node_type: NodeType,
    /// m×n input weights (sigmoid) or centres (rbf).
    weights: Matrix,
    /// Biases (sigmoid) or impact factors (rbf), one per node.
    biases: Vec<f64>,
}

impl HiddenLayer {
    /// Draws `hidden` nodes for `inputs` features.
    ///
    /// Weights, biases and centres are Uniform(-1, 1); RBF impact factors are
    /// Uniform(0.05, 1).
    pub fn random(node_type: NodeType, hidden: usize, inputs: usize, seed: u64) -> Result<Self> {
        if hidden == 0 || inputs == 0 {
            return Err(Error::InvalidParameter(
                "hidden layer needs at least one node and one input",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = Uniform::new(-1.0, 1.0).expect("valid range");
        let weights = Matrix::from_fn(hidden, inputs, |_, _| sym.sample(&mut rng));
        let biases = match node_type {
            NodeType::Sigmoid => (0..hidden).map(|_| sym.sample(&mut rng)).collect(),
            NodeType::Rbf => {
                let impact = Uniform::new_inclusive(RBF_IMPACT_MIN, 1.0).expect("valid range");
                (0..hidden).map(|_| impact.sample(&mut rng)).collect()
            }
        };
        Ok(Self {
            node_type,
            weights,
            biases,
        })
    }

    /// Assembles a layer from stored parameters.
    pub fn from_parts(node_type: NodeType, weights: Matrix, biases: Vec<f64>) -> Result<Self> {
        if weights.rows() != biases.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.rows(),
                found: biases.len(),
            });
        }
        if weights.rows() == 0 || weights.cols() == 0 {
            return Err(Error::InvalidParameter("empty hidden layer"));
        }
        if node_type == NodeType::Rbf && biases.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::InvalidParameter("rbf impact factors must be positive"));
        }
        Ok(Self {
            node_type,
            weights,
            biases,
        })
    }

    pub fn node_type(&self) -> NodeType {
        self.node_type
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn hidden(&self) -> usize {
        self.weights.rows()
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    /// Output of every node for every row of `x` (N×m).
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                found: x.cols(),
            });
        }
        let h = Matrix::from_fn(x.rows(), self.hidden(), |i, k| {
            let w = self.weights.row(k);
            match self.node_type {
                NodeType::Sigmoid => sigmoid(dot(w, x.row(i)) + self.biases[k]),
                NodeType::Rbf => libm::exp(-self.biases[k] * squared_distance(x.row(i), w)),
            }
        });
        Ok(h)
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-z))
}

/// The "random kernel" `H·Hᵀ`.
pub fn random_kernel_gram(h: &Matrix) -> Matrix {
    h.matmul_t(h).expect("same width")
}

/// Explicit kernel functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `exp(-‖a − b‖² / (2σ²))`
    Rbf { sigma: f64 },
    /// `a·b`
    Linear,
    /// `(a·b + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
    /// `∏ₗ cos(dilation·dₗ / shift) · exp(-dₗ² / width)` with `dₗ = aₗ − bₗ`.
    Wavelet { dilation: f64, shift: f64, width: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Rbf { sigma } => sigma > 0.0 && sigma.is_finite(),
            Self::Linear => true,
            Self::Polynomial { degree, offset } => degree >= 1 && offset >= 0.0,
            Self::Wavelet {
                dilation,
                shift,
                width,
            } => dilation > 0.0 && shift > 0.0 && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("kernel parameter out of range"))
        }
    }

    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Self::Rbf { sigma } => libm::exp(-squared_distance(a, b) / (2.0 * sigma * sigma)),
            Self::Linear => dot(a, b),
            Self::Polynomial { degree, offset } => libm::pow(dot(a, b) + offset, degree as f64),
            Self::Wavelet {
                dilation,
                shift,
                width,
            } => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let d = x - y;
                    libm::cos(dilation * d / shift) * libm::exp(-d * d / width)
                })
                .product(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rbf { .. } => "rbf",
            Self::Linear => "linear",
            Self::Polynomial { .. } => "polynomial",
            Self::Wavelet { .. } => "wavelet",
        }
    }

    /// Parameters in a fixed order; inverse of [`Kernel::from_params`].
    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Rbf { sigma } => alloc::vec![sigma],
            Self::Linear => Vec::new(),
            Self::Polynomial { degree, offset } => alloc::vec![degree as f64, offset],
            Self::Wavelet {
                dilation,
                shift,
                width,
            } => alloc::vec![dilation, shift, width],
        }
    }

    pub fn from_params(name: &str, p: &[f64]) -> Result<Self> {
        let k = match (name, p) {
            ("rbf", [sigma]) => Self::Rbf { sigma: *sigma },
            ("linear", []) => Self::Linear,
            ("polynomial", [degree, offset]) => {
                if libm::trunc(*degree) != *degree || *degree < 1.0 {
                    return Err(Error::InvalidParameter("polynomial degree must be a positive integer"));
                }
                Self::Polynomial {
                    degree: *degree as u32,
                    offset: *offset,
                }
            }
            ("wavelet", [dilation, shift, width]) => Self::Wavelet {
                dilation: *dilation,
                shift: *shift,
                width: *width,
            },
            _ => return Err(Error::InvalidParameter("unknown kernel or wrong parameter count")),
        };
        k.validate()?;
        Ok(k)
    }
}

/// `K[i, j] = k(a_i, b_j)`.
pub fn kernel_gram(kernel: &Kernel, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: b.cols(),
        });
    }
    Ok(Matrix::from_fn(a.rows(), b.rows(), |i, j| {
        kernel.eval(a.row(i), b.row(j))
    }))
}

/// How training samples are mapped into the hidden space.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMap {
    Random(HiddenLayer),
    Kernel(Kernel),
}
