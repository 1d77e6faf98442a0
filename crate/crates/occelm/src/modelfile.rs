//! Plain-text model files.
//!
//! Line oriented, `key value…` per line, matrices as a `matrix NAME ROWS COLS`
//! line followed by one line per row. Floats use the shortest representation
//! that parses back to the same bits, so save → load → save is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use occelm_core::featuremap::{FeatureMap, HiddenLayer, Kernel, NodeType};
use occelm_core::linsolve::RlsState;
use occelm_core::{Family, Matrix, Model, OfflineModel, OnlineModel, ThresholdSpec, ZScoreStats};

const MAGIC: &str = "OCCELM v1";

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] occelm_core::Error),
}

fn floats(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v:e}").unwrap();
    }
    out.push('\n');
}

fn matrix(out: &mut String, name: &str, m: &Matrix) {
    writeln!(out, "matrix {name} {} {}", m.rows(), m.cols()).unwrap();
    for row in m.row_iter() {
        floats(out, row);
    }
}

fn header(out: &mut String, kind: &str, family: Family, threshold: &ThresholdSpec, thresh: f64, r: f64, z: &ZScoreStats) {
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "kind {kind}").unwrap();
    writeln!(out, "family {}", family.name()).unwrap();
    write!(out, "threshold {}", threshold.name()).unwrap();
    for p in threshold.params() {
        write!(out, " {p:e}").unwrap();
    }
    out.push('\n');
    writeln!(out, "thresh {thresh:e}").unwrap();
    writeln!(out, "r {r:e}").unwrap();
    out.push_str("zmean ");
    floats(out, &z.mean);
    out.push_str("zstd ");
    floats(out, &z.std);
}

fn layer(out: &mut String, layer: &HiddenLayer) {
    writeln!(out, "node {}", layer.node_type().name()).unwrap();
    matrix(out, "weights", layer.weights());
    out.push_str("biases ");
    floats(out, layer.biases());
}

/// Serializes a trained model.
pub fn to_string(model: &Model) -> String {
    let mut out = String::new();
    match model {
        Model::Offline(m) => {
            header(&mut out, "offline", m.family(), m.threshold(), m.thresh(), m.r(), m.zstats());
            writeln!(out, "c {:e}", m.c()).unwrap();
            match m.feature_map() {
                FeatureMap::Kernel(k) => {
                    write!(out, "map kernel {}", k.name()).unwrap();
                    for p in k.params() {
                        write!(out, " {p:e}").unwrap();
                    }
                    out.push('\n');
                }
                FeatureMap::Random(l) => {
                    out.push_str("map random\n");
                    layer(&mut out, l);
                }
            }
            matrix(&mut out, "basis", m.basis());
            matrix(&mut out, "beta", m.beta());
        }
        Model::Online(m) => {
            let (threshold, thresh) = m
                .threshold()
                .zip(m.thresh())
                .expect("online models are finalized before saving");
            header(&mut out, "online", m.family(), &threshold, thresh, m.r(), m.zstats());
            writeln!(out, "seen {}", m.seen_count()).unwrap();
            layer(&mut out, m.layer());
            matrix(&mut out, "p", m.rls().p());
            matrix(&mut out, "beta", m.beta());
        }
    }
    out
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, msg: impl Into<String>) -> ModelFileError {
        ModelFileError::Format {
            line: self.at,
            msg: msg.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str, ModelFileError> {
        let line = self.lines.get(self.at).copied().ok_or_else(|| self.err("unexpected end of file"))?;
        self.at += 1;
        Ok(line)
    }

    /// Values following `key` on the next line.
    fn key(&mut self, key: &str) -> Result<Vec<&'a str>, ModelFileError> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(parts.collect())
    }

    fn parse_f64(&self, s: &str) -> Result<f64, ModelFileError> {
        s.parse().map_err(|_| self.err(format!("bad number {s:?}")))
    }

    fn parse_usize(&self, s: &str) -> Result<usize, ModelFileError> {
        s.parse().map_err(|_| self.err(format!("bad count {s:?}")))
    }

    fn float_list(&self, parts: &[&str]) -> Result<Vec<f64>, ModelFileError> {
        parts.iter().map(|s| self.parse_f64(s)).collect()
    }

    fn single(&mut self, key: &str) -> Result<&'a str, ModelFileError> {
        match self.key(key)?.as_slice() {
            [v] => Ok(v),
            _ => Err(self.err(format!("`{key}` takes one value"))),
        }
    }

    fn scalar(&mut self, key: &str) -> Result<f64, ModelFileError> {
        let v = self.single(key)?;
        self.parse_f64(v)
    }

    fn floats(&mut self, key: &str) -> Result<Vec<f64>, ModelFileError> {
        let parts = self.key(key)?;
        self.float_list(&parts)
    }

    fn matrix(&mut self, name: &str) -> Result<Matrix, ModelFileError> {
        let dims = self.key("matrix")?;
        let (rows, cols) = match dims.as_slice() {
            [n, r, c] if *n == name => (self.parse_usize(r)?, self.parse_usize(c)?),
            _ => return Err(self.err(format!("expected matrix {name}"))),
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = self.next_line()?;
            let row: Vec<&str> = line.split_whitespace().collect();
            if row.len() != cols {
                return Err(self.err(format!("matrix {name}: expected {cols} values")));
            }
            data.extend(self.float_list(&row)?);
        }
        Ok(Matrix::from_vec(rows, cols, data)?)
    }

    fn layer(&mut self) -> Result<HiddenLayer, ModelFileError> {
        let name = self.single("node")?;
        let node = NodeType::from_name(name).ok_or_else(|| self.err(format!("unknown node type {name:?}")))?;
        let weights = self.matrix("weights")?;
        let biases = self.floats("biases")?;
        Ok(HiddenLayer::from_parts(node, weights, biases)?)
    }
}

/// Parses a model written by [`to_string`].
pub fn from_str(text: &str) -> Result<Model, ModelFileError> {
    let mut l = Lines {
        lines: text.lines().collect(),
        at: 0,
    };
    if l.next_line()? != MAGIC {
        return Err(l.err("not an occelm model file"));
    }
    let kind = l.single("kind")?;
    let fam = l.single("family")?;
    let family = Family::from_name(fam).ok_or_else(|| l.err(format!("unknown family {fam:?}")))?;
    let thr = l.key("threshold")?;
    let (name, params) = thr.split_first().ok_or_else(|| l.err("missing threshold name"))?;
    let threshold = ThresholdSpec::from_params(name, &l.float_list(params)?)?;
    let thresh = l.scalar("thresh")?;
    let r = l.scalar("r")?;
    let zstats = ZScoreStats {
        mean: l.floats("zmean")?,
        std: l.floats("zstd")?,
    };
    let model = match kind {
        "offline" => {
            let c = l.scalar("c")?;
            let map = l.key("map")?;
            let map = match map.as_slice() {
                ["random"] => FeatureMap::Random(l.layer()?),
                ["kernel", name, params @ ..] => FeatureMap::Kernel(Kernel::from_params(name, &l.float_list(params)?)?),
                _ => return Err(l.err("bad map line")),
            };
            let basis = l.matrix("basis")?;
            let beta = l.matrix("beta")?;
            Model::Offline(OfflineModel::from_parts(
                family, map, basis, beta, c, threshold, thresh, r, zstats,
            )?)
        }
        "online" => {
            let seen = l.single("seen")?;
            let seen = l.parse_usize(seen)?;
            let layer = l.layer()?;
            let p = l.matrix("p")?;
            let beta = l.matrix("beta")?;
            let rls = RlsState::from_parts(p, beta)?;
            Model::Online(OnlineModel::from_parts(
                family, layer, rls, r, zstats, seen, threshold, thresh,
            )?)
        }
        other => return Err(l.err(format!("unknown model kind {other:?}"))),
    };
    Ok(model)
}

pub fn save(path: &Path, model: &Model) -> Result<(), ModelFileError> {
    std::fs::write(path, to_string(model))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Model, ModelFileError> {
    from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use occelm_core::variant::{Hyper, Variant};

    fn data() -> Matrix {
        Matrix::from_fn(40, 3, |i, j| ((i * 7 + j * 3) as f64 * 0.61).sin() * (j + 1) as f64)
    }

    fn round_trip(id: &str, hyper: Hyper) {
        let v = Variant::parse(id).unwrap();
        let x = data();
        let model = Model::train(&v, &hyper, &x, 0.1, 3).unwrap();
        let text = to_string(&model);
        let back = from_str(&text).unwrap();
        assert_eq!(to_string(&back), text);
        let a = model.score(&x).unwrap();
        let b = back.score(&x).unwrap();
        assert_eq!(a, b, "{id}");
    }

    #[test]
    fn offline_kernel_round_trip() {
        round_trip(
            "aakelm_thr3",
            Hyper::Kernel {
                kernel: Kernel::Rbf { sigma: 1.7 },
                c: 10.0,
            },
        );
        round_trip(
            "ockelm_thr1",
            Hyper::Kernel {
                kernel: Kernel::Polynomial { degree: 2, offset: 1.0 },
                c: 0.5,
            },
        );
    }

    #[test]
    fn offline_random_round_trip() {
        round_trip("ocelm_thr2", Hyper::Random { hidden: 12, c: 100.0 });
    }

    #[test]
    fn online_round_trip() {
        for id in ["os_aaelm_thr1_rbf", "os_ocelm_thr2_sig", "os_aaelm_thr3_sig"] {
            round_trip(
                id,
                Hyper::Online {
                    hidden: 8,
                    initial: None,
                    block: Some(5),
                },
            );
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_str("hello").is_err());
        assert!(from_str("OCCELM v1\nkind offline\n").is_err());
        let v = Variant::parse("ockelm_thr1").unwrap();
        let m = Model::train(&v, &Hyper::Kernel { kernel: Kernel::Linear, c: 1.0 }, &data(), 0.1, 0).unwrap();
        let text = to_string(&m).replace("matrix beta 40 1", "matrix beta 39 1");
        assert!(from_str(&text).is_err());
    }
}
