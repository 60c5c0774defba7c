use std::io::{Read, Write};

use ndarray::{Array1, Array2};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{RcMode, RcTrainConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcDims {
    /// Encoder hidden size `d`.
    pub hidden: usize,
    /// KG embedding width `d_k`.
    pub kg: usize,
    /// Output width `d_f` of the KG projection.
    pub fused: usize,
    pub classes: usize,
}

impl RcDims {
    pub fn new(hidden: usize, kg: usize) -> Self {
        RcDims {
            hidden,
            kg,
            fused: kg,
            classes: super::RcLabel::COUNT,
        }
    }
}

/// Weights of the text and fused heads. `w`/`b` are shared by both entity spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcParams {
    pub dims: RcDims,
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub w0: Array2<f64>,
    pub b0: Array1<f64>,
    pub wf: Array2<f64>,
    pub bf: Array1<f64>,
    pub w3_text: Array2<f64>,
    pub b3_text: Array1<f64>,
    pub w3_fused: Array2<f64>,
    pub b3_fused: Array1<f64>,
}

impl RcParams {
    pub fn zeros(dims: RcDims) -> Self {
        let RcDims {
            hidden: d,
            kg: dk,
            fused: df,
            classes: n,
        } = dims;
        RcParams {
            dims,
            w: Array2::zeros((d, d)),
            b: Array1::zeros(d),
            w0: Array2::zeros((d, d)),
            b0: Array1::zeros(d),
            wf: Array2::zeros((df, 2 * dk)),
            bf: Array1::zeros(df),
            w3_text: Array2::zeros((n, 3 * d)),
            b3_text: Array1::zeros(n),
            w3_fused: Array2::zeros((n, 3 * d + df)),
            b3_fused: Array1::zeros(n),
        }
    }

    /// Weights uniform in `±1/√fan_in`, biases zero.
    pub fn init(dims: RcDims, seed: u64) -> Self {
        let mut p = RcParams::zeros(dims);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for m in [&mut p.w, &mut p.w0, &mut p.wf, &mut p.w3_text, &mut p.w3_fused] {
            let fan_in = m.ncols().max(1) as f64;
            let bound = 1.0 / fan_in.sqrt();
            let uniform = Uniform::new_inclusive(-bound, bound);
            m.iter_mut().for_each(|v| *v = uniform.sample(&mut rng));
        }
        p
    }

    pub fn check_shapes(&self) -> Result<()> {
        let expected = RcParams::zeros(self.dims);
        let ok = self.w.dim() == expected.w.dim()
            && self.b.dim() == expected.b.dim()
            && self.w0.dim() == expected.w0.dim()
            && self.b0.dim() == expected.b0.dim()
            && self.wf.dim() == expected.wf.dim()
            && self.bf.dim() == expected.bf.dim()
            && self.w3_text.dim() == expected.w3_text.dim()
            && self.b3_text.dim() == expected.b3_text.dim()
            && self.w3_fused.dim() == expected.w3_fused.dim()
            && self.b3_fused.dim() == expected.b3_fused.dim();
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!("parameter shapes do not match {:?}", self.dims)))
        }
    }

    /// All parameter blocks as flat slices, in declaration order.
    pub fn blocks(&self) -> [&[f64]; 10] {
        fn s(a: Option<&[f64]>) -> &[f64] {
            a.expect("standard layout")
        }
        [
            s(self.w.as_slice()),
            s(self.b.as_slice()),
            s(self.w0.as_slice()),
            s(self.b0.as_slice()),
            s(self.wf.as_slice()),
            s(self.bf.as_slice()),
            s(self.w3_text.as_slice()),
            s(self.b3_text.as_slice()),
            s(self.w3_fused.as_slice()),
            s(self.b3_fused.as_slice()),
        ]
    }

    pub fn blocks_mut(&mut self) -> [&mut [f64]; 10] {
        fn s(a: Option<&mut [f64]>) -> &mut [f64] {
            a.expect("standard layout")
        }
        [
            s(self.w.as_slice_mut()),
            s(self.b.as_slice_mut()),
            s(self.w0.as_slice_mut()),
            s(self.b0.as_slice_mut()),
            s(self.wf.as_slice_mut()),
            s(self.bf.as_slice_mut()),
            s(self.w3_text.as_slice_mut()),
            s(self.b3_text.as_slice_mut()),
            s(self.w3_fused.as_slice_mut()),
            s(self.b3_fused.as_slice_mut()),
        ]
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &RcParams) {
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            for (a, b) in dst.iter_mut().zip(src) {
                *a += alpha * b;
            }
        }
    }

    pub fn num_values(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }
}

/// A trained head with the settings it was trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcModelFile {
    pub mode: RcMode,
    pub config: RcTrainConfig,
    pub params: RcParams,
}

impl RcModelFile {
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let file: RcModelFile = serde_json::from_reader(r)?;
        file.params.check_shapes()?;
        Ok(file)
    }
}
