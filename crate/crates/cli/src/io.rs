use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swkernel::{DensityMatrix, HermitianMatrix, SWKernel};

use crate::Failure;

/// Rendered command output and whether every check passed.
pub struct Output {
    pub text: String,
    pub pass: bool,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Output { text, pass: true }
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Row-major real and imaginary parts.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixParts {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixParts {
    pub fn of(m: &HermitianMatrix) -> Self {
        MatrixParts { re: m.re_parts(), im: m.im_parts() }
    }
}

#[derive(Debug, Deserialize)]
struct StateFile {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct KernelFile {
    dim: usize,
    matrix: MatrixParts,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("malformed JSON in {}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, Failure> {
    let f: StateFile = read_json(path)?;
    DensityMatrix::from_parts(f.dim, &f.re, &f.im)
        .map_err(|e| Failure::Invalid(format!("state {}: {e}", path.display())))
}

/// The raw matrix of a kernel file; master equations are not checked here.
pub fn read_kernel_matrix(path: &Path) -> Result<HermitianMatrix, Failure> {
    let f: KernelFile = read_json(path)?;
    HermitianMatrix::from_parts(f.dim, &f.matrix.re, &f.matrix.im)
        .map_err(|e| Failure::Invalid(format!("kernel {}: {e}", path.display())))
}

pub fn read_kernel(path: &Path) -> Result<SWKernel, Failure> {
    SWKernel::from_matrix(read_kernel_matrix(path)?)
        .map_err(|e| Failure::Invalid(format!("kernel {}: {e}", path.display())))
}
