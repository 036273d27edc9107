//! Elementwise application of elementary operations with domain guards.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::graph::OpKind;

/// Points per parallel work item.
const CHUNK: usize = 4096;

/// Scalar semantics of an elementary operation; `None` outside its domain.
#[inline]
pub fn apply(kind: OpKind, a: f64, b: f64) -> Option<f64> {
    let v = match kind {
        OpKind::Neg => -a,
        OpKind::Add => a + b,
        OpKind::Sub => a - b,
        OpKind::Mul => a * b,
        OpKind::Div => {
            if b == 0.0 {
                return None;
            }
            a / b
        }
        OpKind::PowConst(p) => {
            if (a < 0.0 && p.fract() != 0.0) || (a == 0.0 && p < 0.0) {
                return None;
            }
            if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                a.powi(p as i32)
            } else {
                a.powf(p)
            }
        }
        OpKind::Sin => a.sin(),
        OpKind::Cos => a.cos(),
        OpKind::Tan => a.tan(),
        OpKind::Exp => a.exp(),
        OpKind::Log => {
            if a <= 0.0 {
                return None;
            }
            a.ln()
        }
        OpKind::Sqrt => {
            if a < 0.0 {
                return None;
            }
            a.sqrt()
        }
        OpKind::Expand { .. } => a,
    };
    Some(v)
}

fn run_range(kind: OpKind, a: &[f64], b: Option<&[f64]>, out: &mut [f64], offset: usize) -> Result<(), usize> {
    match b {
        None => {
            for (i, (o, &x)) in out.iter_mut().zip(a).enumerate() {
                *o = apply(kind, x, 0.0).ok_or(offset + i)?;
            }
        }
        Some(b) => {
            for (i, ((o, &x), &y)) in out.iter_mut().zip(a).zip(b).enumerate() {
                *o = apply(kind, x, y).ok_or(offset + i)?;
            }
        }
    }
    Ok(())
}

/// Applies `kind` to equally long arguments. On failure returns the lowest
/// offending index, independent of the thread count.
pub fn run(kind: OpKind, a: &[f64], b: Option<&[f64]>, pool: Option<&ThreadPool>) -> Result<Vec<f64>, usize> {
    let n = a.len();
    let mut out = vec![0.0; n];
    match pool {
        Some(pool) if n > CHUNK => {
            let results: Vec<Result<(), usize>> = pool.install(|| {
                out.par_chunks_mut(CHUNK)
                    .enumerate()
                    .map(|(c, chunk)| {
                        let lo = c * CHUNK;
                        let hi = lo + chunk.len();
                        run_range(kind, &a[lo..hi], b.map(|b| &b[lo..hi]), chunk, lo)
                    })
                    .collect()
            });
            // Chunks are in index order, so the first error is the lowest index.
            if let Some(Err(i)) = results.into_iter().find(|r| r.is_err()) {
                return Err(i);
            }
        }
        _ => run_range(kind, a, b, &mut out, 0)?,
    }
    Ok(out)
}
