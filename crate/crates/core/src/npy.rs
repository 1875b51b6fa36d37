//! Dense array files in the `.npy` layout (C order, little endian).

use std::io::{Cursor, Read};
use std::path::Path;

use npyz::{DType, TypeChar, WriterBuilder};

use crate::error::{Error, Result};

/// A dense array read from disk, widened to `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseArray {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

pub fn read(path: &Path) -> Result<DenseArray> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    })
}

pub fn from_bytes(bytes: &[u8]) -> Result<DenseArray> {
    let file = npyz::NpyFile::new(bytes).map_err(|e| Error::parse("<npy>", e))?;
    if file.order() == npyz::Order::Fortran {
        return Err(Error::parse("<npy>", "Fortran-ordered arrays are not supported"));
    }
    let shape: Vec<usize> = file.shape().iter().map(|&s| s as usize).collect();
    let data = widen(file)?;
    Ok(DenseArray { shape, data })
}

fn widen<R: Read>(file: npyz::NpyFile<R>) -> Result<Vec<f64>> {
    let dtype = file.dtype();
    let DType::Plain(ts) = &dtype else {
        return Err(Error::DType(dtype.descr()));
    };
    let bad = |e: std::io::Error| Error::parse("<npy>", e);
    let data = match (ts.type_char(), ts.size_field()) {
        (TypeChar::Float, 8) => file.into_vec::<f64>().map_err(bad)?,
        (TypeChar::Float, 4) => file.into_vec::<f32>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Uint, 1) => file.into_vec::<u8>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Uint, 2) => file.into_vec::<u16>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Uint, 4) => file.into_vec::<u32>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Uint, 8) => file.into_vec::<u64>().map_err(bad)?.into_iter().map(|v| v as f64).collect(),
        (TypeChar::Int, 1) => file.into_vec::<i8>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Int, 2) => file.into_vec::<i16>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Int, 4) => file.into_vec::<i32>().map_err(bad)?.into_iter().map(f64::from).collect(),
        (TypeChar::Int, 8) => file.into_vec::<i64>().map_err(bad)?.into_iter().map(|v| v as f64).collect(),
        (TypeChar::Bool, 1) => {
            file.into_vec::<bool>().map_err(bad)?.into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect()
        }
        _ => return Err(Error::DType(dtype.descr())),
    };
    Ok(data)
}

/// Serializes `data` with the given shape to `.npy` bytes.
pub fn to_bytes<T: npyz::AutoSerialize + Copy>(shape: &[usize], data: &[T]) -> Vec<u8> {
    let expected: usize = shape.iter().product();
    assert_eq!(expected, data.len(), "shape {shape:?} does not match {} elements", data.len());
    let shape: Vec<u64> = shape.iter().map(|&s| s as u64).collect();
    let mut out = Cursor::new(Vec::new());
    {
        let mut writer = npyz::WriteOptions::new()
            .default_dtype()
            .shape(&shape)
            .writer(&mut out)
            .begin_nd()
            .expect("in-memory write");
        writer.extend(data.iter().copied()).expect("in-memory write");
        writer.finish().expect("in-memory write");
    }
    out.into_inner()
}

pub fn write<T: npyz::AutoSerialize + Copy>(path: &Path, shape: &[usize], data: &[T]) -> Result<()> {
    std::fs::write(path, to_bytes(shape, data)).map_err(|e| Error::io(path, e))
}
