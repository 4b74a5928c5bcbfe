use std::fs;
use std::path::Path;

use byteorder::{BigEndian, ByteOrder};

use super::Dataset;
use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn header(buf: &[u8], magic: u32, dims: usize, what: &str) -> Result<Vec<usize>> {
    let need = 4 + 4 * dims;
    if buf.len() < need {
        return Err(Error::Format(format!("{what}: truncated header")));
    }
    let found = BigEndian::read_u32(&buf[0..4]);
    if found != magic {
        return Err(Error::Format(format!("{what}: bad magic {found:#010x}, expected {magic:#010x}")));
    }
    Ok((0..dims).map(|d| BigEndian::read_u32(&buf[4 + 4 * d..8 + 4 * d]) as usize).collect())
}

/// Reads an IDX image file and its label file.
pub fn load_mnist_idx(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<Dataset> {
    let img = fs::read(images.as_ref())?;
    let lab = fs::read(labels.as_ref())?;
    let dims = header(&img, IMAGES_MAGIC, 3, "images")?;
    let (n, rows, cols) = (dims[0], dims[1], dims[2]);
    let ldims = header(&lab, LABELS_MAGIC, 1, "labels")?;
    if ldims[0] != n {
        return Err(Error::Format(format!("{n} images but {} labels", ldims[0])));
    }
    let pixels = rows * cols;
    let body = &img[16..];
    if body.len() != n * pixels {
        return Err(Error::Format(format!("images: expected {} bytes of pixels, found {}", n * pixels, body.len())));
    }
    let lbody = &lab[8..];
    if lbody.len() != n {
        return Err(Error::Format(format!("labels: expected {n} bytes, found {}", lbody.len())));
    }
    let labels: Vec<usize> = lbody.iter().map(|&y| y as usize).collect();
    Dataset::new(body.to_vec(), pixels, labels, 10, "mnist")
}
