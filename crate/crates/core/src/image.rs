//! Linear RGB images and their PPM / PFM encodings.

use std::io::{self, Write};
use std::path::Path;

use crate::color::Rgb;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![Rgb::BLACK; width * height] }
    }

    pub fn get(&self, i: usize, j: usize) -> Rgb {
        self.pixels[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Rgb) {
        self.pixels[j * self.width + i] = c;
    }

    pub fn mse(&self, reference: &Image) -> f64 {
        assert_eq!((self.width, self.height), (reference.width, reference.height));
        let n = (self.pixels.len() * 3) as f64;
        self.pixels
            .iter()
            .zip(&reference.pixels)
            .map(|(a, b)| {
                let d = *a - *b;
                d.r * d.r + d.g * d.g + d.b * d.b
            })
            .sum::<f64>()
            / n
    }

    /// Binary P6 with `x / (1 + x)` tone mapping and 2.2 gamma.
    pub fn encode_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for c in &self.pixels {
            for v in c.to_array() {
                out.push(tonemap(v));
            }
        }
        out
    }

    /// Little-endian PFM (negative scale), linear radiance, bottom row first.
    pub fn encode_pfm(&self) -> Vec<u8> {
        let mut out = format!("PF\n{} {}\n-1.0\n", self.width, self.height).into_bytes();
        for j in (0..self.height).rev() {
            for i in 0..self.width {
                for v in self.get(i, j).to_array() {
                    out.extend_from_slice(&(v as f32).to_le_bytes());
                }
            }
        }
        out
    }

    pub fn decode_pfm(bytes: &[u8]) -> Result<Image> {
        let bad = |m: &str| Error::InvalidScene(format!("malformed PFM: {m}"));
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?.to_owned());
        }
        pos += 1;
        if fields[0] != "PF" {
            return Err(bad("only colour PFM is supported"));
        }
        let width: usize = fields[1].parse().map_err(|_| bad("width"))?;
        let height: usize = fields[2].parse().map_err(|_| bad("height"))?;
        let scale: f64 = fields[3].parse().map_err(|_| bad("scale"))?;
        let data = &bytes[pos.min(bytes.len())..];
        if data.len() != width * height * 12 {
            return Err(bad("pixel data length"));
        }
        let read = |k: usize| {
            let b: [u8; 4] = data[4 * k..4 * k + 4].try_into().unwrap();
            (if scale < 0.0 { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) }) as f64
        };
        let mut img = Image::new(width, height);
        for (row, j) in (0..height).rev().enumerate() {
            for i in 0..width {
                let k = 3 * (row * width + i);
                img.set(i, j, Rgb::new(read(k), read(k + 1), read(k + 2)));
            }
        }
        Ok(img)
    }

    /// Writes PFM for a `.pfm` extension and PPM otherwise.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let bytes = match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("pfm") => self.encode_pfm(),
            _ => self.encode_ppm(),
        };
        let mut f = std::fs::File::create(path)?;
        f.write_all(&bytes)
    }
}

fn tonemap(v: f64) -> u8 {
    let v = if v.is_finite() { v.max(0.0) } else { 0.0 };
    let m = (v / (1.0 + v)).powf(1.0 / 2.2);
    (m * 255.0 + 0.5).clamp(0.0, 255.0) as u8
}
