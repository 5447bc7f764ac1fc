//! Road-confidence rasters: binary PGM + world-file loading, georeferencing,
//! and thresholding into binary road masks.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Pixel-to-world mapping for a north-up raster in a local planar frame.
///
/// `origin_x`/`origin_y` are the world coordinates (meters) of the *center*
/// of pixel (0,0). Rows grow southwards: `y = origin_y - row * pixel_size_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoTransform {
    pub pixel_size_x: f64,
    pub pixel_size_y: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    /// Optional (lat, lon) in degrees anchoring the local frame on the globe.
    pub geo_anchor: Option<(f64, f64)>,
}

impl GeoTransform {
    pub fn new(pixel_size_x: f64, pixel_size_y: f64, origin_x: f64, origin_y: f64) -> Result<Self> {
        if pixel_size_x <= 0.0 || pixel_size_y <= 0.0 {
            return Err(Error::Validation(format!(
                "pixel size must be positive, got ({pixel_size_x}, {pixel_size_y})"
            )));
        }
        Ok(Self {
            pixel_size_x,
            pixel_size_y,
            origin_x,
            origin_y,
            geo_anchor: None,
        })
    }

    pub fn with_anchor(mut self, lat: f64, lon: f64) -> Self {
        self.geo_anchor = Some((lat, lon));
        self
    }

    /// Map fractional pixel coordinates (col, row) to world meters.
    pub fn pixel_to_world(&self, col: f64, row: f64) -> (f64, f64) {
        (
            self.origin_x + col * self.pixel_size_x,
            self.origin_y - row * self.pixel_size_y,
        )
    }

    /// Inverse of [`pixel_to_world`](Self::pixel_to_world).
    pub fn world_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.origin_x) / self.pixel_size_x,
            (self.origin_y - y) / self.pixel_size_y,
        )
    }
}

/// Grayscale road-probability raster, row-major, top-left first.
#[derive(Debug, Clone)]
pub struct ConfidenceRaster {
    pub width: usize,
    pub height: usize,
    pub values: Vec<u8>,
    pub transform: GeoTransform,
}

impl ConfidenceRaster {
    pub fn new(width: usize, height: usize, values: Vec<u8>, transform: GeoTransform) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Validation(format!(
                "raster dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::Validation(format!(
                "raster payload is {} bytes, expected {}",
                values.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            values,
            transform,
        })
    }

    #[inline]
    pub fn value(&self, col: usize, row: usize) -> u8 {
        self.values[row * self.width + col]
    }
}

/// Binary road mask sharing the raster's georeferencing.
#[derive(Debug, Clone)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    bits: Vec<bool>,
    pub transform: GeoTransform,
}

impl BinaryMask {
    pub fn empty(width: usize, height: usize, transform: GeoTransform) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
            transform,
        }
    }

    #[inline]
    pub fn get(&self, col: i32, row: i32) -> bool {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            return false;
        }
        self.bits[row as usize * self.width + col as usize]
    }

    #[inline]
    pub fn set(&mut self, col: i32, row: i32, value: bool) {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            return;
        }
        self.bits[row as usize * self.width + col as usize] = value;
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Set pixels in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        let width = self.width;
        self.bits.iter().enumerate().filter_map(move |(i, b)| {
            b.then_some(((i % width) as i32, (i / width) as i32))
        })
    }
}

/// Load a binary PGM (P5, maxval 255) plus its 4-line world file.
pub fn load_raster(image_path: &Path, world_path: &Path) -> Result<ConfidenceRaster> {
    let bytes = fs::read(image_path)?;
    let (width, height, payload) = parse_pgm(&bytes)?;
    let transform = parse_world_file(&fs::read_to_string(world_path)?)?;
    ConfidenceRaster::new(width, height, payload, transform)
}

/// Write a raster back out as PGM + world file. Inverse of [`load_raster`].
pub fn save_raster(raster: &ConfidenceRaster, image_path: &Path, world_path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(image_path)?);
    write!(w, "P5\n{} {}\n255\n", raster.width, raster.height)?;
    w.write_all(&raster.values)?;
    w.flush()?;

    let t = &raster.transform;
    let mut world = format!(
        "{}\n{}\n{}\n{}\n",
        t.pixel_size_x, t.pixel_size_y, t.origin_x, t.origin_y
    );
    if let Some((lat, lon)) = t.geo_anchor {
        world.push_str(&format!("ANCHOR {lat} {lon}\n"));
    }
    fs::write(world_path, world)?;
    Ok(())
}

/// Threshold a raster: a pixel is road iff its confidence >= `threshold`.
pub fn binarize(raster: &ConfidenceRaster, threshold: u8) -> BinaryMask {
    let bits = raster.values.iter().map(|&v| v >= threshold).collect();
    BinaryMask {
        width: raster.width,
        height: raster.height,
        bits,
        transform: raster.transform,
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut pos = 0usize;

    let magic = take_token(bytes, &mut pos)
        .ok_or_else(|| Error::Parse("empty PGM file".into()))?;
    if magic != b"P5" {
        return Err(Error::Parse(format!(
            "bad PGM magic: expected P5, got {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = parse_header_int(bytes, &mut pos, "width")?;
    let height = parse_header_int(bytes, &mut pos, "height")?;
    let maxval = parse_header_int(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::Parse(format!("unsupported PGM maxval {maxval}, expected 255")));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Parse("missing whitespace after PGM header".into()));
    }
    pos += 1;

    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::Parse("PGM dimensions overflow".into()))?;
    let payload = &bytes[pos..];
    if payload.len() != expected {
        return Err(Error::Parse(format!(
            "PGM payload is {} bytes, header declares {}x{} = {}",
            payload.len(),
            width,
            height,
            expected
        )));
    }
    Ok((width, height, payload.to_vec()))
}

/// Next whitespace/comment-delimited header token.
fn take_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn parse_header_int(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = take_token(bytes, pos)
        .ok_or_else(|| Error::Parse(format!("PGM header truncated before {what}")))?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Parse(format!(
                "bad PGM {what}: {:?}",
                String::from_utf8_lossy(tok)
            ))
        })
}

fn parse_world_file(text: &str) -> Result<GeoTransform> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    if lines.len() < 4 {
        return Err(Error::Parse(format!(
            "world file has {} lines, expected at least 4",
            lines.len()
        )));
    }
    let mut nums = [0.0f64; 4];
    for (i, (slot, line)) in nums.iter_mut().zip(&lines).enumerate() {
        *slot = line
            .parse()
            .map_err(|_| Error::Parse(format!("world file line {}: bad number {line:?}", i + 1)))?;
    }
    let mut t = GeoTransform::new(nums[0], nums[1], nums[2], nums[3])?;
    if let Some(extra) = lines.get(4) {
        let parts: Vec<&str> = extra.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "ANCHOR" {
            return Err(Error::Parse(format!("world file line 5: expected ANCHOR <lat> <lon>, got {extra:?}")));
        }
        let lat = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad anchor latitude {:?}", parts[1])))?;
        let lon = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad anchor longitude {:?}", parts[2])))?;
        t = t.with_anchor(lat, lon);
    }
    Ok(t)
}
