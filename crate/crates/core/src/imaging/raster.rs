use crate::error::{Error, Result};

/// Pixels whose brightest channel exceeds this value count as "colored".
/// Backgrounds are pure black; the margin absorbs compression noise.
pub const DEFAULT_COLORED_THRESHOLD: u8 = 10;

/// Quantizes a real sample to 8 bits, rounding half away from zero.
#[inline]
pub fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}

/// 8-bit raster, grayscale or RGB, row-major with interleaved channels.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RasterImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Dimensions(format!("unsupported channel count {channels}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::Dimensions(format!("empty image {width}x{height}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::Dimensions(format!(
                "buffer holds {} samples, {width}x{height}x{channels} needs {}",
                data.len(),
                width * height * channels
            )));
        }
        Ok(Self { width, height, channels, data })
    }

    /// Image with every sample set to `value`.
    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn gray_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, 1, data)
    }

    pub fn rgb_from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, 3, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn is_gray(&self) -> bool {
        self.channels == 1
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    #[inline]
    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let i = (y * self.width + x) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    /// Coordinates of the image center, with pixel `i` centered at `i`.
    #[inline]
    pub fn center(&self) -> (f64, f64) {
        ((self.width as f64 - 1.0) / 2.0, (self.height as f64 - 1.0) / 2.0)
    }

    pub(crate) fn require_channels(&self, expected: usize) -> Result<()> {
        if self.channels != expected {
            return Err(Error::ChannelCount { expected, actual: self.channels });
        }
        Ok(())
    }

    /// Whether the pixel's brightest channel exceeds `threshold`.
    #[inline]
    pub fn is_colored(&self, x: usize, y: usize, threshold: u8) -> bool {
        self.pixel(x, y).iter().any(|&v| v > threshold)
    }

    /// Bilinear sample at real coordinates; neighbours outside the raster
    /// contribute black.
    pub(crate) fn sample_bilinear(&self, fx: f64, fy: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let x0 = fx.floor();
        let y0 = fy.floor();
        let tx = fx - x0;
        let ty = fy - y0;
        let (x0, y0) = (x0 as i64, y0 as i64);
        let taps = [
            (x0, y0, (1.0 - tx) * (1.0 - ty)),
            (x0 + 1, y0, tx * (1.0 - ty)),
            (x0, y0 + 1, (1.0 - tx) * ty),
            (x0 + 1, y0 + 1, tx * ty),
        ];
        for (x, y, w) in taps {
            if w == 0.0 || x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
                continue;
            }
            let p = self.pixel(x as usize, y as usize);
            for (o, &s) in out.iter_mut().zip(p) {
                *o += w * s as f64;
            }
        }
    }
}

/// Center and radii of the two concentric iris circles.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IrisBoundaries {
    pub center_x: f64,
    pub center_y: f64,
    pub pupil_radius: f64,
    pub limbic_radius: f64,
}

impl IrisBoundaries {
    pub fn new(center_x: f64, center_y: f64, pupil_radius: f64, limbic_radius: f64) -> Self {
        Self { center_x, center_y, pupil_radius, limbic_radius }
    }

    /// Boundaries centered in a `size`×`size` frame.
    pub fn centered(size: usize, pupil_radius: f64, limbic_radius: f64) -> Self {
        let c = (size as f64 - 1.0) / 2.0;
        Self::new(c, c, pupil_radius, limbic_radius)
    }

    pub fn check_radii(&self) -> Result<()> {
        let ok = self.pupil_radius.is_finite()
            && self.limbic_radius.is_finite()
            && self.pupil_radius > 0.0
            && self.pupil_radius < self.limbic_radius;
        if !ok {
            return Err(Error::Boundaries(format!(
                "need 0 < pupil radius < limbic radius, got {} and {}",
                self.pupil_radius, self.limbic_radius
            )));
        }
        Ok(())
    }

    /// Checks the radius ordering and that the limbic circle fits in a
    /// `width`×`height` raster (pixel edges at -0.5 and size - 0.5).
    pub fn check_fits(&self, width: usize, height: usize) -> Result<()> {
        self.check_radii()?;
        let r = self.limbic_radius;
        let eps = 1e-9;
        let fits = self.center_x - r >= -0.5 - eps
            && self.center_y - r >= -0.5 - eps
            && self.center_x + r <= width as f64 - 0.5 + eps
            && self.center_y + r <= height as f64 - 0.5 + eps;
        if !fits {
            return Err(Error::Boundaries(format!(
                "limbic circle ({:.2}, {:.2}) r={:.2} exceeds {width}x{height}",
                self.center_x, self.center_y, r
            )));
        }
        Ok(())
    }

    /// Uniform rescale of the geometry, as when resizing a square frame from
    /// `from` to `to` pixels.
    pub fn rescaled(&self, from: usize, to: usize) -> Self {
        let s = to as f64 / from as f64;
        let map = |c: f64| (c + 0.5) * s - 0.5;
        Self::new(map(self.center_x), map(self.center_y), self.pupil_radius * s, self.limbic_radius * s)
    }

    /// Whether a point's distance from the center lies in the closed annulus.
    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let r = (x - self.center_x).hypot(y - self.center_y);
        r >= self.pupil_radius && r <= self.limbic_radius
    }

    #[inline]
    pub fn annulus_area(&self) -> f64 {
        std::f64::consts::PI * (self.limbic_radius * self.limbic_radius - self.pupil_radius * self.pupil_radius)
    }
}

/// Rectangular polar unwrapping of an annulus. Row 0 is the pupillary edge;
/// column `c` covers angle `c * 360 / angular_size` degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarStrip {
    image: RasterImage,
}

impl PolarStrip {
    pub fn new(radial_size: usize, angular_size: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        Ok(Self { image: RasterImage::new(angular_size, radial_size, channels, data)? })
    }

    pub fn from_image(image: RasterImage) -> Self {
        Self { image }
    }

    #[inline]
    pub fn radial_size(&self) -> usize {
        self.image.height()
    }

    #[inline]
    pub fn angular_size(&self) -> usize {
        self.image.width()
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.image.channels()
    }

    /// The strip viewed as a raster (width = angular, height = radial).
    #[inline]
    pub fn as_image(&self) -> &RasterImage {
        &self.image
    }

    pub fn into_image(self) -> RasterImage {
        self.image
    }

    #[inline]
    pub fn sample(&self, radial: usize, angular: usize) -> &[u8] {
        self.image.pixel(angular, radial)
    }

    /// Rotates every row left by `k` columns: `out[c] = in[(c + k) mod n]`.
    pub fn column_rotate(&self, k: i64) -> Self {
        let n = self.angular_size();
        let ch = self.channels();
        let k = k.rem_euclid(n as i64) as usize;
        let mut data = Vec::with_capacity(self.image.data().len());
        for r in 0..self.radial_size() {
            let row = &self.image.data()[r * n * ch..(r + 1) * n * ch];
            data.extend_from_slice(&row[k * ch..]);
            data.extend_from_slice(&row[..k * ch]);
        }
        Self::new(self.radial_size(), n, ch, data).expect("same geometry")
    }
}
