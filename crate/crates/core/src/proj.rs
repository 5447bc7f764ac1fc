//! Equirectangular projection about a local anchor: the flat-earth
//! approximation that keeps city-scale distortion negligible.

const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Linear (lat, lon) <-> local meters mapping anchored at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equirect {
    pub lat0: f64,
    pub lon0: f64,
    meters_per_deg_lon: f64,
    meters_per_deg_lat: f64,
}

impl Equirect {
    pub fn new(lat0: f64, lon0: f64) -> Self {
        let meters_per_deg = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        Self {
            lat0,
            lon0,
            meters_per_deg_lon: meters_per_deg * lat0.to_radians().cos(),
            meters_per_deg_lat: meters_per_deg,
        }
    }

    pub fn project(&self, lat: f64, lon: f64) -> (f64, f64) {
        (
            (lon - self.lon0) * self.meters_per_deg_lon,
            (lat - self.lat0) * self.meters_per_deg_lat,
        )
    }

    pub fn unproject(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.lat0 + y / self.meters_per_deg_lat,
            self.lon0 + x / self.meters_per_deg_lon,
        )
    }
}
