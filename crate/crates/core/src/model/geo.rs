use core::borrow::Borrow;

use serde::{Deserialize, Serialize};

use super::SimpleEvent;
use crate::Error;

/// Mean Earth radius used for all distance computations.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A 2D position in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, Error> {
        let p = GeoPoint { lat, lon };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::InvalidGeoPoint { lat, lon })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Haversine distance in meters on a sphere of radius [`EARTH_RADIUS_M`].
///
/// The arguments are put in a canonical order first so that
/// `great_circle_m(a, b) == great_circle_m(b, a)` holds bit for bit.
pub fn great_circle_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let (a, b) = if (a.lat, a.lon) <= (b.lat, b.lon) { (a, b) } else { (b, a) };
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let half_dlat = (b.lat - a.lat).to_radians() / 2.0;
    let half_dlon = (b.lon - a.lon).to_radians() / 2.0;
    let s_lat = libm::sin(half_dlat);
    let s_lon = libm::sin(half_dlon);
    let h = s_lat * s_lat + libm::cos(lat1) * libm::cos(lat2) * s_lon * s_lon;
    let h = h.clamp(0.0, 1.0);
    2.0 * EARTH_RADIUS_M * libm::atan2(libm::sqrt(h), libm::sqrt(1.0 - h))
}

/// Approximate location of a complex event: the outer circle drawn on the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub centroid: GeoPoint,
    pub radius_m: f64,
}

/// Confidence-weighted centroid of the constituents, with a radius that
/// covers every constituent's own localisation circle.
///
/// Weights are renormalised; if every confidence is zero the constituents
/// are weighted equally.
pub fn complex_region<E: Borrow<SimpleEvent>>(constituents: &[E]) -> Result<Region, Error> {
    if constituents.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let total: f64 = constituents.iter().map(|e| e.borrow().confidence).sum();
    let weight = |e: &SimpleEvent| {
        if total > 0.0 {
            e.confidence / total
        } else {
            1.0 / constituents.len() as f64
        }
    };
    let (mut lat, mut lon) = (0.0, 0.0);
    for e in constituents {
        let e = e.borrow();
        let w = weight(e);
        lat += w * e.position.lat;
        lon += w * e.position.lon;
    }
    let centroid = GeoPoint {
        lat: lat.clamp(-90.0, 90.0),
        lon: lon.clamp(-180.0, 180.0),
    };
    let radius_m = constituents
        .iter()
        .map(|e| {
            let e = e.borrow();
            great_circle_m(centroid, e.position) + e.region_radius_m
        })
        .fold(0.0, f64::max);
    Ok(Region { centroid, radius_m })
}
