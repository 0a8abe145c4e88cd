use crate::error::{invalid, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Uniform linear array with half-wavelength spacing, centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub n_antennas: usize,
    /// Carrier wavelength (m).
    pub carrier_wavelength: f64,
    /// Element spacing, half a wavelength (m).
    pub spacing: f64,
    /// Aperture `(N - 1) * spacing` (m).
    pub aperture: f64,
    /// Rayleigh distance `2 D^2 / lambda` (m).
    pub rayleigh_dist: f64,
    /// Fresnel distance `0.62 sqrt(D^3 / lambda)` (m).
    pub fresnel_dist: f64,
    /// Dimensionless element offsets `(2n - N + 1) / 2`; element `n` sits at `offsets[n] * spacing`.
    pub offsets: Vec<f64>,
}

impl ArrayGeometry {
    pub fn new(n_antennas: usize, carrier_freq: f64) -> Result<Self> {
        if n_antennas == 0 {
            return Err(invalid("array needs at least one antenna"));
        }
        if !(carrier_freq.is_finite() && carrier_freq > 0.0) {
            return Err(invalid(format!("carrier frequency must be positive, got {carrier_freq}")));
        }
        let carrier_wavelength = SPEED_OF_LIGHT / carrier_freq;
        let spacing = carrier_wavelength / 2.0;
        let aperture = (n_antennas - 1) as f64 * spacing;
        let rayleigh_dist = 2.0 * aperture * aperture / carrier_wavelength;
        let fresnel_dist = 0.62 * (aperture.powi(3) / carrier_wavelength).sqrt();
        let n = n_antennas as f64;
        let offsets = (0..n_antennas)
            .map(|i| (2.0 * i as f64 - n + 1.0) / 2.0)
            .collect();
        Ok(Self {
            n_antennas,
            carrier_wavelength,
            spacing,
            aperture,
            rayleigh_dist,
            fresnel_dist,
            offsets,
        })
    }

    /// Free-space amplitude `lambda / (4 pi r)` for a path of length `distance`.
    pub fn free_space_amplitude(&self, distance: f64) -> f64 {
        self.carrier_wavelength / (4.0 * std::f64::consts::PI * distance)
    }
}

/// Build the array geometry for `n_antennas` elements at `carrier_freq` Hz.
pub fn build_geometry(n_antennas: usize, carrier_freq: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::new(n_antennas, carrier_freq)
}
