use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear-power samples recorded at one sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssSampleStream {
    pub sensor_id: usize,
    pub sample_rate_hz: f64,
    pub samples: Vec<f64>,
}

impl RssSampleStream {
    pub fn new(sensor_id: usize, sample_rate_hz: f64, samples: Vec<f64>) -> Result<Self> {
        let stream = Self {
            sensor_id,
            sample_rate_hz,
            samples,
        };
        stream.validate()?;
        Ok(stream)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if let Some((i, v)) = self
            .samples
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "sample {i} of sensor {} is {v}; samples must be finite and nonnegative",
                self.sensor_id
            )));
        }
        Ok(())
    }
}

/// How the filtered tail is reduced to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reducer {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    pub ripple_db: f64,
    /// Cutoff as a fraction of the sample rate.
    pub cutoff_fraction: f64,
    /// Transient discarded before reduction, in filter time constants.
    pub transient_time_constants: f64,
    pub reducer: Reducer,
    /// Keep every `decimation`-th sample of the filtered tail.
    pub decimation: usize,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            ripple_db: 0.5,
            cutoff_fraction: 0.01,
            transient_time_constants: 5.0,
            reducer: Reducer::Mean,
            decimation: 1,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ripple_db.is_finite() && self.ripple_db > 0.0) {
            return Err(Error::InvalidParameter("ripple must be positive".into()));
        }
        if !(self.cutoff_fraction > 0.0 && self.cutoff_fraction < 0.5) {
            return Err(Error::InvalidParameter(
                "cutoff must lie strictly between 0 and half the sample rate".into(),
            ));
        }
        if !(self.transient_time_constants.is_finite() && self.transient_time_constants >= 0.0) {
            return Err(Error::InvalidParameter("transient discard must be nonnegative".into()));
        }
        if self.decimation == 0 {
            return Err(Error::InvalidParameter("decimation must be at least 1".into()));
        }
        Ok(())
    }
}

/// First-order Chebyshev type I low-pass obtained by the bilinear transform:
/// `y[k] = pole·y[k−1] + gain·(x[k] + x[k−1])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevLowpass {
    pub gain: f64,
    pub pole: f64,
}

impl ChebyshevLowpass {
    pub fn design(ripple_db: f64, cutoff_fraction: f64) -> Self {
        let epsilon = (10f64.powf(ripple_db / 10.0) - 1.0).sqrt();
        // Prewarped analog pole; an odd-order design has unit gain at DC.
        let p = (std::f64::consts::PI * cutoff_fraction).tan() / epsilon;
        Self {
            gain: p / (1.0 + p),
            pole: (1.0 - p) / (1.0 + p),
        }
    }

    pub fn from_params(params: &FilterParams) -> Self {
        Self::design(params.ripple_db, params.cutoff_fraction)
    }

    /// Samples per e-fold of the impulse response decay.
    pub fn time_constant(&self) -> f64 {
        -1.0 / self.pole.abs().ln()
    }

    /// `|H(e^{jω})|` at `frequency_fraction = f / f_s`.
    pub fn magnitude(&self, frequency_fraction: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * frequency_fraction;
        let (s, c) = w.sin_cos();
        let num = self.gain * ((1.0 + c).powi(2) + s * s).sqrt();
        let den = ((1.0 - self.pole * c).powi(2) + (self.pole * s).powi(2)).sqrt();
        num / den
    }

    /// Runs the filter from zero initial state.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(x.len());
        let mut prev_x = 0.0;
        let mut prev_y = 0.0;
        for &xk in x {
            let yk = self.pole * prev_y + self.gain * (xk + prev_x);
            y.push(yk);
            prev_x = xk;
            prev_y = yk;
        }
        y
    }
}

/// Low-pass filtered samples of the stream.
pub fn filter_samples(stream: &RssSampleStream, params: &FilterParams) -> Result<Vec<f64>> {
    params.validate()?;
    stream.validate()?;
    if stream.samples.is_empty() {
        return Err(Error::EmptyStream);
    }
    Ok(ChebyshevLowpass::from_params(params).apply(&stream.samples))
}

/// Representative slow-fading RSS for one sensor: the filtered stream with the
/// start-up transient dropped, decimated and reduced by mean or median. A
/// stream shorter than the transient yields its last filtered sample.
pub fn remove_fast_fading(stream: &RssSampleStream, params: &FilterParams) -> Result<f64> {
    let filtered = filter_samples(stream, params)?;
    let filter = ChebyshevLowpass::from_params(params);
    let discard = (params.transient_time_constants * filter.time_constant()).ceil() as usize;
    if discard >= filtered.len() {
        return Ok(*filtered.last().expect("nonempty"));
    }
    let mut tail: Vec<f64> = filtered[discard..].iter().step_by(params.decimation).copied().collect();
    Ok(match params.reducer {
        Reducer::Mean => tail.iter().sum::<f64>() / tail.len() as f64,
        Reducer::Median => {
            tail.sort_by(f64::total_cmp);
            let n = tail.len();
            if n % 2 == 1 {
                tail[n / 2]
            } else {
                0.5 * (tail[n / 2 - 1] + tail[n / 2])
            }
        }
    })
}
