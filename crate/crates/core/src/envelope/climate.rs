use std::f64::consts::PI;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::assembly::Orientation;
use crate::error::{Error, Result};

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";
const SOLAR_COLUMNS: [&str; 5] = [
    "q_solar_N_Wm2",
    "q_solar_S_Wm2",
    "q_solar_E_Wm2",
    "q_solar_W_Wm2",
    "q_solar_H_Wm2",
];

/// Default sky depression below the outdoor air when no sky temperature is
/// given, K.
pub const DEFAULT_SKY_OFFSET: f64 = 10.0;

/// Hourly outdoor conditions.
///
/// Temperatures are kept in °C exactly as read so that a write/read cycle
/// reproduces the series bit for bit; conversion to kelvin happens when the
/// boundary conditions are built.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimateSeries {
    start: NaiveDateTime,
    t_out: Vec<f64>,
    /// Indexed by [`Orientation`]: N, S, E, W, horizontal.
    solar: [Vec<f64>; 5],
    t_sky: Vec<f64>,
}

impl ClimateSeries {
    /// `solar` is ordered N, S, E, W, horizontal.
    pub fn new(start: NaiveDateTime, t_out: Vec<f64>, solar: [Vec<f64>; 5], t_sky: Vec<f64>) -> Result<Self> {
        let n = t_out.len();
        if n < 2 {
            return Err(Error::invalid("climate series needs at least two hourly rows"));
        }
        if solar.iter().any(|s| s.len() != n) || t_sky.len() != n {
            return Err(Error::invalid("climate columns have different lengths"));
        }
        for (i, v) in t_out.iter().chain(&t_sky).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("climate temperature at row {}", i % n)));
            }
        }
        for (o, col) in Orientation::ALL.iter().zip(&solar) {
            if let Some(i) = col.iter().position(|q| !(*q >= 0.0 && q.is_finite())) {
                return Err(Error::invalid(format!(
                    "solar flux on {o} at row {i} must be finite and >= 0, got {}",
                    col[i]
                )));
            }
        }
        Ok(Self {
            start,
            t_out,
            solar,
            t_sky,
        })
    }

    /// Steady conditions over `hours` rows; sky at `t_out − DEFAULT_SKY_OFFSET`.
    pub fn constant(start: NaiveDateTime, hours: usize, t_out: f64, solar: f64) -> Result<Self> {
        Self::new(
            start,
            vec![t_out; hours],
            std::array::from_fn(|_| vec![solar; hours]),
            vec![t_out - DEFAULT_SKY_OFFSET; hours],
        )
    }

    pub fn len(&self) -> usize {
        self.t_out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_out.is_empty()
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn timestamp(&self, row: usize) -> NaiveDateTime {
        self.start + Duration::hours(row as i64)
    }

    /// Outdoor air temperature, °C.
    pub fn t_out(&self) -> &[f64] {
        &self.t_out
    }

    /// Sky temperature, °C.
    pub fn t_sky(&self) -> &[f64] {
        &self.t_sky
    }

    /// Total incident short-wave flux on a surface, W/m².
    pub fn solar(&self, orientation: Orientation) -> &[f64] {
        &self.solar[orientation.index()]
    }

    /// Seconds covered when the series is treated as periodic.
    pub fn period_seconds(&self) -> f64 {
        3600.0 * self.len() as f64
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["timestamp_iso8601", "t_out_C"];
        header.extend(SOLAR_COLUMNS);
        header.push("t_sky_C");
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec = vec![
                self.timestamp(i).format(TIMESTAMP_FORMAT).to_string(),
                self.t_out[i].to_string(),
            ];
            rec.extend(self.solar.iter().map(|c| c[i].to_string()));
            rec.push(self.t_sky[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Linear interpolation in a periodic hourly series at `seconds` from its
/// start.
pub(crate) fn interpolate_hourly(values: &[f64], seconds: f64) -> f64 {
    let n = values.len();
    let hours = seconds / 3600.0;
    let base = hours.floor();
    let frac = hours - base;
    let i = (base as i64).rem_euclid(n as i64) as usize;
    let j = (i + 1) % n;
    values[i] + frac * (values[j] - values[i])
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .ok()
        .or_else(|| chrono::DateTime::parse_from_rfc3339(s).ok().map(|d| d.naive_utc()))
}

/// Reads a climate file. Rows must be hourly without gaps; a missing
/// `t_sky_C` column defaults to `t_out_C − 10`.
pub fn load_climate_csv(path: &Path) -> Result<ClimateSeries> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    read_climate(text.as_bytes(), path)
}

/// Parses climate CSV text; `origin` only labels error messages.
pub fn read_climate<R: Read>(input: R, origin: &Path) -> Result<ClimateSeries> {
    let data_err = |row: usize, message: String| Error::Data {
        path: origin.to_path_buf(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut required = vec!["timestamp_iso8601", "t_out_C"];
    required.extend(SOLAR_COLUMNS);
    let mut index = Vec::with_capacity(required.len());
    for name in &required {
        index.push(column(name).ok_or_else(|| data_err(1, format!("missing column '{name}'")))?);
    }
    let sky = column("t_sky_C");

    let mut start = None;
    let mut previous: Option<NaiveDateTime> = None;
    let mut t_out = Vec::new();
    let mut t_sky = Vec::new();
    let mut solar: [Vec<f64>; 5] = Default::default();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let number = |k: usize, name: &str| -> Result<f64> {
            field(k)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(line, format!("bad {name} value '{}'", field(k))))
        };
        let ts = parse_timestamp(field(index[0]))
            .ok_or_else(|| data_err(line, format!("bad timestamp '{}'", field(index[0]))))?;
        if let Some(prev) = previous {
            let gap = (ts - prev).num_seconds();
            if gap != 3600 {
                return Err(data_err(
                    line,
                    format!("rows must be hourly without gaps, found {gap} s after {prev}"),
                ));
            }
        } else {
            start = Some(ts);
        }
        previous = Some(ts);
        let out = number(index[1], "t_out_C")?;
        t_out.push(out);
        for (c, col) in solar.iter_mut().enumerate() {
            let q = number(index[2 + c], SOLAR_COLUMNS[c])?;
            if q < 0.0 {
                return Err(data_err(
                    line,
                    format!("negative solar flux {q} in {}", SOLAR_COLUMNS[c]),
                ));
            }
            col.push(q);
        }
        t_sky.push(match sky {
            Some(k) => number(k, "t_sky_C")?,
            None => out - DEFAULT_SKY_OFFSET,
        });
    }
    let start = start.ok_or_else(|| data_err(2, "no data rows".into()))?;
    ClimateSeries::new(start, t_out, solar, t_sky)
}

/// Parameters of the synthetic climate generator. Temperatures in °C.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimateProfile {
    pub name: String,
    pub t_min: f64,
    pub t_mean: f64,
    pub t_max: f64,
    /// Degrees, negative south of the equator.
    pub latitude: f64,
    /// Direct-normal irradiance with the sun at the zenith, W/m².
    pub solar_peak: f64,
    /// Share of the swing carried by the daily cycle, in [0, 1].
    pub diurnal_share: f64,
    /// Standard deviation of the added temperature noise, K.
    pub noise: f64,
    pub sky_offset: f64,
    pub seed: u64,
    pub year: i32,
}

impl ClimateProfile {
    fn city(name: &str, t_min: f64, t_mean: f64, t_max: f64, latitude: f64) -> Self {
        Self {
            name: name.to_string(),
            t_min,
            t_mean,
            t_max,
            latitude,
            solar_peak: 1000.0,
            diurnal_share: 0.5,
            noise: 0.5,
            sky_offset: DEFAULT_SKY_OFFSET,
            seed: 1,
            year: 2023,
        }
    }

    pub fn curitiba() -> Self {
        Self::city("curitiba", -2.0, 16.3, 30.9, -25.5)
    }

    pub fn rio_de_janeiro() -> Self {
        Self::city("rio-de-janeiro", 13.0, 23.5, 38.2, -22.9)
    }

    pub fn sao_paulo() -> Self {
        Self::city("sao-paulo", 7.5, 18.8, 32.8, -23.5)
    }

    pub fn salvador() -> Self {
        Self::city("salvador", 14.2, 25.3, 33.5, -12.9)
    }

    pub fn cities() -> [Self; 4] {
        [
            Self::curitiba(),
            Self::rio_de_janeiro(),
            Self::sao_paulo(),
            Self::salvador(),
        ]
    }

    pub fn by_name(name: &str) -> Result<Self> {
        let key = name.to_ascii_lowercase().replace([' ', '_'], "-").replace('ã', "a");
        Self::cities().into_iter().find(|c| c.name == key).ok_or_else(|| {
            Error::invalid(format!(
                "unknown city '{name}' (curitiba, rio-de-janeiro, sao-paulo, salvador)"
            ))
        })
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.t_min,
            self.t_mean,
            self.t_max,
            self.latitude,
            self.solar_peak,
            self.diurnal_share,
            self.noise,
            self.sky_offset,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("climate profile values must be finite"));
        }
        if !(self.t_min <= self.t_mean && self.t_mean <= self.t_max) {
            return Err(Error::invalid(format!(
                "profile needs t_min <= t_mean <= t_max, got {} / {} / {}",
                self.t_min, self.t_mean, self.t_max
            )));
        }
        if self.latitude.abs() > 90.0 {
            return Err(Error::invalid(format!("latitude {} out of range", self.latitude)));
        }
        if self.solar_peak < 0.0 || self.noise < 0.0 {
            return Err(Error::invalid("solar peak and noise must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.diurnal_share) {
            return Err(Error::invalid("diurnal share must lie in [0, 1]"));
        }
        let (b, d) = self.shape(self.second_moment());
        if 2.0 * d.abs() > b {
            return Err(Error::invalid(format!(
                "t_mean {} is too far from the middle of [{}, {}] for a monotone temperature shape",
                self.t_mean, self.t_min, self.t_max
            )));
        }
        Ok(())
    }

    fn second_moment(&self) -> f64 {
        let (wa, wd) = (1.0 - self.diurnal_share, self.diurnal_share);
        0.5 * (wa * wa + wd * wd)
    }

    /// Coefficients of `T = t_mean + b·s + d·(s² − E[s²])`, where `s ∈ [−1, 1]`
    /// is the combined annual and daily cycle.
    fn shape(&self, m2: f64) -> (f64, f64) {
        let b = 0.5 * (self.t_max - self.t_min);
        let d = if m2 < 1.0 {
            (0.5 * (self.t_max + self.t_min) - self.t_mean) / (1.0 - m2)
        } else {
            0.0
        };
        (b, d)
    }

    /// Day of the year (0-based, fractional) at which the warm season peaks.
    pub fn summer_peak_day(&self) -> f64 {
        summer_peak_day(self.latitude)
    }
}

/// Mid-January south of the equator, mid-July north of it.
pub fn summer_peak_day(latitude: f64) -> f64 {
    if latitude < 0.0 {
        14.0
    } else {
        195.0
    }
}

/// Hour of the daily temperature maximum.
const WARMEST_HOUR: f64 = 15.0;
const GROUND_REFLECTANCE: f64 = 0.2;
const DIFFUSE_FRACTION: f64 = 0.15;

/// Sun direction as (east, north, up) unit components.
fn sun_vector(latitude_deg: f64, day_of_year: f64, solar_hour: f64) -> [f64; 3] {
    let phi = latitude_deg.to_radians();
    let delta = (23.45f64).to_radians() * (2.0 * PI * (284.0 + day_of_year + 1.0) / 365.0).sin();
    let omega = (15.0 * (solar_hour - 12.0)).to_radians();
    let up = phi.sin() * delta.sin() + phi.cos() * delta.cos() * omega.cos();
    let east = -delta.cos() * omega.sin();
    let north = phi.cos() * delta.sin() - phi.sin() * delta.cos() * omega.cos();
    [east, north, up]
}

/// Clear-sky irradiance on the five surfaces for one sun position, ordered
/// N, S, E, W, horizontal.
fn surface_irradiance(sun: [f64; 3], peak: f64) -> [f64; 5] {
    let up = sun[2];
    if up <= 0.0 {
        return [0.0; 5];
    }
    // Meinel's air-mass attenuation, normalised so the zenith gives `peak`.
    let air_mass = 1.0 / up.max(0.01);
    let beam = peak * 0.7f64.powf(air_mass.powf(0.678)) / 0.7;
    let diffuse = DIFFUSE_FRACTION * peak * up;
    let global = beam * up + diffuse;
    let vertical =
        |cos_incidence: f64| beam * cos_incidence.max(0.0) + 0.5 * diffuse + 0.5 * GROUND_REFLECTANCE * global;
    [
        vertical(sun[1]),
        vertical(-sun[1]),
        vertical(sun[0]),
        vertical(-sun[0]),
        global,
    ]
}

/// Generates one year of hourly data from a profile.
///
/// The outdoor temperature combines an annual and a daily cosine that peak
/// together in the warm season at 15:00; a quadratic reshaping places the
/// extremes at `t_min`/`t_max` and keeps the mean at `t_mean`. With
/// `noise > 0` an AR(1) perturbation seeded by `seed` is added. Solar fluxes
/// follow a clear-sky model driven by the sun path at `latitude`.
pub fn synthesize_climate(profile: &ClimateProfile) -> Result<ClimateSeries> {
    profile.validate()?;
    let start = NaiveDate::from_ymd_opt(profile.year, 1, 1)
        .ok_or_else(|| Error::invalid(format!("bad year {}", profile.year)))?
        .and_hms_opt(0, 0, 0)
        .expect("midnight is valid");
    let days = if NaiveDate::from_ymd_opt(profile.year, 2, 29).is_some() {
        366
    } else {
        365
    };
    let hours = 24 * days;
    let year_hours = 24.0 * days as f64;
    let peak_hour = 24.0 * profile.summer_peak_day() + WARMEST_HOUR;
    let (wa, wd) = (1.0 - profile.diurnal_share, profile.diurnal_share);
    let signal: Vec<f64> = (0..hours)
        .map(|h| {
            let h = h as f64;
            let annual = (2.0 * PI * (h - peak_hour) / year_hours).cos();
            let daily = (2.0 * PI * (h - WARMEST_HOUR) / 24.0).cos();
            wa * annual + wd * daily
        })
        .collect();
    let m2 = signal.iter().map(|s| s * s).sum::<f64>() / hours as f64;
    let (b, d) = profile.shape(m2);
    let mut t_out: Vec<f64> = signal
        .iter()
        .map(|&s| profile.t_mean + b * s + d * (s * s - m2))
        .collect();

    if profile.noise > 0.0 {
        let phi: f64 = 0.95;
        let innovation = Normal::new(0.0, profile.noise * (1.0 - phi * phi).sqrt())
            .map_err(|e| Error::invalid(format!("noise: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
        let mut e = profile.noise * Normal::new(0.0, 1.0).expect("unit normal").sample(&mut rng);
        for t in &mut t_out {
            *t += e;
            e = phi * e + innovation.sample(&mut rng);
        }
    }

    let mut solar: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(hours));
    for h in 0..hours {
        let day = (h / 24) as f64;
        let hour = (h % 24) as f64;
        let q = surface_irradiance(sun_vector(profile.latitude, day, hour), profile.solar_peak);
        for (col, v) in solar.iter_mut().zip(q) {
            col.push(v);
        }
    }
    let t_sky = t_out.iter().map(|t| t - profile.sky_offset).collect();
    ClimateSeries::new(start, t_out, solar, t_sky)
}
