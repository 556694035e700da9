use std::io::Write;
use std::ops::AddAssign;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};

/// Heat flux density through the inside surface, W/m², sampled at
/// `times` seconds after `start`. Positive values enter the room.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSeries {
    pub start: NaiveDateTime,
    pub times: Vec<f64>,
    pub flux: Vec<f64>,
}

impl FluxSeries {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["timestamp_iso8601", "t_s", "q_in_Wm2"])?;
        for (t, q) in self.times.iter().zip(&self.flux) {
            let ts = self.start + Duration::milliseconds((t * 1000.0).round() as i64);
            w.write_record([ts.format("%Y-%m-%dT%H:%M:%S").to_string(), t.to_string(), q.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Integrated loads in MJ/m². `heating` collects the periods where heat
/// leaves the room (≤ 0), `cooling` those where it enters (≥ 0).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LoadComponents {
    pub heating: f64,
    pub cooling: f64,
}

impl LoadComponents {
    /// `|heating| + |cooling|`
    pub fn total(&self) -> f64 {
        self.cooling - self.heating
    }

    /// Signed integral of the flux.
    pub fn net(&self) -> f64 {
        self.cooling + self.heating
    }
}

impl AddAssign for LoadComponents {
    fn add_assign(&mut self, rhs: Self) {
        self.heating += rhs.heating;
        self.cooling += rhs.cooling;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub flux: FluxSeries,
    pub daily: Vec<(NaiveDate, LoadComponents)>,
    /// Keyed by (year, month).
    pub monthly: Vec<((i32, u32), LoadComponents)>,
    /// Sum over the whole series.
    pub annual: LoadComponents,
}

impl LoadReport {
    pub fn write_daily_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "heating_MJm2", "cooling_MJm2", "total_MJm2"])?;
        for (d, l) in &self.daily {
            w.write_record([
                d.to_string(),
                l.heating.to_string(),
                l.cooling.to_string(),
                l.total().to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_monthly_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["year", "month", "heating_MJm2", "cooling_MJm2", "total_MJm2"])?;
        for ((y, m), l) in &self.monthly {
            w.write_record([
                y.to_string(),
                m.to_string(),
                l.heating.to_string(),
                l.cooling.to_string(),
                l.total().to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Adds `∫ q dt` over a piece on which `q` is linear and single-signed.
fn add_piece(acc: &mut LoadComponents, dt: f64, qa: f64, qb: f64) {
    let joules = 0.5 * (qa + qb) * dt;
    if qa + qb >= 0.0 {
        acc.cooling += joules * 1e-6;
    } else {
        acc.heating += joules * 1e-6;
    }
}

/// Trapezoidal integration of the flux into daily, monthly and whole-series
/// loads. Segments are split where the flux changes sign and at midnight so
/// every piece is attributed to one component and one day.
pub fn transmission_loads(flux: FluxSeries) -> Result<LoadReport> {
    let (t, q) = (&flux.times, &flux.flux);
    if t.len() != q.len() {
        return Err(Error::invalid("flux series times and values differ in length"));
    }
    if let Some(i) = (1..t.len()).find(|&i| !(t[i] > t[i - 1])) {
        return Err(Error::invalid(format!(
            "flux series timestamps are not increasing at sample {i}"
        )));
    }
    if t.iter().chain(q).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("flux series".into()));
    }
    // seconds from the start to the first midnight at or after it
    let midnight_offset = {
        let s = flux.start;
        let since = s - s.date().and_hms_opt(0, 0, 0).expect("midnight is valid");
        since.num_milliseconds() as f64 / 1000.0
    };
    let day_of = |tt: f64| ((tt + midnight_offset) / SECONDS_PER_DAY).floor() as i64;
    let first_day = flux.start.date();

    let mut per_day: Vec<LoadComponents> = Vec::new();
    let mut day0: Option<i64> = None;
    for i in 1..t.len() {
        let (ta, tb, qa, qb) = (t[i - 1], t[i], q[i - 1], q[i]);
        let mut cuts = vec![ta];
        if qa * qb < 0.0 {
            cuts.push(ta + (tb - ta) * qa / (qa - qb));
        }
        let (da, db) = (day_of(ta), day_of(tb));
        for d in (da + 1)..=db {
            let tm = d as f64 * SECONDS_PER_DAY - midnight_offset;
            if tm > ta && tm < tb {
                cuts.push(tm);
            }
        }
        cuts.push(tb);
        cuts.sort_by(f64::total_cmp);
        let at = |tt: f64| qa + (qb - qa) * (tt - ta) / (tb - ta);
        for w in cuts.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 <= x0 {
                continue;
            }
            let d = day_of(0.5 * (x0 + x1));
            let base = *day0.get_or_insert(d);
            let idx = (d - base) as usize;
            if per_day.len() <= idx {
                per_day.resize(idx + 1, LoadComponents::default());
            }
            add_piece(&mut per_day[idx], x1 - x0, at(x0), at(x1));
        }
    }

    let base = day0.unwrap_or(0);
    let daily: Vec<(NaiveDate, LoadComponents)> = per_day
        .into_iter()
        .enumerate()
        .map(|(k, l)| (first_day + Duration::days(base + k as i64), l))
        .collect();
    let mut monthly: Vec<((i32, u32), LoadComponents)> = Vec::new();
    for (d, l) in &daily {
        let key = (d.year(), d.month());
        match monthly.last_mut() {
            Some((k, acc)) if *k == key => *acc += *l,
            _ => monthly.push((key, *l)),
        }
    }
    let mut annual = LoadComponents::default();
    for (_, l) in &monthly {
        annual += *l;
    }
    Ok(LoadReport {
        flux,
        daily,
        monthly,
        annual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start() -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2023, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    fn series(step: f64, n: usize, f: impl Fn(f64) -> f64) -> FluxSeries {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        FluxSeries {
            start: start(),
            flux: times.iter().map(|&t| f(t)).collect(),
            times,
        }
    }

    #[test]
    fn one_watt_for_a_day() {
        let r = transmission_loads(series(360.0, 240, |_| 1.0)).unwrap();
        assert_eq!(r.daily.len(), 1);
        assert!((r.daily[0].1.cooling - 0.0864).abs() < 1e-15);
        assert_eq!(r.daily[0].1.heating, 0.0);
    }

    #[test]
    fn alternating_flux_splits_evenly() {
        // ±1 W/m² in alternating hours, switching within a millisecond
        let mut times = Vec::new();
        let mut flux = Vec::new();
        for h in 0..24 {
            let s = if h % 2 == 0 { 1.0 } else { -1.0 };
            times.extend([h as f64 * 3600.0, h as f64 * 3600.0 + 3599.999]);
            flux.extend([s, s]);
        }
        times.push(86_400.0);
        flux.push(-1.0);
        let r = transmission_loads(FluxSeries {
            start: start(),
            times,
            flux,
        })
        .unwrap();
        assert_eq!(r.daily.len(), 1);
        let d = r.daily[0].1;
        assert!(d.net().abs() < 1e-8, "{d:?}");
        assert!((d.cooling - 0.0432).abs() < 1e-8);
        assert!((d.heating + 0.0432).abs() < 1e-8);
    }

    #[test]
    fn zero_crossing_is_split_exactly() {
        // q from −1 to +1 over 2 s: each triangle holds 0.5 J
        let f = FluxSeries {
            start: start(),
            times: vec![0.0, 2.0],
            flux: vec![-1.0, 1.0],
        };
        let r = transmission_loads(f).unwrap();
        assert!((r.annual.cooling - 0.5e-6).abs() < 1e-20);
        assert!((r.annual.heating + 0.5e-6).abs() < 1e-20);
    }

    #[test]
    fn midnight_splits_segments() {
        // one 2-hour segment straddling midnight, starting at 23:00
        let f = FluxSeries {
            start: start() + Duration::hours(23),
            times: vec![0.0, 7200.0],
            flux: vec![1.0, 1.0],
        };
        let r = transmission_loads(f).unwrap();
        assert_eq!(r.daily.len(), 2);
        assert_eq!(r.daily[0].0, NaiveDate::from_ymd_opt(2023, 1, 1).unwrap());
        assert!((r.daily[0].1.cooling - 0.0036).abs() < 1e-15);
        assert!((r.daily[1].1.cooling - 0.0036).abs() < 1e-15);
    }

    #[test]
    fn months_add_up_to_the_year() {
        let r = transmission_loads(series(3600.0, 8760, |t| (t / 40_000.0).sin() * 7.0 + 1.0)).unwrap();
        assert_eq!(r.monthly.len(), 12);
        assert_eq!(r.daily.len(), 365);
        let mut sum = LoadComponents::default();
        for (_, m) in &r.monthly {
            sum += *m;
        }
        assert!((sum.total() - r.annual.total()).abs() <= 1e-9 * r.annual.total());
        assert!((sum.heating - r.annual.heating).abs() <= 1e-9 * r.annual.heating.abs());
        assert_eq!(r.annual.total(), r.annual.cooling - r.annual.heating);
    }

    #[test]
    fn unordered_times_are_rejected() {
        let f = FluxSeries {
            start: start(),
            times: vec![0.0, 10.0, 5.0],
            flux: vec![0.0; 3],
        };
        assert!(transmission_loads(f).is_err());
    }
}
