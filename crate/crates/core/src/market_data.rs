//! Tick data ingestion, intraday price grids and daily realized volatility.
//!
//! The pipeline is `parse_ticks -> resample -> intraday_returns -> daily_rv`.
//! Days are UTC calendar days; each retained day is sampled on a grid of
//! `M + 1` instants `00:00, δt, 2δt, ..., 24:00` with the previous-tick rule,
//! giving `M = 1440 / δt` log returns per day.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read};

use chrono::{DateTime, NaiveDate};
use rayon::prelude::*;

use crate::error::{Error, Result};

const SECONDS_PER_DAY: i64 = 86_400;
const MINUTES_PER_DAY: u32 = 1_440;

/// A single trade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub price: f64,
    pub volume: f64,
}

/// Row-level diagnostics gathered while parsing a tick file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Rows that could not be parsed as `timestamp,price,volume`.
    pub malformed_rows: usize,
    /// Rows rejected because the price was zero, negative or not finite.
    pub non_positive_price_rows: usize,
    /// Rows whose timestamp was earlier than the preceding accepted row.
    pub out_of_order_rows: usize,
}

/// Trades for one instrument, sorted by timestamp.
#[derive(Debug, Clone)]
pub struct TickSeries {
    instrument: String,
    records: Vec<Tick>,
    report: ParseReport,
}

impl TickSeries {
    /// Builds a series from raw records, stable-sorting them by timestamp.
    pub fn new(instrument: impl Into<String>, mut records: Vec<Tick>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::NoRecords);
        }
        if let Some(bad) = records.iter().find(|t| !(t.price > 0.0 && t.price.is_finite())) {
            return Err(Error::invalid(format!(
                "tick at {} has non-positive price {}",
                bad.timestamp, bad.price
            )));
        }
        let out_of_order = records.windows(2).filter(|w| w[1].timestamp < w[0].timestamp).count();
        records.sort_by_key(|t| t.timestamp);
        Ok(Self {
            instrument: instrument.into(),
            records,
            report: ParseReport {
                out_of_order_rows: out_of_order,
                ..ParseReport::default()
            },
        })
    }

    pub fn instrument(&self) -> &str {
        &self.instrument
    }

    pub fn records(&self) -> &[Tick] {
        &self.records
    }

    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Returns a copy with every price multiplied by `factor`.
    pub fn scale_prices(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(format!("price scale factor must be positive, got {factor}")));
        }
        let mut out = self.clone();
        for t in &mut out.records {
            t.price *= factor;
        }
        Ok(out)
    }
}

/// Supported tick file layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TickFormat {
    /// Headerless `unix_timestamp,price,volume` rows as exported by bitcoincharts.
    #[default]
    BitcoinchartsCsv,
}

/// Parses a tick stream.
///
/// Unparseable rows and rows with a non-positive price are skipped and
/// counted in the returned series' [`ParseReport`]. Blank lines are ignored.
pub fn parse_ticks<R: Read>(source: R, format: TickFormat) -> Result<TickSeries> {
    let TickFormat::BitcoinchartsCsv = format;
    let reader = BufReader::new(source);
    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_tick_row(line) {
            Some(tick) if tick.price > 0.0 && tick.price.is_finite() => records.push(tick),
            Some(_) => report.non_positive_price_rows += 1,
            None => report.malformed_rows += 1,
        }
    }
    if report.malformed_rows + report.non_positive_price_rows > 0 {
        log::warn!(
            "skipped {} malformed rows and {} rows with non-positive price",
            report.malformed_rows,
            report.non_positive_price_rows
        );
    }
    let mut series = TickSeries::new(String::new(), records)?;
    report.out_of_order_rows = series.report.out_of_order_rows;
    series.report = report;
    Ok(series)
}

fn parse_tick_row(line: &str) -> Option<Tick> {
    let mut fields = line.split(',').map(str::trim);
    let timestamp = fields.next()?.parse::<i64>().ok()?;
    let price = fields.next()?.parse::<f64>().ok()?;
    let volume = fields.next()?.parse::<f64>().ok()?;
    if fields.next().is_some() || !(volume >= 0.0) {
        return None;
    }
    Some(Tick { timestamp, price, volume })
}

/// How grid prices are filled from irregular ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FillPolicy {
    /// Last observation carried forward: the grid price at `t` is the price of
    /// the last trade at or before `t`.
    #[default]
    PreviousTick,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDay {
    pub date: NaiveDate,
    /// `M + 1` grid prices at `00:00, δt, ..., 24:00` UTC.
    pub prices: Vec<f64>,
}

/// A day removed by the tick-count filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DroppedDay {
    pub date: NaiveDate,
    pub tick_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceGrid {
    pub delta_t_minutes: u32,
    pub days: Vec<GridDay>,
    pub fill_policy: FillPolicy,
    pub dropped_days: Vec<DroppedDay>,
}

impl PriceGrid {
    /// Number of returns per day, `1440 / δt`.
    pub fn returns_per_day(&self) -> usize {
        (MINUTES_PER_DAY / self.delta_t_minutes) as usize
    }
}

pub fn validate_delta_t(delta_t_minutes: u32) -> Result<()> {
    if delta_t_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(delta_t_minutes) {
        return Err(Error::invalid(format!(
            "delta_t must divide 1440, got {delta_t_minutes}"
        )));
    }
    Ok(())
}

fn day_date(day_index: i64) -> NaiveDate {
    DateTime::from_timestamp(day_index * SECONDS_PER_DAY, 0)
        .expect("day index within chrono range")
        .date_naive()
}

/// Splits sorted ticks into `(day_index, start, end)` runs of the same UTC day.
fn day_runs(records: &[Tick]) -> Vec<(i64, usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let day = records[start].timestamp.div_euclid(SECONDS_PER_DAY);
        let len = records[start..]
            .iter()
            .take_while(|t| t.timestamp.div_euclid(SECONDS_PER_DAY) == day)
            .count();
        runs.push((day, start, start + len));
        start += len;
    }
    runs
}

/// Samples ticks onto a regular intraday grid of period `delta_t_minutes`.
///
/// Days with fewer than `day_min_ticks` raw ticks are dropped and listed in
/// [`PriceGrid::dropped_days`]. The opening grid point of a day takes the
/// last trade at or before midnight, falling back to the day's first trade.
pub fn resample(ticks: &TickSeries, delta_t_minutes: u32, day_min_ticks: usize) -> Result<PriceGrid> {
    validate_delta_t(delta_t_minutes)?;
    let records = ticks.records();
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let step = i64::from(delta_t_minutes) * 60;
    let m = (MINUTES_PER_DAY / delta_t_minutes) as i64;

    let runs = day_runs(records);
    let dropped_days: Vec<DroppedDay> = runs
        .iter()
        .filter(|(_, s, e)| e - s < day_min_ticks)
        .map(|&(day, s, e)| DroppedDay { date: day_date(day), tick_count: e - s })
        .collect();
    let days: Vec<GridDay> = runs
        .par_iter()
        .filter(|(_, s, e)| e - s >= day_min_ticks)
        .map(|&(day, start, _)| {
            let day_start = day * SECONDS_PER_DAY;
            let seed = records[start].price;
            let prices = (0..=m)
                .map(|n| {
                    let t = day_start + n * step;
                    let upto = records.partition_point(|r| r.timestamp <= t);
                    if upto == 0 {
                        seed
                    } else {
                        records[upto - 1].price
                    }
                })
                .collect();
            GridDay { date: day_date(day), prices }
        })
        .collect();

    if days.is_empty() {
        return Err(Error::NoRetainedDays { min_ticks: day_min_ticks });
    }
    if !dropped_days.is_empty() {
        log::info!("dropped {} days with fewer than {} ticks", dropped_days.len(), day_min_ticks);
    }
    Ok(PriceGrid {
        delta_t_minutes,
        days,
        fill_policy: FillPolicy::PreviousTick,
        dropped_days,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnDay {
    pub date: NaiveDate,
    pub returns: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnGrid {
    pub delta_t_minutes: u32,
    pub days: Vec<ReturnDay>,
}

/// Natural-log returns between adjacent grid prices of each day.
///
/// Returns are computed as `ln(p_j / p_{j-1})`, which equals the log-price
/// difference and makes the result insensitive to a common price scale.
pub fn intraday_returns(grid: &PriceGrid) -> ReturnGrid {
    let days = grid
        .days
        .par_iter()
        .map(|day| ReturnDay {
            date: day.date,
            returns: day.prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect(),
        })
        .collect();
    ReturnGrid { delta_t_minutes: grid.delta_t_minutes, days }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RvDay {
    pub date: NaiveDate,
    pub rv: f64,
}

/// Daily realized variance, ordered by strictly increasing date.
#[derive(Debug, Clone, PartialEq)]
pub struct RVSeries {
    /// Sampling period the series was built with; `None` for imported series.
    pub delta_t_minutes: Option<u32>,
    pub days: Vec<RvDay>,
}

impl RVSeries {
    /// Builds a series from externally computed values, checking the invariants.
    pub fn from_days(delta_t_minutes: Option<u32>, days: Vec<RvDay>) -> Result<Self> {
        if let Some(bad) = days.iter().find(|d| !(d.rv >= 0.0 && d.rv.is_finite())) {
            return Err(Error::invalid(format!("rv on {} is {}, must be finite and >= 0", bad.date, bad.rv)));
        }
        if let Some(w) = days.windows(2).find(|w| w[1].date <= w[0].date) {
            return Err(Error::invalid(format!(
                "rv dates must be strictly increasing: {} then {}",
                w[0].date, w[1].date
            )));
        }
        Ok(Self { delta_t_minutes, days })
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.days.iter().map(|d| d.rv).collect()
    }

    /// Multiplies every value by `factor`, as a multiplicative RV correction would.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(format!("rv scale factor must be positive, got {factor}")));
        }
        let days = self.days.iter().map(|d| RvDay { date: d.date, rv: d.rv * factor }).collect();
        Ok(Self { delta_t_minutes: self.delta_t_minutes, days })
    }
}

/// Sum of squared intraday returns for each day.
pub fn daily_rv(returns: &ReturnGrid) -> RVSeries {
    let days = returns
        .days
        .iter()
        .map(|d| RvDay { date: d.date, rv: d.returns.iter().map(|r| r * r).sum() })
        .collect();
    RVSeries { delta_t_minutes: Some(returns.delta_t_minutes), days }
}

/// `resample -> intraday_returns -> daily_rv` in one call.
pub fn realized_variance(ticks: &TickSeries, delta_t_minutes: u32, day_min_ticks: usize) -> Result<RVSeries> {
    let grid = resample(ticks, delta_t_minutes, day_min_ticks)?;
    Ok(daily_rv(&intraday_returns(&grid)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignaturePoint {
    pub delta_t_minutes: u32,
    pub mean_rv: f64,
}

/// Mean daily RV as a function of the sampling period (volatility signature).
///
/// Means are taken over the days retained at every requested period so that
/// rows are comparable.
pub fn signature_curve(
    ticks: &TickSeries,
    delta_t_list: &[u32],
    day_min_ticks: usize,
) -> Result<Vec<SignaturePoint>> {
    if delta_t_list.is_empty() {
        return Err(Error::invalid("signature curve needs at least one delta_t"));
    }
    for &dt in delta_t_list {
        validate_delta_t(dt)?;
    }
    let series = delta_t_list
        .par_iter()
        .map(|&dt| realized_variance(ticks, dt, day_min_ticks))
        .collect::<Result<Vec<_>>>()?;

    let mut common: BTreeSet<NaiveDate> = series[0].days.iter().map(|d| d.date).collect();
    for s in &series[1..] {
        let dates: BTreeSet<NaiveDate> = s.days.iter().map(|d| d.date).collect();
        common = common.intersection(&dates).copied().collect();
    }
    if common.is_empty() {
        return Err(Error::NoRetainedDays { min_ticks: day_min_ticks });
    }
    Ok(delta_t_list
        .iter()
        .zip(&series)
        .map(|(&dt, s)| {
            let kept: Vec<f64> = s.days.iter().filter(|d| common.contains(&d.date)).map(|d| d.rv).collect();
            SignaturePoint {
                delta_t_minutes: dt,
                mean_rv: kept.iter().sum::<f64>() / kept.len() as f64,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tick(timestamp: i64, price: f64) -> Tick {
        Tick { timestamp, price, volume: 1.0 }
    }

    #[test]
    fn parses_two_rows() {
        let ticks = parse_ticks("1500000000,2500.0,0.5\n1500000060,2501.0,1.0".as_bytes(), TickFormat::BitcoinchartsCsv)
            .unwrap();
        let prices: Vec<f64> = ticks.records().iter().map(|t| t.price).collect();
        assert_eq!(prices, vec![2500.0, 2501.0]);
        assert_eq!(ticks.report(), &ParseReport::default());
    }

    #[test]
    fn empty_input_has_no_records() {
        let err = parse_ticks("".as_bytes(), TickFormat::BitcoinchartsCsv).unwrap_err();
        assert_eq!(err.to_string(), "no records");
    }

    #[test]
    fn out_of_order_rows_are_sorted_and_counted() {
        let src = "1500000001,10.0,1\n1500000000,11.0,1\n1500000002,12.0,1\n";
        let ticks = parse_ticks(src.as_bytes(), TickFormat::BitcoinchartsCsv).unwrap();
        let ts: Vec<i64> = ticks.records().iter().map(|t| t.timestamp).collect();
        assert_eq!(ts, vec![1500000000, 1500000001, 1500000002]);
        assert_eq!(ticks.report().out_of_order_rows, 1);
    }

    #[test]
    fn bad_rows_are_counted() {
        let src = "1500000000,10.0,1\nfoo,bar,baz\n1500000001,-1.0,1\n1500000002,0,1\n1500000003,1.0\n";
        let ticks = parse_ticks(src.as_bytes(), TickFormat::BitcoinchartsCsv).unwrap();
        assert_eq!(ticks.len(), 1);
        assert_eq!(ticks.report().malformed_rows, 2);
        assert_eq!(ticks.report().non_positive_price_rows, 2);
    }

    #[test]
    fn previous_tick_rule() {
        let day = 19_000 * SECONDS_PER_DAY;
        let ticks = TickSeries::new("x", vec![tick(day, 100.0), tick(day + 7 * 60, 101.0)]).unwrap();
        let grid = resample(&ticks, 5, 1).unwrap();
        assert_eq!(grid.days.len(), 1);
        let p = &grid.days[0].prices;
        assert_eq!(p.len(), 289);
        assert_eq!(&p[..3], &[100.0, 100.0, 101.0]);
        assert!(p[3..].iter().all(|&x| x == 101.0));
    }

    #[test]
    fn opening_price_seeds_from_previous_day() {
        let day = 19_000 * SECONDS_PER_DAY;
        let ticks = TickSeries::new(
            "x",
            vec![tick(day - 10, 50.0), tick(day + 3600, 60.0), tick(day + 7200, 70.0)],
        )
        .unwrap();
        let grid = resample(&ticks, 60, 2).unwrap();
        assert_eq!(grid.days.len(), 1);
        assert_eq!(grid.dropped_days.len(), 1);
        assert_eq!(&grid.days[0].prices[..3], &[50.0, 60.0, 70.0]);
    }

    #[test]
    fn opening_price_falls_back_to_first_tick() {
        let day = 19_000 * SECONDS_PER_DAY;
        let ticks = TickSeries::new("x", vec![tick(day + 600, 42.0), tick(day + 1200, 43.0)]).unwrap();
        let grid = resample(&ticks, 5, 1).unwrap();
        assert_eq!(&grid.days[0].prices[..6], &[42.0, 42.0, 42.0, 42.0, 43.0, 43.0]);
    }

    #[test]
    fn sparse_day_dropped() {
        let day = 19_000 * SECONDS_PER_DAY;
        let ticks = TickSeries::new("x", vec![tick(day + 5, 1.0)]).unwrap();
        let err = resample(&ticks, 5, 100).unwrap_err();
        assert!(matches!(err, Error::NoRetainedDays { min_ticks: 100 }));
    }

    #[test]
    fn delta_t_must_divide_day() {
        let ticks = TickSeries::new("x", vec![tick(0, 1.0)]).unwrap();
        let err = resample(&ticks, 7, 1).unwrap_err();
        assert!(err.to_string().contains("delta_t must divide 1440"));
        assert!(validate_delta_t(0).is_err());
    }

    fn grid_with(prices: Vec<f64>) -> PriceGrid {
        PriceGrid {
            delta_t_minutes: 720,
            days: vec![GridDay { date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), prices }],
            fill_policy: FillPolicy::PreviousTick,
            dropped_days: vec![],
        }
    }

    #[test]
    fn constant_prices_give_zero_returns() {
        let r = intraday_returns(&grid_with(vec![7.0, 7.0, 7.0]));
        assert_eq!(r.days[0].returns, vec![0.0, 0.0]);
        assert_eq!(daily_rv(&r).days[0].rv, 0.0);
    }

    #[test]
    fn return_of_exponential_step() {
        let r = intraday_returns(&grid_with(vec![100.0, 100.0 * 0.01f64.exp(), 100.0 * 0.01f64.exp()]));
        assert!((r.days[0].returns[0] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rv_is_sum_of_squares() {
        let returns = ReturnGrid {
            delta_t_minutes: 5,
            days: vec![ReturnDay {
                date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
                returns: {
                    let mut r = vec![0.0; 288];
                    r[0] = 0.01;
                    r[1] = -0.02;
                    r
                },
            }],
        };
        assert!((daily_rv(&returns).days[0].rv - 5e-4).abs() < 1e-18);
    }

    #[test]
    fn rv_series_rejects_bad_input() {
        let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        assert!(RVSeries::from_days(None, vec![RvDay { date: d, rv: -1.0 }]).is_err());
        assert!(RVSeries::from_days(None, vec![RvDay { date: d, rv: 1.0 }, RvDay { date: d, rv: 2.0 }]).is_err());
    }

    #[test]
    fn signature_single_delta_matches_pipeline() {
        let day = 19_000 * SECONDS_PER_DAY;
        let ticks: Vec<Tick> = (0..2000).map(|i| tick(day + i * 97, 100.0 + (i % 7) as f64)).collect();
        let ticks = TickSeries::new("x", ticks).unwrap();
        let sig = signature_curve(&ticks, &[5], 10).unwrap();
        let rv = realized_variance(&ticks, 5, 10).unwrap();
        let mean = rv.values().iter().sum::<f64>() / rv.len() as f64;
        assert_eq!(sig, vec![SignaturePoint { delta_t_minutes: 5, mean_rv: mean }]);
    }
}
