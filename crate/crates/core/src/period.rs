//! Time periods and the bucketing schemes that assign documents to them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An inclusive span of Gregorian years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimePeriod {
    pub start_year: i32,
    pub end_year: i32,
}

impl TimePeriod {
    pub fn new(start_year: i32, end_year: i32) -> Result<Self> {
        if start_year > end_year {
            return Err(Error::param(format!(
                "period start {start_year} is after its end {end_year}"
            )));
        }
        Ok(TimePeriod {
            start_year,
            end_year,
        })
    }

    /// The calendar decade containing `year`, e.g. 1935 → 1930-1939.
    pub fn decade_of(year: i32) -> Self {
        let start = year.div_euclid(10) * 10;
        TimePeriod {
            start_year: start,
            end_year: start + 9,
        }
    }

    pub fn contains_year(&self, year: i32) -> bool {
        self.start_year <= year && year <= self.end_year
    }

    /// True when `other` lies entirely inside `self`.
    pub fn covers(&self, other: &TimePeriod) -> bool {
        self.start_year <= other.start_year && other.end_year <= self.end_year
    }

    pub fn overlaps(&self, other: &TimePeriod) -> bool {
        self.start_year <= other.end_year && other.start_year <= self.end_year
    }

    /// Smallest period spanning both.
    pub fn span(&self, other: &TimePeriod) -> TimePeriod {
        TimePeriod {
            start_year: self.start_year.min(other.start_year),
            end_year: self.end_year.max(other.end_year),
        }
    }

    /// Directory-safe label, identical to the display form.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TimePeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start_year, self.end_year)
    }
}

impl FromStr for TimePeriod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("cannot parse period `{s}` (expected START-END)"));
        let s = s.trim();
        // allow a leading minus on the start year
        let split_at = s
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '-')
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let start = s[..split_at].trim().parse().map_err(|_| bad())?;
        let end = s[split_at + 1..].trim().parse().map_err(|_| bad())?;
        TimePeriod::new(start, end)
    }
}

impl Serialize for TimePeriod {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TimePeriod {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How publication years map onto periods.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "scheme", content = "periods")]
pub enum Bucketing {
    /// floor(year / 10) * 10 .. +9
    #[default]
    Decades,
    /// An explicit list of disjoint periods; years outside all of them are unassigned.
    Explicit(Vec<TimePeriod>),
}

impl Bucketing {
    pub fn explicit(mut periods: Vec<TimePeriod>) -> Result<Self> {
        periods.sort();
        for pair in periods.windows(2) {
            if pair[0].overlaps(&pair[1]) {
                return Err(Error::param(format!(
                    "bucketing periods {} and {} overlap",
                    pair[0], pair[1]
                )));
            }
        }
        if periods.is_empty() {
            return Err(Error::param("explicit bucketing needs at least one period"));
        }
        Ok(Bucketing::Explicit(periods))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Bucketing::Decades => Ok(()),
            Bucketing::Explicit(p) => Bucketing::explicit(p.clone()).map(|_| ()),
        }
    }

    pub fn assign(&self, year: i32) -> Option<TimePeriod> {
        match self {
            Bucketing::Decades => Some(TimePeriod::decade_of(year)),
            Bucketing::Explicit(periods) => {
                periods.iter().copied().find(|p| p.contains_year(year))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_buckets() {
        assert_eq!(TimePeriod::decade_of(1935), TimePeriod::new(1930, 1939).unwrap());
        assert_eq!(TimePeriod::decade_of(1921), TimePeriod::new(1920, 1929).unwrap());
        assert_eq!(TimePeriod::decade_of(1980), TimePeriod::new(1980, 1989).unwrap());
        assert_eq!(TimePeriod::decade_of(1989), TimePeriod::new(1980, 1989).unwrap());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p: TimePeriod = "2020-2022".parse().unwrap();
        assert_eq!(p, TimePeriod::new(2020, 2022).unwrap());
        assert_eq!(p.to_string(), "2020-2022");
        assert!("2022-2020".parse::<TimePeriod>().is_err());
        assert!("1930".parse::<TimePeriod>().is_err());
    }

    #[test]
    fn explicit_bucketing_rejects_overlap() {
        let a = TimePeriod::new(2010, 2019).unwrap();
        let b = TimePeriod::new(2015, 2022).unwrap();
        assert!(Bucketing::explicit(vec![a, b]).is_err());
        let c = TimePeriod::new(2020, 2022).unwrap();
        let scheme = Bucketing::explicit(vec![c, a]).unwrap();
        assert_eq!(scheme.assign(2021), Some(c));
        assert_eq!(scheme.assign(2009), None);
    }

    #[test]
    fn bucketing_json_shape() {
        let scheme: Bucketing = serde_json::from_str(r#"{"scheme":"decades"}"#).unwrap();
        assert_eq!(scheme, Bucketing::Decades);
        let scheme: Bucketing =
            serde_json::from_str(r#"{"scheme":"explicit","periods":["1920-1929","2020-2022"]}"#)
                .unwrap();
        assert_eq!(scheme.assign(2022), Some(TimePeriod::new(2020, 2022).unwrap()));
    }
}
