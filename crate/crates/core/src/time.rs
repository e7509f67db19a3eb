//! Clock values and durations.
//!
//! All times are integer seconds since midnight of the service day. Values
//! past 24h are legal — GTFS feeds encode over-midnight trips as e.g.
//! `25:10:00` — and nothing here ever wraps. Durations are plain `u32`
//! seconds; [`INF_DUR`] marks "no walk path".

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Infinite duration sentinel for walk searches (no path).
pub const INF_DUR: u32 = u32::MAX;

/// Duration sum that saturates at [`INF_DUR`], which is therefore absorbing.
#[inline]
pub fn dur_add(a: u32, b: u32) -> u32 {
    a.saturating_add(b)
}

/// A point in time, in seconds since service-day midnight.
///
/// [`Time::UNREACHABLE`] is a sentinel that compares greater than every
/// finite value, so labels can be initialized with it and relaxed with plain
/// `<` comparisons. Arithmetic treats it as absorbing.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(u32);

impl Time {
    /// Greater than every finite time; absorbing under [`Time::plus`].
    pub const UNREACHABLE: Time = Time(u32::MAX);

    /// Largest representable finite time.
    pub const MAX_FINITE: Time = Time(u32::MAX - 1);

    pub const ZERO: Time = Time(0);

    /// Wraps a second count. `u32::MAX` yields [`Time::UNREACHABLE`].
    #[inline]
    pub const fn from_seconds(secs: u32) -> Time {
        Time(secs)
    }

    #[inline]
    pub const fn seconds(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_reachable(self) -> bool {
        self.0 != u32::MAX
    }

    /// `self + secs`, absorbing on [`Time::UNREACHABLE`] and saturating into
    /// it on overflow (an over-24h sum that cannot be represented is as good
    /// as unreachable for routing purposes).
    #[inline]
    pub fn plus(self, secs: u32) -> Time {
        Time(self.0.saturating_add(secs))
    }

    /// Seconds from `self` to `later`; 0 if `later` is earlier.
    #[inline]
    pub fn until(self, later: Time) -> u32 {
        later.0.saturating_sub(self.0)
    }
}

impl fmt::Display for Time {
    /// Formats as `HH:MM:SS` (hours keep growing past 24, GTFS style);
    /// [`Time::UNREACHABLE`] formats as `UNREACHABLE`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_reachable() {
            return f.write_str("UNREACHABLE");
        }
        let h = self.0 / 3600;
        let m = self.0 / 60 % 60;
        let s = self.0 % 60;
        write!(f, "{h:02}:{m:02}:{s:02}")
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error parsing a `HH:MM:SS` clock string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid clock time {input:?}: {reason}")]
pub struct TimeParseError {
    pub input: String,
    pub reason: &'static str,
}

impl FromStr for Time {
    type Err = TimeParseError;

    /// Parses `H:MM:SS` / `HH:MM:SS`, with hours allowed past 24
    /// (`25:10:00` → 90600s).
    fn from_str(s: &str) -> Result<Time, TimeParseError> {
        let err = |reason| TimeParseError { input: s.to_string(), reason };
        let mut parts = s.split(':');
        let (h, m, sec) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(h), Some(m), Some(sec), None) => (h, m, sec),
            _ => return Err(err("expected three colon-separated fields")),
        };
        if h.is_empty() || m.len() != 2 || sec.len() != 2 {
            return Err(err("expected H:MM:SS with two-digit minutes and seconds"));
        }
        let h: u32 = h.parse().map_err(|_| err("hours not a number"))?;
        let m: u32 = m.parse().map_err(|_| err("minutes not a number"))?;
        let sec: u32 = sec.parse().map_err(|_| err("seconds not a number"))?;
        if m >= 60 {
            return Err(err("minutes out of range"));
        }
        if sec >= 60 {
            return Err(err("seconds out of range"));
        }
        let total = h
            .checked_mul(3600)
            .and_then(|v| v.checked_add(m * 60 + sec))
            .filter(|&v| v != u32::MAX)
            .ok_or_else(|| err("time too large"))?;
        Ok(Time(total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_plain_and_over_midnight_clocks() {
        assert_eq!("08:00:00".parse::<Time>().unwrap(), Time::from_seconds(28800));
        assert_eq!("25:10:00".parse::<Time>().unwrap(), Time::from_seconds(90600));
        assert_eq!("0:00:30".parse::<Time>().unwrap(), Time::from_seconds(30));
        assert_eq!("123:59:59".parse::<Time>().unwrap(), Time::from_seconds(446399));
    }

    #[test]
    fn rejects_malformed_clocks() {
        for bad in ["", "8:00", "08:60:00", "08:00:60", "8:0:0", "a:00:00", "08:00:00:00", "-1:00:00"] {
            assert!(bad.parse::<Time>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn formats_match_gtfs_style() {
        assert_eq!(Time::from_seconds(37800).to_string(), "10:30:00");
        assert_eq!(Time::from_seconds(90600).to_string(), "25:10:00");
        assert_eq!(Time::from_seconds(0).to_string(), "00:00:00");
        assert_eq!(Time::UNREACHABLE.to_string(), "UNREACHABLE");
    }

    #[test]
    fn unreachable_dominates_and_absorbs() {
        assert!(Time::UNREACHABLE > Time::from_seconds(u32::MAX - 1));
        assert_eq!(Time::UNREACHABLE.plus(5), Time::UNREACHABLE);
        assert_eq!(Time::from_seconds(u32::MAX - 1).plus(10), Time::UNREACHABLE);
        assert_eq!(Time::from_seconds(10).plus(5), Time::from_seconds(15));
    }

    #[test]
    fn until_is_clamped() {
        let a = Time::from_seconds(100);
        let b = Time::from_seconds(160);
        assert_eq!(a.until(b), 60);
        assert_eq!(b.until(a), 0);
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(secs in 0u32..1_000_000) {
            let t = Time::from_seconds(secs);
            let back: Time = t.to_string().parse().unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn plus_never_wraps(secs in 0u32.., d in 0u32..) {
            let t = Time::from_seconds(secs).plus(d);
            prop_assert!(t >= Time::from_seconds(secs) || !Time::from_seconds(secs).is_reachable());
        }
    }
}
