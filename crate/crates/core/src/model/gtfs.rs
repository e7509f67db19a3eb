//! GTFS-subset timetable reader and writer.
//!
//! Only the fields this engine consumes are read: `stops.txt` (stop_id,
//! stop_lat, stop_lon), `trips.txt` (trip_id, route_id), `stop_times.txt`
//! (trip_id, arrival_time, departure_time, stop_id, stop_sequence) and the
//! optional `transfers.txt`, whose same-stop rows (`from_stop_id =
//! to_stop_id`) define the boarding buffer β(v). Pairwise (from≠to) transfer
//! rows are not modeled — walking lives in the separate transfer graph — and
//! are skipped. Calendar expansion, frequencies and fares are out of scope.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::time::Time;

use super::{Network, StopEvent, Trip};

/// A parsed timetable, not yet coupled to a transfer graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Timetable {
    pub stops: Vec<TimetableStop>,
    pub trips: Vec<Trip>,
}

/// A stop as read from `stops.txt` + `transfers.txt`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimetableStop {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    /// Boarding buffer β in seconds (0 when `transfers.txt` has no self row).
    pub buffer: u32,
}

/// Error reading a GTFS-subset directory.
#[derive(Debug, Error)]
pub enum GtfsError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: missing required column {column:?}")]
    MissingColumn { path: String, column: &'static str },
    #[error("{path} line {line}: {message}")]
    Row { path: String, line: u64, message: String },
}

struct CsvFile {
    path: String,
    reader: csv::Reader<File>,
    columns: Vec<usize>,
}

impl CsvFile {
    fn open(dir: &Path, name: &str, columns: &[&'static str]) -> Result<CsvFile, GtfsError> {
        let full = dir.join(name);
        let path = full.display().to_string();
        let file = File::open(&full).map_err(|source| GtfsError::Io { path: path.clone(), source })?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader
            .headers()
            .map_err(|source| GtfsError::Csv { path: path.clone(), source })?
            .clone();
        let mut indices = Vec::with_capacity(columns.len());
        for &col in columns {
            let idx = headers
                .iter()
                .position(|h| h.trim_start_matches('\u{feff}') == col)
                .ok_or_else(|| GtfsError::MissingColumn { path: path.clone(), column: col })?;
            indices.push(idx);
        }
        Ok(CsvFile { path, reader, columns: indices })
    }

    /// Calls `row` with the requested fields and the 1-based source line.
    fn for_each(
        mut self,
        mut row: impl FnMut(&[&str], u64) -> Result<(), GtfsError>,
    ) -> Result<(), GtfsError> {
        for record in self.reader.records() {
            let record = record.map_err(|source| GtfsError::Csv { path: self.path.clone(), source })?;
            let line = record.position().map_or(0, |p| p.line());
            let mut fields: Vec<&str> = Vec::with_capacity(self.columns.len());
            for &idx in &self.columns {
                fields.push(record.get(idx).ok_or_else(|| GtfsError::Row {
                    path: self.path.clone(),
                    line,
                    message: format!("row has only {} fields", record.len()),
                })?);
            }
            row(&fields, line)?;
        }
        Ok(())
    }
}

fn row_err(path: &str, line: u64, message: String) -> GtfsError {
    GtfsError::Row { path: path.to_string(), line, message }
}

fn parse_time(path: &str, line: u64, field: &str, what: &str) -> Result<Time, GtfsError> {
    field
        .parse()
        .map_err(|e: crate::time::TimeParseError| row_err(path, line, format!("{what}: {e}")))
}

/// Reads a GTFS-subset directory into a [`Timetable`].
pub fn parse_gtfs(dir: &Path) -> Result<Timetable, GtfsError> {
    // stops.txt
    let mut stops: Vec<TimetableStop> = Vec::new();
    let mut stop_index: BTreeMap<String, u32> = BTreeMap::new();
    {
        let file = CsvFile::open(dir, "stops.txt", &["stop_id", "stop_lat", "stop_lon"])?;
        let path = file.path.clone();
        file.for_each(|fields, line| {
            let id = fields[0].to_string();
            if id.is_empty() {
                return Err(row_err(&path, line, "empty stop_id".into()));
            }
            let lat: f64 = fields[1]
                .parse()
                .map_err(|_| row_err(&path, line, format!("malformed stop_lat {:?}", fields[1])))?;
            let lon: f64 = fields[2]
                .parse()
                .map_err(|_| row_err(&path, line, format!("malformed stop_lon {:?}", fields[2])))?;
            if stop_index.insert(id.clone(), stops.len() as u32).is_some() {
                return Err(row_err(&path, line, format!("duplicate stop_id {id:?}")));
            }
            stops.push(TimetableStop { id, lat, lon, buffer: 0 });
            Ok(())
        })?;
    }

    // trips.txt
    let mut trips: Vec<Trip> = Vec::new();
    let mut trip_index: BTreeMap<String, u32> = BTreeMap::new();
    {
        let file = CsvFile::open(dir, "trips.txt", &["trip_id", "route_id"])?;
        let path = file.path.clone();
        file.for_each(|fields, line| {
            let id = fields[0].to_string();
            if id.is_empty() {
                return Err(row_err(&path, line, "empty trip_id".into()));
            }
            if trip_index.insert(id.clone(), trips.len() as u32).is_some() {
                return Err(row_err(&path, line, format!("duplicate trip_id {id:?}")));
            }
            trips.push(Trip { id, route: fields[1].to_string(), events: Vec::new() });
            Ok(())
        })?;
    }

    // stop_times.txt — rows of one trip must appear with strictly increasing
    // stop_sequence (they need not be contiguous).
    {
        let file = CsvFile::open(
            dir,
            "stop_times.txt",
            &["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"],
        )?;
        let path = file.path.clone();
        let mut last_seq: Vec<Option<u64>> = vec![None; trips.len()];
        file.for_each(|fields, line| {
            let trip = *trip_index
                .get(fields[0])
                .ok_or_else(|| row_err(&path, line, format!("unknown trip_id {:?}", fields[0])))?;
            let arrival = parse_time(&path, line, fields[1], "arrival_time")?;
            let departure = parse_time(&path, line, fields[2], "departure_time")?;
            let stop = *stop_index
                .get(fields[3])
                .ok_or_else(|| row_err(&path, line, format!("unknown stop_id {:?}", fields[3])))?;
            let seq: u64 = fields[4]
                .parse()
                .map_err(|_| row_err(&path, line, format!("malformed stop_sequence {:?}", fields[4])))?;
            let last = &mut last_seq[trip as usize];
            if last.is_some_and(|prev| seq <= prev) {
                return Err(row_err(
                    &path,
                    line,
                    format!("non-monotone stop_sequence {seq} for trip {:?}", fields[0]),
                ));
            }
            *last = Some(seq);
            trips[trip as usize].events.push(StopEvent { stop, arrival, departure });
            Ok(())
        })?;
    }

    // transfers.txt (optional): same-stop rows define β(v).
    let transfers = dir.join("transfers.txt");
    if transfers.exists() {
        let file =
            CsvFile::open(dir, "transfers.txt", &["from_stop_id", "to_stop_id", "min_transfer_time"])?;
        let path = file.path.clone();
        let mut seen: Vec<bool> = vec![false; stops.len()];
        file.for_each(|fields, line| {
            if fields[0] != fields[1] {
                return Ok(()); // pairwise transfer times are out of scope
            }
            let stop = *stop_index
                .get(fields[0])
                .ok_or_else(|| row_err(&path, line, format!("unknown stop_id {:?}", fields[0])))?;
            let buffer: u32 = fields[2].parse().map_err(|_| {
                row_err(&path, line, format!("malformed min_transfer_time {:?}", fields[2]))
            })?;
            if std::mem::replace(&mut seen[stop as usize], true) {
                return Err(row_err(
                    &path,
                    line,
                    format!("duplicate buffer row for stop {:?}", fields[0]),
                ));
            }
            stops[stop as usize].buffer = buffer;
            Ok(())
        })?;
    }

    Ok(Timetable { stops, trips })
}

/// Writes a network back out as the GTFS subset read by [`parse_gtfs`].
///
/// The network carries no coordinates, so `stop_lat`/`stop_lon` are written
/// as 0; `stop_sequence` is the event index. Re-parsing and re-assembling
/// with the same graph and mapping reproduces the network exactly.
pub fn write_gtfs(net: &Network, dir: &Path) -> Result<(), GtfsError> {
    let io_err = |path: &Path, source: std::io::Error| GtfsError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let write_file = |name: &str, body: String| -> Result<(), GtfsError> {
        let path = dir.join(name);
        let mut f = File::create(&path).map_err(|e| io_err(&path, e))?;
        f.write_all(body.as_bytes()).map_err(|e| io_err(&path, e))
    };

    let mut stops_txt = String::from("stop_id,stop_lat,stop_lon\n");
    for stop in &net.stops {
        stops_txt.push_str(&format!("{},0,0\n", csv_field(&stop.id)));
    }
    write_file("stops.txt", stops_txt)?;

    let mut trips_txt = String::from("trip_id,route_id\n");
    for trip in &net.trips {
        trips_txt.push_str(&format!("{},{}\n", csv_field(&trip.id), csv_field(&trip.route)));
    }
    write_file("trips.txt", trips_txt)?;

    let mut times_txt = String::from("trip_id,arrival_time,departure_time,stop_id,stop_sequence\n");
    for trip in &net.trips {
        for (seq, ev) in trip.events.iter().enumerate() {
            times_txt.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&trip.id),
                ev.arrival,
                ev.departure,
                csv_field(&net.stops[ev.stop as usize].id),
                seq
            ));
        }
    }
    write_file("stop_times.txt", times_txt)?;

    let mut transfers_txt = String::from("from_stop_id,to_stop_id,min_transfer_time\n");
    for stop in &net.stops {
        if stop.buffer > 0 {
            let id = csv_field(&stop.id);
            transfers_txt.push_str(&format!("{id},{id},{}\n", stop.buffer));
        }
    }
    write_file("transfers.txt", transfers_txt)
}

/// Quotes a CSV field only when needed.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), body).unwrap();
    }

    fn base_feed(dir: &Path) {
        write(dir, "stops.txt", "stop_id,stop_lat,stop_lon\nS1,47.1,8.2\nS2,47.2,8.3\n");
        write(dir, "trips.txt", "trip_id,route_id\nT1,R1\n");
        write(
            dir,
            "stop_times.txt",
            "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n\
             T1,08:00:00,08:05:00,S1,1\nT1,09:00:00,09:00:00,S2,2\n",
        );
    }

    #[test]
    fn parses_buffers_from_self_transfer_rows() {
        let dir = tempfile::tempdir().unwrap();
        base_feed(dir.path());
        write(
            dir.path(),
            "transfers.txt",
            "from_stop_id,to_stop_id,min_transfer_time\nS1,S1,600\nS1,S2,120\n",
        );
        let tt = parse_gtfs(dir.path()).unwrap();
        assert_eq!(tt.stops[0].buffer, 600);
        assert_eq!(tt.stops[1].buffer, 0, "pairwise row must not set a buffer");
        assert_eq!(tt.trips.len(), 1);
        assert_eq!(tt.trips[0].events.len(), 2);
        assert_eq!(tt.trips[0].events[0].departure, Time::from_seconds(29100));
    }

    #[test]
    fn missing_transfers_file_defaults_buffers_to_zero() {
        let dir = tempfile::tempdir().unwrap();
        base_feed(dir.path());
        let tt = parse_gtfs(dir.path()).unwrap();
        assert!(tt.stops.iter().all(|s| s.buffer == 0));
    }

    #[test]
    fn parses_over_midnight_times() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "stops.txt", "stop_id,stop_lat,stop_lon\nS1,0,0\nS2,0,0\n");
        write(dir.path(), "trips.txt", "trip_id,route_id\nT1,R1\n");
        write(
            dir.path(),
            "stop_times.txt",
            "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n\
             T1,23:50:00,23:55:00,S1,0\nT1,25:10:00,25:10:00,S2,1\n",
        );
        let tt = parse_gtfs(dir.path()).unwrap();
        assert_eq!(tt.trips[0].events[1].arrival, Time::from_seconds(90600));
    }

    #[test]
    fn reports_errors_with_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        base_feed(dir.path());
        write(
            dir.path(),
            "stop_times.txt",
            "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n\
             T1,08:00:00,08:05:00,S1,1\nT1,09:00:99,09:00:00,S2,2\n",
        );
        let err = parse_gtfs(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("stop_times.txt") && msg.contains("line 3"), "{msg}");

        write(
            dir.path(),
            "stop_times.txt",
            "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n\
             T1,08:00:00,08:05:00,S9,1\n",
        );
        let err = parse_gtfs(dir.path()).unwrap_err().to_string();
        assert!(err.contains("unknown stop_id"), "{err}");

        write(
            dir.path(),
            "stop_times.txt",
            "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n\
             T1,08:00:00,08:05:00,S1,2\nT1,09:00:00,09:00:00,S2,2\n",
        );
        let err = parse_gtfs(dir.path()).unwrap_err().to_string();
        assert!(err.contains("non-monotone stop_sequence"), "{err}");
    }

    #[test]
    fn missing_required_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "stops.txt", "stop_id,stop_lat,stop_lon\nS1,0,0\n");
        let err = parse_gtfs(dir.path()).unwrap_err().to_string();
        assert!(err.contains("trips.txt"), "{err}");
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        base_feed(dir.path());
        write(dir.path(), "stops.txt", "stop_id,stop_lat\nS1,47.1\n");
        let err = parse_gtfs(dir.path()).unwrap_err().to_string();
        assert!(err.contains("stop_lon"), "{err}");
    }
}
