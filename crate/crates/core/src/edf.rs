//! Minimal EDF(+) codec for single-channel ECG exchange.
//!
//! Supports exactly what the pipeline needs: one ECG signal at an integer
//! sample rate, 16-bit little-endian payloads, and an optional EDF+
//! annotation channel used to mark validity gaps (tracker off / charging).
//! Header byte layout follows the published EDF specification: a 256-byte
//! fixed header followed by 256 bytes per signal, all fields ASCII,
//! left-justified and space-padded.
//!
//! Subject identity and timing are carried in standard header fields: the
//! patient field holds the subject id, the start date encodes the study day
//! (day 1 = 01.01.2000), and the start time encodes whole seconds from day
//! start.

use thiserror::Error;

use crate::signal::{EcgRecording, SubjectId, ValidityMask};

/// Default physical range in millivolts; covers chest-lead ECG amplitudes.
pub const PHYSICAL_RANGE_MV: f64 = 6.0;

const FIXED_HEADER: usize = 256;
const PER_SIGNAL_HEADER: usize = 256;
const ANNOTATION_LABEL: &str = "EDF Annotations";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdfError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("file shorter than the declared payload (need {need} bytes, have {have})")]
    TruncatedPayload { need: usize, have: usize },
    #[error("sample {index} does not fit the physical range")]
    AmplitudeOverflow { index: usize },
    #[error("cannot write an empty recording")]
    EmptyRecording,
}

/// Header of one signal within an EDF file.
#[derive(Debug, Clone, PartialEq)]
pub struct EdfSignalHeader {
    pub label: String,
    pub transducer: String,
    pub physical_dimension: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub prefilter: String,
    pub samples_per_record: usize,
}

impl EdfSignalHeader {
    pub fn is_annotation(&self) -> bool {
        self.label == ANNOTATION_LABEL
    }
}

/// Parsed EDF file header (fixed part plus per-signal headers).
#[derive(Debug, Clone, PartialEq)]
pub struct EdfHeader {
    pub version: String,
    pub patient: String,
    pub recording: String,
    pub start_date: String,
    pub start_time: String,
    pub reserved: String,
    pub n_records: usize,
    pub record_duration_s: f64,
    pub signals: Vec<EdfSignalHeader>,
}

impl EdfHeader {
    pub fn header_bytes(&self) -> usize {
        FIXED_HEADER + PER_SIGNAL_HEADER * self.signals.len()
    }
}

/// A fully parsed EDF file: header plus raw digital payload per signal.
#[derive(Debug, Clone)]
pub struct EdfFile {
    pub header: EdfHeader,
    /// One payload per signal, records concatenated.
    pub payloads: Vec<Vec<i16>>,
}

fn ascii_field(buf: &mut Vec<u8>, value: &str, width: usize) {
    let mut bytes: Vec<u8> = value
        .bytes()
        .map(|b| if (32..=126).contains(&b) { b } else { b' ' })
        .collect();
    bytes.truncate(width);
    bytes.resize(width, b' ');
    buf.extend_from_slice(&bytes);
}

fn read_field(bytes: &[u8], offset: usize, width: usize) -> String {
    String::from_utf8_lossy(&bytes[offset..offset + width])
        .trim()
        .to_string()
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, EdfError> {
    s.parse::<T>()
        .map_err(|_| EdfError::MalformedHeader(format!("cannot parse {what}: {s:?}")))
}

// Civil date conversions (days relative to 1970-01-01, proleptic Gregorian).
fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = i64::from(if m > 2 { m - 3 } else { m + 9 });
    let doy = (153 * mp + 2) / 5 + i64::from(d) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719468;
    let era = if z >= 0 { z } else { z - 146096 } / 146097;
    let doe = z - era * 146097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

const DAY1_EPOCH: i64 = 10957; // 2000-01-01, the date that encodes study day 1

fn date_field_for_day(day_index: u32) -> String {
    let (y, m, d) = civil_from_days(DAY1_EPOCH + i64::from(day_index) - 1);
    format!("{d:02}.{m:02}.{:02}", y.rem_euclid(100))
}

fn day_from_date_field(field: &str) -> Option<u32> {
    let mut it = field.split('.');
    let d: u32 = it.next()?.parse().ok()?;
    let m: u32 = it.next()?.parse().ok()?;
    let yy: i64 = it.next()?.parse().ok()?;
    // EDF convention: yy in 85..=99 means 19xx, otherwise 20xx.
    let y = if yy >= 85 { 1900 + yy } else { 2000 + yy };
    let day = days_from_civil(y, m, d) - DAY1_EPOCH + 1;
    u32::try_from(day).ok()
}

fn time_field_for_offset(start_offset: f64) -> String {
    let total = (start_offset.max(0.0).floor() as u64) % 86_400;
    format!("{:02}.{:02}.{:02}", total / 3600, (total / 60) % 60, total % 60)
}

fn offset_from_time_field(field: &str) -> Option<f64> {
    let mut it = field.split('.');
    let h: u64 = it.next()?.parse().ok()?;
    let m: u64 = it.next()?.parse().ok()?;
    let s: u64 = it.next()?.parse().ok()?;
    Some((h * 3600 + m * 60 + s) as f64)
}

/// Formats seconds for a TAL timestamp; dyadic offsets print exactly.
fn tal_seconds(x: f64) -> String {
    format!("{x}")
}

/// Parses the raw bytes of an EDF(+) file into header and digital payloads.
pub fn parse_edf(bytes: &[u8]) -> Result<EdfFile, EdfError> {
    if bytes.len() < FIXED_HEADER {
        return Err(EdfError::MalformedHeader(format!(
            "file too short for a header: {} bytes",
            bytes.len()
        )));
    }
    let version = read_field(bytes, 0, 8);
    if version != "0" {
        return Err(EdfError::MalformedHeader(format!(
            "unexpected version field {version:?}"
        )));
    }
    let patient = read_field(bytes, 8, 80);
    let recording = read_field(bytes, 88, 80);
    let start_date = read_field(bytes, 168, 8);
    let start_time = read_field(bytes, 176, 8);
    let header_bytes: usize = parse_num(&read_field(bytes, 184, 8), "header byte count")?;
    let reserved = read_field(bytes, 192, 44);
    let n_records: i64 = parse_num(&read_field(bytes, 236, 8), "record count")?;
    let record_duration_s: f64 = parse_num(&read_field(bytes, 244, 8), "record duration")?;
    let ns: usize = parse_num(&read_field(bytes, 252, 4), "signal count")?;
    if ns == 0 {
        return Err(EdfError::MalformedHeader("no signals".into()));
    }
    if header_bytes != FIXED_HEADER + PER_SIGNAL_HEADER * ns {
        return Err(EdfError::MalformedHeader(format!(
            "header byte count {header_bytes} disagrees with {ns} signals"
        )));
    }
    if bytes.len() < header_bytes {
        return Err(EdfError::TruncatedPayload {
            need: header_bytes,
            have: bytes.len(),
        });
    }
    if n_records < 0 {
        return Err(EdfError::UnsupportedFeature(
            "unknown record count (-1) is not supported".into(),
        ));
    }
    let n_records = n_records as usize;

    // Per-signal headers are grouped by field, not by signal.
    let mut signals = Vec::with_capacity(ns);
    let base = FIXED_HEADER;
    for i in 0..ns {
        let field = |group_offset: usize, width: usize| {
            read_field(bytes, base + group_offset + i * width, width)
        };
        let header = EdfSignalHeader {
            label: field(0, 16),
            transducer: field(ns * 16, 80),
            physical_dimension: field(ns * 96, 8),
            physical_min: parse_num(&field(ns * 104, 8), "physical min")?,
            physical_max: parse_num(&field(ns * 112, 8), "physical max")?,
            digital_min: parse_num(&field(ns * 120, 8), "digital min")?,
            digital_max: parse_num(&field(ns * 128, 8), "digital max")?,
            prefilter: field(ns * 136, 80),
            samples_per_record: parse_num(&field(ns * 216, 8), "samples per record")?,
        };
        if header.physical_min >= header.physical_max {
            return Err(EdfError::MalformedHeader(format!(
                "signal {i}: physical range is empty"
            )));
        }
        if header.digital_min >= header.digital_max {
            return Err(EdfError::MalformedHeader(format!(
                "signal {i}: digital range is empty"
            )));
        }
        signals.push(header);
    }

    let record_bytes: usize = signals.iter().map(|s| s.samples_per_record * 2).sum();
    let need = header_bytes + n_records * record_bytes;
    if bytes.len() < need {
        return Err(EdfError::TruncatedPayload {
            need,
            have: bytes.len(),
        });
    }

    let mut payloads: Vec<Vec<i16>> = signals
        .iter()
        .map(|s| Vec::with_capacity(s.samples_per_record * n_records))
        .collect();
    let mut pos = header_bytes;
    for _ in 0..n_records {
        for (sig, payload) in signals.iter().zip(payloads.iter_mut()) {
            for _ in 0..sig.samples_per_record {
                payload.push(i16::from_le_bytes([bytes[pos], bytes[pos + 1]]));
                pos += 2;
            }
        }
    }

    Ok(EdfFile {
        header: EdfHeader {
            version,
            patient,
            recording,
            start_date,
            start_time,
            reserved,
            n_records,
            record_duration_s,
            signals,
        },
        payloads,
    })
}

/// One time-stamped annotation parsed from an EDF+ annotation channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub onset_s: f64,
    pub duration_s: f64,
    pub text: String,
}

/// Extracts TAL annotations from an annotation signal's raw payload.
fn parse_annotations(payload: &[i16]) -> Vec<Annotation> {
    let mut bytes = Vec::with_capacity(payload.len() * 2);
    for v in payload {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let mut out = Vec::new();
    for chunk in bytes.split(|&b| b == 0) {
        if chunk.is_empty() {
            continue;
        }
        let text = String::from_utf8_lossy(chunk).into_owned();
        let mut parts = text.split('\u{14}');
        let Some(time_spec) = parts.next() else {
            continue;
        };
        let (onset_str, duration_str) = match time_spec.split_once('\u{15}') {
            Some((o, d)) => (o, Some(d)),
            None => (time_spec, None),
        };
        let Ok(onset_s) = onset_str.parse::<f64>() else {
            continue;
        };
        let duration_s = duration_str.and_then(|d| d.parse::<f64>().ok()).unwrap_or(0.0);
        for ann in parts {
            if !ann.is_empty() {
                out.push(Annotation {
                    onset_s,
                    duration_s,
                    text: ann.to_string(),
                });
            }
        }
    }
    out
}

/// Reads an EDF(+) byte stream into a recording.
///
/// The first ECG-labeled signal is taken (falling back to the first
/// non-annotation signal); digital values are converted to physical units by
/// linear scaling. The validity mask is all-true except where an annotation
/// channel marks a gap (any annotation with positive duration).
pub fn read_edf(bytes: &[u8]) -> Result<EcgRecording, EdfError> {
    let file = parse_edf(bytes)?;
    let header = &file.header;

    let ecg_index = header
        .signals
        .iter()
        .position(|s| s.label.to_ascii_uppercase().contains("ECG"))
        .or_else(|| header.signals.iter().position(|s| !s.is_annotation()))
        .ok_or_else(|| EdfError::UnsupportedFeature("no ECG signal in file".into()))?;
    let sig = &header.signals[ecg_index];

    if header.record_duration_s <= 0.0 {
        return Err(EdfError::MalformedHeader("non-positive record duration".into()));
    }
    let rate = sig.samples_per_record as f64 / header.record_duration_s;
    if rate <= 0.0 || (rate - rate.round()).abs() > 1e-9 {
        return Err(EdfError::UnsupportedFeature(format!(
            "non-integer sample rate {rate}"
        )));
    }
    let sample_rate = rate.round() as u32;

    let gain = (sig.physical_max - sig.physical_min)
        / f64::from(sig.digital_max - sig.digital_min);
    let samples: Vec<f64> = file.payloads[ecg_index]
        .iter()
        .map(|&d| (f64::from(d) - f64::from(sig.digital_min)) * gain + sig.physical_min)
        .collect();

    let mut validity = ValidityMask::all_valid(samples.len());
    for (i, sig) in header.signals.iter().enumerate() {
        if !sig.is_annotation() {
            continue;
        }
        for ann in parse_annotations(&file.payloads[i]) {
            if ann.duration_s > 0.0 {
                let from = (ann.onset_s * f64::from(sample_rate)).round().max(0.0) as usize;
                let to =
                    ((ann.onset_s + ann.duration_s) * f64::from(sample_rate)).round() as usize;
                for v in validity.0.iter_mut().take(to.min(samples.len())).skip(from) {
                    *v = false;
                }
            }
        }
    }

    let subject_id = if header.patient.is_empty() || header.patient == "X" {
        SubjectId::new("unknown")
    } else {
        SubjectId::new(header.patient.split_whitespace().next().unwrap_or("unknown"))
    };
    let day_index = day_from_date_field(&header.start_date).unwrap_or(1);
    let start_offset = offset_from_time_field(&header.start_time).unwrap_or(0.0);

    Ok(EcgRecording {
        samples,
        sample_rate,
        subject_id,
        day_index,
        start_offset,
        validity,
    })
}

/// Serializes a recording as a one-ECG-signal EDF file.
///
/// Validity gaps (and any final-record padding) are written as an EDF+
/// annotation channel with duration-carrying "gap" annotations. Output is
/// deterministic: identical recordings produce identical bytes.
pub fn write_edf(recording: &EcgRecording) -> Result<Vec<u8>, EdfError> {
    recording.assert_well_formed();
    if recording.is_empty() {
        return Err(EdfError::EmptyRecording);
    }
    let fs = recording.sample_rate as usize;
    let n = recording.len();
    let n_records = n.div_ceil(fs);
    let padded = n_records * fs;

    // Digital conversion against the fixed +-6 mV range.
    let pmin = -PHYSICAL_RANGE_MV;
    let pmax = PHYSICAL_RANGE_MV;
    let (dmin, dmax) = (-32768i32, 32767i32);
    let gain = (pmax - pmin) / f64::from(dmax - dmin);
    let mut digital = Vec::with_capacity(padded);
    for (index, &x) in recording.samples.iter().enumerate() {
        let d = ((x - pmin) / gain).round() as i64 + i64::from(dmin);
        if d < i64::from(dmin) || d > i64::from(dmax) {
            return Err(EdfError::AmplitudeOverflow { index });
        }
        digital.push(d as i16);
    }
    // Pad the final partial record by replicating the last sample; the pad
    // is marked invalid below.
    let last = *digital.last().expect("non-empty");
    digital.resize(padded, last);

    // Gap annotations: invalid runs of the mask, plus the pad region.
    let mut gaps: Vec<(usize, usize)> = Vec::new(); // (start, len) in samples
    let mut run: Option<usize> = None;
    for i in 0..=n {
        let invalid = i < n && !recording.validity.0[i];
        match (run, invalid) {
            (None, true) => run = Some(i),
            (Some(s), false) => {
                gaps.push((s, i - s));
                run = None;
            }
            _ => {}
        }
    }
    if padded > n {
        if let Some(lastgap) = gaps.last_mut() {
            if lastgap.0 + lastgap.1 == n {
                lastgap.1 += padded - n;
            } else {
                gaps.push((n, padded - n));
            }
        } else {
            gaps.push((n, padded - n));
        }
    }

    let with_annotations = !gaps.is_empty();

    // Lay out TALs per record: a timekeeping TAL in every record, plus each
    // gap in the record containing its onset.
    let mut record_tals: Vec<Vec<u8>> = Vec::with_capacity(n_records);
    if with_annotations {
        let fsf = f64::from(recording.sample_rate);
        for r in 0..n_records {
            let mut tal = Vec::new();
            tal.extend_from_slice(format!("+{r}\u{14}\u{14}\0").as_bytes());
            for &(start, len) in &gaps {
                if start / fs == r {
                    let onset = start as f64 / fsf;
                    let duration = len as f64 / fsf;
                    tal.extend_from_slice(
                        format!(
                            "+{}\u{15}{}\u{14}gap\u{14}\0",
                            tal_seconds(onset),
                            tal_seconds(duration)
                        )
                        .as_bytes(),
                    );
                }
            }
            record_tals.push(tal);
        }
    }
    let ann_spr = if with_annotations {
        let max_bytes = record_tals.iter().map(Vec::len).max().unwrap_or(0);
        max_bytes.div_ceil(2).max(8)
    } else {
        0
    };

    let ns = if with_annotations { 2 } else { 1 };
    let mut out = Vec::new();

    // Fixed header.
    ascii_field(&mut out, "0", 8);
    ascii_field(&mut out, recording.subject_id.as_str(), 80);
    ascii_field(&mut out, "ecg field recording", 80);
    ascii_field(&mut out, &date_field_for_day(recording.day_index), 8);
    ascii_field(&mut out, &time_field_for_offset(recording.start_offset), 8);
    ascii_field(
        &mut out,
        &(FIXED_HEADER + PER_SIGNAL_HEADER * ns).to_string(),
        8,
    );
    ascii_field(&mut out, if with_annotations { "EDF+C" } else { "" }, 44);
    ascii_field(&mut out, &n_records.to_string(), 8);
    ascii_field(&mut out, "1", 8);
    ascii_field(&mut out, &ns.to_string(), 4);

    // Per-signal headers, grouped by field.
    let labels: Vec<&str> = if with_annotations {
        vec!["ECG", ANNOTATION_LABEL]
    } else {
        vec!["ECG"]
    };
    for label in &labels {
        ascii_field(&mut out, label, 16);
    }
    for _ in 0..ns {
        ascii_field(&mut out, "", 80); // transducer
    }
    ascii_field(&mut out, "mV", 8);
    if with_annotations {
        ascii_field(&mut out, "", 8);
    }
    for i in 0..ns {
        ascii_field(&mut out, if i == 0 { "-6" } else { "-1" }, 8);
    }
    for i in 0..ns {
        ascii_field(&mut out, if i == 0 { "6" } else { "1" }, 8);
    }
    for _ in 0..ns {
        ascii_field(&mut out, "-32768", 8);
    }
    for _ in 0..ns {
        ascii_field(&mut out, "32767", 8);
    }
    for _ in 0..ns {
        ascii_field(&mut out, "", 80); // prefiltering
    }
    ascii_field(&mut out, &fs.to_string(), 8);
    if with_annotations {
        ascii_field(&mut out, &ann_spr.to_string(), 8);
    }
    for _ in 0..ns {
        ascii_field(&mut out, "", 32); // reserved
    }

    // Data records.
    for r in 0..n_records {
        for &d in &digital[r * fs..(r + 1) * fs] {
            out.extend_from_slice(&d.to_le_bytes());
        }
        if with_annotations {
            let tal = &record_tals[r];
            let mut block = vec![0u8; ann_spr * 2];
            block[..tal.len()].copy_from_slice(tal);
            out.extend_from_slice(&block);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quantization_step() -> f64 {
        2.0 * PHYSICAL_RANGE_MV / 65535.0
    }

    fn make_recording(samples: Vec<f64>, fs: u32, day: u32) -> EcgRecording {
        let mut r = EcgRecording::new(samples, fs, SubjectId::new("s07"), day);
        r.start_offset = 3723.0; // 01:02:03
        r
    }

    #[test]
    fn roundtrip_preserves_samples_and_identity() {
        let samples: Vec<f64> = (0..512).map(|i| (i as f64 / 40.0).sin() * 2.0).collect();
        let rec = make_recording(samples, 256, 3);
        let bytes = write_edf(&rec).unwrap();
        let back = read_edf(&bytes).unwrap();

        assert_eq!(back.len(), rec.len());
        assert_eq!(back.sample_rate, 256);
        assert_eq!(back.subject_id, rec.subject_id);
        assert_eq!(back.day_index, 3);
        assert!((back.start_offset - 3723.0).abs() < 1e-9);
        let max_err = rec
            .samples
            .iter()
            .zip(&back.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err <= quantization_step(), "max error {max_err}");
        assert!(back.validity.0.iter().all(|&v| v));
    }

    #[test]
    fn gapless_one_second_file_has_expected_size() {
        let rec = make_recording(vec![0.0; 256], 256, 1);
        let bytes = write_edf(&rec).unwrap();
        // One signal: 512 header bytes plus 256 two-byte samples.
        assert_eq!(bytes.len(), 512 + 512);
    }

    #[test]
    fn writing_is_deterministic() {
        let samples: Vec<f64> = (0..768).map(|i| ((i * 7) % 100) as f64 / 50.0).collect();
        let mut rec = make_recording(samples, 256, 2);
        for i in 300..400 {
            rec.validity.0[i] = false;
        }
        assert_eq!(write_edf(&rec).unwrap(), write_edf(&rec).unwrap());
    }

    #[test]
    fn empty_recording_is_rejected() {
        let rec = make_recording(vec![], 256, 1);
        assert_eq!(write_edf(&rec).unwrap_err(), EdfError::EmptyRecording);
    }

    #[test]
    fn overflowing_amplitude_is_rejected() {
        let rec = make_recording(vec![0.0, 7.5, 0.0, 0.0], 2, 1);
        assert!(matches!(
            write_edf(&rec),
            Err(EdfError::AmplitudeOverflow { index: 1 })
        ));
    }

    #[test]
    fn truncated_payload_is_detected() {
        let rec = make_recording(vec![0.1; 512], 256, 1);
        let bytes = write_edf(&rec).unwrap();
        let cut = &bytes[..bytes.len() - 10];
        assert!(matches!(
            read_edf(cut),
            Err(EdfError::TruncatedPayload { .. })
        ));
    }

    #[test]
    fn bad_version_is_malformed() {
        let rec = make_recording(vec![0.1; 256], 256, 1);
        let mut bytes = write_edf(&rec).unwrap();
        bytes[0] = b'9';
        assert!(matches!(read_edf(&bytes), Err(EdfError::MalformedHeader(_))));
    }

    /// Hand-constructed two-record file checked against EDF field offsets.
    #[test]
    fn hand_built_header_parses_to_declared_geometry() {
        let mut bytes = Vec::new();
        ascii_field(&mut bytes, "0", 8);
        ascii_field(&mut bytes, "p1", 80);
        ascii_field(&mut bytes, "rec", 80);
        ascii_field(&mut bytes, "02.01.00", 8);
        ascii_field(&mut bytes, "00.00.10", 8);
        ascii_field(&mut bytes, "512", 8);
        ascii_field(&mut bytes, "", 44);
        ascii_field(&mut bytes, "2", 8); // two records
        ascii_field(&mut bytes, "1", 8); // one second each
        ascii_field(&mut bytes, "1", 4);
        ascii_field(&mut bytes, "ECG", 16);
        ascii_field(&mut bytes, "", 80);
        ascii_field(&mut bytes, "mV", 8);
        ascii_field(&mut bytes, "-6", 8);
        ascii_field(&mut bytes, "6", 8);
        ascii_field(&mut bytes, "-32768", 8);
        ascii_field(&mut bytes, "32767", 8);
        ascii_field(&mut bytes, "", 80);
        ascii_field(&mut bytes, "256", 8); // 256 samples per record
        ascii_field(&mut bytes, "", 32);
        assert_eq!(bytes.len(), 512);
        bytes.extend(std::iter::repeat(0u8).take(512 * 2));

        let rec = read_edf(&bytes).unwrap();
        assert_eq!(rec.len(), 512);
        assert_eq!(rec.sample_rate, 256);
        assert_eq!(rec.day_index, 2);
        assert!((rec.start_offset - 10.0).abs() < 1e-9);
    }

    #[test]
    fn gaps_come_back_as_invalid_samples() {
        let mut rec = make_recording(vec![0.5; 1024], 256, 4);
        for i in 100..300 {
            rec.validity.0[i] = false;
        }
        for i in 900..1000 {
            rec.validity.0[i] = false;
        }
        let bytes = write_edf(&rec).unwrap();
        let back = read_edf(&bytes).unwrap();
        assert_eq!(back.validity, rec.validity);
    }

    #[test]
    fn ragged_length_pads_with_invalid_tail() {
        let rec = make_recording(vec![0.25; 300], 256, 1);
        let bytes = write_edf(&rec).unwrap();
        let back = read_edf(&bytes).unwrap();
        assert_eq!(back.len(), 512);
        assert!(back.validity.0[..300].iter().all(|&v| v));
        assert!(back.validity.0[300..].iter().all(|&v| !v));
        for &x in &back.samples[..300] {
            assert!((x - 0.25).abs() <= quantization_step());
        }
    }

    #[test]
    fn date_field_roundtrips_study_days() {
        for day in [1, 2, 7, 31, 32, 365, 366, 400] {
            let field = date_field_for_day(day);
            assert_eq!(day_from_date_field(&field), Some(day), "field {field}");
        }
        assert_eq!(date_field_for_day(1), "01.01.00");
        assert_eq!(date_field_for_day(32), "01.02.00");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn roundtrip_error_is_bounded_by_quantization(
            seconds in 1usize..4,
            seed in any::<u64>(),
            gap in prop::option::of((0usize..700, 1usize..200)),
        ) {
            let fs = 256usize;
            let n = seconds * fs;
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64 - 1.0) * 5.9
            };
            let samples: Vec<f64> = (0..n).map(|_| next()).collect();
            let mut rec = make_recording(samples, 256, 5);
            if let Some((start, len)) = gap {
                let end = (start + len).min(n);
                for i in start.min(n)..end {
                    rec.validity.0[i] = false;
                }
            }
            let bytes = write_edf(&rec).unwrap();
            let back = read_edf(&bytes).unwrap();
            prop_assert_eq!(back.len(), rec.len());
            prop_assert_eq!(&back.validity, &rec.validity);
            for (a, b) in rec.samples.iter().zip(&back.samples) {
                prop_assert!((a - b).abs() <= quantization_step());
            }
        }
    }
}
