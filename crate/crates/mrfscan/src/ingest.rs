//! Ingestion of binary voting records: reading raw vote matrices with
//! missing entries, assigning voters to parties over date ranges, filtering
//! near-unanimous votes, and imputing the missing entries so the result can
//! be analysed as a binary dataset.
//!
//! A raw vote matrix has one row per ballot and one column per seat; cells
//! are `1`, `0`, or a configurable missing marker. An optional leading date
//! column carries ISO dates (`YYYY-MM-DD`), which party membership spans are
//! matched against by plain string comparison — lexicographic order agrees
//! with chronological order for ISO dates.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Dataset;

// ---------------------------------------------------------------------------
// Raw votes
// ---------------------------------------------------------------------------

/// A ballot matrix with possibly missing entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVotes {
    seats: Vec<String>,
    dates: Option<Vec<String>>,
    votes: Vec<Option<u8>>, // row-major, n_rows x seats.len()
}

impl RawVotes {
    /// Wraps parts; `votes` is row-major with one entry per seat per row,
    /// and `dates`, when present, has one entry per row.
    pub fn from_parts(
        seats: Vec<String>,
        dates: Option<Vec<String>>,
        votes: Vec<Option<u8>>,
    ) -> Result<Self> {
        if seats.is_empty() {
            return Err(Error::data("a vote matrix needs at least one seat"));
        }
        if votes.is_empty() || votes.len() % seats.len() != 0 {
            return Err(Error::data(format!(
                "{} vote cells do not fill rows of {} seats",
                votes.len(),
                seats.len()
            )));
        }
        if let Some(v) = votes.iter().flatten().find(|&&v| v > 1) {
            return Err(Error::data(format!("votes must be 0 or 1, got {v}")));
        }
        let n_rows = votes.len() / seats.len();
        if let Some(dates) = &dates {
            if dates.len() != n_rows {
                return Err(Error::data(format!(
                    "{} dates for {n_rows} ballot rows",
                    dates.len()
                )));
            }
        }
        Ok(RawVotes { seats, dates, votes })
    }

    /// Number of ballot rows.
    pub fn n_rows(&self) -> usize {
        self.votes.len() / self.seats.len()
    }

    /// Number of seats (columns).
    pub fn n_seats(&self) -> usize {
        self.seats.len()
    }

    /// Seat names in column order.
    pub fn seats(&self) -> &[String] {
        &self.seats
    }

    /// Ballot dates, when the source had a date column.
    pub fn dates(&self) -> Option<&[String]> {
        self.dates.as_deref()
    }

    /// The vote of seat `j` on ballot `t` (0-based), `None` when missing.
    pub fn vote(&self, t: usize, j: usize) -> Option<u8> {
        self.votes[t * self.seats.len() + j]
    }

    /// Reads a CSV vote matrix. The header names the seats; when
    /// `has_date_column` is true the first column holds ballot dates instead
    /// of votes. Cells must be `1`, `0`, or `na_marker` (after trimming).
    pub fn read_csv(path: impl AsRef<Path>, na_marker: &str, has_date_column: bool) -> Result<Self> {
        let file = std::fs::File::open(&path)?;
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(std::io::BufReader::new(file));
        let header = rdr.headers()?.clone();
        let first_vote_col = usize::from(has_date_column);
        if header.len() <= first_vote_col {
            return Err(Error::data("vote CSV has no seat columns"));
        }
        let seats: Vec<String> =
            header.iter().skip(first_vote_col).map(|s| s.trim().to_string()).collect();
        let mut dates = has_date_column.then(Vec::new);
        let mut votes = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if let Some(dates) = &mut dates {
                dates.push(record[0].trim().to_string());
            }
            for cell in record.iter().skip(first_vote_col) {
                let cell = cell.trim();
                votes.push(match cell {
                    "1" => Some(1),
                    "0" => Some(0),
                    _ if cell == na_marker => None,
                    _ => {
                        return Err(Error::data(format!(
                            "row {}: cell {cell:?} is not 1, 0, or {na_marker:?}",
                            i + 2
                        )))
                    }
                });
            }
        }
        RawVotes::from_parts(seats, dates, votes)
    }
}

// ---------------------------------------------------------------------------
// Party membership
// ---------------------------------------------------------------------------

/// One seat's party membership over a date range (inclusive ends).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartySpan {
    /// Seat name, matching a vote matrix column.
    pub seat: String,
    /// First day of the span, ISO format.
    pub start: String,
    /// Last day of the span, ISO format.
    pub end: String,
    /// Party label.
    pub party: String,
}

/// Party membership table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartySpans {
    spans: Vec<PartySpan>,
}

impl PartySpans {
    /// Wraps a list of spans.
    pub fn new(spans: Vec<PartySpan>) -> Result<Self> {
        if spans.is_empty() {
            return Err(Error::data("the party table must not be empty"));
        }
        for s in &spans {
            if s.start > s.end {
                return Err(Error::data(format!(
                    "seat {:?}: span start {:?} is after its end {:?}",
                    s.seat, s.start, s.end
                )));
            }
        }
        Ok(PartySpans { spans })
    }

    /// Reads the CSV form: header `seat,start,end,party`, one span per row.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(&path)?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let mut spans = Vec::new();
        for record in rdr.records() {
            let record = record?;
            if record.len() < 4 {
                return Err(Error::data("party CSV rows need seat, start, end, and party"));
            }
            spans.push(PartySpan {
                seat: record[0].trim().to_string(),
                start: record[1].trim().to_string(),
                end: record[2].trim().to_string(),
                party: record[3].trim().to_string(),
            });
        }
        PartySpans::new(spans)
    }

    /// The party of `seat` on `date`, or — when the vote matrix has no date
    /// column — the seat's unique party across all its spans.
    pub fn party(&self, seat: &str, date: Option<&str>) -> Result<&str> {
        let mut of_seat = self.spans.iter().filter(|s| s.seat == seat).peekable();
        if of_seat.peek().is_none() {
            return Err(Error::data(format!("seat {seat:?} is not in the party table")));
        }
        match date {
            Some(date) => of_seat
                .find(|s| s.start.as_str() <= date && date <= s.end.as_str())
                .map(|s| s.party.as_str())
                .ok_or_else(|| {
                    Error::data(format!("no party span covers seat {seat:?} on {date}"))
                }),
            None => {
                let mut parties = of_seat.map(|s| s.party.as_str());
                let first = parties.next().expect("peeked non-empty");
                if parties.all(|p| p == first) {
                    Ok(first)
                } else {
                    Err(Error::data(format!(
                        "seat {seat:?} changes party over time; undated votes cannot be assigned"
                    )))
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Conformity filter
// ---------------------------------------------------------------------------

/// What the conformity filter did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    /// Rows kept.
    pub kept: usize,
    /// Rows dropped.
    pub dropped: usize,
    /// 1-based indices of the dropped rows in the input.
    pub dropped_rows: Vec<usize>,
}

/// Drops near-unanimous ballots: a row is removed when the share of its
/// majority value among non-missing votes is at least `max_conformity`
/// (which must lie in `(0.5, 1]`). Rows with no votes at all carry no
/// conformity signal and are kept. Errors if every row would be dropped.
pub fn conformity_filter(
    votes: &RawVotes,
    max_conformity: f64,
) -> Result<(RawVotes, FilterReport)> {
    if !(max_conformity > 0.5 && max_conformity <= 1.0) {
        return Err(Error::config(format!(
            "max conformity must lie in (0.5, 1], got {max_conformity}"
        )));
    }
    let p = votes.n_seats();
    let mut kept_votes = Vec::new();
    let mut kept_dates = votes.dates.as_ref().map(|_| Vec::new());
    let mut dropped_rows = Vec::new();
    for t in 0..votes.n_rows() {
        let mut yea = 0usize;
        let mut nay = 0usize;
        for j in 0..p {
            match votes.vote(t, j) {
                Some(1) => yea += 1,
                Some(_) => nay += 1,
                None => {}
            }
        }
        let total = yea + nay;
        let drop = total > 0 && (yea.max(nay) as f64 / total as f64) >= max_conformity;
        if drop {
            dropped_rows.push(t + 1);
        } else {
            kept_votes.extend((0..p).map(|j| votes.vote(t, j)));
            if let (Some(dates), Some(src)) = (&mut kept_dates, &votes.dates) {
                dates.push(src[t].clone());
            }
        }
    }
    if kept_votes.is_empty() {
        return Err(Error::data(format!(
            "every ballot is at least {max_conformity:.2} conformal; nothing left to analyse"
        )));
    }
    let report = FilterReport {
        kept: kept_votes.len() / p,
        dropped: dropped_rows.len(),
        dropped_rows,
    };
    Ok((RawVotes::from_parts(votes.seats.clone(), kept_dates, kept_votes)?, report))
}

// ---------------------------------------------------------------------------
// Imputation
// ---------------------------------------------------------------------------

/// How a missing vote is filled in. All rules fill with the majority value
/// of a reference group on the same ballot, breaking ties towards 1, and
/// fail when the reference group cast no votes on that ballot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImputeRule {
    /// Majority of the seat's own party.
    OwnPartyMajority,
    /// Majority of the whole ballot.
    WinningMajority,
    /// Majority of all other parties.
    OppositePartyMajority,
}

/// Fills every missing vote per [`ImputeRule`] and returns the completed
/// binary dataset, with seats as node labels and dates (when present) as
/// time labels. The party table is required by the party-based rules.
pub fn impute(
    votes: &RawVotes,
    parties: Option<&PartySpans>,
    rule: ImputeRule,
) -> Result<Dataset> {
    let p = votes.n_seats();
    let needs_parties = !matches!(rule, ImputeRule::WinningMajority);
    if needs_parties && parties.is_none() {
        return Err(Error::config("this imputation rule needs a party table"));
    }
    let mut filled = Vec::with_capacity(votes.n_rows() * p);
    for t in 0..votes.n_rows() {
        let date = votes.dates().map(|d| d[t].as_str());
        // Party per seat for this ballot, resolved only when needed.
        let row_party = |j: usize| -> Result<String> {
            parties
                .expect("checked above")
                .party(&votes.seats[j], date)
                .map(str::to_string)
        };
        for j in 0..p {
            let value = match votes.vote(t, j) {
                Some(v) => v,
                None => {
                    let mut yea = 0usize;
                    let mut nay = 0usize;
                    let own = if needs_parties { Some(row_party(j)?) } else { None };
                    for k in 0..p {
                        let Some(v) = votes.vote(t, k) else { continue };
                        let include = match rule {
                            ImputeRule::WinningMajority => true,
                            ImputeRule::OwnPartyMajority => {
                                row_party(k)? == *own.as_ref().expect("resolved above")
                            }
                            ImputeRule::OppositePartyMajority => {
                                row_party(k)? != *own.as_ref().expect("resolved above")
                            }
                        };
                        if include {
                            if v == 1 {
                                yea += 1;
                            } else {
                                nay += 1;
                            }
                        }
                    }
                    if yea + nay == 0 {
                        return Err(Error::data(format!(
                            "ballot row {} has no reference votes to impute seat {:?} from",
                            t + 1,
                            votes.seats[j]
                        )));
                    }
                    u8::from(yea >= nay) // ties fill with 1
                }
            };
            filled.push(value);
        }
    }
    let mut data = Dataset::from_flat(p, filled)?.with_node_labels(votes.seats.clone())?;
    if let Some(dates) = votes.dates() {
        data = data.with_time_labels(dates.to_vec())?;
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans() -> PartySpans {
        PartySpans::new(vec![
            PartySpan {
                seat: "s1".into(),
                start: "2004-01-01".into(),
                end: "2004-12-31".into(),
                party: "red".into(),
            },
            PartySpan {
                seat: "s2".into(),
                start: "2004-01-01".into(),
                end: "2004-12-31".into(),
                party: "red".into(),
            },
            PartySpan {
                seat: "s3".into(),
                start: "2004-01-01".into(),
                end: "2004-06-30".into(),
                party: "blue".into(),
            },
            PartySpan {
                seat: "s3".into(),
                start: "2004-07-01".into(),
                end: "2004-12-31".into(),
                party: "red".into(),
            },
            PartySpan {
                seat: "s4".into(),
                start: "2004-01-01".into(),
                end: "2004-12-31".into(),
                party: "blue".into(),
            },
        ])
        .unwrap()
    }

    fn votes_csv(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
        let path = dir.join("votes.csv");
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn reads_vote_matrices_with_and_without_dates() {
        let dir = tempfile::tempdir().unwrap();
        let path = votes_csv(
            dir.path(),
            "date,s1,s2,s3\n2004-01-05,1,0,NA\n2004-02-10,0,0,1\n",
        );
        let v = RawVotes::read_csv(&path, "NA", true).unwrap();
        assert_eq!(v.n_rows(), 2);
        assert_eq!(v.n_seats(), 3);
        assert_eq!(v.seats(), &["s1", "s2", "s3"]);
        assert_eq!(v.dates().unwrap(), &["2004-01-05", "2004-02-10"]);
        assert_eq!(v.vote(0, 0), Some(1));
        assert_eq!(v.vote(0, 2), None);
        assert_eq!(v.vote(1, 2), Some(1));

        let bare = votes_csv(dir.path(), "s1,s2\n1,0\nNA,1\n");
        let v2 = RawVotes::read_csv(&bare, "NA", false).unwrap();
        assert_eq!(v2.n_rows(), 2);
        assert!(v2.dates().is_none());
        assert_eq!(v2.vote(1, 0), None);

        // A different missing marker.
        let dotted = votes_csv(dir.path(), "s1,s2\n1,.\n0,1\n");
        let v3 = RawVotes::read_csv(&dotted, ".", false).unwrap();
        assert_eq!(v3.vote(0, 1), None);

        let bad = votes_csv(dir.path(), "s1,s2\n1,2\n");
        let err = RawVotes::read_csv(&bad, "NA", false).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn party_lookup_follows_date_ranges() {
        let p = spans();
        assert_eq!(p.party("s1", Some("2004-05-01")).unwrap(), "red");
        assert_eq!(p.party("s3", Some("2004-06-30")).unwrap(), "blue");
        assert_eq!(p.party("s3", Some("2004-07-01")).unwrap(), "red");
        assert!(p.party("s3", Some("2005-01-01")).is_err()); // no span
        assert!(p.party("s9", Some("2004-05-01")).is_err()); // unknown seat

        // Undated votes: fine for single-party seats, an error for movers.
        assert_eq!(p.party("s1", None).unwrap(), "red");
        assert!(p.party("s3", None).is_err());

        assert!(PartySpans::new(vec![PartySpan {
            seat: "x".into(),
            start: "2004-02-01".into(),
            end: "2004-01-01".into(),
            party: "red".into(),
        }])
        .is_err());
    }

    #[test]
    fn conformity_filter_drops_near_unanimous_rows() {
        // Rows: unanimous (drop at 0.75), 3-1 split (0.75, drop), 2-2 split
        // (0.5, keep), unanimous-with-missing (drop), all-missing (keep).
        let votes = RawVotes::from_parts(
            (1..=4).map(|i| format!("s{i}")).collect(),
            None,
            vec![
                Some(1), Some(1), Some(1), Some(1),
                Some(1), Some(1), Some(1), Some(0),
                Some(1), Some(0), Some(1), Some(0),
                Some(0), Some(0), None, None,
                None, None, None, None,
            ],
        )
        .unwrap();
        let (kept, report) = conformity_filter(&votes, 0.75).unwrap();
        assert_eq!(report.kept, 2);
        assert_eq!(report.dropped, 3);
        assert_eq!(report.dropped_rows, vec![1, 2, 4]);
        assert_eq!(kept.n_rows(), 2);
        assert_eq!(kept.vote(0, 0), Some(1)); // the 2-2 row survived
        assert_eq!(kept.vote(1, 0), None); // so did the empty row

        // At 1.0 only fully unanimous rows fall.
        let (_, strict) = conformity_filter(&votes, 1.0).unwrap();
        assert_eq!(strict.dropped_rows, vec![1, 4]);

        // Dropping everything is an error.
        let all_unanimous = RawVotes::from_parts(
            vec!["a".into(), "b".into()],
            None,
            vec![Some(1), Some(1), Some(0), Some(0)],
        )
        .unwrap();
        assert!(conformity_filter(&all_unanimous, 0.75).is_err());

        assert!(conformity_filter(&votes, 0.5).is_err());
        assert!(conformity_filter(&votes, 1.1).is_err());
    }

    #[test]
    fn imputation_rules_fill_from_their_reference_groups() {
        // Parties: s1, s2 red; s4 blue (s3 omitted on purpose).
        let parties = spans();
        // One ballot: s1 = NA, s2 = 1, s4 = 0.
        let votes = RawVotes::from_parts(
            vec!["s1".into(), "s2".into(), "s4".into()],
            Some(vec!["2004-03-01".into()]),
            vec![None, Some(1), Some(0)],
        )
        .unwrap();

        // Own party (red): only s2 voted -> 1.
        let own = impute(&votes, Some(&parties), ImputeRule::OwnPartyMajority).unwrap();
        assert_eq!(own.row(0), &[1, 1, 0]);
        // Whole ballot: 1 yea, 1 nay -> tie -> 1.
        let win = impute(&votes, None, ImputeRule::WinningMajority).unwrap();
        assert_eq!(win.row(0), &[1, 1, 0]);
        // Opposite parties (blue): only s4 voted -> 0.
        let opp = impute(&votes, Some(&parties), ImputeRule::OppositePartyMajority).unwrap();
        assert_eq!(opp.row(0), &[0, 1, 0]);

        // Labels survive onto the dataset.
        assert_eq!(own.node_labels(), &["s1", "s2", "s4"]);
        assert_eq!(own.time_labels().unwrap(), &["2004-03-01"]);

        // Majorities, not just single votes: red = {1, 0, 0} -> 0.
        let majority = RawVotes::from_parts(
            vec!["s1".into(), "s2".into(), "s3".into(), "s4".into()],
            Some(vec!["2004-09-01".into()]),
            vec![Some(1), Some(0), Some(0), None],
        )
        .unwrap();
        // On 2004-09-01 s3 is red, so s4 (blue) imputes from reds under the
        // opposite rule: majority 0.
        let opp2 = impute(&majority, Some(&parties), ImputeRule::OppositePartyMajority).unwrap();
        assert_eq!(opp2.row(0)[3], 0);

        // The party-based rules demand a party table.
        assert!(impute(&votes, None, ImputeRule::OwnPartyMajority).is_err());
    }

    #[test]
    fn imputation_errors_name_the_offending_row() {
        let parties = spans();
        // Second ballot: s1 (red) missing and no other red voted.
        let votes = RawVotes::from_parts(
            vec!["s1".into(), "s4".into()],
            Some(vec!["2004-03-01".into(), "2004-03-02".into()]),
            vec![Some(1), Some(0), None, Some(0)],
        )
        .unwrap();
        let err = impute(&votes, Some(&parties), ImputeRule::OwnPartyMajority).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("s1"), "{msg}");

        // An all-missing ballot cannot be imputed by any rule.
        let empty_row = RawVotes::from_parts(
            vec!["s1".into(), "s2".into()],
            None,
            vec![None, None],
        )
        .unwrap();
        assert!(impute(&empty_row, None, ImputeRule::WinningMajority).is_err());
    }

    #[test]
    fn filter_then_impute_yields_an_analysable_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let path = votes_csv(
            dir.path(),
            "date,s1,s2,s3,s4\n\
             2004-01-10,1,1,1,1\n\
             2004-02-10,1,0,NA,0\n\
             2004-03-10,0,1,1,NA\n\
             2004-04-10,1,1,0,0\n",
        );
        let raw = RawVotes::read_csv(&path, "NA", true).unwrap();
        let (kept, report) = conformity_filter(&raw, 0.75).unwrap();
        assert_eq!(report.dropped_rows, vec![1]);
        let data = impute(&kept, Some(&spans()), ImputeRule::OwnPartyMajority).unwrap();
        assert_eq!(data.n_rows(), 3);
        assert_eq!(data.p(), 4);
        data.validate_for(&crate::model::ModelSpec::ising()).unwrap();
        // Row 2004-02-10: s3 is blue then; blue reference = s4's 0.
        assert_eq!(data.row(0), &[1, 0, 0, 0]);
        // Row 2004-03-10: s4 blue; s3 blue voted 1.
        assert_eq!(data.row(1), &[0, 1, 1, 1]);
    }
}
