use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A distinguished pair of marked points together with a partition of the
/// remaining four into two pairs. Labels are `1..=6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlagSpec {
    pair: (usize, usize),
    partition: [(usize, usize); 2],
}

fn ordered(p: (usize, usize)) -> (usize, usize) {
    (p.0.min(p.1), p.0.max(p.1))
}

impl FlagSpec {
    pub fn new(pair: (usize, usize), partition: [(usize, usize); 2]) -> Result<Self> {
        let pair = ordered(pair);
        let mut partition = partition.map(ordered);
        partition.sort();
        let mut labels: Vec<usize> = [pair, partition[0], partition[1]]
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect();
        labels.sort();
        if labels != [1, 2, 3, 4, 5, 6] {
            return Err(Error::InvalidInput(format!(
                "flag must use each label 1..6 exactly once, got pair {pair:?} and partition {partition:?}"
            )));
        }
        Ok(Self { pair, partition })
    }

    /// Distinguished pair with the partition `{a,b},{c,d}` of the others in
    /// increasing order.
    pub fn with_pair(pair: (usize, usize)) -> Result<Self> {
        let pair = ordered(pair);
        let rest: Vec<usize> = (1..=6).filter(|&k| k != pair.0 && k != pair.1).collect();
        if rest.len() != 4 {
            return Err(Error::InvalidInput(format!("invalid distinguished pair {pair:?}")));
        }
        Self::new(pair, [(rest[0], rest[1]), (rest[2], rest[3])])
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn partition(&self) -> [(usize, usize); 2] {
        self.partition
    }

    /// Labels ordered as distinguished pair first, then the partition.
    pub fn ordering(&self) -> [usize; 6] {
        [
            self.pair.0,
            self.pair.1,
            self.partition[0].0,
            self.partition[0].1,
            self.partition[1].0,
            self.partition[1].1,
        ]
    }
}

impl fmt::Display for FlagSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair={},{};partition={}-{},{}-{}",
            self.pair.0, self.pair.1, self.partition[0].0, self.partition[0].1, self.partition[1].0, self.partition[1].1
        )
    }
}

fn parse_label(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("'{s}' is not a marked-point label")))
}

fn parse_pair(s: &str, sep: char) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(sep)
        .ok_or_else(|| Error::InvalidInput(format!("expected two labels separated by '{sep}' in '{s}'")))?;
    Ok((parse_label(a)?, parse_label(b)?))
}

impl FromStr for FlagSpec {
    type Err = Error;

    /// `pair=1,2;partition=3-4,5-6`; the partition may be omitted.
    fn from_str(s: &str) -> Result<Self> {
        let mut pair = None;
        let mut partition = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value in '{part}'")))?;
            match key.trim() {
                "pair" => pair = Some(parse_pair(value, ',')?),
                "partition" => {
                    let (x, y) = value
                        .split_once(',')
                        .ok_or_else(|| Error::InvalidInput(format!("partition needs two pairs: '{value}'")))?;
                    partition = Some([parse_pair(x, '-')?, parse_pair(y, '-')?]);
                }
                other => return Err(Error::InvalidInput(format!("unknown flag field '{other}'"))),
            }
        }
        let pair = pair.ok_or_else(|| Error::InvalidInput("flag needs a pair".into()))?;
        match partition {
            Some(p) => Self::new(pair, p),
            None => Self::with_pair(pair),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagEnumeration {
    pub pairs: Vec<(usize, usize)>,
    pub partitions: Vec<[(usize, usize); 3]>,
    pub flags: Vec<FlagSpec>,
}

fn matchings(labels: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if labels.is_empty() {
        return vec![Vec::new()];
    }
    let first = labels[0];
    let mut out = Vec::new();
    for k in 1..labels.len() {
        let rest: Vec<usize> = labels[1..].iter().copied().filter(|&x| x != labels[k]).collect();
        for mut m in matchings(&rest) {
            m.insert(0, (first, labels[k]));
            out.push(m);
        }
    }
    out
}

/// The 15 pairs, 15 perfect matchings and 45 flags on the labels `1..=6`.
pub fn enumerate_flags() -> FlagEnumeration {
    let labels: Vec<usize> = (1..=6).collect();
    let pairs = (1..=6).flat_map(|a| (a + 1..=6).map(move |b| (a, b))).collect();
    let partitions: Vec<[(usize, usize); 3]> = matchings(&labels)
        .into_iter()
        .map(|m| [m[0], m[1], m[2]])
        .collect();
    let mut flags = Vec::new();
    for m in &partitions {
        for d in 0..3 {
            let rest: Vec<(usize, usize)> = (0..3).filter(|&k| k != d).map(|k| m[k]).collect();
            flags.push(FlagSpec::new(m[d], [rest[0], rest[1]]).expect("matching is a partition"));
        }
    }
    FlagEnumeration {
        pairs,
        partitions,
        flags,
    }
}
