use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::vocabulary::{parse_header, Level, Vocabulary};
use crate::error::{Error, Result};
use crate::period::TimePeriod;
use crate::preprocess::ProcessedDocument;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramTable {
    pub period: TimePeriod,
    pub order: usize,
    pub level: Level,
    pub entries: BTreeMap<Vec<String>, u64>,
}

pub fn check_order(order: usize) -> Result<()> {
    if (1..=3).contains(&order) {
        Ok(())
    } else {
        Err(Error::param(format!("n-gram order must be 1, 2 or 3 (got {order})")))
    }
}

impl NgramTable {
    /// Sliding-window n-grams inside each document. When `vocabulary` is given,
    /// only windows whose every token is in it are counted; windows never
    /// bridge a removed token.
    pub fn from_documents(
        period: TimePeriod,
        order: usize,
        level: Level,
        docs: &[ProcessedDocument],
        vocabulary: Option<&Vocabulary>,
    ) -> Result<Self> {
        check_order(order)?;
        let keep: Option<HashSet<&str>> = vocabulary.map(|v| v.words().collect());
        let mut entries = BTreeMap::new();
        for doc in docs {
            let stream = level.stream(doc);
            for window in stream.windows(order) {
                if let Some(keep) = &keep {
                    if !window.iter().all(|w| keep.contains(w.as_str())) {
                        continue;
                    }
                }
                *entries.entry(window.to_vec()).or_insert(0) += 1;
            }
        }
        Ok(NgramTable {
            period,
            order,
            level,
            entries,
        })
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequency(&self, gram: &[&str]) -> u64 {
        let key: Vec<String> = gram.iter().map(|s| s.to_string()).collect();
        self.entries.get(&key).copied().unwrap_or(0)
    }

    pub fn file_name(order: usize, level: Level) -> String {
        format!("ngrams_{order}_{level}.tsv")
    }

    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(String, u64)> = self
            .entries
            .iter()
            .map(|(g, &f)| (g.join(" "), f))
            .collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut out = format!("#period={} #tokens={}\n", self.period, self.total());
        for (g, f) in rows {
            out.push_str(&g);
            out.push('\t');
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_tsv(content: &str, order: usize, level: Level, origin: &Path) -> Result<Self> {
        let mut lines = content.lines();
        let (period, _) = parse_header(lines.next().unwrap_or(""), origin)?;
        let mut entries = BTreeMap::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (g, f) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::format(origin, format!("bad n-gram line `{line}`")))?;
            let gram: Vec<String> = g.split(' ').map(str::to_string).collect();
            if gram.len() != order {
                return Err(Error::format(origin, format!("expected {order}-gram in `{line}`")));
            }
            let f = f
                .parse()
                .map_err(|_| Error::format(origin, format!("bad frequency in `{line}`")))?;
            entries.insert(gram, f);
        }
        Ok(NgramTable {
            period,
            order,
            level,
            entries,
        })
    }
}
