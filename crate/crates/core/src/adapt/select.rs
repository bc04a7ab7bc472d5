use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub index: usize,
    pub skipped: bool,
}

/// `argmax_j |scores_j|`, lowest index on ties; `skipped` when it repeats `prev`.
pub fn select_operator(scores: &[f64], prev: Option<usize>) -> Result<Selection> {
    if scores.is_empty() {
        return Err(Error::Logic("operator pool is empty".into()));
    }
    let mut best = 0;
    for (j, v) in scores.iter().enumerate() {
        if v.abs() > scores[best].abs() {
            best = j;
        }
    }
    if scores[best] == 0.0 {
        return Err(Error::Logic("all natural-gradient entries are zero; stopping rule should have fired".into()));
    }
    Ok(Selection { index: best, skipped: prev == Some(best) })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PositionalSelection {
    pub index: usize,
    pub position: usize,
    pub skipped: bool,
}

/// Joint argmax over `(position, index)`; ties go to the lower position, then
/// the lower index. `scores[p]` holds the pool scores at insertion slot `p`,
/// and the last slot is the append. Only an append that repeats the current
/// last element counts as a skip.
pub fn select_positional(scores: &[Vec<f64>], last: Option<usize>) -> Result<PositionalSelection> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (p, row) in scores.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            if best.is_none_or(|(_, _, b)| v.abs() > b) {
                best = Some((p, i, v.abs()));
            }
        }
    }
    let (position, index, score) = best.ok_or_else(|| Error::Logic("no candidate positions".into()))?;
    if score == 0.0 {
        return Err(Error::Logic("all natural-gradient entries are zero; stopping rule should have fired".into()));
    }
    let append = position + 1 == scores.len();
    Ok(PositionalSelection { index, position, skipped: append && last == Some(index) })
}
