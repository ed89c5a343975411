use std::collections::HashSet;

use crate::{CoreError, DbResponse, DesignPoint, FrequencyGrid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Validation,
}

/// One simulated geometry: the frequencies it was simulated at and the dB
/// response restricted to them.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub point: DesignPoint,
    /// Lattice index of `point` in its design space.
    pub point_index: usize,
    /// Positions of the simulated frequencies in the dataset's parent grid.
    pub freq_indices: Vec<usize>,
    pub response: DbResponse,
    pub split: Split,
}

impl Record {
    pub fn cells(&self) -> usize {
        self.freq_indices.len()
    }
}

/// Labeled records accumulated against one parent frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    grid: FrequencyGrid,
    records: Vec<Record>,
    seen: HashSet<(usize, usize)>,
}

impl Dataset {
    pub fn new(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            records: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Adds a record; training records may not repeat a (geometry, frequency) pair.
    pub fn push(&mut self, record: Record) -> Result<()> {
        if record.freq_indices.len() != record.response.grid().len() {
            return Err(CoreError::Shape(format!(
                "{} frequency indices for a {}-point response",
                record.freq_indices.len(),
                record.response.grid().len()
            )));
        }
        for (&fi, &f) in record.freq_indices.iter().zip(record.response.grid().points()) {
            if self.grid.points().get(fi) != Some(&f) {
                return Err(CoreError::Shape(format!(
                    "frequency index {fi} does not match {f} Hz in the parent grid"
                )));
            }
        }
        if record.split == Split::Train {
            for &fi in &record.freq_indices {
                if self.seen.contains(&(record.point_index, fi)) {
                    return Err(CoreError::DuplicateRecord {
                        point: record.point.values.clone(),
                        frequency: self.grid.points()[fi],
                    });
                }
            }
            for &fi in &record.freq_indices {
                self.seen.insert((record.point_index, fi));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.split == split)
    }

    /// Total labeled (geometry, frequency) cells in the given split.
    pub fn cells(&self, split: Split) -> usize {
        self.split(split).map(Record::cells).sum()
    }

    /// Dataset holding only the given records (same parent grid).
    pub fn subset<'a>(&self, records: impl IntoIterator<Item = &'a Record>) -> Result<Self> {
        let mut out = Self::new(self.grid.clone());
        for r in records {
            out.push(r.clone())?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(point_index: usize, idx: Vec<usize>, grid: &FrequencyGrid, split: Split) -> Record {
        let sub = grid.select(&idx).unwrap();
        let n = sub.len();
        Record {
            point: DesignPoint::new(vec![point_index as f64]),
            point_index,
            freq_indices: idx,
            response: DbResponse::new(sub, vec![(0, 0)], vec![-3.0; n]).unwrap(),
            split,
        }
    }

    #[test]
    fn duplicate_train_cells_rejected() {
        let grid = FrequencyGrid::linspace(1e9, 2e9, 11).unwrap();
        let mut ds = Dataset::new(grid.clone());
        ds.push(record(3, vec![0, 5], &grid, Split::Train)).unwrap();
        ds.push(record(3, vec![1, 6], &grid, Split::Train)).unwrap();
        let err = ds.push(record(3, vec![2, 5], &grid, Split::Train)).unwrap_err();
        assert!(matches!(err, CoreError::DuplicateRecord { .. }));
        ds.push(record(3, vec![5], &grid, Split::Validation)).unwrap();
        assert_eq!(ds.cells(Split::Train), 4);
        assert_eq!(ds.cells(Split::Validation), 1);
    }

    #[test]
    fn mismatched_frequency_rejected() {
        let grid = FrequencyGrid::linspace(1e9, 2e9, 11).unwrap();
        let mut ds = Dataset::new(grid.clone());
        let mut r = record(0, vec![0, 1], &grid, Split::Train);
        r.freq_indices = vec![0, 2];
        assert!(ds.push(r).is_err());
    }
}
