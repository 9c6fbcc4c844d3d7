//! Work counters and structural instruments filled in by the pipeline.

/// Counters are plain sums; every routine that takes `&mut Counters` only adds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counters {
    /// Sum of transform lengths over all correlations computed.
    pub conv_cells: u64,
    /// Cells evaluated by the angle-prefix DP.
    pub dp_cells: u64,
    /// Elementary operations spent counting boxes over points.
    pub box_ops: u64,
    /// Kangaroo jumps that landed on a mismatch (row level and cell level).
    pub jumps: u64,
    /// Text windows processed.
    pub windows: u64,
    /// Windows answered by kangaroo verification of the candidate set.
    pub windows_kangaroo: u64,
    /// Windows answered by the periodic (sparse + dense) branch.
    pub windows_full: u64,
    /// Windows answered by the plain baseline.
    pub windows_naive: u64,
    /// Total candidate offsets over all windows.
    pub candidates: u64,
    /// Pattern pieces produced by tile decomposition.
    pub pattern_pieces: u64,
    /// Text pieces produced by text decomposition.
    pub text_pieces: u64,
    /// Cells of the peripheral remainder.
    pub peripheral_cells: u64,
    /// Sum of strip height bounds in the dense counter.
    pub strip_heights: u64,
    /// Windows that asked for the periodic branch but were verified instead.
    pub windows_fallback: u64,
    /// Offsets on which two overlapping windows disagreed.
    pub merge_conflicts: u64,
}

impl Counters {
    /// Work measure used for scaling comparisons.
    pub fn work(&self) -> u64 {
        self.conv_cells + self.dp_cells + self.box_ops
    }

    pub fn merge(&mut self, o: &Counters) {
        self.conv_cells += o.conv_cells;
        self.dp_cells += o.dp_cells;
        self.box_ops += o.box_ops;
        self.jumps += o.jumps;
        self.windows += o.windows;
        self.windows_kangaroo += o.windows_kangaroo;
        self.windows_full += o.windows_full;
        self.windows_naive += o.windows_naive;
        self.candidates += o.candidates;
        self.pattern_pieces += o.pattern_pieces;
        self.text_pieces += o.text_pieces;
        self.peripheral_cells += o.peripheral_cells;
        self.strip_heights += o.strip_heights;
        self.windows_fallback += o.windows_fallback;
        self.merge_conflicts += o.merge_conflicts;
    }
}
