//! Run reports as `key=value` lines.

use std::fmt::Write as _;
use std::time::Duration;

use kmatch2d_core::Counters;

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub m: usize,
    pub n: usize,
    pub k: u32,
    pub algo: String,
    pub matches: usize,
    /// `(phase, elapsed)` in execution order.
    pub phases: Vec<(&'static str, Duration)>,
    pub total: Duration,
    pub counters: Counters,
}

impl RunReport {
    pub fn render(&self) -> String {
        let c = &self.counters;
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(out, "{k}={v}").unwrap();
        kv("m", &self.m);
        kv("n", &self.n);
        kv("k", &self.k);
        kv("algo", &self.algo);
        kv("matches", &self.matches);
        for (name, d) in &self.phases {
            kv(&format!("time_{name}_ms"), &format_ms(*d));
        }
        kv("time_total_ms", &format_ms(self.total));
        kv("windows", &c.windows);
        kv("windows_naive", &c.windows_naive);
        kv("windows_kangaroo", &c.windows_kangaroo);
        kv("windows_full", &c.windows_full);
        kv("windows_fallback", &c.windows_fallback);
        kv("candidates", &c.candidates);
        kv("pattern_pieces", &c.pattern_pieces);
        kv("text_pieces", &c.text_pieces);
        kv("peripheral_cells", &c.peripheral_cells);
        kv("strip_heights", &c.strip_heights);
        kv("conv_cells", &c.conv_cells);
        kv("dp_cells", &c.dp_cells);
        kv("box_ops", &c.box_ops);
        kv("jumps", &c.jumps);
        kv("work", &c.work());
        kv("merge_conflicts", &c.merge_conflicts);
        out
    }
}

fn format_ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}
