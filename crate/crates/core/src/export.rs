//! CSV and text emission of paths, events and root-system dumps.
//!
//! Schemas:
//!
//! * radial paths: `path_id,t,x_1..x_n`
//! * full (skew) paths: `path_id,t,x_1..x_n,chamber_word` with the chamber
//!   word as dash-separated positive-root indices (empty for the identity)
//! * events: `path_id,t,root_index,pre_1..pre_n,post_1..post_n`
//! * roots dump: one root per line with index, coordinates, multiplicity and
//!   orbit id.

use std::io::{self, Write};

use crate::jump::SkewProductPath;
use crate::roots::RootSystem;
use crate::sde::RadialPath;

fn write_header(out: &mut impl Write, rank: usize, extra: &[&str]) -> io::Result<()> {
    write!(out, "path_id,t")?;
    for i in 1..=rank {
        write!(out, ",x_{i}")?;
    }
    for e in extra {
        write!(out, ",{e}")?;
    }
    writeln!(out)
}

/// Radial paths, one row per recorded grid point.
pub fn write_radial_paths_csv(
    out: &mut impl Write,
    paths: &[RadialPath],
    rank: usize,
) -> io::Result<()> {
    write_header(out, rank, &[])?;
    for p in paths {
        for i in 0..p.len() {
            write!(out, "{},{}", p.index, p.times[i])?;
            for x in p.state(i) {
                write!(out, ",{x}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

fn chamber_word(sys: &RootSystem, w_index: usize) -> String {
    sys.weyl()
        .element(w_index)
        .word
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

/// Full skew-product paths with the chamber word column.
pub fn write_skew_paths_csv(
    out: &mut impl Write,
    sys: &RootSystem,
    paths: &[SkewProductPath],
) -> io::Result<()> {
    write_header(out, sys.rank(), &["chamber_word"])?;
    for p in paths {
        for i in 0..p.len() {
            write!(out, "{},{}", p.index, p.times[i])?;
            for x in p.full_state(i) {
                write!(out, ",{x}")?;
            }
            writeln!(out, ",{}", chamber_word(sys, p.chamber[i] as usize))?;
        }
    }
    Ok(())
}

/// Jump events of a batch of skew-product paths.
pub fn write_events_csv(
    out: &mut impl Write,
    paths: &[SkewProductPath],
    rank: usize,
) -> io::Result<()> {
    write!(out, "path_id,t,root_index")?;
    for i in 1..=rank {
        write!(out, ",pre_{i}")?;
    }
    for i in 1..=rank {
        write!(out, ",post_{i}")?;
    }
    writeln!(out)?;
    for p in paths {
        for e in &p.events {
            write!(out, "{},{},{}", p.index, e.time, e.root)?;
            for x in &e.pre {
                write!(out, ",{x}")?;
            }
            for x in &e.post {
                write!(out, ",{x}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Structured text dump of a root system: one root per line with
/// coordinates, multiplicity and orbit id; positive roots are marked.
pub fn write_roots_text(out: &mut impl Write, sys: &RootSystem) -> io::Result<()> {
    writeln!(
        out,
        "# family {} rank {} roots {} positive {} weyl_order {} crystallographic {} reduced {}",
        sys.family(),
        sys.rank(),
        sys.roots().len(),
        sys.num_positive(),
        sys.weyl().order(),
        sys.is_crystallographic(),
        sys.is_reduced(),
    )?;
    write!(out, "# rho")?;
    for r in sys.rho() {
        write!(out, " {r}")?;
    }
    writeln!(out)?;
    writeln!(out, "# index positive coords... multiplicity orbit")?;
    for (i, root) in sys.roots().iter().enumerate() {
        let positive = if i < sys.num_positive() { 1 } else { 0 };
        write!(out, "{i} {positive}")?;
        for x in &root.vector {
            write!(out, " {x}")?;
        }
        writeln!(out, " {} {}", root.multiplicity, root.orbit)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jump::{simulate_skew_product, SkewConfig, SkewKind};
    use crate::roots::Family;
    use crate::sde::{simulate_radial, RadialKind, SimConfig};

    #[test]
    fn radial_csv_shape() {
        let sys = RootSystem::standard(Family::A, 2, &[1.0]).unwrap();
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.1, 0.1], 1e-2, 0.1, 3, 1);
        config.record_stride = Some(5);
        let batch = simulate_radial(&sys, &config).unwrap();
        let mut buf = Vec::new();
        write_radial_paths_csv(&mut buf, &batch.paths, 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "path_id,t,x_1,x_2");
        // 3 paths x 3 records each (0, 0.05, 0.1)
        assert_eq!(text.lines().count(), 1 + 3 * 3);
    }

    #[test]
    fn event_csv_rows_revalidate() {
        let sys = RootSystem::standard(Family::A, 1, &[1.0]).unwrap();
        let sim = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.25], 1e-3, 1.0, 10, 3);
        let config = SkewConfig::new(SkewKind::HeckmanOpdam, sim);
        let batch = simulate_skew_product(&sys, &config).unwrap();
        let mut buf = Vec::new();
        write_events_csv(&mut buf, &batch.paths, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut n = 0;
        for line in text.lines().skip(1) {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            let (root, pre, post) = (fields[2] as usize, fields[3], fields[4]);
            let reflected = sys.positive_root(root).reflect(&[pre]);
            assert!((reflected[0] - post).abs() < 1e-12);
            n += 1;
        }
        assert!(n > 0);
    }

    #[test]
    fn roots_dump_lists_all_roots() {
        let sys = RootSystem::standard(Family::BC, 1, &[1.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_roots_text(&mut buf, &sys).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data_lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 4);
        assert!(text.contains("weyl_order 2"));
    }
}
