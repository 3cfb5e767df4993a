use super::sig6;
use crate::experiments::SweepCell;

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("a_mm,b_mm,material,outcome\n");
    for c in cells {
        out.push_str(&format!("{},{},{},{}\n", sig6(c.a_mm), sig6(c.b_mm), c.material, c.outcome.name()));
    }
    out
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn pad(s: &str, width: usize) -> String {
    let n = s.chars().count();
    format!("{}{s}", " ".repeat(width.saturating_sub(n)))
}

/// Thickness rows by length columns, one glyph per cell: `×` fail, `✓` close, `✓✓` snap close.
pub fn sweep_table(cells: &[SweepCell]) -> String {
    let lengths = sorted_unique(cells.iter().map(|c| c.a_mm).collect());
    let thicknesses = sorted_unique(cells.iter().map(|c| c.b_mm).collect());
    let material = cells.first().map_or("", |c| c.material.as_str());

    let corner = "b_mm \\ a_mm";
    let first = corner.chars().count().max(thicknesses.iter().map(|b| sig6(*b).len()).max().unwrap_or(0));
    let width = lengths.iter().map(|a| sig6(*a).len()).max().unwrap_or(0).max(2) + 2;

    let mut out = format!("{material}\n{corner:<first$}");
    for a in &lengths {
        out.push_str(&pad(&sig6(*a), width));
    }
    out.push('\n');
    for b in &thicknesses {
        out.push_str(&format!("{:<first$}", sig6(*b)));
        for a in &lengths {
            let glyph = cells
                .iter()
                .find(|c| c.a_mm == *a && c.b_mm == *b)
                .map_or("", |c| c.outcome.glyph());
            out.push_str(&pad(glyph, width));
        }
        out.push('\n');
    }
    out
}
