//! SVG line charts of `q̂` against α, one chart per `p` and one curve per `n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::experiments::{ExperimentError, GridCellResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22",
];

/// Curves of one chart: `n -> [(α, q̂)]`, points sorted by α.
pub type SeriesByN = BTreeMap<usize, Vec<(f64, f64)>>;

/// Groups results by `p`, then `n`.
pub fn group_results(results: &[GridCellResult]) -> BTreeMap<usize, SeriesByN> {
    let mut out: BTreeMap<usize, SeriesByN> = BTreeMap::new();
    for r in results {
        out.entry(r.p)
            .or_default()
            .entry(r.n)
            .or_default()
            .push((r.alpha, r.q_hat));
    }
    for series in out.values_mut().flat_map(|s| s.values_mut()) {
        series.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders one self-contained SVG document. The y axis always spans
/// `[0, 1]`; the x axis spans the α range present in `series`.
pub fn render_svg(p: usize, series: &SeriesByN) -> String {
    let (mut lo, mut hi) = series
        .values()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, _)| {
            (lo.min(a), hi.max(a))
        });
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |a: f64| LEFT + (a - lo) / (hi - lo) * plot_w;
    let sy = |q: f64| TOP + (1.0 - q.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&format!("p = {p}"))
    );

    // axes and grid
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}"/></g>"#,
        y0 = TOP + plot_h,
        x1 = LEFT + plot_w
    );
    for k in 0..=5 {
        let q = k as f64 / 5.0;
        let y = sy(q);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text class="ytick" x="{:.2}" y="{:.2}" text-anchor="end">{q:.1}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for k in 0..=5 {
        let a = lo + (hi - lo) * k as f64 / 5.0;
        let x = sx(a);
        let _ = writeln!(
            svg,
            r#"<text class="xtick" x="{x:.2}" y="{:.2}" text-anchor="middle">{a:.2}</text>"#,
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="xlabel" x="{:.2}" y="{:.2}" text-anchor="middle">α</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="ylabel" x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">q̂(p, n, α)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (idx, (n, points)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(a, q)| format!("{:.2},{:.2}", sx(a), sy(q)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-n="{n}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * idx as f64;
        let lx = LEFT + plot_w + 14.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">n = {n}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `q_p{p}.svg` for every `p` in `results` and returns the paths.
pub fn write_plots(
    results: &[GridCellResult],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    if results.is_empty() {
        return Err(ExperimentError::Csv("no result rows to plot".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for (p, series) in group_results(results) {
        let path = out_dir.join(format!("q_p{p}.svg"));
        std::fs::write(&path, render_svg(p, &series))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(p: usize, n: usize, alpha: f64, q: f64) -> GridCellResult {
        GridCellResult {
            p,
            n,
            alpha,
            trials: 10,
            successes: (q * 10.0) as usize,
            nonconverged: 0,
            q_hat: q,
            ci_low: q,
            ci_high: q,
        }
    }

    #[test]
    fn one_polyline_per_n() {
        let mut rows = Vec::new();
        for n in 1..=3 {
            for (k, a) in [0.5, 1.0, 1.5].into_iter().enumerate() {
                rows.push(cell(3, n, a, (k as f64 + n as f64) / 6.0));
            }
        }
        let groups = group_results(&rows);
        assert_eq!(groups.len(), 1);
        let svg = render_svg(3, &groups[&3]);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("class=\"legend\"").count(), 3);
        assert!(svg.contains(">α</text>") && svg.contains("q̂(p, n, α)"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn coordinates_follow_data() {
        let rows = vec![
            cell(4, 1, 0.1, 0.0),
            cell(4, 1, 0.2, 0.5),
            cell(4, 1, 0.3, 1.0),
        ];
        let svg = render_svg(4, &group_results(&rows)[&4]);
        let pts = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let xy: Vec<(f64, f64)> = pts
            .split(' ')
            .map(|s| {
                let (x, y) = s.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        assert!(xy.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
        assert_eq!(xy[0].1, TOP + HEIGHT - TOP - BOTTOM);
        assert_eq!(xy[2].1, TOP);
    }

    #[test]
    fn empty_input_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_plots(&[], dir.path()).is_err());
        let paths = write_plots(&[cell(3, 1, 0.5, 0.2), cell(5, 2, 0.5, 0.9)], dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[1].ends_with("q_p5.svg"));
    }
}
