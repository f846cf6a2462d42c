//! Minimal SVG line charts for phase curves: axes, polylines, legend.
//! Output is plain text assembled deterministically, so identical inputs
//! give byte-identical files.

use mmv::montecarlo::{AlgorithmKind, PhaseCurve};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 120.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Success rate versus sparsity, one polyline per channel count, for a
/// single algorithm of the curve.
pub fn phase_curve_svg(curve: &PhaseCurve, algorithm: AlgorithmKind) -> String {
    let points: Vec<_> = curve
        .points
        .iter()
        .filter(|p| p.algorithm == algorithm)
        .collect();
    let mut k_values: Vec<usize> = points.iter().map(|p| p.k).collect();
    k_values.sort_unstable();
    k_values.dedup();
    let mut l_values: Vec<usize> = points.iter().map(|p| p.l).collect();
    l_values.sort_unstable();
    l_values.dedup();

    let k_min = k_values.first().copied().unwrap_or(0) as f64;
    let k_max = k_values.last().copied().unwrap_or(1) as f64;
    let span = if k_max > k_min { k_max - k_min } else { 1.0 };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |k: f64| MARGIN_LEFT + (k - k_min) / span * plot_w;
    let y = |rate: f64| MARGIN_TOP + (1.0 - rate) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{} n={} N={} model {} &#8212; {}</text>\n",
        WIDTH / 2.0,
        curve.ensemble,
        curve.n,
        curve.cols,
        curve.model,
        algorithm
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(y(0.0)),
        fmt(WIDTH - MARGIN_RIGHT),
        fmt(y(0.0))
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(y(0.0)),
        fmt(MARGIN_LEFT),
        fmt(y(1.0))
    ));

    // y ticks at 0, 0.25, .., 1
    for i in 0..=4 {
        let rate = i as f64 / 4.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
            fmt(MARGIN_LEFT),
            fmt(y(rate)),
            fmt(WIDTH - MARGIN_RIGHT),
            fmt(y(rate))
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_LEFT - 6.0),
            fmt(y(rate) + 4.0),
            rate
        ));
    }

    // x ticks at each grid value
    for &k in &k_values {
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            fmt(x(k as f64)),
            fmt(y(0.0)),
            fmt(x(k as f64)),
            fmt(y(0.0) + 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{k}</text>\n",
            fmt(x(k as f64)),
            fmt(y(0.0) + 18.0)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">sparsity k</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(HEIGHT - 12.0)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">recovery rate</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0)
    ));

    // one polyline per channel count
    for (idx, &l) in l_values.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = k_values
            .iter()
            .filter_map(|&k| {
                points
                    .iter()
                    .find(|p| p.k == k && p.l == l)
                    .map(|p| format!("{},{}", fmt(x(k as f64)), fmt(y(p.rate()))))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        let ly = MARGIN_TOP + 16.0 + idx as f64 * 18.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            fmt(WIDTH - MARGIN_RIGHT + 10.0),
            fmt(ly - 4.0),
            fmt(WIDTH - MARGIN_RIGHT + 34.0),
            fmt(ly - 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">L = {l}</text>\n",
            fmt(WIDTH - MARGIN_RIGHT + 40.0),
            fmt(ly)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
