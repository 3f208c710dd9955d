//! Hand-rolled static SVG output: one file per field, containing a
//! line panel (field vs x at a few snapshot times) above an x-t
//! heatmap of the full run. No external renderer, fully deterministic.

use std::path::Path;

use crate::CliError;

const WIDTH: f64 = 760.0;
const LINE_H: f64 = 300.0;
const HEAT_H: f64 = 260.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_V: f64 = 40.0;

/// Evenly spaced selection of at most `max_n` indices, always keeping
/// the first and last.
fn select_indices(len: usize, max_n: usize) -> Vec<usize> {
    if len <= max_n {
        return (0..len).collect();
    }
    (0..max_n)
        .map(|i| i * (len - 1) / (max_n - 1))
        .collect()
}

fn line_color(i: usize) -> String {
    // fixed qualitative palette, cycled
    const PALETTE: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
    ];
    PALETTE[i % PALETTE.len()].to_string()
}

fn heat_color(norm: f64) -> String {
    // blue -> white -> red diverging ramp
    let v = norm.clamp(0.0, 1.0);
    let (r, g, b) = if v < 0.5 {
        let t = v / 0.5;
        (
            (59.0 + t * (255.0 - 59.0)) as u8,
            (76.0 + t * (255.0 - 76.0)) as u8,
            192u8.max((192.0 + t * (255.0 - 192.0)) as u8),
        )
    } else {
        let t = (v - 0.5) / 0.5;
        (
            255u8.min((255.0 - t * (255.0 - 180.0)) as u8).max(180),
            (255.0 - t * (255.0 - 4.0)) as u8,
            (255.0 - t * (255.0 - 38.0)) as u8,
        )
    };
    format!("rgb({r},{g},{b})")
}

/// Write one field's plot. `snaps` holds (time, node values) rows in
/// ascending time, all over the shared node positions `xs`.
pub fn write_field_plot(
    path: &Path,
    field_name: &str,
    xs: &[f64],
    snaps: &[(f64, Vec<f64>)],
) -> Result<(), CliError> {
    if xs.is_empty() || snaps.is_empty() {
        return Err(CliError::Runtime("nothing to plot".into()));
    }
    let (x0, x1) = (xs[0], *xs.last().unwrap());
    let (t0, t1) = (snaps[0].0, snaps.last().unwrap().0);
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    for (_, row) in snaps {
        for &v in row {
            v_min = v_min.min(v);
            v_max = v_max.max(v);
        }
    }
    if !(v_min.is_finite() && v_max.is_finite()) {
        return Err(CliError::Runtime(format!(
            "non-finite values in field {field_name}; cannot plot"
        )));
    }
    if v_max - v_min < 1e-300 {
        v_max = v_min + 1.0;
    }

    let total_h = LINE_H + HEAT_H + 3.0 * MARGIN_V;
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{total_h}\" \
         viewBox=\"0 0 {WIDTH} {total_h}\">\n\
         <rect width=\"{WIDTH}\" height=\"{total_h}\" fill=\"white\"/>\n"
    ));

    // ---- line panel ----
    let ly0 = MARGIN_V;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = |v: f64| ly0 + LINE_H - (v - v_min) / (v_max - v_min) * LINE_H;
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{ly0}\" width=\"{plot_w}\" height=\"{LINE_H}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    ));
    for (li, &si) in select_indices(snaps.len(), 6).iter().enumerate() {
        let (t, row) = &snaps[si];
        let pts: Vec<String> = xs
            .iter()
            .zip(row)
            .map(|(&x, &v)| format!("{:.2},{:.2}", sx(x), sy(v)))
            .collect();
        let color = line_color(li);
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             points=\"{}\"/>\n",
            pts.join(" ")
        ));
        let leg_y = ly0 + 16.0 + 18.0 * li as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{leg_y}\" x2=\"{:.2}\" y2=\"{leg_y}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">t = {t:.4}</text>\n",
            WIDTH - MARGIN_R + 8.0,
            WIDTH - MARGIN_R + 30.0,
            WIDTH - MARGIN_R + 36.0,
            leg_y + 4.0,
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">x</text>\n\
         <text x=\"{MARGIN_L}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{x0:.3}</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{x1:.3}</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{v_max:.4}</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{v_min:.4}</text>\n\
         <text x=\"16\" y=\"{:.2}\" font-size=\"13\">{field_name}</text>\n",
        MARGIN_L + plot_w / 2.0,
        ly0 + LINE_H + 28.0,
        ly0 + LINE_H + 14.0,
        MARGIN_L + plot_w,
        ly0 + LINE_H + 14.0,
        MARGIN_L - 6.0,
        ly0 + 10.0,
        MARGIN_L - 6.0,
        ly0 + LINE_H,
        ly0 + LINE_H / 2.0,
    ));

    // ---- heatmap panel ----
    let hy0 = LINE_H + 2.0 * MARGIN_V;
    let cell_w = plot_w / xs.len() as f64;
    let cell_h = HEAT_H / snaps.len() as f64;
    for (si, (_, row)) in snaps.iter().enumerate() {
        // time increases downward from the panel top
        let y = hy0 + si as f64 * cell_h;
        for (xi, &v) in row.iter().enumerate() {
            let norm = (v - v_min) / (v_max - v_min);
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"{}\"/>\n",
                MARGIN_L + xi as f64 * cell_w,
                cell_w + 0.5,
                cell_h + 0.5,
                heat_color(norm)
            ));
        }
    }
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{hy0}\" width=\"{plot_w}\" height=\"{HEAT_H}\" \
         fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">x-t heatmap \
         (t: {t0:.3} top to {t1:.3} bottom)</text>\n</svg>\n",
        MARGIN_L + plot_w / 2.0,
        hy0 + HEAT_H + 28.0,
    ));

    std::fs::write(path, svg)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
