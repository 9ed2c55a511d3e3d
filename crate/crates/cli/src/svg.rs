//! Minimal standalone SVG line charts: one chart per file, labeled axes.

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

pub const PALETTE: [&str; 6] = [
    "#1f6fb2", "#d1495b", "#2e8b57", "#8a5fbf", "#c08a00", "#444444",
];

impl Chart {
    pub fn render(&self) -> String {
        let xs: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| self.map_x(p.0)))
            .collect();
        let ys: Vec<f64> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .collect();
        let (x_min, x_max) = padded_span(&xs, false);
        let (y_min, y_max) = padded_span(&ys, true);

        let px = |x: f64| {
            MARGIN_L + (self.map_x(x) - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R)
        };
        let py =
            |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut body = String::new();
        body.push_str(&format!(
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        body.push_str(&format!(
            "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // Axes.
        body.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            WIDTH - MARGIN_R,
            HEIGHT - MARGIN_B
        ));
        body.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B
        ));

        // Ticks: five per axis.
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x_min + f * (x_max - x_min);
            let xpix = MARGIN_L + f * (WIDTH - MARGIN_L - MARGIN_R);
            let shown = if self.log_x { 10f64.powf(xv) } else { xv };
            body.push_str(&format!(
                "<line x1=\"{xpix}\" y1=\"{}\" x2=\"{xpix}\" y2=\"{}\" stroke=\"black\"/>\n",
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 5.0
            ));
            body.push_str(&format!(
                "<text x=\"{xpix}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
                HEIGHT - MARGIN_B + 18.0,
                format_tick(shown)
            ));
            let yv = y_min + f * (y_max - y_min);
            let ypix = HEIGHT - MARGIN_B - f * (HEIGHT - MARGIN_T - MARGIN_B);
            body.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ypix}\" x2=\"{MARGIN_L}\" y2=\"{ypix}\" stroke=\"black\"/>\n",
                MARGIN_L - 5.0
            ));
            body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{}</text>\n",
                MARGIN_L - 8.0,
                ypix + 4.0,
                format_tick(yv)
            ));
        }

        // Axis labels.
        body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        ));
        body.push_str(&format!(
            "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            escape(&self.y_label)
        ));

        // Series.
        for (si, s) in self.series.iter().enumerate() {
            let color = s.color;
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            body.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
            for &(x, y) in &s.points {
                body.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{color}\"/>\n",
                    px(x),
                    py(y)
                ));
            }
            body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\" font-family=\"sans-serif\">{}</text>\n",
                WIDTH - MARGIN_R - 170.0,
                MARGIN_T + 16.0 * si as f64 + 4.0,
                escape(&s.label)
            ));
        }

        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n{body}</svg>\n"
        )
    }

    fn map_x(&self, x: f64) -> f64 {
        if self.log_x {
            x.log10()
        } else {
            x
        }
    }
}

fn padded_span(vals: &[f64], pad_zero: bool) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.06 * (hi - lo);
    let lo = if pad_zero && lo > 0.0 && lo - pad < 0.0 {
        0.0
    } else {
        lo - pad
    };
    (lo, hi + pad)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-2..1e4).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_valid_standalone_svg() {
        let chart = Chart {
            title: "demo".into(),
            x_label: "t (time units)".into(),
            y_label: "mean volume".into(),
            log_x: true,
            series: vec![Series {
                label: "run".into(),
                points: vec![(10.0, 1.0), (100.0, 2.0), (1000.0, 2.5)],
                color: PALETTE[0],
            }],
        };
        let svg = chart.render();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("t (time units)"));
    }
}
