//! Static SVG rendering of a locus: axes, one polyline per branch and
//! velocity arrows along each branch.

use reslocus::Locus;
use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;
const ARROWS_PER_BRANCH: usize = 12;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    /// Data units per pixel.
    fn unit(&self) -> f64 {
        ((self.x1 - self.x0) / (WIDTH - 2.0 * MARGIN)).max((self.y1 - self.y0) / (HEIGHT - 2.0 * MARGIN))
    }
}

fn frame(locus: &Locus<f64>) -> Frame {
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for s in locus.branches.iter().flatten() {
        if s.pole.re.is_finite() && s.pole.im.is_finite() {
            x0 = x0.min(s.pole.re);
            x1 = x1.max(s.pole.re);
            y0 = y0.min(s.pole.im);
            y1 = y1.max(s.pole.im);
        }
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1.0);
    Frame {
        x0: x0 - pad,
        x1: x1 + pad,
        y0: y0 - pad,
        y1: y1 + pad,
    }
}

/// Arrow scale (plot units per unit velocity) so that the longest drawn
/// arrow spans a tenth of the larger axis.
fn arrow_scale(locus: &Locus<f64>, f: &Frame) -> f64 {
    let vmax = arrow_samples(locus)
        .map(|(_, v)| v.norm())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    if vmax == 0.0 {
        return 0.0;
    }
    0.1 * (f.x1 - f.x0).max(f.y1 - f.y0) / vmax
}

fn arrow_samples(locus: &Locus<f64>) -> impl Iterator<Item = (num_complex::Complex64, num_complex::Complex64)> + '_ {
    let n = locus.len();
    let stride = (n / ARROWS_PER_BRANCH).max(1);
    locus.branches.iter().flat_map(move |b| {
        b.iter()
            .step_by(stride)
            .filter(|s| s.pole.re.is_finite() && s.pole.im.is_finite() && s.velocity.norm().is_finite())
            .map(|s| (s.pole, s.velocity))
    })
}

pub fn render(locus: &Locus<f64>, title: &str) -> String {
    let f = frame(locus);
    let scale = arrow_scale(locus, &f);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<metadata>{{"arrow_scale": {scale:e}, "arrow_scale_units": "plot units per unit velocity", "branches": {}, "samples": {}}}</metadata>"#,
        locus.branches.len(),
        locus.len()
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    s.push_str(
        r##"<defs><marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#333"/></marker></defs>
"##,
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes through the origin
    let (ox, oy) = (f.px(0.0), f.py(0.0));
    let _ = writeln!(
        s,
        r##"<g stroke="#999" stroke-width="1"><line x1="{MARGIN}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}"/><line x1="{ox:.2}" y1="{MARGIN}" x2="{ox:.2}" y2="{:.2}"/></g>"##,
        WIDTH - MARGIN,
        HEIGHT - MARGIN
    );
    let _ = writeln!(
        s,
        r##"<g font-family="sans-serif" font-size="11" fill="#444"><text x="{:.2}" y="{:.2}">Re</text><text x="{:.2}" y="{:.2}">Im</text>"##,
        WIDTH - MARGIN + 5.0,
        oy + 4.0,
        ox + 4.0,
        MARGIN - 8.0
    );
    for (x, y, label) in [
        (f.px(f.x0), oy + 14.0, f.x0),
        (f.px(f.x1), oy + 14.0, f.x1),
        (ox + 4.0, f.py(f.y0), f.y0),
        (ox + 4.0, f.py(f.y1) + 10.0, f.y1),
    ] {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}">{label:.3}</text>"#);
    }
    s.push_str("</g>\n");

    for (j, branch) in locus.branches.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        // split at non-finite samples
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for sample in branch {
            if sample.pole.re.is_finite() && sample.pole.im.is_finite() {
                runs.last_mut().unwrap().push(format!("{:.2},{:.2}", f.px(sample.pole.re), f.py(sample.pole.im)));
            } else if !runs.last().unwrap().is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.into_iter().filter(|r| r.len() > 1) {
            let _ = writeln!(
                s,
                r#"<polyline class="branch" data-branch="{j}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                run.join(" ")
            );
        }
        if let Some(first) = branch.first().filter(|p| p.pole.re.is_finite()) {
            let _ = writeln!(
                s,
                r#"<path d="M{:.2},{:.2} m-4,-4 l8,8 m0,-8 l-8,8" stroke="{color}" stroke-width="1.5"/>"#,
                f.px(first.pole.re),
                f.py(first.pole.im)
            );
        }
    }

    if scale > 0.0 {
        s.push_str(r##"<g class="velocity" stroke="#333" stroke-width="1" marker-end="url(#head)">"##);
        s.push('\n');
        let min_len = 2.0 * f.unit();
        for (p, v) in arrow_samples(locus) {
            let tip = p + v * scale;
            if (tip - p).norm() < min_len {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                f.px(p.re),
                f.py(p.im),
                f.px(tip.re),
                f.py(tip.im)
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
