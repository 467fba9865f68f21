//! SVG rendering of accuracy-vs-data scaling plots.
//!
//! Layout: log-scale hours on x, accuracy (percent) on y; one colour per
//! architecture series with measured points and the fitted curve swept over
//! the data range; the human-level region shaded above the benchmark
//! threshold; a dashed vertical line at ten years of video; star markers for
//! projected scenarios. Output is deterministic text with fixed precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::data::{Benchmark, ObservationSet};
use crate::models::{InputPoint, ScalingModel};
use crate::project::{Projection, HOURS_PER_YEAR};

/// Ten years of video, in hours.
pub const TEN_YEARS_HOURS: f64 = 10.0 * HOURS_PER_YEAR;

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width: f64,
    pub height: f64,
    pub title: String,
    pub benchmark: Benchmark,
    /// Points per fitted curve.
    pub curve_samples: usize,
}

impl PlotSpec {
    pub fn new(benchmark: Benchmark) -> Self {
        Self {
            width: 820.0,
            height: 520.0,
            title: format!("{} accuracy vs. pretraining data", benchmark),
            benchmark,
            curve_samples: 120,
        }
    }
}

struct Frame {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    log_min: f64,
    log_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, hours: f64) -> f64 {
        let t = (hours.log10() - self.log_min) / (self.log_max - self.log_min);
        self.left + t * (self.right - self.left)
    }

    fn y(&self, acc: f64) -> f64 {
        self.bottom - acc / self.y_max * (self.bottom - self.top)
    }
}

struct Series {
    params: u64,
    pixels: u64,
    points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(decade: i32) -> String {
    if (-3..=4).contains(&decade) {
        format!("{}", 10f64.powi(decade))
    } else {
        format!("1e{decade}")
    }
}

/// Renders the figure. `model` may be `None` to draw points only.
pub fn render_svg(
    spec: &PlotSpec,
    set: &ObservationSet,
    model: Option<&ScalingModel<f64>>,
    stars: &[Projection],
) -> String {
    // series in first-seen order, keyed by label
    let mut order: Vec<String> = Vec::new();
    let mut series: BTreeMap<String, Series> = BTreeMap::new();
    for o in set {
        let s = series.entry(o.arch_label.clone()).or_insert_with(|| {
            order.push(o.arch_label.clone());
            Series {
                params: o.params,
                pixels: o.pixels,
                points: Vec::new(),
            }
        });
        s.points.push((o.hours, o.accuracy));
    }

    let mut lo = TEN_YEARS_HOURS;
    let mut hi = TEN_YEARS_HOURS;
    for o in set {
        lo = lo.min(o.hours);
        hi = hi.max(o.hours);
    }
    for p in stars {
        lo = lo.min(p.hours);
        hi = hi.max(p.hours);
    }
    let (data_lo, data_hi) = set
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), o| (a.min(o.hours), b.max(o.hours)));

    let star_peak = stars.iter().map(|p| p.projected_accuracy).fold(100.0, f64::max);
    let frame = Frame {
        left: 70.0,
        right: spec.width - 170.0,
        top: 40.0,
        bottom: spec.height - 55.0,
        log_min: lo.log10().floor(),
        log_max: hi.log10().ceil().max(lo.log10().floor() + 1.0),
        y_max: (star_peak / 10.0).ceil() * 10.0,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = spec.width,
        h = spec.height
    );
    let _ = writeln!(
        svg,
        r#"<defs><clipPath id="plot-area"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        frame.left,
        frame.top,
        frame.right - frame.left,
        frame.bottom - frame.top
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (frame.left + frame.right) / 2.0,
        escape(&spec.title)
    );

    // human-level region
    let threshold = spec.benchmark.human_threshold();
    let _ = writeln!(
        svg,
        r##"<rect class="threshold-band" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#f8d0d0" fill-opacity="0.7"><title>human level ({threshold}%)</title></rect>"##,
        frame.left,
        frame.y(frame.y_max),
        frame.right - frame.left,
        frame.y(threshold) - frame.y(frame.y_max)
    );

    // axes and ticks
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}"/><line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}"/></g>"#,
        l = frame.left,
        r = frame.right,
        t = frame.top,
        b = frame.bottom
    );
    for d in frame.log_min as i32..=frame.log_max as i32 {
        let x = frame.x(10f64.powi(d));
        let _ = writeln!(
            svg,
            r#"<line class="x-tick" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            frame.bottom,
            frame.bottom + 5.0,
            frame.bottom + 18.0,
            tick_label(d)
        );
    }
    let mut acc = 0.0;
    while acc <= frame.y_max + 1e-9 {
        let y = frame.y(acc);
        let _ = writeln!(
            svg,
            r#"<line class="y-tick" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{acc}</text>"#,
            frame.left - 5.0,
            frame.left,
            frame.left - 8.0,
            y + 4.0
        );
        acc += 10.0;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">pretraining data (hours, log scale)</text>"#,
        (frame.left + frame.right) / 2.0,
        spec.height - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">accuracy (%)</text>"#,
        (frame.top + frame.bottom) / 2.0,
        (frame.top + frame.bottom) / 2.0
    );

    // ten-year line
    let xr = frame.x(TEN_YEARS_HOURS);
    let _ = writeln!(
        svg,
        r#"<line class="reference-line" x1="{xr:.2}" y1="{:.2}" x2="{xr:.2}" y2="{:.2}" stroke="black" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">10 years</text>"#,
        frame.top,
        frame.bottom,
        xr + 4.0,
        frame.top + 14.0
    );

    for (i, label) in order.iter().enumerate() {
        let s = &series[label];
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<g class="series" data-label="{}" stroke="{colour}" fill="{colour}">"#,
            escape(label)
        );
        if let Some(m) = model {
            let n = spec.curve_samples.max(2);
            let (a, b) = (data_lo.log10(), data_hi.log10());
            let mut pts = Vec::with_capacity(n);
            for k in 0..n {
                let h = 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64);
                let Ok(point) = InputPoint::new(h, s.params as f64, s.pixels as f64) else {
                    continue;
                };
                if let Ok(y) = m.evaluate(&point) {
                    pts.push(format!("{:.2},{:.2}", frame.x(h), frame.y(y)));
                }
            }
            let _ = writeln!(
                svg,
                r#"<polyline class="fit-curve" fill="none" stroke-width="2" clip-path="url(#plot-area)" points="{}"/>"#,
                pts.join(" ")
            );
        }
        for &(h, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle class="observation" cx="{:.2}" cy="{:.2}" r="3" fill-opacity="0.6"/>"#,
                frame.x(h),
                frame.y(y)
            );
        }
        let ly = frame.top + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke-width="2"/><text x="{:.2}" y="{:.2}" stroke="none">{}</text>"#,
            frame.right + 15.0,
            frame.right + 35.0,
            frame.right + 40.0,
            ly + 4.0,
            escape(label)
        );
        let _ = writeln!(svg, "</g>");
    }

    for p in stars {
        let _ = writeln!(
            svg,
            r##"<polygon class="projection-star" points="{}" fill="#ffd700" stroke="black"><title>{}: {:.1}%</title></polygon>"##,
            star_points(frame.x(p.hours), frame.y(p.projected_accuracy), 9.0),
            escape(&p.scenario.name),
            p.projected_accuracy
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn star_points(cx: f64, cy: f64, r: f64) -> String {
    (0..10)
        .map(|k| {
            let radius = if k % 2 == 0 { r } else { r * 0.45 };
            let angle = std::f64::consts::PI * (k as f64 / 5.0) - std::f64::consts::FRAC_PI_2;
            format!("{:.2},{:.2}", cx + radius * angle.cos(), cy + radius * angle.sin())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::{generate_synthetic, SyntheticSpec};
    use crate::models::ModelFamily;
    use crate::project::{project, standard_scenarios, ReferencePoint};

    fn model() -> ScalingModel<f64> {
        ScalingModel::from_f64(ModelFamily::LogPoly6, &[0.05, 0.5, 0.1, 0.2, 2.0, 15.0]).unwrap()
    }

    #[test]
    fn figure_elements() {
        let m = model();
        let set = generate_synthetic(&SyntheticSpec::standard(m.clone(), 0)).unwrap();
        let stars: Vec<_> = standard_scenarios(Benchmark::ImagenetTop5)
            .iter()
            .map(|s| project(&m, &ReferencePoint::VIT_H_476, s, Benchmark::ImagenetTop5).unwrap())
            .collect();
        let svg = render_svg(&PlotSpec::new(Benchmark::ImagenetTop5), &set, Some(&m), &stars);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches(r#"class="fit-curve""#).count(), 6);
        assert_eq!(svg.matches(r#"class="observation""#).count(), 78);
        assert_eq!(svg.matches(r#"class="threshold-band""#).count(), 1);
        assert_eq!(svg.matches(r#"class="reference-line""#).count(), 1);
        assert_eq!(svg.matches(r#"class="projection-star""#).count(), 2);
        assert!(svg.contains("ViT-H/14@476"));
        assert_eq!(
            svg,
            render_svg(&PlotSpec::new(Benchmark::ImagenetTop5), &set, Some(&m), &stars)
        );
    }

    #[test]
    fn labels_are_escaped() {
        let mut set = generate_synthetic(&SyntheticSpec::standard(model(), 0)).unwrap();
        set.observations[0].arch_label = "<b>&".into();
        let svg = render_svg(&PlotSpec::new(Benchmark::OodImagenetTop1), &set, None, &[]);
        assert!(svg.contains("&lt;b&gt;&amp;"));
        assert!(!svg.contains("<b>"));
    }
}
