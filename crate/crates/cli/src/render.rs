//! SVG line art of planar reach sets.

use reachkit::{boundary_point, support_box, BoundaryParams, ReachError, ReachSpec, Result, Sign};

const ARC_SAMPLES: usize = 512;
const SIZE: f64 = 512.0;
const MARGIN: f64 = 24.0;

/// Upper and lower boundary arcs of an `r = (2)` reach set plus its diameter chord.
pub fn render2d(spec: &ReachSpec, header: &str) -> Result<String> {
    if spec.r() != [2] {
        return Err(ReachError::Capability(format!(
            "render2d draws r = (2) only, got r = {:?}",
            spec.r()
        )));
    }
    let mut arcs = Vec::new();
    for sign in [Sign::Upper, Sign::Lower] {
        let arc = (0..ARC_SAMPLES)
            .map(|k| {
                let s = spec.t * k as f64 / (ARC_SAMPLES - 1) as f64;
                boundary_point(spec, &BoundaryParams { block: 0, sign, s: vec![s] })
            })
            .collect::<Result<Vec<_>>>()?;
        arcs.push((sign, arc));
    }
    let chord = diameter_chord(spec)?;

    let pts = arcs.iter().flat_map(|(_, a)| a.iter()).chain(chord.iter());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: &[f64]| {
        let x = MARGIN + (p[0] - lo[0]) * scale + 0.5 * (span - (hi[0] - lo[0])) * scale;
        let y = SIZE - MARGIN - (p[1] - lo[1]) * scale - 0.5 * (span - (hi[1] - lo[1])) * scale;
        format!("{x:.3},{y:.3}")
    };

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!("<!-- {header} -->\n"));
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (sign, arc) in &arcs {
        let colour = match sign {
            Sign::Upper => "#1f77b4",
            Sign::Lower => "#d62728",
        };
        let path: Vec<String> = arc.iter().map(|p| map(p)).collect();
        svg.push_str(&format!(
            "<polyline class=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\" points=\"{}\"/>\n",
            sign.label(),
            path.join(" ")
        ));
    }
    svg.push_str(&format!(
        "<polyline class=\"diameter\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\" stroke-dasharray=\"6 4\" points=\"{} {}\"/>\n",
        map(&chord[0]),
        map(&chord[1])
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Supporting points in `+-zeta`, the endpoints of a longest chord.
fn diameter_chord(spec: &ReachSpec) -> Result<[Vec<f64>; 2]> {
    let dir = reachkit::diameter(spec).direction.unwrap_or_else(|| vec![1.0, 0.0]);
    let neg: Vec<f64> = dir.iter().map(|v| -v).collect();
    let a = support_box(spec, &dir)?.argmax_state;
    let b = support_box(spec, &neg)?.argmax_state;
    match (a, b) {
        (Some(a), Some(b)) => Ok([a, b]),
        _ => Err(ReachError::Degenerate("no supporting point for the diameter chord".into())),
    }
}
