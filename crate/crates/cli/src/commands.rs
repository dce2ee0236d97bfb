//! The four workflows. Each takes a resolved config and writes its outputs
//! through a [`Sink`].

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::json;
use subwave::dtn::find_resonances_dtn;
use subwave::resonance::{ModeRoot, SearchOptions};
use subwave::scattering::{
    find_peaks, shell_statistics, sign_changes, solve_scattering, sweep, uniform_grid, Point,
};
use subwave::swe::find_swe_roots;
use subwave::{CapacitanceSystem, Execution, MaterialParams};

use crate::config::{Layout, RunConfig, Validated};
use crate::error::CliError;
use crate::output::{num, Sink};

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("summary serializes");
    s.push('\n');
    s
}

fn search_options() -> SearchOptions {
    SearchOptions {
        execution: Execution::Parallel,
        ..SearchOptions::default()
    }
}

struct SpectrumRow {
    mode: usize,
    asymptotic: Complex64,
    root: Option<ModeRoot>,
}

pub fn spectrum(cfg: &RunConfig, v: &Validated, sink: &Sink) -> Result<(), CliError> {
    let (g, m) = (&v.geometry, &v.materials);
    let t0 = Instant::now();
    let cs = CapacitanceSystem::new(g)?;
    let asymptotic = cs.asymptotic_frequencies(m);
    let capacitance_seconds = t0.elapsed().as_secs_f64();
    let seeds = v.seeds.clone().unwrap_or_else(|| asymptotic.clone());

    let opts = search_options();
    let t1 = Instant::now();
    let roots: Vec<Option<ModeRoot>> = match find_swe_roots(m, g, &seeds, &opts) {
        Ok(r) => r.into_iter().map(Some).collect(),
        // keep whatever converges on its own
        Err(_) => seeds
            .iter()
            .enumerate()
            .map(|(i, s)| {
                find_swe_roots(m, g, &[*s], &opts).ok().map(|mut r| {
                    r[0].mode = i + 1;
                    r[0]
                })
            })
            .collect(),
    };
    let root_seconds = t1.elapsed().as_secs_f64();

    let mut rows: Vec<SpectrumRow> = roots
        .into_iter()
        .enumerate()
        .map(|(i, root)| SpectrumRow {
            mode: i + 1,
            asymptotic: asymptotic[i],
            root: root.filter(|r| r.root.re > 0.0),
        })
        .collect();
    rows.sort_by(|a, b| {
        let key = |r: &SpectrumRow| r.root.map_or(r.asymptotic.re, |x| x.root.re);
        key(a).total_cmp(&key(b))
    });

    let mut csv =
        String::from("mode,re_asym,im_asym,re_exact,im_exact,abs_diff,muller_iters,converged\n");
    for r in &rows {
        let (exact, diff, iters) = match r.root {
            Some(x) => (
                x.root,
                (x.root - r.asymptotic).norm(),
                x.iterations.to_string(),
            ),
            None => (Complex64::new(f64::NAN, f64::NAN), f64::NAN, String::new()),
        };
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.mode,
            num(r.asymptotic.re),
            num(r.asymptotic.im),
            num(exact.re),
            num(exact.im),
            num(diff),
            iters,
            r.root.is_some()
        )
        .unwrap();
    }
    sink.write_primary(&csv)?;

    let failed: Vec<usize> = rows
        .iter()
        .filter(|r| r.root.is_none())
        .map(|r| r.mode)
        .collect();
    let summary = json!({
        "layers": g.layers(),
        "delta": m.delta(),
        "modes": rows.len(),
        "converged": rows.len() - failed.len(),
        "failed_modes": failed,
        "root_seconds": root_seconds,
        "capacitance_seconds": capacitance_seconds,
        "speedup": root_seconds / capacitance_seconds.max(f64::MIN_POSITIVE),
    });
    sink.write_companion("summary.json", &to_json(&summary), true)?;
    sink.write_companion("config.json", &cfg.to_json(), false)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::PartialSpectrum {
            failed: failed.len(),
            total: rows.len(),
        })
    }
}

pub fn sweep_cmd(cfg: &RunConfig, v: &Validated, sink: &Sink) -> Result<(), CliError> {
    let (g, m) = (&v.geometry, &v.materials);
    let resonances: Vec<f64> = CapacitanceSystem::new(g)?
        .asymptotic_frequencies(m)
        .iter()
        .map(|w| w.re)
        .collect();
    let lo = cfg.sweep.omega_min.unwrap_or(0.5 * resonances[0]);
    let hi = cfg
        .sweep
        .omega_max
        .unwrap_or(1.5 * resonances[resonances.len() - 1]);
    let grid =
        uniform_grid(lo, hi, cfg.sweep.steps).map_err(|e| CliError::Config(e.to_string()))?;

    // marker rows sit at the asymptotic resonances inside the range
    let markers: Vec<(usize, f64)> = resonances
        .iter()
        .enumerate()
        .filter(|(_, w)| (lo..=hi).contains(*w))
        .map(|(i, w)| (i + 1, *w))
        .collect();
    let mut omegas = grid.clone();
    omegas.extend(markers.iter().map(|(_, w)| *w));

    let t0 = Instant::now();
    let pts = sweep(&omegas, cfg.direction, cfg.n_max, m, g, Execution::Parallel)?;
    let seconds = t0.elapsed().as_secs_f64();

    let grid_pts = &pts[..grid.len()];
    let mut rows: Vec<(f64, usize, String)> = grid
        .iter()
        .enumerate()
        .map(|(i, w)| (*w, i, String::new()))
        .collect();
    rows.extend(
        markers
            .iter()
            .enumerate()
            .map(|(j, (mode, w))| (*w, grid.len() + j, format!("mode_{mode}"))),
    );
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut csv = String::from("omega_in,l2_norm,monopole_coeff_abs,marker\n");
    for (_, idx, marker) in &rows {
        let p = &pts[*idx];
        writeln!(
            csv,
            "{},{},{},{}",
            num(p.omega),
            num(p.l2_norm),
            num(p.monopole_coeff_abs),
            marker
        )
        .unwrap();
    }
    sink.write_primary(&csv)?;

    let norms: Vec<f64> = grid_pts.iter().map(|p| p.l2_norm).collect();
    let peaks: Vec<serde_json::Value> = find_peaks(&norms)
        .iter()
        .map(|&i| {
            let w = grid[i];
            let (mode, offset) = resonances
                .iter()
                .enumerate()
                .map(|(j, r)| (j + 1, (w - r) / r))
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("at least one resonance");
            json!({
                "omega": w,
                "l2_norm": norms[i],
                "nearest_mode": mode,
                "relative_offset": offset,
            })
        })
        .collect();
    let summary = json!({
        "layers": g.layers(),
        "points": grid.len(),
        "omega_min": lo,
        "omega_max": hi,
        "resonances": resonances,
        "peaks": peaks,
        "seconds": seconds,
    });
    sink.write_companion("summary.json", &to_json(&summary), true)?;
    sink.write_companion("config.json", &cfg.to_json(), false)
}

pub fn field(cfg: &RunConfig, v: &Validated, sink: &Sink) -> Result<(), CliError> {
    let (g, m) = (&v.geometry, &v.materials);
    let f = &cfg.field;
    let cs = CapacitanceSystem::new(g)?;
    let (omega, mode) = match (f.omega_in, f.mode_index) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either omega_in or mode_index, not both".into(),
            ))
        }
        (Some(w), None) => (w, None),
        (None, idx) => {
            let i = idx.unwrap_or(1);
            if i == 0 || i > g.layers() {
                return Err(CliError::Config(format!(
                    "mode index {i} outside 1..={}",
                    g.layers()
                )));
            }
            (cs.asymptotic_frequencies(m)[i - 1].re, Some(i))
        }
    };
    if !(omega.is_finite() && omega > 0.0) {
        return Err(CliError::Config(format!(
            "omega_in must be positive, got {omega}"
        )));
    }
    if f.points < 2 || f.shell_samples == 0 {
        return Err(CliError::Config(
            "field needs at least two points per axis and one shell sample".into(),
        ));
    }
    let extent = f.extent.unwrap_or(1.1 * g.outer(1));
    if !(extent.is_finite() && extent > 0.0) {
        return Err(CliError::Config(format!(
            "extent must be positive, got {extent}"
        )));
    }

    let sol = solve_scattering(omega, cfg.direction, cfg.n_max, m, g)?;
    let axis = uniform_axis(extent, f.points);
    let d = cfg.direction;
    let points: Vec<Point> = match f.layout {
        Layout::Line => axis
            .iter()
            .map(|t| [t * d[0], t * d[1], t * d[2]])
            .collect(),
        Layout::Plane => axis
            .iter()
            .flat_map(|y| axis.iter().map(move |x| [*x, *y, 0.0]))
            .collect(),
    };
    let values = Execution::Parallel.map(&points, |x| sol.field_at(x));
    let mut csv = String::from("x1,x2,x3,re_u,im_u\n");
    for (x, u) in points.iter().zip(values) {
        let u = u?;
        writeln!(
            csv,
            "{},{},{},{},{}",
            num(x[0]),
            num(x[1]),
            num(x[2]),
            num(u.re),
            num(u.im)
        )
        .unwrap();
    }
    sink.write_primary(&csv)?;

    let stats = shell_statistics(&sol, f.shell_samples)?;
    let mut table = String::from("shell,mean_re,std_re,mean_abs,std_abs,cv,re_mean_u,im_mean_u\n");
    for s in &stats {
        writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            s.shell,
            num(s.mean_re),
            num(s.std_re),
            num(s.mean_abs),
            num(s.std_abs),
            num(s.cv),
            num(s.mean.re),
            num(s.mean.im)
        )
        .unwrap();
    }
    sink.write_companion("shells.csv", &table, true)?;
    let means: Vec<Complex64> = stats.iter().map(|s| s.mean).collect();
    let summary = json!({
        "omega_in": omega,
        "mode_index": mode,
        "sign_changes": sign_changes(&means, &cs.volumes),
        "max_cv": stats.iter().map(|s| s.cv).fold(0.0, f64::max),
    });
    sink.write_companion("summary.json", &to_json(&summary), true)?;
    sink.write_companion("config.json", &cfg.to_json(), false)
}

fn uniform_axis(extent: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| -extent + 2.0 * extent * i as f64 / (points - 1) as f64)
        .collect()
}

/// SWE, DtN and asymptotic roots sorted by the SWE real part.
fn three_way(
    m: &MaterialParams,
    v: &Validated,
) -> Result<Vec<(usize, Complex64, Complex64, Complex64)>, CliError> {
    let g = &v.geometry;
    let asym = CapacitanceSystem::new(g)?.asymptotic_frequencies(m);
    let seeds = v.seeds.clone().unwrap_or_else(|| asym.clone());
    let opts = search_options();
    let swe = find_swe_roots(m, g, &seeds, &opts)?;
    let dtn = find_resonances_dtn(m, g, &seeds, &opts)?;
    let mut out: Vec<_> = swe
        .iter()
        .zip(&dtn)
        .map(|(s, d)| (s.mode, asym[s.mode - 1], s.root, d.root))
        .collect();
    out.sort_by(|a, b| a.2.re.total_cmp(&b.2.re));
    Ok(out)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn compare(cfg: &RunConfig, v: &Validated, sink: &Sink) -> Result<(), CliError> {
    let c = &cfg.compare;
    if !(c.tolerance > 0.0 && c.asymptotic_tolerance > 0.0) {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    if c.deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(CliError::Config(
            "convergence deltas must be positive".into(),
        ));
    }
    let m = &v.materials;
    let triples = three_way(m, v)?;
    let mut any_flagged = false;
    let modes: Vec<serde_json::Value> = triples
        .iter()
        .map(|&(mode, asym, swe, dtn)| {
            let swe_dtn = (swe - dtn).norm();
            let swe_asym = (swe - asym).norm();
            let dtn_asym = (dtn - asym).norm();
            let flag_exact = swe_dtn > c.tolerance;
            let flag_asym = swe_asym.max(dtn_asym) > c.asymptotic_tolerance * asym.norm();
            any_flagged |= flag_exact || flag_asym;
            json!({
                "mode": mode,
                "asymptotic": pair(asym),
                "swe": pair(swe),
                "dtn": pair(dtn),
                "swe_dtn": swe_dtn,
                "swe_asymptotic": swe_asym,
                "dtn_asymptotic": dtn_asym,
                "flagged": flag_exact || flag_asym,
            })
        })
        .collect();

    // convergence study: unit wave speeds, contrast varied, seeds from the
    // asymptotics at each contrast
    let convergence = if c.deltas.len() >= 2 {
        let unseeded = Validated {
            seeds: None,
            ..v.clone()
        };
        let mut diffs = Vec::with_capacity(c.deltas.len());
        for &d in &c.deltas {
            let md =
                MaterialParams::from_contrast(d).map_err(|e| CliError::Config(e.to_string()))?;
            let t = three_way(&md, &unseeded)?;
            diffs.push(
                t.iter()
                    .map(|(_, a, s, _)| (s - a).norm())
                    .collect::<Vec<_>>(),
            );
        }
        let xs: Vec<f64> = c.deltas.iter().map(|d| d.ln()).collect();
        let slopes: Vec<f64> = (0..v.geometry.layers())
            .map(|i| {
                let ys: Vec<f64> = diffs.iter().map(|d| d[i].ln()).collect();
                least_squares_slope(&xs, &ys)
            })
            .collect();
        json!({ "deltas": c.deltas, "abs_diff": diffs, "slopes": slopes })
    } else {
        serde_json::Value::Null
    };

    let summary = json!({
        "layers": v.geometry.layers(),
        "delta": m.delta(),
        "tolerance": c.tolerance,
        "asymptotic_tolerance": c.asymptotic_tolerance,
        "modes": modes,
        "any_flagged": any_flagged,
        "convergence": convergence,
    });
    sink.write_primary(&to_json(&summary))?;
    sink.write_companion("config.json", &cfg.to_json(), false)
}
