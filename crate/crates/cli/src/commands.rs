//! The subcommands. Each computes everything first and returns the files
//! to write plus a short report for the terminal.

use std::fmt::Write as _;
use std::fs::File;
use std::sync::Arc;

use gpscav_core::airy::{
    airy_on_patch, dirichlet_residual, field_residuals, sandwich_check, strain_k, AiryOptions, Patch,
};
use gpscav_core::elasticity::{boundary_sobolev_norm, solve_forward, stress_field, SobolevOrder};
use gpscav_core::geometry::hausdorff_distance;
use gpscav_core::inverse::{
    dyadic_radii, reconstruct, reconstruct_discrepancy, smallness_profile, stability_sweep, vanishing_rate,
    CavityFamily, ObservedData, ReconstructOptions, SweepOptions, VanishingMode,
};
use gpscav_core::mesh::{generate_mesh_with, read_mesh, write_mesh};
use gpscav_core::{Mesh, SaddleSolution, StarShape};

use crate::config::{PatchChoice, RunConfig};
use crate::error::{CliError, Context};
use crate::output::{fit_summary, num, Csv, Outputs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Mesh,
    Forward,
    AiryCheck,
    Sweep,
    Rates,
    Profile,
    Reconstruct,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mesh => "mesh",
            Command::Forward => "forward",
            Command::AiryCheck => "airy-check",
            Command::Sweep => "sweep",
            Command::Rates => "rates",
            Command::Profile => "profile",
            Command::Reconstruct => "reconstruct",
        }
    }
}

/// Result of a command: files to write and lines for the terminal.
pub struct Report {
    pub outputs: Outputs,
    pub lines: Vec<String>,
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Mesh => mesh(cfg),
        Command::Forward => forward(cfg),
        Command::AiryCheck => airy_check(cfg),
        Command::Sweep => sweep(cfg),
        Command::Rates => rates(cfg),
        Command::Profile => profile(cfg),
        Command::Reconstruct => reconstruct_cmd(cfg),
    }
}

fn build_mesh(cfg: &RunConfig) -> Result<Arc<Mesh>, CliError> {
    let m = match &cfg.mesh.file {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::Io(format!("mesh.file `{}`: {e}", p.display())))?;
            read_mesh(f).ctx(&format!("mesh.file `{}`", p.display()))?
        }
        None => generate_mesh_with(&cfg.domain, &cfg.mesh.options).ctx("mesh")?,
    };
    Ok(Arc::new(m))
}

fn solve(cfg: &RunConfig) -> Result<SaddleSolution, CliError> {
    let m = build_mesh(cfg)?;
    solve_forward(m, &cfg.domain, &cfg.material, &cfg.load, &cfg.solver).ctx("forward solve")
}

fn mesh(cfg: &RunConfig) -> Result<Report, CliError> {
    let m = build_mesh(cfg)?;
    let mut out = Outputs::default();
    let mut text = Vec::new();
    write_mesh(&m, &mut text).ctx("mesh output")?;
    out.add("mesh.gpsmesh", text);
    let mut csv = Csv::new(&["edge", "tag", "x1a", "x2a", "x1b", "x2b"]);
    for (i, e) in m.boundary_edges.iter().enumerate() {
        let (a, b) = (m.nodes[e.nodes[0]], m.nodes[e.nodes[1]]);
        csv.row(&[i.to_string(), e.tag.to_string(), num(a.x1), num(a.x2), num(b.x1), num(b.x2)]);
    }
    out.csv(
        "mesh_boundary",
        &csv,
        "set size ratio -1\nplot $CSV skip 2 using 3:4:($5-$3):($6-$4) with vectors nohead notitle",
    );
    Ok(Report {
        outputs: out,
        lines: vec![format!(
            "mesh: {} nodes, {} triangles, h_max {:.4e}, min angle {:.2} deg",
            m.num_nodes(),
            m.num_triangles(),
            m.h_max,
            m.min_angle_deg()
        )],
    })
}

fn forward(cfg: &RunConfig) -> Result<Report, CliError> {
    let sol = solve(cfg)?;
    let m = sol.mesh();
    let mut out = Outputs::default();
    let mut disp = Csv::new(&["node", "x1", "x2", "a1", "a2"]);
    for (i, (p, a)) in m.nodes.iter().zip(sol.displacement.nodal()).enumerate() {
        disp.row(&[i.to_string(), num(p.x1), num(p.x2), num(a[0]), num(a[1])]);
    }
    out.csv(
        "displacement",
        &disp,
        "set size ratio -1\nplot $CSV skip 2 using 2:3:4:5 with vectors title 'a'",
    );
    let stress = stress_field(&sol.displacement, &cfg.material);
    let mut s = Csv::new(&["point", "x1", "x2", "N11", "N22", "N12"]);
    for (i, (p, n)) in stress.points.iter().zip(&stress.values).enumerate() {
        s.row(&[i.to_string(), num(p.x1), num(p.x2), num(n[0][0]), num(n[1][1]), num(n[0][1])]);
    }
    out.csv(
        "stress",
        &s,
        "set size ratio -1\nset palette rgb 33,13,10\nplot $CSV skip 2 using 2:3:4 with points pt 7 ps 0.3 palette title 'N11'",
    );
    let mut summary = String::new();
    let nhat = boundary_sobolev_norm(&cfg.load, &cfg.domain, SobolevOrder::MinusHalf);
    let _ = writeln!(summary, "energy = {}", num(sol.energy));
    let _ = writeln!(summary, "work = {}", num(sol.work));
    let _ = writeln!(summary, "energy_defect = {}", num(sol.energy_defect()));
    let _ = writeln!(summary, "residual = {}", num(sol.residual));
    let _ = writeln!(summary, "constraint_residual = {}", num(sol.constraint_residual));
    let _ = writeln!(summary, "equilibrium_residual = {}", num(sol.equilibrium.max_residual()));
    let _ = writeln!(summary, "l2_norm = {}", num(sol.displacement.l2_norm()));
    let _ = writeln!(summary, "h1_norm = {}", num(sol.displacement.h1_norm()));
    let _ = writeln!(summary, "load_norm_h-1/2 = {}", num(nhat));
    out.add("forward_summary.txt", summary.clone());
    let mut lines = vec![format!(
        "forward: {} nodes, energy {:.6e}, energy defect {:.2e}",
        m.num_nodes(),
        sol.energy,
        sol.energy_defect()
    )];
    lines.extend(summary.lines().map(str::to_string));
    Ok(Report { outputs: out, lines })
}

fn airy_check(cfg: &RunConfig) -> Result<Report, CliError> {
    let a = &cfg.airy;
    let patch = match &a.patch {
        PatchChoice::Disk { center } => {
            let c = center.ok_or_else(|| CliError::Config("airy.center: required for airy.patch = disk".into()))?;
            Patch::interior_disk(&cfg.domain, c, a.radius).ctx("airy.center/airy.patch_radius")?
        }
        PatchChoice::Rect { cavity, theta } => {
            Patch::boundary_rect(&cfg.domain, *cavity, *theta, a.radius).ctx("airy.theta/airy.patch_radius")?
        }
    };
    let sol = solve(cfg)?;
    let stress = stress_field(&sol.displacement, &cfg.material);
    let opts = AiryOptions {
        degree: a.degree,
        ..AiryOptions::default()
    };
    let airy = airy_on_patch(&patch, &cfg.domain, &stress, &opts).ctx("airy patch")?;
    let residuals = field_residuals(&airy, &cfg.material, &cfg.domain).ctx("airy residuals")?;
    let sandwich = sandwich_check(&airy, &sol.displacement, &cfg.material, a.slack);
    let mismatch = strain_k(&cfg.material, &airy).strain_mismatch(&sol.displacement);

    let mut out = Outputs::default();
    let mut csv = Csv::new(&["node", "x1", "x2", "phi", "phi_1", "phi_2"]);
    for (i, x, v) in airy.nodal(sol.mesh(), &cfg.domain) {
        csv.row(&[i.to_string(), num(x.x1), num(x.x2), num(v[0]), num(v[1]), num(v[2])]);
    }
    out.csv(
        "airy",
        &csv,
        "set size ratio -1\nset palette rgb 33,13,10\nplot $CSV skip 2 using 2:3:4 with points pt 7 ps 0.5 palette title 'phi'",
    );
    let mut r = String::new();
    let _ = writeln!(r, "fit_residual = {}", num(airy.fit_residual));
    let _ = writeln!(r, "plate_residual = {}", num(residuals.plate));
    let _ = writeln!(r, "compatibility_residual = {}", num(residuals.compatibility));
    let _ = writeln!(r, "strain_mismatch = {}", num(mismatch));
    let _ = writeln!(
        r,
        "sandwich = {}/{} points, fraction {}, ratio range [{}, {}], slack {}",
        sandwich.satisfied,
        sandwich.points,
        num(sandwich.fraction()),
        num(sandwich.min_ratio),
        num(sandwich.max_ratio),
        num(a.slack)
    );
    if matches!(a.patch, PatchChoice::Rect { .. }) {
        let d = dirichlet_residual(&airy, &cfg.domain, a.samples).ctx("airy Dirichlet check")?;
        let _ = writeln!(r, "dirichlet_phi_rel = {}", num(d.phi_rel));
        let _ = writeln!(r, "dirichlet_phi_n_rel = {}", num(d.phi_n_rel));
    }
    out.add("airy_report.txt", r.clone());
    Ok(Report {
        outputs: out,
        lines: r.lines().map(str::to_string).collect(),
    })
}

fn sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let inv = &cfg.inverse;
    let base = cavity(cfg, inv.cavity)?.clone();
    let family = match &inv.direction {
        None => CavityFamily::radial(base, inv.t_values.clone()),
        Some(dir) => CavityFamily::new(base, inv.dcenter, dir.clone(), inv.t_values.clone()),
    }
    .ctx("inverse.direction")?;
    let mut opts = SweepOptions::new(cfg.mesh.options.h);
    opts.mesh = cfg.mesh.options.clone();
    opts.solver = cfg.solver;
    opts.cavity = inv.cavity;
    opts.sigma_samples = inv.sigma_samples;
    opts.distance_samples = inv.distance_samples;
    opts.d0_factor = inv.d0_factor;
    let res = stability_sweep(&family, &cfg.domain, &cfg.material, &cfg.load, &opts).ctx("sweep")?;

    let mut csv = Csv::new(&["t", "epsilon", "d_H", "d", "d_m", "Nhat_norm"]);
    for r in &res.rows {
        csv.nums(&[r.t, r.epsilon, r.d_h, r.d, r.d_m, r.nhat_norm]);
    }
    let mut fit = vec![
        fit_summary("eta", res.eta.as_ref()),
        fit_summary("small_d", res.small_d.as_ref()),
        format!("spearman={}", res.spearman.map(num).unwrap_or_else(|| "unavailable".into())),
        format!("d_over_dm={}", res.d_over_dm.map(num).unwrap_or_else(|| "unavailable".into())),
        format!("rows={}, failed_rows={}", res.rows.len(), res.failures.len()),
    ];
    fit.extend(res.failures.iter().map(|f| format!("failed t={}: {}", num(f.t), f.message)));
    for l in &fit {
        csv.comment(l);
    }
    let mut out = Outputs::default();
    out.csv(
        "sweep",
        &csv,
        "set logscale xy\nset xlabel 'epsilon'\nset ylabel 'd_H'\nplot $CSV skip 2 using 2:3 with linespoints title 'd_H vs epsilon'",
    );
    out.add("sweep_fit.txt", fit.join("\n") + "\n");
    Ok(Report {
        outputs: out,
        lines: fit,
    })
}

fn rates(cfg: &RunConfig) -> Result<Report, CliError> {
    let inv = &cfg.inverse;
    let center = match (inv.rate_center, inv.rate_mode) {
        (Some(c), _) => c,
        (None, VanishingMode::Boundary) => cavity(cfg, inv.cavity)?.eval(0.0),
        (None, VanishingMode::Interior) => {
            return Err(CliError::Config("inverse.rate_center: required for inverse.rate_mode = interior".into()))
        }
    };
    let sol = solve(cfg)?;
    let radii = dyadic_radii(inv.rate_rmax, inv.rate_levels);
    let rate = vanishing_rate(&sol.displacement, &cfg.domain, center, &radii, inv.rate_mode)
        .ctx("inverse.rate_center/inverse.rate_rmax")?;
    let mut csv = Csv::new(&["r", "energy"]);
    for (r, e) in rate.radii.iter().zip(&rate.energies) {
        csv.nums(&[*r, *e]);
    }
    let line = fit_summary("rate", Some(&rate.fit));
    csv.comment(&line);
    let mut out = Outputs::default();
    out.csv(
        "rates",
        &csv,
        "set logscale xy\nset xlabel 'r'\nset ylabel 'local energy'\nplot $CSV skip 2 using 1:2 with linespoints title 'energy'",
    );
    Ok(Report {
        outputs: out,
        lines: vec![line],
    })
}

fn profile(cfg: &RunConfig) -> Result<Report, CliError> {
    let inv = &cfg.inverse;
    let sol = solve(cfg)?;
    let norm = boundary_sobolev_norm(&cfg.load, &cfg.domain, SobolevOrder::MinusHalf);
    let prof = smallness_profile(&sol.displacement, &cfg.domain, norm, &inv.profile_rho, inv.profile_s)
        .ctx("inverse.profile_rho/inverse.profile_s")?;
    let mut csv = Csv::new(&["rho", "r0_over_rho", "value", "ln_value", "x1", "x2", "centers"]);
    let mut lines = Vec::new();
    for p in &prof {
        let r = cfg.domain.r0 / p.rho;
        csv.row(&[
            num(p.rho),
            num(r),
            num(p.value),
            num(p.value.ln()),
            num(p.argmin.x1),
            num(p.argmin.x2),
            p.centers.to_string(),
        ]);
        lines.push(format!("rho {:.4e}: min normalized energy {:.6e} over {} centers", p.rho, p.value, p.centers));
    }
    let mut out = Outputs::default();
    out.csv(
        "profile",
        &csv,
        "set logscale x\nset xlabel 'r0/rho'\nset ylabel 'ln profile'\nplot $CSV skip 2 using 2:4 with linespoints title 'ln profile'",
    );
    Ok(Report { outputs: out, lines })
}

fn reconstruct_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let inv = &cfg.inverse;
    let target = inv
        .target
        .clone()
        .ok_or_else(|| CliError::Config("inverse.target: required by reconstruct".into()))?;
    let k = inv.cavity;
    let base = cavity(cfg, k)?;
    let init = match &inv.init {
        Some(s) => s.clone(),
        None => base.with_modes(inv.modes).ctx("inverse.modes")?,
    };
    // Synthetic data on a mesh one refinement finer than the reconstruction.
    let dt = cfg.domain.with_cavity(k, target.clone()).ctx("inverse.target")?;
    let mut fine = cfg.mesh.options.clone();
    fine.h /= 2.0;
    let fine = generate_mesh_with(&dt, &fine).ctx("inverse.target mesh")?;
    let data = solve_forward(Arc::new(fine), &dt, &cfg.material, &cfg.load, &cfg.solver).ctx("data forward solve")?;
    let observed = ObservedData::from_solution(&data, &cfg.domain, inv.sigma_samples).ctx("observed data")?;

    let mut opts = ReconstructOptions::new(cfg.mesh.options.h);
    opts.mesh = cfg.mesh.options.clone();
    opts.solver = cfg.solver;
    opts.cavity = k;
    opts.modes = inv.modes;
    opts.fit_center = inv.fit_center;
    opts.fd_step = inv.fd_step;
    opts.step_tol = inv.step_tol;
    opts.max_iter = inv.max_iter;
    let (res, delta) = if inv.noise > 0.0 {
        let (noisy, delta) = observed.with_noise(inv.noise, cfg.run.seed, cfg.domain.r0).ctx("inverse.noise")?;
        let r = reconstruct_discrepancy(
            &cfg.domain,
            &cfg.material,
            &cfg.load,
            &noisy,
            &init,
            &opts,
            delta,
            inv.tau,
            &inv.reg_weights,
        )
        .ctx("reconstruct")?;
        (r, Some(delta))
    } else {
        (
            reconstruct(&cfg.domain, &cfg.material, &cfg.load, &observed, &init, &opts).ctx("reconstruct")?,
            None,
        )
    };
    let dh = hausdorff_distance(&res.recovered, &target, inv.distance_samples);

    let mut hist = Csv::new(&["iteration", "misfit"]);
    for (i, m) in res.misfit_history.iter().enumerate() {
        hist.row(&[i.to_string(), num(*m)]);
    }
    let mut shapes = Csv::new(&["theta", "target_x1", "target_x2", "recovered_x1", "recovered_x2", "init_x1", "init_x2"]);
    let n = 256;
    for i in 0..=n {
        let th = std::f64::consts::TAU * i as f64 / n as f64;
        let (a, b, c) = (target.eval(th), res.recovered.eval(th), init.eval(th));
        shapes.nums(&[th, a.x1, a.x2, b.x1, b.x2, c.x1, c.x2]);
    }
    let mut summary = vec![
        format!("recovered = {}", res.recovered),
        format!("target = {target}"),
        format!("init = {init}"),
        format!("d_H_over_r0 = {}", num(dh / cfg.domain.r0)),
        format!("iterations = {}", res.iterations),
        format!("converged = {}", res.converged),
        format!("reg_weight = {}", num(res.reg_weight)),
        format!("data_misfit = {}", num(res.data_misfit)),
    ];
    if let Some(d) = delta {
        summary.push(format!("noise_delta = {}", num(d)));
    }
    let mut out = Outputs::default();
    out.csv(
        "reconstruct",
        &hist,
        "set logscale y\nset xlabel 'iteration'\nplot $CSV skip 2 using 1:2 with linespoints title 'misfit'",
    );
    out.csv(
        "reconstruct_shapes",
        &shapes,
        "set size ratio -1\nplot $CSV skip 2 using 2:3 with lines title 'target', \
         '' skip 2 using 4:5 with lines title 'recovered', '' skip 2 using 6:7 with lines dt 2 title 'initial'",
    );
    out.add("reconstruct_summary.txt", summary.join("\n") + "\n");
    Ok(Report {
        outputs: out,
        lines: summary,
    })
}

fn cavity(cfg: &RunConfig, k: usize) -> Result<&StarShape, CliError> {
    cfg.domain
        .cavities
        .get(k)
        .ok_or_else(|| CliError::Config(format!("inverse.cavity: the domain has no cavity {k}")))
}
