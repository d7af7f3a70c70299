//! Subcommand bodies. Each returns a [`Document`]; nothing here prints.

use std::f64::consts::PI;

use qpe_core::jc::jc_subshift_weighted;
use qpe_core::selftest::{run_suite, Suite};
use qpe_core::{
    basis_from_angle, clock_energy_balance, clock_offdiagonal_decay, clock_shift_analytic, clock_shift_numeric,
    common_form_equivalence_residual, conditioned_wavepacket, deg_full_shift, deg_subshift_analytic,
    deg_subshift_numeric, dice_scenario, energy_expectation, fock_drive_purity, jc_conservation_residual,
    jc_convergence_sweep, jc_full_shift, jc_qubit_subshift, jc_rotation_fidelity, jc_subshift_analytic,
    jc_subshift_numeric, jc_subshift_probability, outcome_probabilities, stevens_theory_curves, sweep_curves,
    AmplitudeMode, Basis, ClockConfig, Hamiltonian, Level, Method, Outcome, State, SubShiftKind, Table, Window,
};

use crate::args::{AmpModeArg, ClockCmd, DegCmd, Group, JcCmd, Opts, OutcomeArg, ScenarioCmd};
use crate::output::{Body, Cell, Document, Meta};

const DEFAULT_RATIO: f64 = 0.01;
const DEFAULT_STEPS: usize = 201;
const CONVERGE_N0: [f64; 4] = [1e4, 1e5, 1e6, 1e7];
const FIDELITY_N0: [f64; 3] = [1e2, 1e3, 1e4];

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(qpe_core::Error),
    Io(std::io::Error),
    /// Selftest ran and found violations; the report is still emitted.
    Violations(Document),
}

impl From<qpe_core::Error> for Failure {
    fn from(e: qpe_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) if e.is_zero_probability() => 3,
            Failure::Core(e) if e.is_resolution() => 4,
            Failure::Core(_) => 2,
            Failure::Io(_) | Failure::Violations(_) => 1,
        }
    }
}

type Out = Result<Document, Failure>;

/// Resolved inputs shared by the commands.
struct Ctx<'a> {
    opts: &'a Opts,
    command: String,
    params: Vec<(String, Cell)>,
}

impl<'a> Ctx<'a> {
    fn param(&mut self, key: &str, value: impl Into<Cell>) {
        self.params.push((key.to_owned(), value.into()));
    }

    fn state(&mut self) -> Result<State, Failure> {
        let t = self.opts.i_theta.unwrap_or(PI / 2.0);
        let p = self.opts.i_phi.unwrap_or(0.0);
        self.param("i_theta", t);
        self.param("i_phi", p);
        Ok(State::from_bloch(t, p)?)
    }

    fn theta(&mut self) -> Result<f64, Failure> {
        let t = self.opts.theta.ok_or_else(|| Failure::Usage(format!("{} needs --theta", self.command)))?;
        if !t.is_finite() {
            return Err(Failure::Usage("--theta must be finite".into()));
        }
        self.param("theta", t);
        Ok(t)
    }

    fn basis(&mut self) -> Result<(f64, Basis), Failure> {
        let t = self.theta()?;
        Ok((t, basis_from_angle(t)?))
    }

    fn outcome(&mut self) -> Outcome {
        let o = match self.opts.outcome {
            Some(OutcomeArg::Perp) => Outcome::Perp,
            _ => Outcome::F,
        };
        self.param("outcome", o.label());
        o
    }

    fn omega0(&mut self) -> Result<f64, Failure> {
        let w = self.opts.omega0.unwrap_or(1.0);
        if !(w.is_finite() && w > 0.0) {
            return Err(Failure::Usage(format!("--omega0 must be positive (got {w})")));
        }
        self.param("omega0", w);
        Ok(w)
    }

    fn amp_mode(&self) -> AmplitudeMode {
        match self.opts.amp_mode {
            Some(AmpModeArg::Gaussian) => AmplitudeMode::GaussianContinuum,
            _ => AmplitudeMode::PoissonExact,
        }
    }

    /// `m`, window and amplitude mode; recorded once.
    fn oscillator(&mut self) -> (i64, f64, AmplitudeMode) {
        let m = self.opts.m.unwrap_or(1);
        let w = self.opts.window.unwrap_or(10.0);
        let mode = self.amp_mode();
        self.param("m", m);
        self.param("window", w);
        self.param("amp_mode", mode.label());
        (m, w, mode)
    }

    /// Window at `--n0` when given.
    fn window(&mut self) -> Result<Option<Window>, Failure> {
        let Some(n0) = self.opts.n0 else {
            return Ok(None);
        };
        self.param("n0", n0);
        let (m, w, mode) = self.oscillator();
        Ok(Some(Window::new(n0, m, w, mode)?))
    }

    fn n0_list(&mut self, default: &[f64]) -> Vec<f64> {
        let list = match (&self.opts.n0_list, self.opts.n0) {
            (Some(l), _) => l.clone(),
            (None, Some(n)) => vec![n],
            (None, None) => default.to_vec(),
        };
        let text: Vec<String> = list.iter().map(|n| n.to_string()).collect();
        self.param("n0_list", text.join(","));
        list
    }

    fn clock_config(&mut self, omega0: f64) -> Result<(ClockConfig, bool), Failure> {
        let (cfg, explicit) = match self.opts.sigma_q {
            Some(s) => (ClockConfig::new(1.0, s), true),
            None => (ClockConfig::from_ratio(DEFAULT_RATIO, omega0), false),
        };
        let cfg = match self.opts.grid_points {
            Some(n) => cfg.with_grid_points(n),
            None => cfg,
        };
        Ok((cfg, explicit))
    }

    fn range(&mut self, start: f64, end: f64) -> (f64, f64, usize) {
        let s = self.opts.theta_start.unwrap_or(start);
        let e = self.opts.theta_end.unwrap_or(end);
        let n = self.opts.steps.unwrap_or(DEFAULT_STEPS);
        self.param("theta_start", s);
        self.param("theta_end", e);
        self.param("steps", n as u64);
        (s, e, n)
    }

    fn finish(self, model: &str, units: &str, body: Body) -> Document {
        Document {
            meta: Meta { command: self.command, model: model.into(), units: units.into(), parameters: self.params },
            body,
        }
    }
}

fn record(fields: Vec<(&str, Cell)>) -> Body {
    Body::Record(fields.into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

fn table_body(t: &Table) -> Body {
    let columns = t.columns.iter().map(|c| c.name.clone()).collect();
    let rows = (0..t.rows()).map(|r| t.columns.iter().map(|c| Cell::from(c.values[r])).collect()).collect();
    Body::Rows { columns, rows }
}

/// Turns a zero-probability failure into an absent cell.
fn optional(r: qpe_core::Result<f64>) -> Result<Option<f64>, Failure> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_zero_probability() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn command_name(group: Group) -> String {
    let (g, c) = match group {
        Group::Clock(c) => ("clock", format!("{c:?}")),
        Group::Jc(c) => ("jc", format!("{c:?}")),
        Group::Deg(c) => ("deg", format!("{c:?}")),
        Group::Scenario(c) => ("scenario", format!("{c:?}")),
    };
    format!("{g} {}", c.to_lowercase())
}

pub fn run(group: Group, opts: &Opts) -> Out {
    let mut ctx = Ctx { opts, command: command_name(group), params: Vec::new() };
    if opts.selftest {
        return selftest(ctx, group);
    }
    match group {
        Group::Clock(c) => match c {
            ClockCmd::Shift => clock_shift(ctx),
            ClockCmd::Numeric => clock_numeric(ctx),
            ClockCmd::Balance => clock_balance(ctx),
            ClockCmd::Decoherence => clock_decoherence(ctx),
        },
        Group::Jc(c) => match c {
            JcCmd::Subshifts => jc_subshifts(ctx),
            JcCmd::Shift => full_shift(ctx, "jc"),
            JcCmd::Converge => jc_converge(ctx),
            JcCmd::Fidelity => jc_fidelity(ctx),
            JcCmd::Conserve => jc_conserve(ctx),
        },
        Group::Deg(c) => match c {
            DegCmd::Subshifts => deg_subshifts(ctx),
            DegCmd::Shift => full_shift(ctx, "degenerate"),
            DegCmd::Equiv => deg_equiv(ctx),
        },
        Group::Scenario(c) => match c {
            ScenarioCmd::Dice => {
                ctx.param("omega0", 1.0);
                scenario_dice(ctx)
            }
            ScenarioCmd::Sweep => scenario_sweep(&mut ctx).map(|t| {
                let body = table_body(&t);
                ctx.finish("all", "omega0", body)
            }),
            ScenarioCmd::Stevens => {
                let (s, e, n) = ctx.range(-2.0 * PI, 2.0 * PI);
                if let Some(c) = opts.envelope {
                    ctx.param("envelope", c);
                }
                let t = stevens_theory_curves(s, e, n, opts.envelope)?;
                let body = table_body(&t);
                Ok(ctx.finish("jc", "quanta", body))
            }
        },
    }
    .map(|mut d| {
        d.meta.parameters.sort_by(|a, b| a.0.cmp(&b.0));
        d
    })
}

fn clock_shift(mut ctx: Ctx) -> Out {
    let i = ctx.state()?;
    let (theta, b) = ctx.basis()?;
    let o = ctx.outcome();
    let absolute = ctx.opts.omega0.is_some();
    let omega0 = ctx.omega0()?;
    let unit = Hamiltonian::unit();
    let r = clock_shift_analytic(&i, &b, o, &unit)?;
    let qubit = energy_expectation(b.state(o), &unit) - energy_expectation(&i, &unit);
    let body = record(vec![
        ("theta", theta.into()),
        ("outcome", o.label().into()),
        ("probability", r.probability.into()),
        ("shift", r.shift.into()),
        ("shift_absolute", absolute.then(|| r.shift * omega0).into()),
        ("qubit_shift", qubit.into()),
        ("weak_value_re", r.residuals["weak_value_re"].into()),
        ("weak_value_im", r.residuals["weak_value_im"].into()),
    ]);
    Ok(ctx.finish("clock", "omega0", body))
}

fn clock_numeric(mut ctx: Ctx) -> Out {
    let i = ctx.state()?;
    let (theta, b) = ctx.basis()?;
    let o = ctx.outcome();
    let omega0 = ctx.omega0()?;
    let h = Hamiltonian::new(omega0)?;
    let analytic = clock_shift_analytic(&i, &b, o, &h)?;
    let (cfg, explicit) = ctx.clock_config(omega0)?;
    let cfg = if explicit { cfg } else { cfg.tightened_for(analytic.shift, omega0) };
    ctx.param("sigma_q", cfg.sigma_q);
    ctx.param("grid_points", cfg.grid_points as u64);
    let w = conditioned_wavepacket(&i, &b, o, &cfg, &h)?;
    let numeric = clock_shift_numeric(&w, &cfg, &h)?;
    let rel = ((numeric.shift - analytic.shift) / analytic.shift).abs();
    let body = record(vec![
        ("theta", theta.into()),
        ("outcome", o.label().into()),
        ("sigma_q_omega0_over_v", (cfg.sigma_q * omega0 / cfg.v).into()),
        ("shift_numeric", (numeric.shift / omega0).into()),
        ("shift_analytic", (analytic.shift / omega0).into()),
        ("relative_error", Cell::from(analytic.shift.ne(&0.0).then_some(rel))),
        ("norm_sq", w.norm_sq.into()),
        ("probability", analytic.probability.into()),
        ("norm_error", (w.norm_sq - analytic.probability).abs().into()),
    ]);
    Ok(ctx.finish("clock", "omega0", body))
}

fn clock_balance(mut ctx: Ctx) -> Out {
    let i = ctx.state()?;
    let (theta, b) = ctx.basis()?;
    let h = Hamiltonian::unit();
    let (p_f, p_perp) = outcome_probabilities(&i, &b);
    let e_i = energy_expectation(&i, &h);
    let mut fields = vec![("theta", Cell::from(theta)), ("p_f", p_f.into()), ("p_perp", p_perp.into())];
    for (o, shift_key, qubit_key) in
        [(Outcome::F, "shift_f", "qubit_shift_f"), (Outcome::Perp, "shift_perp", "qubit_shift_perp")]
    {
        fields.push((shift_key, optional(clock_shift_analytic(&i, &b, o, &h).map(|r| r.shift))?.into()));
        fields.push((qubit_key, (energy_expectation(b.state(o), &h) - e_i).into()));
    }
    fields.push(("residual", optional(clock_energy_balance(&i, &b, &h))?.into()));
    Ok(ctx.finish("clock", "omega0", record(fields)))
}

fn clock_decoherence(mut ctx: Ctx) -> Out {
    let (theta, b) = ctx.basis()?;
    let omega0 = ctx.omega0()?;
    let (cfg, _) = ctx.clock_config(omega0)?;
    ctx.param("sigma_q", cfg.sigma_q);
    let d = clock_offdiagonal_decay(&b, &cfg, &Hamiltonian::new(omega0)?)?;
    let body = record(vec![
        ("theta", theta.into()),
        ("sigma_q_omega0_over_v", (cfg.sigma_q * omega0 / cfg.v).into()),
        ("closed_form", d.closed_form.into()),
        ("quadrature", d.quadrature.into()),
        ("discrepancy", d.discrepancy().into()),
        ("agrees", d.agrees().into()),
    ]);
    Ok(ctx.finish("clock", "omega0", body))
}

fn jc_subshifts(mut ctx: Ctx) -> Out {
    let theta = ctx.theta()?;
    let w = ctx.window()?;
    let mut columns = vec!["kind", "theta", "shift", "probability", "zero_probability", "weighted", "qubit_shift"];
    if w.is_some() {
        columns.extend(["shift_numeric", "abs_error"]);
    }
    let mut rows = Vec::new();
    for kind in SubShiftKind::ALL {
        let shift = optional(jc_subshift_analytic(kind, theta))?;
        let p = jc_subshift_probability(kind, theta);
        let mut row = vec![
            Cell::from(kind.label()),
            theta.into(),
            shift.into(),
            p.into(),
            (p < qpe_core::fock::PROBABILITY_FLOOR).into(),
            jc_subshift_weighted(kind, theta).into(),
            jc_qubit_subshift::<f64>(kind).into(),
        ];
        if let Some(w) = &w {
            let numeric = optional(jc_subshift_numeric(kind, theta, w))?;
            let err = shift.zip(numeric).map(|(a, n)| (a - n).abs());
            row.extend([numeric.into(), err.into()]);
        }
        rows.push(row);
    }
    let body = Body::Rows { columns: columns.into_iter().map(String::from).collect(), rows };
    Ok(ctx.finish("jc", "quanta", body))
}

/// `jc shift` and `deg shift`.
fn full_shift(mut ctx: Ctx, model: &str) -> Out {
    let i = ctx.state()?;
    let theta = ctx.theta()?;
    let o = ctx.outcome();
    let w = ctx.window()?;
    let shift = |method, w: Option<&Window>| match model {
        "jc" => jc_full_shift(&i, theta, o, method, w),
        _ => deg_full_shift(&i, theta, o, method, w),
    };
    let a = shift(Method::Analytic, None)?;
    let mut fields = vec![
        ("theta", Cell::from(theta)),
        ("outcome", o.label().into()),
        ("probability", a.probability.into()),
        ("shift", a.shift.into()),
        ("first_segment", a.residuals["first_segment"].into()),
        ("second_drive", a.residuals["second_drive"].into()),
    ];
    if let Some(w) = &w {
        let n = shift(Method::Numeric, Some(w))?;
        fields.push(("shift_numeric", n.shift.into()));
        fields.push(("abs_error", (n.shift - a.shift).abs().into()));
    }
    Ok(ctx.finish(model, "quanta", record(fields)))
}

fn jc_converge(mut ctx: Ctx) -> Out {
    let i = ctx.state()?;
    let theta = ctx.theta()?;
    let o = ctx.outcome();
    let list = ctx.n0_list(&CONVERGE_N0);
    let (m, w, mode) = ctx.oscillator();
    let rows = jc_convergence_sweep(&i, theta, o, &list, m, w, mode)?
        .into_iter()
        .map(|r| vec![r.n0.into(), r.numeric.into(), r.analytic.into(), r.abs_error.into()])
        .collect();
    let columns = ["n0", "numeric", "analytic", "abs_error"].map(String::from).to_vec();
    Ok(ctx.finish("jc", "quanta", Body::Rows { columns, rows }))
}

fn jc_fidelity(mut ctx: Ctx) -> Out {
    let i = ctx.state()?;
    let theta = ctx.theta()?;
    let list = ctx.n0_list(&FIDELITY_N0);
    let (m, w, mode) = ctx.oscillator();
    let mut rows = Vec::new();
    for n0 in list {
        let win = Window::new(n0, m, w, mode)?;
        rows.push(vec![Cell::from("coherent"), n0.into(), jc_rotation_fidelity(&i, theta, &win)?.into(), Cell::Absent]);
    }
    if let Some(n) = ctx.opts.fock_n {
        ctx.param("fock_n", n);
        let omega_t = theta / (n as f64 + m as f64).sqrt();
        rows.push(vec![Cell::from("fock"), (n as f64).into(), Cell::Absent, fock_drive_purity(&i, n, omega_t).into()]);
    }
    let columns = ["input", "n", "fidelity", "purity"].map(String::from).to_vec();
    Ok(ctx.finish("jc", "dimensionless", Body::Rows { columns, rows }))
}

fn jc_conserve(mut ctx: Ctx) -> Out {
    let theta = ctx.theta()?;
    let (up, down) = jc_conservation_residual(theta);
    // the degenerate sub-shifts in place of the oscillator ones balance with no rounding
    let degenerate = |prep: Level| {
        [Level::Up, Level::Down]
            .map(|found| {
                let k = SubShiftKind::new(prep, found);
                jc_subshift_probability(k, theta) * (deg_subshift_analytic::<f64>(k) + jc_qubit_subshift::<f64>(k))
            })
            .iter()
            .sum::<f64>()
    };
    let body = record(vec![
        ("theta", theta.into()),
        ("residual_prep_up", up.into()),
        ("residual_prep_down", down.into()),
        ("degenerate_residual_prep_up", degenerate(Level::Up).into()),
        ("degenerate_residual_prep_down", degenerate(Level::Down).into()),
    ]);
    Ok(ctx.finish("jc", "quanta", body))
}

fn deg_subshifts(mut ctx: Ctx) -> Out {
    let w = ctx.window()?;
    let theta = match w {
        Some(_) => Some(ctx.theta()?),
        None => None,
    };
    let mut columns = vec!["kind", "shift"];
    if w.is_some() {
        columns.extend(["shift_numeric", "abs_error"]);
    }
    let mut rows = Vec::new();
    for kind in SubShiftKind::ALL {
        let a: f64 = deg_subshift_analytic(kind);
        let mut row = vec![Cell::from(kind.label()), a.into()];
        if let (Some(w), Some(t)) = (&w, theta) {
            let n = optional(deg_subshift_numeric(kind, t, w))?;
            row.extend([n.into(), n.map(|n| (n - a).abs()).into()]);
        }
        rows.push(row);
    }
    let body = Body::Rows { columns: columns.into_iter().map(String::from).collect(), rows };
    Ok(ctx.finish("degenerate", "quanta", body))
}

fn deg_equiv(mut ctx: Ctx) -> Out {
    let i = ctx.state()?;
    let (theta, b) = ctx.basis()?;
    let o = ctx.outcome();
    let clock = clock_shift_analytic(&i, &b, o, &Hamiltonian::unit())?.shift;
    let deg = deg_full_shift(&i, theta, o, Method::Analytic, None)?.shift;
    let body = record(vec![
        ("theta", theta.into()),
        ("outcome", o.label().into()),
        ("clock_shift", clock.into()),
        ("deg_shift", deg.into()),
        ("residual", common_form_equivalence_residual(&i, theta, o)?.into()),
    ]);
    Ok(ctx.finish("degenerate", "omega0", body))
}

fn scenario_dice(ctx: Ctx) -> Out {
    let d = dice_scenario::<f64>()?;
    let body = record(vec![
        ("theta", d.theta.into()),
        ("p_f", d.p_f.into()),
        ("p_perp", d.p_perp.into()),
        ("shift_E0_f", d.qubit_shift_f.into()),
        ("shift_E0_perp", d.qubit_shift_perp.into()),
        ("shift_M_f", d.apparatus_shift_f.into()),
        ("shift_M_perp", d.apparatus_shift_perp.into()),
        ("ensemble_shift_per_six", d.ensemble_shift_per_six.into()),
        ("balance_residual", d.balance_residual.into()),
        ("both_lose_perp", d.both_lose_perp.into()),
    ]);
    Ok(ctx.finish("clock", "omega0", body))
}

fn scenario_sweep(ctx: &mut Ctx) -> Result<Table, Failure> {
    let i = ctx.state()?;
    let (s, e, n) = ctx.range(0.0, 4.0 * PI);
    let w = ctx.window()?;
    Ok(sweep_curves(&i, s, e, n, w.as_ref())?)
}

fn selftest(ctx: Ctx, group: Group) -> Out {
    let suites: &[Suite] = match group {
        Group::Clock(_) => &[Suite::Qubit, Suite::Clock],
        Group::Jc(_) => &[Suite::Jc],
        Group::Deg(_) => &[Suite::Degenerate],
        Group::Scenario(_) => &[Suite::Scenarios],
    };
    let mut rows = Vec::new();
    let mut failed = false;
    for &s in suites {
        for c in run_suite(s) {
            failed |= !c.passed;
            rows.push(vec![Cell::from(c.suite.label()), c.name.into(), c.passed.into(), c.detail.into()]);
        }
    }
    let columns = ["suite", "check", "passed", "detail"].map(String::from).to_vec();
    let doc = ctx.finish("selftest", "none", Body::Rows { columns, rows });
    if failed {
        Err(Failure::Violations(doc))
    } else {
        Ok(doc)
    }
}
