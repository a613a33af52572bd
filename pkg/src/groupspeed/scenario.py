"""Scenario schema, seeded generation, and experiment execution.

A scenario file is JSON with a schema_version field. Fields may be given
either explicitly (per-agent lists) or as generator specs (base curve plus
perturbation radius, uniform ranges); `generate_scenario` materializes every
sampled quantity so that saving and reloading reproduces runs byte for byte.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import consensus, netsim, oracle, svgchart
from .errors import InvalidSpec, NonConvergence
from .riskmodel import fit_risk_curve

SCHEMA_VERSION = 1

# Two shipped curve profiles, digitized approximations of published
# risk-vs-travel-time shapes at two background PM2.5 levels. The low profile
# bottoms out near 1.25 h, the high profile near 0.45 h (heavier pollution
# favors shorter exposure). Approximations, not ground truth.
LOW_POLLUTION_POINTS = [
    [0.2, 0.8008], [0.5333, 0.6754], [0.8667, 0.5883], [1.2, 0.5507],
    [1.5333, 0.5736], [1.8667, 0.6682], [2.2, 0.8456], [2.5333, 1.1168],
    [2.8667, 1.4931], [3.2, 1.9854],
]
HIGH_POLLUTION_POINTS = [
    [0.1, 0.9619], [0.3111, 0.7842], [0.5222, 0.7595], [0.7333, 0.899],
    [0.9444, 1.2142], [1.1556, 1.7163], [1.3667, 2.4166], [1.5778, 3.3263],
    [1.7889, 4.4567], [2.0, 5.8193],
]

BUILTIN_SPECS = {
    "low_pollution": {
        "schema_version": SCHEMA_VERSION,
        "label": "low pollution (PM2.5 50 ug/m3)",
        "seed": 1,
        "n_agents": 15,
        "curves": {
            "base_control_points": LOW_POLLUTION_POINTS,
            "perturbation_radius": 0.1,
        },
        "distances": {"uniform": [15.0, 20.0]},
        "initial_speeds": {"uniform": [10.0, 15.0]},
        "topology": {"model": "complete"},
        "solver": {
            "mu": None,
            "consensus_tol": 0.005,
            "optimality_tol": 1e-6,
            "max_iterations": 500,
        },
    },
    "high_pollution": {
        "schema_version": SCHEMA_VERSION,
        "label": "high pollution (PM2.5 153 ug/m3)",
        "seed": 1,
        "n_agents": 15,
        "curves": {
            "base_control_points": HIGH_POLLUTION_POINTS,
            "perturbation_radius": 0.1,
        },
        "distances": {"uniform": [15.0, 20.0]},
        "initial_speeds": {"uniform": [10.0, 15.0]},
        "topology": {"model": "complete"},
        "solver": {
            "mu": None,
            "consensus_tol": 0.005,
            "optimality_tol": 1e-6,
            "max_iterations": 500,
        },
    },
}


@dataclass
class Scenario:
    """Fully materialized experiment description."""

    label: str
    seed: int
    n_agents: int
    control_points: list  # one control-point list per agent
    distances: list  # km
    initial_speeds: list  # km/h
    topology: dict
    solver: dict

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "seed": self.seed,
            "n_agents": self.n_agents,
            "curves": {"per_agent_control_points": self.control_points},
            "distances": {"values": self.distances},
            "initial_speeds": {"values": self.initial_speeds},
            "topology": self.topology,
            "solver": self.solver,
        }

    def save(self, path):
        with open(path, "w", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def build_risks(self):
        return [
            fit_risk_curve(pts).to_speed_risk(d)
            for pts, d in zip(self.control_points, self.distances)
        ]

    def build_topology(self):
        seed = self.topology.get("seed", self.seed)
        return netsim.make_topology(self.topology, self.n_agents, seed=seed)


def generate_scenario(spec):
    """Materialize a scenario spec: sample everything the spec leaves random.

    All draws come from one generator seeded by the spec's seed, in a fixed
    order, so equal (spec, seed) always yields the identical scenario.
    """
    if not isinstance(spec, dict):
        raise InvalidSpec("spec must be a mapping")
    if spec.get("schema_version") != SCHEMA_VERSION:
        raise InvalidSpec(
            f"unsupported schema_version {spec.get('schema_version')!r}"
        )
    try:
        n = int(spec["n_agents"])
        seed = int(spec["seed"])
        curves = spec["curves"]
        distances = spec["distances"]
        speeds = spec["initial_speeds"]
        topology = dict(spec["topology"])
        solver = dict(spec["solver"])
    except KeyError as exc:
        raise InvalidSpec(f"missing field {exc}") from exc
    if n < 1:
        raise InvalidSpec(f"n_agents must be >= 1, got {n}")

    rng = np.random.default_rng(seed)

    if "per_agent_control_points" in curves:
        cp = [list(map(list, pts)) for pts in curves["per_agent_control_points"]]
        if len(cp) != n:
            raise InvalidSpec(f"{len(cp)} curve sets for {n} agents")
    elif "base_control_points" in curves:
        base = [list(map(float, p)) for p in curves["base_control_points"]]
        radius = float(curves.get("perturbation_radius", 0.1))
        if not 0.0 <= radius < 1.0:
            raise InvalidSpec(f"perturbation_radius must be in [0, 1), got {radius}")
        # per-agent time-axis stretch moves tipping and breakeven together
        scales = rng.uniform(1.0 - radius, 1.0 + radius, n)
        cp = [
            [[round(t * float(c), 6), r] for t, r in base]
            for c in scales
        ]
    else:
        raise InvalidSpec("curves must give base_control_points or per_agent_control_points")

    cp = [sorted(pts) for pts in cp]
    dist = _materialize(rng, distances, n, "distances")
    init = _materialize(rng, speeds, n, "initial_speeds")

    return Scenario(
        label=str(spec.get("label", "")),
        seed=seed,
        n_agents=n,
        control_points=cp,
        distances=dist,
        initial_speeds=init,
        topology=topology,
        solver=solver,
    )


def _materialize(rng, field_spec, n, name):
    if "values" in field_spec:
        vals = [float(v) for v in field_spec["values"]]
        if len(vals) != n:
            raise InvalidSpec(f"{name}: {len(vals)} values for {n} agents")
        return vals
    if "uniform" in field_spec:
        lo, hi = field_spec["uniform"]
        if not lo < hi or lo <= 0:
            raise InvalidSpec(f"{name}: bad uniform range [{lo}, {hi}]")
        return [round(float(v), 6) for v in rng.uniform(lo, hi, n)]
    raise InvalidSpec(f"{name} must give 'values' or 'uniform'")


def load_scenario(path):
    with open(path) as fh:
        spec = json.load(fh)
    return generate_scenario(spec)


@dataclass
class ExperimentReport:
    scenario: Scenario
    trace: consensus.SimulationTrace
    certificate: oracle.OptimalityCertificate
    mu: float
    ergodicity: netsim.ErgodicityReport
    converged: bool

    @property
    def final_speed(self):
        return self.trace.final_common_speed

    @property
    def oracle_gap(self):
        return abs(self.final_speed - self.certificate.s_star)

    def summary_lines(self):
        c = self.certificate
        lines = [
            f"scenario: {self.scenario.label}",
            f"agents: {self.scenario.n_agents}  seed: {self.scenario.seed}",
            f"converged: {self.converged}  iterations: {self.trace.iterations}",
            f"final common speed: {self.final_speed:.4f} km/h",
            f"final spread: {self.trace.spreads[-1]:.3e} km/h",
            f"oracle optimum: {c.s_star:.4f} km/h (residual {c.residual:.3e},"
            f" bracket {c.bracket:.1e}, boundary: {c.at_boundary})",
            f"oracle gap: {self.oracle_gap:.3e} km/h",
            f"step gain mu: {self.mu:.6g}",
            f"ergodicity proxy (window {self.ergodicity.window}): "
            f"{'connected' if self.ergodicity.connected else 'NOT connected'}"
            f" [{self.ergodicity.note}]",
        ]
        return lines


def run_experiment(scenario, out_dir=None, dump_matrices=False, max_iters=None):
    """Run consensus plus the oracle, emit trace/plots, return a report."""
    g_list = scenario.build_risks()
    topology = scenario.build_topology()
    certificate = oracle.solve_common_speed(g_list, tol=1e-8)

    solver = dict(scenario.solver)
    if max_iters is not None:
        solver["max_iterations"] = int(max_iters)
    mu = solver.get("mu")
    if mu is None:
        mu = consensus.auto_mu(g_list, certificate.s_star)
    config = consensus.SolverConfig(
        mu=mu,
        consensus_tol=solver.get("consensus_tol", 0.01),
        optimality_tol=solver.get("optimality_tol", 1e-6),
        max_iterations=solver.get("max_iterations", 500),
    )

    converged = True
    try:
        trace = consensus.run(scenario.initial_speeds, topology, g_list, config)
    except NonConvergence as exc:
        trace = exc.trace
        converged = False

    window = min(10, max(1, trace.iterations))
    ergodicity = topology.check_ergodicity_window(0, window)

    report = ExperimentReport(
        scenario=scenario,
        trace=trace,
        certificate=certificate,
        mu=mu,
        ergodicity=ergodicity,
        converged=converged and trace.converged,
    )

    if out_dir is not None:
        _emit_artifacts(report, g_list, topology, out_dir, dump_matrices)
    return report


def _emit_artifacts(report, g_list, topology, out_dir, dump_matrices):
    import os

    os.makedirs(out_dir, exist_ok=True)
    trace = report.trace
    trace.to_csv(os.path.join(out_dir, "trace.csv"))

    ks = list(range(len(trace.speeds)))
    speed_series = [
        (f"agent {i + 1}" if i < 5 else "", ks, [s[i] for s in trace.speeds])
        for i in range(len(trace.speeds[0]))
    ]
    svgchart.write_chart(
        os.path.join(out_dir, "speeds.svg"),
        speed_series,
        title=f"Speed convergence: {report.scenario.label}",
        x_label="iteration k",
        y_label="recommended speed (km/h)",
    )

    time_series, speed_risk_series = [], []
    for i, g in enumerate(g_list):
        t_lo, t_hi = g.base.domain
        ts = np.linspace(t_lo, t_hi, 200)
        time_series.append(("", list(ts), list(g.base.value(ts))))
        s_lo, s_hi = g.speed_domain
        ss = np.linspace(s_lo, min(s_hi, 3.0 * g.minimizer), 200)
        speed_risk_series.append(("", list(ss), list(g.value(ss))))
    svgchart.write_chart(
        os.path.join(out_dir, "risk_vs_time.svg"),
        time_series,
        title="Risk vs travel time",
        x_label="travel time (h)",
        y_label="relative risk",
    )
    svgchart.write_chart(
        os.path.join(out_dir, "risk_vs_speed.svg"),
        speed_risk_series,
        title="Risk vs speed",
        x_label="speed (km/h)",
        y_label="relative risk",
    )

    if dump_matrices:
        mdir = os.path.join(out_dir, "matrices")
        os.makedirs(mdir, exist_ok=True)
        for k in range(min(trace.iterations, 50)):
            np.savetxt(
                os.path.join(mdir, f"P_{k:04d}.csv"),
                topology.build_matrix(k),
                delimiter=",",
            )
