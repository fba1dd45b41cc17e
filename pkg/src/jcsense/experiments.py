"""Named experiments: each produces one plot-ready table.

qfi_curve      closed-form sensitivity quantities on an eta grid
ramp_curve     the drive schedule eta(kt) and its derivative
fidelity_sweep integrated trajectory with dark-state fidelity tracking
scaling        near-critical log-log scaling fits along the ramp
cramer_rao     Monte-Carlo estimator variance against the quantum bound
moments_check  Fock-space moments against the closed forms

Every experiment returns (columns, rows, extras); emission and formatting
live in the CLI layer.
"""

from __future__ import annotations

import numpy as np

from . import analytic, dynamics, fockspace, metrology, ramp

QFI_GRID_POINTS = 200
RAMP_GRID_POINTS = 200
SCALING_KT_RANGE = (1e2, 1e4)
SCALING_KT_POINTS = 24
MOMENTS_ETAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


def qfi_curve(resolved: dict) -> tuple[list[str], list[list[float]], dict]:
    """Closed-form sensitivity table over eta in [0, eta_target]."""
    eta_target = resolved["physics"]["eta_target"]
    etas = np.linspace(0.0, eta_target, QFI_GRID_POINTS)
    columns = [
        "eta", "qfi", "mean_n", "var_n", "chi",
        "mean_x2", "var_x2", "mean_p2", "var_p2", "squeeze_r", "epsilon",
    ]
    rows = []
    for eta in etas:
        p = analytic.evaluate(float(eta))
        rows.append([
            p.eta, p.qfi, p.mean_n, p.var_n, p.chi,
            p.mean_x2, p.var_x2, p.mean_p2, p.var_p2, p.r, p.epsilon,
        ])
    return columns, rows, {}


def _schedule(resolved: dict) -> ramp.RampSchedule:
    phys = resolved["physics"]
    return ramp.RampSchedule(k=phys["k"], xi=phys["xi"], eta_target=phys["eta_target"])


def ramp_curve(resolved: dict) -> tuple[list[str], list[list[float]], dict]:
    """Schedule table: kt, t, eta, epsilon and the exact ramp velocity."""
    sched = _schedule(resolved)
    kts = np.linspace(0.0, sched.kt_end, RAMP_GRID_POINTS + 1)
    if sched.kt_end > 1.0:  # keep the exact kt = 1 point on the grid
        kts = np.unique(np.append(kts, 1.0))
    columns = ["kt", "t", "eta", "epsilon", "eta_dot"]
    rows = []
    for kt in kts:
        t = kt / sched.k
        rows.append([
            float(kt), t, ramp.eta_at(sched, t),
            ramp.epsilon_at(sched, t), ramp.eta_dot_at(sched, t),
        ])
    return columns, rows, {"kt_end": sched.kt_end}


def _resolve_n_max(resolved: dict, eta: float) -> int:
    n_max = resolved["numerics"]["n_max"]
    if n_max == "auto":
        return fockspace.adaptive_n_max(eta)
    return int(n_max)


def fidelity_sweep(resolved: dict) -> tuple[list[str], list[list[float]], dict]:
    """Integrated trajectory with instantaneous dark-state fidelity."""
    sched = _schedule(resolved)
    num = resolved["numerics"]
    n_max = _resolve_n_max(resolved, sched.eta_target)
    cfg = dynamics.EvolutionConfig(
        omega=resolved["physics"]["Omega"],
        schedule=sched,
        spec=fockspace.HilbertSpec(n_max=n_max, with_qubit=True),
        rtol=num["rtol"],
        atol=num["atol"],
    )
    records = dynamics.evolve(cfg)
    columns = [
        "kt", "t", "eta", "fidelity",
        "mean_n", "var_n", "mean_x2", "mean_p2", "norm_defect",
    ]
    rows = [
        [sched.k * r.t, r.t, r.eta, r.fidelity,
         r.mean_n, r.var_n, r.mean_x2, r.mean_p2, r.norm_defect]
        for r in records
    ]
    extras = {
        "n_max": n_max,
        "min_fidelity": min(r.fidelity for r in records),
        "final_fidelity": records[-1].fidelity,
    }
    return columns, rows, extras


def scaling(resolved: dict) -> tuple[list[str], list[list[float]], dict]:
    """Scaling table plus fitted exponents (in the extras block)."""
    sched = _schedule(resolved)
    kts = np.logspace(
        np.log10(SCALING_KT_RANGE[0]), np.log10(SCALING_KT_RANGE[1]), SCALING_KT_POINTS
    )
    fits = metrology.scaling_experiment(sched, kts)
    ratio = metrology.heisenberg_ratio(sched, kts)
    columns = ["kt", "eta", "epsilon", "inverted_variance", "mean_n", "fisher_per_n_kt2"]
    rows = []
    for i, kt in enumerate(kts):
        eps = 1.0 / (kt**sched.xi + 1.0)
        p = analytic.evaluate(float(np.sqrt(1.0 - eps)))
        rows.append([float(kt), p.eta, p.epsilon, p.qfi, p.mean_n, float(ratio[i])])
    extras = {
        "fits": [
            {
                "quantity": f.quantity,
                "fitted_exponent": f.fitted_exponent,
                "expected_exponent": f.expected_exponent,
                "r_squared": f.r_squared,
            }
            for f in fits
        ]
    }
    return columns, rows, extras


def cramer_rao(resolved: dict) -> tuple[list[str], list[list[float]], dict]:
    """Monte-Carlo estimator study over three decades of shot counts.

    With ``output.dump_outcomes`` the raw per-replica outcome arrays are
    collected in the extras under ``raw_outcomes`` (one matrix per shot
    count); the emitter writes them to a sidecar file.
    """
    num = resolved["numerics"]
    eta = resolved["physics"]["eta_target"]
    shots = int(num["shots"])
    if shots < 100:
        raise ValueError(f"cramer_rao needs shots >= 100, got {shots}")
    dump = resolved["output"]["dump_outcomes"]
    qfi = analytic.evaluate(eta).qfi
    columns = ["nu", "replicas", "mean_eta_hat", "var_eta_hat", "qfi", "ratio"]
    rows = []
    raw = {}
    for nu in (shots // 100, shots // 10, shots):
        scheme = metrology.MeasurementScheme(kind="photon_number", shots=nu)
        sink = [] if dump else None
        ratio, mean_hat = metrology.cramer_rao_ratio(
            eta, scheme, replicas=int(num["replicas"]), seed=int(num["seed"]),
            outcome_sink=sink,
        )
        if dump:
            raw[str(nu)] = [outcome.tolist() for outcome in sink]
        rows.append([float(nu), float(num["replicas"]), mean_hat,
                     ratio / (nu * qfi), qfi, ratio])
    extras = {"eta": eta}
    if dump:
        extras["raw_outcomes"] = raw
    return columns, rows, extras


def moments_check(resolved: dict) -> tuple[list[str], list[list[float]], dict]:
    """Fock-space squeezed-vacuum moments against the closed forms."""
    columns = [
        "eta", "n_max",
        "mean_n_num", "mean_n_exact", "var_n_num", "var_n_exact",
        "mean_x2_num", "mean_x2_exact", "var_x2_num", "var_x2_exact",
        "mean_p2_num", "mean_p2_exact", "var_p2_num", "var_p2_exact",
        "max_rel_err",
    ]
    rows = []
    for eta in MOMENTS_ETAS:
        n_max = _resolve_n_max(resolved, eta)
        spec = fockspace.HilbertSpec(n_max=n_max, with_qubit=False)
        state = fockspace.squeezed_vacuum(spec, 0.25 * np.log(1.0 - eta * eta))
        p = analytic.evaluate(eta)
        num_op = fockspace.number_op(spec).matrix
        mx = fockspace.quadrature_x(spec).matrix
        mp = fockspace.quadrature_p(spec).matrix
        pairs = []
        for op, mean_exact, var_exact in (
            (num_op, p.mean_n, p.var_n),
            (mx @ mx, p.mean_x2, p.var_x2),
            (mp @ mp, p.mean_p2, p.var_p2),
        ):
            mean_num, var_num = metrology.mean_and_variance(state, op)
            pairs.append((mean_num, mean_exact, var_num, var_exact))
        rel_errs = [
            abs(num - exact) / abs(exact) if exact != 0 else abs(num - exact)
            for mn, me, vn, ve in pairs
            for num, exact in ((mn, me), (vn, ve))
        ]
        row = [float(eta), float(n_max)]
        for mn, me, vn, ve in pairs:
            row.extend([mn, me, vn, ve])
        row.append(max(rel_errs))
        rows.append(row)
    return columns, rows, {}


RUNNERS = {
    "qfi_curve": qfi_curve,
    "ramp_curve": ramp_curve,
    "fidelity_sweep": fidelity_sweep,
    "scaling": scaling,
    "cramer_rao": cramer_rao,
    "moments_check": moments_check,
}
