"""Run configuration (JSON) and the state CSV format."""

import csv
import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import MalformedConfig, MeshMismatch
from .kernel import make_kernel
from .schemas import CONFIG_SCHEMA
from .seqspace import LpParams, TruncatedState
from .solver import SolverConfig
from .systems import load_system


@dataclass
class RunConfig:
    raw: dict
    T: float
    params: LpParams
    solver: SolverConfig
    hypothesis_J: int = 50
    t_samples: int = 201
    thresholds: dict = field(default_factory=dict)

    @property
    def label(self):
        sys = self.raw["system"]
        return sys if isinstance(sys, str) else str(sys.get("label", "custom"))

    def kernel(self):
        return make_kernel(self.T)

    def system(self):
        return load_system(self.raw)


def parse_config(raw):
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise MalformedConfig(f"config: {exc.message}") from None
    try:
        solver = SolverConfig(
            J=int(raw.get("J", 15)),
            M=int(raw.get("M", 201)),
            quadrature=raw.get("quadrature", "simpson"),
            gauss_order=int(raw.get("gauss_order", 4)),
            tol=float(raw.get("tol", 1e-10)),
            max_iter=int(raw.get("max_iter", 200)),
            relaxation=float(raw.get("relaxation", 1.0)),
        )
    except ValueError as exc:
        raise MalformedConfig(f"config: {exc}") from None
    hyp = raw.get("hypothesis", {})
    return RunConfig(
        raw=raw,
        T=float(raw["T"]),
        params=LpParams(float(raw.get("p", 2.0))),
        solver=solver,
        hypothesis_J=int(hyp.get("J", max(50, solver.J))),
        t_samples=int(hyp.get("t_samples", 201)),
        thresholds=dict(raw.get("verify", {})),
    )


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedConfig(f"cannot read config {path}: {exc}") from None
    return parse_config(raw)


def write_state_csv(state, path):
    """One row per mesh point: ``t, v1, ..., vJ`` at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"v{j}" for j in range(1, state.J + 1)])
        for m in range(state.M):
            row = [state.mesh[m]] + list(state.values[:, m])
            writer.writerow(["%.17g" % x for x in row])


def read_state_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise MalformedConfig(f"cannot read state {path}: {exc}") from None
    if not rows:
        raise MalformedConfig(f"{path}: empty state file")
    header, body = rows[0], rows[1:]
    J = len(header) - 1
    if J < 1 or header[0] != "t" or header[1:] != [f"v{j}" for j in range(1, J + 1)]:
        raise MalformedConfig(f"{path}: header must be t, v1..vJ")
    try:
        data = np.array([[float(x) for x in row] for row in body])
    except ValueError as exc:
        raise MalformedConfig(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != J + 1:
        raise MalformedConfig(f"{path}: ragged rows")
    try:
        return TruncatedState(data[:, 0], data[:, 1:].T.copy())
    except ValueError as exc:
        raise MalformedConfig(f"{path}: {exc}") from None


def check_state_matches(state, cfg):
    mesh = cfg.solver.mesh(cfg.T)
    if state.J != cfg.solver.J or state.M != cfg.solver.M or not np.array_equal(state.mesh, mesh):
        raise MeshMismatch(
            f"state (J={state.J}, M={state.M}) does not match config (J={cfg.solver.J}, M={cfg.solver.M}, T={cfg.T})"
        )
