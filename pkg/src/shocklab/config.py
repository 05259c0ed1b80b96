"""Plain-text scenario configuration: ``key = value`` lines with dotted
sections, ``#`` comments, and comma-separated lists.  Chosen for
diff-friendliness and zero-dependency parsing."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .flux import FluxModel, build_gap_flux, burgers_flux, make_states, quadratic_flux
from .periodic import PerturbationSpec

__all__ = ["ScenarioConfig", "ValidationError", "parse_config", "load_config"]

EXPERIMENT_KINDS = (
    "periodic-decay",
    "shock-shift",
    "burgers-coincidence",
    "counterexample",
    "viscosity-sweep",
    "rarefaction",
    "hopf-check",
)


class ValidationError(ValueError):
    pass


def _coerce(raw: str):
    raw = raw.strip()
    if "," in raw:
        return [_coerce(tok) for tok in raw.split(",") if tok.strip()]
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config(text: str) -> dict:
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        out[key.strip()] = _coerce(raw)
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


@dataclass
class ScenarioConfig:
    """Validated scenario: flux model, states, viscosities, perturbations,
    grid, and horizon.  Validation is fail-fast: every violated
    precondition is reported before any run starts."""

    kind: str
    model: FluxModel
    u_l: float
    u_r: float
    nus: list[float]
    dx: float
    L: float
    T: float
    record_dt: float
    w0l: PerturbationSpec
    w0r: PerturbationSpec
    label: str = "scenario"
    extra: dict = field(default_factory=dict)

    @property
    def nu(self) -> float:
        return self.nus[0]

    def states(self):
        return make_states(self.model, self.u_l, self.u_r)


def _get(raw: dict, key: str, default=None, required=False):
    if key in raw:
        return raw[key]
    if required:
        raise ValidationError(f"missing required key {key!r}")
    return default


def _spec_from(raw: dict, side: str, default_kind="sine") -> PerturbationSpec:
    prefix = f"perturb.{side}."
    shared = "perturb."

    def pick(name, default):
        return raw.get(prefix + name, raw.get(shared + name, default))

    return PerturbationSpec(
        kind=pick("kind", default_kind),
        amplitude=float(pick("amplitude", 0.0)),
        period=float(pick("period", 1.0)),
        phase=float(pick("phase", 0.0)),
        beta0=pick("beta0", None),
    )


def build_scenario(raw: dict) -> ScenarioConfig:
    """Validate a parsed config dict into a ScenarioConfig; every violated
    precondition is collected and reported together."""
    errors = []
    kind = _get(raw, "experiment.kind", required=True)
    if kind not in EXPERIMENT_KINDS:
        errors.append(f"experiment.kind must be one of {EXPERIMENT_KINDS}, got {kind!r}")

    fkind = _get(raw, "flux.kind", "burgers")
    model = None
    try:
        if fkind == "burgers":
            model = burgers_flux()
        elif fkind == "quadratic":
            model = quadratic_flux(float(_get(raw, "flux.a", 1.0)))
        elif fkind == "gap":
            knots = _get(raw, "flux.knots", [-0.9, 0.9])
            model = build_gap_flux(float(_get(raw, "flux.n", 50)), *map(float, knots))
        else:
            errors.append(f"unsupported flux.kind {fkind!r}")
    except Exception as exc:  # construction errors are validation errors here
        errors.append(f"flux construction failed: {exc}")

    u_l = float(_get(raw, "states.left", 1.0))
    u_r = float(_get(raw, "states.right", -1.0))
    nus = _get(raw, "run.nu", 0.5)
    if not isinstance(nus, list):
        nus = [nus]
    nus = [float(v) for v in nus]
    if any(v <= 0 for v in nus):
        errors.append(f"viscosities must be positive, got {nus}")
    dx = float(_get(raw, "grid.dx", 1.0 / 256))
    L = float(_get(raw, "grid.L", 10.0))
    T = float(_get(raw, "run.T", 2.0))
    record_dt = float(_get(raw, "run.record_dt", 0.01))
    if dx <= 0 or L <= 0 or T <= 0:
        errors.append("grid.dx, grid.L and run.T must be positive")

    w0l = w0r = None
    try:
        w0l = _spec_from(raw, "left")
        w0r = _spec_from(raw, "right")
    except Exception as exc:
        errors.append(f"perturbation spec invalid: {exc}")

    if w0l is not None and dx > 0:
        for nm, spec in (("left", w0l), ("right", w0r)):
            k = spec.period / dx
            if abs(k - round(k)) > 1e-9:
                errors.append(f"grid.dx must divide the {nm} period {spec.period}")
    if L > 0 and dx > 0:
        k = 2 * L / dx
        if abs(k - round(k)) > 1e-9:
            errors.append("grid.dx must divide the domain width 2L")

    shockish = kind in ("shock-shift", "burgers-coincidence", "counterexample",
                        "viscosity-sweep", "hopf-check")
    if shockish and u_l <= u_r:
        errors.append(
            f"Lax condition violated for {kind}: need states.left > states.right, "
            f"got ({u_l}, {u_r})"
        )
    if kind == "rarefaction" and u_l >= u_r:
        errors.append(
            f"rarefaction needs states.left < states.right, got ({u_l}, {u_r})"
        )
    if kind == "viscosity-sweep" and len(nus) < 4:
        errors.append("viscosity-sweep needs run.nu with >= 4 values")
    if kind in ("burgers-coincidence", "hopf-check") and fkind != "burgers":
        errors.append(f"{kind} requires flux.kind = burgers")
    if model is not None and w0l is not None:
        amp = max(abs(w0l.amplitude), abs(w0r.amplitude))
        hi = max(abs(u_l), abs(u_r)) + 2 * amp
        if hi > model.u_max or -hi < model.u_min:
            errors.append("initial data leaves the flux evaluation domain")

    if errors:
        raise ValidationError("; ".join(errors))
    label = str(_get(raw, "experiment.label", kind))
    extra = {k: v for k, v in raw.items() if k.startswith("check.")}
    return ScenarioConfig(kind, model, u_l, u_r, nus, dx, L, T, record_dt,
                          w0l, w0r, label, extra)
