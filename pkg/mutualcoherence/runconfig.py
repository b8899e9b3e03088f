"""Run configuration loader."""
import dataclasses
import json
import logging
import tempfile
import unittest
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from . import config
from .detection import DetectionPlan, DetectorKind, DetectorSpec
from .errors import CoherenceError, ConfigError
from .oracle import FockConfig
from .sweep import GridAxis
from .system import ModeSystem, build_two_mode_example
from .util.dict import dict_str
from .wick import G3Kind

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SystemParams:
    """Parameters of the two-mode example in units of the coupling constant."""

    kappa1: float
    kappa2: float
    nbar1: float
    nbar2: float
    g: float  # pylint: disable=invalid-name

    def build(self) -> ModeSystem:
        """Return the mode system."""
        return build_two_mode_example(self.kappa1, self.kappa2, self.nbar1, self.nbar2, self.g)


@dataclasses.dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated run configuration."""

    system_params: SystemParams
    system: ModeSystem
    kind: G3Kind = G3Kind.X
    tau1_axis: GridAxis = GridAxis()
    tau2_axis: GridAxis = GridAxis()
    point: Tuple[float, float] = (1.0, 0.5)  # (τ1, τ2) of the term report.
    plan: Optional[DetectionPlan] = None
    distinguishable: bool = False
    efficiencies: Dict[str, float] = dataclasses.field(default_factory=dict)
    times: Dict[str, float] = dataclasses.field(default_factory=dict)
    fock: FockConfig = FockConfig()
    oracle_points: Tuple[Tuple[float, float], ...] = config.ORACLE_POINTS_DEFAULT
    output: Optional[Path] = None


def _section(data: Dict[str, Any], key: str, default: Any) -> Any:
    value = data.get(key, default)
    return default if value is None else value


def _mapping(data: Dict[str, Any], key: str) -> Dict[str, Any]:
    if not isinstance(value := _section(data, key, {}), dict):
        raise ConfigError(f"The configuration section {key!r} must be a mapping, but it is {type(value).__name__}.")
    return value


def parse_run_config(data: Dict[str, Any], base_dir: Path = Path(".")) -> RunConfig:
    """Return the validated run configuration of a plain JSON-compatible dictionary."""
    if not isinstance(data, dict):
        raise ConfigError("The configuration must be a mapping.")
    if (schema := data.get("schema")) != config.CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"The configuration schema is {schema!r}, but the supported schema is {config.CONFIG_SCHEMA_VERSION}.")
    try:
        system_params = SystemParams(**data["system"])
        system = system_params.build()
        grid = _mapping(data, "grid")
        detectors = data.get("detectors")
        plan = None
        if detectors is not None:
            plan = DetectionPlan(
                tuple(DetectorSpec(id=str(d["id"]), kind=DetectorKind(d["kind"]), position_label=d["position"], gate_rank=int(d["gate_rank"])) for d in detectors)
            )
        oracle = _mapping(data, "oracle")
        output = data.get("output")
        run_config = RunConfig(
            system_params=system_params,
            system=system,
            kind=G3Kind(_section(data, "kind", G3Kind.X.value)),
            tau1_axis=GridAxis(**_mapping(grid, "tau1")),
            tau2_axis=GridAxis(**_mapping(grid, "tau2")),
            point=tuple(float(tau) for tau in _section(data, "point", (1.0, 0.5))),  # type: ignore
            plan=plan,
            distinguishable=bool(data.get("distinguishable", False)),
            efficiencies={str(k): float(v) for k, v in _mapping(data, "efficiencies").items()},
            times={str(k): float(v) for k, v in _mapping(data, "times").items()},
            fock=FockConfig(**{k: v for k, v in oracle.items() if k != "points"}),
            oracle_points=tuple((float(tau1), float(tau2)) for tau1, tau2 in _section(oracle, "points", config.ORACLE_POINTS_DEFAULT)),
            output=(base_dir / output) if output else None,
        )
    except CoherenceError:
        raise
    except KeyError as exc:
        raise ConfigError(f"The configuration is missing the required key {exc}.") from exc
    except (AttributeError, TypeError, ValueError) as exc:
        raise ConfigError(f"The configuration is invalid: {exc}") from exc
    if len(run_config.point) != 2:
        raise ConfigError(f"The term report point must have 2 delays, but it is {run_config.point}.")
    return run_config


def load_run_config(path: Path) -> RunConfig:
    """Read and validate the run configuration file, which is JSON or YAML."""
    path = Path(path)
    log.debug("Reading run configuration file %s", path)
    try:
        data = YAML(typ="safe").load(path)
    except (OSError, YAMLError) as exc:
        raise ConfigError(f"The configuration file {path} could not be read: {exc}") from exc
    data = json.loads(json.dumps(data))  # Recursively use a dict as the data structure.
    run_config = parse_run_config(data, base_dir=path.parent)
    logged = {k: v for k, v in data.items() if k not in ("detectors", "efficiencies", "times")}
    log.info("Read run configuration file %s having %s detectors with the excerpt: %s", path, len(data.get("detectors") or []), dict_str(logged))
    return run_config


# pylint: disable=missing-class-docstring,missing-function-docstring
REFERENCE_CONFIG = {
    "schema": 1,
    "system": {"kappa1": 0.15, "kappa2": 0.25, "nbar1": 0.01, "nbar2": 0.1, "g": 1},
    "kind": "x",
    "grid": {"tau1": {"min": 0, "max": 10, "steps": 5}, "tau2": {"min": 0, "max": 10, "steps": 3}},
}


class TestParseRunConfig(unittest.TestCase):
    def test_reference(self):
        run_config = parse_run_config(REFERENCE_CONFIG)
        self.assertEqual(run_config.kind, G3Kind.X)
        self.assertEqual(run_config.tau1_axis, GridAxis(0, 10, 5))
        self.assertEqual(run_config.system.dim, 2)
        self.assertEqual(run_config.fock, FockConfig())
        self.assertIsNone(run_config.plan)
        self.assertIsNone(run_config.output)

    def test_plan(self):
        detectors = [{"id": i, "kind": "maxwell" if i < 3 else "schrodinger", "position": f"r{i}", "gate_rank": i} for i in range(1, 5)]
        run_config = parse_run_config({**REFERENCE_CONFIG, "detectors": detectors, "distinguishable": True, "oracle": {"cutoff": 8, "points": [[1, 0.5]]}})
        self.assertEqual(run_config.plan.num_schrodinger, 2)
        self.assertTrue(run_config.distinguishable)
        self.assertEqual(run_config.fock.cutoff, 8)
        self.assertEqual(run_config.oracle_points, ((1.0, 0.5),))

    def test_schema(self):
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "schema": 2})
        with self.assertRaises(ConfigError):
            parse_run_config({key: value for key, value in REFERENCE_CONFIG.items() if key != "schema"})

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "grid": {"tau1": {"steps": 1}}})
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "system": {"kappa1": -1, "kappa2": 0.25, "nbar1": 0, "nbar2": 0, "g": 1}})
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "system": {"kappa1": 0.15}})
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "kind": "z"})

    def test_non_mapping_sections(self):
        for key in ("grid", "oracle", "efficiencies", "times"):
            with self.assertRaisesRegex(ConfigError, f"'{key}' must be a mapping"):
                parse_run_config({**REFERENCE_CONFIG, key: [1, 2]})
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "grid": {"tau1": [0, 10]}})
        with self.assertRaises(ConfigError):
            parse_run_config({**REFERENCE_CONFIG, "detectors": ["r1"]})


class TestLoadRunConfig(unittest.TestCase):
    def test_json_round_trip(self):
        with tempfile.TemporaryDirectory() as dir_name:
            path = Path(dir_name) / "run.json"
            path.write_text(json.dumps({**REFERENCE_CONFIG, "output": "g3.csv"}))
            run_config = load_run_config(path)
            self.assertEqual(run_config.system_params, SystemParams(**REFERENCE_CONFIG["system"]))  # type: ignore
            self.assertEqual(run_config.output, Path(dir_name) / "g3.csv")

    def test_missing(self):
        with self.assertRaises(ConfigError):
            load_run_config(Path("/nonexistent/run.json"))


# python -m unittest -v mutualcoherence.runconfig
