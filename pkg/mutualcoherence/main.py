"""Command-line front end."""
import argparse
import contextlib
import io
import json
import logging
import os
import sys
import tempfile
import unittest
import unittest.mock
from pathlib import Path
from typing import List, Optional

from . import config
from .commands import COMMANDS
from .errors import CoherenceError, ConfigError, OutputError
from .runconfig import load_run_config
from .util.timeit import Timer

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(prog=config.PACKAGE_NAME, description="Higher-order mutual coherence of coupled optical and matter-wave modes")
    parser.add_argument("command", choices=list(COMMANDS), help="Report to produce")
    parser.add_argument("--config", required=True, type=Path, help="Run configuration file path, e.g. /some/dir/run.json")
    parser.add_argument("--out", type=Path, help="Output file path; defaults to the configured output, else stdout")
    parser.add_argument("--threads", type=int, help=f"Number of sweep threads; defaults to ${config.THREADS_ENV_VAR}, else {config.SWEEP_THREADS_DEFAULT}")
    return parser


def resolve_threads(threads: Optional[int]) -> int:
    """Return the number of sweep threads from the flag, else the environment, else the default."""
    source = "flag"
    if threads is None:
        if env_threads := os.getenv(config.THREADS_ENV_VAR):
            source = "environment"
            try:
                threads = int(env_threads)
            except ValueError as exc:
                raise ConfigError(f"${config.THREADS_ENV_VAR} must be an integer, but it is {env_threads!r}.") from exc
        else:
            source, threads = "default", config.SWEEP_THREADS_DEFAULT
    if threads < 1:
        raise ConfigError(f"The thread count must be positive, but the {source} gives {threads}.")
    return threads


def write_output(text: str, path: Optional[Path]) -> None:
    """Write the text to the given file, else to stdout."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        path.write_bytes(text.encode())
    except OSError as exc:
        raise OutputError(f"The output file {path} could not be written: {exc}") from exc
    log.info("Wrote %s characters to %s.", len(text), path)


def main(argv: Optional[List[str]] = None) -> int:
    """Run a command and return the process exit code."""
    args = build_parser().parse_args(argv)
    timer = Timer()
    try:
        threads = resolve_threads(args.threads)
        run_config = load_run_config(args.config)
        text = COMMANDS[args.command](run_config, threads)
        write_output(text, args.out or run_config.output)
    except CoherenceError as exc:
        if report := getattr(exc, "report", ""):
            with contextlib.suppress(CoherenceError):
                write_output(report, args.out)
        log.debug("The %s command failed after %s.", args.command, timer, exc_info=True)
        print(exc.diagnostic, file=sys.stderr)
        return exc.exit_code
    log.info("Completed the %s command in %s.", args.command, timer)
    return 0


# pylint: disable=missing-class-docstring,missing-function-docstring
REFERENCE_SYSTEM = {"kappa1": 0.15, "kappa2": 0.25, "nbar1": 0.01, "nbar2": 0.1, "g": 1}
INTERLEAVED_DETECTORS = [
    {"id": "1", "kind": "maxwell", "position": "r1", "gate_rank": 2},
    {"id": "2", "kind": "maxwell", "position": "r2", "gate_rank": 4},
    {"id": "3", "kind": "schrodinger", "position": "r3", "gate_rank": 1},
    {"id": "4", "kind": "schrodinger", "position": "r4", "gate_rank": 3},
]


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._dir = tempfile.TemporaryDirectory()  # pylint: disable=consider-using-with
        self.dir = Path(self._dir.name)

    def tearDown(self):
        self._dir.cleanup()

    def run_cli(self, command: str, run_config: dict, *extra: str):
        path = self.dir / "run.json"
        path.write_text(json.dumps({"schema": 1, **run_config}))
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            code = main([command, "--config", str(path), *extra])
        return code, stdout.getvalue(), stderr.getvalue()


class TestG3Command(CliTestCase):
    GRID = {"tau1": {"min": 0, "max": 10, "steps": 11}, "tau2": {"min": 0, "max": 10, "steps": 11}}

    def test_csv(self):
        code, stdout, _ = self.run_cli("g3", {"system": REFERENCE_SYSTEM, "kind": "x", "grid": self.GRID}, "--threads", "4")
        self.assertEqual(code, 0)
        lines = stdout.split("\n")
        self.assertEqual(lines[0], "tau1,tau2,g3")
        self.assertEqual(len(lines), 1 + 121 + 1)  # Trailing newline.
        self.assertEqual(lines[-1], "")
        rows = [tuple(float(value) for value in line.split(",")) for line in lines[1:-1]]
        self.assertEqual([row[:2] for row in rows], sorted(row[:2] for row in rows))
        by_point = {row[:2]: row[2] for row in rows}
        for tau1 in (1.0, 2.0, 5.0):
            self.assertGreater(by_point[(tau1, 0.0)], by_point[(tau1, 10.0)])

    def test_deterministic_file(self):
        out1, out2 = self.dir / "a.csv", self.dir / "b.csv"
        self.assertEqual(self.run_cli("g3", {"system": REFERENCE_SYSTEM, "grid": self.GRID}, "--out", str(out1), "--threads", "1")[0], 0)
        with unittest.mock.patch.dict(os.environ, {config.THREADS_ENV_VAR: "6"}):
            self.assertEqual(self.run_cli("g3", {"system": REFERENCE_SYSTEM, "grid": self.GRID}, "--out", str(out2))[0], 0)
        self.assertEqual(out1.read_bytes(), out2.read_bytes())

    def test_diagonal_kinds(self):
        grids = {}
        for kind in ("x", "y"):
            code, stdout, _ = self.run_cli("g3", {"system": REFERENCE_SYSTEM, "kind": kind, "grid": self.GRID})
            self.assertEqual(code, 0)
            grids[kind] = {tuple(map(float, line.split(",")[:2])): float(line.split(",")[2]) for line in stdout.splitlines()[1:]}
        for (tau1, tau2), value in grids["x"].items():
            if tau1 == tau2:
                self.assertAlmostEqual(value, grids["y"][(tau1, tau2)], delta=1e-9)

    def test_configured_output(self):
        code, stdout, _ = self.run_cli("g3", {"system": REFERENCE_SYSTEM, "grid": self.GRID, "output": "grid.csv"})
        self.assertEqual((code, stdout), (0, ""))
        self.assertTrue((self.dir / "grid.csv").read_text().startswith("tau1,tau2,g3\n"))

    def test_vacuum(self):
        code, _, stderr = self.run_cli("g3", {"system": {**REFERENCE_SYSTEM, "nbar1": 0, "nbar2": 0}, "grid": self.GRID})
        self.assertEqual(code, 2)
        self.assertTrue(stderr.strip().splitlines()[-1].startswith("mutualcoherence:ZeroDenominator: "))

    def test_output_error(self):
        code, _, stderr = self.run_cli("g3", {"system": REFERENCE_SYSTEM, "grid": self.GRID}, "--out", str(self.dir / "missing" / "grid.csv"))
        self.assertEqual(code, 3)
        self.assertIn("mutualcoherence:OutputError: ", stderr)

    def test_invalid_config(self):
        code, _, stderr = self.run_cli("g3", {"schema": 2, "system": REFERENCE_SYSTEM})
        self.assertEqual(code, 2)
        self.assertIn("mutualcoherence:ConfigError: ", stderr)

    def test_invalid_threads(self):
        with unittest.mock.patch.dict(os.environ, {config.THREADS_ENV_VAR: "many"}):
            code, _, stderr = self.run_cli("g3", {"system": REFERENCE_SYSTEM, "grid": self.GRID})
        self.assertEqual(code, 2)
        self.assertIn("mutualcoherence:ConfigError: ", stderr)


class TestReportCommands(CliTestCase):
    def test_eig(self):
        code, stdout, _ = self.run_cli("eig", {"system": REFERENCE_SYSTEM})
        self.assertEqual(code, 0)
        self.assertIn("0.999687", stdout)
        self.assertIn("0.100000000", stdout)

    def test_covariance(self):
        code, stdout, _ = self.run_cli("covariance", {"system": REFERENCE_SYSTEM})
        self.assertEqual(code, 0)
        self.assertIn("0.0657", stdout)
        residual = float(stdout.strip().splitlines()[-1].split(":")[1])
        self.assertLessEqual(residual, 1e-10)

    def test_gating_interleaved(self):
        code, stdout, _ = self.run_cli("gating", {"system": REFERENCE_SYSTEM, "detectors": INTERLEAVED_DETECTORS})
        self.assertEqual(code, 0)
        self.assertIn("Ordering: Psi+[r3@t3] E-[r1@t1] Psi+[r4@t4] E-[r2@t2] E+[r2@t2] Psi[r4@t4] E+[r1@t1] Psi[r3@t3]\n", stdout)
        self.assertIn("Amplitude terms: 24\n", stdout)
        for term_class in ("direct", "boson_exchange", "fermion_cross"):
            self.assertIn(term_class, stdout)
        self.assertIn("Counting-rate survivors: 2 of 3\n", stdout)
        self.assertIn("Electron pair overlap: +δ(q3,q3')δ(q4,q4')δ(s3,s3')δ(s4,s4') -δ(q3,q4')δ(q4,q3')δ(s3,s4')δ(s4,s3')\n", stdout)

    def test_gating_distinguishable(self):
        code, stdout, _ = self.run_cli("gating", {"system": REFERENCE_SYSTEM, "detectors": INTERLEAVED_DETECTORS, "distinguishable": True})
        self.assertEqual(code, 0)
        self.assertIn("Counting-rate survivors: 1 of 1\n", stdout)
        self.assertNotIn("Electron pair overlap", stdout)

    def test_gating_single_maxwell(self):
        code, stdout, _ = self.run_cli("gating", {"system": REFERENCE_SYSTEM, "detectors": [{"id": "1", "kind": "maxwell", "position": "r1", "gate_rank": 1}]})
        self.assertEqual(code, 0)
        self.assertIn("Ordering: E-[r1@t1] E+[r1@t1]\n", stdout)
        self.assertIn("Counting-rate survivors: 1 of 1\n", stdout)

    def test_gating_errors(self):
        detectors = [{**detector, "gate_rank": 1} for detector in INTERLEAVED_DETECTORS]
        code, _, stderr = self.run_cli("gating", {"system": REFERENCE_SYSTEM, "detectors": detectors})
        self.assertEqual(code, 2)
        self.assertIn("mutualcoherence:InvalidRankPermutation: ", stderr)
        detectors = [{"id": str(i), "kind": "schrodinger", "position": f"r{i}", "gate_rank": i} for i in range(1, 4)]
        code, _, stderr = self.run_cli("gating", {"system": REFERENCE_SYSTEM, "detectors": detectors})
        self.assertEqual(code, 2)
        self.assertIn("mutualcoherence:UnsupportedDetectorCount: ", stderr)
        code, _, stderr = self.run_cli("gating", {"system": REFERENCE_SYSTEM})
        self.assertEqual(code, 2)

    def test_terms(self):
        detectors = [
            {"id": "1", "kind": "schrodinger", "position": "r1", "gate_rank": 1},
            {"id": "2", "kind": "schrodinger", "position": "r2", "gate_rank": 2},
            {"id": "3", "kind": "maxwell", "position": "r3", "gate_rank": 3},
        ]
        run_config = {"system": REFERENCE_SYSTEM, "point": [1, 0.5], "detectors": detectors, "times": {"t1": 0, "t2": 0.5, "t3": 1}, "efficiencies": {"eta_m(r3)": 0.5}}
        code, stdout, _ = self.run_cli("terms", run_config)
        self.assertEqual(code, 0)
        self.assertEqual(stdout.count("[E3(1)·"), 6)
        self.assertEqual(stdout.count("[E3(1)·E3†(1)]"), 2)
        for term_class in ("direct", "boson_exchange", "fermion_cross"):
            self.assertIn(term_class, stdout)

    def test_terms_config_errors(self):
        detectors = [{"id": "1", "kind": "schrodinger", "position": "r1", "gate_rank": 1}, {"id": "2", "kind": "schrodinger", "position": "r2", "gate_rank": 2}]
        shared = [*detectors, {"id": "3", "kind": "maxwell", "position": "r1", "gate_rank": 3}]
        for run_config in (
            {"system": REFERENCE_SYSTEM, "detectors": detectors, "times": {"t1": 0.0}},
            {"system": REFERENCE_SYSTEM, "detectors": detectors, "times": [0.0, 1.0]},
            {"system": REFERENCE_SYSTEM, "detectors": shared, "times": {"t1": 0.0, "t2": 1.0, "t3": 2.0}},
            {"system": REFERENCE_SYSTEM, "efficiencies": ["eta_m(r1)"]},
            {"system": REFERENCE_SYSTEM, "oracle": [10]},
        ):
            code, stdout, stderr = self.run_cli("terms", run_config)
            self.assertEqual((code, stdout), (2, ""))
            self.assertEqual(len(stderr.strip().splitlines()), 1)
            self.assertTrue(stderr.startswith("mutualcoherence:ConfigError: "), stderr)


class TestOracleCheckCommand(CliTestCase):
    def test_reference(self):
        code, stdout, _ = self.run_cli("oracle-check", {"system": REFERENCE_SYSTEM, "oracle": {"points": [[1, 0.5]]}})
        self.assertEqual(code, 0)
        self.assertIn("relative error", stdout)

    def test_decoupled_zero_delay(self):
        code, stdout, _ = self.run_cli("oracle-check", {"system": {**REFERENCE_SYSTEM, "g": 0}, "oracle": {"points": [[0, 0]]}})
        self.assertEqual(code, 0)
        _, _, gaussian, oracle, _ = stdout.strip().splitlines()[-1].split()
        for value in (gaussian, oracle):
            self.assertAlmostEqual(complex(value.replace("i", "j")), 2e-4, delta=1e-9)

    def test_cutoff_too_small(self):
        code, _, stderr = self.run_cli("oracle-check", {"system": {**REFERENCE_SYSTEM, "nbar1": 0.5, "nbar2": 0.5}, "oracle": {"cutoff": 3}})
        self.assertEqual(code, 2)
        self.assertIn("mutualcoherence:CutoffTooSmall: ", stderr)

    def test_tolerance_exceeded(self):
        with unittest.mock.patch.object(config, "ORACLE_RELATIVE_TOLERANCE", 0.0):
            code, stdout, stderr = self.run_cli("oracle-check", {"system": REFERENCE_SYSTEM, "oracle": {"points": [[1, 0.5]]}})
        self.assertEqual(code, 1)
        self.assertIn("relative error", stdout)
        self.assertIn("mutualcoherence:ToleranceExceeded: ", stderr)


# python -m unittest -v mutualcoherence.main
