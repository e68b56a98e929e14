import io
import json
import subprocess
import sys

import pytest

from dioseries import cli
from dioseries.errors import CertificateFailed


def run(*argv):
    buf = io.StringIO()
    status = cli.main(list(argv), out=buf)
    text = buf.getvalue()
    return status, text


def run_json(*argv):
    status, text = run(*argv)
    return status, json.loads(text)


def test_classify_example():
    status, doc = run_json("classify", "--kind", "sin", "--theta", "1/4")
    assert status == 0
    assert doc["schema"] == cli.SCHEMA
    assert doc["result"]["class"] == "diverges_to_plus_infinity"
    assert doc["result"]["a0"] == 2


def test_envelope_is_self_describing():
    status, doc = run_json("sum", "--kind", "sin", "--theta", "1/2", "--alpha", "1", "--N", "100000")
    assert status == 0
    assert {"schema", "version", "command", "config", "precision", "result"} <= set(doc)
    assert doc["config"]["N"] == 100000 and doc["config"]["theta"] == "1/2"
    assert {"working_digits", "target_radius", "backend"} <= set(doc["precision"])
    value = doc["result"]["value"]
    assert abs(float(value["mid"]) - 0.7853981633974483) < 1e-4
    assert "rad" in value


def test_zero_denominator_exit1():
    status, doc = run_json("classify", "--theta", "2/0")
    assert status == 1
    assert doc["error"]["code"] == "ZeroDenominator"


def test_bad_flag_exit1():
    status, doc = run_json("frobnicate")
    assert status == 1 and doc["error"]["code"]
    status, doc = run_json("sum", "--kind", "sin", "--theta", "1/2", "--N", "0")
    assert status == 1


def test_divergent_sum_full_exit1():
    status, doc = run_json("sum", "--kind", "sin", "--theta", "1/4", "--N", "100", "--full")
    assert status == 1 and doc["error"]["code"]


def test_invariant_violation_exit2(monkeypatch):
    def boom(args):
        raise CertificateFailed("synthetic")

    monkeypatch.setitem(cli.COMMANDS, "rate-cert", boom)
    status, doc = run_json("rate-cert", "--kind", "sin", "--theta", "1/4", "--L", "10")
    assert status == 2
    assert doc["error"]["code"] == CertificateFailed("x").code


@pytest.mark.parametrize(
    "argv",
    [
        ["rate-cert", "--kind", "sin", "--theta", "1/4", "--L", "100", "1000"],
        ["cf", "--theta", "const:golden", "--K", "20"],
        ["liouville", "--interval", "0,1", "--depth", "2", "--demo-q", "4"],
        ["measure", "--alpha", "0.6", "--N", "1000", "--samples", "30", "--seed", "1"],
        ["gelfond", "--alpha", "0.5", "--z", "0.999"],
        ["gelfond", "--alpha", "0.5", "--j-min", "8", "--j-max", "10"],
        ["shells", "--theta", "const:golden", "--kind", "cos", "--s-max", "8", "--N", "100000", "--fit"],
        ["sum", "--kind", "cos", "--theta", "1/3", "--N", "3000", "--accelerated", "--full"],
        ["classify", "--kind", "both", "--theta", "3/8"],
    ],
)
def test_subcommands_succeed(argv):
    status, doc = run_json(*argv)
    assert status == 0, doc
    assert doc["command"] == argv[0]


def test_measure_deterministic():
    a = run("measure", "--alpha", "0.6", "--N", "1000", "--samples", "30", "--seed", "5")
    b = run("measure", "--alpha", "0.6", "--N", "1000", "--samples", "30", "--seed", "5")
    assert a == b


def test_strict_rejects_unreduced():
    assert run_json("classify", "--theta", "2/8")[0] == 0
    assert run_json("classify", "--theta", "2/8", "--strict")[0] == 1


def test_shells_csv_roundtrip():
    status, text = run("shells", "--theta", "const:sqrt2", "--kind", "sin", "--s-max", "6", "--N", "20000", "--format", "csv")
    assert status == 0
    assert text.splitlines()[0] == ",".join(cli.CSV_COLUMNS)
    assert cli.rows_to_csv(cli.csv_to_rows(text)) == text


def test_digits_env_override(monkeypatch):
    monkeypatch.setenv("DIOSERIES_DIGITS", "45")
    _, doc = run_json("classify", "--theta", "1/3")
    assert doc["precision"]["working_digits"] == 45
    _, doc = run_json("classify", "--theta", "1/3", "--digits", "50")
    assert doc["precision"]["working_digits"] == 50


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dioseries.cli", "classify", "--theta", "2/0"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["error"]["code"] == "ZeroDenominator"
