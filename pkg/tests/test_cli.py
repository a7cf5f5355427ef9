"""Command-line interface: pinned outputs, exit codes, artifacts."""

import io
from contextlib import redirect_stderr, redirect_stdout

import pytest

from meanweave.cli import main

FOUR_STRANDS = (
    "interleave(interleave(const(0), neg(square(linear()))),"
    " interleave(const(1), square(linear())))"
)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = main(list(argv))
        except SystemExit as exc:  # argparse errors
            code = exc.code
    return code, out.getvalue(), err.getvalue()


# ---------------------------------------------------------------------------
# classify


def test_classify_prints_the_rendered_set():
    code, out, err = run("classify", "interleave(const(0), geom(2))")
    assert (code, out, err) == (0, "{0} ∪ {+inf}\n", "")


def test_classify_exact_serialization():
    code, out, _ = run("classify", "--exact", "interleave(const(0), geom(2))")
    assert code == 0 and out == "[[0/1, 0/1], [+inf, +inf]]\n"


def test_classify_whole_line():
    code, out, _ = run("classify", "interleave(neg(runlen(4)), runlen(4))")
    assert code == 0 and out == "[-inf, +inf]\n"


def test_parse_failure_is_a_machine_readable_error():
    code, out, err = run("classify", "foo(1)")
    assert code == 2 and out == ""
    assert err.startswith("ERROR ParseError: ")
    assert "offset 0" in err


# ---------------------------------------------------------------------------
# balanced


def test_balanced_analytic_verdict_with_estimate():
    code, out, _ = run("balanced", "geom(2)")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("NOT_BALANCED: ")
    assert lines[1] == "ratio limsup estimate: 1"


def test_balanced_numeric_evidence_line():
    code, out, _ = run("balanced", "--mode", "numeric", "--n", "2000", "pow(1)")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("BALANCED: ")
    assert lines[1] == (
        "evidence: horizon=2000 window_start=1800"
        " max_ratio=2/1799 last_ratio=2/1999 small=False"
    )


def test_balanced_rejects_nondivergent_input():
    code, _, err = run("balanced", "const(1)")
    assert code == 2 and err.startswith("ERROR NotDivergent: ")


# ---------------------------------------------------------------------------
# oracle


def test_oracle_enumerates_small_multisets():
    assert run("oracle", "0,0,1,1", "2") == (0, "0, 1/2, 1\n", "")


def test_oracle_reports_extremes_beyond_the_cap():
    values = ",".join(str(i) for i in range(14))
    assert run("oracle", values, "3") == (0, "min 1, max 12\n", "")


def test_oracle_rejects_bad_subset_size():
    code, _, err = run("oracle", "1,2", "5")
    assert code == 2 and err.startswith("ERROR UsageError: ")


# ---------------------------------------------------------------------------
# construct + verify round trip


def test_construct_writes_permutation_and_trace(tmp_path):
    base = tmp_path / "run"
    code, out, _ = run(
        "construct", "--target", "1/3", "--n", "200",
        "--out", str(base), "interleave(const(0), const(1))",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "constructor: bounded_target[1/3]"
    assert lines[1] == f"wrote {base}.perm.txt"
    assert lines[2] == f"wrote {base}.trace.csv"
    assert lines[3] == "final average: 67/200 (0.335)"

    perm = (base.parent / "run.perm.txt").read_text().splitlines()
    assert len(perm) == 200
    assert perm[0] == "1 2" and perm[1] == "2 1"
    ranks = [int(line.split()[0]) for line in perm]
    sources = [int(line.split()[1]) for line in perm]
    assert ranks == list(range(1, 201))
    assert len(set(sources)) == 200  # injective prefix

    csv_lines = (base.parent / "run.trace.csv").read_text().splitlines()
    assert csv_lines[0] == "n,source_index,value,partial_sum,average_decimal,average_exact"
    assert csv_lines[1] == "1,2,1/1,1/1,1,1/1"
    assert csv_lines[-1] == "200,265,0/1,67/1,0.335,67/200"


def test_verify_checks_identities_and_tube(tmp_path):
    base = tmp_path / "run"
    run("construct", "--target", "1/3", "--n", "200", "--out", str(base),
        "interleave(const(0), const(1))")
    trace_path = str(base) + ".trace.csv"

    code, out, _ = run("verify", trace_path, "--tube", "1/3", "1/100", "--from", "150")
    assert code == 0
    assert out == "identities: PASS\ntube target=1/3 eps=1/100 from=150: PASS\n"

    code, out, _ = run("verify", trace_path, "--tube", "1/3", "1/10000", "--from", "150")
    assert code == 1
    assert out == "identities: PASS\ntube target=1/3 eps=1/10000 from=150: FAIL\n"


def test_verify_missing_file_is_an_io_error():
    code, _, err = run("verify", "/nonexistent/trace.csv")
    assert code == 2 and err.startswith("ERROR IOError: ")


def test_construct_oscillate(tmp_path):
    base = tmp_path / "osc"
    code, out, _ = run(
        "construct", "--oscillate", "--n", "50", "--out", str(base),
        "interleave(const(0), const(1))",
    )
    assert code == 0
    assert out.splitlines()[0] == "constructor: oscillator"
    assert out.splitlines()[3] == "final average: 19/50 (0.38)"


def test_construct_realize_accepts_a_point_set(tmp_path):
    base = tmp_path / "re"
    code, out, _ = run(
        "construct", "--realize", "{1/4} | {3/4}", "--n", "400",
        "--out", str(base), FOUR_STRANDS,
    )
    assert code == 0
    assert out.splitlines()[0] == "constructor: accumulation_realizer"
    assert out.splitlines()[3] == "final average: 417/400 (1.0425)"


def test_construct_rejects_unreachable_target():
    code, _, err = run(
        "construct", "--target", "-1", "--n", "100",
        "--out", "/tmp/never", "interleave(const(0), linear())",
    )
    assert code == 2 and err.startswith("ERROR TargetUnreachable: ")


def test_identical_commands_produce_byte_identical_artifacts(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["construct", "--target", "1", "--n", "300", "interleave(const(0), linear())"]
    run(*argv, "--out", str(a))
    run(*argv, "--out", str(b))
    assert (tmp_path / "a.trace.csv").read_bytes() == (tmp_path / "b.trace.csv").read_bytes()
    assert (tmp_path / "a.perm.txt").read_bytes() == (tmp_path / "b.perm.txt").read_bytes()
