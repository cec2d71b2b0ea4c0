import subprocess
import sys

import pytest

from afmm.bench import parse_csv
from afmm.cli import main, parse_plan
from afmm.kernels import KernelId
from afmm.matrix import read_matrix


def test_parse_plan_echo():
    plan = parse_plan("--kernel afmm-a --sizes 128,256 --d1 0.3333 --d2 0.5 --mu 3 --reps 20 --seed 42".split())
    assert plan.kernel is KernelId.AFMM_A
    assert plan.sizes == (128, 256)
    assert (plan.d1, plan.d2, plan.mu_prime) == (0.3333, 0.5, 3.0)
    assert (plan.replications, plan.warmups, plan.base_seed, plan.strassen_cutoff) == (20, 2, 42, 64)


def test_parse_plan_cutoff():
    assert parse_plan("--kernel strassen --sizes 64 --cutoff 32".split()).strassen_cutoff == 32


@pytest.mark.parametrize("argv", [
    "--kernel afmm-a --sizes 64 --d1 1.5",
    "--kernel winograd --sizes 64",
    "--kernel ikj --sizes ,",
    "--kernel ikj --sizes 64,32",
    "--kernel ikj --sizes 64 --reps 0",
])
def test_parse_plan_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        parse_plan(argv.split())
    assert exc.value.code != 0


def test_gen_and_mul(tmp_path, capsys):
    x, y = tmp_path / "x.txt", tmp_path / "y.txt"
    assert main(["gen", "--n", "4", "--role", "real", "--density", "0.5", "--seed", "1", "--out", str(x)]) == 0
    assert main(["gen", "--n", "4", "--mu", "3", "--density", "0.5", "--seed", "2", "--out", str(y)]) == 0
    assert read_matrix(x).n == 4 and read_matrix(y).is_integer_valued()
    capsys.readouterr()
    assert main(["mul", str(x), str(y), "--kernel", "afmm-a"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "4"
    assert out[-1].startswith("additions=") and "multiplications=0" in out[-1]


def test_mul_hand_example(tmp_path, capsys):
    (tmp_path / "x").write_text("2\n2 0\n0.5 1\n")
    (tmp_path / "y").write_text("2\n3 1\n0 2\n")
    main(["mul", str(tmp_path / "x"), str(tmp_path / "y"), "--kernel", "afmm-a"])
    assert capsys.readouterr().out == "2\n6 2\n1.5 2.5\nadditions=10 multiplications=0 zero_skips=1\n"


def test_bench_report_plot(tmp_path, capsys):
    csv_path = tmp_path / "r.csv"
    assert main("bench --kernel ikj --sizes 16,32 --reps 2 --warmups 0 --seed 3 --out".split() + [str(csv_path)]) == 0
    recs = parse_csv(csv_path)
    assert len(recs) == 4 and {r.n for r in recs} == {16, 32}
    assert main(["report", str(csv_path)]) == 0
    assert "| n | ikj |" in capsys.readouterr().out
    assert main(["plot-data", str(csv_path), "--out", str(tmp_path / "plots")]) == 0
    assert (tmp_path / "plots" / "manifest.txt").exists()


def test_report_reference_default(capsys):
    assert main(["report"]) == 0
    out = capsys.readouterr().out
    assert "| reduction vs ikj, n=2000 |" in out and "63.7%" in out


def test_verify_strassen_compare_exit_zero(capsys):
    assert main(["verify", "strassen-compare"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] C8" in out and "[PASS] C9" in out


def test_verify_report_exits_nonzero_on_failure():
    # criterion 11 at n=500 fails on the shipped reference data; see README
    proc = subprocess.run([sys.executable, "-m", "afmm.cli", "verify", "report"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert "[FAIL] C11.500" in proc.stdout
    assert "[PASS] C11.2000" in proc.stdout


def test_bench_usage_error_exit_status():
    proc = subprocess.run([sys.executable, "-m", "afmm.cli", "bench", "--kernel", "afmm-a", "--sizes", "8", "--d1", "1.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "not in [0, 1]" in proc.stderr
