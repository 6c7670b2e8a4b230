"""Command line interface: file contents, determinism, and exit codes."""

import json
import math

import pytest

from cvqec.cli import main
from cvqec.protocol import optimal_alpha_qubit


def _read_rows(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


class TestFig2:
    def test_variance_curve(self, tmp_path):
        assert main(["fig2", "--sigma", "0.1", "--out", str(tmp_path)]) == 0
        _, rows = _read_rows(tmp_path / "fig2_variance.csv")
        by_alpha = {float(r["alpha"]): float(r["var_p"]) for r in rows}
        assert by_alpha[0.0] == pytest.approx(0.005, abs=1e-10)
        alpha_opt = optimal_alpha_qubit(0.1)
        opt_rows = [r for r in rows if r["is_opt"] == "1"]
        assert len(opt_rows) == 1
        assert float(opt_rows[0]["alpha"]) == pytest.approx(alpha_opt, rel=1e-4)
        assert float(opt_rows[0]["var_p"]) == pytest.approx(
            (1 - math.exp(-1)) * 0.005, abs=1e-8)
        # interior minimum: the optimum beats both curve endpoints
        assert float(opt_rows[0]["var_p"]) < min(by_alpha[0.0],
                                                 by_alpha[max(by_alpha)])

    def test_distribution_narrows(self, tmp_path):
        assert main(["fig2", "--out", str(tmp_path)]) == 0
        _, rows = _read_rows(tmp_path / "fig2_distribution.csv")
        center = min(rows, key=lambda r: abs(float(r["beta_p"])))
        assert float(center["p_corrected"]) > float(center["p_uncorrected"])
        # corrected distribution integrates to 1 like the raw one
        db = float(rows[1]["beta_p"]) - float(rows[0]["beta_p"])
        total = sum(float(r["p_corrected"]) for r in rows) * db
        assert total == pytest.approx(1.0, abs=1e-3)

    def test_sidecar_has_no_timestamp(self, tmp_path):
        assert main(["fig2", "--out", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "fig2_config.json").read_text())
        assert payload["config"]["command"] == "fig2"
        assert "time" not in json.dumps(payload).lower()


class TestFig3:
    def test_monotone_and_bounded(self, tmp_path):
        assert main(["fig3", "--sigma", "0.1", "--dmax", "6",
                     "--out", str(tmp_path)]) == 0
        _, rows = _read_rows(tmp_path / "fig3_qudit.csv")
        var_opt = [float(r["var_opt"]) for r in rows]
        assert all(a > b for a, b in zip(var_opt, var_opt[1:]))
        assert float(rows[0]["var_opt"]) == pytest.approx(
            (1 - math.exp(-1)) * 0.005, abs=1e-9)
        for r in rows:
            if float(r["d"]) >= 4:
                assert float(r["var_at_alpha_s"]) < float(r["bound"])

    def test_dmax_cap(self, tmp_path):
        assert main(["fig3", "--dmax", "64", "--out", str(tmp_path)]) == 3


class TestFig4:
    def test_byte_identical_reruns(self, tmp_path):
        argv = ["fig4", "--code", "three_qubit", "--trajectories", "60",
                "--points", "0.0", "0.1", "--out", str(tmp_path)]
        assert main(argv) == 0
        stem = "fig4_three_qubit_coherent_pphi"
        first = {(tmp_path / name).read_bytes()
                 for name in (f"{stem}.csv", f"{stem}_config.json")}
        assert main(argv) == 0
        second = {(tmp_path / name).read_bytes()
                  for name in (f"{stem}.csv", f"{stem}_config.json")}
        assert first == second

    def test_thread_count_does_not_change_bytes(self, tmp_path, monkeypatch):
        argv = ["fig4", "--trajectories", "80", "--points", "0.05",
                "--out", str(tmp_path)]
        monkeypatch.delenv("CVQEC_THREADS", raising=False)
        assert main(argv) == 0
        serial = (tmp_path / "fig4_none_coherent_pphi.csv").read_bytes()
        monkeypatch.setenv("CVQEC_THREADS", "4")
        assert main(argv) == 0
        threaded = (tmp_path / "fig4_none_coherent_pphi.csv").read_bytes()
        assert serial == threaded

    def test_sweep_rows(self, tmp_path):
        assert main(["fig4", "--code", "none", "--trajectories", "40",
                     "--points", "0.0", "0.05", "0.1",
                     "--out", str(tmp_path)]) == 0
        _, rows = _read_rows(tmp_path / "fig4_none_coherent_pphi.csv")
        assert [float(r["pphi"]) for r in rows] == [0.0, 0.05, 0.1]
        for r in rows:
            assert r["n"] == "40"
            assert 0.0 <= float(r["infidelity"]) <= 1.0

    def test_rejects_pphi_sweep_for_bosonic_code(self, tmp_path):
        assert main(["fig4", "--code", "binomial", "--sweep", "pphi",
                     "--out", str(tmp_path)]) == 3

    def test_rejects_sigma_sweep_for_dephasing_code(self, tmp_path):
        assert main(["fig4", "--code", "none", "--sweep", "sigma",
                     "--out", str(tmp_path)]) == 3

    def test_bosonic_sigma_sweep(self, tmp_path):
        assert main(["fig4", "--code", "binomial", "--sweep", "sigma",
                     "--trajectories", "30", "--points", "0.1",
                     "--out", str(tmp_path)]) == 0
        _, rows = _read_rows(tmp_path / "fig4_binomial_coherent_sigma.csv")
        assert len(rows) == 1 and rows[0]["n"] == "30"


class TestOptimize:
    def test_squeezed_payload(self, tmp_path, capsys):
        assert main(["optimize", "--scheme", "squeezed", "--sigma", "0.1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["zeta_opt"] == pytest.approx(
            math.log(1 - math.exp(-1)) / 8, abs=1e-4)
        assert payload["squeezing_db"] == pytest.approx(0.996, abs=1e-3)

    def test_qubit_to_file(self, tmp_path):
        out = tmp_path / "opt.json"
        assert main(["optimize", "--scheme", "qubit_p", "--sigma", "0.1",
                     "--out-file", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["alpha_opt"] == pytest.approx(
            optimal_alpha_qubit(0.1), rel=1e-4)

    def test_qudit_d(self, tmp_path):
        out = tmp_path / "opt.json"
        assert main(["optimize", "--scheme", "qudit", "--sigma", "0.1",
                     "--d", "3", "--out-file", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["d"] == 3
        assert payload["var_p"] < (1 - math.exp(-1)) * 0.005


class TestExitCodes:
    def test_bad_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["fig9"])
        assert exc.value.code == 2

    def test_missing_required(self):
        with pytest.raises(SystemExit) as exc:
            main(["optimize"])
        assert exc.value.code == 2

    def test_numerical_failure(self, tmp_path):
        assert main(["fig4", "--sigma", "-0.2", "--out", str(tmp_path)]) == 3

    def test_io_failure(self, tmp_path):
        missing = tmp_path / "does" / "not" / "exist"
        assert main(["fig2", "--out", str(missing)]) == 4
