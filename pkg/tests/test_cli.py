import json

import numpy as np

from wavekam.cli import main


def run(argv):
    return main(argv)


class TestAdmissible:
    def test_admissible_set(self, capsys):
        assert run(["admissible", "--modes", "0,1,5"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out == {"admissible": True, "modes": [0, 1, 5]}

    def test_opposite_pair(self, capsys):
        assert run(["admissible", "--modes", "1,-1"]) == 1
        out = json.loads(capsys.readouterr().out)
        assert out["admissible"] is False and out["witness"] == 1

    def test_duplicate_is_usage_error(self):
        assert run(["admissible", "--modes", "2,2"]) == 2


class TestDivisors:
    def test_generic_mass_empty(self, tmp_path, capsys):
        code = run(["divisors", "--modes", "1", "--mass", "1.5123",
                    "--kappa", "1e-8", "--kmax", "2", "--smax", "6",
                    "--output-dir", str(tmp_path)])
        assert code == 0
        csv_lines = (tmp_path / "violations.csv").read_text().splitlines()
        assert csv_lines[0].startswith("kind,")
        assert len(csv_lines) == 1

    def test_huge_kappa_violations_exit_code(self, tmp_path):
        code = run(["divisors", "--modes", "1", "--mass", "1.5",
                    "--kappa", "10", "--kmax", "1", "--smax", "4",
                    "--output-dir", str(tmp_path)])
        assert code == 3
        lines = (tmp_path / "violations.csv").read_text().splitlines()
        assert len(lines) > 1

    def test_certify_adds_column(self, tmp_path):
        run(["divisors", "--modes", "1", "--mass", "1.5", "--kappa", "10",
             "--kmax", "1", "--smax", "4", "--certify",
             "--output-dir", str(tmp_path)])
        header = (tmp_path / "violations.csv").read_text().splitlines()[0]
        assert header.endswith(",certified")

    def test_bad_mass_usage(self):
        assert run(["divisors", "--modes", "1", "--mass", "0.3"]) == 2

    def test_excluded_scan_json(self, tmp_path):
        run(["divisors", "--modes", "1", "--mass", "1.5123", "--kappa", "1e-8",
             "--kmax", "2", "--smax", "6", "--grid", "500",
             "--output-dir", str(tmp_path)])
        doc = json.loads((tmp_path / "excluded_mass.json").read_text())
        assert 0.0 <= doc["excluded_fraction"] <= 1.0


class TestBirkhoff:
    def test_run_and_summary(self, tmp_path):
        code = run(["birkhoff", "--modes", "0,1,5", "--mass", "1.2337",
                    "--cutoff", "8", "--output-dir", str(tmp_path)])
        assert code == 0
        doc = json.loads((tmp_path / "summary.json").read_text())
        assert doc["residual_norm"] <= 1e-10
        assert doc["vanishing_ok"] is True
        assert "0,0" in doc["z4_plus_table"]
        assert (tmp_path / "normal_form.txt").exists()

    def test_gamma_gate_exit(self, tmp_path, capsys):
        # a threshold above the computed minimum divisor must trip the gate
        code = run(["birkhoff", "--modes", "0,1,5", "--mass", "1.2337",
                    "--cutoff", "8", "--gamma-threshold", "0.5"])
        assert code == 4


class TestKamcheck:
    def test_defaults_small_grid(self, capsys):
        code = run(["kamcheck", "--modes", "1", "--rho-grid", "5"])
        assert code == 0
        out = capsys.readouterr().out
        assert "A1:" in out and "A2:" in out and "A3:" in out
        assert "accepted_fraction=1.0000" in out

    def test_single_point_grid(self):
        assert run(["kamcheck", "--modes", "1", "--rho-grid", "1",
                    "--hypothesis", "a3"]) == 0

    def test_dimension_refusal(self):
        assert run(["kamcheck", "--modes", "0,1,2,3,4", "--rho-grid", "2",
                    "--hypothesis", "a1"]) == 2

    def test_reports_written(self, tmp_path):
        run(["kamcheck", "--modes", "1", "--rho-grid", "3",
             "--hypothesis", "a1", "--output-dir", str(tmp_path)])
        doc = json.loads((tmp_path / "report_a1.json").read_text())
        assert doc["violations"] == 0


class TestSimulate:
    def test_linear_mode_gap(self, tmp_path):
        code = run(["simulate", "--modes", "1", "--mass", "1.3",
                    "--linear", "--tmax", "500", "--cutoff", "8",
                    "--dt", "2e-3", "--store-every", "25",
                    "--output-dir", str(tmp_path)])
        assert code == 0
        doc = json.loads((tmp_path / "summary.json").read_text())
        assert doc["shift_gap"]["1"] <= 1e-8
        assert doc["reality_defect"] <= 1e-9

    def test_cfl_gate_usage_error(self):
        assert run(["simulate", "--modes", "1", "--cutoff", "64",
                    "--dt", "0.02", "--tmax", "1"]) == 2

    def test_outputs_and_sidecar(self, tmp_path):
        run(["simulate", "--modes", "1", "--linear", "--tmax", "10",
             "--cutoff", "8", "--dt", "2e-3", "--store-every", "25",
             "--output-dir", str(tmp_path)])
        data = np.fromfile(tmp_path / "final_state.bin", dtype="<f8")
        assert data.size == 2 * (2 * 8 + 1)
        sidecar = json.loads((tmp_path / "final_state.bin.json").read_text())
        assert sidecar["cutoff"] == 8 and "run_id" in sidecar
        csv_header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert csv_header == "t,energy,action_1,phase_1"

    def test_manifest_roundtrip_bit_identical(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        run(["simulate", "--modes", "1", "--tmax", "5", "--cutoff", "8",
             "--dt", "2e-3", "--store-every", "10", "--output-dir", str(d1)])
        run(["simulate", "--from-manifest", str(d1 / "manifest.json"),
             "--output-dir", str(d2)])
        for name in ("trajectory.csv", "summary.json", "final_state.bin"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_blowup_exit_code(self, tmp_path):
        code = run(["simulate", "--modes", "1", "--nu", "1000", "--cutoff", "8",
                    "--dt", "0.06", "--tmax", "50", "--store-every", "5",
                    "--output-dir", str(tmp_path)])
        assert code == 5
        assert (tmp_path / "last_good.bin").exists()

    def test_missing_modes_usage(self):
        assert run(["simulate", "--tmax", "1"]) == 2


class TestDeterminism:
    def test_rerun_identical(self, tmp_path, capsys):
        args = ["kamcheck", "--modes", "1", "--rho-grid", "4",
                "--hypothesis", "a3"]
        run(args)
        first = capsys.readouterr().out
        run(args)
        second = capsys.readouterr().out
        assert first == second
