import json
import subprocess
import sys
from pathlib import Path

import pytest

from nondiv.config import build_config, parse_problem, serialize_problem
from nondiv.criterion import ConfigError

REPO = Path(__file__).resolve().parent.parent
CONFIGS = REPO / "configs"


def run_cli(*args, **kw):
    return subprocess.run([sys.executable, "-m", "nondiv.cli", *args],
                          capture_output=True, text=True, **kw)


def stripped_report(path):
    data = json.loads(Path(path).read_text())
    data.pop("timing", None)
    return json.dumps(data, sort_keys=True)


class TestParsing:
    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.cfg")))
    def test_round_trip(self, name):
        text = (CONFIGS / name).read_text()
        problem = parse_problem(text, name)
        again = parse_problem(serialize_problem(problem), name)
        assert again == problem
        build_config(problem)

    def test_zero_denominator_cites_field(self):
        text = (CONFIGS / "example1-m2.cfg").read_text()
        bad = text.replace('"1", "-1", "1", "-1"', '"1/0", "-1", "1", "-1"')
        with pytest.raises(ConfigError) as err:
            parse_problem(bad)
        assert "torus-a" in str(err.value) and "1/0" in str(err.value)

    def test_json_error_reports_position(self):
        text = (CONFIGS / "example1-m2.cfg").read_text()
        bad = text.replace('basis = [["1", "-1", "1", "-1"]]',
                           'basis = [["1", "-1", "1", "-1"]')
        with pytest.raises(ConfigError) as err:
            parse_problem(bad)
        assert "line" in str(err.value) and "column" in str(err.value)

    def test_missing_section(self):
        with pytest.raises(ConfigError) as err:
            parse_problem("[group]\nfamily = res-sl\nn = 2\nm = 1\n")
        assert "subgroup-m" in str(err.value)

    def test_dependent_basis_rejected(self):
        text = (CONFIGS / "example1-m2.cfg").read_text()
        bad = text.replace(
            'basis = [["1", "-1", "0", "0"], ["0", "0", "1", "-1"]]',
            'basis = [["1", "-1", "0", "0"], ["2", "-2", "0", "0"]]')
        with pytest.raises(ConfigError) as err:
            build_config(parse_problem(bad))
        assert "torus-d" in str(err.value)

    def test_auto_mode_requires_trivial_m(self):
        text = (CONFIGS / "example2.cfg").read_text()
        bad = text.replace("mode = explicit", "mode = auto-trivial-m")
        with pytest.raises(ConfigError) as err:
            parse_problem(bad)
        assert "auto-trivial-m" in str(err.value)

    def test_non_trace_zero_vector_rejected(self):
        text = (CONFIGS / "example1-m2.cfg").read_text()
        bad = text.replace('[["1", "-1", "1", "-1"]]', '[["1", "0", "1", "-1"]]')
        with pytest.raises(ConfigError) as err:
            build_config(parse_problem(bad))
        assert "trace zero" in str(err.value)


class TestCliCheck:
    def test_example1_m2_exits_10(self, tmp_path):
        out = tmp_path / "r.json"
        res = run_cli("check", str(CONFIGS / "example1-m2.cfg"),
                      "--workers", "1", "--output", str(out))
        assert res.returncode == 10
        data = json.loads(out.read_text())
        assert data["verdict"] == "not-uniformly-nondivergent"
        assert data["certificate"]["subset"] == [1]

    def test_example1_m3_exits_0(self, tmp_path):
        out = tmp_path / "r.json"
        res = run_cli("check", str(CONFIGS / "example1-m3.cfg"),
                      "--workers", "1", "--output", str(out))
        assert res.returncode == 0
        data = json.loads(out.read_text())
        assert data["certificate"] is None and data["stats"] is not None

    def test_zero_denominator_exits_2(self, tmp_path):
        text = (CONFIGS / "example1-m2.cfg").read_text()
        bad = tmp_path / "bad.cfg"
        bad.write_text(text.replace('"1", "-1", "1", "-1"',
                                    '"1/0", "-1", "1", "-1"'))
        res = run_cli("check", str(bad))
        assert res.returncode == 2
        assert "torus-a" in res.stderr

    def test_missing_file_exits_2(self):
        res = run_cli("check", "no-such-file.cfg")
        assert res.returncode == 2

    def test_certificate_fields_are_exact_strings(self, tmp_path):
        out = tmp_path / "r.json"
        run_cli("check", str(CONFIGS / "example1-m2.cfg"), "--workers", "1",
                "--output", str(out))
        cert = json.loads(out.read_text())["certificate"]

        def no_floats(node):
            if isinstance(node, float):
                return False
            if isinstance(node, dict):
                return all(no_floats(v) for v in node.values())
            if isinstance(node, list):
                return all(no_floats(v) for v in node)
            return True

        assert no_floats(cert)


class TestCliCertify:
    def test_certificate_audit_passes(self, tmp_path):
        out = tmp_path / "r.json"
        res = run_cli("certify", str(CONFIGS / "example1-m2.cfg"),
                      "--workers", "1", "--output", str(out))
        assert res.returncode == 10
        data = json.loads(out.read_text())
        assert data["witness"]["checks"]["certificate_replay"] is True
        assert data["witness"]["sigma0"] == [1]
        assert data["witness"]["v"] == ["1", "-1", "-1", "1"]

    def test_nondivergent_certify_exits_0(self, tmp_path):
        out = tmp_path / "r.json"
        res = run_cli("certify", str(CONFIGS / "example2.cfg"),
                      "--workers", "2", "--output", str(out))
        assert res.returncode == 0
        data = json.loads(out.read_text())
        assert data["certificate"] is None
        assert data["stats"]["pairs_admissible"] == 288


class TestCliProbe:
    def test_probe_table_decreasing(self, tmp_path):
        out = tmp_path / "r.json"
        res = run_cli("probe", str(CONFIGS / "example1-m2.cfg"),
                      "--workers", "1", "--output", str(out))
        assert res.returncode == 10
        data = json.loads(out.read_text())
        rows = data["probe"]["rows"]
        assert [r["N"] for r in rows] == [0, 2, 4, 6]
        maxima = [r["max"] for r in rows]
        assert all(a > b for a, b in zip(maxima, maxima[1:]))
        assert data["decay"] is not None

    def test_seed_override_reproduces_table(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        run_cli("probe", str(CONFIGS / "example1-m2.cfg"), "--workers", "1",
                "--seed", "0x5EED", "--output", str(out1))
        run_cli("probe", str(CONFIGS / "example1-m2.cfg"), "--workers", "1",
                "--seed", "0x5EED", "--output", str(out2))
        assert stripped_report(out1) == stripped_report(out2)

    def test_probe_on_nondivergent_exits_4(self, tmp_path):
        text = (CONFIGS / "example1-m2.cfg").read_text()
        # A = full Cartan torus is uniformly nondivergent; keep the probe section.
        nondiv = text.replace(
            '[torus-a]\nbasis = [["1", "-1", "1", "-1"]]',
            '[torus-a]\nbasis = [["1", "-1", "0", "0"], ["0", "0", "1", "-1"]]')
        cfg = tmp_path / "nondiv.cfg"
        cfg.write_text(nondiv)
        res = run_cli("probe", str(cfg), "--workers", "1")
        assert res.returncode == 4
        assert "nondivergent" in res.stderr

    def test_missing_probe_section_exits_2(self):
        res = run_cli("probe", str(CONFIGS / "example1-m3.cfg"))
        assert res.returncode == 2
        assert "probe" in res.stderr


class TestCliReplay:
    def test_replay_ok(self, tmp_path):
        out = tmp_path / "r.json"
        run_cli("check", str(CONFIGS / "example1-m2.cfg"), "--workers", "1",
                "--output", str(out))
        res = run_cli("replay", str(out))
        assert res.returncode == 0
        assert json.loads(res.stdout)["replay"] == "ok"

    def test_tampered_certificate_exits_3(self, tmp_path):
        out = tmp_path / "r.json"
        run_cli("check", str(CONFIGS / "example1-m2.cfg"), "--workers", "1",
                "--output", str(out))
        data = json.loads(out.read_text())
        data["certificate"]["dependence"] = ["3"]
        tampered = tmp_path / "t.json"
        tampered.write_text(json.dumps(data))
        res = run_cli("replay", str(tampered))
        assert res.returncode == 3

    def test_tampered_content_exits_3(self, tmp_path):
        out = tmp_path / "r.json"
        run_cli("check", str(CONFIGS / "example1-m2.cfg"), "--workers", "1",
                "--output", str(out))
        data = json.loads(out.read_text())
        data["input"]["content"] = data["input"]["content"].replace("m = 2", "m = 3")
        tampered = tmp_path / "t.json"
        tampered.write_text(json.dumps(data))
        res = run_cli("replay", str(tampered))
        assert res.returncode == 3
        assert "digest" in res.stderr


class TestExitCodeStability:
    def test_workers_do_not_change_exit_or_report(self, tmp_path):
        reports = []
        for workers in ("1", "2"):
            out = tmp_path / f"r{workers}.json"
            res = run_cli("check", str(CONFIGS / "example1-m2.cfg"),
                          "--workers", workers, "--output", str(out))
            assert res.returncode == 10
            reports.append(stripped_report(out))
        assert reports[0] == reports[1]
