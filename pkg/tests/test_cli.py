import json

import pytest

from permlab.cli import dispatch


@pytest.fixture
def id3(tmp_path):
    path = tmp_path / "id3.txt"
    path.write_text("3\n1 0 0\n0 1 0\n0 0 1\n")
    return str(path)


@pytest.fixture
def m2(tmp_path):
    path = tmp_path / "m2.txt"
    path.write_text("2\n1 1\n1 1\n")
    return str(path)


@pytest.fixture
def cache(tmp_path):
    return str(tmp_path / "advice-cache")


def run_cli(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestPerm:
    def test_identity(self, capsys, id3):
        code, out = run_cli(capsys, "perm", "--matrix", id3)
        assert code == 0
        assert json.loads(out)["permanent"] == "1"

    def test_json_matrix_input(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text('{"entries": [[1, 1], [1, 1]]}')
        code, out = run_cli(capsys, "perm", "--matrix", str(path))
        assert code == 0
        assert json.loads(out)["permanent"] == "2"

    def test_engines_agree(self, capsys, m2):
        code, out = run_cli(capsys, "perm", "--matrix", m2, "--engine", "both")
        report = json.loads(out)
        assert code == 0
        assert report["agree"] is True

    def test_csv_format(self, capsys, id3):
        code, out = run_cli(capsys, "perm", "--matrix", id3, "--format", "csv")
        assert code == 0
        assert "permanent,1" in out.splitlines()

    def test_malformed_matrix_exits_2(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2\n1 2 3\n")
        code, _ = run_cli(capsys, "perm", "--matrix", str(path))
        assert code == 2

    def test_missing_file_exits_2(self, capsys):
        code, _ = run_cli(capsys, "perm", "--matrix", "no-such-file")
        assert code == 2


class TestGadgetCheck:
    def test_identities_hold(self, capsys, m2):
        code, out = run_cli(capsys, "gadget-check", "--matrix", m2)
        report = json.loads(out)
        assert code == 0
        assert report["sign_flip_ok"] and report["minor_ok"] and report["cancel_ok"]
        assert report["per_w"] == "0"

    def test_rejects_non_sign_entries(self, capsys, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("1\n4\n")
        code, _ = run_cli(capsys, "gadget-check", "--matrix", str(path))
        assert code == 2


class TestAdvice:
    def test_generates_file(self, capsys, tmp_path):
        out_path = tmp_path / "k2.txt"
        code, out = run_cli(capsys, "advice-gen", "--k", "2", "--out", str(out_path))
        assert code == 0
        report = json.loads(out)
        assert report["count"] == "5"
        assert out_path.read_text().startswith("k 2 count 5")


class TestRecover:
    def test_matches_perm(self, capsys, m2, cache):
        code, out = run_cli(capsys, "recover", "--matrix", m2, "--advice-dir", cache)
        assert code == 0
        assert json.loads(out)["permanent"] == "2"

    def test_noisy_oracle(self, capsys, m2, cache):
        code, out = run_cli(capsys, "recover", "--matrix", m2,
                            "--oracle", "noisy:1.05", "--seed", "7",
                            "--advice-dir", cache)
        assert code == 0
        report = json.loads(out)
        assert report["permanent"] == "2"
        assert int(report["queries"]) >= 1

    def test_unknown_oracle_exits_2(self, capsys, m2, cache):
        code, _ = run_cli(capsys, "recover", "--matrix", m2,
                          "--oracle", "psychic", "--advice-dir", cache)
        assert code == 2


class TestBoson:
    @pytest.fixture
    def network(self, capsys, m2, tmp_path):
        path = tmp_path / "net.json"
        code, _ = run_cli(capsys, "embed", "--matrix", m2, "--out", str(path))
        assert code == 0
        return str(path)

    def test_embed_reports_match(self, capsys, m2):
        code, out = run_cli(capsys, "embed", "--matrix", m2)
        report = json.loads(out)
        assert code == 0
        assert float(report["deviation"]) < 1e-9
        assert float(report["orthonormality_residual"]) < 1e-9

    def test_dist_csv(self, capsys, network):
        code, out = run_cli(capsys, "boson-dist", "--network", network, "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "state,prob"
        probs = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
        assert abs(sum(probs) - 1.0) < 1e-9

    def test_sample_reproducible(self, capsys, network):
        code1, out1 = run_cli(capsys, "boson-sample", "--network", network,
                              "--count", "20", "--seed", "5")
        code2, out2 = run_cli(capsys, "boson-sample", "--network", network,
                              "--count", "20", "--seed", "5")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_sample_lines(self, capsys, network):
        code, out = run_cli(capsys, "boson-sample", "--network", network,
                            "--count", "8", "--seed", "5", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 8
        assert all(len(line.split()) == 4 for line in lines)

    def test_dist_figure(self, capsys, network, tmp_path):
        fig = tmp_path / "dist.png"
        code, _ = run_cli(capsys, "boson-dist", "--network", network,
                          "--figure", str(fig))
        assert code == 0
        assert fig.exists() and fig.stat().st_size > 0


class TestQuantumCommands:
    def test_simon(self, capsys):
        code, out = run_cli(capsys, "simon", "--n", "4", "--kind", "simon", "--seed", "9")
        report = json.loads(out)
        assert code == 0
        assert report["correct"] is True
        assert report["decision"] == "simon"

    def test_simon_injective(self, capsys):
        code, out = run_cli(capsys, "simon", "--n", "4", "--kind", "injective", "--seed", "9")
        assert code == 0
        assert json.loads(out)["decision"] == "injective"

    def test_swap_test(self, capsys, tmp_path):
        fig = tmp_path / "swap.png"
        code, out = run_cli(capsys, "swap-test", "--pairs", "10", "--seed", "3",
                            "--figure", str(fig))
        report = json.loads(out)
        assert code == 0
        assert float(report["max_deviation"]) <= 1e-9
        assert float(report["accept_zero_vs_plus"]) == pytest.approx(0.75)
        assert fig.exists()

    def test_simquery_deterministic(self, capsys):
        code, out = run_cli(capsys, "simquery")
        assert code == 0
        assert json.loads(out)["all_ok"] is True

    def test_simquery_noisy(self, capsys):
        code, out = run_cli(capsys, "simquery", "--noisy")
        assert code == 0
        assert float(json.loads(out)["flip_probability"]) >= 0.98


class TestAdversaryCommand:
    def test_csv_fields(self, capsys):
        code, out = run_cli(capsys, "adversary", "--n", "8", "--queries", "10",
                            "--trials", "2000", "--seed", "4", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "exact,empirical,stderr"
        exact, empirical, stderr = lines[1].split(",")
        assert exact == "3/70"
        assert 0.0 <= float(empirical) <= 1.0
        assert float(stderr) > 0

    def test_reproducible(self, capsys):
        args = ("adversary", "--n", "6", "--queries", "4", "--trials", "500",
                "--seed", "2")
        _, out1 = run_cli(capsys, *args)
        _, out2 = run_cli(capsys, *args)
        assert out1 == out2

    def test_figure(self, capsys, tmp_path):
        fig = tmp_path / "collisions.png"
        code, _ = run_cli(capsys, "adversary", "--n", "6", "--queries", "4",
                          "--trials", "200", "--seed", "2", "--figure", str(fig))
        assert code == 0
        assert fig.exists() and fig.stat().st_size > 0


class TestVerifyAll:
    def test_single_fast_criterion(self, capsys):
        code, out = run_cli(capsys, "verify-all", "--only", "5")
        assert code == 0
        assert out.startswith("PASS criterion 5")

    def test_unknown_scale_exits_2(self, capsys):
        code, _ = run_cli(capsys, "verify-all", "--scale", "planetary")
        assert code == 2
