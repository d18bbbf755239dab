import json

import numpy as np
import pytest

from compnet.cli import main


def _diamond_file(tmp_path):
    spec = {
        "nodes": ["t1", "t2", "r1", "r2", "d"],
        "edges": [
            {"from": "t1", "to": "r1", "gain": 1.0},
            {"from": "t1", "to": "r2", "gain": 1.0},
            {"from": "t2", "to": "r1", "gain": 1.0},
            {"from": "t2", "to": "r2", "gain": 1.0},
            {"from": "r1", "to": "d", "gain": 1.0},
            {"from": "r2", "to": "d", "gain": 1.0},
        ],
        "senders": ["t1", "t2"],
        "receiver": "d",
    }
    path = tmp_path / "diamond.json"
    path.write_text(json.dumps(spec))
    return str(path)


def _read_csv(path):
    meta, rows = [], []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            meta.append(line[1:].strip())
        elif line:
            rows.append(line.split(","))
    return meta, rows[0], rows[1:]


# ---------------------------------------------------------------------------
# rates family
# ---------------------------------------------------------------------------


def test_rates_mac_sum_table(tmp_path):
    out = tmp_path / "mac.csv"
    assert main(["rates", "mac-sum", "--power-db", "15", "--k-max", "30",
                 "--out", str(out)]) == 0
    meta, header, rows = _read_csv(out)
    assert header == ["K", "computation", "separation", "cutset"]
    assert len(rows) == 29
    first = [float(x) for x in rows[0]]
    assert first[0] == 2
    assert abs(first[1] - 1.6685) < 1e-3
    assert abs(first[2] - 1.7486) < 1e-3
    assert abs(first[3] - 2.3314) < 1e-3
    # computation never exceeds the cut-set column
    for row in rows:
        assert float(row[1]) <= float(row[3]) + 1e-12


def test_rates_dsbs_grid(tmp_path):
    out = tmp_path / "dsbs.csv"
    assert main(["rates", "dsbs-orthogonal", "--power-db", "15",
                 "--alpha-grid", "0:0.5:0.025", "--out", str(out)]) == 0
    _, header, rows = _read_csv(out)
    assert header == ["alpha", "hybrid", "separation", "linear", "cutset"]
    target = [r for r in rows if abs(float(r[0]) - 0.25) < 1e-9]
    assert len(target) == 1
    assert abs(float(target[0][3]) - 1.6102) < 1e-3


def test_rates_superposition_single_point(tmp_path):
    out = tmp_path / "sup.csv"
    assert main(["rates", "superposition", "--power-db", "15", "--h2", "2",
                 "--out", str(out)]) == 0
    _, header, rows = _read_csv(out)
    assert header == ["h2", "superposition", "equal_layer", "cutset"]
    assert len(rows) == 1
    assert abs(float(rows[0][1]) - 1.8866) < 1e-3


def test_rates_fading_requires_seed_and_writes_bound(tmp_path):
    out = tmp_path / "fad.csv"
    assert main(["rates", "fading", "--k-users", "2", "--power-db", "0,15",
                 "--trials", "2000", "--seed", "3", "--out", str(out)]) == 0
    _, header, rows = _read_csv(out)
    assert header == ["power_db", "rate", "stderr", "gap_bound"]
    assert len(rows) == 2
    assert abs(float(rows[0][3]) - 4.2951) < 1e-3


# ---------------------------------------------------------------------------
# net family
# ---------------------------------------------------------------------------


def test_net_mincut_reports_rates(tmp_path):
    out = tmp_path / "cut.csv"
    assert main(["net", "mincut", "--net-file", _diamond_file(tmp_path),
                 "--mode", "mac", "--power-db", "15", "--out", str(out)]) == 0
    meta, header, rows = _read_csv(out)
    assert header == ["sigma", "cut"]
    assert len(rows) == 3  # {t1}, {t2}, {t1,t2}
    joined = "\n".join(meta)
    assert "achievable=1.668508232" in joined
    assert "cutset=2.331417" in joined


def test_net_mincut_capacity_mode(tmp_path):
    out = tmp_path / "cap.csv"
    assert main(["net", "mincut", "--net-file", _diamond_file(tmp_path),
                 "--mode", "capacity", "--sigma", "t1", "--out", str(out)]) == 0
    _, _, rows = _read_csv(out)
    assert rows == [["t1", "2"]]


def test_net_transform_test_builtin_diamond(capsys):
    code = main(["net", "transform-test", "--lift", "diamond", "--q", "17",
                 "--n", "2", "--tau", "2", "--seeds", "40", "--seed", "9"])
    assert code == 0
    text = capsys.readouterr().out
    values = dict(line.split("=") for line in text.strip().splitlines())
    assert values["identity_failures"] == "0"
    assert int(values["full_rank"]) > 0
    assert values["q"] == "17" and values["tau"] == "2"


def test_net_transform_test_needs_a_network(capsys):
    assert main(["net", "transform-test", "--q", "17", "--n", "1", "--tau", "1",
                 "--seeds", "5", "--seed", "1"]) == 2


# ---------------------------------------------------------------------------
# sim family
# ---------------------------------------------------------------------------


def test_sim_end_to_end_columns_and_determinism(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    argv = ["sim", "end-to-end", "--p", "2", "--k-users", "3", "--q", "7",
            "--block-k", "8", "--margin", "0.15,2.0", "--trials", "60",
            "--seed", "12"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    meta, header, rows = _read_csv(first)
    assert header == ["margin", "rate", "error_rate", "trials", "seed"]
    assert len(rows) == 2
    # generous margin drives the empirical error to zero
    assert float(rows[1][2]) == 0.0
    assert any(m.startswith("q=7") for m in meta)


def test_sim_end_to_end_over_builtin_diamond(tmp_path):
    ideal = tmp_path / "ideal.csv"
    net = tmp_path / "net.csv"
    base = ["sim", "end-to-end", "--p", "2", "--k-users", "2", "--q", "17",
            "--block-k", "8", "--margin", "0.15", "--trials", "80", "--seed", "5"]
    assert main(base + ["--out", str(ideal)]) == 0
    assert main(base + ["--lift", "diamond", "--tau", "2", "--n", "2",
                        "--out", str(net)]) == 0
    _, _, ideal_rows = _read_csv(ideal)
    _, _, net_rows = _read_csv(net)
    # identical payload seeds, identical decoding, identical error column
    assert ideal_rows[0][2] == net_rows[0][2]


def test_sim_type_function_run(tmp_path):
    out = tmp_path / "type.csv"
    assert main(["sim", "end-to-end", "--p", "2", "--k-users", "3",
                 "--func", "type", "--block-k", "6", "--margin", "0.3",
                 "--trials", "40", "--seed", "6", "--out", str(out)]) == 0
    meta, _, rows = _read_csv(out)
    assert any(m.startswith("q=5") for m in meta)
    assert float(rows[0][2]) <= 0.5


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["sim", "end-to-end", "--trials", "0", "--seed", "1"]) == 2
    assert main(["net", "mincut", "--net-file", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["rates", "fading", "--k-users", "2", "--trials", "10",
                 "--seed", "1"]) == 2  # too few trials for a stable average
    assert main(["sim", "end-to-end", "--q", "6", "--seed", "1"]) == 2


def test_guard_violations_exit_3(capsys):
    assert main(["sim", "end-to-end", "--p", "2", "--k-users", "3", "--q", "7",
                 "--block-k", "30", "--margin", "-0.9", "--trials", "5",
                 "--seed", "2"]) == 3


def test_missing_seed_is_a_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["sim", "end-to-end", "--trials", "5"])
    assert err.value.code == 2
