import pytest

from qubitengine.cli import main
from qubitengine.config import config_hash, parse_config


def run(tmp_path, text, command, *extra):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    out = tmp_path / "out"
    return main([command, "--config", str(cfg), "--out", str(out), *extra]), out


def meta(path):
    lines = path.read_text().splitlines()
    block = [ln[2:] for ln in lines if ln.startswith("# ")]
    assert lines[-len(block):] == ["# " + b for b in block]
    assert block == sorted(block)
    return dict(b.split("=", 1) for b in block)


OTTO = "kind = local-otto\ntau_cyc = 20\n"


def test_cycle(tmp_path):
    rc, out = run(tmp_path, OTTO, "cycle")
    assert rc == 0
    m = meta(out / "ledger.csv")
    assert m["config_hash"] == config_hash(parse_config(OTTO))
    assert m["mode"] == "engine" and m["eta"].startswith("0.25")
    first = (out / "trajectory.csv").read_text().splitlines()[0]
    assert first.startswith("t,stroke,H,L,C")


def test_cycle_is_deterministic(tmp_path):
    run(tmp_path, OTTO, "cycle")
    a = (tmp_path / "out" / "ledger.csv").read_text()
    run(tmp_path, OTTO, "cycle")
    assert (tmp_path / "out" / "ledger.csv").read_text() == a


def test_twelve_significant_digits(tmp_path):
    rc, out = run(tmp_path, OTTO, "cycle")
    row = (out / "ledger.csv").read_text().splitlines()[1].split(",")
    digits = row[3].replace(".", "").replace("-", "").lstrip("0")
    assert len(digits) <= 12


def test_sweep_workers_agree(tmp_path):
    text = OTTO + "sweep_values = 10, 20, 0.5\n"
    rc, out = run(tmp_path, text, "sweep", "--workers", "1")
    assert rc == 0
    one = (out / "sweep.csv").read_text()
    run(tmp_path, text, "sweep", "--workers", "2")
    assert (out / "sweep.csv").read_text() == one
    assert "failed" in one and meta(out / "sweep.csv")["failed"] == "1"


@pytest.mark.parametrize("text,rc", [
    ("protocol = feat\nomega_i = 8\nomega_f = 4\nepsilon = 1\n", 0),
    ("protocol = const_mu\nOmega_i = 8\nOmega_f = 6\nphi_f = pi/2\ntau = 4\n", 0),
    ("protocol = ste\nOmega_i = 12\nOmega_f = 8\nT = 10\ntau = 1\n", 4),
    ("protocol = bogus\n", 2),
    ("protocol = const_mu\nOmega_i = 8\n", 2),
])
def test_protocol(tmp_path, text, rc):
    code, out = run(tmp_path, text, "protocol")
    assert code == rc
    if rc == 0:
        assert "config_hash" in meta(out / "schedule.csv")


def test_dephase(tmp_path):
    text = "kind = global-otto\ntau_cyc = 30\ntau_unit = omega_min\nk_d_values = 0, 0.1\n"
    rc, out = run(tmp_path, text, "dephase", "--workers", "1")
    assert rc == 0
    rows = (out / "dephase.csv").read_text().splitlines()
    assert rows[0] == "tau_cyc,k_d,eta,P,mode" and len([r for r in rows if not r.startswith("#")]) == 3


def test_exit_codes(tmp_path):
    assert run(tmp_path, "kind = local-otto\nbogus = 1\n", "cycle")[0] == 2
    assert run(tmp_path, OTTO, "sweep")[0] == 2
    assert main(["cycle", "--config", str(tmp_path / "missing.cfg")]) == 5
    assert main(["cycle"]) == 2
    assert main(["nonsense"]) == 2


def test_formulas(capsys):
    assert main(["formulas", "eta_curzon_ahlborn", "T_h=10", "T_c=5"]) == 0
    assert capsys.readouterr().out.strip() == "0.292893218813"
    assert main(["formulas", "--list"]) == 0
    assert "eta_carnot" in capsys.readouterr().out
    assert main(["formulas", "nope"]) == 2
    assert main(["formulas", "eta_carnot", "T_h"]) == 2
