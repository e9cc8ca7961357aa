import csv
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from gaborstab.cli import expand_sweep, load_config, main
from gaborstab.suites import SUITES, run_suite

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_version_and_help(capsys):
    assert main(["--version"]) == 0
    assert "gaborstab" in capsys.readouterr().out


def test_bad_arguments_exit_2():
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["admissible", "expexp", "x", "3"]) == 2
    assert main(["verify", "sinh", "--jobs", "0"]) == 2


@pytest.mark.parametrize("args,code", [
    (["onesided", "3", "1"], 0),
    (["onesided", "1.5", "1"], 1),
    (["expexp", "19", "3"], 1),
    (["expexp", "3", "21"], 0),
    (["gaussian", "3", "3"], 2),
    (["expexp", "-1", "3"], 2),
])
def test_admissible_exit_codes(tmp_path, args, code):
    assert main(["admissible", *args, "--out", str(tmp_path)]) == code
    if code != 2:
        rep = json.loads((tmp_path / "admissibility.json").read_text())
        assert rep["admissible"] is (code == 0)
        assert "integral_estimate" in rep and "tail_slope" in rep
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert "admissibility.json" in manifest["files"]


def test_spectrogram_expexp_origin(tmp_path):
    assert main(["spectrogram", "--config", str(CONFIGS / "spectrogram_expexp.ini"),
                 "--out", str(tmp_path), "--svg"]) == 0
    rows = read_csv(tmp_path / "spectrogram_expexp_self.csv")
    assert list(rows[0]) == ["x", "xi", "abs_stft"]
    best = min(rows, key=lambda r: float(r["x"]) ** 2 + float(r["xi"]) ** 2)
    assert float(best["abs_stft"]) == pytest.approx(0.25, rel=1e-3)
    assert (tmp_path / "spectrogram_expexp_self.svg").read_text().startswith("<svg")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert set(manifest["files"]) == {p.name for p in tmp_path.iterdir()} - {"manifest.json"}


def test_spectrogram_zero_signal(tmp_path):
    assert main(["spectrogram", "--config", str(CONFIGS / "spectrogram_zero.ini"), "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "spectrogram_zero.csv")
    assert rows and all(float(r["abs_stft"]) == 0.0 for r in rows)


def test_malformed_config_names_key(tmp_path, capsys):
    cfg = write(tmp_path, "bad.ini", "[case]\nwindow.kind = expexp\ngrid.x_min = -1\ngrid.x_max = oops\n"
                "grid.nx = 9\ngrid.xi_min = -1\ngrid.xi_max = 1\ngrid.nxi = 9\n")
    assert main(["spectrogram", "--config", cfg]) == 2
    err = capsys.readouterr().err
    assert "grid.x_max" in err and "bad.ini:4" in err and "[case]" in err


def test_missing_key_and_file(tmp_path, capsys):
    cfg = write(tmp_path, "miss.ini", "[case]\nwindow.kind = onesided\n")
    assert main(["stability", "--config", cfg]) == 2
    assert "[case]" in capsys.readouterr().err
    assert main(["stability", "--config", str(tmp_path / "nope.ini")]) == 2


def test_non_admissible_stability_case_is_config_error(tmp_path, capsys):
    cfg = write(tmp_path, "na.ini", "[case]\nwindow.kind = expexp\ngamma.a = 3\ngamma.b = 3\n"
                "grid.x_min=-8\ngrid.x_max=8\ngrid.nx=33\ngrid.xi_min=-2\ngrid.xi_max=2\ngrid.nxi=17\n"
                "recipe.name = identity\n")
    assert main(["stability", "--config", cfg]) == 2
    assert "negative control" in capsys.readouterr().err


def test_sweep_expansion(tmp_path):
    cfg = write(tmp_path, "s.ini", "[c]\nrecipe.params = eps=0.1|0.2, seed=3, s=2|4\n")
    sec = load_config(cfg)[0]
    params = sec.get_params("recipe.params")
    assert params["eps"] == [0.1, 0.2] and params["seed"] == 3
    combos = expand_sweep(params)
    assert len(combos) == 4 and {(c["eps"], c["s"]) for c in combos} == {(0.1, 2), (0.1, 4), (0.2, 2), (0.2, 4)}


def test_poincare_oracle_config(tmp_path):
    assert main(["poincare", "--config", str(CONFIGS / "poincare_oracles.ini"), "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "poincare.csv")
    assert list(rows[0])[:5] == ["case_id", "level", "n0", "n1", "c_p"]
    last = {}
    for r in rows:
        last[r["case_id"]] = r
        assert r["cheeger_ok"] == "1"
    assert float(last["uniform-1d"]["c_p"]) == pytest.approx(1 / math.pi ** 2, rel=1e-2)
    uni = [float(r["c_p"]) for r in rows if r["case_id"] == "uniform-1d"]
    errs = [abs(c - 1 / math.pi ** 2) for c in uni]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert float(last["gaussian-1d"]["c_p"]) == pytest.approx(1.0, rel=2e-2)
    assert float(last["twobump-s8"]["cheeger_h"]) < 0.05


def _stability(tmp_path, cfg, *extra):
    return main(["stability", "--config", str(cfg), "--out", str(tmp_path), *extra])


def test_stability_small_config(tmp_path):
    assert _stability(tmp_path, CONFIGS / "stability_small.ini") == 0
    rows = read_csv(tmp_path / "stability.csv")
    assert list(rows[0]) == ["case_id", "lhs", "d_val", "c_p", "ratio", "raw_ratio", "alarm"]
    by = {r["case_id"]: r for r in rows}
    assert float(by["identity"]["ratio"]) == 0.0
    assert float(by["split[s=4]"]["c_p"]) > float(by["split[s=2]"]["c_p"])
    noise = [float(by[k]["ratio"]) for k in ("noise[eps=0.01]", "noise[eps=0.1]")]
    assert all(0 < r < 10 for r in noise)
    assert rows[-1]["case_id"] == "summary"


def test_stability_tolerance_failure(tmp_path):
    cfg = write(tmp_path, "t.ini", (CONFIGS / "stability_small.ini").read_text()
                .replace("[DEFAULT]", "[DEFAULT]\ntol.max_ratio = 0.5"))
    assert _stability(tmp_path / "out", cfg) == 1


def test_stability_is_byte_identical(tmp_path):
    cfg = CONFIGS / "stability_small.ini"
    assert _stability(tmp_path / "a", cfg) == 0
    assert _stability(tmp_path / "b", cfg, "--jobs", "3") == 0
    for name in ("stability.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert not [p for p in (tmp_path / "a").iterdir() if p.name.endswith(".tmp")]


@pytest.mark.parametrize("suite", ["sinh", "logconcave", "hilbert2", "tsw", "convequiv"])
def test_verify_passing_suites(tmp_path, suite):
    assert main(["verify", suite, "--out", str(tmp_path)]) == 0
    root = ET.parse(tmp_path / f"verify_{suite}.xml").getroot()
    assert root.tag == "testsuite" and root.get("failures") == "0"


def test_verify_broken_tolerance(tmp_path):
    assert main(["verify", "planchshift", "--tol-scale", "0", "--out", str(tmp_path)]) == 1
    root = ET.parse(tmp_path / "verify_planchshift.xml").getroot()
    assert int(root.get("failures")) > 0


def test_verify_unknown_suite():
    assert main(["verify", "nonsense"]) == 2


def test_suites_registry():
    assert set(SUITES) == {"hilbert2", "planchshift", "slpr", "tsw", "logconcave", "sinh",
                           "convequiv", "modified-poincare"}
    res = run_suite("modified-poincare")
    assert all(r.passed for r in res)
    with pytest.raises(KeyError):
        run_suite("nope")
