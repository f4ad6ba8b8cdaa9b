import json
import subprocess
import sys

from qlgft import checks, cli


def run(*argv):
    return cli.run([str(a) for a in argv])


def test_validate_example_lattice(data_dir):
    text, status = run("validate", "--lattice", data_dir / "bowtie.lat", "--tangle", data_dir / "bowtie.tangle")
    assert status == 0
    assert "edges: 6" in text


def test_empty_vertex_line_is_reported_with_location(tmp_path):
    bad = tmp_path / "bad.lat"
    bad.write_text("vertex v: a -a\nvertex w:\n")
    text, status = run("validate", "--lattice", bad)
    assert status == 2
    assert "line 2" in text


def test_tangle_with_unknown_edge_is_rejected(tmp_path, data_dir):
    tangle = tmp_path / "t.tangle"
    tangle.write_text("component L closed : zz\n")
    text, status = run("wilson", "--lattice", data_dir / "annulus.lat", "--tangle", tangle)
    assert status == 2 and "zz" in text


def test_missing_file_is_an_input_error(tmp_path):
    _, status = run("envelope", "--lattice", tmp_path / "nope.lat")
    assert status == 2


def test_wilson_annulus_core(data_dir):
    text, status = run("wilson", "--lattice", data_dir / "annulus_flipped.lat", "--tangle", data_dir / "core.tangle")
    assert status == 0
    assert text.splitlines()[-1] == "value: t^-2 + t^2"
    text, _ = run("wilson", "--lattice", data_dir / "annulus.lat", "--tangle", data_dir / "core.tangle")
    assert text.splitlines()[-1] == "value: 2"


def test_wilson_with_connection_file(data_dir):
    text, status = run("wilson", "--lattice", data_dir / "annulus.lat", "--tangle", data_dir / "core.tangle",
                       "--connection", data_dir / "annulus_uq.conn")
    assert status == 0 and text.splitlines()[-1] == "value: t^-2 + t^2"


def test_connection_naming_unknown_edge(tmp_path, data_dir):
    conn = tmp_path / "c.conn"
    conn.write_text("edge q = K\n")
    _, status = run("wilson", "--lattice", data_dir / "annulus.lat", "--tangle", data_dir / "core.tangle", "--connection", conn)
    assert status == 2


def test_holonomy_prints_word_and_value(data_dir):
    text, status = run("holonomy", "--lattice", data_dir / "bowtie.lat", "--tangle", data_dir / "bowtie.tangle")
    assert status == 0
    assert "canonical L: t1 X' k t2 X'' k s2 s1 Y" in text
    assert "value: " in text


def test_group_mode_holonomy(data_dir):
    text, status = run("holonomy", "--lattice", data_dir / "bowtie.lat", "--tangle", data_dir / "bowtie.tangle",
                       "--backend", "group", "--group", "S3", "--connection", data_dir / "bowtie_s3.conn")
    assert status == 0
    assert "holonomy: 1*" in text


def test_verify_ch():
    text, status = run("verify", "ch", "--samples", 100)
    assert status == 0 and "FAIL" not in text


def test_verify_zeta_on_punctured_torus():
    text, status = run("verify", "zeta", "--surface", "punctured-torus", "--samples", 20)
    assert status == 0
    assert text.count("PASS punctured-torus") == 20


def test_group_table_file(data_dir):
    text, status = run("verify", "axioms", "--backend", "group", "--group", data_dir / "z3.group")
    assert status == 0 and "k[Z3]" in text


def test_skein_commands(data_dir):
    text, status = run("skein", "product", "--lattice", data_dir / "punctured_torus.lat",
                       "--tangle", data_dir / "torus_a.tangle", "--tangle", data_dir / "torus_b.tangle")
    assert status == 0 and "product: " in text
    text, status = run("skein", "reduce", "--lattice", data_dir / "disk.lat", "--tangle", data_dir / "trefoil.tangle")
    assert status == 0 and "reduced trefoil.tangle: (" in text


def test_failed_check_sets_exit_status(monkeypatch):
    def failing(samples, seed):
        rep = checks.Report("rigged")
        rep.add("always wrong", False, "witness")
        return rep

    monkeypatch.setattr(checks, "ch_report", failing)
    text, status = run("verify", "ch")
    assert status == 1 and "FAIL always wrong: witness" in text


def test_json_carries_the_same_checks():
    text, _ = run("verify", "constants")
    doc = json.loads(run("verify", "constants", "--json")[0])
    assert doc["ok"] is True and doc["seed"] == 0
    for c in doc["reports"][0]["checks"]:
        assert f"PASS {c['name']}" in text


def test_seed_is_named_in_header():
    text, _ = run("verify", "ch", "--samples", 3, "--seed", 7)
    assert text.startswith("# qlgft verify ch seed=7\n")


def test_same_seed_same_bytes():
    a = run("verify", "zeta", "--samples", 4, "--seed", 3)
    b = run("verify", "zeta", "--samples", 4, "--seed", 3)
    assert a == b


def test_console_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "qlgft.cli", "envelope", "--lattice", str(data_dir / "punctured_torus.lat")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "genus: 1" in proc.stdout
