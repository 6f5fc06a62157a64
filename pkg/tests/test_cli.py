from click.testing import CliRunner

from reactive_contracts.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_calc_prefix():
    r = run("calc", "corpus:examples", "Prefix")
    assert r.exit_code == 0
    assert "tt=⟨⟩ ref'⊆{b}" in r.output
    assert r.output.rstrip().endswith("truncation: 0")


def test_calc_divergent_indexed_assignment_is_chaos():
    r = run("calc", "corpus:examples", "DivergentIndex")
    assert r.exit_code == 0
    assert "peri:\n  false\npost:\n  false" in r.output


def test_calc_reports_stabilisation():
    r = run("calc", "corpus:examples", "Loop")
    assert "stabilised at: 3" in r.output


def test_calc_dump_format():
    r = run("calc", "corpus:examples", "Prefix", "--format", "dump")
    lines = r.output.splitlines()
    assert lines[0] == "#pre\tst\ttt"
    assert lines[-1] == "#truncation\t0"


def test_bound_override():
    r = run("calc", "corpus:examples", "Loop", "--bound-override", "3")
    assert "stabilised at: 4" in r.output


def test_refine_exit_codes():
    assert run("refine", "corpus:examples", "CDF", "Prefix").exit_code == 0
    r = run("refine", "corpus:examples", "CDF", "Dead", "--max-counterexamples", "1")
    assert r.exit_code == 1
    assert "peri: fails" in r.output and "ref'={a,b}" in r.output


def test_refine_mondex_conservation():
    r = run("refine", "corpus:mondex", "Conservation", "Pay(0,1,1)")
    assert r.exit_code == 0, r.output


def test_equiv_and_healthy():
    assert run("equiv", "corpus:examples", "Interleaved", "Sequenced").exit_code == 0
    assert run("equiv", "corpus:examples", "Prefix", "Dead").exit_code == 1
    assert run("equiv", "corpus:examples", "Term", "x := x").exit_code == 0
    assert run("healthy", "corpus:examples", "Divergent", "NSRD").exit_code == 0


def test_errors(tmp_path):
    bad = tmp_path / "bad.circ"
    bad.write_text("process P = a ->")
    r = run("calc", str(bad), "P")
    assert r.exit_code == 1 and "bad.circ:1:" in r.output
    loop = tmp_path / "loop.circ"
    loop.write_text("channel a\nprocess P = mu X . skip ; X")
    assert run("calc", str(loop), "P").exit_code == 2
    assert run("calc", "corpus:examples", "Missing").exit_code == 2
    assert run("laws", "nope").exit_code == 1


def test_laws_command():
    r = run("laws", "trace")
    assert r.exit_code == 0
    assert "trace: 12/12 laws hold" in r.output


def test_output_is_deterministic():
    a = run("laws", "rdlaws", "--samples", "5", "--seed", "3", "--format", "dump").output
    b = run("laws", "rdlaws", "--samples", "5", "--seed", "3", "--format", "dump").output
    assert a == b


def test_mondex_command():
    r = run("mondex", "--cards", "2")
    assert r.exit_code == 0 and r.output.startswith("-- cash cards")
