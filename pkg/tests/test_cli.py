import csv
import io
import subprocess
import sys

import pytest

from bhetoscf import cli
from bhetoscf.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    INTEGRALS_HEADER,
    REPRODUCE_HEADER,
    RunConfig,
    UsageError,
    atom_to_Z,
    config_from_text,
    format_energy,
    load_table_rows,
    main,
    parse_config_text,
    parse_dz,
)


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestParsing:
    @pytest.mark.parametrize(
        "symbol, Z",
        [("He", 2), ("Li+", 3), ("Be2+", 4), ("C4+", 6), ("Ne⁸⁺", 10), ("Ar16+", 18), ("H-", 1)],
    )
    def test_atoms(self, symbol, Z):
        assert atom_to_Z(symbol) == Z

    @pytest.mark.parametrize("symbol", ["Xx", "C3+", "He2", "li", "Ne8-"])
    def test_bad_atoms(self, symbol):
        with pytest.raises(UsageError):
            atom_to_Z(symbol)

    def test_dz(self):
        assert parse_dz("0.98:2.85, 1.01:1.45") == ((0.98, 2.85), (1.01, 1.45))
        for bad in ("1:2:3", "a:b", "1.0"):
            with pytest.raises(UsageError):
                parse_dz(bad)

    def test_energy_format(self):
        assert format_energy(-2.84765625) == "-2.8476562500000000"
        assert format_energy(-93.84765625, grouped=True) == "-93.84765 62500 00000"
        # 17 significant digits expose the binary value rather than the decimal literal
        assert format_energy(0.1) == "0.10000000000000001"
        assert format_energy(float("nan")) == "nan"

    def test_config_text(self):
        cfg = config_from_text("# He\ncommand = scf\natom = He\nzeta = 1.6875  # integer optimum\nverify = yes\n")
        assert cfg.atom == "He" and cfg.zeta == 1.6875 and cfg.verify is True

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("q = 1\nzeta = fast", "2: field 'zeta'"),
            ("q = 1\nbogus = 3", "2: unknown field 'bogus'"),
            ("mode = sideways", "1: field 'mode'"),
            ("justtext", "1: expected"),
            ("verify = maybe", "field 'verify'"),
        ],
    )
    def test_config_diagnostics(self, text, fragment):
        with pytest.raises(UsageError, match=fragment):
            parse_config_text(text)

    def test_dump_round_trip(self):
        cfg = RunConfig(
            command="optimize",
            atom="Be2+",
            q=7,
            nu=0.9871234567891234,
            zeta=3.3,
            dz=((0.98207, 2.851), (1.01316, 1.45434)),
            mode="integer",
            out="csv",
            verify=True,
            tol_energy=1e-12,
        )
        assert config_from_text(cfg.dump()) == cfg

    def test_dump_config_flag_round_trip(self, tmp_path):
        code, text = run("scf", "--atom", "C4+", "--q", "5", "--nu", "1.0002326328", "--zeta", "6.5825914486", "--dump-config")
        assert code == EXIT_OK
        path = tmp_path / "run.cfg"
        path.write_text(text)
        code2, text2 = run("scf", "--config", str(path), "--dump-config")
        assert code2 == EXIT_OK and text2 == text

    def test_resolved_Z(self):
        assert RunConfig(atom="Li+").resolved_Z() == 3.0
        for cfg in (RunConfig(), RunConfig(Z=2.0, atom="Li+"), RunConfig(Z=200.0)):
            with pytest.raises(UsageError):
                cfg.resolved_Z()


class TestScfCommand:
    def test_integer_point(self):
        code, text = run("scf", "--Z", "2", "--q", "1", "--nu", "1", "--zeta", "1.6875")
        assert code == EXIT_OK
        line = next(l for l in text.splitlines() if l.startswith("E_total"))
        assert float(line.split()[1]) == pytest.approx(-2.84765625, abs=1e-12)
        assert "virial ratio" in text

    def test_double_zeta_csv(self):
        code, text = run("scf", "--Z", "2", "--dz", "0.98207:2.851,1.01316:1.45434", "--out", "csv")
        header, row = csv_rows(text)
        assert code == EXIT_OK and header == cli._SCF_HEADER
        assert float(row[1]) == pytest.approx(-2.861673561356, abs=1e-8)

    def test_grouped(self):
        code, text = run("scf", "--atom", "He", "--zeta", "1.6875", "--grouped")
        assert "-2.84765 62499" in text or "-2.84765 62500" in text

    def test_missing_zeta(self, capsys):
        code, _ = run("scf", "--Z", "2")
        assert code == EXIT_USAGE
        assert "--zeta" in capsys.readouterr().err

    def test_unknown_flag(self):
        assert run("scf", "--Z", "2", "--zeta", "1", "--colour", "red")[0] == EXIT_USAGE

    def test_numerical_failure(self):
        # nu <= 1/2: kinetic energy diverges
        assert run("scf", "--Z", "2", "--nu", "0.45", "--zeta", "1.0")[0] == EXIT_NUMERICAL

    def test_not_converged(self):
        code, _ = run("scf", "--Z", "2", "--q", "5", "--zeta", "1.97", "--max-iter", "1")
        assert code == EXIT_NUMERICAL

    def test_config_file_and_env(self, tmp_path, monkeypatch):
        path = tmp_path / "he.cfg"
        path.write_text("atom = He\nzeta = 1.6875\nout = csv\n")
        monkeypatch.setenv(cli.CONFIG_ENV, str(path))
        code, text = run("scf")
        assert code == EXIT_OK and float(csv_rows(text)[1][1]) == pytest.approx(-2.84765625, abs=1e-12)
        # flags win over the file
        code, text = run("scf", "--zeta", "1.7")
        assert float(csv_rows(text)[1][1]) > -2.84765625

    def test_bad_config_exit(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("zeta = 1.0\nq = many\n")
        assert run("scf", "--Z", "2", "--config", str(path))[0] == EXIT_USAGE
        assert run("scf", "--Z", "2", "--config", str(tmp_path / "missing.cfg"))[0] == EXIT_USAGE

    def test_csv_is_byte_stable(self):
        argv = ("scf", "--atom", "Be2+", "--dz", "1.00854:6.31803,0.99806:3.44652", "--out", "csv")
        assert run(*argv)[1] == run(*argv)[1]


class TestOtherCommands:
    def test_optimize_integer(self):
        code, text = run("optimize", "--atom", "He", "--mode", "integer", "--out", "csv")
        assert code == EXIT_OK
        rows = csv_rows(text)
        assert len(rows) == 2 and len(rows[0]) == len(rows[1])

    def test_integrals(self):
        code, text = run("integrals", "--Z", "2", "--zeta", "1.6875", "--out", "csv")
        rows = csv_rows(text)
        assert code == EXIT_OK and rows[0] == INTEGRALS_HEADER
        values = [float(r[-1]) for r in rows[1:]]
        assert values == pytest.approx([1.0, 1.423828125, -3.375, 1.0546875], rel=1e-14)
        assert all(len(r) == len(INTEGRALS_HEADER) for r in rows)

    def test_integrals_verify(self):
        code, text = run("integrals", "--Z", "2", "--q", "3", "--nu", "0.97", "--zeta", "1.9", "--verify", "--out", "csv")
        rows = csv_rows(text)
        assert code == EXIT_OK
        assert rows[0][-2:] == ["oracle", "rel_diff"]
        assert max(float(r[-1]) for r in rows[1:]) <= 1e-9

    def test_reproduce_tables(self):
        for table in ("1", "2", "3"):
            code, text = run("reproduce-table", table, "--out", "csv")
            rows = csv_rows(text)
            assert code == EXIT_OK and rows[0] == REPRODUCE_HEADER
            assert all(r[0] == table for r in rows[1:])
        core = [r for r in load_table_rows() if r["scope"] == "core"]
        assert len(core) == 14 + 16 + 10

    def test_reproduce_examples(self):
        code, text = run("reproduce-table", "2", "--out", "csv")
        row = next(r for r in csv_rows(text) if r[1] == "C.5.01")
        assert float(row[5]) == pytest.approx(-32.3611922822, abs=1e-7)
        code, text = run("reproduce-table", "3", "--out", "csv")
        row = next(r for r in csv_rows(text) if r[1] == "P")
        assert float(row[5]) == pytest.approx(-215.73607461415, abs=1e-5)
        code, text = run("reproduce-table", "1", "--out", "csv")
        row = next(r for r in csv_rows(text) if r[1] == "1.02")
        assert row[-1] == "true" and float(row[6]) <= 1e-10

    def test_reproduce_pretty_and_bad_table(self):
        code, text = run("reproduce-table", "3")
        assert code == EXIT_OK and "B3+" in text
        assert run("reproduce-table", "4")[0] == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bhetoscf", "scf", "--atom", "He", "--zeta", "1.6875", "--out", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("Z,e_total")
