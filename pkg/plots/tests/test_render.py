import json
import math

import pytest

from ghzplots.cli import main
from ghzplots.render import ColumnError, PlotSpec, load_rows, render

HEADER = ("protocol,n,N,K,R,p_gate,eta,f_in,f_out,f_out_se,p_succ,p_succ_se,"
          "samples,seed")


def baseline_rows(protocol="pumping", nn=5, rr=2, points=8):
    rows = []
    for k in range(points):
        f_in = 0.6 + 0.05 * k
        rows.append(f"{protocol},3,{nn},1,{rr},0.01,0.01,{f_in},"
                    f"{min(0.99, f_in + 0.03)},0.001,{0.9 - 0.05 * k},0.002,1000000,7")
    return rows


def optimized_rows(nn=5, rr=3, points=4):
    rows = []
    for k in range(points):
        f_in = 0.7 + 0.08 * k
        rows.append(f"optimized,3,{nn},1,{rr},0.01,0.01,{f_in},"
                    f"{min(0.995, f_in + 0.06)},0.0,{0.6 + 0.02 * k},0.0,0,101")
    return rows


def write_csv(path, rows):
    path.write_text(HEADER + "\n" + "\n".join(rows) + "\n")


def test_load_rows_checks_schema(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("protocol,f_in\npumping,0.9\n")
    with pytest.raises(ColumnError, match="f_out"):
        load_rows([str(bad)])


def test_empty_csv_is_an_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(HEADER + "\n")
    spec = PlotSpec(csv_paths=(str(empty),), output=str(tmp_path / "x.png"))
    with pytest.raises(ValueError, match="no data rows"):
        render(spec)


def test_baseline_only_figure(tmp_path):
    csv_path = tmp_path / "base.csv"
    write_csv(csv_path, baseline_rows() + baseline_rows("pumping", 6, 2))
    out = tmp_path / "fig.png"
    spec = PlotSpec(csv_paths=(str(csv_path),), output=str(out))
    assert render(spec) == str(out)
    assert out.stat().st_size > 5000


def test_mixed_two_panel_and_side_by_side(tmp_path):
    base = tmp_path / "base.csv"
    opt = tmp_path / "opt.csv"
    write_csv(base, baseline_rows() + baseline_rows("nested", 4, 4))
    write_csv(opt, optimized_rows() + optimized_rows(4, 2))
    for layout, name in (("stacked", "fig2.png"), ("side_by_side", "fig3.png")):
        out = tmp_path / name
        spec = PlotSpec(csv_paths=(str(base), str(opt)), output=str(out),
                        layout=layout, title="comparison")
        render(spec)
        assert out.stat().st_size > 5000


def test_nan_fidelity_rows_are_skipped(tmp_path):
    csv_path = tmp_path / "withnan.csv"
    rows = baseline_rows()
    rows.append("pumping,3,5,1,2,0.01,0.01,0.99,nan,nan,0.0,0.0,1000,7")
    write_csv(csv_path, rows)
    out = tmp_path / "fig.png"
    render(PlotSpec(csv_paths=(str(csv_path),), output=str(out)))
    assert out.exists()


def test_rendering_deterministic(tmp_path):
    csv_path = tmp_path / "base.csv"
    write_csv(csv_path, baseline_rows() + optimized_rows())
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(PlotSpec(csv_paths=(str(csv_path),), output=str(a)))
    render(PlotSpec(csv_paths=(str(csv_path),), output=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_cli_with_spec_file(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    write_csv(csv_path, baseline_rows())
    out = tmp_path / "fig.png"
    spec = {"csv_paths": [str(csv_path)], "output": str(out),
            "layout": "side_by_side"}
    spath = tmp_path / "spec.json"
    spath.write_text(json.dumps(spec))
    assert main(["--spec", str(spath)]) == 0
    assert out.exists()


def test_cli_with_flags_and_errors(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    write_csv(csv_path, baseline_rows())
    out = tmp_path / "fig.png"
    assert main(["--csv", str(csv_path), "--output", str(out)]) == 0
    assert main([]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("protocol\npumping\n")
    code = main(["--csv", str(bad), "--output", str(out)])
    assert code == 1
    assert "missing column" in capsys.readouterr().err
