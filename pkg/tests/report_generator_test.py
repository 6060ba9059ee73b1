import sys
from pathlib import Path

import pytest

sys.path.append(str(Path(__file__).resolve().parent.parent))

from evidence_logic.model_file import EXAMPLE1
from report_generator.__main__ import generate_html, load_model_data


def test_load_model_data():
    data = load_model_data([str(EXAMPLE1)], ["K{a}p & K{b}p", "K{A}p"])
    assert len(data) == 1
    entry = data[0]
    assert entry["name"] == "example1"
    assert entry["validation"]["valid"]
    assert [g["label"] for g in entry["groups"]] == ["a", "b", "A"]
    assert entry["groups"][2]["discrete"]
    assert entry["formulas"] == [
        {"text": "K{a} p & K{b} p", "extension": ["w2"]},
        {"text": "K{A} p", "extension": []},
    ]
    table_a = entry["groups"][0]["tables"][0]
    assert table_a["atom"] == "p"
    assert table_a["cells"]["knowledge"] == ["w2", "w4"]


def test_generate_html(tmp_path, capsys):
    output = tmp_path / "report" / "model report.html"
    generate_html(load_model_data([str(EXAMPLE1)], ["K{a}p"]), str(output))
    html = output.read_text(encoding="utf-8")
    assert "Group A" in html
    assert "w2" in html
    assert "K{a} p" in html
    assert capsys.readouterr().out.strip() == f"Generated {output}"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
