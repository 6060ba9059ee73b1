from pathlib import Path
import argparse

from jinja2 import Environment, FileSystemLoader

from evidence_logic.model_file import EXAMPLE1, NamedModel, validate
from evidence_logic.models import TopoEModel, all_groups, group_structure
from evidence_logic.semantics import OPERATORS, evaluate, op_table
from evidence_logic.syntax import parse, to_text

TEMPLATE_DIR = Path(__file__).resolve().parent


def group_rows(named: NamedModel) -> list[dict]:
    """Partition, topology size and operator table of every group."""
    model = named.model
    rows = []
    for g in all_groups(len(model.agents)):
        pi, tau = group_structure(model, g)
        tables = []
        for atom, ext in sorted(model.valuation.items()):
            table = op_table(model, g, ext)
            tables.append({"atom": atom, "cells": {name: named.names(table[name]) for name in OPERATORS}})
        rows.append({
            "label": named.group_label(g),
            "cells": [named.names(c) for c in pi.cells],
            "opens": len(tau.opens),
            "discrete": tau.is_discrete(),
            "tables": tables,
        })
    return rows


def load_model_data(paths: list[str], formulas: list[str]) -> list[dict]:
    data = []
    for path in paths:
        named = NamedModel.from_file(path)
        entry = {
            "name": Path(path).stem,
            "kind": named.kind,
            "states": list(named.states),
            "agents": list(named.agents),
            "valuation": {p: named.names(ext) for p, ext in sorted(named.model.valuation.items())},
            "validation": validate(named.model).to_dict(),
            "groups": group_rows(named) if isinstance(named.model, TopoEModel) else [],
            "formulas": [],
        }
        for text in formulas:
            f = parse(text)
            entry["formulas"].append({"text": to_text(f), "extension": named.names(evaluate(named.model, f).extension)})
        data.append(entry)
    return data


def generate_html(data: list, output_file: str) -> None:
    """Generate HTML using Jinja2 template."""
    env = Environment(loader=FileSystemLoader(str(TEMPLATE_DIR)), autoescape=True)
    template = env.get_template("template.html")
    html_content = template.render(data=data, operators=OPERATORS)
    Path(output_file).parent.mkdir(parents=True, exist_ok=True)
    with open(output_file, 'w', encoding="utf-8") as f:
        f.write(html_content)
    print(f"Generated {output_file}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("models", type=str, nargs="*", help="Model files (defaults to the bundled example).")
    parser.add_argument("--formula", type=str, action="append", default=[], help="Formula to evaluate on every model.")
    parser.add_argument("--output_file", type=str, help="Output file", default="model report.html")
    args = parser.parse_args()
    generate_html(load_model_data(args.models or [str(EXAMPLE1)], args.formula), args.output_file)
