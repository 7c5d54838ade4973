#!/usr/bin/env python3
"""Convert a flat gate-level Verilog netlist (primitive gates only) to ISCAS .bench.

Usage: verilog2bench.py IN.v OUT.bench
"""
import re
import sys

GATES = {"and": "AND", "nand": "NAND", "or": "OR", "nor": "NOR", "not": "NOT",
         "buf": "BUFF", "xor": "XOR", "xnor": "XNOR"}


def statements(text):
    text = re.sub(r"//.*", "", text)
    text = re.sub(r"/\*.*?\*/", "", text, flags=re.S)
    for stmt in text.split(";"):
        stmt = " ".join(stmt.split())
        if stmt:
            yield stmt


def convert(text):
    inputs, outputs, gates, name = [], [], [], "top"
    for stmt in statements(text):
        head = stmt.split(" ", 1)[0]
        if head == "module":
            name = stmt.split()[1].split("(")[0]
        elif head == "input":
            inputs += [n.strip() for n in stmt[len("input"):].split(",")]
        elif head == "output":
            outputs += [n.strip() for n in stmt[len("output"):].split(",")]
        elif head in GATES:
            m = re.match(r"\w+\s+\w*\s*\((.*)\)", stmt)
            pins = [p.strip() for p in m.group(1).split(",")]
            gates.append((pins[0], GATES[head], pins[1:]))
        elif head in ("wire", "endmodule"):
            continue
        else:
            raise ValueError(f"unsupported statement: {stmt}")
    lines = [f"# {name}", f"# {len(inputs)} inputs", f"# {len(outputs)} outputs",
             f"# {len(gates)} gates", ""]
    lines += [f"INPUT({n})" for n in inputs] + [""]
    lines += [f"OUTPUT({n})" for n in outputs] + [""]
    lines += [f"{out} = {kind}({', '.join(ins)})" for out, kind, ins in gates]
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    with open(sys.argv[1]) as f:
        bench = convert(f.read())
    with open(sys.argv[2], "w") as f:
        f.write(bench)
