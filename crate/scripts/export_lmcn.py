"""Export the Les Miserables co-occurrence network to the graph JSON format.

Uses the copy of Knuth's data bundled with networkx. Edge ids follow the
networkx edge iteration order; `value` is the co-occurrence count.
"""
import json
import sys

import networkx as nx


def main(out_path):
    g = nx.les_miserables_graph()
    nodes = [{"id": n, "attrs": {"name": n}} for n in g.nodes()]
    edges = [
        {"id": f"e{i}", "source": u, "target": v, "attrs": {"value": int(d["weight"])}}
        for i, (u, v, d) in enumerate(g.edges(data=True))
    ]
    doc = {"directed": False, "nodes": nodes, "edges": edges}
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/lmcn-case2-unconstrained/graph.json")
