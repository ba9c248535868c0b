"""Build a graph from a height-2 tree model, translate a sentence, and shrink the graph."""
from shrubkit import (
    Thresholds, TreeModel, flatten, graph_shrink, interpret_formula, materialize, model_check, mso_equiv,
    parse, validate,
)


def main():
    # two cliques of label-1 vertices, each joined to one label-2 hub; hubs are far apart
    group = [(1, 1), (1, 1), (1, 1), (1, 1), (2, 2)]
    sig = {(1, 1, 1), (1, 2, 1), (2, 1, 1)}
    tm = TreeModel.build(2, 2, 2, [group, group], sig)
    print("valid model:", validate(tm).ok)

    G = materialize(tm)
    print(f"graph: {len(G)} vertices, {len(G.edges)} edges")

    phi = parse("(exists1 x (and (P 2 x) (exists1 y (and (E x y) (P 1 y)))))")
    xi = interpret_formula(phi, tm.signature, tm.r, tm.p, tm.d)
    print("graph satisfies phi:", model_check(G, phi))
    print("tree satisfies its translation:", model_check(flatten(tm), xi))

    H, sub = graph_shrink(tm, 1, Thresholds.practical(2))
    print(f"shrunk graph: {len(H)} vertices, {len(H.edges)} edges")
    print("kept vertices:", sorted(H.vertices))
    print("H is MSO[1]-equivalent to G:", mso_equiv(H, G, 1))


if __name__ == "__main__":
    main()
