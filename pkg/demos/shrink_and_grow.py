"""Shrink a labeled tree to a small MSO-equivalent core, then grow it back out."""
from shrubkit import Thresholds, Tree, grow, mso_equiv, preceq, shrink, star
from shrubkit.typesys import CapPolicy, fingerprint


def show(name, t):
    print(f"{name:>10}: size {t.size:3d}  {t}")


def main():
    p = 2
    leaf1, leaf2 = Tree(p, 1), Tree(p, 2)
    branch = Tree(p, 1, (leaf1, leaf1, leaf2))
    t = Tree(p, 2, (branch,) * 4 + (Tree(p, 1, (leaf2,) * 5),))
    show("input", t)

    th = Thresholds.practical(2)
    for m in (1, 2):
        small = shrink(t, m, th)
        show(f"shrink m={m}", small)
        print(f"{'':>12}preceq={preceq(small, t, m, th)}  oracle equivalent={mso_equiv(small, t, m)}")

    cp = CapPolicy.practical(2)
    print("fingerprint of input :", fingerprint(t, 1, cp).text)
    print("fingerprint of core  :", fingerprint(shrink(t, 1, th), 1, cp).text)

    s = star(3)
    big = grow(s, 1, 3, th)
    show("star(3)", s)
    show("grown", big)
    print(f"{'':>12}preceq={preceq(s, big, 1, th)}  oracle equivalent={mso_equiv(s, big, 1)}")


if __name__ == "__main__":
    main()
