"""Tower-sized bounds, scale windows, the downward/upward drivers, and bounded search."""
from shrubkit import Thresholds, bounds, parse, star
from shrubkit.bounds import ScaleSpec, scale_window
from shrubkit.els import els_down, els_up, sat_search


def main():
    print("g(0..3)        :", [bounds.g(d) for d in range(4)])
    print("chi(1, 1, 1)   :", bounds.chi(1, 1, 1))
    print("rho(2, 2, 1)   :", bounds.rho(2, 2, 1))
    print("tower(3,2) < tower(2,20):", bounds.tower_cmp(bounds.tower(3, 2), bounds.tower(2, 20)) < 0)
    print("inequality (d=2, p=2, lam=3):", bounds.check_scale_inequality(2, 2, 3))
    print("tower scale, window 1:", scale_window(bounds.theta_scale(1, 1), 1))

    f = ScaleSpec.explicit([2, 5, 11, 23])
    th = Thresholds.practical(2)
    t = star(20)
    small, rep = els_down(t, 1, f, th)
    print(f"down: size {t.size} -> {small.size} in window {scale_window(f, 1)}; verdicts {rep.verdicts}")
    big, rep = els_up(star(3), 3, f, th)
    print(f"up:   size 4 -> {big.size} in window {scale_window(f, 3)}; verdicts {rep.verdicts}")

    phi = parse("(exists1 x (exists1 y (and (not (= x y)) (not (root x)) (not (root y)) (P 2 x) (P 2 y))))")
    res = sat_search(phi, 1, 2, 5)
    print(f"smallest model: {res.tree} (explored {res.explored}, complete={res.complete}, bound {res.bound})")


if __name__ == "__main__":
    main()
