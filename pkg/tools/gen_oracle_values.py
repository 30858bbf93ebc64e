#!/usr/bin/env python3
"""Regenerate tests/data/oracle_values.json.

Reference values for the distributional detector integrals, produced by a
deliberately primitive route: regulate the kernel with a finite epsilon,
integrate with mpmath's generic quadrature over explicit split points, and
extrapolate the epsilon ladder to zero with a local Neville tableau.  Nothing
here imports the package — independence from the production finite-part
machinery is the point.  Slow (minutes); rerun only when extending the grid.
"""
from __future__ import annotations

import json
import pathlib

import mpmath as mp

LADDER = [mp.mpf("0.1") * 2 ** (-k) for k in range(8)]
OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "oracle_values.json"


def neville_to_zero(xs, ys):
    tab = list(ys)
    n = len(tab)
    prev = tab[0]
    for level in range(1, n):
        for i in range(n - level):
            tab[i] = (tab[i + 1] * xs[i] - tab[i] * xs[i + level]) / (xs[i] - xs[i + level])
        err = abs(tab[0] - prev)
        prev = tab[0]
    return tab[0], err


def extrapolate(regulated):
    vals = [mp.mpc(regulated(e)) for e in LADDER]
    re_lim, re_err = neville_to_zero(LADDER, [mp.re(v) for v in vals])
    im_lim, im_err = neville_to_zero(LADDER, [mp.im(v) for v in vals])
    return mp.mpc(re_lim, im_lim), re_err + im_err


def pairing_timeordered(delta_dim, lbar, dbar, dps=60):
    """int e^{-(v+dbar)^2/2} (lbar^2 - v^2 + i eps |v|)^{-delta} dv, eps -> 0."""
    with mp.workdps(dps):
        dd, lv, db = mp.mpf(delta_dim), mp.mpf(lbar), mp.mpf(dbar)
        span = 10 + abs(db) + lv

        def reg(eps):
            def f(v):
                return mp.exp(-(v + db) ** 2 / 2) * (lv * lv - v * v + mp.mpc(0, eps) * abs(v)) ** (-dd)
            pts = sorted({-span, -lv, mp.mpf(0), lv, span, -db})
            return mp.quad(f, [p for p in pts if -span <= p <= span], maxdegree=8)

        return extrapolate(reg)


def pairing_exchange(delta_dim, lbar, dbar, t_omega, dps=70):
    """Same with the wightman-ordered i eps v and the oscillatory window."""
    with mp.workdps(dps):
        dd, lv, db, w = mp.mpf(delta_dim), mp.mpf(lbar), mp.mpf(dbar), mp.mpf(t_omega)
        span = mp.sqrt(w * w + 80) + abs(db) + lv

        def reg(eps):
            def f(v):
                return mp.exp(-(v + db) ** 2 / 2 - mp.mpc(0, 1) * w * v) * \
                    (lv * lv - v * v + mp.mpc(0, eps) * v) ** (-dd)
            pts = sorted({-span, -lv, mp.mpf(0), lv, span, -db})
            return mp.quad(f, [p for p in pts if -span <= p <= span], maxdegree=9)

        return extrapolate(reg)


def pairing_coincident(delta_dim, t_omega, dps=70):
    """int e^{-v^2/2 - i W v} (eps + i v)^{-2 delta} dv, eps -> 0."""
    with mp.workdps(dps):
        dd, w = mp.mpf(delta_dim), mp.mpf(t_omega)
        span = mp.sqrt(w * w + 80)

        def reg(eps):
            def f(v):
                return mp.exp(-v * v / 2 - mp.mpc(0, 1) * w * v) * (mp.mpf(eps) + mp.mpc(0, 1) * v) ** (-2 * dd)
            return mp.quad(f, [-span, mp.mpf(0), span], maxdegree=9)

        return extrapolate(reg)


def closed_form_reference(delta_dim, t_omega, dps=80):
    """Hypergeometric response evaluated with mpmath's own hyp1f1."""
    with mp.workdps(dps):
        dd, w = mp.mpf(delta_dim), mp.mpf(t_omega)
        z = -w * w / 2
        val = mp.pi ** mp.mpf(1.5) * 2 ** (-dd) * (
            mp.hyp1f1(mp.mpf(1) / 2 - dd, mp.mpf(1) / 2, z) / mp.gamma(mp.mpf(1) / 2 + dd)
            - mp.sqrt(2) * w * mp.hyp1f1(1 - dd, mp.mpf(3) / 2, z) / mp.gamma(dd)
        )
        return val * mp.exp(w * w / 2)  # report on the unsuppressed scale


def cstr(x, digits=25):
    return mp.nstr(mp.mpf(x), digits, strip_zeros=False)


def main() -> None:
    data = {
        "comment": "frozen reference pairings; regenerate with tools/gen_oracle_values.py",
        "ladder": [float(e) for e in LADDER],
        "timeordered": [],
        "exchange": [],
        "coincident": [],
        "closed_form": [],
    }

    for dd, lb, db in [(0.8, 2.0, 1.0), (1.0, 2.0, 1.0), (1.5, 2.0, 1.0),
                       (2.0, 5.0, 6.0), (1.2, 5.0, 5.2), (2.5, 3.0, 0.0),
                       (1.5, 10.0, 0.0), (1.0, 0.5, 0.0)]:
        val, err = pairing_timeordered(dd, lb, db)
        print(f"timeordered ({dd}, {lb}, {db}): {mp.nstr(val, 17)}  +-{mp.nstr(err, 2)}")
        data["timeordered"].append({
            "delta_dim": dd, "lbar": lb, "dbar": db,
            "j_re": cstr(mp.re(val)), "j_im": cstr(mp.im(val)), "err": float(err),
        })

    for dd, lb, db, w in [(0.8, 2.0, 1.0, 3.0), (1.5, 2.0, 0.0, 3.0), (1.0, 10.0, 0.0, 10.0)]:
        val, err = pairing_exchange(dd, lb, db, w)
        print(f"exchange ({dd}, {lb}, {db}, W={w}): {mp.nstr(val, 17)}  +-{mp.nstr(err, 2)}")
        data["exchange"].append({
            "delta_dim": dd, "lbar": lb, "dbar": db, "t_omega": w,
            "j_re": cstr(mp.re(val)), "j_im": cstr(mp.im(val)), "err": float(err),
        })

    for dd, w in [(0.9, 3.0), (1.0, 3.0)]:
        val, err = pairing_coincident(dd, w)
        print(f"coincident ({dd}, W={w}): {mp.nstr(val, 17)}  +-{mp.nstr(err, 2)}")
        data["coincident"].append({
            "delta_dim": dd, "t_omega": w,
            "j_re": cstr(mp.re(val)), "j_im": cstr(mp.im(val)), "err": float(err),
        })

    for dd, w in [(0.7, 10.0), (1.3, 10.0)]:
        val = closed_form_reference(dd, w)
        print(f"closed ({dd}, W={w}): {mp.nstr(val, 25)} (x e^(-W^2/2))")
        data["closed_form"].append({
            "delta_dim": dd, "t_omega": w, "unsuppressed": cstr(val, 40),
        })

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
