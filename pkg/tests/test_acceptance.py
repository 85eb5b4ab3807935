"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary section
at the end of the run lists every criterion.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from shiftmourre.cli import main
from shiftmourre.grid import frequencies, frequency_mesh, make_grid
from shiftmourre.lap import ResolventProbe, c2_regularity_check, eps_floor, eps_sweep
from shiftmourre.mourre import (
    EnergyWindow,
    commutator_symbol,
    delta_free,
    free_mourre_check,
    l_scan,
)
from shiftmourre.operators import a_op, a_op_decomposed, hamiltonian, shift_op
from shiftmourre.potentials import Example5, Well, assumption_report, build_potential
from shiftmourre.symcom import normalize
from shiftmourre.symcom.corpus import GOLDEN, run_corpus
from shiftmourre.symcom.numeric import cross_check


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_symbolic_suite():
    start = time.perf_counter()
    results, _ = run_corpus(GOLDEN, numeric=False)
    seconds = time.perf_counter() - start
    structural = all(c.symbolic for r in results for c in r.cases)
    report(1, structural and len(results) == 5 and seconds < 5,
           f"{sum(r.passed for r in results)}/5 identities equal in normal form, {seconds:.2f} s")


def test_criterion_02_numeric_symbolic_cross_validation():
    grid = make_grid(1, 8.0, 128, 1.0)
    rng = np.random.default_rng(2024)
    sides = [side for ident in GOLDEN for case in ident.cases if case.d == 1
             for side in (case.lhs, case.rhs)]
    worst = 0.0
    worst_full = 0.0
    for _ in range(10):
        V = rng.normal(size=grid.shape)
        for text in sides:
            names = normalize(text).functions()
            check = cross_check(text, grid, {name: V for name in names})
            worst = max(worst, check.interior_error)
            worst_full = max(worst_full, check.full_error)
    report(2, worst <= 1e-10,
           f"worst relative Frobenius error {worst:.2e} over 10 potentials x {len(sides)} sides "
           f"(interior rows; {worst_full:.2e} including the wrap-around seam)")


def test_criterion_03_exactness():
    errors = []
    for g in (make_grid(1, 8.0, 128, 1.0), make_grid(2, 4.0, 32, 1.0)):
        A = a_op(g).dense()
        herm = np.max(np.abs(A - A.conj().T))
        for j in range(1, g.d + 1):
            T = shift_op(g, j).dense()
            perm = (np.all((T == 0) | (T == 1)) and np.all(T.sum(0) == 1) and np.all(T.sum(1) == 1)
                    and np.array_equal(T @ T.conj().T, np.eye(g.size)))
            errors.append(("perm", not perm))
        rows = g.interior_mask().ravel()
        diff = A - a_op_decomposed(g).dense()
        rel = np.linalg.norm(diff[rows]) / np.linalg.norm(A[rows])
        errors.append(("herm", herm != 0))
        errors.append(("shift form", rel > 1e-12))
        seam = np.linalg.norm(diff) / np.linalg.norm(A)
    bad = [name for name, failed in errors if failed]
    report(3, not bad, f"A Hermitian exactly, T exact permutations, A = shift form to "
           f"{rel:.1e} on interior rows (seam rows differ by {seam:.1e})"
           + (f"; failed: {bad}" if bad else ""))


def _scan_1d(window):
    r = np.linspace(math.sqrt(2 * window.a), math.sqrt(2 * window.b), 1_000_001)
    return float(np.min(np.sin(r) * r))


def _sphere_scan_2d(window):
    r = np.linspace(math.sqrt(2 * window.a), math.sqrt(2 * window.b), 801)
    t = np.linspace(0, 2 * np.pi, 3601)
    R, T = np.meshgrid(r, t, indexing="ij")
    xi = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1)
    return float(commutator_symbol(xi, 1.0).min())


def test_criterion_04_free_mourre():
    start = time.perf_counter()
    w = EnergyWindow(1.0, 2.0)
    d1, d2 = delta_free(w, 1), delta_free(w, 2)
    o1, o2 = _scan_1d(w), _sphere_scan_2d(w)
    margins = [free_mourre_check(make_grid(1, 512.0, 4096, 1.0), w).margin,
               free_mourre_check(make_grid(2, 16.0, 128, 1.0), w).margin]
    seconds = time.perf_counter() - start
    ok = (abs(d1 - 1.3970) < 1e-3 and abs(d1 - o1) <= 1e-3 and abs(d2 - o2) <= 0.01 * o2
          and min(margins) >= -1e-12 and seconds < 10)
    report(4, ok, f"delta_free {d1:.6f} (1-D scan {o1:.6f}), d=2 {d2:.6f} (sphere scan {o2:.6f}), "
           f"min margin {min(margins):.2e}, {seconds:.2f} s")


def test_criterion_05_symbol_window():
    worst_pos, worst_zero = np.inf, 0.0
    for g in (make_grid(1, 16.0, 256, 1.0), make_grid(2, 8.0, 64, 1.0)):
        xi = np.stack(frequency_mesh(g), axis=-1)
        r = np.sqrt(np.sum(xi**2, axis=-1))
        inside = (r > 0) & (r < math.pi / g.beta)
        worst_pos = min(worst_pos, commutator_symbol(xi[inside], g.beta).min())
        for j in range(g.d):
            for s in (1, -1):
                edge = np.zeros(g.d)
                edge[j] = s * math.pi / g.beta
                worst_zero = max(worst_zero, abs(float(commutator_symbol(edge, g.beta))))
    report(5, worst_pos > 0 and worst_zero <= 1e-12,
           f"min symbol inside {worst_pos:.3e} > 0, |symbol| at the axis edges {worst_zero:.1e}")


def test_criterion_06_projected_stability():
    w = EnergyWindow(1.0, 2.0)
    base = make_grid(1, 8.0, 128, 1.0)
    rep = l_scan(Example5(gamma=2.0, amplitude=0.5), base, w, [8.0, 16.0, 32.0])
    ks = [r.k for r in rep.l_scan]
    free = l_scan(None, base, w, [8.0, 16.0, 32.0])
    free_ks = [r.k for r in free.l_scan]
    ok = all(a >= b for a, b in zip(ks, ks[1:])) and all(k == 0 for k in free_ks)
    report(6, ok, f"k over L=8,16,32 at h=1/8: {ks} (c={rep.c:.4f}); V=0 control {free_ks}")


def test_criterion_07_lap():
    g = make_grid(1, 128.0, 1024, 1.0)
    start = time.perf_counter()
    probe = ResolventProbe(hamiltonian(g), 1.0)
    floor = eps_floor(probe.energies, 1.0)
    free = eps_sweep(probe, 1.0, 1.0, "position", np.geomspace(10 * floor, floor, 5), floor=floor)
    free_s = time.perf_counter() - start

    start = time.perf_counter()
    gw = make_grid(1, 32.0, 256, 1.0)
    wprobe = ResolventProbe(hamiltonian(gw, build_potential(Well(-5.0, 2.0), gw)), 1.0)
    e0 = wprobe.energies[0]
    well = eps_sweep(wprobe, e0, 1.0, "position", np.geomspace(1e-1, 1e-4, 7))
    well_s = time.perf_counter() - start

    free_ok = free.classification == "saturating" and free.respects_floor and free_s < 60
    well_ok = (well.classification.startswith("diverging") and abs(well.slope + 1) <= 0.1
               and well_s < 60)
    report(7, free_ok and well_ok,
           f"free lambda=1: {free.classification} (last-decade change "
           f"{free.last_decade_change:.1%}, eps floor {floor:.3g}, n=1024, {free_s:.1f} s); "
           f"well E0={e0:.4f}: {well.classification} ({well_s:.1f} s)")


def test_criterion_08_c2_probe():
    g = make_grid(1, 8.0, 64, 1.0)
    H = hamiltonian(g, build_potential(Example5(), g))
    rep = c2_regularity_check(H, a_op(g), 1 + 0.5j, t_list=(1e-2, 5e-3),
                              second_t=np.geomspace(1e-3, 1e-2, 5))
    ok = (abs(rep.richardson_ratio - 4) <= 0.5 and rep.identity_error <= 1e-10
          and rep.second_diff_variation < 0.10)
    report(8, ok, f"Richardson ratio {rep.richardson_ratio:.3f}, i[A,R] = +R[H,iA]R to "
           f"{rep.identity_error:.1e} (the minus-sign form is off by {rep.literal_sign_error:.2f}), "
           f"second-difference variation {rep.second_diff_variation:.2%}")


def test_criterion_09_assumption_proxies():
    g = make_grid(1, 32.0, 512, 1.0)
    decaying = assumption_report(Example5(gamma=1.0), g)
    periodic = assumption_report(Example5(gamma=0.0), g)
    ok = (decaying.row("V").compact_proxy and decaying.row("x1*D1(V)").compact_proxy
          and not periodic.row("V").compact_proxy)
    report(9, ok, f"gamma=1 V exponent {decaying.row('V').sv_exponent:.2f}, "
           f"xDV exponent {decaying.row('x1*D1(V)').sv_exponent:.2f}; "
           f"periodic control V exponent {periodic.row('V').sv_exponent:.2f} "
           f"(R^2 {periodic.row('V').sv_r2:.3f}) rejected")


def test_criterion_10_determinism(tmp_path):
    config = {"grid": {"d": 1, "L": 8, "n": 64, "beta": 1},
              "potential": {"variant": "example5", "gamma": 2.0},
              "lap": {"lambdas": [1.0, -1.0], "weight": "both"},
              "mourre": {"L_values": [8, 16]}}
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(config))
    mismatches, files = [], 0
    for command in ("mourre", "lap", "spectrum", "assumptions"):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / run / command
            assert main([command, "--config", str(cfg), "--out", str(out), "--plots"]) == 0
            outs.append(out)
        for path in sorted(outs[0].iterdir()):
            files += 1
            if path.read_bytes() != (outs[1] / path.name).read_bytes():
                mismatches.append(f"{command}/{path.name}")
    for run in ("a", "b"):
        assert main(["symcheck", "--out", str(tmp_path / run / "symcheck")]) == 0
    files += 1
    if ((tmp_path / "a/symcheck/symcheck.json").read_bytes()
            != (tmp_path / "b/symcheck/symcheck.json").read_bytes()):
        mismatches.append("symcheck/symcheck.json")
    report(10, not mismatches, f"{files} output files compared across two runs"
           + (f"; differing: {mismatches}" if mismatches else ", all byte-identical"))
