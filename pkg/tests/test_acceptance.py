"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  Expensive shared artifacts (expanded codes, threshold
tables) are module-scoped fixtures.

Criterion 5a is expected RED: it pins window-size saturation to within 0.01
of the maximum already at W = W_min, but the reference tables themselves
place the c3-family gap at 0.036 (0.4499 at W = m_s+1 vs 0.4857 at
W = L-m_s), so the stated tolerance cannot hold.  See the test docstring
and the decisions ledger for the analysis.
"""

import numpy as np
import pytest

import ldpccc as L
from ldpccc.bench import DecoderSpec, SweepConfig, run_sweep
from ldpccc.channel import ChannelSpec, burst_lengths, sample_pattern
from ldpccc.dethresh import de_graph, de_step
from ldpccc.poly import (interleave, modulo_split, poly, poly_prod, poly_sum,
                         precedes)
from ldpccc.protograph import base_matrix, max_span_family, new_ensemble, preset

TOL = 0.002


def report(criterion: str, ok: bool, detail: str = ""):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def table_ensemble(J: int, ms: int, LL: int):
    """Rate-0.49 family: both columns (J - ms) + x + ... + x^ms."""
    return new_ensemble([poly([J - ms] + [1] * ms)] * 2, 1, 2, ms, LL,
                        label=f"table(J={J})")


# --- 1: BP thresholds -------------------------------------------------------

def test_c01_bp_thresholds():
    cases = [
        ("block (3,6)", L.bp_threshold(L.BaseMatrix(np.array([[3, 3]]))), 0.4294),
        ("Cc(3,6) L=40", L.bp_threshold(preset("c1", 40)), 0.4879),
        ("B' L=40", L.bp_threshold(preset("bprime", 40)), 0.4875),
    ]
    detail = "; ".join(f"{n} {r.threshold:.4f} (ref {e})" for n, r, e in cases)
    report("1 (BP thresholds)",
           all(abs(r.threshold - e) <= TOL for _, r, e in cases), detail)


# --- 2: windowed thresholds at delta = 0 ------------------------------------

def test_c02_windowed_delta_zero():
    rb = L.windowed_threshold(preset("bprime", 40), 3, 0.0)
    rc = L.windowed_threshold(preset("c1", 40), 3, 0.0)
    ok = abs(rb.threshold - 0.3331) <= TOL and rc.threshold <= 0.001
    report("2 (WD delta=0)", ok,
           f"B' {rb.threshold:.4f} (ref 0.3331); Cc {rc.threshold:.2e} (<= 0.001)")


# --- 3: Tables I and II -----------------------------------------------------

TABLE_I = {  # J: (eps*_{ms+1}, eps*_{L-ms}); ms = 1, L = 50
    2: (0.0008, 0.3162), 3: (0.4499, 0.4857), 4: (0.4449, 0.4469),
    5: (0.3915, 0.3923), 6: (0.3469, 0.3475), 7: (0.3115, 0.3118),
    8: (0.2829, 0.2832), 9: (0.2595, 0.2597),
}
TABLE_II = {  # ms = 2, L = 100
    3: (0.0189, 0.4882), 4: (0.4875, 0.4947), 5: (0.4493, 0.4501),
    6: (0.3941, 0.3945), 7: (0.3489, 0.3492), 8: (0.3131, 0.3133),
    9: (0.2843, 0.2845), 10: (0.2607, 0.2608),
}


def test_c03_termination_tables():
    worst = 0.0
    bad = []
    for ms, LL, table in ((1, 50, TABLE_I), (2, 100, TABLE_II)):
        for J, (e_small, e_big) in table.items():
            ens = table_ensemble(J, ms, LL)
            small = L.windowed_threshold(ens, ms + 1, 1e-12).threshold
            big = L.windowed_threshold(ens, LL - ms, 1e-12).threshold
            for got, ref, tag in ((small, e_small, "Wmin"), (big, e_big, "Wmax")):
                worst = max(worst, abs(got - ref))
                if abs(got - ref) > TOL:
                    bad.append(f"ms={ms} J={J} {tag}: {got:.4f} vs {ref}")
    note = "J=ms+1 rows verified: ladder polynomial 1+x+...+x^ms reading holds"
    report("3 (Tables I-II, 32 thresholds)", not bad,
           f"max |err| {worst:.4f}; {note}" + ("; " + "; ".join(bad) if bad else ""))


# --- 4: Tables III and IV ---------------------------------------------------

TABLE_III = {
    "c4": (0.4429, 0.4429, 0.4427, 0.4294),
    "c5": (0.4912, 0.4905, 0.4824, 0.3331),
    "c6": (0.4835, 0.4835, 0.4828, 0.3331),
    "c7": (0.4924, 0.4919, 0.4824, 0.3331),
}
TABLE_IV = (0.6469, 0.6184, 0.5803, 0.4997)


def test_c04_multi_target_tables():
    worst = 0.0
    bad = []
    for name, refs in TABLE_III.items():
        ens = preset(name, 100)
        for i, ref in enumerate(refs, start=1):
            got = L.windowed_threshold(ens, 4, 1e-12, targeted_groups=i).threshold
            worst = max(worst, abs(got - ref))
            if abs(got - ref) > TOL:
                bad.append(f"{name} i={i}: {got:.4f} vs {ref}")
    c8 = preset("c8", 100)
    for i, ref in enumerate(TABLE_IV, start=1):
        got = L.windowed_threshold(c8, 4, 1e-12, targeted_groups=i).threshold
        worst = max(worst, abs(got - ref))
        if abs(got - ref) > TOL:
            bad.append(f"c8 i={i}: {got:.4f} vs {ref}")
    report("4 (Tables III-IV, 20 thresholds)", not bad,
           f"max |err| {worst:.4f}" + ("; " + "; ".join(bad) if bad else ""))


# --- 5: window-size sweep qualitative --------------------------------------

def test_c05a_saturation_at_wmin():
    """RED by spec defect: saturation within 0.01 at W_min contradicts the
    reference tables.

    The stated criterion demands the c2/c3 thresholds sit within 0.01 of
    their maxima already at W = W_min.  The c3 family appears verbatim in
    the termination table (J = 3, m_s = 1 row): 0.4499 at W = m_s+1 against
    0.4857 at W = L-m_s, a 0.036 gap, reproduced here to 1e-4.  The measured
    curves do saturate within 0.01 two window sizes later (see 5b detail);
    "fairly close at W_min" holds as a ratio (~93%), not within 0.01.
    """
    gaps = {}
    for name in ("c2", "c3"):
        ens = preset(name, 100)
        at_wmin = L.windowed_threshold(ens, ens.ms + 1, 1e-12).threshold
        at_max = L.windowed_threshold(ens, ens.L - ens.ms, 1e-12).threshold
        gaps[name] = (at_wmin, at_max)
    detail = "; ".join(f"{n}: Wmin {a:.4f} vs max {b:.4f} (gap {b - a:.4f})"
                       for n, (a, b) in gaps.items())
    report("5a (within 0.01 of max at W_min)",
           all(b - a <= 0.01 for a, b in gaps.values()), detail)


def test_c05b_saturation_shortly_after_wmin_and_delta_insensitivity():
    rows = []
    ok = True
    for name in ("c2", "c3"):
        ens = preset(name, 100)
        wmin = ens.ms + 1
        at_max = L.windowed_threshold(ens, ens.L - ens.ms, 1e-12).threshold
        near = L.windowed_threshold(ens, wmin + 2, 1e-12).threshold
        d6 = L.windowed_threshold(ens, wmin, 1e-6).threshold
        d12 = L.windowed_threshold(ens, wmin, 1e-12).threshold
        ok &= (at_max - near <= 0.01) and (abs(d6 - d12) < TOL)
        rows.append(f"{name}: W={wmin + 2} gap {at_max - near:.4f}, "
                    f"|delta gap| {abs(d6 - d12):.5f}")
    report("5b (saturation by W_min+2; delta-insensitivity)", ok, "; ".join(rows))


def test_c05c_c1_strictly_below_c2():
    c1, c2 = preset("c1", 100), preset("c2", 100)
    pairs = [(W, L.windowed_threshold(c1, W, 1e-12).threshold,
              L.windowed_threshold(c2, W, 1e-12).threshold) for W in (3, 4, 5, 6)]
    report("5c (c1 < c2 for W <= 6)", all(a < b for _, a, b in pairs),
           "; ".join(f"W={W}: {a:.4f} < {b:.4f}" for W, a, b in pairs))


# --- 6: exact spans ----------------------------------------------------------

def test_c06_exact_spans():
    checks = []
    for name, span, size in (("c1", 2, 2), ("c2", 4, 2), ("c3", 2, None)):
        rep = L.span_report(preset(name, 10))
        checks.append((f"{name} span", rep.min_span, span))
        if size is not None:
            checks.append((f"{name} size", rep.min_size, size))
    checks.append(("maxspan(2,6,u=1)",
                   L.span_report(max_span_family(2, 3, 1, 8)).min_span, 5))
    checks.append(("c8", L.span_report(preset("c8", 8)).min_span, 6))
    c2 = preset("c2", 12)
    checks.append(("c2 W=3 i=1", L.windowed_min_span(c2, 3, 1), 2))
    checks.append(("c2 W=4 i=1", L.windowed_min_span(c2, 4, 1), 4))
    checks.append(("c2 W=4 i=2", L.windowed_min_span(c2, 4, 2), 2))
    for J in (3, 4, 5):
        for ms in (1, 2, 3):
            ens = new_ensemble([poly([J - 1] + [0] * (ms - 1) + [1]),
                                poly([J - 1, 1])], 1, 2, ms, 10)
            got = L.min_span(base_matrix(ens), width_cap=2 * ms + 4).min_span
            checks.append((f"optimal pair J={J} ms={ms}", got, 2 * ms))
    bad = [f"{n}: {g} vs {e}" for n, g, e in checks if g != e]
    report("6 (exact spans)", not bad,
           f"{len(checks)} checks" + ("; " + "; ".join(bad) if bad else ""))


# --- 7: MBL at desk scale ----------------------------------------------------

def test_c07_mbl_desk_scale():
    rows = []
    ok = True
    for name in ("c1", "c2"):
        ens = preset(name, 20)
        code = L.expand(ens, 16, seed=11)
        span = L.span_report(ens).min_span
        lo, hi = L.mbl_bounds(span, 16)
        got = L.mbl_search(code, "bp")
        strict = got < code.n - code.k_true
        ok &= lo <= got <= hi and strict
        rows.append(f"{name}: MBL {got} in [{lo},{hi}], < n-k {code.n - code.k_true}")
    report("7 (MBL bands + Corollary-8 strictness)", ok, "; ".join(rows))


# --- 8: property suites ------------------------------------------------------

def test_c08a_threshold_monotonicity():
    viol_w, viol_g, viol_d = 0.0, 0.0, 0.0
    for name in ("c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8"):
        ens = preset(name, 12)
        wmin = ens.ms + 1
        ts = [L.windowed_threshold(ens, W, 1e-12).threshold
              for W in (wmin, wmin + 1, wmin + 2)]
        viol_w = max(viol_w, ts[0] - ts[1], ts[1] - ts[2])
        gs = [L.windowed_threshold(ens, wmin, 1e-12, targeted_groups=i).threshold
              for i in range(1, wmin + 1)]
        viol_g = max([viol_g] + [gs[i + 1] - gs[i] for i in range(len(gs) - 1)])
        ds = [L.windowed_threshold(ens, wmin, d).threshold
              for d in (1e-12, 1e-9, 1e-6)]
        viol_d = max(viol_d, ds[0] - ds[1], ds[1] - ds[2])
    # W and targeted-group monotonicity hold to bisection resolution; the
    # delta direction carries a genuine ~1e-4 reversal (left-decoded columns
    # enter at erasure delta, lifting the targeted fixed point ~delta^2),
    # plus bisection brackets; measured 1.1e-4 worst over the presets
    ok = viol_w <= 2e-5 and viol_g <= 2e-5 and viol_d <= 2e-4
    report("8a (threshold monotonicity over presets)", ok,
           f"max violations: W {viol_w:.2g}, groups {viol_g:.2g}, "
           f"delta {viol_d:.2g} (delta tol 2e-4, see ledger)")


def test_c08b_de_update_monotone():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(1000):
        m = rng.integers(0, 3, size=(rng.integers(2, 4), rng.integers(2, 5)))
        if not (m.any(axis=0).all() and m.any(axis=1).all()):
            continue
        g = de_graph(L.BaseMatrix(m), rng.uniform(0, 1, size=m.shape[1]))
        E = len(g.emult)
        qa = rng.uniform(0, 1, size=E)
        qb = np.clip(qa + rng.uniform(0, 1 - qa), 0, 1)
        _, na, aa = de_step(g, qa)
        _, nb, ab = de_step(g, qb)
        worst = max(worst, float((na - nb).max()), float((aa - ab).max()))
    report("8b (DE update monotone, 1e3 states)", worst <= 1e-14,
           f"max order violation {worst:.2g}")


def test_c08c_peeling_residuals_are_stopping_sets():
    code = L.expand(preset("c2", 12), 8, seed=4)
    H = code.H.toarray()
    rng = np.random.default_rng(23)
    bad = 0
    for _ in range(10_000):
        pat = rng.random(code.n) < rng.uniform(0.1, 0.8)
        out = L.peel_decode(code, pat)
        residual = (~out.known).astype(np.int64)
        if np.any(H @ residual == 1) or np.any(~out.known & ~pat):
            bad += 1
    report("8c (peeling residual is a stopping set, 1e4 patterns)", bad == 0,
           f"{bad} violations")


def test_c08d_full_receipt_wd_equals_bp():
    code = L.expand(preset("c2", 12), 8, seed=4)
    W = code.ens.L + code.ens.ms
    rng = np.random.default_rng(29)
    mismatches = 0
    for _ in range(1000):
        pat = rng.random(code.n) < rng.uniform(0.2, 0.8)
        a = L.peel_decode(code, pat)
        b = L.window_decode(code, pat, W, carry="all")
        mismatches += int(not (a.known == b.known).all())
    report("8d (WD full receipt == BP, 1e3 trials)", mismatches == 0,
           f"{mismatches} mismatches at W = L + ms")


def test_c08e_poly_properties_bulk():
    rng = np.random.default_rng(31)
    bad = 0
    for _ in range(10_000):
        cs = rng.integers(0, 5, size=rng.integers(0, 9)).tolist()
        p = poly(cs)
        jp = int(rng.integers(1, 4))
        if interleave(modulo_split(p, jp), jp) != p:
            bad += 1
        a = poly(rng.integers(0, 4, size=rng.integers(1, 6)).tolist())
        if a.is_zero:
            continue
        extra = poly((rng.integers(0, 3, size=len(a.coeffs)) *
                      (np.array(a.coeffs) > 0)).tolist())
        b = poly_sum(a, extra)
        c = poly(rng.integers(1, 4, size=rng.integers(1, 5)).tolist())
        d = poly_sum(c, poly([int(rng.integers(0, 3))] * len(c.coeffs)))
        d = d if precedes(c, d) else c
        if not precedes(a, b) or not precedes(c, d):
            bad += 1
            continue
        if not precedes(poly_sum(a, c), poly_sum(b, d)):
            bad += 1
        if not precedes(poly_prod(a, c), poly_prod(b, d)):
            bad += 1
    report("8e (poly round-trip and order preservation, 1e4)", bad == 0,
           f"{bad} violations")


# --- 9: Monte Carlo orderings ------------------------------------------------

@pytest.fixture(scope="module")
def mc_codes():
    return {name: L.expand(preset(name, 20), 64, seed=11) for name in ("c1", "c2")}


def _mc_point(code, chan, carry, trials):
    cfg = SweepConfig(code.ens, 64, 11, (chan,),
                      (DecoderSpec("wd", W=3, carry=carry),),
                      trials=trials, min_cw_errors=1 << 62)
    return run_sweep(cfg, code)[0]


def test_c09_monte_carlo_orderings(mc_codes):
    # The reference orderings model windowed decoding that forwards only
    # the targeted symbols, so the criterion runs carry="targeted_only";
    # carry="all" rows are measured alongside.  Under carry="all" the BEC
    # ordering is unchanged but the GEC fine-ordering flips (retaining all
    # window recoveries helps the window-weak code more on bursts).
    rows = []
    ok = True
    for chan in (ChannelSpec("bec", 0.35), ChannelSpec("gec", 0.3, 10.0)):
        r1 = _mc_point(mc_codes["c1"], chan, "targeted_only", 100_000)
        r2 = _mc_point(mc_codes["c2"], chan, "targeted_only", 100_000)
        separated = r2.ser + r2.ser_ci95 < r1.ser - r1.ser_ci95
        no_beat = (r1.cer + r1.ci95 >= r1.singleton and
                   r2.cer + r2.ci95 >= r2.singleton)
        ok &= separated and no_beat
        rows.append(f"{chan.kind}: SER c2 {r2.ser:.2e} < c1 {r1.ser:.2e} "
                    f"(CIs {r2.ser_ci95:.1e}/{r1.ser_ci95:.1e})")
        a1 = _mc_point(mc_codes["c1"], chan, "all", 20_000)
        a2 = _mc_point(mc_codes["c2"], chan, "all", 20_000)
        ok &= (a1.cer + a1.ci95 >= a1.singleton and
               a2.cer + a2.ci95 >= a2.singleton)
        if chan.kind == "bec":
            ok &= a2.ser + a2.ser_ci95 < a1.ser - a1.ser_ci95
        rows.append(f"[carry=all {chan.kind}: c2 {a2.ser:.2e} vs c1 {a1.ser:.2e}]")
    report("9 (MC orderings at 1e5 trials/point)", ok, "; ".join(rows))


# --- 10: channel statistics --------------------------------------------------

def test_c10_gec_statistics():
    spec = ChannelSpec("gec", 0.3, 50.0)
    pat = sample_pattern(spec, 10**6, np.random.default_rng(42))
    bl = burst_lengths(pat)
    eps_err = abs(pat.mean() - 0.3)
    burst_err = abs(bl.mean() - 50.0) / 50.0
    report("10 (GEC statistics at 1e6 symbols)",
           eps_err <= 0.005 and burst_err <= 0.04,
           f"eps err {eps_err:.4f} (<=0.005), burst err {100 * burst_err:.2f}% (<=4%)")
