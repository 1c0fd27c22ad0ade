#!/usr/bin/env python3
"""Smoke test for the dfrc_py bindings: exercises every exported entry
point with small budgets and checks a handful of known values."""

import math

import dfrc_py


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    cfg = dfrc_py.SystemConfig()
    assert (cfg.m, cfg.m_t_r, cfg.m_t_c, cfg.k) == (4, 2, 2, 12)
    assert cfg.n_r == 1500 and cfg.n_rec == 8500 and cfg.rate_bits == 6
    assert "SystemConfig" in repr(cfg)
    assert cfg.radar_only().m_t_r == 4

    try:
        dfrc_py.SystemConfig(m=4, m_t_r=3, m_t_c=2)
        raise AssertionError("invalid split accepted")
    except ValueError:
        pass

    assert dfrc_py.scheme_names() == [
        "full",
        "hopping",
        "fixed-random",
        "fixed-adjacent",
    ]

    # closed forms: peak values and the variance null at f_theta = 0
    approx(dfrc_py.full_closed(cfg.radar_only(), 0.0, 0.0), 4 * 1500, 1e-9)
    approx(dfrc_py.expected_closed(cfg, 0.0, 0.0), 0.5 * 4 * 1500, 1e-9)
    approx(dfrc_py.variance_closed(cfg, 0.0, 0.0), 0.0, 1e-12)
    ratio = dfrc_py.variance_closed(cfg, 0.0, 2.0, per_pulse=True) / dfrc_py.variance_closed(
        cfg, 0.0, 2.0
    )
    approx(ratio, cfg.k, 1e-9)

    # GSM bit mapping roundtrip
    bits = [1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1, 0]
    symbols = dfrc_py.gsm_encode_bits(cfg, bits)
    assert len(symbols) == 2 and all(len(s[0]) == cfg.m_t_c for s in symbols)
    assert dfrc_py.gsm_decode_symbols(cfg, symbols) == bits

    # beam-pattern campaign at a reduced trial budget
    rows, surfaces = dfrc_py.beampattern(cfg, trials=500, seed=0)
    metrics = {(r["scheme"], r["metric"]): r["value"] for r in rows}
    assert metrics[("full", "closed_form_max_err")] < 0.02
    assert metrics[("hopping", "mean_max_rel_err")] < 0.2
    taus, fs, mags = surfaces["full"]
    assert len(mags) == len(taus) and len(mags[0]) == len(fs)
    peak = max(max(row) for row in mags)
    approx(peak, 1.0, 0.01)  # surfaces are peak-normalized

    # noiseless recovery of a two-target scene
    a = 3 * math.pi / 8
    scene = dfrc_py.TargetScene([(60e-6, -a, 1 + 0j), (60e-6, a, 1 + 0j)])
    assert len(scene) == 2
    out = dfrc_py.recover_scene(cfg, scene, scheme="hopping", seed=1)
    assert all(out["hits"]), out
    hist = out["residual_history"]
    assert all(b <= x + 1e-9 for x, b in zip(hist, hist[1:]))

    rows = dfrc_py.resolve(cfg, trials=5, seed=0)
    rates = {r["scheme"]: r["value"] for r in rows if r["metric"] == "all_hit_rate"}
    assert set(rates) == {"full", "hopping", "fixed-random", "fixed-adjacent"}

    rows = dfrc_py.hitrate(cfg, trials=10, seed=0, scr_db=[20.0])
    assert all(0.0 <= r["value"] <= 1.0 for r in rows)

    rows = dfrc_py.ber(cfg, symbols=2000, seed=0, snr_db=[10.0, 20.0])
    ber = {(r["scheme"], r["sweep_value"]): r["value"] for r in rows}
    assert ber[("gsm", 20.0)] <= ber[("gsm", 10.0)]

    rows = dfrc_py.mi(cfg, symbols=2000, seed=0, snr_db=[30.0])
    mi = {r["scheme"]: r["value"] for r in rows}
    approx(mi["gsm"], 6.0, 0.1)

    # determinism through the bindings
    again = dfrc_py.ber(cfg, symbols=2000, seed=0, snr_db=[10.0, 20.0])
    assert {(r["scheme"], r["sweep_value"]): r["value"] for r in again} == ber

    print("smoke test ok")


if __name__ == "__main__":
    main()
