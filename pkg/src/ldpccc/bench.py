"""Monte Carlo sweep harness, Singleton baseline, and the latency model.

Each grid point is (channel, decoder); trial patterns are keyed on the
channel point and trial index only, so decoders at the same channel point
see identical erasures row for row and aggregation is independent of
execution order.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .channel import ChannelSpec, sample_pattern
from .codes import ExpandedCode, expand, peel_decode, window_decode
from .protograph import Ensemble


def singleton_bound(n: int, k: int, epsilon: float) -> float:
    """Codeword-error floor of an ideal (n, k) MDS code on erasures:
    probability of more than n-k erasures, summed in log space."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    if k == 0:
        return 0.0
    if epsilon == 0.0:
        return 0.0
    if epsilon == 1.0:
        return 1.0
    j = np.arange(n - k + 1, n + 1, dtype=np.float64)
    logc = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
    logp = logc + j * np.log(epsilon) + (n - j) * np.log1p(-epsilon)
    return float(min(1.0, np.exp(logsumexp(logp))))


def latency_model(W: int, ms: int, L: int) -> tuple[float, float]:
    """(w, w_min): windowed latency as a fraction of full-receipt latency,
    and the smallest such fraction the ensemble supports."""
    if W < ms + 1 or L < 1:
        raise ValueError("invalid window parameters")
    return (W + ms) / L, (2 * ms + 1) / L


@dataclass(frozen=True)
class DecoderSpec:
    kind: str                    # "bp" | "wd"
    W: int | None = None
    delta: float = 0.0
    carry: str = "all"
    max_iter: int = 1 << 62

    def __post_init__(self):
        if self.kind not in ("bp", "wd"):
            raise ValueError("decoder kind must be 'bp' or 'wd'")
        if self.kind == "wd" and self.W is None:
            raise ValueError("wd decoder needs W")

    def name(self) -> str:
        return "bp" if self.kind == "bp" else f"wd(W={self.W})"


@dataclass(frozen=True)
class SweepConfig:
    ensemble: Ensemble
    M: int
    seed: int
    channels: tuple[ChannelSpec, ...]
    decoders: tuple[DecoderSpec, ...]
    trials: int
    min_cw_errors: int = 100

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    label: str
    M: int
    seed: int
    channel: str
    eps: float
    burst: float | None
    decoder: str
    W: int | None
    delta: float
    carry: str
    trials: int
    errors: int
    ser: float
    cer: float
    ci95: float          # binomial half-width on CER
    singleton: float
    w_ratio: float | None
    ser_ci95: float = 0.0
    wall_time: float = 0.0


CSV_COLUMNS = ["label", "M", "seed", "channel", "eps", "burst", "decoder",
               "W", "delta", "carry", "trials", "errors", "SER", "CER",
               "CI95", "singleton", "w_ratio"]


def _binom_halfwidth(k: int, n: int) -> float:
    """Agresti-Coull 95% half-width; stays positive at k = 0 and k = n."""
    if n == 0:
        return 0.0
    p = (k + 2.0) / (n + 4.0)
    return 1.96 * float(np.sqrt(p * (1.0 - p) / (n + 4.0)))


def run_point(code: ExpandedCode, chan: ChannelSpec, dec: DecoderSpec,
              seed: int, chan_index: int, trials: int,
              min_cw_errors: int) -> ResultRow:
    n = code.n
    cw_errors = 0
    residual_total = 0
    done = 0
    t0 = time.perf_counter()
    for trial in range(trials):
        rng = np.random.default_rng([seed, chan_index, trial])
        pattern = sample_pattern(chan, n, rng)
        if dec.kind == "bp":
            out = peel_decode(code, pattern, max_iter=dec.max_iter)
        else:
            out = window_decode(code, pattern, dec.W, delta=dec.delta,
                                max_iter_per_window=dec.max_iter,
                                carry=dec.carry)
        done += 1
        residual_total += out.residual
        if not out.success:
            cw_errors += 1
            if cw_errors >= min_cw_errors:
                break
    wall = time.perf_counter() - t0
    ser = residual_total / (done * n)
    cer = cw_errors / done
    w_ratio = None if dec.kind == "bp" else (dec.W + code.ens.ms) / code.ens.L
    return ResultRow(
        label=code.ens.label or "ensemble", M=code.M, seed=seed,
        channel=chan.kind, eps=chan.epsilon, burst=chan.delta_burst,
        decoder=dec.name(), W=dec.W, delta=dec.delta, carry=dec.carry,
        trials=done, errors=cw_errors, ser=ser, cer=cer,
        ci95=_binom_halfwidth(cw_errors, done),
        singleton=singleton_bound(n, code.k_true, chan.epsilon),
        w_ratio=w_ratio,
        ser_ci95=_binom_halfwidth(residual_total, done * n),
        wall_time=wall)


def run_sweep(cfg: SweepConfig, code: ExpandedCode | None = None) -> list[ResultRow]:
    """All (channel, decoder) grid points; deterministic given cfg."""
    if code is None:
        code = expand(cfg.ensemble, cfg.M, cfg.seed)
    rows = []
    for ci, chan in enumerate(cfg.channels):
        for dec in cfg.decoders:
            rows.append(run_point(code, chan, dec, cfg.seed, ci,
                                  cfg.trials, cfg.min_cw_errors))
    return rows


def beats_singleton(row: ResultRow) -> bool:
    """True when the measured CER is below the Singleton floor by more than
    its confidence half-width: an invariant violation."""
    return row.cer + row.ci95 < row.singleton


def write_csv(rows: list[ResultRow], path: str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r.label, r.M, r.seed, r.channel, r.eps,
                        "" if r.burst is None else r.burst, r.decoder,
                        "" if r.W is None else r.W, r.delta, r.carry,
                        r.trials, r.errors, f"{r.ser:.8g}", f"{r.cer:.8g}",
                        f"{r.ci95:.8g}", f"{r.singleton:.8g}",
                        "" if r.w_ratio is None else f"{r.w_ratio:.6g}"])


def sweep_config_from_dict(d: dict, ensemble: Ensemble) -> SweepConfig:
    """Build a sweep from its JSON form (ensemble resolved by the caller)."""
    eps_list = [float(e) for e in d["eps"]]
    bursts = d.get("burst")
    if bursts is None:
        channels = [ChannelSpec("bec", e) for e in eps_list]
    else:
        channels = [ChannelSpec("gec", e, float(bl))
                    for bl in bursts for e in eps_list]
    decoders = []
    for dd in d["decoders"]:
        decoders.append(DecoderSpec(
            kind=dd["kind"], W=dd.get("W"), delta=float(dd.get("delta", 0.0)),
            carry=dd.get("carry", "all"),
            max_iter=int(dd.get("max_iter", 1 << 62))))
    return SweepConfig(ensemble=ensemble, M=int(d["M"]), seed=int(d["seed"]),
                       channels=tuple(channels), decoders=tuple(decoders),
                       trials=int(d["trials"]),
                       min_cw_errors=int(d.get("min_cw_errors", 100)))
