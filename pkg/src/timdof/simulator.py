"""Monte Carlo validation of slot schemes on the deterministic floor channel
and on the real AWGN channel.

Transmitters never see channel realizations: ``encode_block`` takes only the
scheme and the messages. Receivers know every coefficient they hear. A fresh
coefficient is drawn for every link and every channel use.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import kernels
from .scheme import TransmissionScheme
from .topology import NetworkTopology


class SymbolOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class ChannelModel:
    """Coefficients uniform on [delta1, delta2]."""

    delta1: float = 1.0
    delta2: float = 2.0

    def __post_init__(self):
        if not 0 < self.delta1 <= self.delta2:
            raise ValueError("need 0 < delta1 <= delta2")
        if self.delta2 < 1:
            raise ValueError("delta2 must be at least 1")
        if self.delta2 > self.delta1 and self.f_max < 1:
            raise ValueError("uniform density on an interval longer than 1 has f_max < 1")

    @property
    def f_max(self) -> float:
        width = self.delta2 - self.delta1
        return math.inf if width == 0 else 1.0 / width

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.uniform(self.delta1, self.delta2, size=size)


def draw_channels(model: ChannelModel, topology: NetworkTopology, uses: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Table ``G[t, k-1, l-1]`` for l heard by k; zero where there is no link."""
    K = topology.K
    g = model.sample(rng, (uses, K, K))
    mask = np.zeros((K, K), dtype=bool)
    for k in topology.users:
        for l in topology.heard[k]:
            mask[k - 1, l - 1] = True
    return np.where(mask, g, 0.0)


def deterministic_output(g_row, symbols, pbar: int | None = None) -> int:
    """sum_l floor(g_l * x_l) over the heard transmitters."""
    x = np.asarray(symbols, dtype=np.int64)
    if (x < 0).any() or (pbar is not None and (x > pbar).any()):
        raise SymbolOutOfRange(f"symbols must lie in 0..{pbar}")
    return kernels.floor_sum(g_row, x)


def integer_root(n: int, exponent: Fraction) -> int:
    """Largest q >= 0 with q**den <= n**num, i.e. floor(n ** exponent)."""
    num, den = exponent.numerator, exponent.denominator
    if num <= 0:
        return 1
    target = n ** num
    q = int(round(n ** float(exponent)))
    while q ** den > target:
        q -= 1
    while (q + 1) ** den <= target:
        q += 1
    return q


@dataclass(frozen=True)
class SimConfig:
    pbar: int
    qc: int = 4
    trials: int = 500
    seed: int = 0
    mode: str = "deterministic"  # or "awgn"
    snr_db: float | None = None
    delta_c: float | None = None  # common backoff: Qc = floor(pbar ** (1/3 - delta_c))
    qp: int = 16  # private PAM size in awgn mode
    noise_std: float = 1.0
    threads: int = 1
    model: ChannelModel = field(default_factory=ChannelModel)

    def __post_init__(self):
        if self.pbar < 1:
            raise ValueError("pbar must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.mode not in ("deterministic", "awgn"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "awgn" and self.snr_db is None:
            raise ValueError("awgn mode needs snr_db")
        if self.mode == "deterministic" and self.common_spacing < 1:
            raise ValueError("common alphabet too large for pbar: spacing M would be 0")

    @property
    def common_alphabet(self) -> int:
        if self.delta_c is None:
            return self.qc
        exponent = Fraction(1, 3) - Fraction(self.delta_c).limit_denominator(10_000)
        return max(2, integer_root(self.pbar, exponent))

    @property
    def private_alphabet(self) -> int:
        return self.pbar // 2 + 1

    @property
    def common_spacing(self) -> int:
        return (self.pbar // 2 + 1) // self.common_alphabet


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2 ** 64 - 1), trial]))


def encode_block(scheme: TransmissionScheme, commons, privates, spacing: int) -> np.ndarray:
    """Integer symbols ``X[t, l-1]`` for one block; no channel input by design."""
    K = scheme.topology.K
    x = np.zeros((scheme.slots, K), dtype=np.int64)
    for l in scheme.topology.users:
        s = commons[l - 1] * spacing if scheme.common_active else 0
        x[:, l - 1] = s
        x[scheme.private_slot(l) - 1, l - 1] += privates[l - 1]
    return x


def receive_block(topology: NetworkTopology, x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Deterministic outputs ``Y[t, k-1]`` for the whole block."""
    y = np.zeros((x.shape[0], topology.K), dtype=np.int64)
    for t in range(x.shape[0]):
        for k in topology.users:
            heard = sorted(topology.heard[k])
            idx = [l - 1 for l in heard]
            y[t, k - 1] = kernels.floor_sum(g[t, k - 1, idx], x[t, idx])
    return y


@dataclass
class _Counts:
    decodes: int = 0
    errors: int = 0
    mac: int = 0
    private: int = 0
    per_receiver: np.ndarray | None = None

    def add(self, other: _Counts) -> None:
        self.decodes += other.decodes
        self.errors += other.errors
        self.mac += other.mac
        self.private += other.private
        self.per_receiver = other.per_receiver if self.per_receiver is None else self.per_receiver + other.per_receiver


@dataclass(frozen=True)
class SimSummary:
    pbar: int
    qc: int
    trials: int
    seed: int
    scheme: str
    err_rate_total: float
    err_mac: float
    err_private: float
    rate_ratio_mean: float
    receiver_errors: tuple[int, ...]
    snr_db: float | None = None

    def csv_row(self) -> dict:
        return {
            "pbar": self.pbar, "qc": self.qc, "trials": self.trials, "seed": self.seed,
            "scheme": self.scheme, "err_rate_total": f"{self.err_rate_total:.6g}",
            "err_mac": f"{self.err_mac:.6g}", "err_private": f"{self.err_private:.6g}",
            "rate_ratio_mean": f"{self.rate_ratio_mean:.6g}",
        }


CSV_COLUMNS = ("pbar", "qc", "trials", "seed", "scheme", "err_rate_total", "err_mac", "err_private",
               "rate_ratio_mean")


def summaries_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for s in rows:
        w.writerow(s.csv_row())
    return buf.getvalue()


def scheme_name(scheme: TransmissionScheme) -> str:
    return "four_ninths" if scheme.common_active else "half"


def rate_ratio(scheme: TransmissionScheme, config: SimConfig) -> float:
    """Per-user log-alphabet per channel use over ln pbar."""
    if scheme.common_active:
        return (math.log(config.private_alphabet) + math.log(config.common_alphabet)) / (3 * math.log(config.pbar))
    return math.log(config.pbar + 1) / (2 * math.log(config.pbar))


def _run_parallel(fn, config: SimConfig) -> _Counts:
    chunks = np.array_split(np.arange(config.trials), max(1, min(config.threads, config.trials)))
    if config.threads <= 1:
        parts = [fn(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            parts = list(pool.map(fn, chunks))
    total = _Counts()
    for p in parts:  # fixed chunk order keeps the result thread-count independent
        total.add(p)
    return total


def run_deterministic_trials(scheme: TransmissionScheme, topology: NetworkTopology,
                             config: SimConfig) -> SimSummary:
    if scheme.topology != topology:
        raise ValueError("scheme was built for a different topology")
    K = topology.K
    qc = config.common_alphabet if scheme.common_active else 1
    qp = config.private_alphabet if scheme.common_active else config.pbar + 1
    spacing = config.common_spacing if scheme.common_active else 0
    receivers = list(topology.users)
    heard = {k: sorted(topology.heard[k]) for k in receivers}
    free = {k: scheme.free_slot(k) for k in receivers}
    own_slot = {k: scheme.private_slot(k) for k in receivers}

    def run_chunk(chunk) -> _Counts:
        c = _Counts(per_receiver=np.zeros(K, dtype=np.int64))
        for trial in chunk:
            rng = trial_rng(config.seed, int(trial))
            commons = rng.integers(0, qc, size=K)
            privates = rng.integers(0, qp, size=K)
            g = draw_channels(config.model, topology, scheme.slots, rng)
            x = encode_block(scheme, commons, privates, spacing)
            if (x > config.pbar).any():
                raise SymbolOutOfRange("encoder exceeded the input alphabet")
            y = receive_block(topology, x, g)
            for k in receivers:
                c.decodes += 1
                ok, cause = _decode_receiver(k, heard[k], free[k], own_slot[k], y, g, commons, privates,
                                             qc, qp, spacing, scheme.common_active)
                if not ok:
                    c.errors += 1
                    c.per_receiver[k - 1] += 1
                    if cause == "mac_ambiguous":
                        c.mac += 1
                    else:
                        c.private += 1
        return c

    counts = _run_parallel(run_chunk, config)
    n = counts.decodes
    return SimSummary(config.pbar, qc, config.trials, config.seed, scheme_name(scheme),
                      counts.errors / n, counts.mac / n, counts.private / n,
                      rate_ratio(scheme, config), tuple(int(v) for v in counts.per_receiver))


def _decode_receiver(k, heard, free, own, y, g, commons, privates, qc, qp, spacing, common_active):
    common_hat = {l: 0 for l in heard}
    if common_active:
        gf = g[free - 1, k - 1, [l - 1 for l in heard]]
        count, first = kernels.mac_search(gf, spacing, qc, int(y[free - 1, k - 1]))
        if count != 1:
            return False, "mac_ambiguous"
        for pos in range(len(heard) - 1, -1, -1):
            common_hat[heard[pos]] = first % qc
            first //= qc
    residual = int(y[own - 1, k - 1])
    for l in heard:
        if l != k:
            residual -= int(math.floor(g[own - 1, k - 1, l - 1] * float(common_hat[l] * spacing)))
    p_hat = kernels.invert_floor(float(g[own - 1, k - 1, k - 1]), common_hat[k] * spacing, residual, 0, qp - 1)
    if p_hat != privates[k - 1] or common_hat[k] != commons[k - 1]:
        return False, "private_invert_fail"
    return True, None


def pam_levels(q: int, power: float) -> np.ndarray:
    """Zero-mean equally spaced levels with average energy ``power``."""
    if q == 1:
        return np.zeros(1)
    d = math.sqrt(12 * power / (q * q - 1))
    return (2 * np.arange(q) - (q - 1)) * d / 2


def run_awgn_trials(scheme: TransmissionScheme, topology: NetworkTopology, config: SimConfig) -> SimSummary:
    """Real AWGN channel with sqrt(P) scaling and successive decoding."""
    if scheme.topology != topology:
        raise ValueError("scheme was built for a different topology")
    K = topology.K
    amp = math.sqrt(10 ** (config.snr_db / 10))
    qc = config.qc if scheme.common_active else 1
    qp = config.qp
    plev = pam_levels(qp, scheme.powers["private"])
    clev = pam_levels(qc, scheme.powers["common"]) if scheme.common_active else np.zeros(1)
    receivers = list(topology.users)
    heard = {k: sorted(topology.heard[k]) for k in receivers}
    free = {k: scheme.free_slot(k) for k in receivers}
    tuples = {k: np.array(list(product(range(qc), repeat=len(heard[k])))) for k in receivers}

    def run_chunk(chunk) -> _Counts:
        c = _Counts(per_receiver=np.zeros(K, dtype=np.int64))
        for trial in chunk:
            rng = trial_rng(config.seed, int(trial))
            commons = rng.integers(0, qc, size=K)
            privates = rng.integers(0, qp, size=K)
            g = draw_channels(config.model, topology, scheme.slots, rng)
            z = rng.standard_normal((scheme.slots, K)) * config.noise_std
            x = np.zeros((scheme.slots, K))
            for l in receivers:
                x[:, l - 1] = clev[commons[l - 1]]
                x[scheme.private_slot(l) - 1, l - 1] += plev[privates[l - 1]]
            y = amp * np.einsum("tkl,tl->tk", g, x) + z
            for k in receivers:
                c.decodes += 1
                idx = [l - 1 for l in heard[k]]
                chat = dict.fromkeys(heard[k], 0)
                if scheme.common_active:
                    f = free[k] - 1
                    cand = amp * (clev[tuples[k]] @ g[f, k - 1, idx])
                    best = tuples[k][int(np.argmin(np.abs(cand - y[f, k - 1])))]
                    chat = dict(zip(heard[k], best))
                own = scheme.private_slot(k) - 1
                r = y[own, k - 1] - amp * sum(g[own, k - 1, l - 1] * clev[chat[l]] for l in heard[k])
                p_hat = int(np.argmin(np.abs(amp * g[own, k - 1, k - 1] * plev - r)))
                if chat[k] != commons[k - 1]:
                    c.errors += 1
                    c.mac += 1
                    c.per_receiver[k - 1] += 1
                elif p_hat != privates[k - 1]:
                    c.errors += 1
                    c.private += 1
                    c.per_receiver[k - 1] += 1
        return c

    counts = _run_parallel(run_chunk, config)
    n = counts.decodes
    ratio = (math.log(qp) + math.log(qc)) / 3 if scheme.common_active else math.log(qp) / 2
    ratio /= math.log(amp) if amp > 1 else 1.0
    return SimSummary(config.pbar, qc, config.trials, config.seed, scheme_name(scheme),
                      counts.errors / n, counts.mac / n, counts.private / n, ratio,
                      tuple(int(v) for v in counts.per_receiver), snr_db=config.snr_db)
