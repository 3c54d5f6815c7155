"""Monte-Carlo CDF tables of accumulated mutual information.

One table holds, for every ``m = 1..M``, the sorted accumulated MI of
``sample_count`` independent channel realizations, for both the main and the
eavesdropper link.  A single table answers every rate query of an
optimisation run (common random numbers), so the estimated outage
probabilities are exact step functions of the rates and bisection on them is
well defined.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _streams
from .channel_model import FadingSpec, Protocol, SystemParams, acc_mi_prefix
from .errors import CacheFormatError, ResourceLimitError

DEFAULT_SAMPLE_COUNT = 10**6
DEFAULT_MEMORY_BUDGET = 2 * 1024**3

CACHE_MAGIC = b"SHRQCDF1"
# magic, protocol, M, n, seed, mean main SNR, mean eve SNR
_HEADER = struct.Struct("<8sIIQQdd")
_PROTOCOL_CODES = {Protocol.RTD: 0, Protocol.INR: 1}

_Z95 = 1.959963984540054


@dataclass(frozen=True, eq=False)
class CdfTables:
    """Sorted per-``m`` samples; row ``m - 1`` of ``main``/``eve`` is column ``m``."""

    protocol: Protocol
    max_tx: int
    main: np.ndarray = field(repr=False)
    eve: np.ndarray = field(repr=False)
    sample_count: int
    seed: int
    main_mean_snr: float
    eve_mean_snr: float

    def column(self, link: str, m: int) -> np.ndarray:
        if not 1 <= m <= self.max_tx:
            raise ValueError(f"m must lie in [1, {self.max_tx}], got {m}")
        if link == "main":
            return self.main[m - 1]
        if link == "eve":
            return self.eve[m - 1]
        raise ValueError(f"link must be 'main' or 'eve', got {link!r}")

    def same_as(self, other: "CdfTables") -> bool:
        return (
            self.protocol is other.protocol
            and self.max_tx == other.max_tx
            and self.sample_count == other.sample_count
            and self.seed == other.seed
            and self.main_mean_snr == other.main_mean_snr
            and self.eve_mean_snr == other.eve_mean_snr
            and np.array_equal(self.main, other.main)
            and np.array_equal(self.eve, other.eve)
        )


def table_bytes(max_tx: int, sample_count: int) -> int:
    return 2 * 8 * max_tx * sample_count


def _fill_link(out: np.ndarray, protocol: Protocol, spec: FadingSpec, seed: int, link: int) -> None:
    M, n = out.shape

    def work(bounds):
        lo, hi = bounds
        chunk = lo // _streams.CHUNK_SIZE
        gen = _streams.substream(seed, _streams.DOMAIN_TABLES, link, chunk)
        snrs = gen.standard_exponential((hi - lo, M)) * spec.mean_snr_linear
        out[:, lo:hi] = acc_mi_prefix(protocol, snrs, M).T

    _streams.ordered_map(work, _streams.chunk_bounds(n))
    _streams.ordered_map(lambda row: row.sort(), list(out))


def build_cdf_tables(
    params: SystemParams,
    protocol: Protocol | str,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = 0,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> CdfTables:
    """Simulate ``sample_count`` realizations and tabulate sorted MI columns.

    Draws for realization ``j`` depend only on ``(seed, link, j)``; the main
    link draws do not depend on the eavesdropper statistics, and both
    protocols see the same SNRs under the same seed.
    """
    protocol = Protocol.parse(protocol)
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    needed = table_bytes(params.max_tx, sample_count)
    if needed > memory_budget:
        raise ResourceLimitError(
            f"tables for M={params.max_tx}, n={sample_count} need {needed} bytes "
            f"(budget {memory_budget})"
        )
    M = params.max_tx
    main = np.empty((M, sample_count))
    eve = np.empty((M, sample_count))
    _fill_link(main, protocol, params.main, seed, _streams.LINK_MAIN)
    _fill_link(eve, protocol, params.eve, seed, _streams.LINK_EVE)
    main.setflags(write=False)
    eve.setflags(write=False)
    return CdfTables(
        protocol=protocol,
        max_tx=M,
        main=main,
        eve=eve,
        sample_count=sample_count,
        seed=int(seed),
        main_mean_snr=params.main.mean_snr_linear,
        eve_mean_snr=params.eve.mean_snr_linear,
    )


def binomial_halfwidth(p: float, n: int) -> float:
    return _Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def cdf_eval(tables: CdfTables, link: str, m: int, r: float) -> tuple[float, float]:
    """Fraction of samples strictly below ``r`` and its 95% CI half-width."""
    col = tables.column(link, m)
    count = int(np.searchsorted(col, r, side="left"))
    p = count / tables.sample_count
    return p, binomial_halfwidth(p, tables.sample_count)


class EmpiricalProvider:
    """CDF provider reading Monte-Carlo tables."""

    def __init__(self, tables: CdfTables):
        self.tables = tables
        self.max_tx = tables.max_tx
        self.sample_count = tables.sample_count

    def cdf_main(self, m: int, r: float) -> float:
        col = self.tables.column("main", m)
        return int(np.searchsorted(col, r, side="left")) / self.sample_count

    def ccdf_eve(self, m: int, r: float) -> float:
        col = self.tables.column("eve", m)
        above = self.sample_count - int(np.searchsorted(col, r, side="right"))
        return above / self.sample_count

    def __repr__(self):
        t = self.tables
        return f"EmpiricalProvider({t.protocol.value}, M={t.max_tx}, n={t.sample_count}, seed={t.seed})"


def save_tables(tables: CdfTables, path: str | Path) -> None:
    path = Path(path)
    header = _HEADER.pack(
        CACHE_MAGIC,
        _PROTOCOL_CODES[tables.protocol],
        tables.max_tx,
        tables.sample_count,
        tables.seed & 0xFFFF_FFFF_FFFF_FFFF,
        tables.main_mean_snr,
        tables.eve_mean_snr,
    )
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(tables.main, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(tables.eve, dtype="<f8").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write CDF cache {path}: {exc}") from exc


def load_tables(
    path: str | Path,
    params: SystemParams,
    protocol: Protocol | str,
    sample_count: int,
    seed: int,
) -> CdfTables:
    """Load cached tables, insisting that every header field matches the request."""
    protocol = Protocol.parse(protocol)
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise CacheFormatError(f"{path}: truncated header")
        magic, code, M, n, stored_seed, mean_main, mean_eve = _HEADER.unpack(raw)
        expected = (
            CACHE_MAGIC,
            _PROTOCOL_CODES[protocol],
            params.max_tx,
            sample_count,
            seed & 0xFFFF_FFFF_FFFF_FFFF,
            params.main.mean_snr_linear,
            params.eve.mean_snr_linear,
        )
        names = ("magic", "protocol", "M", "n", "seed", "main mean SNR", "eve mean SNR")
        for name, got, want in zip(names, (magic, code, M, n, stored_seed, mean_main, mean_eve), expected):
            if got != want:
                raise CacheFormatError(f"{path}: header field {name} is {got!r}, expected {want!r}")
        count = M * n
        body = np.fromfile(fh, dtype="<f8", count=2 * count)
        if body.size != 2 * count or fh.read(1):
            raise CacheFormatError(f"{path}: body size does not match header")
    main = body[:count].reshape(M, n).astype(float)
    eve = body[count:].reshape(M, n).astype(float)
    main.setflags(write=False)
    eve.setflags(write=False)
    return CdfTables(protocol, M, main, eve, n, int(seed), mean_main, mean_eve)


def cached_tables(
    params: SystemParams,
    protocol: Protocol | str,
    sample_count: int,
    seed: int,
    cache_dir: str | Path | None = None,
) -> CdfTables:
    """Build tables, or reuse a matching file from ``cache_dir`` when given."""
    if cache_dir is None:
        return build_cdf_tables(params, protocol, sample_count, seed)
    protocol = Protocol.parse(protocol)
    cache_dir = Path(cache_dir)
    name = (
        f"{protocol.value}_M{params.max_tx}_n{sample_count}_s{seed}_"
        f"{params.main.mean_snr_linear.hex()}_{params.eve.mean_snr_linear.hex()}.bin"
    )
    path = cache_dir / name
    if path.exists():
        try:
            return load_tables(path, params, protocol, sample_count, seed)
        except CacheFormatError:
            pass
    tables = build_cdf_tables(params, protocol, sample_count, seed)
    cache_dir.mkdir(parents=True, exist_ok=True)
    save_tables(tables, path)
    return tables
