"""Random number-partitioning instances and their exact classical solution.

An instance is a set of n positive integers drawn uniformly from [1, A]
with A = 2^n (bit density kappa = 1, the hard regime).  The rescaled
weights a_i / A are dyadic rationals, exactly representable in float64 for
n <= 52, so the oracle and the Hamiltonian diagonal agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import signed_sums

KAPPA = 1
MAX_N = 20

_HEADER = "npp v1"


@dataclass(frozen=True)
class NppInstance:
    """n positive integers in [1, A], A = 2^n, plus generation provenance."""

    n: int
    numbers: tuple[int, ...]
    seed: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n = {self.n} outside supported range [1, {MAX_N}]")
        if len(self.numbers) != self.n:
            raise ValueError(f"expected {self.n} numbers, got {len(self.numbers)}")
        a = self.range_a
        for i, v in enumerate(self.numbers):
            if not 1 <= v <= a:
                raise ValueError(f"numbers[{i}] = {v} outside [1, {a}]")

    @property
    def range_a(self) -> int:
        """A = 2^(kappa * n) with kappa fixed at 1."""
        return 1 << (KAPPA * self.n)

    @property
    def weights(self) -> tuple[float, ...]:
        """Rescaled weights a_i / A; exact dyadic floats."""
        a = self.range_a
        return tuple(v / a for v in self.numbers)


@dataclass(frozen=True)
class GroundTruth:
    """Exact optimum of the partitioning instance.

    optimal_bitstrings are basis indices under the repo bit convention
    (bit i = 0 means spin +1); the set is closed under the global flip, so
    degeneracy is always even.
    """

    min_diff: int
    optimal_bitstrings: tuple[int, ...]
    degeneracy: int
    is_perfect: bool


def generate_instance(n: int, seed: int) -> NppInstance:
    """Draw n integers i.i.d. uniform on [1, 2^n], reproducibly.

    PRNG: numpy's Philox counter-based generator keyed by the seed.  Raw
    64-bit words are masked down to the requested power-of-two range, which
    is exactly uniform (the rejection step below never triggers for a
    power-of-two range but keeps the mapping correct for any range).
    """
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n = {n} outside supported range [1, {MAX_N}]")
    bitgen = np.random.Philox(key=seed)
    numbers = tuple(int(v) + 1 for v in _uniform_below(bitgen, 1 << n, n))
    return NppInstance(n=n, numbers=numbers, seed=seed)


def _uniform_below(bitgen, upper: int, count: int) -> list[int]:
    """count i.i.d. uniform draws on [0, upper) from masked 64-bit words."""
    mask = (1 << int(upper - 1).bit_length()) - 1 if upper > 1 else 0
    out: list[int] = []
    while len(out) < count:
        for word in bitgen.random_raw(count - len(out)):
            v = int(word) & mask
            if v < upper:
                out.append(v)
    return out


def solve_exact(inst: NppInstance) -> GroundTruth:
    """Exhaustive enumeration of all 2^n sign assignments, in exact integers."""
    if inst.n > MAX_N:
        raise ValueError(f"n = {inst.n} exceeds enumeration cap {MAX_N}")
    sums = signed_sums(np.asarray(inst.numbers, dtype=np.int64))
    diffs = np.abs(sums)
    min_diff = int(diffs.min())
    optimal = np.flatnonzero(diffs == min_diff)
    return GroundTruth(
        min_diff=min_diff,
        optimal_bitstrings=tuple(int(b) for b in optimal),
        degeneracy=len(optimal),
        is_perfect=min_diff <= 1,
    )


def save_instances(instances: list[NppInstance], path) -> None:
    """Write a bank in the line-oriented `npp v1` format (UTF-8, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_HEADER + "\n")
        for inst in instances:
            nums = ",".join(str(v) for v in inst.numbers)
            fh.write(f"n={inst.n} seed={inst.seed} kappa={KAPPA} numbers={nums}\n")


def load_instances(path) -> list[NppInstance]:
    """Read a bank written by save_instances; malformed input raises ValueError
    naming the offending line and field."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != _HEADER:
        raise ValueError(f"line 1: expected header '{_HEADER}'")
    out: list[NppInstance] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(_parse_line(line, lineno))
    return out


def _parse_line(line: str, lineno: int) -> NppInstance:
    fields: dict[str, str] = {}
    for token in line.split():
        if "=" not in token:
            raise ValueError(f"line {lineno}: token '{token}' is not key=value")
        key, _, value = token.partition("=")
        fields[key] = value
    for key in ("n", "seed", "kappa", "numbers"):
        if key not in fields:
            raise ValueError(f"line {lineno}: missing field '{key}'")
    try:
        n = int(fields["n"])
        seed = int(fields["seed"])
        kappa = int(fields["kappa"])
        numbers = tuple(int(v) for v in fields["numbers"].split(","))
    except ValueError as exc:
        raise ValueError(f"line {lineno}: {exc}") from None
    if kappa != KAPPA:
        raise ValueError(f"line {lineno}: field 'kappa' must be {KAPPA}, got {kappa}")
    try:
        return NppInstance(n=n, numbers=numbers, seed=seed)
    except ValueError as exc:
        raise ValueError(f"line {lineno}: {exc}") from None
