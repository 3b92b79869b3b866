"""Honest-majority distributed point function.

The domain [0, N) is laid out as a rows x cols grid.  For every grid row
the dealer builds a small matrix of additive shares: one column per
(m+1)-subset of the p parties, each column holding a fresh additive
sharing of 1 on the target row and of 0 on every other row, supported
only on that column's subset.  Every column also carries one short seed,
handed to exactly the parties in its subset.  A single public correction
vector W fixes the target row so that the sum over all parties of

    share[party, 0] * W + sum_j share[party, j] * G(seed[row, j])

equals beta at the target column and zero elsewhere (G is the seed
expansion from `prg`).  Because the coalition bound m is below p/2,
every row has at least one column whose subset contains no corrupted
party, and that column's unexpanded seed masks W.

A key stores, per row, only the (seed, share) pairs for the columns that
contain its party: C(p-1, m) pairs out of the C(p, m+1) columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb, isqrt
from typing import Iterable, Sequence

import numpy as np

from . import prg
from .algebra import (
    FieldElement,
    FieldVector,
    Modulus,
    all_combinations,
    member_columns,
    minimize_grid,
)
from .errors import HonestMajorityError, ParameterError
from .prg import PrgSpec, expand, sample_seed

GRID_AUTO = "auto"
GRID_SQUARE = "square"


@dataclass(frozen=True)
class SchemeParams:
    """Shared parameters; identical across all keys of one generation."""

    parties: int
    corrupted: int
    lambda_bits: int
    modulus: Modulus
    domain_size: int
    rows: int
    cols: int
    prg: PrgSpec

    def __post_init__(self) -> None:
        if not 2 <= self.parties < 2 ** 16:
            raise ParameterError(f"party count {self.parties} out of range")
        if not 1 <= self.corrupted < self.parties:
            raise ParameterError(
                f"corruption bound {self.corrupted} must be in [1, {self.parties})"
            )
        if self.lambda_bits % 8 != 0 or not 8 <= self.lambda_bits <= 65535:
            raise ParameterError(f"bad seed length {self.lambda_bits} bits")
        if not 1 <= self.domain_size < 2 ** 64:
            raise ParameterError(f"domain size {self.domain_size} out of range")
        if not 1 <= self.rows < 2 ** 32 or not 1 <= self.cols < 2 ** 32:
            raise ParameterError(f"bad grid {self.rows}x{self.cols}")
        if self.rows * self.cols < self.domain_size:
            raise ParameterError(
                f"grid {self.rows}x{self.cols} does not cover domain {self.domain_size}"
            )
        if self.prg.output_len != self.cols:
            raise ParameterError("prg output length must equal the column count")
        if self.prg.lambda_bits != self.lambda_bits:
            raise ParameterError("prg seed length disagrees with params")
        if self.prg.modulus != self.modulus:
            raise ParameterError("prg modulus disagrees with params")

    @classmethod
    def create(
        cls,
        parties: int,
        corrupted: int,
        modulus: Modulus,
        domain_size: int,
        lambda_bits: int = 128,
        grid: str | tuple[int, int] = GRID_AUTO,
        prg_algorithm: int = prg.PRG_SHAKE128,
    ) -> "SchemeParams":
        if isinstance(grid, str):
            rows, cols = choose_grid(
                domain_size, parties, corrupted, lambda_bits, modulus, grid
            )
        else:
            rows, cols = grid
        spec = PrgSpec(prg_algorithm, lambda_bits, cols, modulus)
        return cls(
            parties=parties,
            corrupted=corrupted,
            lambda_bits=lambda_bits,
            modulus=modulus,
            domain_size=domain_size,
            rows=rows,
            cols=cols,
            prg=spec,
        )

    @cached_property
    def combo_count(self) -> int:
        """Columns per row: C(parties, corrupted+1)."""
        return comb(self.parties, self.corrupted + 1)

    @cached_property
    def tuples_per_row(self) -> int:
        """Pairs stored per key and row: C(parties-1, corrupted)."""
        return comb(self.parties - 1, self.corrupted)

    @property
    def honest_majority(self) -> bool:
        return 2 * self.corrupted < self.parties

    @property
    def combinations(self) -> tuple[tuple[int, ...], ...]:
        return all_combinations(self.parties, self.corrupted + 1)

    def member_columns(self, party: int) -> tuple[int, ...]:
        return member_columns(self.parties, self.corrupted + 1, party)

    def used_rows(self) -> int:
        """Rows that actually contain domain points (the last may be partial)."""
        return -(-self.domain_size // self.cols)


@dataclass(frozen=True)
class PointDescription:
    """The point function x -> beta * [x == alpha]."""

    alpha: int
    beta: FieldElement

    def validate(self, params: SchemeParams) -> None:
        if not 0 <= self.alpha < params.domain_size:
            raise ParameterError(
                f"alpha {self.alpha} outside domain [0, {params.domain_size})"
            )
        if self.beta.modulus != params.modulus:
            raise ParameterError("beta modulus disagrees with params")


@dataclass(frozen=True)
class ShareMatrix:
    """parties x combo_count grid of shares produced at generation time.

    Cells outside a column's subset hold None (a structural zero, nothing
    is ever stored or sent for them); cells inside the subset hold field
    elements that may well be the value zero.
    """

    params: SchemeParams
    secret: FieldElement
    cells: tuple[tuple[FieldElement | None, ...], ...]

    def column(self, j: int) -> tuple[FieldElement | None, ...]:
        return tuple(self.cells[i][j] for i in range(self.params.parties))


def share_value(value: FieldElement, count: int, rng) -> list[FieldElement]:
    """Additive sharing of `value` into `count` shares."""
    if count < 1:
        raise ParameterError(f"share count must be >= 1, got {count}")
    modulus = value.modulus
    shares = [modulus.random_element(rng) for _ in range(count - 1)]
    running = modulus.zero()
    for s in shares:
        running = running + s
    shares.append(value - running)
    return shares


def matrix_of_shares(secret: FieldElement, params: SchemeParams, rng) -> ShareMatrix:
    """Fresh share matrix for one grid row.

    Every column holds an independent additive (corrupted+1)-sharing of
    `secret`, assigned to the column's subset members in ascending order.
    """
    if secret.modulus != params.modulus:
        raise ParameterError("secret modulus disagrees with params")
    if not (secret.is_zero or secret == params.modulus.one()):
        raise ParameterError("row secret must be the field's zero or one")
    p = params.parties
    grid: list[list[FieldElement | None]] = [
        [None] * params.combo_count for _ in range(p)
    ]
    for j, subset in enumerate(params.combinations):
        shares = share_value(secret, len(subset), rng)
        for member, share in zip(subset, shares):
            grid[member][j] = share
        if __debug__:
            total = params.modulus.zero()
            for s in shares:
                total = total + s
            assert total == secret, "column sharing does not sum to the secret"
    return ShareMatrix(
        params=params,
        secret=secret,
        cells=tuple(tuple(row) for row in grid),
    )


@dataclass(frozen=True)
class DpfKey:
    """One party's key: per-row (seed, share) pairs plus the shared correction."""

    party: int
    params: SchemeParams
    row_payloads: tuple[tuple[tuple[bytes, FieldElement], ...], ...]
    correction: FieldVector

    def __post_init__(self) -> None:
        if not 0 <= self.party < self.params.parties:
            raise ParameterError(f"party {self.party} out of range")
        if len(self.row_payloads) != self.params.rows:
            raise ParameterError("row payload count disagrees with grid")
        expected = self.params.tuples_per_row
        for row in self.row_payloads:
            if len(row) != expected:
                raise ParameterError(
                    f"each row must carry {expected} seed/share pairs"
                )
        if len(self.correction) != self.params.cols:
            raise ParameterError("correction length disagrees with grid")


@dataclass(frozen=True)
class CoalitionView:
    """The keys a coalition would hold, real or simulated."""

    coalition: frozenset[int]
    keys: tuple[DpfKey, ...]


def choose_grid(
    domain_size: int,
    parties: int,
    corrupted: int,
    lambda_bits: int,
    modulus: Modulus,
    mode: str = GRID_AUTO,
) -> tuple[int, int]:
    """Pick the grid shape for a domain of `domain_size` points.

    Auto mode minimizes the exact per-key bit count

        rows * C(parties-1, corrupted) * (lambda + sum_i ceil(lg q_i))
        + cols * sum_i ceil(lg q_i)

    subject to rows*cols >= domain_size, breaking ties toward fewer rows.
    Square mode returns ceil(sqrt(N)) for both sides.
    """
    if mode == GRID_SQUARE:
        side = isqrt(domain_size)
        if side * side < domain_size:
            side += 1
        return side, side
    if mode != GRID_AUTO:
        raise ParameterError(f"unknown grid mode {mode!r}")
    bits = modulus.residue_bits
    row_cost = comb(parties - 1, corrupted) * (lambda_bits + bits)
    rows, cols, _ = minimize_grid(domain_size, row_cost, bits)
    return rows, cols


def _require_honest_majority(params: SchemeParams) -> None:
    if not params.honest_majority:
        raise HonestMajorityError(
            f"m must satisfy m < p/2 (got m={params.corrupted}, p={params.parties})"
        )


def _distinct_seeds(params: SchemeParams, rng) -> list[list[bytes]]:
    seen: set[bytes] = set()
    out: list[list[bytes]] = []
    for _ in range(params.rows):
        row = []
        for _ in range(params.combo_count):
            while True:
                s = sample_seed(params.lambda_bits, rng)
                if s not in seen:
                    seen.add(s)
                    row.append(s)
                    break
        out.append(row)
    return out


def gen(point: PointDescription, params: SchemeParams, rng) -> tuple[DpfKey, ...]:
    """Produce one key per party for the given point function."""
    _require_honest_majority(params)
    point.validate(params)
    target_row, target_col = divmod(point.alpha, params.cols)

    seeds = _distinct_seeds(params, rng)
    one = params.modulus.one()
    zero = params.modulus.zero()
    matrices = [
        matrix_of_shares(one if row == target_row else zero, params, rng)
        for row in range(params.rows)
    ]

    total = FieldVector.zeros(params.modulus, params.cols)
    for seed in seeds[target_row]:
        total = total + expand(seed, params.prg)
    correction = (
        FieldVector.unit(params.modulus, params.cols, target_col, point.beta) - total
    )

    keys = []
    for party in range(params.parties):
        cols = params.member_columns(party)
        payloads = tuple(
            tuple(
                (seeds[row][j], matrices[row].cells[party][j]) for j in cols
            )
            for row in range(params.rows)
        )
        keys.append(
            DpfKey(
                party=party,
                params=params,
                row_payloads=payloads,
                correction=correction,
            )
        )
    return tuple(keys)


def _scalar_column(element: FieldElement) -> np.ndarray:
    return np.array(element.residues, dtype=np.uint64).reshape(-1, 1)


def _eval_row(key: DpfKey, row: int) -> np.ndarray:
    """This party's share vector for one grid row, shape (factors, cols)."""
    params = key.params
    qs = params.modulus._qs_np
    cols = params.member_columns(key.party)
    payload = key.row_payloads[row]
    if cols[0] == 0:
        # This party holds column 0, whose share also multiplies the
        # public correction vector.
        acc = (key.correction.data * _scalar_column(payload[0][1])) % qs
    else:
        acc = np.zeros_like(key.correction.data)
    for seed, share in payload:
        vec = expand(seed, params.prg)
        acc = (acc + vec.data * _scalar_column(share)) % qs
    return acc


def eval_point(key: DpfKey, x: int) -> FieldElement:
    """This party's additive share of f(x)."""
    params = key.params
    if not 0 <= x < params.domain_size:
        raise ParameterError(f"input {x} outside domain [0, {params.domain_size})")
    row, col = divmod(x, params.cols)
    data = _eval_row(key, row)
    return FieldElement(params.modulus, tuple(int(v) for v in data[:, col]))


def eval_all(key: DpfKey) -> FieldVector:
    """Shares for every domain point, expanding each held seed exactly once.

    Only rows that contain domain points are evaluated, so the expansion
    count is used_rows() * C(parties-1, corrupted); with an auto grid
    used_rows() equals the row count.
    """
    params = key.params
    n = params.domain_size
    out = np.empty((len(params.modulus.factors), n), dtype=np.uint64)
    for row in range(params.used_rows()):
        data = _eval_row(key, row)
        start = row * params.cols
        width = min(params.cols, n - start)
        out[:, start : start + width] = data[:, :width]
    return FieldVector._raw(params.modulus, out)


def decode(shares: Sequence[FieldElement], expected_count: int | None = None) -> FieldElement:
    """Combine the parties' output shares by component-wise addition."""
    if len(shares) == 0:
        raise ParameterError("cannot decode an empty share list")
    if expected_count is not None and len(shares) != expected_count:
        raise ParameterError(
            f"expected {expected_count} shares, got {len(shares)}"
        )
    total = shares[0]
    for s in shares[1:]:
        total = total + s
    return total


def check_seed_coverage(parties: int, corrupted: int, coalition: Iterable[int]) -> bool:
    """True when some column's subset avoids the coalition entirely.

    That column's seed is unknown to every coalition member and is what
    keeps the correction vector masked.  With an honest majority this
    holds for every coalition of size `corrupted`; once the coalition
    reaches p - m members (always true at size ceil(p/2) when m >= p/2),
    every column is covered and the argument collapses.
    """
    members = frozenset(coalition)
    for member in members:
        if not 0 <= member < parties:
            raise ParameterError(f"coalition member {member} out of range")
    return any(
        not members.intersection(subset)
        for subset in all_combinations(parties, corrupted + 1)
    )


def simulate_coalition_view(
    params: SchemeParams, coalition: Iterable[int], rng
) -> CoalitionView:
    """Sample a coalition's keys from scratch, without any point function.

    Seeds are uniform (one per row/column pair the coalition can see,
    shared between members of the same column), shares are uniform and
    independent, and the correction vector is uniform.  For any coalition
    within the corruption bound this matches the distribution of real
    keys, which is the whole privacy argument; the byte layout is
    identical to real keys by construction.
    """
    members = tuple(sorted(set(coalition)))
    if len(members) > params.corrupted:
        raise ParameterError(
            f"coalition of {len(members)} exceeds corruption bound {params.corrupted}"
        )
    for member in members:
        if not 0 <= member < params.parties:
            raise ParameterError(f"coalition member {member} out of range")

    correction = FieldVector.random(params.modulus, params.cols, rng)
    visible = sorted(
        {j for member in members for j in params.member_columns(member)}
    )
    seeds: list[dict[int, bytes]] = []
    for _ in range(params.rows):
        seeds.append({j: sample_seed(params.lambda_bits, rng) for j in visible})

    keys = []
    for member in members:
        cols = params.member_columns(member)
        payloads = tuple(
            tuple(
                (seeds[row][j], params.modulus.random_element(rng)) for j in cols
            )
            for row in range(params.rows)
        )
        keys.append(
            DpfKey(
                party=member,
                params=params,
                row_payloads=payloads,
                correction=correction,
            )
        )
    return CoalitionView(coalition=frozenset(members), keys=tuple(keys))
