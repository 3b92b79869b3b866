"""Key generation, evaluation, and decoding of the compact point scheme."""

import itertools
from math import comb

import pytest

from dpfkit.algebra import Modulus, parse_modulus
from dpfkit.dpf import (
    GRID_SQUARE,
    DpfKey,
    PointDescription,
    SchemeParams,
    choose_grid,
    decode,
    eval_all,
    eval_point,
    gen,
    matrix_of_shares,
    share_value,
)
from dpfkit.errors import HonestMajorityError, ParameterError
from dpfkit.keyfile import key_to_bytes
from dpfkit.prg import PRG_TEST_LCG, DeterministicRandomSource


def _make(parties, corrupted, modulus_text, domain, **kw):
    return SchemeParams.create(
        parties=parties,
        corrupted=corrupted,
        modulus=parse_modulus(modulus_text),
        domain_size=domain,
        **kw,
    )


def _decode_all(keys, n):
    return [
        decode([eval_point(k, x) for k in keys]).lift() for x in range(n)
    ]


class TestParams:
    def test_create_picks_covering_grid(self):
        params = _make(3, 1, "5", 20)
        assert params.rows * params.cols >= 20
        assert params.combo_count == comb(3, 2)
        assert params.tuples_per_row == comb(2, 1)

    def test_square_grid(self):
        params = _make(3, 1, "5", 13, grid=GRID_SQUARE)
        assert (params.rows, params.cols) == (4, 4)

    def test_explicit_grid(self):
        params = _make(3, 1, "5", 12, grid=(3, 4))
        assert (params.rows, params.cols) == (3, 4)
        with pytest.raises(ParameterError):
            _make(3, 1, "5", 13, grid=(3, 4))

    def test_bad_counts_rejected(self):
        for parties, corrupted in ((1, 1), (3, 0), (3, 3), (3, 4)):
            with pytest.raises(ParameterError):
                _make(parties, corrupted, "5", 4)

    def test_domain_bounds(self):
        with pytest.raises(ParameterError):
            _make(3, 1, "5", 0)
        _make(3, 1, "5", 1)

    def test_dishonest_majority_params_constructible(self):
        # the type allows m >= p/2 so reference schemes can use it;
        # gen() is where the bound is enforced
        params = _make(4, 2, "5", 4)
        assert not params.honest_majority

    def test_used_rows_partial_last_row(self):
        params = _make(3, 1, "5", 10, grid=(5, 4))
        assert params.used_rows() == 3

    def test_member_columns_partition(self):
        params = _make(5, 2, "7", 9)
        seen = []
        for party in range(5):
            cols = params.member_columns(party)
            assert len(cols) == params.tuples_per_row
            seen.extend(cols)
        # every column has exactly m+1 members
        for j in range(params.combo_count):
            assert seen.count(j) == 3


class TestSharing:
    def test_share_value_sums_back(self, rng):
        m = parse_modulus("2*3*5")
        for count in (2, 3, 7):
            val = m.random_element(rng)
            shares = share_value(val, count, rng)
            assert len(shares) == count
            assert decode(shares).lift() == val.lift()

    def test_matrix_columns_share_the_secret(self, rng):
        params = _make(5, 2, "2*3", 9)
        for secret in (params.modulus.zero(), params.modulus.one()):
            matrix = matrix_of_shares(secret, params, rng)
            for j in range(params.combo_count):
                column = matrix.column(j)
                held = [s for s in column if s is not None]
                assert len(held) == 3
                assert decode(held).lift() == secret.lift()

    def test_matrix_rejects_non_bit_secret(self, rng):
        params = _make(3, 1, "5", 4)
        with pytest.raises(ParameterError):
            matrix_of_shares(params.modulus.element(2), params, rng)


@pytest.mark.parametrize("modulus_text", ["2", "3", "257", "2*3*5", "15"])
@pytest.mark.parametrize("parties,corrupted", [(3, 1), (4, 1), (5, 2)])
def test_point_function_round_trip(parties, corrupted, modulus_text, rng):
    modulus = parse_modulus(modulus_text)
    n = 10
    params = _make(parties, corrupted, modulus_text, n)
    for alpha in (0, 3, n - 1):
        beta = modulus.element(rng.randrange(1, modulus.value))
        keys = gen(PointDescription(alpha, beta), params, rng)
        assert len(keys) == parties
        expected = [beta.lift() if x == alpha else 0 for x in range(n)]
        assert _decode_all(keys, n) == expected


def test_single_point_domain(rng):
    params = _make(3, 1, "7", 1)
    keys = gen(PointDescription(0, params.modulus.element(4)), params, rng)
    assert _decode_all(keys, 1) == [4]


def test_zero_beta_shares_zero_function(rng):
    params = _make(3, 1, "5", 6)
    keys = gen(PointDescription(2, params.modulus.zero()), params, rng)
    assert _decode_all(keys, 6) == [0] * 6


def test_eval_all_matches_pointwise(rng):
    params = _make(5, 2, "2*3*5", 40, grid=(7, 6))
    keys = gen(PointDescription(17, params.modulus.element(23)), params, rng)
    for key in keys:
        vec = eval_all(key)
        assert len(vec) == 40
        assert vec.lift_all() == [eval_point(key, x).lift() for x in range(40)]


def test_single_share_reveals_nothing_exact(rng):
    # one key's evaluation is NOT the function (p-of-p sharing)
    params = _make(3, 1, "257", 8)
    keys = gen(PointDescription(5, params.modulus.element(99)), params, rng)
    single = eval_all(keys[0]).lift_all()
    truth = [99 if x == 5 else 0 for x in range(8)]
    assert single != truth


def test_gen_requires_honest_majority(rng):
    params = _make(4, 2, "5", 4)
    with pytest.raises(HonestMajorityError, match="m < p/2"):
        gen(PointDescription(0, params.modulus.one()), params, rng)


def test_point_description_validation(rng):
    params = _make(3, 1, "5", 4)
    with pytest.raises(ParameterError):
        gen(PointDescription(4, params.modulus.one()), params, rng)
    with pytest.raises(ParameterError):
        gen(PointDescription(-1, params.modulus.one()), params, rng)
    with pytest.raises(ParameterError):
        gen(PointDescription(0, Modulus.prime(7).one()), params, rng)


def test_eval_point_range_check(rng):
    params = _make(3, 1, "5", 4)
    keys = gen(PointDescription(0, params.modulus.one()), params, rng)
    with pytest.raises(ParameterError):
        eval_point(keys[0], 4)
    with pytest.raises(ParameterError):
        eval_point(keys[0], -1)


def test_decode_share_count_check(rng):
    m = parse_modulus("5")
    shares = [m.element(1), m.element(2)]
    assert decode(shares, expected_count=2).lift() == 3
    with pytest.raises(ParameterError):
        decode(shares, expected_count=3)
    with pytest.raises(ParameterError):
        decode([])


def test_key_structure(rng):
    params = _make(5, 2, "7", 30, grid=(5, 6))
    keys = gen(PointDescription(11, params.modulus.element(3)), params, rng)
    for key in keys:
        assert isinstance(key, DpfKey)
        assert len(key.row_payloads) == 5
        for row in key.row_payloads:
            assert len(row) == params.tuples_per_row
            for seed, share in row:
                assert len(seed) == params.lambda_bits // 8
                assert share.modulus == params.modulus
        assert len(key.correction) == params.cols


def test_parties_share_column_seeds(rng):
    # members of the same column subset must hold the same seed
    params = _make(4, 1, "5", 8, grid=(2, 4))
    keys = gen(PointDescription(3, params.modulus.one()), params, rng)
    combos = params.combinations
    for row in range(params.rows):
        for j, subset in enumerate(combos):
            seeds = set()
            for party in subset:
                cols = params.member_columns(party)
                seeds.add(keys[party].row_payloads[row][cols.index(j)][0])
            assert len(seeds) == 1


def test_deterministic_generation_is_byte_stable():
    params = _make(3, 1, "2*3*5", 12)
    point = PointDescription(7, params.modulus.element(19))
    blobs = []
    for _ in range(2):
        rng = DeterministicRandomSource("stable")
        keys = gen(point, params, rng)
        blobs.append(tuple(key_to_bytes(k) for k in keys))
    assert blobs[0] == blobs[1]


def test_test_prg_round_trip(rng):
    params = _make(3, 1, "17", 9, prg_algorithm=PRG_TEST_LCG)
    keys = gen(PointDescription(4, params.modulus.element(12)), params, rng)
    assert _decode_all(keys, 9) == [12 if x == 4 else 0 for x in range(9)]


class TestChooseGrid:
    def test_auto_known_value(self):
        rows, cols = choose_grid(
            10 ** 6, 7, 3, 128, Modulus.prime(2 ** 31 - 1), "auto"
        )
        assert (rows, cols) == (99, 10102)

    def test_square(self):
        assert choose_grid(16, 3, 1, 128, Modulus.prime(5), "square") == (4, 4)
        assert choose_grid(17, 3, 1, 128, Modulus.prime(5), "square") == (5, 5)

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            choose_grid(16, 3, 1, 128, Modulus.prime(5), "hex")


def test_exhaustive_tiny_all_alpha(rng):
    # every (alpha, x) pair over a couple of tiny configurations
    for modulus_text, parties, corrupted in (("2", 3, 1), ("3", 5, 2)):
        modulus = parse_modulus(modulus_text)
        n = 6
        params = _make(parties, corrupted, modulus_text, n)
        for alpha in range(n):
            beta = modulus.element(1)
            keys = gen(PointDescription(alpha, beta), params, rng)
            assert _decode_all(keys, n) == [
                1 if x == alpha else 0 for x in range(n)
            ]
