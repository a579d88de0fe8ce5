"""Code constructions, packet encode/recover, and MDS certification."""

import itertools
import random

import numpy as np
import pytest

from coopcode.ffmat import FfMatrix
from coopcode.gf import field_new
from coopcode.netcode import (
    FieldTooSmallError,
    PacketSpec,
    bits_to_symbols,
    build_cauchy,
    build_explicit,
    build_random,
    build_vandermonde,
    dump_code,
    encode,
    load_code,
    mds_check,
    min_distance,
    recover,
    symbols_to_bits,
)

F2 = field_new(1)
F4 = field_new(2)
F8 = field_new(3)
F16 = field_new(4)

# Stacking V(2x2)^-1 behind V(2x2) with points 0,1,2,3 over GF(4) gives
# these relay rows; frozen from a hand evaluation of the two products.
EXPECTED_VANDERMONDE_22 = [[1, 0], [0, 1], [3, 2], [2, 3]]

# Bit-level view of the same relay block: with symbols packed as
# (high bit, low bit), the relay output bits are this GF(2) matrix times
# (b11, b12, b21, b22).
RELAY_BIT_MATRIX = [[0, 1, 1, 1], [1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1]]


def test_vandermonde_worked_example_exact():
    code = build_vandermonde(2, 2, F4)
    assert code.matrix.to_lists() == EXPECTED_VANDERMONDE_22
    assert code.certified_kappa == 2
    assert code.construction == "vandermonde"


def test_vandermonde_relay_bitmap_all_16_patterns():
    code = build_vandermonde(2, 2, F4)
    for bits in itertools.product((0, 1), repeat=4):
        theta = FfMatrix(F4, [[s] for s in bits_to_symbols(list(bits), 2)])
        relay_syms = [row[0] for row in encode(code, theta).to_lists()[2:]]
        got = symbols_to_bits(relay_syms, 2)
        want = [sum(r * b for r, b in zip(rrow, bits)) % 2 for rrow in RELAY_BIT_MATRIX]
        assert got == want, bits


def test_vandermonde_minimal_cases():
    assert build_vandermonde(1, 1, F2).matrix.to_lists() == [[1], [1]]
    with pytest.raises(FieldTooSmallError):
        build_vandermonde(3, 2, F4)  # q=4 < N+M=5


def test_cauchy_constructions():
    code = build_cauchy(1, 1, F4)
    assert code.matrix.to_lists()[0] == [1]
    assert code.matrix.to_lists()[1][0] != 0
    assert code.matrix.kruskal_rank() == 1

    code = build_cauchy(2, 2, F16)
    assert code.matrix.kruskal_rank() == 2
    assert mds_check(code)


def test_cauchy_field_too_small():
    with pytest.raises(FieldTooSmallError, match="N\\+M"):
        build_cauchy(3, 2, F4)  # q=4 < 5
    # q = N+M passes the size precheck but reuses a generator power
    with pytest.raises(FieldTooSmallError, match="q >= 5"):
        build_cauchy(2, 2, F4)


def test_random_code_determinism_and_shape():
    a = build_random(2, 2, F16, seed=7)
    b = build_random(2, 2, F16, seed=7)
    assert a.matrix == b.matrix
    assert a.certified_kappa is None
    assert build_random(2, 2, F16, seed=8).matrix != a.matrix
    tiny = build_random(2, 1, F2, seed=0)
    assert tiny.matrix.rows == 3 and tiny.matrix.cols == 2


def test_random_code_rank_deficiency_exact_fraction_q4():
    # Exhausting all q^(M*N) = 256 relay blocks over GF(4) for N=M=2:
    # P(kappa < 2) = 5/q - 9/q^2 + 7/q^3 - 2/q^4 = 202/256.  Counted here
    # independently by enumerating blocks and checking kappa directly.
    deficient = 0
    top = FfMatrix.identity(F4, 2)
    for entries in itertools.product(range(4), repeat=4):
        relay = FfMatrix(F4, [list(entries[:2]), list(entries[2:])])
        code = build_explicit(top.vstack(relay), 2)
        if code.matrix.kruskal_rank() < 2:
            deficient += 1
    assert deficient == 202
    assert deficient / 256 == 5 / 4 - 9 / 16 + 7 / 64 - 2 / 256


def test_random_single_square_submatrix_deficiency_bounded_by_n_over_q():
    # Any one N x N row subset of a random code is singular with
    # probability at most N/q; checked empirically per subset at q=16.
    n = m = 2
    trials = 4000
    counts = {rows: 0 for rows in itertools.combinations(range(n + m), n)}
    for seed in range(trials):
        mat = build_random(n, m, F16, seed=seed).matrix
        for rows in counts:
            if mat.row_submatrix(rows).rank() < n:
                counts[rows] += 1
    bound = n / F16.order
    for rows, cnt in counts.items():
        p_hat = cnt / trials
        sigma = (bound * (1 - bound) / trials) ** 0.5
        assert p_hat <= bound + 3 * sigma, (rows, p_hat)


def test_encode_matches_hand_combination():
    code = build_vandermonde(2, 2, F4)
    theta = FfMatrix(F4, [[2], [1]])
    out = encode(code, theta)
    assert out.to_lists()[:2] == [[2], [1]]  # systematic prefix
    # relay rows: (3*2 + 2*1, 2*2 + 3*1) = (1+2, 3+3) = (3, 0)
    assert out.to_lists()[2:] == [[3], [0]]


def test_encode_zero_packets():
    code = build_vandermonde(2, 2, F4)
    z = FfMatrix.zeros(F4, 2, 3)
    assert encode(code, z) == FfMatrix.zeros(F4, 4, 3)


def test_recover_multicast_from_relay_rows_only():
    code = build_vandermonde(2, 2, F4)
    rng = random.Random(3)
    for _ in range(20):
        theta = FfMatrix(F4, [[rng.randrange(4)] for _ in range(2)])
        pi = encode(code, theta)
        obs = pi.row_submatrix([2, 3])
        assert recover(code, [2, 3], obs) == theta


def test_recover_multicast_rank_deficient_returns_none():
    code = build_vandermonde(2, 2, F4)
    theta = FfMatrix(F4, [[1], [2]])
    pi = encode(code, theta)
    assert recover(code, [0], pi.row_submatrix([0])) is None


def test_recover_unicast():
    code = build_vandermonde(2, 2, F4)
    theta = FfMatrix(F4, [[1], [3]])
    pi = encode(code, theta)
    # row 1 alone carries e_1 but not e_0
    assert recover(code, [1], pi.row_submatrix([1]), "unicast", dest=0) is None
    got = recover(code, [1], pi.row_submatrix([1]), "unicast", dest=1)
    assert got.to_lists() == [[3]]
    # two relay rows span everything
    got = recover(code, [2, 3], pi.row_submatrix([2, 3]), "unicast", dest=0)
    assert got.to_lists() == [[1]]
    with pytest.raises(ValueError):
        recover(code, [0], pi.row_submatrix([0]), "unicast", dest=5)


def test_recover_roundtrip_random_subsets():
    rng = random.Random(17)
    code = build_cauchy(3, 3, F16)
    spec = PacketSpec(ell=4, blocks=2)
    for _ in range(25):
        theta = FfMatrix(
            F16, [[rng.randrange(16) for _ in range(spec.blocks)] for _ in range(3)]
        )
        pi = encode(code, theta)
        rows = rng.sample(range(6), rng.randrange(3, 7))
        got = recover(code, rows, pi.row_submatrix(rows))
        assert got == theta  # any >=3 rows of a kappa=3 code decode


def test_mds_check_and_min_distance():
    code = build_vandermonde(2, 2, F4)
    assert mds_check(code)
    assert min_distance(code) == 3  # [4,2] MDS: d = n-k+1

    dup = build_explicit(
        FfMatrix(F4, [[1, 0], [0, 1], [3, 2], [3, 2]]), 2
    )
    assert not mds_check(dup)
    assert min_distance(dup) == 2


def test_mds_check_cap():
    code = build_random(7, 6, F16, seed=0)
    with pytest.raises(ValueError, match="capped"):
        mds_check(code)


def test_strategy_b_zeroing_never_helps_multicast_on_certified_codes():
    # Any received set of full rows from a kappa=N code already has the
    # maximum possible rank min(#rows, N); zeroing relay coefficients can
    # only lower it, so multicast decodability never improves.
    rng = random.Random(5)
    for code in (build_vandermonde(2, 2, F4), build_cauchy(2, 3, F16)):
        n = code.n_sources
        total = n + code.n_relays
        for _ in range(200):
            rows = rng.sample(range(total), rng.randrange(1, total + 1))
            full = code.matrix.row_submatrix(rows)
            zeroed = [
                [v if (idx < n or rng.random() < 0.5) else 0 for v in row]
                for idx, row in zip(rows, full.to_lists())
            ]
            rank_zeroed = FfMatrix(code.field, zeroed).rank()
            assert rank_zeroed <= full.rank()
            if full.rank() < n:
                assert rank_zeroed < n


def test_dump_load_roundtrip():
    for code in (build_vandermonde(2, 2, F4), build_random(3, 2, F8, seed=9)):
        text = dump_code(code)
        back = load_code(text)
        assert back.matrix == code.matrix
        assert back.construction == code.construction
        assert back.certified_kappa == code.certified_kappa
        assert (back.n_sources, back.n_relays) == (code.n_sources, code.n_relays)


def test_packet_spec_and_bit_helpers():
    spec = PacketSpec(ell=4, blocks=3)
    assert spec.bits == 12
    with pytest.raises(ValueError):
        PacketSpec(ell=0, blocks=1)
    bits = [1, 0, 1, 1, 0, 0, 1, 0]
    assert symbols_to_bits(bits_to_symbols(bits, 4), 4) == bits
    assert bits_to_symbols([1, 0], 2) == [2]  # MSB first
    with pytest.raises(ValueError):
        bits_to_symbols([1, 0, 1], 2)
    with pytest.raises(ValueError):
        symbols_to_bits([4], 2)


def test_systematic_top_block_enforced():
    with pytest.raises(ValueError):
        build_explicit(FfMatrix(F4, [[1, 1], [0, 1], [2, 3]]), 2)
