"""Systematic network codes for N-source, M-relay cooperation.

A code is an (N+M) x N matrix A over GF(2^l) whose top block is the
identity: row k < N is source k's own packet, row N+i is the linear
combination relay i forwards.  Decodability at a receiver that collected
a subset of rows reduces to rank (all packets) or row-span membership
(one packet).  Full diversity means every N rows of A are independent,
i.e. kruskal_rank(A) == N; the Cauchy and Vandermonde builders below
guarantee that by construction.
"""

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .gf import Field, field_new
from .ffmat import FfMatrix, load_matrix

MDS_EXHAUSTIVE_CAP = 12  # N+M above this makes subset/codeword checks infeasible


class FieldTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class PacketSpec:
    """Packet framing: ``blocks`` field symbols of ``ell`` bits each."""

    ell: int
    blocks: int

    def __post_init__(self):
        if self.ell < 1 or self.blocks < 1:
            raise ValueError("ell and blocks must be >= 1")

    @property
    def bits(self) -> int:
        return self.ell * self.blocks


def bits_to_symbols(bits, ell: int):
    """Group bits (MSB first per symbol) into field-element ints."""
    if len(bits) % ell:
        raise ValueError(f"bit count {len(bits)} is not a multiple of {ell}")
    out = []
    for off in range(0, len(bits), ell):
        v = 0
        for b in bits[off:off + ell]:
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            v = (v << 1) | b
        out.append(v)
    return out


def symbols_to_bits(symbols, ell: int):
    out = []
    for s in symbols:
        if not 0 <= s < (1 << ell):
            raise ValueError(f"symbol {s} out of range for {ell} bits")
        out.extend((s >> (ell - 1 - t)) & 1 for t in range(ell))
    return out


@dataclass(frozen=True)
class NetworkCode:
    n_sources: int
    n_relays: int
    field: Field
    matrix: FfMatrix           # (N+M) x N, top block I_N
    construction: str          # cauchy | vandermonde | random | explicit
    certified_kappa: int | None  # N for the certified MDS constructions

    def __post_init__(self):
        n, m = self.n_sources, self.n_relays
        if n < 1 or m < 0:
            raise ValueError("need n_sources >= 1 and n_relays >= 0")
        if self.matrix.shape != (n + m, n):
            raise ValueError(
                f"matrix must be {(n + m, n)}, got {self.matrix.shape}"
            )
        if self.matrix.field != self.field:
            raise ValueError("matrix field mismatch")
        eye = FfMatrix.identity(self.field, n)
        if self.matrix.row_submatrix(range(n)) != eye:
            raise ValueError("top block must be the identity")

    @property
    def relay_block(self) -> FfMatrix:
        """The M x N block of relay combination coefficients."""
        n = self.n_sources
        return self.matrix.row_submatrix(range(n, n + self.n_relays))


def _every_n_subset_full_rank(matrix: FfMatrix, n: int) -> bool:
    """Equivalent to kruskal_rank(matrix) == n for an (N+M) x N matrix:
    any fewer-than-N rows sit inside some N-row subset, so one level of
    enumeration settles every smaller level too."""
    for rows in itertools.combinations(range(matrix.rows), n):
        if matrix.row_submatrix(rows).rank() != n:
            return False
    return True


def _stack_code(field, n, m, relay_rows, construction):
    a = FfMatrix.identity(field, n)
    if m:
        a = a.vstack(FfMatrix(field, relay_rows))
    code = NetworkCode(n, m, field, a, construction,
                       certified_kappa=n if construction in ("cauchy", "vandermonde") else None)
    if construction in ("cauchy", "vandermonde") and n + m <= MDS_EXHAUSTIVE_CAP:
        if not _every_n_subset_full_rank(code.matrix, n):
            raise AssertionError(
                f"{construction} construction lost full diversity"
            )
    return code


def build_cauchy(n: int, m: int, field: Field) -> NetworkCode:
    """Relay coefficients from a generalized Cauchy matrix.

    Row i of the relay block is u_i * v_j / (x_i + y_j) with
    x_i = g^(n+m-1-i) and y_j = g^(n-1-j) for the field generator g.
    All n+m powers must be distinct, which needs q >= n+m+1; smaller
    fields produce a zero denominator and are rejected.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    q = field.order
    if q < n + m:
        raise FieldTooSmallError(f"q={q} < N+M={n + m}")
    g = field.generator
    total = n + m
    xs = [field.pow(g, total - 1 - i) for i in range(m)]
    ys = [field.pow(g, total - 1 - m - j) for j in range(n)]
    if len(set(xs) | set(ys)) != total:
        raise FieldTooSmallError(
            f"q={q} gives repeated points and zero denominators; need q >= {total + 1}"
        )
    us = []
    for i in range(m):
        prod = 1
        for l in range(m):
            if l != i:
                prod = field.mul(prod, xs[i] ^ xs[l])
        us.append(field.inv(prod))
    vs = []
    for j in range(n):
        prod = 1
        for l in range(m):
            prod = field.mul(prod, ys[j] ^ xs[l])
        vs.append(prod)
    rows = [
        [field.mul(field.mul(us[i], vs[j]), field.inv(xs[i] ^ ys[j]))
         for j in range(n)]
        for i in range(m)
    ]
    return _stack_code(field, n, m, rows, "cauchy")


def build_vandermonde(n: int, m: int, field: Field) -> NetworkCode:
    """Relay coefficients V_m @ inverse(V_n) from stacked Vandermonde rows.

    The generating points are the first n+m field elements in integer
    order 0, 1, 2, ..., with the convention 0**0 == 1, so the same (n, m, q)
    always yields the same code.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    q = field.order
    if q < n + m:
        raise FieldTooSmallError(f"q={q} < N+M={n + m}")
    pts = list(range(n + m))

    def vrow(t):
        return [field.pow(t, j) for j in range(n)]

    vn = FfMatrix(field, [vrow(t) for t in pts[:n]])
    vm = FfMatrix(field, [vrow(t) for t in pts[n:]])
    alpha = vm @ vn.invert()
    return _stack_code(field, n, m, alpha.to_lists(), "vandermonde")


def build_random(n: int, m: int, field: Field, seed: int) -> NetworkCode:
    """Uniform i.i.d. relay coefficients (zeros allowed), reproducible by seed."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, field.order, size=(m, n)).tolist()
    return _stack_code(field, n, m, rows, "random")


def build_explicit(matrix: FfMatrix, n_sources: int) -> NetworkCode:
    m = matrix.rows - n_sources
    return NetworkCode(n_sources, m, matrix.field, matrix, "explicit", None)


def encode(code: NetworkCode, packets: FfMatrix) -> FfMatrix:
    """All N+M transmissions for an N x K packet matrix (one row per source)."""
    if packets.rows != code.n_sources:
        raise ValueError(f"packets must have {code.n_sources} rows")
    return code.matrix @ packets


def recover(code: NetworkCode, received_rows, observations: FfMatrix,
            mode: str = "multicast", dest: int | None = None) -> FfMatrix | None:
    """Decode from a subset of transmissions.

    ``received_rows`` are 0-based row indices of ``code.matrix``;
    ``observations`` holds the matching received symbol rows.  Multicast
    returns the full N x K packet matrix when those rows have rank N;
    unicast returns destination ``dest``'s 1 x K packet row when e_dest
    lies in their row span.  Returns None when undecodable.
    """
    rows = list(received_rows)
    if observations.rows != len(rows):
        raise ValueError("observations must have one row per received index")
    sub = code.matrix.row_submatrix(rows)
    if mode == "multicast":
        return sub.solve(observations)
    if mode == "unicast":
        if dest is None or not 0 <= dest < code.n_sources:
            raise ValueError("unicast needs a destination index in [0, N)")
        unit = FfMatrix.zeros(code.field, code.n_sources, 1).to_lists()
        unit[dest][0] = 1
        x = sub.transpose().solve_any(FfMatrix(code.field, unit))
        if x is None:
            return None
        return x.transpose() @ observations
    raise ValueError(f"unknown mode {mode!r}")


def mds_check(code: NetworkCode) -> bool:
    """True iff every N rows of A are independent (exhaustive subset check)."""
    size = code.n_sources + code.n_relays
    if size > MDS_EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive check capped at N+M <= {MDS_EXHAUSTIVE_CAP}")
    return _every_n_subset_full_rank(code.matrix, code.n_sources)

def min_distance(code: NetworkCode, max_codewords: int = 1 << 20) -> int:
    """Minimum weight of the length-(N+M) code with parity rows A^T.

    Enumerates all q^M codewords (c = (B y, y) with B the relay block
    transposed), so it is only usable for small M and q.  Full diversity
    is equivalent to min_distance == N + 1.
    """
    f = code.field
    q = f.order
    m = code.n_relays
    if m < 1:
        raise ValueError("code has no relay rows")
    if q ** m > max_codewords:
        raise ValueError(f"q^M = {q ** m} codewords exceeds cap {max_codewords}")
    bt = code.relay_block.to_lists()  # rows: relay i coefficients over sources
    best = None
    msg = [0] * m
    for idx in range(1, q ** m):
        # next message vector in base-q odometer order
        k = 0
        while True:
            msg[k] += 1
            if msg[k] < q:
                break
            msg[k] = 0
            k += 1
        x = [0] * code.n_sources
        for i in range(m):
            yi = msg[i]
            if yi:
                for j in range(code.n_sources):
                    if bt[i][j]:
                        x[j] ^= f.mul(yi, bt[i][j])
        w = sum(1 for v in x if v) + sum(1 for v in msg if v)
        if best is None or w < best:
            best = w
            if best == 1:
                break
    return best


# -- serialization --------------------------------------------------------------


def dump_code(code: NetworkCode) -> str:
    meta = {
        "construction": code.construction,
        "n": code.n_sources,
        "m": code.n_relays,
        "q": code.field.order,
        "certified_kappa": code.certified_kappa,
    }
    return f"# {json.dumps(meta)}\n" + code.matrix.dump()


def load_code(text: str) -> NetworkCode:
    meta = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("#"):
            try:
                meta = json.loads(line[1:].strip())
            except json.JSONDecodeError:
                continue
            break
    mat = load_matrix(text)
    n = meta.get("n", mat.cols)
    construction = meta.get("construction", "explicit")
    code = build_explicit(mat, n)
    if construction != "explicit":
        kappa = meta.get("certified_kappa")
        code = NetworkCode(code.n_sources, code.n_relays, code.field,
                           code.matrix, construction, kappa)
    return code
