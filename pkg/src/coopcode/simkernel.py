"""Monte Carlo outage simulation for network-coded cooperative relaying.

Channel model: every ordered link (source->relay, source->destination,
relay->destination) draws an independent exponential power gain, and a
link carries a packet iff log2(1 + gain*rho) exceeds the per-packet rate
r0, i.e. gain > tau = (2**r0 - 1)/rho.  One trial is a two-stage round:

  stage 1  relays listen to the N source broadcasts and decide what to
           forward (strategy A: only if all N packets decoded; strategy
           B: a partial combination with the missed coefficients zeroed);
  stage 2  each destination collects whatever rows arrived and checks
           decodability (multicast: all N packets, i.e. rank N; unicast:
           its own packet, i.e. e_i in the row span).

Reproducibility: trials are processed in fixed-size chunks and the chunk
(grid point g, chunk index c) draws from Philox keyed by the scenario
seed with spawn key (g, c).  Counts are integers, so results are
bit-identical no matter how chunks are ordered or spread over workers.

Two implementations coexist on purpose: a scalar per-trial reference
(run_trial*) used by the tests, and a vectorized engine used by
run_sweep.  For certified full-diversity codes under strategy A the
engine can shortcut rank checks to row counting; pass fast_path=False to
force the general batched elimination instead.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gf import Field
from .ffmat import FfMatrix
from .netcode import NetworkCode

CHUNK_TRIALS = 1 << 14  # fixed chunk size; part of the reproducibility contract

SCHEMES = ("dncc", "rncc", "selection", "ncc", "cc")
COOP_SCHEMES = ("dncc", "rncc", "selection")


@dataclass(frozen=True)
class PerLinkBeta:
    """Per-link exponential rates; arrays shaped (N,M), (N,N), (M,N)."""

    sr: tuple
    sd: tuple
    rd: tuple

    @classmethod
    def uniform(cls, n, m, beta):
        return cls(
            tuple((beta,) * m for _ in range(n)),
            tuple((beta,) * n for _ in range(n)),
            tuple((beta,) * n for _ in range(m)),
        )


@dataclass(frozen=True)
class Scenario:
    """One simulation configuration over a grid of SNR points."""

    scheme: str
    n_sources: int
    n_relays: int
    snr_grid: tuple          # linear SNR values, strictly increasing
    trials: int
    seed: int = 0
    code: NetworkCode | None = None
    field: Field | None = None     # field for rncc per-trial coefficients
    strategy: str = "A"
    traffic: str = "multicast"
    beta: "float | PerLinkBeta" = 1.0
    rate_r0: float = 1.0
    k_select: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.n_sources < 1 or self.n_relays < 1:
            raise ValueError("need n_sources >= 1 and n_relays >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        grid = tuple(float(r) for r in self.snr_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr_grid must be non-empty and strictly increasing")
        if any(r <= 0 for r in grid):
            raise ValueError("snr values must be positive")
        object.__setattr__(self, "snr_grid", grid)
        if self.strategy not in ("A", "B"):
            raise ValueError("strategy must be 'A' or 'B'")
        if self.traffic not in ("multicast", "unicast"):
            raise ValueError("traffic must be 'multicast' or 'unicast'")
        if self.rate_r0 <= 0:
            raise ValueError("rate_r0 must be positive")
        if isinstance(self.beta, (int, float)) and self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.scheme in ("dncc", "selection"):
            if self.code is None:
                raise ValueError(f"{self.scheme} needs a code")
            if (self.code.n_sources, self.code.n_relays) != (self.n_sources, self.n_relays):
                raise ValueError("code dimensions do not match scenario")
        if self.scheme == "rncc" and self.field is None:
            raise ValueError("rncc draws per-trial coefficients and needs a field")
        if self.scheme == "selection":
            if self.k_select is None or not 1 <= self.k_select <= self.n_relays:
                raise ValueError("selection needs k_select in [1, M]")
        if self.scheme in ("ncc", "cc") and self.traffic != "unicast":
            raise ValueError(f"{self.scheme} supports unicast traffic only")


@dataclass(frozen=True)
class TrialDraw:
    """Channel gains for one trial; coeffs only used by rncc."""

    gsr: np.ndarray   # (N, M) source k -> relay i
    gsd: np.ndarray   # (N, N) source k -> destination j
    grd: np.ndarray   # (M, N) relay i -> destination j
    coeffs: np.ndarray | None = None  # (M, N) ints for rncc


@dataclass(frozen=True)
class SweepPoint:
    rho: float
    dest_errors: tuple
    system_errors: int
    trials: int

    def __post_init__(self):
        if self.system_errors < max(self.dest_errors, default=0):
            raise ValueError("system errors cannot be below any per-destination count")
        if self.system_errors > self.trials:
            raise ValueError("more errors than trials")

    @property
    def dest_rates(self):
        return tuple(e / self.trials for e in self.dest_errors)

    @property
    def avg_outage(self) -> float:
        return sum(self.dest_errors) / (len(self.dest_errors) * self.trials)

    @property
    def system_rate(self) -> float:
        return self.system_errors / self.trials

    @property
    def ci95_avg(self) -> float:
        """Conservative binomial 95% radius for avg_outage."""
        p = self.avg_outage
        return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)


@dataclass(frozen=True)
class OutageReport:
    scenario: Scenario
    points: tuple  # of SweepPoint, one per snr_grid entry


def tau_for(rho: float, rate_r0: float) -> float:
    return (2.0 ** rate_r0 - 1.0) / rho


def link_ok(gain: float, rho: float, rate_r0: float) -> bool:
    """True iff the link supports rate_r0: log2(1 + gain*rho) > rate_r0."""
    return gain > tau_for(rho, rate_r0)


# -- scalar reference implementation ------------------------------------------


def select_relays(scn: Scenario, draw: TrialDraw, k: int):
    """Indices of the k best relays by bottleneck gain (min over the 2N
    adjacent links); ties broken toward the lower index."""
    m = scn.n_relays
    if not 1 <= k <= m:
        raise ValueError("k must be in [1, M]")
    h = [min(float(draw.gsr[:, i].min()), float(draw.grd[i, :].min()))
         for i in range(m)]
    order = sorted(range(m), key=lambda i: (-h[i], i))
    return order[:k]


def _relay_coeff_rows(scn: Scenario, draw: TrialDraw):
    if scn.scheme == "rncc":
        if draw.coeffs is None:
            raise ValueError("rncc trial needs draw.coeffs")
        return np.asarray(draw.coeffs), scn.field
    return scn.code.relay_block.to_array(), scn.code.field

def run_trial(scn: Scenario, rho: float, draw: TrialDraw):
    """One two-stage round for the dncc/rncc/selection family.

    Returns a tuple of N booleans: per-destination success under the
    scenario's traffic mode.
    """
    if scn.scheme not in COOP_SCHEMES:
        raise ValueError("run_trial handles dncc/rncc/selection; "
                         "use run_trial_ncc or run_trial_cc")
    n, m = scn.n_sources, scn.n_relays
    tau = tau_for(rho, scn.rate_r0)
    ok_sr = np.asarray(draw.gsr) > tau
    ok_sd = np.asarray(draw.gsd) > tau
    ok_rd = np.asarray(draw.grd) > tau

    coeff_rows, fld = _relay_coeff_rows(scn, draw)
    active = (set(select_relays(scn, draw, scn.k_select))
              if scn.scheme == "selection" else set(range(m)))

    relay_rows = {}
    for i in active:
        decoded = [k for k in range(n) if ok_sr[k, i]]
        if scn.strategy == "A":
            if len(decoded) == n:
                relay_rows[i] = [int(v) for v in coeff_rows[i]]
        else:
            if decoded:
                relay_rows[i] = [int(coeff_rows[i][k]) if k in decoded else 0
                                 for k in range(n)]

    flags = []
    for j in range(n):
        rows = []
        for k in range(n):
            if ok_sd[k, j]:
                row = [0] * n
                row[k] = 1
                rows.append(row)
        for i, row in relay_rows.items():
            if ok_rd[i, j]:
                rows.append(row)
        if scn.traffic == "multicast":
            got = bool(rows) and FfMatrix(fld, rows).rank() == n
        else:
            unit = [0] * n
            unit[j] = 1
            sub = FfMatrix(fld, rows + [unit])
            base = FfMatrix(fld, rows).rank() if rows else 0
            got = sub.rank() == base
        flags.append(got)
    return tuple(flags)


def run_trial_ncc(scn: Scenario, rho: float, draw: TrialDraw):
    """Best-relay XOR forwarding.  Destination j succeeds iff its direct
    link is up, or the selected relay decoded everything, reaches j, and
    j overheard all the other N-1 sources directly."""
    n, m = scn.n_sources, scn.n_relays
    tau = tau_for(rho, scn.rate_r0)
    ok_sr = np.asarray(draw.gsr) > tau
    ok_sd = np.asarray(draw.gsd) > tau
    ok_rd = np.asarray(draw.grd) > tau
    best = select_relays(scn, draw, 1)[0]
    relay_decoded = all(ok_sr[k, best] for k in range(n))
    flags = []
    for j in range(n):
        direct = ok_sd[j, j]
        cross = all(ok_sd[k, j] for k in range(n) if k != j)
        flags.append(bool(direct or (relay_decoded and ok_rd[best, j] and cross)))
    return tuple(flags)


def run_trial_cc(scn: Scenario, rho: float, draw: TrialDraw):
    """Repetition relaying: destination j succeeds iff its direct link is
    up or some relay both decoded source j and reaches destination j."""
    n, m = scn.n_sources, scn.n_relays
    tau = tau_for(rho, scn.rate_r0)
    ok_sr = np.asarray(draw.gsr) > tau
    ok_sd = np.asarray(draw.gsd) > tau
    ok_rd = np.asarray(draw.grd) > tau
    flags = []
    for j in range(n):
        relayed = any(ok_sr[j, i] and ok_rd[i, j] for i in range(m))
        flags.append(bool(ok_sd[j, j] or relayed))
    return tuple(flags)


# -- batched engine -------------------------------------------------------------


def _beta_arrays(scn: Scenario):
    n, m = scn.n_sources, scn.n_relays
    if isinstance(scn.beta, PerLinkBeta):
        return (np.asarray(scn.beta.sr, dtype=float),
                np.asarray(scn.beta.sd, dtype=float),
                np.asarray(scn.beta.rd, dtype=float))
    b = float(scn.beta)
    return (np.full((n, m), b), np.full((n, n), b), np.full((m, n), b))


def chunk_rng(seed: int, grid_index: int, chunk_index: int) -> np.random.Generator:
    """Counter-based stream for one (grid point, chunk) cell."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(grid_index, chunk_index))
    return np.random.Generator(np.random.Philox(ss))


def draw_chunk(scn: Scenario, rng: np.random.Generator, count: int):
    """Draw all randomness for `count` trials in the fixed order the
    reproducibility contract pins down: gains first, then coefficients."""
    n, m = scn.n_sources, scn.n_relays
    bsr, bsd, brd = _beta_arrays(scn)
    gsr = rng.standard_exponential((count, n, m)) / bsr
    gsd = rng.standard_exponential((count, n, n)) / bsd
    grd = rng.standard_exponential((count, m, n)) / brd
    coeffs = None
    if scn.scheme == "rncc":
        coeffs = rng.integers(0, scn.field.order, size=(count, m, n),
                              dtype=np.int64)
    return gsr, gsd, grd, coeffs


def _batch_rank(mats: np.ndarray, fld: Field) -> np.ndarray:
    """Rank of each matrix in a (B, R, C) int32 stack (destroys `mats`)."""
    log_t, exp2_t, inv_t = fld.np_tables()
    nb, nr, nc = mats.shape
    rk = np.zeros(nb, dtype=np.int64)
    rowidx = np.arange(nr)[None, :]
    for c in range(nc):
        cand = (mats[:, :, c] != 0) & (rowidx >= rk[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        src = cand[b].argmax(axis=1)
        dst = rk[b]
        # swap the pivot row up
        tmp = mats[b, src, :].copy()
        mats[b, src, :] = mats[b, dst, :]
        mats[b, dst, :] = tmp
        # normalize pivot row to 1 in column c
        piv = tmp[:, c]
        scale = inv_t[piv]
        prow = exp2_t[log_t[tmp] + log_t[scale][:, None]]
        mats[b, dst, :] = prow
        # eliminate column c from every other row
        fac = mats[b, :, c].copy()
        fac[np.arange(len(b)), dst] = 0
        mats[b] ^= exp2_t[log_t[fac][:, :, None] + log_t[prow][:, None, :]]
        rk[b] += 1
    return rk


def _coop_failures(scn, tau, gsr, gsd, grd, coeffs, fast_path):
    """(B, N) boolean failure flags for the dncc/rncc/selection family."""
    n, m = scn.n_sources, scn.n_relays
    nb = gsr.shape[0]
    ok_sr = gsr > tau              # (B, N, M)
    ok_sd = gsd > tau              # (B, N, N)
    ok_rd = grd > tau              # (B, M, N)

    if scn.scheme == "selection":
        h = np.minimum(gsr.min(axis=1), grd.min(axis=2))   # (B, M)
        order = np.argsort(-h, axis=1, kind="stable")[:, :scn.k_select]
        selected = np.zeros((nb, m), dtype=bool)
        np.put_along_axis(selected, order, True, axis=1)
    else:
        selected = np.ones((nb, m), dtype=bool)

    decoded = ok_sr.sum(axis=1)                 # (B, M)
    full = decoded == n
    if scn.strategy == "A":
        transmitting = full & selected
    else:
        transmitting = (decoded >= 1) & selected

    certified = (scn.scheme != "rncc" and scn.code is not None
                 and scn.code.certified_kappa == n)
    use_counting = (fast_path is not False) and scn.strategy == "A" and certified
    if fast_path is True and not use_counting:
        raise ValueError("fast path needs strategy A and a certified code")

    fails = np.empty((nb, n), dtype=bool)
    if use_counting:
        # every arriving row is a full row of a kappa=N code: decodable
        # iff enough rows arrive (own direct link also suffices for unicast)
        for j in range(n):
            rows = ok_sd[:, :, j].sum(axis=1) + (transmitting & ok_rd[:, :, j]).sum(axis=1)
            if scn.traffic == "multicast":
                fails[:, j] = rows < n
            else:
                fails[:, j] = ~ok_sd[:, j, j] & (rows < n)
        return fails

    if scn.scheme == "rncc":
        rowvals = coeffs.astype(np.int32)       # (B, M, N)
        fld = scn.field
    else:
        rowvals = np.broadcast_to(
            scn.code.relay_block.to_array().astype(np.int32), (nb, m, n))
        fld = scn.code.field

    if scn.strategy == "B":
        keep = ok_sr.transpose(0, 2, 1)         # keep[b, i, k] = decoded k at relay i
        rowvals = np.where(keep, rowvals, 0)

    extra = 1 if scn.traffic == "unicast" else 0
    for j in range(n):
        e = np.zeros((nb, n + m + extra, n), dtype=np.int32)
        diag = np.arange(n)
        e[:, diag, diag] = ok_sd[:, :, j].astype(np.int32)
        deliver = (transmitting & ok_rd[:, :, j])[:, :, None]
        e[:, n:n + m, :] = np.where(deliver, rowvals, 0)
        if scn.traffic == "multicast":
            fails[:, j] = _batch_rank(e, fld) < n
        else:
            base = _batch_rank(e[:, :n + m, :].copy(), fld)
            e[:, n + m, j] = 1
            fails[:, j] = _batch_rank(e, fld) != base
    return fails


def _ncc_failures(scn, tau, gsr, gsd, grd):
    n, m = scn.n_sources, scn.n_relays
    nb = gsr.shape[0]
    ok_sr = gsr > tau
    ok_sd = gsd > tau
    ok_rd = grd > tau
    h = np.minimum(gsr.min(axis=1), grd.min(axis=2))
    best = np.argmax(h, axis=1)                 # first max = lowest index
    rows = np.arange(nb)
    relay_decoded = ok_sr[rows, :, best].all(axis=1)
    fails = np.empty((nb, n), dtype=bool)
    for j in range(n):
        direct = ok_sd[:, j, j]
        cross = np.ones(nb, dtype=bool)
        for k in range(n):
            if k != j:
                cross &= ok_sd[:, k, j]
        relay_path = relay_decoded & ok_rd[rows, best, j] & cross
        fails[:, j] = ~(direct | relay_path)
    return fails


def _cc_failures(scn, tau, gsr, gsd, grd):
    n, m = scn.n_sources, scn.n_relays
    ok_sr = gsr > tau
    ok_sd = gsd > tau
    ok_rd = grd > tau
    nb = gsr.shape[0]
    fails = np.empty((nb, n), dtype=bool)
    for j in range(n):
        relayed = (ok_sr[:, j, :] & ok_rd[:, :, j]).any(axis=1)
        fails[:, j] = ~(ok_sd[:, j, j] | relayed)
    return fails


def _chunk_counts(scn: Scenario, grid_index: int, chunk_index: int,
                  count: int, fast_path):
    rng = chunk_rng(scn.seed, grid_index, chunk_index)
    gsr, gsd, grd, coeffs = draw_chunk(scn, rng, count)
    tau = tau_for(scn.snr_grid[grid_index], scn.rate_r0)
    if scn.scheme in COOP_SCHEMES:
        fails = _coop_failures(scn, tau, gsr, gsd, grd, coeffs, fast_path)
    elif scn.scheme == "ncc":
        fails = _ncc_failures(scn, tau, gsr, gsd, grd)
    else:
        fails = _cc_failures(scn, tau, gsr, gsd, grd)
    return fails.sum(axis=0), int(fails.any(axis=1).sum())


def _sweep_task(args):
    scn, grid_index, chunk_index, count, fast_path = args
    dest, system = _chunk_counts(scn, grid_index, chunk_index, count, fast_path)
    return grid_index, dest, system


def run_sweep(scn: Scenario, workers: int = 1, fast_path=None) -> OutageReport:
    """Simulate every grid point; deterministic in (scenario, CHUNK_TRIALS)
    and independent of `workers`."""
    n_chunks = (scn.trials + CHUNK_TRIALS - 1) // CHUNK_TRIALS
    tasks = []
    for g in range(len(scn.snr_grid)):
        for c in range(n_chunks):
            count = min(CHUNK_TRIALS, scn.trials - c * CHUNK_TRIALS)
            tasks.append((scn, g, c, count, fast_path))
    dest_tot = np.zeros((len(scn.snr_grid), scn.n_sources), dtype=np.int64)
    sys_tot = np.zeros(len(scn.snr_grid), dtype=np.int64)
    if workers <= 1:
        results = map(_sweep_task, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (workers * 4)))
    for g, dest, system in results:
        dest_tot[g] += dest
        sys_tot[g] += system
    if workers > 1:
        pool.shutdown()
    points = tuple(
        SweepPoint(scn.snr_grid[g], tuple(int(v) for v in dest_tot[g]),
                   int(sys_tot[g]), scn.trials)
        for g in range(len(scn.snr_grid))
    )
    return OutageReport(scn, points)


# -- selection-rule sampling ---------------------------------------------------


def selected_link_gain_cdf(n: int, m: int, beta: float, taus, trials: int,
                           seed: int = 0, chunk: int = 1 << 18) -> np.ndarray:
    """Empirical P(g <= tau) where g is one adjacent-link gain of the relay
    with the best bottleneck (min over its 2N adjacent links).

    Vectorized sampling oracle for selection_cdf_approx in analytic.
    """
    taus = np.asarray(taus, dtype=float)
    counts = np.zeros(taus.shape, dtype=np.int64)
    done = 0
    ci = 0
    while done < trials:
        nb = min(chunk, trials - done)
        rng = chunk_rng(seed, 0, ci)
        gains = rng.standard_exponential((nb, m, 2 * n)) / beta
        h = gains.min(axis=2)
        best = np.argmax(h, axis=1)
        g = gains[np.arange(nb), best, 0]
        counts += (g[None, :] <= taus[..., None]).sum(axis=-1)
        done += nb
        ci += 1
    return counts / trials
