"""Volume-kernel performance harness: operation counts, timings and rooflines.

Two routes are provided for each of the split-form and the standard volume
kernel:

* scalar reference kernels written node by node, which run either on floats
  (to cross-check the vectorised kernels) or on :class:`Counted` numbers that
  tally every add, mul, div, abs and sqrt;
* the vectorised kernels used by the solver, which are timed.

Rooflines follow the bulk-copy methodology: a kernel moving ``B`` bytes is
compared with a memory copy of ``B / 2`` bytes (each entry is read and written).
"""

import math
import statistics
import time
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .dg import split_volume_terms, standard_volume_terms
from .mesh import build_cartesian_mesh
from .operators import operators
from .physics import PhysicsParams

FLOAT_BYTES = 8
FIELDS_PER_NODE = 10  # read h, hu, hv and four metric terms, write three residuals
TABLE_COLUMNS = ("N", "K", "DOFs", "evals_split", "evals_std", "flops_split", "flops_std",
                 "t_split", "t_std", "t_memcpy", "bw_eff", "roofline")


# -- counting arithmetic -----------------------------------------------------------


class FlopTally:
    def __init__(self):
        self.ops = {"add": 0, "mul": 0, "div": 0, "abs": 0, "sqrt": 0}
        self.flux_evals = 0

    @property
    def total(self):
        return sum(self.ops.values())


class Counted:
    """A float that records every arithmetic operation in a shared tally."""

    __slots__ = ("v", "tally")

    def __init__(self, v, tally):
        self.v = float(v)
        self.tally = tally

    def _op(self, kind, value):
        self.tally.ops[kind] += 1
        return Counted(value, self.tally)

    @staticmethod
    def _val(o):
        return o.v if isinstance(o, Counted) else o

    def __add__(self, o):
        return self._op("add", self.v + self._val(o))

    __radd__ = __add__

    def __sub__(self, o):
        return self._op("add", self.v - self._val(o))

    def __rsub__(self, o):
        return self._op("add", self._val(o) - self.v)

    def __mul__(self, o):
        return self._op("mul", self.v * self._val(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self._op("div", self.v / self._val(o))

    def __rtruediv__(self, o):
        return self._op("div", self._val(o) / self.v)

    def __neg__(self):
        return Counted(-self.v, self.tally)  # sign flips are free

    def __abs__(self):
        return self._op("abs", abs(self.v))

    def sqrt(self):
        return self._op("sqrt", math.sqrt(self.v))

    def __float__(self):
        return self.v


# -- scalar reference kernels --------------------------------------------------------


def _sharp(h1, u1, v1, h2, u2, v2, half_g):
    """Entropy-conserving two-point fluxes, written out scalar by scalar."""
    hu = 0.5 * (h1 * u1 + h2 * u2)
    hv = 0.5 * (h1 * v1 + h2 * v2)
    ua = 0.5 * (u1 + u2)
    va = 0.5 * (v1 + v2)
    p = half_g * h1 * h2
    return (hu, hu * ua + p, hu * va), (hv, hv * ua, hv * va + p)


def reference_split_kernel(h, hu, hv, x_xi, x_eta, y_xi, y_eta, Ds, g, tally=None):
    """Split-form volume sums of one element, node by node.

    Inputs are ``n x n`` nested sequences (floats or :class:`Counted`); returns
    a ``3 x n x n`` nested list.
    """
    n = len(h)
    half_g = 0.5 * g
    u = [[hu[i][j] / h[i][j] for j in range(n)] for i in range(n)]
    v = [[hv[i][j] / h[i][j] for j in range(n)] for i in range(n)]
    out = [[[0.0] * n for _ in range(n)] for _ in range(3)]
    for i in range(n):
        for j in range(n):
            acc = [0.0, 0.0, 0.0]
            for m in range(n):
                F, G = _sharp(h[i][j], u[i][j], v[i][j], h[m][j], u[m][j], v[m][j], half_g)
                ye = 0.5 * (y_eta[i][j] + y_eta[m][j])
                xe = 0.5 * (x_eta[i][j] + x_eta[m][j])
                for c in range(3):
                    acc[c] = acc[c] + Ds[i][m] * (F[c] * ye - G[c] * xe)
                F, G = _sharp(h[i][j], u[i][j], v[i][j], h[i][m], u[i][m], v[i][m], half_g)
                yx = 0.5 * (y_xi[i][j] + y_xi[i][m])
                xx = 0.5 * (x_xi[i][j] + x_xi[i][m])
                for c in range(3):
                    acc[c] = acc[c] + Ds[j][m] * (G[c] * xx - F[c] * yx)
                if tally is not None:
                    tally.flux_evals += 2
            for c in range(3):
                out[c][i][j] = acc[c]
    return out


def reference_standard_kernel(h, hu, hv, x_xi, x_eta, y_xi, y_eta, D, g, tally=None):
    """Standard volume sums of one element: pointwise contravariant fluxes then D."""
    n = len(h)
    half_g = 0.5 * g
    Ft = [[None] * n for _ in range(n)]
    Gt = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            u = hu[i][j] / h[i][j]
            v = hv[i][j] / h[i][j]
            p = half_g * h[i][j] * h[i][j]
            f = (hu[i][j], hu[i][j] * u + p, hu[i][j] * v)
            gf = (hv[i][j], hv[i][j] * u, hv[i][j] * v + p)
            Ft[i][j] = [f[c] * y_eta[i][j] - gf[c] * x_eta[i][j] for c in range(3)]
            Gt[i][j] = [gf[c] * x_xi[i][j] - f[c] * y_xi[i][j] for c in range(3)]
            if tally is not None:
                tally.flux_evals += 2
    out = [[[0.0] * n for _ in range(n)] for _ in range(3)]
    for i in range(n):
        for j in range(n):
            for c in range(3):
                acc = 0.0
                for m in range(n):
                    acc = acc + D[i][m] * Ft[m][j][c] + D[j][m] * Gt[i][m][c]
                out[c][i][j] = acc
    return out


def _element_inputs(W, mesh, k):
    return [W[0, k], W[1, k], W[2, k], mesh.x_xi[k], mesh.x_eta[k], mesh.y_xi[k], mesh.y_eta[k]]


def reference_residuals(W, mesh, params):
    """Both reference kernels on every element, as arrays ``(3, K, n, n)``."""
    ops = mesh.ops
    split = np.empty_like(W)
    std = np.empty_like(W)
    for k in range(mesh.K):
        args = [a.tolist() for a in _element_inputs(W, mesh, k)]
        split[:, k] = reference_split_kernel(*args, ops.D_split.tolist(), params.g)
        std[:, k] = reference_standard_kernel(*args, ops.D.tolist(), params.g)
    return split, std


# -- counts ------------------------------------------------------------------------


@dataclass(frozen=True)
class OpCounts:
    N: int
    K: int
    flux_evals_split: int
    flux_evals_standard: int
    flops_split: int
    flops_standard: int
    breakdown_split: dict
    breakdown_standard: dict

    @property
    def flop_ratio(self):
        return self.flops_split / self.flops_standard


def analytic_flux_evals(N, K):
    """Closed forms: 2 (N+1)^3 K two-point and 2 (N+1)^2 K pointwise evaluations."""
    return 2 * (N + 1) ** 3 * K, 2 * (N + 1) ** 2 * K


@lru_cache(maxsize=None)
def _count_one_element(N, kernel):
    """Run a reference kernel on Counted inputs for a generic wet element."""
    ops = operators(N)
    n = N + 1
    rng = np.random.default_rng(N)
    tally = FlopTally()

    def field(lo, hi):
        return [[Counted(x, tally) for x in row] for row in rng.uniform(lo, hi, (n, n))]

    h = field(1.0, 2.0)
    hu, hv = field(-0.5, 0.5), field(-0.5, 0.5)
    metrics = [field(0.5, 1.0) for _ in range(4)]
    if kernel == "split":
        reference_split_kernel(h, hu, hv, *metrics, ops.D_split.tolist(), 9.81, tally)
    else:
        reference_standard_kernel(h, hu, hv, *metrics, ops.D.tolist(), 9.81, tally)
    return tally.flux_evals, dict(tally.ops)


def count_ops(N, K=1):
    """Flux-evaluation and FLOP counts for K elements of degree N.

    FLOPs come from a counting pass of the reference kernels on one element;
    the kernels have no data-dependent branches, so counts scale with K.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if K < 1:
        raise ValueError("K must be at least 1")
    es, ops_s = _count_one_element(N, "split")
    et, ops_t = _count_one_element(N, "standard")
    return OpCounts(
        N, K, es * K, et * K, sum(ops_s.values()) * K, sum(ops_t.values()) * K,
        {k: v * K for k, v in ops_s.items()}, {k: v * K for k, v in ops_t.items()},
    )


# -- timing --------------------------------------------------------------------------


def kernel_bytes(N, K):
    return FLOAT_BYTES * FIELDS_PER_NODE * K * (N + 1) ** 2


def random_wet_state(mesh, seed=0):
    rng = np.random.default_rng(seed)
    shape = mesh.x.shape
    return np.stack([rng.uniform(1.0, 2.0, shape), rng.uniform(-0.5, 0.5, shape), rng.uniform(-0.5, 0.5, shape)])


def bench_mesh(N, k_dir):
    """Periodic unit-square Cartesian mesh with ``k_dir x k_dir`` elements."""
    return build_cartesian_mesh(0.0, 1.0, 0.0, 1.0, k_dir, k_dir, N, (True, True))


def _time(fn, repetitions):
    times = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), statistics.fmean(times)


def memcopy_time(nbytes, repetitions=20):
    """Median time of a bulk copy with ``nbytes`` read plus written in total."""
    if nbytes <= 0:
        raise ValueError("bytes must be positive")
    count = max(1, int(nbytes // 2 // FLOAT_BYTES))
    src = np.random.default_rng(0).random(count)
    dst = np.empty_like(src)
    return _time(lambda: np.copyto(dst, src), repetitions)[0]


def effective_bandwidth(nbytes, seconds):
    """(bytes read + bytes written) / t."""
    return nbytes / seconds


def memcopy_roofline(gflops, bw_eff, bw_memcpy):
    """Performance the kernel would reach if it moved its data at copy speed.

    Equals ``gflops * bw_memcpy / bw_eff``; a kernel running at exactly the
    copy bandwidth sits on its roofline.
    """
    return gflops * bw_memcpy / bw_eff


def shared_memory_bandwidth(cores, simd_lanes, word_bytes, clock_hz):
    """#cores x #SIMD lanes x word size x clock (bytes per second)."""
    return cores * simd_lanes * word_bytes * clock_hz


def shared_memory_roofline(bandwidth, flops_per_block, bytes_per_block):
    return bandwidth * flops_per_block / bytes_per_block


def combined_roofline(memcopy, ceiling):
    return min(memcopy, ceiling)


def measure_compute_ceiling(size=512, repetitions=5):
    """Dense matrix-product GFLOP/s, used as the CPU compute ceiling."""
    a = np.random.default_rng(0).random((size, size))
    t = _time(lambda: a @ a, repetitions)[0]
    return 2.0 * size**3 / t / 1e9


@dataclass
class BenchRecord:
    N: int
    K: int
    dofs: int
    flux_evals_split: int
    flux_evals_standard: int
    flops_split: int
    flops_standard: int
    t_split: float  # median seconds per kernel call
    t_standard: float
    t_split_mean: float
    t_standard_mean: float
    nbytes: int
    t_memcpy: float
    bw_memcpy: float
    bw_eff_split: float
    bw_eff_standard: float
    roofline_split: float  # GFLOP/s
    roofline_standard: float
    us_per_mdof_split: float
    us_per_mdof_standard: float
    workers: int = 1

    def table_row(self):
        return (self.N, self.K, self.dofs, self.flux_evals_split, self.flux_evals_standard,
                self.flops_split, self.flops_standard, self.t_split, self.t_standard,
                self.t_memcpy, self.bw_eff_split, self.roofline_split)

    def as_dict(self):
        return asdict(self)


def time_kernels(N, k_dir, repetitions=10, seed=0, ceiling=math.inf, params=None):
    """Time both vectorised volume kernels on a ``k_dir x k_dir`` mesh."""
    params = params or PhysicsParams()
    mesh = bench_mesh(N, k_dir)
    W = random_wet_state(mesh, seed)
    K = mesh.K
    counts = count_ops(N, K)
    ts, ts_mean = _time(lambda: split_volume_terms(W, mesh, params), repetitions)
    tt, tt_mean = _time(lambda: standard_volume_terms(W, mesh, params), repetitions)
    nbytes = kernel_bytes(N, K)
    t_mc = memcopy_time(nbytes, max(repetitions, 5))
    bw_mc = effective_bandwidth(nbytes, t_mc)
    bw_s, bw_t = effective_bandwidth(nbytes, ts), effective_bandwidth(nbytes, tt)
    gf_s, gf_t = counts.flops_split / ts / 1e9, counts.flops_standard / tt / 1e9
    dofs = 3 * K * (N + 1) ** 2
    return BenchRecord(
        N, K, dofs, counts.flux_evals_split, counts.flux_evals_standard,
        counts.flops_split, counts.flops_standard, ts, tt, ts_mean, tt_mean,
        nbytes, t_mc, bw_mc, bw_s, bw_t,
        combined_roofline(memcopy_roofline(gf_s, bw_s, bw_mc), ceiling),
        combined_roofline(memcopy_roofline(gf_t, bw_t, bw_mc), ceiling),
        ts / dofs * 1e12, tt / dofs * 1e12,
    )


def k_for_budget(N, budget_bytes):
    """Elements per direction so one kernel call moves about ``budget_bytes``."""
    per_element = kernel_bytes(N, 1)
    return max(1, int(math.isqrt(max(1, int(budget_bytes // per_element)))))


def budget_table(n_values=range(1, 16), budget_bytes=4 * 2**20, repetitions=5, ceiling=None):
    """BenchRecords for each N with element counts scaled to a fixed memory load."""
    ceiling = measure_compute_ceiling() if ceiling is None else ceiling
    return [time_kernels(N, k_for_budget(N, budget_bytes), repetitions, ceiling=ceiling) for N in n_values]


def format_table(records):
    lines = [";".join(TABLE_COLUMNS)]
    for r in records:
        lines.append(";".join(str(v) if isinstance(v, int) else f"{v:.6g}" for v in r.table_row()))
    return "\n".join(lines)
