"""Heuristic and exact solvers behind one dispatch surface.

Three backends: single-flip Metropolis annealing on the QUBO, mean-field
Ising-machine dynamics on the spin form, and exhaustive enumeration for
small models. Restarts are independent, seeded per index, and reduced by
(energy, bits), so outcomes are canonical and thread-count independent.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import IsingModel, QuboModel, spins_to_bits, to_ising
from .rng import SETUP_STREAM, stream

BRUTE_FORCE_CAP = 24
DEFAULT_SEED = 42
SOLVER_METHODS = ("sa", "simcim", "bruteforce")


@dataclass(frozen=True)
class SolveParams:
    """Shared knob set for all backends; irrelevant fields are ignored."""

    sweeps: int = 1000          # SA sweeps; one sweep proposes every variable once
    steps: int = 1000           # SimCIM integration steps
    restarts: int = 1
    seed: int = DEFAULT_SEED
    threads: int = 1
    time_budget_ms: float | None = None  # caps restart launches, never cuts one short

    # annealing schedule; t_start None means probe the largest single-flip |dE|
    t_start: float | None = None
    t_final: float | None = None
    final_temp_ratio: float = 1e-3

    # mean-field dynamics
    dt: float = 0.05
    pump_start: float = -1.0
    pump_end: float = 1.0
    coupling_scale: float | None = None  # None: 1 / power-iteration scale of J
    noise: float = 0.01
    clamp: float = 1.0

    # debug: track drift between incremental and recomputed SA energy
    validate_energy: bool = False

    def validate(self) -> None:
        if self.sweeps < 1 or self.steps < 1 or self.restarts < 1:
            raise ValueError("sweeps, steps, and restarts must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.time_budget_ms is not None and self.time_budget_ms <= 0:
            raise ValueError("time budget must be positive")
        if self.t_start is not None and self.t_start <= 0:
            raise ValueError("initial temperature must be positive")
        if self.t_final is not None and self.t_final <= 0:
            raise ValueError("final temperature must be positive")
        if not 0.0 < self.final_temp_ratio < 1.0:
            raise ValueError("final_temp_ratio must lie in (0, 1)")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.noise < 0:
            raise ValueError("noise amplitude must be non-negative")
        if self.clamp <= 0:
            raise ValueError("amplitude clamp must be positive")


@dataclass(frozen=True)
class SolveOutcome:
    method: str
    best_bits: tuple[int, ...]
    best_energy: float
    restart_energies: tuple[float, ...]
    restart_times_ms: tuple[float, ...]
    restarts_executed: int
    num_optimal: int | None = None  # brute force: count of distinct optima
    energy_drift: float = 0.0       # validate_energy: max incremental-vs-exact gap


# ---------------------------------------------------------------------------
# array forms shared by the kernels

def _qubo_arrays(model: QuboModel):
    """Linear vector plus symmetric CSR expansion of the quadratic terms."""
    n = model.n
    lin = np.zeros(n)
    for i, v in model.linear.items():
        lin[i] = v
    deg = np.zeros(n + 1, dtype=np.int64)
    for i, j in model.quadratic:
        deg[i + 1] += 1
        deg[j + 1] += 1
    ptr = np.cumsum(deg)
    col = np.zeros(ptr[-1], dtype=np.int64)
    val = np.zeros(ptr[-1])
    fill = ptr[:-1].copy()
    for (i, j), v in model.quadratic.items():
        col[fill[i]] = j
        val[fill[i]] = v
        fill[i] += 1
        col[fill[j]] = i
        val[fill[j]] = v
        fill[j] += 1
    return lin, ptr, col, val


def _ising_arrays(model: IsingModel):
    """Field vector and dense symmetric coupling matrix."""
    n = model.n
    h = np.zeros(n)
    for i, v in model.h.items():
        h[i] = v
    jmat = np.zeros((n, n))
    for (i, j), v in model.j.items():
        jmat[i, j] = v
        jmat[j, i] = v
    return h, jmat


# ---------------------------------------------------------------------------
# simulated annealing

@njit(cache=True, nogil=True)
def _sa_kernel(z, lin, ptr, col, val, order, u, temps, validate):
    n = z.shape[0]
    sweeps = temps.shape[0]
    g = lin.copy()  # g[i] = dE of flipping i, up to the (1 - 2 z_i) sign
    for i in range(n):
        if z[i] == 1:
            for p in range(ptr[i], ptr[i + 1]):
                g[col[p]] += val[p]
    e = 0.0
    for i in range(n):
        if z[i] == 1:
            e += lin[i]
            for p in range(ptr[i], ptr[i + 1]):
                j = col[p]
                if j > i and z[j] == 1:
                    e += val[p]
    best_e = e
    best_z = z.copy()
    drift = 0.0
    for s in range(sweeps):
        t = temps[s]
        for k in range(n):
            i = order[s, k]
            delta = 1.0 - 2.0 * z[i]
            d_e = delta * g[i]
            if d_e <= 0.0 or u[s, k] < np.exp(-d_e / t):
                z[i] = 1 - z[i]
                e += d_e
                for p in range(ptr[i], ptr[i + 1]):
                    g[col[p]] += val[p] * delta
                if e < best_e:
                    best_e = e
                    best_z[:] = z
        if validate:
            check = 0.0
            for i in range(n):
                if z[i] == 1:
                    check += lin[i]
                    for p in range(ptr[i], ptr[i + 1]):
                        j = col[p]
                        if j > i and z[j] == 1:
                            check += val[p]
            if abs(check - e) > drift:
                drift = abs(check - e)
    return best_z, drift


def _sa_temperatures(params: SolveParams, t_probe: float) -> np.ndarray:
    t0 = params.t_start if params.t_start is not None else max(t_probe, 1e-12)
    tf = params.t_final if params.t_final is not None else t0 * params.final_temp_ratio
    tf = min(tf, t0)
    steps = max(params.sweeps - 1, 1)
    return t0 * (tf / t0) ** (np.arange(params.sweeps) / steps)


def _sa_restart(arrays, n: int, params: SolveParams, r: int):
    lin, ptr, col, val = arrays
    rng = stream(params.seed, r)
    z = rng.integers(0, 2, size=n).astype(np.int8)
    # probe: largest single-flip |dE| from the initial state seeds the schedule
    field = lin.copy()
    for i in range(n):
        if z[i] == 1:
            field[col[ptr[i]:ptr[i + 1]]] += val[ptr[i]:ptr[i + 1]]
    t_probe = float(np.max(np.abs(field))) if n else 1.0
    temps = _sa_temperatures(params, t_probe)
    order = rng.permuted(
        np.tile(np.arange(n, dtype=np.int64), (params.sweeps, 1)), axis=1
    )
    u = rng.random((params.sweeps, n))
    best_z, drift = _sa_kernel(
        z, lin, ptr, col, val, order, u, temps, params.validate_energy
    )
    return tuple(int(b) for b in best_z), drift


# ---------------------------------------------------------------------------
# mean-field Ising machine

def _spectral_scale(jmat: np.ndarray, seed: int) -> float:
    """Largest |eigenvalue| estimate of J by 20 power-iteration steps."""
    n = jmat.shape[0]
    if n == 0 or not jmat.any():
        return 1.0
    rng = stream(seed, SETUP_STREAM)
    v = rng.standard_normal(n)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return 1.0
    v /= norm
    scale = 1.0
    for _ in range(20):
        w = jmat @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 1.0
        scale = norm
        v = w / norm
    return float(scale)


def _simcim_restart(arrays, zeta: float, params: SolveParams, r: int):
    h, jmat = arrays
    n = h.shape[0]
    rng = stream(params.seed, r)
    noise = rng.standard_normal((params.steps, n)) * params.noise
    pump = np.linspace(params.pump_start, params.pump_end, params.steps)
    a = np.zeros(n)
    for s in range(params.steps):
        grad = jmat @ a + h
        a += params.dt * ((pump[s] - 1.0) * a - zeta * grad) + noise[s]
        np.clip(a, -params.clamp, params.clamp, out=a)
    spins = np.where(a >= 0.0, 1, -1)  # zero amplitudes break toward +1
    return tuple(int(s) for s in spins)


# ---------------------------------------------------------------------------
# restart engine

def _run_restarts(run_one, params: SolveParams):
    """Execute restarts honoring the thread cap and time budget.

    run_one(r) -> (bits, energy). At least one restart always runs; the budget
    is checked before each further launch and never interrupts a running one.
    """
    deadline = None
    if params.time_budget_ms is not None:
        deadline = time.perf_counter() + params.time_budget_ms / 1000.0

    def timed(r: int):
        t0 = time.perf_counter()
        bits, energy = run_one(r)
        return bits, energy, (time.perf_counter() - t0) * 1000.0

    results: dict[int, tuple] = {}
    if params.threads == 1:
        for r in range(params.restarts):
            if r > 0 and deadline is not None and time.perf_counter() >= deadline:
                break
            results[r] = timed(r)
    else:
        with ThreadPoolExecutor(max_workers=params.threads) as pool:
            pending: dict = {}
            next_r = 0
            while next_r < params.restarts or pending:
                while (
                    next_r < params.restarts
                    and len(pending) < params.threads
                    and (next_r == 0 or deadline is None or time.perf_counter() < deadline)
                ):
                    pending[pool.submit(timed, next_r)] = next_r
                    next_r += 1
                if not pending:
                    break
                done, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    results[pending.pop(fut)] = fut.result()
                if deadline is not None and time.perf_counter() >= deadline:
                    # budget spent: let in-flight restarts finish, launch no more
                    for fut, r in pending.items():
                        results[r] = fut.result()
                    pending.clear()
                    next_r = params.restarts

    executed = sorted(results)
    energies = tuple(results[r][1] for r in executed)
    times = tuple(results[r][2] for r in executed)
    best_bits, best_energy = min(
        ((results[r][0], results[r][1]) for r in executed),
        key=lambda be: (be[1], be[0]),
    )
    return best_bits, best_energy, energies, times, len(executed)


def run_single_restart(model, method: str, params: SolveParams, restart_index: int):
    """One seeded restart, stream (params.seed, restart_index).

    Returns (bits, energy, wall_ms). Energies are always rescored through the
    model's canonical energy function.
    """
    params.validate()
    t0 = time.perf_counter()
    if method == "sa":
        if not isinstance(model, QuboModel):
            raise TypeError("sa solves QUBO models")
        arrays = _qubo_arrays(model)
        bits, _ = _sa_restart(arrays, model.n, params, restart_index)
        energy = model.energy(bits)
    elif method == "simcim":
        ising = to_ising(model) if isinstance(model, QuboModel) else model
        arrays = _ising_arrays(ising)
        zeta = params.coupling_scale
        if zeta is None:
            zeta = 1.0 / max(_spectral_scale(arrays[1], params.seed), 1e-12)
        spins = _simcim_restart(arrays, zeta, params, restart_index)
        bits = spins_to_bits(spins)
        energy = ising.energy(spins)
    else:
        raise ValueError(f"unknown solver method {method!r}; expected sa or simcim")
    return bits, energy, (time.perf_counter() - t0) * 1000.0


def solve_sa(model: QuboModel, params: SolveParams = SolveParams()) -> SolveOutcome:
    """Metropolis single-flip annealing with geometric cooling.

    Flip costs are maintained incrementally from the flipped variable's row;
    the reported energies are exact re-evaluations of the returned bits.
    """
    params.validate()
    if not isinstance(model, QuboModel):
        raise TypeError("sa solves QUBO models")
    arrays = _qubo_arrays(model)
    drift = [0.0]

    def run_one(r: int):
        bits, d = _sa_restart(arrays, model.n, params, r)
        drift[0] = max(drift[0], d)
        return bits, model.energy(bits)

    best_bits, best_energy, energies, times, executed = _run_restarts(run_one, params)
    return SolveOutcome(
        method="sa",
        best_bits=best_bits,
        best_energy=best_energy,
        restart_energies=energies,
        restart_times_ms=times,
        restarts_executed=executed,
        energy_drift=drift[0],
    )


def solve_simcim(model: IsingModel, params: SolveParams = SolveParams()) -> SolveOutcome:
    """Mean-field coherent-Ising-machine dynamics with a linear pump ramp.

    Amplitudes start at zero, follow clamped Euler updates with Gaussian noise,
    and are read out as spin signs; outcomes are reported in bit form.
    """
    params.validate()
    if not isinstance(model, IsingModel):
        raise TypeError("simcim solves Ising models; use to_ising on a QUBO first")
    arrays = _ising_arrays(model)
    zeta = params.coupling_scale
    if zeta is None:
        zeta = 1.0 / max(_spectral_scale(arrays[1], params.seed), 1e-12)

    def run_one(r: int):
        spins = _simcim_restart(arrays, zeta, params, r)
        return spins_to_bits(spins), model.energy(spins)

    best_bits, best_energy, energies, times, executed = _run_restarts(run_one, params)
    return SolveOutcome(
        method="simcim",
        best_bits=best_bits,
        best_energy=best_energy,
        restart_energies=energies,
        restart_times_ms=times,
        restarts_executed=executed,
    )


def solve_bruteforce(model: QuboModel) -> SolveOutcome:
    """Exhaustive enumeration; exact minimum plus the count of optima.

    Bits are scanned most-significant-first so the reported assignment is the
    lexicographically smallest optimum.
    """
    if not isinstance(model, QuboModel):
        raise TypeError("bruteforce solves QUBO models")
    n = model.n
    if n > BRUTE_FORCE_CAP:
        raise ValueError(
            f"{n} variables exceeds the exact-enumeration cap of {BRUTE_FORCE_CAP}; "
            "use the sa or simcim heuristics"
        )
    t0 = time.perf_counter()
    lin = np.zeros(n)
    for i, v in model.linear.items():
        lin[i] = v
    if model.quadratic:
        qi = np.array([i for i, _ in model.quadratic], dtype=np.int64)
        qj = np.array([j for _, j in model.quadratic], dtype=np.int64)
        qv = np.array(list(model.quadratic.values()))
    else:
        qi = qj = np.zeros(0, dtype=np.int64)
        qv = np.zeros(0)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)  # bit 0 is the MSB

    best_e = math.inf
    best_m = 0
    count = 0
    total = 1 << n
    chunk = 1 << 16
    for start in range(0, total, chunk):
        m = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        z = ((m[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        e = model.offset + z @ lin
        if len(qv):
            e += (z[:, qi] * z[:, qj]) @ qv
        lo = float(e.min())
        if lo < best_e:
            best_e = lo
            best_m = start + int(np.argmin(e))
            count = int(np.count_nonzero(e == lo))
        elif lo == best_e:
            count += int(np.count_nonzero(e == lo))
    bits = tuple(int((best_m >> int(s)) & 1) for s in shifts)
    energy = model.energy(bits)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return SolveOutcome(
        method="bruteforce",
        best_bits=bits,
        best_energy=energy,
        restart_energies=(energy,),
        restart_times_ms=(elapsed,),
        restarts_executed=1,
        num_optimal=count,
    )


def solve(model, method: str, params: SolveParams = SolveParams()) -> SolveOutcome:
    """Uniform dispatch over the three backends.

    simcim accepts either model form (QUBOs are mapped first); sa and
    bruteforce require the QUBO form.
    """
    if method == "sa":
        return solve_sa(model, params)
    if method == "simcim":
        ising = to_ising(model) if isinstance(model, QuboModel) else model
        return solve_simcim(ising, params)
    if method == "bruteforce":
        return solve_bruteforce(model)
    raise ValueError(
        f"unknown solver method {method!r}; expected one of {', '.join(SOLVER_METHODS)}"
    )
