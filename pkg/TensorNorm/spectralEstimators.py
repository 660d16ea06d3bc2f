#!/usr/bin/env python3
'''
Lower and upper estimates of the tensor spectral norm

    ||X|| = sup { X(u_1, ..., u_K) : u_k a unit vector in R^{n_k} }

The lower estimate comes from the higher-order power method (rank-one
alternating least squares) with several restarts. The upper estimate comes
from explicit epsilon-covers C_k of the unit spheres: every unit tuple is
within epsilon (per mode) of a net tuple, so

    ||X|| <= max_{c in C_1 x ... x C_K} |X(c)| / (1 - ((1 + epsilon)^K - 1))

whenever (1 + epsilon)^K - 1 < 1.
'''
import math
from dataclasses import dataclass, field

import numpy as np

try:
    import TensorNorm.utilityFunctions as utilityFunctions
    import TensorNorm.tensorCore as tensorCore
    import TensorNorm.bounds as bounds
except ImportError:
    import utilityFunctions
    import tensorCore
    import bounds

# Largest number of net tuples certifiedUpperBound will enumerate
DEFAULT_ENUM_CAP = 10 ** 8
# Largest single cover, and largest grid scanned to build it
DEFAULT_COVER_CAP = 10 ** 6
GRID_CAP = 10 ** 8
# Net tuples evaluated per block
BLOCK_SIZE = 2 ** 20
# A collapse with a smaller norm counts as zero
ZERO_NORM = 1e-300
MAX_REDRAWS = 3


@dataclass(frozen=True)
class PowerIterConfig:
    '''
    Settings for powerIteration.

    Attributes
    ----------
    restarts: int
        Number of starting points, >= 1
    max_iters: int
        Maximum number of sweeps per restart, >= 1
    tol: float
        Stop a restart when the relative change of the objective over one
        sweep is below tol, 0 < tol < 1
    seed: int
        Seed for the random restarts
    '''
    restarts: int = 10
    max_iters: int = 1000
    tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise utilityFunctions.ParameterError(
                "restarts must be a positive integer, got %s" % self.restarts)
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise utilityFunctions.ParameterError(
                "max_iters must be a positive integer, got %s" % (
                    self.max_iters))
        utilityFunctions.checkOpenUnit("tol", self.tol)


@dataclass(frozen=True)
class PowerIterResult:
    '''
    Outcome of powerIteration.

    Attributes
    ----------
    value: float
        |X(argmax)|, a lower bound on ||X||
    argmax: UnitTuple
        The best tuple found
    iterations_used: int
        Sweeps summed over all restarts
    converged: bool
        Whether the best restart met the tolerance
    restart_values: tuple
        Final objective of every restart
    histories: tuple
        For every restart, the objective after initialisation and after
        each sweep
    '''
    value: float
    argmax: tensorCore.UnitTuple
    iterations_used: int
    converged: bool
    restart_values: tuple
    histories: tuple = field(default_factory=tuple, repr=False)


@dataclass(frozen=True)
class NetCertificate:
    '''
    A certified upper bound on ||X|| from epsilon-covers.

    Attributes
    ----------
    epsilon: float
        Cover radius
    net_sizes: tuple
        |C_1|, ..., |C_K|
    net_max: float
        max |X(c)| over the product net
    slack: float
        (1 + epsilon)^K - 1
    upper_bound: float
        net_max / (1 - slack)
    exp_slack: float
        e^(epsilon K) - 1, the majorant of slack
    exp_upper_bound: float
        net_max / (1 - exp_slack), or inf when exp_slack >= 1; equals
        2 net_max at epsilon = K0 / K
    net_argmax: tuple
        Cover indices (one per mode) of the maximising net tuple, lowest
        in lexicographic order on ties
    '''
    epsilon: float
    net_sizes: tuple
    net_max: float
    slack: float
    upper_bound: float
    exp_slack: float
    exp_upper_bound: float
    net_argmax: tuple


def maxEntryTuple(X):
    '''
    Basis tuple at the entry of largest magnitude (lowest flat index on
    ties).
    '''
    flat = int(np.argmax(np.abs(X.entries)))
    return (tensorCore.UnitTuple.basis(X.dims, X.shape.multiIndex(flat)))


def collapseAllBut(X, vectors, k):
    '''
    Contracts X with every vector except the one for mode k, returning a
    vector of length n_k.
    '''
    others = [m for m in tensorCore.contractionOrder(X.dims) if m != k]
    return (tensorCore.contractModes(X.array, others,
                                     [vectors[m] for m in others]))


def runRestart(X, vectors, cfg, rng):
    '''
    Cyclic updates u_k <- normalise(X collapsed on all modes but k) from
    the given starting vectors. Returns the final vectors, the objective
    history, the number of sweeps and whether the tolerance was met.
    '''
    vectors = [np.array(v) for v in vectors]
    obj = abs(tensorCore.multilinearEval(X, tensorCore.UnitTuple(
        tuple(vectors))))
    history = [obj]
    redraws = 0
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.max_iters + 1):
        degenerate = False
        for k in range(X.order):
            g = np.atleast_1d(collapseAllBut(X, vectors, k))
            nrm = np.linalg.norm(g)
            if nrm < ZERO_NORM:
                # X(u) = 0 here, so any replacement keeps the ascent
                degenerate = True
                v = rng.standard_normal(X.dims[k])
                vectors[k] = v / np.linalg.norm(v)
            else:
                vectors[k] = g / nrm
        new_obj = abs(tensorCore.multilinearEval(X, tensorCore.UnitTuple(
            tuple(vectors))))
        history.append(new_obj)
        if degenerate:
            redraws += 1
            if redraws > MAX_REDRAWS:
                break
            obj = new_obj
            continue
        change = abs(new_obj - obj)
        obj = new_obj
        if change <= cfg.tol * max(new_obj, ZERO_NORM):
            converged = True
            break
    return (vectors, history, sweeps, converged)


def powerIteration(X, cfg, log=None):
    '''
    Lower bound on the spectral norm by the higher-order power method.

    Restart 0 starts from the basis tuple of the largest-magnitude entry;
    restart r >= 1 starts from independent uniform unit vectors drawn from
    the stream (cfg.seed, r). Within a restart the objective |X(u)| never
    decreases. The best restart wins, the lowest index on ties.

    Parameters
    ----------
    X: DenseTensor
        The tensor
    cfg: PowerIterConfig
        Restarts, sweep limit, tolerance and seed
    log: logging.Logger
        Optional open log file

    Returns
    -------
    PowerIterResult
        value = |X(argmax)| <= ||X||
    '''
    if np.all(X.entries == 0):
        u = tensorCore.UnitTuple.basis(X.dims, (0,) * X.order)
        return (PowerIterResult(0.0, u, 0, True, (0.0,) * cfg.restarts,
                                tuple([(0.0,)] * cfg.restarts)))
    best = None
    values = []
    histories = []
    total_sweeps = 0
    for r in range(cfg.restarts):
        rng = utilityFunctions.makeGenerator(cfg.seed, 'restart', r)
        if r == 0:
            start = maxEntryTuple(X)
        else:
            start = tensorCore.UnitTuple.random(X.dims, rng)
        vectors, history, sweeps, converged = runRestart(
            X, start.vectors, cfg, rng)
        total_sweeps += sweeps
        values.append(history[-1])
        histories.append(tuple(history))
        if best is None or history[-1] > best[0]:
            best = (history[-1], vectors, converged)
        if log is not None and not converged:
            log.debug("Power iteration restart %i stopped after %i sweeps "
                      "without converging" % (r, sweeps))
    argmax = tensorCore.UnitTuple(tuple(best[1]))
    value = abs(tensorCore.multilinearEval(X, argmax))
    if log is not None:
        log.debug("Power iteration on %s tensor: %.12g after %i sweeps" % (
            X.shape, value, total_sweeps))
    return (PowerIterResult(value, argmax, total_sweeps, best[2],
                            tuple(values), tuple(histories)))


def buildSphereCover(n, epsilon, cap=DEFAULT_COVER_CAP):
    '''
    An explicit epsilon-cover of the unit sphere in R^n.

    The points h * z for integer vectors z, with pitch h = epsilon / sqrt(n),
    are scanned; those with norm in [1 - epsilon/2, 1 + epsilon/2] are
    normalised and de-duplicated. Any unit vector x has a grid point within
    h sqrt(n) / 2 = epsilon / 2, that point lies in the shell, and
    normalising it moves it by at most epsilon / 2, so every unit vector is
    within epsilon of the cover. For n = 1 the cover is {+1, -1}.

    Parameters
    ----------
    n: int
        Dimension, >= 1
    epsilon: float
        Cover radius in (0, 1)
    cap: int
        Maximum cover size

    Returns
    -------
    np.array
        Array of shape (cover size, n), one unit vector per row, in
        lexicographic order

    Raises
    ------
    ParameterError
        For n < 1 or epsilon outside (0, 1)
    NetTooLargeError
        If the grid or the cover would exceed the cap
    '''
    if int(n) != n or n < 1:
        raise utilityFunctions.ParameterError(
            "n must be a positive integer, got %s" % n)
    utilityFunctions.checkOpenUnit("epsilon", epsilon)
    if n == 1:
        return (np.array([[1.0], [-1.0]]))
    h = epsilon / math.sqrt(n)
    m = int(math.ceil((1 + epsilon / 2) / h))
    ints = np.arange(-m, m + 1)
    if len(ints) ** n > GRID_CAP:
        raise utilityFunctions.NetTooLargeError(
            "An epsilon = %g cover of the sphere in R^%i needs a grid of "
            "%i^%i points, above the cap of %i; use a smaller dimension or "
            "a larger epsilon" % (epsilon, n, len(ints), n, GRID_CAP))
    # shell limits for the squared norm of the integer vector z
    lo = (1 - epsilon / 2) ** 2 / h ** 2
    hi = (1 + epsilon / 2) ** 2 / h ** 2
    # the last n - 1 coordinates as one block, the first one looped over
    rest = np.array(np.meshgrid(*[ints] * (n - 1), indexing='ij')).reshape(
        n - 1, -1).T
    rest_sq = np.sum(rest ** 2, axis=1)
    kept = []
    for z0 in ints:
        sq = rest_sq + z0 ** 2
        mask = (sq >= lo) & (sq <= hi)
        if np.any(mask):
            kept.append(np.column_stack([np.full(np.sum(mask), z0),
                                         rest[mask]]))
    Z = np.vstack(kept)
    # grid points on a common ray share their primitive integer vector
    g = np.gcd.reduce(np.abs(Z), axis=1)
    rays = np.unique(Z // g[:, None], axis=0)
    if len(rays) > cap:
        raise utilityFunctions.NetTooLargeError(
            "An epsilon = %g cover of the sphere in R^%i has %i points, "
            "above the cap of %i; use a smaller dimension or a larger "
            "epsilon" % (epsilon, n, len(rays), cap))
    cover = rays / np.linalg.norm(rays, axis=1)[:, None]
    order = np.lexsort(cover.T[::-1])
    return (cover[order])


def verifyCover(cover, epsilon, n_points=10000, seed=0):
    '''
    Spot-checks a cover: draws n_points uniform unit vectors and returns the
    largest distance from any of them to its nearest cover point. The cover
    passes when this is <= epsilon.
    '''
    cover = np.asarray(cover, dtype=np.float64)
    n = cover.shape[1]
    rng = utilityFunctions.makeGenerator(seed, 'verify', n)
    worst = 0.0
    block = max(1, BLOCK_SIZE // max(1, len(cover)))
    done = 0
    while done < n_points:
        b = min(block, n_points - done)
        P = rng.standard_normal((b, n))
        P /= np.linalg.norm(P, axis=1)[:, None]
        best_dot = np.max(P @ cover.T, axis=1)
        dist = np.sqrt(np.maximum(0.0, 2 - 2 * best_dot))
        worst = max(worst, float(np.max(dist)))
        done += b
    return (worst)


def netMaximum(X, covers):
    '''
    max |X(c_1, ..., c_K)| over the product of the covers, evaluated block
    by block over the first cover. Returns the maximum and the cover
    indices of the first (lexicographically lowest) maximiser.
    '''
    rest_size = math.prod(len(C) for C in covers[1:])
    block = max(1, BLOCK_SIZE // max(1, rest_size))
    best = -1.0
    best_index = None
    C0 = covers[0]
    for start in range(0, len(C0), block):
        T = np.tensordot(C0[start:start + block], X.array, axes=([1], [0]))
        # contract the next data mode (axis 1) and append the cover axis
        for C in covers[1:]:
            T = np.tensordot(T, C, axes=([1], [1]))
        A = np.abs(T)
        flat = int(np.argmax(A))
        val = float(A.flat[flat])
        if val > best:
            best = val
            local = np.unravel_index(flat, A.shape)
            best_index = (int(local[0]) + start,) + tuple(
                int(i) for i in local[1:])
    return (best, best_index)


def certifiedUpperBound(X, epsilon, cap=DEFAULT_ENUM_CAP,
                        cover_cap=DEFAULT_COVER_CAP, log=None):
    '''
    Certified upper bound on ||X|| by enumerating a product of
    epsilon-covers.

    Parameters
    ----------
    X: DenseTensor
        The tensor
    epsilon: float
        Cover radius; (1 + epsilon)^K - 1 must be < 1. epsilon = K0 / K
        always qualifies and gives upper_bound <= 2 net_max.
    cap: int
        Maximum number of net tuples to enumerate
    cover_cap: int
        Maximum size of a single cover
    log: logging.Logger
        Optional open log file

    Returns
    -------
    NetCertificate

    Raises
    ------
    ParameterError
        If the slack is 1 or more
    NetTooLargeError
        If the product of the cover sizes exceeds cap
    '''
    K = X.order
    slack, exp_slack = bounds.netSlack(K, epsilon)
    if slack >= 1:
        raise utilityFunctions.ParameterError(
            "epsilon = %g gives slack (1 + epsilon)^%i - 1 = %.4f >= 1, no "
            "certificate is possible; use epsilon <= K0 / K = %.4f" % (
                epsilon, K, slack, bounds.K0 / K))
    covers = [buildSphereCover(n, epsilon, cover_cap) for n in X.dims]
    sizes = tuple(len(C) for C in covers)
    total = math.prod(sizes)
    if total > cap:
        raise utilityFunctions.NetTooLargeError(
            "The product net for a %s tensor at epsilon = %g has %i tuples, "
            "above the enumeration cap of %i; use smaller dimensions or a "
            "larger epsilon" % (X.shape, epsilon, total, cap))
    net_max, net_argmax = netMaximum(X, covers)
    upper = net_max / (1 - slack)
    exp_upper = net_max / (1 - exp_slack) if exp_slack < 1 else math.inf
    if log is not None:
        log.debug("Net certificate for %s tensor at epsilon %g: %i tuples, "
                  "net max %.12g, upper bound %.12g" % (
                      X.shape, epsilon, total, net_max, upper))
    return (NetCertificate(epsilon, sizes, net_max, slack, upper, exp_slack,
                           exp_upper, net_argmax))


def spectralNormBracket(X, cfg, epsilon, cap=DEFAULT_ENUM_CAP, log=None):
    '''
    Lower and upper bounds on ||X|| from powerIteration and
    certifiedUpperBound.

    Returns
    -------
    lower: float
    upper: float
    '''
    lower = powerIteration(X, cfg, log=log).value
    upper = certifiedUpperBound(X, epsilon, cap=cap, log=log).upper_bound
    return (lower, upper)
