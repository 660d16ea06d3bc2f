#!/usr/bin/env python3
'''
Closed-form concentration bounds for the spectral norm of random tensors.

"log" is the natural logarithm throughout. The constant K0 = ln(3/2) is
chosen so that e^K0 - 1 = 1/2: with epsilon = K0 / K the discretisation
error of an epsilon-net costs at most half of the norm, so the norm is at
most twice the maximum over the net.
'''
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

try:
    import TensorNorm.utilityFunctions as utilityFunctions
except ImportError:
    import utilityFunctions

K0 = math.log(1.5)

FORMULA_IDS = ('lemma1_tail', 'theorem1', 'corollary1', 'corollary2',
               'net_slack', 'cover_count')

DELTA_FLAG = "delta out of range"
M_FLAG = "M below 2ln(2/δ)"


@dataclass(frozen=True)
class BoundParams:
    '''
    Inputs shared by the norm bounds.

    Attributes
    ----------
    dims: tuple
        Mode dimensions n_1, ..., n_K
    sigma: float
        Sub-Gaussian variance proxy, > 0
    delta: float
        Failure probability, valid in (0, 1)
    M: int or None
        Number of measurements, only for the measurement model bound
    '''
    dims: tuple
    sigma: float
    delta: float
    M: int = None

    def __post_init__(self):
        object.__setattr__(self, 'dims',
                           utilityFunctions.checkShape(self.dims))
        utilityFunctions.checkPositive("sigma", self.sigma)
        if self.M is not None and int(self.M) < 1:
            raise utilityFunctions.ParameterError(
                "M must be a positive integer, got %s" % self.M)

    @property
    def order(self):
        return (len(self.dims))

    @property
    def dim_sum(self):
        return (sum(self.dims))

    def asDict(self):
        D = {'dims': list(self.dims), 'sigma': self.sigma,
             'delta': self.delta}
        if self.M is not None:
            D['M'] = int(self.M)
        return (D)


@dataclass(frozen=True)
class BoundReport:
    '''
    The value of one bound with the inputs that produced it.
    validity_flags lists the preconditions that do not hold; the value is
    still computed where the arithmetic allows so it can be plotted.
    '''
    formula_id: str
    value: float
    log_value: float
    inputs: dict
    validity_flags: tuple = field(default_factory=tuple)

    @property
    def valid(self):
        return (len(self.validity_flags) == 0)

    def toDict(self):
        return ({'formula_id': self.formula_id,
                 'value': self.value,
                 'log_value': self.log_value,
                 'inputs': self.inputs,
                 'validity_flags': list(self.validity_flags)})


def safeLog(x):
    return (math.log(x) if x > 0 else -math.inf)


def safeExp(x):
    '''
    exp that returns inf instead of raising OverflowError.
    '''
    try:
        return (math.exp(x))
    except OverflowError:
        return (math.inf)


def deltaFlags(delta):
    if not (np.isfinite(delta) and 0 < delta < 1):
        return ([DELTA_FLAG])
    return ([])


def netLogCount(dims):
    '''
    ln of (2K/K0)^(n_1 + ... + n_K), the log of the product of the cover
    count bounds at epsilon = K0/K.
    '''
    K = len(dims)
    return (sum(dims) * math.log(2 * K / K0))


def hoeffdingTail(t, sigma, capped=True):
    '''
    The sub-Gaussian tail bound 2 exp(-t^2 / (2 sigma^2)) for
    |X(u_1, ..., u_K)| at a fixed unit tuple.

    Parameters
    ----------
    t: float
        Threshold, >= 0
    sigma: float
        Variance proxy, > 0
    capped: bool
        If True return min(1, bound), the value as a probability

    Returns
    -------
    float
        The (capped) bound
    '''
    if not (np.isfinite(t) and t >= 0):
        raise utilityFunctions.ParameterError(
            "t must be non-negative, got %s" % t)
    utilityFunctions.checkPositive("sigma", sigma)
    ratio = t / sigma
    val = 2 * math.exp(-0.5 * ratio * ratio)
    if capped:
        return (min(1.0, val))
    return (val)


def tailReport(t, sigma):
    '''
    hoeffdingTail as a BoundReport; the uncapped value is echoed in inputs.
    '''
    val = hoeffdingTail(t, sigma)
    uncapped = hoeffdingTail(t, sigma, capped=False)
    return (BoundReport('lemma1_tail', val, safeLog(val),
                        {'t': t, 'sigma': sigma, 'uncapped': uncapped}))


def conditionalTail(t, coeff_norm):
    '''
    Tail bound for the measurement model conditioned on the realised
    coefficients: min(1, 2 exp(-t^2 / (2 ||eps||^2))).
    '''
    utilityFunctions.checkPositive("coefficient norm", coeff_norm)
    return (hoeffdingTail(t, coeff_norm))


def sqrtBound(multiplier, log_terms, p, formula_id, flags):
    # value = sqrt(multiplier * sigma^2 * log_terms)
    inner = multiplier * p.sigma ** 2 * log_terms
    if np.isfinite(inner) and inner >= 0:
        value = math.sqrt(inner)
    else:
        value = math.nan
    log_value = safeLog(value) if np.isfinite(value) else math.nan
    return (BoundReport(formula_id, value, log_value, p.asDict(),
                        tuple(flags)))


def iidBound(p, formula_id='theorem1'):
    '''
    High-probability bound on the spectral norm of a tensor with
    independent sigma-sub-Gaussian entries:

        ||X|| <= sqrt(8 sigma^2 ((n_1 + ... + n_K) ln(2K/K0) + ln(2/delta)))

    with probability at least 1 - delta.

    Parameters
    ----------
    p: BoundParams
        dims, sigma and delta

    Returns
    -------
    BoundReport
        value and log_value; validity_flags holds "delta out of range"
        when delta is not in (0, 1)
    '''
    flags = deltaFlags(p.delta)
    if p.delta > 0:
        terms = netLogCount(p.dims) + math.log(2 / p.delta)
    else:
        terms = math.nan
    return (sqrtBound(8, terms, p, formula_id, flags))


def samplingBound(p):
    '''
    Bound for a tensor with M entries placed uniformly without replacement,
    each sigma-sub-Gaussian. Each entry is observed at most once, so the
    multilinear form keeps the sigma tail and the i.i.d. bound applies
    unchanged.
    '''
    return (iidBound(p, formula_id='corollary2'))


def measurementBound(p):
    '''
    Bound for X = sum_j eps_j W_j with sigma-sub-Gaussian eps_j and
    1-sub-Gaussian W entries:

        ||X|| <= sqrt(32 M sigma^2 ((n_1 + ... + n_K) ln(2K/K0)
                                    + ln(4/delta)))

    with probability at least 1 - delta, provided M >= 2 ln(2/delta).
    delta is split in half between the event ||eps|| <= 2 sqrt(M sigma^2)
    and the union bound over the net.

    Returns
    -------
    BoundReport
        with "M below 2ln(2/δ)" in validity_flags when M is too small
        (the value is still computed)
    '''
    if p.M is None:
        raise utilityFunctions.ParameterError(
            "The measurement model bound needs M")
    flags = deltaFlags(p.delta)
    if p.delta > 0:
        if p.M < 2 * math.log(2 / p.delta):
            flags.append(M_FLAG)
        terms = netLogCount(p.dims) + math.log(4 / p.delta)
    else:
        terms = math.nan
    return (sqrtBound(32 * int(p.M), terms, p, 'corollary1', flags))


def netSlack(K, epsilon):
    '''
    The relative discretisation error of an epsilon-net on K modes.

    Parameters
    ----------
    K: int
        Number of modes, >= 1
    epsilon: float
        Cover radius in (0, 1)

    Returns
    -------
    binomial_slack: float
        (1 + epsilon)^K - 1 = sum_j C(K, j) epsilon^j, the exact error term
    exp_slack: float
        e^(epsilon K) - 1, its majorant; binomial_slack <= exp_slack
    '''
    if int(K) != K or K < 1:
        raise utilityFunctions.ParameterError(
            "K must be a positive integer, got %s" % K)
    utilityFunctions.checkOpenUnit("epsilon", epsilon)
    binomial_slack = math.expm1(K * math.log1p(epsilon))
    exp_slack = math.expm1(epsilon * K)
    return (binomial_slack, exp_slack)


def slackReport(K, epsilon):
    '''
    netSlack as a BoundReport; value is the binomial slack, the majorant
    is echoed in inputs. Flags a slack of 1 or more, for which no net
    certificate exists.
    '''
    binomial_slack, exp_slack = netSlack(K, epsilon)
    flags = []
    if binomial_slack >= 1:
        flags.append("slack >= 1")
    return (BoundReport('net_slack', binomial_slack, safeLog(binomial_slack),
                        {'K': int(K), 'epsilon': epsilon,
                         'exp_slack': exp_slack}, tuple(flags)))


def coverCountBound(n, epsilon):
    '''
    The count bound (2/epsilon)^n for an epsilon-cover of the unit sphere
    in R^n.

    Parameters
    ----------
    n: int
        Ambient dimension, >= 1
    epsilon: float
        Cover radius in (0, 1]

    Returns
    -------
    value: float
        (2/epsilon)^n, inf if it overflows
    log_value: float
        n ln(2/epsilon)
    '''
    if int(n) != n or n < 1:
        raise utilityFunctions.ParameterError(
            "n must be a positive integer, got %s" % n)
    if not (np.isfinite(epsilon) and 0 < epsilon <= 1):
        raise utilityFunctions.ParameterError(
            "epsilon must be in (0, 1], got %s" % epsilon)
    log_value = n * math.log(2 / epsilon)
    return (safeExp(log_value), log_value)


def coverCountReport(n, epsilon):
    value, log_value = coverCountBound(n, epsilon)
    return (BoundReport('cover_count', value, log_value,
                        {'n': int(n), 'epsilon': epsilon}))


def volumetricCoverLowerBound(n, epsilon):
    '''
    Lower bound on the size of any epsilon-cover (Euclidean distance) of
    the unit sphere in R^n: the sphere's area divided by the area of a cap
    of chordal radius epsilon. For n = 1 the sphere is two points.

    The cap of angular radius theta covers the fraction
    I_{sin^2 theta}((n-1)/2, 1/2) / 2 of the sphere (regularised incomplete
    beta), with theta = 2 arcsin(epsilon/2) <= pi/2.
    '''
    if n == 1:
        return (2.0)
    utilityFunctions.checkOpenUnit("epsilon", epsilon)
    theta = 2 * math.asin(epsilon / 2)
    frac = 0.5 * special.betainc((n - 1) / 2, 0.5, math.sin(theta) ** 2)
    return (1 / frac)


def logUnionTail(p, t):
    '''
    ln of (2K/K0)^(n_1 + ... + n_K) * 2 exp(-t^2 / (8 sigma^2)), the union
    bound over the net on P(||X|| >= t).
    '''
    if not (np.isfinite(t) and t >= 0):
        raise utilityFunctions.ParameterError(
            "t must be non-negative, got %s" % t)
    return (netLogCount(p.dims) + math.log(2) - t * t / (8 * p.sigma ** 2))


def unionTail(p, t):
    '''
    The union bound on P(||X|| >= t) as a probability (clamped to [0, 1]).
    At t = iidBound(p).value it equals delta.
    '''
    return (min(1.0, max(0.0, safeExp(logUnionTail(p, t)))))


def coefficientNormTail(M):
    '''
    e^(-M/2), the bound on P(||eps|| > 2 sqrt(M sigma^2)) for M
    independent sigma-sub-Gaussian coefficients.
    '''
    if int(M) != M or M < 1:
        raise utilityFunctions.ParameterError(
            "M must be a positive integer, got %s" % M)
    return (math.exp(-M / 2))


def measurementUnionTail(p, t):
    '''
    The measurement-model bound on P(||X|| >= t): the union bound over the
    net at proxy 2 sqrt(M) sigma plus the probability that the
    coefficients are large,

        (2K/K0)^(sum n_k) * 2 exp(-t^2 / (32 M sigma^2)) + e^(-M/2)

    clamped to [0, 1].
    '''
    if p.M is None:
        raise utilityFunctions.ParameterError(
            "The measurement model tail needs M")
    if not (np.isfinite(t) and t >= 0):
        raise utilityFunctions.ParameterError(
            "t must be non-negative, got %s" % t)
    log_net = netLogCount(p.dims) + math.log(2) - t * t / (
        32 * p.M * p.sigma ** 2)
    return (min(1.0, safeExp(log_net) + coefficientNormTail(p.M)))


def scalingRate(dims):
    '''
    sqrt((n_1 + ... + n_K) ln K), the order of growth of the spectral norm
    of a random tensor. ln K is replaced by 1 for K = 1.
    '''
    dims = utilityFunctions.checkShape(dims)
    K = len(dims)
    logK = math.log(K) if K > 1 else 1.0
    return (math.sqrt(sum(dims) * logK))
