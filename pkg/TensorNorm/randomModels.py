#!/usr/bin/env python3
'''
Seeded samplers for random tensors with sub-Gaussian entries.

Every sampler is a pure function of its parameters and seed. Random numbers
come from utilityFunctions.makeGenerator, one Philox stream per purpose
('entries', 'coefficients', 'positions', 'values', 'tail'), so changing one
part of a model never changes the numbers drawn for another.
'''
from dataclasses import dataclass

import numpy as np

try:
    import TensorNorm.utilityFunctions as utilityFunctions
    import TensorNorm.tensorCore as tensorCore
    import TensorNorm.bounds as bounds
except ImportError:
    import utilityFunctions
    import tensorCore
    import bounds

LAW_KINDS = ('gaussian', 'rademacher', 'uniform')
MODEL_KINDS = ('iid', 'measurement', 'sampling')
MODEL_SCHEMA_VERSION = 1
MIN_SIGMA = 1e-12


@dataclass(frozen=True)
class SubGaussianLaw:
    '''
    A zero-mean entry distribution with variance proxy sigma.

    gaussian    N(0, sigma^2)
    rademacher  +sigma or -sigma with probability 1/2
    uniform     Uniform[-sigma, sigma]; sigma (the half-width) is a valid
                but conservative proxy by Hoeffding's lemma
    '''
    kind: str
    sigma: float

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise utilityFunctions.ParameterError(
                "Unknown law %s, must be one of %s" % (
                    self.kind, ", ".join(LAW_KINDS)))
        if not (np.isfinite(self.sigma) and self.sigma >= MIN_SIGMA):
            raise utilityFunctions.ParameterError(
                "sigma must be at least %g, got %s" % (MIN_SIGMA, self.sigma))

    def standardDraw(self, rng, size):
        '''
        Draws with proxy 1; draw() multiplies these by sigma.
        '''
        if self.kind == 'gaussian':
            return (rng.standard_normal(size))
        elif self.kind == 'rademacher':
            return (rng.integers(0, 2, size=size) * 2.0 - 1.0)
        return (rng.uniform(-1.0, 1.0, size=size))

    def draw(self, rng, size):
        return (self.sigma * self.standardDraw(rng, size))


@dataclass(frozen=True)
class MeasurementModel:
    '''
    X = sum_{j=1}^{M} eps_j W_j, with eps_j drawn from coeff_law (proxy
    coeff_sigma) and the entries of every W_j i.i.d. with proxy 1.
    '''
    M: int
    coeff_sigma: float
    coeff_kind: str = 'gaussian'
    entry_law: SubGaussianLaw = SubGaussianLaw('gaussian', 1.0)

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise utilityFunctions.ParameterError(
                "M must be a positive integer, got %s" % self.M)
        if self.entry_law.sigma != 1.0:
            raise utilityFunctions.ParameterError(
                "The W entries must have variance proxy 1")
        # validates coeff_kind and coeff_sigma
        self.coeffLaw()

    def coeffLaw(self):
        return (SubGaussianLaw(self.coeff_kind, self.coeff_sigma))


@dataclass(frozen=True)
class SamplingModel:
    '''
    M entries at distinct uniformly chosen positions, values drawn from
    value_law, every other entry exactly 0.
    '''
    M: int
    value_law: SubGaussianLaw

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise utilityFunctions.ParameterError(
                "M must be a positive integer, got %s" % self.M)


@dataclass(frozen=True)
class RandomModel:
    '''
    Describes which of the three models generates a tensor.

    Attributes
    ----------
    model: str
        'iid', 'measurement' or 'sampling'
    kind: str
        Law of the entries (iid), the coefficients eps_j (measurement) or
        the sampled values (sampling)
    sigma: float
        Variance proxy of that law
    M: int or None
        Number of measurements or sampled entries; required for
        'measurement' and 'sampling'
    entry_kind: str
        Law of the W entries for the measurement model (proxy 1)
    '''
    model: str = 'iid'
    kind: str = 'gaussian'
    sigma: float = 1.0
    M: int = None
    entry_kind: str = 'gaussian'

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise utilityFunctions.ParameterError(
                "Unknown model %s, must be one of %s" % (
                    self.model, ", ".join(MODEL_KINDS)))
        if self.model != 'iid' and self.M is None:
            raise utilityFunctions.ParameterError(
                "The %s model needs M" % self.model)
        # validates the parameters of the chosen model
        self.components()

    def law(self):
        return (SubGaussianLaw(self.kind, self.sigma))

    def components(self):
        '''
        The SubGaussianLaw, MeasurementModel or SamplingModel this
        descriptor stands for.
        '''
        if self.model == 'iid':
            return (self.law())
        elif self.model == 'measurement':
            return (MeasurementModel(
                int(self.M), self.sigma, self.kind,
                SubGaussianLaw(self.entry_kind, 1.0)))
        return (SamplingModel(int(self.M), self.law()))

    def sample(self, dims, seed):
        '''
        Draws one tensor from the model.

        Returns
        -------
        X: DenseTensor
            The tensor
        info: dict
            'eps' (the realised coefficients) for the measurement model,
            'positions' for the sampling model, empty for iid
        '''
        comp = self.components()
        if self.model == 'iid':
            return (sampleIID(dims, comp, seed), dict())
        elif self.model == 'measurement':
            X, eps = sampleMeasurementModel(dims, comp, seed)
            return (X, {'eps': eps})
        X, positions = sampleWithoutReplacement(dims, comp, seed)
        return (X, {'positions': positions})

    def boundParams(self, dims, delta):
        M = int(self.M) if self.model == 'measurement' else None
        return (bounds.BoundParams(tuple(dims), self.sigma, delta, M))

    def modelBound(self, dims, delta):
        '''
        The bound that belongs to this model: the i.i.d. bound, the
        measurement bound or the sampling bound.
        '''
        p = self.boundParams(dims, delta)
        if self.model == 'iid':
            return (bounds.iidBound(p))
        elif self.model == 'measurement':
            return (bounds.measurementBound(p))
        return (bounds.samplingBound(p))

    def label(self):
        '''
        Short description for record tables, e.g. "measurement:gaussian:1:64".
        '''
        parts = [self.model, self.kind, "%g" % self.sigma]
        if self.M is not None:
            parts.append(str(int(self.M)))
        return (":".join(parts))


def modelToDict(model, seed=None):
    '''
    JSON-ready description {"schema_version", "model", params..., "seed"}.
    '''
    D = {'schema_version': MODEL_SCHEMA_VERSION,
         'model': model.model,
         'kind': model.kind,
         'sigma': model.sigma}
    if model.M is not None:
        D['M'] = int(model.M)
    if model.model == 'measurement':
        D['entry_kind'] = model.entry_kind
    if seed is not None:
        D['seed'] = int(seed)
    return (D)


def modelFromDict(D):
    '''
    Inverse of modelToDict. Unknown keys and other schema versions are
    rejected.

    Returns
    -------
    model: RandomModel
    seed: int or None
    '''
    if D.get('schema_version') != MODEL_SCHEMA_VERSION:
        raise utilityFunctions.ParameterError(
            "Unsupported model schema version %s" % D.get('schema_version'))
    allowed = {'schema_version', 'model', 'kind', 'sigma', 'M',
               'entry_kind', 'seed'}
    unknown = set(D) - allowed
    if len(unknown) != 0:
        raise utilityFunctions.ParameterError(
            "Unknown model keys: %s" % ", ".join(sorted(unknown)))
    model = RandomModel(model=D['model'],
                        kind=D.get('kind', 'gaussian'),
                        sigma=float(D.get('sigma', 1.0)),
                        M=D.get('M'),
                        entry_kind=D.get('entry_kind', 'gaussian'))
    return (model, D.get('seed'))


def toShape(shape):
    if isinstance(shape, tensorCore.Shape):
        return (shape)
    return (tensorCore.Shape(tuple(shape)))


def sampleIID(shape, law, seed):
    '''
    A tensor with i.i.d. entries from law.

    Parameters
    ----------
    shape: Shape or tuple
        Mode dimensions
    law: SubGaussianLaw
        Entry distribution
    seed: int
        Seed; equal (shape, law, seed) give bit-identical tensors

    Returns
    -------
    DenseTensor
    '''
    shape = toShape(shape)
    rng = utilityFunctions.makeGenerator(seed, 'entries')
    return (tensorCore.DenseTensor(shape, law.draw(rng, shape.total_size)))


def sampleMeasurementModel(shape, model, seed):
    '''
    Draws X = sum_j eps_j W_j.

    The coefficients are standard draws multiplied by coeff_sigma, so
    changing coeff_sigma rescales the same stream: doubling it doubles eps
    and X exactly.

    Parameters
    ----------
    shape: Shape or tuple
        Mode dimensions
    model: MeasurementModel
        M, the coefficient law and the W entry law
    seed: int
        Seed

    Returns
    -------
    X: DenseTensor
        The tensor
    eps: np.array
        The realised coefficients (length M)
    '''
    shape = toShape(shape)
    coeff_rng = utilityFunctions.makeGenerator(seed, 'coefficients')
    entry_rng = utilityFunctions.makeGenerator(seed, 'entries')
    eps = model.coeff_sigma * model.coeffLaw().standardDraw(coeff_rng,
                                                            model.M)
    X = np.zeros(shape.total_size)
    # one W_j at a time keeps memory at one tensor
    for j in range(model.M):
        X += eps[j] * model.entry_law.draw(entry_rng, shape.total_size)
    return (tensorCore.DenseTensor(shape, X), eps)


def sampleWithoutReplacement(shape, model, seed):
    '''
    Places M values at distinct uniformly random positions.

    Positions come from a partial Fisher-Yates shuffle over the virtual
    range 0..N-1 of flat indices (N = total size): step i swaps slot i with
    a uniform slot in [i, N), and only displaced slots are stored, so the
    extra memory is O(M) and every M-subset (in every order) is equally
    likely.

    Parameters
    ----------
    shape: Shape or tuple
        Mode dimensions
    model: SamplingModel
        M and the value law
    seed: int
        Seed

    Returns
    -------
    X: DenseTensor
        The tensor, zero outside the sampled positions
    positions: list
        The M multi-indices in the order they were drawn

    Raises
    ------
    ParameterError
        If M exceeds the number of entries
    '''
    shape = toShape(shape)
    N = shape.total_size
    if model.M > N:
        raise utilityFunctions.ParameterError(
            "Cannot sample %i distinct entries from a %s tensor of %i "
            "entries" % (model.M, shape, N))
    pos_rng = utilityFunctions.makeGenerator(seed, 'positions')
    val_rng = utilityFunctions.makeGenerator(seed, 'values')
    swapped = dict()
    flat = []
    for i in range(model.M):
        j = int(pos_rng.integers(i, N))
        chosen = swapped.get(j, j)
        swapped[j] = swapped.get(i, i)
        flat.append(chosen)
    values = model.value_law.draw(val_rng, model.M)
    X = np.zeros(N)
    X[flat] = values
    positions = [shape.multiIndex(f) for f in flat]
    return (tensorCore.DenseTensor(shape, X), positions)


def empiricalTail(shape, law, u, trials, seed):
    '''
    Samples |X(u)| for `trials` independent i.i.d. tensors X at a unit tuple
    u that is fixed before any sampling.

    Returns
    -------
    np.array
        The trials values |X(u)|
    '''
    shape = toShape(shape)
    tensorCore.checkTupleShape(tensorCore.DenseTensor.zeros(shape.dims), u)
    if trials < 1:
        raise utilityFunctions.ParameterError(
            "trials must be at least 1, got %s" % trials)
    rng = utilityFunctions.makeGenerator(seed, 'tail')
    vals = np.empty(trials)
    for t in range(trials):
        X = tensorCore.DenseTensor(shape, law.draw(rng, shape.total_size))
        vals[t] = abs(tensorCore.multilinearEval(X, u))
    return (vals)


def empiricalConditionalTail(shape, model, eps, u, trials, seed):
    '''
    As empiricalTail for the measurement model with the coefficients held
    at the realised eps: only the W_j are redrawn in each trial.
    '''
    shape = toShape(shape)
    eps = np.asarray(eps, dtype=np.float64)
    if eps.size != model.M:
        raise utilityFunctions.DimensionError(
            "%i coefficients given for M = %i" % (eps.size, model.M))
    rng = utilityFunctions.makeGenerator(seed, 'tail')
    vals = np.empty(trials)
    for t in range(trials):
        X = np.zeros(shape.total_size)
        for j in range(model.M):
            X += eps[j] * model.entry_law.draw(rng, shape.total_size)
        vals[t] = abs(tensorCore.multilinearEval(
            tensorCore.DenseTensor(shape, X), u))
    return (vals)


def tailFraction(values, t):
    '''
    Fraction of values >= t.
    '''
    return (float(np.mean(np.asarray(values) >= t)))


def binomialAllowance(p, trials, k=3):
    '''
    k binomial standard errors for a proportion p estimated from trials.
    '''
    return (k * np.sqrt(p * (1 - p) / trials))


def coefficientNormEvent(eps, sigma):
    '''
    True when ||eps|| <= 2 sqrt(M sigma^2), the event on which the
    measurement model behaves like a 2 sqrt(M) sigma sub-Gaussian tensor.
    '''
    eps = np.asarray(eps, dtype=np.float64)
    return (bool(np.linalg.norm(eps) <= 2 * np.sqrt(eps.size * sigma ** 2)))


def indicatorEnergy(positions, u):
    '''
    sum_j <W_j, u_1 o ... o u_K>^2 over the sampled positions, where W_j is
    the indicator of position j. Since the positions are distinct this is
    at most ||u_1 o ... o u_K||_F^2 = 1.
    '''
    total = 0.0
    for index in positions:
        prod = 1.0
        for k, i in enumerate(index):
            prod *= u.vectors[k][i]
        total += prod ** 2
    return (total)
