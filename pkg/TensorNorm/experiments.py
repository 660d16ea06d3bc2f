#!/usr/bin/env python3
'''
Monte Carlo drivers: one trial samples a tensor, estimates its spectral norm
and evaluates the bounds; an experiment repeats this over shapes and seeds
and summarises how the estimates scale against the bounds.
'''
import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats

try:
    import TensorNorm.utilityFunctions as utilityFunctions
    import TensorNorm.spectralEstimators as spectralEstimators
    import TensorNorm.randomModels as randomModels
    import TensorNorm.bounds as bounds
    import TensorNorm.reports as reports
except ImportError:
    import utilityFunctions
    import spectralEstimators
    import randomModels
    import bounds
    import reports

SUMMARY_SCHEMA_VERSION = 1
FAILED = "failed"


class TrialError(utilityFunctions.TensorNormError):
    '''
    A trial could not produce a record; the message names the trial seed.
    '''


@dataclass(frozen=True)
class ExperimentConfig:
    '''
    Everything needed to rerun an experiment.

    Attributes
    ----------
    model: RandomModel
        The random tensor model
    shapes: tuple
        One tuple of dimensions per shape in the scaling study
    trials: int
        Trials per shape
    delta: float
        Failure probability for the bounds
    estimator: PowerIterConfig
        Power iteration settings; its seed is replaced by each trial seed
    epsilon: float or None
        If set, every trial is also certified with an epsilon-net
    master_seed: int
        Trial seeds are derived from (master_seed, shape_index, trial_index)
    output_dir: str
        Directory for the record table, summary, plot and log
    stem: str
        Prefix for output file names
    workers: int
        Number of worker threads
    enum_cap: int
        Enumeration cap for the net certificate
    record_timings: bool
        Write wall times; switch off for byte-identical outputs
    palette: str
        Colour palette for the scaling plot, CBS or bright
    '''
    model: randomModels.RandomModel
    shapes: tuple
    trials: int = 100
    delta: float = 0.05
    estimator: spectralEstimators.PowerIterConfig = field(
        default_factory=spectralEstimators.PowerIterConfig)
    epsilon: float = None
    master_seed: int = 0
    output_dir: str = "."
    stem: str = "TensorNorm"
    workers: int = 1
    enum_cap: int = spectralEstimators.DEFAULT_ENUM_CAP
    record_timings: bool = True
    palette: str = 'CBS'

    def __post_init__(self):
        shapes = tuple(utilityFunctions.checkShape(s) for s in self.shapes)
        if len(shapes) == 0:
            raise utilityFunctions.ParameterError(
                "An experiment needs at least one shape")
        object.__setattr__(self, 'shapes', shapes)
        if int(self.trials) != self.trials or self.trials < 1:
            raise utilityFunctions.ParameterError(
                "trials must be a positive integer, got %s" % self.trials)
        utilityFunctions.checkOpenUnit("delta", self.delta)
        if int(self.workers) != self.workers or self.workers < 1:
            raise utilityFunctions.ParameterError(
                "workers must be a positive integer, got %s" % self.workers)
        if self.epsilon is not None:
            for dims in shapes:
                checkCertifiable(dims, self.epsilon, self.enum_cap)
        utilityFunctions.getPalette(self.palette)

    def asDict(self):
        D = {'model': randomModels.modelToDict(self.model),
             'shapes': [list(s) for s in self.shapes],
             'trials': self.trials,
             'delta': self.delta,
             'estimator': dataclasses.asdict(self.estimator),
             'epsilon': self.epsilon,
             'master_seed': self.master_seed}
        return (D)


@dataclass(frozen=True)
class TrialRecord:
    '''
    One Monte Carlo observation.

    norm_lower is the power iteration estimate and norm_upper the net
    certificate (None when certification is off). bound_corollary is the
    bound of the measurement or sampling model (None for iid). A failed
    trial has failed = True, norm_lower = nan and the reason in error.
    '''
    shape: tuple
    model: str
    seed: int
    norm_lower: float
    norm_upper: float
    bound_theorem1: float
    bound_corollary: float
    wall_time_ms: int
    failed: bool = False
    error: str = ""


@dataclass(frozen=True)
class ScalingSummary:
    '''
    Per-shape aggregates of the successful trials and the regression of the
    mean estimate against sqrt(n_1 + ... + n_K).

    per_shape is a list of dicts with keys shape, dim_sum, sqrt_dim_sum,
    scaling_rate, trials, failed, mean, median, q95, bound, ratio,
    bound_corollary, exceed_fraction and exceed_allowance.
    '''
    model: str
    delta: float
    per_shape: list
    slope: float
    intercept: float
    r_squared: float
    total_failed: int
    ratio_violations: list

    def toDict(self):
        return ({'schema_version': SUMMARY_SCHEMA_VERSION,
                 'model': self.model,
                 'delta': self.delta,
                 'per_shape': self.per_shape,
                 'regression': {'x': 'sqrt_dim_sum',
                                'y': 'mean',
                                'slope': self.slope,
                                'intercept': self.intercept,
                                'r_squared': self.r_squared},
                 'total_failed': self.total_failed,
                 'ratio_violations': self.ratio_violations})


def checkCertifiable(dims, epsilon, cap):
    '''
    Raises a ParameterError if a net certificate for a tensor of these
    dimensions would exceed the enumeration cap.
    '''
    slack, _ = bounds.netSlack(len(dims), epsilon)
    if slack >= 1:
        raise utilityFunctions.ParameterError(
            "epsilon = %g is too large for %i modes" % (epsilon, len(dims)))
    try:
        sizes = [len(spectralEstimators.buildSphereCover(n, epsilon))
                 for n in sorted(set(dims))]
    except utilityFunctions.NetTooLargeError as err:
        raise utilityFunctions.ParameterError(str(err))
    size_of = dict(zip(sorted(set(dims)), sizes))
    total = math.prod(size_of[n] for n in dims)
    if total > cap:
        raise utilityFunctions.ParameterError(
            "Certification of a %s tensor at epsilon = %g needs %i net "
            "tuples, above the cap of %i" % (
                utilityFunctions.shapeToString(dims), epsilon, total, cap))


def runTrial(shape, model, estimator, seed, delta=0.05, epsilon=None,
             enum_cap=spectralEstimators.DEFAULT_ENUM_CAP, log=None):
    '''
    Samples one tensor from model, estimates its norm and evaluates the
    bounds.

    Parameters
    ----------
    shape: tuple
        Mode dimensions
    model: RandomModel
        The model to sample from
    estimator: PowerIterConfig
        Power iteration settings; the seed is replaced by the trial seed
    seed: int
        Trial seed; equal seeds give equal records apart from wall time
    delta: float
        Failure probability for the bounds
    epsilon: float or None
        Certify with an epsilon-net when set
    log: logging.Logger
        Optional open log file

    Returns
    -------
    TrialRecord

    Raises
    ------
    TrialError
        If sampling or estimation fails or power iteration does not
        converge; the message includes the seed
    '''
    dims = utilityFunctions.checkShape(shape)
    start = time.perf_counter()
    try:
        X, info = model.sample(dims, seed)
        if model.model == 'sampling' and X.nonzeroCount() != model.M:
            raise TrialError("sampled tensor has %i nonzeros, expected %i" % (
                X.nonzeroCount(), model.M))
        cfg = dataclasses.replace(estimator, seed=seed)
        result = spectralEstimators.powerIteration(X, cfg, log=log)
        if not result.converged:
            raise TrialError("power iteration did not converge in %i "
                             "sweeps" % cfg.max_iters)
        upper = None
        if epsilon is not None:
            upper = spectralEstimators.certifiedUpperBound(
                X, epsilon, cap=enum_cap, log=log).upper_bound
        bound_iid = bounds.iidBound(bounds.BoundParams(
            dims, model.sigma, delta)).value
        bound_corollary = None
        if model.model != 'iid':
            bound_corollary = model.modelBound(dims, delta).value
    except utilityFunctions.TensorNormError as err:
        raise TrialError("Trial with seed %i on %s failed: %s" % (
            seed, utilityFunctions.shapeToString(dims), err))
    elapsed = int(round((time.perf_counter() - start) * 1000))
    return (TrialRecord(dims, model.label(), int(seed), result.value, upper,
                        bound_iid, bound_corollary, elapsed))


def trialJobs(cfg):
    '''
    (shape_index, trial_index, seed) for every trial, in record order.
    '''
    jobs = []
    for si in range(len(cfg.shapes)):
        for ti in range(cfg.trials):
            jobs.append((si, ti, utilityFunctions.deriveSeed(
                cfg.master_seed, si, ti)))
    return (jobs)


def runJob(cfg, job, log=None):
    si, ti, seed = job
    dims = cfg.shapes[si]
    try:
        rec = runTrial(dims, cfg.model, cfg.estimator, seed, cfg.delta,
                       cfg.epsilon, cfg.enum_cap, log=log)
    except TrialError as err:
        if log is not None:
            log.warning(str(err))
        rec = failedRecord(cfg, dims, seed, str(err))
    if not cfg.record_timings:
        rec = dataclasses.replace(rec, wall_time_ms=0)
    return (rec)


def failedRecord(cfg, dims, seed, message):
    bound_iid = bounds.iidBound(bounds.BoundParams(
        dims, cfg.model.sigma, cfg.delta)).value
    bound_corollary = None
    if cfg.model.model != 'iid':
        bound_corollary = cfg.model.modelBound(dims, cfg.delta).value
    return (TrialRecord(dims, cfg.model.label(), int(seed), math.nan, None,
                        bound_iid, bound_corollary, 0, failed=True,
                        error=message))


def runExperiment(cfg, log=None, silent=True):
    '''
    Runs cfg.trials trials for every shape, summarises them and writes the
    record table, summary and plot to cfg.output_dir before returning.

    Trials run on a pool of cfg.workers threads. Each trial's seed depends
    only on (master_seed, shape_index, trial_index) and the records are
    kept in (shape_index, trial_index) order, so the output does not depend
    on the number of threads.

    Returns
    -------
    records: list
        TrialRecords, failed trials included
    summary: ScalingSummary
    '''
    jobs = trialJobs(cfg)
    if log is not None:
        log.info("Running %i trials on %i shapes with %i workers" % (
            len(jobs), len(cfg.shapes), cfg.workers))
    if not silent:
        print("Running %i trials on %i shapes" % (len(jobs),
                                                   len(cfg.shapes)))
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        records = list(pool.map(lambda job: runJob(cfg, job, log), jobs))
    summary = summarise(records, cfg.delta)
    if summary.total_failed != 0 and log is not None:
        log.warning("%i trials failed and were left out of the summary" % (
            summary.total_failed))
    reports.report(recordsToFrame(records), summary.toDict(),
                   cfg.output_dir, cfg.stem, palette=cfg.palette, log=log)
    return (records, summary)


def nearestRankQuantile(values, q):
    '''
    The nearest-rank q-quantile: the ceil(q * n)-th smallest value
    (1-based), or the smallest value when q * n < 1.
    '''
    vals = sorted(values)
    rank = max(1, int(math.ceil(q * len(vals))))
    return (vals[rank - 1])


def summarise(records, delta):
    '''
    Builds the ScalingSummary of a list of records. Failed trials are
    counted but left out of every aggregate.

    Parameters
    ----------
    records: list
        TrialRecords of one experiment (one model)
    delta: float
        The failure probability the bounds were computed for

    Returns
    -------
    ScalingSummary
    '''
    if len(records) == 0:
        raise utilityFunctions.ParameterError("No records to summarise")
    shapes = []
    for rec in records:
        if rec.shape not in shapes:
            shapes.append(rec.shape)
    per_shape = []
    violations = []
    for dims in shapes:
        recs = [r for r in records if r.shape == dims]
        ok = [r for r in recs if not r.failed]
        row = {'shape': utilityFunctions.shapeToString(dims),
               'dim_sum': sum(dims),
               'sqrt_dim_sum': math.sqrt(sum(dims)),
               'scaling_rate': bounds.scalingRate(dims),
               'trials': len(recs),
               'failed': len(recs) - len(ok),
               'bound': recs[0].bound_theorem1,
               'bound_corollary': recs[0].bound_corollary}
        if len(ok) != 0:
            lows = [r.norm_lower for r in ok]
            model_bound = row['bound_corollary'] if (
                row['bound_corollary'] is not None) else row['bound']
            row['mean'] = float(np.mean(lows))
            row['median'] = float(np.median(lows))
            row['q95'] = float(nearestRankQuantile(lows, 0.95))
            row['ratio'] = row['q95'] / model_bound
            row['exceed_fraction'] = float(np.mean(
                [low > model_bound for low in lows]))
            uppers = [r.norm_upper for r in ok if r.norm_upper is not None]
            row['mean_upper'] = float(np.mean(uppers)) if len(
                uppers) != 0 else None
        else:
            for key in ['mean', 'median', 'q95', 'ratio', 'exceed_fraction',
                        'mean_upper']:
                row[key] = None
        row['exceed_allowance'] = delta + float(
            randomModels.binomialAllowance(delta, max(1, len(ok))))
        if row['ratio'] is not None and not 0 < row['ratio'] <= 1:
            violations.append(row['shape'])
        per_shape.append(row)
    xs = [r['sqrt_dim_sum'] for r in per_shape if r['mean'] is not None]
    ys = [r['mean'] for r in per_shape if r['mean'] is not None]
    slope = intercept = r_squared = None
    if len(set(xs)) >= 2:
        fit = stats.linregress(xs, ys)
        slope = float(fit.slope)
        intercept = float(fit.intercept)
        r_squared = float(fit.rvalue ** 2)
    return (ScalingSummary(records[0].model, delta, per_shape, slope,
                           intercept, r_squared,
                           sum(r['failed'] for r in per_shape), violations))


def recordsToFrame(records):
    '''
    The records as a DataFrame with the record table columns, in order.
    Failed trials carry "failed" in norm_lower; missing optional values are
    empty.
    '''
    rows = []
    for r in records:
        rows.append({'shape': utilityFunctions.shapeToString(r.shape),
                     'model': r.model,
                     'seed': r.seed,
                     'norm_lower': FAILED if r.failed else r.norm_lower,
                     'norm_upper': r.norm_upper,
                     'bound_theorem1': r.bound_theorem1,
                     'bound_corollary': r.bound_corollary,
                     'wall_time_ms': r.wall_time_ms})
    return (pd.DataFrame(rows, columns=reports.CSV_COLUMNS))


def optionalFloat(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return (None)
    if isinstance(x, str) and len(x.strip()) == 0:
        return (None)
    return (float(x))


def recordsFromFrame(frame):
    '''
    Inverse of recordsToFrame (error messages of failed trials are not
    stored in the table and come back empty).
    '''
    records = []
    for row in frame.itertuples(index=False):
        failed = str(row.norm_lower) == FAILED
        records.append(TrialRecord(
            utilityFunctions.parseShape(str(row.shape)),
            str(row.model),
            int(row.seed),
            math.nan if failed else float(row.norm_lower),
            optionalFloat(row.norm_upper),
            float(row.bound_theorem1),
            optionalFloat(row.bound_corollary),
            int(row.wall_time_ms),
            failed=failed))
    return (records)
