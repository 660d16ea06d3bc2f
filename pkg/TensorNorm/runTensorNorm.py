#!/usr/bin/env python3
import json
import os

try:
    import TensorNorm.utilityFunctions as utilityFunctions
    import TensorNorm.tensorCore as tensorCore
    import TensorNorm.spectralEstimators as spectralEstimators
    import TensorNorm.randomModels as randomModels
    import TensorNorm.bounds as bounds
    import TensorNorm.experiments as experiments
    import TensorNorm.reports as reports
except ImportError:
    import utilityFunctions
    import tensorCore
    import spectralEstimators
    import randomModels
    import bounds
    import experiments
    import reports

EXIT_OK = 0
EXIT_RUNTIME = 2
EXIT_FLAGS = 3


def run(args, log):
    '''
    Runs the subcommand named in args.command.

    Parameters
    ----------
    args: argparse.Namespace
        Parsed arguments from argP.parseArgs
    log: logging.Logger
        An open log file

    Returns
    -------
    int
        The exit code: 0 on success, 2 when a check fails, 3 when a bound
        was evaluated outside its preconditions
    '''
    runners = {'gen': runGen,
               'estimate': runEstimate,
               'bound': runBound,
               'tail': runTail,
               'experiment': runExperiment,
               'report': runReport}
    os.makedirs(args.output_dir, exist_ok=True)
    return (runners[args.command](args, log))


def outPath(args, suffix):
    return (os.path.join(args.output_dir, "%s_%s" % (args.outfile_stem,
                                                     suffix)))


def say(args, message):
    if not args.silent:
        print(message)


def modelFromArgs(args):
    return (randomModels.RandomModel(model=args.model,
                                     kind=args.kind,
                                     sigma=args.sigma,
                                     M=args.M,
                                     entry_kind=args.entry_kind))


def runGen(args, log):
    model = modelFromArgs(args)
    log.info("Sampling a %s tensor from %s with seed %i" % (
        utilityFunctions.shapeToString(args.shape), model.label(),
        args.seed))
    X, info = model.sample(args.shape, args.seed)
    outfile = args.outfile if args.outfile else outPath(args,
                                                        "tensor.json")
    tensorCore.writeTensor(outfile, X, extra={
        'model': randomModels.modelToDict(model, args.seed)})
    log.info("Tensor written to %s" % outfile)
    say(args, "Tensor written to %s" % outfile)
    return (EXIT_OK)


def runEstimate(args, log):
    X, extra = tensorCore.readTensor(args.infile)
    log.info("Read a %s tensor from %s" % (X.shape, args.infile))
    cfg = spectralEstimators.PowerIterConfig(restarts=args.restarts,
                                             max_iters=args.max_iters,
                                             tol=args.tol,
                                             seed=args.seed)
    result = spectralEstimators.powerIteration(X, cfg, log=log)
    if not result.converged:
        log.warning("Power iteration did not reach tol = %g" % args.tol)
    out = {'norm_lower': result.value,
           'converged': result.converged,
           'iterations_used': result.iterations_used,
           'argmax': [list(map(float, v)) for v in result.argmax.vectors]}
    print("norm_lower\t%r" % result.value)
    if args.epsilon is not None:
        cert = spectralEstimators.certifiedUpperBound(
            X, args.epsilon, cap=args.enum_cap, log=log)
        out.update({'norm_upper': cert.upper_bound,
                    'net_max': cert.net_max,
                    'slack': cert.slack,
                    'net_sizes': list(cert.net_sizes)})
        print("norm_upper\t%r" % cert.upper_bound)
    outfile = outPath(args, "estimate.json")
    with open(outfile, "w") as o:
        json.dump(out, o, sort_keys=True, indent=2)
        o.write("\n")
    log.info("Estimate written to %s" % outfile)
    return (EXIT_OK)


def runBound(args, log):
    if args.formula == 'lemma1_tail':
        rep = bounds.tailReport(args.t, args.sigma)
    else:
        p = bounds.BoundParams(args.shape, args.sigma, args.delta, args.M)
        if args.formula == 'theorem1':
            rep = bounds.iidBound(p)
        elif args.formula == 'corollary1':
            rep = bounds.measurementBound(p)
        else:
            rep = bounds.samplingBound(p)
    print(json.dumps(reports.jsonSafe(rep.toDict()), sort_keys=True,
                     allow_nan=False))
    log.info("%s = %r" % (rep.formula_id, rep.value))
    if not rep.valid:
        for flag in rep.validity_flags:
            log.warning("Validity flag: %s" % flag)
        return (EXIT_FLAGS)
    return (EXIT_OK)


def runTail(args, log):
    law = randomModels.SubGaussianLaw(args.kind, args.sigma)
    u = tensorCore.UnitTuple.random(
        args.shape, utilityFunctions.makeGenerator(args.seed, 'tuple'))
    say(args, "Sampling %i tensors of shape %s" % (
        args.trials, utilityFunctions.shapeToString(args.shape)))
    vals = randomModels.empiricalTail(args.shape, law, u, args.trials,
                                      args.seed)
    rows = []
    for t in args.t:
        bound = bounds.hoeffdingTail(t, args.sigma)
        frac = randomModels.tailFraction(vals, t)
        allowance = float(randomModels.binomialAllowance(frac, args.trials))
        rows.append({'t': t, 'bound': bound, 'fraction': frac,
                     'allowance': allowance,
                     'within': frac <= bound + allowance})
        print("t = %g\tfraction %.6f\tbound %.6f\t%s" % (
            t, frac, bound, "ok" if rows[-1]['within'] else "EXCEEDED"))
    outfile = outPath(args, "tail.tsv")
    reports.writeTailTable(rows, outfile)
    log.info("Tail table written to %s" % outfile)
    if all(r['within'] for r in rows):
        return (EXIT_OK)
    log.error("The empirical tail exceeds the bound by more than three "
              "standard errors")
    return (EXIT_RUNTIME)


def experimentConfig(args):
    '''
    Builds an ExperimentConfig from the experiment subcommand arguments.
    '''
    estimator = spectralEstimators.PowerIterConfig(
        restarts=args.restarts, max_iters=args.max_iters, tol=args.tol)
    return (experiments.ExperimentConfig(
        model=modelFromArgs(args),
        shapes=args.shapes,
        trials=args.trials,
        delta=args.delta,
        estimator=estimator,
        epsilon=args.epsilon,
        master_seed=args.master_seed,
        output_dir=args.output_dir,
        stem=args.outfile_stem,
        workers=args.workers,
        enum_cap=args.enum_cap,
        record_timings=not args.no_timings,
        palette=args.palette))


def summaryLines(summary):
    lines = []
    for row in summary.per_shape:
        if row['mean'] is None:
            lines.append("%s\tall %i trials failed" % (row['shape'],
                                                       row['trials']))
        else:
            lines.append("%s\tmean %.4f\tq95 %.4f\tbound %.4f\tratio %.4f"
                         % (row['shape'], row['mean'], row['q95'],
                            row['bound'], row['ratio']))
    if summary.r_squared is not None:
        lines.append("slope %.4f\tR^2 %.6f" % (summary.slope,
                                                 summary.r_squared))
    return (lines)


def runExperiment(args, log):
    cfg = experimentConfig(args)
    log.info("Experiment configuration: %s" % json.dumps(cfg.asDict(),
                                                          sort_keys=True))
    records, summary = experiments.runExperiment(cfg, log=log,
                                                 silent=args.silent)
    for line in summaryLines(summary):
        log.info(line)
        say(args, line)
    if len(summary.ratio_violations) != 0:
        log.warning("q95 exceeds the bound for %s" % ", ".join(
            summary.ratio_violations))
    flags = set()
    for dims in cfg.shapes:
        flags.update(cfg.model.modelBound(dims, cfg.delta).validity_flags)
    if len(flags) != 0:
        for flag in sorted(flags):
            log.warning("Validity flag: %s" % flag)
        return (EXIT_FLAGS)
    return (EXIT_OK)


def runReport(args, log):
    frame = reports.readRecordsCSV(args.infile)
    records = experiments.recordsFromFrame(frame)
    summary = experiments.summarise(records, args.delta)
    paths = reports.report(experiments.recordsToFrame(records),
                           summary.toDict(), args.output_dir,
                           args.outfile_stem, palette=args.palette, log=log)
    for line in summaryLines(summary):
        say(args, line)
    for key in sorted(paths):
        say(args, "%s written to %s" % (key, paths[key]))
    return (EXIT_OK)
