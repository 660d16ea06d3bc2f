#!/usr/bin/env python3
import configargparse
import os
import os.path
import re

try:
    import TensorNorm.utilityFunctions as utilityFunctions
    import TensorNorm.randomModels as randomModels
    import TensorNorm.bounds as bounds
    from TensorNorm._version import __version__
except ImportError:
    import utilityFunctions
    import randomModels
    import bounds
    from _version import __version__

COMMANDS = {'gen': 'Sample a random tensor and write it to a tensor file',
            'estimate': 'Bracket the spectral norm of a stored tensor',
            'bound': 'Evaluate a tail or spectral norm bound',
            'tail': 'Compare empirical tail fractions with the tail bound',
            'experiment': 'Run a Monte Carlo scaling experiment',
            'report': 'Re-render the outputs of stored records'}
CONFIG_VERSION = 1
OUTPUT_DIR_ENV = "TENSORNORM_OUTPUT_DIR"


def float_range(mini, maxi, default):
    '''
    Defines a type for argparse of a float with a fixed range

    Parameters
    ----------
    mini: str or float
        A float (or a string which can be converted to a float) with the
        minumum valid value for the parameter.

    maxi: str or float
        A float (or a string which can be converted to a float) with the
        maximum valid value for the paramter.

    default: str or float
        The default, which is always accepted

    Returns
    -------
    float_range_checker: function
        A function to input as a type to argparse to check if the value
        provided is in the right range
    '''
    mini = float(mini)
    maxi = float(maxi)
    default = float(default)

    def float_range_checker(arg):
        try:
            f = float(arg)
        except ValueError:
            raise configargparse.ArgumentTypeError(
                "Must be a floating point number")
        if (f < mini or f > maxi) and not f == default:
            raise configargparse.ArgumentTypeError(
                "Must be in range [%s .. %s]" % (mini, maxi))
        return (f)

    return (float_range_checker)


def int_range(mini, maxi, default):
    '''
    Defines a type for argparse of an integer with a fixed range

    Parameters
    ----------
    mini: str or int
        The minimum valid value for the parameter
    maxi: str or int
        The maximum valid value for the parameter
    default: str or int
        The default, which is always accepted

    Returns
    -------
    int_range_checker: function
        A function to input as a type to argparse to check if the value
        provided is in the right range
    '''
    mini = int(float(mini))
    maxi = int(float(maxi))
    default = int(float(default))

    def int_range_checker(arg):
        try:
            f = int(arg)
        except ValueError:
            raise configargparse.ArgumentTypeError("Must be an integer")
        if (f < mini or f > maxi) and not f == default:
            raise configargparse.ArgumentTypeError(
                "Must be in range [%s .. %s]" % (mini, maxi))
        return (f)

    return (int_range_checker)


def shape_type(arg):
    '''
    argparse type for one shape, "10,10,10"
    '''
    try:
        return (utilityFunctions.parseShape(arg))
    except utilityFunctions.TensorNormError as err:
        raise configargparse.ArgumentTypeError(str(err))


def shapes_type(arg):
    '''
    argparse type for a list of shapes separated by ";" or whitespace,
    "5,5,5 10,10,10"
    '''
    parts = [p for p in re.split(r"[;\s]+", arg.strip()) if len(p) != 0]
    if len(parts) == 0:
        raise configargparse.ArgumentTypeError("No shapes given")
    return (tuple(shape_type(p) for p in parts))


def float_list_type(arg):
    '''
    argparse type for comma separated non-negative floats, "0.5,1,2,3"
    '''
    try:
        vals = [float(x) for x in arg.split(",") if len(x.strip()) != 0]
    except ValueError:
        raise configargparse.ArgumentTypeError(
            "Must be comma separated numbers")
    if len(vals) == 0 or any(v < 0 for v in vals):
        raise configargparse.ArgumentTypeError(
            "Must be one or more non-negative numbers")
    return (vals)


def readRanges():
    '''
    Reads the default, minimum and maximum values of the ranged
    parameters from ranges.txt in the package directory.

    Returns
    -------
    defs: dict
    minis: dict
    maxis: dict
    '''
    tn_dir = os.path.dirname(utilityFunctions.__file__)
    with open("%s/ranges.txt" % tn_dir) as inp:
        ranges = [line.strip().split("\t") for line in inp
                  if len(line.strip()) != 0]
    defs = {x[0]: x[1] for x in ranges}
    minis = {x[0]: x[2] for x in ranges}
    maxis = {x[0]: x[3] for x in ranges}
    return (defs, minis, maxis)


def ranged(kind, name, ranges):
    defs, minis, maxis = ranges
    if kind == 'int':
        return (int_range(minis[name], maxis[name], defs[name]))
    return (float_range(minis[name], maxis[name], defs[name]))


def addRuntime(optional):
    optional.add("--output_dir", dest='output_dir', type=str,
                 default=None, metavar="(string)",
                 help="Directory for output files. Default: the "
                      "%s environment variable, else the current "
                      "directory" % OUTPUT_DIR_ENV)
    optional.add("--outfile_stem", dest='outfile_stem', type=str,
                 default="TensorNorm", metavar="(string)",
                 help="Prefix for output files. Default: %(default)s")
    optional.add("--silent", dest='silent',
                 help="Do not print progress to the screen. "
                      "Default: %(default)s",
                 action='store_true')


def addModel(optional, ranges, shape=True):
    defs = ranges[0]
    if shape:
        optional.add("--shape", dest='shape', type=shape_type,
                     default=None, metavar="(string)",
                     help="Tensor dimensions, comma separated, "
                          "e.g. 10,10,10. Required")
    optional.add("--model", dest='model', type=str, default='iid',
                 choices=randomModels.MODEL_KINDS,
                 help="Random tensor model. Default: %(default)s")
    optional.add("--kind", dest='kind', type=str, default='gaussian',
                 choices=randomModels.LAW_KINDS,
                 help="Law of the entries (iid), coefficients "
                      "(measurement) or sampled values (sampling). "
                      "Default: %(default)s")
    optional.add("--sigma", dest='sigma', type=ranged('float', 'sigma',
                                                      ranges),
                 default=float(defs['sigma']), metavar="(float)",
                 help="Variance proxy of that law. Default: %(default)s")
    optional.add("--M", dest='M', type=ranged('int', 'M', ranges),
                 default=None, metavar="(int)",
                 help="Number of measurements or sampled entries, "
                      "required by the measurement and sampling models. "
                      "Default: %(default)s")
    optional.add("--entry_kind", dest='entry_kind', type=str,
                 default='gaussian', choices=randomModels.LAW_KINDS,
                 help="Law of the measurement tensor entries. "
                      "Default: %(default)s")


def addEstimator(optional, ranges):
    defs = ranges[0]
    optional.add("--restarts", dest='restarts',
                 type=ranged('int', 'restarts', ranges),
                 default=int(defs['restarts']), metavar="(int)",
                 help="Power iteration starting points. Default: %(default)s")
    optional.add("--max_iters", dest='max_iters',
                 type=ranged('int', 'max_iters', ranges),
                 default=int(defs['max_iters']), metavar="(int)",
                 help="Maximum sweeps per restart. Default: %(default)s")
    optional.add("--tol", dest='tol', type=ranged('float', 'tol', ranges),
                 default=float(defs['tol']), metavar="(float)",
                 help="Relative change at which a restart stops. "
                      "Default: %(default)s")
    optional.add("--epsilon", dest='epsilon',
                 type=ranged('float', 'epsilon', ranges),
                 default=None, metavar="(float)",
                 help="Certify an upper bound with an epsilon-net of this "
                      "radius. Default: no certificate")
    optional.add("--enum_cap", dest='enum_cap',
                 type=ranged('int', 'enum_cap', ranges),
                 default=int(defs['enum_cap']), metavar="(int)",
                 help="Maximum number of net tuples to enumerate. "
                      "Default: %(default)s")


def newParser(command):
    parser = configargparse.ArgumentParser(
        prog="TensorNorm %s" % command,
        description=COMMANDS[command], add_help=False)
    required = parser.add_argument_group('Required Arguments')
    optional = parser.add_argument_group('Optional Arguments')
    optional.add('-h', '--help', action='help',
                 help="show this help message and exit")
    return (parser, required, optional)


def getParser(command):
    '''
    Builds a configargparse.ArgumentParser object with the parameters of
    one subcommand

    Parameters
    ----------
    command: str
        One of the keys of COMMANDS

    Returns
    -------
    parser: configargparse.ArgumentParser
        ArgumentParser with the parameters of that subcommand
    '''
    ranges = readRanges()
    defs = ranges[0]
    parser, required, optional = newParser(command)

    if command == 'gen':
        addModel(optional, ranges)
        optional.add("--seed", dest='seed', type=int, default=0,
                     metavar="(int)",
                     help="Random seed. Default: %(default)s")
        optional.add("--outfile", dest='outfile', type=str, default=None,
                     metavar="(string)",
                     help="Path of the tensor file. Default: "
                          "<output_dir>/<outfile_stem>_tensor.json")

    elif command == 'estimate':
        required.add("--infile", dest='infile', type=str,
                     help="Path to a tensor file. Required")
        addEstimator(optional, ranges)
        optional.add("--seed", dest='seed', type=int, default=0,
                     metavar="(int)",
                     help="Seed for the random restarts. "
                          "Default: %(default)s")

    elif command == 'bound':
        optional.add("--shape", dest='shape', type=shape_type,
                     default=None, metavar="(string)",
                     help="Tensor dimensions, comma separated. Required "
                          "for the spectral norm bounds")
        optional.add("--formula", dest='formula', type=str,
                     default='theorem1', choices=bounds.FORMULA_IDS,
                     help="Which bound to evaluate. Default: %(default)s")
        # not range checked: out of range values give validity flags
        optional.add("--sigma", dest='sigma', type=float,
                     default=float(defs['sigma']), metavar="(float)",
                     help="Variance proxy. Default: %(default)s")
        optional.add("--delta", dest='delta', type=float,
                     default=float(defs['delta']), metavar="(float)",
                     help="Failure probability. Default: %(default)s")
        optional.add("--M", dest='M', type=int, default=None,
                     metavar="(int)",
                     help="Number of measurements, for corollary1")
        optional.add("--t", dest='t', type=float, default=None,
                     metavar="(float)",
                     help="Threshold, for lemma1_tail")

    elif command == 'tail':
        optional.add("--shape", dest='shape', type=shape_type,
                     default=None, metavar="(string)",
                     help="Tensor dimensions, comma separated. Required")
        optional.add("--kind", dest='kind', type=str, default='gaussian',
                     choices=randomModels.LAW_KINDS,
                     help="Law of the entries. Default: %(default)s")
        optional.add("--sigma", dest='sigma',
                     type=ranged('float', 'sigma', ranges),
                     default=float(defs['sigma']), metavar="(float)",
                     help="Variance proxy. Default: %(default)s")
        optional.add("--trials", dest='trials',
                     type=ranged('int', 'tail_trials', ranges),
                     default=int(defs['tail_trials']), metavar="(int)",
                     help="Number of sampled tensors. Default: %(default)s")
        optional.add("--t", dest='t', type=float_list_type,
                     default=[0.5, 1.0, 2.0, 3.0], metavar="(string)",
                     help="Comma separated thresholds. Default: 0.5,1,2,3")
        optional.add("--seed", dest='seed', type=int, default=0,
                     metavar="(int)",
                     help="Random seed. Default: %(default)s")

    elif command == 'experiment':
        optional.add("--inifile", dest='inifile', type=str, default=None,
                     metavar="(string)", is_config_file=True,
                     help="Path to config file. Default: %(default)s")
        optional.add("--config_version", dest='config_version', type=int,
                     default=CONFIG_VERSION, metavar="(int)",
                     help="Version of the config file format. "
                          "Default: %(default)s")
        optional.add("--shapes", dest='shapes', type=shapes_type,
                     default=None, metavar="(string)",
                     help="Shapes of the scaling study separated by ';' "
                          "or spaces, e.g. '5,5,5 10,10,10'. Required")
        addModel(optional, ranges, shape=False)
        optional.add("--trials", dest='trials',
                     type=ranged('int', 'trials', ranges),
                     default=int(defs['trials']), metavar="(int)",
                     help="Trials per shape. Default: %(default)s")
        optional.add("--delta", dest='delta',
                     type=ranged('float', 'delta', ranges),
                     default=float(defs['delta']), metavar="(float)",
                     help="Failure probability of the bounds. "
                          "Default: %(default)s")
        optional.add("--master_seed", dest='master_seed', type=int,
                     default=0, metavar="(int)",
                     help="Seed from which every trial seed is derived. "
                          "Default: %(default)s")
        addEstimator(optional, ranges)
        optional.add("--workers", dest='workers',
                     type=ranged('int', 'workers', ranges),
                     default=int(defs['workers']), metavar="(int)",
                     help="Number of worker threads. Default: %(default)s")
        optional.add("--no_timings", dest='no_timings',
                     action='store_true',
                     help="Write 0 as the wall time of every trial, for "
                          "byte-identical outputs. Default: %(default)s")
        optional.add("--palette", dest='palette', type=str, default='CBS',
                     help="Colour palette for the plot, CBS or bright. "
                          "Default: %(default)s")

    elif command == 'report':
        required.add("--infile", dest='infile', type=str,
                     help="Path to a record table. Required")
        optional.add("--delta", dest='delta',
                     type=ranged('float', 'delta', ranges),
                     default=float(defs['delta']), metavar="(float)",
                     help="Failure probability the records were computed "
                          "for. Default: %(default)s")
        optional.add("--palette", dest='palette', type=str, default='CBS',
                     help="Colour palette for the plot, CBS or bright. "
                          "Default: %(default)s")

    addRuntime(optional)
    return (parser)


def getTopParser():
    parser = configargparse.ArgumentParser(
        prog="TensorNorm",
        description="Spectral norms of random tensors: sampling, "
                    "estimation, bounds and Monte Carlo experiments",
        epilog="Run 'TensorNorm <command> --help' for the options of a "
               "command.")
    parser.add("command", choices=sorted(COMMANDS),
               help="; ".join("%s: %s" % (k, v) for k, v in
                              COMMANDS.items()))
    parser.add("--version", action='version',
               version="TensorNorm %s" % __version__)
    return (parser)


def requireOptions(parser, args):
    '''
    Checks the options that are required for a command but cannot be
    marked required because they may come from a config file.
    '''
    needed = {'gen': ['shape'], 'tail': ['shape'], 'experiment': ['shapes']}
    for name in needed.get(args.command, []):
        if getattr(args, name) is None:
            parser.error("--%s is required" % name)
    if args.command == 'bound':
        if args.formula == 'lemma1_tail' and args.t is None:
            parser.error("--t is required for lemma1_tail")
        if args.formula != 'lemma1_tail' and args.shape is None:
            parser.error("--shape is required for %s" % args.formula)
        if args.formula == 'corollary1' and args.M is None:
            parser.error("--M is required for corollary1")
    if args.command in ('gen', 'experiment'):
        if args.model != 'iid' and args.M is None:
            parser.error("--M is required for the %s model" % args.model)
    if args.command == 'experiment' and args.config_version != (
            CONFIG_VERSION):
        parser.error("Unsupported config_version %s, expected %i" % (
            args.config_version, CONFIG_VERSION))
    if args.command in ('estimate', 'report') and args.infile is None:
        parser.error("--infile is required")


def resolveOutputDir(args):
    '''
    The --output_dir flag, else the TENSORNORM_OUTPUT_DIR environment
    variable, else the current directory.
    '''
    if args.output_dir is not None:
        return (args.output_dir)
    return (os.environ.get(OUTPUT_DIR_ENV, "."))


def parseArgs(argv):
    '''
    Parses a full command line, "<command> [options]".

    Returns
    -------
    parser: configargparse.ArgumentParser
        The parser of the chosen command
    args: argparse.Namespace
        The parsed options, with command and output_dir filled in

    Raises
    ------
    SystemExit
        On usage errors and after printing help or the version
    '''
    top = getTopParser()
    top_args = top.parse_args(argv[:1])
    parser = getParser(top_args.command)
    args = parser.parse_args(argv[1:])
    args.command = top_args.command
    requireOptions(parser, args)
    args.output_dir = resolveOutputDir(args)
    return (parser, args)
