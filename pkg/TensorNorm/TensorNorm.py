#! /usr/bin/env python

import logging
import os
import sys


try:
    import TensorNorm.argP as argP
    import TensorNorm.runTensorNorm as runTensorNorm
    import TensorNorm.utilityFunctions as utilityFunctions
except ImportError:
    import argP
    import runTensorNorm
    import utilityFunctions

EXIT_USAGE = 1


def getLogger(logfile):
    log = logging.getLogger(__name__)
    log.setLevel(logging.INFO)
    for old in list(log.handlers):
        log.removeHandler(old)
        old.close()

    handler = logging.FileHandler(logfile)
    handler.setLevel(logging.INFO)

    # Create a logging format
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    log.addHandler(handler)
    return (log)


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    # Get and parse the argument parser
    try:
        parser, args = argP.parseArgs(argv)
    except SystemExit as err:
        # --help and --version exit with 0
        return (0 if err.code in (0, None) else EXIT_USAGE)

    os.makedirs(args.output_dir, exist_ok=True)
    logfile = os.path.join(args.output_dir,
                           "%s_log.txt" % args.outfile_stem)
    log = getLogger(logfile)
    log.info("\nInitial parameters:\n%s" % str(parser.format_values()))

    try:
        code = runTensorNorm.run(args, log)
    except (utilityFunctions.TensorNormError, OSError) as err:
        log.error(str(err))
        sys.stderr.write("TensorNorm %s: %s\n" % (args.command, err))
        code = runTensorNorm.EXIT_RUNTIME
    log.info("Finished with exit code %i" % code)
    for handler in list(log.handlers):
        handler.close()
    return (code)


def cli():
    sys.exit(main())


if __name__ == "__main__":
    cli()
