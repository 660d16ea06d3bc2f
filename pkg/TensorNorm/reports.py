#!/usr/bin/env python3
import json
import math
import os

import matplotlib
import matplotlib.pyplot as plt
import pandas as pd

try:
    import TensorNorm.utilityFunctions as utilityFunctions
except ImportError:
    import utilityFunctions

matplotlib.use('Agg')

CSV_COLUMNS = ['shape', 'model', 'seed', 'norm_lower', 'norm_upper',
               'bound_theorem1', 'bound_corollary', 'wall_time_ms']
CSV_SEP = ";"
# fixed so that the element ids in the svg do not change between runs
SVG_HASHSALT = "TensorNorm"


def outputPaths(output_dir, stem):
    '''
    Paths of the files written for one experiment.

    Returns
    -------
    dict
        Keys records, summary, plot
    '''
    base = os.path.join(output_dir, stem)
    return ({'records': "%s_records.csv" % base,
             'summary': "%s_summary.json" % base,
             'plot': "%s_scaling.svg" % base})


def writeRecordsCSV(frame, outfile):
    '''
    Writes the record table: semicolon separated, header row first,
    columns in the order of CSV_COLUMNS, missing values left empty.
    '''
    if list(frame.columns) != CSV_COLUMNS:
        raise utilityFunctions.ParameterError(
            "Record table columns must be %s" % CSV_SEP.join(CSV_COLUMNS))
    frame.to_csv(outfile, sep=CSV_SEP, index=False, na_rep="",
                 lineterminator="\n")


def readRecordsCSV(infile):
    '''
    Reads a record table written by writeRecordsCSV. Every cell is returned
    as a string so that seeds and floats are parsed exactly by the caller.

    Raises
    ------
    ParameterError
        If the header does not match CSV_COLUMNS or the table has no rows
    '''
    frame = pd.read_csv(infile, sep=CSV_SEP, dtype=str, keep_default_na=False)
    if list(frame.columns) != CSV_COLUMNS:
        raise utilityFunctions.ParameterError(
            "%s is not a record table, expected the header %s" % (
                infile, CSV_SEP.join(CSV_COLUMNS)))
    if len(frame) == 0:
        raise utilityFunctions.ParameterError(
            "%s contains no records" % infile)
    return (frame)


def jsonSafe(value):
    '''
    Replaces non-finite floats, which json cannot represent, with None.
    '''
    if isinstance(value, dict):
        return ({k: jsonSafe(v) for k, v in value.items()})
    if isinstance(value, (list, tuple)):
        return ([jsonSafe(v) for v in value])
    if isinstance(value, float) and not math.isfinite(value):
        return (None)
    return (value)


def writeSummaryJSON(summary, outfile):
    with open(outfile, "w") as out:
        json.dump(jsonSafe(summary), out, sort_keys=True, indent=2)
        out.write("\n")


def readSummaryJSON(infile):
    with open(infile) as inp:
        return (json.load(inp))


def makeScalingPlot(summary, dest, palette='CBS', height=4, width=6):
    '''
    Plots the mean, median and 95th percentile of the estimated norms, the
    certified upper bounds where present and the bounds against
    sqrt(n_1 + ... + n_K), one point per shape.

    Parameters
    ----------
    summary: dict
        A summary as returned by ScalingSummary.toDict
    dest: str
        Path of the svg file
    palette: str
        Colour palette, CBS or bright

    Returns
    -------
    None
    '''
    colours = utilityFunctions.getPalette(palette)
    rows = [r for r in summary['per_shape'] if r.get('mean') is not None]
    with plt.rc_context({'svg.hashsalt': SVG_HASHSALT,
                         'svg.fonttype': 'path'}):
        f = plt.figure(figsize=(width, height))
        a = f.add_subplot(1, 1, 1)
        x = [r['sqrt_dim_sum'] for r in rows]
        series = [('mean', 'mean estimate', '-'),
                  ('median', 'median estimate', ':'),
                  ('q95', '95th percentile', '--'),
                  ('mean_upper', 'mean certified upper bound', '-.'),
                  ('bound', 'i.i.d. bound', '-'),
                  ('bound_corollary', 'model bound', '--')]
        for key, label, style in series:
            y = [r.get(key) for r in rows]
            if len(y) == 0 or any(v is None for v in y):
                continue
            colour = colours['upper'] if key == 'mean_upper' else colours[
                key]
            a.plot(x, y, linestyle=style, marker='o', markersize=3,
                   color=colour, lw=1, label=label)
        for r in rows:
            a.annotate(r['shape'], (r['sqrt_dim_sum'], r['mean']),
                       fontsize=6, color=colours['rate'],
                       textcoords='offset points', xytext=(2, -8))
        a.set_xlabel('sqrt(n_1 + ... + n_K)')
        a.set_ylabel('spectral norm')
        a.set_title(summary['model'])
        a.grid(color=colours['grid'], lw=0.5)
        a.legend(fontsize=7, frameon=False)
        f.savefig(dest, format='svg', bbox_inches='tight',
                  metadata={'Date': None})
        plt.close(f)


def report(frame, summary, output_dir, stem="TensorNorm", palette='CBS',
           plot=True, log=None):
    '''
    Writes the record table, the summary and the scaling plot of one
    experiment to output_dir.

    Parameters
    ----------
    frame: pandas.DataFrame
        Records with the columns CSV_COLUMNS
    summary: dict
        The summary as returned by ScalingSummary.toDict
    output_dir: str
        Directory to write to; created if it does not exist
    stem: str
        Prefix for the file names
    palette: str
        Colour palette for the plot
    plot: bool
        Whether to draw the plot
    log: logging.Logger
        Optional open log file

    Returns
    -------
    dict
        Paths of the files written

    Raises
    ------
    ParameterError
        If there are no records; nothing is written in that case
    '''
    if len(frame) == 0:
        raise utilityFunctions.ParameterError(
            "There are no records to report")
    os.makedirs(output_dir, exist_ok=True)
    paths = outputPaths(output_dir, stem)
    writeRecordsCSV(frame, paths['records'])
    writeSummaryJSON(summary, paths['summary'])
    if plot:
        makeScalingPlot(summary, paths['plot'], palette)
    else:
        del paths['plot']
    if log is not None:
        for key, path in paths.items():
            log.info("Wrote %s to %s" % (key, path))
    return (paths)


def writeTailTable(rows, outfile):
    '''
    Writes the comparison of empirical tail fractions with the tail bound
    as a tab separated table.

    Parameters
    ----------
    rows: list
        dicts with keys t, bound, fraction, allowance, within
    outfile: str
        Path to write to
    '''
    frame = pd.DataFrame(rows, columns=['t', 'bound', 'fraction',
                                        'allowance', 'within'])
    frame.to_csv(outfile, sep="\t", index=False, lineterminator="\n")
