#!/usr/bin/env python3
import math
import numpy as np

try:
    import TensorNorm.palettes as palettes
except ImportError:
    import palettes


class TensorNormError(Exception):
    '''
    Base class for all errors raised by TensorNorm.
    '''


class DimensionError(TensorNormError, ValueError):
    '''
    Raised when shapes, vector lengths or mode indices do not agree.
    '''


class ParameterError(TensorNormError, ValueError):
    '''
    Raised when a numerical parameter is outside its valid range.
    '''


class NetTooLargeError(TensorNormError, RuntimeError):
    '''
    Raised when an epsilon-net (or the product of several nets) would
    exceed the configured enumeration cap.
    '''


# Codes for the independent random streams drawn from one seed.
# A stream is Philox keyed by SeedSequence(seed, spawn_key=(code, ...)),
# so adding a stream never shifts the numbers drawn by the others.
STREAM_TAGS = {'entries': 1,
               'coefficients': 2,
               'positions': 3,
               'values': 4,
               'restart': 5,
               'tail': 6,
               'verify': 7,
               'trial': 8,
               'tuple': 9}

SEED_MASK = 0xFFFFFFFFFFFFFFFF


def checkShape(dims):
    '''
    Checks a list of mode dimensions and returns it as a tuple of ints.

    Parameters
    ----------
    dims: iterable
        The dimensions n_1, ..., n_K

    Returns
    -------
    tuple
        The dimensions as python integers

    Raises
    ------
    DimensionError
        If there are no modes, a dimension is below 1 or the total number of
        entries cannot be addressed.
    '''
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError):
        raise DimensionError("Dimensions must be integers, got %s" % (
            str(dims)))
    if len(dims) == 0:
        raise DimensionError("A tensor needs at least one mode")
    if any(d < 1 for d in dims):
        raise DimensionError(
            "Every dimension must be at least 1, got %s" % str(dims))
    # python ints do not overflow, so this is the exact total size
    if math.prod(dims) > np.iinfo(np.intp).max:
        raise DimensionError(
            "A %s tensor has too many entries to address" % shapeToString(
                dims))
    return (dims)


def checkFinite(arr, what="entries"):
    '''
    Raises a ParameterError if an array contains NaN or infinite values.
    '''
    if not np.all(np.isfinite(arr)):
        raise ParameterError("All %s must be finite" % what)


def checkPositive(name, value):
    '''
    Raises a ParameterError unless value is a finite number > 0.
    '''
    if not (np.isfinite(value) and value > 0):
        raise ParameterError("%s must be positive, got %s" % (name, value))


def checkOpenUnit(name, value):
    '''
    Raises a ParameterError unless 0 < value < 1.
    '''
    if not (np.isfinite(value) and 0 < value < 1):
        raise ParameterError("%s must be in (0, 1), got %s" % (name, value))


def parseShape(string):
    '''
    Converts a comma separated string of dimensions ("10,10,10" or
    "10x10x10") into a checked tuple.

    Parameters
    ----------
    string: str
        The dimensions separated by commas or "x"

    Returns
    -------
    tuple
        The checked dimensions
    '''
    parts = string.replace("x", ",").split(",")
    parts = [p.strip() for p in parts if len(p.strip()) != 0]
    return (checkShape(parts))


def shapeToString(dims):
    '''
    Formats dimensions as "n1xn2x...xnK", the form used in file names and
    record tables (no commas or semicolons).
    '''
    return ("x".join([str(d) for d in dims]))


def normaliseSeed(seed):
    '''
    Maps any python integer onto the unsigned 64 bit range used by the
    seed derivation.
    '''
    return (int(seed) & SEED_MASK)


def makeGenerator(seed, stream, *keys):
    '''
    Builds an independent numpy random generator for one named stream.

    The generator is Philox (a counter based bit generator) keyed by a
    SeedSequence with entropy = seed and spawn key = (stream code, *keys),
    so streams for different tags or indices never overlap and do not
    depend on the order in which they are created.

    Parameters
    ----------
    seed: int
        The user-facing seed
    stream: str
        One of the keys of STREAM_TAGS
    keys: int
        Further non-negative integers (e.g. restart index)

    Returns
    -------
    numpy.random.Generator
        The seeded generator
    '''
    if stream not in STREAM_TAGS:
        raise ParameterError("Unknown random stream %s" % stream)
    spawn_key = (STREAM_TAGS[stream],) + tuple(int(k) for k in keys)
    ss = np.random.SeedSequence(normaliseSeed(seed), spawn_key=spawn_key)
    return (np.random.Generator(np.random.Philox(ss)))


def deriveSeed(master_seed, *keys):
    '''
    Derives a child seed from a master seed and a list of indices, e.g.
    deriveSeed(master, shape_index, trial_index) for one trial.

    Returns
    -------
    int
        An unsigned 64 bit integer
    '''
    ss = np.random.SeedSequence(normaliseSeed(master_seed),
                                spawn_key=(STREAM_TAGS['trial'],) + tuple(
                                    int(k) for k in keys))
    return (int(ss.generate_state(1, dtype=np.uint64)[0]))


def getPalette(palette='CBS'):
    '''
    Generates a dictionary which assigns a colour to each series of the
    scaling plot.

    Parameters
    ----------
    palette: str
        The ID of the palette to be used, colour blind safe (CBS) or bright

    Returns
    -------
    dict
        Dictionary where keys are series names and
        values are hexadecimal codes for colours
    '''
    if palette.lower() == 'cbs':
        p = palettes.CBSafe()
    elif palette.lower() == 'bright':
        p = palettes.Bright()
    else:
        raise ParameterError("Unknown palette %s" % palette)
    return (p)
