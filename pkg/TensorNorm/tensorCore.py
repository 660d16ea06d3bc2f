#!/usr/bin/env python3
'''
Dense K-way tensors and the multilinear form.

Entries are stored flat in row-major order (last index fastest), so entry
(i_1, ..., i_K) of an n_1 x ... x n_K tensor lives at flat position

    i_1 * (n_2 * ... * n_K) + i_2 * (n_3 * ... * n_K) + ... + i_K

which is numpy's C order. Modes are numbered from 0.
'''
import base64
import functools
import json
import math
from dataclasses import dataclass

import numpy as np

try:
    import TensorNorm.utilityFunctions as utilityFunctions
except ImportError:
    import utilityFunctions

# Tensors with more entries than this are written as base64 rather than
# as a JSON list
JSON_ENTRY_LIMIT = 4096
FILE_FORMAT = "tensornorm-dense"
FILE_VERSION = 1
HEADER_KEYS = ('format', 'version', 'order', 'dims', 'dtype', 'layout',
               'encoding', 'entries')
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Shape:
    '''
    The mode dimensions (n_1, ..., n_K) of a tensor.
    '''
    dims: tuple

    def __post_init__(self):
        object.__setattr__(self, 'dims', utilityFunctions.checkShape(
            self.dims))

    @property
    def order(self):
        return (len(self.dims))

    @property
    def total_size(self):
        return (math.prod(self.dims))

    def flatIndex(self, index):
        '''
        Returns the row-major flat position of a multi-index.
        '''
        if len(index) != self.order:
            raise utilityFunctions.DimensionError(
                "Index %s does not have %i modes" % (str(index), self.order))
        for i, n in zip(index, self.dims):
            if not 0 <= i < n:
                raise utilityFunctions.DimensionError(
                    "Index %s is out of range for shape %s" % (
                        str(index), str(self.dims)))
        return (int(np.ravel_multi_index(tuple(index), self.dims)))

    def multiIndex(self, flat):
        '''
        Inverse of flatIndex.
        '''
        if not 0 <= flat < self.total_size:
            raise utilityFunctions.DimensionError(
                "Flat index %i is out of range for shape %s" % (
                    flat, str(self.dims)))
        return (tuple(int(i) for i in np.unravel_index(flat, self.dims)))

    def __str__(self):
        return (utilityFunctions.shapeToString(self.dims))


@dataclass(frozen=True)
class DenseTensor:
    '''
    A K-way tensor of 64 bit floats.

    Attributes
    ----------
    shape: Shape
        The mode dimensions
    entries: np.array
        Read-only flat array of length shape.total_size, row-major
    '''
    shape: Shape
    entries: np.ndarray

    def __post_init__(self):
        shape = self.shape
        if not isinstance(shape, Shape):
            shape = Shape(tuple(shape))
            object.__setattr__(self, 'shape', shape)
        entries = np.array(self.entries, dtype=np.float64).ravel()
        if entries.size != shape.total_size:
            raise utilityFunctions.DimensionError(
                "%i entries given for a %s tensor of %i entries" % (
                    entries.size, shape, shape.total_size))
        utilityFunctions.checkFinite(entries)
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def fromArray(cls, arr):
        '''
        Builds a tensor from a K-dimensional numpy array (K >= 1).
        '''
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 0:
            raise utilityFunctions.DimensionError(
                "A tensor needs at least one mode")
        return (cls(Shape(arr.shape), np.ascontiguousarray(arr).ravel()))

    @classmethod
    def zeros(cls, dims):
        shape = Shape(tuple(dims))
        return (cls(shape, np.zeros(shape.total_size)))

    @property
    def order(self):
        return (self.shape.order)

    @property
    def dims(self):
        return (self.shape.dims)

    @property
    def array(self):
        '''
        Read-only K-dimensional view of the entries.
        '''
        return (self.entries.reshape(self.shape.dims))

    def __getitem__(self, index):
        return (float(self.entries[self.shape.flatIndex(index)]))

    def scaled(self, c):
        return (DenseTensor(self.shape, self.entries * float(c)))

    def nonzeroCount(self):
        return (int(np.count_nonzero(self.entries)))


@dataclass(frozen=True)
class UnitTuple:
    '''
    One unit vector per mode, the argument of the multilinear form.
    Vectors are normalised when the tuple is built.
    '''
    vectors: tuple

    def __post_init__(self):
        if len(self.vectors) == 0:
            raise utilityFunctions.DimensionError(
                "A unit tuple needs at least one vector")
        normed = []
        for k, v in enumerate(self.vectors):
            v = np.array(v, dtype=np.float64).ravel()
            if v.size == 0:
                raise utilityFunctions.DimensionError(
                    "Vector %i of the unit tuple is empty" % k)
            utilityFunctions.checkFinite(v, "vector entries")
            nrm = np.linalg.norm(v)
            if nrm == 0:
                raise utilityFunctions.ParameterError(
                    "Vector %i of the unit tuple is zero" % k)
            v = v / nrm
            v.setflags(write=False)
            normed.append(v)
        object.__setattr__(self, 'vectors', tuple(normed))

    @property
    def dims(self):
        return (tuple(len(v) for v in self.vectors))

    @classmethod
    def basis(cls, dims, index):
        '''
        The tuple of standard basis vectors (e_{i_1}, ..., e_{i_K}).
        '''
        dims = utilityFunctions.checkShape(dims)
        if len(index) != len(dims):
            raise utilityFunctions.DimensionError(
                "Index %s does not match shape %s" % (str(index), str(dims)))
        vectors = []
        for i, n in zip(index, dims):
            if not 0 <= i < n:
                raise utilityFunctions.DimensionError(
                    "Index %s is out of range for shape %s" % (
                        str(index), str(dims)))
            e = np.zeros(n)
            e[i] = 1.0
            vectors.append(e)
        return (cls(tuple(vectors)))

    @classmethod
    def random(cls, dims, rng):
        '''
        Independent uniformly distributed unit vectors, one per mode, drawn
        by normalising standard Gaussian vectors.

        Parameters
        ----------
        dims: tuple
            The mode dimensions
        rng: numpy.random.Generator
            Source of randomness
        '''
        dims = utilityFunctions.checkShape(dims)
        vectors = []
        for n in dims:
            v = rng.standard_normal(n)
            # a Gaussian draw is zero with probability 0 but not in floats
            while np.linalg.norm(v) == 0:
                v = rng.standard_normal(n)
            vectors.append(v)
        return (cls(tuple(vectors)))


def checkTupleShape(X, u):
    if tuple(X.dims) != tuple(u.dims):
        raise utilityFunctions.DimensionError(
            "Unit tuple of shape %s does not match tensor of shape %s" % (
                utilityFunctions.shapeToString(u.dims), X.shape))


def contractionOrder(dims):
    '''
    Order in which to contract the modes: largest first, ties broken by
    the lower mode index.
    '''
    return (sorted(range(len(dims)), key=lambda k: (-dims[k], k)))


def contractModes(arr, modes, vectors):
    '''
    Contracts the numpy array arr with vectors[i] along its original mode
    modes[i], in the order given, and returns the resulting array.
    '''
    remaining = list(range(arr.ndim))
    for k, v in zip(modes, vectors):
        pos = remaining.index(k)
        arr = np.tensordot(arr, v, axes=([pos], [0]))
        remaining.pop(pos)
    return (arr)


def multilinearEval(X, u):
    '''
    Evaluates the multilinear form

        X(u_1, ..., u_K) = sum X[i_1, ..., i_K] u_1[i_1] ... u_K[i_K]

    by successive mode contractions, contracting the largest mode first so
    the intermediate arrays shrink as fast as possible.

    Parameters
    ----------
    X: DenseTensor
        The tensor
    u: UnitTuple
        One vector per mode, lengths matching X

    Returns
    -------
    float
        The value of the form

    Raises
    ------
    DimensionError
        If the tuple does not match the shape of X
    '''
    checkTupleShape(X, u)
    modes = contractionOrder(X.dims)
    arr = contractModes(X.array, modes, [u.vectors[k] for k in modes])
    return (float(arr))


def modeCollapse(X, k, v):
    '''
    Contracts mode k of X with the vector v.

    Parameters
    ----------
    X: DenseTensor
        A K-way tensor
    k: int
        The mode to collapse, 0 <= k < K
    v: np.array
        A vector of length n_k (not necessarily unit)

    Returns
    -------
    DenseTensor or float
        The (K-1)-way tensor Y[..., i_k omitted, ...] =
        sum_{i_k} X[...] v[i_k]. When X has a single mode the 0-way result
        is returned as a float, <X, v>.
    '''
    if not isinstance(k, (int, np.integer)) or not 0 <= k < X.order:
        raise utilityFunctions.DimensionError(
            "Mode %s does not exist in a %i-way tensor" % (str(k), X.order))
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size != X.dims[k]:
        raise utilityFunctions.DimensionError(
            "Vector of length %i cannot collapse mode %i of size %i" % (
                v.size, k, X.dims[k]))
    utilityFunctions.checkFinite(v, "vector entries")
    arr = np.tensordot(X.array, v, axes=([k], [0]))
    if X.order == 1:
        return (float(arr))
    return (DenseTensor.fromArray(arr))


def frobeniusNorm(X):
    '''
    The Frobenius norm sqrt(sum of squared entries).
    '''
    return (float(np.linalg.norm(X.entries)))


def outerProduct(vectors):
    '''
    The rank-one tensor v_1 o v_2 o ... o v_K with entries
    v_1[i_1] * ... * v_K[i_K].

    Parameters
    ----------
    vectors: list
        K >= 1 non-empty vectors (any norm)

    Returns
    -------
    DenseTensor
        The outer product
    '''
    if len(vectors) == 0:
        raise utilityFunctions.DimensionError(
            "The outer product needs at least one vector")
    vs = []
    for v in vectors:
        v = np.asarray(v, dtype=np.float64).ravel()
        if v.size == 0:
            raise utilityFunctions.DimensionError(
                "Vectors in an outer product must be non-empty")
        vs.append(v)
    return (DenseTensor.fromArray(functools.reduce(np.multiply.outer, vs)))


def superdiagonal(values, order):
    '''
    The order-way tensor with values[i] at (i, i, ..., i) and zeros
    elsewhere.
    '''
    values = np.asarray(values, dtype=np.float64).ravel()
    n = values.size
    arr = np.zeros((n,) * order)
    for i, d in enumerate(values):
        arr[(i,) * order] = d
    return (DenseTensor.fromArray(arr))


def tensorToDict(X, extra=None):
    '''
    Converts a tensor into the JSON-ready dictionary used for tensor files.

    The header keys are format, version, order, dims, dtype ("f64") and
    layout ("row-major"). Entries are stored under "entries" as a JSON list
    when there are at most JSON_ENTRY_LIMIT of them (encoding "json") and
    otherwise as a base64 string of the little-endian float64 bytes
    (encoding "base64"). Keys in extra (e.g. model, seed) are added
    alongside.
    '''
    D = {'format': FILE_FORMAT,
         'version': FILE_VERSION,
         'order': X.order,
         'dims': list(X.dims),
         'dtype': 'f64',
         'layout': 'row-major'}
    if X.shape.total_size <= JSON_ENTRY_LIMIT:
        D['encoding'] = 'json'
        D['entries'] = [float(x) for x in X.entries]
    else:
        D['encoding'] = 'base64'
        D['entries'] = base64.b64encode(
            X.entries.astype('<f8').tobytes()).decode('ascii')
    if extra:
        for key, value in extra.items():
            if key in D:
                raise utilityFunctions.ParameterError(
                    "%s is a reserved tensor file key" % key)
            D[key] = value
    return (D)


def tensorFromDict(D):
    '''
    Inverse of tensorToDict. Returns the tensor and the remaining
    (non-header) keys.
    '''
    if not isinstance(D, dict):
        raise utilityFunctions.ParameterError(
            "A tensor file must hold a JSON object")
    missing = [k for k in HEADER_KEYS if k not in D]
    if len(missing) != 0:
        raise utilityFunctions.ParameterError(
            "Tensor file is missing %s" % ", ".join(missing))
    if D.get('format') != FILE_FORMAT:
        raise utilityFunctions.ParameterError(
            "Not a TensorNorm tensor file (format %s)" % D.get('format'))
    if D.get('version') != FILE_VERSION:
        raise utilityFunctions.ParameterError(
            "Unsupported tensor file version %s" % D.get('version'))
    if D.get('dtype') != 'f64' or D.get('layout') != 'row-major':
        raise utilityFunctions.ParameterError(
            "Only f64 row-major tensor files are supported")
    shape = Shape(D['dims'])
    if D.get('order') != shape.order:
        raise utilityFunctions.DimensionError(
            "Tensor file order %s does not match dims %s" % (
                D.get('order'), D['dims']))
    if D['encoding'] not in ('json', 'base64'):
        raise utilityFunctions.ParameterError(
            "Unknown entry encoding %s" % D['encoding'])
    try:
        if D['encoding'] == 'json':
            entries = np.array(D['entries'], dtype=np.float64)
        else:
            entries = np.frombuffer(base64.b64decode(D['entries']),
                                    dtype='<f8').astype(np.float64)
    except (TypeError, ValueError) as err:
        raise utilityFunctions.ParameterError(
            "Unreadable tensor entries: %s" % err)
    extra = {k: v for k, v in D.items() if k not in HEADER_KEYS}
    return (DenseTensor(shape, entries), extra)


def writeTensor(outfile, X, extra=None):
    '''
    Writes a tensor file (see tensorToDict).
    '''
    with open(outfile, "w") as out:
        json.dump(tensorToDict(X, extra), out, sort_keys=True, indent=1)
        out.write("\n")


def readTensor(infile):
    '''
    Reads a tensor file written by writeTensor.

    Returns
    -------
    X: DenseTensor
        The tensor
    extra: dict
        Any provenance keys stored with it (model, seed)
    '''
    with open(infile) as inp:
        try:
            D = json.load(inp)
        except json.JSONDecodeError as err:
            raise utilityFunctions.ParameterError(
                "%s is not a JSON tensor file: %s" % (infile, err))
    return (tensorFromDict(D))
