#! /usr/bin/env python
import os
import unittest
from parameterized import parameterized
import numpy as np

import TensorNorm.tensorCore as tensorCore
import TensorNorm.utilityFunctions as utilityFunctions
from tests.helperFunctions import bruteMultilinear, randomUnitVectors, \
    randomArray


class ShapeTests(unittest.TestCase):

    @parameterized.expand([
        [(2, 3, 4), (0, 0, 0), 0],
        [(2, 3, 4), (0, 0, 1), 1],
        [(2, 3, 4), (0, 1, 0), 4],
        [(2, 3, 4), (1, 0, 0), 12],
        [(2, 3, 4), (1, 2, 3), 23],
        [(5,), (3,), 3],
    ])
    def testFlatIndex(self, dims, index, expected):
        shape = tensorCore.Shape(dims)
        self.assertEqual(shape.flatIndex(index), expected)
        self.assertEqual(shape.multiIndex(expected), index)

    @parameterized.expand([[()], [(0, 3)], [(2, -1)]])
    def testBadShape(self, dims):
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.Shape, dims)

    def testIndexOutOfRange(self):
        shape = tensorCore.Shape((2, 2))
        self.assertRaises(utilityFunctions.DimensionError,
                          shape.flatIndex, (2, 0))
        self.assertRaises(utilityFunctions.DimensionError,
                          shape.flatIndex, (0,))

    def testStr(self):
        self.assertEqual(str(tensorCore.Shape((10, 10, 10))), "10x10x10")


class DenseTensorTests(unittest.TestCase):

    def testEntriesAreReadOnly(self):
        X = tensorCore.DenseTensor.fromArray(np.arange(6.0).reshape(2, 3))
        with self.assertRaises(ValueError):
            X.entries[0] = 5.0

    def testSourceArrayIsCopied(self):
        arr = np.arange(6.0).reshape(2, 3)
        X = tensorCore.DenseTensor.fromArray(arr)
        arr[0, 0] = 100.0
        self.assertEqual(X[(0, 0)], 0.0)

    def testGetItemRowMajor(self):
        arr = np.arange(24.0).reshape(2, 3, 4)
        X = tensorCore.DenseTensor.fromArray(arr)
        self.assertEqual(X[(1, 2, 3)], 23.0)
        self.assertEqual(X[(0, 1, 0)], 4.0)

    def testWrongLength(self):
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.DenseTensor, (2, 2), np.zeros(3))

    @parameterized.expand([[np.nan], [np.inf], [-np.inf]])
    def testNonFinite(self, bad):
        entries = np.zeros(4)
        entries[2] = bad
        self.assertRaises(utilityFunctions.ParameterError,
                          tensorCore.DenseTensor, (2, 2), entries)

    def testScalarArrayRejected(self):
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.DenseTensor.fromArray, np.float64(3.0))

    def testNonzeroCount(self):
        X = tensorCore.DenseTensor((2, 2), [0, 1.5, 0, -2])
        self.assertEqual(X.nonzeroCount(), 2)


class UnitTupleTests(unittest.TestCase):

    def testNormalised(self):
        u = tensorCore.UnitTuple(([3.0, 4.0], [0.0, 2.0, 0.0]))
        self.assertTrue(np.allclose(u.vectors[0], [0.6, 0.8]))
        self.assertTrue(np.allclose(u.vectors[1], [0, 1, 0]))
        self.assertEqual(u.dims, (2, 3))

    def testZeroVector(self):
        self.assertRaises(utilityFunctions.ParameterError,
                          tensorCore.UnitTuple, ([1.0, 0.0], [0.0, 0.0]))

    def testRandomIsUnit(self):
        rng = np.random.default_rng(3)
        u = tensorCore.UnitTuple.random((4, 5, 6), rng)
        for v in u.vectors:
            self.assertAlmostEqual(np.linalg.norm(v), 1.0, places=12)

    def testBasis(self):
        u = tensorCore.UnitTuple.basis((2, 3), (1, 2))
        self.assertEqual(list(u.vectors[0]), [0.0, 1.0])
        self.assertEqual(list(u.vectors[1]), [0.0, 0.0, 1.0])


class MultilinearEvalTests(unittest.TestCase):

    @parameterized.expand([
        [(3,), 1], [(3, 4), 2], [(2, 3, 4), 3], [(2, 2, 3, 2), 4],
        [(1, 5, 1), 5],
    ])
    def testAgainstNestedLoops(self, dims, seed):
        arr = randomArray(dims, seed)
        vectors = randomUnitVectors(dims, seed + 100)
        X = tensorCore.DenseTensor.fromArray(arr)
        u = tensorCore.UnitTuple(tuple(vectors))
        self.assertAlmostEqual(tensorCore.multilinearEval(X, u),
                               bruteMultilinear(arr, vectors), places=12)

    def testBasisPicksEntry(self):
        arr = np.arange(24.0).reshape(2, 3, 4)
        X = tensorCore.DenseTensor.fromArray(arr)
        u = tensorCore.UnitTuple.basis((2, 3, 4), (1, 0, 2))
        self.assertEqual(tensorCore.multilinearEval(X, u), arr[1, 0, 2])

    def testRankOne(self):
        a = np.array([1.0, 2.0, 2.0]) / 3
        b = np.array([0.6, 0.8])
        X = tensorCore.outerProduct([4 * a, b])
        u = tensorCore.UnitTuple((a, b))
        self.assertAlmostEqual(tensorCore.multilinearEval(X, u), 4.0,
                               places=12)

    def testWrongShape(self):
        X = tensorCore.DenseTensor.zeros((2, 3))
        u = tensorCore.UnitTuple(([1.0, 0.0], [1.0, 0.0]))
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.multilinearEval, X, u)

    def testLinearInTensor(self):
        arr1 = randomArray((3, 3, 3), 1)
        arr2 = randomArray((3, 3, 3), 2)
        u = tensorCore.UnitTuple(tuple(randomUnitVectors((3, 3, 3), 3)))
        X1 = tensorCore.DenseTensor.fromArray(arr1)
        X2 = tensorCore.DenseTensor.fromArray(arr2)
        X12 = tensorCore.DenseTensor.fromArray(2 * arr1 - arr2)
        self.assertAlmostEqual(
            tensorCore.multilinearEval(X12, u),
            2 * tensorCore.multilinearEval(X1, u) -
            tensorCore.multilinearEval(X2, u), places=12)

    @parameterized.expand([[(0, 1, 2)], [(2, 0, 1)], [(1, 2, 0)],
                           [(2, 1, 0)]])
    def testModePermutation(self, perm):
        dims = (2, 3, 4)
        arr = randomArray(dims, 21)
        vectors = randomUnitVectors(dims, 22)
        X = tensorCore.DenseTensor.fromArray(arr)
        Xp = tensorCore.DenseTensor.fromArray(np.transpose(arr, perm))
        u = tensorCore.UnitTuple(tuple(vectors))
        up = tensorCore.UnitTuple(tuple(vectors[p] for p in perm))
        self.assertAlmostEqual(tensorCore.multilinearEval(Xp, up),
                               tensorCore.multilinearEval(X, u), places=12)

    @parameterized.expand([[(4,), 1], [(3, 5), 2], [(2, 3, 4), 3],
                           [(3, 3, 3, 3), 4], [(6, 1, 2), 5]])
    def testBelowFrobenius(self, dims, seed):
        X = tensorCore.DenseTensor.fromArray(randomArray(dims, seed))
        u = tensorCore.UnitTuple(tuple(randomUnitVectors(dims, seed + 50)))
        self.assertLessEqual(abs(tensorCore.multilinearEval(X, u)),
                             tensorCore.frobeniusNorm(X) + 1e-12)

    def testContractionOrder(self):
        self.assertEqual(tensorCore.contractionOrder((3, 5, 5, 2)),
                         [1, 2, 0, 3])


class ModeCollapseTests(unittest.TestCase):

    @parameterized.expand([[0], [1], [2]])
    def testCollapseThenEvaluate(self, k):
        dims = (3, 4, 5)
        arr = randomArray(dims, 7)
        vectors = randomUnitVectors(dims, 8)
        X = tensorCore.DenseTensor.fromArray(arr)
        Y = tensorCore.modeCollapse(X, k, vectors[k])
        self.assertEqual(Y.dims, tuple(d for i, d in enumerate(dims)
                                       if i != k))
        rest = tensorCore.UnitTuple(tuple(v for i, v in enumerate(vectors)
                                          if i != k))
        self.assertAlmostEqual(
            tensorCore.multilinearEval(Y, rest),
            tensorCore.multilinearEval(X, tensorCore.UnitTuple(
                tuple(vectors))), places=12)

    @parameterized.expand([[(0, 1, 2)], [(2, 0, 1)], [(1, 2, 0)],
                           [(2, 1, 0)]])
    def testFullCollapse(self, order):
        dims = (3, 4, 5)
        arr = randomArray(dims, 9)
        vectors = randomUnitVectors(dims, 10)
        Y = tensorCore.DenseTensor.fromArray(arr)
        left = [0, 1, 2]
        for k in order:
            Y = tensorCore.modeCollapse(Y, left.index(k), vectors[k])
            left.remove(k)
        self.assertIsInstance(Y, float)
        self.assertAlmostEqual(Y, bruteMultilinear(arr, vectors), places=12)

    def testOneModeGivesScalar(self):
        X = tensorCore.DenseTensor((3,), [1.0, 2.0, 3.0])
        self.assertEqual(tensorCore.modeCollapse(X, 0, [1.0, 1.0, 1.0]),
                         6.0)

    def testBadMode(self):
        X = tensorCore.DenseTensor.zeros((2, 3))
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.modeCollapse, X, 2, [1.0, 0.0])
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.modeCollapse, X, 1, [1.0, 0.0])


class NormAndOuterTests(unittest.TestCase):

    def testFrobenius(self):
        X = tensorCore.DenseTensor((2, 2), [1.0, 2.0, 2.0, 4.0])
        self.assertAlmostEqual(tensorCore.frobeniusNorm(X), 5.0)

    def testOuterProductEntries(self):
        X = tensorCore.outerProduct([[1.0, 2.0], [3.0, 4.0, 5.0],
                                     [1.0, -1.0]])
        self.assertEqual(X.dims, (2, 3, 2))
        self.assertEqual(X[(1, 2, 1)], -10.0)
        self.assertEqual(X[(0, 1, 0)], 4.0)

    def testOuterProductNorm(self):
        vectors = [np.array([3.0, 4.0]), np.array([1.0, 0.0, 0.0])]
        X = tensorCore.outerProduct(vectors)
        self.assertAlmostEqual(tensorCore.frobeniusNorm(X), 5.0)

    def testEmptyOuterProduct(self):
        self.assertRaises(utilityFunctions.DimensionError,
                          tensorCore.outerProduct, [])

    def testSuperdiagonal(self):
        X = tensorCore.superdiagonal([3.0, -1.0], 3)
        self.assertEqual(X.dims, (2, 2, 2))
        self.assertEqual(X[(0, 0, 0)], 3.0)
        self.assertEqual(X[(1, 1, 1)], -1.0)
        self.assertEqual(X.nonzeroCount(), 2)


class TensorFileTests(unittest.TestCase):

    def setUp(self):
        self.outfile = "mock_tensor.json"

    def tearDown(self):
        if os.path.exists(self.outfile):
            os.remove(self.outfile)

    @parameterized.expand([[(3, 4), 'json'], [(17, 17, 17), 'base64']])
    def testEncodingAndReadBack(self, dims, encoding):
        X = tensorCore.DenseTensor.fromArray(randomArray(dims, 11))
        tensorCore.writeTensor(self.outfile, X, extra={'seed': 11})
        D = tensorCore.tensorToDict(X)
        self.assertEqual(D['encoding'], encoding)
        self.assertEqual(D['layout'], 'row-major')
        Y, extra = tensorCore.readTensor(self.outfile)
        self.assertEqual(Y.dims, X.dims)
        self.assertTrue(np.array_equal(Y.entries, X.entries))
        self.assertEqual(extra, {'seed': 11})

    def testRejectsOtherFormat(self):
        D = tensorCore.tensorToDict(tensorCore.DenseTensor.zeros((2,)))
        D['format'] = 'something-else'
        self.assertRaises(utilityFunctions.ParameterError,
                          tensorCore.tensorFromDict, D)
        D = tensorCore.tensorToDict(tensorCore.DenseTensor.zeros((2,)))
        D['version'] = 2
        self.assertRaises(utilityFunctions.ParameterError,
                          tensorCore.tensorFromDict, D)

    def testReservedKey(self):
        X = tensorCore.DenseTensor.zeros((2,))
        self.assertRaises(utilityFunctions.ParameterError,
                          tensorCore.tensorToDict, X, {'dims': [3]})

    @parameterized.expand([
        ['encoding', None], ['dims', None], ['entries', None],
        ['order', None], ['entries', "abc"], ['entries', [[1.0], ["x"]]],
        ['dims', 5], ['dims', [2, 0]], ['encoding', 'hex'],
        ['entries', [1.0, 2.0, 3.0]],
    ])
    def testMalformedFile(self, key, value):
        D = tensorCore.tensorToDict(tensorCore.DenseTensor.zeros((2, 2)))
        if value is None:
            del D[key]
        else:
            D[key] = value
        self.assertRaises(utilityFunctions.TensorNormError,
                          tensorCore.tensorFromDict, D)

    @parameterized.expand([["{not json"], ["[1, 2]"], [""]])
    def testUnreadableFile(self, text):
        with open(self.outfile, "w") as out:
            out.write(text)
        self.assertRaises(utilityFunctions.ParameterError,
                          tensorCore.readTensor, self.outfile)
