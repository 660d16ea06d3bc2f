#! /usr/bin/env python
import unittest
from parameterized import parameterized
import numpy as np

import TensorNorm.utilityFunctions as utilityFunctions


class CheckTests(unittest.TestCase):

    @parameterized.expand([[[3, 4]], [(1,)], [np.array([2, 2, 2])]])
    def testCheckShape(self, dims):
        out = utilityFunctions.checkShape(dims)
        self.assertIsInstance(out, tuple)
        self.assertTrue(all(isinstance(d, int) for d in out))

    @parameterized.expand([[[]], [[0]], [[3, -1]], [["a"]],
                           [[2 ** 40, 2 ** 40]]])
    def testCheckShapeInvalid(self, dims):
        self.assertRaises(utilityFunctions.DimensionError,
                          utilityFunctions.checkShape, dims)

    def testExceptionHierarchy(self):
        self.assertTrue(issubclass(utilityFunctions.DimensionError,
                                   ValueError))
        self.assertTrue(issubclass(utilityFunctions.ParameterError,
                                   utilityFunctions.TensorNormError))
        self.assertTrue(issubclass(utilityFunctions.NetTooLargeError,
                                   RuntimeError))

    def testCheckFinite(self):
        utilityFunctions.checkFinite(np.ones(3))
        self.assertRaises(utilityFunctions.ParameterError,
                          utilityFunctions.checkFinite,
                          np.array([1.0, np.nan]))

    @parameterized.expand([[0.0], [-1.0], [np.inf], [np.nan]])
    def testCheckPositive(self, value):
        self.assertRaises(utilityFunctions.ParameterError,
                          utilityFunctions.checkPositive, "x", value)

    @parameterized.expand([[0.0], [1.0], [2.0], [np.nan]])
    def testCheckOpenUnit(self, value):
        self.assertRaises(utilityFunctions.ParameterError,
                          utilityFunctions.checkOpenUnit, "x", value)


class ShapeStringTests(unittest.TestCase):

    @parameterized.expand([
        ["10,10,10", (10, 10, 10)],
        ["10x10x10", (10, 10, 10)],
        [" 3, 4 ", (3, 4)],
        ["7", (7,)],
    ])
    def testParseShape(self, string, expected):
        self.assertEqual(utilityFunctions.parseShape(string), expected)

    @parameterized.expand([[""], ["3,a"], ["0,2"]])
    def testParseShapeInvalid(self, string):
        self.assertRaises(utilityFunctions.DimensionError,
                          utilityFunctions.parseShape, string)

    def testShapeToString(self):
        self.assertEqual(utilityFunctions.shapeToString((5, 6, 7)), "5x6x7")


class SeedTests(unittest.TestCase):

    def testStreamsDiffer(self):
        a = utilityFunctions.makeGenerator(1, 'entries').random(5)
        b = utilityFunctions.makeGenerator(1, 'coefficients').random(5)
        c = utilityFunctions.makeGenerator(1, 'restart', 1).random(5)
        d = utilityFunctions.makeGenerator(1, 'restart', 2).random(5)
        self.assertFalse(np.array_equal(a, b))
        self.assertFalse(np.array_equal(c, d))

    def testStreamsRepeat(self):
        a = utilityFunctions.makeGenerator(99, 'tail').random(5)
        b = utilityFunctions.makeGenerator(99, 'tail').random(5)
        self.assertTrue(np.array_equal(a, b))

    def testPhilox(self):
        rng = utilityFunctions.makeGenerator(0, 'entries')
        self.assertEqual(type(rng.bit_generator).__name__, 'Philox')

    def testUnknownStream(self):
        self.assertRaises(utilityFunctions.ParameterError,
                          utilityFunctions.makeGenerator, 0, 'nothing')

    def testDeriveSeed(self):
        s1 = utilityFunctions.deriveSeed(5, 0, 1)
        s2 = utilityFunctions.deriveSeed(5, 1, 0)
        self.assertNotEqual(s1, s2)
        self.assertEqual(s1, utilityFunctions.deriveSeed(5, 0, 1))
        self.assertTrue(0 <= s1 < 2 ** 64)

    def testNegativeSeed(self):
        self.assertEqual(utilityFunctions.normaliseSeed(-1), 2 ** 64 - 1)


class PaletteLookupTests(unittest.TestCase):

    def testGetPalette(self):
        cbs = utilityFunctions.getPalette()
        bright = utilityFunctions.getPalette('bright')
        self.assertEqual(set(cbs), set(bright))
        self.assertRaises(utilityFunctions.ParameterError,
                          utilityFunctions.getPalette, 'neon')
