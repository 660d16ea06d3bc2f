#! /usr/bin/env python
import io
import json
import os
import tempfile
import unittest
from unittest import mock
from parameterized import parameterized
import numpy as np

import TensorNorm.TensorNorm as TensorNorm
import TensorNorm.tensorCore as tensorCore
import TensorNorm.reports as reports


class CommandLineTests(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def main(self, argv):
        stdout = io.StringIO()
        with mock.patch('sys.stdout', stdout), mock.patch('sys.stderr'):
            code = TensorNorm.main(argv + ["--output_dir", self.out])
        return (code, stdout.getvalue())

    def testBoundWorkedExample(self):
        code, text = self.main(["bound", "--shape", "10,10,10", "--sigma",
                                "1", "--delta", "0.05", "--formula",
                                "theorem1"])
        self.assertEqual(code, 0)
        rep = json.loads(text)
        self.assertAlmostEqual(rep['value'], 26.0, delta=0.05)
        self.assertTrue(os.path.exists(os.path.join(self.out,
                                                    "TensorNorm_log.txt")))

    def testBoundValidityFlag(self):
        code, text = self.main(["bound", "--formula", "corollary1", "--M",
                                "1", "--delta", "0.05", "--shape",
                                "10,10,10"])
        self.assertEqual(code, 3)
        self.assertIn("M below 2ln(2/δ)", json.loads(text)['validity_flags'])

    def testUnknownFlag(self):
        code, _ = self.main(["bound", "--shape", "3,3", "--bogus"])
        self.assertEqual(code, 1)

    def testEstimateRankOne(self):
        a = np.array([1.0, 2.0, 2.0]) / 3
        b = np.array([0.6, 0.8])
        X = tensorCore.outerProduct([4 * a, b, b])
        path = os.path.join(self.out, "rank_one.json")
        tensorCore.writeTensor(path, X)
        code, text = self.main(["estimate", "--infile", path])
        self.assertEqual(code, 0)
        lower = float(text.splitlines()[0].split("\t")[1])
        self.assertAlmostEqual(lower, 4.0, places=10)

    def testEstimateMissingFile(self):
        code, _ = self.main(["estimate", "--infile",
                             os.path.join(self.out, "missing.json")])
        self.assertEqual(code, 2)

    def testGenThenEstimate(self):
        path = os.path.join(self.out, "gen.json")
        code, _ = self.main(["gen", "--shape", "2,2,2", "--seed", "3",
                             "--outfile", path, "--silent"])
        self.assertEqual(code, 0)
        X, extra = tensorCore.readTensor(path)
        self.assertEqual(X.dims, (2, 2, 2))
        self.assertEqual(extra['model']['seed'], 3)
        code, text = self.main(["estimate", "--infile", path, "--epsilon",
                                "0.13"])
        self.assertEqual(code, 0)
        lines = dict(line.split("\t") for line in text.splitlines())
        self.assertLessEqual(float(lines['norm_lower']),
                             float(lines['norm_upper']))

    def testTail(self):
        code, _ = self.main(["tail", "--shape", "4,4,4", "--trials", "2000",
                             "--t", "0.5,1,2,3", "--seed", "1"])
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(os.path.join(
            self.out, "TensorNorm_tail.tsv")))

    def testExperimentAndReport(self):
        code, _ = self.main(["experiment", "--shapes", "2,2,2 3,3,3",
                             "--trials", "3", "--restarts", "2",
                             "--no_timings", "--silent",
                             "--outfile_stem", "exp"])
        self.assertEqual(code, 0)
        paths = reports.outputPaths(self.out, "exp")
        for key in paths:
            self.assertTrue(os.path.exists(paths[key]))
        with open(paths['summary']) as inp:
            first = inp.read()
        code, _ = self.main(["report", "--infile", paths['records'],
                             "--outfile_stem", "again", "--silent"])
        self.assertEqual(code, 0)
        with open(reports.outputPaths(self.out, "again")['summary']) as inp:
            self.assertEqual(inp.read(), first)

    def testExperimentFlagsSmallM(self):
        code, _ = self.main(["experiment", "--shapes", "2,2", "--trials",
                             "2", "--model", "measurement", "--M", "2",
                             "--restarts", "1", "--silent"])
        self.assertEqual(code, 3)

    def testExperimentPalette(self):
        code, _ = self.main(["experiment", "--shapes", "2,2", "--trials",
                             "2", "--restarts", "1", "--palette", "bright",
                             "--silent"])
        self.assertEqual(code, 0)
        with open(reports.outputPaths(self.out, "TensorNorm")['plot']) \
                as inp:
            self.assertIn("#1e90ff", inp.read())

    @parameterized.expand([['encoding'], ['dims'], ['entries']])
    def testEstimateMissingHeaderKey(self, key):
        D = tensorCore.tensorToDict(tensorCore.DenseTensor.zeros((2, 2)))
        del D[key]
        path = os.path.join(self.out, "broken.json")
        with open(path, "w") as out:
            json.dump(D, out)
        code, _ = self.main(["estimate", "--infile", path])
        self.assertEqual(code, 2)

    def testEstimateNotJson(self):
        path = os.path.join(self.out, "broken.json")
        with open(path, "w") as out:
            out.write("{'dims': [2, 2]")
        code, _ = self.main(["estimate", "--infile", path])
        self.assertEqual(code, 2)

    def testTailBoundHugeThreshold(self):
        code, text = self.main(["bound", "--formula", "lemma1_tail", "--t",
                                "1e200"])
        self.assertEqual(code, 0)
        rep = json.loads(text)
        self.assertEqual(rep['value'], 0.0)
        self.assertIsNone(rep['log_value'])

    def testBoundZeroDeltaIsValidJson(self):
        code, text = self.main(["bound", "--shape", "3,3", "--delta", "0"])
        self.assertEqual(code, 3)
        self.assertNotIn("NaN", text)
        self.assertNotIn("Infinity", text)
        self.assertNotEqual(json.loads(text)['validity_flags'], [])
