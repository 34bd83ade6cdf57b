import csv
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase


class TestRunCommand(SimpleTestCase):
    """Test the run management command"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.directory = Path(self._tmp.name)
        self.outdir = self.directory / 'results'
        self.stdout = StringIO()

    def tearDown(self):
        self._tmp.cleanup()

    def _rows(self, path: Path) -> list[dict]:
        with path.open(newline='') as handle:
            return list(csv.DictReader(handle))

    def _summary(self) -> list[dict]:
        return self._rows(self.outdir / 'summary.csv')

    def test_matrix_market_problem(self):
        """Test the 2 x 2 identity converges at step 0 with a zero start residual"""
        # Arrange
        path = self.directory / 'identity2.mtx'
        path.write_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n")

        # Act
        call_command('run', problem=f'mm:{path}', methods='rfks,cd', m=2, nr=4,
                     outdir=str(self.outdir), stdout=self.stdout)

        # Assert
        rows = self._summary()
        self.assertEqual([row['method'] for row in rows], ['rfks', 'cd'])
        for row in rows:
            self.assertEqual(row['case'], 'identity2')
            self.assertEqual(row['N'], '')
            self.assertEqual(row['converged'], 'true')
            self.assertAlmostEqual(float(row['lambda_re']), 1.0)
        history = self._rows(self.outdir / 'rfks_history.csv')
        self.assertEqual(len(history), 1)
        self.assertEqual(history[0]['step'], '0')
        self.assertEqual(float(history[0]['resnorm']), 0.0)
        self.assertIn('results in', self.stdout.getvalue())

    def test_pde_problem_all_methods(self):
        """Test every method on a small Case I grid"""
        call_command('run', problem='case1', N=6, m=8, nr=16, outdir=str(self.outdir), stdout=self.stdout)

        rows = self._summary()
        self.assertEqual([row['method'] for row in rows], ['rfks', 'fks', 'cd', 'ac'])
        self.assertTrue(all(row['converged'] == 'true' for row in rows))
        values = [float(row['lambda_re']) for row in rows]
        for value in values[1:]:
            self.assertAlmostEqual(value, values[0], delta=1e-6 * abs(values[0]))

    def test_repeated_run_writes_identical_files(self):
        """Test the same spec and seed reproduce every CSV cell except the timings"""
        # Arrange
        first, second = self.directory / 'first', self.directory / 'second'
        files = [f'{method}_history.csv' for method in ('rfks', 'fks', 'cd', 'ac')] + ['summary.csv']

        # Act
        for outdir in (first, second):
            call_command('run', problem='case1', N=6, m=8, nr=16, seed=3, outdir=str(outdir), stdout=self.stdout)

        # Assert
        for name in files:
            with self.subTest(file=name):
                rows = [self._rows(outdir / name) for outdir in (first, second)]
                for table in rows:
                    for row in table:
                        row.pop('elapsed_s', None)
                        row.pop('CPU_s', None)
                self.assertTrue(rows[0])
                self.assertEqual(rows[0], rows[1])

    def test_preset(self):
        """Test a preset supplies m and n_r"""
        call_command('run', problem='case2', N=6, methods='ac', preset='table2',
                     outdir=str(self.outdir), stdout=self.stdout)
        row, = self._summary()
        self.assertEqual((row['m'], row['n_r']), ('60', '30'))

    def test_missing_degree(self):
        """Test m and n_r are required without a preset"""
        with self.assertRaises(CommandError) as context:
            call_command('run', problem='case1', N=4, outdir=str(self.outdir), stdout=self.stdout)
        self.assertEqual(context.exception.returncode, 1)

    def test_missing_grid_size(self):
        """Test case1 without N is a problem error"""
        with self.assertRaises(CommandError) as context:
            call_command('run', problem='case1', m=4, nr=8, outdir=str(self.outdir), stdout=self.stdout)
        self.assertEqual(context.exception.returncode, 1)

    def test_missing_file(self):
        """Test an unreadable Matrix Market path is a problem error"""
        with self.assertRaises(CommandError) as context:
            call_command('run', problem=f'mm:{self.directory / "absent.mtx"}', m=4, nr=8,
                         outdir=str(self.outdir), stdout=self.stdout)
        self.assertEqual(context.exception.returncode, 1)

    def test_not_converged(self):
        """Test exit code 2 when the outer cap is hit, with the summary still written"""
        # Act
        with self.assertRaises(CommandError) as context:
            call_command('run', problem='case1', N=6, methods='rfks', m=2, nr=10, max_outer=1,
                         outdir=str(self.outdir), stdout=self.stdout)

        # Assert
        self.assertEqual(context.exception.returncode, 2)
        row, = self._summary()
        self.assertEqual(row['converged'], 'false')
        self.assertIn('not converged', self.stdout.getvalue())


class TestSweepCommand(SimpleTestCase):
    """Test the sweep management command"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.outdir = Path(self._tmp.name) / 'results'
        self.stdout = StringIO()

    def tearDown(self):
        self._tmp.cleanup()

    def test_restart_sweep(self):
        """Test a restart-number sweep writes one row per value and method"""
        # Act
        call_command('sweep', problem='case1', N=6, vary='nr', values='16,24', m=8,
                     outdir=str(self.outdir), stdout=self.stdout)

        # Assert
        with (self.outdir / 'sweep.csv').open(newline='') as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual([(row['method'], row['n_r']) for row in rows],
                         [('fks', '16'), ('cd', '16'), ('rfks', '16'),
                          ('fks', '24'), ('cd', '24'), ('rfks', '24')])
        for row in rows:
            self.assertEqual((row['case'], row['N'], row['m']), ('case1', '6', '8'))
            self.assertEqual(row['converged'], 'true')
            self.assertGreater(int(row['MV']), int(row['IT']))
        self.assertIn('sweep.csv', self.stdout.getvalue())

    def test_degree_sweep_needs_restart_number(self):
        """Test sweeping m without --nr is a usage error"""
        with self.assertRaises(CommandError) as context:
            call_command('sweep', N=6, vary='m', values='10,20', outdir=str(self.outdir), stdout=self.stdout)
        self.assertEqual(context.exception.returncode, 1)

    def test_malformed_values(self):
        """Test non-integer sweep values are a usage error"""
        with self.assertRaises(CommandError) as context:
            call_command('sweep', N=6, vary='nr', values='30,fifty', m=8,
                         outdir=str(self.outdir), stdout=self.stdout)
        self.assertEqual(context.exception.returncode, 1)


class TestVerifyCommand(SimpleTestCase):
    """Test the verify management command"""

    def test_passes(self):
        """Test a small verify run reports every suite as passing"""
        stdout = StringIO()
        call_command('verify', samples=100, stdout=stdout)
        self.assertIn('suites passed', stdout.getvalue())
        self.assertNotIn('FAIL', stdout.getvalue())

    def test_flipped_branch_rule_fails(self):
        """Test the hidden fault hook is reported with a counterexample"""
        stdout = StringIO()
        with self.assertRaises(CommandError) as context:
            call_command('verify', samples=100, flip_branch_rule=True, stdout=stdout)
        self.assertEqual(context.exception.returncode, 1)
        self.assertIn('root-modulus inequalities', str(context.exception))
        self.assertIn('FAIL', stdout.getvalue())
