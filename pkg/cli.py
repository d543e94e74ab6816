#!/usr/bin/env python3
"""unstable-gibbs: measure, pressure and oracle experiment runners.

    unstable-gibbs measure|pressure|oracle --config <file> [--out <dir>] [--threads N] [--log-level LEVEL]

Exit codes: 0 success, 2 config error, 3 point budget exceeded, 4 unsupported
combination, 1 any other failure.
"""
import argparse
import logging
import math
import sys
from pathlib import Path

from curves import grow, seed_arbitrary, seed_segment
from errors import (EXIT_OK, BadDelta, BadSeed, ConfigError, InvalidPoint, PointBudgetExceeded,
                    TangentToStable, UnstableGibbsError, UnsupportedSystem, exit_code_for)
from experiment_config import load_config
from gibbs import cesaro_summary, chain_from_curve, invariance_bound, measure_of_ball
from oracle import enumerate_fixed_points, periodic_gibbs_estimate, periodic_pressure
from potentials import UNSTABLE_EXPANSION, ZERO
from pressure import (MAX_SEPARATED_N, PressureSeries, curve_growth_estimates,
                      pressure_separated_sets)
import reports
from run_manager import RunManager
from settings import configure_logging, resolve_threads
from systems import CatMap

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = 'results'


class Experiment:
    """A parsed config bound to its built system, potential and thread count"""

    def __init__(self, config, threads=None):
        self.config = config
        self.system = config.system.build()
        self.potential = config.potential.build()
        self.policy = config.refinement
        self.threads = resolve_threads(threads if threads is not None else config.threads)

    @property
    def is_cat(self):
        return isinstance(self.system, CatMap)

    def seed(self):
        seed_config = self.config.seed
        try:
            if seed_config.kind == 'segment':
                return seed_segment(self.system, seed_config.x, seed_config.delta, self.policy,
                                    burn_in=self.config.system.burn_in, threads=self.threads)
            return seed_arbitrary(self.system, seed_config.points, self.policy, threads=self.threads)
        except (BadDelta, BadSeed, InvalidPoint, TangentToStable) as e:
            raise ConfigError('seed', str(e)) from e

    def ball_references(self):
        """Target value per ball: Haar area for G in {0, Phi} on CAT maps, the periodic-orbit estimate otherwise"""
        if not self.is_cat or not self.config.balls:
            return {}
        if self.potential.kind in (ZERO, UNSTABLE_EXPANSION):
            return {ball.name: math.pi * ball.radius ** 2 for ball in self.config.balls}
        oracle = self.config.oracle
        atoms = periodic_gibbs_estimate(self.system, self.potential, oracle.period,
                                        oracle.max_period, self.threads)
        return {ball.name: measure_of_ball(atoms, ball, self.threads) for ball in self.config.balls}


def run_measure(experiment, out_dir):
    """measure.csv, pushforward.csv, integrals.csv and measure.svg"""
    config = experiment.config
    system, G = experiment.system, experiment.potential
    tests = config.test_potentials()
    curve = grow(experiment.seed(), config.n_max, system, experiment.policy, experiment.threads)

    measure_rows, integral_rows, chain = [], [], None
    for n in range(1, config.n_max + 1):
        chain = chain_from_curve(curve.at_generation(n), G, experiment.threads)
        summary = cesaro_summary(chain, config.balls, tests, system, experiment.threads)
        for ball, value in zip(config.balls, summary.ball_measures):
            measure_rows.append((n, ball.name, value))
        for F, value, defect in zip(tests, summary.integrals, summary.defects):
            integral_rows.append((n, F.name, value, defect, invariance_bound(F, system, n)))
        logger.info("mu_%d averaged over %d elements of %d atoms", n, len(chain), len(chain.weights))

    pushforward_rows = [(k, ball.name, measure_of_ball(element, ball, experiment.threads))
                        for k, element in enumerate(chain) for ball in config.balls]

    measure = reports.table(measure_rows, reports.MEASURE_COLUMNS)
    tables = {
        'measure.csv': measure,
        'pushforward.csv': reports.table(pushforward_rows, reports.PUSHFORWARD_COLUMNS),
        'integrals.csv': reports.table(integral_rows, reports.INTEGRAL_COLUMNS),
    }
    written = [reports.write_csv(frame, out_dir / name) for name, frame in tables.items()]
    figure = reports.measure_figure(measure, experiment.ball_references(),
                                    title=f"mu_n(B) for G = {G.label}")
    svg = reports.write_svg(figure, out_dir / 'measure.svg')
    if svg:
        written.append(svg)
    return tables, written


def run_pressure(experiment, out_dir):
    """pressure.csv with every estimator that applies to the system"""
    config = experiment.config
    system, G = experiment.system, experiment.potential
    series = curve_growth_estimates(experiment.seed(), system, G, max(config.n_max, 2),
                                    experiment.policy, experiment.threads)
    if experiment.is_cat:
        series.append(pressure_separated_sets(
            system, G, min(config.pressure.separated_n_max, MAX_SEPARATED_N), config.pressure.epsilon,
            config.pressure.grid_size, experiment.threads))
        oracle = config.oracle
        periodic = [(n, periodic_pressure(system, G, n, oracle.max_period, experiment.threads))
                    for n in range(1, oracle.period + 1)]
        series.append(PressureSeries('periodic-orbits', tuple(periodic), G.label))

    rows = [(s.method, n, value, s.extrapolated) for s in series for n, value in s.entries]
    frame = reports.table(rows, reports.PRESSURE_COLUMNS)
    for s in series:
        logger.info("%s extrapolated pressure: %.10f", s.method, s.extrapolated)
    return {'pressure.csv': frame}, [reports.write_csv(frame, out_dir / 'pressure.csv')]


def run_oracle(experiment, out_dir):
    """oracle.csv: periodic-orbit ball measures and pressure per period"""
    if not experiment.is_cat:
        raise UnsupportedSystem("the periodic-orbit oracle needs a CAT map")
    config = experiment.config
    system, G = experiment.system, experiment.potential
    rows = []
    for period in config.oracle.all_periods:
        orbit = enumerate_fixed_points(system, period, config.oracle.max_period)
        atoms = periodic_gibbs_estimate(system, G, period, threads=experiment.threads, orbit=orbit)
        value = periodic_pressure(system, G, period, threads=experiment.threads, orbit=orbit)
        if not config.balls:
            rows.append((period, orbit.count, 'all', 1.0, value))
        for ball in config.balls:
            rows.append((period, orbit.count, ball.name, measure_of_ball(atoms, ball, experiment.threads), value))
    frame = reports.table(rows, reports.ORACLE_COLUMNS)
    return {'oracle.csv': frame}, [reports.write_csv(frame, out_dir / 'oracle.csv')]


COMMANDS = {
    'measure': run_measure,
    'pressure': run_pressure,
    'oracle': run_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='unstable-gibbs',
        description='Gibbs measures from unstable-manifold push-forwards, pressure estimators and a periodic-orbit oracle')
    parser.add_argument('command', choices=sorted(COMMANDS))
    parser.add_argument('--config', required=True, help='JSON experiment configuration')
    parser.add_argument('--out', default=None, help='output directory (overrides output_dir)')
    parser.add_argument('--threads', type=int, default=None, help='worker threads (overrides config and UG_THREADS)')
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = load_config(args.config)
        experiment = Experiment(config, args.threads)
    except UnstableGibbsError as e:
        print(f"✗ config error: {e}", file=sys.stderr)
        return exit_code_for(e)

    out_dir = Path(args.out or config.output_dir or DEFAULT_OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    ledger = RunManager()
    run_id = ledger.start_run(args.command, config.source, str(out_dir))

    try:
        tables, written = COMMANDS[args.command](experiment, out_dir)
    except UnstableGibbsError as e:
        code = exit_code_for(e)
        # budget failures name the config field to raise
        where = 'refinement.max_points' if isinstance(e, PointBudgetExceeded) else type(e).__name__
        print(f"✗ {where}: {e}", file=sys.stderr)
        ledger.finish_run(run_id, code)
        return code

    for name, frame in tables.items():
        ledger.record_table(run_id, name, frame)
    ledger.finish_run(run_id, EXIT_OK)
    for path in written:
        print(f"✓ wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
