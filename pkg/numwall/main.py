#!/usr/bin/env python3
"""
numwall - Number Walls over prime fields, their tilings and deficiency certificates
"""
import sys
import os
import json
import logging
import argparse

# Add the parent directory to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from numwall.controllers.app_controller import AppController, REPRODUCE_TARGETS
from numwall.core.config import Config
from numwall.core.constants import APP_NAME, APP_VERSION, DEFAULT_MODULUS, ExitCode, OutputFormat
from numwall.core.exceptions import (
    ConfigurationError, DiscoveryError, ModulusError, RegionError, SequenceDomainError, SequenceFormatError,
)
from numwall.core.logger import setup_logger
from numwall.core.utils import parse_range

USAGE_ERRORS = (ConfigurationError, ModulusError, RegionError, SequenceDomainError, SequenceFormatError)
RANGE_OPTIONS = ('--rows', '--cols')

def _sequence_args(parser):
    parser.add_argument('--seq', default='paperfolding',
                        help="paperfolding, pagoda, thuemorse, const<d> or file:<path>")
    parser.add_argument('--mod', type=int, default=DEFAULT_MODULUS, help="Prime modulus p")

def _rectangle_args(parser, required=True):
    parser.add_argument('--rows', required=required, help="Row range lo:hi or lo..hi")
    parser.add_argument('--cols', required=required, help="Column range lo:hi or lo..hi, e.g. --cols -41:41")

def _discovery_args(parser):
    parser.add_argument('--k', type=int, help="Substitution scale")
    parser.add_argument('--tel', type=int, help="Tile edge length l-1")
    parser.add_argument('--cid', type=int, help="Centre distance l-r")
    parser.add_argument('--top-left', action='store_true', help="Place coded blocks at their top-left corner")

def attach_range_values(argv):
    """Join --rows/--cols with a following negative range so argparse does not read it as an option"""
    joined, pending = [], None
    for arg in argv:
        if pending is not None:
            if arg[:1] == '-' and arg[1:2].isdigit():
                joined[-1] = f"{pending}={arg}"
                pending = None
                continue
            pending = None
        joined.append(arg)
        if arg in RANGE_OPTIONS:
            pending = arg
    return joined

def build_parser():
    """Command-line parser with one subcommand per operation"""
    parser = argparse.ArgumentParser(prog=APP_NAME, description=__doc__.strip())
    parser.add_argument('--version', action='version', version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument('--threads', type=int,
                        help="Worker threads for verification and scans (default $NW_THREADS or the config file); "
                             "wall building is sequential")
    parser.add_argument('--config-dir', help="Settings directory (default $NUMWALL_HOME or ~/.numwall)")
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--no-log-file', action='store_true', help="Log to the console only")
    commands = parser.add_subparsers(dest='command', required=True)

    wall = commands.add_parser('wall', help="Compute a wall segment")
    _sequence_args(wall)
    _rectangle_args(wall)
    wall.add_argument('--csv', help="CSV output path")
    wall.add_argument('--pgm', help="Plain PGM output path")
    wall.add_argument('--png', help="Image output path (format from the extension)")
    wall.add_argument('--stream', action='store_true', help="Stream rows to --csv with bounded memory")
    wall.add_argument('--history', type=int, help="Rows kept while streaming")

    census = commands.add_parser('census', help="Window census and maximum deficiency")
    _sequence_args(census)
    _rectangle_args(census)
    census.add_argument('--out', help="JSON output path")
    census.add_argument('--format', default=OutputFormat.JSON.value, choices=[f.value for f in OutputFormat],
                        help="Summary format on standard output")

    discover = commands.add_parser('discover', help="Discover a tiling system from a wall")
    _sequence_args(discover)
    _rectangle_args(discover, required=False)
    _discovery_args(discover)
    discover.add_argument('--out-dir', help="Directory for codes.txt, tetrads.txt and summary.json")

    verify = commands.add_parser('verify', help="Run the full certificate pipeline")
    _sequence_args(verify)
    _rectangle_args(verify, required=False)
    _discovery_args(verify)
    verify.add_argument('--out', help="Certificate JSON path")

    cf = commands.add_parser('cf', help="Deficiency from continued fractions")
    _sequence_args(cf)
    cf.add_argument('--shifts', type=int, help="Largest shift K")
    cf.add_argument('--precision', type=int, help="Coefficients N per shift")
    cf.add_argument('--out', help="JSON output path")

    reproduce = commands.add_parser('reproduce', help="Run a pinned reproduction target")
    reproduce.add_argument('target', choices=REPRODUCE_TARGETS)
    reproduce.add_argument('--mod', type=int, action='append', help="Modulus for the conjecture scan (repeatable)")
    reproduce.add_argument('--size', type=int, help="Segment size for the conjecture scan")
    reproduce.add_argument('--out', help="Report path (an image for sample-wall)")
    return parser

def _params(controller, args):
    overrides = {"k": args.k, "tel": args.tel, "cid": args.cid}
    if args.top_left:
        overrides["centered"] = False
    if args.rows:
        overrides["a"], overrides["b"] = parse_range(args.rows)
    if args.cols:
        overrides["c"], overrides["d"] = parse_range(args.cols)
    return controller.discovery_params(**overrides)

def run(args):
    """
    Dispatch a parsed command line

    Returns:
        int: Process exit code
    """
    controller = AppController(Config(args.config_dir), args.threads)

    if args.command == 'wall':
        if not (args.csv or args.pgm or args.png):
            raise ConfigurationError("Give at least one of --csv, --pgm or --png")
        controller.run_wall(args.seq, args.mod, parse_range(args.rows), parse_range(args.cols),
                            args.csv, args.pgm, args.png, args.stream, args.history)
        return ExitCode.OK

    if args.command == 'census':
        report = controller.run_census(args.seq, args.mod, parse_range(args.rows), parse_range(args.cols), args.out)
        if OutputFormat(args.format) == OutputFormat.TEXT:
            print(report.to_text())
        else:
            data = report.to_dict()
            print(json.dumps({key: value for key, value in data.items() if key != "windows"}, indent=2))
        return ExitCode.OK

    if args.command == 'discover':
        result = controller.run_discover(args.seq, args.mod, _params(controller, args), args.out_dir)
        print(json.dumps(result.summary(), indent=2))
        return ExitCode.OK

    if args.command == 'verify':
        certificate = controller.run_verify(args.seq, args.mod, _params(controller, args), args.out)
        print(certificate.to_json())
        return ExitCode.OK if certificate.passed else ExitCode.FAILED

    if args.command == 'cf':
        data = controller.run_cf(args.seq, args.mod, args.shifts, args.precision, args.out)
        print(json.dumps(data, indent=2))
        return ExitCode.OK

    passed, report = controller.reproduce(args.target, args.out, args.mod, args.size)
    if args.target == 'thm-main' and passed:
        print(f"inf = 3^{report['exponent']}")
    print(json.dumps(report, indent=2, default=str))
    return ExitCode.OK if passed else ExitCode.FAILED

def main(argv=None):
    """
    Application entry point

    Returns:
        int: Exit code (0 ok, 1 unexpected error, 2 usage, 3 failed verification)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(attach_range_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as e:
        return ExitCode.OK if e.code == 0 else ExitCode.USAGE

    # Set up logger
    setup_logger(args.log_level, log_to_file=not args.no_log_file)
    logger = logging.getLogger('numwall')

    try:
        return int(run(args))
    except USAGE_ERRORS as e:
        logger.error(str(e))
        return ExitCode.USAGE
    except DiscoveryError as e:
        logger.error(f"Discovery failed at stage '{e.stage}': {e}")
        return ExitCode.FAILED
    except Exception as e:
        logger.critical(f"Critical error while running {args.command}: {str(e)}", exc_info=True)
        return ExitCode.ERROR

if __name__ == "__main__":
    sys.exit(main())
