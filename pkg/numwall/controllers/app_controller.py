"""
Application controller for numwall: commands and pinned reproduction targets
"""
import json
import logging
import os

from numwall.core.config import Config
from numwall.core.constants import (
    CONJECTURE_MODULI, CONJECTURE_SIZE, DEFAULT_CID, DEFAULT_INVALID_GRAY, DEFAULT_K, DEFAULT_STREAM_HISTORY, DEFAULT_TEL,
    PAGODA_CENSUS_REGION, PAGODA_DISCOVERY_CANDIDATES, PAGODA_DISCOVERY_REGION, SAMPLE_WALL_REGION,
    TILE_GRID_ORIGIN, TILE_GRID_SAMPLE, REFERENCE_CLOSURE_LOWER, REFERENCE_CLOSURE_UPPER,
    REFERENCE_PHI_17, REFERENCE_REGION, REFERENCE_SPECIAL_TILES, REFERENCE_TETRAD_COUNT,
    REFERENCE_TILE_COUNT, REFERENCE_ZERO_TILE, ZEROTH_ROW_TABLE, SequenceKind,
)
from numwall.core.exceptions import ConfigurationError
from numwall.core.utils import Region, ensure_parent_dir
from numwall.models.field import Modulus
from numwall.models.laurent import LaurentTruncation, check_quadratic_f2, continued_fraction, deficiency_via_cf
from numwall.models.sequences import SequenceSource, parse_sequence_spec
from numwall.models.wall import WallBuilder, oracle_entry, save_csv, save_image, save_pgm, write_csv_rows
from numwall.models.windows import census, validate_windows
from numwall.controllers.discovery import DiscoveryParams, canonical_order, discover, verify_initial_conditions
from numwall.controllers.verify import full_pipeline, scan_conjecture, special_tile_sets, zeroth_row_letters

logger = logging.getLogger('numwall')

REPRODUCE_TARGETS = (
    "thm-main", "f2-quadratic", "conjecture", "pagoda", "discovery", "certificate", "sample-wall", "cf-oracle",
)

class AppController:
    """
    Runs the numwall commands
    """
    def __init__(self, config=None, threads=None):
        """
        Args:
            config (Config, optional): Settings; loaded from $NUMWALL_HOME when omitted
            threads (int, optional): Worker count from the command line
        """
        self.config = config or Config()
        self.threads = self.config.resolve_threads(threads)
        logger.debug(f"Controller ready with {self.threads} thread(s)")

    # Helpers

    def source(self, spec, modulus):
        return parse_sequence_spec(spec, Modulus(modulus))

    def _write_json(self, data, output):
        text = json.dumps(data, indent=2, default=str)
        if output:
            ensure_parent_dir(output)
            with open(output, 'w') as f:
                f.write(text + '\n')
            logger.info(f"Wrote {output}")
        return text

    def _palette(self):
        return self.config.get("wall.palette"), self.config.get("wall.invalid_gray", DEFAULT_INVALID_GRAY)

    def _build(self, source, rows, cols):
        m_lo = min(self.config.get("wall.m_lo", -2), rows[0], -2)
        return WallBuilder(source, rows[1], cols[0], cols[1], m_lo).build()

    # Commands

    def run_wall(self, spec, modulus, rows, cols, csv_path=None, pgm_path=None, image_path=None,
                 stream=False, history=None):
        """
        Build a wall segment and write it out

        Args:
            rows (tuple): (first, last) row
            cols (tuple): (first, last) column
            stream (bool, optional): Write CSV row by row with a bounded row history

        Returns:
            WallSegment or None: The segment (None when streamed)
        """
        source = self.source(spec, modulus)
        if stream:
            if not csv_path:
                raise ConfigurationError("--stream writes CSV only; give --csv")
            m_lo = min(self.config.get("wall.m_lo", -2), rows[0], -2)
            builder = WallBuilder(source, rows[1], cols[0], cols[1], m_lo, history=history or DEFAULT_STREAM_HISTORY)
            offset = cols[0] - builder.a
            width = cols[1] - cols[0] + 1

            def selected():
                for m, row, _ in builder.iter_rows():
                    if m >= rows[0]:
                        yield row[offset:offset + width], [True] * width

            ensure_parent_dir(csv_path)
            with open(csv_path, 'w') as f:
                write_csv_rows(f, source.modulus, rows[0], rows[1], cols[0], cols[1], selected())
            logger.info(f"Streamed rows {rows[0]}..{rows[1]} to {csv_path}")
            return None

        wall = self._build(source, rows, cols)
        wall = wall.crop(Region(rows[0], rows[1], cols[0], cols[1]))
        palette, invalid_gray = self._palette()
        if csv_path:
            save_csv(wall, csv_path)
        if pgm_path:
            save_pgm(wall, pgm_path, palette, invalid_gray)
        if image_path:
            save_image(wall, image_path, palette, invalid_gray=invalid_gray)
        return wall

    def run_census(self, spec, modulus, rows, cols, output=None):
        """Census of a wall segment; the JSON report goes to output when given"""
        wall = self._build(self.source(spec, modulus), rows, cols)
        report = census(wall, Region(rows[0], rows[1], cols[0], cols[1]))
        data = report.to_dict(self.config.get("census.max_windows_listed"))
        self._write_json(data, output)
        return report

    def discovery_params(self, **overrides):
        return DiscoveryParams.from_config(self.config, **overrides)

    def run_discover(self, spec, modulus, params, output_dir=None):
        """Discover, order canonically and optionally write codes, tetrads and summary"""
        source = self.source(spec, modulus)
        wall = WallBuilder(source, params.b, params.c, params.d, params.a).build()
        result = canonical_order(discover(wall, params))
        if output_dir:
            result.write_outputs(output_dir)
        return result

    def run_verify(self, spec, modulus, params, output=None):
        """Full proof pipeline as a Certificate"""
        source = self.source(spec, modulus)
        folding = source.kind == SequenceKind.PAPER_FOLDING and source.modulus.p == 3
        certificate = full_pipeline(
            source, params, self.threads,
            zeroth_row_width=self.config.get("verify.zeroth_row_width"),
            substitution_window=self.config.get("verify.substitution_window"),
            expected_special=REFERENCE_SPECIAL_TILES if folding else None)
        if output:
            self._write_json(certificate.to_dict(), output)
        return certificate

    def run_cf(self, spec, modulus, shifts=None, precision=None, output=None):
        """Continued-fraction deficiency bound over shifted segments"""
        shifts = shifts if shifts is not None else self.config.get("cf.shifts")
        precision = precision or self.config.get("cf.precision")
        source = self.source(spec, modulus)
        deficiency = deficiency_via_cf(source, shifts, precision)
        profile = continued_fraction(LaurentTruncation.from_source(source, precision))
        data = {"sequence": source.name, "modulus": source.modulus.p, "shifts": shifts,
                "deficiency": deficiency, "unshifted": profile.to_dict()}
        self._write_json(data, output)
        return data

    # Reproduction targets

    def reproduce(self, target, output=None, moduli=None, size=None):
        """
        Run a pinned reproduction target

        Returns:
            tuple: (passed, report dict)
        """
        handlers = {
            "thm-main": self._reproduce_thm_main,
            "f2-quadratic": self._reproduce_f2_quadratic,
            "conjecture": lambda: self._reproduce_conjecture(moduli, size),
            "pagoda": self._reproduce_pagoda,
            "discovery": self._reproduce_discovery,
            "certificate": self._reproduce_certificate,
            "sample-wall": lambda: self._reproduce_sample_wall(output),
            "cf-oracle": self._reproduce_cf_oracle,
        }
        if target not in handlers:
            raise ConfigurationError(f"Unknown target {target!r}; choose from {', '.join(REPRODUCE_TARGETS)}")
        logger.info(f"Reproducing {target}")
        passed, report = handlers[target]()
        report = {"target": target, "status": "PASS" if passed else "FAIL", **report}
        if output and target != "sample-wall":
            self._write_json(report, output)
        return passed, report

    def _reproduce_thm_main(self):
        a, b, c, d = REFERENCE_REGION
        wall = WallBuilder(SequenceSource.paper_folding(Modulus(3)), b, c, d).build()
        report = census(wall, Region(0, b, c, d))
        corner = report.find(0, 0)
        deficiency = report.max_deficiency
        passed = deficiency == 4 and corner is not None and corner.side == 3
        return passed, {"max_deficiency": deficiency, "corner_window_side": corner.side if corner else None,
                        "infimum": f"3^-{deficiency}", "exponent": -deficiency,
                        "deficiencies": {str(k): v for k, v in sorted(report.deficiencies.items())}}

    def _reproduce_f2_quadratic(self):
        order = 1024
        checks = {which: check_quadratic_f2(which, order) for which in ("phi", "pi")}
        return all(checks.values()), {"order": order, "identities": checks}

    def _reproduce_conjecture(self, moduli=None, size=None):
        scan = scan_conjecture(moduli or CONJECTURE_MODULI, size or CONJECTURE_SIZE, threads=self.threads)
        pinned = {"paper-folding": 4, "pagoda": 2}
        matches = {kind: all(v == pinned[kind] for v in values.values())
                   for kind, values in scan["results"].items()}
        return True, {**scan, "matches_conjectured_bound": matches}

    def _reproduce_pagoda(self):
        source = SequenceSource.pagoda(Modulus(3))
        region = Region(*PAGODA_CENSUS_REGION)
        wall = WallBuilder(source, region.m_hi, region.n_lo, region.n_hi).build()
        report = census(wall, region)
        sides = sorted({w.side for w in report.unbroken() if w.top >= 0})
        cf = deficiency_via_cf(source, self.config.get("cf.shifts"), self.config.get("cf.precision"))
        discovery = self._pagoda_discovery(source)
        passed = sides == [1] and cf == 2 and discovery["status"] == "PASS"
        return passed, {"window_sides": sides, "max_deficiency": report.max_deficiency,
                        "cf_deficiency": cf, "discovery": discovery}

    def _pagoda_discovery(self, source, region=PAGODA_DISCOVERY_REGION, candidates=PAGODA_DISCOVERY_CANDIDATES):
        """
        Certify a tiling of the pagoda wall, trying the (tel, cid) candidates in order

        Returns:
            dict: The first passing certificate with its parameters, or every failure
        """
        a, b, c, d = region
        wall = WallBuilder(source, b, c, d, a).build()
        attempts = []
        for tel, cid in candidates:
            params = DiscoveryParams(a, b, c, d, k=DEFAULT_K, tel=tel, cid=cid)
            certificate = full_pipeline(source, params, self.threads, self.config.get("verify.zeroth_row_width"),
                                        self.config.get("verify.substitution_window"), wall=wall)
            side = certificate.obligations.get("bounded-deficiency")
            if certificate.passed and side is not None and side.data["max_side"] == 1:
                logger.info(f"Pagoda tiling certified with tel={tel}, cid={cid}")
                return {"status": "PASS", "params": params.to_dict(), "certificate": certificate.to_dict()}
            failed = [name for name, o in certificate.obligations.items() if not o.passed]
            logger.warning(f"Pagoda discovery with tel={tel}, cid={cid} failed: {failed}")
            attempts.append({"tel": tel, "cid": cid, "failed": failed})
        return {"status": "FAIL", "attempts": attempts}

    def _reference_result(self):
        params = DiscoveryParams(*REFERENCE_REGION, k=DEFAULT_K, tel=DEFAULT_TEL, cid=DEFAULT_CID)
        source = SequenceSource.paper_folding(Modulus(3))
        wall = WallBuilder(source, params.b, params.c, params.d, params.a).build()
        return canonical_order(discover(wall, params))

    def _reproduce_discovery(self):
        result = self._reference_result()
        row0, col0 = TILE_GRID_ORIGIN
        grid = [[result.tile_at(row0 + i, col0 + j) for j in range(len(TILE_GRID_SAMPLE[0]))]
                for i in range(len(TILE_GRID_SAMPLE))]
        checks = {
            "tile_count": result.tile_count == REFERENCE_TILE_COUNT,
            "tetrad_count": len(result.tetrads) == REFERENCE_TETRAD_COUNT,
            "seeds": verify_initial_conditions(result),
            "closure_region": (result.lower, result.upper) == (REFERENCE_CLOSURE_LOWER, REFERENCE_CLOSURE_UPPER),
            "tile_grid": tuple(tuple(row) for row in grid) == TILE_GRID_SAMPLE,
            "phi_17": tuple(tuple(int(v) for v in row) for row in result.images[17]) == REFERENCE_PHI_17,
        }
        return all(checks.values()), {"checks": checks, **result.summary()}

    def _reproduce_certificate(self):
        result = self._reference_result()
        system = result.to_system()
        sets = special_tile_sets(system)
        letters, rows = zeroth_row_letters(system, sets)
        table = {tile: (letters[tile], ''.join(str(v) for v in rows[letters[tile]])) for tile in letters}
        coded_rows = all(table.get(tile) == (letter, row) for tile, (letter, _, row) in ZEROTH_ROW_TABLE.items())

        params = result.params
        certificate = full_pipeline(SequenceSource.paper_folding(Modulus(3)), params, self.threads,
                                    self.config.get("verify.zeroth_row_width"),
                                    self.config.get("verify.substitution_window"),
                                    expected_special=REFERENCE_SPECIAL_TILES)
        passed = certificate.passed and coded_rows and sets.zero_tile == REFERENCE_ZERO_TILE
        return passed, {"zeroth_row_codes": coded_rows, "zero_tile": sets.zero_tile,
                        "certificate": certificate.to_dict()}

    def _reproduce_sample_wall(self, output=None):
        m_lo, m_hi, n_lo, n_hi = SAMPLE_WALL_REGION
        source = SequenceSource.paper_folding(Modulus(3))
        wall = WallBuilder(source, m_hi, n_lo, n_hi, m_lo).build()
        mismatches = [(m, n) for m in range(0, m_hi + 1) for n in range(n_lo, n_hi + 1)
                      if wall.entry(m, n) != int(oracle_entry(source, m, n))]
        region = Region(0, m_hi, n_lo, n_hi)
        report = census(wall, region)
        violations = validate_windows(wall, region, report.windows)
        corner = report.find(0, 0)
        if output:
            if os.path.splitext(output)[1].lower() == '.pgm':
                save_pgm(wall, output, *self._palette())
            else:
                palette, invalid_gray = self._palette()
                save_image(wall, output, palette, invalid_gray=invalid_gray)
        passed = not mismatches and not violations and corner is not None and corner.side == 3
        return passed, {"oracle_mismatches": mismatches[:10], "window_violations": violations[:10],
                        "corner_window_side": corner.side if corner else None}

    def _reproduce_cf_oracle(self):
        shifts, precision = self.config.get("cf.shifts"), self.config.get("cf.precision")
        modulus = Modulus(3)
        folding = deficiency_via_cf(SequenceSource.paper_folding(modulus), shifts, precision)
        pagoda = deficiency_via_cf(SequenceSource.pagoda(modulus), shifts, precision)
        passed = folding == 4 and pagoda == 2
        return passed, {"paper-folding": folding, "pagoda": pagoda,
                        "shifts": shifts, "precision": precision}
