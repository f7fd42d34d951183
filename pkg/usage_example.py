#!/usr/bin/env python3
"""
numwall - Usage Example

This script shows how to use numwall programmatically: build a wall,
take its window census and run the continued-fraction bound.
"""
import sys
import os
import json

# Add the parent directory to the Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from numwall.core.logger import setup_logger
from numwall.core.utils import Region
from numwall.models.field import Modulus
from numwall.models.laurent import deficiency_via_cf
from numwall.models.sequences import SequenceSource
from numwall.models.wall import build, save_image
from numwall.models.windows import census

def main():
    """
    Main function demonstrating programmatic usage of numwall
    """
    setup_logger("INFO", log_to_file=False)

    # Example: pick the modulus from the command line
    p = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    modulus = Modulus(p)

    for source in (SequenceSource.paper_folding(modulus), SequenceSource.pagoda(modulus)):
        wall = build(source, 59, -60, 60)
        report = census(wall, Region(0, 59, -60, 60))
        save_image(wall, f"{source.name}-p{p}.png", scale=4)

        summary = {
            "sequence": source.name,
            "field": str(modulus),
            "max_deficiency": report.max_deficiency,
            "histogram": {str(d): c for d, c in sorted(report.deficiencies.items())},
            "cf_deficiency": deficiency_via_cf(source, 32, 1024),
        }
        print(json.dumps(summary, indent=2))

    return 0

if __name__ == "__main__":
    sys.exit(main())
