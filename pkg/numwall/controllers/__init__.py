"""
Controllers: tiling discovery, verification and command orchestration
"""
