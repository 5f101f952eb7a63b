"""
Command-line surface: generate, solve, verify and bench.

Run with ``python -m infra.cli <command> --help``.
"""
