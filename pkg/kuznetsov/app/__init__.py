"""Command line front end, run configuration and verification suites."""
