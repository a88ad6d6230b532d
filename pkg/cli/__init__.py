"""Command-line interface: configure, run, report and plot experiments."""
