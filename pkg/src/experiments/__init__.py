"""Run configuration, sweep orchestration, output files and the command-line front end."""
