"""Command-line front end, file formats and the benchmark harness."""
