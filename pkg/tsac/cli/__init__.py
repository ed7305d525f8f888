"""Command-line front-end for tsac."""
