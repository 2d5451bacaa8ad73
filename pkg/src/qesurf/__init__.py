"""Exact workbench for a quasi-elliptic surface construction in characteristic 2."""
