"""Symbolic computation with definable sets over equality and dense-order atoms."""
