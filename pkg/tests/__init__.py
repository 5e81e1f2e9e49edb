""" Tests for prabhakar_kit.

All tests are written in pytest style; acceptance-size runs are marked ``slow``.
"""
