"""
Test suite for the IPS2 clustering library and benchmark CLI.
"""
