#!/usr/bin/env python3
"""Exits without producing anything useful."""
import sys

print("segfault-ish")
sys.exit(1)
