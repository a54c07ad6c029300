"""
Exact computer algebra for the tangent categories of commutative rings
"""
# Export the command-line entry point
from .cli import main

# Also export the script front end for programmatic use
from .script import parse, render_ring_declaration
