"""
Command tools for the tancat engine
"""
from .tangent_tools import (
    # Tangent structure tools
    tangent_tool,
    tangent_space_tool,
    axioms_tool,
)

from .bundle_tools import (
    # Differential bundle tools
    bundle_from_module_tool,
    bundle_check_tool,
    bundle_to_module_tool,
    bundle_derive_sum_tool,
)

from .field_tools import (
    # Vector field and transpose tools
    vf_to_derivation_tool,
    vf_from_derivation_tool,
    vf_bracket_tool,
    transpose_sharp_tool,
    transpose_flat_tool,
)
