# Core algebra
from .polynomial import Poly, format_rational
from .groebner import buchberger, divide, normal_form as reduce
from .rings import (
    FPRing,
    Point,
    RingMorphism,
    compose,
    compose_all,
    evaluate,
    ideal_equal,
    identity,
    inclusion,
    morphisms_equal,
    normal_form,
    tensor_over,
)
from .derivations import Derivation, leibniz_extend, lie_bracket

# Tangent structures
from .structure import AxiomEntry, AxiomReport, FibreProduct, check_axioms, check_naturality
from .dual import (
    DUAL,
    VectorFieldDual,
    apply_T,
    check_tangent_axioms,
    derivation_to_vf,
    dual_numbers,
    dual_tower,
    dual_width,
    nu,
    vf_to_derivation,
)
from .kahler import (
    KAHLER,
    check_costructure_axioms,
    flat,
    kahler_apply,
    kahler_square,
    kahler_tangent,
    second_differential,
    sharp,
    tangent_space_at,
    total_differential,
)

# Modules and bundles
from .modules import (
    FPModule,
    ModuleMorphism,
    apply_module_morphism,
    compose_modules,
    kahler_module,
    module_action,
    modules_equal,
    square_zero_extension,
    symmetric_algebra,
)
from .bundles import (
    BundleMorphism,
    DiffBundle,
    PreDiffBundle,
    Side,
    SplitForm,
    alpha_iso,
    beta_iso,
    bundle_map_affine,
    bundle_map_ring,
    bundle_to_mod_affine,
    bundle_to_mod_ring,
    check_bundle_morphism,
    check_diff_bundle,
    check_pre_bundle,
    derive_sum_and_negative_via_rosicky,
    mod_to_bundle_affine,
    mod_to_bundle_ring,
    module_map_affine,
    module_map_ring,
    mu,
    psi_iso,
    split_form,
    tangent_bundle,
)
