"""Finite-scale normed modules, liftings, Banach-Mazur embeddings and bundles."""
from .bundle import (Bundle, BundleMorphism, GradedBundle, Representation, RepresentationReport, Section,
                     apply_section_functor, bundle_from_sections, dense_section_family, embed_in_universal,
                     gamma_module, graded_representation, morphism_from_module_map, pr_phi_section,
                     pullback_bundle, pullback_commute_check, pullback_section, represent_module,
                     represent_module_no_ac, universal_bundle)
from .embedding import (AmbientSpace, FiberEmbedding, FunctionalNet, build_functional_net, cantor_metric,
                        embed_collection, embed_fiber, psi_surjection, retract)
from .errors import FiberlibError
from .lifting import (LiftedElement, LiftedModule, MeasureLifting, lift_function, lift_module, lift_pairing,
                      lift_set, make_lifting, project_Pi_m, rx_isometry_check)
from .measure import (AtomSpace, Disintegration, FunctionClass, Measure, PointMap, TotalFunction,
                      disintegrate, glue_functions, l0_distance, measure_algebra_distance, pr_phi_function,
                      pr_phi_radon_nikodym, project_class, pushforward)
from .modules import (ModuleElement, ModuleMorphism, ModulePresentation, cr_roundtrip_check,
                      dimensional_decomposition, direct_limit_chain, dual_module, glue_elements, local_basis,
                      localize_extend, nested_chain, pointwise_norm, pr_phi_module, pullback_element,
                      pullback_module)
from .norms import (FiberNorm, Polyhedral, Quadratic, WeightedLp, contraction_check, dual_norm, kernel_basis,
                    norm_eval, norming_functional)

__version__ = "0.1.0"
