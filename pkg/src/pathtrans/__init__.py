"""Numerical parallel transport on path-space bundles decorated by a second
structure group: Lie crossed modules, the connections omega / Omega /
hatOmega, decorations, non-abelian Stokes checks and the holonomy-reduction
experiment, with a scenario-driven CLI."""

from ._kernels import IMPL as kernel_impl
from .errors import (ConfigError, DimensionMismatch, GridMismatch,
                     IntegratorDiverged, MarginViolation, ModuleMismatch,
                     NonComposable, NotALoop, NotComposable, OutOfChart,
                     PathTransError, ProjectionMismatch, SingularLog)
from .lie import (SO2, SO3, TRANSL1, TRANSL2, TRANSL3, AbelianModule,
                  AlgebraElement, ConjugationModule, CrossedModule,
                  GroupElement, HigherModule, LieGroup, SemidirectAlgebraElement,
                  SemidirectElement, VectorModule, group_by_id,
                  higher_module_by_id, module_by_id, translation_group)
from .geometry import (BaseOneForm, BaseTwoForm, BundleOneForm, BundleTwoForm,
                       ChartDomain, curvature, default_chart,
                       exterior_derivative, form_preset_1, form_preset_2,
                       zero_one_form, zero_two_form)
from .paths import (BundlePath, PathFamily, PathTangent, SampledPath,
                    chen_integral_1, chen_integral_2, compose_paths,
                    connection_change, horizontal_lift, local_trivialization,
                    loop_holonomy, normalize_path, omega_eval,
                    omega_transport, omega_vector_lift, path_from_map,
                    segment_path, sheet_family, square_loop, tangent_lift,
                    tangency_residual, transition)
from .decorated import (DecoratedPoint, DecoratedTangent, FormSet, Omega_eval,
                        Omega_split, Omega_transport, dec_right_action,
                        dec_trivialization, decoration_hstar,
                        decoration_variation, endpoint_shift_residual,
                        hatOmega_eval, hatOmega_transport,
                        higher_decoration_kstar, make_formset,
                        nonabelian_stokes_residual, reduction_residual,
                        vertical_vector)
from .categorical import (DecoratedMorphism, Morphism2G, decorated_compose,
                          exchange_residual, morphism_endpoints,
                          vertical_compose)
from .scenarios import Scenario, parse_scenario

__version__ = "1.0.0"
