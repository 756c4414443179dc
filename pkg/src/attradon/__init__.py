"""Attenuated Radon transform, explicit inversion and the f-g pairing formula."""

from .beam import BeamQuadratureConfig, attenuation_weight, divergent_beam
from .fields import (GridField, ScalarField, UnsupportedOperationError, directional_derivative,
                     integrate_2d, make_phantom, parse_phantom_spec, zero_field)
from .geometry import (LineCoord, SinogramGrid, line_coords_of_point, perp, point_on_line,
                       unit_vector)
from .hilbert import ComplexSinogram, HilbertConfig, compute_h, exp_h, hilbert_1d, hilbert_rows
from .novikov import ReconstructionConfig, filtered_data, reconstruct
from .plancherel import (PairingResult, SinogramInterpolator, identity_check_ibp,
                         identity_check_total_derivative, pair_monte_carlo, pair_quadrature,
                         pairing_kernel)
from .radon import (LineQuadratureConfig, Sinogram, classical_sinogram, forward_sinogram,
                    forward_sinogram_directional, radon_attenuated, radon_classical)

__version__ = "0.1.0"
