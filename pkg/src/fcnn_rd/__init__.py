"""Learning explicit finite difference schemes for reaction-diffusion
equations with five-point stencil CNNs (FCNN)."""

from .equations import EquationSpec, Kind, StepParams, fdm_rollout, fdm_step, stability_dt
from .fcnn import FcnnModel, analytic_model, forward, gradients, init_model
from .grid import Field, GridGeometry, laplacian_5pt, new_field, pad_neumann, relative_l2
from .training import TrainConfig, make_pair, make_pairs, train

__version__ = "0.1.0"
