"""Photon creation in a rectangular cavity with an oscillating wall.

Closed-form first-order spectra (``perturbation``), a coupled-mode ODE
oracle (``dynamics``), classical waveguide scattering (``waveguide``) and a
config-driven command line (``cli``).
"""

from .cavity import (
    CavityGeometry,
    CouplingMatrix,
    ModeIndex,
    ModeSet,
    Wall,
    WallMotion,
    build_coupling_matrix,
    coupling_coefficient,
    fundamental_frequency,
    mode_frequency,
    wall_position,
    wavenumber,
)
from .dynamics import (
    BogoliubovMatrix,
    EomParams,
    IntegrationDiverged,
    TrajectoryState,
    bogoliubov_matrix,
    default_dt,
    eom_rhs,
    extract_bogoliubov,
    initial_condition,
    integrate,
    max_stable_dt,
    unitarity_defect,
    unitarity_defects,
)
from .perturbation import (
    PhotonSpectrum,
    ScanGrid,
    TwoWallConfig,
    TwoWallResult,
    WIndices,
    beta_analytic,
    beta_first_order,
    discrete_photon_number,
    finite_time_kernel,
    first_order_amplitude,
    nearest_partner_index,
    peak_location,
    photon_number,
    photon_number_two_walls,
    resonance_partner,
    spectrum_scan,
    w_coefficient,
)
from .waveguide import (
    ScatteredWaves,
    WavePacket,
    amplification_estimate,
    generated_wave_spectrum,
    normalization,
    reconstruct_field,
)

__version__ = "0.1.0"
