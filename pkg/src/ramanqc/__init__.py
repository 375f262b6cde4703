"""Quarter-wavelength Raman optical-lattice qubit toolkit.

Calculates the dressed-state optical potentials of a J=3/2 Zeeman manifold
in counter-propagating sigma+/sigma- Raman fields, the microwave single-
and two-qubit gate budgets of the resulting lambda/4-spaced qubit register,
wavepacket motion in the wells, and the magnetic-noise decoherence budget.

Unit policy: dataclass fields and scalar results are SI-valued Quantity
records; array-valued data is in the working units each module documents
(atomic units for lattice/motional, SI for decoherence).
"""

from .errors import (
    AddressingError,
    ConfigError,
    ConvergenceError,
    DetuningError,
    GridError,
    NoiseError,
    OptimizationError,
    ParameterError,
    RamanqcError,
    StabilityError,
    UnitError,
)
from .units import Dimension, Quantity, from_internal, to_internal
from .lattice import (
    AtomSpecies,
    Branch,
    CoupledPair,
    DressedState,
    EffectiveHamiltonian,
    LatticeParams,
    WellGeometry,
    WellSite,
    aluminum,
    dressed_states,
    effective_hamiltonian,
    harmonic_frequency,
    optimize_detuning,
    potential_general,
    potential_optimal,
    well_geometry,
    zeeman_ladder,
)
from .qubit_control import (
    AddressEntry,
    FieldProfile,
    Pulse,
    ResonanceSpectrum,
    TwoLevelState,
    address_map,
    crosstalk_bound,
    pi_pulse,
    rabi_evolve,
    resonance_spectrum,
)
from .gates import (
    ConditionalTransfer,
    GateBudget,
    QubitMoments,
    cnot_budget,
    cnot_shift,
    cnot_simulate,
    dipolar_field,
    qubit_moments,
)
from .motional import (
    EscapeCurve,
    Grid,
    LambDicke,
    Wavepacket,
    default_grid,
    ground_state,
    inverted_well_escape,
    lamb_dicke,
    motional_populations,
    propagate,
    tau2,
)
from .decoherence import (
    DecayCurve,
    DecoherenceReport,
    NoiseKind,
    NoiseModel,
    coupling_mu,
    decoherence_report,
    excitation_probability,
    monte_carlo_decoherence,
    noise_realization,
    shielding_requirement,
    spectral_density,
    tau1,
)

__version__ = "0.1.0"
