"""Planning and analysis of frequency-addressed LC resonator networks."""

from importlib.resources import files

__version__ = "0.1.0"

from .allocator import (  # noqa: E402
    AllocationPlan,
    BandPlan,
    allocate,
    constant_q_count,
    next_center,
    sweep,
)
from .errors import (  # noqa: E402
    BandExceedsGridError,
    DomainError,
    InsufficientDataError,
    LCPlanError,
    LossTableError,
    MultiBandError,
    NoBandError,
    SaturationError,
    ScheduleError,
)
from .loss_tables import (  # noqa: E402
    ConstantQ,
    LossComponents,
    LossKind,
    LossTable,
    composite_rs,
    load_loss_table,
)
from .resonance import (  # noqa: E402
    HALF_POWER,
    CouplingLink,
    EnergyState,
    ResonatorSpec,
    ResponseCurve,
    capacitance_for,
    effective_q,
    half_power_bandwidth,
    half_power_edges,
    measured_bandwidth,
    mutual_inductance,
    normalized_response,
    resonant_frequency,
    series_q,
    stored_energy,
)
from .selectivity import (  # noqa: E402
    CycleState,
    CycleTrace,
    Device,
    Tank,
    TriggerBand,
    devices_from_plan,
    load_devices,
    overlaps,
    run_cycle,
    trigger_band,
    triggered_set,
)


def data_path(name):
    """Path to a fixture shipped in ``lcplan/data``."""
    return files(__name__).joinpath("data", name)
