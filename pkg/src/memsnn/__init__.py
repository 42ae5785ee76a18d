"""Two-array memristive spiking neural network simulator.

Recognition runs on one RRAM crossbar (read-only alpha-weighted spikes),
learning on a second one driven by superposed plateau-plus-tail waveforms
that realize exponential STDP; periodic transfers copy the learn array into
the recognize array. A reference mode replaces the device machinery with the
exponential pairing rule so hardware and software trajectories can be
compared weight for weight.
"""

from .dynamics import (
    AlphaParams,
    NeuronParams,
    NeuronState,
    WaveformParams,
    WaveformState,
    alpha_superpose,
    alpha_value,
    lif_isi_constant_current,
    lif_step,
    waveform_value,
)
from .encoding import IrisSample, PopulationCoder, encode, fit_coder, load_iris
from .engine import EventLog, RunConfig, TrainResult, evaluate, simulate_epoch, train_run
from .memristor import (
    DeviceKind,
    DeviceParams,
    DeviceState,
    apply_voltage,
    dc_iv_sweep,
    effective_thresholds,
    read_current,
)
from .network import (
    CrossbarArray,
    Mode,
    TwoArrayNetwork,
    UpdateSchedule,
    classify,
    learn_step,
    make_network,
    recognize_step,
    run_sample,
    transfer_weights,
)
from .plasticity import (
    StdpParams,
    pair_stdp_accumulate,
    stdp_oracle,
    superposed_stdp_response,
    superposition_voltage,
    synthesize_hardware,
)

__version__ = "0.1.0"
