"""Link-level simulator for digital-beamforming mmWave MIMO-OFDM with
low-resolution DACs/ADCs."""

from .channel import (ArrayGeometry, ChannelParams, ChannelRealization, channel_correlation,
                      generate_channel, ula_steering)
from .errors import (ConfigError, DegenerateChannelError, DomainError, EstimationError,
                     NumericError, SimulationError)
from .estimators import BeamspaceDictionary, build_dictionary, conventional, omp_estimate
from .harness import (LinkConfig, SweepResult, SweepRow, TrialResult, load_config, load_grid,
                      run_link_trial, run_sweep, write_csv)
from .metrics import (channel_gain_matrix, energy_efficiency, estimation_error_variance,
                      spectral_efficiency, stream_sinr)
from .power import (PowerModelParams, converter_power_mw, pa_dc_power_mw, pa_input_power_dbm,
                    pa_output_power_dbm, rx_power_mw, total_power_mw, tx_power_mw)
from .precoding import PrecoderSet, design_precoders, simulate_data_transmission, svd_precoder, water_fill
from .quantization import (INFINITE, ImpairmentPowers, QuantizerSpec, adc_noise_power,
                           aqnm_apply, dac_noise_power, inverse_coding_gain)
from .training import (ChannelEstimate, EstimatorKind, PilotGrid, build_pilot_grid,
                       ls_estimate_interpolate, simulate_training)

__version__ = "0.1.0"
