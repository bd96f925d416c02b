"""Waveform optimization for multi-antenna multi-sine wireless power transfer."""
from .asymptotic import (AsymptoticAllocation, build_Aprime1, lift_to_waveform, sa_solve, sa_step,
                         vout_asymptotic, vout_uniform_closed_form)
from .baselines import (RegionPoint, ass_waveform, tdma_region, uniform_matched_waveform,
                        weight_sweep_region)
from .channel import (DEFAULT_PDP, ChannelState, PowerDelayProfile, generate_channel_iid,
                      generate_channel_tdl, generate_channels, substream)
from .config import SystemConfig
from .rectenna import (RectennaParams, epigraph_vars, tone_projections, vout, vout_time_oracle,
                       weighted_sum_vout)
from .sca import HermitianOperator, build_A1, init_waveform, min_eigenpair, sca_solve, solve_qcqp

__version__ = "0.1.0"
