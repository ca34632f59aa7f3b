"""Photoacoustic beamforming: DAS, DMAS and NL_p with the B-mode chain and metrics."""

from ._core import (
    Config,
    DataError,
    DelayTable,
    Frame,
    Grid,
    Image,
    ParameterError,
    bandpass,
    beamform,
    checksum,
    compute_delays,
    das_kernel,
    dmas_kernel,
    envelope,
    fwhm,
    lateral_profile,
    log_compress,
    nl2_decomposition,
    nl2_decomposition_kernel,
    nl_kernel,
    ops_per_pixel,
    pipeline,
    read_paim,
    read_parf,
    sidelobe_level,
    signed_root,
    simulate,
    snr,
    write_paim,
    write_parf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
