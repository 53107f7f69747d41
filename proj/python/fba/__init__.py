"""Burst deblurring by weighted Fourier-domain accumulation."""

from ._fba import (
    align_and_average,
    deblur_burst,
    equivalent_psf,
    frame_contributions,
    frequency_percentile_fusion,
    lucky_frame_average,
    merge_burst,
    noise_aware_sharpen,
    read_image,
    register_burst,
    run_study,
    set_thread_count,
    sharpness_selectivity_average,
    simulate_kernel,
    synthesize_burst,
    synthetic_scene,
    write_image,
)

__all__ = [
    "align_and_average",
    "deblur_burst",
    "equivalent_psf",
    "frame_contributions",
    "frequency_percentile_fusion",
    "lucky_frame_average",
    "merge_burst",
    "noise_aware_sharpen",
    "read_image",
    "register_burst",
    "run_study",
    "set_thread_count",
    "sharpness_selectivity_average",
    "simulate_kernel",
    "synthesize_burst",
    "synthetic_scene",
    "write_image",
]
