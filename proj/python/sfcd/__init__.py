"""Spatial fuzzy c-means change detection for co-registered grayscale image pairs."""

from ._sfcd import (
    InitMethod,
    InputError,
    NumericalError,
    SfcmConfig,
    SpatialVariant,
    add_speckle,
    apply_spatial,
    difference_image,
    fcm_membership,
    init_centers,
    load_config,
    load_image,
    parse_config,
    quantize,
    run_bench,
    run_sfcm,
    save_image,
    score,
    serialize_config,
    spatial_intensity,
    spatial_neighbor,
    standard_phantom,
    sweep_m,
    sweep_pq,
)

__all__ = [
    "InitMethod",
    "InputError",
    "NumericalError",
    "SfcmConfig",
    "SpatialVariant",
    "add_speckle",
    "apply_spatial",
    "difference_image",
    "fcm_membership",
    "init_centers",
    "load_config",
    "load_image",
    "parse_config",
    "quantize",
    "run_bench",
    "run_sfcm",
    "save_image",
    "score",
    "serialize_config",
    "spatial_intensity",
    "spatial_neighbor",
    "standard_phantom",
    "sweep_m",
    "sweep_pq",
]
