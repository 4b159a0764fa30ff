"""Rotational motion blur synthesis and blur-invariant moment features."""

__version__ = "0.1.0"

from .blur import (MotionProfile, MotionSegment, blur_constant, profile_rcm,
                   profile_uacm, profile_ucm, psi_eval, synthesize_blur)
from .image import (SimilarityParams, add_gaussian_noise, apply_similarity,
                    load_image, read_pgm, resize_bilinear, write_pgm)
from .invariants import (FeatureVector, hu_moments, rmbmi4, rmbmi6,
                         rmbmi_geometric)
from .moments import (ComplexMomentSet, GeometricMomentSet,
                      complex_from_geometric, complex_moments_direct,
                      geometric_moments, normalize_complex,
                      normalize_geometric)

__all__ = [
    "MotionProfile", "MotionSegment", "blur_constant", "profile_rcm",
    "profile_uacm", "profile_ucm", "psi_eval", "synthesize_blur",
    "SimilarityParams", "add_gaussian_noise", "apply_similarity",
    "load_image", "read_pgm", "resize_bilinear", "write_pgm",
    "FeatureVector", "hu_moments", "rmbmi4", "rmbmi6", "rmbmi_geometric",
    "ComplexMomentSet", "GeometricMomentSet", "complex_from_geometric",
    "complex_moments_direct", "geometric_moments", "normalize_complex",
    "normalize_geometric",
]
