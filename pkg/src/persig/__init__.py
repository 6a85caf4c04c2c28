"""Persistent-homology signatures of periodic motion silhouette sequences."""

__version__ = "0.1.0"

from .complex import (BoundarySimplicialComplex, CubicalComplex, SimplicialComplex,
                      boundary_complex, build_cubical, extract_boundary)
from .evaluation import (EvalReport, Gallery, average_signatures, classify, run_manifest,
                         tp_tn_curves)
from .filtration import PLANES, Filtration, ReferencePlane, build_filtration, vertex_distance
from .ingest import (BinaryImage3D, IngestConfig, SilhouetteFrame, load_frame, load_sequence,
                     stack_frames)
from .metrics import ComparisonResult, angle, bottleneck, compare, cosine, total_angle, total_angles
from .persistence import Bar, PersistenceBarcode, betti_oracle, reduce
from .signature import (SignatureConfig, SignatureVector, TopologicalSignature, signature,
                        vectorize)

__all__ = [
    "Bar", "BinaryImage3D", "BoundarySimplicialComplex", "ComparisonResult", "CubicalComplex",
    "EvalReport", "Filtration", "Gallery", "IngestConfig", "PLANES", "PersistenceBarcode",
    "ReferencePlane", "SignatureConfig", "SignatureVector", "SilhouetteFrame",
    "SimplicialComplex", "TopologicalSignature", "angle", "average_signatures", "betti_oracle",
    "bottleneck", "boundary_complex", "build_cubical", "build_filtration", "classify", "compare",
    "cosine", "extract_boundary", "load_frame", "load_sequence", "reduce", "run_manifest",
    "signature", "stack_frames", "total_angle", "total_angles", "tp_tn_curves", "vectorize",
    "vertex_distance",
]
