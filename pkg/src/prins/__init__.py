"""Functional, cycle- and energy-accounting simulator of an associative
(resistive-CAM) processing-in-storage array."""

from .errors import (BoundsError, DimensionError, EmptySelectionError, HazardError,
                     LayoutError, ParseError, PrinsError, ReportError)
from .kernels import (BfsRowLayout, CsrMatrix, GraphEdges, KernelRun, SampleSet,
                      bfs, bfs_model, dot_product, dot_product_model,
                      euclidean_distance, euclidean_distance_model, histogram,
                      histogram_model, spmv, spmv_model)
from .microcode import (FULL_ADDER, FULL_SUBTRACTOR, LayoutBuilder, TruthTable,
                        VectorLayout, broadcast_write, exec_truth_table, vec_add,
                        vec_mult, vec_square, vec_sub)
from .perfmodel import (CycleEnergyLedger, DatasetInfo, KernelReport, ModelConfig,
                        attainable_perf, build_report, kernel_ai, roofline_points,
                        throughput)
from .rcam import FieldSpec, RcamArray, TagVector

__version__ = "0.1.0"
