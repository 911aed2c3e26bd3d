"""Fiber weave effect: delay/skew versus trace offset and exceedance statistics."""

from .fieldsolver import (DielectricRaster, FieldSolution, Grid2D, LineParams, SolverError,
                          capacitance, capacitance_matrix, effective_params, solve_laplace)
from .lattice import (BUILTIN_STYLES, FabricStyle, Laminate, LatticeModel, TraceLayout,
                      builtin_catalog, eps_at, glass_fraction, load_catalog, make_lattice,
                      raster_slice)
from .stats import (ArcsineModel, DeviationSample, ExceedanceCurve, Histogram,
                    InterpolatedProfile, KumaraswamyModel, arcsine_ccdf, arcsine_pdf,
                    build_spline, density, deviation_series, exceedance, fit_arcsine,
                    fit_kumaraswamy, ks_statistic)
from .sweep import (DelayProfile, SkewProfile, SweepConfig, delay_at_offset, run_diff_sweep,
                    run_single_sweep)

__version__ = "0.1.0"
