"""Bandwidth, linearity and noise figures shared by both schemes."""

from .linearity import (
    P1DB_FACTOR,
    CubicFit,
    LinearityReport,
    QuasiStaticMap,
    ToneSlopes,
    alpha,
    extract_h1_h3,
    fit_odd_cubic,
    iip3,
    imd3_dbc,
    linearity_report,
    p1db,
    tone_slopes,
    two_tone_imd3_timedomain,
)
from .noise import (
    NoiseBudget,
    NoiseParams,
    callen_welton,
    default_atom_number,
    nef_budget,
    nef_spectrum,
    resolve_noise_params,
)
from .poles import (
    BandwidthReport,
    ClosedFormBandwidth,
    FWHMReport,
    NumericBandwidth,
    PoleAnalysis,
    bandwidth_closed_form,
    bandwidth_numeric,
    bandwidth_report,
    complex_poles,
    pole_analysis,
    spectrum_fwhm,
)
