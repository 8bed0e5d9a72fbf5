from ._core import (
    TwistabError,
    __version__,
    commands,
    config_hash,
    geometry,
    gsfe_hessian,
    gsfe_value,
    hessian3d,
    m_closed,
    m_quadrature,
    run,
    sign_transition,
    well_report,
)

__all__ = [
    "TwistabError",
    "__version__",
    "commands",
    "config_hash",
    "geometry",
    "gsfe_hessian",
    "gsfe_value",
    "hessian3d",
    "m_closed",
    "m_quadrature",
    "run",
    "sign_transition",
    "well_report",
]
