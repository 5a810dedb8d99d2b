import logging
from contextlib import contextmanager
from enum import StrEnum, auto

from django.conf import settings
from django.test.signals import setting_changed

logger = logging.getLogger(__name__)


class EndCondition(StrEnum):
    DIRICHLET = auto()
    NEUMANN = auto()


class AppSettings:
    class Transverse:
        neumann_limit_tolerance = 1e-8
        simple_spectrum_tolerance = 1e-9
        quadrature_factor = 4
        biorthonormality_tolerance = 1e-10

    class Kernels:
        bessel_series_cutoff = 2.0
        bessel_step = 0.05
        tail_tolerance = 1e-10
        max_modes = 10_000

    class BirmanSchwinger:
        longitudinal_nodes = 64
        planar_nodes = 20
        transverse_nodes = 16
        modes = 6
        support_tolerance = 1e-10
        newton_tolerance = 1e-12
        newton_max_iterations = 50
        fixed_point_damping = 0.5
        borderline_tolerance = 1e-8
        contraction_warning = 0.5
        reality_tolerance = 1e-8

    class Direct:
        default_end_bc = EndCondition.DIRICHLET
        truncation_widths = 12
        localization_threshold = 0.99
        dense_eigen_limit = 5000
        window_count = 6
        residual_tolerance = 1e-10
        box_resolution = 25.0

    class Output:
        precision = 17

    ATTRS = {
        "NEUMANN_LIMIT_TOLERANCE": (Transverse, "neumann_limit_tolerance"),
        "SIMPLE_SPECTRUM_TOLERANCE": (Transverse, "simple_spectrum_tolerance"),
        "QUADRATURE_FACTOR": (Transverse, "quadrature_factor"),
        "BIORTHONORMALITY_TOLERANCE": (Transverse, "biorthonormality_tolerance"),
        "BESSEL_SERIES_CUTOFF": (Kernels, "bessel_series_cutoff"),
        "BESSEL_STEP": (Kernels, "bessel_step"),
        "TAIL_TOLERANCE": (Kernels, "tail_tolerance"),
        "MAX_MODES": (Kernels, "max_modes"),
        "LONGITUDINAL_NODES": (BirmanSchwinger, "longitudinal_nodes"),
        "PLANAR_NODES": (BirmanSchwinger, "planar_nodes"),
        "TRANSVERSE_NODES": (BirmanSchwinger, "transverse_nodes"),
        "MODES": (BirmanSchwinger, "modes"),
        "SUPPORT_TOLERANCE": (BirmanSchwinger, "support_tolerance"),
        "NEWTON_TOLERANCE": (BirmanSchwinger, "newton_tolerance"),
        "NEWTON_MAX_ITERATIONS": (BirmanSchwinger, "newton_max_iterations"),
        "FIXED_POINT_DAMPING": (BirmanSchwinger, "fixed_point_damping"),
        "BORDERLINE_TOLERANCE": (BirmanSchwinger, "borderline_tolerance"),
        "CONTRACTION_WARNING": (BirmanSchwinger, "contraction_warning"),
        "REALITY_TOLERANCE": (BirmanSchwinger, "reality_tolerance"),
        "DEFAULT_END_BC": (Direct, "default_end_bc"),
        "TRUNCATION_WIDTHS": (Direct, "truncation_widths"),
        "LOCALIZATION_THRESHOLD": (Direct, "localization_threshold"),
        "DENSE_EIGEN_LIMIT": (Direct, "dense_eigen_limit"),
        "WINDOW_COUNT": (Direct, "window_count"),
        "RESIDUAL_TOLERANCE": (Direct, "residual_tolerance"),
        "BOX_RESOLUTION": (Direct, "box_resolution"),
        "PRECISION": (Output, "precision"),
    }

    def __init__(self):
        self._defaults = {
            key: getattr(setting_class, attr) for key, (setting_class, attr) in self.ATTRS.items()
        }
        self.load()

    def load(self):
        for key, value in self._defaults.items():
            setting_class, attr = self.ATTRS[key]
            setattr(setting_class, attr, value)

        user_settings = getattr(settings, "PT_WAVEGUIDE", {})

        for setting, value in user_settings.items():
            logger.debug(f"setting {setting} -> {value}")
            if setting not in self.ATTRS:
                logger.warning(f"Ignoring {setting} as it is not a setting for PT waveguide")
                continue

            setting_class, attr = self.ATTRS[setting]
            setattr(setting_class, attr, value)

        end_bc = self.Direct.default_end_bc
        valid_conditions = {c.value for c in EndCondition}
        if end_bc not in valid_conditions:
            logger.warning(
                f"Invalid DEFAULT_END_BC value: '{end_bc}'. "
                f"Must be one of {valid_conditions}. Defaulting to 'dirichlet'."
            )
            self.Direct.default_end_bc = EndCondition.DIRICHLET

    @contextmanager
    def override(self, **values):
        """Temporarily replace settings, given by their PT_WAVEGUIDE keys."""
        previous = {}
        for key, value in values.items():
            setting_class, attr = self.ATTRS[key]
            previous[key] = getattr(setting_class, attr)
            setattr(setting_class, attr, value)
        try:
            yield self
        finally:
            for key, value in previous.items():
                setting_class, attr = self.ATTRS[key]
                setattr(setting_class, attr, value)


app_settings = AppSettings()


def reload_settings(*args, **kw):
    setting = kw["setting"]
    if setting == "PT_WAVEGUIDE":
        app_settings.load()


setting_changed.connect(reload_settings)
