import math

import factory

from .loaders import PROFILE_BUILDERS
from .profiles import PerturbationProfile
from .transverse import WaveguideConfig


class PerturbationProfileFactory(factory.Factory):
    n = 1
    kind = "gaussian"
    mean = -1.0
    amplitude = None
    width = 1.0
    center = None

    class Meta:
        model = PerturbationProfile

    class Params:
        bump = factory.Trait(kind="bump")
        odd = factory.Trait(kind="odd-gaussian", mean=None, amplitude=1.0)
        repulsive = factory.Trait(mean=1.0)

    @classmethod
    def _create(cls, model_class, kind, **kwargs):
        options = {key: value for key, value in kwargs.items() if value is not None}
        return PROFILE_BUILDERS[kind](**options)

    @classmethod
    def _build(cls, model_class, *args, **kwargs):
        return cls._create(model_class, *args, **kwargs)


class WaveguideConfigFactory(factory.Factory):
    n = 1
    d = math.pi
    alpha0 = 0.5
    epsilon = 0.1
    beta = factory.SubFactory(PerturbationProfileFactory, n=factory.SelfAttribute("..n"))

    class Meta:
        model = WaveguideConfig

    class Params:
        layer = factory.Trait(n=2)
        unperturbed = factory.Trait(epsilon=0.0)


class BetaDataFactory(factory.DictFactory):
    kind = "gaussian"
    mean = "-1.0"
    width = "1.0"


class ProblemDataFactory(factory.DictFactory):
    n = "1"
    d = str(math.pi)
    alpha0 = "0.5"
    epsilon = "0.1"
    beta = factory.SubFactory(BetaDataFactory)


class NumericsDataFactory(factory.DictFactory):
    j_max = "4"
    longitudinal_nodes = "32"


class RunDataFactory(factory.DictFactory):
    """Raw run file content, as `parse_config_text` returns it."""

    problem = factory.SubFactory(ProblemDataFactory)
    numerics = factory.SubFactory(NumericsDataFactory)
    output = factory.Dict({"precision": "17"})
