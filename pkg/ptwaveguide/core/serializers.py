from rest_framework import serializers

from .profiles import DecayClass
from .settings import EndCondition


class CoordinatesField(serializers.Field):
    """Comma separated floats, `0.0, 1.5`."""

    default_error_messages = {"invalid": "Expected comma separated numbers, got {value}."}

    def to_internal_value(self, data):
        if isinstance(data, (list, tuple)):
            items = data
        else:
            items = [item for item in str(data).split(",") if item.strip()]
        try:
            return [float(item) for item in items]
        except (TypeError, ValueError):
            self.fail("invalid", value=data)

    def to_representation(self, value):
        return list(value)


class EpsilonListField(CoordinatesField):
    def to_internal_value(self, data):
        epsilons = super().to_internal_value(data)
        if any(epsilon < 0 for epsilon in epsilons):
            raise serializers.ValidationError("Coupling constants must be nonnegative.")
        return epsilons


class BetaSerializer(serializers.Serializer):
    KINDS = (DecayClass.GAUSSIAN.value, DecayClass.COMPACT_BUMP.value, "odd-gaussian")

    kind = serializers.ChoiceField(choices=KINDS, default=DecayClass.GAUSSIAN.value)
    amplitude = serializers.FloatField(required=False)
    mean = serializers.FloatField(required=False)
    width = serializers.FloatField(default=1.0)
    center = CoordinatesField(required=False)

    def validate_width(self, value):
        if value <= 0:
            raise serializers.ValidationError("Ensure this value is greater than 0.")
        return value

    def validate(self, data):
        has_amplitude = data.get("amplitude") is not None
        has_mean = data.get("mean") is not None
        if has_amplitude and has_mean:
            raise serializers.ValidationError({"mean": "Give either amplitude or mean, not both."})
        if data["kind"] != "odd-gaussian" and not (has_amplitude or has_mean):
            raise serializers.ValidationError({"mean": "Either amplitude or mean is required."})
        if data["kind"] == "odd-gaussian" and has_mean and data["mean"] != 0:
            raise serializers.ValidationError({"mean": "An odd profile has mean zero."})
        return data


class ProblemSerializer(serializers.Serializer):
    n = serializers.ChoiceField(choices=[1, 2], default=1)
    d = serializers.FloatField()
    alpha0 = serializers.FloatField()
    epsilon = serializers.FloatField(min_value=0.0)
    beta = BetaSerializer()

    def validate_d(self, value):
        if value <= 0:
            raise serializers.ValidationError("Ensure this value is greater than 0.")
        return value

    def validate(self, data):
        center = data["beta"].get("center")
        if center is None:
            data["beta"]["center"] = [0.0] * data["n"]
        elif len(center) != data["n"]:
            raise serializers.ValidationError(
                {"beta": {"center": f"Expected {data['n']} coordinates, got {len(center)}."}}
            )
        return data


class NumericsSerializer(serializers.Serializer):
    L = serializers.FloatField(required=False)
    h_x = serializers.FloatField(required=False)
    h_u = serializers.FloatField(required=False)
    end_bc = serializers.ChoiceField(choices=[c.value for c in EndCondition], required=False)
    extrapolate = serializers.BooleanField(required=False)
    j_max = serializers.IntegerField(min_value=0, required=False)
    quad_order = serializers.IntegerField(min_value=1, required=False)
    longitudinal_nodes = serializers.IntegerField(min_value=4, required=False)
    newton_tol = serializers.FloatField(required=False)

    def _positive(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError("Ensure this value is greater than 0.")
        return value

    validate_L = _positive
    validate_h_x = _positive
    validate_h_u = _positive
    validate_newton_tol = _positive

    def validate(self, data):
        grid_keys = {"L", "h_x", "h_u"} & set(data)
        if grid_keys and grid_keys != {"L", "h_x", "h_u"}:
            missing = sorted({"L", "h_x", "h_u"} - grid_keys)
            raise serializers.ValidationError(
                {key: "Required when any of L, h_x, h_u is given." for key in missing}
            )
        return data


class OutputSerializer(serializers.Serializer):
    csv_path = serializers.CharField(required=False)
    precision = serializers.IntegerField(min_value=1, max_value=17, default=17)


class SweepSerializer(serializers.Serializer):
    epsilons = EpsilonListField(default=list)


class RunConfigSerializer(serializers.Serializer):
    problem = ProblemSerializer()
    numerics = NumericsSerializer(default=dict)
    output = OutputSerializer(default=dict)
    sweep = SweepSerializer(default=dict)


__all__ = (
    "BetaSerializer",
    "NumericsSerializer",
    "OutputSerializer",
    "ProblemSerializer",
    "RunConfigSerializer",
    "SweepSerializer",
)
