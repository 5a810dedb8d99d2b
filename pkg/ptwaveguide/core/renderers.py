import csv
import io
import numbers

from rest_framework import renderers

from .settings import app_settings


def format_value(value, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return f"{float(value):.{precision - 1}e}"
    return str(value)


class CSVRenderer(renderers.BaseRenderer):
    """
    Tables as CSV. `data` is a list of row dicts; the column order comes
    from `renderer_context["header"]`, else from the first row. Reals are
    written in scientific notation with `PRECISION` significant digits.
    """

    media_type = "text/csv"
    format = "csv"
    charset = "utf-8"

    def render(self, data, accepted_media_type=None, renderer_context=None):
        renderer_context = renderer_context or {}
        rows = list(data or [])
        header = renderer_context.get("header") or (list(rows[0]) if rows else [])
        precision = renderer_context.get("precision") or app_settings.Output.precision

        stream = io.StringIO()
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(row.get(column), precision) for column in header])
        return stream.getvalue().encode(self.charset)
