"""Report input/output.

:mod:`report_io` emits benchmark reports as CSV (plot data) or JSON (full
report) and reads them back for the ``rates`` command.
"""

from .report_io import CSV_COLUMNS, emit, load_report_json, load_rows_csv, write_report

__all__ = ["CSV_COLUMNS", "emit", "load_report_json", "load_rows_csv", "write_report"]
