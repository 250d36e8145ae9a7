import csv
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
from django.core.serializers.json import DjangoJSONEncoder


SIGNIFICANT_DIGITS = 17


def format_number(value):
	"""Render a number with full double precision and no locale dependence."""
	if value is None:
		return ""
	if isinstance(value, (bool, np.bool_)):
		return "true" if value else "false"
	if isinstance(value, (int, np.integer)):
		return str(int(value))
	if isinstance(value, mpmath.mpf):
		if mpmath.isinf(value) or mpmath.isnan(value):
			return format_number(float(value))
		return mpmath.nstr(value, SIGNIFICANT_DIGITS, strip_zeros=False)
	if isinstance(value, Fraction):
		value = float(value)
	value = float(value)
	if math.isnan(value):
		return "NaN"
	if math.isinf(value):
		return "Infinity" if value > 0 else "-Infinity"
	return "%.17g" % value


class LabJSONEncoder(DjangoJSONEncoder):
	"""Adds the numpy, mpmath and exact-rational values the lab produces.

	Floats are written in their shortest round-trip form, which parses back to
	the same double as the 17-digit CSV rendering.
	"""

	def default(self, o):
		if isinstance(o, np.bool_):
			return bool(o)
		if isinstance(o, np.integer):
			return int(o)
		if isinstance(o, (np.floating, mpmath.mpf, Fraction)):
			return float(o)
		if isinstance(o, np.ndarray):
			return o.tolist()
		if isinstance(o, Path):
			return str(o)
		return super().default(o)


def dumps(obj, indent=2):
	"""Deterministic JSON text; keys keep insertion order."""
	return json.dumps(obj, indent=indent, cls=LabJSONEncoder, ensure_ascii=False)


def write_json(path, obj):
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(dumps(obj) + "\n", encoding="utf-8")
	return path


def write_csv(path, header, rows):
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", newline="", encoding="utf-8") as handle:
		writer = csv.writer(handle, lineterminator="\n")
		writer.writerow(header)
		for row in rows:
			writer.writerow([value if isinstance(value, str) else format_number(value) for value in row])
	return path


def csv_text(header, rows):
	lines = [",".join(header)]
	for row in rows:
		lines.append(",".join(value if isinstance(value, str) else format_number(value) for value in row))
	return "\n".join(lines) + "\n"


def sha256_file(path):
	digest = hashlib.sha256()
	with Path(path).open("rb") as handle:
		for chunk in iter(lambda: handle.read(65536), b""):
			digest.update(chunk)
	return digest.hexdigest()
