from menger.cli import LabCommand, record_run
from menger.curve import write_curve_file
from menger.exceptions import StagnationError, TopologyError
from menger.flow import find_critical_point
from menger.utils import write_csv
from menger.variation import MultiplierTable


class Command(LabCommand):
	help = "Run the length-constrained descent flow and write the final curve, history and manifest."

	def add_lab_arguments(self, parser):
		parser.add_argument("--init", required=True, help="initial curve file")
		parser.add_argument("--p", type=float)
		parser.add_argument("--q", type=float)
		parser.add_argument("--iters", type=int, help="maximum number of accepted steps")
		parser.add_argument("--step", type=float, help="initial step size")
		parser.add_argument("--residual-tol", dest="residual_tol", type=float)
		parser.add_argument("--precondition-order", dest="precondition_order", type=float)
		parser.add_argument("--project-every", dest="project_every", type=int)
		parser.add_argument("--base-cells", dest="base_cells", type=int, help="cells of the fixed flow mesh")
		parser.add_argument("--table", help="multiplier table CSV for main-term logging")
		parser.add_argument("--out-dir", dest="out_dir", help="directory for the run outputs")

	def config_overrides(self, options):
		return {
			"energy": {"p": options.get("p"), "q": options.get("q")},
			"flow_quadrature": {"base_cells": options.get("base_cells")},
			"flow": {
				"max_iters": options.get("iters"),
				"step": options.get("step"),
				"residual_tol": options.get("residual_tol"),
				"precondition_order": options.get("precondition_order"),
				"project_every": options.get("project_every"),
			},
		}

	def _write(self, state, options, status):
		directory = self.output_dir(options)
		curve_path = write_curve_file(
			state.curve, directory / "final_curve.json",
			energy=state.energy, residual=state.residual, lam=state.lam, iterations=state.iter, status=status,
		)
		history_path = write_csv(directory / "history.csv", ["iter", "energy", "residual", "lambda"], state.history_rows())
		manifest = record_run(
			"flow", self.argv(options), self.config.as_dict(), [curve_path, history_path],
			inputs=[options["init"]], directory=directory,
		)
		return curve_path, history_path, manifest

	def handle(self, *args, **options):
		config = self.load(options)
		init = self.read_curve(options["init"])
		table = MultiplierTable.read_csv(options["table"], config.energy.p) if options["table"] else None
		try:
			state = find_critical_point(init, config.flow, config.flow_energy, table=table)
		except (StagnationError, TopologyError) as exc:
			if exc.state is not None:
				self._write(exc.state, options, type(exc).__name__)
			raise
		status = "converged" if state.converged else "max_iters"
		curve_path, history_path, manifest = self._write(state, options, status)
		self.emit({
			"status": status,
			"iterations": state.iter,
			"energy": state.energy,
			"residual": state.residual,
			"lambda": state.lam,
			"finalCurve": str(curve_path),
			"history": str(history_path),
			"manifest": str(manifest),
		})
