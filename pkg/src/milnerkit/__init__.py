"""Star expressions as processes: 1-charts, LLEE-witnesses, Milner's system and its coinductive variants."""
from .bisim import bisimilar, check_projection_bisimulation, find_one_bisimulation
from .charts import (LabeledChart, OneChart, chart_interpretation, export_dot,
                     one_chart_interpretation, partial_derivatives)
from .coind import CoinductiveProof, check_coindproof
from .errors import MilnerkitError
from .extraction import certify_extraction, equate_solutions, extract, simplify
from .kernel import (ACI, CC, CLC, CMIL, CMIL1, MIL, MIL_MINUS, MIL_PRIME, PRESETS, check_proof,
                     interderive_fixed_point_rules, system)
from .lee import infer_witness, loop_subchart_at, validate_witness
from .solutions import CertifiedSolution, projection_solution, rsp_solution
from .syntax import Expr, FormalEquation, parse_equation, parse_expr, render_expr
from .transform import (cmil_to_clc, cmil_to_mil, coindproof_to_mil, complete_cc_proof,
                        mil_to_cmil1, rsp_to_coindproof)

__version__ = "0.1.0"
