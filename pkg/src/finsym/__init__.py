"""Many-sorted finite model finding with sound static symmetry breaking.

The library covers the full pipeline: a data model and evaluator for
many-sorted first-order logic over finite domains (:mod:`finsym.logic`),
a text format (:mod:`finsym.problem_io`), a brute-force enumeration and
symmetry oracle (:mod:`finsym.oracle`), most-general sort inference
(:mod:`finsym.sort_inference`), six symmetry-breaking constraint schemes
with sound combination (:mod:`finsym.symbreak`), and CSP embeddings with
microstructure-based symmetry checks (:mod:`finsym.csp`).
"""

from .logic import (And, Apply, DomainAssignment, DomainElement, Eq, Exists,
                    Forall, Formula, FuncDecl, Iff, Implies, Interpretation,
                    LogicError, Not, Or, PredApp, PredDecl, Problem,
                    Signature, SortError, Term, Var, and_all,
                    check_well_sorted, collect_occurring_values,
                    domain_elements_in, evaluate, format_formula, format_term,
                    ground_problem, or_all, satisfies)
from .oracle import (CapExceeded, DEFAULT_CAP, DomainPermutation,
                     OrbitPartition, all_domain_permutations, all_models,
                     apply_to_formulas, apply_to_interpretation,
                     check_symmetry_breaking_completeness, domain_symmetries,
                     domain_symmetry_group_size, enumerate_interpretations,
                     interchangeable_set_oracle, is_constraint_domain_symmetry,
                     is_domain_symmetry, is_satisfiable, orbit_partition,
                     orbits_of, space_size, transposition_generators)
from .problem_io import (ParseError, parse_interpretation, parse_problem,
                         print_interpretation, print_problem)
from .sort_inference import (GeneralizationWitness, SortSubstitution,
                             apply_substitution, infer_sorts, verify_witness)
from .symbreak import (BinaryPredicateRequest, ConstantsRequest,
                       DrdRangeRequest, InterchangeabilityLedger,
                       SchemeApplication, SchemeError, UnaryPredicateRequest,
                       UnaryRangeRequest, binary_predicate_scheme, combine,
                       constants_scheme, default_plan, drd_range_scheme,
                       initial_ledger, unary_predicate_scheme,
                       unary_range_scheme)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
