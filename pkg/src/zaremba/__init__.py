"""Desk-scale toolkit for continued fractions with bounded partial quotients.

Modules:
    cf          exact continuants, matrices, and generator algebra
    census      enumeration of denominators up to N with multiplicities
    dimension   pressure brackets of the Hausdorff dimension
    modular     residue closures and admissibility
    freq        Dirichlet decomposition, cells, exponential sums
    congruence  pair-congruence counts two ways
    ensemble    independent-factor word ensembles
    cli         command-line front end
"""

__version__ = "0.1.0"

from .cf import (Alphabet, Mat2, Word, cf_value, continuant, continuant_pair,
                 korobov_delta, korobov_delta_numeric, pair_generator,
                 word_to_matrix)
from .census import (CensusConfig, CensusResult, ExponentFit, Histogram,
                     enumerate_denominators, export_histogram_csv, load_census,
                     multiplicity_exponent, proportion, save_census)
from .congruence import VectorSet, rq_charsum, rq_direct
from .dimension import (PressureBracket, convergence_table, dimension_bracket,
                        estimate_dimension, partition_sum, write_convergence_csv)
from .ensemble import (EnsembleParams, FactoredEnsemble, SplitReport,
                       build_fixed_length_ensemble, ensemble_report,
                       factor_cardinality_check, find_collision, split_by_norm,
                       verify_independence, verify_norm_windows)
from .errors import (CensusFileError, CensusFormatError, CensusTruncatedError,
                     CensusVersionError, ContinuantOverflowError, DomainError,
                     InternalConsistencyError, ResourceLimitError, ZarembaError)
from .freq import (CellIndex, CellRow, DirichletData, ScaleSequence,
                   bound_diagnostic, cell_of, cell_report, dirichlet_decompose,
                   reconstruct, sigma_nz, write_cell_csv)
from .modular import (ResidueClosure, first_obstruction, is_admissible,
                      residue_profile, residues_mod_q, semigroup_closure_mod_q,
                      write_admissibility_csv, write_residue_profile_csv)
