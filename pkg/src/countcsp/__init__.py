"""countcsp: exact solution counting for constraint languages preserved by
a Mal'tsev operation, plus the decision procedure that tells tractable
languages apart from #P-complete ones."""

from .counting import (
    CountStep,
    NotBalancedError,
    PrefixCounts,
    balance_matrix,
    congruences,
    count,
    count_frame,
)
from .dichotomy import (
    BudgetExhausted,
    DichotomyVerdict,
    PatternTriple,
    Refutation,
    SearchBudget,
    decide_strong_balance,
    find_automorphism,
    patterns,
    refute_balance,
    verdict_to_text,
)
from .frames import (
    Frame,
    Instance,
    SectionCache,
    add_constraint,
    add_constraint_split,
    build_frame,
    closure_project,
    collapse_scope,
    dump,
    empty_frame,
    fix_prefix,
    frame_from_rows,
    initial_frame,
    member,
    shrink_to_small,
    span,
)
from .maltsev import (
    MaltsevOp,
    RectangularityViolation,
    apply,
    enumerate_maltsev,
    find_maltsev,
    find_maltsev_with_certificate,
    free_entries,
    preserves,
)
from .oracle import (
    CapExceededError,
    enumerate_solutions,
    oracle_balance,
    oracle_congruence,
    oracle_congruence_pair,
    oracle_count,
    pair_matrix,
)
from .relations import (
    BlockDecomposition,
    CongruencePair,
    CountMatrix,
    Partition,
    ReconstructionError,
    Relation,
    RelationalStructure,
    PowerStructure,
    block_decompose,
    is_rank_one_block,
    is_rectangular,
    partition_from_groups,
    power_structure,
    project,
    rank_one_identity_holds,
    reconstruct_rank_one,
    support_blocks,
    support_is_rectangular,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
