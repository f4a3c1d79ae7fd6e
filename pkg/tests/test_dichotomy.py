import pytest

from countcsp import (
    BudgetExhausted,
    Instance,
    SearchBudget,
    decide_strong_balance,
    find_automorphism,
    patterns,
    refute_balance,
    verdict_to_text,
)
from countcsp.dichotomy import (
    VERDICT_BALANCED,
    VERDICT_NOT_BALANCED,
    VERDICT_NOT_STRONGLY_RECTANGULAR,
    VERDICT_TIMEOUT,
)
from countcsp.fixtures import (
    constants_structure,
    disequality_structure,
    even_parity4_structure,
    or_structure,
    rank_defect_structure,
    xor3_structure,
)

import helpers


def test_patterns():
    p = patterns(2, 0, 1, 0, 1)
    assert p.fixed_digits == (0, 0, 0, 1, 1, 1)
    assert p.source_digits == (0, 0, 1, 1, 1, 0)
    assert p.target_digits == (1, 1, 0, 0, 0, 1)
    assert (p.fixed, p.source, p.target) == (7, 14, 49)
    assert p.quadruple == (0, 1, 0, 1)
    with pytest.raises(ValueError):
        patterns(2, 0, 1, 0, 2)


def test_find_automorphism_swap():
    # the parity relation with an even number of ones survives the 0/1 swap
    st = even_parity4_structure()
    image = find_automorphism(st, 1, {0: 1})
    assert image == (1, 0)
    assert helpers.is_power_automorphism(st, 1, image)
    # an odd-parity relation does not
    assert find_automorphism(xor3_structure(), 1, {0: 1}) is None
    # constants pin each element in place
    assert find_automorphism(constants_structure(), 1, {0: 1}) is None


def test_find_automorphism_unconstrained():
    st = xor3_structure()
    image = find_automorphism(st, 2)
    assert image is not None
    assert sorted(image) == [0, 1, 2, 3]
    assert helpers.is_power_automorphism(st, 2, image)


def test_find_automorphism_argument_checks():
    st = xor3_structure()
    assert find_automorphism(st, 1, {0: 0, 1: 0}) is None
    with pytest.raises(ValueError):
        find_automorphism(st, 1, {0: 5})
    with pytest.raises(ValueError):
        find_automorphism(st, 0)


def test_search_budget():
    b = SearchBudget(3)
    b.spend()
    b.spend()
    b.spend()
    with pytest.raises(BudgetExhausted):
        b.spend()
    assert b.used == 4
    with pytest.raises(BudgetExhausted):
        find_automorphism(xor3_structure(), 6, max_nodes=1)


def test_refute_balance_rank_defect():
    ref = refute_balance(rank_defect_structure())
    assert ref is not None
    assert ref.formula == "R(x1,x2,x3)"
    assert ref.instance == Instance(3, (("R", (0, 1, 2)),))
    assert ref.variables == (0, 1)
    assert ref.matrix.to_lists() == [[2, 1], [1, 1]]


def test_refute_balance_finds_nothing_on_balanced_languages():
    assert refute_balance(xor3_structure()) is None
    assert refute_balance(constants_structure()) is None


def test_decide_xor3_balanced():
    v = decide_strong_balance(xor3_structure())
    assert v.kind == VERDICT_BALANCED
    assert v.tractable
    assert v.maltsev is not None
    # q = 2: two choices each for a, b and the two ordered pairs c != d
    assert v.quadruples_checked == 8


def test_decide_constants_balanced():
    v = decide_strong_balance(constants_structure())
    assert v.kind == VERDICT_BALANCED
    assert v.tractable


def test_decide_not_strongly_rectangular():
    for st in (or_structure(), disequality_structure()):
        v = decide_strong_balance(st)
        assert v.kind == VERDICT_NOT_STRONGLY_RECTANGULAR
        assert not v.tractable
        assert v.maltsev is None
        assert v.rectangularity_witness is not None


def test_decide_rank_defect_not_balanced():
    v = decide_strong_balance(rank_defect_structure())
    assert v.kind == VERDICT_NOT_BALANCED
    assert not v.tractable
    assert v.maltsev is not None
    assert v.refutation is not None
    assert v.refutation.variables == (0, 1)


def test_decide_timeout():
    v = decide_strong_balance(xor3_structure(), max_nodes=1)
    assert v.kind == VERDICT_TIMEOUT
    assert v.quadruple == (0, 0, 0, 1)
    assert v.quadruples_checked == 1


def test_verdict_text_balanced():
    text = verdict_to_text(decide_strong_balance(xor3_structure()))
    lines = text.splitlines()
    assert lines[0] == "verdict=BALANCED"
    assert "maltsev=" in lines
    table = lines[lines.index("maltsev=") + 1:]
    assert len(table) == 8
    assert table[0] == "0 0 0 -> 0"
    assert table[-1] == "1 1 1 -> 1"


def test_verdict_text_witnesses():
    text = verdict_to_text(decide_strong_balance(rank_defect_structure()))
    assert text.splitlines()[0] == "verdict=NOT_BALANCED"
    assert "witness=formula R(x1,x2,x3) variables x1,x2 matrix [2,1;1,1]" in text
    text = verdict_to_text(decide_strong_balance(or_structure()))
    lines = text.splitlines()
    assert lines[0] == "verdict=NOT_STRONGLY_RECTANGULAR"
    assert lines[1].startswith("witness=relation OR triple ")
    text = verdict_to_text(decide_strong_balance(xor3_structure(), max_nodes=1))
    assert "witness=quadruple a=0 b=0 c=0 d=1" in text
