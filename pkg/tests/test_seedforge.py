import math
from fractions import Fraction

import pytest

from cremerlab.errors import BadInput, DepthInfeasible
from cremerlab.numerics import BigCount
from cremerlab.rotations import RotationNumber, cremer_witness
from cremerlab.seedforge import (
    ForgePolicy, certify, certify_inverse, forge, load_seed, minimal_escape_multiplier, save_seed, seed_from_json,
    seed_to_json, tamper,
)
from cremerlab.seedforge.certify import chord_ball

# mpmath at 4000 bits from the expansion [0; 2, 50, a3, ...], computed independently of the forge
M_FORGED = [2, 101, int(
    "259596071895391079643592683241628624613972586208866240543580244103078823947304990189561"
    "873034733301436945352203548321906733")]
K2_FORGED = int(
    "4326601198256517994059878054027143743566209770147770675726337401717980399121749836492697"
    "8839122216906157558700591386984456")
M1_VALUE = 4.00964357743205417700387094213
DELTA_2 = 3.85213841141235773506346710944e-123


def test_forged_levels_match_oracle(forged):
    theta, seqs = forged
    assert seqs.m == M_FORGED
    assert seqs.k[0].value == 17 and seqs.k[1].value == K2_FORGED
    assert seqs.r[:2] == [7, 407]
    assert theta.quotient(1) == 2 and theta.quotient(2) == 50


def test_forged_magnitudes(forged):
    _, seqs = forged
    l1, l2 = seqs.levels[:2]
    assert float(l1.M.lower()) <= M1_VALUE <= float(l1.M.upper()) * (1 + 1e-15)
    assert l1.delta.contains(Fraction(1, 101)) or abs(float(l1.delta.mid) - 1 / 101) < 1e-30
    assert float(l2.delta.mid) == pytest.approx(DELTA_2, rel=1e-12)
    assert float(l2.M.lower()) >= 16.0 - 1e-12


def test_r_is_ceil_log2_k_plus_two(forged):
    _, seqs = forged
    for lv in seqs.levels[:2]:
        k = lv.k.value
        assert 2 ** (lv.r - 3) < k <= 2 ** (lv.r - 2)


def test_small_divisor_decay_per_level(forged):
    theta, seqs = forged
    for lv in seqs.levels[:2]:
        # delta_j <= (4 j^2)^-m / pi
        lhs = lv.log2_delta.log2_hi
        rhs = -lv.m * Fraction((4 * lv.j * lv.j).bit_length() - 1)  # log2 of a lower power of two
        assert lhs <= rhs


def test_certify_all_pass(forged):
    theta, seqs = forged
    fwd = certify(theta, seqs)
    inv = certify_inverse(theta, seqs)
    assert fwd.all_pass and inv.all_pass
    assert len(fwd.verdicts) == 5 * len(seqs)
    # conjugate angle: same chords
    for j in (1, 2):
        assert chord_ball(fwd, j).overlaps(chord_ball(inv, j))


def test_certify_json_shape(forged):
    d = certify(*forged).to_json()
    assert d["direction"] == "forward" and d["all_pass"]
    assert {v["condition"] for v in d["verdicts"]} == {"C1", "C2", "C3", "C4", "C5"}


def test_depth_zero_is_golden_and_empty():
    theta, seqs = forge(ForgePolicy(target_depth=0, materialize_depth=0))
    assert len(seqs) == 0 and theta.quotient(1) == 1
    with pytest.raises(ValueError):
        certify(theta, seqs)


def test_depth_one():
    theta, seqs = forge(ForgePolicy(target_depth=1, materialize_depth=1))
    assert seqs.m == [2]
    assert certify(theta, seqs).all_pass


def test_materializing_level_three_is_infeasible():
    with pytest.raises(DepthInfeasible):
        forge(ForgePolicy(target_depth=3, materialize_depth=3))


def test_policy_validation():
    with pytest.raises(BadInput):
        ForgePolicy(first_quotient=1)
    with pytest.raises(BadInput):
        ForgePolicy(target_depth=2, materialize_depth=3)
    with pytest.raises(BadInput):
        ForgePolicy(c4_threshold=Fraction(1, 5))


def test_tamper_r_fails_c5(forged):
    theta, seqs = forged
    bad = tamper(seqs, 1, r=seqs.levels[0].r - 3)
    rep = certify(theta, bad)
    assert rep.get(1, "C5").status == "FAIL"
    assert [v for v in rep.failures()] == [rep.get(1, "C5")]


def test_tamper_m_fails_c3(forged):
    theta, seqs = forged
    bad = tamper(seqs, 2, m=seqs.levels[0].m)
    rep = certify(theta, bad)
    assert rep.get(2, "C3").status == "FAIL"
    assert not rep.all_pass


def test_tamper_leaves_original(forged):
    theta, seqs = forged
    tamper(seqs, 1, r=0)
    assert seqs.levels[0].r == 7


def test_inverse_failure_pattern_matches_forward(forged):
    theta, seqs = forged
    bad = tamper(seqs, 1, r=2)
    assert certify(theta, bad).pattern() == [
        (j, c, s) for j, c, s in certify_inverse(theta, bad).pattern()]


def test_golden_with_fabricated_levels_fails_c1_both_ways():
    golden = RotationNumber.golden()
    _, seqs = forge(ForgePolicy(target_depth=2, materialize_depth=2))
    fwd, inv = certify(golden, seqs), certify_inverse(golden, seqs)
    assert fwd.get(1, "C1").status != "PASS"
    assert fwd.pattern() == inv.pattern()


def test_forge_deterministic():
    a = seed_to_json(*forge())
    b = seed_to_json(*forge())
    assert a == b


def test_seed_round_trip(tmp_path, forged):
    theta, seqs = forged
    p = tmp_path / "s.json"
    text = save_seed(str(p), theta, seqs, ForgePolicy())
    t2, s2, pol = load_seed(str(p))
    assert pol == ForgePolicy()
    assert s2.m == seqs.m and s2.r == seqs.r
    assert [k.to_json() for k in s2.k] == [k.to_json() for k in seqs.k]
    assert save_seed(str(tmp_path / "again.json"), t2, s2, pol) == text
    assert certify(t2, s2).all_pass
    t3, s3, _ = load_seed(str(p), refresh=True)
    assert s3.levels[1].delta.overlaps(seqs.levels[1].delta)


def test_seed_from_json_rejects_garbage(forged):
    with pytest.raises(BadInput):
        seed_from_json({"format": "nope"})
    d = seed_to_json(*forged)
    d["version"] = 99
    with pytest.raises(BadInput):
        seed_from_json(d)


def test_lazy_level_three(forged):
    theta, seqs = forged
    k3 = seqs.levels[2].k
    assert not k3.materialized and seqs.levels[2].lazy
    # k_3 ~ m_3 2^E / 6, so log2 k_3 exceeds log2 m_3 by roughly E
    assert k3.log.log2_lo > seqs.levels[2].m.bit_length()
    assert seqs.levels[2].r >= k3.log.log2_lo


def test_lazy_and_materialized_k_agree_in_log_bounds(forged):
    theta, seqs = forged
    want = math.log2(K2_FORGED)
    b = BigCount(K2_FORGED).log
    assert float(b.log2_lo) <= want <= float(b.log2_hi)
    assert seqs.levels[1].k.log.log2_lo == b.log2_lo


def test_minimal_escape_multiplier_rational_example():
    theta = RotationNumber.from_fraction(Fraction(1, 100))
    assert minimal_escape_multiplier(theta, 1).value == 17


def test_minimal_escape_multiplier_is_minimal(forged):
    theta, _ = forged
    k = minimal_escape_multiplier(theta, 2).value
    # ||2 theta|| = 1/101, so k = ceil(101/6)
    assert k == 17 and Fraction(16, 101) < Fraction(1, 6) <= Fraction(17, 101)


def test_cremer_witness_at_forged_levels(forged):
    theta, seqs = forged
    assert cremer_witness(theta, 2).value.upper() <= Fraction(1, 4)
    assert cremer_witness(theta, seqs.m[1], prec=256).value.upper() <= Fraction(1, 16)
