import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hashecon.errors import DomainError
from hashecon.stats import (
    ContingencyTable,
    SmallExpectedCountWarning,
    chi2_gof,
    chi2_independence,
    chi2_sf,
    dunn_pairwise,
    kruskal_wallis,
    normal_sf,
)

# Reference values computed once with 40-digit mpmath (regularized upper
# incomplete gamma); frozen here so the suite needs no scipy/mpmath.
CHI2_SF_REFS = [
    (0.25, 3, 0.96914040421627327),
    (8.36, 6, 0.21289709100006564),
    (3.41, 3, 0.33262377460701543),
    (12.53, 6, 0.051137287764988552),
    (7.38533, 2, 0.024905540256498582),
    (8.4226, 2, 0.014827080598994091),
    (8.7088, 3, 0.033423877874215361),
    (32.53, 6, 1.2910942735326418e-5),
    (20.25, 2, 4.0065297392951068e-5),
    (6.07, 2, 0.048074662875595177),
    (20.0, 3, 0.00016974243555282643),
    (7.2, 2, 0.027323722447292558),
    (0.00165, 1, 0.96759868653398933),
    (0.5, 1, 0.47950012218695346),
    (1.0, 1, 0.3173105078629141),
    (2.5, 2, 0.2865047968601901),
    (5.0, 4, 0.28729749518364578),
    (10.0, 5, 0.075235246146512179),
    (15.5, 10, 0.11486811277078364),
    (30.0, 20, 0.069853660699409768),
    (75.0, 50, 0.012596739762499419),
    (120.0, 100, 0.08440668109369183),
    (1e-08, 2, 0.99999999500000001),
    (55.0, 3, 6.86616972898766e-12),
]

NORMAL_SF_REFS = [
    (0.0, 0.5),
    (0.5, 0.3085375387259869),
    (1.0, 0.15865525393145705),
    (1.959964, 0.024999999096442402),
    (2.13, 0.016585806683605017),
    (3.0, 0.0013498980316300945),
    (5.0, 2.8665157187919391e-7),
    (8.0, 6.2209605742717841e-16),
    (-1.5, 0.93319279873114193),
    (-8.0, 0.99999999999999938),
]


class TestChi2Sf:
    @pytest.mark.parametrize("x,df,ref", CHI2_SF_REFS)
    def test_against_high_precision_reference(self, x, df, ref):
        assert chi2_sf(x, df) == pytest.approx(ref, rel=1e-10)

    def test_zero_statistic_is_one(self):
        for df in (1, 2, 3, 10, 100):
            assert chi2_sf(0.0, df) == 1.0

    def test_reported_value_vectors(self):
        # vectors quoted to three decimals in the source material
        assert chi2_sf(0.25, 3) == pytest.approx(0.969, abs=1e-3)
        assert chi2_sf(8.36, 6) == pytest.approx(0.213, abs=1e-3)
        assert chi2_sf(3.41, 3) == pytest.approx(0.332, abs=2e-3)

    def test_negative_inputs_rejected(self):
        with pytest.raises(DomainError):
            chi2_sf(-1.0, 2)
        with pytest.raises(DomainError):
            chi2_sf(1.0, 0)

    @given(st.floats(min_value=0.0, max_value=1e4),
           st.integers(min_value=1, max_value=100))
    def test_p_in_unit_interval(self, x, df):
        p = chi2_sf(x, df)
        assert 0.0 <= p <= 1.0

    @given(st.integers(min_value=1, max_value=50),
           st.floats(min_value=0.01, max_value=200.0),
           st.floats(min_value=0.01, max_value=10.0))
    def test_strictly_decreasing_in_x(self, df, x, dx):
        lo, hi = chi2_sf(x + dx, df), chi2_sf(x, df)
        if 1e-300 < hi < 1.0 and lo < 1.0:
            # strict inside the representable range; the function
            # saturates at exactly 1.0 / 0.0 in float at the far tails
            assert lo < hi
        else:
            assert lo <= hi


class TestNormalSf:
    @pytest.mark.parametrize("z,ref", NORMAL_SF_REFS)
    def test_against_reference(self, z, ref):
        assert abs(normal_sf(z) - ref) < 1e-12

    def test_symmetry(self):
        for z in (0.3, 1.7, 4.2):
            assert normal_sf(z) + normal_sf(-z) == pytest.approx(1.0, abs=1e-15)


class TestChi2Gof:
    def test_hand_computed_uniform_vector(self):
        # observed [10,20,30,40] vs uniform 25: sum((o-25)^2/25) = 20
        res = chi2_gof([10, 20, 30, 40], "uniform")
        assert res.statistic == pytest.approx(20.0, abs=1e-12)
        assert res.df == 3
        assert res.p_value == pytest.approx(0.00016974243555282643, rel=1e-10)

    def test_exact_match_gives_p_one(self):
        res = chi2_gof([5, 5, 5, 5], [5, 5, 5, 5])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_reported_combination_statistic(self):
        # statistic 0.25 on df=3 maps to p = .969
        assert chi2_sf(0.25, 3) == pytest.approx(0.969, abs=1e-3)

    def test_zero_expected_rejected(self):
        with pytest.raises(DomainError):
            chi2_gof([1, 2], [0.0, 3.0])

    def test_small_expected_warns_but_runs(self):
        with pytest.warns(SmallExpectedCountWarning):
            res = chi2_gof([3, 4], "uniform")
        assert 0.0 <= res.p_value <= 1.0


class TestChi2Independence:
    def test_age_by_strength_table(self):
        table = ContingencyTable.from_rows([[38, 23, 14], [25, 33, 28]])
        res = chi2_independence(table)
        assert res.statistic == pytest.approx(8.42, abs=0.02)
        assert res.df == 2
        assert res.p_value == pytest.approx(0.015, abs=0.002)

    def test_star_band_by_strength_table(self):
        table = ContingencyTable.from_rows([[13, 12, 28, 22], [25, 22, 17, 22]])
        res = chi2_independence(table)
        assert res.statistic == pytest.approx(8.71, abs=0.02)
        assert res.df == 3
        assert res.p_value == pytest.approx(0.033, abs=0.002)

    def test_software_type_table_recomputed_p(self):
        # reported p=.007 for chi2(2)=7.38 is not consistent with the
        # survival function; the recomputed value is ~.025
        table = ContingencyTable.from_rows([[4, 6, 65], [11, 16, 59]])
        res = chi2_independence(table)
        assert res.statistic == pytest.approx(7.38, abs=0.02)
        assert res.p_value == pytest.approx(0.0249, abs=0.002)

    @pytest.mark.filterwarnings("ignore::hashecon.stats.SmallExpectedCountWarning")
    def test_sensitive_vs_general_applications(self):
        table = ContingencyTable.from_rows([[4, 6], [11, 16]])
        res = chi2_independence(table)
        assert res.statistic < 0.01
        assert res.p_value == pytest.approx(0.967, abs=0.002)

    def test_proportional_table_is_independent(self):
        table = ContingencyTable.from_rows([[10, 20], [20, 40]])
        res = chi2_independence(table)
        assert res.statistic == pytest.approx(0.0, abs=1e-12)
        assert res.p_value == 1.0

    def test_zero_marginal_rejected(self):
        with pytest.raises(DomainError):
            chi2_independence(ContingencyTable.from_rows([[0, 0], [3, 4]]))

    def test_permutation_invariance(self):
        rows = [[38, 23, 14], [25, 33, 28]]
        base = chi2_independence(ContingencyTable.from_rows(rows))
        flipped_rows = chi2_independence(ContingencyTable.from_rows(rows[::-1]))
        permuted_cols = chi2_independence(
            ContingencyTable.from_rows([[r[2], r[0], r[1]] for r in rows]))
        assert flipped_rows.statistic == pytest.approx(base.statistic, rel=1e-12)
        assert permuted_cols.statistic == pytest.approx(base.statistic, rel=1e-12)


class TestKruskalWallis:
    def test_no_tie_groups_against_rank_oracle(self):
        groups = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
        # ranks are 1..9; rank sums 6, 15, 24
        n = 9
        h_oracle = 12 / (n * (n + 1)) * (36 / 3 + 225 / 3 + 576 / 3) - 3 * (n + 1)
        res = kruskal_wallis(groups)
        assert res.statistic == pytest.approx(h_oracle, rel=1e-12)
        assert res.statistic == pytest.approx(7.2, abs=1e-9)
        assert res.df == 2
        assert res.p_value == pytest.approx(0.027323722447292558, rel=1e-10)

    def test_identical_groups(self):
        res = kruskal_wallis([[5, 5, 5], [5, 5, 5]])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_tie_correction_matches_direct_formula(self):
        groups = [[1, 2, 2, 3], [2, 4, 5, 5]]
        pooled = sorted(v for g in groups for v in g)
        # direct average-rank computation
        ranks = {}
        for v in set(pooled):
            idx = [i + 1 for i, x in enumerate(pooled) if x == v]
            ranks[v] = sum(idx) / len(idx)
        rsums = [sum(ranks[v] for v in g) for g in groups]
        n = len(pooled)
        h = 12 / (n * (n + 1)) * sum(r * r / 4 for r in rsums) - 3 * (n + 1)
        ties = sum(t ** 3 - t for t in
                   [pooled.count(v) for v in set(pooled)])
        h /= 1 - ties / (n ** 3 - n)
        res = kruskal_wallis(groups)
        assert res.statistic == pytest.approx(h, rel=1e-12)

    @given(st.lists(st.lists(st.integers(min_value=0, max_value=50),
                             min_size=2, max_size=8),
                    min_size=2, max_size=4))
    @settings(max_examples=60)
    def test_invariant_under_monotone_transform(self, groups):
        res_raw = kruskal_wallis(groups)
        res_cubed = kruskal_wallis([[x ** 3 + 2 * x for x in g] for g in groups])
        assert res_cubed.statistic == pytest.approx(res_raw.statistic, abs=1e-9)

    def test_too_few_groups_rejected(self):
        with pytest.raises(DomainError):
            kruskal_wallis([[1, 2, 3]])
        with pytest.raises(DomainError):
            kruskal_wallis([[1], []])


class TestDunn:
    def test_z_to_two_sided_p(self):
        # a |z| of 2.13 corresponds to an unadjusted two-sided p of .0332
        assert 2 * normal_sf(2.13) == pytest.approx(0.0332, abs=1e-3)

    def test_identical_groups_z_zero(self):
        res = dunn_pairwise([[3, 3, 3], [3, 3, 3]], (0, 1))
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_bonferroni_triples_three_group_p(self):
        groups = [[1, 2, 3], [4, 5, 6], [2, 3, 4]]
        raw = dunn_pairwise(groups, (0, 1), "none")
        adj = dunn_pairwise(groups, (0, 1), "bonferroni")
        assert adj.p_value == pytest.approx(min(1.0, raw.p_value * 3), rel=1e-12)

    def test_holm_never_below_raw(self):
        groups = [[1, 2, 3], [7, 8, 9], [4, 5, 6]]
        for pair in [(0, 1), (0, 2), (1, 2)]:
            raw = dunn_pairwise(groups, pair, "none")
            holm = dunn_pairwise(groups, pair, "holm")
            bonf = dunn_pairwise(groups, pair, "bonferroni")
            assert raw.p_value <= holm.p_value <= bonf.p_value + 1e-12

    def test_two_group_dunn_equals_normal_rank_test(self):
        groups = [[3, 1, 4, 1, 5], [9, 2, 6, 5, 3.5]]
        res = dunn_pairwise(groups, (0, 1))
        # independent recomputation from pooled mid-ranks
        pooled = sorted(v for g in groups for v in g)
        rank = {}
        for v in set(pooled):
            idx = [i + 1 for i, x in enumerate(pooled) if x == v]
            rank[v] = sum(idx) / len(idx)
        n = len(pooled)
        ties = sum(t ** 3 - t for t in [pooled.count(v) for v in set(pooled)])
        var = (n * (n + 1) / 12 - ties / (12 * (n - 1))) * (1 / 5 + 1 / 5)
        mean0 = sum(rank[v] for v in groups[0]) / 5
        mean1 = sum(rank[v] for v in groups[1]) / 5
        z = (mean0 - mean1) / math.sqrt(var)
        assert res.statistic == pytest.approx(z, rel=1e-12)
        assert res.p_value == pytest.approx(2 * normal_sf(abs(z)), rel=1e-12)

    def test_invalid_pair_rejected(self):
        with pytest.raises(DomainError):
            dunn_pairwise([[1, 2], [3, 4]], (0, 2))
        with pytest.raises(DomainError):
            dunn_pairwise([[1, 2], [3, 4]], (1, 1))
