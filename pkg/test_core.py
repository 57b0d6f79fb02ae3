"""Tests for the core domain types, expectations, validation and file I/O."""

import itertools
import json
from pathlib import Path

import numpy as np
import pytest

from sas_mdp.core import (
    BaseMdp,
    DecisionListPolicy,
    ExplicitAvailability,
    PdaAvailability,
    SamplerAvailability,
    actions_of,
    argmax_available,
    dl_backup_ads,
    dl_backup_explicit,
    dl_backup_pda,
    dl_position_weights,
    dl_transition_matrix,
    dl_weight_matrix,
    expected_max_q,
    full_availability,
    greedy_dl,
    load_instance,
    mask_of,
    parse_instance,
    save_instance,
    serialize_instance,
    subset_probability,
    validate,
    value_bound,
)
from sas_mdp.core.availability import available_indices
from sas_mdp.core.backups import sampled_dl_weights
from sas_mdp.core.instances import (
    DOWN,
    GO,
    S1,
    S2,
    STAY,
    UP,
    bundled_instance_names,
    load_bundled_instance,
    random_instance,
)
from sas_mdp.core.validation import collect_issues
from sas_mdp.utils.errors import (
    BadSampleCountError,
    EmptySetError,
    InstanceFormatError,
    InstanceValidationError,
    UnsupportedModelError,
)

DATA_DIR = Path(__file__).parent / "src" / "sas_mdp" / "data"


def brute_force_backup(mdp, avail, policy, values):
    """Σ_A P_s(A) Q(s, first action of μ(s) in A), enumerating every subset."""
    q = mdp.q_values(values)
    out = np.zeros(mdp.n_states)
    for s in range(mdp.n_states):
        for mask in range(1, 2 ** mdp.n_actions):
            prob = avail.subset_probability(s, mask)
            if prob > 0:
                out[s] += prob * q[s, policy.first_available(s, mask)]
    return out


def brute_force_expected_max(mdp, avail, q):
    out = np.zeros(mdp.n_states)
    for s in range(mdp.n_states):
        for mask in range(1, 2 ** mdp.n_actions):
            prob = avail.subset_probability(s, mask)
            if prob > 0:
                out[s] += prob * max(q[s, k] for k in actions_of(mask, mdp.n_actions))
    return out


class TestBaseMdp:
    def test_value_bound(self, two_state):
        # max |r| = 1 at γ = 0.9
        assert value_bound(two_state.mdp) == pytest.approx(10.0)

    def test_value_bound_with_negative_rewards(self):
        mdp = BaseMdp(1, 2, np.ones((1, 2, 1)), np.array([[-3.0, 2.0]]), 0.5)
        assert value_bound(mdp) == pytest.approx(6.0)


class TestMasks:
    def test_mask_round_trip(self):
        assert mask_of([0, 2]) == 5
        assert actions_of(5, 3) == [0, 2]
        assert actions_of(0, 3) == []


class TestPdaAvailability:
    def test_subset_probability_two_state(self, two_state):
        avail = two_state.availability
        assert avail.subset_probability(S2, mask_of([UP, DOWN])) == pytest.approx(0.2)
        assert avail.subset_probability(S2, mask_of([DOWN])) == pytest.approx(0.8)
        assert avail.subset_probability(S2, mask_of([UP])) == 0.0
        assert avail.subset_probability(S1, mask_of([STAY, GO])) == 1.0

    def test_distribution_sums_to_one(self, small_pda_instances):
        for instance in small_pda_instances:
            avail = instance.availability
            for s in range(avail.n_states):
                table = avail.subset_distribution(s)
                assert sum(prob for _, prob in table) == pytest.approx(1.0, abs=1e-12)
                assert all(mask != 0 for mask, _ in table)

    def test_sample_frequencies_match_probabilities(self, two_state):
        avail = two_state.availability
        n = 100_000
        masks = avail.sample_many(S2, np.random.default_rng(3), n)
        assert np.all(masks != 0)
        freq = np.mean(masks == mask_of([UP, DOWN]))
        sigma = np.sqrt(0.2 * 0.8 / n)
        assert abs(freq - 0.2) <= 3 * sigma

    def test_single_sample_never_empty(self, two_state):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            assert two_state.availability.sample(S2, rng) in (mask_of([DOWN]), mask_of([UP, DOWN]))

    def test_single_sample_follows_the_bit_draws(self, small_pda_instances):
        for instance in small_pda_instances:
            avail = instance.availability
            first, second = np.random.default_rng(11), np.random.default_rng(11)
            for s in range(avail.n_states):
                for _ in range(20):
                    bits = second.random(avail.n_actions) < avail.rho[s]
                    assert avail.sample(s, first) == mask_of(np.flatnonzero(bits))

    def test_to_explicit_preserves_weights(self, small_pda_instances):
        for instance in small_pda_instances:
            pda = instance.availability
            explicit = pda.to_explicit()
            policy = DecisionListPolicy.identity(pda.n_states, pda.n_actions)
            np.testing.assert_allclose(
                dl_weight_matrix(pda, policy), dl_weight_matrix(explicit, policy), atol=1e-12
            )


class TestExplicitAvailability:
    def test_unlisted_subset_has_zero_probability(self):
        avail = ExplicitAvailability(tables=(((1, 0.5), (3, 0.5)),), actions=2)
        assert avail.subset_probability(0, 2) == 0.0
        assert avail.subset_probability(0, 3) == 0.5

    def test_sampling_only_returns_listed_subsets(self):
        avail = ExplicitAvailability(tables=(((1, 0.25), (6, 0.75)),), actions=3)
        masks = avail.sample_many(0, np.random.default_rng(1), 20_000)
        assert set(masks.tolist()) == {1, 6}
        assert np.mean(masks == 6) == pytest.approx(0.75, abs=0.02)


class TestSamplerAvailability:
    def test_same_seed_same_draws(self, two_state):
        sampler = SamplerAvailability.from_model(two_state.availability, seed=11)
        first = sampler.sample_many(S2, sampler.make_rng(), 50)
        second = sampler.sample_many(S2, sampler.make_rng(), 50)
        np.testing.assert_array_equal(first, second)
        assert not sampler.is_exact

    def test_subset_probability_unsupported(self, two_state):
        sampler = SamplerAvailability.from_model(two_state.availability)
        with pytest.raises(UnsupportedModelError):
            subset_probability(sampler, S2, 3)

    def test_empty_draw_rejected(self):
        sampler = SamplerAvailability(states=1, actions=2, draw=lambda s, rng: 0)
        with pytest.raises(EmptySetError):
            sampler.sample(0, np.random.default_rng(0))


class TestDecisionListPolicy:
    def test_greedy_dl_sorts_descending(self):
        policy = greedy_dl(np.array([[0.2, 0.9, 0.5]]))
        assert policy.as_lists() == [[1, 2, 0]]

    def test_greedy_dl_ties_by_index(self):
        policy = greedy_dl(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0]]))
        assert policy.as_lists() == [[0, 1, 2], [0, 1, 2]]

    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            DecisionListPolicy.from_lists([[0, 0]])

    def test_first_available(self):
        policy = DecisionListPolicy.from_lists([[2, 0, 1]])
        assert policy.first_available(0, mask_of([0, 1])) == 0
        assert policy.first_available(0, mask_of([1])) == 1
        assert policy.first_available(0, mask_of([0, 2])) == 2
        with pytest.raises(EmptySetError):
            policy.first_available(0, 0)

    def test_equality_and_labels(self, two_state):
        a = DecisionListPolicy.from_lists([[STAY, GO], [UP, DOWN]])
        b = DecisionListPolicy.from_lists([[0, 1], [0, 1]])
        assert a == b and hash(a) == hash(b)
        assert a.labels(two_state.mdp) == [["Stay", "Go"], ["Up", "Down"]]

    def test_argmax_available(self):
        q_row = np.array([0.2, 0.9, 0.5])
        assert argmax_available(q_row, mask_of([0, 2])) == 2
        assert argmax_available(q_row, mask_of([0])) == 0
        assert argmax_available(q_row, mask_of([0, 1, 2])) == 1
        with pytest.raises(EmptySetError):
            argmax_available(q_row, 0)

    def test_argmax_available_every_mask(self, rng):
        for _ in range(20):
            q_row = rng.integers(0, 3, size=4).astype(float)
            for mask in range(1, 16):
                members = actions_of(mask, 4)
                best = max(q_row[k] for k in members)
                expected = next(k for k in members if q_row[k] == best)
                assert argmax_available(q_row, mask) == expected
        with pytest.raises(EmptySetError):
            argmax_available(np.zeros(3), mask_of([3]))

    def test_available_indices_are_read_only(self):
        indices = available_indices(mask_of([0, 2]), 3)
        np.testing.assert_array_equal(indices, [0, 2])
        with pytest.raises(ValueError):
            indices[0] = 1


class TestBackups:
    def test_position_weights_two_state(self, two_state):
        avail = two_state.availability
        np.testing.assert_allclose(dl_position_weights(avail, S2, [UP, DOWN]), [0.2, 0.8])
        np.testing.assert_allclose(dl_position_weights(avail, S2, [DOWN, UP]), [0.0, 1.0])

    def test_weights_sum_to_one(self, small_pda_instances, small_explicit_instances):
        for instance in small_pda_instances + small_explicit_instances:
            policy = greedy_dl(instance.mdp.rewards)
            weights = dl_weight_matrix(instance.availability, policy)
            np.testing.assert_allclose(weights.sum(axis=1), 1.0, atol=1e-12)

    def test_pda_backup_matches_enumeration(self, small_pda_instances, rng):
        for instance in small_pda_instances:
            mdp, avail = instance.mdp, instance.availability
            values = rng.normal(size=mdp.n_states)
            policy = DecisionListPolicy(
                np.array([rng.permutation(mdp.n_actions) for _ in range(mdp.n_states)])
            )
            np.testing.assert_allclose(
                dl_backup_pda(mdp, avail, policy, values),
                brute_force_backup(mdp, avail, policy, values),
                atol=1e-12,
            )

    def test_explicit_backup_matches_enumeration(self, small_explicit_instances, rng):
        for instance in small_explicit_instances:
            mdp, avail = instance.mdp, instance.availability
            values = rng.normal(size=mdp.n_states)
            policy = greedy_dl(rng.normal(size=(mdp.n_states, mdp.n_actions)))
            np.testing.assert_allclose(
                dl_backup_explicit(mdp, avail, policy, values),
                brute_force_backup(mdp, avail, policy, values),
                atol=1e-12,
            )

    def test_two_state_backup_at_zero(self, two_state):
        policy = DecisionListPolicy.from_lists([[STAY, GO], [UP, DOWN]])
        values = dl_backup_pda(two_state.mdp, two_state.availability, policy, np.zeros(2))
        np.testing.assert_allclose(values, [0.5, 0.2])

    def test_backup_rejects_wrong_model(self, two_state):
        policy = DecisionListPolicy.identity(2, 2)
        explicit = two_state.availability.to_explicit()
        with pytest.raises(UnsupportedModelError):
            dl_backup_pda(two_state.mdp, explicit, policy, np.zeros(2))
        with pytest.raises(UnsupportedModelError):
            dl_backup_explicit(two_state.mdp, two_state.availability, policy, np.zeros(2))

    def test_ads_backup_within_sampling_error(self, small_pda_instances, rng):
        n_samples = 20_000
        z_scores = []
        for i, instance in enumerate(small_pda_instances):
            mdp, avail = instance.mdp, instance.availability
            values = rng.normal(size=mdp.n_states)
            policy = greedy_dl(mdp.q_values(values))
            sampler = SamplerAvailability.from_model(avail, seed=i)
            estimate = dl_backup_ads(mdp, sampler, policy, values, n_samples)
            weights = dl_weight_matrix(avail, policy)
            q = mdp.q_values(values)
            exact = np.sum(weights * q, axis=1)
            variance = np.sum(weights * q ** 2, axis=1) - exact ** 2
            stderr = np.sqrt(np.maximum(variance, 0.0) / n_samples)
            for s in range(mdp.n_states):
                if stderr[s] < 1e-12:
                    assert estimate[s] == pytest.approx(exact[s], abs=1e-9)
                else:
                    z_scores.append((estimate[s] - exact[s]) / stderr[s])
        z_scores = np.abs(np.array(z_scores))
        assert np.all(z_scores < 4.5)

    @pytest.mark.slow
    def test_ads_backup_within_three_sigma(self):
        rng = np.random.default_rng(8080)
        n_samples = 50_000
        z_scores = []
        for i in range(20):
            instance = random_instance(rng, int(rng.integers(1, 6)), int(rng.integers(2, 5)))
            mdp, avail = instance.mdp, instance.availability
            values = rng.normal(size=mdp.n_states)
            policy = greedy_dl(mdp.q_values(values))
            q = mdp.q_values(values)
            weights = dl_weight_matrix(avail, policy)
            exact = np.sum(weights * q, axis=1)
            stderr = np.sqrt(
                np.maximum(np.sum(weights * q ** 2, axis=1) - exact ** 2, 0.0) / n_samples
            )
            estimate = dl_backup_ads(
                mdp, SamplerAvailability.from_model(avail, seed=100 + i), policy, values, n_samples
            )
            for s in range(mdp.n_states):
                if stderr[s] < 1e-12:
                    assert estimate[s] == pytest.approx(exact[s], abs=1e-9)
                else:
                    z_scores.append(abs(estimate[s] - exact[s]) / stderr[s])
        z_scores = np.array(z_scores)
        assert len(z_scores) > 0
        # a two-sided 3σ miss has probability 0.27% per state
        assert np.mean(z_scores > 3.0) <= 0.05
        assert np.all(z_scores < 4.5)
        assert np.mean(z_scores <= 3.0) >= 0.95

    def test_ads_backup_is_reproducible(self, two_state):
        sampler = SamplerAvailability.from_model(two_state.availability, seed=5)
        policy = DecisionListPolicy.identity(2, 2)
        first = dl_backup_ads(two_state.mdp, sampler, policy, np.ones(2), 500)
        second = dl_backup_ads(two_state.mdp, sampler, policy, np.ones(2), 500)
        np.testing.assert_array_equal(first, second)

    def test_sample_count_must_be_positive(self, two_state):
        sampler = SamplerAvailability.from_model(two_state.availability)
        with pytest.raises(BadSampleCountError):
            sampled_dl_weights(sampler, DecisionListPolicy.identity(2, 2), 0, sampler.make_rng())

    def test_transition_matrix_is_stochastic(self, small_pda_instances):
        for instance in small_pda_instances:
            policy = greedy_dl(instance.mdp.rewards)
            p_mu, r_mu = dl_transition_matrix(instance.mdp, instance.availability, policy)
            np.testing.assert_allclose(p_mu.sum(axis=1), 1.0, atol=1e-10)
            assert r_mu.shape == (instance.n_states,)

    def test_expected_max_q_matches_enumeration(self, small_explicit_instances, rng):
        for instance in small_explicit_instances:
            mdp, avail = instance.mdp, instance.availability
            q = rng.normal(size=(mdp.n_states, mdp.n_actions))
            values, policy = expected_max_q(avail, q)
            np.testing.assert_allclose(values, brute_force_expected_max(mdp, avail, q), atol=1e-12)
            assert policy == greedy_dl(q)

    def test_full_availability_is_standard_max(self, rng):
        q = rng.normal(size=(3, 4))
        values, _ = expected_max_q(full_availability(3, 4), q)
        np.testing.assert_allclose(values, q.max(axis=1))


def _mdp(transitions, rewards, discount=0.9):
    transitions = np.asarray(transitions, dtype=float)
    n, m = transitions.shape[:2]
    return BaseMdp(n, m, transitions, rewards, discount)


class TestValidation:
    def test_two_state_is_valid(self, two_state):
        assert collect_issues(two_state.mdp, two_state.availability) == []

    def test_non_stochastic_row(self):
        mdp = _mdp([[[0.5, 0.4]], [[0.0, 1.0]]], [[0.0], [0.0]])
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(mdp, full_availability(2, 1))
        assert excinfo.value.codes == ["NonStochasticRow"]
        assert excinfo.value.to_dict()["error"] == "NonStochasticRow"

    def test_bad_discount(self):
        mdp = _mdp([[[1.0]]], [[1.0]], discount=1.0)
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(mdp, full_availability(1, 1))
        assert "BadDiscount" in excinfo.value.codes

    def test_empty_subset_possible_under_pda(self):
        mdp = _mdp([[[1.0], [1.0]]], [[1.0, 0.0]])
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(mdp, PdaAvailability(rho=np.array([[0.5, 0.9]])))
        assert excinfo.value.codes == ["EmptySubsetPossible"]

    def test_empty_subset_listed_in_table(self):
        mdp = _mdp([[[1.0], [1.0]]], [[1.0, 0.0]])
        avail = ExplicitAvailability(tables=(((0, 0.5), (3, 0.5)),), actions=2)
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(mdp, avail)
        assert "EmptySubsetPossible" in excinfo.value.codes

    def test_every_violation_reported(self):
        mdp = _mdp([[[0.7, 0.7]], [[0.0, 1.0]]], [[np.inf], [0.0]], discount=1.5)
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(mdp, PdaAvailability(rho=np.array([[0.5], [1.0]])))
        assert set(excinfo.value.codes) == {
            "NonStochasticRow",
            "NonFiniteReward",
            "BadDiscount",
            "EmptySubsetPossible",
        }
        assert excinfo.value.to_dict()["error"] == "ValidationError"

    def test_dimension_mismatch(self):
        mdp = _mdp([[[1.0]]], [[0.0]])
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(mdp, full_availability(2, 1))
        assert excinfo.value.codes == ["DimensionMismatch"]

    def test_sampler_source_without_sure_action(self):
        document = json.loads((DATA_DIR / "two_state.json").read_text())
        document["availability"] = {
            "kind": "sampler-seed",
            "seed": 0,
            "source": {"kind": "pda", "rho": [[0.5, 0.5], [1.0, 1.0]]},
        }
        with pytest.raises(InstanceValidationError) as excinfo:
            parse_instance(json.dumps(document))
        assert excinfo.value.codes == ["EmptySubsetPossible"]
        assert excinfo.value.issues[0].location == "availability.source.rho[0]"

    def test_sampler_source_table_checked(self):
        document = json.loads((DATA_DIR / "two_state.json").read_text())
        document["availability"] = {
            "kind": "sampler-seed",
            "seed": 3,
            "source": {
                "kind": "explicit",
                "subsets": [
                    [{"mask": 1, "probability": 0.4}, {"mask": 3, "probability": 0.5}],
                    [{"mask": 0, "probability": 0.2}, {"mask": 2, "probability": 0.8}],
                ],
            },
        }
        with pytest.raises(InstanceValidationError) as excinfo:
            parse_instance(json.dumps(document))
        locations = {issue.location for issue in excinfo.value.issues}
        assert set(excinfo.value.codes) == {"BadProbability", "EmptySubsetPossible"}
        assert "availability.source.subsets[0]" in locations
        assert "availability.source.subsets[1][0]" in locations

    def test_sampler_source_dimensions(self, two_state):
        source = PdaAvailability(rho=np.ones((3, 2)))
        sampler = SamplerAvailability(
            states=2, actions=2, draw=source.sample, source=source
        )
        with pytest.raises(InstanceValidationError) as excinfo:
            validate(two_state.mdp, sampler)
        assert excinfo.value.codes == ["DimensionMismatch"]

    def test_opaque_sampler_passes(self, two_state):
        sampler = SamplerAvailability(states=2, actions=2, draw=lambda s, rng: 3)
        assert collect_issues(two_state.mdp, sampler) == []


class TestInstanceIo:
    def test_bundled_two_state_matches_constructor(self, two_state):
        loaded = load_bundled_instance("two_state")
        np.testing.assert_array_equal(loaded.mdp.transitions, two_state.mdp.transitions)
        np.testing.assert_array_equal(loaded.mdp.rewards, two_state.mdp.rewards)
        np.testing.assert_array_equal(loaded.availability.rho, two_state.availability.rho)
        assert loaded.mdp.action_labels == [["Stay", "Go"], ["Up", "Down"]]

    def test_bundled_names(self):
        assert {"two_state", "three_state_explicit", "two_state_sampler"} <= set(
            bundled_instance_names()
        )

    def test_serialize_then_parse_is_identity(self):
        instance = load_bundled_instance("three_state_explicit")
        text = serialize_instance(instance.mdp, instance.availability)
        again = parse_instance(text)
        assert json.loads(serialize_instance(again.mdp, again.availability)) == json.loads(text)
        assert again.availability.tables == instance.availability.tables

    def test_save_then_load(self, tmp_path):
        instance = load_bundled_instance("three_state_explicit")
        path = tmp_path / "copy.json"
        save_instance(path, instance.mdp, instance.availability)
        again = load_instance(path)
        np.testing.assert_array_equal(again.mdp.transitions, instance.mdp.transitions)
        np.testing.assert_array_equal(again.mdp.rewards, instance.mdp.rewards)
        assert again.mdp.discount == instance.mdp.discount
        assert again.availability.tables == instance.availability.tables
        assert again.mdp.state_names == instance.mdp.state_names

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceFormatError):
            load_instance(tmp_path / "absent.json")

    def test_sampler_document(self):
        instance = load_bundled_instance("two_state_sampler")
        assert isinstance(instance.availability, SamplerAvailability)
        assert instance.availability.seed == 7
        text = serialize_instance(instance.mdp, instance.availability)
        assert json.loads(text)["availability"]["kind"] == "sampler-seed"

    def test_bare_sampler_cannot_be_serialized(self, two_state):
        sampler = SamplerAvailability(states=2, actions=2, draw=lambda s, rng: 3)
        with pytest.raises(UnsupportedModelError):
            serialize_instance(two_state.mdp, sampler)

    def test_malformed_document(self):
        with pytest.raises(InstanceFormatError):
            parse_instance('{"n_states": 2}')
        with pytest.raises(InstanceFormatError):
            parse_instance("not json")

    def test_ragged_array(self):
        document = json.loads((DATA_DIR / "two_state.json").read_text())
        document["rewards"] = [[0.5], [1.0, 0.0]]
        with pytest.raises(InstanceFormatError):
            parse_instance(json.dumps(document))

    def test_invalid_document_reports_issues(self):
        document = json.loads((DATA_DIR / "two_state.json").read_text())
        document["transitions"][0][0] = [0.5, 0.4]
        with pytest.raises(InstanceValidationError) as excinfo:
            parse_instance(json.dumps(document))
        assert excinfo.value.codes == ["NonStochasticRow"]


def test_all_dl_permutations_share_weights_total(two_state):
    for order in itertools.permutations(range(2)):
        weights = dl_position_weights(two_state.availability, S2, np.array(order))
        assert weights.sum() == pytest.approx(1.0)
