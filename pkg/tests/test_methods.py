import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from truthhyp.data import ClaimDataset, Mode
from truthhyp.exceptions import ConfigError, ConsistencyError, NumericalError
from truthhyp.methods import (
    ESTIMATORS,
    METHOD_ORDER,
    MethodConfig,
    MethodId,
    MethodOutput,
    Sums,
    TruthFinder,
    Voting,
    discover,
    iterate_to_fixpoint,
    make_estimator,
    run_all,
)

PROBABILISTIC = {MethodId.VOTING, MethodId.ACCU, MethodId.SIMPLE_LCA, MethodId.GUESS_LCA}

single_rows = st.lists(
    st.tuples(st.sampled_from(["s1", "s2", "s3", "s4"]), st.sampled_from(["o1", "o2", "o3"]),
              st.sampled_from(["a", "b", "c"])),
    min_size=1, max_size=12, unique_by=lambda r: (r[0], r[1]))


def test_voting_toy(toy):
    out = discover(toy, "voting")
    assert out.value_confidence[("o1", "a")] == pytest.approx(2 / 3)
    assert out.value_confidence[("o1", "b")] == pytest.approx(1 / 3)
    assert out.identified_truth.single("o1") == "a"
    assert out.iterations == 1 and out.converged


def test_method_id_has_twelve_stable_names():
    assert len(MethodId) == 12 == len(ESTIMATORS)
    assert MethodId.parse("GuessLCA") is MethodId.GUESS_LCA
    with pytest.raises(ConfigError, match="voting"):
        MethodId.parse("majority")


def truthfinder_by_hand(rows, gamma=0.3, init=0.9, tol=1e-6, max_iter=200, clamp=1e-6):
    """Update equations executed on plain dictionaries."""
    by_value = defaultdict(list)
    by_source = defaultdict(list)
    for s, o, v in rows:
        by_value[(o, v)].append(s)
        by_source[s].append((o, v))
    trust = {s: init for s in by_source}
    for _ in range(max_iter):
        conf = {}
        for fv, ss in by_value.items():
            sigma = sum(-math.log(1 - min(max(trust[s], clamp), 1 - clamp)) for s in ss)
            conf[fv] = 1 / (1 + math.exp(-gamma * sigma))
        new = {s: sum(conf[fv] for fv in fvs) / len(fvs) for s, fvs in by_source.items()}
        done = max(abs(new[s] - trust[s]) for s in trust) < tol
        trust = new
        if done:
            break
    return trust, conf


def test_truthfinder_matches_hand_run(small_single):
    trust, conf = truthfinder_by_hand(small_single.claims)
    out = discover(small_single, "truthfinder")
    for key, c in conf.items():
        assert out.value_confidence[key] == pytest.approx(c, abs=1e-9)
    for s, t in trust.items():
        assert out.native_trust[s] == pytest.approx(t, abs=1e-9)
    assert out.identified_truth.single("o1") == "a"
    assert out.identified_truth.single("o2") == "y"


def test_truthfinder_similarity_hook(small_single):
    plain = TruthFinder().fit(small_single)
    linked = TruthFinder(similarity=lambda a, b: 1.0 if {a, b} == {"x", "y"} else 0.0).fit(small_single)
    # x gains support from y
    assert linked.value_confidence_[("o2", "x")] > plain.value_confidence_[("o2", "x")]


def test_sums_hand_iteration():
    ds = ClaimDataset([("s1", "o", "a"), ("s2", "o", "a"), ("s3", "o", "b"), ("s3", "p", "c")])
    out = Sums(max_iter=1).fit(ds).output_
    # c = (1, 0.5, 0.5) / 1 ; t = (1, 1, 1) / 1
    assert out.value_confidence == pytest.approx({("o", "a"): 1.0, ("o", "b"): 0.5, ("p", "c"): 0.5})
    assert list(out.native_trust.values()) == pytest.approx([1.0, 1.0, 1.0])


@pytest.mark.parametrize("method", METHOD_ORDER, ids=lambda m: m.value)
def test_unanimous_data(method):
    rows = [(s, o, f"{o}-true") for s in ("s1", "s2", "s3") for o in ("o1", "o2", "o3")]
    rows += [("s1", "o1", "o1-alt")]
    ds = ClaimDataset(rows, Mode.MULTI)
    unanimous = ClaimDataset([r for r in rows if r[2] != "o1-alt"])
    out = discover(unanimous, method)
    assert {o: out.identified_truth.single(o) for o in unanimous.objects} == {
        o: f"{o}-true" for o in unanimous.objects}
    assert discover(ds, method).identified_truth["o2"] == {"o2-true"}


@pytest.mark.parametrize("method", METHOD_ORDER, ids=lambda m: m.value)
@settings(max_examples=25, deadline=None)
@given(rows=single_rows)
def test_output_invariants(method, rows):
    ds = ClaimDataset(rows)
    out = discover(ds, method)
    conf = out.value_confidence
    assert set(out.identified_truth) == set(ds.objects)
    for o in ds.objects:
        (v,) = out.identified_truth[o]
        scores = {w: conf[(o, w)] for w in ds.values(o)}
        best = max(scores.values())
        assert v == min(w for w, c in scores.items() if c == best)
        if method in PROBABILISTIC:
            assert sum(scores.values()) == pytest.approx(1.0, abs=1e-9)
        else:
            assert all(-1e-12 <= c <= 1 + 1e-12 for c in scores.values())
    assert 1 <= out.iterations <= 200


@pytest.mark.parametrize("method", METHOD_ORDER, ids=lambda m: m.value)
def test_deterministic_and_isolated(method, corpus_factory):
    ds = corpus_factory("80P", 4).dataset
    outs = {o.method: o for o in run_all(ds)}
    alone = discover(ds, method)
    assert alone.to_json() == discover(ds, method).to_json() == outs[method.value].to_json()


def test_run_all_order_and_subset(small_single):
    outs = run_all(small_single)
    assert [o.method for o in outs] == [m.value for m in METHOD_ORDER]
    sub = run_all(small_single, methods=["crh", "voting"])
    assert [o.method for o in sub] == ["voting", "crh"]


def test_run_all_tags_errors(small_single, monkeypatch):
    def boom(self, A):
        raise NumericalError("non-finite values at iteration 3")

    monkeypatch.setattr(ESTIMATORS[MethodId.SUMS], "_solve", boom)
    with pytest.raises(NumericalError, match=r"\[sums\].*iteration 3"):
        run_all(small_single)


def test_non_finite_update_names_method_and_iteration(small_single):
    class Broken(Sums):
        def _source_scores(self, A, conf):
            return np.full(A.n_s, np.nan)

    with pytest.raises(NumericalError, match="sums: non-finite values at iteration 1"):
        Broken().fit(small_single)


def test_iterate_identity_and_two_cycle():
    state, it, ok = iterate_to_fixpoint(lambda x: x, np.ones(3))
    assert (it, ok) == (1, True)
    state, it, ok = iterate_to_fixpoint(lambda x: 1 - x, np.zeros(2), max_iter=17, tol=0.5)
    assert (it, ok) == (17, False)


def test_sums_converges_on_seeded_corpora(corpus_factory):
    for seed in range(3):
        est = Sums().fit(corpus_factory("80O", seed).dataset)
        assert est.converged_ and est.n_iter_ <= 200


def test_sums_scale_invariance(corpus_factory):
    est = Sums().fit(corpus_factory("U75", 1).dataset)
    ds = corpus_factory("U75", 1).dataset
    scaled = {k: 7.5 * c for k, c in est.value_confidence_.items()}
    for o in ds.objects:
        best = max(ds.values(o), key=lambda v: (scaled[(o, v)], [-ord(ch) for ch in v]))
        assert est.truths_[o] == {best}


def test_multi_valued_explodes_winner(children):
    out = discover(children, "voting")
    assert out.identified_truth["tom"] <= set(children.values("tom"))
    assert out.identified_truth["ann"] == {"Joe"}
    for (o, v) in out.value_confidence:
        assert v in children.values(o)


def test_estimator_api(small_single):
    est = make_estimator("pooled_investment", MethodConfig(params={"pooled_investment": {"exponent": 1.0}}))
    assert est.get_params()["exponent"] == 1.0
    twin = clone(est).set_params(exponent=1.4)
    assert twin.get_params()["exponent"] == 1.4
    truths = est.fit_predict(small_single)
    assert est.predict(ClaimDataset([("s9", "o1", "a")])) == truths.restrict(["o1"])
    with pytest.raises(ConsistencyError):
        est.predict(ClaimDataset([("s9", "zz", "a")]))
    with pytest.raises(ConfigError):
        make_estimator("sums", MethodConfig(params={"sums": {"nope": 1}}))


def test_unfitted_predict_raises():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        Voting().predict()


@pytest.mark.parametrize("kw", [{"max_iterations": 0}, {"convergence_epsilon": 1.0},
                                {"params": {"nope": {}}}])
def test_method_config_validation(kw):
    with pytest.raises(ConfigError):
        MethodConfig(**kw)


def test_output_json_round_trip(tmp_path, children):
    out = discover(children, "accu")
    path = out.save(tmp_path)
    assert path.name == "accu.output.json"
    back = MethodOutput.load(path)
    assert back.to_json() == out.to_json()
    with pytest.raises(ConsistencyError):
        MethodOutput.from_dict({"method": "x"})
