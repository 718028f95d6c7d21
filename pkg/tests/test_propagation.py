import pytest

from stancegen.corpus import AccountLabel, StanceLabel
from stancegen.propagation import (
    PropagationConfig,
    RetweetGraph,
    build_retweet_graph,
    load_seeds,
    propagate,
    project_labels,
    save_accounts,
    load_accounts,
)
from stancegen.synthetic import homophily_graph

from conftest import make_tweet


def seed(author, label):
    return AccountLabel(author_id=author, label=StanceLabel(label))


class TestBuildGraph:
    def test_weights_aggregate(self):
        tweets = [
            make_tweet(1, "RT @v: hola que tal", author="u", retweet_of="v"),
            make_tweet(2, "RT @v: una altra cosa", author="u", retweet_of="v"),
            make_tweet(3, "RT @v: i una mes", author="w", retweet_of="v"),
        ]
        graph = build_retweet_graph(tweets)
        assert graph.out_edges("u") == {"v": 2}
        assert graph.out_edges("w") == {"v": 1}

    def test_no_retweets_empty_graph(self):
        graph = build_retweet_graph([make_tweet(1, "res de res", author="u")])
        assert graph.num_edges() == 0

    def test_self_retweet_dropped(self):
        graph = build_retweet_graph([make_tweet(1, "RT @u: jo mateix", author="u", retweet_of="u")])
        assert graph.num_edges() == 0

    def test_json_round_trip(self):
        graph = RetweetGraph()
        graph.add_retweet("a", "b", 3)
        graph.add_retweet("c", "b")
        assert RetweetGraph.from_json_dict(graph.to_json_dict()).edges == graph.edges


class TestPropagate:
    def test_single_edge_gets_label_hop_1(self):
        graph = RetweetGraph()
        graph.add_retweet("u", "v")
        out = propagate(graph, [seed("v", "FAVOR")])
        by_id = {a.author_id: a for a in out}
        assert by_id["u"].label is StanceLabel.FAVOR
        assert by_id["u"].hop == 1
        assert by_id["u"].provenance == "propagated"

    def test_margin_met(self):
        graph = RetweetGraph()
        graph.add_retweet("u", "v1", 2)
        graph.add_retweet("u", "v2", 1)
        graph.add_retweet("u", "v3", 1)
        seeds = [seed("v1", "FAVOR"), seed("v2", "FAVOR"), seed("v3", "AGAINST")]
        out = propagate(graph, seeds, PropagationConfig(min_margin=0.6))
        by_id = {a.author_id: a for a in out}
        assert by_id["u"].label is StanceLabel.FAVOR  # 3/4 = 0.75 >= 0.6

    def test_margin_not_met_stays_unlabeled(self):
        graph = RetweetGraph()
        graph.add_retweet("u", "v1", 1)
        graph.add_retweet("u", "v2", 1)
        seeds = [seed("v1", "FAVOR"), seed("v2", "AGAINST")]
        out = propagate(graph, seeds, PropagationConfig(min_margin=0.6))
        assert "u" not in {a.author_id for a in out if a.provenance == "propagated"}

    def test_min_evidence(self):
        graph = RetweetGraph()
        graph.add_retweet("u", "v", 1)
        out = propagate(graph, [seed("v", "NONE")], PropagationConfig(min_evidence=2))
        assert {a.author_id for a in out} == {"v"}

    def test_empty_seeds_error(self):
        with pytest.raises(ValueError, match="empty seed"):
            propagate(RetweetGraph(), [])

    def test_seeds_never_relabeled(self):
        graph = RetweetGraph()
        graph.add_retweet("s2", "s1", 10)
        seeds = [seed("s1", "FAVOR"), seed("s2", "AGAINST")]
        out = propagate(graph, seeds)
        by_id = {a.author_id: a for a in out}
        assert by_id["s2"].label is StanceLabel.AGAINST
        assert by_id["s2"].hop == 0

    def test_two_hops(self):
        graph = RetweetGraph()
        graph.add_retweet("u1", "v")
        graph.add_retweet("u2", "u1")
        out = propagate(graph, [seed("v", "FAVOR")], PropagationConfig(max_hops=2))
        by_id = {a.author_id: a for a in out}
        assert by_id["u2"].hop == 2
        assert by_id["u2"].label is StanceLabel.FAVOR

    def test_determinism(self):
        planted = homophily_graph(n_nodes=40, seeds_per_community=4, seed=5)
        seeds = [seed(a, "FAVOR") for a in planted.seeds_per_community[0]]
        seeds += [seed(a, "AGAINST") for a in planted.seeds_per_community[1]]
        first = propagate(planted.graph, seeds)
        second = propagate(planted.graph, seeds)
        assert first == second

    def test_monotone_under_reinforcing_seed(self):
        # Adding a seed for a previously unlabeled, previously untallied
        # account can only extend the assignment set at one hop.
        graph = RetweetGraph()
        graph.add_retweet("u", "v", 2)
        graph.add_retweet("w", "x", 1)
        base = propagate(graph, [seed("v", "FAVOR")])
        extended = propagate(graph, [seed("v", "FAVOR"), seed("x", "AGAINST")])
        assert {a.author_id for a in base} <= {a.author_id for a in extended}

    def test_planted_communities_agreement(self):
        # Acceptance-grade oracle: two homophilous communities, 10 seeds each.
        planted = homophily_graph(n_nodes=200, seeds_per_community=10, seed=11)
        seeds = [seed(a, "FAVOR") for a in planted.seeds_per_community[0]]
        seeds += [seed(a, "AGAINST") for a in planted.seeds_per_community[1]]
        out = propagate(planted.graph, seeds, PropagationConfig(max_hops=1))
        propagated = [a for a in out if a.provenance == "propagated"]
        assert len(propagated) >= 100  # the dense graph labels most nodes
        want = {0: StanceLabel.FAVOR, 1: StanceLabel.AGAINST}
        agree = sum(
            1 for a in propagated if a.label is want[planted.community_of[a.author_id]]
        )
        assert agree / len(propagated) >= 0.95


class TestProjectLabels:
    def test_seed_author_projected_as_manual(self):
        tweets = [make_tweet(1, "text u a", author="aa"), make_tweet(2, "text u b", author="aa")]
        out = project_labels(tweets, [seed("aa", "FAVOR")])
        assert len(out) == 2
        assert all(item.label is StanceLabel.FAVOR for item in out)
        assert all(item.label_source == "manual-user" for item in out)

    def test_propagated_author_source(self):
        acc = AccountLabel(author_id="bb", label=StanceLabel.NONE, provenance="propagated", hop=1)
        out = project_labels([make_tweet(1, "un text", author="bb")], [acc])
        assert out[0].label_source == "propagated-user"

    def test_unlabeled_author_omitted(self):
        assert project_labels([make_tweet(1, "un text", author="zz")], [seed("aa", "FAVOR")]) == []

    def test_conflicting_accounts_error(self):
        accounts = [seed("aa", "FAVOR"), seed("aa", "AGAINST")]
        with pytest.raises(ValueError, match="conflicting"):
            project_labels([make_tweet(1, "un text", author="aa")], accounts)

    def test_volume_preserved_per_account(self):
        # Authors with more tweets contribute proportionally more items.
        tweets = [make_tweet(i, f"text {i} llarg", author="a") for i in range(4)]
        tweets += [make_tweet(10 + i, f"text {i} mes", author="b") for i in range(2)]
        out = project_labels(tweets, [seed("a", "FAVOR"), seed("b", "AGAINST")])
        by_label = {}
        for item in out:
            by_label[item.label] = by_label.get(item.label, 0) + 1
        assert by_label[StanceLabel.FAVOR] == 4
        assert by_label[StanceLabel.AGAINST] == 2


class TestAccountFiles:
    def test_seeds_file(self, tmp_path):
        path = tmp_path / "seeds.tsv"
        path.write_text("a1\tFAVOR\na2\tNONE\n", encoding="utf-8")
        seeds = load_seeds(path)
        assert [s.author_id for s in seeds] == ["a1", "a2"]
        assert all(s.hop == 0 and s.provenance == "seed-manual" for s in seeds)

    def test_accounts_round_trip(self, tmp_path):
        accounts = [
            AccountLabel("a1", StanceLabel.FAVOR),
            AccountLabel("a2", StanceLabel.AGAINST, provenance="propagated", hop=1),
        ]
        path = tmp_path / "acc.tsv"
        save_accounts(accounts, path)
        assert load_accounts(path) == accounts

    def test_hop_provenance_invariant(self):
        with pytest.raises(ValueError):
            AccountLabel("x", StanceLabel.FAVOR, provenance="propagated", hop=0)
        with pytest.raises(ValueError):
            AccountLabel("x", StanceLabel.FAVOR, provenance="seed-manual", hop=2)
