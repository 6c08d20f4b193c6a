#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "clusterucb/errors.hpp"
#include "clusterucb/evaluation.hpp"
#include "clusterucb/rng.hpp"
#include "clusterucb/synthgen.hpp"

using namespace cucb;

namespace {

// Independent set/sum oracles for the recall metrics.
double ref_recall_sample(const std::vector<std::size_t>& d,
                         const std::vector<std::size_t>& gt) {
    const std::set<std::size_t> ds(d.begin(), d.end());
    const std::set<std::size_t> gts(gt.begin(), gt.end());
    std::vector<std::size_t> inter;
    std::set_intersection(ds.begin(), ds.end(), gts.begin(), gts.end(),
                          std::back_inserter(inter));
    return static_cast<double>(inter.size()) / static_cast<double>(gts.size());
}

double ref_recall_influence(const std::vector<std::size_t>& d,
                            const std::vector<std::size_t>& gt,
                            const InfluenceVector& inf) {
    long double num = 0.0L, den = 0.0L;
    for (const std::size_t i : std::set<std::size_t>(d.begin(), d.end())) num += inf[i];
    for (const std::size_t i : std::set<std::size_t>(gt.begin(), gt.end())) den += inf[i];
    return static_cast<double>(num / den);
}

}  // namespace

TEST_CASE("recall_sample examples") {
    CHECK(recall_sample({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(recall_sample({4, 5}, {1, 2}) == 0.0);
    CHECK(recall_sample({1, 2, 3}, {2, 3, 4}) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(recall_sample({1}, {}), EmptyGroundTruthError);
}

TEST_CASE("recall_influence examples") {
    const InfluenceVector inf{0.5, 0.5, 0.5, 0.5};
    CHECK(recall_influence({0, 1}, {0, 1}, inf) == 1.0);
    CHECK(recall_influence({0}, {0, 1}, inf) == doctest::Approx(0.5));

    bool warn = false;
    const InfluenceVector negative{-0.4, -0.6, 0.1};
    CHECK(recall_influence({2}, {0, 1}, negative, &warn) ==
          doctest::Approx(0.1 / -1.0));
    CHECK(warn);

    const InfluenceVector cancel{0.5, -0.5, 0.2};
    CHECK_THROWS_AS(recall_influence({2}, {0, 1}, cancel), ZeroDenominatorError);
}

TEST_CASE("recall metrics match brute force on random instances") {
    rng::Stream stream(404);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + stream.next_index(60);
        InfluenceVector inf(n);
        for (auto& x : inf) x = stream.next_unit() + 0.01;  // positive pool

        std::vector<std::size_t> d, gt;
        for (std::size_t i = 0; i < n; ++i) {
            if (stream.next_unit() < 0.3) d.push_back(i);
            if (stream.next_unit() < 0.3) gt.push_back(i);
        }
        if (gt.empty()) gt.push_back(stream.next_index(n));

        const double rs = recall_sample(d, gt);
        CHECK(rs == doctest::Approx(ref_recall_sample(d, gt)).epsilon(1e-12));
        CHECK(rs >= 0.0);
        CHECK(rs <= 1.0);
        CHECK(recall_influence(d, gt, inf) ==
              doctest::Approx(ref_recall_influence(d, gt, inf)).epsilon(1e-12));
    }
}

TEST_CASE("per-cluster report refines the global counts") {
    SynthConfig cfg;
    cfg.n_samples = 200;
    cfg.dim = 16;
    cfg.n_latent_clusters = 4;
    cfg.seed = 77;
    const auto pool = generate(cfg);
    const auto clustering = spherical_kmeans(pool.train, 5, 3);
    const auto influences = compute_influences(pool.train, pool.val);
    const PrecomputedInfluence oracle(influences);

    BanditConfig bandit;
    bandit.budget = 80;
    bandit.seed = 9;
    const auto log = run_bandit(clustering, oracle, bandit);
    const auto sel = final_select(log, 10, pool.train.ids);
    const auto gt = oracle_top(influences, 0.05, pool.train.ids);

    const auto counts = per_cluster_report(log, clustering, sel, gt);
    std::size_t total = 0, drawn = 0, true_top = 0, selected = 0;
    for (const auto& c : counts) {
        total += c.total;
        drawn += c.drawn;
        true_top += c.true_top;
        selected += c.selected;
    }
    CHECK(total == 200);
    CHECK(drawn == 80);
    CHECK(true_top == gt.indices.size());
    CHECK(selected == sel.indices.size());
}

TEST_CASE("full-budget report: drawn = total and selected = true_top per cluster") {
    SynthConfig cfg;
    cfg.n_samples = 60;
    cfg.dim = 12;
    cfg.seed = 5;
    const auto pool = generate(cfg);
    const auto clustering = spherical_kmeans(pool.train, 4, 1);
    const auto influences = compute_influences(pool.train, pool.val);
    const PrecomputedInfluence oracle(influences);

    BanditConfig bandit;
    bandit.budget = 60;
    bandit.seed = 2;
    const auto log = run_bandit(clustering, oracle, bandit);
    const auto gt = oracle_top(influences, 0.1, pool.train.ids);
    const auto sel = final_select(log, gt.indices.size(), pool.train.ids);

    for (const auto& c : per_cluster_report(log, clustering, sel, gt)) {
        CHECK(c.drawn == c.total);
        CHECK(c.selected == c.true_top);
    }
}

TEST_CASE("drift at the identity checkpoint equals the standard pipeline") {
    SynthConfig cfg;
    cfg.n_samples = 150;
    cfg.dim = 24;
    cfg.n_latent_clusters = 5;
    cfg.concentration = 15.0;
    cfg.seed = 31;
    const auto pool = generate(cfg);
    const auto clustering = spherical_kmeans(pool.train, 6, 3);

    BanditConfig bandit;
    bandit.budget = 60;
    bandit.selection_ratio = 0.1;
    bandit.seed = 21;

    const auto influences = compute_influences(pool.train, pool.val);
    const PrecomputedInfluence oracle(influences);
    const auto log = run_bandit(clustering, oracle, bandit);
    const auto sel = final_select(log, 15, pool.train.ids);
    const auto gt = oracle_top(influences, 0.1, pool.train.ids);
    const double expect_rs = recall_sample(sel.indices, gt.indices);
    const double expect_ri = recall_influence(sel.indices, gt.indices, influences);

    const auto drift = drift_eval(clustering, pool.train, pool.val, bandit);
    CHECK(drift.r_sample == doctest::Approx(expect_rs).epsilon(1e-12));
    CHECK(drift.r_influence == doctest::Approx(expect_ri).epsilon(1e-12));
}

TEST_CASE("drift rejects mismatched pools") {
    SynthConfig cfg;
    cfg.n_samples = 40;
    cfg.dim = 8;
    cfg.seed = 3;
    const auto pool = generate(cfg);
    const auto clustering = spherical_kmeans(pool.train, 3, 1);

    BanditConfig bandit;
    bandit.budget = 10;

    auto other = pool.train;
    other.ids[0] = "different";
    CHECK_THROWS_AS(
        drift_eval(clustering, other, pool.val, bandit, &pool.train.ids),
        IdMismatchError);

    SynthConfig small = cfg;
    small.n_samples = 30;
    const auto short_pool = generate(small);
    CHECK_THROWS_AS(drift_eval(clustering, short_pool.train, pool.val, bandit),
                    IdMismatchError);
}
