#include <doctest.h>

#include <cmath>
#include <map>
#include <thread>
#include <vector>

#include "clusterucb/errors.hpp"
#include "clusterucb/influence.hpp"
#include "clusterucb/kernels.hpp"
#include "clusterucb/rng.hpp"
#include "clusterucb/synthgen.hpp"

using namespace cucb;

namespace {

GradientMatrix make_matrix(std::vector<std::vector<float>> rows) {
    GradientMatrix m;
    m.rows = rows.size();
    m.cols = rows.front().size();
    for (std::size_t i = 0; i < m.rows; ++i) {
        m.ids.push_back("s" + std::to_string(i));
        m.data.insert(m.data.end(), rows[i].begin(), rows[i].end());
    }
    return m;
}

// Brute-force mean-within-subtask / max-across-subtasks on one row.
double ref_aggregate(const std::vector<double>& scores,
                     const std::vector<std::string>& labels) {
    std::map<std::string, std::pair<double, int>> acc;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        acc[labels[j]].first += scores[j];
        acc[labels[j]].second += 1;
    }
    double best = -1e300;
    for (const auto& [_, sums] : acc) {
        best = std::max(best, sums.first / sums.second);
    }
    return best;
}

}  // namespace

TEST_CASE("normalize_rows basic examples") {
    auto m = make_matrix({{3.0f, 4.0f}, {1.0f, 0.0f}});
    const auto out = normalize_rows(m);
    CHECK(out.row(0)[0] == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(out.row(0)[1] == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(out.row(1)[0] == doctest::Approx(1.0));
    CHECK(out.row(1)[1] == doctest::Approx(0.0));
    CHECK(out.normalized);
    CHECK(out.ids == m.ids);
}

TEST_CASE("normalize_rows rejects zero rows") {
    auto m = make_matrix({{0.0f, 0.0f}});
    CHECK_THROWS_AS(normalize_rows(m), ZeroRowError);
    try {
        normalize_rows(m);
    } catch (const ZeroRowError& e) {
        CHECK(e.row() == 0);
    }
}

TEST_CASE("normalize_rows is idempotent") {
    SynthConfig cfg;
    cfg.n_samples = 50;
    cfg.dim = 17;
    cfg.seed = 4;
    auto pool = generate(cfg);
    auto once = normalize_rows(pool.train);
    auto twice = normalize_rows(once);
    for (std::size_t i = 0; i < once.data.size(); ++i) {
        CHECK(std::abs(once.data[i] - twice.data[i]) < 1e-7f);
    }
}

TEST_CASE("influence_pair examples") {
    const std::vector<float> e1{1.0f, 0.0f};
    const std::vector<float> e2{0.0f, 1.0f};
    const float r = static_cast<float>(std::sqrt(2.0) / 2.0);
    const std::vector<float> diag{r, r};

    CHECK(influence_pair(e1, e1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(influence_pair(e1, e2) == doctest::Approx(0.0));
    // frozen from sqrt(2)/2 computed at double precision
    CHECK(influence_pair(e1, diag) == doctest::Approx(0.7071067811865476).epsilon(1e-6));
    CHECK_THROWS_AS(influence_pair(e1, std::vector<float>{1.0f, 0.0f, 0.0f}),
                    DimensionMismatchError);
}

TEST_CASE("influence_pair is symmetric and bounded") {
    rng::Stream stream(99);
    for (int trial = 0; trial < 200; ++trial) {
        GradientMatrix m;
        m.rows = 2;
        m.cols = 1 + stream.next_index(40);
        m.ids = {"a", "b"};
        m.data.resize(2 * m.cols);
        for (auto& x : m.data) {
            x = static_cast<float>(stream.next_gaussian());
        }
        const auto unit = normalize_rows(m);
        const std::span<const float> a{unit.row(0), unit.cols};
        const std::span<const float> b{unit.row(1), unit.cols};
        const double ab = influence_pair(a, b);
        CHECK(std::abs(ab) <= 1.0 + 1e-6);
        CHECK(ab == influence_pair(b, a));
    }
}

TEST_CASE("aggregate_validation examples") {
    // one subtask: plain mean
    CHECK(aggregate_validation({0.2, 0.4}, 1, {"t", "t"})[0] ==
          doctest::Approx(0.3).epsilon(1e-12));
    // two subtasks: max of means; frozen from the mean/max oracle on the 1x3 matrix
    const std::vector<std::string> labels{"A", "A", "B"};
    const std::vector<double> row{0.2, 0.4, 0.6};
    CHECK(ref_aggregate(row, labels) == doctest::Approx(0.6));
    CHECK(aggregate_validation(row, 1, labels)[0] == doctest::Approx(0.6).epsilon(1e-12));
    // all equal
    CHECK(aggregate_validation({0.5, 0.5, 0.5}, 1, {"A", "B", "C"})[0] ==
          doctest::Approx(0.5));
    CHECK_THROWS_AS(aggregate_validation({}, 0, {}), EmptySubtaskError);
}

TEST_CASE("aggregate_validation matches the brute-force oracle on random input") {
    rng::Stream stream(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 1 + stream.next_index(6);
        const std::size_t cols = 1 + stream.next_index(8);
        std::vector<double> matrix(rows * cols);
        for (auto& x : matrix) x = stream.next_unit() * 2.0 - 1.0;
        std::vector<std::string> labels(cols);
        for (auto& l : labels) l = "t" + std::to_string(stream.next_index(3));

        const auto got = aggregate_validation(matrix, rows, labels);
        for (std::size_t i = 0; i < rows; ++i) {
            const std::vector<double> row(matrix.begin() + i * cols,
                                          matrix.begin() + (i + 1) * cols);
            CHECK(got[i] == doctest::Approx(ref_aggregate(row, labels)).epsilon(1e-12));
        }
    }
}

TEST_CASE("aggregate_validation single one-column subtask equals the raw column") {
    const std::vector<double> column{0.1, -0.8, 0.33};
    const auto got = aggregate_validation(column, 3, {"only"});
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == column[i]);
}

TEST_CASE("aggregate_checkpoints") {
    const InfluenceVector single{0.5, -0.2};
    CHECK(aggregate_checkpoints({single}) == single);
    const auto mean = aggregate_checkpoints({{0.2}, {0.4}});
    CHECK(mean[0] == doctest::Approx(0.3).epsilon(1e-12));
    const auto zeros = aggregate_checkpoints({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
    CHECK(zeros == InfluenceVector{0.0, 0.0});
    CHECK_THROWS_AS(aggregate_checkpoints({}), EmptyListError);
    CHECK_THROWS_AS(aggregate_checkpoints({{0.1}, {0.1, 0.2}}), LengthMismatchError);
}

TEST_CASE("lazy oracle memoizes and matches the eager path") {
    SynthConfig cfg;
    cfg.n_samples = 40;
    cfg.dim = 12;
    cfg.n_val = 9;
    cfg.n_subtasks = 3;
    cfg.seed = 8;
    const auto pool = generate(cfg);

    const InfluenceOracle oracle(pool.train, pool.val);
    CHECK(oracle.evaluations() == 0);
    const double v5 = oracle(5);
    CHECK(oracle.evaluations() == 1);
    CHECK(oracle(5) == v5);
    CHECK(oracle.evaluations() == 1);

    const auto eager = compute_influences(pool.train, pool.val);
    for (std::size_t i = 0; i < pool.train.rows; ++i) {
        CHECK(oracle(i) == eager[i]);  // exactly: shared row routine
    }
    CHECK(oracle.evaluations() == pool.train.rows);
    CHECK_THROWS_AS(oracle(pool.train.rows), IndexOutOfRangeError);
}

TEST_CASE("oracle counts each index once under concurrent access") {
    SynthConfig cfg;
    cfg.n_samples = 64;
    cfg.dim = 48;
    cfg.seed = 15;
    const auto pool = generate(cfg);
    const InfluenceOracle oracle(pool.train, pool.val);

    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = 0; i < pool.train.rows; ++i) oracle(i);
        });
    }
    for (auto& t : workers) t.join();
    CHECK(oracle.evaluations() == pool.train.rows);
}

TEST_CASE("precomputed influence counts distinct indices") {
    const InfluenceVector values{0.1, 0.2, 0.3};
    const PrecomputedInfluence source(values);
    CHECK(source(1) == 0.2);
    CHECK(source(1) == 0.2);
    CHECK(source(0) == 0.1);
    CHECK(source.evaluations() == 2);
    CHECK_THROWS_AS(source(3), IndexOutOfRangeError);
}
