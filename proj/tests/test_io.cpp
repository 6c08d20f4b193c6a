#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "clusterucb/errors.hpp"
#include "clusterucb/io.hpp"
#include "clusterucb/synthgen.hpp"

using namespace cucb;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cucb_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

SynthPool small_pool(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_samples = 50;
    cfg.dim = 9;
    cfg.n_latent_clusters = 3;
    cfg.n_val = 6;
    cfg.n_subtasks = 2;
    cfg.seed = seed;
    return generate(cfg);
}

}  // namespace

TEST_CASE("GRDM round trip is lossless") {
    TempDir tmp;
    const auto pool = small_pool(1);
    const auto path = tmp.path / "train.grdm";
    io::write_grdm(path, pool.train);

    const auto back = io::read_grdm(path);
    CHECK(back.rows == pool.train.rows);
    CHECK(back.cols == pool.train.cols);
    CHECK(back.data == pool.train.data);  // bit-for-bit
    CHECK(back.ids == pool.train.ids);

    // byte-identical rewrite
    io::write_grdm(tmp.path / "again.grdm", back);
    std::ifstream f1(path, std::ios::binary);
    std::ifstream f2(tmp.path / "again.grdm", std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {});
    const std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
}

TEST_CASE("validation files carry subtask labels") {
    TempDir tmp;
    const auto pool = small_pool(2);
    const auto path = tmp.path / "val.grdm";
    io::write_grdm(path, pool.val.grads, &pool.val.subtask_labels);

    const auto val = io::read_validation(path);
    CHECK(val.subtask_labels == pool.val.subtask_labels);
    CHECK(val.grads.data == pool.val.grads.data);

    // a train file is not a validation file
    io::write_grdm(tmp.path / "train.grdm", pool.train);
    CHECK_THROWS_AS(io::read_validation(tmp.path / "train.grdm"), IoError);
}

TEST_CASE("corrupt GRDM files are rejected") {
    TempDir tmp;
    const auto path = tmp.path / "bad.grdm";
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTGRDM---";
    }
    CHECK_THROWS_AS(io::read_grdm(path), IoError);

    const auto pool = small_pool(3);
    const auto good = tmp.path / "good.grdm";
    io::write_grdm(good, pool.train);
    // truncate the payload
    fs::resize_file(good, fs::file_size(good) / 2);
    CHECK_THROWS_AS(io::read_grdm(good), IoError);

    CHECK_THROWS_AS(io::read_grdm(tmp.path / "missing.grdm"), IoError);
}

TEST_CASE("missing sidecar is an IO error") {
    TempDir tmp;
    const auto pool = small_pool(4);
    const auto path = tmp.path / "train.grdm";
    io::write_grdm(path, pool.train);
    fs::remove(io::sidecar_path(path));
    CHECK_THROWS_AS(io::read_grdm(path), IoError);
}

TEST_CASE("clustering round trip") {
    TempDir tmp;
    const auto pool = small_pool(5);
    const auto clustering = spherical_kmeans(pool.train, 4, 9);
    const auto path = tmp.path / "clustering.json";
    io::write_clustering(path, clustering);

    const auto back = io::read_clustering(path);
    CHECK(back.k == clustering.k);
    CHECK(back.assignments == clustering.assignments);
    CHECK(back.sizes == clustering.sizes);
    CHECK(back.dim == clustering.dim);
    back.validate(pool.train.rows);
}

TEST_CASE("drawlog and selection serialization") {
    TempDir tmp;
    const auto pool = small_pool(6);
    const auto clustering = spherical_kmeans(pool.train, 3, 1);
    const auto influences = compute_influences(pool.train, pool.val);
    const PrecomputedInfluence oracle(influences);

    BanditConfig cfg;
    cfg.budget = 20;
    cfg.seed = 4;
    const auto log = run_bandit(clustering, oracle, cfg);

    io::write_drawlog(tmp.path / "draws.jsonl", log, pool.train.ids);
    io::write_drawlog_summary(tmp.path / "summary.json", log, cfg);
    const auto sel = final_select(log, 5, pool.train.ids);
    io::write_selection(tmp.path / "selection.json", sel);

    std::ifstream in(tmp.path / "draws.jsonl");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        CHECK(line.find("\"sample_id\"") != std::string::npos);
    }
    CHECK(lines == 20);
    CHECK(fs::file_size(tmp.path / "summary.json") > 0);
    CHECK(fs::file_size(tmp.path / "selection.json") > 0);
}
