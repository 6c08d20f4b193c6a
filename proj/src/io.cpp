#include "clusterucb/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "clusterucb/errors.hpp"

namespace cucb::io {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'G', 'R', 'D', 'M'};
constexpr std::uint16_t kVersion = 1;

template <class T>
void put_le(std::ofstream& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in) {
    static_assert(std::is_unsigned_v<T>);
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(bytes[i]) << (8 * i);
    }
    return value;
}

void write_payload(std::ofstream& out, const std::vector<float>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    } else {
        for (const float f : data) {
            std::uint32_t bits;
            std::memcpy(&bits, &f, sizeof(bits));
            put_le(out, bits);
        }
    }
}

void read_payload(std::ifstream& in, std::vector<float>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(float)));
    } else {
        for (float& f : data) {
            const std::uint32_t bits = get_le<std::uint32_t>(in);
            std::memcpy(&f, &bits, sizeof(bits));
        }
    }
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void store_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

json config_echo(const BanditConfig& config) {
    return json{{"budget", config.budget},
                {"cold_start_ratio", config.cold_start_ratio},
                {"selection_ratio", config.selection_ratio},
                {"beta", config.beta},
                {"policy", to_string(config.policy)},
                {"seed", config.seed}};
}

}  // namespace

void write_grdm(const std::filesystem::path& path, const GradientMatrix& m,
                const std::vector<std::string>* subtask_labels) {
    m.validate();
    if (subtask_labels != nullptr && subtask_labels->size() != m.rows) {
        throw ValidationError("subtask label count does not match row count");
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(kMagic, sizeof(kMagic));
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint64_t>(out, m.rows);
    put_le<std::uint64_t>(out, m.cols);
    write_payload(out, m.data);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
    out.close();

    json sidecar{{"ids", m.ids}};
    if (subtask_labels != nullptr) {
        sidecar["subtask_labels"] = *subtask_labels;
    }
    store_json(sidecar_path(path), sidecar);
}

GradientMatrix read_grdm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw IoError(path.string() + " is not a GRDM file");
    }
    const auto version = get_le<std::uint16_t>(in);
    if (version != kVersion) {
        throw IoError(path.string() + ": unsupported GRDM version " +
                      std::to_string(version));
    }
    GradientMatrix m;
    m.rows = get_le<std::uint64_t>(in);
    m.cols = get_le<std::uint64_t>(in);
    if (!in || m.rows == 0 || m.cols == 0) {
        throw IoError(path.string() + ": invalid GRDM header");
    }
    m.data.resize(m.rows * m.cols);
    read_payload(in, m.data);
    if (!in) {
        throw IoError(path.string() + ": truncated GRDM payload");
    }

    const json sidecar = load_json(sidecar_path(path));
    if (!sidecar.contains("ids")) {
        throw IoError(sidecar_path(path).string() + " is missing \"ids\"");
    }
    m.ids = sidecar["ids"].get<std::vector<std::string>>();
    m.validate();
    return m;
}

std::vector<std::string> read_subtask_labels(const std::filesystem::path& path) {
    const json sidecar = load_json(sidecar_path(path));
    if (!sidecar.contains("subtask_labels")) return {};
    return sidecar["subtask_labels"].get<std::vector<std::string>>();
}

ValidationSet read_validation(const std::filesystem::path& path) {
    ValidationSet val;
    val.grads = read_grdm(path);
    val.subtask_labels = read_subtask_labels(path);
    if (val.subtask_labels.empty()) {
        throw IoError(sidecar_path(path).string() +
                      " has no subtask_labels; not a validation file");
    }
    val.validate();
    return val;
}

void write_clustering(const std::filesystem::path& json_path, const Clustering& c) {
    c.validate();
    std::filesystem::path centroid_path = json_path;
    centroid_path.replace_extension(".centroids.grdm");

    GradientMatrix centroids;
    centroids.rows = c.k;
    centroids.cols = c.dim;
    centroids.data.reserve(c.k * c.dim);
    for (const double v : c.centroids) {
        centroids.data.push_back(static_cast<float>(v));
    }
    for (std::size_t i = 0; i < c.k; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "c%05zu", i);
        centroids.ids.emplace_back(buf);
    }
    write_grdm(centroid_path, centroids);

    store_json(json_path, json{{"k", c.k},
                               {"assignments", c.assignments},
                               {"sizes", c.sizes},
                               {"centroid_file", centroid_path.filename().string()}});
}

Clustering read_clustering(const std::filesystem::path& json_path) {
    const json j = load_json(json_path);
    for (const char* key : {"k", "assignments", "sizes", "centroid_file"}) {
        if (!j.contains(key)) {
            throw IoError(json_path.string() + " is missing \"" + key + "\"");
        }
    }
    Clustering c;
    c.k = j["k"].get<std::size_t>();
    c.assignments = j["assignments"].get<std::vector<std::uint32_t>>();
    c.sizes = j["sizes"].get<std::vector<std::size_t>>();

    const std::filesystem::path centroid_path =
        json_path.parent_path() / j["centroid_file"].get<std::string>();
    const GradientMatrix centroids = read_grdm(centroid_path);
    if (centroids.rows != c.k) {
        throw IoError("centroid file row count does not match k");
    }
    c.dim = centroids.cols;
    c.centroids.reserve(centroids.data.size());
    for (const float v : centroids.data) {
        c.centroids.push_back(static_cast<double>(v));
    }
    c.validate();
    return c;
}

void write_drawlog(const std::filesystem::path& jsonl_path, const DrawLog& log,
                   const std::vector<std::string>& ids) {
    std::ofstream out(jsonl_path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + jsonl_path.string());
    }
    for (const DrawRecord& r : log.rounds) {
        if (r.sample >= ids.size()) {
            throw InconsistentInputsError("draw log references a sample outside the id list");
        }
        out << json{{"round", r.round},
                    {"cluster", r.cluster},
                    {"sample_id", ids[r.sample]},
                    {"reward", r.reward}}
                   .dump()
            << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + jsonl_path.string());
    }
}

void write_drawlog_summary(const std::filesystem::path& path, const DrawLog& log,
                           const BanditConfig& config) {
    store_json(path, json{{"rounds", log.rounds.size()},
                          {"per_cluster_draws", log.per_cluster_draws},
                          {"config", config_echo(config)}});
}

void write_selection(const std::filesystem::path& path, const SelectionResult& sel) {
    store_json(path, json{{"target_count", sel.target_count},
                          {"ids", sel.ids},
                          {"rewards", sel.rewards},
                          {"shortfall", sel.shortfall}});
}

void write_report(const std::filesystem::path& path, const EvalReport& report,
                  const ReportMetadata& meta) {
    json per_cluster = json::array();
    for (std::size_t c = 0; c < report.per_cluster.size(); ++c) {
        per_cluster.push_back(json{{"cluster", c},
                                   {"total", report.per_cluster[c].total},
                                   {"drawn", report.per_cluster[c].drawn},
                                   {"true_top", report.per_cluster[c].true_top},
                                   {"selected", report.per_cluster[c].selected}});
    }
    json j{{"per_cluster", per_cluster},
           {"metadata", json{{"config", config_echo(meta.config)},
                             {"pool_size", meta.pool_size},
                             {"k", meta.k}}}};
    if (meta.has_recall) {
        j["r_sample"] = report.r_sample;
        j["r_influence"] = report.r_influence;
        j["negative_denominator"] = report.negative_denominator;
    }
    store_json(path, j);
}

}  // namespace cucb::io
