#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "tsstn/baselines.hpp"
#include "tsstn/core.hpp"
#include "tsstn/model.hpp"

#include "json.hpp"

namespace tsstn {

inline constexpr char kArtifactMagic[8] = {'T', 'S', 'S', 'T', 'N', 'M', 'D', 'L'};
inline constexpr std::uint32_t kArtifactVersion = 1;

enum class ModelKind : std::uint32_t {
    kTsstn = 0,
    kFullyConnected = 1,
    kLogisticAll = 2,
    kHeuristic = 3,
};

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::kTsstn: return "tsstn";
        case ModelKind::kFullyConnected: return "fc";
        case ModelKind::kLogisticAll: return "lr";
        case ModelKind::kHeuristic: return "heuristic";
    }
    return "?";
}

namespace persist_detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    put_u64(out, bits);
}

inline void put_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
}

struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw ModelError("artifact truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, sizeof(d));
        return d;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
        pos += n;
        return s;
    }
};

inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline void put_norm_stats(std::vector<std::uint8_t>& out, const NormStats& s) {
    out.push_back(s.fitted ? 1 : 0);
    auto mm = [&](const MinMax& m) {
        put_f64(out, m.min);
        put_f64(out, m.max);
    };
    mm(s.gold_diff);
    mm(s.kill_diff);
    mm(s.tower_diff);
    for (const MinMax& m : s.soldier) mm(m);
    mm(s.t_min);
}

inline NormStats read_norm_stats(Reader& r) {
    NormStats s;
    r.need(1);
    s.fitted = r.buf[r.pos++] != 0;
    auto mm = [&]() {
        MinMax m;
        m.min = r.f64();
        m.max = r.f64();
        return m;
    };
    s.gold_diff = mm();
    s.kill_diff = mm();
    s.tower_diff = mm();
    for (MinMax& m : s.soldier) m = mm();
    s.t_min = mm();
    return s;
}

template <typename M>
void put_tensors(std::vector<std::uint8_t>& out, M& model) {
    std::uint32_t count = 0;
    model.for_each_param("", [&](const std::string&, nn::Tensor1&, const std::vector<std::size_t>&) {
        ++count;
    });
    put_u32(out, count);
    model.for_each_param("", [&](const std::string& name, nn::Tensor1& v,
                                 const std::vector<std::size_t>& shape) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        put_bytes(out, name.data(), name.size());
        put_u32(out, static_cast<std::uint32_t>(shape.size()));
        for (std::size_t d : shape) put_u64(out, d);
        for (double x : v) put_f64(out, x);
    });
}

template <typename M>
void read_tensors(Reader& r, M& model) {
    struct Target {
        nn::Tensor1* v;
        std::vector<std::size_t> shape;
        bool seen = false;
    };
    std::map<std::string, Target> targets;
    model.for_each_param("", [&](const std::string& name, nn::Tensor1& v,
                                 const std::vector<std::size_t>& shape) {
        targets[name] = Target{&v, shape, false};
    });

    std::uint32_t count = r.u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string name = r.str(r.u32());
        std::uint32_t ndims = r.u32();
        std::vector<std::size_t> shape(ndims);
        std::size_t total = 1;
        for (auto& d : shape) {
            d = static_cast<std::size_t>(r.u64());
            total *= d;
        }
        auto it = targets.find(name);
        if (it == targets.end()) throw ModelError("artifact has unknown tensor: " + name);
        if (it->second.shape != shape) throw ModelError("artifact tensor shape mismatch: " + name);
        if (it->second.v->size() != total) throw ModelError("artifact tensor size mismatch: " + name);
        for (double& x : *it->second.v) x = r.f64();
        it->second.seen = true;
    }
    for (const auto& [name, t] : targets) {
        if (!t.seen) throw ModelError("artifact missing tensor: " + name);
    }
}

template <typename M>
void write_artifact(const std::string& path, ModelKind kind, const nlohmann::ordered_json& config,
                    const NormStats& stats, M* model) {
    std::vector<std::uint8_t> out;
    put_bytes(out, kArtifactMagic, sizeof(kArtifactMagic));
    put_u32(out, kArtifactVersion);
    put_u32(out, static_cast<std::uint32_t>(kind));
    std::string cfg_text = config.dump();
    put_u64(out, cfg_text.size());
    put_bytes(out, cfg_text.data(), cfg_text.size());
    put_norm_stats(out, stats);
    if (model) {
        put_tensors(out, *model);
    } else {
        put_u32(out, 0);
    }
    put_u64(out, fnv1a64(out.data(), out.size()));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot write artifact: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw ModelError("artifact write failed: " + path);
}

}  // namespace persist_detail

inline nlohmann::ordered_json spatial_config_to_json(const SpatialConfig& cfg) {
    nlohmann::ordered_json j;
    j["hero_vocab"] = cfg.hero_vocab;
    j["dropout"] = cfg.dropout_rate;
    j["wild_hidden"] = cfg.wild_hidden;
    j["soldier_hidden"] = cfg.soldier_hidden;
    j["heroes_hidden"] = cfg.heroes_hidden;
    return j;
}

inline SpatialConfig spatial_config_from_json(const nlohmann::json& j) {
    SpatialConfig cfg;
    cfg.hero_vocab = j.at("hero_vocab").get<int>();
    cfg.dropout_rate = j.at("dropout").get<double>();
    cfg.wild_hidden = j.at("wild_hidden").get<std::vector<std::size_t>>();
    cfg.soldier_hidden = j.at("soldier_hidden").get<std::vector<std::size_t>>();
    cfg.heroes_hidden = j.at("heroes_hidden").get<std::vector<std::size_t>>();
    return cfg;
}

inline void save_model(const TsstnModel& model, const std::string& path,
                       nlohmann::ordered_json meta = {}) {
    nlohmann::ordered_json cfg = spatial_config_to_json(model.spatial.cfg);
    cfg["kind"] = "tsstn";
    cfg["tie_seed"] = model.tie_seed;
    if (!meta.empty()) cfg["meta"] = meta;
    TsstnModel copy = model;  // for_each_param is non-const; tensors are copied verbatim
    persist_detail::write_artifact(path, ModelKind::kTsstn, cfg, model.stats, &copy);
}

inline void save_model(const AllFeatureModel& model, ModelKind kind, const std::string& path,
                       nlohmann::ordered_json meta = {}) {
    if (kind != ModelKind::kFullyConnected && kind != ModelKind::kLogisticAll) {
        throw ModelError("save_model: AllFeatureModel must be saved as fc or lr");
    }
    nlohmann::ordered_json cfg = spatial_config_to_json(model.cfg);
    cfg["kind"] = model_kind_name(kind);
    cfg["tie_seed"] = model.tie_seed;
    std::vector<std::size_t> dims;
    for (const auto& layer : model.mlp.hidden) dims.push_back(layer.out_dim());
    cfg["hidden_dims"] = dims;
    if (!meta.empty()) cfg["meta"] = meta;
    AllFeatureModel copy = model;
    persist_detail::write_artifact(path, kind, cfg, model.stats, &copy);
}

inline void save_model(const HeuristicModel& model, const std::string& path,
                       nlohmann::ordered_json meta = {}) {
    nlohmann::ordered_json cfg;
    cfg["kind"] = "heuristic";
    cfg["tie_seed"] = model.tie_seed;
    if (!meta.empty()) cfg["meta"] = meta;
    NormStats stats;  // heuristic carries no statistics
    persist_detail::write_artifact<TsstnModel>(path, ModelKind::kHeuristic, cfg, stats, nullptr);
}

struct Artifact {
    ModelKind kind = ModelKind::kTsstn;
    nlohmann::json config;
    std::variant<TsstnModel, AllFeatureModel, HeuristicModel> model{TsstnModel{}};
};

inline Artifact load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot open artifact: " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (buf.size() < sizeof(kArtifactMagic) + 4 + 8 ||
        std::memcmp(buf.data(), kArtifactMagic, sizeof(kArtifactMagic)) != 0) {
        throw ModelError("not a model artifact: " + path);
    }
    std::uint64_t stored_sum = 0;
    for (int i = 0; i < 8; ++i)
        stored_sum |= static_cast<std::uint64_t>(buf[buf.size() - 8 + i]) << (8 * i);
    if (persist_detail::fnv1a64(buf.data(), buf.size() - 8) != stored_sum) {
        throw ModelError("artifact checksum mismatch (corrupted file): " + path);
    }

    persist_detail::Reader r{buf};
    r.pos = sizeof(kArtifactMagic);
    std::uint32_t version = r.u32();
    if (version != kArtifactVersion) {
        throw ModelError("artifact version " + std::to_string(version) +
                         " not supported; this build reads version " +
                         std::to_string(kArtifactVersion));
    }

    Artifact art;
    art.kind = static_cast<ModelKind>(r.u32());
    std::string cfg_text = r.str(static_cast<std::size_t>(r.u64()));
    art.config = nlohmann::json::parse(cfg_text, nullptr, false);
    if (art.config.is_discarded()) throw ModelError("artifact config is not valid JSON");
    NormStats stats = persist_detail::read_norm_stats(r);

    switch (art.kind) {
        case ModelKind::kTsstn: {
            TsstnModel m(spatial_config_from_json(art.config));
            m.stats = stats;
            m.tie_seed = art.config.value("tie_seed", 0ULL);
            persist_detail::read_tensors(r, m);
            art.model = std::move(m);
            break;
        }
        case ModelKind::kFullyConnected:
        case ModelKind::kLogisticAll: {
            AllFeatureModel m(spatial_config_from_json(art.config),
                              art.config.at("hidden_dims").get<std::vector<std::size_t>>());
            m.stats = stats;
            m.tie_seed = art.config.value("tie_seed", 0ULL);
            persist_detail::read_tensors(r, m);
            art.model = std::move(m);
            break;
        }
        case ModelKind::kHeuristic: {
            HeuristicModel m;
            m.tie_seed = art.config.value("tie_seed", 0ULL);
            std::uint32_t n = r.u32();
            if (n != 0) throw ModelError("heuristic artifact must carry no tensors");
            art.model = m;
            break;
        }
        default:
            throw ModelError("artifact has unknown model kind");
    }
    return art;
}

inline bool artifact_predict_blue(const Artifact& art, const Frame& f) {
    return std::visit(
        [&](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HeuristicModel>) {
                return m.predict_blue(f);
            } else {
                return m.predict_binary(group_features(f));
            }
        },
        art.model);
}

inline double artifact_predict_p(const Artifact& art, const Frame& f) {
    return std::visit([&](const auto& m) -> double { return m.predict_p(group_features(f)); },
                      art.model);
}

}  // namespace tsstn
