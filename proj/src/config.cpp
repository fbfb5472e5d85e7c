#include "dse/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "dse/errors.hpp"

namespace dse::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

struct RawEntry {
    std::string value;
    int line = 0;
};

using RawMap = std::map<std::string, RawEntry>;

RawMap tokenize(const std::string& text, const std::string& origin) {
    RawMap out;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected `key = value`, got: " + stripped);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": empty key");
        if (out.count(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": duplicate key `" + key + "`");
        out[key] = RawEntry{value, line_no};
    }
    return out;
}

class Extractor {
public:
    Extractor(RawMap raw, std::string origin)
        : raw_(std::move(raw)), origin_(std::move(origin)) {}

    bool has(const std::string& key) const { return raw_.count(key) > 0; }

    std::string take_string(const std::string& key, const std::string& fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string value = it->second.value;
        raw_.erase(it);
        return value;
    }

    double take_double(const std::string& key, double fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second.value, &used);
            if (used != it->second.value.size()) throw std::invalid_argument("trailing");
            raw_.erase(it);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(at(it) + ": `" + key + "` is not a number: " +
                              it->second.value);
        }
    }

    std::int64_t take_int(const std::string& key, std::int64_t fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(it->second.value, &used);
            if (used != it->second.value.size()) throw std::invalid_argument("trailing");
            raw_.erase(it);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(at(it) + ": `" + key + "` is not an integer: " +
                              it->second.value);
        }
    }

    std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(it->second.value, &used);
            if (used != it->second.value.size()) throw std::invalid_argument("trailing");
            raw_.erase(it);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(at(it) + ": `" + key +
                              "` is not a non-negative integer: " + it->second.value);
        }
    }

    bool take_bool(const std::string& key, bool fallback) {
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string v = it->second.value;
        raw_.erase(it);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(origin_ + ": `" + key + "` must be true/false, got " + v);
    }

    void reject_unknown(const std::string& skip_prefix = "") const {
        for (const auto& [key, entry] : raw_) {
            if (!skip_prefix.empty() && key.rfind(skip_prefix, 0) == 0) continue;
            throw ConfigError(origin_ + ":" + std::to_string(entry.line) +
                              ": unknown key `" + key + "`");
        }
    }

private:
    std::string at(RawMap::const_iterator it) const {
        return origin_ + ":" + std::to_string(it->second.line);
    }

    RawMap raw_;
    std::string origin_;
};

void validate(const RunConfig& c, const std::string& origin) {
    std::vector<std::string> violations;
    const auto bad = [&](const std::string& message) { violations.push_back(message); };

    if (c.topology_kind != "ring" && c.topology_kind != "complete")
        bad("topology.kind must be ring or complete");
    if (c.topology_kind == "ring" && c.n_nodes < 3)
        bad("topology.nodes: ring needs >= 3 nodes");
    if (c.topology_kind == "complete" && c.n_nodes < 2)
        bad("topology.nodes: complete needs >= 2 nodes");
    if (c.dimension < 1) bad("problem.dimension must be >= 1");
    if (c.samples_per_node < 1) bad("problem.samples_per_node must be >= 1");
    if (!(c.omega > 0.0)) bad("problem.omega must be > 0");
    if (c.label_noise < 0.0) bad("problem.label_noise must be >= 0");
    if (c.l2 < 0.0) bad("problem.l2 must be >= 0");
    if (c.problem_kind == problems::ProblemKind::softmax_classification &&
        c.n_classes < 2)
        bad("problem.classes must be >= 2 for classification");
    if (c.tau < 1) bad("run.tau must be >= 1");
    if (c.batch < 1) bad("run.batch must be >= 1");
    if (c.iterations < 1) bad("run.iterations must be >= 1");
    if (c.tau >= 1 && c.iterations >= 1 &&
        c.algorithm != optimizers::Algorithm::dsgd &&
        c.iterations % c.tau != 0)
        bad("run.iterations: T mod tau != 0");
    if (c.gamma_mode != "constant" && c.gamma_mode != "halving" &&
        c.gamma_mode != "corollary")
        bad("gamma.mode must be constant, halving or corollary");
    if (c.gamma_mode != "corollary" && c.gamma_value < 0.0)
        bad("gamma.value must be >= 0");
    if (c.gamma_mode == "corollary" &&
        (c.gamma_corollary < 1 || c.gamma_corollary > 3))
        bad("gamma.corollary must be 1, 2 or 3");
    if (c.alpha_mode != "constant" && c.alpha_mode != "decay" &&
        c.alpha_mode != "theory" && c.alpha_mode != "corollary")
        bad("alpha.mode must be constant, decay, theory or corollary");
    if ((c.alpha_mode == "constant" || c.alpha_mode == "decay") &&
        !(c.alpha_value > 0.0 && c.alpha_value <= 1.0))
        bad("alpha.value must lie in (0, 1]");
    if (c.alpha_mode == "corollary" &&
        (c.alpha_corollary < 1 || c.alpha_corollary > 3))
        bad("alpha.corollary must be 1, 2 or 3");
    if (c.metrics_cadence < 0) bad("metrics.cadence must be >= 0");
    if (c.L_override < 0.0) bad("theory.L must be >= 0 (0 = estimate)");

    if (!violations.empty()) {
        std::string message = origin + ": invalid config:";
        for (const std::string& v : violations) message += "\n  - " + v;
        throw ConfigError(message);
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    Extractor ex(tokenize(text, origin), origin);
    RunConfig c;
    c.algorithm =
        optimizers::algorithm_from_string(ex.take_string("algorithm", "dse_sgd"));
    c.seed = ex.take_u64("seed", 0);
    c.topology_kind = ex.take_string("topology.kind", "ring");
    c.n_nodes = static_cast<int>(ex.take_int("topology.nodes", 4));
    c.problem_kind = problems::problem_kind_from_string(
        ex.take_string("problem.kind", "least_squares"));
    c.dimension = static_cast<int>(ex.take_int("problem.dimension", 10));
    c.samples_per_node = static_cast<int>(ex.take_int("problem.samples_per_node", 50));
    c.omega = ex.take_double("problem.omega", 1e6);
    c.label_noise = ex.take_double("problem.label_noise", 0.0);
    c.n_classes = static_cast<int>(ex.take_int("problem.classes", 0));
    c.l2 = ex.take_double("problem.l2", 0.0);
    c.tau = ex.take_int("run.tau", 1);
    c.batch = static_cast<int>(ex.take_int("run.batch", 1));
    c.iterations = ex.take_int("run.iterations", 100);
    c.full_batch = ex.take_bool("run.full_batch", false);
    c.mvr_full_reset = ex.take_bool("run.mvr_full_reset", true);
    c.gamma_mode = ex.take_string("gamma.mode", "constant");
    c.gamma_value = ex.take_double("gamma.value", 0.01);
    c.gamma_corollary = static_cast<int>(ex.take_int("gamma.corollary", 2));
    c.alpha_mode = ex.take_string("alpha.mode", "constant");
    c.alpha_value = ex.take_double("alpha.value", 1.0);
    c.alpha_corollary = static_cast<int>(ex.take_int("alpha.corollary", 2));
    c.metrics_cadence = ex.take_int("metrics.cadence", 0);
    c.L_override = ex.take_double("theory.L", 0.0);
    ex.reject_unknown("sweep.");
    validate(c, origin);
    return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

std::string RunConfig::canonical_text() const {
    std::ostringstream out;
    char num[64];
    const auto put = [&](const char* key, double v) {
        std::snprintf(num, sizeof num, "%.17g", v);
        out << key << " = " << num << "\n";
    };
    out << "algorithm = " << optimizers::to_string(algorithm) << "\n";
    out << "seed = " << seed << "\n";
    out << "topology.kind = " << topology_kind << "\n";
    out << "topology.nodes = " << n_nodes << "\n";
    out << "problem.kind = " << problems::to_string(problem_kind) << "\n";
    out << "problem.dimension = " << dimension << "\n";
    out << "problem.samples_per_node = " << samples_per_node << "\n";
    put("problem.omega", omega);
    put("problem.label_noise", label_noise);
    out << "problem.classes = " << n_classes << "\n";
    put("problem.l2", l2);
    out << "run.tau = " << tau << "\n";
    out << "run.batch = " << batch << "\n";
    out << "run.iterations = " << iterations << "\n";
    out << "run.full_batch = " << (full_batch ? "true" : "false") << "\n";
    out << "run.mvr_full_reset = " << (mvr_full_reset ? "true" : "false") << "\n";
    out << "gamma.mode = " << gamma_mode << "\n";
    put("gamma.value", gamma_value);
    out << "gamma.corollary = " << gamma_corollary << "\n";
    out << "alpha.mode = " << alpha_mode << "\n";
    put("alpha.value", alpha_value);
    out << "alpha.corollary = " << alpha_corollary << "\n";
    out << "metrics.cadence = " << metrics_cadence << "\n";
    put("theory.L", L_override);
    return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string text = config.canonical_text();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash_hex(const RunConfig& config) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    return buffer;
}

}  // namespace dse::harness
